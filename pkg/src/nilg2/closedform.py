"""Closed-form expressions for adapted-position structures, kept separate
from the generic pipeline so the two can be compared as independent
oracles: the connection endomorphisms, the central and 4-block curvature
components for a diagonal coupling matrix, the self-dual part of the
4-block horizontal curvature, and the polynomial systems that decide the
instanton condition for 1-dimensional commutators.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg, scalars
from .connection import CUSTOM, Connection
from .errors import InputError
from .exterior import KForm, Metric, endo_to_two_form, sd_asd_split
from .g2 import G2Structure
from .instanton import s_matrix
from .liealg import (LieAlgebra, Subspace, basis_vector, is_adapted_position,
                     j_split, split_brackets, tau_map)
from .scalars import EXACT, Scalar

_CENTRAL = (5, 6, 7)


def _thirds(kind):
    if kind == EXACT:
        return Fraction(1, 3), Fraction(2, 3)
    return 1.0 / 3.0, 2.0 / 3.0


def connection_endomorphisms(L: LieAlgebra, g2: G2Structure, lam,
                             tol=None) -> Connection:
    """The covariant derivative endomorphisms of the lambda-family on an
    adapted-position structure, assembled from the split bracket maps and
    the central cross product:

    along u in the 4-block:
      (lam+1)/2 (ad+_u - ad+_u^T) - (lam-1)/2 (ad-_u - ad-_u^T)
      + (lam mu / 3)(ad0_u - ad0_u^T)
    along z central:
      (lam-1)/2 j+(z) - (lam+1)/2 j-(z) + (lam mu / 3) j0(z)
      - (2 mu lam / 3) tau(z).
    """
    if not is_adapted_position(L, tol):
        raise InputError("closed forms need adapted position")
    kind = L.kind
    metric = g2.metric
    mu = s_matrix(L, g2, tol).mu
    third, two_thirds = _thirds(kind)
    plus_l, minus_l, ref_l = split_brackets(L, tol)
    c = Subspace.from_vectors(7, [basis_vector(7, i, kind) for i in _CENTRAL],
                              tol)
    psis = []
    half = Fraction(1, 2) if kind == EXACT else 0.5
    for i in range(1, 8):
        e = basis_vector(7, i, kind)
        if i <= 4:
            total = None
            for lie, coeff in ((plus_l, (lam + 1) * half),
                               (minus_l, -(lam - 1) * half),
                               (ref_l, lam * mu * third)):
                ad = lie.ad(e)
                skew = linalg.mat_sub(ad, linalg.transpose(ad))
                term = linalg.mat_scale(coeff, skew)
                total = term if total is None else linalg.mat_add(total, term)
        else:
            from .liealg import j_map

            jp = j_map(plus_l, metric, c, e)
            jm = j_map(minus_l, metric, c, e)
            j0 = j_map(ref_l, metric, c, e)
            tz = tau_map(g2.phi, c, metric, e)
            total = linalg.mat_add(
                linalg.mat_add(linalg.mat_scale((lam - 1) * half, jp),
                               linalg.mat_scale(-(lam + 1) * half, jm)),
                linalg.mat_add(linalg.mat_scale(lam * mu * third, j0),
                               linalg.mat_scale(-two_thirds * mu * lam, tz)))
        psis.append(total)
    return Connection(tuple(psis), metric, lam, CUSTOM)


def _diagonal_data(L: LieAlgebra, g2: G2Structure, tol=None):
    s = s_matrix(L, g2, tol)
    if not s.is_diagonal(tol):
        raise InputError("closed-form curvature needs a diagonal coupling "
                         "matrix")
    d = {5: s.matrix[0][0], 6: s.matrix[1][1], 7: s.matrix[2][2]}
    return d, s.mu


def central_curvature_closed_form(L: LieAlgebra, g2: G2Structure, lam,
                                  tol=None):
    """The central curvature components for diagonal coupling, as a map
    (alpha, beta) -> 2-form for the even cyclic pairs of (5, 6, 7):

    [ (lam+1)^2/2 d_a d_b - (lam+1)/3 mu lam (d_a + d_b)
      + 2/9 (lam mu)^2 ] j0(e_c)  - (2/3) mu lam j(e_c)
      - (lam-1)^2/4 [j-(e_a), j-(e_b)] - ((2/3) mu lam)^2 tau(e_c).
    """
    kind = L.kind
    metric = g2.metric
    d, mu = _diagonal_data(L, g2, tol)
    third, two_thirds = _thirds(kind)
    quarter = Fraction(1, 4) if kind == EXACT else 0.25
    half = Fraction(1, 2) if kind == EXACT else 0.5
    ninth2 = (Fraction(2, 9) if kind == EXACT else 2.0 / 9.0)
    c = Subspace.from_vectors(7, [basis_vector(7, i, kind) for i in _CENTRAL],
                              tol)
    from .liealg import j_map

    out = {}
    for (a, b, g) in ((5, 6, 7), (6, 7, 5), (7, 5, 6)):
        ea, eb, eg = (basis_vector(7, i, kind) for i in (a, b, g))
        jp_a, jm_a, _ = j_split(L, metric, ea, tol)
        jp_b, jm_b, _ = j_split(L, metric, eb, tol)
        _, _, j0_g = j_split(L, metric, eg, tol)
        jg = j_map(L, metric, c, eg)
        tg = tau_map(g2.phi, c, metric, eg)
        coeff0 = (half * (lam + 1) ** 2 * d[a] * d[b]
                  - third * (lam + 1) * mu * lam * (d[a] + d[b])
                  + ninth2 * (lam * mu) ** 2)
        m = linalg.mat_scale(coeff0, j0_g)
        m = linalg.mat_add(m, linalg.mat_scale(-two_thirds * mu * lam, jg))
        m = linalg.mat_add(m, linalg.mat_scale(
            -quarter * (lam - 1) ** 2, linalg.commutator(jm_a, jm_b)))
        m = linalg.mat_add(m, linalg.mat_scale(
            -(two_thirds * mu * lam) ** 2, tg))
        out[(a, b)] = endo_to_two_form(m, metric, kind)
    return out


def _vector_flat_wedge(u, v, kind):
    terms = []
    for i in range(7):
        if u[i] == 0:
            continue
        for j in range(7):
            if v[j] == 0 or i == j:
                continue
            terms.append(((i + 1, j + 1), u[i] * v[j]))
    return KForm.from_terms(7, 2, terms, kind)


def block_curvature_closed_form(L: LieAlgebra, g2: G2Structure, lam,
                                tol=None):
    """The 4-block curvature components (alpha, beta in 1..4) for diagonal
    coupling, as the sum of a central-support part and a 4-block part:

    central part, coefficients against [j0(e_j), j0(e_k)] and
    [j-(e_j), j-(e_k)]:
      (lam-1)^2/4 d_j d_k - (lam-1)/6 lam mu (d_j + d_k) + (lam mu / 3)^2
      and (lam+1)^2/4;
    4-block part: the quadratic expression in j0, j- with coefficients
      a_l = -(mu lam/3 - (lam+1) d_l / 2)^2,
      b_l = (lam-1)/2 (mu lam/3 - (lam+1) d_l / 2),
      c_l = (lam-1)/2 d_l - mu lam / 3.
    """
    kind = L.kind
    metric = g2.metric
    d, mu = _diagonal_data(L, g2, tol)
    third, two_thirds = _thirds(kind)
    half = Fraction(1, 2) if kind == EXACT else 0.5
    quarter = half * half
    sixth = third * half
    from .liealg import j_map

    c = Subspace.from_vectors(7, [basis_vector(7, i, kind) for i in _CENTRAL],
                              tol)
    js = {}
    for i in _CENTRAL:
        e = basis_vector(7, i, kind)
        jp, jm, j0 = j_split(L, metric, e, tol)
        js[i] = (jp, jm, j0, j_map(L, metric, c, e))

    al = {l: -(mu * lam * third - (lam + 1) * half * d[l]) ** 2
          for l in _CENTRAL}
    bl = {l: (lam - 1) * half * (mu * lam * third - (lam + 1) * half * d[l])
          for l in _CENTRAL}
    cl = {l: (lam - 1) * half * d[l] - mu * lam * third for l in _CENTRAL}

    out = {}
    for alpha in range(1, 5):
        for beta in range(alpha + 1, 5):
            ea = basis_vector(7, alpha, kind)
            eb = basis_vector(7, beta, kind)
            # central-support part
            zeta = KForm.zero(7, 2, kind)
            for (j, k) in ((5, 6), (5, 7), (6, 7)):
                cjk = (quarter * (lam - 1) ** 2 * d[j] * d[k]
                       - sixth * (lam - 1) * lam * mu * (d[j] + d[k])
                       + (third * lam * mu) ** 2)
                m = linalg.mat_add(
                    linalg.mat_scale(cjk, linalg.commutator(js[j][2], js[k][2])),
                    linalg.mat_scale(quarter * (lam + 1) ** 2,
                                     linalg.commutator(js[j][1], js[k][1])))
                val = linalg.metric_dot(metric.matrix,
                                        linalg.mat_vec(m, eb), ea)
                if val != 0:
                    zeta = zeta + KForm.from_terms(7, 2, [((j, k), val)], kind)
            # 4-block part
            eta = KForm.zero(7, 2, kind)
            for l in _CENTRAL:
                jp, jm, j0, jfull = js[l]
                j0a = linalg.mat_vec(j0, ea)
                j0b = linalg.mat_vec(j0, eb)
                jma = linalg.mat_vec(jm, ea)
                jmb = linalg.mat_vec(jm, eb)
                eta = eta + _vector_flat_wedge(j0a, j0b, kind).scale(al[l])
                eta = eta + (_vector_flat_wedge(j0a, jmb, kind)
                             + _vector_flat_wedge(jma, j0b, kind)).scale(bl[l])
                eta = eta - _vector_flat_wedge(jma, jmb, kind).scale(
                    quarter * (lam - 1) ** 2)
                scal = (cl[l] * linalg.metric_dot(metric.matrix, j0a, eb)
                        + (lam + 1) * half
                        * linalg.metric_dot(metric.matrix, jma, eb))
                if scal != 0:
                    eta = eta - endo_to_two_form(jfull, metric, kind).scale(scal)
            out[(alpha, beta)] = zeta + eta
    return out


def block_curvature_selfdual_part(L: LieAlgebra, g2: G2Structure, lam,
                                  tol=None):
    """Closed form for the self-dual part of the 4-block component of the
    curvature (alpha, beta in 1..4):

    sum_l [ (a_l - sum_(s != l) a_s)/2 - (lam-1)^2 m^2 / 8 + c_l d_l ]
            (j0_l)^beta_alpha sigma^+_(l-4)
        + [ b_l + d_l (lam+1)/2 ] (j-_l)^beta_alpha sigma^+_(l-4)
    with (j-_l)^2 = -m_l^2 Id and m^2 = sum m_l^2.
    """
    kind = L.kind
    metric = g2.metric
    d, mu = _diagonal_data(L, g2, tol)
    third, _ = _thirds(kind)
    half = Fraction(1, 2) if kind == EXACT else 0.5
    eighth = half * half * half
    js = {}
    msq = {}
    for i in _CENTRAL:
        e = basis_vector(7, i, kind)
        jp, jm, j0 = j_split(L, metric, e, tol)
        js[i] = (jm, j0)
        jm2 = linalg.mat_mul(jm, jm)
        msq[i] = -jm2[0][0]
        # antiself-dual squares are scalar; verify the defining property
        expected = linalg.mat_scale(-msq[i], linalg.identity(4, scalars.one(kind)))
        block = tuple(tuple(jm2[r][c0] for c0 in range(4)) for r in range(4))
        if not linalg.is_zero_matrix(linalg.mat_sub(block, expected), tol):
            raise InputError("anti-self-dual bracket map does not square "
                             "to a scalar")
    m2 = sum(msq.values())
    al = {l: -(mu * lam * third - (lam + 1) * half * d[l]) ** 2
          for l in _CENTRAL}
    bl = {l: (lam - 1) * half * (mu * lam * third - (lam + 1) * half * d[l])
          for l in _CENTRAL}
    cl = {l: (lam - 1) * half * d[l] - mu * lam * third for l in _CENTRAL}
    from .liealg import sigma_plus

    out = {}
    for alpha in range(1, 5):
        for beta in range(alpha + 1, 5):
            ea = basis_vector(7, alpha, kind)
            eb = basis_vector(7, beta, kind)
            total = KForm.zero(7, 2, kind)
            for l in _CENTRAL:
                jm, j0 = js[l]
                coeff0 = (half * (al[l] - sum(al[s] for s in _CENTRAL if s != l))
                          - eighth * (lam - 1) ** 2 * m2 + cl[l] * d[l])
                coeffm = bl[l] + d[l] * (lam + 1) * half
                # (j)^beta_alpha = g(j e_alpha, e_beta)
                v0 = linalg.metric_dot(metric.matrix,
                                       linalg.mat_vec(j0, ea), eb)
                vm = linalg.metric_dot(metric.matrix,
                                       linalg.mat_vec(jm, ea), eb)
                scal = coeff0 * v0 + coeffm * vm
                if scal != 0:
                    total = total + sigma_plus(l - 4, 7, kind).scale(scal)
            out[(alpha, beta)] = total
    return out


def dim1_instanton_systems(a, b, c, lam) -> bool:
    """The two polynomial systems equivalent to instanton residual
    vanishing for d e^7 = a e^12 + b e^34 + c e^56:

      2 mu^2 lam - 2 mu x lam + 3 x^2 (lam - 1) = 0  for x in (a, b, c)
      -3 (lam-1)^2 (a^2+b^2+c^2) + 2 (2 lam^2 - lam - 3) mu^2 = 0.
    """
    mu = a + b + c
    for x in (a, b, c):
        if 2 * mu * mu * lam - 2 * mu * x * lam + 3 * x * x * (lam - 1) != 0:
            return False
    s2 = a * a + b * b + c * c
    return -3 * (lam - 1) ** 2 * s2 + 2 * (2 * lam ** 2 - lam - 3) * mu * mu == 0
