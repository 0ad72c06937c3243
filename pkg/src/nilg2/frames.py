"""Construction of adapted orthonormal frames.

Everything here manufactures basis changes that fix the model 3-form:
cross-product completions of partial frames, the two quaternion-type
families of structure-preserving maps (a split SO(3) rotation acting on
both 4+3 blocks, and right quaternion multiplication acting on the
4-block only), rational eigenvector machinery, and the two adapted-basis
algorithms (commutator of dimension 1, and calibrated central subspace).

Exact mode only performs rational moves; when a required unit vector or
eigenvector is irrational the functions raise AdaptedBasisError so the
caller can downgrade that run to float mode.

Quaternion identification used throughout (fixed by the self-dual pairing
of the model form and verified by the test suite):
the 4-block (e1, e2, e3, e4) is (1, i, j, k) and the 3-block
(e5, e6, e7) is (j, -k, i).
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from . import linalg, scalars
from .errors import AdaptedBasisError, InputError, NotCoclosed
from .exterior import KForm, Metric, contract, two_form_to_endo, wedge
from .g2 import G2Structure, standard_phi
from .liealg import LieAlgebra, Subspace, basis_vector, flat, sharp
from .scalars import EXACT, FLOAT, Scalar

# -- basis changes -----------------------------------------------------------


def pullback(f, form: KForm) -> KForm:
    """(f* a)(v1..vk) = a(f v1, .., f vk) for a matrix f (columns are the
    images of the basis vectors)."""
    n = form.dim
    if form.degree == 0:
        return form
    cols = [[f[r][c] for r in range(n)] for c in range(n)]
    terms = []
    for idx in itertools.combinations(range(1, n + 1), form.degree):
        val = form.evaluate([cols[i - 1] for i in idx])
        if val != 0:
            terms.append((idx, val))
    return KForm.from_terms(n, form.degree, terms, form.kind)


def transform_lie_algebra(L: LieAlgebra, f, tol=None) -> LieAlgebra:
    """Structure constants in the new basis f_i = (columns of f)."""
    n = L.dim
    if tol is None and L.kind == FLOAT:
        tol = 1e-12
    finv = linalg.inverse(f, tol)
    cols = [[f[r][c] for r in range(n)] for c in range(n)]
    entries = []
    for i in range(n):
        for j in range(i + 1, n):
            br = L.bracket(cols[i], cols[j])
            w = linalg.mat_vec(finv, br)
            for k in range(n):
                if w[k] != 0:
                    entries.append((i + 1, j + 1, k + 1, w[k]))
    return LieAlgebra.from_bracket_entries(n, entries, L.kind)


def transform_subspace(s: Subspace, f, tol=None) -> Subspace:
    finv = linalg.inverse(f, tol)
    return Subspace.from_vectors(
        s.ambient, [linalg.mat_vec(finv, v) for v in s.vectors], tol)


def is_structure_preserving(f, phi: KForm, tol: float | None = None) -> bool:
    """Does the basis change fix the given 3-form?"""
    return (pullback(f, phi) - phi).is_zero(tol)


# -- cross product -----------------------------------------------------------


def cross(u, v, phi: KForm, metric: Metric):
    """The product with g(u x v, w) = phi(u, v, w)."""
    w = contract(list(v), contract(list(u), phi))
    return sharp(w, metric)


# -- quaternion helpers ------------------------------------------------------

#: coordinates of e5, e6, e7 as imaginary quaternions (j, -k, i)
_C_TO_IMH = ((0, 1, 0), (0, 0, -1), (1, 0, 0))  # rows: images in (i,j,k)
# matrix sending (e5,e6,e7)-coordinates to (i,j,k)-coordinates
_B_IMH = tuple(tuple(Fraction(_C_TO_IMH[c][r]) for c in range(3))
               for r in range(3))
_B_IMH_INV = linalg.inverse(_B_IMH)


def quat_mul(p, q):
    w1, x1, y1, z1 = p
    w2, x2, y2, z2 = q
    return (w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2)


def quat_conj(p):
    return (p[0], -p[1], -p[2], -p[3])


def quat_norm2(p):
    return sum(x * x for x in p)


def rotation_from_quaternion(h):
    """Rotation of the imaginary part under x -> h x h^-1; rational for any
    rational quaternion (the norm squared divides out)."""
    n2 = quat_norm2(h)
    w, x, y, z = h
    return tuple(tuple(v / n2 for v in row) for row in (
        (w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)),
        (2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)),
        (2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z),
    ))


def split_rotation_map(r3):
    """The 7x7 basis change acting as the rotation `r3` on the central
    block (e5, e6, e7) and as the matching quaternion conjugation on the
    4-block (fixing e1); structure-preserving for every r3 in SO(3)."""
    r_ijk = linalg.mat_mul(_B_IMH, linalg.mat_mul(r3, _B_IMH_INV))
    zero = r3[0][0] - r3[0][0]
    one = zero + 1
    m = [[zero] * 7 for _ in range(7)]
    m[0][0] = one
    for r in range(3):
        for c in range(3):
            m[1 + r][1 + c] = r_ijk[r][c]
            m[4 + r][4 + c] = r3[r][c]
    return tuple(tuple(row) for row in m)


def right_multiplication_map(p):
    """The 7x7 basis change a -> a p on the 4-block, identity on the
    central block; structure-preserving for unit p.  Sends e1 to the
    vector with quaternion coordinates p."""
    cols = [quat_mul(q, p) for q in
            ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))]
    zero = p[0] - p[0]
    one = zero + 1
    m = [[zero] * 7 for _ in range(7)]
    for c in range(4):
        for r in range(4):
            m[r][c] = cols[c][r] + zero
    for r in range(3):
        m[4 + r][4 + r] = one
    return tuple(tuple(row) for row in m)


def conjugation_map(h):
    """Conjugation a -> h^-1 a h on both blocks (a split rotation)."""
    return split_rotation_map(rotation_from_quaternion(quat_conj(h)))


# -- sums of squares ----------------------------------------------------------


def _factorize(m: int) -> dict:
    fac: dict[int, int] = {}
    t = m
    p = 2
    while p * p <= t:
        while t % p == 0:
            fac[p] = fac.get(p, 0) + 1
            t //= p
        p += 1 if p == 2 else 2
    if t > 1:
        fac[t] = fac.get(t, 0) + 1
    return fac


def _sqrt_minus_one_mod(p: int) -> int:
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return pow(c, (p - 1) // 4, p)
    raise ArithmeticError(f"no quadratic nonresidue found mod {p}")


def _cornacchia(p: int, x: int) -> tuple[int, int]:
    """c^2 + d^2 = p given x^2 = -1 (mod p), by Euclidean descent."""
    import math

    a, b = p, x
    bound = math.isqrt(p)
    while b > bound:
        a, b = b, a % b
    c = b
    d2 = p - c * c
    d = math.isqrt(d2)
    if d * d != d2:
        raise ArithmeticError("descent failed")
    return c, d


def two_squares_int(m: int):
    """(x, y) with x^2 + y^2 = m, or None when no representation exists."""
    if m < 0:
        return None
    if m == 0:
        return (0, 0)
    a, b = 1, 0
    for p, e in _factorize(m).items():
        if p == 2:
            for _ in range(e):
                a, b = a + b, a - b
        elif p % 4 == 3:
            if e % 2:
                return None
            s = p ** (e // 2)
            a, b = a * s, b * s
        else:
            c, d = _cornacchia(p, _sqrt_minus_one_mod(p))
            for _ in range(e):
                a, b = a * c - b * d, a * d + b * c
    return abs(a), abs(b)


def four_squares_int(m: int):
    """(w, x, y, z) with w^2 + x^2 + y^2 + z^2 = m (always exists)."""
    import math

    if m < 0:
        raise ArithmeticError("negative input")
    if m == 0:
        return (0, 0, 0, 0)
    for w in range(math.isqrt(m), -1, -1):
        rest = m - w * w
        for x in range(math.isqrt(rest), -1, -1):
            t = two_squares_int(rest - x * x)
            if t is not None:
                return (w, x, t[0], t[1])
    raise ArithmeticError("unreachable by Lagrange's theorem")


def _two_squares_fraction(n: Fraction):
    """(c, d) rational with c^2 + d^2 = n, or None."""
    m = n.numerator * n.denominator
    t = two_squares_int(m)
    if t is None:
        return None
    return Fraction(t[0], n.denominator), Fraction(t[1], n.denominator)


def _four_squares_fraction(n: Fraction):
    m = n.numerator * n.denominator
    t = four_squares_int(m)
    return tuple(Fraction(x, n.denominator) for x in t)


def unit_in_complex_plane(v, jmat, metric: Metric):
    """Rational unit vector in the plane spanned by (v, J v) for a
    metric-compatible complex structure J; exists iff |v|^2 is a sum of
    two rational squares.  Returns None otherwise."""
    n = Fraction(metric.inner(v, v))
    if n == 0:
        return None
    cd = _two_squares_fraction(n)
    if cd is None:
        return None
    c, d = cd
    jv = linalg.mat_vec(jmat, v)
    return tuple((c * a + d * b) / n for a, b in zip(v, jv))


def unit_in_quaternionic_block(v, j1, j2, j3, metric: Metric):
    """Rational unit vector in the orbit span of v under three compatible
    anticommuting complex structures; always exists for rational v != 0
    (Lagrange four-square theorem)."""
    n = Fraction(metric.inner(v, v))
    if n == 0:
        return None
    a, b, c, d = _four_squares_fraction(n)
    v1 = linalg.mat_vec(j1, v)
    v2 = linalg.mat_vec(j2, v)
    v3 = linalg.mat_vec(j3, v)
    return tuple((a * p + b * q + c * r + d * s) / n
                 for p, q, r, s in zip(v, v1, v2, v3))


# -- rational unit vector search ---------------------------------------------


def _normalize_if_square(v, metric: Metric):
    n2 = metric.inner(v, v)
    if n2 == 0:
        return None
    root = scalars.exact_sqrt(Fraction(n2))
    if root is None:
        return None
    return tuple(x / root for x in v)


def find_rational_unit(space: Subspace, metric: Metric,
                       orthogonal_to=(), combo_bound: int = 2):
    """A rational unit vector in `space`, orthogonal to the given vectors,
    or None.  Tries the echelon basis, coordinate projections and small
    integer combinations; completeness is not guaranteed (callers fall
    back to float mode when this returns None)."""
    constrained = space
    for w in orthogonal_to:
        ws = Subspace.from_vectors(space.ambient, [w], space.tol)
        constrained = constrained.intersection(
            ws.orthogonal_complement(metric))
    basis = constrained.vectors
    if not basis:
        return None
    for v in basis:
        u = _normalize_if_square(v, metric)
        if u is not None:
            return u
    # coordinate projections onto the constrained space
    gram = [[metric.inner(a, b) for b in basis] for a in basis]
    try:
        gram_inv = linalg.inverse(gram)
    except Exception:
        gram_inv = None
    if gram_inv is not None:
        for i in range(1, space.ambient + 1):
            e = basis_vector(space.ambient, i, metric.kind)
            rhs = [metric.inner(b, e) for b in basis]
            coeffs = linalg.mat_vec(gram_inv, rhs)
            proj = [sum(c * b[r] for c, b in zip(coeffs, basis))
                    for r in range(space.ambient)]
            if any(x != 0 for x in proj):
                u = _normalize_if_square(tuple(proj), metric)
                if u is not None:
                    return u
    # small integer combinations
    rng = range(-combo_bound, combo_bound + 1)
    for combo in itertools.product(rng, repeat=len(basis)):
        if all(c == 0 for c in combo):
            continue
        v = tuple(sum(c * b[r] for c, b in zip(combo, basis))
                  for r in range(space.ambient))
        u = _normalize_if_square(v, metric)
        if u is not None:
            return u
    return None


# -- frame completion --------------------------------------------------------


def _unit_check(v, metric, label):
    if metric.inner(v, v) != scalars.one(metric.kind):
        raise AdaptedBasisError(f"{label} is not a unit vector")


def cross_matrix(u, phi: KForm, metric: Metric):
    """Matrix of w -> u x w; a complex structure on the orthogonal
    complement of u when u is a unit vector."""
    n = metric.dim
    cols = [cross(u, basis_vector(n, j, metric.kind), phi, metric)
            for j in range(1, n + 1)]
    return linalg.transpose(cols)


def _candidate_vectors(space: Subspace, metric: Metric):
    """Rational vectors worth trying as seeds: the echelon basis and the
    projections of the coordinate vectors."""
    for v in space.vectors:
        yield v
    basis = space.vectors
    if not basis:
        return
    gram = [[metric.inner(a, b) for b in basis] for a in basis]
    try:
        gram_inv = linalg.inverse(gram)
    except Exception:
        return
    for i in range(1, space.ambient + 1):
        e = basis_vector(space.ambient, i, metric.kind)
        rhs = [metric.inner(b, e) for b in basis]
        coeffs = linalg.mat_vec(gram_inv, rhs)
        proj = tuple(sum(c * b[r] for c, b in zip(coeffs, basis))
                     for r in range(space.ambient))
        if any(x != 0 for x in proj):
            yield proj


def _unit_in_plane_of(space: Subspace, jmat, metric: Metric,
                      orthogonal_to=()):
    """Rational unit vector in a J-invariant subspace (J restricted to the
    space squares to -1); complete via the two-square criterion applied to
    candidate seeds."""
    constrained = space
    for w in orthogonal_to:
        ws = Subspace.from_vectors(space.ambient, [w], space.tol)
        constrained = constrained.intersection(ws.orthogonal_complement(metric))
    for v in _candidate_vectors(constrained, metric):
        u = unit_in_complex_plane(v, jmat, metric)
        if u is not None:
            return u
    return None


def complete_frame_dim1(z, phi: KForm, metric: Metric, tol=None):
    """Orthonormal frame (columns) with seventh leg z in which the 3-form
    takes its model shape; built by cross-product completion of a basic
    triple.  The two free choices are made through the cross-product
    complex structures, so they only fail when genuinely irrational."""
    n = 7
    _unit_check(z, metric, "frame seed")
    jz = cross_matrix(z, phi, metric)
    perp = Subspace.from_vectors(n, [tuple(z)], tol).orthogonal_complement(metric)
    f1 = _unit_in_plane_of(perp, jz, metric)
    if f1 is None:
        raise AdaptedBasisError("no rational unit vector orthogonal to the seed")
    f2 = cross(z, f1, phi, metric)
    # the complement of the associative plane <z, f1, f2> carries a
    # quaternionic triple of cross-product structures: always solvable
    assoc = Subspace.from_vectors(n, [tuple(z), f1, f2], tol)
    coassoc = assoc.orthogonal_complement(metric)
    jf1 = cross_matrix(f1, phi, metric)
    jf2 = cross_matrix(f2, phi, metric)
    f3 = None
    for v in _candidate_vectors(coassoc, metric):
        f3 = unit_in_quaternionic_block(v, jz, jf1, jf2, metric)
        if f3 is not None:
            break
    if f3 is None:
        raise AdaptedBasisError("no rational unit vector completing the triple")
    f4 = cross(z, f3, phi, metric)
    f5 = cross(f1, f3, phi, metric)
    f6 = tuple(-x for x in cross(f1, f4, phi, metric))
    frame = linalg.transpose([f1, f2, f3, f4, f5, f6, tuple(z)])
    if not is_structure_preserving(frame, phi, tol):
        raise AdaptedBasisError("cross-product completion failed to "
                                "reproduce the model form")
    return frame


def complete_frame_calibrated(f5, f6, f7, phi: KForm, metric: Metric, tol=None):
    """Orthonormal frame whose central legs are the given oriented
    calibrated triple; the 4-block is completed by cross products (its
    quaternionic structure makes the remaining choice always solvable)."""
    n = 7
    for v, lbl in ((f5, "f5"), (f6, "f6"), (f7, "f7")):
        _unit_check(v, metric, lbl)
    central = Subspace.from_vectors(n, [tuple(f5), tuple(f6), tuple(f7)], tol)
    block = central.orthogonal_complement(metric)
    j5 = cross_matrix(f5, phi, metric)
    j6 = cross_matrix(f6, phi, metric)
    j7 = cross_matrix(f7, phi, metric)
    f1 = None
    for v in _candidate_vectors(block, metric):
        f1 = unit_in_quaternionic_block(v, j5, j6, j7, metric)
        if f1 is not None:
            break
    if f1 is None:
        raise AdaptedBasisError("no rational unit vector orthogonal to the "
                                "central block")
    f2 = cross(f7, f1, phi, metric)
    f3 = cross(f5, f1, phi, metric)
    f4 = cross(f1, f6, phi, metric)
    frame = linalg.transpose([f1, f2, f3, f4, tuple(f5), tuple(f6), tuple(f7)])
    if not is_structure_preserving(frame, phi, tol):
        raise AdaptedBasisError("calibrated completion failed to reproduce "
                                "the model form")
    return frame


# -- exact eigen machinery ---------------------------------------------------


def rational_symmetric_eigenvalues(s, tol_suggest: float = 1e-9):
    """Eigenvalues of an exact symmetric matrix, found by float suggestion
    and exact verification.  Raises AdaptedBasisError when any eigenvalue
    fails to be rational (or to be recognized as such)."""
    import numpy as np

    n = len(s)
    sf = np.array([[float(x) for x in row] for row in s])
    approx = np.linalg.eigvalsh(sf)
    found: list[Fraction] = []
    for x in approx:
        hit = None
        for cap in (10 ** 3, 10 ** 6, 10 ** 9, 10 ** 12):
            cand = scalars.rationalize(float(x), cap)
            shifted = [[s[i][j] - (cand if i == j else 0) for j in range(n)]
                       for i in range(n)]
            if linalg.det(shifted) == 0:
                hit = cand
                break
        if hit is None:
            raise AdaptedBasisError(f"eigenvalue near {x} is not rational")
        if hit not in found:
            found.append(hit)
    total = 0
    spaces = {}
    for lam in found:
        shifted = [[s[i][j] - (lam if i == j else 0) for j in range(n)]
                   for i in range(n)]
        ker = linalg.kernel_basis(shifted)
        spaces[lam] = ker
        total += len(ker)
    if total != n:
        raise AdaptedBasisError("eigenspaces do not fill the space; "
                                "irrational spectrum")
    return found, spaces


def jacobi_eigen_symmetric(s, tol: float = 1e-14, max_sweeps: int = 60):
    """Classical Jacobi rotation diagonalization of a small float
    symmetric matrix; returns (eigenvector columns, eigenvalues).  Used by
    the float path of the coupling-matrix diagonalization."""
    import math

    n = len(s)
    a = [[float(x) for x in row] for row in s]
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    for _ in range(max_sweeps):
        off = sum(a[p][q] ** 2 for p in range(n) for q in range(p + 1, n))
        if off <= tol * tol:
            break
        for p in range(n):
            for q in range(p + 1, n):
                if abs(a[p][q]) <= tol:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q])
                t = (1.0 if theta >= 0 else -1.0) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = c * akp - sn * akq
                    a[k][q] = sn * akp + c * akq
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = c * apk - sn * aqk
                    a[q][k] = sn * apk + c * aqk
                for k in range(n):
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = c * vkp - sn * vkq
                    v[k][q] = sn * vkp + c * vkq
    values = tuple(a[i][i] for i in range(n))
    return tuple(tuple(row) for row in v), values


def orthonormal_eigenbasis_3x3(s):
    """Rational orthonormal eigenbasis columns q (det +1) and eigenvalues d
    with s = q diag(d) q^T, or AdaptedBasisError."""
    metric3 = Metric.euclidean(3)
    values, spaces = rational_symmetric_eigenvalues(s)
    cols = []
    vals = []
    for lam in sorted(values, reverse=True):
        space = Subspace.from_vectors(3, spaces[lam])
        picked = []
        while len(picked) < space.dim:
            u = find_rational_unit(space, metric3,
                                   orthogonal_to=picked, combo_bound=3)
            if u is None:
                raise AdaptedBasisError("eigenvector is not rational")
            picked.append(u)
            cols.append(u)
            vals.append(lam)
    q = linalg.transpose(cols)
    if linalg.det(q) < 0:
        q = tuple(tuple(-row[0] if c == 0 else row[c] for c in range(3))
                  for row in q)
        # flipped first column; recompute column list order invariant
    return q, vals


# -- adapted basis, commutator of dimension 1 --------------------------------


def _pair_order_key(value):
    # largest magnitude first; nonnegative before negative on ties
    return (-abs(value), 0 if value >= 0 else 1)


def _dim1_normal_form_params(L: LieAlgebra):
    """If the structure constants already have the shape d e^7 =
    a e^12 + b e^34 + c e^56 (others closed), return (a, b, c)."""
    for m in range(1, 7):
        if not L.d1(m).is_zero():
            return None
    d7 = L.d1(7)
    allowed = {(1, 2), (3, 4), (5, 6)}
    if any(idx not in allowed for idx in d7.coeffs):
        return None
    return (d7.coefficient((1, 2)), d7.coefficient((3, 4)),
            d7.coefficient((5, 6)))


def adapted_basis_dim1(L: LieAlgebra, g2: G2Structure, tol=None):
    """Orthonormal basis change bringing a coclosed structure with
    1-dimensional commutator to the shape d e^7 = a e^12 + b e^34 + c e^56
    with the model 3-form; returns (frame, (a, b, c)).

    The construction rotates the seventh leg into the commutator, splits
    the complement into eigenplanes of the compatible symmetric map, and
    corrects the residual phase rationally.  Raises AdaptedBasisError when
    a rational move does not exist; raises NotCoclosed when the structure
    is not coclosed.
    """
    metric = g2.metric
    kind = L.kind
    params = _dim1_normal_form_params(L)
    if params is not None:
        dpsi = L.differential(g2.psi)
        if not dpsi.is_zero(tol):
            raise NotCoclosed("structure is not coclosed")
        return linalg.identity(7, scalars.one(kind)), params

    gprime = L.commutator_subspace(tol)
    if gprime.dim != 1:
        raise InputError("adapted basis for commutator dimension 1 only")
    if not L.differential(g2.psi).is_zero(tol):
        raise NotCoclosed("structure is not coclosed")

    z = _normalize_if_square(gprime.vectors[0], metric)
    if z is None:
        raise AdaptedBasisError("commutator direction has irrational length")
    frame0 = complete_frame_dim1(z, g2.phi, metric, tol)
    L0 = transform_lie_algebra(L, frame0, tol)

    # the 6x6 block: a = -j(e7) identified with d e^7, complex structure
    # from the Kaehler form of the model
    omega = KForm.from_terms(7, 2, [((1, 2), 1), ((3, 4), 1), ((5, 6), 1)], kind)
    jmat = two_form_to_endo(omega, metric)
    amat = two_form_to_endo(L0.d1(7), metric)
    comm = linalg.commutator(amat, jmat)
    if not linalg.is_zero_matrix(comm, tol):
        raise NotCoclosed("compatibility [A, J] = 0 fails; structure is "
                          "not coclosed")
    h6 = linalg.mat_scale(scalars.promote(-1, kind), linalg.mat_mul(jmat, amat))
    block = tuple(tuple(h6[i][j] for j in range(6)) for i in range(6))
    values, spaces = rational_symmetric_eigenvalues(block)
    metric6 = Metric.euclidean(6)

    jmat6 = tuple(tuple(jmat[i][j] for j in range(6)) for i in range(6))
    pairs = []  # (eigenvalue, u, Ju) in ambient 7-coordinates
    for lam in values:
        space6 = Subspace.from_vectors(6, spaces[lam])
        picked: list = []
        for _ in range(space6.dim // 2):
            u6 = _unit_in_plane_of(space6, jmat6, metric6, orthogonal_to=picked)
            if u6 is None:
                raise AdaptedBasisError("eigenplane has no rational unit vector")
            u = tuple(u6) + (scalars.zero(kind),)
            ju = linalg.mat_vec(jmat, u)
            picked.append(u6)
            picked.append(tuple(ju[:6]))
            pairs.append((lam, u, ju))
    if len(pairs) != 3:
        raise AdaptedBasisError("eigenplane decomposition did not yield "
                                "three planes")
    pairs.sort(key=lambda p: _pair_order_key(p[0]))

    # rational phase correction on the third plane so the model 3-form is
    # reproduced exactly
    u1, u3 = pairs[0][1], pairs[2][1]
    u2 = pairs[1][1]
    phi0 = pullback(frame0, g2.phi)  # = model form
    cval = phi0.evaluate([u1, u2, u3])
    sval = phi0.evaluate([u1, u2, pairs[2][2]])
    if cval * cval + sval * sval != scalars.one(kind):
        raise AdaptedBasisError("phase defect is not a unit; input is not "
                                "structure-compatible")
    new_u3 = tuple(cval * a + sval * b for a, b in zip(u3, pairs[2][2]))
    new_ju3 = linalg.mat_vec(jmat, new_u3)
    pairs[2] = (pairs[2][0], new_u3, new_ju3)

    cols = []
    for lam, u, ju in pairs:
        cols.append(u)
        cols.append(ju)
    cols.append(basis_vector(7, 7, kind))
    frame1 = linalg.transpose(cols)
    frame = linalg.mat_mul(frame0, frame1)
    if not is_structure_preserving(frame, g2.phi, tol):
        raise AdaptedBasisError("adapted frame failed the exact form check")
    L1 = transform_lie_algebra(L, frame, tol)
    params = _dim1_normal_form_params(L1)
    if params is None:
        raise AdaptedBasisError("adapted frame did not normalize the "
                                "structure constants")
    return frame, params


# -- adapted basis, calibrated central subspace -------------------------------


def calibrated_central_frame(L: LieAlgebra, g2: G2Structure, tol=None):
    """Frame whose central legs (f5, f6, f7) span a calibrated subspace c
    with commutator <= c <= center, and whose pullback fixes the model
    form.  Works for commutator dimension 2 (extended by the cross-product
    vector, checked central) and 3."""
    metric = g2.metric
    gprime = L.commutator_subspace(tol)
    center = L.center_subspace(tol)
    if gprime.dim == 3:
        f5 = find_rational_unit(gprime, metric)
        if f5 is None:
            raise AdaptedBasisError("no rational unit vector in the commutator")
        # the orthogonal plane inside a calibrated 3-space carries the
        # cross-with-f5 complex structure
        f6 = _unit_in_plane_of(gprime, cross_matrix(f5, g2.phi, metric),
                               metric, orthogonal_to=[f5])
        if f6 is None:
            f6 = find_rational_unit(gprime, metric, orthogonal_to=[f5])
        if f6 is None:
            raise AdaptedBasisError("no rational orthonormal pair in the "
                                    "commutator")
        f7 = cross(f5, f6, g2.phi, metric)
        if not gprime.contains(f7, tol):
            raise AdaptedBasisError("commutator is not closed under the "
                                    "cross product (not calibrated)")
        if metric.inner(f7, f7) != scalars.one(metric.kind):
            raise AdaptedBasisError("cross-product vector is not a unit "
                                    "(subspace not calibrated)")
    elif gprime.dim == 2:
        f6 = find_rational_unit(gprime, metric)
        if f6 is None:
            raise AdaptedBasisError("no rational unit vector in the commutator")
        f7 = _unit_in_plane_of(gprime, cross_matrix(f6, g2.phi, metric),
                               metric, orthogonal_to=[f6])
        if f7 is None:
            f7 = find_rational_unit(gprime, metric, orthogonal_to=[f6])
        if f7 is None:
            raise AdaptedBasisError("no rational orthonormal pair in the "
                                    "commutator")
        f5 = cross(f6, f7, g2.phi, metric)
        if not center.contains(f5, tol):
            raise AdaptedBasisError("cross-product extension of the "
                                    "commutator is not central")
    else:
        raise InputError("calibrated frame needs commutator dimension 2 or 3")
    for v in (f5, f6, f7):
        if not center.contains(v, tol):
            raise AdaptedBasisError("central block is not central")
    return complete_frame_calibrated(f5, f6, f7, g2.phi, metric, tol)


def random_structure_preserving_map(rng: random.Random, kind: str = EXACT):
    """Random exact basis change fixing the model 3-form, composed from
    split rotations (arbitrary integer quaternions act by conjugation) and
    right multiplications by unit rational quaternions."""
    pythagorean = [
        (1, 2, 2, 4), (2, 3, 6, 0), (1, 4, 8, 0), (2, 6, 9, 0),
        (1, 2, 8, 10), (4, 4, 7, 0), (3, 4, 12, 0), (2, 10, 11, 0),
    ]
    m = linalg.identity(7, scalars.one(kind))
    for _ in range(rng.randint(1, 3)):
        if rng.random() < 0.5:
            h = tuple(Fraction(rng.randint(-4, 4)) for _ in range(4))
            if all(x == 0 for x in h):
                h = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
            m = linalg.mat_mul(m, conjugation_map(h))
        else:
            quad = list(rng.choice(pythagorean))
            rng.shuffle(quad)
            signs = [rng.choice((-1, 1)) for _ in range(4)]
            norm = scalars.exact_sqrt(Fraction(sum(x * x for x in quad)))
            p = tuple(Fraction(s * x, 1) / norm for s, x in zip(signs, quad))
            m = linalg.mat_mul(m, right_multiplication_map(p))
    return m
