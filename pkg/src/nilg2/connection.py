"""Metric connections as endomorphism-valued 1-forms.

A connection is stored as the seven skew endomorphisms nabla_{e_i}; the
Levi-Civita connection comes from the Koszul formula, and the lambda
family adds lambda/2 times the characteristic torsion.  Curvature is
computed both as commutators of covariant derivatives and as
d Psi + Psi ^ Psi, and the two must agree (this equality doubles as the
module's primary internal oracle).  Holonomy algebras are obtained by
bracket closure of the curvature endomorphisms together with closure
under the adjoint action of the connection endomorphisms, the invariant
form of the Ambrose-Singer construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg, scalars
from .errors import InputError, KindMismatch
from .exterior import KForm, Metric, endo_to_two_form, wedge
from .g2 import G2Structure, char_torsion
from .liealg import LieAlgebra, Subspace, basis_vector
from .scalars import EXACT, FLOAT, Scalar

LEVI_CIVITA = "levi_civita"
NABLA_LAMBDA = "nabla_lambda"
CUSTOM = "custom"


@dataclass(frozen=True)
class Connection:
    """psi[i] is the matrix of the covariant derivative along e_{i+1}."""

    psi: tuple
    metric: Metric
    lam: Scalar | None
    provenance: str

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def kind(self) -> str:
        return self.metric.kind

    def endo(self, i: int):
        """Covariant derivative along the basis vector e_i (1-based)."""
        return self.psi[i - 1]

    def derivative_along(self, x: Sequence[Scalar]):
        n = self.dim
        zero = scalars.zero(self.kind)
        out = [[zero] * n for _ in range(n)]
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            p = self.psi[i]
            for r in range(n):
                for s in range(n):
                    if p[r][s] != 0:
                        out[r][s] += xi * p[r][s]
        return tuple(tuple(row) for row in out)

    def one_form_entry(self, alpha: int, beta: int) -> KForm:
        """The 1-form Psi^alpha_beta = sum_i g(nabla_{e_i} e_beta, e_alpha) e^i."""
        g = self.metric.matrix
        terms = []
        for i in range(self.dim):
            col = [self.psi[i][r][beta - 1] for r in range(self.dim)]
            val = linalg.dot(linalg.mat_vec(g, col),
                             basis_vector(self.dim, alpha, self.kind))
            if val != 0:
                terms.append(((i + 1,), val))
        return KForm.from_terms(self.dim, 1, terms, self.kind)


def levi_civita(L: LieAlgebra, metric: Metric) -> Connection:
    """Koszul formula: 2 g(nabla_{e_i} e_j, e_k) =
    g([e_i,e_j], e_k) + g([e_k,e_i], e_j) + g([e_k,e_j], e_i)."""
    n = L.dim
    if metric.dim != n:
        raise InputError("metric and algebra dimensions differ")
    if metric.kind != L.kind:
        raise KindMismatch("metric and algebra of different scalar kind")
    g = metric.matrix
    half = Fraction(1, 2) if L.kind == EXACT else 0.5
    basis = [basis_vector(n, i + 1, L.kind) for i in range(n)]
    ginv = None if metric.is_identity() else metric.inverse_matrix()
    psis = []
    for i in range(n):
        rows = []
        for k in range(n):
            row = []
            for j in range(n):
                bij = L.bracket(basis[i], basis[j])
                bki = L.bracket(basis[k], basis[i])
                bkj = L.bracket(basis[k], basis[j])
                val = (linalg.metric_dot(g, bij, basis[k])
                       + linalg.metric_dot(g, bki, basis[j])
                       + linalg.metric_dot(g, bkj, basis[i])) * half
                row.append(val)
            rows.append(tuple(row))
        lowered = tuple(rows)  # (g nabla)_kj
        psis.append(lowered if ginv is None else linalg.mat_mul(ginv, lowered))
    return Connection(tuple(psis), metric, scalars.zero(L.kind), LEVI_CIVITA)


def torsion_endomorphisms(T: KForm, metric: Metric):
    """For a 3-form T, the skew maps T_i with g(T_i y, z) = T(e_i, y, z)."""
    n = metric.dim
    zero = scalars.zero(T.kind)
    ginv = None if metric.is_identity() else metric.inverse_matrix()
    out = []
    for i in range(1, n + 1):
        m = [[zero] * n for _ in range(n)]
        for (a, b, c), coeff in T.coeffs.items():
            for (x, y, z, sign) in (((a), b, c, 1), ((b), a, c, -1), ((c), a, b, 1)):
                if x != i:
                    continue
                # T(e_i, e_y, e_z) = sign * coeff with (y, z) increasing
                m[z - 1][y - 1] += sign * coeff
                m[y - 1][z - 1] -= sign * coeff
        mt = tuple(tuple(row) for row in m)
        out.append(mt if ginv is None else linalg.mat_mul(ginv, mt))
    return tuple(out)


def nabla_lambda(L: LieAlgebra, g2: G2Structure, lam: Scalar,
                 tol: float | None = None) -> Connection:
    """g(nabla^lam_x y, z) = g(nabla^g_x y, z) + (lam/2) T(x, y, z) where T
    is the characteristic torsion; requires tau2 = 0."""
    lam = scalars.promote(lam, L.kind)
    T = char_torsion(g2, L, tol)
    lc = levi_civita(L, g2.metric)
    half = lam / 2
    tends = torsion_endomorphisms(T, g2.metric)
    psis = []
    for i in range(L.dim):
        psis.append(linalg.mat_add(lc.psi[i], linalg.mat_scale(half, tends[i])))
    prov = LEVI_CIVITA if lam == 0 else NABLA_LAMBDA
    return Connection(tuple(psis), g2.metric, lam, prov)


@dataclass(frozen=True)
class CurvatureTensor:
    """components[a][b] (0-based) is the 2-form (R)^{a+1}_{b+1}."""

    components: tuple

    def entry(self, alpha: int, beta: int) -> KForm:
        return self.components[alpha - 1][beta - 1]

    @property
    def dim(self) -> int:
        return self.components[0][0].dim


def curvature_endomorphisms(C: Connection, L: LieAlgebra):
    """R_{e_j, e_k} = -nabla_{[e_j, e_k]} + [nabla_{e_j}, nabla_{e_k}],
    keyed by (j, k) with j < k (1-based)."""
    n = L.dim
    out = {}
    basis = [basis_vector(n, i + 1, L.kind) for i in range(n)]
    for j in range(n):
        for k in range(j + 1, n):
            br = L.bracket(basis[j], basis[k])
            m = linalg.commutator(C.psi[j], C.psi[k])
            if any(x != 0 for x in br):
                m = linalg.mat_sub(m, C.derivative_along(br))
            out[(j + 1, k + 1)] = m
    return out


def curvature_from_endos(C: Connection, L: LieAlgebra) -> CurvatureTensor:
    n = L.dim
    g = C.metric.matrix
    endos = curvature_endomorphisms(C, L)
    lowered = {jk: (m if C.metric.is_identity() else linalg.mat_mul(g, m))
               for jk, m in endos.items()}
    comps = []
    for a in range(n):
        row = []
        for b in range(n):
            terms = []
            for (j, k), m in lowered.items():
                val = m[a][b]
                if val != 0:
                    terms.append(((j, k), val))
            row.append(KForm.from_terms(n, 2, terms, L.kind))
        comps.append(tuple(row))
    return CurvatureTensor(tuple(comps))


def curvature_from_forms(C: Connection, L: LieAlgebra) -> CurvatureTensor:
    """(R)^a_b = d Psi^a_b + sum_c Psi^a_c ^ Psi^c_b."""
    n = L.dim
    one_forms = [[C.one_form_entry(a + 1, b + 1) for b in range(n)]
                 for a in range(n)]
    comps = []
    for a in range(n):
        row = []
        for b in range(n):
            total = L.differential(one_forms[a][b])
            for c in range(n):
                f1, f2 = one_forms[a][c], one_forms[c][b]
                if f1.coeffs and f2.coeffs:
                    total = total + wedge(f1, f2)
            row.append(total)
        comps.append(tuple(row))
    return CurvatureTensor(tuple(comps))


def curvature(C: Connection, L: LieAlgebra,
              check: bool = True, tol: float | None = None) -> CurvatureTensor:
    """Curvature tensor; with check=True the commutator route and the
    d Psi + Psi ^ Psi route are both evaluated and must agree."""
    r1 = curvature_from_endos(C, L)
    if check:
        r2 = curvature_from_forms(C, L)
        n = L.dim
        for a in range(n):
            for b in range(n):
                if not (r1.components[a][b] - r2.components[a][b]).is_zero(tol):
                    raise InputError(
                        f"curvature oracle mismatch at component ({a+1},{b+1})")
    return r1


# -- covariant differentiation of tensors ----------------------------------

def endo_action_on_form(A, form: KForm) -> KForm:
    """Natural so(n) action: (A . S)(v1..vk) = -sum_t S(v1, .., A v_t, .., vk).

    For an invariant tensor S this is exactly the covariant derivative
    along the direction whose connection endomorphism is A.
    """
    from .exterior import sort_with_sign

    n = form.dim
    kind = form.kind
    if form.degree == 0:
        return KForm.zero(n, 0, kind)
    acc: dict = {}
    for idx, c in form.coeffs.items():
        for t, i in enumerate(idx):
            # covectors transform through the matrix rows:
            # (A . e^i) = -sum_r A[i-1][r] e^(r+1)
            row = A[i - 1]
            for r in range(n):
                arc = row[r]
                if arc == 0:
                    continue
                new_idx = idx[:t] + (r + 1,) + idx[t + 1:]
                sidx, sign = sort_with_sign(new_idx)
                if sign == 0:
                    continue
                val = -(c * arc) if sign > 0 else (c * arc)
                s = acc.get(sidx)
                s = val if s is None else s + val
                if s == 0:
                    acc.pop(sidx, None)
                else:
                    acc[sidx] = s
    return KForm(n, form.degree, acc, kind)


def covariant_derivative(C: Connection, form: KForm):
    """The 7 directional derivatives (nabla_{e_1} S, ..., nabla_{e_7} S)."""
    return tuple(endo_action_on_form(C.psi[i], form) for i in range(C.dim))


def is_parallel_form(C: Connection, form: KForm, tol: float | None = None) -> bool:
    return all(d.is_zero(tol) for d in covariant_derivative(C, form))


def covariant_derivative_curvature(C: Connection, L: LieAlgebra,
                                   R: CurvatureTensor):
    """The 7 directional derivatives of the curvature as a (0,4)-tensor
    F(x, y, z, w) = g(R_{x,y} z, w), each returned in component form.

    The derivative hits all four slots: the (x, y) pair is the 2-form part
    of each component, and the (z, w) pair mixes components:
    (nabla_v R)^a_b = A.(R^a_b) - sum_c A[c][b] R^a_c - sum_c A[c][a] R^c_b
    with A = nabla_v.
    """
    n = C.dim
    out = []
    for i in range(n):
        A = C.psi[i]
        comps = []
        for a in range(n):
            row = []
            for b in range(n):
                total = endo_action_on_form(A, R.components[a][b])
                for c in range(n):
                    acb = A[c][b]
                    if acb != 0:
                        total = total - R.components[a][c].scale(acb)
                    aca = A[c][a]
                    if aca != 0:
                        total = total - R.components[c][b].scale(aca)
                row.append(total)
            comps.append(tuple(row))
        out.append(CurvatureTensor(tuple(comps)))
    return tuple(out)


def is_parallel_curvature(C: Connection, L: LieAlgebra, R: CurvatureTensor,
                          tol: float | None = None) -> bool:
    for d in covariant_derivative_curvature(C, L, R):
        for row in d.components:
            for f in row:
                if not f.is_zero(tol):
                    return False
    return True


# -- holonomy ---------------------------------------------------------------

@dataclass(frozen=True)
class HolonomyAlgebra:
    dim: int
    basis: tuple                 # matrices spanning the algebra
    bracket_table: tuple         # c[i][j] = coefficient vector of [b_i, b_j]
    killing: tuple               # Killing form matrix in the returned basis
    killing_negative_definite: bool


def _mat_to_vec(m):
    return tuple(x for row in m for x in row)


def holonomy_algebra(C: Connection, L: LieAlgebra,
                     tol: float | None = None,
                     max_iterations: int = 21) -> HolonomyAlgebra:
    """Smallest subspace of so(n) containing all curvature endomorphisms
    and closed under Lie bracket and under A -> [nabla_{e_i}, A]; for
    invariant connections this realizes the Ambrose-Singer holonomy
    algebra.  Iteration is bounded by dim so(7) = 21 plus rank checks."""
    n = C.dim
    gens = list(curvature_endomorphisms(C, L).values())
    gens = [m for m in gens if not linalg.is_zero_matrix(m, tol)]
    basis: list = []
    rows: list = []

    def try_add(m) -> bool:
        v = _mat_to_vec(m)
        if all(x == 0 for x in v) if tol is None else all(abs(x) <= tol for x in v):
            return False
        if rows and linalg.in_span(rows, v, tol):
            return False
        basis.append(m)
        rows.append(v)
        return True

    for m in gens:
        try_add(m)
    for _ in range(max_iterations):
        added = False
        current = list(basis)
        for a in current:
            for b in current:
                if try_add(linalg.commutator(a, b)):
                    added = True
            for i in range(n):
                if try_add(linalg.commutator(C.psi[i], a)):
                    added = True
        if not added:
            break
    dim = len(basis)
    # bracket table and Killing form of the abstract algebra
    table = []
    amat = linalg.transpose(rows) if rows else ()
    for a in basis:
        trow = []
        for b in basis:
            coeffs = linalg.solve(amat, _mat_to_vec(linalg.commutator(a, b)), tol)
            if coeffs is None:
                raise InputError("holonomy closure failed to close under bracket")
            trow.append(tuple(coeffs))
        table.append(tuple(trow))
    zero = scalars.zero(C.kind)
    killing = []
    for i in range(dim):
        row = []
        for j in range(dim):
            # K(b_i, b_j) = tr(ad b_i ad b_j) from the structure constants
            val = zero
            for p in range(dim):
                for q in range(dim):
                    val += table[i][q][p] * table[j][p][q]
            row.append(val)
        killing.append(tuple(row))
    neg_def = False
    if dim > 0:
        neg = linalg.mat_scale(scalars.promote(-1, C.kind), killing)
        neg_def = linalg.is_positive_definite(neg, tol)
    return HolonomyAlgebra(dim, tuple(basis), tuple(table),
                           tuple(killing), neg_def)
