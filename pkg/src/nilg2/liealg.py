"""Lie algebra structure constants, validation, the Chevalley-Eilenberg
differential, and the structural subspaces and bracket maps used by the
2-step nilpotent geometry (commutator, center, abelian factor, the skew
maps j(z), their self-dual / anti-self-dual / reference parts, and the
cross-product map tau on a calibrated 3-dimensional central subspace).

All subspace computations are exact (Gaussian elimination over rationals)
in exact mode, which is what makes the classification decisions reliable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import linalg, scalars
from .errors import (DimensionMismatch, InputError, KindMismatch,
                     Nilg2Error)
from .exterior import KForm, Metric, sd_asd_split, two_form_to_endo, wedge
from .scalars import EXACT, FLOAT, Scalar


@dataclass(frozen=True)
class Subspace:
    """Subspace of the ambient space given by an exact-rank-checked basis
    (tuple of coordinate vectors)."""

    ambient: int
    vectors: tuple
    tol: float | None = None

    @classmethod
    def from_vectors(cls, ambient: int, vectors, tol: float | None = None) -> "Subspace":
        vs = tuple(tuple(v) for v in vectors)
        for v in vs:
            if len(v) != ambient:
                raise DimensionMismatch("basis vector of wrong length")
        if vs and linalg.rank(vs, tol) != len(vs):
            raise InputError("subspace basis is linearly dependent")
        return cls(ambient, vs, tol)

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def contains(self, v, tol: float | None = None) -> bool:
        return linalg.in_span(self.vectors, tuple(v), tol if tol is not None else self.tol)

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.vectors)

    def equals(self, other: "Subspace") -> bool:
        return self.contains_subspace(other) and other.contains_subspace(self)

    def intersection(self, other: "Subspace") -> "Subspace":
        """Exact intersection via the kernel of the stacked basis."""
        if not self.vectors or not other.vectors:
            return Subspace(self.ambient, (), self.tol)
        cols = list(self.vectors) + [tuple(-x for x in v) for v in other.vectors]
        a = linalg.transpose(cols)
        out = []
        for k in linalg.kernel_basis(a, self.tol):
            coeffs = k[:len(self.vectors)]
            vec = [sum(c * v[i] for c, v in zip(coeffs, self.vectors))
                   for i in range(self.ambient)]
            out.append(tuple(vec))
        basis = linalg.column_space_basis(linalg.transpose(out), self.tol) if out else ()
        return Subspace(self.ambient, basis, self.tol)

    def orthogonal_complement(self, metric: Metric) -> "Subspace":
        """Kernel of v -> (g(v, b_i))_i."""
        if not self.vectors:
            one = scalars.one(metric.kind)
            return Subspace(self.ambient, linalg.identity(self.ambient, one), self.tol)
        rows = [linalg.mat_vec(metric.matrix, v) for v in self.vectors]
        return Subspace(self.ambient, linalg.kernel_basis(rows, self.tol), self.tol)


@dataclass(frozen=True)
class ValidationReport:
    antisymmetry_ok: bool
    jacobi_ok: bool
    jacobi_failures: tuple
    nilpotency_step: int | None
    two_step: bool
    dim_commutator: int
    dim_center: int
    kind: str

    @property
    def valid(self) -> bool:
        return self.antisymmetry_ok and self.jacobi_ok


class LieAlgebra:
    """Structure constants c^k_{ij} of a Lie algebra on R^dim.

    [e_i, e_j] = sum_k c^k_{ij} e_k; antisymmetry in (i, j) is enforced at
    construction.  Instances are immutable.
    """

    def __init__(self, dim: int, c, kind: str = EXACT):
        self.dim = dim
        self.kind = kind
        self.c = c  # c[i][j][k], 0-based, antisymmetric in (i, j)
        self._d1_cache: dict[int, KForm] = {}

    @classmethod
    def from_bracket_entries(cls, dim: int, entries, kind: str = EXACT) -> "LieAlgebra":
        """entries: iterable of (i, j, k, coeff) with 1-based indices,
        meaning [e_i, e_j] has coefficient coeff on e_k.  Entries with
        i > j are folded via antisymmetry; inconsistent duplicates raise."""
        zero = scalars.zero(kind)
        c = [[[zero] * dim for _ in range(dim)] for _ in range(dim)]
        seen: dict[tuple, Scalar] = {}
        for (i, j, k, coeff) in entries:
            for idx in (i, j, k):
                if not (1 <= idx <= dim):
                    raise InputError(f"bracket index {idx} out of [1, {dim}]")
            if i == j:
                raise InputError(f"bracket entry ({i},{j},{k}) has i == j")
            coeff = scalars.promote(coeff, kind)
            a, b, sign = (i, j, 1) if i < j else (j, i, -1)
            val = coeff if sign > 0 else -coeff
            key = (a, b, k)
            if key in seen and seen[key] != val:
                raise InputError(
                    f"antisymmetry violated at triple (i={i}, j={j}, k={k}): "
                    f"c^{k}_{{{a}{b}}} given as both "
                    f"{scalars.format_scalar(seen[key])} and {scalars.format_scalar(val)}")
            seen[key] = val
        for (a, b, k), val in seen.items():
            c[a - 1][b - 1][k - 1] = val
            c[b - 1][a - 1][k - 1] = -val
        c = tuple(tuple(tuple(row) for row in plane) for plane in c)
        return cls(dim, c, kind)

    @classmethod
    def from_differentials(cls, dim: int, diffs: Mapping[int, KForm],
                           kind: str = EXACT) -> "LieAlgebra":
        """Build from d e^m = given 2-forms (1-based m); c^m_{ij} is minus
        the e^{ij} coefficient of d e^m."""
        entries = []
        for m, form in diffs.items():
            if form.degree != 2 or form.dim != dim:
                raise InputError("differential must be a 2-form on the algebra")
            for (i, j), coeff in form.coeffs.items():
                entries.append((i, j, m, -coeff))
        return cls.from_bracket_entries(dim, entries, kind)

    @classmethod
    def abelian(cls, dim: int, kind: str = EXACT) -> "LieAlgebra":
        return cls.from_bracket_entries(dim, [], kind)

    # -- basics ------------------------------------------------------------

    def bracket(self, x: Sequence[Scalar], y: Sequence[Scalar]):
        out = [scalars.zero(self.kind)] * self.dim
        for i in range(self.dim):
            xi = x[i]
            if xi == 0:
                continue
            for j in range(self.dim):
                yj = y[j]
                if yj == 0:
                    continue
                ck = self.c[i][j]
                for k in range(self.dim):
                    if ck[k] != 0:
                        out[k] += xi * yj * ck[k]
        return tuple(out)

    def ad(self, x: Sequence[Scalar]):
        """Matrix of ad_x = [x, .]."""
        cols = [self.bracket(x, basis_vector(self.dim, j + 1, self.kind))
                for j in range(self.dim)]
        return linalg.transpose(cols)

    def d1(self, m: int) -> KForm:
        """Differential of the generator e^m."""
        cached = self._d1_cache.get(m)
        if cached is not None:
            return cached
        terms = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                coeff = self.c[i][j][m - 1]
                if coeff != 0:
                    terms.append(((i + 1, j + 1), -coeff))
        form = KForm.from_terms(self.dim, 2, terms, self.kind)
        self._d1_cache[m] = form
        return form

    def differential(self, a: KForm) -> KForm:
        """Chevalley-Eilenberg differential, extended from generators as a
        graded derivation (equivalent to the alternating-sum formula; the
        test suite checks that equivalence directly)."""
        if a.dim != self.dim:
            raise DimensionMismatch("form dimension != algebra dimension")
        if a.kind != self.kind:
            raise KindMismatch("form and algebra of different scalar kind")
        if a.degree >= self.dim:
            return KForm.zero(self.dim, min(a.degree + 1, self.dim), self.kind)
        out = KForm.zero(self.dim, a.degree + 1, self.kind)
        if a.degree == 0:
            return out
        for idx, c in a.coeffs.items():
            for t, i in enumerate(idx):
                di = self.d1(i)
                if not di.coeffs:
                    continue
                rest = idx[:t] + idx[t + 1:]
                sign_c = c if t % 2 == 0 else -c
                term = wedge(di.scale(sign_c),
                             KForm.from_terms(self.dim, len(rest), [(rest, 1)],
                                              self.kind))
                out = out + term
        return out

    def to_float(self) -> "LieAlgebra":
        c = tuple(tuple(tuple(float(x) for x in row) for row in plane)
                  for plane in self.c)
        return LieAlgebra(self.dim, c, FLOAT)

    # -- structure ----------------------------------------------------------

    def commutator_subspace(self, tol: float | None = None) -> Subspace:
        vecs = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                v = self.c[i][j]
                if any(x != 0 for x in v):
                    vecs.append(v)
        if not vecs:
            return Subspace(self.dim, (), tol)
        basis = linalg.column_space_basis(linalg.transpose(vecs), tol)
        return Subspace(self.dim, basis, tol)

    def center_subspace(self, tol: float | None = None) -> Subspace:
        rows = []
        for j in range(self.dim):
            for k in range(self.dim):
                rows.append(tuple(self.c[i][j][k] for i in range(self.dim)))
        return Subspace(self.dim, linalg.kernel_basis(rows, tol), tol)

    def abelian_factor(self, metric: Metric, tol: float | None = None) -> Subspace:
        gprime = self.commutator_subspace(tol)
        return self.center_subspace(tol).intersection(
            gprime.orthogonal_complement(metric))

    def validate(self, tol: float | None = None) -> ValidationReport:
        """Total, report-style validation; never raises on bad structure."""
        failures = []
        for m in range(1, self.dim + 1):
            dd = self.differential(self.d1(m))
            if not dd.is_zero(tol):
                failures.append((m, dd))
        gprime = self.commutator_subspace(tol)
        center = self.center_subspace(tol)
        step: int | None
        if not failures:
            step = self._nilpotency_step(tol)
        else:
            step = None
        two_step = (step == 2 and gprime.dim > 0
                    and center.contains_subspace(gprime))
        return ValidationReport(
            antisymmetry_ok=True,
            jacobi_ok=not failures,
            jacobi_failures=tuple(failures),
            nilpotency_step=step,
            two_step=two_step,
            dim_commutator=gprime.dim,
            dim_center=center.dim,
            kind=self.kind,
        )

    def _nilpotency_step(self, tol=None) -> int | None:
        term = Subspace.from_vectors(
            self.dim, linalg.identity(self.dim, scalars.one(self.kind)), tol)
        for step in range(1, self.dim + 2):
            vecs = []
            for v in term.vectors:
                for j in range(self.dim):
                    w = self.bracket(v, basis_vector(self.dim, j + 1, self.kind))
                    if any(x != 0 for x in w):
                        vecs.append(w)
            if not vecs:
                return step
            basis = linalg.column_space_basis(linalg.transpose(vecs), tol)
            term = Subspace(self.dim, basis, tol)
        return None  # not nilpotent

    def is_two_step(self, tol=None) -> bool:
        return self.validate(tol).two_step


def basis_vector(dim: int, i: int, kind: str = EXACT):
    v = [scalars.zero(kind)] * dim
    v[i - 1] = scalars.one(kind)
    return tuple(v)


def flat(v, metric: Metric):
    """The 1-form g(v, .)."""
    w = linalg.mat_vec(metric.matrix, v)
    return KForm.from_terms(metric.dim, 1,
                            [((i + 1,), x) for i, x in enumerate(w) if x != 0],
                            metric.kind)


def sharp(a: KForm, metric: Metric):
    """Vector dual to a 1-form."""
    if a.degree != 1:
        raise InputError("sharp needs a 1-form")
    v = [scalars.zero(a.kind)] * a.dim
    for (i,), c in a.coeffs.items():
        v[i - 1] = c
    if metric.is_identity():
        return tuple(v)
    return linalg.mat_vec(metric.inverse_matrix(), v)


def j_map(L: LieAlgebra, metric: Metric, c: Subspace, z: Sequence[Scalar]):
    """The skew map with g(j(z)x, y) = g(z, [x, y]) on the orthogonal
    complement of the central subspace c, extended by zero on c, returned
    as a dim x dim matrix.

    Requires commutator(L) <= c <= center(L); on that domain the matrix
    below automatically kills c and preserves its complement.
    """
    gprime = L.commutator_subspace(c.tol)
    center = L.center_subspace(c.tol)
    if not (c.contains_subspace(gprime) and center.contains_subspace(c)):
        raise InputError("subspace must sit between commutator and center")
    n = L.dim
    zero = scalars.zero(L.kind)
    gz = linalg.mat_vec(metric.matrix, tuple(z))
    m = [[zero] * n for _ in range(n)]
    for b in range(n):
        for a in range(n):
            # M_{ab} = g(z, [e_b, e_a])
            br = L.c[b][a]
            m[a][b] = sum((gz[k] * br[k] for k in range(n) if br[k] != 0),
                          start=zero)
    if metric.is_identity():
        return tuple(tuple(row) for row in m)
    return linalg.mat_mul(metric.inverse_matrix(), m)


def tau_map(phi: KForm, c: Subspace, metric: Metric, z: Sequence[Scalar]):
    """Skew map on a 3-dimensional subspace c with g(tau(z)z', z'') =
    phi(z, z', z''), extended by zero on the complement.

    The basis of c must be orthonormal for the metric (all pipeline uses
    are coordinate subspaces of an orthonormal basis).
    """
    if c.dim != 3:
        raise InputError("tau is defined on a 3-dimensional subspace")
    one = scalars.one(metric.kind)
    for i, u in enumerate(c.vectors):
        for j, v in enumerate(c.vectors):
            expected = one if i == j else scalars.zero(metric.kind)
            if metric.inner(u, v) != expected:
                raise InputError("tau needs an orthonormal basis of the subspace")
    n = phi.dim
    zero = scalars.zero(phi.kind)
    zt = tuple(z)
    # tau(z) b_j = sum_i phi(z, b_j, b_i) b_i; as an ambient matrix,
    # A = sum_j (tau(z) b_j) (g b_j)^T since the basis is orthonormal
    a = [[zero] * n for _ in range(n)]
    for bj in c.vectors:
        img = [zero] * n
        for bi in c.vectors:
            val = phi.evaluate([zt, bj, bi])
            if val != 0:
                img = [x + val * y for x, y in zip(img, bi)]
        gb = linalg.mat_vec(metric.matrix, bj)
        for r in range(n):
            if img[r] == 0:
                continue
            for s in range(n):
                if gb[s] != 0:
                    a[r][s] += img[r] * gb[s]
    return tuple(tuple(row) for row in a)


# -- adapted-position helpers (central block on e_5, e_6, e_7) -------------

SIGMA_PLUS_TERMS = (
    (((1, 3), 1), ((2, 4), -1)),
    (((1, 4), -1), ((2, 3), -1)),
    (((1, 2), 1), ((3, 4), 1)),
)

SIGMA_MINUS_TERMS = (
    (((1, 3), 1), ((2, 4), 1)),
    (((1, 4), 1), ((2, 3), -1)),
    (((1, 2), 1), ((3, 4), -1)),
)


def sigma_plus(i: int, dim: int = 7, kind: str = EXACT) -> KForm:
    """The standard self-dual basis 2-forms on the e_1..e_4 block."""
    return KForm.from_terms(dim, 2, SIGMA_PLUS_TERMS[i - 1], kind)


def sigma_minus(i: int, dim: int = 7, kind: str = EXACT) -> KForm:
    return KForm.from_terms(dim, 2, SIGMA_MINUS_TERMS[i - 1], kind)


def is_adapted_position(L: LieAlgebra, tol=None) -> bool:
    """True when e_5, e_6, e_7 are central, d e^i = 0 for i <= 4 and every
    d e^i is supported on the e_1..e_4 block."""
    if L.dim != 7:
        return False
    for m in range(1, 5):
        if not L.d1(m).is_zero(tol):
            return False
    for m in range(5, 8):
        for idx in L.d1(m).coeffs:
            if any(i > 4 for i in idx):
                return False
    center = L.center_subspace(tol)
    for i in (5, 6, 7):
        if not center.contains(basis_vector(7, i, L.kind), tol):
            return False
    return True


def _require_adapted(L: LieAlgebra, tol=None) -> None:
    if not is_adapted_position(L, tol):
        raise InputError("algebra is not in adapted position "
                         "(central e_5, e_6, e_7 with differentials on e_1..e_4)")


def split_brackets(L: LieAlgebra, tol=None):
    """The three auxiliary Lie algebras whose brackets are built from the
    self-dual parts, the anti-self-dual parts, and the reference self-dual
    basis: [u,v]_pm = -sum alpha_i^pm(u,v) e_i and
    [u,v]_0 = +sum sigma^+_{i-4}(u,v) e_i."""
    _require_adapted(L, tol)
    plus: dict[int, KForm] = {}
    minus: dict[int, KForm] = {}
    ref: dict[int, KForm] = {}
    for m in (5, 6, 7):
        p, q = sd_asd_split(L.d1(m))
        plus[m] = p
        minus[m] = q
        ref[m] = sigma_plus(m - 4, 7, L.kind).scale(-1)
    pm = LieAlgebra.from_differentials(7, plus, L.kind)
    mm = LieAlgebra.from_differentials(7, minus, L.kind)
    zm = LieAlgebra.from_differentials(7, ref, L.kind)
    return pm, mm, zm


def j_split(L: LieAlgebra, metric: Metric, z: Sequence[Scalar], tol=None):
    """(j(z)^+, j(z)^-, j(z)^0) on the e_1..e_4 block, as 7x7 matrices.

    j(z)^± are the bracket maps of the self-dual / anti-self-dual parts of
    the differentials; j(z)^0 pairs against the reference self-dual basis:
    g(j(e_i)^0 u, v) = sigma^+_{i-4}(u, v).
    """
    plus_l, minus_l, ref_l = split_brackets(L, tol)
    c = Subspace.from_vectors(7, [basis_vector(7, i, L.kind) for i in (5, 6, 7)], tol)
    jp = j_map(plus_l, metric, c, z)
    jm = j_map(minus_l, metric, c, z)
    j0 = j_map(ref_l, metric, c, z)
    return jp, jm, j0
