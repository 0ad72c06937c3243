"""Multilinear algebra on a finite-dimensional oriented inner-product space.

Sparse alternating k-forms with exact rational or float coefficients,
wedge, interior product, Hodge star, induced inner products on forms, the
identification of 2-forms with skew endomorphisms, and the self-dual /
anti-self-dual splitting on a 4-dimensional block.

Indices are 1-based externally (coefficient keys are strictly increasing
tuples of indices in [1, dim]).  All values are immutable after
construction and all operations are pure.

Sign conventions, fixed once here and tested:

* wedge uses shuffle signs (count of inversions between the two sorted
  index blocks);
* (x . a)(v2..vk) = a(x, v2, .., vk) for the interior product;
* star(e^I) = sign(I, I^c) e^(I^c) on an oriented orthonormal basis;
* a 2-form alpha corresponds to the skew endomorphism A with
  alpha(x, y) = g(A x, y).  Under this convention the differential of a
  dual central vector corresponds to minus the bracket endomorphism j(z),
  which is the convention the classification formulas expect.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Tuple

from . import linalg, scalars
from .errors import (DegreeError, DimensionMismatch, ExactnessError,
                     KindMismatch, NotPositiveDefinite)
from .scalars import EXACT, FLOAT, Scalar

Index = Tuple[int, ...]


def sort_with_sign(indices: Sequence[int]) -> tuple[Index, int]:
    """Sort an index tuple, returning (sorted, sign); sign 0 on repeats."""
    idx = list(indices)
    sign = 1
    # insertion sort; k <= 8 so quadratic is fine
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and idx[j - 1] == idx[j]:
            return tuple(idx), 0
    return tuple(idx), sign


def merge_sign(a: Index, b: Index) -> tuple[Index, int]:
    """Merge two strictly increasing tuples; sign 0 if they intersect."""
    if not a:
        return b, 1
    if not b:
        return a, 1
    out = []
    i = j = 0
    sign = 1
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return (), 0
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            # b[j] jumps over the remaining len(a)-i entries of a
            if (len(a) - i) % 2:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), sign


def complement(indices: Index, dim: int) -> Index:
    s = set(indices)
    return tuple(i for i in range(1, dim + 1) if i not in s)


@dataclass(frozen=True)
class KForm:
    """Alternating k-form with sparse coefficients.

    coeffs maps strictly increasing index tuples to nonzero scalars; all
    coefficients share one scalar kind.
    """

    dim: int
    degree: int
    coeffs: Mapping[Index, Scalar]
    kind: str = EXACT

    def __post_init__(self):
        if not (1 <= self.dim <= 8):
            raise DimensionMismatch(f"dim {self.dim} out of range [1, 8]")
        if not (0 <= self.degree <= self.dim):
            raise DegreeError(f"degree {self.degree} out of [0, {self.dim}]")

    @classmethod
    def from_terms(cls, dim: int, degree: int,
                   terms: Iterable[tuple[Sequence[int], Scalar]] | Mapping,
                   kind: str | None = None) -> "KForm":
        """Canonicalizing constructor: sorts indices, folds repeats, drops
        zeros, promotes coefficients to one kind."""
        if isinstance(terms, Mapping):
            terms = terms.items()
        items = list(terms)
        if kind is None:
            ks = {scalars.kind_of(c) for _, c in items if not isinstance(c, int)}
            if len(ks) > 1:
                raise KindMismatch("mixed scalar kinds in one form")
            kind = ks.pop() if ks else EXACT
        acc: dict[Index, Scalar] = {}
        for idx, c in items:
            idx = tuple(int(i) for i in idx)
            if len(idx) != degree:
                raise DegreeError(f"index {idx} has length != {degree}")
            for i in idx:
                if not (1 <= i <= dim):
                    raise DimensionMismatch(f"index {i} out of [1, {dim}]")
            sidx, sign = sort_with_sign(idx)
            if sign == 0:
                continue
            c = scalars.promote(c, kind)
            if sign < 0:
                c = -c
            acc[sidx] = acc.get(sidx, scalars.zero(kind)) + c
        acc = {k: v for k, v in acc.items() if v != 0}
        return cls(dim, degree, acc, kind)

    @classmethod
    def zero(cls, dim: int, degree: int, kind: str = EXACT) -> "KForm":
        return cls(dim, degree, {}, kind)

    @classmethod
    def basis(cls, dim: int, indices: Sequence[int], kind: str = EXACT) -> "KForm":
        return cls.from_terms(dim, len(indices), [(tuple(indices), 1)], kind)

    @classmethod
    def constant(cls, dim: int, value: Scalar, kind: str | None = None) -> "KForm":
        if kind is None:
            kind = scalars.kind_of(value)
        return cls.from_terms(dim, 0, [((), value)], kind)

    # -- basic algebra ----------------------------------------------------

    def _check_compatible(self, other: "KForm") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch("forms on spaces of different dimension")
        if self.kind != other.kind:
            raise KindMismatch("forms of different scalar kind")

    def __add__(self, other: "KForm") -> "KForm":
        self._check_compatible(other)
        if self.degree != other.degree:
            raise DegreeError("cannot add forms of different degree")
        acc = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = acc.get(k)
            s = v if s is None else s + v
            if s == 0:
                acc.pop(k, None)
            else:
                acc[k] = s
        return KForm(self.dim, self.degree, acc, self.kind)

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __neg__(self) -> "KForm":
        return KForm(self.dim, self.degree,
                     {k: -v for k, v in self.coeffs.items()}, self.kind)

    def scale(self, c: Scalar) -> "KForm":
        c = scalars.promote(c, self.kind)
        if c == 0:
            return KForm.zero(self.dim, self.degree, self.kind)
        return KForm(self.dim, self.degree,
                     {k: c * v for k, v in self.coeffs.items()}, self.kind)

    def coefficient(self, indices: Sequence[int]) -> Scalar:
        sidx, sign = sort_with_sign(tuple(indices))
        if sign == 0:
            return scalars.zero(self.kind)
        c = self.coeffs.get(sidx)
        if c is None:
            return scalars.zero(self.kind)
        return c if sign > 0 else -c

    def is_zero(self, tol: float | None = None) -> bool:
        if self.kind == EXACT:
            return not self.coeffs
        return all(scalars.is_zero(v, tol) for v in self.coeffs.values())

    def norm_l1(self) -> Scalar:
        """Sum of absolute values of stored coefficients."""
        return sum((abs(v) for v in self.coeffs.values()),
                   start=scalars.zero(self.kind))

    def to_float(self) -> "KForm":
        return KForm(self.dim, self.degree,
                     {k: float(v) for k, v in self.coeffs.items()}, FLOAT)

    def evaluate(self, vectors: Sequence[Sequence[Scalar]]) -> Scalar:
        """Evaluate on `degree` many vectors (each a length-dim sequence)."""
        if len(vectors) != self.degree:
            raise DegreeError(f"need {self.degree} vectors")
        total = scalars.zero(self.kind)
        for idx, c in self.coeffs.items():
            minor = [[v[i - 1] for i in idx] for v in vectors]
            total += c * linalg.det(minor) if minor else c
        return total

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx]
            name = "e^{" + "".join(str(i) for i in idx) + "}" if idx else "1"
            parts.append(f"{scalars.format_scalar(c)}*{name}")
        return " + ".join(parts)


def wedge(a: KForm, b: KForm) -> KForm:
    """Alternating product with shuffle signs; bilinear."""
    a._check_compatible(b)
    deg = a.degree + b.degree
    if deg > a.dim:
        raise DegreeError(f"wedge of degrees {a.degree}+{b.degree} exceeds "
                          f"dimension {a.dim}")
    acc: dict[Index, Scalar] = {}
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            idx, sign = merge_sign(ia, ib)
            if sign == 0:
                continue
            c = ca * cb
            if sign < 0:
                c = -c
            s = acc.get(idx)
            s = c if s is None else s + c
            if s == 0:
                acc.pop(idx, None)
            else:
                acc[idx] = s
    return KForm(a.dim, deg, acc, a.kind)


def wedge_all(forms: Sequence[KForm]) -> KForm:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def contract(x: Sequence[Scalar], a: KForm) -> KForm:
    """Interior product x . a; degree drops by one."""
    if len(x) != a.dim:
        raise DimensionMismatch("vector length != form dimension")
    if a.degree == 0:
        raise DegreeError("cannot contract a 0-form")
    acc: dict[Index, Scalar] = {}
    for idx, c in a.coeffs.items():
        for t, i in enumerate(idx):
            xi = x[i - 1]
            if xi == 0:
                continue
            rest = idx[:t] + idx[t + 1:]
            val = xi * c if t % 2 == 0 else -(xi * c)
            s = acc.get(rest)
            s = val if s is None else s + val
            if s == 0:
                acc.pop(rest, None)
            else:
                acc[rest] = s
    return KForm(a.dim, a.degree - 1, acc, a.kind)


@dataclass(frozen=True)
class Metric:
    """Symmetric positive definite bilinear form with an orientation sign
    relative to the standard basis order."""

    dim: int
    matrix: tuple
    kind: str = EXACT
    orientation: int = 1

    @classmethod
    def from_rows(cls, rows, kind: str | None = None, orientation: int = 1,
                  tol: float | None = None) -> "Metric":
        if kind is None:
            kind = scalars.kind_of(rows[0][0])
        mat = tuple(tuple(scalars.promote(x, kind) for x in row) for row in rows)
        n = len(mat)
        for i in range(n):
            for j in range(n):
                if kind == EXACT and mat[i][j] != mat[j][i]:
                    raise NotPositiveDefinite("metric matrix is not symmetric")
        use_tol = None if kind == EXACT else (tol if tol is not None else 1e-12)
        linalg.check_positive_definite(mat, use_tol)
        return cls(n, mat, kind, orientation)

    @classmethod
    def euclidean(cls, dim: int, kind: str = EXACT) -> "Metric":
        one = scalars.one(kind)
        return cls(dim, linalg.identity(dim, one), kind, 1)

    def is_identity(self) -> bool:
        one = scalars.one(self.kind)
        zero = scalars.zero(self.kind)
        return all(self.matrix[i][j] == (one if i == j else zero)
                   for i in range(self.dim) for j in range(self.dim))

    def inner(self, u, v) -> Scalar:
        return linalg.metric_dot(self.matrix, u, v)

    def inverse_matrix(self):
        return linalg.inverse(self.matrix, None if self.kind == EXACT else 1e-300)

    def to_float(self) -> "Metric":
        return Metric(self.dim,
                      tuple(tuple(float(x) for x in row) for row in self.matrix),
                      FLOAT, self.orientation)


def volume_form(m: Metric) -> KForm:
    """(det g)^(1/2) e^(1..n) with the metric's orientation."""
    d = linalg.det(m.matrix)
    if m.kind == EXACT:
        root = scalars.exact_sqrt(Fraction(d))
        if root is None:
            raise ExactnessError("volume density is irrational in exact mode")
        c: Scalar = root
    else:
        c = float(d) ** 0.5
    if m.orientation < 0:
        c = -c
    return KForm.from_terms(m.dim, m.dim,
                            [(tuple(range(1, m.dim + 1)), c)], m.kind)


def _raise_indices(a: KForm, ginv) -> dict[Index, Scalar]:
    """Coefficients of `a` with all indices raised by ginv (as a map on
    increasing tuples, via k x k minors of ginv)."""
    if a.degree == 0:
        return dict(a.coeffs)
    out: dict[Index, Scalar] = {}
    for out_idx in combinations(range(1, a.dim + 1), a.degree):
        total = scalars.zero(a.kind)
        for in_idx, c in a.coeffs.items():
            minor = [[ginv[i - 1][j - 1] for j in in_idx] for i in out_idx]
            total += c * linalg.det(minor)
        if total != 0:
            out[out_idx] = total
    return out


def hodge_star(a: KForm, m: Metric) -> KForm:
    """Hodge star for the metric's orientation.

    Exact mode requires the identity metric (every computation in this
    package happens in an adapted orthonormal basis); float mode supports
    any positive definite metric.
    """
    if a.dim != m.dim:
        raise DimensionMismatch("form and metric dimensions differ")
    n = a.dim
    if m.kind == EXACT and a.kind == EXACT:
        if not m.is_identity():
            raise ExactnessError("exact Hodge star needs the identity metric")
        acc: dict[Index, Scalar] = {}
        for idx, c in a.coeffs.items():
            comp = complement(idx, n)
            _, sign = merge_sign(idx, comp)
            if m.orientation < 0:
                sign = -sign
            acc[comp] = c if sign > 0 else -c
        return KForm(n, n - a.degree, acc, a.kind)
    if a.kind != m.kind:
        raise KindMismatch("form and metric of different scalar kind")
    # general float metric
    ginv = m.inverse_matrix()
    density = float(linalg.det(m.matrix, 1e-300)) ** 0.5
    if m.orientation < 0:
        density = -density
    raised = _raise_indices(a, ginv)
    acc = {}
    for idx, c in raised.items():
        comp = complement(idx, n)
        _, sign = merge_sign(idx, comp)
        val = density * c * sign
        if val != 0:
            acc[comp] = acc.get(comp, 0.0) + val
    acc = {k: v for k, v in acc.items() if v != 0}
    return KForm(n, n - a.degree, acc, FLOAT)


def form_inner(a: KForm, b: KForm, m: Metric) -> Scalar:
    """Induced metric on k-forms; orthonormal-basis monomials are
    orthonormal.  Works exactly for any exact SPD metric (no square roots
    are involved)."""
    if a.degree != b.degree:
        raise DegreeError("inner product needs equal degrees")
    a._check_compatible(b)
    if a.dim != m.dim:
        raise DimensionMismatch("form and metric dimensions differ")
    if m.is_identity():
        total = scalars.zero(a.kind)
        for idx, c in a.coeffs.items():
            d = b.coeffs.get(idx)
            if d is not None:
                total += c * d
        return total
    ginv = m.inverse_matrix()
    raised = _raise_indices(a, ginv)
    total = scalars.zero(a.kind)
    for idx, c in raised.items():
        d = b.coeffs.get(idx)
        if d is not None:
            total += c * d
    return total


def two_form_to_endo(a: KForm, m: Metric):
    """Skew endomorphism A with a(x, y) = g(A x, y), as an n x n matrix."""
    if a.degree != 2:
        raise DegreeError("need a 2-form")
    n = a.dim
    zero = scalars.zero(a.kind)
    mrows = [[zero] * n for _ in range(n)]
    for (i, j), c in a.coeffs.items():
        # M_{ab} = a(e_b, e_a) so that g A = M
        mrows[j - 1][i - 1] = c
        mrows[i - 1][j - 1] = -c
    if m.is_identity():
        return tuple(tuple(row) for row in mrows)
    ginv = m.inverse_matrix()
    return linalg.mat_mul(ginv, mrows)


def endo_to_two_form(endo, m: Metric, kind: str | None = None) -> KForm:
    """Inverse of two_form_to_endo: alpha(x, y) = g(A x, y)."""
    n = m.dim
    if kind is None:
        kind = scalars.kind_of(endo[0][0]) if not isinstance(endo[0][0], int) \
            else m.kind
    ga = endo if m.is_identity() else linalg.mat_mul(m.matrix, endo)
    terms = []
    for i in range(n):
        for j in range(i + 1, n):
            # alpha(e_{i+1}, e_{j+1}) = g(A e_{i+1}, e_{j+1}) = (gA)_{ji}
            c = ga[j][i]
            if c != 0:
                terms.append(((i + 1, j + 1), c))
    return KForm.from_terms(n, 2, terms, kind)


def is_skew_for_metric(endo, m: Metric, tol: float | None = None) -> bool:
    ga = linalg.mat_mul(m.matrix, endo)
    n = m.dim
    for i in range(n):
        for j in range(n):
            if not scalars.is_zero(ga[i][j] + ga[j][i], tol):
                return False
    return True


_SD_BLOCK = (1, 2, 3, 4)


def star4_on_block(a: KForm) -> KForm:
    """Hodge star of the euclidean 4-space spanned by e_1..e_4 with
    orientation e^{1234}, applied to a 2-form supported there."""
    if a.degree != 2:
        raise DegreeError("self-dual splitting applies to 2-forms")
    acc: dict[Index, Scalar] = {}
    for idx, c in a.coeffs.items():
        if any(i not in _SD_BLOCK for i in idx):
            raise DimensionMismatch(
                f"support {idx} outside the 4-dimensional block")
        comp = tuple(i for i in _SD_BLOCK if i not in idx)
        merged, sign = merge_sign(idx, comp)
        assert merged == _SD_BLOCK
        acc[comp] = c if sign > 0 else -c
    return KForm(a.dim, 2, acc, a.kind)


def sd_asd_split(a: KForm) -> tuple[KForm, KForm]:
    """Split a 2-form supported on e_1..e_4 into self-dual plus
    anti-self-dual parts; both outputs are eigenvectors of the 4-dim star."""
    star = star4_on_block(a)
    half = Fraction(1, 2) if a.kind == EXACT else 0.5
    plus = (a + star).scale(half)
    minus = (a - star).scale(half)
    return plus, minus
