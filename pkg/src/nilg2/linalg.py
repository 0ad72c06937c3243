"""Dense linear algebra over exact rationals or floats.

Matrices are tuples/lists of rows.  Every routine takes an optional float
tolerance; `tol=None` means exact arithmetic with literal zero tests, which
is what makes rank/kernel decisions trustworthy for classification.  The
sizes here are tiny (<= 49 columns), so simple Gaussian elimination with
partial pivoting is plenty.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, NotPositiveDefinite

Matrix = Sequence[Sequence]
Vector = Sequence


def _is_zero(x, tol) -> bool:
    if tol is None:
        return x == 0
    return abs(x) <= tol


def identity(n: int, one=Fraction(1)):
    z = one - one
    return tuple(tuple(one if i == j else z for j in range(n)) for i in range(n))


def zeros(n: int, m: int, zero=Fraction(0)):
    return tuple(tuple(zero for _ in range(m)) for _ in range(n))


def transpose(a: Matrix):
    return tuple(tuple(row[j] for row in a) for j in range(len(a[0])))


def mat_add(a: Matrix, b: Matrix):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a: Matrix):
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Matrix, b: Matrix):
    """Matrix product with zero-skipping (the connection endomorphisms are
    sparse and this runs in the curvature hot loop)."""
    bt = transpose(b)
    n, m = len(a), len(bt)
    out = []
    for i in range(n):
        ra = a[i]
        nz = [(k, x) for k, x in enumerate(ra) if x != 0]
        row = []
        for j in range(m):
            cb = bt[j]
            s = sum((x * cb[k] for k, x in nz), start=ra[0] - ra[0])
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def mat_vec(a: Matrix, v: Vector):
    return tuple(sum((x * y for x, y in zip(row, v) if x != 0),
                     start=row[0] - row[0]) for row in a)


def vec_add(u: Vector, v: Vector):
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u: Vector, v: Vector):
    return tuple(x - y for x, y in zip(u, v))


def vec_scale(c, v: Vector):
    return tuple(c * x for x in v)


def dot(u: Vector, v: Vector):
    return sum((x * y for x, y in zip(u, v)), start=u[0] - u[0])


def metric_dot(g: Matrix, u: Vector, v: Vector):
    return dot(u, mat_vec(g, v))


def commutator(a: Matrix, b: Matrix):
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def is_zero_matrix(a: Matrix, tol=None) -> bool:
    return all(_is_zero(x, tol) for row in a for x in row)


def rref(a: Matrix, tol=None):
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    m = [list(row) for row in a]
    if not m:
        return [], []
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        # pick the best pivot in column c
        best, best_row = None, None
        for i in range(r, nrows):
            x = m[i][c]
            if not _is_zero(x, tol):
                if tol is None:
                    best, best_row = x, i
                    break
                if best is None or abs(x) > abs(best):
                    best, best_row = x, i
        if best_row is None:
            continue
        m[r], m[best_row] = m[best_row], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(nrows):
            if i != r and not _is_zero(m[i][c], tol):
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Matrix, tol=None) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a, tol)[1])


def kernel_basis(a: Matrix, tol=None):
    """Basis of the right kernel of `a`, as a tuple of vectors."""
    if not a:
        return ()
    ncols = len(a[0])
    red, pivots = rref(a, tol)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    zero = a[0][0] - a[0][0]
    one_val = zero + 1
    for fc in free:
        v = [zero] * ncols
        v[fc] = one_val
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(tuple(v))
    return tuple(basis)


def solve(a: Matrix, b: Vector, tol=None):
    """One solution of a x = b, or None if inconsistent."""
    if not a:
        return None
    ncols = len(a[0])
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    red, pivots = rref(aug, tol)
    zero = a[0][0] - a[0][0]
    for r in range(len(red)):
        if all(_is_zero(x, tol) for x in red[r][:ncols]) and not _is_zero(red[r][ncols], tol):
            return None
    x = [zero] * ncols
    for r, pc in enumerate(pivots):
        if pc == ncols:
            return None
        x[pc] = red[r][ncols]
    return tuple(x)


def det(a: Matrix, tol=None):
    """Determinant by fraction-free-style elimination on a working copy."""
    n = len(a)
    m = [list(row) for row in a]
    zero = a[0][0] - a[0][0]
    result = zero + 1
    sign = 1
    for c in range(n):
        p = None
        for i in range(c, n):
            if not _is_zero(m[i][c], tol):
                if tol is None:
                    p = i
                    break
                if p is None or abs(m[i][c]) > abs(m[p][c]):
                    p = i
        if p is None:
            return zero
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        piv = m[c][c]
        result = result * piv
        inv_rows = range(c + 1, n)
        for i in inv_rows:
            if not _is_zero(m[i][c], tol):
                f = m[i][c] / piv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result if sign > 0 else -result


def inverse(a: Matrix, tol=None):
    n = len(a)
    zero = a[0][0] - a[0][0]
    one_val = zero + 1
    aug = [list(a[i]) + [one_val if i == j else zero for j in range(n)]
           for i in range(n)]
    red, pivots = rref(aug, tol)
    if pivots[:n] != list(range(n)):
        raise DimensionMismatch("matrix is singular")
    return tuple(tuple(red[i][n:]) for i in range(n))


def column_space_basis(a: Matrix, tol=None):
    """Basis (tuple of vectors) for the span of the columns of `a`."""
    if not a or not a[0]:
        return ()
    at = transpose(a)
    red, pivots = rref(at, tol)
    # rows of rref(a^T) span the column space; keep the nonzero ones
    return tuple(tuple(red[r]) for r in range(len(pivots)))


def in_span(vectors, v, tol=None) -> bool:
    """Is v in the span of `vectors`?"""
    if not vectors:
        return all(_is_zero(x, tol) for x in v)
    a = transpose(list(vectors))
    return solve(a, v, tol) is not None


def is_positive_definite(g: Matrix, tol=None) -> bool:
    """Leading principal minors test (exact) / Cholesky-style test (float)."""
    n = len(g)
    for k in range(1, n + 1):
        mk = [row[:k] for row in list(g)[:k]]
        d = det(mk, tol)
        if tol is None:
            if d <= 0:
                return False
        else:
            if d <= tol:
                return False
    return True


def check_positive_definite(g: Matrix, tol=None) -> None:
    if not is_positive_definite(g, tol):
        raise NotPositiveDefinite("matrix is not positive definite")


def char_poly(a: Matrix):
    """Characteristic polynomial coefficients [c0..cn] of det(xI - a),
    leading coefficient last, via Faddeev-LeVerrier (exact-friendly)."""
    n = len(a)
    zero = a[0][0] - a[0][0]
    one_val = zero + 1
    coeffs = [zero] * (n + 1)
    coeffs[n] = one_val
    m = zeros(n, n, zero)
    c = one_val
    for k in range(1, n + 1):
        m = mat_mul(a, m)
        m = tuple(tuple(m[i][j] + (c if i == j else zero) for j in range(n))
                  for i in range(n))
        am = mat_mul(a, m)
        tr = sum((am[i][i] for i in range(n)), start=zero)
        c = -tr / k
        coeffs[n - k] = c
    return coeffs
