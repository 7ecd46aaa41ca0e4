"""Exact linear algebra over Q and over the rational-function field.

Matrices are lists of rows; entries are Fractions or ScalarExprs (both are
exact, so elimination is division-exact in either case).
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ShapeMismatch
from .scalar import ScalarExpr


def _is_zero(x) -> bool:
    if isinstance(x, ScalarExpr):
        return x.is_zero()
    return x == 0


def mat_copy(M):
    return [list(row) for row in M]


def mat_shape(M):
    return len(M), len(M[0]) if M else 0


def mat_mul(A, B):
    m, k = mat_shape(A)
    k2, n = mat_shape(B)
    if k != k2:
        raise ShapeMismatch(f"cannot multiply {m}x{k} by {k2}x{n}")
    out = []
    for i in range(m):
        row = []
        for j in range(n):
            s = A[i][0] * B[0][j]
            for t in range(1, k):
                s = s + A[i][t] * B[t][j]
            row.append(s)
        out.append(row)
    return out


def mat_transpose(M):
    m, n = mat_shape(M)
    return [[M[i][j] for i in range(m)] for j in range(n)]


def rref(M):
    """Reduced row echelon form; returns (R, pivot column list)."""
    R = mat_copy(M)
    if not R:
        return R, []
    m, n = mat_shape(R)
    pivots = []
    r = 0
    for c in range(n):
        pivot_row = None
        for i in range(r, m):
            if not _is_zero(R[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        R[r], R[pivot_row] = R[pivot_row], R[r]
        pv = R[r][c]
        R[r] = [e / pv for e in R[r]]
        for i in range(m):
            if i != r and not _is_zero(R[i][c]):
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R, pivots


def mat_rank(M) -> int:
    if not M or not M[0]:
        return 0
    return len(rref(M)[1])


def kernel_basis(M):
    """Basis of the right null space, one vector per free column."""
    m, n = mat_shape(M)
    if n == 0:
        return []
    if m == 0:
        return [[_one_like(None) if i == j else _zero_like(None) for i in range(n)]
                for j in range(n)]
    R, pivots = rref(M)
    zero = _zero_like(M[0][0])
    one = _one_like(M[0][0])
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    out = []
    for fc in free:
        v = [zero] * n
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        out.append(v)
    return out


def solve(M, b):
    """One solution of M x = b, or None if inconsistent (free vars set to 0)."""
    m, n = mat_shape(M)
    aug = [list(row) + [b[i]] for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    zero = _zero_like(M[0][0] if M and M[0] else b[0])
    x = [zero] * n
    for r, pc in enumerate(pivots):
        x[pc] = R[r][n]
    return x


def column_space_basis(M):
    """Deterministic basis of the column span: the original pivot columns."""
    m, n = mat_shape(M)
    _, pivots = rref(M)
    return [[M[i][c] for i in range(m)] for c in pivots]


def columns_to_matrix(cols, nrows):
    return [[col[i] for col in cols] for i in range(nrows)]


def span_equal(A, B) -> bool:
    """Column spans coincide."""
    ma, na = mat_shape(A)
    mb, nb = mat_shape(B)
    if ma != mb:
        raise ShapeMismatch("ambient dimensions differ")
    ra = mat_rank(A)
    rb = mat_rank(B)
    if ra != rb:
        return False
    joined = [A[i] + B[i] for i in range(ma)]
    return mat_rank(joined) == ra


def _zero_like(x):
    if isinstance(x, ScalarExpr):
        return ScalarExpr.zero()
    return Fraction(0)


def _one_like(x):
    if isinstance(x, ScalarExpr):
        return ScalarExpr.one()
    return Fraction(1)


def evaluate_matrix(M, sample):
    """Map a ScalarExpr matrix to Fractions at a sample point."""
    return [[e.evaluate(sample) for e in row] for row in M]
