"""Pointwise linear algebra of Lagrangian subspaces of V + V*.

Pairing convention: <v + eta, w + zeta> = eta(w) + zeta(v), no 1/2 factor.
Everything works uniformly over Q and over the rational-function field.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotSkew, ShapeMismatch
from .linalg import (
    _is_zero,
    _one_like,
    _zero_like,
    column_space_basis,
    columns_to_matrix,
    kernel_basis,
    mat_rank,
    mat_shape,
    span_equal,
)


class LinearDiracSpace:
    """Subspace of V + V* given by a 2n x k basis matrix (columns span)."""

    __slots__ = ("n", "basis")

    def __init__(self, n: int, basis):
        rows, k = mat_shape(basis)
        if rows != 2 * n:
            raise ShapeMismatch(f"basis must have {2*n} rows, got {rows}")
        self.n = n
        self.basis = basis

    def vector_rows(self):
        return self.basis[: self.n]

    def covector_rows(self):
        return self.basis[self.n:]

    def __repr__(self):
        return f"LinearDiracSpace(n={self.n}, k={mat_shape(self.basis)[1]})"


def pairing_matrix(basis):
    """Gram matrix of <.,.> on the columns of a 2n x k matrix."""
    rows, k = mat_shape(basis)
    if rows % 2:
        raise ShapeMismatch("basis must have an even number of rows")
    n = rows // 2
    out = []
    for a in range(k):
        row = []
        for b in range(k):
            s = _zero_like(basis[0][0])
            for i in range(n):
                s = s + basis[i][a] * basis[i + n][b] + basis[i + n][a] * basis[i][b]
            row.append(s)
        out.append(row)
    return out


def is_lagrangian(basis):
    """(ok, witness) for a candidate 2n x n matrix."""
    rows, k = mat_shape(basis)
    if rows % 2 or rows // 2 != k:
        raise ShapeMismatch(f"expected a 2n x n matrix, got {rows} x {k}")
    n = k
    r = mat_rank(basis)
    if r != n:
        return False, {"kind": "rank", "rank": r, "expected": n}
    gram = pairing_matrix(basis)
    for a in range(n):
        for b in range(a, n):
            if not _is_zero(gram[a][b]):
                return False, {"kind": "pairing", "columns": (a, b), "value": gram[a][b]}
    return True, None


def _check_skew(B):
    m, n = mat_shape(B)
    if m != n:
        raise NotSkew("matrix is not square")
    for i in range(n):
        for j in range(i, n):
            if not _is_zero(B[i][j] + B[j][i]):
                raise NotSkew(f"entry ({i},{j}) violates skew-symmetry")


def backward_image(L: LinearDiracSpace, A) -> LinearDiracSpace:
    """Backward image of L under the linear map A: V_source -> V_target.

    Solves {(w, eta): (A w, eta) in L} then projects to (w, A^T eta).
    """
    m_rows, n_cols = mat_shape(A)
    if m_rows != L.n:
        raise ShapeMismatch(f"map target dimension {m_rows} != ambient {L.n}")
    m = L.n
    n = n_cols
    Bv = L.vector_rows()
    Bc = L.covector_rows()
    k = mat_shape(L.basis)[1]
    zero = _zero_like(A[0][0] if A and A[0] else L.basis[0][0])
    one = _one_like(zero)
    # unknowns (w, eta, c); rows: A w - Bv c = 0 ; eta - Bc c = 0
    sys_rows = []
    for i in range(m):
        row = [A[i][j] for j in range(n)] + [zero] * m + [-Bv[i][t] for t in range(k)]
        sys_rows.append(row)
    for i in range(m):
        row = [zero] * n + [one if j == i else zero for j in range(m)] \
            + [-Bc[i][t] for t in range(k)]
        sys_rows.append(row)
    cols = []
    for vec in kernel_basis(sys_rows):
        w = vec[:n]
        eta = vec[n:n + m]
        at_eta = []
        for j in range(n):
            s = zero
            for i in range(m):
                s = s + A[i][j] * eta[i]
            at_eta.append(s)
        cols.append(w + at_eta)
    if not cols:
        raise ShapeMismatch("backward image produced no generators")
    mat = columns_to_matrix(cols, 2 * n)
    reduced = column_space_basis(mat)
    if len(reduced) != n:
        raise ShapeMismatch(
            f"backward image has rank {len(reduced)}, expected {n}")
    out = LinearDiracSpace(n, columns_to_matrix(reduced, 2 * n))
    ok, witness = is_lagrangian(out.basis)
    if not ok:
        raise ShapeMismatch(f"backward image is not Lagrangian: {witness}")
    return out


def gauge_shift(L: LinearDiracSpace, B) -> LinearDiracSpace:
    """Shift covectors by iota_v beta where B[i][j] = beta(e_i, e_j)."""
    _check_skew(B)
    n = L.n
    if mat_shape(B)[0] != n:
        raise ShapeMismatch("gauge matrix size does not match ambient dimension")
    Bv = L.vector_rows()
    Bc = L.covector_rows()
    k = mat_shape(L.basis)[1]
    new_cov = []
    for l in range(n):
        row = []
        for col in range(k):
            s = Bc[l][col]
            for i in range(n):
                s = s + Bv[i][col] * B[i][l]
            row.append(s)
        new_cov.append(row)
    return LinearDiracSpace(n, [list(r) for r in Bv] + new_cov)


def graph_of_bivector(P) -> LinearDiracSpace:
    """Span of (P e_j, e_j): column j of P is the vector part of generator j."""
    _check_skew(P)
    n = mat_shape(P)[0]
    zero = _zero_like(P[0][0]) if n else Fraction(0)
    one = _one_like(zero)
    ident = [[one if i == j else zero for j in range(n)] for i in range(n)]
    return LinearDiracSpace(n, [list(r) for r in P] + ident)


def graph_of_two_form(B) -> LinearDiracSpace:
    """Span of (e_j, iota_{e_j} beta): covector block is B transposed."""
    _check_skew(B)
    n = mat_shape(B)[0]
    zero = _zero_like(B[0][0]) if n else Fraction(0)
    one = _one_like(zero)
    ident = [[one if i == j else zero for j in range(n)] for i in range(n)]
    cov = [[B[j][l] for j in range(n)] for l in range(n)]
    return LinearDiracSpace(n, ident + cov)


def subspace_equal(L1: LinearDiracSpace, L2: LinearDiracSpace) -> bool:
    if L1.n != L2.n:
        raise ShapeMismatch("ambient dimensions differ")
    return span_equal(L1.basis, L2.basis)
