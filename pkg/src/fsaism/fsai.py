"""
Factorized sparse approximate inverse for singular irreducible M-matrices.

Each row ``i`` of the lower factor ``L`` is obtained from the local system
``A[J, J]^T l = e_p`` where ``J`` is the pattern support of row ``i`` and
``p`` the position of ``i`` in ``J``; this enforces ``(L A)_{ij} = delta_ij``
on the pattern.  The upper factor is the same computation on ``A^T``.
With the forbidden last-row pair removed every local system is a proper
principal submatrix, hence a nonsingular M-matrix.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (ArrowheadViolation, DimensionMismatch, InvalidPattern,
                     NonpositiveDiagonal)
from .pattern import (Orientation, TriangularPattern, is_forbidden_pair_violation,
                      pattern_complete, validate)
from .sparse_core import (SparseMatrix, dense_solve, gather_block,
                          gather_principal_submatrix, spmv)

log = logging.getLogger(__name__)

ARROW_RTOL = 1e-8
# below this order local systems are sliced from one dense copy of A
DENSE_GATHER_MAX = 512


@dataclass(frozen=True)
class FsaiPreconditioner:
    L: SparseMatrix
    U: SparseMatrix
    d: np.ndarray        # diag(L A U)
    g_scale: np.ndarray  # d ** -0.5

    @property
    def n(self):
        return self.L.n

    def apply_left(self, v):
        """``G1 v = D^{-1/2} L v``."""
        return self.g_scale * spmv(self.L, v)

    def apply_right(self, y):
        """``G2 y = U D^{-1/2} y``."""
        return spmv(self.U, self.g_scale * np.asarray(y, dtype=np.float64))

    def G1(self) -> SparseMatrix:
        return SparseMatrix.diagonal(self.g_scale).matmul(self.L)

    def G2(self) -> SparseMatrix:
        return self.U.matmul(SparseMatrix.diagonal(self.g_scale))


@dataclass(frozen=True)
class GeneralizedInverse:
    """
    Factored (1,2)-inverse ``U diag(d_minus) L`` from the complete pattern.

    ``I_F = L A U`` is diagonal apart from its last row and column.  With
    the excluded pair ``(n-1, j)`` these are nonzero on positions ``j..n-2``:
    ``arrow_col[k] = I_F[j+k, n-1]`` and ``arrow_row[k] = I_F[n-1, j+k]``.
    For the default ``j = n-2`` this is the single pair ``b``, ``c``.
    """

    L: SparseMatrix
    U: SparseMatrix
    d: np.ndarray
    d_minus: np.ndarray
    arrow_col: np.ndarray
    arrow_row: np.ndarray
    excluded_col: int

    @property
    def n(self):
        return self.L.n

    @property
    def arrow_b(self) -> float:
        return float(self.arrow_col[0])

    @property
    def arrow_c(self) -> float:
        return float(self.arrow_row[0])

    def arrowhead_defect(self) -> float:
        """
        ``d_j |d_{n-1} - sum_k c_k b_k / d_k|``, zero because ``I_F`` is singular.

        For the default exclusion this is ``|d_{n-2} d_{n-1} - c b|``.
        """
        j = self.excluded_col
        schur = self.d[-1] - np.sum(self.arrow_row * self.arrow_col / self.d[j:-1])
        return float(abs(self.d[j] * schur))

    def apply(self, v):
        return spmv(self.U, self.d_minus * spmv(self.L, v))

    def to_sparse(self) -> SparseMatrix:
        return self.U.matmul(SparseMatrix.diagonal(self.d_minus)).matmul(self.L)

    def dense(self) -> np.ndarray:
        return self.U.to_dense() @ np.diag(self.d_minus) @ self.L.to_dense()


def _check_pattern(A: SparseMatrix, S: TriangularPattern, orientation: Orientation):
    if S.n != A.n:
        raise DimensionMismatch(f"pattern of order {S.n} for a matrix of order {A.n}")
    if S.orientation is not orientation:
        raise InvalidPattern(f"expected a {orientation.value} pattern, got {S.orientation.value}")
    problems = validate(S)
    hard = [p for p in problems if not is_forbidden_pair_violation(p)]
    if hard:
        raise InvalidPattern("; ".join(hard))
    if problems:
        # left to the local solves, which detect the resulting breakdown
        log.warning("pattern violates the exclusion rule: %s", "; ".join(problems))


def _row_of_lower_factor(A: SparseMatrix, i: int, support, dense=None):
    support = np.asarray(support, dtype=np.int64)
    if dense is None:
        B = gather_principal_submatrix(A, support)
    else:
        B = dense[np.ix_(support, support)]
    e = np.zeros(len(support))
    e[np.searchsorted(support, i)] = 1.0
    return dense_solve(B.T, e)


def _lower_factor(A: SparseMatrix, S_L: TriangularPattern, workers: int | None) -> SparseMatrix:
    n = A.n
    dense = A.to_dense() if 8 < n <= DENSE_GATHER_MAX else None

    def row(i):
        return _row_of_lower_factor(A, i, S_L.rows[i], dense)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(n)))
    else:
        rows = [row(i) for i in range(n)]
    lengths = np.array([len(s) for s in S_L.rows], dtype=np.int64)
    owner = np.repeat(np.arange(n, dtype=np.int64), lengths)
    indices = np.fromiter((j for s in S_L.rows for j in s), dtype=np.int64, count=int(lengths.sum()))
    values = np.concatenate(rows)
    keep = values != 0.0
    starts = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(owner[keep], minlength=n), out=starts[1:])
    return SparseMatrix._trusted(n, starts, indices[keep], values[keep])


def build_lower_factor(A: SparseMatrix, S_L: TriangularPattern, workers: int | None = None) -> SparseMatrix:
    """
    Lower factor ``L`` with ``(L A)_{ij} = delta_ij`` for ``(i, j)`` in ``S_L``.

    Rows are independent; ``workers > 1`` computes them on a thread pool and
    gives bitwise the same result as the serial loop.
    """
    _check_pattern(A, S_L, Orientation.LOWER)
    return _lower_factor(A, S_L, workers)


def build_upper_factor(A: SparseMatrix, S_U: TriangularPattern, workers: int | None = None) -> SparseMatrix:
    """Upper factor ``U`` with ``(A U)_{ij} = delta_ij`` for ``(i, j)`` in ``S_U``."""
    _check_pattern(A, S_U, Orientation.UPPER)
    return _lower_factor(A.transpose(), S_U.transpose(), workers).transpose()


def _triple_entry(L: SparseMatrix, A: SparseMatrix, Ut: SparseMatrix, i: int, j: int) -> float:
    # (L A U)_{ij} = L[i, :] A U[:, j]; U's column j is row j of Ut
    lc, lv = L.row(i)
    uc, uv = Ut.row(j)
    return float(lv @ gather_block(A, lc, uc) @ uv)


def _triple_diagonal(L: SparseMatrix, A: SparseMatrix, Ut: SparseMatrix) -> np.ndarray:
    # row i of (L A) dotted with row i of Ut, without forming L A U
    if A.n <= 32:
        return np.array([_triple_entry(L, A, Ut, i, i) for i in range(A.n)])
    LA = L.to_scipy() @ A.to_scipy()
    return np.asarray(LA.multiply(Ut.to_scipy()).sum(axis=1)).ravel()


def build_preconditioner(A: SparseMatrix, S_L: TriangularPattern, S_U: TriangularPattern,
                         workers: int | None = None) -> FsaiPreconditioner:
    _check_pattern(A, S_L, Orientation.LOWER)
    _check_pattern(A, S_U, Orientation.UPPER)
    L = _lower_factor(A, S_L, workers)
    Ut = _lower_factor(A.transpose(), S_U.transpose(), workers)
    d = _triple_diagonal(L, A, Ut)
    if not np.all(d > 0):
        k = int(np.argmin(d))
        raise NonpositiveDiagonal(f"diag(L A U)[{k}] = {d[k]:.3e} is not positive")
    return FsaiPreconditioner(L, Ut.transpose(), d, 1.0 / np.sqrt(d))


def preconditioned_matrix_dense(P: FsaiPreconditioner, A: SparseMatrix) -> np.ndarray:
    """Dense ``L A U``, for diagnostics at desk scale."""
    return P.L.to_dense() @ A.to_dense() @ P.U.to_dense()


def build_one_two_inverse(A: SparseMatrix, excluded_col: int | None = None,
                          workers: int | None = None) -> GeneralizedInverse:
    """
    Complete-pattern (1,2)-inverse ``U D^- L`` of a singular irreducible M-matrix.

    Raises ArrowheadViolation when the arrowhead defect exceeds
    ``ARROW_RTOL * max(d)**2``; for the default ``excluded_col = n-2`` the
    defect is ``|d_{n-2} d_{n-1} - c b|``.
    """
    n = A.n
    if n < 2:
        raise DimensionMismatch("a (1,2)-inverse needs order >= 2")
    j = n - 2 if excluded_col is None else int(excluded_col)
    S_L = pattern_complete(n, Orientation.LOWER, j)
    S_U = pattern_complete(n, Orientation.UPPER, j)
    P = build_preconditioner(A, S_L, S_U, workers)
    Ut = P.U.transpose()
    col = np.array([_triple_entry(P.L, A, Ut, k, n - 1) for k in range(j, n - 1)])
    row = np.array([_triple_entry(P.L, A, Ut, n - 1, k) for k in range(j, n - 1)])
    d = P.d
    d_minus = 1.0 / d
    d_minus[-1] = 0.0
    G = GeneralizedInverse(P.L, P.U, d, d_minus, col, row, j)
    defect = G.arrowhead_defect()
    if defect > ARROW_RTOL * d.max() ** 2:
        raise ArrowheadViolation(
            f"arrowhead defect {defect:.3e} exceeds {ARROW_RTOL * d.max() ** 2:.3e}")
    return G
