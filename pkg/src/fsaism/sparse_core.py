"""
Immutable compressed-row matrices and the small dense kernels built on them.

Dense matrices and vectors are plain :mod:`numpy` arrays (``float64``).
``SparseMatrix`` keeps its own CSR arrays; sparse-sparse products are
delegated to :mod:`scipy.sparse`.
"""
from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps

from .errors import DimensionMismatch, IndexOutOfRange, SingularLocalSystem

# relative pivot threshold for dense_solve
PIVOT_RTOL = 1e-14


class SparseMatrix:
    """
    Square real ``n x n`` matrix in compressed sparse row form.

    Column indices are strictly increasing within each row and no stored
    value is exactly ``0.0``. Instances are immutable; the underlying arrays
    are flagged read-only.
    """

    __slots__ = ("n", "row_starts", "col_indices", "values")

    def __init__(self, n, row_starts, col_indices, values):
        n = int(n)
        if n < 1:
            raise DimensionMismatch(f"matrix order must be >= 1, got {n}")
        row_starts = np.array(row_starts, dtype=np.int64)
        col_indices = np.array(col_indices, dtype=np.int64)
        values = np.array(values, dtype=np.float64)
        if row_starts.shape != (n + 1,) or row_starts[0] != 0:
            raise DimensionMismatch("row_starts must have n+1 entries starting at 0")
        if np.any(np.diff(row_starts) < 0) or row_starts[-1] != len(col_indices):
            raise DimensionMismatch("row_starts is not a valid offset array")
        if len(values) != len(col_indices):
            raise DimensionMismatch("col_indices and values differ in length")
        if len(col_indices) and (col_indices.min() < 0 or col_indices.max() >= n):
            raise IndexOutOfRange("column index outside [0, n)")
        steps = np.diff(col_indices)
        same_row = np.ones(len(steps), dtype=bool)
        boundaries = row_starts[1:-1] - 1
        same_row[boundaries[(boundaries >= 0) & (boundaries < len(steps))]] = False
        if np.any(steps[same_row] <= 0):
            raise ValueError("column indices not strictly increasing within a row")
        if np.any(values == 0.0):
            raise ValueError("explicit zeros must not be stored")
        for arr in (row_starts, col_indices, values):
            arr.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "row_starts", row_starts)
        object.__setattr__(self, "col_indices", col_indices)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("SparseMatrix is immutable")

    @classmethod
    def _trusted(cls, n, row_starts, col_indices, values) -> "SparseMatrix":
        # skips validation; callers guarantee the CSR invariants
        self = object.__new__(cls)
        for name, arr in (("row_starts", row_starts), ("col_indices", col_indices),
                          ("values", values)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "n", n)
        return self

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_scipy(cls, M) -> "SparseMatrix":
        M = sps.csr_matrix(M, dtype=np.float64)
        if M.shape[0] != M.shape[1]:
            raise DimensionMismatch(f"matrix must be square, got {M.shape}")
        M.sum_duplicates()
        M.eliminate_zeros()
        M.sort_indices()
        return cls(M.shape[0], M.indptr, M.indices, M.data)

    @classmethod
    def from_dense(cls, M) -> "SparseMatrix":
        M = np.asarray(M, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionMismatch(f"matrix must be square, got shape {M.shape}")
        return cls.from_scipy(sps.csr_matrix(M))

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, np.arange(n + 1), np.arange(n), np.ones(n))

    @classmethod
    def diagonal(cls, d) -> "SparseMatrix":
        d = np.asarray(d, dtype=np.float64)
        return from_triplets([(i, i, v) for i, v in enumerate(d)], len(d))

    # -- views ----------------------------------------------------------

    @property
    def nnz(self) -> int:
        return len(self.values)

    @property
    def shape(self):
        return (self.n, self.n)

    def row(self, i: int):
        """Return ``(cols, vals)`` of row ``i`` (read-only views)."""
        lo, hi = self.row_starts[i], self.row_starts[i + 1]
        return self.col_indices[lo:hi], self.values[lo:hi]

    def to_scipy(self) -> sps.csr_matrix:
        return sps.csr_matrix(
            (self.values.copy(), self.col_indices.copy(), self.row_starts.copy()),
            shape=self.shape,
        )

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for i in range(self.n):
            cols, vals = self.row(i)
            out[i, cols] = vals
        return out

    def to_triplets(self):
        rows = np.repeat(np.arange(self.n), np.diff(self.row_starts))
        return [(int(r), int(c), float(v))
                for r, c, v in zip(rows, self.col_indices, self.values)]

    def diag(self) -> np.ndarray:
        out = np.zeros(self.n)
        for i in range(self.n):
            cols, vals = self.row(i)
            k = np.searchsorted(cols, i)
            if k < len(cols) and cols[k] == i:
                out[i] = vals[k]
        return out

    def transpose(self) -> "SparseMatrix":
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.row_starts))
        order = np.argsort(self.col_indices, kind="stable")
        starts = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(self.col_indices, minlength=self.n), out=starts[1:])
        return SparseMatrix._trusted(self.n, starts, rows[order], self.values[order].copy())

    @property
    def T(self) -> "SparseMatrix":
        return self.transpose()

    def norm_inf(self) -> float:
        if self.nnz == 0:
            return 0.0
        rows = np.repeat(np.arange(self.n), np.diff(self.row_starts))
        return float(np.bincount(rows, weights=np.abs(self.values), minlength=self.n).max())

    def norm_fro(self) -> float:
        return float(np.sqrt(np.sum(self.values ** 2)))

    # -- arithmetic -----------------------------------------------------

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if other.n != self.n:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        return SparseMatrix.from_scipy(self.to_scipy() @ other.to_scipy())

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            return self.matmul(other)
        return spmv(self, other)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.row_starts, other.row_starts)
                and np.array_equal(self.col_indices, other.col_indices)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def __repr__(self):
        return f"SparseMatrix(n={self.n}, nnz={self.nnz})"


def from_triplets(entries, n: int) -> SparseMatrix:
    """
    Assemble a matrix from ``(row, col, value)`` triplets.

    Duplicates are summed and entries that end up exactly zero are dropped.
    """
    n = int(n)
    if n < 1:
        raise DimensionMismatch(f"matrix order must be >= 1, got {n}")
    if len(entries) == 0:
        return SparseMatrix(n, np.zeros(n + 1, dtype=np.int64), [], [])
    rows, cols, vals = (np.asarray(a) for a in zip(*entries))
    rows = rows.astype(np.int64)
    cols = cols.astype(np.int64)
    bad = (rows < 0) | (rows >= n) | (cols < 0) | (cols >= n)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise IndexOutOfRange(f"entry ({rows[k]}, {cols[k]}) outside a {n}x{n} matrix")
    M = sps.coo_matrix((vals.astype(np.float64), (rows, cols)), shape=(n, n))
    return SparseMatrix.from_scipy(M)


def spmv(A: SparseMatrix, x) -> np.ndarray:
    """Sparse matrix-vector product ``A @ x``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.n,):
        raise DimensionMismatch(f"vector of shape {x.shape} for a matrix of order {A.n}")
    rows = np.repeat(np.arange(A.n), np.diff(A.row_starts))
    return np.bincount(rows, weights=A.values * x[A.col_indices], minlength=A.n)


def gather_principal_submatrix(A: SparseMatrix, idx) -> np.ndarray:
    """Dense copy of ``A[idx, idx]`` for a strictly increasing index set."""
    return gather_block(A, idx, idx)


def gather_block(A: SparseMatrix, row_idx, col_idx) -> np.ndarray:
    """Dense copy of ``A[row_idx, col_idx]``; both index sets strictly increasing."""
    row_idx = np.asarray(row_idx, dtype=np.int64)
    col_idx = np.asarray(col_idx, dtype=np.int64)
    for idx in (row_idx, col_idx):
        if len(idx) and (idx[0] < 0 or idx[-1] >= A.n):
            raise IndexOutOfRange(f"index set outside [0, {A.n})")
        if np.any(np.diff(idx) <= 0):
            raise ValueError("index set must be strictly increasing")
    m = len(col_idx)
    out = np.zeros((len(row_idx), m))
    for r, i in enumerate(row_idx):
        cols, vals = A.row(i)
        pos = np.searchsorted(col_idx, cols)
        hit = pos < m
        hit[hit] = col_idx[pos[hit]] == cols[hit]
        out[r, pos[hit]] = vals[hit]
    return out


def dense_solve(M, rhs) -> np.ndarray:
    """
    Solve ``M y = rhs`` by LU with partial pivoting.

    Raises SingularLocalSystem when any pivot of the factorization has
    magnitude at most ``PIVOT_RTOL * max|M|``.
    """
    M = np.asarray(M, dtype=np.float64)
    rhs = np.asarray(rhs, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"local system must be square, got {M.shape}")
    if rhs.shape != (M.shape[0],):
        raise DimensionMismatch(f"rhs of shape {rhs.shape} for order {M.shape[0]}")
    scale = np.abs(M).max() if M.size else 0.0
    if scale == 0.0:
        raise SingularLocalSystem("local system matrix is identically zero")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= PIVOT_RTOL * scale:
        k = int(np.argmin(pivots))
        raise SingularLocalSystem(
            f"pivot {k} of a {M.shape[0]}x{M.shape[0]} local system is "
            f"{pivots[k]:.3e} (threshold {PIVOT_RTOL * scale:.3e})")
    return sla.lu_solve((lu, piv), rhs, check_finite=False)
