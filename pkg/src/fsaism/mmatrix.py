"""
Predicates and oracles for Z-matrices, M-matrices and generalized inverses.

Classification is sparse end-to-end.  For an irreducible Z-matrix a
positive null vector certifies a singular M-matrix (Perron-Frobenius), and
for any Z-matrix ``A^{-1} 1 > 0`` certifies a nonsingular M-matrix.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from .errors import DimensionMismatch, NotSingularIrreducible
from .sparse_core import SparseMatrix, spmv

DEFAULT_TOL = 1e-10
MAX_INVERSE_ITERATIONS = 100


class Verdict(str, enum.Enum):
    NONSINGULAR_M = "NonsingularM"
    SINGULAR_IRREDUCIBLE_M = "SingularIrreducibleM"
    NOT_M = "NotM"


@dataclass(frozen=True)
class MMatrixReport:
    is_z: bool
    is_irreducible: bool
    has_positive_null_vector: bool
    null_vector: np.ndarray | None
    verdict: Verdict

    def to_json(self):
        return {
            "is_z": self.is_z,
            "is_irreducible": self.is_irreducible,
            "has_positive_null_vector": self.has_positive_null_vector,
            "null_vector": None if self.null_vector is None else self.null_vector.tolist(),
            "verdict": self.verdict.value,
        }


@dataclass(frozen=True)
class InverseAxiomReport:
    """Frobenius residuals of the four Penrose conditions."""

    ax1: float
    ax2: float
    ax3: float
    ax4: float

    def to_json(self):
        return {"ax1": self.ax1, "ax2": self.ax2, "ax3": self.ax3, "ax4": self.ax4}


def is_z_matrix(A: SparseMatrix) -> bool:
    rows = np.repeat(np.arange(A.n), np.diff(A.row_starts))
    off = rows != A.col_indices
    return bool(np.all(A.values[off] <= 0.0))


def _reaches_all(n, row_starts, col_indices) -> bool:
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        i = queue.popleft()
        for j in col_indices[row_starts[i]:row_starts[i + 1]]:
            if not seen[j]:
                seen[j] = True
                count += 1
                queue.append(j)
    return count == n


def is_irreducible(A: SparseMatrix) -> bool:
    """True iff the directed graph of the off-diagonal nonzeros is strongly connected."""
    if A.n == 1:
        return True
    At = A.transpose()
    return (_reaches_all(A.n, A.row_starts, A.col_indices)
            and _reaches_all(At.n, At.row_starts, At.col_indices))


def positive_null_vector(A: SparseMatrix, tol: float = DEFAULT_TOL, start=None) -> np.ndarray:
    """
    Positive null vector of a singular irreducible M-matrix, unit 1-norm.

    Uses inverse iteration on ``A + sigma I`` with ``sigma = 1e-8 ||A||_inf``
    starting from ``start`` (all ones by default).  Raises
    NotSingularIrreducible if after ``MAX_INVERSE_ITERATIONS`` steps the
    iterate is not entrywise positive with ``||A v||_inf <= tol ||A||_inf``.
    """
    n = A.n
    norm = A.norm_inf()
    if norm == 0.0:
        raise NotSingularIrreducible("zero matrix")
    sigma = 1e-8 * norm
    shifted = (A.to_scipy() + sigma * sps.identity(n, format="csr")).tocsc()
    try:
        lu = spla.splu(shifted)
    except RuntimeError as exc:
        raise NotSingularIrreducible(f"shifted matrix is singular: {exc}") from exc
    v = np.ones(n) if start is None else np.asarray(start, dtype=np.float64).copy()
    if v.shape != (n,):
        raise DimensionMismatch(f"start vector of shape {v.shape} for order {n}")
    v /= np.abs(v).sum()
    residual = np.inf
    best = None
    for _ in range(MAX_INVERSE_ITERATIONS):
        w = lu.solve(v)
        s = w.sum()
        w = w / (np.abs(w).sum() * (1.0 if s >= 0 else -1.0))
        res_w = np.abs(spmv(A, w)).max()
        if best is not None and res_w > 0.5 * residual:
            # converged to roundoff; further steps only add noise
            return best
        v, residual = w, res_w
        if residual <= tol * norm and np.all(v > 0):
            best = v
    if best is not None:
        return best
    raise NotSingularIrreducible(
        f"inverse iteration stalled: ||Av||_inf = {residual:.3e}, "
        f"min(v) = {v.min():.3e} after {MAX_INVERSE_ITERATIONS} steps")


def _is_nonsingular_m(A: SparseMatrix) -> bool:
    try:
        lu = spla.splu(A.to_scipy().tocsc())
    except RuntimeError:
        return False
    x = lu.solve(np.ones(A.n))
    return bool(np.all(np.isfinite(x)) and np.all(x > 0))


def classify(A: SparseMatrix, tol: float = DEFAULT_TOL) -> MMatrixReport:
    z = is_z_matrix(A)
    irreducible = is_irreducible(A)
    if not z:
        return MMatrixReport(False, irreducible, False, None, Verdict.NOT_M)
    if irreducible:
        try:
            v = positive_null_vector(A, tol)
        except NotSingularIrreducible:
            pass
        else:
            return MMatrixReport(True, True, True, v, Verdict.SINGULAR_IRREDUCIBLE_M)
    # reducible singular M-matrices are out of scope and land in NotM
    verdict = Verdict.NONSINGULAR_M if _is_nonsingular_m(A) else Verdict.NOT_M
    return MMatrixReport(True, irreducible, False, None, verdict)


def _as_scipy(M):
    if isinstance(M, SparseMatrix):
        return M.to_scipy()
    return sps.csr_matrix(np.asarray(M, dtype=np.float64))


def penrose_residuals(A, X) -> InverseAxiomReport:
    """Frobenius norms of ``AXA-A``, ``XAX-X``, ``(AX)^T-AX`` and ``(XA)^T-XA``."""
    A, X = _as_scipy(A), _as_scipy(X)
    if A.shape != X.shape or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"shapes {A.shape} and {X.shape} are incompatible")
    AX = A @ X
    XA = X @ A

    def fro(M):
        return float(spla.norm(M, "fro")) if M.nnz else 0.0

    return InverseAxiomReport(
        ax1=fro(AX @ A - A),
        ax2=fro(XA @ X - X),
        ax3=fro(AX.T - AX),
        ax4=fro(XA.T - XA),
    )
