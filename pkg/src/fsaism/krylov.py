"""
Bi-CGSTAB with split FSAI preconditioning.

The iteration follows van der Vorst's recurrence.  Convergence is judged on
the true residual ``||b - A x_k||_2`` (one extra operator application per
step), so the recorded history never drifts from the quantity it reports.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidParam, NotConverged
from .fsai import FsaiPreconditioner, build_preconditioner
from .pattern import (Orientation, pattern_banded, pattern_complete, pattern_diagonal,
                      pattern_from_matrix)
from .sparse_core import SparseMatrix, spmv

BREAKDOWN_TOL = 1e-30


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-11
    max_iters: int = 500
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidParam("tol must be positive")
        if self.max_iters < 1:
            raise InvalidParam("max_iters must be >= 1")

    def initial_guess(self, n: int) -> np.ndarray:
        return np.random.default_rng(self.seed).uniform(0.0, 1.0, n)


@dataclass
class SolveReport:
    x: np.ndarray
    residual_history: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    breakdown: str | None = None
    true_residual: float | None = None

    @property
    def final_error(self) -> float:
        return self.residual_history[-1]

    def to_json(self, include_x: bool = False):
        out = asdict(self)
        out.pop("x")
        out["final_error"] = self.final_error
        if include_x:
            out["x"] = self.x.tolist()
        return out


def bicgstab(apply, b, x0, cfg: SolveConfig = SolveConfig()) -> SolveReport:
    """
    Solve ``apply(x) = b`` by unpreconditioned Bi-CGSTAB.

    ``residual_history[k]`` is ``||b - A x_k||_2`` after ``k`` iterations
    (entry 0 belongs to ``x0``).  Scalar breakdown (``|rho|``, ``|omega|`` or
    ``|<r_hat, v>|`` below 1e-30) stops the run and is named in the report.
    """
    b = np.asarray(b, dtype=np.float64)
    x = np.array(x0, dtype=np.float64)
    if b.shape != x.shape or b.ndim != 1:
        raise DimensionMismatch(f"b {b.shape} and x0 {x.shape} must be equal-length vectors")

    def true_res(v):
        return float(np.linalg.norm(b - apply(v)))

    r = b - apply(x)
    history = [float(np.linalg.norm(r))]
    if history[0] <= cfg.tol:
        return SolveReport(x, history, 0, True)
    r_hat = r.copy()
    rho_old = alpha = omega = 1.0
    v = np.zeros_like(x)
    p = np.zeros_like(x)
    breakdown = None
    it = 0
    while it < cfg.max_iters:
        rho = float(r_hat @ r)
        if abs(rho) < BREAKDOWN_TOL:
            breakdown = "rho"
            break
        beta = (rho / rho_old) * (alpha / omega)
        p = r + beta * (p - omega * v)
        v = apply(p)
        denom = float(r_hat @ v)
        if abs(denom) < BREAKDOWN_TOL:
            breakdown = "r_hat.v"
            break
        alpha = rho / denom
        s = r - alpha * v
        it += 1
        x_half = x + alpha * p
        res = true_res(x_half)
        if res <= cfg.tol:
            x = x_half
            history.append(res)
            return SolveReport(x, history, it, True)
        t = apply(s)
        tt = float(t @ t)
        if tt == 0.0:
            x = x_half
            history.append(res)
            breakdown = "omega"
            break
        omega = float(t @ s) / tt
        x = x_half + omega * s
        r = s - omega * t
        res = true_res(x)
        history.append(res)
        if res <= cfg.tol:
            return SolveReport(x, history, it, True)
        if abs(omega) < BREAKDOWN_TOL:
            breakdown = "omega"
            break
        rho_old = rho
    return SolveReport(x, history, it, False, breakdown)


def make_patterns(A: SparseMatrix, kind: str):
    """
    Lower/upper patterns for a pattern kind, or None for ``"none"``.

    Kinds: ``none``, ``diag`` (fsaiD), ``matrix`` (fsaiN), ``band:<k>``
    (fsaiB with bandwidth k) and ``complete``.
    """
    n = A.n
    if kind == "none":
        return None
    if kind == "diag":
        return pattern_diagonal(n, Orientation.LOWER), pattern_diagonal(n, Orientation.UPPER)
    if kind == "matrix":
        return pattern_from_matrix(A, Orientation.LOWER), pattern_from_matrix(A, Orientation.UPPER)
    if kind == "complete":
        return pattern_complete(n, Orientation.LOWER), pattern_complete(n, Orientation.UPPER)
    if kind.startswith("band:"):
        try:
            k = int(kind[5:])
        except ValueError:
            raise InvalidParam(f"bad bandwidth in pattern kind {kind!r}") from None
        return pattern_banded(n, k, Orientation.LOWER), pattern_banded(n, k, Orientation.UPPER)
    raise InvalidParam(f"unknown pattern kind {kind!r}")


def solve_unpreconditioned(A: SparseMatrix, b, cfg: SolveConfig = SolveConfig()) -> SolveReport:
    rep = bicgstab(lambda v: spmv(A, v), b, cfg.initial_guess(A.n), cfg)
    rep.true_residual = rep.final_error
    return rep


def solve_preconditioned(A: SparseMatrix, P: FsaiPreconditioner, b,
                         cfg: SolveConfig = SolveConfig()) -> SolveReport:
    """
    Bi-CGSTAB on ``G1 A G2 y = G1 b``; the report carries ``x = G2 y``.

    The seeded random start vector is the initial ``y``.  The history holds
    preconditioned residuals; ``true_residual`` is ``||b - A x||_2`` at exit.
    """
    b = np.asarray(b, dtype=np.float64)
    if P.n != A.n or b.shape != (A.n,):
        raise DimensionMismatch("preconditioner, matrix and right-hand side disagree in size")

    def op(y):
        return P.apply_left(spmv(A, P.apply_right(y)))

    rep = bicgstab(op, P.apply_left(b), cfg.initial_guess(A.n), cfg)
    rep.x = P.apply_right(rep.x)
    rep.true_residual = float(np.linalg.norm(b - spmv(A, rep.x)))
    return rep


def solve(A: SparseMatrix, pattern_kind: str, b=None, cfg: SolveConfig = SolveConfig(),
          workers: int | None = None) -> SolveReport:
    """Build the preconditioner named by ``pattern_kind`` and solve ``A x = b`` (default ``b = 0``)."""
    b = np.zeros(A.n) if b is None else b
    pats = make_patterns(A, pattern_kind)
    if pats is None:
        return solve_unpreconditioned(A, b, cfg)
    P = build_preconditioner(A, *pats, workers=workers)
    return solve_preconditioned(A, P, b, cfg)


def stationary_vector(A: SparseMatrix, pattern_kind: str = "matrix",
                      cfg: SolveConfig = SolveConfig()) -> np.ndarray:
    """
    Positive null vector with unit 1-norm from a preconditioned solve with ``b = 0``.

    Raises NotConverged (report attached) when the solver does not converge
    or ``||A v||_inf > 1e-8 ||A||_inf`` after normalization.
    """
    rep = solve(A, pattern_kind, None, cfg)
    x = rep.x
    total = x.sum()
    if not rep.converged or total == 0.0:
        raise NotConverged(f"solve with pattern {pattern_kind!r} did not converge", rep)
    v = x / (np.abs(x).sum() * np.sign(total))
    if np.abs(spmv(A, v)).max() > 1e-8 * A.norm_inf():
        raise NotConverged("normalized solution is not a null vector", rep)
    return v
