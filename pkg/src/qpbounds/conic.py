"""First-order solver for small dense cone programs.

Canonical form, with x a single flat vector of length N:

    maximize   c @ x
    s.t.       A x = b
               x in K = K_1 x ... x K_r

where each block K_i is free space, the nonnegative orthant, the zero cone,
or a PSD cone whose matrix lives in scaled upper-triangle (svec)
coordinates.  The svec scaling makes every PSD block self-dual and keeps
all inner products equal to matrix inner products.

The solver is ADMM on the splitting {affine set} / {product cone}: the
affine step reuses one Cholesky factorization of A A^T, the cone step is a
blockwise projection (eigenvalue clipping for PSD blocks), with
over-relaxation and residual balancing on the penalty.  Problem sizes here
are tiny (a few hundred variables), so dense factorizations win.

`solve` keeps all state local: calls are reentrant and distinct programs
may be solved concurrently from different threads.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .linalg import SQRT2


class Cone(Enum):
    FREE = "free"
    NONNEG = "nonneg"
    ZERO = "zero"
    PSD = "psd"


@dataclass(frozen=True)
class ConeBlock:
    """One block of the product cone, covering columns [start, start+size)."""

    kind: Cone
    start: int
    size: int
    order: int = 0  # matrix order, PSD blocks only

    def __post_init__(self):
        if self.start < 0 or self.size < 1:
            raise ValueError(f"bad block range [{self.start}, {self.start + self.size})")
        if self.kind is Cone.PSD:
            if self.order < 1 or self.size != self.order * (self.order + 1) // 2:
                raise ValueError(
                    f"PSD block of order {self.order} needs "
                    f"{self.order * (self.order + 1) // 2} svec slots, got {self.size}"
                )
        elif self.order:
            raise ValueError("order is only meaningful for PSD blocks")

    @property
    def stop(self) -> int:
        return self.start + self.size


@dataclass
class ConeProgram:
    """Linear maximization over an affine slice of a product cone.

    ``eq_lhs`` stacks the equality-constraint coefficient rows; row i reads
    eq_lhs[i] @ x == eq_rhs[i].
    """

    objective: np.ndarray
    eq_lhs: np.ndarray
    eq_rhs: np.ndarray
    blocks: tuple[ConeBlock, ...]

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.eq_lhs = np.asarray(self.eq_lhs, dtype=float)
        self.eq_rhs = np.asarray(self.eq_rhs, dtype=float)
        self.blocks = tuple(self.blocks)

    @property
    def num_vars(self) -> int:
        return self.objective.size

    def validate(self) -> None:
        n = self.num_vars
        if self.objective.ndim != 1:
            raise ValueError("objective must be a vector")
        if self.eq_lhs.shape != (self.eq_rhs.size, n):
            raise ValueError(
                f"equality rows have shape {self.eq_lhs.shape}, "
                f"want ({self.eq_rhs.size}, {n})"
            )
        for arr in (self.objective, self.eq_lhs, self.eq_rhs):
            if not np.all(np.isfinite(arr)):
                raise ValueError("program data contains non-finite entries")
        pos = 0
        for blk in self.blocks:
            if blk.start != pos:
                raise ValueError(f"blocks must tile [0, N): gap/overlap at index {pos}")
            pos = blk.stop
        if pos != n:
            raise ValueError(f"blocks cover [0, {pos}) but the program has {n} variables")


@dataclass(frozen=True)
class SolverSettings:
    tol: float = 1e-7
    max_iter: int = 200_000
    verbose: bool = False

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


class SolverStatus(Enum):
    OPTIMAL = "optimal"
    ITER_LIMIT = "iter_limit"
    NUMERICAL_FAILURE = "numerical_failure"


class ConicSolverError(RuntimeError):
    """Raised when the iteration produces non-finite values."""


@dataclass
class ConeSolution:
    status: SolverStatus
    x: np.ndarray
    objective: float
    residual_primal: float
    residual_dual: float
    residual_gap: float
    eq_dual: np.ndarray = field(repr=False, default_factory=lambda: np.zeros(0))
    iterations: int = 0
    solve_time: float = 0.0


class _PsdPacker:
    """Cached index maps between svec slots and a full symmetric matrix."""

    def __init__(self, order: int):
        self.order = order
        self.rows, self.cols = np.triu_indices(order)
        self.off = self.rows != self.cols
        self._mat = np.zeros((order, order))

    def to_matrix(self, vec: np.ndarray) -> np.ndarray:
        vals = vec.copy()
        vals[self.off] /= SQRT2
        m = self._mat
        m[self.rows, self.cols] = vals
        m[self.cols, self.rows] = vals
        return m

    def to_svec(self, m: np.ndarray) -> np.ndarray:
        vals = m[self.rows, self.cols].copy()
        vals[self.off] *= SQRT2
        return vals

    def project_psd(self, vec: np.ndarray) -> np.ndarray:
        w, v = np.linalg.eigh(self.to_matrix(vec))
        if w[0] >= 0.0:  # already PSD
            return vec
        p = (v * np.maximum(w, 0.0)) @ v.T
        return self.to_svec(p)

    def dist_psd(self, vec: np.ndarray) -> float:
        """Frobenius distance of the packed matrix to the PSD cone."""
        w = np.linalg.eigvalsh(self.to_matrix(vec))
        return float(np.linalg.norm(np.minimum(w, 0.0)))


def _packers(blocks) -> dict[int, _PsdPacker]:
    return {blk.start: _PsdPacker(blk.order) for blk in blocks if blk.kind is Cone.PSD}


def _project_cone(v: np.ndarray, blocks, packers) -> np.ndarray:
    out = v.copy()
    for blk in blocks:
        seg = slice(blk.start, blk.stop)
        if blk.kind is Cone.NONNEG:
            np.maximum(out[seg], 0.0, out=out[seg])
        elif blk.kind is Cone.ZERO:
            out[seg] = 0.0
        elif blk.kind is Cone.PSD:
            out[seg] = packers[blk.start].project_psd(out[seg])
    return out


def _dual_cone_distance(s: np.ndarray, blocks, packers) -> float:
    """Euclidean distance of s to the dual cone K*.

    Nonneg and PSD blocks are self-dual; the dual of a free block is {0}
    and the dual of the zero cone is everything.
    """
    total = 0.0
    for blk in blocks:
        seg = s[blk.start:blk.stop]
        if blk.kind is Cone.FREE:
            total += float(seg @ seg)
        elif blk.kind is Cone.NONNEG:
            neg = np.minimum(seg, 0.0)
            total += float(neg @ neg)
        elif blk.kind is Cone.PSD:
            total += packers[blk.start].dist_psd(seg) ** 2
    return float(np.sqrt(total))


def cone_membership_violation(x: np.ndarray, blocks) -> float:
    """Worst violation of cone membership, for solution checking.

    PSD blocks report the most negative eigenvalue relative to the block
    norm, matching the solution contract.
    """
    packers = _packers(blocks)
    worst = 0.0
    for blk in blocks:
        seg = x[blk.start:blk.stop]
        if blk.kind is Cone.NONNEG:
            worst = max(worst, float(-np.min(seg, initial=0.0)))
        elif blk.kind is Cone.ZERO:
            worst = max(worst, float(np.max(np.abs(seg), initial=0.0)))
        elif blk.kind is Cone.PSD:
            w = np.linalg.eigvalsh(packers[blk.start].to_matrix(seg))
            scale = 1.0 + float(np.linalg.norm(seg))
            worst = max(worst, float(-w[0]) / scale)
    return worst


def residuals(prog: ConeProgram, x: np.ndarray, eq_dual: np.ndarray) -> tuple[float, float, float]:
    """Recompute (primal, dual, gap) residuals of a candidate solution.

    Independent of the solver's internal bookkeeping: uses only the program
    data, the primal point and the equality multipliers.
    """
    c = prog.objective
    packers = _packers(prog.blocks)
    if prog.eq_rhs.size:
        r_pri = float(np.linalg.norm(prog.eq_lhs @ x - prog.eq_rhs)) / (
            1.0 + float(np.linalg.norm(prog.eq_rhs))
        )
        s = prog.eq_lhs.T @ eq_dual - c
        dual_obj = float(prog.eq_rhs @ eq_dual)
    else:
        r_pri = 0.0
        s = -c
        dual_obj = 0.0
    r_dual = _dual_cone_distance(s, prog.blocks, packers) / (1.0 + float(np.linalg.norm(c)))
    primal_obj = float(c @ x)
    r_gap = abs(primal_obj - dual_obj) / (1.0 + abs(primal_obj) + abs(dual_obj))
    return r_pri, r_dual, r_gap


def solve(prog: ConeProgram, settings: SolverSettings | None = None) -> ConeSolution:
    """Solve the cone program; see the module docstring for the method.

    Returns OPTIMAL once primal, dual and gap residuals all drop below
    ``settings.tol`` (relative scale), ITER_LIMIT if the cap is hit first.
    Raises :class:`ConicSolverError` if the iterates go non-finite.
    """
    t0 = time.perf_counter()
    prog.validate()
    cfg = settings or SolverSettings()
    c = prog.objective
    a_eq = prog.eq_lhs
    b_eq = prog.eq_rhs
    n = prog.num_vars
    m = b_eq.size
    packers = _packers(prog.blocks)

    c_scale = max(1.0, float(np.linalg.norm(c)))
    c_hat = c / c_scale
    norm_b = float(np.linalg.norm(b_eq))
    norm_c = float(np.linalg.norm(c))

    if m:
        gram = a_eq @ a_eq.T
        gram[np.diag_indices_from(gram)] += 1e-12
        try:
            factor = cho_factor(gram, lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:  # redundant equality rows
            raise ConicSolverError(f"equality rows are numerically dependent: {exc}") from exc

    v = np.zeros(n)
    z = np.zeros(n)
    u = np.zeros(n)
    lam = np.zeros(m)
    rho = 1.0
    alpha = 1.6
    check_every = 25

    status = SolverStatus.ITER_LIMIT
    r_pri = r_dual = r_gap = float("inf")
    eq_dual = np.zeros(m)
    it = 0
    while it < cfg.max_iter:
        it += 1
        w = z - u + c_hat / rho
        if m:
            lam = cho_solve(factor, a_eq @ w - b_eq, check_finite=False)
            v = w - a_eq.T @ lam
        else:
            v = w
        v_rel = alpha * v + (1.0 - alpha) * z
        z_prev = z
        z = _project_cone(v_rel + u, prog.blocks, packers)
        u = u + v_rel - z

        if it % check_every == 0 or it == cfg.max_iter:
            if not np.all(np.isfinite(z)) or not np.all(np.isfinite(u)):
                raise ConicSolverError(f"non-finite iterate at iteration {it}")
            eq_dual = (rho * c_scale) * lam
            if m:
                r_pri = float(np.linalg.norm(a_eq @ z - b_eq)) / (1.0 + norm_b)
                s_dual = a_eq.T @ eq_dual - c
                dual_obj = float(b_eq @ eq_dual)
            else:
                r_pri = 0.0
                s_dual = -c
                dual_obj = 0.0
            r_dual = _dual_cone_distance(s_dual, prog.blocks, packers) / (1.0 + norm_c)
            primal_obj = float(c @ z)
            r_gap = abs(primal_obj - dual_obj) / (1.0 + abs(primal_obj) + abs(dual_obj))
            worst = max(r_pri, r_dual, r_gap)
            if cfg.verbose and it % (check_every * 80) == 0:
                print(
                    f"  iter {it:6d}  pri {r_pri:9.2e}  dual {r_dual:9.2e}  "
                    f"gap {r_gap:9.2e}  rho {rho:8.1e}"
                )
            if worst <= cfg.tol:
                status = SolverStatus.OPTIMAL
                break
            # Residual balancing keeps the two splitting halves in step.
            if worst > 10.0 * cfg.tol:
                pri_int = float(np.linalg.norm(v - z))
                dual_int = rho * float(np.linalg.norm(z - z_prev))
                if pri_int > 10.0 * dual_int and rho < 1e6:
                    rho *= 2.0
                    u *= 0.5
                elif dual_int > 10.0 * pri_int and rho > 1e-6:
                    rho *= 0.5
                    u *= 2.0

    return ConeSolution(
        status=status,
        x=z.copy(),
        objective=float(c @ z),
        residual_primal=r_pri,
        residual_dual=r_dual,
        residual_gap=r_gap,
        eq_dual=eq_dual.copy(),
        iterations=it,
        solve_time=time.perf_counter() - t0,
    )
