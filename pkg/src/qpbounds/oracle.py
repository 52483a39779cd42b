"""Ground-truth and lower-bound machinery independent of the SDP pipeline.

Three providers: exact brute force for the l1-ball problem at small size
(stationarity systems over every support of the split simplex), a seeded
multi-start projected ascent for the sphere-with-l1-budget problem, and the
eigenvector rounding that turns a solved lp relaxation into a feasible
point of the original problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import check_symmetric, eig_sym
from .relax import extract_x, lift_qtilde, splitting_matrix
from .rng import SplitMix64, random_unit_vector

EXACT_DIM_CAP = 8  # support enumeration is 2^(2n); past this it stops being "small"


@dataclass
class OracleResult:
    value: float
    maximizer: np.ndarray
    method: str


def _lex_smaller(a: np.ndarray, b: np.ndarray, tol: float = 1e-12) -> bool:
    for x, y in zip(a, b):
        if x < y - tol:
            return True
        if x > y + tol:
            return False
    return False


class _Best:
    """Track the maximum value with deterministic lexicographic tie-breaks."""

    def __init__(self, value: float, x: np.ndarray):
        self.value = value
        self.x = x

    def offer(self, value: float, x: np.ndarray) -> None:
        if value > self.value + 1e-12:
            self.value, self.x = value, x
        elif value > self.value - 1e-12 and _lex_smaller(x, self.x):
            self.x = x


def qpl1_exact_small(q) -> OracleResult:
    """Exact maximum of x'Qx over the l1 unit ball, n <= 8.

    Works on the split reformulation over the simplex in dimension 2n: the
    optimum lies in the relative interior of some face, where the equality-
    constrained stationarity system determines it.  Candidates are the
    origin, every simplex vertex, and the stationary point of every support
    whose system is nonsingular and lands in the nonnegative orthant.
    """
    qs = check_symmetric(q, "Q")
    n = qs.shape[0]
    if n > EXACT_DIM_CAP:
        raise ValueError(f"exact enumeration is capped at n = {EXACT_DIM_CAP}, got n = {n}")
    qt = lift_qtilde(qs)
    m = 2 * n
    amat = splitting_matrix(n)

    best = _Best(0.0, np.zeros(n))  # the origin always scores 0
    for mask in range(1, 1 << m):
        idx = [i for i in range(m) if (mask >> i) & 1]
        size = len(idx)
        if size == 1:
            y_s = np.ones(1)
            value = float(qt[idx[0], idx[0]])
        else:
            sub = qt[np.ix_(idx, idx)]
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = 2.0 * sub
            kkt[:size, size] = -1.0
            kkt[size, :size] = 1.0
            rhs = np.zeros(size + 1)
            rhs[size] = 1.0
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                continue  # captured by a smaller support or a vertex
            y_s = sol[:size]
            if not np.all(np.isfinite(y_s)) or np.min(y_s) < -1e-11:
                continue
            if abs(float(np.sum(y_s)) - 1.0) > 1e-9:
                continue
            y_s = np.maximum(y_s, 0.0)
            y_s /= np.sum(y_s)
            value = float(y_s @ sub @ y_s)
        best.offer(value, amat[:, idx] @ y_s)
    return OracleResult(best.value, best.x, "brute_force")


def _project_l1_ball(x: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection onto the l1 ball of the given radius."""
    a = np.abs(x)
    if float(a.sum()) <= radius:
        return x.copy()
    u = np.sort(a)[::-1]
    cumsum = np.cumsum(u)
    counts = np.arange(1, a.size + 1)
    feasible = u - (cumsum - radius) / counts > 0.0
    rho = int(counts[feasible][-1])
    theta = (cumsum[rho - 1] - radius) / rho
    return np.sign(x) * np.maximum(a - theta, 0.0)


def _feasible_point(v: np.ndarray, k: float) -> np.ndarray:
    """A guaranteed member of {|x|_2 = 1, |x|_1^2 <= k} aligned with v."""
    spread = max(1, int(math.floor(k)))
    order = np.argsort(-np.abs(v))[:spread]
    x = np.zeros(v.size)
    signs = np.sign(v[order])
    signs[signs == 0.0] = 1.0
    x[order] = signs / math.sqrt(spread)
    return x


def _onto_sphere_l1(v: np.ndarray, k: float) -> np.ndarray:
    """Alternating projection onto the unit sphere intersected with |x|_1 <= sqrt(k)."""
    radius = math.sqrt(k)
    nrm = float(np.linalg.norm(v))
    if nrm < 1e-15:
        return _feasible_point(np.ones_like(v), k)
    x = v / nrm
    for _ in range(200):
        if float(np.sum(np.abs(x))) <= radius * (1.0 + 1e-12):
            return x
        x = _project_l1_ball(x, radius)
        nrm = float(np.linalg.norm(x))
        if nrm < 1e-15:
            break
        x = x / nrm
    return _feasible_point(v, k)


def qpl2l1_heuristic(q, k: float, restarts: int = 20, seed: int = 0) -> OracleResult:
    """Best feasible point found for max x'Qx over {|x|_2 = 1, |x|_1^2 <= k}.

    Projected gradient ascent (a shifted power iteration interleaved with
    the feasibility projection) from the top eigenvector plus ``restarts``
    seeded random unit starts.  The value is always a valid lower bound;
    it is not certified optimal.
    """
    qs = check_symmetric(q, "Q")
    n = qs.shape[0]
    if not (1.0 <= k <= n):
        raise ValueError(f"k must lie in [1, n] = [1, {n}], got {k}")
    rng = SplitMix64(seed)
    dec = eig_sym(qs)
    spectral = max(abs(float(dec.values[0])), abs(float(dec.values[-1])), 1e-12)
    step = 0.45 / spectral

    starts = [dec.vectors[:, 0].copy()]
    starts += [random_unit_vector(rng, n) for _ in range(max(0, int(restarts)))]

    x0 = _onto_sphere_l1(starts[0], k)
    best = _Best(float(x0 @ qs @ x0), x0)
    for start in starts:
        x = _onto_sphere_l1(start, k)
        best.offer(float(x @ qs @ x), x)
        for _ in range(500):
            x_next = _onto_sphere_l1(x + 2.0 * step * (qs @ x), k)
            moved = float(np.linalg.norm(x_next - x))
            x = x_next
            best.offer(float(x @ qs @ x), x)
            if moved <= 1e-12:
                break
    return OracleResult(best.value, best.x, "multi_start")


def qplp_lower_bound(q, p: float, ystar) -> OracleResult:
    """Feasible lower bound for max x'Qx over the lp unit ball, 1 < p < 2.

    Rounds a solved lp relaxation: takes the top unit eigenvectors of
    A Y* A' and of Q, rescales each to unit lp norm, and keeps the better
    quadratic value.
    """
    qs = check_symmetric(q, "Q")
    n = qs.shape[0]
    if not (1.0 < p < 2.0):
        raise ValueError(f"p must lie in the open interval (1, 2), got {p}")
    ys = check_symmetric(ystar, "Ystar")
    if ys.shape[0] != 2 * n:
        raise ValueError(f"Ystar has order {ys.shape[0]}, expected {2 * n}")

    compressed = extract_x(ys, 1.0)
    y_vec = eig_sym(compressed).vectors[:, 0]
    z_vec = eig_sym(qs).vectors[:, 0]
    best: _Best | None = None
    for w in (y_vec, z_vec):
        lp_norm = float(np.sum(np.abs(w) ** p) ** (1.0 / p))
        x = w / lp_norm
        value = float(x @ qs @ x)
        if best is None:
            best = _Best(value, x)
        else:
            best.offer(value, x)
    return OracleResult(best.value, best.x, "rounding")
