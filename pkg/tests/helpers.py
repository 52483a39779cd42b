"""Shared test utilities, including the independent grid-search oracle.

The grid search stays deliberately separate from the package's own
enumeration oracle: it brute-forces the l1 sphere on a simplex lattice and
never touches stationarity systems, so the two can cross-validate.
"""

from __future__ import annotations

import itertools

import numpy as np

from qpbounds import Cone, ConeBlock, ConeProgram
from qpbounds.linalg import svec, svec_length


def trace_sdp(q: np.ndarray, equality: bool = True) -> ConeProgram:
    """max Q.X st tr X = 1 (or <= 1 via a slack), X PSD.

    The analytic optimum is lambda_max(Q) for the equality form and
    max(lambda_max(Q), 0) for the inequality form.
    """
    n = q.shape[0]
    nsv = svec_length(n)
    iu = np.triu_indices(n)
    width = nsv + (0 if equality else 1)
    trace_row = np.zeros(width)
    trace_row[:nsv][iu[0] == iu[1]] = 1.0
    blocks = [ConeBlock(Cone.PSD, 0, nsv, order=n)]
    c = np.zeros(width)
    c[:nsv] = svec(q)
    if not equality:
        trace_row[nsv] = 1.0
        blocks.append(ConeBlock(Cone.NONNEG, nsv, 1))
    return ConeProgram(c, trace_row.reshape(1, -1), np.array([1.0]), tuple(blocks))


def _simplex_lattice(dims: int, steps: int) -> np.ndarray:
    """Integer lattice points of the simplex {w >= 0, sum w = steps}."""
    if dims == 1:
        return np.array([[steps]], dtype=np.int64)
    rows = []
    for first in range(steps + 1):
        rest = _simplex_lattice(dims - 1, steps - first)
        head = np.full((rest.shape[0], 1), first, dtype=np.int64)
        rows.append(np.hstack([head, rest]))
    return np.vstack(rows)


def l1_ball_grid_max(q: np.ndarray, resolution: float) -> float:
    """Brute-force max of x'Qx over the l1 unit ball on a dense grid.

    Any interior stationary point scores 0, so it is enough to scan the
    l1 sphere (all sign patterns of a simplex lattice) and take the max
    against 0.
    """
    n = q.shape[0]
    steps = int(round(1.0 / resolution))
    weights = _simplex_lattice(n, steps).astype(float) / steps
    best = 0.0
    for tail in itertools.product((1.0, -1.0), repeat=n - 1):
        signs = np.array((1.0,) + tail)  # global sign flip leaves x'Qx alone
        pts = weights * signs
        vals = np.einsum("ij,jk,ik->i", pts, q, pts)
        best = max(best, float(vals.max()))
    return best


def diag_abs(q: np.ndarray) -> np.ndarray:
    """Copy of q with its diagonal replaced by absolute values."""
    out = q.copy()
    idx = np.diag_indices(q.shape[0])
    out[idx] = np.abs(out[idx])
    return out
