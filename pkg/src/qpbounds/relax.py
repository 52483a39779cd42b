"""Builders turning (Q, k, p) into cone programs for seven SDP relaxations.

All of the lifted formulations share the doubled objective matrix
Qt = [[Q, -Q], [-Q, Q]] and a PSD variable Y of order 2n; `sdp-x` works on
an order-n variable X directly.  With f = n^(2(p-1)/p):

    dnn-l1            max Qt.Y    st  sum(Y) = 1
    dnn-l1-new        max Qt.Y    st  sum(Y) <= 1,  Y[i, n+i] = 0
    sdp-x             max Q.X     st  tr X = 1,  sum|X| <= k
    dnn-l2l1          max k Qt.Y  st  k tr(A'A Y) = 1,  sum(Y) = 1
    dnn-l2l1-new-le   max k Qt.Y  st  k tr(A'A Y) = 1,  sum(Y) <= 1,  Y[i, n+i] = 0
    dnn-l2l1-new-eq   max k Qt.Y  st  k tr Y = 1,  sum(Y) = 1,  Y[i, n+i] = 0
    dnn-lp            max f Qt.Y  st  f tr Y <= 1,  sum(Y) <= 1,  Y[i, n+i] = 0

plus Y >= 0 (elementwise) and Y PSD everywhere, A = [I, -I], and
tr(A'A Y) = tr Y - 2 sum_i Y[i, n+i] expanded as a linear row.

Elementwise conditions on the PSD block follow the duplicate-coordinate
scheme: every svec slot of Y gets a twin variable in a nonnegative (or, for
the pinned Y[i, n+i] entries, zero) cone block, linked by one equality row
per slot.  Inequalities get scalar slack variables.  The sqrt(2) svec
scaling preserves signs, so nonnegativity of the scaled slots is exactly
elementwise nonnegativity of Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .conic import (
    Cone,
    ConeBlock,
    ConeProgram,
    ConeSolution,
    ConicSolverError,
    SolverSettings,
    SolverStatus,
    solve,
)
from .linalg import SQRT2, check_symmetric, eig_sym, lambda_max, smat, svec, svec_length


class Relaxation(Enum):
    DNN_L1 = "dnn-l1"
    DNN_L1_NEW = "dnn-l1-new"
    SDP_X = "sdp-x"
    DNN_L2L1 = "dnn-l2l1"
    DNN_L2L1_NEW_LE = "dnn-l2l1-new-le"
    DNN_L2L1_NEW_EQ = "dnn-l2l1-new-eq"
    DNN_LP = "dnn-lp"

    @property
    def needs_k(self) -> bool:
        return self in (
            Relaxation.SDP_X,
            Relaxation.DNN_L2L1,
            Relaxation.DNN_L2L1_NEW_LE,
            Relaxation.DNN_L2L1_NEW_EQ,
        )

    @property
    def needs_p(self) -> bool:
        return self is Relaxation.DNN_LP


@dataclass
class BuiltRelaxation:
    """A cone program plus the decoding map back to the matrix variable."""

    program: ConeProgram
    kind: Relaxation
    n: int
    matrix_order: int  # 2n for the lifted forms, n for sdp-x
    psd_start: int
    psd_size: int
    k: float | None = None
    p: float | None = None

    def matrix(self, solution_or_x) -> np.ndarray:
        """Decode the PSD matrix variable from a solution (or raw vector)."""
        x = solution_or_x.x if isinstance(solution_or_x, ConeSolution) else solution_or_x
        seg = np.asarray(x, dtype=float)[self.psd_start:self.psd_start + self.psd_size]
        return smat(seg, self.matrix_order)


def lift_qtilde(q) -> np.ndarray:
    """Doubled objective matrix [[Q, -Q], [-Q, Q]] for the split variable."""
    qs = check_symmetric(q, "Q")
    return np.block([[qs, -qs], [-qs, qs]])


def splitting_matrix(n: int) -> np.ndarray:
    """The n-by-2n sign-splitting map A = [I, -I]; x = A y recovers x from y."""
    if n < 1:
        raise ValueError("n must be at least 1")
    eye = np.eye(n)
    return np.hstack([eye, -eye])


def lp_factor(n: int, p: float) -> float:
    """Norm-comparison constant n^(2(p-1)/p) linking the l1 and lp balls."""
    return float(n) ** (2.0 * (p - 1.0) / p)


def _validate_params(kind: Relaxation, n: int, k: float | None, p: float | None):
    if kind.needs_k:
        if k is None:
            raise ValueError(f"relaxation {kind.value} requires parameter k")
        if not (1.0 <= k <= n):
            raise ValueError(f"k must lie in [1, n] = [1, {n}], got {k}")
    elif k is not None:
        raise ValueError(f"relaxation {kind.value} takes no parameter k")
    if kind.needs_p:
        if p is None:
            raise ValueError(f"relaxation {kind.value} requires parameter p")
        if not (1.0 < p < 2.0):
            raise ValueError(f"p must lie in the open interval (1, 2), got {p}")
    elif p is not None:
        raise ValueError(f"relaxation {kind.value} takes no parameter p")


def _slot_map(order: int) -> np.ndarray:
    """order x order lookup table from (i, j) to the svec slot index."""
    iu = np.triu_indices(order)
    table = np.empty((order, order), dtype=int)
    table[iu] = np.arange(iu[0].size)
    table[iu[1], iu[0]] = table[iu]
    return table


def _sum_row(order: int) -> np.ndarray:
    """svec coefficients of sum(Y): 1 on diagonal slots, sqrt(2) off it."""
    iu = np.triu_indices(order)
    row = np.full(iu[0].size, SQRT2)
    row[iu[0] == iu[1]] = 1.0
    return row


def _build_lifted(kind, qs, factor, trace_coupling, trace_eq, sum_eq, pair_zero, k, p):
    """Assemble one of the Y-based programs (everything except sdp-x).

    trace_coupling: None for no trace row, "plain" for tr Y, "split" for
    tr(A'A Y); trace_eq / sum_eq pick equality vs <= (slack) for each row.
    """
    n = qs.shape[0]
    order = 2 * n
    nsv = svec_length(order)
    slots = _slot_map(order)
    diag_slots = slots[np.arange(order), np.arange(order)]
    pair_slots = slots[np.arange(n), np.arange(n, order)]

    if pair_zero:
        keep = np.ones(nsv, dtype=bool)
        keep[pair_slots] = False
        nonneg_slots = np.flatnonzero(keep)
    else:
        nonneg_slots = np.arange(nsv)
    n_nonneg = nonneg_slots.size
    n_zero = n if pair_zero else 0
    n_slack = (0 if trace_coupling is None or trace_eq else 1) + (0 if sum_eq else 1)

    num_vars = nsv + n_nonneg + n_zero + n_slack
    num_rows = nsv + (0 if trace_coupling is None else 1) + 1
    a = np.zeros((num_rows, num_vars))
    b = np.zeros(num_rows)

    dup_start = nsv
    rows = np.arange(n_nonneg)
    a[rows, nonneg_slots] = 1.0
    a[rows, dup_start + rows] = -1.0
    if pair_zero:
        rows = nsv - n + np.arange(n)  # n_nonneg == nsv - n here
        a[rows, pair_slots] = 1.0
        a[rows, dup_start + n_nonneg + np.arange(n)] = -1.0

    slack_col = nsv + n_nonneg + n_zero
    row = nsv
    if trace_coupling is not None:
        a[row, diag_slots] = factor
        if trace_coupling == "split":
            a[row, pair_slots] -= factor * SQRT2  # the -2 sum Y[i, n+i] part
        if not trace_eq:
            a[row, slack_col] = 1.0
            slack_col += 1
        b[row] = 1.0
        row += 1
    a[row, :nsv] = _sum_row(order)
    if not sum_eq:
        a[row, slack_col] = 1.0
        slack_col += 1
    b[row] = 1.0

    c = np.zeros(num_vars)
    c[:nsv] = factor * svec(lift_qtilde(qs))

    blocks = [ConeBlock(Cone.PSD, 0, nsv, order=order),
              ConeBlock(Cone.NONNEG, dup_start, n_nonneg)]
    pos = dup_start + n_nonneg
    if n_zero:
        blocks.append(ConeBlock(Cone.ZERO, pos, n_zero))
        pos += n_zero
    if n_slack:
        blocks.append(ConeBlock(Cone.NONNEG, pos, n_slack))

    program = ConeProgram(c, a, b, tuple(blocks))
    return BuiltRelaxation(program, kind, n, order, 0, nsv, k=k, p=p)


def _build_sdp_x(qs, k):
    """max Q.X st tr X = 1, sum|X| <= k, X PSD, via the standard abs split.

    An auxiliary nonnegative symmetric block U dominates X elementwise on
    both sides (U - X >= 0, U + X >= 0) and carries the budget sum(U) <= k.
    """
    n = qs.shape[0]
    nsv = svec_length(n)
    slots = _slot_map(n)
    diag_slots = slots[np.arange(n), np.arange(n)]

    # layout: X | U | P = U - X | M = U + X | slack
    num_vars = 4 * nsv + 1
    num_rows = 2 * nsv + 2
    a = np.zeros((num_rows, num_vars))
    b = np.zeros(num_rows)

    rows = np.arange(nsv)
    a[rows, 2 * nsv + rows] = 1.0  # P
    a[rows, nsv + rows] = -1.0     # -U
    a[rows, rows] = 1.0            # +X
    rows = nsv + np.arange(nsv)
    a[rows, 3 * nsv + np.arange(nsv)] = 1.0  # M
    a[rows, nsv + np.arange(nsv)] = -1.0     # -U
    a[rows, np.arange(nsv)] = -1.0           # -X

    a[2 * nsv, diag_slots] = 1.0
    b[2 * nsv] = 1.0
    a[2 * nsv + 1, nsv:2 * nsv] = _sum_row(n)
    a[2 * nsv + 1, 4 * nsv] = 1.0
    b[2 * nsv + 1] = float(k)

    c = np.zeros(num_vars)
    c[:nsv] = svec(qs)

    blocks = (
        ConeBlock(Cone.PSD, 0, nsv, order=n),
        ConeBlock(Cone.NONNEG, nsv, 3 * nsv + 1),
    )
    program = ConeProgram(c, a, b, blocks)
    return BuiltRelaxation(program, Relaxation.SDP_X, n, n, 0, nsv, k=float(k))


def build(kind: Relaxation, q, k: float | None = None, p: float | None = None) -> BuiltRelaxation:
    """Build the cone program for one relaxation of the given matrix.

    Q is symmetrized as (Q + Q')/2 up front; k must lie in [1, n] and p in
    (1, 2) where required.
    """
    qs = check_symmetric(q, "Q")
    n = qs.shape[0]
    _validate_params(kind, n, k, p)
    if kind is Relaxation.DNN_L1:
        return _build_lifted(kind, qs, 1.0, None, False, True, False, None, None)
    if kind is Relaxation.DNN_L1_NEW:
        return _build_lifted(kind, qs, 1.0, None, False, False, True, None, None)
    if kind is Relaxation.SDP_X:
        return _build_sdp_x(qs, k)
    if kind is Relaxation.DNN_L2L1:
        return _build_lifted(kind, qs, float(k), "split", True, True, False, float(k), None)
    if kind is Relaxation.DNN_L2L1_NEW_LE:
        return _build_lifted(kind, qs, float(k), "split", True, False, True, float(k), None)
    if kind is Relaxation.DNN_L2L1_NEW_EQ:
        return _build_lifted(kind, qs, float(k), "plain", True, True, True, float(k), None)
    if kind is Relaxation.DNN_LP:
        return _build_lifted(kind, qs, lp_factor(n, p), "plain", False, False, True, None, float(p))
    raise ValueError(f"unknown relaxation kind {kind!r}")


@dataclass
class RelaxationResult:
    value: float
    matrix: np.ndarray
    solution: ConeSolution
    built: BuiltRelaxation


def solve_relaxation(
    kind: Relaxation,
    q,
    k: float | None = None,
    p: float | None = None,
    settings: SolverSettings | None = None,
) -> RelaxationResult:
    """Build and solve one relaxation; the result keeps the decoded matrix."""
    built = build(kind, q, k=k, p=p)
    solution = solve(built.program, settings)
    return RelaxationResult(solution.objective, built.matrix(solution), solution, built)


def bound_b2(q) -> float:
    """Closed-form bound from the enclosing l2 ball: max(lambda_max(Q), 0)."""
    return max(lambda_max(q), 0.0)


def bound_b1(q, p: float, settings: SolverSettings | None = None) -> float:
    """Norm-comparison bound n^(2(p-1)/p) times the dnn-l1 value."""
    qs = check_symmetric(q, "Q")
    if not (1.0 < p < 2.0):
        raise ValueError(f"p must lie in the open interval (1, 2), got {p}")
    res = solve_relaxation(Relaxation.DNN_L1, qs, settings=settings)
    if res.solution.status is not SolverStatus.OPTIMAL:
        raise ConicSolverError(
            f"dnn-l1 solve for the l1-based bound ended with {res.solution.status.value}"
        )
    return lp_factor(qs.shape[0], p) * res.value


def repair_complementarity(ystar, q) -> np.ndarray:
    """Zero out the Y[i, n+i] entries of a dnn-l1 optimum without losing value.

    Each positive pair entry d = Y[i, n+i] moves onto the two matching
    diagonal slots, which adds the rank-one matrix
    d (e_i - e_{n+i})(e_i - e_{n+i})' and changes the objective by
    4 d Q[i, i] >= 0 whenever diag(Q) >= 0.  Pair entries that are slightly
    negative (solver noise) are dropped as zero mass.
    """
    y = check_symmetric(ystar, "Ystar")
    qs = check_symmetric(q, "Q")
    n = qs.shape[0]
    if y.shape[0] != 2 * n:
        raise ValueError(f"Ystar has order {y.shape[0]}, expected {2 * n}")
    if np.min(np.diag(qs)) < 0.0:
        raise ValueError("repair requires diag(Q) >= 0; a negative diagonal entry was found")
    out = y.copy()
    for i in range(n):
        d = out[i, n + i]
        if d > 0.0:
            out[i, i] += d
            out[n + i, n + i] += d
        out[i, n + i] = 0.0
        out[n + i, i] = 0.0
    return out


def extract_x(y, k: float) -> np.ndarray:
    """Compress an order-2n split-variable matrix to x-space: k * A Y A'."""
    ys = check_symmetric(y, "Y")
    order = ys.shape[0]
    if order % 2:
        raise ValueError(f"Y must have even order, got {order}")
    n = order // 2
    return float(k) * (ys[:n, :n] - ys[:n, n:] - ys[n:, :n] + ys[n:, n:])


@dataclass
class BoundCertificate:
    """Outcome of the upper-bound check for the tightened equality form."""

    certified: bool
    reason: str
    lambda_max: float
    eigvec_l1: float | None  # l1 norm of the top eigenvector when it is unique


def eq_bound_certificate(
    q, k: float, dnn_l2l1_value: float, margin: float = 1e-6
) -> BoundCertificate:
    """Decide whether dnn-l2l1-new-eq is a certified upper bound.

    Two sufficient conditions are checked: the dnn-l2l1 value sitting
    strictly below lambda_max, or (for a simple top eigenvalue) the top
    eigenvector exceeding the l1 budget sqrt(k).  Either one implies the
    sphere-with-l1-budget optimum is below lambda_max, which is exactly
    when the equality form still bounds it from above.
    """
    dec = eig_sym(q)
    lam = float(dec.values[0])
    unique = dec.values.size == 1 or dec.values[0] - dec.values[1] > 1e-8 * (1.0 + abs(lam))
    vec_l1 = float(np.sum(np.abs(dec.vectors[:, 0]))) if unique else None
    if dnn_l2l1_value < lam - margin:
        return BoundCertificate(True, "dnn-l2l1 value sits below lambda_max", lam, vec_l1)
    if unique and vec_l1 > math.sqrt(k) + 1e-9:
        return BoundCertificate(
            True, "top eigenvector exceeds the l1 budget sqrt(k)", lam, vec_l1
        )
    if not unique:
        return BoundCertificate(
            False, "repeated top eigenvalue and dnn-l2l1 reaches lambda_max", lam, vec_l1
        )
    return BoundCertificate(
        False,
        "top eigenvector fits the l1 budget and dnn-l2l1 reaches lambda_max",
        lam,
        vec_l1,
    )
