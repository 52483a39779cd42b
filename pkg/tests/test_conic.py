import numpy as np
import pytest

from qpbounds import (
    Cone,
    ConeBlock,
    ConeProgram,
    SolverSettings,
    SolverStatus,
    SplitMix64,
    cone_membership_violation,
    lambda_max,
    random_symmetric,
    residuals,
    solve,
)
from helpers import trace_sdp

TOL = 1e-7
SETTINGS = SolverSettings(tol=TOL)


def test_forced_trace_value():
    sol = solve(trace_sdp(np.eye(3)), SETTINGS)
    assert sol.status is SolverStatus.OPTIMAL
    assert sol.objective == pytest.approx(1.0, abs=1e-6)


def test_diagonal_objective_picks_top_eigenvalue():
    sol = solve(trace_sdp(np.diag([1.0, 2.0, 3.0])), SETTINGS)
    assert sol.objective == pytest.approx(3.0, abs=1e-6)


def test_matches_analytic_eigenvalue_values():
    rng = SplitMix64(10)
    for trial in range(30):
        n = 2 + trial % 7
        q = random_symmetric(rng, n)
        lam = lambda_max(q)
        eq = solve(trace_sdp(q, equality=True), SETTINGS)
        le = solve(trace_sdp(q, equality=False), SETTINGS)
        assert eq.objective == pytest.approx(lam, abs=1e-5)
        assert le.objective == pytest.approx(max(lam, 0.0), abs=1e-5)


def test_simple_lp_blocks():
    # max x0 + x1 st x0 + x1 = 1, x >= 0
    prog = ConeProgram(
        np.array([1.0, 1.0]),
        np.array([[1.0, 1.0]]),
        np.array([1.0]),
        (ConeBlock(Cone.NONNEG, 0, 2),),
    )
    sol = solve(prog, SETTINGS)
    assert sol.objective == pytest.approx(1.0, abs=1e-6)


def test_zero_and_free_blocks():
    # max x0 + 5 x2 st x0 + x1 = 1, x2 pinned by the zero cone, x1 free = 0.25
    prog = ConeProgram(
        np.array([1.0, 0.0, 5.0]),
        np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]),
        np.array([1.0, 0.25]),
        (ConeBlock(Cone.FREE, 0, 2), ConeBlock(Cone.ZERO, 2, 1)),
    )
    sol = solve(prog, SETTINGS)
    assert sol.objective == pytest.approx(0.75, abs=1e-6)
    assert abs(sol.x[2]) <= TOL


def test_solution_contract_residuals_and_membership():
    rng = SplitMix64(11)
    q = random_symmetric(rng, 5)
    prog = trace_sdp(q)
    sol = solve(prog, SETTINGS)
    assert sol.status is SolverStatus.OPTIMAL
    assert max(sol.residual_primal, sol.residual_dual, sol.residual_gap) <= TOL
    rp, rd, rg = residuals(prog, sol.x, sol.eq_dual)
    assert abs(rp - sol.residual_primal) <= 10 * TOL
    assert abs(rd - sol.residual_dual) <= 10 * TOL
    assert abs(rg - sol.residual_gap) <= 10 * TOL
    assert cone_membership_violation(sol.x, prog.blocks) <= TOL


def test_objective_scaling():
    rng = SplitMix64(12)
    q = random_symmetric(rng, 4)
    base = solve(trace_sdp(q), SETTINGS).objective
    for alpha in (0.5, 3.0):
        scaled = solve(trace_sdp(alpha * q), SETTINGS).objective
        assert scaled == pytest.approx(alpha * base, abs=1e-5 * (1 + abs(alpha * base)))


def test_iteration_limit_status():
    rng = SplitMix64(13)
    q = random_symmetric(rng, 5)
    sol = solve(trace_sdp(q), SolverSettings(tol=1e-12, max_iter=10))
    assert sol.status is SolverStatus.ITER_LIMIT
    assert sol.iterations == 10


def test_program_validation_errors():
    with pytest.raises(ValueError):
        # blocks leave a gap
        ConeProgram(
            np.zeros(3), np.zeros((1, 3)), np.zeros(1), (ConeBlock(Cone.NONNEG, 1, 2),)
        ).validate()
    with pytest.raises(ValueError):
        ConeProgram(
            np.array([np.inf, 0.0]),
            np.zeros((0, 2)),
            np.zeros(0),
            (ConeBlock(Cone.NONNEG, 0, 2),),
        ).validate()
    with pytest.raises(ValueError):
        ConeBlock(Cone.PSD, 0, 5, order=3)  # wrong svec length
    with pytest.raises(ValueError):
        SolverSettings(tol=0.0)
    with pytest.raises(ValueError):
        SolverSettings(max_iter=0)
