import numpy as np
import pytest

from fdstab.catalog import ab3_centered, crank_nicolson, lax_friedrichs, leapfrog
from fdstab.cauchy import TorusState, step_cauchy
from fdstab.errors import ConfigError, EmptyRun, TruncationBreach
from fdstab.ibvp import (HalfSpaceState, IBVPSources, estimate_sweep, measure_estimates, random_sources,
                         run_aux, run_ibvp, step_aux, step_ibvp, superposition_solve, write_series_csv)

SHIPPED = [leapfrog(), lax_friedrichs(), ab3_centered(), leapfrog(boundary="dirichlet"),
           leapfrog(boundary="extrapolation2"), crank_nicolson()]


def test_zero_problem_stays_zero():
    sch = leapfrog()
    J = 30
    run = run_ibvp(sch, IBVPSources(np.zeros((2, J + 1))), 10, 0.01, J)
    assert not run.history.any()
    aux = run_aux(sch, IBVPSources(np.zeros((2, J + 1))), 10, 0.01, J)
    assert not aux.history.any()


def test_single_steps_match_runs():
    sch = leapfrog()
    rng = np.random.default_rng(0)
    J, steps = 80, 5
    src = random_sources(sch, steps, J, rng)
    run = run_ibvp(sch, src, steps, 0.01, J)
    state = HalfSpaceState(src.f, 0, J, 0.01, 0.01 / 0.8)
    for k in range(steps):
        n = k + 2
        state = step_ibvp(sch, state, src.F[n], src.g[n])
    assert np.array_equal(state.levels[-1], run.history[-1])
    aux_run = run_aux(sch, IBVPSources(src.f), steps, 0.01, J)
    lo = aux_run.lo
    state = HalfSpaceState(np.concatenate((np.zeros((2, -lo)), src.f), axis=1), lo, J, 0.01, 0.01 / 0.8)
    for _ in range(steps):
        state = step_aux(sch, state)
    assert np.array_equal(state.levels[-1], aux_run.history[-1])


@pytest.mark.parametrize("scheme", SHIPPED, ids=lambda s: s.name)
def test_step_residuals(scheme):
    rng = np.random.default_rng(1)
    J, steps = 120, 30
    src = random_sources(scheme, steps, J, rng)
    assert run_ibvp(scheme, src, steps, 0.01, J, check_residuals=True).max_residual <= 1e-11
    assert run_aux(scheme, IBVPSources(src.f, None, src.g), steps, 0.01, J,
                   check_residuals=True).max_residual <= 1e-11


@pytest.mark.parametrize("scheme", SHIPPED, ids=lambda s: s.name)
def test_linearity(scheme):
    rng = np.random.default_rng(2)
    J, steps = 120, 30
    a, b = random_sources(scheme, steps, J, rng), random_sources(scheme, steps, J, rng)
    total = IBVPSources(a.f + b.f, a.F + b.F, a.g + b.g)
    ua = run_ibvp(scheme, a, steps, 0.01, J).history
    ub = run_ibvp(scheme, b, steps, 0.01, J).history
    ut = run_ibvp(scheme, total, steps, 0.01, J).history
    assert np.abs(ut - ua - ub).max() <= 1e-11 * np.abs(ut).max()


@pytest.mark.parametrize("scheme", [leapfrog(), ab3_centered(), lax_friedrichs()], ids=lambda s: s.name)
def test_doubling_J_changes_nothing(scheme):
    rng = np.random.default_rng(3)
    steps = 25
    J = 12 + 2 * steps + 10
    src = random_sources(scheme, steps, J, rng)
    big = IBVPSources(np.pad(src.f, ((0, 0), (0, J))), np.pad(src.F, ((0, 0), (0, J))), src.g)
    u1 = run_ibvp(scheme, src, steps, 0.01, J).history
    u2 = run_ibvp(scheme, big, steps, 0.01, 2 * J).history
    assert np.abs(u1 - u2[:, :u1.shape[1]]).max() <= 1e-10 * max(1, np.abs(u1).max())


def test_far_end_breach_detected():
    sch = leapfrog()
    J = 20
    f = np.zeros((2, J + 1))
    f[:, J - 2] = 1.0
    with pytest.raises(TruncationBreach):
        run_ibvp(sch, IBVPSources(f), 3, 0.01, J)


def test_interior_agrees_with_torus_before_boundary_contact():
    sch = leapfrog()
    J, steps = 200, 20
    n = J + 1
    x = np.arange(n)
    f = np.array([np.exp(-((x - 100 - s) / 6.0) ** 2) * (np.abs(x - 100) < 40) for s in range(2)])
    state = TorusState.create(sch, f)
    for _ in range(steps):
        state = step_cauchy(sch, state)
    # torus index j is half-space cell j; the support stays far from both ends
    run = run_ibvp(sch, IBVPSources(f), steps, 0.01, J)
    assert np.allclose(run.history[-1][1:J // 2 + 60], state.levels[-1][1:J // 2 + 60], atol=1e-12)


def test_zero_data_ratios_vanish_and_bad_inputs():
    sch = leapfrog()
    run = run_ibvp(sch, IBVPSources(np.zeros((2, 31))), 5, 0.01, 30)
    rep = measure_estimates(sch, run, 1.0)
    assert all(v == 0 for v in rep.ratios.values())
    with pytest.raises(ConfigError):
        measure_estimates(sch, run, 0.0)
    empty = run_ibvp(sch, IBVPSources(np.zeros((2, 31))), 0, 0.01, 30)
    with pytest.raises(EmptyRun):
        measure_estimates(sch, empty, 1.0)


def test_ratio_selection_follows_data():
    sch = leapfrog()
    rng = np.random.default_rng(4)
    src = random_sources(sch, 10, 60, rng)
    rep = measure_estimates(sch, run_ibvp(sch, src, 10, 0.01, 60), 1.0)
    assert set(rep.ratios) == {"full", "trace_sum"}
    only_f = IBVPSources(src.f)
    rep = measure_estimates(sch, run_ibvp(sch, only_f, 10, 0.01, 60), 1.0)
    assert set(rep.ratios) == {"full", "trace_sum", "semigroup"}
    no_f = IBVPSources(np.zeros_like(src.f), src.F, src.g)
    rep = measure_estimates(sch, run_ibvp(sch, no_f, 10, 0.01, 60), 1.0)
    assert "strong_stability" in rep.ratios
    assert all(np.isfinite(v) for v in rep.ratios.values())


def test_impulse_boundary_data_for_aux():
    sch = leapfrog()
    J, steps = 60, 20
    g = np.zeros((steps + 2, 1))
    g[5, 0] = 1.0
    run = run_aux(sch, IBVPSources(np.zeros((2, J + 1)), None, g), steps, 0.01, J)
    rep = measure_estimates(sch, run, 1.0, P1=5)
    assert np.all(np.isfinite(run.history))
    assert 0 < rep.ratios["aux_estimate"] < np.inf


@pytest.mark.parametrize("kind,watch", [("ibvp", ("semigroup", "full")), ("aux", ("semigroup", "aux_estimate"))])
def test_sweep_ratios_stable_for_leapfrog(kind, watch):
    rep = estimate_sweep(leapfrog(), [1 / 50, 1 / 100, 1 / 200], [0.5, 2.0], kind, watch=watch)
    assert rep.verdict, rep.spreads


def test_estimates_reproducible():
    sch = ab3_centered()
    a = estimate_sweep(sch, [1 / 50, 1 / 100], [1.0], "ibvp").to_dict()
    b = estimate_sweep(sch, [1 / 50, 1 / 100], [1.0], "ibvp").to_dict()
    assert a == b


@pytest.mark.parametrize("scheme", SHIPPED, ids=lambda s: s.name)
def test_superposition(scheme):
    rng = np.random.default_rng(5)
    steps = 30
    J = 12 + steps * 2 + 10
    for _ in range(3):
        res = superposition_solve(scheme, random_sources(scheme, steps, J, rng), steps, 0.01, J)
        assert res.max_deviation <= 1e-10


def test_superposition_without_initial_data():
    sch = leapfrog()
    rng = np.random.default_rng(6)
    src = random_sources(sch, 20, 70, rng)
    src = IBVPSources(np.zeros_like(src.f), src.F, src.g)
    res = superposition_solve(sch, src, 20, 0.01, 70)
    assert not res.aux.history.any()
    assert np.array_equal(res.bvp.history, res.direct.history)


def test_series_csv(tmp_path):
    sch = leapfrog()
    run = run_ibvp(sch, random_sources(sch, 5, 40, np.random.default_rng(7)), 5, 0.01, 40)
    path = tmp_path / "s.csv"
    write_series_csv(run, 1.0, path, P1=3)
    lines = path.read_text().splitlines()
    assert lines[0] == "step,weighted_norm,weighted_trace,sup_norm" and len(lines) == 8
