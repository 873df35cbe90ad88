"""Integrator contracts: determinism, equilibria, dissipation, moments."""

from dataclasses import replace

import numpy as np
import pytest

from phcf import (
    ClosedLoop,
    Explicit,
    InvalidInputError,
    ModelParams,
    NumericalBlowupError,
    Quadratic,
    SimConfig,
    State,
    Uncontrolled,
    UniformStationary,
    UniformZeroSpeed,
    derive_run_seed,
    initial_state,
    max_gap_closure_error,
    observables,
    preset,
    run_ensemble,
    simulate,
    step,
    step_noise,
)


def fig_params(name):
    return preset(name).params


# ---------------------------------------------------------------------------
# initial conditions


def test_uniform_initial_spacing():
    params = fig_params("fig1")
    state = initial_state(params, UniformZeroSpeed())
    assert np.array_equal(state.q, np.arange(20) * (141.0 / 20.0))
    assert np.array_equal(state.p, np.zeros(20))


def test_stationary_speeds_per_regime():
    assert initial_state(fig_params("fig1"), UniformStationary()).p[0] == 0.0
    assert initial_state(fig_params("fig2"), UniformStationary()).p[0] == 2.05
    assert initial_state(fig_params("fig3"), UniformStationary()).p[0] == 2.05


def test_explicit_initial_validation():
    params = fig_params("fig1")
    q = np.arange(20) * 7.0
    with pytest.raises(InvalidInputError):
        initial_state(params, Explicit(q=q[::-1].copy(), p=np.zeros(20)))
    with pytest.raises(InvalidInputError):
        initial_state(params, Explicit(q=q + 141.0, p=np.zeros(20)))  # beyond [0, L)
    with pytest.raises(InvalidInputError):
        initial_state(params, Explicit(q=q[:5], p=np.zeros(5)))
    state = initial_state(params, Explicit(q=q, p=np.ones(20)))
    assert state.p.sum() == 20.0


def test_config_validation():
    with pytest.raises(InvalidInputError):
        SimConfig(dt=0.0, t_end=1.0)
    with pytest.raises(InvalidInputError):
        SimConfig(dt=0.1, t_end=0.01)
    with pytest.raises(InvalidInputError):
        SimConfig(dt=0.1, t_end=1.0, sample_stride=0)
    with pytest.raises(InvalidInputError):
        SimConfig(dt=0.1, t_end=1.0, seed=-1)


# ---------------------------------------------------------------------------
# single step


def test_step_rigid_rotation_at_equilibrium():
    # L = 40 makes the uniform spacing 2.0 exact in floats
    params = ModelParams(20, 40.0, 1.0, 1.0, 0.0, 0.0, Uncontrolled())
    state = State(q=np.arange(20) * 2.0, p=np.full(20, 3.0))
    new = step(state, params, Quadratic(params.alpha), 0.01, np.zeros(20))
    assert np.array_equal(new.p, state.p)
    assert np.array_equal(new.q, state.q + 0.01 * state.p)


def test_step_bit_identical_with_same_noise():
    params = fig_params("fig1")
    state = initial_state(params, UniformZeroSpeed())
    noise = step_noise(99, 0, 20)
    a = step(state, params, Quadratic(params.alpha), 0.001, noise)
    b = step(state, params, Quadratic(params.alpha), 0.001, noise)
    assert np.array_equal(a.q, b.q) and np.array_equal(a.p, b.p)


def test_step_noise_shape_checked():
    params = fig_params("fig1")
    state = initial_state(params, UniformZeroSpeed())
    with pytest.raises(InvalidInputError):
        step(state, params, Quadratic(params.alpha), 0.001, np.zeros(7))


def test_step_blowup_detection():
    params = replace(fig_params("fig1"), sigma=0.0)
    state = State(q=np.arange(20) * 7.0, p=np.full(20, 1e9))
    with pytest.raises(NumericalBlowupError):
        step(state, params, Quadratic(params.alpha), 0.001, np.zeros(20), step_index=7)


def test_simulate_equals_repeated_steps():
    """The batch engine and the public single-step op share their math."""
    sc = preset("fig2")
    config = SimConfig(dt=0.01, t_end=0.5, sample_stride=1, seed=31)
    ts = simulate(sc.params, sc.potential, config)
    state = initial_state(sc.params, config.initial)
    for s in range(len(ts.states) - 1):
        state = step(state, sc.params, sc.potential, config.dt, step_noise(31, s, 20))
        assert np.array_equal(state.q, ts.states[s + 1].q)
        assert np.array_equal(state.p, ts.states[s + 1].p)


# ---------------------------------------------------------------------------
# trajectories


def test_simulate_deterministic():
    sc = preset("fig1")
    config = SimConfig(dt=0.01, t_end=2.0, sample_stride=10, seed=5)
    a = simulate(sc.params, sc.potential, config)
    b = simulate(sc.params, sc.potential, config)
    assert np.array_equal(a.times, b.times)
    for sa, sb in zip(a.states, b.states):
        assert np.array_equal(sa.q, sb.q) and np.array_equal(sa.p, sb.p)


def test_sample_times_spacing():
    sc = preset("fig1")
    config = SimConfig(dt=0.01, t_end=1.0, sample_stride=25, seed=5)
    ts = simulate(sc.params, sc.potential, config)
    assert len(ts.states) == 5  # steps 0, 25, 50, 75, 100
    assert np.allclose(np.diff(ts.times), 0.25, rtol=0, atol=1e-12)
    assert ts.times[-1] == pytest.approx(1.0, abs=1e-12)


def test_zero_noise_equilibria_are_fixed_points():
    for name in ("fig1", "fig2", "fig3"):
        params = replace(fig_params(name), sigma=0.0)
        eq_speed = initial_state(params, UniformStationary()).p[0]
        config = SimConfig(dt=0.001, t_end=10.0, sample_stride=1000, seed=0, initial=UniformStationary())
        ts = simulate(params, Quadratic(params.alpha), config)
        drift_from_eq = max(abs(s.p - eq_speed).max() for s in ts.states)
        assert drift_from_eq <= 1e-9, name
        gaps_err = max_gap_closure_error(ts)
        assert gaps_err <= 1e-9


def test_hamiltonian_dissipates_without_noise():
    """sigma=0, uncontrolled, beta>0: energy is non-increasing along the
    trajectory; halving dt must not break the per-step tolerance."""
    rng = np.random.default_rng(8)
    n = 10
    params = ModelParams(n, 30.0, 1.0, 0.8, 0.0, 0.0, Uncontrolled())
    q0 = np.sort(rng.uniform(0, 30.0, n))
    q0[0] = 0.0
    p0 = rng.normal(0, 1.0, n)
    for dt in (1e-3, 5e-4):
        config = SimConfig(dt=dt, t_end=20.0, sample_stride=1, seed=0, initial=Explicit(q=q0, p=p0))
        ts = simulate(params, Quadratic(params.alpha), config)
        energy = observables(ts).hamiltonian
        tol = 1e-9 * max(1.0, energy[0])
        assert np.diff(energy).max() <= tol
        assert energy[-1] < energy[0]


def test_open_loop_relaxation_to_commanded_speed():
    sc = preset("fig2")
    params = replace(sc.params, sigma=0.0)
    config = SimConfig(dt=0.01, t_end=250.0, sample_stride=2500, seed=0, initial=UniformZeroSpeed())
    ts = simulate(params, sc.potential, config)
    assert abs(ts.states[-1].p.mean() - 2.05) <= 1e-3


def test_self_convergence_first_order():
    """sigma=0 endpoint error against a dt=1e-5 reference halves with dt."""
    params = ModelParams(8, 40.0, 2.0, 1.0, 1.0, 0.0, ClosedLoop(ell=2.0, t_gap=1.0))
    rng = np.random.default_rng(5)
    q0 = np.sort(rng.uniform(0, 40.0, 8))
    q0[0] = 0.1
    p0 = rng.normal(2.0, 1.0, 8)

    def endpoint(dt):
        steps = int(round(2.0 / dt))
        config = SimConfig(dt=dt, t_end=2.0, sample_stride=steps, seed=0, initial=Explicit(q=q0, p=p0))
        last = simulate(params, Quadratic(params.alpha), config).states[-1]
        return np.concatenate([last.q, last.p])

    ref = endpoint(1e-5)
    err_coarse = np.abs(endpoint(4e-3) - ref).max()
    err_fine = np.abs(endpoint(2e-3) - ref).max()
    assert 1.6 <= err_coarse / err_fine <= 2.4


def test_ring_conservation_quick():
    for name in ("fig1", "fig2", "fig3"):
        sc = preset(name)
        config = SimConfig(dt=0.01, t_end=10.0, sample_stride=10, seed=2)
        ts = simulate(sc.params, sc.potential, config)
        assert max_gap_closure_error(ts) <= 1e-6 * 141.0


def test_mean_speed_recursion_is_exact():
    """The discretized mean speed obeys
    pbar+ = pbar + dt*gamma*(x - pbar) + (sigma/N)*sqrt(dt)*sum(noise)
    to rounding (gamma term absent without control)."""
    for name, gamma_term in (("fig1", False), ("fig2", True)):
        sc = preset(name)
        params = sc.params
        config = SimConfig(dt=0.01, t_end=1.0, sample_stride=1, seed=17)
        ts = simulate(params, sc.potential, config)
        n = params.n_vehicles
        sqdt = np.sqrt(config.dt)
        for s in range(len(ts.states) - 1):
            pbar = ts.states[s].p.mean()
            noise_sum = step_noise(17, s, n).sum()
            expected = pbar + params.sigma / n * sqdt * noise_sum
            if gamma_term:
                expected += config.dt * params.gamma * (params.regime.x - pbar)
            assert abs(ts.states[s + 1].p.mean() - expected) <= 1e-12


# ---------------------------------------------------------------------------
# ensembles


def test_ensemble_base_case_matches_simulate():
    sc = preset("fig1")
    config = SimConfig(dt=0.01, t_end=1.0, sample_stride=10, seed=123)
    run = run_ensemble(sc.params, sc.potential, config, 1)[0]
    direct = simulate(sc.params, sc.potential, replace(config, seed=derive_run_seed(123, 0)))
    assert run.config.seed == derive_run_seed(123, 0)
    for sa, sb in zip(run.states, direct.states):
        assert np.array_equal(sa.q, sb.q) and np.array_equal(sa.p, sb.p)


def test_ensemble_runs_are_decorrelated():
    sc = preset("fig1")
    config = SimConfig(dt=0.01, t_end=1.0, sample_stride=1, seed=123)
    runs = run_ensemble(sc.params, sc.potential, config, 2)
    speeds0 = runs[0].speeds()
    speeds1 = runs[1].speeds()
    assert not np.array_equal(speeds0[1:], speeds1[1:])
    assert [ts.config.seed for ts in runs] == [derive_run_seed(123, r) for r in range(2)]


def test_ensemble_rejects_zero_runs():
    sc = preset("fig1")
    with pytest.raises(InvalidInputError):
        run_ensemble(sc.params, sc.potential, SimConfig(dt=0.01, t_end=1.0), 0)


def test_ensemble_mean_speed_diffusion(fig1_ensemble):
    """Across-run variance of pbar(t) tracks sigma^2 t / N (15% at t=100)."""
    i = int(np.searchsorted(fig1_ensemble.times, 100.0))
    sample_var = fig1_ensemble.pbar[i].var(ddof=1)
    target = 1.0 * 100.0 / 20.0
    assert abs(sample_var - target) / target <= 0.15


# ---------------------------------------------------------------------------
# blowup handling


BLOWING = ModelParams(5, 10.0, 0.0, 0.0, 10.0, 1.0, ClosedLoop(ell=1.0, t_gap=0.01))


def test_simulate_blowup_carries_partial():
    config = SimConfig(dt=0.001, t_end=5.0, sample_stride=10, seed=3)
    with pytest.raises(NumericalBlowupError) as exc_info:
        simulate(BLOWING, Quadratic(0.0), config)
    err = exc_info.value
    assert err.step is not None and err.time == pytest.approx(err.step * 0.001)
    partial = err.partial
    assert partial.blowup_step == err.step
    assert 0 < len(partial.states) < 5001
    assert np.isfinite(partial.speeds()).all()


def test_ensemble_blowup_not_fatal():
    config = SimConfig(dt=0.001, t_end=5.0, sample_stride=10, seed=3)
    runs = run_ensemble(BLOWING, Quadratic(0.0), config, 3)
    assert len(runs) == 3
    assert all(ts.blowup_step is not None for ts in runs)
    assert all(len(ts.states) > 0 for ts in runs)


def test_overtake_flag_set_on_crossing():
    params = ModelParams(4, 20.0, 0.1, 0.0, 0.0, 0.0, Uncontrolled())
    init = Explicit(q=np.array([0.0, 0.05, 10.0, 15.0]), p=np.array([5.0, -5.0, 0.0, 0.0]))
    config = SimConfig(dt=0.01, t_end=1.0, sample_stride=1, seed=0, initial=init)
    ts = simulate(params, Quadratic(params.alpha), config)
    assert ts.overtake_flag
    quiet = simulate(params, Quadratic(params.alpha),
                     replace(config, initial=Explicit(q=np.arange(4) * 5.0, p=np.zeros(4))))
    assert not quiet.overtake_flag
