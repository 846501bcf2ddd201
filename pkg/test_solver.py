"""Тесты маршевой схемы: итерации Пикара, траектория, инварианты."""
import numpy as np
import pytest

from src.solver import PressureLaw, Simulation, StepLog, Trajectory, elastic_energy, picard_step, pressure, run
from src.utils.errors import InvalidInputError, NonConvergenceError, RunAbortedError
from src.utils.retry import retry_with_halving

SCHEMES = ["cr", "mixed", "stokes_approx"]


def _dynamic_config(make_config, name="cr", **solver):
    return make_config(
        physics={
            "a": 1.0,
            "gamma": 1.4,
            "rho0": "1 + 0.5*sin(pi*x)*sin(pi*y)",
            "force": ["sin(pi*y)", "0"],
        },
        mesh={"nx": 4},
        time={"T": 0.1, "dt": 0.05},
        scheme={"name": name, "bc": "navier"},
        solver=solver,
    )


def test_pressure_law_values():
    assert pressure(3.0, 1.0, 2.0) == pytest.approx(9.0)
    assert elastic_energy(3.0, 1.0, 2.0) == pytest.approx(9.0)
    assert pressure(1.0, 2.0, 1.4) == pytest.approx(2.0)
    assert elastic_energy(1.0, 1.0, 1.0) == pytest.approx(0.0)
    assert elastic_energy(0.0, 1.0, 1.0) == 0.0
    assert elastic_energy(np.e, 2.0, 1.0) == pytest.approx(2.0 * np.e)


def test_pressure_law_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        pressure(np.array([1.0, -0.1]), 1.0, 1.4)
    with pytest.raises(InvalidInputError):
        PressureLaw(0.0, 1.4)
    with pytest.raises(InvalidInputError):
        PressureLaw(1.0, 0.5)


def test_equilibrium_picard_step_converges_at_once(equilibrium_config):
    simulation = Simulation(equilibrium_config)
    state, report = simulation.picard_step(simulation.initial_state(), simulation.dt)
    assert report.iterations == 1
    assert report.residual <= 1e-12
    assert np.allclose(state.rho.coefficients, 1.0, atol=1e-13)
    assert state.time == pytest.approx(0.25)
    assert state.step == 1


def test_module_level_picard_step(equilibrium_config):
    simulation = Simulation(equilibrium_config)
    state, report = picard_step(simulation.initial_state(), equilibrium_config, dt=0.1)
    assert state.time == pytest.approx(0.1)
    assert report.iterations == 1


@pytest.mark.parametrize("name", SCHEMES)
def test_equilibrium_stays_at_rest(equilibrium_config, name):
    config = equilibrium_config.with_overrides(scheme={"name": name})
    simulation = Simulation(config)
    trajectory, records = simulation.run()
    assert trajectory.n_steps == 4
    assert len(records) == 5
    for state in trajectory.states:
        assert np.allclose(state.rho.coefficients, 1.0, atol=1e-12)
        assert np.abs(state.u.coefficients).max() <= 1e-12
    assert max(r.mass_drift for r in records) <= 1e-13
    assert simulation.invariants_passed


@pytest.mark.parametrize("name", SCHEMES)
def test_forced_run_keeps_invariants(make_config, name):
    simulation = Simulation(_dynamic_config(make_config, name))
    trajectory, records = simulation.run()
    assert simulation.invariants_passed
    assert trajectory.final.rho.coefficients.min() > 0
    assert max(r.mass_drift for r in records) <= 1e-12
    first, last = records[0], records[-1]
    assert last.energy + last.dissipation <= first.energy + last.work + 1e-8
    assert last.dissipation > 0
    assert all(r.picard_iters >= 1 for r in records[1:])



@pytest.mark.slow
@pytest.mark.parametrize("rho0", ["1", "1 + 0.9*sin(pi*x)*sin(pi*y)"])
@pytest.mark.parametrize("gamma", [1.0, 1.4, 2.0])
@pytest.mark.parametrize("name", SCHEMES)
def test_long_run_on_8x8_keeps_invariants(make_config, rng, name, gamma, rho0):
    c1, c2, c3 = rng.uniform(-1.0, 1.0, 3)
    dt = 0.5 * np.sqrt(2.0) / 8
    config = make_config(
        physics={
            "a": 1.0,
            "gamma": gamma,
            "rho0": rho0,
            "force": [f"{c1:.6f}*sin(pi*y)*cos(pi*x*{c2:.6f})", f"{c3:.6f}*sin(pi*x)"],
        },
        mesh={"nx": 8},
        time={"T": 50 * dt, "dt": dt},
        scheme={"name": name, "bc": "navier"},
    )
    simulation = Simulation(config)
    trajectory, records = simulation.run()

    assert simulation.n_steps == 50
    assert simulation.invariants_passed
    tol = config.solver.picard_tol
    first = records[0]
    for m, record in enumerate(records):
        assert record.rho_min > 0
        assert record.mass_drift <= 1e-12
        slack = 10 * tol * m + 1e-12 * max(1.0, abs(first.energy), abs(record.work), record.dissipation)
        assert record.energy + record.dissipation <= first.energy + record.work + slack


def test_mixed_state_carries_vorticity(make_config):
    trajectory, _ = run(_dynamic_config(make_config, "mixed"))
    assert trajectory.final.w is not None
    assert trajectory.final.u.space == "RT0"


def test_trajectory_lookup(equilibrium_config):
    trajectory, _ = run(equilibrium_config)
    assert isinstance(trajectory, Trajectory)
    assert np.allclose(trajectory.times, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert trajectory.at(0.0) is trajectory[0]
    assert trajectory.at(0.25) is trajectory[1]
    assert trajectory.at(0.3) is trajectory[2]
    assert trajectory.at(1.0) is trajectory.final
    with pytest.raises(InvalidInputError):
        trajectory.at(1.5)
    with pytest.raises(InvalidInputError):
        trajectory.at(-0.1)


def test_nonconvergence_aborts_run(make_config):
    config = _dynamic_config(make_config, picard_max_iter=1)
    with pytest.raises(RunAbortedError) as excinfo:
        Simulation(config).run()
    error = excinfo.value
    assert isinstance(error.cause, NonConvergenceError)
    assert "reducing the time step" in str(error)
    assert len(error.records) == 1
    assert error.trajectory.n_steps == 0


def test_nonpositive_initial_density_rejected(make_config):
    config = make_config(physics={"rho0": "x - 0.5"}, mesh={"nx": 2})
    with pytest.raises(InvalidInputError):
        Simulation(config)


def test_rho_bar_auto_is_mean_density(make_config):
    config = make_config(physics={"rho0": "1 + x"}, mesh={"nx": 4}, scheme={"name": "stokes_approx"})
    assert Simulation(config).rho_bar == pytest.approx(1.5, rel=1e-12)


def test_time_step_rule(make_config):
    simulation = Simulation(make_config(mesh={"nx": 4}, time={"T": 1.0, "c": 0.5}))
    assert simulation.n_steps * simulation.dt == pytest.approx(1.0)
    assert simulation.dt <= 0.5 * simulation.mesh.h_max + 1e-15


def _log(dt):
    return StepLog(dt=dt, curl=dt, div=0.0, penalty=0.0, work=dt, picard_iterations=1, residual=0.0)


def test_retry_splits_failed_step():
    calls = []

    @retry_with_halving(max_halvings=2)
    def step(t, dt):
        calls.append(dt)
        if dt > 0.3:
            raise NonConvergenceError("too large", iterations=1, increment=1.0)
        return t + dt, _log(dt)

    t, log = step(0.0, 1.0)
    assert t == pytest.approx(1.0)
    assert log.substeps == 4
    assert log.curl == pytest.approx(1.0)
    assert calls[0] == 1.0


def test_retry_gives_up():
    @retry_with_halving(max_halvings=1)
    def step(t, dt):
        raise NonConvergenceError("never", iterations=1, increment=1.0)

    with pytest.raises(NonConvergenceError):
        step(0.0, 1.0)
