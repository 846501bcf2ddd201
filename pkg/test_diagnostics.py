"""Тесты диагностики: поток, записи, слабые невязки, порядки, сдвиги, набор свойств."""
import numpy as np
import pytest

from src.diagnostics import (
    CSV_COLUMNS,
    EnergyLedger,
    InvariantStatus,
    LevelResult,
    cross_scheme_study,
    error_norms_and_rates,
    effective_viscous_flux,
    flux_density_pairing,
    flux_norms,
    is_monotone_decreasing,
    observed_rates,
    refinement_ladder,
    run_property_suite,
    stationary_study,
    translation_estimate_check,
    weak_residual,
)
from src.diagnostics.convergence import NOT_AVAILABLE
from src.diagnostics.translation import translate_difference
from src.fem import DofMap, FeFunction, interpolate
from src.mesh import build_structured
from src.solver import State, StepLog, run
from src.utils.config import load_config
from src.utils.errors import InvalidInputError
from src.utils.expressions import ScalarField, VectorField


def _rest_state(mesh, rho_value=1.0):
    rho = FeFunction(DofMap(mesh, "P0"), np.full(mesh.n_triangles, rho_value))
    return State(rho=rho, u=FeFunction(DofMap(mesh, "CR", "navier")))


def test_flux_at_rest_is_minus_pressure(mesh2, make_config):
    physics = make_config(physics={"a": 1.0, "gamma": 2.0}).physics
    flux = effective_viscous_flux(_rest_state(mesh2), physics)
    assert np.allclose(flux.coefficients, -1.0)
    assert flux_norms(flux) == pytest.approx((1.0, 1.0))
    assert flux_density_pairing(flux, _rest_state(mesh2).rho) == pytest.approx(-1.0)

    flux = effective_viscous_flux(_rest_state(mesh2, 3.0), physics)
    assert np.allclose(flux.coefficients, -9.0)


def test_observed_rates():
    assert observed_rates([0.4, 0.2, 0.1]) == pytest.approx([1.0, 1.0])
    assert observed_rates([0.4, 0.1], h=[0.5, 0.25]) == pytest.approx([2.0])
    assert observed_rates([0.0, 0.0]) == [NOT_AVAILABLE]
    assert is_monotone_decreasing([3.0, 2.0, 1.0])
    assert not is_monotone_decreasing([3.0, 3.0, 1.0])


def test_error_table_for_identical_fields(make_config):
    config = make_config(mesh={"nx": 2})
    levels = []
    for nx in (2, 4):
        mesh = build_structured(nx, nx)
        rho = FeFunction(DofMap(mesh, "P0"), np.full(mesh.n_triangles, 2.0))
        u = FeFunction(DofMap(mesh, "CR", "navier"))
        levels.append(LevelResult(nx, mesh.h_max, rho, u, 1.0, config.scheme.name))
    table = error_norms_and_rates(levels, ScalarField("2"), VectorField(["0", "0"]))
    assert list(table["nx"]) == [2, 4]
    assert np.allclose(table["rho_error"], 0.0, atol=1e-14)
    assert list(table["u_rate"]) == [NOT_AVAILABLE, NOT_AVAILABLE]

    with pytest.raises(InvalidInputError):
        error_norms_and_rates(levels[:1], ScalarField("2"), VectorField(["0", "0"]))
    mismatched = [levels[0], LevelResult(4, levels[1].h, levels[1].rho, levels[1].u, 0.5, "cr")]
    with pytest.raises(InvalidInputError):
        error_norms_and_rates(mismatched, ScalarField("2"), VectorField(["0", "0"]))


def test_refinement_ladder():
    assert refinement_ladder(4, 3) == [4, 8, 16]
    with pytest.raises(InvalidInputError):
        refinement_ladder(4, 0)


def test_energy_ledger_and_invariant_status():
    ledger = EnergyLedger(initial=2.0)
    ledger.add(StepLog(dt=0.1, curl=0.2, div=0.1, penalty=0.05, work=0.3, picard_iterations=2, residual=0.0))
    assert ledger.dissipation == pytest.approx(0.35)
    assert ledger.work == pytest.approx(0.3)
    assert ledger.excess(1.9) == pytest.approx(1.9 + 0.35 - 2.0 - 0.3)

    status = InvariantStatus("positivity", larger_is_worse=False)
    status.observe(0.5, 0.0, True, 1)
    status.observe(0.2, 0.0, True, 2)
    assert status.passed
    assert status.value == pytest.approx(0.2)
    status.observe(-0.1, 0.0, False, 3)
    assert not status.passed
    assert status.as_dict()["step"] == 3


def test_records_cover_csv_columns(equilibrium_config):
    _, records = run(equilibrium_config)
    row = records[-1].as_row()
    assert tuple(row) == CSV_COLUMNS
    assert row["step"] == 4
    assert row["time"] == pytest.approx(1.0)
    assert records[0].picard_iters == 0


def test_weak_residual_vanishes_at_rest(equilibrium_config):
    trajectory, _ = run(equilibrium_config)
    bubble = "x*y*(1 - x)*(1 - y)"
    phi = ScalarField(f"{bubble}*(1 + t)")
    v = VectorField([bubble, f"{bubble}*t"])
    continuity, momentum = weak_residual(trajectory, phi, v, equilibrium_config.physics)
    assert continuity <= 1e-12
    assert momentum <= 1e-12


def test_weak_continuity_with_unit_test_function(make_config):
    config = make_config(
        physics={"rho0": "1 + 0.5*sin(pi*x)*sin(pi*y)", "force": ["sin(pi*y)", "0"]},
        mesh={"nx": 4},
        time={"T": 0.1, "dt": 0.05},
    )
    trajectory, _ = run(config)
    continuity, _ = weak_residual(trajectory, ScalarField("1"), VectorField(["0", "0"]), config.physics)
    assert continuity <= 1e-12


def test_translation_of_zero_field(mesh4):
    u = FeFunction(DofMap(mesh4, "CR", "navier"))
    report = translation_estimate_check(u, [[0.1, 0.0], [0.0, 0.2]])
    assert report.ratios == [0.0, 0.0]
    assert report.max_ratio == 0.0


def test_translation_of_constant_field(mesh4):
    u = interpolate(DofMap(mesh4, "CR"), VectorField(["1", "-2"]))
    assert translate_difference(u, np.array([0.1, 0.05])) <= 1e-12


def test_translation_report_for_rt0(mesh4, rng):
    space = DofMap(mesh4, "RT0", "navier")
    v = FeFunction(space)
    v.coefficients[space.free_dofs] = rng.uniform(-1.0, 1.0, space.nfree)
    report = translation_estimate_check(v, [[0.1, 0.0], [0.05, 0.05]])
    assert len(report.ratios) == 2
    assert all(b > 0 for b in report.bounds)
    assert all(np.isfinite(report.ratios))



SHIFTS = [[0.1, 0.0], [0.0, 0.15], [0.1, 0.1]]


@pytest.mark.parametrize(
    "space, field",
    [
        ("CR", ["sin(pi*x)*sin(pi*y)", "x*(1 - x)*y*(1 - y)"]),
        ("RT0", ["-pi*sin(pi*x)*cos(pi*y)", "-pi*cos(pi*x)*sin(pi*y)"]),
    ],
)
def test_translation_constants_stable_under_refinement(space, field):
    constants = []
    for nx in (4, 8, 16):
        mesh = build_structured(nx, nx)
        u = interpolate(DofMap(mesh, space, "navier"), VectorField(field))
        constants.append(translation_estimate_check(u, SHIFTS).max_ratio)
    assert all(c > 0 for c in constants)
    for coarse, fine in zip(constants[:-1], constants[1:]):
        assert abs(fine - coarse) / coarse < 0.5


def test_translation_rejects_large_shift(mesh4):
    u = FeFunction(DofMap(mesh4, "CR", "navier"))
    with pytest.raises(InvalidInputError):
        translation_estimate_check(u, [[1.5, 0.0]])
    with pytest.raises(InvalidInputError):
        translation_estimate_check(FeFunction(DofMap(mesh4, "P0")), [[0.1, 0.0]])


def test_property_suite_passes():
    results = run_property_suite(nx=2, seed=0, samples=5)
    failed = [r.name for r in results if not r.passed]
    assert not failed
    assert len(results) == 10


@pytest.mark.slow
def test_stationary_study_is_monotone():
    table = stationary_study(load_config("config/stationary.yaml"), levels=(8, 16, 32))
    assert table.attrs["monotone"]
    assert all(rate > 0 for rate in table["u_rate"][1:])


@pytest.mark.slow
def test_cr_and_mixed_agree_under_refinement():
    config = load_config("config/config.yaml").with_overrides(time={"T": 0.25})
    table = cross_scheme_study(config, levels=(8, 16, 32))
    assert list(table["nx"]) == [8, 16, 32]
    assert table.attrs["monotone"]
    assert is_monotone_decreasing(list(table["rho_difference"]))
    assert is_monotone_decreasing(list(table["u_difference"]))
