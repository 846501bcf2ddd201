"""Тесты неявной противопотоковой схемы переноса плотности."""
import numpy as np
import pytest

from src.fem import DofMap, FeFunction, curl_of_p1
from src.schemes import (
    EdgeFluxField,
    assemble_transport_system,
    renormalization_defect,
    total_mass,
    transport_residual,
    transport_step,
    upwind_flux,
)
from src.solver import PressureLaw
from src.utils.errors import InvalidInputError


def _random_fluxes(mesh, rng, divergence_free=False):
    if divergence_free:
        space = DofMap(mesh, "P1", "zero-trace")
        w = FeFunction(space)
        w.coefficients[space.free_dofs] = rng.uniform(-1.0, 1.0, space.nfree)
        return EdgeFluxField.from_velocity(curl_of_p1(w))
    space = DofMap(mesh, "RT0", "navier")
    v = FeFunction(space)
    v.coefficients[space.free_dofs] = rng.uniform(-1.0, 1.0, space.nfree)
    return EdgeFluxField.from_velocity(v)


def _density(mesh, rng):
    return FeFunction(DofMap(mesh, "P0"), rng.uniform(0.5, 2.0, mesh.n_triangles))


def test_upwind_flux_values():
    assert upwind_flux(2.0, 1.0, 3.0) == pytest.approx(6.0)
    assert upwind_flux(2.0, 1.0, -3.0) == pytest.approx(-3.0)
    U = np.array([-1.5, 0.0, 2.5])
    assert np.allclose(upwind_flux(5.0, 5.0, U), 5.0 * U)


def test_zero_velocity_gives_diagonal_system(mesh2):
    A, scaling = assemble_transport_system(mesh2, EdgeFluxField.zero(mesh2), dt=0.1)
    assert np.allclose(A.toarray(), np.diag(mesh2.areas / 0.1))
    assert np.allclose(scaling, mesh2.areas / 0.1)



def test_two_triangle_system_by_hand(unit_square):
    mesh = unit_square
    diagonal = int(np.flatnonzero((mesh.edges[:, 0] == 0) & (mesh.edges[:, 1] == 3))[0])
    minus, plus = mesh.edge_elements[diagonal]
    assert {int(minus), int(plus)} == {0, 1}
    U = np.zeros(mesh.n_edges)
    # единичный поток из E0 в E1
    U[diagonal] = 1.0 if minus == 0 else -1.0
    fluxes = EdgeFluxField(mesh, U)

    A, scaling = assemble_transport_system(mesh, fluxes, dt=0.1)
    r2 = np.sqrt(2.0)
    assert np.allclose(A.toarray(), [[5.0 + r2, 0.0], [-r2, 5.0]], atol=1e-14)
    assert np.allclose(scaling, [5.0, 5.0], atol=1e-14)

    rho0 = FeFunction(DofMap(mesh, "P0"), np.array([2.0, 1.0]))
    rho, _ = transport_step(rho0, fluxes, dt=0.1)
    expected = [10.0 / (5.0 + r2), 1.0 + 2.0 * r2 / (5.0 + r2)]
    assert np.allclose(rho.coefficients, expected, atol=1e-14)
    assert abs(total_mass(rho) - total_mass(rho0)) <= 1e-14


def test_system_is_m_matrix(mesh4, rng):
    fluxes = _random_fluxes(mesh4, rng)
    A, scaling = assemble_transport_system(mesh4, fluxes, dt=0.3)
    dense = A.toarray()
    off = dense - np.diag(np.diag(dense))
    assert off.max() <= 0.0
    assert np.allclose(dense.sum(axis=0), scaling, rtol=1e-12)


def test_constant_density_kept_by_divergence_free_flow(mesh4, rng):
    fluxes = _random_fluxes(mesh4, rng, divergence_free=True)
    rho0 = FeFunction(DofMap(mesh4, "P0"), np.full(mesh4.n_triangles, 1.7))
    rho, _ = transport_step(rho0, fluxes, dt=0.5)
    assert np.allclose(rho.coefficients, 1.7, atol=1e-12)


def test_mass_and_positivity(mesh4, rng):
    rho0 = _density(mesh4, rng)
    for _ in range(5):
        fluxes = _random_fluxes(mesh4, rng)
        rho, report = transport_step(rho0, fluxes, dt=rng.uniform(0.01, 1.0))
        assert rho.coefficients.min() > 0
        assert total_mass(rho) == pytest.approx(total_mass(rho0), rel=1e-12)
        assert report.success


def test_discrete_maximum_principle(mesh4, rng):
    rho0 = _density(mesh4, rng)
    fluxes = _random_fluxes(mesh4, rng, divergence_free=True)
    rho, _ = transport_step(rho0, fluxes, dt=0.2)
    assert rho.coefficients.min() >= rho0.coefficients.min() - 1e-12
    assert rho.coefficients.max() <= rho0.coefficients.max() + 1e-12


def test_step_residual_is_small(mesh4, rng):
    rho0 = _density(mesh4, rng)
    fluxes = _random_fluxes(mesh4, rng)
    rho, _ = transport_step(rho0, fluxes, dt=0.25)
    assert transport_residual(rho, rho0, fluxes, 0.25) <= 1e-12


@pytest.mark.parametrize("gamma", [1.0, 1.4, 2.0])
def test_renormalization_defect_nonpositive(mesh4, rng, gamma):
    law = PressureLaw(1.0, gamma)
    rho0 = _density(mesh4, rng)
    fluxes = _random_fluxes(mesh4, rng)
    rho, _ = transport_step(rho0, fluxes, dt=0.2)
    assert renormalization_defect(rho0, rho, fluxes, 0.2, law.energy, law.pressure) <= 1e-12


def test_boundary_flux_rejected(mesh2):
    fluxes = EdgeFluxField(mesh2, np.ones(mesh2.n_edges))
    with pytest.raises(InvalidInputError):
        assemble_transport_system(mesh2, fluxes, dt=0.1)


def test_invalid_inputs(mesh2):
    fluxes = EdgeFluxField.zero(mesh2)
    rho = FeFunction(DofMap(mesh2, "P0"), np.ones(mesh2.n_triangles))
    with pytest.raises(InvalidInputError):
        transport_step(rho, fluxes, dt=0.0)
    with pytest.raises(InvalidInputError):
        transport_step(FeFunction(DofMap(mesh2, "P1")), fluxes, dt=0.1)
    with pytest.raises(InvalidInputError):
        EdgeFluxField(mesh2, np.zeros(3))
