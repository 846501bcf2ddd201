"""Тесты схем импульса: Крузе-Равьяр, вихрь-скорость и вариант со стоксовым приближением."""
import logging
import math

import numpy as np
import pytest

from src.fem import DofMap, FeFunction, elementwise_div
from src.schemes import (
    CrMomentumScheme,
    CrParams,
    MixedMomentumScheme,
    MixedParams,
    assemble_cr_operator,
    assemble_mixed_system,
    assemble_pressure_load,
    check_stokes_exponent,
    create_scheme,
    mixed_spaces,
    solve_cr_momentum,
    solve_mixed_momentum,
)
from src.utils.errors import InvalidInputError


def _random_force(mesh, rng):
    return rng.uniform(-1.0, 1.0, (mesh.n_triangles, 2))


def test_constant_pressure_has_no_load(mesh4):
    space = DofMap(mesh4, "CR", "navier")
    load = assemble_pressure_load(mesh4, space, np.full(mesh4.n_triangles, 2.5))
    assert np.abs(load[space.free_dofs]).max() <= 1e-13
    assert np.all(assemble_pressure_load(mesh4, space, np.zeros(mesh4.n_triangles)) == 0.0)


def test_cr_operator_is_symmetric_positive(mesh4):
    space = DofMap(mesh4, "CR", "navier")
    params = CrParams(mu=2.0, lam=-1.0, eps=0.1)
    A = assemble_cr_operator(mesh4, space, params)
    assert abs(A - A.T).max() <= 1e-13
    free = A[space.free_dofs][:, space.free_dofs].toarray()
    assert np.linalg.eigvalsh(free).min() > 0
    assert abs(A - CrMomentumScheme(mesh4, params).operator).max() <= 1e-14
    with pytest.raises(InvalidInputError):
        assemble_cr_operator(mesh4, DofMap(mesh4, "RT0"), params)


@pytest.mark.parametrize("bc", ["navier", "dirichlet"])
def test_cr_equilibrium_is_at_rest(mesh2, bc):
    u = solve_cr_momentum(mesh2, CrParams(bc=bc), np.full(mesh2.n_triangles, 3.0), np.zeros((mesh2.n_triangles, 2)))
    assert np.abs(u.coefficients).max() <= 1e-12


@pytest.mark.parametrize(
    "kwargs",
    [{"mu": 0.0}, {"mu": 1.0, "lam": -2.0}, {"eps": 0.0}, {"bc": "periodic"}],
)
def test_cr_params_validated(kwargs):
    with pytest.raises(InvalidInputError):
        CrParams(**kwargs)


def test_cr_energy_identity(mesh4, rng):
    scheme = CrMomentumScheme(mesh4, CrParams(mu=1.0, lam=0.5, eps=0.05))
    f = _random_force(mesh4, rng)
    solution = scheme.solve(np.zeros(mesh4.n_triangles), f)
    dissipation = sum(scheme.dissipation(solution).values())
    assert dissipation > 0
    assert dissipation == pytest.approx(scheme.forcing_work(solution.u, f), rel=1e-9)
    assert scheme.residual(solution, np.zeros(mesh4.n_triangles), f) <= 1e-10


def test_cr_dirichlet_constrains_tangential_dofs(mesh4, rng):
    scheme = CrMomentumScheme(mesh4, CrParams(bc="dirichlet"))
    solution = scheme.solve(np.zeros(mesh4.n_triangles), _random_force(mesh4, rng))
    boundary = mesh4.boundary_edges
    assert np.all(solution.u.coefficients[0::2][boundary] == 0.0)
    assert np.all(solution.u.coefficients[1::2][boundary] == 0.0)
    assert scheme.seminorm(solution.u) > 0



def test_mixed_system_on_two_triangles(unit_square):
    vorticity, velocity = mixed_spaces(unit_square)
    assert vorticity.nfree == 0
    assert velocity.nfree == 1
    A = assemble_mixed_system(unit_square, (vorticity, velocity), MixedParams(mu=1.0, lam=0.5))
    assert A.shape == (1, 1)

    phi = FeFunction(velocity)
    phi.coefficients[velocity.free_dofs] = 1.0
    div = elementwise_div(phi).coefficients
    assert np.allclose(np.abs(div), 2.0)
    assert A.toarray()[0, 0] == pytest.approx(1.5 * unit_square.areas @ div ** 2, rel=1e-14)
    assert A.toarray()[0, 0] == pytest.approx(6.0, rel=1e-14)


def test_mixed_zero_data_gives_zero_solution(mesh4):
    w, u = solve_mixed_momentum(
        mesh4, MixedParams(), np.full(mesh4.n_triangles, 1.3), np.zeros((mesh4.n_triangles, 2))
    )
    assert np.abs(u.coefficients).max() <= 1e-12
    assert np.abs(w.coefficients).max() <= 1e-12


def test_mixed_energy_identity_and_curl_consistency(mesh4, rng):
    scheme = MixedMomentumScheme(mesh4, MixedParams(mu=1.0, lam=0.25))
    f = _random_force(mesh4, rng)
    solution = scheme.solve(np.zeros(mesh4.n_triangles), f)
    assert solution.checks["curl_consistency"] <= 1e-10
    dissipation = scheme.dissipation(solution)
    assert dissipation["penalty"] == 0.0
    assert sum(dissipation.values()) == pytest.approx(scheme.forcing_work(solution.u, f), rel=1e-9)
    assert np.all(solution.u.coefficients[mesh4.boundary_edges] == 0.0)


def test_mixed_velocity_has_mean_free_divergence(mesh4, rng):
    scheme = MixedMomentumScheme(mesh4, MixedParams())
    p = rng.uniform(0.5, 2.0, mesh4.n_triangles)
    solution = scheme.solve(p, _random_force(mesh4, rng))
    div = elementwise_div(solution.u).coefficients
    assert abs(mesh4.areas @ div) <= 1e-12


def test_stokes_limit_matches_stationary_matrix(mesh2):
    spaces = mixed_spaces(mesh2)
    stationary = assemble_mixed_system(mesh2, spaces, MixedParams(mu=1.0, lam=0.5))
    limit = assemble_mixed_system(
        mesh2, spaces, MixedParams(mu=1.0, lam=0.5, variant="stokes_approximation", rho_bar=2.0, dt=math.inf)
    )
    assert np.abs((stationary - limit).toarray()).max(initial=0.0) <= 1e-14


def test_stokes_approximation_at_rest(mesh4):
    params = MixedParams(variant="stokes_approximation", rho_bar=1.0, dt=0.1)
    u_prev = FeFunction(DofMap(mesh4, "RT0", "navier"))
    w, u = solve_mixed_momentum(
        mesh4, params, np.full(mesh4.n_triangles, 2.0), np.zeros((mesh4.n_triangles, 2)), u_prev
    )
    assert np.abs(u.coefficients).max() <= 1e-12
    with pytest.raises(InvalidInputError):
        solve_mixed_momentum(mesh4, params, np.ones(mesh4.n_triangles), np.zeros((mesh4.n_triangles, 2)))


def test_stokes_approximation_kinetic_energy(mesh4, rng):
    scheme = MixedMomentumScheme(mesh4, MixedParams(variant="stokes_approximation", rho_bar=2.0, dt=0.1))
    solution = scheme.solve(np.zeros(mesh4.n_triangles), _random_force(mesh4, rng), scheme.zero_velocity())
    assert scheme.kinetic_energy(solution.u) > 0
    assert MixedMomentumScheme(mesh4, MixedParams()).kinetic_energy(solution.u) == 0.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"variant": "transient"},
        {"variant": "stokes_approximation", "rho_bar": 0.0},
        {"variant": "stokes_approximation", "dt": -1.0},
    ],
)
def test_mixed_params_validated(kwargs):
    with pytest.raises(InvalidInputError):
        MixedParams(**kwargs)


def test_create_scheme_picks_class(make_config, mesh2):
    cr = create_scheme(make_config(scheme={"name": "cr"}), mesh2)
    mixed = create_scheme(make_config(scheme={"name": "mixed"}), mesh2)
    stokes = create_scheme(make_config(scheme={"name": "stokes_approx"}), mesh2, dt=0.1, rho_bar=1.5)
    assert isinstance(cr, CrMomentumScheme)
    assert isinstance(mixed, MixedMomentumScheme) and mixed.params.variant == "stationary"
    assert stokes.params.variant == "stokes_approximation"
    assert stokes.params.inertia == pytest.approx(15.0)


def test_low_exponent_warns(make_config, mesh2, caplog):
    assert check_stokes_exponent(1.4)
    with caplog.at_level(logging.WARNING):
        create_scheme(
            make_config(physics={"gamma": 1.0}, scheme={"name": "stokes_approx"}), mesh2, dt=0.1
        )
    assert "gamma" in caplog.text
