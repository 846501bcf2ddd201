"""Набор проверок свойств дискретизации на малых сетках (команда verify)."""
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
import sympy as sp

from ..fem.derham import discrete_poincare_constant, hodge_decompose, l2_inner, laplace_identity_defect, space_dimensions
from ..fem.operators import curl_of_p1, elementwise_div
from ..fem.spaces import DofMap, FeFunction
from ..mesh.triangulation import Mesh, build_structured
from ..schemes.momentum_mixed import MixedParams, assemble_mixed_system, mixed_spaces
from ..schemes.transport import (
    EdgeFluxField,
    assemble_transport_system,
    renormalization_defect,
    transport_step,
)
from ..solver.physics import PressureLaw
from ..utils.config import Config
from ..utils.errors import StokesSolverError
from ..utils.expressions import X, Y, VectorField
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass
class PropertyResult:
    name: str
    passed: bool
    value: float
    detail: str = ""


def _random_p1(mesh: Mesh, rng: np.random.Generator, constraint: str = "zero-trace") -> FeFunction:
    space = DofMap(mesh, "P1", constraint)
    w = FeFunction(space)
    w.coefficients[space.free_dofs] = rng.uniform(-1.0, 1.0, space.nfree)
    return w


def _random_rt0(mesh: Mesh, rng: np.random.Generator) -> FeFunction:
    space = DofMap(mesh, "RT0", "navier")
    v = FeFunction(space)
    v.coefficients[space.free_dofs] = rng.uniform(-1.0, 1.0, space.nfree)
    return v


def check_mesh_topology(mesh: Mesh, rng: np.random.Generator, samples: int) -> PropertyResult:
    euler = mesh.n_vertices - mesh.n_edges + mesh.n_triangles
    ok = euler == 1 and mesh.h_max > 0 and mesh.shape_regularity > 0
    return PropertyResult("mesh_topology", ok, float(euler), "V - E + T = 1")


def check_derham_exactness(mesh: Mesh, rng: np.random.Generator, samples: int) -> PropertyResult:
    worst = 0.0
    for _ in range(samples):
        v = curl_of_p1(_random_p1(mesh, rng, "none"))
        net_flux = elementwise_div(v).coefficients * mesh.areas
        worst = max(worst, float(np.abs(net_flux).max()))
    dims = space_dimensions(mesh)
    return PropertyResult(
        "derham_exactness", worst <= 1e-13 and dims.exact, worst, f"max |T| |div curl w|; dims exact={dims.exact}"
    )


def check_hodge_decomposition(mesh: Mesh, rng: np.random.Generator, samples: int) -> PropertyResult:
    pythagoras_worst = div_worst = 0.0
    for _ in range(samples):
        v = _random_rt0(mesh, rng)
        s, v_perp = hodge_decompose(v)
        curl_s = curl_of_p1(s)
        total = l2_inner(v, v)
        pythagoras = abs(total - l2_inner(curl_s, curl_s) - l2_inner(v_perp, v_perp)) / max(total, 1e-300)
        div_v = elementwise_div(v).coefficients
        div_gap = np.abs(elementwise_div(v_perp).coefficients - div_v).max() / max(1.0, np.abs(div_v).max())
        pythagoras_worst = max(pythagoras_worst, pythagoras)
        div_worst = max(div_worst, float(div_gap))
    ok = pythagoras_worst <= 1e-10 and div_worst <= 1e-12
    return PropertyResult(
        "hodge_decomposition", ok, pythagoras_worst, f"Pythagoras; div v_perp = div v up to {div_worst:.1e}"
    )


def check_transport_max_principle(mesh: Mesh, rng: np.random.Generator, samples: int) -> PropertyResult:
    worst = 0.0
    for _ in range(samples):
        fluxes = EdgeFluxField.from_velocity(curl_of_p1(_random_p1(mesh, rng)))
        rho0 = FeFunction(DofMap(mesh, "P0"), rng.uniform(0.5, 2.0, mesh.n_triangles))
        rho, _ = transport_step(rho0, fluxes, dt=rng.uniform(0.01, 1.0))
        lo, hi = rho0.coefficients.min(), rho0.coefficients.max()
        worst = max(worst, lo - rho.coefficients.min(), rho.coefficients.max() - hi)
    return PropertyResult("transport_max_principle", worst <= 1e-12, max(worst, 0.0), "bounds kept by implicit upwind")


def check_transport_m_matrix(mesh: Mesh, rng: np.random.Generator, samples: int) -> PropertyResult:
    worst = 0.0
    for _ in range(samples):
        fluxes = EdgeFluxField.from_velocity(curl_of_p1(_random_p1(mesh, rng)))
        dt = rng.uniform(0.01, 1.0)
        A, scaling = assemble_transport_system(mesh, fluxes, dt)
        dense = A.toarray()
        off = dense - np.diag(np.diag(dense))
        worst = max(worst, float(np.abs(dense.sum(axis=0) - scaling).max() / scaling.max()), float(off.max()))
    return PropertyResult("transport_m_matrix", worst <= 1e-12, worst, "column sums |E|/dt, off-diagonals <= 0")


def check_renormalization(mesh: Mesh, rng: np.random.Generator, samples: int) -> PropertyResult:
    worst = -np.inf
    for gamma in (1.0, 1.4, 2.0):
        law = PressureLaw(1.0, gamma)
        for _ in range(samples):
            fluxes = EdgeFluxField.from_velocity(_random_rt0(mesh, rng))
            rho0 = FeFunction(DofMap(mesh, "P0"), rng.uniform(0.5, 2.0, mesh.n_triangles))
            dt = rng.uniform(0.01, 0.5)
            rho, _ = transport_step(rho0, fluxes, dt)
            defect = renormalization_defect(rho0, rho, fluxes, dt, law.energy, law.pressure)
            worst = max(worst, defect)
    return PropertyResult("renormalization", worst <= 1e-12, float(worst), "E(rho) - E(rho_prev) + dt sum p div <= 0")


def check_laplace_identity(mesh: Mesh, rng: np.random.Generator, samples: int) -> PropertyResult:
    x0, y0 = mesh.vertices.min(axis=0)
    x1, y1 = mesh.vertices.max(axis=0)
    bubble = (X - x0) * (x1 - X) * (Y - y0) * (y1 - Y)

    def random_field() -> VectorField:
        coeffs = rng.uniform(-1.0, 1.0, (2, 3))
        return VectorField([
            bubble * (sp.Float(c[0]) + sp.Float(c[1]) * X + sp.Float(c[2]) * Y) for c in coeffs
        ])

    worst = 0.0
    for _ in range(samples):
        u, v = random_field(), random_field()
        worst = max(worst, laplace_identity_defect(mesh, u.jacobian(), v.jacobian(), order=8))
    return PropertyResult("laplace_identity", worst <= 1e-9, worst, "Du:Dv = curl curl + div div on H1_0")


def check_stokes_limit(mesh: Mesh, rng: np.random.Generator, samples: int) -> PropertyResult:
    spaces = mixed_spaces(mesh)
    stationary = assemble_mixed_system(mesh, spaces, MixedParams(mu=1.0, lam=0.5))
    limit = assemble_mixed_system(
        mesh, spaces, MixedParams(mu=1.0, lam=0.5, variant="stokes_approximation", rho_bar=2.0, dt=np.inf)
    )
    gap = float(np.abs((stationary - limit).toarray()).max(initial=0.0))
    return PropertyResult("stokes_limit", gap <= 1e-14, gap, "dt -> inf matrix equals the stationary one")


def check_poincare(mesh: Mesh, rng: np.random.Generator, samples: int) -> PropertyResult:
    value = discrete_poincare_constant(mesh)
    return PropertyResult("discrete_poincare", value > 0, value, "smallest div eigenvalue on V^{0,perp}")


def check_equilibrium_runs(mesh: Mesh, rng: np.random.Generator, samples: int) -> PropertyResult:
    from ..solver.simulation import Simulation

    drift = spread = 0.0
    passed = True
    rho_value = float(rng.uniform(0.5, 2.0))
    for name in ("cr", "mixed", "stokes_approx"):
        config = Config.model_validate({
            "physics": {"a": 1.0, "gamma": 1.4, "rho0": rho_value, "force": [0, 0]},
            "time": {"T": 0.1, "dt": 0.05},
            "scheme": {"name": name, "bc": "navier"},
        })
        simulation = Simulation(config, mesh=mesh)
        trajectory, records = simulation.run()
        drift = max(drift, max(r.mass_drift for r in records))
        spread = max(spread, max(float(np.abs(s.rho.coefficients - rho_value).max()) for s in trajectory.states))
        passed = passed and simulation.invariants_passed
    ok = passed and drift <= 1e-12 and spread <= 1e-10
    return PropertyResult("equilibrium_runs", ok, drift, f"constant density kept in every scheme, spread {spread:.1e}")


PROPERTIES: List[Callable[[Mesh, np.random.Generator, int], PropertyResult]] = [
    check_mesh_topology,
    check_derham_exactness,
    check_hodge_decomposition,
    check_transport_max_principle,
    check_transport_m_matrix,
    check_renormalization,
    check_laplace_identity,
    check_stokes_limit,
    check_poincare,
    check_equilibrium_runs,
]


def run_property_suite(nx: int = 2, seed: int = 0, samples: int = 20) -> List[PropertyResult]:
    """Выполняет все проверки на сетке nx x nx; исключение засчитывается как провал."""
    mesh = build_structured(nx, nx)
    rng = np.random.default_rng(seed)
    results = []
    for check in PROPERTIES:
        try:
            result = check(mesh, rng, samples)
        except StokesSolverError as e:
            result = PropertyResult(check.__name__.removeprefix("check_"), False, float("nan"), str(e))
        level = "info" if result.passed else "error"
        getattr(logger, level)(f"{result.name}: {'passed' if result.passed else 'FAILED'} ({result.value:.3e})")
        results.append(result)
    return results
