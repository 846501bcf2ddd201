"""Маршевая схема по времени: итерации Пикара между переносом и импульсом."""
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .physics import PressureLaw
from .state import PicardReport, State, StepLog, Trajectory
from ..diagnostics.records import DiagnosticsRecord, EnergyLedger, InvariantStatus, make_record
from ..fem.operators import l2_norm
from ..fem.quadrature import evaluate_field
from ..fem.spaces import DofMap, FeFunction, interpolate
from ..mesh.mesh_io import read_mesh
from ..mesh.triangulation import Mesh, build_structured
from ..schemes.base import BaseMomentumScheme, MomentumSolution
from ..schemes.scheme_manager import create_scheme
from ..schemes.transport import renormalization_defect, total_mass, transport_residual, transport_step
from ..utils.config import Config, MeshConfig
from ..utils.errors import (
    InternalBugError,
    InvalidInputError,
    NonConvergenceError,
    RunAbortedError,
    StokesSolverError,
)
from ..utils.expressions import VectorField
from ..utils.logger import setup_logger
from ..utils.retry import retry_with_halving
from ..utils.timing import PhaseTimer

logger = setup_logger(__name__)

StepCallback = Callable[[State, DiagnosticsRecord], None]


def build_mesh(mesh_config: MeshConfig) -> Mesh:
    """Сетка из файла или структурированная nx x ny."""
    if mesh_config.file:
        return read_mesh(mesh_config.file)
    return build_structured(mesh_config.nx, mesh_config.cells_y, mesh_config.domain)


class Simulation:
    """Один расчет по конфигурации: начальные данные, схема, шаги по времени."""

    def __init__(self, config: Config, mesh: Optional[Mesh] = None):
        self.config = config
        self.physics = config.physics
        self.solver = config.solver
        self.timer = PhaseTimer()

        self.mesh = mesh if mesh is not None else build_mesh(config.mesh)
        self.n_steps, self.dt = config.time.steps(self.mesh.h_max)
        self.law = PressureLaw(self.physics.a, self.physics.gamma)
        self.force = self.physics.force_field()
        self.rho0 = self._initial_density()

        if config.scheme.rho_bar == "auto":
            self.rho_bar = total_mass(self.rho0) / self.mesh.total_area
        else:
            self.rho_bar = float(config.scheme.rho_bar)

        self._schemes: Dict[float, BaseMomentumScheme] = {}
        self.scheme = self.scheme_for(self.dt)

        self.invariants: Dict[str, InvariantStatus] = {
            "mass_conservation": InvariantStatus("mass_conservation"),
            "positivity": InvariantStatus("positivity", larger_is_worse=False),
            "energy_inequality": InvariantStatus("energy_inequality"),
            "picard_residual": InvariantStatus("picard_residual", fatal=False),
        }

        if self.solver.dt_halving:
            self._advance = retry_with_halving(self.solver.max_halvings)(self.advance)
        else:
            self._advance = self.advance

        logger.info(
            f"Simulation: scheme={config.scheme.name}, bc={config.scheme.bc}, {self.mesh}, "
            f"M={self.n_steps}, dt={self.dt:.6g}, T={config.time.T}"
        )

    def _initial_density(self) -> FeFunction:
        rho0 = interpolate(DofMap(self.mesh, "P0"), self.physics.density())
        if not np.all(rho0.coefficients > 0):
            raise InvalidInputError(
                f"initial density must be positive on every element, got min {rho0.coefficients.min():.6g}"
            )
        return rho0

    def scheme_for(self, dt: float) -> BaseMomentumScheme:
        """Схема импульса для шага dt; от dt зависит только матрица stokes_approx."""
        key = dt if self.config.scheme.name == "stokes_approx" else math.inf
        if key not in self._schemes:
            with self.timer.phase("assembly"):
                self._schemes[key] = create_scheme(self.config, self.mesh, dt, self.rho_bar)
        return self._schemes[key]

    def force_projection(self, t_mid: float) -> np.ndarray:
        """f_h на шаге: значение в середине интервала по времени в центрах треугольников."""
        return evaluate_field(self.force, self.mesh.centroids, t_mid).reshape(self.mesh.n_triangles, 2)

    def initial_state(self) -> State:
        scheme = self.scheme
        zero = scheme.zero_solution()
        u = zero.u
        if self.config.scheme.u0 is not None:
            u = interpolate(scheme.velocity_space, VectorField(self.config.scheme.u0, "scheme.u0"))
        return State(rho=self.rho0.copy(), u=u, w=zero.w, time=0.0, step=0)

    def picard_step(self, state_prev: State, dt: float) -> Tuple[State, PicardReport]:
        """Один шаг по времени.

        Повторяет: импульс с p(rho^j) -> перенос со скоростью u^{j+1} ->
        rho^{j+1} = theta rho~ + (1 - theta) rho^j, пока
        ||d rho||_inf + ||d u||_L2 не станет <= picard_tol.
        """
        if not np.all(state_prev.rho.coefficients > 0):
            raise InternalBugError("previous density is not positive")
        scheme = self.scheme_for(dt)
        solver = self.solver
        theta = solver.relaxation
        f = self.force_projection(state_prev.time + 0.5 * dt)
        u_prev = state_prev.u

        rho_j = state_prev.rho
        u_j = state_prev.u
        history: List[float] = []
        solution: Optional[MomentumSolution] = None
        fluxes = None
        increment = math.inf

        for iteration in range(1, solver.picard_max_iter + 1):
            with self.timer.phase("momentum"):
                solution = scheme.solve(self.law.pressure(rho_j.coefficients), f, u_prev)
            fluxes = scheme.edge_fluxes(solution.u)
            with self.timer.phase("transport"):
                rho_tilde, _ = transport_step(state_prev.rho, fluxes, dt, tol=solver.linear_tol)
            rho_next = rho_tilde if theta == 1.0 else theta * rho_tilde + (1.0 - theta) * rho_j

            increment = float(np.abs(rho_next.coefficients - rho_j.coefficients).max()) + l2_norm(solution.u - u_j)
            history.append(increment)
            logger.debug(f"Picard iterate {iteration}: increment={increment:.3e}")
            rho_j, u_j = rho_next, solution.u
            if increment <= solver.picard_tol:
                break
        else:
            raise NonConvergenceError(
                f"Picard iteration did not converge within {solver.picard_max_iter} iterations "
                f"at t={state_prev.time + dt:.6g}",
                iterations=solver.picard_max_iter,
                increment=increment,
                last_rho=rho_j,
                last_u=u_j,
            )

        if rho_j.coefficients.min() <= 0:
            raise InternalBugError(f"Picard iterate lost positivity: min density {rho_j.coefficients.min():.3e}")

        p_final = self.law.pressure(rho_j.coefficients)
        report = PicardReport(
            iterations=len(history),
            increment=increment,
            transport_residual=transport_residual(rho_j, state_prev.rho, fluxes, dt),
            momentum_residual=scheme.residual(solution, p_final, f, u_prev),
            history=history,
            checks=dict(solution.checks),
        )
        report.checks["renormalization_defect"] = renormalization_defect(
            state_prev.rho, rho_j, fluxes, dt, self.law.energy, self.law.pressure
        )
        if report.residual > 10 * solver.picard_tol:
            logger.warning(
                f"Residual {report.residual:.3e} above 10*picard_tol at t={state_prev.time + dt:.6g}"
            )
        state = State(rho=rho_j, u=solution.u, w=solution.w, time=state_prev.time + dt, step=state_prev.step + 1)
        return state, report

    def advance(self, state_prev: State, dt: float) -> Tuple[State, StepLog]:
        """Шаг dt с учетом диссипации и работы силы (взвешенных по dt)."""
        state, report = self.picard_step(state_prev, dt)
        scheme = self.scheme_for(dt)
        f = self.force_projection(state_prev.time + 0.5 * dt)
        dissipation = scheme.dissipation(MomentumSolution(state.u, state.w))
        log = StepLog(
            dt=dt,
            curl=dt * dissipation["curl"],
            div=dt * dissipation["div"],
            penalty=dt * dissipation["penalty"],
            work=dt * scheme.forcing_work(state.u, f),
            picard_iterations=report.iterations,
            residual=report.residual,
            checks=report.checks,
        )
        return state, log

    def _energy_slack(self, m: int, ledger: EnergyLedger) -> float:
        scale = max(1.0, abs(ledger.initial), abs(ledger.work), ledger.dissipation)
        return 10 * self.solver.picard_tol * m + 1e-12 * scale

    def check_invariants(self, record: DiagnosticsRecord, ledger: EnergyLedger) -> List[str]:
        """Проверки шага; возвращает имена нарушенных фатальных инвариантов."""
        m = record.step
        inv = self.invariants
        inv["mass_conservation"].observe(
            record.mass_drift, self.solver.mass_tol, record.mass_drift <= self.solver.mass_tol, m
        )
        inv["positivity"].observe(record.rho_min, 0.0, record.rho_min > 0, m)
        slack = self._energy_slack(m, ledger)
        excess = ledger.excess(record.energy)
        inv["energy_inequality"].observe(excess, slack, excess <= slack, m)
        inv["picard_residual"].observe(
            record.residual, 10 * self.solver.picard_tol, record.residual <= 10 * self.solver.picard_tol, m
        )
        failed = [name for name, status in inv.items() if status.fatal and status.step == m and not status.passed]
        for name in failed:
            logger.error(f"Invariant {name} violated at step {m}: {inv[name].as_dict()}")
        return failed

    def run(self, on_step: Optional[StepCallback] = None) -> Tuple[Trajectory, List[DiagnosticsRecord]]:
        """M шагов с проверкой массы, положительности и энергетического неравенства на каждом шаге."""
        initial = self.initial_state()
        trajectory = Trajectory(self.mesh, self.dt, initial)
        mass0 = total_mass(initial.rho)
        ledger = EnergyLedger(initial=self.law.total_energy(initial.rho) + self.scheme.kinetic_energy(initial.u))
        records = [make_record(initial, self.scheme, self.physics, self.law, ledger, mass0)]
        if on_step is not None:
            on_step(initial, records[0])

        for m in range(1, self.n_steps + 1):
            try:
                with self.timer.phase("picard"):
                    state, log = self._advance(trajectory.final, self.dt)
                state.step = m
                state.time = m * self.dt
                ledger.add(log)
                record = make_record(state, self.scheme, self.physics, self.law, ledger, mass0, log)
                trajectory.append(state)
                records.append(record)
                failed = self.check_invariants(record, ledger)
                if failed and self.solver.strict:
                    raise InternalBugError(f"invariant(s) violated: {', '.join(failed)}")
            except StokesSolverError as e:
                logger.error(f"Run aborted at step {m}/{self.n_steps}: {e}")
                raise RunAbortedError(f"run aborted at step {m}", trajectory, records, e) from e

            if on_step is not None:
                on_step(state, record)
            logger.info(
                f"Step {m}/{self.n_steps}: t={state.time:.6g}, mass={record.mass:.17g}, "
                f"rho_min={record.rho_min:.6g}, picard={record.picard_iters}"
            )

        return trajectory, records

    @property
    def invariants_passed(self) -> bool:
        return all(status.passed for status in self.invariants.values())


def picard_step(state_prev: State, config: Config, dt: Optional[float] = None) -> Tuple[State, PicardReport]:
    """Один шаг Пикара на сетке state_prev по конфигурации config."""
    simulation = Simulation(config, mesh=state_prev.rho.mesh)
    return simulation.picard_step(state_prev, simulation.dt if dt is None else dt)


def run(config: Config, mesh: Optional[Mesh] = None) -> Tuple[Trajectory, List[DiagnosticsRecord]]:
    """Полный расчет: (траектория, записи диагностики)."""
    return Simulation(config, mesh).run()
