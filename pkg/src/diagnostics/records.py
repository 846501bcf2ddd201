"""Записи диагностики по шагам и статусы проверяемых инвариантов."""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

from .flux import effective_viscous_flux, flux_density_pairing, flux_norms
from ..schemes.transport import total_mass

CSV_COLUMNS = (
    "step",
    "time",
    "mass",
    "rho_min",
    "rho_max",
    "energy",
    "dissipation",
    "work",
    "flux_l2",
    "picard_iters",
    "residual",
)


@dataclass
class DiagnosticsRecord:
    """Измерения на слое t_m.

    dissipation и work - накопленные суммы по шагам k <= m, остальные
    величины относятся к самому слою m.
    """
    step: int
    time: float
    mass: float
    rho_min: float
    rho_max: float
    energy: float
    dissipation: float
    work: float
    flux_l2: float
    picard_iters: int
    residual: float
    flux_l1: float = 0.0
    flux_pairing: float = 0.0
    curl: float = 0.0
    div: float = 0.0
    penalty: float = 0.0
    kinetic: float = 0.0
    mass_drift: float = 0.0

    def as_row(self) -> Dict[str, Any]:
        """Строка CSV в фиксированном порядке колонок."""
        data = asdict(self)
        return {name: data[name] for name in CSV_COLUMNS}


@dataclass
class InvariantStatus:
    """Итог одной проверки: худшее измеренное значение и граница."""
    name: str
    passed: bool = True
    value: Optional[float] = None
    bound: Optional[float] = None
    step: Optional[int] = None
    fatal: bool = True
    larger_is_worse: bool = True

    def observe(self, value: float, bound: float, ok: bool, step: int) -> bool:
        if self.value is None:
            worse = True
        elif self.larger_is_worse:
            worse = value > self.value
        else:
            worse = value < self.value
        if (not ok and self.passed) or (ok == self.passed and worse):
            self.value = value
            self.bound = bound
            self.step = step
        self.passed = self.passed and ok
        return ok

    def as_dict(self) -> Dict[str, Any]:
        return {"passed": self.passed, "value": self.value, "bound": self.bound, "step": self.step}


@dataclass
class EnergyLedger:
    """Накопленные вязкая диссипация и работа силы."""
    initial: float
    dissipation: float = 0.0
    work: float = 0.0
    components: Dict[str, float] = field(default_factory=lambda: {"curl": 0.0, "div": 0.0, "penalty": 0.0})

    def add(self, log) -> None:
        self.dissipation += log.dissipation
        self.work += log.work
        self.components["curl"] += log.curl
        self.components["div"] += log.div
        self.components["penalty"] += log.penalty

    def excess(self, energy: float) -> float:
        """E^m + D_m - E^0 - W_m; неположительно при выполнении энергетического неравенства."""
        return energy + self.dissipation - self.initial - self.work


def make_record(state, scheme, physics, law, ledger: EnergyLedger, mass0: float, log=None) -> DiagnosticsRecord:
    """Собирает запись для слоя state."""
    rho = state.rho
    mass = total_mass(rho)
    kinetic = scheme.kinetic_energy(state.u)
    energy = law.total_energy(rho) + kinetic
    flux = effective_viscous_flux(state, physics)
    flux_l1, flux_l2 = flux_norms(flux)
    return DiagnosticsRecord(
        step=state.step,
        time=state.time,
        mass=mass,
        rho_min=float(rho.coefficients.min()),
        rho_max=float(rho.coefficients.max()),
        energy=energy,
        dissipation=ledger.dissipation,
        work=ledger.work,
        flux_l2=flux_l2,
        picard_iters=log.picard_iterations if log is not None else 0,
        residual=log.residual if log is not None else 0.0,
        flux_l1=flux_l1,
        flux_pairing=flux_density_pairing(flux, rho),
        curl=log.curl if log is not None else 0.0,
        div=log.div if log is not None else 0.0,
        penalty=log.penalty if log is not None else 0.0,
        kinetic=kinetic,
        mass_drift=abs(mass - mass0) / mass0,
    )
