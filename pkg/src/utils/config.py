"""Утилиты для работы с конфигурацией."""
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError
from .expressions import ScalarField, VectorField, parse_expression


class Settings(BaseSettings):
    """Настройки процесса."""
    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", env_prefix="STOKES_")

    log_level: str = "INFO"
    log_file: str = "logs/stokes.log"
    output_dir: str = "results"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)


class PhysicsConfig(_Section):
    """Параметры модели: закон давления, вязкости, начальные данные, сила."""
    a: float = 1.0
    gamma: float = 1.4
    mu: float = 1.0
    lam: float = 0.0
    eps: float = 0.05
    rho0: Union[str, float] = 1.0
    force: Union[Literal["balance"], List[Union[str, float]]] = Field(default_factory=lambda: [0.0, 0.0])

    @field_validator("a")
    @classmethod
    def _positive_a(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("pressure constant a must be positive")
        return v

    @field_validator("gamma")
    @classmethod
    def _gamma_at_least_one(cls, v: float) -> float:
        if not v >= 1:
            raise ValueError("adiabatic exponent gamma must satisfy gamma >= 1")
        return v

    @field_validator("mu")
    @classmethod
    def _positive_mu(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("shear viscosity mu must be positive")
        return v

    @field_validator("eps")
    @classmethod
    def _positive_eps(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("penalty exponent eps must be positive")
        return v

    @field_validator("rho0")
    @classmethod
    def _parse_rho0(cls, v: Union[str, float]) -> Union[str, float]:
        parse_expression(v, "physics.rho0")
        return v

    @field_validator("force")
    @classmethod
    def _parse_force(cls, v: Any) -> Any:
        if v == "balance":
            return v
        if len(v) != 2:
            raise ValueError("force needs two components or the keyword 'balance'")
        for i, comp in enumerate(v):
            parse_expression(comp, f"physics.force[{i}]")
        return v

    @model_validator(mode="after")
    def _viscosity_constraint(self) -> "PhysicsConfig":
        if 2 * self.lam + 2 * self.mu < 0:
            raise ValueError("viscosities must satisfy N*lam + 2*mu >= 0 with N = 2")
        return self

    def density(self) -> ScalarField:
        return ScalarField(self.rho0, "physics.rho0")

    def force_field(self) -> VectorField:
        if self.force == "balance":
            from .expressions import pressure_gradient

            return pressure_gradient(self.density(), self.a, self.gamma)
        return VectorField(self.force, "physics.force")


class MeshConfig(_Section):
    """Сетка: прямоугольник nx x ny или файл."""
    nx: int = 8
    ny: Optional[int] = None
    domain: Tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)
    file: Optional[str] = None

    @field_validator("nx", "ny")
    @classmethod
    def _positive_cells(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("cell counts must be >= 1")
        return v

    @field_validator("domain")
    @classmethod
    def _non_degenerate(cls, v: Tuple[float, float, float, float]) -> Tuple[float, float, float, float]:
        x0, x1, y0, y1 = v
        if not (x1 > x0 and y1 > y0):
            raise ValueError("domain must be (x0, x1, y0, y1) with x1 > x0 and y1 > y0")
        return v

    @property
    def cells_y(self) -> int:
        return self.ny if self.ny is not None else self.nx


class TimeConfig(_Section):
    """Временная сетка: dt = c*h, если dt не задан."""
    T: float = 1.0
    c: float = 0.5
    dt: Optional[float] = None

    @field_validator("T", "c")
    @classmethod
    def _positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("must be positive")
        return v

    @field_validator("dt")
    @classmethod
    def _positive_dt(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not v > 0:
            raise ValueError("dt must be positive")
        return v

    def steps(self, h: float) -> Tuple[int, float]:
        """Число шагов M и dt = T/M."""
        dt = self.dt if self.dt is not None else self.c * h
        M = max(1, math.ceil(self.T / dt - 1e-12))
        return M, self.T / M


class SchemeConfig(_Section):
    """Выбор схемы и граничного условия."""
    name: Literal["cr", "mixed", "stokes_approx"] = "cr"
    bc: Literal["dirichlet", "navier"] = "navier"
    rho_bar: Union[Literal["auto"], float] = "auto"
    u0: Optional[List[Union[str, float]]] = None

    @model_validator(mode="after")
    def _mixed_needs_navier(self) -> "SchemeConfig":
        if self.name in ("mixed", "stokes_approx") and self.bc != "navier":
            raise ValueError(
                "the mixed vorticity-velocity method is restricted to the case of "
                "the Navier-slip boundary condition (bc = navier)"
            )
        if self.u0 is not None and self.name != "stokes_approx":
            raise ValueError("u0 is only used by the stokes_approx scheme")
        return self

    @field_validator("rho_bar")
    @classmethod
    def _positive_rho_bar(cls, v: Union[str, float]) -> Union[str, float]:
        if v != "auto" and not v > 0:
            raise ValueError("rho_bar must be positive or 'auto'")
        return v


class SolverConfig(_Section):
    """Итерации Пикара и линейные решатели."""
    picard_tol: float = 1e-10
    picard_max_iter: int = 50
    relaxation: float = 1.0
    linear_tol: float = 1e-10
    linear_method: Literal["direct", "cg"] = "direct"
    dt_halving: bool = False
    max_halvings: int = 3
    mass_tol: float = 1e-12
    strict: bool = True

    @field_validator("relaxation")
    @classmethod
    def _relaxation_range(cls, v: float) -> float:
        if not 0 < v <= 1:
            raise ValueError("relaxation theta must lie in (0, 1]")
        return v

    @field_validator("picard_tol", "linear_tol", "mass_tol")
    @classmethod
    def _positive_tol(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("tolerances must be positive")
        return v

    @field_validator("picard_max_iter")
    @classmethod
    def _positive_iter(cls, v: int) -> int:
        if not v >= 1:
            raise ValueError("picard_max_iter must be >= 1")
        return v


class OutputConfig(_Section):
    """Что и куда писать."""
    out_dir: Optional[str] = None
    write_fields: bool = True
    fields_every: int = 0
    log_level: Optional[str] = None


class ReferenceConfig(_Section):
    """Точное решение для исследований сходимости."""
    rho: Union[str, float]
    u: List[Union[str, float]] = Field(default_factory=lambda: [0.0, 0.0])

    def density(self) -> ScalarField:
        return ScalarField(self.rho, "reference.rho")

    def velocity(self) -> VectorField:
        return VectorField(self.u, "reference.u")


class Config(_Section):
    """Полная конфигурация расчета."""
    physics: PhysicsConfig = Field(default_factory=PhysicsConfig)
    mesh: MeshConfig = Field(default_factory=MeshConfig)
    time: TimeConfig = Field(default_factory=TimeConfig)
    scheme: SchemeConfig = Field(default_factory=SchemeConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    reference: Optional[ReferenceConfig] = None

    def with_overrides(self, **sections: Dict[str, Any]) -> "Config":
        """Копия с обновленными полями секций, например mesh={"nx": 16}."""
        data = self.model_dump()
        for name, values in sections.items():
            data[name].update(values)
        return Config.model_validate(data)

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _key_lines(text: str) -> Dict[str, int]:
    """Номера строк (с 1) для ключей вида section.key."""
    lines: Dict[str, int] = {}
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return lines
    if not isinstance(root, yaml.MappingNode):
        return lines
    for key_node, value_node in root.value:
        lines[key_node.value] = key_node.start_mark.line + 1
        if isinstance(value_node, yaml.MappingNode):
            for sub_key, _ in value_node.value:
                lines[f"{key_node.value}.{sub_key.value}"] = sub_key.start_mark.line + 1
    return lines


def parse_config(text: str) -> Config:
    """Разбирает и валидирует YAML-конфигурацию."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"invalid YAML: {e}", line=mark.line + 1 if mark else None) from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping of sections")

    try:
        return Config.model_validate(data)
    except ConfigError:
        raise
    except ValidationError as e:
        error = e.errors()[0]
        loc = [str(part) for part in error["loc"]]
        key = ".".join(loc)
        lines = _key_lines(text)
        line = lines.get(".".join(loc[:2])) or (lines.get(loc[0]) if loc else None)
        message = error["msg"]
        if error["type"] == "extra_forbidden":
            message = "unknown key"
        raise ConfigError(message, key=key, line=line) from e


def load_config(config_path: str = "config/config.yaml") -> Config:
    """Загружает конфигурацию из YAML файла."""
    config_file = Path(config_path)
    if not config_file.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_file, "r", encoding="utf-8") as f:
        return parse_config(f.read())
