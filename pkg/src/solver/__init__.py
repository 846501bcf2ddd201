"""Маршевая схема по времени и физические законы."""
from .physics import PressureLaw, pressure, elastic_energy
from .state import State, PicardReport, StepLog, Trajectory
from .simulation import Simulation, build_mesh, picard_step, run

__all__ = [
    "PressureLaw",
    "pressure",
    "elastic_energy",
    "State",
    "PicardReport",
    "StepLog",
    "Trajectory",
    "Simulation",
    "build_mesh",
    "picard_step",
    "run",
]
