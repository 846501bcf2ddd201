"""Главный файл приложения."""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .diagnostics.convergence import convergence_table, cross_scheme_study, refinement_ladder, stationary_study
from .diagnostics.verification import run_property_suite
from .mesh.triangulation import build_structured, describe
from .solver.simulation import Simulation, build_mesh
from .storage.results import RunSummary, write_diagnostics, write_fields, write_summary, write_table
from .utils.config import Config, Settings, load_config
from .utils.errors import InvalidInputError, RunAbortedError, StokesSolverError
from .utils.logger import set_level, setup_logger

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class StokesApp:
    """Основной класс приложения: конфигурация, каталог результатов, команды."""

    def __init__(self, config_path: str = "config/config.yaml", out_dir: Optional[str] = None):
        self.config_path = config_path
        self.settings = Settings()
        self._config: Optional[Config] = None
        self._out_dir = out_dir

    @property
    def config(self) -> Config:
        if self._config is None:
            self._config = load_config(self.config_path)
            if self._config.output.log_level:
                set_level(self._config.output.log_level)
        return self._config

    @property
    def out_dir(self) -> Path:
        directory = self._out_dir or (self._config and self._config.output.out_dir) or self.settings.output_dir
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def run(self) -> int:
        """Один расчет: CSV диагностики, VTK полей, JSON сводка."""
        config = self.config
        out_dir = self.out_dir
        simulation = Simulation(config)
        files = {"diagnostics": str(out_dir / "diagnostics.csv"), "fields": []}
        every = config.output.fields_every

        def on_step(state, record):
            if config.output.write_fields and every > 0 and state.step % every == 0:
                with simulation.timer.phase("io"):
                    path = write_fields(state, out_dir / f"fields_{state.step:05d}.vtk", config.physics)
                files["fields"].append(str(path))

        summary = RunSummary(config=config.echo(), files=files)
        try:
            trajectory, records = simulation.run(on_step)
        except RunAbortedError as e:
            write_diagnostics(e.records, files["diagnostics"])
            summary.error = str(e)
            summary.invariants = {name: s.as_dict() for name, s in simulation.invariants.items()}
            summary.timings = simulation.timer.as_dict()
            write_summary(summary, out_dir / "summary.json")
            logger.error(f"Run failed: {e}")
            return EXIT_FAILED

        with simulation.timer.phase("io"):
            write_diagnostics(records, files["diagnostics"])
            if config.output.write_fields:
                final = out_dir / "fields_final.vtk"
                write_fields(trajectory.final, final, config.physics)
                files["final_fields"] = str(final)

        summary.invariants = {name: s.as_dict() for name, s in simulation.invariants.items()}
        summary.timings = simulation.timer.as_dict()
        write_summary(summary, out_dir / "summary.json")

        final_record = records[-1]
        print(
            f"steps={trajectory.n_steps} T={final_record.time:.6g} mass={final_record.mass:.17g} "
            f"rho_min={final_record.rho_min:.6g} invariants={'passed' if summary.passed else 'FAILED'}"
        )
        return EXIT_OK if summary.passed else EXIT_FAILED

    def convergence(self, levels: int, compare: bool = False) -> int:
        """Лестница сеток; без секции reference выполняется тест стационарности."""
        config = self.config
        ladder = refinement_ladder(config.mesh.nx, levels)
        if compare:
            table, name = cross_scheme_study(config, ladder), "cross_scheme.csv"
        elif config.reference is not None:
            table, name = convergence_table(config, ladder), "convergence.csv"
        else:
            table, name = stationary_study(config, ladder), "stationary.csv"
        write_table(table, self.out_dir / name)
        print(table.to_string(index=False))
        return EXIT_OK if table.attrs.get("monotone", True) else EXIT_FAILED

    def verify(self, seed: int, nx: int = 2) -> int:
        """Набор свойств на малой сетке."""
        results = run_property_suite(nx=nx, seed=seed)
        for result in results:
            status = "PASS" if result.passed else "FAIL"
            print(f"{status} {result.name}: {result.value:.3e} {result.detail}")
        passed = sum(result.passed for result in results)
        print(f"passed {passed}/{len(results)} properties")
        return EXIT_OK if passed == len(results) else EXIT_FAILED

    def mesh_info(self, nx: Optional[int] = None) -> int:
        mesh = build_structured(nx, nx) if nx else build_mesh(self.config.mesh)
        print(json.dumps(describe(mesh), indent=2))
        return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default="config/config.yaml", help="Путь к конфигурации")
    common.add_argument("--out-dir", type=str, help="Каталог для результатов")

    parser = argparse.ArgumentParser(description="Решатель полустационарной системы Стокса для сжимаемого газа")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("run", parents=[common], help="Один расчет по конфигурации")

    convergence = commands.add_parser("convergence", parents=[common], help="Исследование сходимости")
    convergence.add_argument("--levels", type=int, default=3, help="Число уровней сгущения")
    convergence.add_argument("--compare", action="store_true", help="Сравнить схемы cr и mixed")

    verify = commands.add_parser("verify", parents=[common], help="Проверка свойств дискретизации")
    verify.add_argument("--seed", type=int, default=0, help="Зерно генератора случайных тестов")
    verify.add_argument("--nx", type=int, default=2, help="Размер сетки nx x nx")

    mesh_info = commands.add_parser("mesh-info", parents=[common], help="Статистика сетки")
    mesh_info.add_argument("--nx", type=int, help="Структурированная сетка nx x nx вместо конфигурации")
    return parser


def cli(argv: Optional[List[str]] = None) -> int:
    """Разбирает аргументы и выполняет команду; возвращает код выхода."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    app = StokesApp(config_path=args.config, out_dir=args.out_dir)
    try:
        if args.command == "run":
            return app.run()
        if args.command == "convergence":
            return app.convergence(args.levels, args.compare)
        if args.command == "verify":
            return app.verify(args.seed, args.nx)
        return app.mesh_info(args.nx)
    except (InvalidInputError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (StokesSolverError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED


def main():
    """Главная функция."""
    sys.exit(cli())


if __name__ == "__main__":
    main()
