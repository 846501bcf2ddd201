#!/usr/bin/env python3
"""Проверка структуры проекта и зависимостей решателя."""
import importlib
import sys
from pathlib import Path

print("Проверка структуры проекта...")
print(f"Python версия: {sys.version}\n")

required_dirs = [
    "src",
    "src/mesh",
    "src/fem",
    "src/linalg",
    "src/schemes",
    "src/solver",
    "src/diagnostics",
    "src/storage",
    "src/utils",
    "config",
]

print("Директории:")
for dir_path in required_dirs:
    path = Path(dir_path)
    status = "✓" if path.is_dir() else "✗"
    print(f"  {status} {dir_path}")

required_files = [
    "src/main.py",
    "src/mesh/triangulation.py",
    "src/fem/derham.py",
    "src/schemes/transport.py",
    "src/schemes/momentum_cr.py",
    "src/schemes/momentum_mixed.py",
    "src/solver/simulation.py",
    "src/storage/results.py",
    "config/config.yaml",
    "requirements.txt",
]

print("\nФайлы:")
for file_path in required_files:
    path = Path(file_path)
    status = "✓" if path.is_file() else "✗"
    print(f"  {status} {file_path}")

print("\nПроверка зависимостей:")
dependencies = [
    "yaml",
    "numpy",
    "scipy",
    "sympy",
    "pandas",
    "meshio",
    "dotenv",
    "pydantic",
    "pydantic_settings",
]

missing = []
for dep in dependencies:
    try:
        importlib.import_module(dep)
        print(f"  ✓ {dep}")
    except ImportError:
        print(f"  ✗ {dep} - не установлен")
        missing.append(dep)

if missing:
    print(f"\n⚠ Необходимо установить: {', '.join(missing)}")
    print("Выполните: pip install -r requirements.txt")
    sys.exit(1)

print("\n✓ Все зависимости установлены!")

print("\nИмпорт пакетов:")
sys.path.insert(0, str(Path(__file__).parent))
failed = False
for module in ("src.mesh", "src.fem", "src.schemes", "src.solver", "src.diagnostics", "src.storage", "src.main"):
    try:
        importlib.import_module(module)
        print(f"  ✓ {module}")
    except Exception as e:
        print(f"  ✗ {module} - {e}")
        failed = True

print("\nПроверка завершена!")
sys.exit(1 if failed else 0)
