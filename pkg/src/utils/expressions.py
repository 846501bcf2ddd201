"""Аналитические поля, заданные строками в переменных x, y, t."""
from typing import Callable, Sequence, Union

import numpy as np
import sympy as sp

from .errors import ConfigError

X, Y, T = sp.symbols("x y t", real=True)
_LOCALS = {"x": X, "y": Y, "t": T, "pi": sp.pi, "e": sp.E}


def parse_expression(text: Union[str, float, int], key: str = "expression") -> sp.Expr:
    """Разбирает строку в выражение sympy; допускаются только x, y, t."""
    try:
        expr = sp.sympify(text, locals=_LOCALS)
    except (sp.SympifyError, SyntaxError, TypeError) as e:
        raise ConfigError(f"cannot parse expression {text!r}: {e}", key=key) from e
    extra = expr.free_symbols - {X, Y, T}
    if extra:
        names = ", ".join(sorted(str(s) for s in extra))
        raise ConfigError(f"unknown symbols in {text!r}: {names}", key=key)
    if expr.has(sp.nan, sp.zoo, sp.oo, -sp.oo):
        raise ConfigError(f"expression {text!r} is not finite", key=key)
    if expr.has(sp.I) or expr.is_real is False:
        raise ConfigError(f"expression {text!r} is not real-valued", key=key)
    return expr


def _vectorize(expr: sp.Expr, key: str = "expression") -> Callable[..., np.ndarray]:
    func = sp.lambdify((X, Y, T), expr, modules="numpy")

    def evaluate(x, y, t=0.0):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        value = np.asarray(func(x, y, t))
        if np.iscomplexobj(value):
            if np.any(value.imag != 0):
                raise ConfigError(f"expression {expr} takes complex values", key=key)
            value = value.real
        return np.broadcast_to(np.asarray(value, dtype=float), np.broadcast(x, y).shape).copy()

    return evaluate


class ScalarField:
    """Скалярное поле f(x, y, t) с символьными производными."""

    def __init__(self, expr: Union[str, float, sp.Expr], key: str = "expression"):
        self.expr = expr if isinstance(expr, sp.Expr) else parse_expression(expr, key)
        self._f = _vectorize(self.expr, key)

    def __call__(self, x, y, t=0.0) -> np.ndarray:
        return self._f(x, y, t)

    def __repr__(self) -> str:
        return f"ScalarField({self.expr})"

    def diff(self, symbol: str) -> "ScalarField":
        return ScalarField(sp.diff(self.expr, _LOCALS[symbol]))

    def gradient(self) -> "VectorField":
        return VectorField([sp.diff(self.expr, X), sp.diff(self.expr, Y)])


class VectorField:
    """Двумерное векторное поле из двух выражений."""

    def __init__(self, components: Sequence[Union[str, float, sp.Expr]], key: str = "expression"):
        if len(components) != 2:
            raise ConfigError("vector field needs exactly two components", key=key)
        self.components = [
            c if isinstance(c, ScalarField) else ScalarField(c, f"{key}[{i}]")
            for i, c in enumerate(components)
        ]

    def __call__(self, x, y, t=0.0) -> np.ndarray:
        return np.stack([c(x, y, t) for c in self.components], axis=-1)

    def __repr__(self) -> str:
        return f"VectorField({self.components[0].expr}, {self.components[1].expr})"

    def div(self) -> ScalarField:
        return ScalarField(sp.diff(self.components[0].expr, X) + sp.diff(self.components[1].expr, Y))

    def curl(self) -> ScalarField:
        return ScalarField(sp.diff(self.components[1].expr, X) - sp.diff(self.components[0].expr, Y))

    def jacobian(self) -> Callable[..., np.ndarray]:
        """Возвращает функцию (x, y, t) -> массив (..., 2, 2) с J[i, j] = d u_i / d x_j."""
        parts = [[c.diff("x"), c.diff("y")] for c in self.components]

        def evaluate(x, y, t=0.0):
            return np.stack(
                [np.stack([p(x, y, t) for p in row], axis=-1) for row in parts], axis=-2
            )

        return evaluate

    def diff(self, symbol: str) -> "VectorField":
        return VectorField([c.diff(symbol).expr for c in self.components])


def pressure_gradient(rho: ScalarField, a: float, gamma: float) -> VectorField:
    """Поле D(a rho^gamma), при котором (rho, 0) является стационарным решением."""
    p = ScalarField(sp.Float(a) * rho.expr ** sp.nsimplify(gamma))
    return p.gradient()
