"""Невязки слабой формулировки на кусочно-постоянной по времени траектории."""
from typing import Tuple

import numpy as np

from ..fem.operators import elementwise_curl, elementwise_div, evaluate
from ..fem.quadrature import evaluate_field, line_rule, physical_points, triangle_rule
from ..solver.physics import pressure
from ..utils.expressions import ScalarField, VectorField


def _curl_values(state, bary: np.ndarray) -> np.ndarray:
    """curl u в точках квадратуры, (nt, q): из w для смешанных схем, поэлементно для CR."""
    if state.w is not None:
        return evaluate(state.w, bary)[..., 0]
    curl = elementwise_curl(state.u).coefficients
    return np.repeat(curl[:, None], len(bary), axis=1)


def weak_residual(
    trajectory,
    phi: ScalarField,
    v: VectorField,
    physics,
    rho_bar: float = 0.0,
    order: int = 4,
) -> Tuple[float, float]:
    """(невязка неразрывности, невязка импульса) для пробных полей phi(t, x), v(t, x).

    Неразрывность:
        sum_m int rho^m (phi(t_m) - phi(t_{m-1})) + int_0^T int rho u . D phi
        + int rho^0 phi(0) - int rho^M phi(T);
    член с phi_t интегрируется по времени точно. Импульс:
        int_0^T int mu curl u curl v + ((mu + lam) div u - p(rho)) div v - f . v,
    при rho_bar > 0 добавляется sum_m rho_bar int (u^m - u^{m-1}) . v(t_m).
    Внутри интервала используется двухточечная квадратура Гаусса.
    """
    mesh = trajectory.mesh
    rule = triangle_rule(order)
    points = physical_points(mesh, rule)
    x, y = points[..., 0], points[..., 1]
    weights = rule.weights[None, :] * mesh.areas[:, None]
    in_time = line_rule(2)

    grad_phi = phi.gradient()
    div_v = v.div()
    curl_v = v.curl()
    force = physics.force_field()
    mu, lam = physics.mu, physics.lam

    def integral(values: np.ndarray) -> float:
        return float(np.sum(values * weights))

    states = trajectory.states
    first, last = states[0], states[-1]
    continuity = integral(first.rho.coefficients[:, None] * phi(x, y, first.time))
    continuity -= integral(last.rho.coefficients[:, None] * phi(x, y, last.time))
    momentum = 0.0

    for prev, state in zip(states[:-1], states[1:]):
        t0, t1 = prev.time, state.time
        dt = t1 - t0
        rho = state.rho.coefficients[:, None]
        u_values = evaluate(state.u, rule.points)
        curl_u = _curl_values(state, rule.points)
        div_u = elementwise_div(state.u).coefficients[:, None]
        p = pressure(state.rho.coefficients, physics.a, physics.gamma)[:, None]

        continuity += integral(rho * (phi(x, y, t1) - phi(x, y, t0)))
        for s, w in zip(in_time.points, in_time.weights):
            t = t0 + s * dt
            transport = np.einsum("tqc,tqc->tq", u_values, evaluate_field(grad_phi, points, t))
            continuity += dt * w * integral(rho * transport)

            f_dot_v = np.einsum("tqc,tqc->tq", evaluate_field(force, points, t), evaluate_field(v, points, t))
            viscous = mu * curl_u * curl_v(x, y, t) + ((mu + lam) * div_u - p) * div_v(x, y, t)
            momentum += dt * w * integral(viscous - f_dot_v)

        if rho_bar > 0:
            du = u_values - evaluate(prev.u, rule.points)
            momentum += rho_bar * integral(np.einsum("tqc,tqc->tq", du, evaluate_field(v, points, t1)))

    return abs(continuity), abs(momentum)

