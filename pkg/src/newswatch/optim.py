"""Deterministic smooth minimizer: L-BFGS direction, Armijo backtracking.

No stochasticity and no second-order information: the memory holds recent
(s, y) pairs only.  The line search guarantees a strict decrease on every
accepted step, so the objective trace is monotonically non-increasing.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    grad_inf_norm: float
    n_iter: int
    converged: bool
    objective_history: list[float]
    stop_reason: str


def _two_loop(
    grad: np.ndarray,
    s_list: list[np.ndarray],
    y_list: list[np.ndarray],
    rho_list: list[float],
) -> np.ndarray:
    q = grad.copy()
    alphas: list[float] = []
    for s, y, rho in zip(reversed(s_list), reversed(y_list), reversed(rho_list)):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    if s_list:
        gamma = float(s_list[-1] @ y_list[-1]) / float(y_list[-1] @ y_list[-1])
        q *= gamma
    for (s, y, rho), a in zip(zip(s_list, y_list, rho_list), reversed(alphas)):
        b = rho * float(y @ q)
        q += (a - b) * s
    return q


def minimize(
    fun_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0: np.ndarray,
    *,
    gtol: float = 1e-6,
    max_iter: int = 1000,
    history_size: int = 10,
    armijo_c1: float = 1e-4,
    backtrack: float = 0.5,
    max_backtracks: int = 60,
) -> MinimizeResult:
    """Minimize until the gradient sup-norm reaches gtol or max_iter steps."""
    x = np.array(x0, dtype=np.float64, copy=True)
    f, g = fun_grad(x)
    history = [float(f)]
    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    rho_list: list[float] = []

    stop_reason = "max_iter"
    n_iter = 0
    converged = False
    while n_iter < max_iter:
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        if gnorm <= gtol:
            converged = True
            stop_reason = "gtol"
            break

        d = -_two_loop(g, s_list, y_list, rho_list)
        slope = float(g @ d)
        if slope >= 0.0:  # stale memory produced a non-descent direction
            s_list.clear()
            y_list.clear()
            rho_list.clear()
            d = -g
            slope = -float(g @ g)

        alpha = 1.0 if s_list else min(1.0, 1.0 / max(1.0, gnorm))
        accepted = False
        for _ in range(max_backtracks):
            x_new = x + alpha * d
            f_new, g_new = fun_grad(x_new)
            if np.isfinite(f_new) and f_new <= f + armijo_c1 * alpha * slope:
                accepted = True
                break
            alpha *= backtrack
        if not accepted:
            stop_reason = "line_search_stalled"
            break

        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-10 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            s_list.append(s)
            y_list.append(y)
            rho_list.append(1.0 / sy)
            if len(s_list) > history_size:
                s_list.pop(0)
                y_list.pop(0)
                rho_list.pop(0)

        x, f, g = x_new, float(f_new), g_new
        history.append(f)
        n_iter += 1
    else:
        stop_reason = "max_iter"

    if not converged and g.size:
        converged = float(np.max(np.abs(g))) <= gtol
        if converged:
            stop_reason = "gtol"

    return MinimizeResult(
        x=x,
        fun=f,
        grad_inf_norm=float(np.max(np.abs(g))) if g.size else 0.0,
        n_iter=n_iter,
        converged=converged,
        objective_history=history,
        stop_reason=stop_reason,
    )
