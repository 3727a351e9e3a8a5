"""Damped Newton descent for smooth convex objectives."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class OptimResult:
    x: np.ndarray
    fun: float
    grad_norm: float
    n_iter: int
    converged: bool
    history: list = field(default_factory=list)


def newton_descent(fun, newton_step, x0, max_iter=500, gtol=1e-6, armijo=1e-4, max_halvings=50):
    """Minimise ``fun`` by Newton steps with Armijo backtracking.

    ``fun(x)`` returns ``(value, gradient)``; ``newton_step(x, grad)``
    returns a descent direction (typically ``-H^{-1} grad``).  Steps are
    only accepted when they do not increase the objective, so
    ``history`` is non-increasing.  Stops when the gradient norm drops to
    ``gtol``, after ``max_iter`` iterations, or when no step makes
    progress at machine precision.
    """
    x = np.array(x0, dtype=float)
    f, g = fun(x)
    history = [f]
    gnorm = float(np.linalg.norm(g))
    it = 0
    while gnorm > gtol and it < max_iter:
        d = newton_step(x, g)
        slope = float(g @ d)
        if not slope < 0:
            d, slope = -g, -float(g @ g)
        t = 1.0
        for _ in range(max_halvings):
            x_new = x + t * d
            f_new, g_new = fun(x_new)
            if f_new <= f + armijo * t * slope:
                break
            t *= 0.5
        else:
            break
        it += 1
        if f_new > f:  # pragma: no cover - excluded by the Armijo test
            break
        stalled = f_new == f
        x, f, g = x_new, f_new, g_new
        history.append(f)
        gnorm = float(np.linalg.norm(g))
        if stalled:
            break
    return OptimResult(x, f, gnorm, it, gnorm <= gtol, history)
