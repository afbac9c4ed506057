"""Finite-difference oracles and the gradient checker.

These routines differentiate nothing symbolically: they probe a black-box
evaluator with central differences, which keeps them independent of the tape
and jet machinery they are used to validate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# central-difference steps per derivative order, balancing truncation
# against rounding at 64-bit
_FD_STEPS = {1: 1e-6, 2: 1e-5, 3: 1e-4, 4: 2e-3}

_CENTRAL_STENCILS = {
    1: ([-1, 1], [-0.5, 0.5]),
    2: ([-1, 0, 1], [1.0, -2.0, 1.0]),
    3: ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5]),
    4: ([-2, -1, 0, 1, 2], [1.0, -4.0, 6.0, -4.0, 1.0]),
}


def derivative_fd(f, x: float, order: int) -> float:
    """Order-n derivative of a scalar function by a central stencil."""
    if order == 0:
        return float(f(x))
    h = _FD_STEPS[order]
    offsets, weights = _CENTRAL_STENCILS[order]
    acc = 0.0
    for o, w in zip(offsets, weights):
        acc += w * float(f(x + o * h))
    return acc / h**order


def grad_fd(loss, params: np.ndarray) -> np.ndarray:
    """Central-difference gradient of `loss(flat_params)`.

    Step per coordinate: 1e-6 scaled by max(1, |param|).
    """
    params = np.asarray(params, dtype=np.float64)
    g = np.zeros_like(params)
    for i in range(params.size):
        h = 1e-6 * max(1.0, abs(params[i]))
        up = params.copy()
        up[i] += h
        dn = params.copy()
        dn[i] -= h
        g[i] = (loss(up) - loss(dn)) / (2.0 * h)
    return g


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_error: float
    worst_index: int
    analytic: np.ndarray
    numeric: np.ndarray

    def ok(self, tol: float) -> bool:
        return self.max_rel_error <= tol


def grad_check(net, loss, tol: float = 1e-4) -> GradCheckReport:
    """Compare a model's analytic gradient against central differences.

    `loss(model) -> float` must be deterministic; `loss.grad(model)` is not
    assumed: the analytic side is obtained from `loss` evaluated through the
    tape via `net.bind`-style helpers supplied by the loss object, so this
    checker only needs two callables:

    - ``loss.value_at(flat_params) -> float`` for the numeric side
    - ``loss.grad_at(flat_params) -> np.ndarray`` for the analytic side

    Report-only: returns the worst relative error and its parameter index.
    """
    theta = net.flatten()
    analytic = loss.grad_at(theta)
    numeric = grad_fd(loss.value_at, theta)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    denom = np.maximum(scale, 1e-8)
    rel = np.abs(analytic - numeric) / denom
    worst = int(np.argmax(rel)) if rel.size else 0
    worst_err = float(rel[worst]) if rel.size else 0.0
    return GradCheckReport(worst_err, worst, analytic, numeric)
