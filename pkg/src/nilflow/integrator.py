"""Dormand-Prince 5(4) embedded Runge-Kutta pair with PI step-size control.

Hairer, Norsett & Wanner, *Solving ODEs I*, sec. II.4 (coefficients) and
sec. IV.2 (PI controller).  The fifth-order solution is propagated (local
extrapolation) and the stage-7 derivative is reused as the next stage 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import StepLimitExceeded, StepUnderflow

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B_HAT = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B - B_HAT

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
# PI exponents for an order-4 error estimate (k = 5)
ALPHA = 0.7 / 5
BETA = 0.4 / 5


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    evaluations: int = 0
    max_error: float = 0.0  # largest accepted scaled local error estimate


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray
    stats: StepStats = field(default_factory=StepStats)


def _initial_step(fun, t0, y0, f0, rtol, atol, t_span):
    # Hairer & Wanner starting-step heuristic
    scale = atol + np.abs(y0) * rtol
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_span)
    y1 = y0 + h0 * f0
    f1 = fun(t0 + h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, t_span)


def solve(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: Sequence[float],
    t_end: float,
    *,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    max_steps: int = 1_000_000,
    initial_step: float | None = None,
    t_eval: Sequence[float] | None = None,
    keep_steps: bool = True,
) -> Solution:
    """Integrate ``y' = fun(t, y)`` forward from ``t0`` to ``t_end``.

    Output contains ``t0``, every time in ``t_eval`` (steps are shortened to
    land on them exactly) and, with ``keep_steps``, every accepted step.
    """
    if rtol <= 0 or atol <= 0:
        raise ValueError("rtol and atol must be positive")
    y = np.array(y0, dtype=float)
    t = float(t0)
    t_end = float(t_end)
    if t_end < t:
        raise ValueError("backward integration is not supported")
    targets = sorted({float(s) for s in (() if t_eval is None else t_eval) if t0 < s <= t_end} | {t_end})
    stats = StepStats()
    ts, ys = [t], [y.copy()]
    if t_end == t:
        return Solution(np.array(ts), np.array(ys), stats)

    f = np.asarray(fun(t, y), dtype=float)
    stats.evaluations += 1
    h = initial_step or _initial_step(fun, t, y, f, rtol, atol, t_end - t)
    stats.evaluations += 0 if initial_step else 1
    err_prev = 1.0
    ti = 0
    K = np.empty((7, y.size))
    while ti < len(targets):
        if stats.accepted + stats.rejected >= max_steps:
            raise StepLimitExceeded(f"step limit {max_steps} reached at t={t}", t, y.copy())
        target = targets[ti]
        h_natural = h
        hit = False
        if t + h >= target:
            h = target - t
            hit = True
        min_h = 16 * np.spacing(max(abs(t), 1.0))
        if h < min_h:
            raise StepUnderflow(f"step size underflow at t={t}", t, y.copy())
        K[0] = f
        for s in range(1, 7):
            K[s] = fun(t + C[s] * h, y + h * (np.asarray(A[s]) @ K[:s]))
        stats.evaluations += 6
        y_new = y + h * (B @ K)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((h * (E @ K) / scale) ** 2))) if y.size else 0.0
        if not np.all(np.isfinite(y_new)):
            err = np.inf
        if err <= 1.0:
            t = target if hit else t + h
            y = y_new
            f = K[6].copy()
            stats.accepted += 1
            stats.max_error = max(stats.max_error, err)
            if hit:
                ti += 1
                ts.append(t)
                ys.append(y.copy())
            elif keep_steps:
                ts.append(t)
                ys.append(y.copy())
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * err ** (-ALPHA) * err_prev ** BETA
                factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
            h_next = h * factor
            # a step shortened to hit an output time says little about the natural step
            h = max(h_next, h_natural) if hit else h_next
        else:
            stats.rejected += 1
            factor = MIN_FACTOR if not np.isfinite(err) else max(MIN_FACTOR, SAFETY * err ** (-1 / 5))
            h *= factor
    return Solution(np.array(ts), np.array(ys), stats)
