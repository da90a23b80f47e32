"""Adaptive Dormand-Prince 5(4) integration with cubic Hermite dense output."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Dormand & Prince (1980) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# difference between the 5th- and 4th-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


class StepSizeUnderflow(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorStats:
    steps: int
    rejected: int
    rhs_evals: int
    rel_tol: float
    abs_tol: float


@dataclass(frozen=True)
class DenseSolution:
    """Accepted step endpoints with their derivatives; evaluates by cubic Hermite."""

    t: np.ndarray
    y: np.ndarray
    dy: np.ndarray

    def __call__(self, times) -> np.ndarray:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if times.size and (times.min() < self.t[0] - 1e-12 or times.max() > self.t[-1] + 1e-12):
            raise ValueError("requested times fall outside the integration interval")
        if len(self.t) == 1:
            return np.repeat(self.y[:1], times.size, axis=0)
        i = np.clip(np.searchsorted(self.t, times, side="right") - 1, 0, len(self.t) - 2)
        h = (self.t[i + 1] - self.t[i])[:, None]
        s = ((times - self.t[i]) / h[:, 0])[:, None]
        s2, s3 = s * s, s * s * s
        return (
            (2 * s3 - 3 * s2 + 1) * self.y[i]
            + (s3 - 2 * s2 + s) * h * self.dy[i]
            + (-2 * s3 + 3 * s2) * self.y[i + 1]
            + (s3 - s2) * h * self.dy[i + 1]
        )


def _initial_step(f, y0, f0, rel_tol, abs_tol, order=5):
    # Hairer, Norsett & Wanner, starting step selection
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = f(y0 + h0 * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / (order + 1))
    return min(100 * h0, h1)


def dopri5(f, y0, t_end: float, rel_tol: float = 1e-9, abs_tol: float | None = None):
    """Integrate the autonomous system ``y' = f(y)`` from ``t = 0`` to ``t_end``.

    Returns a :class:`DenseSolution` over the accepted steps and the
    :class:`IntegratorStats`.
    """
    if abs_tol is None:
        abs_tol = 1e-3 * rel_tol
    y = np.array(y0, dtype=float)
    k1 = f(y)
    nfev = 1
    ts, ys, fs = [0.0], [y], [k1]
    if t_end <= 0:
        return DenseSolution(np.array(ts), np.array(ys), np.array(fs)), IntegratorStats(0, 0, nfev, rel_tol, abs_tol)
    h = min(_initial_step(f, y, k1, rel_tol, abs_tol), t_end)
    nfev += 1
    t = 0.0
    accepted = rejected = 0
    h_min = 16 * np.finfo(float).eps * max(t_end, 1.0)
    while t < t_end:
        if h < h_min:
            raise StepSizeUnderflow(f"step size underflow at t = {t!r}")
        last = t + h >= t_end
        if last:
            h = t_end - t
        k2 = f(y + h * (_A21 * k1))
        k3 = f(y + h * (_A31 * k1 + _A32 * k2))
        k4 = f(y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = f(y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = f(y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        y_new = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = f(y_new)
        nfev += 6
        err = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = np.sqrt(np.mean((err / scale) ** 2))
        if err_norm <= 1.0:
            t = t_end if last else t + h
            y, k1 = y_new, k7
            ts.append(t)
            ys.append(y)
            fs.append(k7)
            accepted += 1
            factor = MAX_FACTOR if err_norm == 0 else min(MAX_FACTOR, SAFETY * err_norm**-0.2)
        else:
            rejected += 1
            factor = max(MIN_FACTOR, SAFETY * err_norm**-0.2)
        h *= factor
    dense = DenseSolution(np.array(ts), np.array(ys), np.array(fs))
    return dense, IntegratorStats(accepted, rejected, nfev, rel_tol, abs_tol)
