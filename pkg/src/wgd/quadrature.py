"""Log-scale quadrature for positive integrands on half-lines and intervals.

Integrands of the form ``y^(s-1) h(y)`` span many orders of magnitude, so
integration runs in ``u = log y`` and the integrand is divided by its
maximum over a coarse grid before calling :func:`scipy.integrate.quad`.
The range is split at that maximum.  Divergence at either end of an
unbounded range is detected from the slope of the log-integrand.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DivergentIntegral

__all__ = ["log_integral", "LogIntegral"]

_GRID_HALF_WIDTH = 80.0
_GRID_POINTS = 4001


class LogIntegral(tuple):
    """``(log_value, rel_error)`` pair returned by :func:`log_integral`."""

    __slots__ = ()

    def __new__(cls, log_value: float, rel_error: float):
        return super().__new__(cls, (log_value, rel_error))

    @property
    def log_value(self) -> float:
        return self[0]

    @property
    def rel_error(self) -> float:
        return self[1]


def _log_integrand(log_f: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    def g(u):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            val = np.asarray(log_f(np.exp(u)), dtype=float) + u
        return np.where(np.isnan(val), -np.inf, val)

    return g


def log_integral(
    log_f: Callable[[np.ndarray], np.ndarray],
    lo: float = 0.0,
    hi: float = math.inf,
    *,
    epsrel: float = 1e-11,
    epsabs: float = 1e-14,
) -> LogIntegral:
    """Log of ``∫_lo^hi exp(log_f(y)) dy`` for a positive integrand.

    Parameters
    ----------
    log_f : callable
        Vectorized log of the integrand; ``-inf`` where it vanishes.
    lo, hi : float
        Integration limits with ``0 <= lo < hi <= inf``.
    epsrel, epsabs : float
        Tolerances passed to :func:`scipy.integrate.quad`, applied to the
        integrand after scaling by its maximum.

    Returns
    -------
    LogIntegral
        Log of the integral and an estimate of its relative error.

    Raises
    ------
    DivergentIntegral
        When the integrand does not decay at an unbounded end, or is not
        finite anywhere on the range.
    """
    if not (0 <= lo < hi):
        raise ValueError("need 0 <= lo < hi")
    g = _log_integrand(log_f)
    u_lo = math.log(lo) if lo > 0 else -math.inf
    u_hi = math.log(hi) if math.isfinite(hi) else math.inf
    a = u_lo if math.isfinite(u_lo) else -_GRID_HALF_WIDTH
    b = u_hi if math.isfinite(u_hi) else _GRID_HALF_WIDTH
    if math.isfinite(u_lo) and math.isfinite(u_hi):
        grid = np.linspace(a, b, _GRID_POINTS)[1:-1]
    else:
        grid = np.linspace(a, b, _GRID_POINTS)
    vals = g(grid)
    if np.any(vals == np.inf):
        raise DivergentIntegral("integrand is infinite inside the range")
    if not np.any(np.isfinite(vals)):
        raise DivergentIntegral("integrand vanishes or is undefined on the whole range")
    step = grid[1] - grid[0]
    if not math.isfinite(u_lo) and np.isfinite(vals[0]) and (vals[1] - vals[0]) / step <= 1e-6:
        raise DivergentIntegral("integrand does not decay at the origin")
    if not math.isfinite(u_hi) and np.isfinite(vals[-1]) and (vals[-1] - vals[-2]) / step >= -1e-6:
        raise DivergentIntegral("integrand does not decay at infinity")
    imax = int(np.argmax(vals))
    gmax = float(vals[imax])
    u_star = float(grid[imax])

    def scaled(u: float) -> float:
        return math.exp(float(g(u)) - gmax)

    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for left, right in ((u_lo, u_star), (u_star, u_hi)):
            if left == right:
                continue
            val, e = integrate.quad(scaled, left, right, epsabs=epsabs, epsrel=epsrel, limit=500)
            total += val
            err += e
    if not total > 0 or not math.isfinite(total):
        raise DivergentIntegral("quadrature returned a non-positive or non-finite value")
    return LogIntegral(math.log(total) + gmax, err / total)
