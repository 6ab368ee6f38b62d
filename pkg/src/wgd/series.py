"""Truncation policy and layer-by-layer summation of zonal series."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable

from .errors import AlternatingSeriesNotConverged, DivergenceSuspected, DomainError, TruncationExceeded

__all__ = ["Truncation", "SeriesValue", "sum_layers"]

ENV_TRUNC_K = "WGD_TRUNC_K"


@dataclass(frozen=True)
class Truncation:
    """How far a series in the zonal weight ``k`` is summed.

    Parameters
    ----------
    max_degree : int
        Largest weight ``K`` included.
    tol : float
        Tail tolerance.  A layer counts as negligible when its magnitude is
        at most ``tol`` (``policy="absolute"``) or ``tol * |partial sum|``
        (``policy="relative"``).
    policy : {"relative", "absolute"}
    quiet_layers : int
        Number of consecutive negligible layers that ends the sum early.
    """

    max_degree: int = 30
    tol: float = 1e-10
    policy: str = "relative"
    quiet_layers: int = 3

    def __post_init__(self):
        if self.max_degree < 0:
            raise DomainError("max_degree must be non-negative")
        if not self.tol > 0:
            raise DomainError("tolerance must be positive")
        if self.policy not in ("relative", "absolute"):
            raise DomainError(f"unknown truncation policy {self.policy!r}")

    @classmethod
    def from_env(cls, **overrides) -> "Truncation":
        """Default policy, with ``max_degree`` taken from ``WGD_TRUNC_K`` if set."""
        kw = {}
        env = os.environ.get(ENV_TRUNC_K)
        if env:
            kw["max_degree"] = int(env)
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)

    def threshold(self, partial) -> float:
        if self.policy == "absolute":
            return self.tol
        return self.tol * abs(partial)


@dataclass(frozen=True)
class SeriesValue:
    """Result of a truncated series.

    Attributes
    ----------
    value : float or complex
    terms_used : int
        Number of weight layers summed (``k = 0 .. terms_used - 1``).
    last_layer_magnitude : float
    converged : bool
    extra : dict
        Optional method-specific diagnostics.
    """

    value: float | complex
    terms_used: int
    last_layer_magnitude: float
    converged: bool
    extra: dict = field(default_factory=dict, compare=False)

    def diagnostics(self) -> dict:
        out = {
            "terms_used": self.terms_used,
            "last_layer_magnitude": self.last_layer_magnitude,
            "converged": self.converged,
        }
        out.update(self.extra)
        return out

    def with_value(self, value, **extra) -> "SeriesValue":
        merged = dict(self.extra)
        merged.update(extra)
        return SeriesValue(value, self.terms_used, self.last_layer_magnitude, self.converged, merged)

    def __float__(self) -> float:
        return float(self.value)

    def __complex__(self) -> complex:
        return complex(self.value)


def sum_layers(
    layer: Callable[[int], float | complex],
    trunc: Truncation,
    *,
    alternating: bool = False,
    strict: bool = True,
    start: int = 0,
) -> SeriesValue:
    """Sum ``layer(k)`` for ``k = start, start+1, ...`` under a truncation policy.

    The sum stops early once ``trunc.quiet_layers`` consecutive layers are
    negligible.  For alternating series the last two layers must also be
    decreasing in magnitude.  Growth of the layer magnitude over three
    consecutive weights beyond ``K/2`` is treated as divergence.

    Raises
    ------
    DivergenceSuspected
        Layers keep growing in the second half of the allowed range.
    AlternatingSeriesNotConverged
        Same condition for a series flagged as alternating.
    TruncationExceeded
        ``K`` was reached without meeting the tolerance (only when ``strict``).
    """
    total = 0.0
    mags: list[float] = []
    quiet = 0
    K = trunc.max_degree
    for k in range(start, K + 1):
        term = layer(k)
        total = total + term
        mag = abs(term)
        if not math.isfinite(mag):
            err = AlternatingSeriesNotConverged if alternating else DivergenceSuspected
            raise err(f"layer {k} is not finite", SeriesValue(total, k + 1 - start, mag, False))
        mags.append(mag)
        quiet = quiet + 1 if mag <= trunc.threshold(total) else 0
        decreasing = len(mags) >= 3 and mags[-1] <= mags[-2] <= mags[-3]
        if quiet >= trunc.quiet_layers and (not alternating or decreasing):
            return SeriesValue(total, k + 1 - start, mag, True)
        if (
            k > K / 2
            and len(mags) >= 4
            and mags[-1] > mags[-2] > mags[-3] > mags[-4]
            and mag > trunc.threshold(total)
        ):
            err = AlternatingSeriesNotConverged if alternating else DivergenceSuspected
            raise err(
                f"series layers grew for three consecutive weights up to k={k} "
                f"(last magnitude {mag:.3g})",
                SeriesValue(total, k + 1 - start, mag, False),
            )
    partial = SeriesValue(total, K + 1 - start, mags[-1] if mags else 0.0, False)
    if strict:
        raise TruncationExceeded(
            f"series not converged within K={K} (last layer {partial.last_layer_magnitude:.3g})",
            partial,
        )
    return partial
