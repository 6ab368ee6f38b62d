"""Exact sampling and Monte Carlo estimation.

A WGD draw factors as ``X = Σ^{1/2} (y U) Σ^{1/2}`` where the radial part
``y = tr Σ^{-1} X`` has density proportional to ``y^{nm/2-1} h(y)`` and the
direction ``U = V / tr V`` with ``V ~ W_m(I, n)`` does not depend on
``h``.  All generator dependence therefore sits in a one-dimensional
draw, which is exact for every built-in generator.

Randomness comes from :class:`RngStream`, a PCG64 generator keyed by a
``(seed, stream)`` pair.  Monte Carlo estimates split their work into
fixed-size chunks with one stream per chunk, so results do not depend on
how the chunks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import interpolate, special

from .distributions import WgdParams
from .errors import DivergentIntegral, DomainError
from .generators import ShapeGenerator, gamma_k_ln
from .matrix import SpdMatrix, as_spd, mv_gamma_ln, sqrt_spd

__all__ = [
    "RngStream",
    "McEstimate",
    "RadialTable",
    "radial_table",
    "sample_wishart",
    "sample_direction",
    "sample_radial",
    "sample_wgd",
    "mc_estimate",
    "importance_integral",
    "radial_mode",
    "CHUNK_SIZE",
]

CHUNK_SIZE = 1 << 15
ALGORITHM = "PCG64"


@dataclass
class RngStream:
    """Reproducible random stream identified by ``(seed, stream)``.

    The generator is PCG64 seeded from ``SeedSequence(seed, spawn_key=(stream,))``.
    Two instances with equal ``seed`` and ``stream`` produce identical draws.
    """

    seed: int
    stream: int = 0
    algorithm: str = field(default=ALGORITHM, init=False)
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.seed < 0 or self.stream < 0:
            raise DomainError("seed and stream must be non-negative integers")
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream),))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def child(self, stream: int) -> "RngStream":
        """Fresh stream with the same seed and another stream id."""
        return RngStream(self.seed, stream)

    def describe(self) -> dict:
        return {"seed": self.seed, "stream": self.stream, "algorithm": self.algorithm}


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise DomainError("rng must be an RngStream or numpy Generator")


@dataclass(frozen=True)
class McEstimate:
    """Sample mean of a statistic with its standard error."""

    mean: float
    stderr: float
    n_samples: int

    def z_score(self, target: float) -> float:
        """``(mean - target) / stderr``; 0 when both agree exactly."""
        diff = self.mean - target
        if self.stderr == 0:
            return 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return diff / self.stderr

    def within(self, target: float, k: float = 3.0) -> bool:
        return abs(self.z_score(target)) <= k

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n_samples": self.n_samples}


def _summarize(values: np.ndarray) -> McEstimate:
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 2:
        raise DomainError("need at least two samples")
    mean = float(np.sum(values) / n)
    sd = float(np.sqrt(np.sum((values - mean) ** 2) / (n - 1)))
    return McEstimate(mean, sd / math.sqrt(n), n)


# ---------------------------------------------------------------------------
# Wishart and direction draws
# ---------------------------------------------------------------------------


def _bartlett(m: int, n: float, gen: np.random.Generator, size: int) -> np.ndarray:
    """Lower-triangular Bartlett factors ``A`` with ``A A' ~ W_m(I, n)``."""
    a = np.zeros((size, m, m))
    for i in range(m):
        a[:, i, i] = np.sqrt(gen.chisquare(n - i, size))
        if i:
            a[:, i, :i] = gen.standard_normal((size, i))
    return a


def sample_wishart(sigma, n: float, rng, size: int | None = None):
    """Draw from ``W_m(Σ, n)`` by the Bartlett decomposition.

    Returns one ``(m, m)`` array, or an ``(size, m, m)`` stack.
    """
    sigma = as_spd(sigma)
    m = sigma.m
    if not n > m - 1:
        raise DomainError(f"Wishart degrees of freedom n={n} must exceed m-1={m - 1}")
    count = 1 if size is None else int(size)
    a = _bartlett(m, n, _gen(rng), count)
    la = sigma.cholesky @ a
    x = la @ np.swapaxes(la, 1, 2)
    x = 0.5 * (x + np.swapaxes(x, 1, 2))
    return x[0] if size is None else x


def sample_direction(n: float, m: int, rng, size: int | None = None):
    """Unit-trace direction ``U = V / tr V`` with ``V ~ W_m(I, n)``."""
    if not n > m - 1:
        raise DomainError(f"n={n} must exceed m-1={m - 1}")
    count = 1 if size is None else int(size)
    a = _bartlett(m, n, _gen(rng), count)
    v = a @ np.swapaxes(a, 1, 2)
    v = 0.5 * (v + np.swapaxes(v, 1, 2))
    u = v / np.trace(v, axis1=1, axis2=2)[:, None, None]
    return u[0] if size is None else u


# ---------------------------------------------------------------------------
# radial draws
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)
_SCAN_HALF_WIDTH = 150.0
_SCAN_POINTS = 6001
_FINE_INTERVALS = 4096
_KNOTS = 2048
_Q_LO, _Q_HI = 1e-6, 1.0 - 1e-6
_CDF_TOL = 1e-9


class RadialTable:
    """Inverse CDF of the radial law ``y^{s-1} h(y) / ∫ y^{s-1} h``.

    The CDF is computed in ``u = log y`` by composite 20-point
    Gauss-Legendre quadrature on a fine grid.  The inverse is a PCHIP
    interpolant through knots at logit-spaced quantiles in
    ``[1e-6, 1 - 1e-6]``, refined by bisection of knot intervals until the
    CDF error at every interval midpoint is at most ``1e-9``.  Beyond the
    outer knots the fine-grid CDF is inverted by linear interpolation.
    """

    def __init__(self, h: ShapeGenerator, s: float, max_refinements: int = 8):
        self.h = h
        self.s = float(s)
        h.decay_check(self.s)
        lo, hi = h.support
        u_lo = math.log(lo) if lo > 0 else -_SCAN_HALF_WIDTH
        u_hi = math.log(hi) if math.isfinite(hi) else _SCAN_HALF_WIDTH
        scan = np.linspace(u_lo, u_hi, _SCAN_POINTS)
        lf = self._log_f(scan)
        if not np.any(np.isfinite(lf)):
            raise DivergentIntegral(f"{h.kind}: radial density vanishes everywhere")
        self._log_max = float(np.max(lf[np.isfinite(lf)]))
        keep = np.nonzero(lf > self._log_max - 60.0)[0]
        step = scan[1] - scan[0]
        a = max(u_lo, float(scan[keep[0]]) - step)
        b = min(u_hi, float(scan[keep[-1]]) + step)
        self._edges = np.linspace(a, b, _FINE_INTERVALS + 1)
        pieces = self._piece_integrals(self._edges[:-1], self._edges[1:])
        cum = np.concatenate([[0.0], np.cumsum(pieces)])
        self._total = float(cum[-1])
        if not (self._total > 0 and math.isfinite(self._total)):
            raise DivergentIntegral(f"{h.kind}: radial density is not normalizable")
        self._cum = cum / self._total
        self._build_knots(max_refinements)

    # -- density and CDF --------------------------------------------------

    def _log_f(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(all="ignore"):
            val = self.s * u + np.asarray(self.h.log_h(np.exp(u)), dtype=float)
        return np.where(np.isnan(val), -np.inf, val)

    def _pdf_u(self, u):
        return np.exp(self._log_f(u) - self._log_max) / self._total

    def _piece_integrals(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        pts = mid[..., None] + half[..., None] * _GL_NODES
        vals = np.exp(self._log_f(pts) - self._log_max)
        return half * np.sum(vals * _GL_WEIGHTS, axis=-1)

    def cdf_u(self, u):
        """CDF of ``log y`` at ``u`` (vectorized)."""
        u = np.clip(np.asarray(u, dtype=float), self._edges[0], self._edges[-1])
        idx = np.clip(np.searchsorted(self._edges, u, side="right") - 1, 0, _FINE_INTERVALS - 1)
        part = self._piece_integrals(self._edges[idx], u) / self._total
        return self._cum[idx] + part

    def cdf(self, y):
        """CDF of the radial variable at ``y``."""
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(y > 0, self.cdf_u(np.log(np.maximum(y, 1e-300))), 0.0)

    def _coarse_inverse(self, q):
        return np.interp(q, self._cum, self._edges)

    def _solve(self, q):
        """Knot positions ``u`` with ``F(u) = q`` by safeguarded Newton steps."""
        q = np.asarray(q, dtype=float)
        lo = np.interp(q, self._cum, self._edges, left=self._edges[0])
        idx = np.clip(np.searchsorted(self._cum, q, side="right") - 1, 0, _FINE_INTERVALS - 1)
        left = self._edges[idx].copy()
        right = self._edges[idx + 1].copy()
        u = lo
        for _ in range(80):
            f = self.cdf_u(u) - q
            done = np.abs(f) <= 1e-14
            if np.all(done):
                break
            left = np.where(f < 0, u, left)
            right = np.where(f >= 0, u, right)
            d = self._pdf_u(u)
            with np.errstate(all="ignore"):
                step = np.where(d > 0, f / d, 0.0)
            cand = u - step
            bad = ~((cand >= left) & (cand <= right)) | ~np.isfinite(cand)
            u = np.where(done, u, np.where(bad, 0.5 * (left + right), cand))
        return u

    def _build_knots(self, max_refinements: int) -> None:
        logits = np.linspace(special.logit(_Q_LO), special.logit(_Q_HI), _KNOTS)
        q = special.expit(logits)
        u = self._solve(q)
        self.refinements = 0
        for _ in range(max_refinements):
            spline = interpolate.PchipInterpolator(q, u)
            qm = 0.5 * (q[1:] + q[:-1])
            err = np.abs(self.cdf_u(spline(qm)) - qm)
            bad = err > _CDF_TOL
            if not np.any(bad):
                break
            self.refinements += 1
            new_q = qm[bad]
            new_u = self._solve(new_q)
            q = np.concatenate([q, new_q])
            u = np.concatenate([u, new_u])
            order = np.argsort(q)
            q, u = q[order], u[order]
        self.max_cdf_error = float(
            np.max(np.abs(self.cdf_u(interpolate.PchipInterpolator(q, u)(0.5 * (q[1:] + q[:-1]))) - 0.5 * (q[1:] + q[:-1])))
        )
        self._q = q
        self._u = u
        self._spline = interpolate.PchipInterpolator(q, u)

    @property
    def n_knots(self) -> int:
        return int(self._q.size)

    def ppf(self, p):
        """Quantile function of the radial variable."""
        p = np.asarray(p, dtype=float)
        inner = (p >= self._q[0]) & (p <= self._q[-1])
        u = np.where(inner, self._spline(np.clip(p, self._q[0], self._q[-1])), self._coarse_inverse(p))
        return np.exp(u)

    def sample(self, gen: np.random.Generator, size: int) -> np.ndarray:
        return self.ppf(gen.random(size))


@lru_cache(maxsize=64)
def _radial_table(h: ShapeGenerator, s: float) -> RadialTable:
    return RadialTable(h, s)


def radial_table(h: ShapeGenerator, n: float, m: int) -> RadialTable:
    """Cached inverse-CDF table for the radial law of ``(h, n, m)``."""
    return _radial_table(h, n * m / 2)


def sample_radial(h: ShapeGenerator, n: float, m: int, rng, size: int | None = None):
    """Exact draws of ``y`` with density ``y^{nm/2-1} h(y) / γ_0(n/2)``.

    Uses a closed form where the generator provides one and the tabulated
    inverse CDF otherwise.
    """
    s = n * m / 2
    h.decay_check(s)
    count = 1 if size is None else int(size)
    gen = _gen(rng)
    y = h.radial_closed_form(s, gen, count)
    if y is None:
        y = radial_table(h, n, m).sample(gen, count)
    y = np.asarray(y, dtype=float)
    return float(y[0]) if size is None else y


def radial_mode(h: ShapeGenerator, n: float, m: int) -> float:
    """Mode of the law of ``log y`` when ``y`` has density ``∝ y^{nm/2-1} h(y)``.

    Working with ``log y`` keeps the mode away from 0 even when the radial
    density itself peaks at the origin, so the value is a usable scale.
    """
    s = n * m / 2
    lo, hi = h.support
    u_lo = math.log(lo) if lo > 0 else -60.0
    u_hi = math.log(hi) if math.isfinite(hi) else 60.0
    u = np.linspace(u_lo, u_hi, 24001)[1:-1]
    with np.errstate(all="ignore"):
        lf = s * u + np.asarray(h.log_h(np.exp(u)), dtype=float)
    lf = np.where(np.isnan(lf), -np.inf, lf)
    return float(np.exp(u[int(np.argmax(lf))]))


def sample_wgd(params: WgdParams, count: int, rng, return_radial: bool = False):
    """Exact draws from ``WG_m(Σ, n, h)``.

    Returns
    -------
    ndarray
        Stack of shape ``(count, m, m)``; with ``return_radial`` also the
        radial draws ``y_i = tr Σ^{-1} X_i``.
    """
    if count < 1:
        raise DomainError("count must be at least 1")
    n, m = params.n, params.m
    gen = _gen(rng)
    y = sample_radial(params.h, n, m, gen, count)
    u = sample_direction(n, m, gen, count)
    root = sqrt_spd(params.sigma).array
    x = y[:, None, None] * (root @ u @ root)
    x = 0.5 * (x + np.swapaxes(x, 1, 2))
    return (x, y) if return_radial else x


# ---------------------------------------------------------------------------
# Monte Carlo harness
# ---------------------------------------------------------------------------


def _chunks(total: int):
    start = 0
    stream = 0
    while start < total:
        size = min(CHUNK_SIZE, total - start)
        yield stream, size
        start += size
        stream += 1


def mc_estimate(
    statistic: Callable,
    params: WgdParams,
    n_samples: int,
    seed: int,
    vectorized: bool = False,
) -> McEstimate:
    """Monte Carlo mean and standard error of ``statistic(X)``.

    Parameters
    ----------
    statistic : callable
        Maps one ``(m, m)`` array to a float, or with ``vectorized`` a
        stack ``(N, m, m)`` to an array of length ``N``.
    params : WgdParams
    n_samples : int
        At least 100.
    seed : int
        Chunk ``j`` of ``2^15`` draws uses stream ``j`` of this seed.
    """
    if n_samples < 100:
        raise DomainError("mc_estimate needs at least 100 samples")
    values = []
    for stream, size in _chunks(n_samples):
        x = sample_wgd(params, size, RngStream(seed, stream))
        if vectorized:
            values.append(np.asarray(statistic(x), dtype=float))
        else:
            values.append(np.fromiter((statistic(xi) for xi in x), dtype=float, count=size))
    return _summarize(np.concatenate(values))


def importance_integral(
    log_f: Callable[[np.ndarray], np.ndarray],
    m: int,
    n: float,
    radial_scale: float,
    n_samples: int,
    seed: int,
    n_direction: float | None = None,
) -> McEstimate:
    """Estimate ``∫_{X>0} exp(log_f(X)) dX`` by importance sampling.

    The proposal draws ``X = y U``: ``U = V/tr V`` with ``V ~ W_m(I, n_0)``
    and ``y`` from a beta-prime(1, 1/2) law scaled by ``radial_scale``.
    Its density with respect to Lebesgue measure on symmetric matrices is

        q(X) = q_y(y) · Γ(n_0 m/2)/Γ_m(n_0/2) · |U|^{(n_0-m-1)/2} · y^{1-D},

    with ``D = m(m+1)/2``.  The default ``n_0 = n - 1/2`` (when allowed)
    makes the direction proposal heavier near singular matrices than a
    target with ``n`` degrees of freedom, which keeps weights bounded.

    Parameters
    ----------
    log_f : callable
        Vectorized log integrand on stacks ``(N, m, m)``.
    m : int
    n : float
        Degrees of freedom of the target's determinant factor.
    radial_scale : float
        Scale of the radial proposal, typically the radial mode.
    """
    if n_direction is None:
        n_direction = n - 0.5 if n - 0.5 > m - 1 else n
    n0 = float(n_direction)
    d = m * (m + 1) / 2
    a_q, b_q = 1.0, 0.5
    log_gu_const = math.lgamma(n0 * m / 2) - mv_gamma_ln(n0 / 2, m)
    vals = []
    for stream, size in _chunks(n_samples):
        gen = RngStream(seed, stream).generator
        u = sample_direction(n0, m, gen, size)
        t = gen.beta(a_q, b_q, size)
        r = t / (1.0 - t)
        y = radial_scale * r
        log_qy = (
            (a_q - 1) * np.log(r)
            - (a_q + b_q) * np.log1p(r)
            - special.betaln(a_q, b_q)
            - math.log(radial_scale)
        )
        _, logdet_u = np.linalg.slogdet(u)
        log_q = log_qy + log_gu_const + 0.5 * (n0 - m - 1) * logdet_u + (1 - d) * np.log(y)
        x = y[:, None, None] * u
        lf = np.asarray(log_f(x), dtype=float)
        with np.errstate(under="ignore"):
            vals.append(np.exp(lf - log_q))
    return _summarize(np.concatenate(vals))
