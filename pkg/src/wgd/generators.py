"""Shape generators ``h`` and their radial integrals.

A shape generator is a nonnegative function ``h`` on the half-line.  It
enters the density through ``h(tr Σ^{-1} X)``.  Everything else the
library needs comes from a few derived quantities:

* the master integrals ``γ_k(a) = ∫ y^(am+k-1) h(y) dy``,
* the scaled Taylor coefficients ``h^(k)(0) / k!``,
* ``g'(x)`` with ``g = -log h``, used by the maximum-likelihood equation,
* the radial density ``y^(nm/2-1) h(y) / γ_0(n/2)`` of the trace at ``Σ = I``.

Generators are frozen dataclasses, so they hash and compare by value
(``Custom`` compares its callables by identity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, ClassVar

import mpmath
import numpy as np
from scipy import special

from .errors import (
    DivergentIntegral,
    DomainError,
    NonpositiveDensity,
    NoTaylorExpansion,
    ParameterOutOfRange,
)
from .quadrature import log_integral

__all__ = [
    "GammaK",
    "ShapeGenerator",
    "Exponential",
    "TPrime",
    "Power",
    "Kummer",
    "Logistic",
    "SinGaussian",
    "LogExp",
    "HypergeomExp",
    "Custom",
    "h_eval",
    "gamma_k_ln",
    "taylor_coeff",
    "taylor_ratio",
    "g_prime",
    "radial_logpdf",
    "register_generator",
    "registered_generators",
    "generator_from_config",
    "generator_to_config",
]

_CHECK_POINTS = 1000


@dataclass(frozen=True)
class GammaK:
    """Log of the master integral ``γ_k(a)`` with provenance.

    Attributes
    ----------
    a, k, m
        Arguments; the integrand is ``y^(a m + k - 1) h(y)``.
    value : float
        ``log γ_k(a)``.
    method : {"analytic", "quadrature"}
    error : float
        Relative error estimate (0 for analytic values).
    """

    a: float
    k: int
    m: int
    value: float
    method: str
    error: float = 0.0


class ShapeGenerator:
    """Base class for shape generators.

    Subclasses implement :meth:`log_h` and, where available, closed forms
    for the master integral, Taylor coefficients and ``g'``.
    """

    kind: ClassVar[str] = "abstract"
    has_analytic_gamma_k: ClassVar[bool] = False
    has_taylor: ClassVar[bool] = False
    has_radial_sampler: ClassVar[bool] = True

    # -- interface -------------------------------------------------------

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, math.inf)

    def log_h(self, y):
        """Vectorized ``log h(y)``; ``-inf`` outside the support."""
        raise NotImplementedError

    def h_signed(self, y):
        """``h`` itself, possibly negative; used for the construction check."""
        with np.errstate(all="ignore"):
            return np.exp(self.log_h(y))

    def log_gamma_analytic(self, s: float) -> float:
        """Closed-form ``log ∫ y^(s-1) h(y) dy``."""
        raise NotImplementedError

    def taylor_ratio(self, k: int) -> float:
        """``h^(k)(0) / k!``."""
        raise NoTaylorExpansion(f"{self.kind} generator has no Taylor expansion at 0")

    def g_prime(self, x: float) -> float:
        """``-h'(x)/h(x)`` by a central difference of ``log h``."""
        step = 1e-6 * max(1.0, abs(x))
        lo, hi = self.support
        x0, x1 = x - step, x + step
        if x0 <= lo:
            x0 = x
        if x1 >= hi:
            x1 = x
        v = self.log_h(np.array([x0, x1], dtype=float))
        return float(-(v[1] - v[0]) / (x1 - x0))

    def radial_closed_form(self, s: float, rng: np.random.Generator, size: int):
        """Exact draws from ``y^(s-1) h(y)``, or ``None`` if no closed form."""
        return None

    def params(self) -> dict:
        return {}

    def decay_check(self, s: float) -> None:
        """Raise :class:`DivergentIntegral` if ``∫ y^(s-1) h`` cannot exist."""
        if not s > 0:
            raise DivergentIntegral(f"a m + k = {s} must be positive")

    # -- shared helpers ---------------------------------------------------

    def _validate(self) -> None:
        lo, hi = self.support
        if math.isfinite(hi):
            grid = lo + (hi - lo) * (np.arange(1, _CHECK_POINTS + 1) / (_CHECK_POINTS + 1))
        else:
            start = max(lo, 1e-6)
            grid = np.geomspace(start, start + 1e4, _CHECK_POINTS)
        vals = np.asarray(self.h_signed(grid), dtype=float)
        if np.any(vals < 0):
            bad = float(grid[np.argmax(vals < 0)])
            raise ParameterOutOfRange(f"{self.kind}: h is negative at y={bad:.6g} inside its support")
        if np.all(vals == 1.0):
            raise ParameterOutOfRange(f"{self.kind}: h must not be identically 1")

    def to_config(self) -> dict:
        return {"kind": self.kind, "params": self.params()}


# ---------------------------------------------------------------------------
# built-in generators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponential(ShapeGenerator):
    """``h(y) = exp(-y/2)``; the Wishart member of the family."""

    kind: ClassVar[str] = "exponential"
    has_analytic_gamma_k: ClassVar[bool] = True
    has_taylor: ClassVar[bool] = True

    def __post_init__(self):
        self._validate()

    def log_h(self, y):
        return -0.5 * np.asarray(y, dtype=float)

    def log_gamma_analytic(self, s):
        self.decay_check(s)
        return s * math.log(2.0) + math.lgamma(s)

    def taylor_ratio(self, k):
        return (-0.5) ** k / math.factorial(k)

    def g_prime(self, x):
        return 0.5

    def radial_closed_form(self, s, rng, size):
        return rng.gamma(s, 2.0, size)


@dataclass(frozen=True)
class TPrime(ShapeGenerator):
    """``h(y) = (1 + y)^(-(nm/2 + p))``; gives the matrix-variate t law.

    The exponent depends on the dimensions, so they are part of the
    generator.
    """

    p: float
    n: float
    m: int
    kind: ClassVar[str] = "t_prime"
    has_analytic_gamma_k: ClassVar[bool] = True
    has_taylor: ClassVar[bool] = True

    def __post_init__(self):
        if not self.p > 0:
            raise ParameterOutOfRange("t_prime needs p > 0")
        if not self.n > 0 or self.m < 1:
            raise ParameterOutOfRange("t_prime needs n > 0 and m >= 1")
        self._validate()

    @property
    def c(self) -> float:
        """Exponent ``nm/2 + p``."""
        return self.n * self.m / 2 + self.p

    def log_h(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(invalid="ignore"):
            return np.where(y >= 0, -self.c * np.log1p(np.maximum(y, 0.0)), -np.inf)

    def decay_check(self, s):
        super().decay_check(s)
        if not self.c - s > 0:
            raise DivergentIntegral(
                f"t_prime: ∫ y^({s:g}-1) (1+y)^(-{self.c:g}) dy diverges (needs s < {self.c:g})"
            )

    def log_gamma_analytic(self, s):
        self.decay_check(s)
        return float(special.betaln(s, self.c - s))

    def taylor_ratio(self, k):
        mag = math.lgamma(self.c + k) - math.lgamma(self.c) - math.lgamma(k + 1)
        return (-1) ** k * math.exp(mag)

    def g_prime(self, x):
        return self.c / (1.0 + x)

    def radial_closed_form(self, s, rng, size):
        self.decay_check(s)
        return rng.gamma(s, 1.0, size) / rng.gamma(self.c - s, 1.0, size)

    def params(self):
        return {"p": self.p, "n": self.n, "m": self.m}


@dataclass(frozen=True)
class Power(ShapeGenerator):
    """``h(y) = exp(-a y^b)``; the power-Wishart generator."""

    a: float
    b: float
    kind: ClassVar[str] = "power"
    has_analytic_gamma_k: ClassVar[bool] = True

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ParameterOutOfRange("power needs a > 0 and b > 0")
        self._validate()

    @property
    def has_taylor(self) -> bool:  # type: ignore[override]
        return float(self.b).is_integer()

    def log_h(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(invalid="ignore"):
            return np.where(y >= 0, -self.a * np.abs(y) ** self.b, -np.inf)

    def log_gamma_analytic(self, s):
        self.decay_check(s)
        t = s / self.b
        return math.lgamma(t) - math.log(self.b) - t * math.log(self.a)

    def taylor_ratio(self, k):
        if not self.has_taylor:
            raise NoTaylorExpansion(f"power generator with non-integer b={self.b} is not analytic at 0")
        b = int(self.b)
        if k % b:
            return 0.0
        j = k // b
        return (-self.a) ** j / math.factorial(j)

    def g_prime(self, x):
        return self.a * self.b * x ** (self.b - 1)

    def radial_closed_form(self, s, rng, size):
        u = rng.gamma(s / self.b, 1.0, size)
        return (u / self.a) ** (1.0 / self.b)

    def params(self):
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class Kummer(ShapeGenerator):
    """``h(y) = (a + y)^(-(nm-1)/2) exp(-b y)`` with ``a > 0``."""

    a: float
    b: float
    n: float
    m: int
    kind: ClassVar[str] = "kummer"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ParameterOutOfRange("kummer needs a > 0 and b > 0")
        self._validate()

    @property
    def nu(self) -> float:
        return (self.n * self.m - 1) / 2

    def log_h(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(y >= 0, -self.nu * np.log(self.a + y) - self.b * y, -np.inf)

    def g_prime(self, x):
        return self.nu / (self.a + x) + self.b

    def params(self):
        return {"a": self.a, "b": self.b, "n": self.n, "m": self.m}


@dataclass(frozen=True)
class Logistic(ShapeGenerator):
    """``h(y) = e^{-by} (1 - e^{-by})^{-2}``.

    ``a`` does not enter ``h``; it is kept for the printed normalizing
    constant of the logistic special case.
    """

    a: float
    b: float
    kind: ClassVar[str] = "logistic"
    has_analytic_gamma_k: ClassVar[bool] = True

    def __post_init__(self):
        if not self.b > 0:
            raise ParameterOutOfRange("logistic needs b > 0")
        self._validate()

    def log_h(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            val = -self.b * y - 2.0 * np.log(-np.expm1(-self.b * y))
        return np.where(y > 0, val, np.where(y == 0, np.inf, -np.inf))

    def decay_check(self, s):
        super().decay_check(s)
        if not s > 2:
            raise DivergentIntegral(f"logistic: ∫ y^({s:g}-1) h(y) dy diverges at 0 (needs s > 2)")

    def log_gamma_analytic(self, s):
        self.decay_check(s)
        return math.lgamma(s) - s * math.log(self.b) + math.log(float(special.zeta(s - 1)))

    def g_prime(self, x):
        bx = self.b * x
        if bx > 700.0:
            return self.b
        return self.b + 2.0 * self.b / math.expm1(bx)

    def params(self):
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class SinGaussian(ShapeGenerator):
    """``h(y) = exp(-a y^2) sin(b y)`` restricted to ``0 <= y <= π/b``."""

    a: float
    b: float
    kind: ClassVar[str] = "sin_gaussian"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ParameterOutOfRange("sin_gaussian needs a > 0 and b > 0")
        self._validate()

    @property
    def support(self):
        return (0.0, math.pi / self.b)

    def log_h(self, y):
        y = np.asarray(y, dtype=float)
        inside = (y > 0) & (y < math.pi / self.b)
        with np.errstate(invalid="ignore", divide="ignore"):
            val = -self.a * y * y + np.log(np.sin(self.b * y))
        return np.where(inside, val, -np.inf)

    def h_signed(self, y):
        y = np.asarray(y, dtype=float)
        return np.exp(-self.a * y * y) * np.sin(self.b * y)

    def g_prime(self, x):
        return 2.0 * self.a * x - self.b / math.tan(self.b * x)

    def params(self):
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class LogExp(ShapeGenerator):
    """``h(y) = e^{-y} log y`` on ``y > 1``, where it is positive."""

    kind: ClassVar[str] = "log_exp"

    def __post_init__(self):
        self._validate()

    @property
    def support(self):
        return (1.0, math.inf)

    def log_h(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            val = -y + np.log(np.log(y))
        return np.where(y > 1, val, -np.inf)

    def h_signed(self, y):
        y = np.asarray(y, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.exp(-y) * np.log(y)

    def g_prime(self, x):
        return 1.0 - 1.0 / (x * math.log(x))


def _pfq(a_list, b_list, z):
    return float(mpmath.hyper(list(a_list), list(b_list), z))


def _log_pfq(a_list, b_list, z) -> float:
    val = mpmath.hyper(list(a_list), list(b_list), z)
    return float(mpmath.log(val)) if val > 0 else -math.inf


# Beyond this point the factor exp(-y) makes h negligible (below e^-9000
# relative to its bulk), and the hypergeometric factor is not evaluated.
_HYPERGEOM_CUTOFF = 1e4


@dataclass(frozen=True)
class HypergeomExp(ShapeGenerator):
    """``h(y) = pFq(a; b; c y) exp(-y)`` with ``p < q``.

    ``h`` is treated as zero for ``y > 1e4``.
    """

    a_list: tuple[float, ...]
    b_list: tuple[float, ...]
    c: float
    kind: ClassVar[str] = "hypergeom_exp"
    has_analytic_gamma_k: ClassVar[bool] = True
    has_taylor: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "a_list", tuple(float(x) for x in self.a_list))
        object.__setattr__(self, "b_list", tuple(float(x) for x in self.b_list))
        if not len(self.a_list) < len(self.b_list):
            raise ParameterOutOfRange("hypergeom_exp needs p < q")
        if any(b <= 0 and float(b).is_integer() for b in self.b_list):
            raise ParameterOutOfRange("hypergeom_exp: denominator parameters must not be 0, -1, -2, ...")
        self._validate()

    def h_signed(self, y):
        y = np.asarray(y, dtype=float)
        flat = [_pfq(self.a_list, self.b_list, self.c * float(v)) for v in y.ravel()]
        return np.array(flat, dtype=float).reshape(y.shape) * np.exp(-y)

    def log_h(self, y):
        y = np.asarray(y, dtype=float)
        out = np.full(y.shape, -np.inf)
        flat_y = y.ravel()
        flat_out = out.reshape(-1)
        ok = (flat_y >= 0) & (flat_y <= _HYPERGEOM_CUTOFF)
        if len(self.a_list) == 0 and len(self.b_list) == 1 and np.any(ok):
            with np.errstate(all="ignore"):
                fast = np.log(special.hyp0f1(self.b_list[0], self.c * flat_y[ok]))
            idx = np.flatnonzero(ok)
            good = np.isfinite(fast)
            flat_out[idx[good]] = fast[good] - flat_y[idx[good]]
            ok[idx[good]] = False
        for i in np.flatnonzero(ok):
            flat_out[i] = _log_pfq(self.a_list, self.b_list, self.c * float(flat_y[i])) - flat_y[i]
        return out

    def log_gamma_analytic(self, s):
        self.decay_check(s)
        val = mpmath.hyper([s, *self.a_list], list(self.b_list), self.c)
        if not val > 0:
            raise DivergentIntegral("hypergeom_exp: non-positive master integral")
        return math.lgamma(s) + float(mpmath.log(val))

    def _series_coeff(self, j: int) -> float:
        num = 1.0
        for a in self.a_list:
            num *= float(mpmath.rf(a, j))
        for b in self.b_list:
            num /= float(mpmath.rf(b, j))
        return num * self.c**j / math.factorial(j)

    def taylor_ratio(self, k):
        return sum(self._series_coeff(j) * (-1.0) ** (k - j) / math.factorial(k - j) for j in range(k + 1))

    def g_prime(self, x):
        f = _pfq(self.a_list, self.b_list, self.c * x)
        ratio = np.prod(self.a_list) / np.prod(self.b_list) if self.a_list else 1.0 / np.prod(self.b_list)
        df = ratio * _pfq([a + 1 for a in self.a_list], [b + 1 for b in self.b_list], self.c * x)
        return 1.0 - self.c * df / f

    def params(self):
        return {"a_list": list(self.a_list), "b_list": list(self.b_list), "c": self.c}


@dataclass(frozen=True, eq=False)
class Custom(ShapeGenerator):
    """User-supplied generator.

    Parameters
    ----------
    name : str
        Registry name.
    h : callable
        Vectorized ``h(y)``; must be nonnegative on the support.
    decay : tuple
        ``("exp", eta)`` when ``h(y) <= C e^{-eta y}``, or ``("power", rho)``
        when ``h(y) <= C y^{-rho}``.  Used to reject parameter pairs for
        which the master integral cannot exist.
    support : tuple of float
        Interval on which ``h > 0``.
    taylor : callable, optional
        ``k -> h^(k)(0)/k!`` if known.
    """

    name: str
    h: Callable[[np.ndarray], np.ndarray]
    decay: tuple[str, float]
    support_: tuple[float, float] = (0.0, math.inf)
    taylor: Callable[[int], float] | None = None
    options: dict = field(default_factory=dict)
    kind: ClassVar[str] = "custom"

    def __post_init__(self):
        kind, rate = self.decay
        if kind not in ("exp", "power") or not rate > 0:
            raise ParameterOutOfRange("custom generator needs decay ('exp', eta>0) or ('power', rho>0)")
        self._validate()

    def __hash__(self):
        return id(self)

    @property
    def support(self):
        return self.support_

    @property
    def has_taylor(self) -> bool:  # type: ignore[override]
        return self.taylor is not None

    def h_signed(self, y):
        return np.asarray(self.h(np.asarray(y, dtype=float)), dtype=float)

    def log_h(self, y):
        y = np.asarray(y, dtype=float)
        lo, hi = self.support
        with np.errstate(invalid="ignore", divide="ignore"):
            val = np.log(self.h_signed(y))
        return np.where((y >= lo) & (y <= hi), val, -np.inf)

    def decay_check(self, s):
        super().decay_check(s)
        kind, rate = self.decay
        if kind == "power" and not s < rate:
            raise DivergentIntegral(f"custom generator {self.name}: power decay {rate} needs s < {rate}, got {s}")

    def taylor_ratio(self, k):
        if self.taylor is None:
            raise NoTaylorExpansion(f"custom generator {self.name} has no Taylor coefficients")
        return float(self.taylor(k))

    def params(self):
        return dict(self.options)

    def to_config(self):
        return {"kind": "custom", "name": self.name, "params": self.params()}


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def h_eval(gen: ShapeGenerator, y):
    """Evaluate ``h(y)``.

    Raises
    ------
    DomainError
        For negative ``y``.
    NonpositiveDensity
        For ``y`` outside the generator's support.
    """
    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0):
        raise DomainError("h is defined for y >= 0 only")
    lo, hi = gen.support
    inside = (arr >= lo) & (arr <= hi)
    if lo > 0:
        inside &= arr > lo
    if np.any(~inside):
        raise NonpositiveDensity(f"{gen.kind}: y outside the support [{lo}, {hi}]")
    with np.errstate(over="ignore"):
        out = np.exp(gen.log_h(arr))
    return float(out) if np.ndim(y) == 0 else out


@lru_cache(maxsize=8192)
def _gamma_cached(gen: ShapeGenerator, s: float, method: str) -> tuple[float, str, float]:
    gen.decay_check(s)
    if method != "quadrature" and gen.has_analytic_gamma_k:
        return gen.log_gamma_analytic(s), "analytic", 0.0
    if method == "analytic":
        raise DomainError(f"{gen.kind} generator has no closed-form master integral")
    lo, hi = gen.support

    def log_f(y):
        with np.errstate(divide="ignore"):
            return (s - 1.0) * np.log(y) + gen.log_h(y)

    res = log_integral(log_f, lo, hi)
    return res.log_value, "quadrature", res.rel_error


def gamma_k_ln(gen: ShapeGenerator, a: float, k: int, m: int, method: str = "auto") -> GammaK:
    """Log of ``γ_k(a) = ∫ y^(a m + k - 1) h(y) dy``.

    Parameters
    ----------
    method : {"auto", "analytic", "quadrature"}
        ``auto`` uses the closed form when the generator has one.

    Raises
    ------
    DivergentIntegral
        If the integral does not exist for these arguments.
    """
    s = float(a) * m + k
    value, used, err = _gamma_cached(gen, s, method)
    return GammaK(float(a), int(k), int(m), value, used, err)


def taylor_ratio(gen: ShapeGenerator, k: int) -> float:
    """``h^(k)(0) / k!``."""
    return gen.taylor_ratio(int(k))


def taylor_coeff(gen: ShapeGenerator, k: int) -> float:
    """Taylor coefficient ``h^(k)(0)``.

    Raises
    ------
    NoTaylorExpansion
        For generators that are not analytic at the origin.
    """
    return gen.taylor_ratio(int(k)) * math.factorial(int(k))


def g_prime(gen: ShapeGenerator, x: float) -> float:
    """``g'(x)`` where ``g = -log h``."""
    lo, hi = gen.support
    if not (lo < x < hi) and not (lo == 0 and x == 0):
        raise DomainError(f"{gen.kind}: g' requested at x={x} outside the support")
    if not np.isfinite(gen.log_h(np.array([x]))[0]):
        raise DomainError(f"{gen.kind}: h({x}) is not positive")
    return float(gen.g_prime(float(x)))


def radial_logpdf(gen: ShapeGenerator, n: float, m: int, y):
    """Log density of the trace ``tr X`` when ``Σ = I``: ``y^(nm/2-1) h(y) / γ_0(n/2)``."""
    s = n * m / 2
    log_g0 = gamma_k_ln(gen, n / 2, 0, m).value
    arr = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (s - 1.0) * np.log(arr) + gen.log_h(arr) - log_g0
    out = np.where(arr > 0, out, -np.inf)
    return float(out) if np.ndim(y) == 0 else out


# ---------------------------------------------------------------------------
# configuration and registry
# ---------------------------------------------------------------------------

_REGISTRY: dict[str, Callable[..., ShapeGenerator]] = {}


def register_generator(name: str, factory: Callable[..., ShapeGenerator]) -> None:
    """Make a custom generator available to configuration files and the CLI."""
    _REGISTRY[name] = factory


def registered_generators() -> list[str]:
    return sorted(_REGISTRY)


def _need(params: dict, key: str, kind: str):
    if key not in params:
        raise ParameterOutOfRange(f"generator {kind!r} needs parameter {key!r}")
    return params[key]


def generator_from_config(cfg: dict, n: float | None = None, m: int | None = None) -> ShapeGenerator:
    """Build a generator from ``{"kind": ..., "params": {...}}``.

    Kinds whose ``h`` depends on the dimensions (``t_prime``, ``kummer``)
    take ``n`` and ``m`` from the arguments unless given in ``params``.
    """
    kind = str(cfg.get("kind", "")).lower()
    params = dict(cfg.get("params", {}))
    if kind == "exponential":
        return Exponential()
    if kind in ("t_prime", "tprime", "matrix_t"):
        nn = params.get("n", n)
        mm = params.get("m", m)
        if nn is None or mm is None:
            raise ParameterOutOfRange("t_prime needs the degrees of freedom n and dimension m")
        return TPrime(float(_need(params, "p", kind)), float(nn), int(mm))
    if kind == "power":
        return Power(float(_need(params, "a", kind)), float(_need(params, "b", kind)))
    if kind == "kummer":
        nn = params.get("n", n)
        mm = params.get("m", m)
        if nn is None or mm is None:
            raise ParameterOutOfRange("kummer needs the degrees of freedom n and dimension m")
        return Kummer(float(_need(params, "a", kind)), float(_need(params, "b", kind)), float(nn), int(mm))
    if kind == "logistic":
        return Logistic(float(params.get("a", 1.0)), float(_need(params, "b", kind)))
    if kind in ("sin_gaussian", "sin"):
        return SinGaussian(float(_need(params, "a", kind)), float(_need(params, "b", kind)))
    if kind in ("log_exp", "log"):
        return LogExp()
    if kind in ("hypergeom_exp", "hypergeometric"):
        return HypergeomExp(
            tuple(params.get("a_list", ())), tuple(_need(params, "b_list", kind)), float(_need(params, "c", kind))
        )
    if kind == "custom":
        name = cfg.get("name") or params.pop("name", None)
        if name not in _REGISTRY:
            raise ParameterOutOfRange(f"no registered custom generator named {name!r}")
        return _REGISTRY[name](**params)
    raise ParameterOutOfRange(f"unknown generator kind {kind!r}")


def generator_to_config(gen: ShapeGenerator) -> dict:
    return gen.to_config()
