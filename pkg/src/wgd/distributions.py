"""Densities of the Wishart generator family and its relatives.

For ``X ~ WG_m(Σ, n, h)`` the density is

    f(X) = k |Σ|^{-n/2} |X|^{(n-m-1)/2} h(tr Σ^{-1} X),
    1/k  = Γ_m(n/2) γ_0(n/2) / Γ(nm/2).

All densities are evaluated on the log scale.  Functions that accept a
single matrix also accept a stack of shape ``(N, m, m)`` and then return an
array; stacked inputs are assumed symmetric and are only checked for a
positive determinant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import mpmath
import numpy as np
from scipy import special

from .errors import DomainError, ParameterOutOfRange
from .generators import (
    Exponential,
    HypergeomExp,
    Kummer,
    LogExp,
    Logistic,
    Power,
    ShapeGenerator,
    SinGaussian,
    TPrime,
    gamma_k_ln,
)
from .matrix import SpdMatrix, as_spd, mv_gamma_ln, product_eigvals
from .series import SeriesValue, Truncation, sum_layers
from .zonal import gen_pochhammer_ln, zonal_layer

__all__ = [
    "WgdParams",
    "GgdParams",
    "NcwgdParams",
    "HwgdParams",
    "SpecialCase",
    "SPECIAL_CASES",
    "wgd_log_normalizer",
    "wgd_logpdf",
    "iwgd_logpdf",
    "ggd_log_normalizer",
    "ggd_logpdf",
    "iggd_logpdf",
    "special_case",
    "ncwgd_log_normalizer",
    "ncwgd_logpdf",
    "hwgd_log_normalizer",
    "hwgd_logpdf",
    "exp_wgd_log_normalizer",
    "exp_wgd_logpdf",
    "wishart_logpdf",
    "stack_terms",
]

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# parameter records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WgdParams:
    """Parameters ``(Σ, n, h)`` of one WGD member.

    ``n`` may be any real number above ``m - 1``.  Construction fails with
    :class:`~wgd.errors.DivergentIntegral` when ``γ_0(n/2)`` does not exist.
    """

    sigma: SpdMatrix
    n: float
    h: ShapeGenerator

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_spd(self.sigma))
        object.__setattr__(self, "n", float(self.n))
        if not self.n > self.m - 1:
            raise ParameterOutOfRange(f"degrees of freedom n={self.n} must exceed m-1={self.m - 1}")
        gamma_k_ln(self.h, self.n / 2, 0, self.m)

    @property
    def m(self) -> int:
        return self.sigma.m

    @cached_property
    def log_gamma0(self) -> float:
        return gamma_k_ln(self.h, self.n / 2, 0, self.m).value

    @cached_property
    def log_normalizer(self) -> float:
        return math.lgamma(self.n * self.m / 2) - mv_gamma_ln(self.n / 2, self.m) - self.log_gamma0


@dataclass(frozen=True)
class GgdParams:
    """Parameters ``(Σ, α, β, h)`` of the matrix gamma generator law."""

    sigma: SpdMatrix
    alpha: float
    beta: float
    h: ShapeGenerator

    def __post_init__(self):
        object.__setattr__(self, "sigma", as_spd(self.sigma))
        if not self.alpha > (self.m - 1) / 2:
            raise ParameterOutOfRange(f"alpha={self.alpha} must exceed (m-1)/2")
        if not self.beta > 0:
            raise ParameterOutOfRange("beta must be positive")
        gamma_k_ln(self.h, self.alpha, 0, self.m)

    @property
    def m(self) -> int:
        return self.sigma.m


@dataclass(frozen=True)
class NcwgdParams:
    """Non-central WGD: base parameters plus a non-centrality matrix ``Ψ``."""

    base: WgdParams
    psi: np.ndarray
    trunc: Truncation = field(default_factory=Truncation)

    def __post_init__(self):
        psi = np.array(self.psi, dtype=float)
        if psi.shape != (self.base.m, self.base.m):
            raise ParameterOutOfRange("psi has the wrong shape")
        if not np.allclose(psi, psi.T, atol=1e-12 * max(1.0, np.abs(psi).max())):
            raise ParameterOutOfRange("psi must be symmetric")
        if np.linalg.eigvalsh(0.5 * (psi + psi.T)).min() < -1e-12 * max(1.0, np.abs(psi).max()):
            raise ParameterOutOfRange("psi must be positive semi-definite")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @cached_property
    def log_normalizer_series(self) -> SeriesValue:
        return ncwgd_log_normalizer(self)


@dataclass(frozen=True)
class HwgdParams:
    """Hypergeometric WGD: ``pFq(a; b; ΩX)`` multiplies the WGD kernel."""

    base: WgdParams
    a_list: tuple[float, ...]
    b_list: tuple[float, ...]
    omega: np.ndarray
    trunc: Truncation = field(default_factory=Truncation)

    def __post_init__(self):
        object.__setattr__(self, "a_list", tuple(float(a) for a in self.a_list))
        object.__setattr__(self, "b_list", tuple(float(b) for b in self.b_list))
        if len(self.a_list) > len(self.b_list):
            raise ParameterOutOfRange("hypergeometric WGD needs p <= q")
        om = np.array(self.omega, dtype=float)
        if om.shape != (self.base.m, self.base.m):
            raise ParameterOutOfRange("omega has the wrong shape")
        om.setflags(write=False)
        object.__setattr__(self, "omega", om)

    @cached_property
    def log_normalizer_series(self) -> SeriesValue:
        return hwgd_log_normalizer(self)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def stack_terms(sigma: SpdMatrix, x) -> tuple[np.ndarray, np.ndarray]:
    """``log det X`` and ``tr Σ^{-1} X`` for a matrix or a stack of matrices."""
    if isinstance(x, SpdMatrix):
        return np.array(x.logdet), np.array(sigma.trace_solve(x.array))
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2:
        xs = as_spd(arr)
        return np.array(xs.logdet), np.array(sigma.trace_solve(xs.array))
    if arr.ndim != 3 or arr.shape[1:] != (sigma.m, sigma.m):
        raise DomainError(f"expected shape (N, {sigma.m}, {sigma.m}), got {arr.shape}")
    sign, logdet = np.linalg.slogdet(arr)
    if np.any(sign <= 0):
        raise DomainError("a matrix in the stack is not positive definite")
    traces = np.einsum("ij,nji->n", sigma.inverse, arr)
    return logdet, traces


def _check_dim(sigma: SpdMatrix, x) -> None:
    m = x.m if isinstance(x, SpdMatrix) else np.shape(x)[-1]
    if m != sigma.m:
        raise DomainError(f"dimension mismatch: Σ is {sigma.m}x{sigma.m}, argument is {m}x{m}")


def _log_h_at(h: ShapeGenerator, t, scalar: bool):
    lh = np.asarray(h.log_h(t), dtype=float)
    if scalar:
        if np.isnan(lh) or (lh == -np.inf and np.any(h.h_signed(np.asarray(t, dtype=float)) < 0)):
            raise DomainError(f"{h.kind}: h is negative at trace value {float(t):.6g}")
        return float(lh)
    return lh


def _finish(val, x):
    scalar = isinstance(x, SpdMatrix) or np.ndim(x) == 2
    return float(val) if scalar else np.asarray(val, dtype=float)


# ---------------------------------------------------------------------------
# WGD and inverted WGD
# ---------------------------------------------------------------------------


def wgd_log_normalizer(params: WgdParams) -> float:
    """``log k_{n,m} = log Γ(nm/2) - log Γ_m(n/2) - log γ_0(n/2)``."""
    return params.log_normalizer


def wgd_logpdf(params: WgdParams, x) -> float | np.ndarray:
    """Log density of ``WG_m(Σ, n, h)`` at ``X`` (or at each matrix of a stack).

    Raises
    ------
    DomainError
        If ``h`` vanishes at ``tr Σ^{-1} X`` (e.g. outside a bounded support).
    """
    sigma, n, m = params.sigma, params.n, params.m
    _check_dim(sigma, x)
    logdet, t = stack_terms(sigma, x)
    scalar = isinstance(x, SpdMatrix) or np.ndim(x) == 2
    lh = _log_h_at(params.h, t, scalar)
    val = params.log_normalizer - 0.5 * n * sigma.logdet + 0.5 * (n - m - 1) * logdet + lh
    return _finish(val, x)


def iwgd_logpdf(params: WgdParams, y) -> float | np.ndarray:
    """Log density of ``Y = X^{-1}`` for ``X ~ WG_m(Σ, n, h)``."""
    sigma, n, m = params.sigma, params.n, params.m
    _check_dim(sigma, y)
    if isinstance(y, SpdMatrix):
        yinv = y.inv()
    elif np.ndim(y) == 2:
        yinv = as_spd(y).inv()
    else:
        yinv = np.linalg.inv(np.asarray(y, dtype=float))
    logdet_inv, t = stack_terms(sigma, yinv)
    scalar = isinstance(y, SpdMatrix) or np.ndim(y) == 2
    lh = _log_h_at(params.h, t, scalar)
    val = params.log_normalizer - 0.5 * n * sigma.logdet + (0.5 * n + 0.5 * (m + 1)) * logdet_inv + lh
    return _finish(val, y)


def wishart_logpdf(sigma, n: float, x) -> float:
    """Classical Wishart log density, written out independently of ``h``."""
    sigma = as_spd(sigma)
    x = as_spd(x)
    m = sigma.m
    return (
        0.5 * (n - m - 1) * x.logdet
        - 0.5 * sigma.trace_solve(x.array)
        - 0.5 * n * m * math.log(2.0)
        - 0.5 * n * sigma.logdet
        - mv_gamma_ln(n / 2, m)
    )


# ---------------------------------------------------------------------------
# gamma generator law
# ---------------------------------------------------------------------------


def ggd_log_normalizer(params: GgdParams, as_printed: bool = False) -> float:
    """Log normalizing constant of the gamma generator law.

    The density carries ``h(2β tr Σ^{-1} Z)``, so a proper density needs the
    factor ``(2β)^{mα}`` on top of ``Γ(mα) / (γ_0(α) Γ_m(α))``.  With
    ``as_printed`` that factor is left out.
    """
    a, m = params.alpha, params.m
    val = math.lgamma(m * a) - mv_gamma_ln(a, m) - gamma_k_ln(params.h, a, 0, m).value
    if not as_printed:
        val += m * a * math.log(2.0 * params.beta)
    return val


def ggd_logpdf(params: GgdParams, z, as_printed: bool = False):
    """Log density of ``GG_m(Σ, α, β, h)``."""
    sigma, a, m = params.sigma, params.alpha, params.m
    _check_dim(sigma, z)
    logdet, t = stack_terms(sigma, z)
    scalar = isinstance(z, SpdMatrix) or np.ndim(z) == 2
    lh = _log_h_at(params.h, 2.0 * params.beta * t, scalar)
    val = ggd_log_normalizer(params, as_printed) - a * sigma.logdet + (a - 0.5 * (m + 1)) * logdet + lh
    return _finish(val, z)


def iggd_logpdf(params: GgdParams, w, as_printed: bool = False):
    """Log density of ``W = Z^{-1}`` for ``Z ~ GG_m(Σ, α, β, h)``."""
    sigma, a, m = params.sigma, params.alpha, params.m
    _check_dim(sigma, w)
    winv = as_spd(w).inv() if not isinstance(w, SpdMatrix) else w.inv()
    logdet_inv, t = stack_terms(sigma, winv)
    lh = _log_h_at(params.h, 2.0 * params.beta * t, True)
    val = ggd_log_normalizer(params, as_printed) - a * sigma.logdet + (a + 0.5 * (m + 1)) * logdet_inv + lh
    return float(val)


# ---------------------------------------------------------------------------
# special cases with printed normalizing constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpecialCase:
    """A named member of the family with two normalizing constants.

    Attributes
    ----------
    name : str
    params : WgdParams
    log_normalizer : float
        ``log k`` with ``γ_0`` computed by quadrature (authoritative).
    printed_log_normalizer : float
        The closed-form constant as printed for this case (diagnostic).
    relative_mismatch : float
        ``|exp(printed - quadrature) - 1|``.
    """

    name: str
    params: WgdParams
    log_normalizer: float
    printed_log_normalizer: float
    relative_mismatch: float

    @property
    def printed_agrees(self) -> bool:
        return self.relative_mismatch <= 1e-6

    def logpdf(self, x):
        """Log density using the quadrature normalizing constant."""
        p = self.params
        logdet, t = stack_terms(p.sigma, x)
        scalar = isinstance(x, SpdMatrix) or np.ndim(x) == 2
        lh = _log_h_at(p.h, t, scalar)
        val = self.log_normalizer - 0.5 * p.n * p.sigma.logdet + 0.5 * (p.n - p.m - 1) * logdet + lh
        return _finish(val, x)


def _printed_matrix_t(n, m, p):
    return math.lgamma(n * m / 2 + p) - mv_gamma_ln(n / 2, m) - math.lgamma(p)


def _printed_power(n, m, a, b):
    t = n * m / (2 * b)
    return math.log(b) + t * math.log(a) - math.lgamma(t)


def _printed_kummer(n, m, a, b):
    nm = n * m
    d = float(mpmath.pcfd(1 - nm, math.sqrt(2 * a * b)))
    if not d > 0:
        return math.nan
    return (1 - nm) / 2 * math.log(2.0) + 0.5 * math.log(b) - math.lgamma(nm / 2) - a * b / 2 - math.log(d)


def _printed_logistic(n, m, a, b):
    s = n * m / 2
    c = float(mpmath.polylog(s - 1, a))
    if not c > 0:
        return math.nan
    return math.log(a) + s * math.log(b) - math.log(c) - math.lgamma(s)


def _printed_sin(n, m, a, b):
    nm = n * m
    f = float(mpmath.hyp1f1(1 - nm / 4, 1.5, b * b / (4 * a)))
    if not f > 0:
        return math.nan
    return (
        math.log(2.0)
        + (nm + 2) / 4 * math.log(a)
        + b * b / (4 * a)
        - math.log(b)
        - math.lgamma((nm + 2) / 4)
        - math.log(f)
    )


def _printed_log(n, m):
    s = n * m / 2
    val = math.gamma(s) * float(special.digamma(s))
    return -math.log(val) if val > 0 else math.nan


def _printed_hypergeometric(n, m, a_list, b_list, c):
    s = n * m / 2
    f = float(mpmath.hyper([s, *a_list], list(b_list), c))
    if not f > 0:
        return math.nan
    return -math.lgamma(s) - math.log(f)


SPECIAL_CASES = (
    "matrix_t",
    "power_wishart",
    "kummer",
    "logistic",
    "sin_wishart",
    "log_wishart",
    "hypergeometric_wishart",
)


def special_case(name: str, sigma, n: float, **kw) -> SpecialCase:
    """Build one of the named special cases.

    Parameters
    ----------
    name : str
        One of :data:`SPECIAL_CASES`.
    sigma : array_like
        Scale matrix.
    n : float
        Degrees of freedom.
    **kw
        Case parameters: ``p`` (matrix_t); ``a, b`` (power_wishart,
        kummer, logistic, sin_wishart); ``a_list, b_list, c``
        (hypergeometric_wishart).

    Raises
    ------
    ParameterOutOfRange
        When a case constraint fails.
    """
    sigma = as_spd(sigma)
    m = sigma.m

    def need(key):
        if key not in kw:
            raise ParameterOutOfRange(f"{name} needs parameter {key!r}")
        return kw[key]

    if name == "matrix_t":
        p = float(need("p"))
        if not p > 0:
            raise ParameterOutOfRange("matrix_t needs p > 0")
        h: ShapeGenerator = TPrime(p, n, m)
        printed = _printed_matrix_t(n, m, p)
    elif name == "power_wishart":
        a, b = float(need("a")), float(need("b"))
        if not (a > 0 and b > 0):
            raise ParameterOutOfRange("power_wishart needs a, b > 0")
        h = Power(a, b)
        printed = _printed_power(n, m, a, b)
    elif name == "kummer":
        a, b = float(need("a")), float(need("b"))
        if not (0 < a < math.pi and b > 0):
            raise ParameterOutOfRange("kummer needs 0 < a < pi and b > 0")
        h = Kummer(a, b, n, m)
        printed = _printed_kummer(n, m, a, b)
    elif name == "logistic":
        a, b = float(need("a")), float(need("b"))
        if not (0 < a <= 1 and b > 0):
            raise ParameterOutOfRange("logistic needs 0 < a <= 1 and b > 0")
        h = Logistic(a, b)
        printed = _printed_logistic(n, m, a, b)
    elif name == "sin_wishart":
        a, b = float(need("a")), float(need("b"))
        if not (a > 0 and b > 0):
            raise ParameterOutOfRange("sin_wishart needs a > 0 and b > 0")
        h = SinGaussian(a, b)
        printed = _printed_sin(n, m, a, b)
    elif name == "log_wishart":
        h = LogExp()
        printed = _printed_log(n, m)
    elif name == "hypergeometric_wishart":
        a_list = tuple(float(x) for x in kw.get("a_list", ()))
        b_list = tuple(float(x) for x in need("b_list"))
        c = float(need("c"))
        if not len(a_list) < len(b_list):
            raise ParameterOutOfRange("hypergeometric_wishart needs p < q")
        h = HypergeomExp(a_list, b_list, c)
        printed = _printed_hypergeometric(n, m, a_list, b_list, c)
    else:
        raise ParameterOutOfRange(f"unknown special case {name!r}; choose from {', '.join(SPECIAL_CASES)}")

    params = WgdParams(sigma, n, h)
    g0 = gamma_k_ln(h, n / 2, 0, m, method="quadrature").value
    log_k = math.lgamma(n * m / 2) - mv_gamma_ln(n / 2, m) - g0
    mismatch = abs(math.expm1(printed - log_k)) if math.isfinite(printed) else math.inf
    if mismatch > 1e-6:
        log.info("%s: printed normalizing constant differs from quadrature by %.3g (relative)", name, mismatch)
    return SpecialCase(name, params, log_k, printed, mismatch)


# ---------------------------------------------------------------------------
# hypergeometric, non-central and exponentiated WGD
# ---------------------------------------------------------------------------


def _log_coeff_ratio(a_list: Sequence[float], b_list: Sequence[float], kappa) -> tuple[float, int]:
    logc, sign = 0.0, 1
    for a in a_list:
        la, sa = gen_pochhammer_ln(a, kappa)
        logc += la
        sign *= sa
    for b in b_list:
        lb, sb = gen_pochhammer_ln(b, kappa)
        logc -= lb
        sign *= sb
    return logc, sign


def _hwgd_series(base: WgdParams, a_list, b_list, eig_omega_sigma, trunc: Truncation) -> SeriesValue:
    r"""``Σ_k Σ_κ [(a)_κ/(b)_κ] (n/2)_κ γ_k(n/2) C_κ(ΩΣ) / (k! Γ(nm/2+k))``."""
    n, m, h = base.n, base.m, base.h
    half_n = n / 2

    def layer(k: int):
        if k == 0:
            return 1.0 / math.exp(math.lgamma(n * m / 2) - base.log_gamma0)
        lg = gamma_k_ln(h, half_n, k, m).value - math.lgamma(n * m / 2 + k) - math.lgamma(k + 1)
        parts, vals = zonal_layer(k, eig_omega_sigma)
        total = 0.0
        for kap, cv in zip(parts, vals):
            if cv == 0:
                continue
            lc, sign = _log_coeff_ratio(a_list, b_list, kap)
            lp, sp = gen_pochhammer_ln(half_n, kap)
            sign *= sp
            if sign == 0:
                continue
            total += sign * math.exp(lc + lp + lg) * cv
        return total

    # rescale by Γ(nm/2)/γ_0 so that the k = 0 term is 1
    scale = math.exp(math.lgamma(n * m / 2) - base.log_gamma0)
    res = sum_layers(lambda k: layer(k) * scale, trunc)
    val = res.value.real if isinstance(res.value, complex) else res.value
    return res.with_value(float(val))


def hwgd_log_normalizer(params: HwgdParams) -> SeriesValue:
    """``log l_{n,m}`` of the hypergeometric WGD, as a truncated series.

    ``1/l = Γ_m(n/2) Σ_k Σ_κ [(a)_κ/(b)_κ] (n/2)_κ γ_k(n/2) C_κ(ΩΣ) / (k! Γ(nm/2+k))``.
    """
    base = params.base
    eig = product_eigvals(params.omega, base.sigma)
    res = _hwgd_series(base, params.a_list, params.b_list, eig, params.trunc)
    if not res.value > 0:
        raise DomainError("normalizing series is not positive")
    # series was scaled by Γ(nm/2)/γ_0, i.e. res = S * Γ(nm/2)/γ_0
    log_inv = mv_gamma_ln(base.n / 2, base.m) + math.log(res.value) - (math.lgamma(base.n * base.m / 2) - base.log_gamma0)
    return res.with_value(-log_inv)


def hwgd_logpdf(params: HwgdParams, x) -> float:
    """Log density of the hypergeometric WGD (truncated series)."""
    from .zonal import hypergeom_eigen

    base = params.base
    xs = as_spd(x)
    _check_dim(base.sigma, xs)
    norm = params.log_normalizer_series
    f = hypergeom_eigen(params.a_list, params.b_list, product_eigvals(params.omega, xs), params.trunc)
    if not f.value > 0:
        raise DomainError("pFq(ΩX) is not positive; density undefined")
    t = base.sigma.trace_solve(xs.array)
    lh = _log_h_at(base.h, t, True)
    return float(
        norm.value - 0.5 * base.n * base.sigma.logdet + 0.5 * (base.n - base.m - 1) * xs.logdet + math.log(f.value) + lh
    )


def ncwgd_log_normalizer(params: NcwgdParams) -> SeriesValue:
    """``log l_{n,m}`` of the non-central WGD.

    ``1/l = Γ_m(n/2) Σ_k (1/4)^k γ_k(n/2) / (k! Γ(nm/2+k)) Σ_κ C_κ(Ψ)``.
    """
    base = params.base
    n, m = base.n, base.m
    eig_psi = np.linalg.eigvalsh(params.psi)[::-1]
    lead = math.lgamma(n * m / 2) - base.log_gamma0

    def layer(k: int) -> float:
        if k == 0:
            return 1.0
        parts, vals = zonal_layer(k, eig_psi)
        zsum = float(np.sum(vals))
        if zsum == 0:
            return 0.0
        lg = gamma_k_ln(base.h, n / 2, k, m).value - math.lgamma(n * m / 2 + k) - math.lgamma(k + 1)
        return math.exp(lg + lead - k * math.log(4.0)) * zsum

    res = sum_layers(layer, params.trunc)
    log_inv = mv_gamma_ln(n / 2, m) - lead + math.log(res.value)
    return res.with_value(-log_inv)


def ncwgd_logpdf(params: NcwgdParams, x) -> float:
    """Log density of the non-central WGD (truncated series)."""
    from .zonal import hypergeom_eigen

    base = params.base
    xs = as_spd(x)
    _check_dim(base.sigma, xs)
    norm = params.log_normalizer_series
    arg = 0.25 * params.psi @ base.sigma.inverse
    f = hypergeom_eigen((), (base.n / 2,), product_eigvals(arg, xs.array), params.trunc)
    t = base.sigma.trace_solve(xs.array)
    lh = _log_h_at(base.h, t, True)
    return float(
        norm.value - 0.5 * base.n * base.sigma.logdet + 0.5 * (base.n - base.m - 1) * xs.logdet + math.log(f.value) + lh
    )


def exp_wgd_log_normalizer(sigma, n: float, h: ShapeGenerator, omega, trunc: Truncation | None = None) -> SeriesValue:
    """``log l`` of the exponentiated WGD, whose density carries ``etr(ΩX)``."""
    base = WgdParams(sigma, n, h)
    eig = product_eigvals(np.asarray(omega, dtype=float), base.sigma)
    res = _hwgd_series(base, (), (), eig, trunc or Truncation())
    if not res.value > 0:
        raise DomainError("normalizing series is not positive")
    log_inv = mv_gamma_ln(base.n / 2, base.m) + math.log(res.value) - (math.lgamma(base.n * base.m / 2) - base.log_gamma0)
    return res.with_value(-log_inv)


def exp_wgd_logpdf(sigma, n: float, h: ShapeGenerator, omega, x, trunc: Truncation | None = None) -> float:
    """Log density proportional to ``|X|^{(n-m-1)/2} etr(ΩX) h(tr Σ^{-1}X)``."""
    base = WgdParams(sigma, n, h)
    xs = as_spd(x)
    _check_dim(base.sigma, xs)
    norm = exp_wgd_log_normalizer(base.sigma, n, h, omega, trunc)
    omega = np.asarray(omega, dtype=float)
    t = base.sigma.trace_solve(xs.array)
    lh = _log_h_at(h, t, True)
    return float(
        norm.value
        - 0.5 * base.n * base.sigma.logdet
        + 0.5 * (base.n - base.m - 1) * xs.logdet
        + float(np.trace(omega @ xs.array))
        + lh
    )
