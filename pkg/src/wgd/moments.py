"""Moments, transforms and derived laws of the Wishart generator family.

Every truncated series is summed weight by weight with
:func:`wgd.series.sum_layers` and returned as a
:class:`~wgd.series.SeriesValue`.  Functions that accept ``as_printed``
evaluate an alternative literal form of the same quantity; the default is
the form that agrees with direct integration and Monte Carlo.

All series start at weight ``k = 0``.  Terms are built from

    ∫ |W|^{a-(m+1)/2} C_κ(WZ) h(tr W) dW = (a)_κ Γ_m(a) γ_k(a) C_κ(Z) / Γ(am+k),

where ``γ_k(a) = ∫ y^{am+k-1} h(y) dy``.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .distributions import WgdParams
from .errors import (
    DivergenceSuspected,
    DivergentIntegral,
    DomainError,
    SingularMatrix,
)
from .generators import ShapeGenerator, gamma_k_ln
from .matrix import SpdMatrix, as_spd, mv_gamma_ln, product_eigvals, sym_eigvals
from .series import SeriesValue, Truncation, sum_layers
from .zonal import gamma_m_partition_ln, gen_pochhammer_ln, zonal, zonal_identity, zonal_layer

__all__ = [
    "det_moment",
    "det_moment_ln",
    "log_det_expectation",
    "zonal_expectation",
    "cf_series",
    "wishart_cf_closed",
    "laplace_series",
    "eig_joint_logpdf",
    "prob_less_than",
    "lmax_cdf",
    "trace_pdf",
    "trace_pdf_exact_iso",
    "trace_moment",
    "ratio_b1_pdf",
    "ratio_b2_pdf",
]


def _lead(params: WgdParams) -> float:
    """``log Γ(nm/2) - log γ_0(n/2)``."""
    return math.lgamma(params.n * params.m / 2) - params.log_gamma0


def _gamma_k(h: ShapeGenerator, a: float, k: int, m: int) -> float:
    try:
        return gamma_k_ln(h, a, k, m).value
    except DivergentIntegral as exc:
        raise DivergenceSuspected(
            f"series coefficient γ_{k}({a:g}) does not exist for the {h.kind} generator: {exc}"
        ) from exc


def _trunc(trunc: Truncation | None) -> Truncation:
    return trunc if trunc is not None else Truncation.from_env()


def _poch_sum(a: float, eig, k: int) -> float:
    """``Σ_{κ ⊢ k} (a)_κ C_κ(Y)`` for a real spectrum."""
    parts, vals = zonal_layer(k, eig)
    total = 0.0
    for kap, cv in zip(parts, vals):
        lp, sp = gen_pochhammer_ln(a, kap)
        if sp:
            total += sp * math.exp(lp) * cv
    return total


def _is_isotropic(sigma: SpdMatrix, rtol: float = 1e-12) -> bool:
    ev = sigma.eigenvalues
    return bool(ev.max() - ev.min() <= rtol * ev.max())


# ---------------------------------------------------------------------------
# determinant and zonal moments
# ---------------------------------------------------------------------------


def det_moment_ln(params: WgdParams, r: float) -> float:
    """``log E[det(X)^r]``.

    Raises
    ------
    DomainError
        If ``r + n/2 <= (m-1)/2``.
    DivergentIntegral
        If ``γ_0(r + n/2)`` does not exist.
    """
    if r == 0:
        return 0.0
    n, m = params.n, params.m
    a = r + n / 2
    if not a > (m - 1) / 2:
        raise DomainError(f"det moment of order r={r} needs r + n/2 > (m-1)/2")
    return (
        math.lgamma(m * n / 2)
        + mv_gamma_ln(a, m)
        - math.lgamma(a * m)
        - mv_gamma_ln(n / 2, m)
        + gamma_k_ln(params.h, a, 0, m).value
        - params.log_gamma0
        + r * params.sigma.logdet
    )


def det_moment(params: WgdParams, r: float) -> float:
    """``E[det(X)^r]``; exactly 1 at ``r = 0``."""
    if r == 0:
        return 1.0
    return math.exp(det_moment_ln(params, r))


def log_det_expectation(params: WgdParams, r: float) -> float:
    """``log E[det(X)^r]``.

    This is the log of the moment, not ``E[log det(X)^r]``; the two differ
    by Jensen's inequality.
    """
    return det_moment_ln(params, r)


def zonal_expectation(params: WgdParams, kappa: Sequence[int], as_printed: bool = False) -> float:
    """``E[C_κ(X)]``.

    The value is ``Γ(nm/2) (n/2)_κ γ_k(n/2) C_κ(Σ) / (γ_0(n/2) Γ(nm/2+k))``.
    With ``as_printed`` the factor ``(n/2)_κ γ_k(n/2) / Γ(nm/2+k)`` is
    replaced by ``1/Γ_m(n/2)``.
    """
    kappa = tuple(int(x) for x in kappa if x)
    n, m = params.n, params.m
    k = sum(kappa)
    c = zonal(kappa, params.sigma.eigenvalues)
    if as_printed:
        return math.exp(_lead(params) - mv_gamma_ln(n / 2, m)) * c
    if k == 0:
        return 1.0
    lp, sp = gen_pochhammer_ln(n / 2, kappa)
    g = gamma_k_ln(params.h, n / 2, k, m).value
    return sp * math.exp(_lead(params) + lp + g - math.lgamma(n * m / 2 + k)) * c


# ---------------------------------------------------------------------------
# characteristic function and Laplace transform
# ---------------------------------------------------------------------------


def cf_series(params: WgdParams, t, trunc: Truncation | None = None) -> SeriesValue:
    """Characteristic function ``E[etr(iTX)]`` as a zonal series.

    ``Σ_k Σ_κ Γ(nm/2) (n/2)_κ γ_k(n/2) C_κ(iTΣ) / (k! Γ(nm/2+k) γ_0(n/2))``,
    with ``C_κ(iTΣ) = i^k C_κ(TΣ)``.  Converges when the spectral radius of
    ``TΣ`` is small relative to the decay of ``γ_k``; for the Wishart case
    it needs ``‖2TΣ‖ < 1``.
    """
    trunc = _trunc(trunc)
    n, m = params.n, params.m
    t = np.asarray(t, dtype=float)
    if t.shape != (m, m):
        raise DomainError(f"T must be {m}x{m}")
    eig = product_eigvals(t, params.sigma)
    if np.iscomplexobj(eig):
        eig = eig.astype(complex)
    lead = _lead(params)

    def layer(k: int) -> complex:
        if k == 0:
            return 1.0 + 0.0j
        s = _poch_sum(n / 2, eig, k) if not np.iscomplexobj(eig) else _poch_sum_complex(n / 2, eig, k)
        if s == 0:
            return 0.0j
        g = _gamma_k(params.h, n / 2, k, m)
        return (1j**k) * math.exp(lead + g - math.lgamma(k + 1) - math.lgamma(n * m / 2 + k)) * s

    return sum_layers(layer, trunc)


def _poch_sum_complex(a: float, eig, k: int) -> complex:
    parts, vals = zonal_layer(k, eig)
    total = 0.0j
    for kap, cv in zip(parts, vals):
        lp, sp = gen_pochhammer_ln(a, kap)
        if sp:
            total += sp * math.exp(lp) * cv
    return total


def wishart_cf_closed(sigma, n: float, t) -> complex:
    """``det(I - 2iTΣ)^{-n/2}`` for the classical Wishart law.

    The power is taken factor by factor over the eigenvalues ``μ`` of
    ``TΣ`` as ``exp(-(n/2) Σ log(1 - 2iμ))`` with principal logarithms,
    which is the branch continuous from ``T = 0``.

    Raises
    ------
    SingularMatrix
        If ``I - 2iTΣ`` is singular.
    """
    sigma = as_spd(sigma)
    t = np.asarray(t, dtype=float)
    mu = np.linalg.eigvals(t @ sigma.array)
    factors = 1.0 - 2j * mu
    if np.min(np.abs(factors)) < 1e-14:
        raise SingularMatrix("I - 2iTΣ is singular")
    return complex(np.exp(-0.5 * n * np.sum(np.log(factors))))


def laplace_series(params: WgdParams, s: float, trunc: Truncation | None = None, as_printed: bool = False) -> SeriesValue:
    """Laplace transform ``E[etr(-sX)]`` as a series in ``1/s``.

    ``Γ(nm/2) |Σ|^{-n/2} / γ_0(n/2) · Σ_k h_k s^{-(nm/2+k)} Σ_κ (n/2)_κ C_κ(Σ^{-1})``
    with ``h_k = h^{(k)}(0)/k!``.  With ``as_printed`` the coefficient
    ``h_k`` is replaced by ``1/k!``.  Needs a generator that is analytic at
    the origin and ``s`` large enough for the series to converge.
    """
    if not s > 0:
        raise DomainError("s must be positive")
    trunc = _trunc(trunc)
    n, m = params.n, params.m
    eig_inv = 1.0 / params.sigma.eigenvalues
    pre = _lead(params) - 0.5 * n * params.sigma.logdet - 0.5 * n * m * math.log(s)

    def layer(k: int) -> float:
        hk = 1.0 / math.factorial(k) if as_printed else params.h.taylor_ratio(k)
        if hk == 0:
            return 0.0
        ps = 1.0 if k == 0 else _poch_sum(n / 2, eig_inv, k)
        return hk * math.exp(pre - k * math.log(s)) * ps

    return sum_layers(layer, trunc)


# ---------------------------------------------------------------------------
# eigenvalues and P(X < A)
# ---------------------------------------------------------------------------


def eig_joint_logpdf(
    params: WgdParams, lam, trunc: Truncation | None = None, as_printed: bool = False
) -> SeriesValue:
    """Log joint density of the ordered eigenvalues ``λ_1 > ... > λ_m > 0``.

    ``π^{m²/2} Γ(nm/2) |Σ|^{-n/2} / (Γ_m(m/2) Γ_m(n/2) γ_0(n/2))
    · Δ(Λ) |Λ|^{(n-m-1)/2} Σ_k h_k Σ_κ C_κ(Σ^{-1}) C_κ(Λ) / C_κ(I)``.

    The returned :class:`SeriesValue` carries the log density; it is
    ``-inf`` when two eigenvalues coincide.  ``as_printed`` starts the
    series at ``k = 1``.

    Raises
    ------
    NoTaylorExpansion
        For generators without Taylor coefficients at the origin.
    DomainError
        If ``λ`` is not non-increasing and positive, or the series is not
        positive.
    """
    trunc = _trunc(trunc)
    n, m = params.n, params.m
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.shape[0] != m:
        raise DomainError(f"need {m} eigenvalues")
    if np.any(lam <= 0):
        raise DomainError("eigenvalues must be positive")
    if np.any(np.diff(lam) > 0):
        raise DomainError("eigenvalues must be given in descending order")
    params.h.taylor_ratio(0)
    if np.any(np.diff(lam) == 0):
        return SeriesValue(-math.inf, 0, 0.0, True)
    eig_inv = 1.0 / params.sigma.eigenvalues

    def layer(k: int) -> float:
        hk = params.h.taylor_ratio(k)
        if hk == 0:
            return 0.0
        if k == 0:
            return hk
        pa, va = zonal_layer(k, eig_inv)
        _, vb = zonal_layer(k, lam)
        return hk * sum(a * b / zonal_identity(kap, m) for kap, a, b in zip(pa, va, vb))

    res = sum_layers(layer, trunc, start=1 if as_printed else 0)
    if not res.value > 0:
        raise DomainError("eigenvalue series is not positive; increase the truncation or check λ")
    logdelta = sum(math.log(lam[i] - lam[j]) for i in range(m) for j in range(i + 1, m))
    pre = (
        0.5 * m * m * math.log(math.pi)
        + _lead(params)
        - 0.5 * n * params.sigma.logdet
        - mv_gamma_ln(m / 2, m)
        - mv_gamma_ln(n / 2, m)
    )
    val = pre + logdelta + 0.5 * (n - m - 1) * float(np.sum(np.log(lam))) + math.log(res.value)
    return res.with_value(val)


def prob_less_than(params: WgdParams, a, trunc: Truncation | None = None, as_printed: bool = False) -> SeriesValue:
    """``P(X < A)`` in the Loewner order.

    ``Γ(nm/2)/γ_0(n/2) · Γ_m((m+1)/2)/Γ_m(n/2+(m+1)/2) · det(Σ^{-1}A)^{n/2}
    · Σ_k h_k Σ_κ (n/2)_κ / (n/2+(m+1)/2)_κ · C_κ(A^{1/2} Σ^{-1} A^{1/2})``.

    With ``as_printed`` the determinant factor is dropped, the series
    starts at ``k = 1`` and uses partition-indexed multivariate gammas for
    all three gamma factors.  Values outside ``[0, 1]`` by more than the
    tolerance are clamped and flagged in the diagnostics.
    """
    trunc = _trunc(trunc)
    n, m = params.n, params.m
    a = as_spd(a)
    if a.m != m:
        raise DomainError("A has the wrong dimension")
    params.h.taylor_ratio(0)
    eig = np.sort(np.real(product_eigvals(a, params.sigma.inv())))[::-1]
    c = (m + 1) / 2
    if as_printed:
        pre = _lead(params) - mv_gamma_ln(n / 2, m) - 0.5 * n * params.sigma.logdet

        def layer(k: int) -> float:
            hk = params.h.taylor_ratio(k)
            if hk == 0:
                return 0.0
            parts, vals = zonal_layer(k, eig)
            tot = 0.0
            for kap, cv in zip(parts, vals):
                lg = (
                    gamma_m_partition_ln(n / 2, kap, m)
                    + gamma_m_partition_ln(c, kap, m)
                    - gamma_m_partition_ln(n / 2 + c, kap, m)
                )
                tot += math.exp(lg) * cv
            return hk * math.exp(pre) * tot

        res = sum_layers(layer, trunc, start=1)
    else:
        pre = (
            _lead(params)
            + mv_gamma_ln(c, m)
            - mv_gamma_ln(n / 2 + c, m)
            + 0.5 * n * float(np.sum(np.log(eig)))
        )

        def layer(k: int) -> float:
            hk = params.h.taylor_ratio(k)
            if hk == 0:
                return 0.0
            if k == 0:
                return hk * math.exp(pre)
            parts, vals = zonal_layer(k, eig)
            tot = 0.0
            for kap, cv in zip(parts, vals):
                l1, _ = gen_pochhammer_ln(n / 2, kap)
                l2, _ = gen_pochhammer_ln(n / 2 + c, kap)
                tot += math.exp(l1 - l2) * cv
            return hk * math.exp(pre) * tot

        res = sum_layers(layer, trunc)
    v = float(res.value)
    if v < 0 or v > 1:
        excess = max(-v, v - 1)
        if excess > trunc.tol * max(1.0, abs(v)):
            return res.with_value(min(max(v, 0.0), 1.0), clamped=True, raw_value=v)
        return res.with_value(min(max(v, 0.0), 1.0))
    return res


def lmax_cdf(params: WgdParams, a: float, trunc: Truncation | None = None, as_printed: bool = False) -> SeriesValue:
    """CDF of the largest eigenvalue, ``P(λ_max < a) = P(X < aI)``."""
    if not a > 0:
        raise DomainError("a must be positive")
    return prob_less_than(params, a * np.eye(params.m), trunc, as_printed)


# ---------------------------------------------------------------------------
# trace law
# ---------------------------------------------------------------------------


def trace_pdf(params: WgdParams, y: float, trunc: Truncation | None = None, as_printed: bool = False) -> SeriesValue:
    """Density of ``tr X`` at ``y`` as a power series in ``y``.

    ``Γ(nm/2) |Σ|^{-n/2} / γ_0(n/2) · Σ_k h_k y^{nm/2+k-1} / Γ(nm/2+k) Σ_κ (n/2)_κ C_κ(Σ^{-1})``.

    At ``Σ = I`` this collapses to ``y^{nm/2-1} h(y) / γ_0(n/2)``.  With
    ``as_printed`` the coefficient ``h_k`` is replaced by ``1/k!`` and the
    whole sum is multiplied by ``e^{-y}``; that form depends on ``h`` only
    through ``γ_0``.  Terms can cancel heavily for large ``y`` when ``h``
    alternates in sign; :func:`trace_pdf_exact_iso` is exact for
    isotropic ``Σ``.
    """
    if not y > 0:
        raise DomainError("y must be positive")
    trunc = _trunc(trunc)
    n, m = params.n, params.m
    s = n * m / 2
    eig_inv = 1.0 / params.sigma.eigenvalues
    pre = _lead(params) - 0.5 * n * params.sigma.logdet + (s - 1) * math.log(y)
    if as_printed:
        pre -= y

    def layer(k: int) -> float:
        hk = 1.0 / math.factorial(k) if as_printed else params.h.taylor_ratio(k)
        if hk == 0:
            return 0.0
        ps = 1.0 if k == 0 else _poch_sum(n / 2, eig_inv, k)
        return math.copysign(1.0, hk) * math.exp(pre + math.log(abs(hk)) + k * math.log(y) - math.lgamma(s + k)) * ps

    return sum_layers(layer, trunc)


def trace_pdf_exact_iso(sigma2: float, n: float, m: int, h: ShapeGenerator, y):
    """Exact density of ``tr X`` for ``Σ = σ² I``.

    ``y^{nm/2-1} h(y/σ²) / ((σ²)^{nm/2} γ_0(n/2))``, vectorized over ``y``.
    """
    if not sigma2 > 0:
        raise DomainError("σ² must be positive")
    s = n * m / 2
    log_g0 = gamma_k_ln(h, n / 2, 0, m).value
    arr = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logv = (s - 1) * np.log(arr) + np.asarray(h.log_h(arr / sigma2)) - s * math.log(sigma2) - log_g0
        out = np.where(arr > 0, np.exp(logv), 0.0)
    return float(out) if np.ndim(y) == 0 else out


def trace_moment(params: WgdParams, r: float, trunc: Truncation | None = None, as_printed: bool = False) -> SeriesValue:
    """``E[(tr X)^r]``.

    For integer ``r`` the value is the finite sum
    ``Γ(nm/2) γ_r(n/2) / (γ_0(n/2) Γ(nm/2+r)) Σ_{κ ⊢ r} (n/2)_κ C_κ(Σ)``.
    For non-integer ``r`` only isotropic ``Σ = σ² I`` is supported, where
    the moment is ``σ^{2r} ∫ y^{nm/2+r-1} h / γ_0(n/2)``.

    With ``as_printed`` the series
    ``Γ(nm/2) |Σ|^{-n/2}/γ_0 Σ_k Σ_κ (n/2)_κ Γ(nm/2+k+r) C_κ(Σ^{-1}) / (k! Γ(nm/2+k))``
    is summed under ``trunc`` instead.

    Raises
    ------
    DomainError
        Non-integer ``r`` with non-isotropic ``Σ``.
    DivergentIntegral
        If the moment does not exist.
    """
    n, m = params.n, params.m
    s = n * m / 2
    if r == 0:
        return SeriesValue(1.0, 1, 0.0, True)
    if as_printed:
        trunc = _trunc(trunc)
        eig_inv = 1.0 / params.sigma.eigenvalues
        pre = _lead(params) - 0.5 * n * params.sigma.logdet

        def layer(k: int) -> float:
            ps = 1.0 if k == 0 else _poch_sum(n / 2, eig_inv, k)
            return math.exp(pre + math.lgamma(s + k + r) - math.lgamma(k + 1) - math.lgamma(s + k)) * ps

        return sum_layers(layer, trunc)
    if float(r).is_integer() and r > 0:
        k = int(r)
        g = gamma_k_ln(params.h, n / 2, k, m).value
        ps = _poch_sum(n / 2, params.sigma.eigenvalues, k)
        val = math.exp(_lead(params) + g - math.lgamma(s + k)) * ps
        return SeriesValue(val, 1, 0.0, True, {"method": "finite zonal sum"})
    if not _is_isotropic(params.sigma):
        raise DomainError("non-integer trace moments are only available for Σ = σ² I")
    if not s + r > 0:
        raise DomainError("moment order too negative")
    sigma2 = float(params.sigma.eigenvalues[0])
    g = gamma_k_ln(params.h, n / 2 + r / m, 0, m).value
    val = math.exp(r * math.log(sigma2) + g - params.log_gamma0)
    return SeriesValue(val, 1, 0.0, True, {"method": "radial integral"})


# ---------------------------------------------------------------------------
# ratios with an independent Wishart matrix
# ---------------------------------------------------------------------------


def _ratio_prefactor(h: ShapeGenerator, n: float, m: int, p: float, alpha: float, beta: float) -> float:
    log_k = math.lgamma(n * m / 2) - mv_gamma_ln(n / 2, m) - gamma_k_ln(h, n / 2, 0, m).value
    return (
        log_k
        + mv_gamma_ln((n + p) / 2, m)
        - 0.5 * p * m * math.log(2.0)
        - mv_gamma_ln(p / 2, m)
        + 0.5 * p * m * math.log(alpha / beta)
    )


def _ratio_series(h: ShapeGenerator, n: float, m: int, p: float, alpha: float, beta: float, eig, trunc) -> SeriesValue:
    a = (n + p) / 2
    ratio = alpha / (2 * beta)

    def layer(k: int) -> float:
        if k == 0:
            return math.exp(_gamma_k(h, a, 0, m) - math.lgamma(a * m))
        ps = _poch_sum(a, eig, k)
        if ps == 0:
            return 0.0
        g = _gamma_k(h, a, k, m)
        sign = -1.0 if k % 2 else 1.0
        return sign * math.exp(k * math.log(ratio) + g - math.lgamma(k + 1) - math.lgamma(a * m + k)) * ps

    return sum_layers(layer, trunc, alternating=True)


def _check_ratio_args(n, m, p, alpha, beta):
    if not (alpha > 0 and beta > 0):
        raise DomainError("scale factors alpha and beta must be positive")
    if not p > m - 1:
        raise DomainError("Wishart degrees of freedom p must exceed m - 1")
    if not n > m - 1:
        raise DomainError("n must exceed m - 1")


def ratio_b1_pdf(
    h: ShapeGenerator,
    n: float,
    p: float,
    b1,
    alpha: float = 1.0,
    beta: float = 1.0,
    trunc: Truncation | None = None,
) -> SeriesValue:
    """Density of ``B_1 = X^{-1/2} Y X^{-1/2}``.

    ``X ~ WG_m(αΣ, n, h)`` and ``Y ~ W_m(βΣ, p)`` are independent; the law
    does not depend on ``Σ``.  The series alternates in ``(-α/(2β))^k``;
    at ``m = 1`` with the Wishart generator and ``α = β`` it converges for
    ``b < 1``.
    """
    trunc = _trunc(trunc)
    b1 = as_spd(b1)
    m = b1.m
    _check_ratio_args(n, m, p, alpha, beta)
    res = _ratio_series(h, n, m, p, alpha, beta, b1.eigenvalues, trunc)
    val = math.exp(_ratio_prefactor(h, n, m, p, alpha, beta) + (p / 2 - (m + 1) / 2) * b1.logdet) * res.value
    return res.with_value(val)


def ratio_b2_pdf(
    h: ShapeGenerator,
    n: float,
    p: float,
    b2,
    alpha: float = 1.0,
    beta: float = 1.0,
    trunc: Truncation | None = None,
    as_printed: bool = False,
) -> SeriesValue:
    """Density of ``B_2 = (X+Y)^{-1/2} X (X+Y)^{-1/2}`` on ``0 < B_2 < I``.

    The determinant factor is ``|B_2|^{-p/2-(m+1)/2} |I-B_2|^{p/2-(m+1)/2}``
    and the series runs over ``C_κ(B_2^{-1} - I)``.  ``as_printed`` uses
    the exponent ``-n/2-(m+1)/2`` on ``|B_2|``.  At ``m = 1`` with the
    Wishart generator the series converges for ``b > α/(α+β)``.
    """
    trunc = _trunc(trunc)
    b2 = as_spd(b2)
    m = b2.m
    _check_ratio_args(n, m, p, alpha, beta)
    lam = b2.eigenvalues
    if np.any(lam >= 1):
        raise DomainError("B_2 must satisfy B_2 < I")
    eig = np.sort(1.0 / lam - 1.0)[::-1]
    res = _ratio_series(h, n, m, p, alpha, beta, eig, trunc)
    expo = -(n if as_printed else p) / 2 - (m + 1) / 2
    logdet_c = float(np.sum(np.log1p(-lam)))
    val = math.exp(
        _ratio_prefactor(h, n, m, p, alpha, beta) + expo * b2.logdet + (p / 2 - (m + 1) / 2) * logdet_c
    ) * res.value
    return res.with_value(val)
