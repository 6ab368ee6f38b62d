"""Estimation of the scale matrix: maximum likelihood and conjugate Bayes.

Maximum likelihood
    With ``g = -log h`` the likelihood equations give ``Σ̂ = (2/n) g'(z) X``
    with ``z = tr Σ̂^{-1} X``.  Since ``Σ̂`` is a multiple of ``X``,
    ``z = nm / (2 g'(z))``, so the matrix problem reduces to the scalar
    equation ``2 z g'(z) = nm``.

Bayes with an inverse Wishart prior
    The prior ``Σ ~ W^{-1}_m(Ω, p)`` has density
    ``|Ω|^{p/2} / (2^{pm/2} Γ_m(p/2)) · |Σ|^{-(p+m+1)/2} etr(-Σ^{-1}Ω/2)``.
    Every Bayesian quantity is built from

        N_a(X) = ∫ |T|^{a-(m+1)/2} etr(-ΩT/2) h(tr TX) dT
               = Γ_m(a) |X|^{-a} Σ_k Σ_κ (a)_κ γ_k(a) C_κ(-ΩX^{-1}/2) / (k! Γ(am+k)),

    at ``a = (n+p)/2`` and ``a - 1``.  The series alternates and needs the
    spectral radius of ``ΩX^{-1}`` to be small enough for the generator at
    hand (below 1 for the Wishart generator).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .errors import DivergenceSuspected, DivergentIntegral, DomainError, NoRoot, ParameterOutOfRange
from .generators import ShapeGenerator, TPrime, gamma_k_ln
from .matrix import SpdMatrix, as_spd, mv_gamma_ln, product_eigvals
from .series import SeriesValue, Truncation, sum_layers
from .zonal import gen_pochhammer_ln, zonal_layer

__all__ = [
    "MleResult",
    "PriorIW",
    "mle_sigma",
    "bayes_marginal_ln",
    "posterior_logpdf",
    "posterior_log_normalizer",
    "bayes_det_sigma",
    "beta_product_check",
    "BetaProductReport",
]


# ---------------------------------------------------------------------------
# maximum likelihood
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MleResult:
    """Maximum likelihood estimate of ``Σ`` from one observation.

    Attributes
    ----------
    sigma_hat : SpdMatrix
    z : float
        Solved value of ``tr Σ̂^{-1} X``.
    iterations : int
        Function evaluations used by the root finder for the chosen root.
    residual : float
        ``|2 z g'(z) - nm|``.
    roots : tuple of float
        All roots found; the one maximizing the profile likelihood is used.
    """

    sigma_hat: SpdMatrix
    z: float
    iterations: int
    residual: float
    roots: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "sigma_hat": self.sigma_hat.array.tolist(),
            "z": self.z,
            "iterations": self.iterations,
            "residual": self.residual,
            "roots": list(self.roots),
        }


_Z_MIN = 1e-8
_Z_MAX = 1e12
_GRID_PER_DECADE = 200


def _profile_loglik(h: ShapeGenerator, nm: float, z: float) -> float:
    return 0.5 * nm * math.log(z) + float(h.log_h(np.array([z]))[0])


def mle_sigma(x, n: float, h: ShapeGenerator) -> MleResult:
    """Maximum likelihood estimate of ``Σ`` for ``X ~ WG_m(Σ, n, h)``.

    Solves ``2 z g'(z) = nm`` on a logarithmic grid over ``[1e-8, B]``,
    doubling ``B`` until a sign change appears or ``B > 1e12``, then
    refines every bracketed root with Brent's method.

    Raises
    ------
    NoRoot
        If the scalar equation has no root in the searched range.
    """
    x = as_spd(x)
    m = x.m
    if not n > m - 1:
        raise ParameterOutOfRange(f"n={n} must exceed m-1={m - 1}")
    nm = n * m
    lo_s, hi_s = h.support
    z_lo = max(_Z_MIN, lo_s * (1 + 1e-9) if lo_s > 0 else _Z_MIN)

    def phi(z: float) -> float:
        return 2.0 * z * h.g_prime(z) - nm

    b = 1e3
    roots: list[float] = []
    iters: dict[float, int] = {}
    while True:
        z_hi = min(b, hi_s * (1 - 1e-9)) if math.isfinite(hi_s) else b
        decades = math.log10(z_hi / z_lo)
        grid = np.geomspace(z_lo, z_hi, max(2, int(decades * _GRID_PER_DECADE) + 1))
        with np.errstate(all="ignore"):
            vals = np.array([phi(float(z)) for z in grid])
        ok = np.isfinite(vals)
        for i in range(len(grid) - 1):
            if not (ok[i] and ok[i + 1]):
                continue
            if vals[i] == 0:
                roots.append(float(grid[i]))
                iters[float(grid[i])] = 0
            elif vals[i] * vals[i + 1] < 0:
                r, info = optimize.brentq(
                    phi, grid[i], grid[i + 1], xtol=1e-300, rtol=4 * np.finfo(float).eps, full_output=True
                )
                roots.append(float(r))
                iters[float(r)] = info.function_calls
        if roots or z_hi >= _Z_MAX or (math.isfinite(hi_s) and z_hi >= hi_s * (1 - 1e-9)):
            break
        b *= 2.0
    if not roots:
        raise NoRoot(
            f"2 z g'(z) = {nm:g} has no root for z in [{z_lo:.1e}, {_Z_MAX:.0e}] ({h.kind} generator)"
        )
    best = max(roots, key=lambda r: _profile_loglik(h, nm, r))
    gp = h.g_prime(best)
    sigma_hat = as_spd((2.0 / n) * gp * x.array)
    return MleResult(sigma_hat, best, iters[best], abs(phi(best)), tuple(sorted(roots)))


# ---------------------------------------------------------------------------
# Bayes with inverse Wishart prior
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PriorIW:
    """Inverse Wishart prior ``W^{-1}_m(Ω, p)``."""

    omega: SpdMatrix
    p: float

    def __post_init__(self):
        object.__setattr__(self, "omega", as_spd(self.omega))
        if not self.p > self.omega.m - 1:
            raise ParameterOutOfRange(f"prior degrees of freedom p={self.p} must exceed m-1")

    @property
    def m(self) -> int:
        return self.omega.m

    def log_normalizer(self) -> float:
        m = self.m
        return 0.5 * self.p * self.omega.logdet - 0.5 * self.p * m * math.log(2.0) - mv_gamma_ln(self.p / 2, m)

    def logpdf(self, sigma) -> float:
        sigma = as_spd(sigma)
        return (
            self.log_normalizer()
            - 0.5 * (self.p + self.m + 1) * sigma.logdet
            - 0.5 * sigma.trace_solve(self.omega.array)
        )


def _bayes_series(x: SpdMatrix, h: ShapeGenerator, a: float, omega: SpdMatrix, trunc: Truncation, as_printed: bool):
    """``Σ_k Σ_κ (a)_κ γ_k(a) C_κ(-ΩX^{-1}/2) / (k! Γ(am+k))``, scaled so the k=0 term is 1."""
    m = x.m
    if not a > (m - 1) / 2:
        raise DomainError(f"series index a={a} must exceed (m-1)/2")
    eig = product_eigvals(omega.array, x.inv())
    eig = np.sort(np.real(eig))[::-1]
    try:
        g0 = gamma_k_ln(h, a, 0, m).value
    except DivergentIntegral as exc:
        raise DomainError(f"γ_0({a:g}) does not exist for the {h.kind} generator") from exc
    base = g0 - math.lgamma(a * m)

    def layer(k: int) -> float:
        if k == 0:
            return 1.0
        parts, vals = zonal_layer(k, eig)
        tot = 0.0
        for kap, cv in zip(parts, vals):
            lp, sp = gen_pochhammer_ln(a, kap)
            if sp:
                tot += sp * math.exp(lp) * cv
        if tot == 0:
            return 0.0
        try:
            g = gamma_k_ln(h, a, k, m).value
        except DivergentIntegral as exc:
            raise DivergenceSuspected(f"γ_{k}({a:g}) does not exist for the {h.kind} generator") from exc
        lfact = 0.0 if as_printed else math.lgamma(k + 1)
        sign = -1.0 if k % 2 else 1.0
        return sign * math.exp(g - math.lgamma(a * m + k) - lfact - k * math.log(2.0) - base) * tot

    res = sum_layers(layer, trunc, alternating=True, start=1 if as_printed else 0)
    if not res.value > 0:
        raise DomainError("Bayes normalizing series is not positive")
    return res, base


def _log_n(x: SpdMatrix, h, a, omega, trunc, as_printed=False) -> SeriesValue:
    res, base = _bayes_series(x, h, a, omega, trunc, as_printed)
    val = mv_gamma_ln(a, x.m) - a * x.logdet + base + math.log(res.value)
    return res.with_value(val)


def _trunc(trunc):
    return trunc if trunc is not None else Truncation.from_env()


def bayes_marginal_ln(x, n: float, h: ShapeGenerator, prior: PriorIW, trunc: Truncation | None = None,
                      as_printed: bool = False) -> SeriesValue:
    """Log marginal density ``log m(X)`` under the inverse Wishart prior.

    ``m(X) = k_{n,m} |X|^{(n-m-1)/2} · |Ω|^{p/2}/(2^{pm/2} Γ_m(p/2)) · N_{(n+p)/2}(X)``.

    With ``as_printed`` the prior constant ``|Ω|^{(p-m-1)/2} / 2^{p(p-m-1)/2}``
    is used, the ``1/k!`` factor is dropped and the sum starts at ``k = 1``.
    """
    x = as_spd(x)
    trunc = _trunc(trunc)
    m = x.m
    if prior.m != m:
        raise DomainError("prior and observation dimensions differ")
    log_k = math.lgamma(n * m / 2) - mv_gamma_ln(n / 2, m) - gamma_k_ln(h, n / 2, 0, m).value
    a = (n + prior.p) / 2
    ln = _log_n(x, h, a, prior.omega, trunc, as_printed)
    if as_printed:
        prior_c = (
            0.5 * (prior.p - m - 1) * prior.omega.logdet
            - 0.5 * prior.p * (prior.p - m - 1) * math.log(2.0)
            - mv_gamma_ln(prior.p / 2, m)
        )
    else:
        prior_c = prior.log_normalizer()
    val = log_k + 0.5 * (n - m - 1) * x.logdet + prior_c + ln.value
    return ln.with_value(val)


def posterior_log_normalizer(x, n: float, h: ShapeGenerator, prior: PriorIW, trunc: Truncation | None = None) -> SeriesValue:
    """``log N_{(n+p)/2}(X)``, the normalizer of the posterior kernel."""
    x = as_spd(x)
    return _log_n(x, h, (n + prior.p) / 2, prior.omega, _trunc(trunc))


def posterior_logpdf(sigma, x, n: float, h: ShapeGenerator, prior: PriorIW, trunc: Truncation | None = None,
                     normalizer: SeriesValue | None = None) -> float:
    """Log posterior density of ``Σ`` given one observation ``X``.

    ``-((n+p)/2 + (m+1)/2) log|Σ| - tr(Σ^{-1}Ω)/2 + log h(tr Σ^{-1}X) - log N_{(n+p)/2}(X)``.
    Pass a precomputed ``normalizer`` to evaluate many ``Σ`` cheaply.
    """
    sigma = as_spd(sigma)
    x = as_spd(x)
    m = x.m
    a = (n + prior.p) / 2
    if normalizer is None:
        normalizer = posterior_log_normalizer(x, n, h, prior, trunc)
    lh = float(h.log_h(np.array([sigma.trace_solve(x.array)]))[0])
    if not math.isfinite(lh):
        return -math.inf
    return (
        -(a + 0.5 * (m + 1)) * sigma.logdet
        - 0.5 * sigma.trace_solve(prior.omega.array)
        + lh
        - normalizer.value
    )


def bayes_det_sigma(x, n: float, h: ShapeGenerator, prior: PriorIW, trunc: Truncation | None = None,
                    as_printed: bool = False) -> SeriesValue:
    """Posterior mean of ``det Σ`` (Bayes estimate under squared error loss).

    ``E[det Σ | X] = N_{a-1}(X) / N_a(X)`` with ``a = (n+p)/2``, which is a
    ratio of the two series times ``det X``.  ``as_printed`` drops the
    ``1/k!`` factors and starts both sums at ``k = 1``.

    Raises
    ------
    DomainError
        If ``a - 1 <= (m-1)/2`` or ``γ_0(a-1)`` does not exist.
    """
    x = as_spd(x)
    trunc = _trunc(trunc)
    m = x.m
    a = (n + prior.p) / 2
    if not a - 1 > (m - 1) / 2:
        raise DomainError("posterior mean of det Σ needs (n+p)/2 - 1 > (m-1)/2")
    num = _log_n(x, h, a - 1, prior.omega, trunc, as_printed)
    den = _log_n(x, h, a, prior.omega, trunc, as_printed)
    val = math.exp(num.value - den.value)
    out = SeriesValue(
        val,
        max(num.terms_used, den.terms_used),
        max(num.last_layer_magnitude, den.last_layer_magnitude),
        num.converged and den.converged,
        {"numerator_terms": num.terms_used, "denominator_terms": den.terms_used},
    )
    return out


# ---------------------------------------------------------------------------
# beta-product identity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BetaProductReport:
    """Comparison of a beta-function product with a gamma ratio.

    Attributes
    ----------
    lhs_as_printed : float
        ``Π_{i=0}^{n+1} B(m/2, p + (i-2) m/2)`` (NaN for non-integer ``n``).
    rhs : float
        ``Γ_m(n/2) Γ(p) / Γ(nm/2 + p)``.
    integral : float
        Estimate of ``∫ |X|^{(n-m-1)/2} (1 + tr X)^{-(nm/2+p)} dX``.
    integral_stderr : float
        Standard error (0 for quadrature at ``m = 1``).
    method : str
    """

    m: int
    n: float
    p: float
    lhs_as_printed: float
    rhs: float
    integral: float
    integral_stderr: float
    method: str

    @property
    def lhs_matches_rhs(self) -> bool:
        return bool(np.isfinite(self.lhs_as_printed) and abs(self.lhs_as_printed / self.rhs - 1) <= 1e-10)

    @property
    def integral_z(self) -> float:
        if self.integral_stderr == 0:
            return 0.0 if self.integral == self.rhs else (self.integral - self.rhs) / (abs(self.rhs) * 1e-16)
        return (self.integral - self.rhs) / self.integral_stderr

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "p": self.p,
            "lhs_as_printed": self.lhs_as_printed,
            "rhs": self.rhs,
            "integral": self.integral,
            "integral_stderr": self.integral_stderr,
            "method": self.method,
            "lhs_matches_rhs": self.lhs_matches_rhs,
            "integral_relative_error": abs(self.integral / self.rhs - 1),
        }


def beta_product_check(m: int, n: float, p: float, n_samples: int = 200_000, seed: int = 0) -> BetaProductReport:
    """Evaluate both sides of the beta-product identity and the matrix-t integral.

    At ``m = 1`` the integral is computed by quadrature; for ``m >= 2`` by
    importance sampling (see :func:`wgd.sampling.importance_integral`).

    Raises
    ------
    DomainError
        If ``p <= m`` or some beta argument is not positive.
    """
    from scipy import integrate

    from .sampling import importance_integral, radial_mode

    if not p > m:
        raise DomainError("the identity is stated for p > m")
    if not n > m - 1:
        raise DomainError("n must exceed m - 1")
    if float(n).is_integer():
        args = [p + (i - 2) * m / 2 for i in range(int(n) + 2)]
        if min(args) <= 0:
            raise DomainError("a beta function argument is not positive")
        lhs = float(np.exp(sum(special.betaln(m / 2, b) for b in args)))
    else:
        lhs = math.nan
    rhs = math.exp(mv_gamma_ln(n / 2, m) + math.lgamma(p) - math.lgamma(n * m / 2 + p))
    c = n * m / 2 + p
    if m == 1:
        val, _ = integrate.quad(
            lambda t: math.exp((n / 2 - 1) * math.log(t) - c * math.log1p(t)), 0, np.inf, epsabs=0, epsrel=1e-13, limit=400
        )
        return BetaProductReport(m, n, p, lhs, rhs, val, 0.0, "quadrature")

    def log_f(xs):
        _, logdet = np.linalg.slogdet(xs)
        tr = np.trace(xs, axis1=1, axis2=2)
        return 0.5 * (n - m - 1) * logdet - c * np.log1p(tr)

    scale = radial_mode(TPrime(p, n, m), n, m)
    est = importance_integral(log_f, m, n, scale, n_samples, seed)
    return BetaProductReport(m, n, p, lhs, rhs, est.mean, est.stderr, "importance sampling")
