import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from conftest import random_spd
from wgd import (
    SPECIAL_CASES,
    DomainError,
    Exponential,
    GgdParams,
    HwgdParams,
    LogExp,
    NcwgdParams,
    ParameterOutOfRange,
    Power,
    SinGaussian,
    TPrime,
    Truncation,
    WgdParams,
    exp_wgd_log_normalizer,
    exp_wgd_logpdf,
    ggd_log_normalizer,
    ggd_logpdf,
    hwgd_logpdf,
    iggd_logpdf,
    iwgd_logpdf,
    ncwgd_logpdf,
    special_case,
    wgd_log_normalizer,
    wgd_logpdf,
    wishart_logpdf,
)

TIGHT = Truncation(max_degree=120, tol=1e-14)


def _mvg(a, m):
    return special.multigammaln(a, m)


def test_exponential_normalizer_is_wishart_constant():
    for n, m in [(3.0, 2), (5.5, 3), (2.0, 1)]:
        params = WgdParams(np.eye(m), n, Exponential())
        assert wgd_log_normalizer(params) == pytest.approx(-(n * m / 2) * math.log(2) - _mvg(n / 2, m), rel=1e-13)


def test_scalar_exponential_normalizer():
    assert wgd_log_normalizer(WgdParams([[1.0]], 2.0, Exponential())) == pytest.approx(math.log(0.5), rel=1e-14)


def test_matrix_t_normalizer():
    n, m, p = 3.0, 2, 2.5
    params = WgdParams(np.eye(m), n, TPrime(p, n, m))
    want = math.lgamma(n * m / 2 + p) - _mvg(n / 2, m) - math.lgamma(p)
    assert wgd_log_normalizer(params) == pytest.approx(want, rel=1e-13)


@given(m=st.integers(1, 4), seed=st.integers(0, 2**31 - 1), extra=st.floats(0.1, 10.0))
@settings(max_examples=50, deadline=None)
def test_wishart_reduction(m, seed, extra):
    rng = np.random.default_rng(seed)
    sigma, x = random_spd(rng, m), random_spd(rng, m)
    n = m - 1 + extra
    got = wgd_logpdf(WgdParams(sigma, n, Exponential()), x)
    assert got == pytest.approx(stats.wishart(df=n, scale=sigma).logpdf(x), abs=1e-10)
    assert wishart_logpdf(sigma, n, x) == pytest.approx(got, abs=1e-10)


def test_stack_evaluation_matches_loop(rng):
    sigma = random_spd(rng, 3)
    params = WgdParams(sigma, 4.5, TPrime(2.0, 4.5, 3))
    xs = np.stack([random_spd(rng, 3) for _ in range(6)])
    np.testing.assert_allclose(wgd_logpdf(params, xs), [wgd_logpdf(params, x) for x in xs], rtol=1e-13)


@pytest.mark.parametrize(
    "gen",
    [Exponential(), TPrime(2.0, 4.0, 1), Power(0.8, 1.7), SinGaussian(1.0, 1.0), LogExp()],
    ids=lambda g: g.kind,
)
def test_scalar_density_integrates_to_one(gen):
    sigma, n = 1.4, 4.0
    params = WgdParams([[sigma]], n, gen)
    lo, hi = (sigma * v for v in gen.support)
    total = integrate.quad(lambda t: math.exp(wgd_logpdf(params, [[t]])) if t > lo else 0.0, lo, hi,
                           epsabs=0, epsrel=1e-11, limit=400)[0]
    assert total == pytest.approx(1.0, abs=1e-8)


def test_negative_generator_value_rejected():
    # sin(y) e^{-y} turns negative past π, so the density is undefined there
    params = WgdParams([[1.0]], 3.0, SinGaussian(1.0, 1.0))
    with pytest.raises(DomainError):
        wgd_logpdf(params, [[5.0]])


def test_dimension_mismatch():
    params = WgdParams(np.eye(2), 3.0, Exponential())
    with pytest.raises(DomainError):
        wgd_logpdf(params, np.eye(3))


def test_degrees_of_freedom_bound():
    with pytest.raises(ParameterOutOfRange):
        WgdParams(np.eye(3), 1.5, Exponential())


def test_inverse_exponential_is_inverse_wishart(rng):
    sigma, y = random_spd(rng, 3), random_spd(rng, 3)
    n = 5.0
    got = iwgd_logpdf(WgdParams(sigma, n, Exponential()), y)
    want = stats.invwishart(df=n, scale=np.linalg.inv(sigma)).logpdf(y)
    assert got == pytest.approx(want, abs=1e-10)


def test_scalar_inverse_gamma():
    sigma, n, y = 1.3, 3.0, 0.7
    got = iwgd_logpdf(WgdParams([[sigma]], n, Exponential()), [[y]])
    assert got == pytest.approx(stats.invgamma(n / 2, scale=1 / (2 * sigma)).logpdf(y), rel=1e-12)


def test_gamma_generator_law_reduces_to_wgd(rng):
    sigma, x = random_spd(rng, 2), random_spd(rng, 2)
    n = 3.7
    gen = TPrime(3.0, n, 2)
    got = ggd_logpdf(GgdParams(sigma, n / 2, 0.5, gen), x)
    assert got == pytest.approx(wgd_logpdf(WgdParams(sigma, n, gen), x), abs=1e-12)


def test_scalar_gamma_generator_law_is_gamma():
    # h(2βt) = e^{-βt}: shape α, rate β/σ
    sigma, alpha, beta, z = 1.3, 2.2, 0.7, 1.9
    got = ggd_logpdf(GgdParams([[sigma]], alpha, beta, Exponential()), [[z]])
    assert got == pytest.approx(stats.gamma(alpha, scale=sigma / beta).logpdf(z), rel=1e-12)


def test_gamma_generator_printed_constant_lacks_scale_factor():
    p = GgdParams(np.eye(2), 2.0, 0.7, Exponential())
    diff = ggd_log_normalizer(p) - ggd_log_normalizer(p, as_printed=True)
    assert diff == pytest.approx(2 * 2.0 * math.log(1.4), rel=1e-13)


def test_inverse_gamma_generator_law_scalar():
    sigma, alpha, beta, w = 1.3, 2.2, 0.7, 0.6
    got = iggd_logpdf(GgdParams([[sigma]], alpha, beta, Exponential()), [[w]])
    assert got == pytest.approx(stats.invgamma(alpha, scale=beta / sigma).logpdf(w), rel=1e-12)


def test_special_case_names():
    assert set(SPECIAL_CASES) == {
        "matrix_t", "power_wishart", "kummer", "logistic", "sin_wishart", "log_wishart", "hypergeometric_wishart",
    }


def test_matrix_t_printed_constant_agrees():
    sc = special_case("matrix_t", np.eye(2), 3.0, p=2.0)
    assert sc.printed_agrees


def test_log_wishart_printed_constant_is_digamma_value():
    n, m = 3.0, 2
    sc = special_case("log_wishart", np.eye(m), n)
    s = n * m / 2
    assert sc.printed_log_normalizer == pytest.approx(-math.log(math.gamma(s) * special.digamma(s)), rel=1e-13)


@pytest.mark.parametrize(
    "name,kw",
    [("power_wishart", {"a": 1.0, "b": 2.0}), ("kummer", {"a": 1.0, "b": 2.0}), ("logistic", {"a": 1.0, "b": 1.0}),
     ("hypergeometric_wishart", {"b_list": [1.5], "c": 0.5})],
)
def test_printed_constants_omit_gamma_ratio(name, kw):
    # the printed constants equal 1/γ_0 and leave out Γ(nm/2)/Γ_m(n/2)
    n, m = 3.0, 2
    sc = special_case(name, np.eye(m), n, **kw)
    ratio = math.lgamma(n * m / 2) - _mvg(n / 2, m)
    assert sc.log_normalizer - sc.printed_log_normalizer == pytest.approx(ratio, rel=1e-9)
    assert not sc.printed_agrees


def test_sin_wishart_printed_constant_mismatch():
    sc = special_case("sin_wishart", np.eye(2), 3.0, a=1.0, b=1.0)
    assert sc.relative_mismatch == pytest.approx(0.2146, abs=1e-3)


def test_special_case_parameter_checks():
    with pytest.raises(ParameterOutOfRange):
        special_case("kummer", np.eye(2), 3.0, a=4.0, b=1.0)
    with pytest.raises(ParameterOutOfRange):
        special_case("power_wishart", np.eye(2), 3.0, a=1.0)
    with pytest.raises(ParameterOutOfRange):
        special_case("unknown", np.eye(2), 3.0)


def test_noncentral_exponential_normalizer():
    rng = np.random.default_rng(3)
    psi = random_spd(rng, 2) * 0.3
    n = 3.0
    p = NcwgdParams(WgdParams(np.eye(2), n, Exponential()), psi, TIGHT)
    want = -(_mvg(n / 2, 2) + n * math.log(2) + 0.5 * np.trace(psi))
    assert p.log_normalizer_series.value == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("gen", [Exponential(), Power(0.5, 1.5)], ids=["exponential", "power"])
def test_noncentral_scalar_normalization(gen):
    sigma, n, psi = 1.2, 3.0, 0.8
    p = NcwgdParams(WgdParams([[sigma]], n, gen), [[psi]], TIGHT)
    total = integrate.quad(lambda t: math.exp(ncwgd_logpdf(p, [[t]])), 0, 80.0, epsabs=0, epsrel=1e-10, limit=300)[0]
    assert total == pytest.approx(1.0, abs=1e-8)


def test_hypergeometric_form_gives_noncentral(rng):
    sigma, x = random_spd(rng, 2), random_spd(rng, 2)
    psi = 0.4 * random_spd(rng, 2)
    n = 3.5
    base = WgdParams(sigma, n, Exponential())
    nc = ncwgd_logpdf(NcwgdParams(base, psi, TIGHT), x)
    omega = 0.25 * psi @ np.linalg.inv(sigma)
    hw = hwgd_logpdf(HwgdParams(base, (), (n / 2,), omega, TIGHT), x)
    assert hw == pytest.approx(nc, abs=1e-10)


def _small_omega(rng, sigma):
    # keep the spectral radius of 2ΩΣ at 0.4 so the series converges quickly
    omega = -random_spd(rng, 2)
    rho = np.max(np.abs(np.linalg.eigvals(2 * omega @ sigma)))
    return omega * (0.4 / rho)


def test_exponentiated_exponential_normalizer(rng):
    sigma = random_spd(rng, 2) / 4
    omega = _small_omega(rng, sigma)
    n = 3.0
    got = exp_wgd_log_normalizer(sigma, n, Exponential(), omega, TIGHT).value
    det = np.linalg.det(np.eye(2) - 2 * omega @ sigma)
    want = -(_mvg(n / 2, 2) + n * math.log(2) - n / 2 * math.log(det))
    assert got == pytest.approx(want, rel=1e-11)


def test_exponentiated_exponential_density_is_wishart(rng):
    sigma = random_spd(rng, 2) / 4
    omega = _small_omega(rng, sigma)
    x = random_spd(rng, 2)
    n = 3.0
    # etr(ΩX - Σ^{-1}X/2) is a Wishart kernel with scale (Σ^{-1} - 2Ω)^{-1}
    scale = np.linalg.inv(np.linalg.inv(sigma) - 2 * omega)
    got = exp_wgd_logpdf(sigma, n, Exponential(), omega, x, TIGHT)
    assert got == pytest.approx(stats.wishart(df=n, scale=scale).logpdf(x), abs=1e-10)
