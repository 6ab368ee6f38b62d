import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from conftest import random_spd
from wgd import (
    DomainError,
    Exponential,
    NoTaylorExpansion,
    Power,
    SinGaussian,
    TPrime,
    Truncation,
    WgdParams,
    cf_series,
    det_moment,
    det_moment_ln,
    eig_joint_logpdf,
    laplace_series,
    lmax_cdf,
    log_det_expectation,
    prob_less_than,
    ratio_b1_pdf,
    ratio_b2_pdf,
    sample_wishart,
    trace_moment,
    trace_pdf,
    trace_pdf_exact_iso,
    wishart_cf_closed,
    zonal,
    zonal_expectation,
)

TIGHT = Truncation(max_degree=150, tol=1e-14)
SIGMA = np.array([[1.2, 0.4], [0.4, 0.9]])


def _wishart(sigma=SIGMA, n=3.5):
    return WgdParams(sigma, n, Exponential())


# determinant moments


@pytest.mark.parametrize("r", [-0.5, 0.5, 1.0, 2.0, 3.7])
def test_wishart_det_moment(r):
    n, m = 3.5, 2
    want = m * r * math.log(2) + r * math.log(np.linalg.det(SIGMA)) + special.multigammaln(n / 2 + r, m) - special.multigammaln(n / 2, m)
    assert det_moment_ln(_wishart(), r) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("r", [-1.0, 0.5, 1.5])
def test_scalar_tprime_det_moment_is_beta_prime(r):
    sigma, n, p = 1.7, 4.0, 3.0
    params = WgdParams([[sigma]], n, TPrime(p, n, 1))
    want = sigma**r * math.exp(special.betaln(n / 2 + r, p - r) - special.betaln(n / 2, p))
    assert det_moment(params, r) == pytest.approx(want, rel=1e-11)


def test_det_moment_order_zero_and_alias():
    assert det_moment(_wishart(), 0) == 1.0
    assert log_det_expectation(_wishart(), 1.0) == det_moment_ln(_wishart(), 1.0)


def test_det_moment_domain():
    with pytest.raises(DomainError):
        det_moment_ln(_wishart(), -1.5)


# zonal expectations


@pytest.mark.parametrize("kappa", [(1,), (2,), (1, 1), (2, 1), (3,)])
def test_wishart_zonal_expectation(kappa):
    # for the Wishart law E[C_κ(X)] = 2^k (n/2)_κ C_κ(Σ)
    n = 3.5
    k = sum(kappa)
    poch = math.prod(math.gamma(n / 2 - i / 2 + kj) / math.gamma(n / 2 - i / 2) for i, kj in enumerate(kappa))
    want = 2**k * poch * zonal(kappa, np.linalg.eigvalsh(SIGMA))
    assert zonal_expectation(_wishart(), kappa) == pytest.approx(want, rel=1e-11)


def test_zonal_expectation_mean_is_linear():
    params = WgdParams(SIGMA, 3.5, TPrime(4.0, 3.5, 2))
    want = det_moment(params, 0)  # sanity: weight zero is 1
    assert zonal_expectation(params, ()) == want
    mean_trace = trace_moment(params, 1).value
    assert zonal_expectation(params, (1,)) == pytest.approx(mean_trace, rel=1e-12)


def test_zonal_expectation_printed_form_differs():
    a = zonal_expectation(_wishart(), (2,))
    b = zonal_expectation(_wishart(), (2,), as_printed=True)
    assert abs(a - b) > 1e-3 * abs(a)


# characteristic function and Laplace transform


def test_wishart_characteristic_function(rng):
    t = rng.standard_normal((2, 2))
    t = t + t.T
    t *= 0.2 / np.max(np.abs(np.linalg.eigvals(2 * t @ SIGMA)))
    got = cf_series(_wishart(), t, TIGHT)
    assert got.converged
    assert abs(got.value - wishart_cf_closed(SIGMA, 3.5, t)) < 1e-12


def test_characteristic_function_at_zero():
    assert cf_series(_wishart(), np.zeros((2, 2))).value == pytest.approx(1.0)


def test_characteristic_function_shape_check():
    with pytest.raises(DomainError):
        cf_series(_wishart(), np.zeros((3, 3)))


def test_scalar_tprime_characteristic_function():
    # E[e^{itX}] for X = σ·BetaPrime(n/2, p) by quadrature
    sigma, n, p, t = 1.0, 3.0, 40.0, 0.15
    params = WgdParams([[sigma]], n, TPrime(p, n, 1))
    dist = stats.betaprime(n / 2, p, scale=sigma)
    re = integrate.quad(lambda x: math.cos(t * x) * dist.pdf(x), 0, np.inf, epsabs=1e-14, limit=400)[0]
    im = integrate.quad(lambda x: math.sin(t * x) * dist.pdf(x), 0, np.inf, epsabs=1e-14, limit=400)[0]
    got = cf_series(params, [[t]], TIGHT).value
    assert abs(got - complex(re, im)) < 1e-10


@pytest.mark.parametrize("s", [2.0, 5.0])
def test_wishart_laplace_transform(s):
    sigma = np.array([[1.0, 0.2], [0.2, 0.7]])
    n = 3.0
    want = np.linalg.det(np.eye(2) + 2 * s * sigma) ** (-n / 2)
    got = laplace_series(_wishart(sigma, n), s, TIGHT)
    assert got.value == pytest.approx(want, rel=1e-11)


def test_laplace_printed_form_differs():
    sigma = np.eye(2)
    a = laplace_series(_wishart(sigma, 3.0), 4.0, TIGHT).value
    b = laplace_series(_wishart(sigma, 3.0), 4.0, TIGHT, as_printed=True).value
    assert abs(a - b) > 1e-3 * a


def test_laplace_needs_positive_argument():
    with pytest.raises(DomainError):
        laplace_series(_wishart(), 0.0)


def test_laplace_needs_taylor_coefficients():
    params = WgdParams(np.eye(2), 3.0, SinGaussian(1.0, 1.0))
    with pytest.raises(NoTaylorExpansion):
        laplace_series(params, 3.0)


# eigenvalue density and P(X < A)


def test_wishart_eigenvalue_density_at_identity():
    n, m = 4.0, 2
    lam = np.array([3.1, 0.8])
    want = (
        m * m / 2 * math.log(math.pi)
        - n * m / 2 * math.log(2)
        - special.multigammaln(m / 2, m)
        - special.multigammaln(n / 2, m)
        + math.log(lam[0] - lam[1])
        + (n - m - 1) / 2 * np.sum(np.log(lam))
        - lam.sum() / 2
    )
    got = eig_joint_logpdf(_wishart(np.eye(2), n), lam, TIGHT)
    assert got.value == pytest.approx(want, rel=1e-11)


@pytest.mark.parametrize("lam", [(1.5, 0.4), (2.6, 1.1), (0.9, 0.2)])
def test_wishart_eigenvalue_density_by_rotation_average(lam):
    # for m = 2 the average of etr(-Σ^{-1} H Λ H'/2) over the orthogonal group
    # is an average over the rotation angle
    n, m = 4.0, 2
    sigma = np.array([[0.6, 0.1], [0.1, 0.4]])
    sinv = np.linalg.inv(sigma)
    lam = np.array(lam)

    def integrand(theta):
        c, s = math.cos(theta), math.sin(theta)
        h = np.array([[c, -s], [s, c]])
        return math.exp(-0.5 * np.trace(sinv @ h @ np.diag(lam) @ h.T))

    avg = integrate.quad(integrand, 0, 2 * math.pi, epsabs=0, epsrel=1e-13)[0] / (2 * math.pi)
    want = (
        m * m / 2 * math.log(math.pi)
        - n * m / 2 * math.log(2)
        - n / 2 * math.log(np.linalg.det(sigma))
        - special.multigammaln(m / 2, m)
        - special.multigammaln(n / 2, m)
        + math.log(lam[0] - lam[1])
        + (n - m - 1) / 2 * np.sum(np.log(lam))
        + math.log(avg)
    )
    got = eig_joint_logpdf(WgdParams(sigma, n, Exponential()), lam, TIGHT)
    assert got.value == pytest.approx(want, abs=1e-10)


def test_eigenvalue_density_checks():
    with pytest.raises(DomainError):
        eig_joint_logpdf(_wishart(), [0.5, 1.0])
    with pytest.raises(DomainError):
        eig_joint_logpdf(_wishart(), [1.0])
    assert eig_joint_logpdf(_wishart(), [1.0, 1.0]).value == -math.inf


@pytest.mark.parametrize("a", [0.5, 2.0, 6.0])
def test_scalar_wishart_cdf_is_gamma(a):
    sigma, n = 1.3, 3.0
    got = prob_less_than(WgdParams([[sigma]], n, Exponential()), [[a]], TIGHT)
    assert got.value == pytest.approx(special.gammainc(n / 2, a / (2 * sigma)), abs=1e-12)


def test_scalar_tprime_cdf():
    sigma, n, p, a = 2.0, 3.0, 4.0, 0.8
    got = prob_less_than(WgdParams([[sigma]], n, TPrime(p, n, 1)), [[a]], TIGHT)
    assert got.value == pytest.approx(stats.betaprime(n / 2, p, scale=sigma).cdf(a), abs=1e-12)


def test_wishart_lmax_cdf_against_simulation():
    n, a = 4.0, 5.0
    sigma = np.array([[0.8, 0.2], [0.2, 0.5]])
    got = lmax_cdf(_wishart(sigma, n), a, TIGHT).value
    xs = sample_wishart(sigma, n, np.random.default_rng(5), size=100_000)
    frac = np.mean(np.linalg.eigvalsh(xs)[:, -1] < a)
    assert abs(got - frac) < 4 * math.sqrt(frac * (1 - frac) / 100_000)


def test_prob_less_than_printed_form_differs():
    params = WgdParams([[1.0]], 3.0, Exponential())
    a = prob_less_than(params, [[1.0]], TIGHT).value
    b = prob_less_than(params, [[1.0]], TIGHT, as_printed=True).value
    assert abs(a - b) > 1e-3


def test_lmax_needs_positive_bound():
    with pytest.raises(DomainError):
        lmax_cdf(_wishart(), 0.0)


# trace law


def test_trace_density_isotropic_matches_exact():
    params = WgdParams(np.eye(2), 3.0, TPrime(3.0, 3.0, 2))
    for y in (0.1, 0.3, 0.6):
        got = trace_pdf(params, y, TIGHT).value
        assert got == pytest.approx(trace_pdf_exact_iso(1.0, 3.0, 2, TPrime(3.0, 3.0, 2), y), rel=1e-11)


def test_wishart_trace_density_diagonal_scale():
    # with diagonal Σ the diagonal entries are independent scaled chi-squares
    d1, d2, n = 1.0, 0.4, 3.0
    params = _wishart(np.diag([d1, d2]), n)
    y = 2.5
    a, b = stats.chi2(n, scale=d1), stats.chi2(n, scale=d2)
    want = integrate.quad(lambda u: a.pdf(u) * b.pdf(y - u), 0, y, epsabs=1e-14)[0]
    assert trace_pdf(params, y, TIGHT).value == pytest.approx(want, rel=1e-10)


def test_exact_trace_density_vectorized():
    y = np.array([0.0, 0.5, 2.0])
    got = trace_pdf_exact_iso(1.5, 3.0, 2, Exponential(), y)
    np.testing.assert_allclose(got, stats.chi2(6, scale=1.5).pdf(y), rtol=1e-12, atol=1e-300)


def test_trace_density_domain():
    with pytest.raises(DomainError):
        trace_pdf(_wishart(), 0.0)
    with pytest.raises(DomainError):
        trace_pdf_exact_iso(0.0, 3.0, 2, Exponential(), 1.0)


def test_wishart_trace_moments(rng):
    sigma, n = random_spd(rng, 3), 4.5
    params = _wishart(sigma, n)
    assert trace_moment(params, 1).value == pytest.approx(n * np.trace(sigma), rel=1e-12)
    want2 = n**2 * np.trace(sigma) ** 2 + 2 * n * np.trace(sigma @ sigma)
    assert trace_moment(params, 2).value == pytest.approx(want2, rel=1e-12)


def test_isotropic_fractional_trace_moment():
    s2, n, m, r = 1.7, 3.0, 2, 0.6
    want = (2 * s2) ** r * math.exp(math.lgamma(n * m / 2 + r) - math.lgamma(n * m / 2))
    assert trace_moment(_wishart(s2 * np.eye(m), n), r).value == pytest.approx(want, rel=1e-12)


def test_fractional_trace_moment_needs_isotropy():
    with pytest.raises(DomainError):
        trace_moment(_wishart(), 0.5)


def test_power_trace_moment_against_quadrature():
    gen, n, m = Power(0.8, 1.3), 3.0, 2
    params = WgdParams(np.eye(m), n, gen)
    s = n * m / 2
    num = integrate.quad(lambda y: y ** (s + 2 - 1) * math.exp(gen.log_h(np.array(y))), 0, np.inf)[0]
    den = integrate.quad(lambda y: y ** (s - 1) * math.exp(gen.log_h(np.array(y))), 0, np.inf)[0]
    assert trace_moment(params, 2).value == pytest.approx(num / den, rel=1e-9)


def test_trace_moment_printed_form_differs():
    params = _wishart(np.eye(2) * 3.0, 3.0)
    a = trace_moment(params, 1).value
    b = trace_moment(params, 1, Truncation(max_degree=60, tol=1e-12), as_printed=True).value
    assert abs(a - b) > 1e-3 * a


# ratios with an independent Wishart matrix


@pytest.mark.parametrize("b", [0.2, 0.4, 0.6])
def test_scalar_first_ratio_is_beta_prime(b):
    n, p = 3.0, 2.5
    got = ratio_b1_pdf(Exponential(), n, p, [[b]], trunc=TIGHT).value
    assert got == pytest.approx(stats.betaprime(p / 2, n / 2).pdf(b), rel=1e-10)


@pytest.mark.parametrize("b", [0.6, 0.75, 0.9])
def test_scalar_second_ratio_is_beta(b):
    n, p = 3.0, 2.5
    got = ratio_b2_pdf(Exponential(), n, p, [[b]], trunc=TIGHT).value
    assert got == pytest.approx(stats.beta(n / 2, p / 2).pdf(b), rel=1e-10)


def test_second_ratio_printed_exponent():
    n, p, b = 3.0, 2.5, 0.8
    a = ratio_b2_pdf(Exponential(), n, p, [[b]], trunc=TIGHT).value
    c = ratio_b2_pdf(Exponential(), n, p, [[b]], trunc=TIGHT, as_printed=True).value
    assert c / a == pytest.approx(b ** ((p - n) / 2), rel=1e-12)


def test_ratio_argument_checks():
    with pytest.raises(DomainError):
        ratio_b1_pdf(Exponential(), 3.0, 0.5, np.eye(2) * 0.3)
    with pytest.raises(DomainError):
        ratio_b2_pdf(Exponential(), 3.0, 2.5, np.eye(2) * 1.2)
    with pytest.raises(DomainError):
        ratio_b1_pdf(Exponential(), 3.0, 2.5, [[0.3]], alpha=-1.0)
