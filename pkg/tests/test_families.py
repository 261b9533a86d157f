import math

import numpy as np
import pytest
from scipy.integrate import quad

from pvcast.distfit import GenHyperbolic, Normal, StudentT

FAMILIES = [
    Normal(0.5, 2.0),
    StudentT(-1.0, 1.5, 4.0),
    GenHyperbolic(lam=-0.5, alpha=1.2, beta=0.3, delta=2.0, mu=0.5),
    GenHyperbolic(lam=1.0, alpha=2.5, beta=-1.0, delta=0.7, mu=-2.0),
]


def integral(dist):
    mid = dist._location_hint()
    left = quad(lambda t: float(dist.pdf(t)), -np.inf, mid, limit=200)[0]
    right = quad(lambda t: float(dist.pdf(t)), mid, np.inf, limit=200)[0]
    return left + right


@pytest.mark.parametrize("dist", FAMILIES, ids=lambda d: d.name + repr(tuple(d.params().values())))
def test_pdf_integrates_to_one(dist):
    assert integral(dist) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("dist", FAMILIES, ids=lambda d: d.name + repr(tuple(d.params().values())))
def test_cdf_monotone_and_limits(dist):
    scale = dist._scale_hint()
    xs = dist._location_hint() + scale * np.linspace(-12, 12, 101)
    f = dist.cdf(xs)
    assert np.all(np.diff(f) >= -1e-12)
    assert f[0] < 1e-3 and f[-1] > 1 - 1e-3
    assert np.all(f >= 0.0) and np.all(f <= 1.0)


@pytest.mark.parametrize("dist", FAMILIES, ids=lambda d: d.name + repr(tuple(d.params().values())))
def test_quantile_cdf_roundtrip(dist):
    scale = dist._scale_hint()
    for x in dist._location_hint() + scale * np.array([-2.5, -0.5, 0.0, 1.0, 3.0]):
        p = float(dist.cdf(float(x)))
        assert dist.quantile(p) == pytest.approx(float(x), abs=1e-6)


def test_normal_closed_forms():
    d = Normal(2.0, 3.0)
    assert d.cdf(2.0) == pytest.approx(0.5, abs=1e-15)
    assert d.quantile(0.975) == pytest.approx(2.0 + 3.0 * 1.959963984540054, abs=1e-9)
    assert float(d.pdf(2.0)) == pytest.approx(1.0 / (3.0 * math.sqrt(2 * math.pi)), rel=1e-12)


def test_student_t_cdf_by_quadrature_matches_closed_form():
    from scipy import stats

    d = StudentT(0.0, 1.0, 7.0)
    for x in (-3.0, -0.4, 0.0, 1.7, 5.0):
        assert float(d.cdf(x)) == pytest.approx(stats.t.cdf(x, df=7), abs=1e-10)


def test_student_t_large_nu_approaches_normal():
    t_huge = StudentT(1.0, 2.0, 1e12)
    n = Normal(1.0, 2.0)
    xs = np.linspace(-6, 8, 40)
    assert np.max(np.abs(t_huge.logpdf(xs) - n.logpdf(xs))) < 1e-9


def test_gh_matches_independent_parameterization():
    # scipy expresses the same family via p = lam, a = alpha delta,
    # b = beta delta, scale = delta; agreement validates the density algebra.
    from scipy import stats

    lam, alpha, beta, delta, mu = -0.5, 1.5, 0.4, 2.0, -1.0
    ours = GenHyperbolic(lam, alpha, beta, delta, mu)
    theirs = stats.genhyperbolic(p=lam, a=alpha * delta, b=beta * delta, loc=mu, scale=delta)
    xs = np.linspace(-8, 6, 50)
    assert np.max(np.abs(ours.logpdf(xs) - theirs.logpdf(xs))) < 1e-9


def test_gh_parameter_validation():
    with pytest.raises(ValueError):
        GenHyperbolic(0.0, 1.0, 1.0, 1.0, 0.0)  # |beta| == alpha
    with pytest.raises(ValueError):
        GenHyperbolic(0.0, -1.0, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        GenHyperbolic(0.0, 1.0, 0.0, 0.0, 0.0)


def test_quantile_domain_checks():
    d = Normal(0.0, 1.0)
    with pytest.raises(ValueError):
        d.quantile(0.0)
    with pytest.raises(ValueError):
        d.quantile(1.0)
