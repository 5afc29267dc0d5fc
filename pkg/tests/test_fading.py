import math

import numpy as np
import pytest
from scipy import integrate, stats

from cogcap.fading import (
    Nakagami,
    Rayleigh,
    make_model,
    max_ratio_cdf,
    max_ratio_pdf,
    ratio_cdf,
    ratio_log_quantile,
    ratio_pdf,
    sample_gain_pair,
)

MODELS = [Rayleigh(), Nakagami(1), Nakagami(2), Nakagami(3), Nakagami(5)]


def _integral(f):
    v1 = integrate.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    v2 = integrate.quad(f, 1.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return v1 + v2


def test_rayleigh_pdf_at_one():
    assert ratio_pdf(Rayleigh(), 1.0) == 0.25


def test_nakagami3_pdf_at_one():
    assert ratio_pdf(Nakagami(3), 1.0) == pytest.approx(120.0 / 256.0, rel=1e-14)


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_pdf_normalised(model):
    assert _integral(lambda x: float(ratio_pdf(model, x))) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_cdf_limits_and_symmetry(model):
    assert ratio_cdf(model, 0.0) == 0.0
    assert ratio_cdf(model, np.inf) == 1.0
    assert ratio_cdf(model, 1e12) == pytest.approx(1.0, abs=1e-10)
    assert abs(ratio_cdf(model, 1.0) - 0.5) <= 1e-12


def test_nakagami3_cdf_closed_form():
    x = np.linspace(0.0, 50.0, 501)
    w = 1.0 / (1.0 + x)
    closed = 1.0 - 10 * w ** 3 + 15 * w ** 4 - 6 * w ** 5
    assert np.max(np.abs(ratio_cdf(Nakagami(3), x) - closed)) <= 1e-14


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_cdf_derivative_matches_pdf(model):
    for x in np.geomspace(0.01, 100.0, 200):
        h = 1e-5 * x
        fd = (ratio_cdf(model, x + h) - ratio_cdf(model, x - h)) / (2 * h)
        assert abs(fd - ratio_pdf(model, x)) <= 1e-6


def test_nakagami1_is_rayleigh():
    x = np.geomspace(0.01, 100.0, 400)
    assert np.max(np.abs(ratio_pdf(Nakagami(1), x) - ratio_pdf(Rayleigh(), x))) <= 1e-12
    assert np.max(np.abs(ratio_cdf(Nakagami(1), x) - ratio_cdf(Rayleigh(), x))) <= 1e-12


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_log_domain_helpers_agree(model):
    for u in np.linspace(-30.0, 30.0, 121):
        x = math.exp(u)
        assert model.pdf_log(u) == pytest.approx(float(model.pdf(x)), rel=1e-12, abs=1e-300)
        assert model.cdf_log(u) == pytest.approx(float(model.cdf(x)), rel=1e-12, abs=1e-300)
        assert model.xpdf_log(u) == pytest.approx(x * float(model.pdf(x)), rel=1e-12, abs=1e-300)


def test_log_domain_tiny_ratios_do_not_underflow():
    # F(x) ~ x for Rayleigh at x = e^-700, far below what x itself can resolve to
    assert Rayleigh().cdf_log(-700.0) == pytest.approx(math.exp(-700.0), rel=1e-12)
    assert Rayleigh().pdf_log(-700.0) == pytest.approx(1.0)


def test_negative_ratio_rejected():
    for model in (Rayleigh(), Nakagami(3)):
        with pytest.raises(ValueError):
            ratio_pdf(model, -0.1)
        with pytest.raises(ValueError):
            ratio_cdf(model, -1.0)


def test_make_model():
    assert make_model("Rayleigh") == Rayleigh()
    assert make_model("nakagami", 3) == Nakagami(3)
    with pytest.raises(ValueError):
        make_model("rician")
    with pytest.raises(ValueError):
        Nakagami(2.5)


def test_max_of_one_is_ratio_law():
    x = np.geomspace(1e-3, 1e3, 50)
    for model in MODELS:
        assert np.array_equal(max_ratio_pdf(model, 1, x), ratio_pdf(model, x))


def test_rayleigh_max_of_two_median():
    x = 1.0 / (math.sqrt(2.0) - 1.0)
    assert abs(max_ratio_cdf(Rayleigh(), 2, x) - 0.5) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 10])
@pytest.mark.parametrize("model", [Rayleigh(), Nakagami(3)], ids=repr)
def test_max_ratio_normalised(model, n):
    assert _integral(lambda x: float(max_ratio_pdf(model, n, x))) == pytest.approx(1.0, abs=1e-9)


def test_max_ratio_cdf_dominance():
    x = np.geomspace(1e-3, 1e3, 200)
    for model in MODELS:
        prev = max_ratio_cdf(model, 1, x)
        assert np.allclose(prev, ratio_cdf(model, x))
        for n in range(2, 12):
            cur = max_ratio_cdf(model, n, x)
            assert np.all(cur <= prev)
            assert np.allclose(cur, ratio_cdf(model, x) ** n)
            prev = cur


def test_max_ratio_rejects_zero_order():
    with pytest.raises(ValueError):
        max_ratio_pdf(Rayleigh(), 0, 1.0)
    with pytest.raises(ValueError):
        max_ratio_cdf(Rayleigh(), 0, 1.0)


@pytest.mark.parametrize("model", [Rayleigh(), Nakagami(3)], ids=repr)
def test_gain_samples_unit_mean(model):
    g = sample_gain_pair(model, np.random.default_rng(5), 10**6)
    assert abs(np.mean(g.z) - 1.0) <= 0.01
    assert abs(np.mean(g.z_sp) - 1.0) <= 0.01


@pytest.mark.parametrize("model", [Rayleigh(), Nakagami(2), Nakagami(3)], ids=repr)
def test_sampled_ratio_passes_ks(model):
    g = sample_gain_pair(model, np.random.default_rng(6), 10**5)
    res = stats.kstest(g.z / g.z_sp, lambda x: ratio_cdf(model, x))
    assert res.pvalue > 0.01


def test_nakagami1_and_rayleigh_samples_same_law():
    a = sample_gain_pair(Nakagami(1), np.random.default_rng(7), 10**5)
    b = sample_gain_pair(Rayleigh(), np.random.default_rng(7), 10**5)
    assert stats.ks_2samp(a.z / a.z_sp, b.z / b.z_sp).pvalue > 0.01


def test_log_quantile_inverts_cdf():
    for model in (Rayleigh(), Nakagami(3)):
        for prob in (1e-9, 1e-3, 0.5, 0.9):
            u = ratio_log_quantile(model, prob)
            assert model.cdf_log(u) == pytest.approx(prob, rel=1e-9)
    with pytest.raises(ValueError):
        ratio_log_quantile(Rayleigh(), 1.0)
