import math

import numpy as np
import pytest

from cogcap.sensing import (
    Method,
    SensingParams,
    SensingPerformance,
    busy_detection_alpha,
    detector_performance,
    roc_point,
    threshold_for_target,
)

# pd = 0.9 threshold for N = 0.1 s, B = 10 kHz, unit variances; fixed by
# inverting the chi-square tail with an independent root finder
GAMMA_PD_090 = 1.9193878654576666


def params(N=0.1, B=1e4, sn=1.0, ssp=1.0, gamma=0.0, method=Method.EXACT):
    return SensingParams(N=N, B=B, sigma_n2=sn, sigma_sp2=ssp, gamma=gamma, method=method)


def test_sample_count_rounding_recorded():
    p = params(N=0.10004, B=1e4)
    assert p.n_samples == 1000
    assert p.nb_rounding == pytest.approx(1000 - 1000.4)


@pytest.mark.parametrize("kw", [dict(N=0.0), dict(B=-1.0), dict(sn=0.0), dict(ssp=-0.1),
                                dict(gamma=-1.0), dict(N=1e-5), dict(N=math.inf)])
def test_invalid_params_rejected(kw):
    with pytest.raises(ValueError):
        params(**kw)


def test_zero_threshold_gives_certain_detection_and_false_alarm():
    pf, pd = detector_performance(params(gamma=0.0))
    assert pf == 1.0 and pd == 1.0
    pf, pd = detector_performance(params(gamma=1e-9))
    assert pf == pytest.approx(1.0) and pd == pytest.approx(1.0)


@pytest.mark.parametrize("method", list(Method))
def test_identical_hypotheses_give_equal_rates(method):
    for g in np.linspace(0.0, 3.0, 31):
        pf, pd = detector_performance(params(ssp=0.0, gamma=g, method=method))
        assert pf == pd


def test_single_sample_is_exponential_tail():
    for g in np.linspace(0.0, 20.0, 41):
        pf, _ = detector_performance(SensingParams(N=1e-4, B=1e4, sigma_n2=2.0, sigma_sp2=1.0,
                                                   gamma=g))
        assert abs(pf - math.exp(-g / 2.0)) <= 1e-12


def test_single_sample_monte_carlo():
    rng = np.random.default_rng(11)
    n = 10**7
    y = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * math.sqrt(0.5)
    energy = np.abs(y) ** 2
    for g in (0.1, 0.7, 1.5, 3.0):
        pf, _ = detector_performance(SensingParams(N=1e-4, B=1e4, sigma_n2=1.0, sigma_sp2=1.0,
                                                   gamma=g))
        est = np.mean(energy > g)
        se = math.sqrt(pf * (1 - pf) / n)
        assert abs(est - pf) <= 3 * se


def test_alpha_examples():
    assert busy_detection_alpha(0.3, 0.4, 0.4) == pytest.approx(0.4)
    assert busy_detection_alpha(0.0, 0.2, 0.9) == 0.2
    assert busy_detection_alpha(0.1, 0.2, 0.9) == pytest.approx(0.27, abs=1e-15)
    with pytest.raises(ValueError):
        busy_detection_alpha(1.1, 0.2, 0.9)
    with pytest.raises(ValueError):
        busy_detection_alpha(0.1, -0.2, 0.9)


def test_performance_alpha_is_convex_combination():
    perf = SensingPerformance.from_rates(0.2, 0.9, 0.1)
    assert perf.alpha == 0.1 * 0.9 + 0.9 * 0.2


def test_threshold_round_trip_pf():
    p = params(N=0.001)
    g = threshold_for_target(p, pf=0.2)
    assert abs(detector_performance(p.with_gamma(g))[0] - 0.2) <= 1e-9


def test_threshold_round_trip_pd():
    p = params()
    g = threshold_for_target(p, pd=0.9)
    assert abs(detector_performance(p.with_gamma(g))[1] - 0.9) <= 1e-9


def test_threshold_golden_value():
    assert threshold_for_target(params(), pd=0.9) == pytest.approx(GAMMA_PD_090, rel=1e-10)


def test_threshold_no_bracket_at_limits():
    with pytest.raises(ValueError, match="bracket"):
        threshold_for_target(params(), pf=1.0)
    with pytest.raises(ValueError, match="bracket"):
        threshold_for_target(params(), pd=0.0)
    g_small = threshold_for_target(params(N=0.001), pf=1.0 - 1e-9)
    assert g_small < 0.5


def test_threshold_needs_exactly_one_target():
    with pytest.raises(ValueError):
        threshold_for_target(params())
    with pytest.raises(ValueError):
        threshold_for_target(params(), pf=0.1, pd=0.9)


@pytest.mark.parametrize("method", list(Method))
@pytest.mark.parametrize("N", [1e-4, 1e-3, 1e-2, 0.1])
def test_rates_nonincreasing_in_threshold_and_pd_dominates(method, N):
    grid = np.linspace(0.0, 4.0, 401)
    pfs, pds = zip(*(detector_performance(params(N=N, gamma=g, method=method)) for g in grid))
    assert all(b <= a for a, b in zip(pfs, pfs[1:]))
    assert all(b <= a for a, b in zip(pds, pds[1:]))
    assert all(d >= f for f, d in zip(pfs, pds))


def test_gaussian_variant_close_for_many_samples():
    for N in (0.1, 0.5):
        for g in np.linspace(0.5, 3.0, 51):
            ex = detector_performance(params(N=N, ssp=0.2, gamma=g))
            ga = detector_performance(params(N=N, ssp=0.2, gamma=g, method=Method.GAUSSIAN))
            assert abs(ex[0] - ga[0]) <= 0.01
            assert abs(ex[1] - ga[1]) <= 0.01


def test_roc_point_consistent():
    p = params(N=0.001, ssp=0.5)
    g, pf, pd = roc_point(p, 0.8)
    assert pd == pytest.approx(0.8, abs=1e-9)
    assert (pf, pd) == detector_performance(p.with_gamma(g))
    assert pf < pd
