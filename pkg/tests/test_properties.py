"""Randomised invariants over the analytic modules."""
import math

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from cogcap.fading import Nakagami, Rayleigh, max_ratio_cdf, ratio_cdf
from cogcap.optimizer import (
    average_interference,
    baseline_params,
    idle_case_density_collapsed,
    idle_case_density_sum,
    policy_constants,
)
from cogcap.sensing import (
    Method,
    SensingParams,
    SensingPerformance,
    busy_detection_alpha,
    detector_performance,
)
from cogcap.specfun import gaussian_q, reg_lower_gamma, reg_upper_gamma
from cogcap.statemodel import (
    ModelInputs,
    interference_probability,
    scenario_probabilities,
    transition_probabilities,
)

unit = st.floats(0.0, 1.0, allow_nan=False)
shape = st.floats(0.05, 5000.0, allow_nan=False)
limit = st.floats(0.0, 1e4, allow_nan=False)
channels = st.integers(1, 40)
models = st.sampled_from([Rayleigh(), Nakagami(2), Nakagami(3)])

fast = settings(max_examples=150, deadline=None,
                suppress_health_check=[HealthCheck.too_slow])


def model_inputs(M, rho, pd, pf):
    return ModelInputs(M, rho, SensingPerformance.from_rates(pf, pd, rho))


@fast
@given(shape, limit)
def test_gamma_pair_sums_to_one(a, x):
    lo, hi = reg_lower_gamma(a, x), reg_upper_gamma(a, x)
    assert 0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0
    assert abs(lo + hi - 1.0) <= 1e-13


@fast
@given(shape, limit, st.floats(0.0, 100.0))
def test_gamma_nondecreasing_in_limit(a, x, dx):
    assert reg_lower_gamma(a, x + dx) >= reg_lower_gamma(a, x) - 1e-15


@fast
@given(st.floats(-38.0, 38.0), st.floats(1e-6, 5.0))
def test_q_nonincreasing_and_bounded(x, dx):
    a, b = gaussian_q(x), gaussian_q(x + dx)
    assert 0.0 <= b <= a <= 1.0


@fast
@given(unit, unit, unit)
def test_alpha_is_convex_combination(rho, pf, pd):
    a = busy_detection_alpha(rho, pf, pd)
    assert min(pf, pd) - 1e-15 <= a <= max(pf, pd) + 1e-15


@fast
@given(st.sampled_from([1e-4, 1e-3, 1e-2]), st.floats(0.0, 5.0), st.floats(0.0, 3.0),
       st.floats(0.0, 2.0), st.sampled_from(list(Method)))
def test_detector_rates_ordered_and_monotone(N, gamma, ssp, dg, method):
    p = SensingParams(N=N, B=1e4, sigma_n2=1.0, sigma_sp2=ssp, gamma=gamma, method=method)
    pf, pd = detector_performance(p)
    pf2, pd2 = detector_performance(p.with_gamma(gamma + dg))
    assert 0.0 <= pf <= 1.0 and 0.0 <= pd <= 1.0
    assert pd >= pf
    assert pf2 <= pf and pd2 <= pd


@fast
@given(channels, unit, unit, unit)
def test_state_and_scenario_laws(M, rho, pd, pf):
    inp = model_inputs(M, rho, pd, pf)
    p = transition_probabilities(inp).p
    s = scenario_probabilities(inp)
    assert abs(p.sum() - 1.0) <= 1e-12
    assert np.all((p >= 0.0) & (p <= 1.0))
    assert abs(s.as_array().sum() - 1.0) <= 1e-12
    assert p[-1] == s.ps3
    assert interference_probability(inp)[0] == s.ps1 + s.ps3


@fast
@given(models, st.floats(1e-3, 1e3), st.integers(1, 12))
def test_ratio_law_symmetry_and_dominance(model, x, n):
    assert abs(ratio_cdf(model, x) + ratio_cdf(model, 1.0 / x) - 1.0) <= 1e-12
    assert max_ratio_cdf(model, n + 1, x) <= max_ratio_cdf(model, n, x)


@fast
@given(models, st.integers(1, 10), unit, st.floats(1e-4, 1e4))
def test_idle_density_collapse(model, M, alpha, x):
    a = idle_case_density_sum(model, M, alpha, np.array([x]))
    b = idle_case_density_collapsed(model, M, alpha, np.array([x]))
    assert abs(a[0] - b[0]) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.floats(-60.0, 20.0), st.floats(0.5, 40.0))
def test_interference_decreases_with_multiplier(M, log_lam, step):
    p = baseline_params(M=M)
    base = policy_constants(p)
    lo = average_interference(base.with_log_lambda(log_lam), p)
    hi = average_interference(base.with_log_lambda(log_lam + step), p)
    assume(lo > 1e-250)
    assert hi < lo
    assert math.isfinite(lo)
