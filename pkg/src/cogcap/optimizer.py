"""Optimal power adaptation and effective capacity under an average
interference cap.

With c = Bc (T - N) theta / ln 2 the per-frame MGF term of a rate
Bc log2(1 + P z / mu) is (1 + P z / mu)^(-c). Minimising its expectation
under the linear interference constraint decouples per gain pair and gives

    P = (mu / z) [ (x / (beta lambda))^(1/(c+1)) - 1 ]   for x = z/z_sp >= beta lambda

and 0 below the cutoff, with (mu1, beta1) in the all-busy mode and
(mu2, beta2) in the idle mode. Every expectation then depends on the
selected ratio only and is a one-dimensional integral against the
max-of-n ratio law.

Integrals are taken in u = log x. lambda routinely reaches 1e-150 and
below, so the multiplier is carried as log(lambda) throughout.

When an optional peak power ``p_max`` is set the policy is clipped at
p_max (still the pointwise KKT solution) and the conditional law of z given
x, Gamma(2m, m (1 + 1/x)), enters the per-ratio expectations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from .fading import FadingModel, Rayleigh
from .sensing import SensingPerformance
from .specfun import reg_lower_gamma, reg_upper_gamma
from .statemodel import (
    ModelInputs,
    RateContext,
    case_weight,
    transition_probabilities,
)

LN2 = math.log(2.0)
QUAD_EPSREL = 1e-9
QUAD_EPSABS = 1e-16
LAMBDA_RTOL = 1e-6
MAX_DOUBLINGS = 200
MAX_BISECTIONS = 200
R_MIN_FLOOR = 1e-9
_EXP_MAX = 700.0


class DegenerateInputError(ValueError):
    """The optimisation is unbounded for these parameters."""


class NumericalFailure(ArithmeticError):
    """Quadrature or root finding did not reach the requested accuracy."""


class BracketFailure(NumericalFailure):
    pass


@dataclass(frozen=True)
class SystemParams:
    M: int
    T: float
    N: float
    Bc: float
    theta: float
    rho: float
    sigma_n2: float
    sigma_sp2: float
    I_avg: float
    model: FadingModel
    perf: SensingPerformance
    p_max: float | None = None

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        for name in ("T", "N", "Bc", "theta", "rho", "sigma_n2", "sigma_sp2", "I_avg"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if not (0.0 < self.N < self.T):
            raise ValueError("sensing time must satisfy 0 < N < T")
        if self.Bc <= 0 or self.theta <= 0 or self.I_avg <= 0:
            raise ValueError("Bc, theta and I_avg must be positive")
        if self.sigma_n2 <= 0 or self.sigma_sp2 < 0:
            raise ValueError("sigma_n2 must be positive and sigma_sp2 nonnegative")
        if self.p_max is not None and not (self.p_max > 0 and math.isfinite(self.p_max)):
            raise ValueError("p_max must be a positive finite power")
        # validates rho/alpha consistency
        ModelInputs(self.M, self.rho, self.perf)

    @property
    def inputs(self) -> ModelInputs:
        return ModelInputs(self.M, self.rho, self.perf)

    @property
    def rates(self) -> RateContext:
        return RateContext(self.Bc, self.sigma_n2, self.sigma_sp2)

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)


def iavg_from_db(iavg_db: float, sigma_np2: float, Bc: float) -> float:
    """Interference cap in W from its level relative to the primary noise power."""
    return 10.0 ** (iavg_db / 10.0) * sigma_np2 * Bc


def iavg_to_db(iavg: float, sigma_np2: float, Bc: float) -> float:
    return 10.0 * math.log10(iavg / (sigma_np2 * Bc))


def baseline_params(M: int = 2, iavg_db: float = 0.0, model: FadingModel | None = None,
                    pd: float = 0.9, pf: float = 0.2, theta: float = 0.1, rho: float = 0.1,
                    T: float = 1.0, N: float = 0.1, Bc: float = 1e4,
                    noise_power: float = 1.0, primary_power: float = 1.0,
                    primary_noise_power: float = 1.0, p_max: float | None = None) -> SystemParams:
    """Reference operating point: theta = 0.1, T = 1 s, N = 0.1 s, rho = 0.1,
    pd = 0.9, pf = 0.2, Rayleigh fading, Bc = 10 kHz. Noise, primary-signal and
    primary-receiver noise powers default to 1 W over the band."""
    model = model if model is not None else Rayleigh()
    sigma_np2 = primary_noise_power / Bc
    return SystemParams(
        M=M, T=T, N=N, Bc=Bc, theta=theta, rho=rho,
        sigma_n2=noise_power / Bc, sigma_sp2=primary_power / Bc,
        I_avg=iavg_from_db(iavg_db, sigma_np2, Bc), model=model,
        perf=SensingPerformance.from_rates(pf, pd, rho), p_max=p_max,
    )


@dataclass(frozen=True)
class PowerPolicy:
    """Constants of the optimal policy; ``log_lam`` is None until solved.

    A log_beta of +inf marks a mode that never transmits (its state is
    unreachable or transmitting there only creates interference); -inf marks
    beta = 0, which needs ``p_max``.
    """

    c: float
    mu1: float
    mu2: float
    beta1: float
    beta2: float
    log_beta1: float
    log_beta2: float
    log_lam: float | None = None
    p_max: float | None = None

    @property
    def lam(self) -> float:
        if self.log_lam is None:
            raise ValueError("lambda has not been solved")
        return math.exp(self.log_lam)

    def with_log_lambda(self, log_lam: float) -> "PowerPolicy":
        return replace(self, log_lam=float(log_lam))

    def with_lambda(self, lam: float) -> "PowerPolicy":
        if lam < 0:
            raise ValueError("lambda must be nonnegative")
        return self.with_log_lambda(math.log(lam) if lam > 0 else -math.inf)

    def _require_lambda(self):
        if self.log_lam is None:
            raise ValueError("lambda has not been solved")

    @property
    def log_threshold1(self) -> float:
        """log(beta1 lambda): ratio cutoff of the all-busy mode."""
        self._require_lambda()
        return _log_product(self.log_beta1, self.log_lam)

    @property
    def log_threshold2(self) -> float:
        self._require_lambda()
        return _log_product(self.log_beta2, self.log_lam)


def _log_product(log_a: float, log_b: float) -> float:
    if log_a == math.inf:
        return math.inf
    if log_a == -math.inf or log_b == -math.inf:
        return -math.inf
    return log_a + log_b


def policy_constants(p: SystemParams) -> PowerPolicy:
    inp = p.inputs
    rho, pd = p.rho, p.perf.pd
    alpha = inp.alpha
    c = p.Bc * (p.T - p.N) * p.theta / LN2
    mu1 = p.Bc * (p.sigma_n2 + p.sigma_sp2)
    mu2 = p.Bc * p.sigma_n2

    busy_hit = rho * pd
    if alpha == 0.0:
        beta1, log_beta1 = math.inf, math.inf
    elif busy_hit == 0.0:
        beta1, log_beta1 = 0.0, -math.inf
    else:
        beta1 = mu1 * busy_hit / (c * alpha)
        log_beta1 = math.log(mu1) + math.log(busy_hit) - math.log(c) - math.log(alpha)

    miss, idle = inp.miss_mass, inp.idle_mass
    if idle == 0.0:
        beta2, log_beta2 = math.inf, math.inf
    elif miss == 0.0:
        beta2, log_beta2 = 0.0, -math.inf
    else:
        beta2 = miss * mu2 / (c * idle)
        log_beta2 = math.log(miss) + math.log(mu2) - math.log(c) - math.log(idle)

    if p.p_max is None:
        if log_beta1 == -math.inf:
            raise DegenerateInputError(
                "rho*pd = 0 with the all-busy state reachable: P1 is unconstrained; supply p_max")
        if log_beta2 == -math.inf:
            raise DegenerateInputError(
                "rho*(1-pd) = 0: P2 is unconstrained by the interference cap; supply p_max")
    return PowerPolicy(c=c, mu1=mu1, mu2=mu2, beta1=beta1, beta2=beta2,
                       log_beta1=log_beta1, log_beta2=log_beta2, p_max=p.p_max)


# ---------------------------------------------------------------- powers

def _power(z, z_sp, mu, log_t, pol: PowerPolicy):
    z = np.asarray(z, dtype=float)
    z_sp = np.asarray(z_sp, dtype=float)
    if np.any(z < 0) or np.any(z_sp < 0) or np.any(np.isnan(z)) or np.any(np.isnan(z_sp)):
        raise ValueError("gains must be nonnegative")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lr = np.log(z) - np.log(z_sp)
        lr = np.where(z == 0, -np.inf, lr)
        on = (lr >= log_t) & np.isfinite(log_t) | ((log_t == -np.inf) & (z > 0))
        d = (lr - log_t) / (pol.c + 1.0)
        P = np.where(on, mu / z * np.expm1(d), 0.0)
    if pol.p_max is not None:
        P = np.minimum(P, pol.p_max)
    elif np.any(np.isinf(P)):
        raise ValueError("z_sp = 0 with z > 0 gives unbounded power without p_max")
    return P


def power_p1(z, z_sp, pol: PowerPolicy):
    """All-busy mode transmit power (W)."""
    return _power(z, z_sp, pol.mu1, pol.log_threshold1, pol)


def power_p2(z, z_sp, pol: PowerPolicy):
    """Idle mode transmit power (W)."""
    return _power(z, z_sp, pol.mu2, pol.log_threshold2, pol)


# ------------------------------------------------------------ quadrature

def _quad(f, a, b, what):
    val, err, info = integrate.quad(f, a, b, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                                    limit=500, full_output=1)[:3]
    if not math.isfinite(val) or err > max(1e-13, 1e-8 * abs(val)):
        raise NumericalFailure(
            f"quadrature for {what} on [{a}, {b}] failed: value={val}, abserr={err}, "
            f"evaluations={info.get('neval')}")
    return val


def integrate_log_ratio(h, log_t: float, what: str = "integral") -> float:
    """Integral of h(u) over u in [log_t, inf), split at -50 and 0."""
    if log_t == math.inf:
        return 0.0
    total = 0.0
    edges = [log_t] + [b for b in (-50.0, 0.0) if b > log_t] + [math.inf]
    for a, b in zip(edges[:-1], edges[1:]):
        total += _quad(h, a, b, what)
    return total


class _Branch:
    """Per-ratio conditional quantities for one transmit mode.

    The weight w(u) is the density of the selected log-ratio up to the
    factor x f(x): n F^(n-1) for max-of-n selection.
    """

    def __init__(self, model: FadingModel, mu: float, log_t: float, c: float, p_max):
        self.model = model
        self.mu = mu
        self.log_t = log_t
        self.c = c
        self.inv_c1 = 1.0 / (c + 1.0)
        self.kappa = c / (c + 1.0)
        self.p_max = p_max

    def _e(self, u):
        # P_opt z / mu
        if self.log_t == -math.inf:
            return math.inf
        d = (u - self.log_t) * self.inv_c1
        return math.expm1(d) if d < _EXP_MAX else math.inf

    def interference_x(self, u, g=1.0):
        """x * E[P z_sp | x] = E[P z | x], multiplied by the weight g >= 0.

        The product is formed in log space when E[P z | x] alone would
        overflow (small c, far-below-one cutoff)."""
        if self.p_max is None:
            d = (u - self.log_t) * self.inv_c1
            if d < _EXP_MAX:
                return self.mu * math.expm1(d) * g
            if g <= 0.0:
                return 0.0
            return math.exp(math.log(self.mu) + d + math.log(g))
        e = self._e(u)
        return g * self._capped_interference(u, e)

    def _gain_law(self, u):
        # the conditional z law barely moves once |log x| exceeds 700
        return self.model.conditional_gain_shape_rate(math.exp(min(max(u, -_EXP_MAX), _EXP_MAX)))

    def _capped_interference(self, u, e):
        k, r = self._gain_law(u)
        if e == math.inf:
            return self.p_max * k / r
        zstar = self.mu * e / self.p_max
        return (self.mu * e * reg_upper_gamma(k, r * zstar)
                + self.p_max * (k / r) * reg_lower_gamma(k + 1, r * zstar))

    def mgf(self, u):
        """E[(1 + P z/mu)^(-c) | x] for x above the cutoff."""
        if self.p_max is None:
            return math.exp(-self.kappa * (u - self.log_t))
        e = self._e(u)
        k, r = self._gain_law(u)
        if e == math.inf:
            uncapped, zstar = 0.0, math.inf
        else:
            zstar = self.mu * e / self.p_max
            uncapped = reg_upper_gamma(k, r * zstar) * math.exp(-self.kappa * (u - self.log_t))
        return uncapped + _capped_mgf(self.c, self.p_max / self.mu, k, r, zstar)


def _capped_mgf(c, g, k, r, zstar):
    # E[(1 + g z)^(-c); z < zstar] for z ~ Gamma(k, rate r)
    if zstar <= 0.0:
        return 0.0
    lg_k = math.lgamma(k)

    def f(z):
        if z <= 0.0:
            return 0.0
        return math.exp(-c * math.log1p(g * z) + (k - 1) * math.log(z) + k * math.log(r) - r * z - lg_k)

    scale = 1.0 / (g * c)
    hi = min(zstar, 200.0 * scale + 50.0 * k / r) if math.isfinite(zstar) else 200.0 * scale + 50.0 * k / r
    pts = [p for p in (scale, 10 * scale) if p < hi]
    val, err = integrate.quad(f, 0.0, hi, points=pts or None, epsabs=1e-15, epsrel=1e-10, limit=200)[:2]
    return val


def _branch(p: SystemParams, pol: PowerPolicy, mode: int) -> _Branch:
    if mode == 1:
        return _Branch(p.model, pol.mu1, pol.log_threshold1, pol.c, pol.p_max)
    return _Branch(p.model, pol.mu2, pol.log_threshold2, pol.c, pol.p_max)


def _max_weight(model, n):
    if n == 1:
        return lambda u: 1.0
    return lambda u: n * model.cdf_log(u) ** (n - 1)


def _mix_weight(model, M, alpha, one_minus_alpha):
    return lambda u: M * (alpha + one_minus_alpha * model.cdf_log(u)) ** (M - 1)


def _expect_interference(br: _Branch, weight, what, log_floor=-math.inf):
    model = br.model
    return integrate_log_ratio(
        lambda u: br.interference_x(u, model.pdf_log(u) * weight(u)), max(br.log_t, log_floor), what)


def _expect_mgf_above(br: _Branch, weight, what):
    model = br.model
    return integrate_log_ratio(
        lambda u: br.mgf(u) * model.xpdf_log(u) * weight(u), br.log_t, what)


def _cdf_at_threshold(model: FadingModel, log_t: float) -> float:
    if log_t == math.inf:
        return 1.0
    if log_t == -math.inf:
        return 0.0
    return model.cdf_log(log_t)


# ------------------------------------------------------------- identity

def idle_case_density_sum(model: FadingModel, M: int, alpha: float, x):
    """sum_k C(M,k) alpha^(M-k) (1-alpha)^(k-1) * k f(x) F(x)^(k-1)."""
    x = np.asarray(x, dtype=float)
    f = model.pdf(x)
    F = model.cdf(x)
    total = np.zeros_like(f)
    for k in range(1, M + 1):
        total = total + case_weight(M, k, alpha, 1.0 - alpha) * k * f * F ** (k - 1)
    return total


def idle_case_density_collapsed(model: FadingModel, M: int, alpha: float, x):
    """M f(x) (alpha + (1-alpha) F(x))^(M-1)."""
    x = np.asarray(x, dtype=float)
    return M * model.pdf(x) * (alpha + (1.0 - alpha) * model.cdf(x)) ** (M - 1)


# --------------------------------------------------------- interference

@dataclass(frozen=True)
class InterferenceTerms:
    busy: float
    miss_cases: tuple
    total: float


def interference_terms(pol: PowerPolicy, p: SystemParams,
                       log_ratio_floor: float = -math.inf) -> InterferenceTerms:
    """Per-scenario interference; ``log_ratio_floor`` restricts the average to
    frames whose selected ratio is at least exp(log_ratio_floor)."""
    inp = p.inputs
    M = p.M
    w1 = inp.alpha ** (M - 1) * p.rho * p.perf.pd
    busy = 0.0
    if w1 > 0.0:
        busy = w1 * _expect_interference(_branch(p, pol, 1), _max_weight(p.model, M),
                                         "busy-mode interference", log_ratio_floor)
    cases = []
    br2 = _branch(p, pol, 2)
    for k in range(1, M + 1):
        wk = case_weight(M, k, inp.alpha, inp.one_minus_alpha) * inp.miss_mass
        if wk == 0.0:
            cases.append(0.0)
            continue
        cases.append(wk * _expect_interference(br2, _max_weight(p.model, k),
                                               f"miss-case {k} interference", log_ratio_floor))
    return InterferenceTerms(busy=busy, miss_cases=tuple(cases), total=busy + sum(cases))


def average_interference(pol: PowerPolicy, p: SystemParams) -> float:
    """Interference power at the primary receiver averaged over fading,
    scenarios and idle-count cases (W)."""
    return interference_terms(pol, p).total


def average_interference_collapsed(pol: PowerPolicy, p: SystemParams) -> float:
    """Same quantity with the miss-case sum folded into one integral."""
    inp = p.inputs
    M = p.M
    w1 = inp.alpha ** (M - 1) * p.rho * p.perf.pd
    total = 0.0
    if w1 > 0.0:
        total += w1 * _expect_interference(_branch(p, pol, 1), _max_weight(p.model, M), "busy")
    if inp.miss_mass > 0.0:
        total += inp.miss_mass * _expect_interference(
            _branch(p, pol, 2), _mix_weight(p.model, M, inp.alpha, inp.one_minus_alpha), "miss")
    return total


def saturation_interference(pol: PowerPolicy, p: SystemParams) -> float:
    """Interference as lambda -> 0; finite only with a peak-power cap."""
    if pol.p_max is None:
        return math.inf
    return average_interference(pol.with_log_lambda(-math.inf), p)


def solve_lambda(p: SystemParams, log_lam_hint: float = 0.0, rtol: float = LAMBDA_RTOL) -> PowerPolicy:
    """Lagrange multiplier meeting the interference cap with equality.

    Bisection on log(lambda); the bracket grows from the hint with doubling
    steps. With a peak cap the constraint may be slack, in which case
    lambda = 0 is returned.
    """
    base = policy_constants(p)
    target = p.I_avg

    if base.p_max is not None and saturation_interference(base, p) <= target * (1.0 + rtol):
        return base.with_log_lambda(-math.inf)

    def excess(log_lam):
        return average_interference(base.with_log_lambda(log_lam), p) - target

    a = float(log_lam_hint)
    fa = excess(a)
    if abs(fa) <= rtol * target:
        return base.with_log_lambda(a)
    direction = 1.0 if fa > 0 else -1.0
    step = 1.0
    for _ in range(MAX_DOUBLINGS):
        b = a + direction * step
        fb = excess(b)
        if abs(fb) <= rtol * target:
            return base.with_log_lambda(b)
        if (fb > 0) != (fa > 0):
            break
        a, fa = b, fb
        step *= 2.0
    else:
        raise BracketFailure(f"no sign change in interference excess after {MAX_DOUBLINGS} doublings")

    lo, hi = (a, b) if a < b else (b, a)
    # excess is decreasing in log lambda: positive at lo, negative at hi
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = excess(mid)
        if abs(fm) <= rtol * target:
            return base.with_log_lambda(mid)
        if fm > 0:
            lo = mid
        else:
            hi = mid
    raise NumericalFailure(
        f"lambda bisection stalled at log(lambda) in [{lo}, {hi}] without meeting rtol={rtol}")


# ------------------------------------------------------ effective capacity

def rank_one_effective_capacity(p_states, phi, theta: float, T: float, Bc: float) -> float:
    """-log(sum_i p_i phi_i) / (theta T Bc).

    For a rank-one transition matrix the spectral radius of diag(phi) R is its
    trace, sum_i phi_i p_i, with phi_i = E[exp(-theta S)] in state i.
    """
    arg = float(np.dot(p_states, phi))
    return _re_from_arg(arg, theta, T, Bc)


def _re_from_arg(arg, theta, T, Bc):
    if not (arg > 0.0):
        raise NumericalFailure(f"MGF argument {arg} is not positive")
    if arg > 1.0 + 1e-9:
        raise NumericalFailure(f"MGF argument {arg} exceeds one")
    return max(0.0, -math.log(arg) / (theta * T * Bc))


@dataclass(frozen=True)
class EffCapResult:
    re: float
    lam: float
    log_lam: float
    achieved_interference: float
    terms: dict = field(default_factory=dict)
    re_without_mass: float = math.nan
    collapsed_discrepancy: float = 0.0


def effective_capacity(pol: PowerPolicy, p: SystemParams, check_collapsed: bool = True) -> EffCapResult:
    """Effective capacity (bits/s/Hz) of the (M+2)-state chain under ``pol``.

    Zero-power frames below a cutoff contribute MGF 1, so each ON state
    carries the mass F_n(cutoff) next to its integral.
    """
    inp = p.inputs
    M, model = p.M, p.model
    probs = transition_probabilities(inp).p

    br1 = _branch(p, pol, 1)
    br2 = _branch(p, pol, 2)
    F1 = _cdf_at_threshold(model, br1.log_t)
    F2 = _cdf_at_threshold(model, br2.log_t)

    busy_mass = F1 ** M
    busy_int = _expect_mgf_above(br1, _max_weight(model, M), "busy-mode MGF") if probs[0] > 0 else 0.0
    phi = np.empty(M + 2)
    phi[0] = busy_mass + busy_int
    idle_masses, idle_ints = [], []
    for k in range(1, M + 1):
        if probs[k] == 0.0:
            mass, integral = 0.0, 0.0
        else:
            mass = F2 ** k
            integral = _expect_mgf_above(br2, _max_weight(model, k), f"idle case {k} MGF")
        idle_masses.append(mass)
        idle_ints.append(integral)
        phi[k] = mass + integral
    phi[M + 1] = 1.0

    contrib = probs * phi
    arg = float(np.sum(contrib))
    re = _re_from_arg(arg, p.theta, p.T, p.Bc)

    below = probs[0] * busy_mass + sum(probs[k] * idle_masses[k - 1] for k in range(1, M + 1))
    arg_nomass = arg - below
    re_nomass = -math.log(arg_nomass) / (p.theta * p.T * p.Bc) if arg_nomass > 0 else math.inf

    discrepancy = 0.0
    if check_collapsed:
        a, a1 = inp.alpha, inp.one_minus_alpha
        collapsed = contrib[0] + contrib[M + 1]
        if inp.idle_mass > 0.0:
            mix_int = _expect_mgf_above(br2, _mix_weight(model, M, a, a1), "collapsed idle MGF")
            mix_mass = ((a + a1 * F2) ** M - a ** M) / a1
            collapsed += inp.idle_mass * (mix_int + mix_mass)
        discrepancy = abs(collapsed - arg) / arg
        if discrepancy > 1e-7:
            raise NumericalFailure(
                f"collapsed and per-case MGF sums disagree: {collapsed} vs {arg}")

    terms = {
        "state_probs": probs.tolist(),
        "state_mgf": phi.tolist(),
        "busy": float(contrib[0]),
        "idle_cases": [float(v) for v in contrib[1:M + 1]],
        "off": float(contrib[M + 1]),
        "busy_below_threshold": float(probs[0] * busy_mass),
        "idle_below_threshold": [float(probs[k] * idle_masses[k - 1]) for k in range(1, M + 1)],
        "log_argument": arg,
    }
    log_lam = pol.log_lam
    return EffCapResult(
        re=re,
        lam=math.exp(log_lam) if log_lam is not None else math.nan,
        log_lam=log_lam,
        achieved_interference=average_interference(pol, p),
        terms=terms,
        re_without_mass=re_nomass,
        collapsed_discrepancy=discrepancy,
    )


def optimal_effective_capacity(p: SystemParams, log_lam_hint: float = 0.0) -> EffCapResult:
    """Solve for lambda, then evaluate the effective capacity."""
    return effective_capacity(solve_lambda(p, log_lam_hint), p)


# ---------------------------------------------------------- small utilities

@dataclass(frozen=True)
class OutageCap:
    phi: float
    feasible: bool


def outage_to_interference_cap(R_min: float, P_out: float, P_pri: float,
                               sigma_np2: float, Bc: float) -> OutageCap:
    """Average-interference cap that guarantees a primary outage target.

    Under Rayleigh primary fading, keeping E[P z_sp] below
    -ln(1 - P_out) P_pri / (2^R_min - 1) - sigma_np2 Bc bounds
    Pr{primary rate <= R_min} by P_out. A negative cap means the target is
    unreachable even without secondary interference.
    """
    if not (0.0 < P_out < 1.0):
        raise ValueError("P_out must lie in (0, 1)")
    if R_min < R_MIN_FLOOR:
        raise ValueError(f"R_min below {R_MIN_FLOOR} gives an unbounded cap")
    if P_pri <= 0 or sigma_np2 <= 0 or Bc <= 0:
        raise ValueError("P_pri, sigma_np2 and Bc must be positive")
    phi = -math.log1p(-P_out) * P_pri / math.expm1(R_min * LN2) - sigma_np2 * Bc
    return OutageCap(phi=phi, feasible=phi >= 0.0)


def delay_bound(theta: float, arrival_rate: float, d_max: float, c_const: float) -> float:
    """Delay-violation bound c * exp(-theta a d_max / 2), clamped to 1."""
    if theta <= 0 or arrival_rate <= 0 or c_const <= 0 or d_max < 0:
        raise ValueError("theta, arrival rate and c must be positive, d_max nonnegative")
    return min(1.0, c_const * math.exp(-theta * arrival_rate * d_max / 2.0))
