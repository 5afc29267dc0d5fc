"""The (M+2)-state ON/OFF model of multi-channel sensing and transmission.

State 1: every channel is declared busy; the best of the M channels is used
with the busy-mode power P1 (scenarios 1 and 2). States k+1, k = 1..M: k
channels are declared idle and the best of them is used with P2 and is truly
idle (scenario 4). State M+2: the chosen idle-declared channel is actually
busy (scenario 3, a miss), the rate overshoots capacity and nothing is
delivered.

Occupancy and sensing outcomes are independent across channels and frames,
so every row of the transition matrix is the same vector p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sensing import SensingPerformance


@dataclass(frozen=True)
class ModelInputs:
    M: int
    rho: float
    perf: SensingPerformance

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        if not (0.0 <= self.rho <= 1.0):
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        expected = self.rho * self.perf.pd + (1.0 - self.rho) * self.perf.pf
        if abs(expected - self.perf.alpha) > 1e-12:
            raise ValueError("perf.alpha is inconsistent with rho, pd and pf")

    @property
    def alpha(self) -> float:
        return self.perf.alpha

    @property
    def one_minus_alpha(self) -> float:
        # direct form avoids cancellation when alpha is close to 1
        return self.rho * (1.0 - self.perf.pd) + (1.0 - self.rho) * (1.0 - self.perf.pf)

    @property
    def miss_mass(self) -> float:
        """rho (1 - pd): an idle declaration on a busy channel."""
        return self.rho * (1.0 - self.perf.pd)

    @property
    def idle_mass(self) -> float:
        """(1 - rho)(1 - pf): an idle declaration on an idle channel."""
        return (1.0 - self.rho) * (1.0 - self.perf.pf)


@dataclass(frozen=True)
class TransitionModel:
    p: np.ndarray

    @property
    def M(self) -> int:
        return len(self.p) - 2

    def matrix(self) -> np.ndarray:
        """Rank-one transition matrix, every row equal to p."""
        return np.tile(self.p, (len(self.p), 1))


@dataclass(frozen=True)
class ScenarioProbs:
    ps1: float
    ps2: float
    ps3: float
    ps4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.ps1, self.ps2, self.ps3, self.ps4])


@dataclass(frozen=True)
class RateContext:
    Bc: float
    sigma_n2: float
    sigma_sp2: float

    def __post_init__(self):
        if self.Bc <= 0 or self.sigma_n2 <= 0 or self.sigma_sp2 < 0:
            raise ValueError("Bc and sigma_n2 must be positive, sigma_sp2 nonnegative")


def _xlogy(x: float, y: float) -> float:
    if x == 0:
        return 0.0
    if y == 0:
        return -math.inf
    return x * math.log(y)


def log_binom(M: int, k: int) -> float:
    return math.lgamma(M + 1) - math.lgamma(k + 1) - math.lgamma(M - k + 1)


def case_weight(M: int, k: int, alpha: float, one_minus_alpha: float) -> float:
    """C(M, k) alpha^(M-k) (1-alpha)^(k-1): k of M channels declared idle,
    divided by the probability (1-alpha) that the chosen one was declared idle."""
    lw = log_binom(M, k) + _xlogy(M - k, alpha) + _xlogy(k - 1, one_minus_alpha)
    return math.exp(lw)


def geometric_factor(M: int, alpha: float, one_minus_alpha: float) -> float:
    """(1 - alpha^M) / (1 - alpha), continued to M at alpha = 1."""
    if one_minus_alpha == 0.0:
        return float(M)
    if M <= 64:
        # sum_{j<M} alpha^j: no cancellation, exact for M = 1
        total, term = 0.0, 1.0
        for _ in range(M):
            total += term
            term *= alpha
        return total
    if alpha < 0.5:
        return (1.0 - alpha ** M) / one_minus_alpha
    return -math.expm1(M * math.log1p(-one_minus_alpha)) / one_minus_alpha


def transition_probabilities(inp: ModelInputs) -> TransitionModel:
    M = inp.M
    a, a1 = inp.alpha, inp.one_minus_alpha
    p = np.empty(M + 2)
    p[0] = a ** M
    for k in range(1, M + 1):
        p[k] = case_weight(M, k, a, a1) * inp.idle_mass
    # products of rounded factors can land an ulp above 1
    p[M + 1] = min(geometric_factor(M, a, a1) * inp.miss_mass, 1.0)
    return TransitionModel(p)


def scenario_probabilities(inp: ModelInputs) -> ScenarioProbs:
    M = inp.M
    a, a1 = inp.alpha, inp.one_minus_alpha
    pd, pf, rho = inp.perf.pd, inp.perf.pf, inp.rho
    all_busy = a ** (M - 1)
    g = geometric_factor(M, a, a1)
    return ScenarioProbs(
        ps1=all_busy * rho * pd,
        ps2=all_busy * (1.0 - rho) * pf,
        ps3=min(g * inp.miss_mass, 1.0),
        ps4=min(g * inp.idle_mass, 1.0),
    )


def interference_probability(inp: ModelInputs) -> tuple[float, float]:
    """(P_int, lim_{M->inf} P_int): chance the chosen channel is truly busy."""
    s = scenario_probabilities(inp)
    p_int = s.ps1 + s.ps3
    if inp.one_minus_alpha == 0.0:
        # alpha = 1: every channel always declared busy, P_int does not move with M
        return p_int, p_int
    return p_int, inp.miss_mass / inp.one_minus_alpha


def interference_probability_closed_form(inp: ModelInputs) -> float:
    """rho (1 - alpha^M - pd + pd alpha^(M-1)) / (1 - alpha); alpha < 1 only."""
    a = inp.alpha
    pd = inp.perf.pd
    M = inp.M
    return inp.rho * (1.0 - a ** M - pd + pd * a ** (M - 1)) / inp.one_minus_alpha


def link_rates(ctx: RateContext, P1, P2, z):
    """Rates r1, r2 and capacities C1..C4 (bits/s) for the four scenarios.

    r1 = C1 (busy-mode rate sized for noise plus primary interference),
    r2 = C4 (idle-mode rate sized for noise only).
    """
    P1 = np.asarray(P1, dtype=float)
    P2 = np.asarray(P2, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(P1 < 0) or np.any(P2 < 0) or np.any(z < 0):
        raise ValueError("powers and gains must be nonnegative")
    noisy = ctx.Bc * (ctx.sigma_n2 + ctx.sigma_sp2)
    clean = ctx.Bc * ctx.sigma_n2
    C1 = ctx.Bc * np.log2(1.0 + P1 * z / noisy)
    C2 = ctx.Bc * np.log2(1.0 + P1 * z / clean)
    C3 = ctx.Bc * np.log2(1.0 + P2 * z / noisy)
    C4 = ctx.Bc * np.log2(1.0 + P2 * z / clean)
    r1, r2 = C1, C4
    return r1, r2, C1, C2, C3, C4
