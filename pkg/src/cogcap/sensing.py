"""Energy-detector false-alarm and detection probabilities.

The detector averages |y|^2 over n = round(N*B) complex samples and compares
the average with a threshold gamma. Under either hypothesis the statistic is
a scaled Gamma(n) variable, so both tail probabilities are regularized upper
incomplete gamma values. A CLT variant replaces the Gamma law with a normal
of matching mean and variance.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .specfun import gaussian_q, reg_upper_gamma


class Method(str, enum.Enum):
    EXACT = "exact"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class SensingParams:
    """Detector configuration for one channel.

    ``N`` sensing time (s), ``B`` channel bandwidth (Hz), ``sigma_n2`` and
    ``sigma_sp2`` noise and primary-signal variance per complex symbol (W),
    ``gamma`` detection threshold (W).
    """

    N: float
    B: float
    sigma_n2: float
    sigma_sp2: float
    gamma: float = 0.0
    method: Method = Method.EXACT
    n_samples: int = field(init=False)
    nb_rounding: float = field(init=False)

    def __post_init__(self):
        for name in ("N", "B", "sigma_n2", "sigma_sp2", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.N <= 0 or self.B <= 0 or self.sigma_n2 <= 0:
            raise ValueError("N, B and sigma_n2 must be positive")
        if self.sigma_sp2 < 0 or self.gamma < 0:
            raise ValueError("sigma_sp2 and gamma must be nonnegative")
        nb = self.N * self.B
        if nb < 1.0:
            raise ValueError(f"N*B = {nb} is below one sensing sample")
        n = max(1, int(round(nb)))
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "n_samples", n)
        object.__setattr__(self, "nb_rounding", n - nb)

    def with_gamma(self, gamma: float) -> "SensingParams":
        return replace(self, gamma=gamma)


@dataclass(frozen=True)
class SensingPerformance:
    pf: float
    pd: float
    alpha: float

    def __post_init__(self):
        for name in ("pf", "pd", "alpha"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @classmethod
    def from_rates(cls, pf: float, pd: float, rho: float) -> "SensingPerformance":
        return cls(pf=pf, pd=pd, alpha=busy_detection_alpha(rho, pf, pd))


def _tail(p: SensingParams, variance: float) -> float:
    n = p.n_samples
    if p.method is Method.EXACT:
        # Pr{Gamma(n, variance/n) > gamma}; reg_upper_gamma takes (shape, limit)
        return reg_upper_gamma(float(n), n * p.gamma / variance)
    return gaussian_q((p.gamma - variance) / (variance / math.sqrt(n)))


def detector_performance(p: SensingParams) -> tuple[float, float]:
    """Return (pf, pd) for the configured threshold."""
    pf = _tail(p, p.sigma_n2)
    pd = _tail(p, p.sigma_n2 + p.sigma_sp2)
    return pf, pd


def busy_detection_alpha(rho: float, pf: float, pd: float) -> float:
    """Probability that a channel is declared busy: rho*pd + (1 - rho)*pf."""
    for name, v in (("rho", rho), ("pf", pf), ("pd", pd)):
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    return rho * pd + (1.0 - rho) * pf


def threshold_for_target(p: SensingParams, pf: float | None = None, pd: float | None = None,
                         tol: float = 1e-12) -> float:
    """Invert the detector curve: the threshold giving the requested pf or pd.

    Exactly one of ``pf``/``pd`` must be given, strictly inside (0, 1).
    Both curves are strictly decreasing in gamma so bisection is safe.
    """
    if (pf is None) == (pd is None):
        raise ValueError("give exactly one of pf or pd")
    target = pf if pf is not None else pd
    index = 0 if pf is not None else 1
    if not (0.0 < target < 1.0):
        raise ValueError(f"no bracket: target {target} must lie strictly inside (0, 1)")

    def curve(g):
        return detector_performance(p.with_gamma(g))[index]

    scale = p.sigma_n2 if index == 0 else p.sigma_n2 + p.sigma_sp2
    lo, hi = 0.0, scale
    n_grow = 0
    while curve(hi) > target:
        lo, hi = hi, 2.0 * hi
        n_grow += 1
        if n_grow > 2000:
            raise ArithmeticError("could not bracket the threshold")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        v = curve(mid)
        if abs(v - target) <= tol:
            return mid
        if v > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def roc_point(p: SensingParams, pd: float) -> tuple[float, float, float]:
    """(gamma, pf, pd) on the detector ROC for a target detection probability."""
    g = threshold_for_target(p, pd=pd)
    pf_, pd_ = detector_performance(p.with_gamma(g))
    return g, pf_, pd_
