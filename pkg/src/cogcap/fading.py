"""Unit-mean fading laws and the gain ratio x = z / z_sp.

Both gains are independent with the same law, so x/(1+x) is Beta(m, m)
distributed (m = 1 for Rayleigh). The selected channel in a frame carries the
largest ratio among n candidates, whose cdf is F(x)**n.

The quadrature code works in u = log(x); the ``*_log`` helpers evaluate the
same quantities from u without forming x, which keeps thresholds of order
1e-300 usable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _expit(u):
    if u >= 0.0:
        return 1.0 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return e / (1.0 + e)


def _as_nonneg(x):
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise ValueError("ratio argument must be nonnegative")
    return arr


@dataclass(frozen=True)
class GainPair:
    z: float | np.ndarray
    z_sp: float | np.ndarray


class FadingModel:
    """Interface: ratio pdf/cdf (linear and log domain) and a gain sampler."""

    name = "abstract"
    m = 1

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def pdf_log(self, u: float) -> float:
        """f(e^u)."""
        raise NotImplementedError

    def cdf_log(self, u: float) -> float:
        """F(e^u)."""
        raise NotImplementedError

    def xpdf_log(self, u: float) -> float:
        """x f(x) at x = e^u, i.e. the density of log(z/z_sp)."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def __repr__(self):
        return self.name


class Rayleigh(FadingModel):
    """Exponential power gains: f(x) = 1/(1+x)^2, F(x) = x/(1+x)."""

    name = "rayleigh"
    m = 1

    def pdf(self, x):
        x = _as_nonneg(x)
        return 1.0 / (1.0 + x) ** 2

    def cdf(self, x):
        x = _as_nonneg(x)
        with np.errstate(invalid="ignore"):
            out = x / (1.0 + x)
        return np.where(np.isinf(x), 1.0, out)

    def pdf_log(self, u):
        w = _expit(-u)
        return w * w

    def cdf_log(self, u):
        return _expit(u)

    def xpdf_log(self, u):
        return _expit(u) * _expit(-u)

    def sample(self, rng, size=None):
        return rng.standard_exponential(size)

    def conditional_gain_shape_rate(self, x):
        return 2, 1.0 + 1.0 / x

    def __eq__(self, other):
        return isinstance(other, Rayleigh)

    def __hash__(self):
        return hash("rayleigh")


class Nakagami(FadingModel):
    """Nakagami-m amplitude, i.e. Gamma(m, 1/m) power gain with unit mean.

    Integer m only: the ratio cdf is then a finite binomial sum in
    s = x/(1+x).
    """

    def __init__(self, m: int):
        if int(m) != m or m < 1:
            raise ValueError(f"Nakagami m must be a positive integer, got {m}")
        self.m = int(m)
        self.name = f"nakagami(m={self.m})"
        # 1 / B(m, m) = Gamma(2m) / Gamma(m)^2
        self._inv_beta = math.exp(math.lgamma(2 * self.m) - 2 * math.lgamma(self.m))
        self._binom = [math.comb(2 * self.m - 1, j) for j in range(2 * self.m)]

    def _cdf_sw(self, s, w):
        m = self.m
        total = 0.0
        for j in range(m, 2 * m):
            total = total + self._binom[j] * s ** j * w ** (2 * m - 1 - j)
        return total

    def pdf(self, x):
        x = _as_nonneg(x)
        m = self.m
        with np.errstate(invalid="ignore"):
            s = np.where(np.isinf(x), 1.0, x / (1.0 + x))
        w = 1.0 / (1.0 + x)
        return self._inv_beta * s ** (m - 1) * w ** (m + 1)

    def cdf(self, x):
        x = _as_nonneg(x)
        with np.errstate(invalid="ignore"):
            s = np.where(np.isinf(x), 1.0, x / (1.0 + x))
        w = 1.0 / (1.0 + x)
        return self._cdf_sw(s, w)

    def pdf_log(self, u):
        s = _expit(u)
        w = _expit(-u)
        return self._inv_beta * s ** (self.m - 1) * w ** (self.m + 1)

    def cdf_log(self, u):
        return self._cdf_sw(_expit(u), _expit(-u))

    def xpdf_log(self, u):
        return self._inv_beta * (_expit(u) * _expit(-u)) ** self.m

    def sample(self, rng, size=None):
        return rng.gamma(self.m, 1.0 / self.m, size)

    def conditional_gain_shape_rate(self, x):
        """z given z/z_sp = x is Gamma(2m, rate m(1 + 1/x))."""
        return 2 * self.m, self.m * (1.0 + 1.0 / x)

    def __eq__(self, other):
        return isinstance(other, Nakagami) and other.m == self.m

    def __hash__(self):
        return hash(("nakagami", self.m))


def make_model(kind: str, m: int = 1) -> FadingModel:
    kind = kind.strip().lower()
    if kind == "rayleigh":
        return Rayleigh()
    if kind == "nakagami":
        return Nakagami(m)
    raise ValueError(f"unknown fading model {kind!r}")


def ratio_pdf(model: FadingModel, x):
    return model.pdf(x)


def ratio_cdf(model: FadingModel, x):
    return model.cdf(x)


def max_ratio_pdf(model: FadingModel, n: int, x):
    """Density of the largest of n i.i.d. ratios: n f(x) F(x)^(n-1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * model.pdf(x) * model.cdf(x) ** (n - 1)


def max_ratio_cdf(model: FadingModel, n: int, x):
    if n < 1:
        raise ValueError("n must be >= 1")
    return model.cdf(x) ** n


def sample_gain_pair(model: FadingModel, rng: np.random.Generator, size=None) -> GainPair:
    """Independent unit-mean (z, z_sp) draws."""
    z = model.sample(rng, size)
    z_sp = model.sample(rng, size)
    return GainPair(z, z_sp)


def ratio_log_quantile(model: FadingModel, prob: float) -> float:
    """log x with F(x) = prob, by bisection in u = log x."""
    if not (0.0 < prob < 1.0):
        raise ValueError("prob must lie strictly inside (0, 1)")
    lo, hi = -745.0, 745.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if model.cdf_log(mid) < prob:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)
