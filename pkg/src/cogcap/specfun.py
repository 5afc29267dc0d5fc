"""Scalar special functions used by the energy-detector statistics.

Only two are needed: the regularized incomplete gamma pair P(a, x)/Q(a, x)
and the Gaussian tail Q-function. The incomplete gamma follows the usual
series / continued-fraction split at x = a + 1; the common prefactor
x^a e^{-x} / Gamma(a) is evaluated through ``log1pmx`` and the Stirling
remainder so that shapes up to ~1e4 keep ~1e-13 absolute accuracy.
"""
import math

_EPS = 1e-17
# a few ulps of 1: the Lentz factors cannot settle closer than that
_CF_EPS = 4e-16
_TINY = 1e-300
_MAX_ITER = 200_000
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _check_finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite argument: {v!r}")


def log1pmx(t: float) -> float:
    """log(1 + t) - t, accurate for small |t|."""
    if t <= -1.0:
        raise ValueError("log1pmx requires t > -1")
    if abs(t) > 0.25:
        return math.log1p(t) - t
    # -t^2/2 + t^3/3 - ...
    term = -t * t
    total = 0.0
    k = 2
    while True:
        contrib = term / k
        total += contrib
        if abs(contrib) <= 1e-18 * abs(total):
            return total
        term *= -t
        k += 1


def stirling_remainder(a: float) -> float:
    """lgamma(a) - [(a - 1/2) log a - a + log(2 pi)/2]."""
    if a < 10.0:
        return math.lgamma(a) - ((a - 0.5) * math.log(a) - a + _HALF_LOG_2PI)
    inv = 1.0 / a
    inv2 = inv * inv
    return inv * (1.0 / 12 - inv2 * (1.0 / 360 - inv2 * (1.0 / 1260 - inv2 * (1.0 / 1680 - inv2 / 1188))))


def _log_prefactor(a: float, x: float) -> float:
    # log(x^a e^{-x} / Gamma(a))
    if a < 10.0:
        return a * math.log(x) - x - math.lgamma(a)
    if x < 0.75 * a:
        # (x - a)/a would round to -1 for x << a
        core = a * (math.log(x) - math.log(a)) - (x - a)
    else:
        core = a * log1pmx((x - a) / a)
    return core + 0.5 * math.log(a) - _HALF_LOG_2PI - stirling_remainder(a)


def _lower_series(a: float, x: float) -> float:
    # P(a, x) = x^a e^{-x} / Gamma(a + 1) * sum_n x^n / ((a+1)...(a+n))
    term = 1.0
    total = 1.0
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if term < total * _EPS:
            return math.exp(_log_prefactor(a, x) - math.log(a)) * total
    raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _upper_cf(a: float, x: float) -> float:
    # modified Lentz evaluation of the Legendre continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return math.exp(_log_prefactor(a, x)) * h
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def _gamma_pair(shape: float, limit: float) -> tuple[float, float]:
    _check_finite(shape, limit)
    if shape <= 0.0:
        raise ValueError(f"shape must be positive, got {shape}")
    if limit < 0.0:
        raise ValueError(f"limit must be nonnegative, got {limit}")
    if limit == 0.0:
        return 0.0, 1.0
    if limit < shape + 1.0:
        p = min(_lower_series(shape, limit), 1.0)
        return p, 1.0 - p
    q = min(_upper_cf(shape, limit), 1.0)
    return 1.0 - q, q


def reg_lower_gamma(shape: float, limit: float) -> float:
    """Regularized lower incomplete gamma gamma(shape, limit) / Gamma(shape).

    Note the argument order: shape first, integration limit second.
    """
    return _gamma_pair(shape, limit)[0]


def reg_upper_gamma(shape: float, limit: float) -> float:
    """Complement 1 - reg_lower_gamma(shape, limit), computed without cancellation."""
    return _gamma_pair(shape, limit)[1]


def gaussian_q(x: float) -> float:
    """Upper tail probability of the standard normal distribution."""
    _check_finite(x)
    return 0.5 * math.erfc(x / math.sqrt(2.0))
