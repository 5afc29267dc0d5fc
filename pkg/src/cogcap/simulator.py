"""Frame-level Monte Carlo of the sensing/selection/transmission loop.

Each frame draws channel occupancy, sensing decisions and gain pairs,
applies the channel-selection rule and the power policy, and records the
delivered bits and the interference seen by the primary receiver. Frames are
i.i.d., so averages of exp(-theta S) over frames estimate the per-frame MGF
and hence the effective capacity directly.

Randomness comes from Philox streams keyed by (seed, stream, chunk index),
so results depend only on the seed and the frame count, never on the number
of workers.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .optimizer import PowerPolicy, SystemParams

CHUNK = 1 << 16
MIN_FRAMES_FOR_ESTIMATE = 10_000
MIN_EXCEEDANCES = 100

_STREAM_FRAMES = 0
_STREAM_QUEUE = 1


def _rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(stream, chunk))
    return np.random.Generator(np.random.Philox(ss))


def _chunks(n_frames: int, chunk: int = CHUNK):
    start, idx = 0, 0
    while start < n_frames:
        size = min(chunk, n_frames - start)
        yield idx, size
        start += size
        idx += 1


@dataclass
class FrameBatch:
    """Per-frame outcomes of one batch (struct of arrays)."""

    scenario: np.ndarray        # 1..4
    k_idle: np.ndarray          # channels declared idle
    selected_log_ratio: np.ndarray
    z: np.ndarray
    z_sp: np.ndarray
    power: np.ndarray
    service_bits: np.ndarray
    interference_w: np.ndarray
    state_index: np.ndarray     # 1..M+2

    @property
    def selected_ratio(self) -> np.ndarray:
        return np.exp(self.selected_log_ratio)


def _policy_inputs(p: SystemParams, pol: PowerPolicy):
    if pol.log_lam is None:
        raise ValueError("policy has no lambda; solve it first")
    if not math.isclose(pol.c, p.Bc * (p.T - p.N) * p.theta / math.log(2.0), rel_tol=1e-12):
        raise ValueError("policy constants do not belong to these parameters")
    p_max = math.inf if pol.p_max is None else float(pol.p_max)
    return (pol.log_threshold1, pol.log_threshold2, 1.0 / (pol.c + 1.0),
            pol.mu1, pol.mu2, p_max)


def _draw(p: SystemParams, rng: np.random.Generator, n: int):
    M = p.M
    busy = rng.random((n, M)) < p.rho
    u = rng.random((n, M))
    detected = np.where(busy, u < p.perf.pd, u < p.perf.pf)
    z = p.model.sample(rng, (n, M))
    zsp = p.model.sample(rng, (n, M))
    sel_u = rng.random(n)
    return busy, detected, z, zsp, sel_u


def _run_batch(p: SystemParams, pol: PowerPolicy, rng, n: int, random_select: bool) -> FrameBatch:
    busy, detected, z, zsp, sel_u = _draw(p, rng, n)
    lt1, lt2, inv_c1, mu1, mu2, p_max = _policy_inputs(p, pol)
    scen = np.empty(n, dtype=np.int8)
    k_idle = np.empty(n, dtype=np.int64)
    lrsel = np.empty(n)
    zsel = np.empty(n)
    zspsel = np.empty(n)
    power = np.empty(n)
    service = np.empty(n)
    interference = np.empty(n)
    _kernels.frame_kernel(busy, detected, z, zsp, sel_u, lt1, lt2, inv_c1, mu1, mu2, p_max,
                          p.Bc, p.sigma_n2, p.sigma_sp2, p.T - p.N, bool(random_select),
                          scen, k_idle, lrsel, zsel, zspsel, power, service, interference)
    state = np.where(scen == _kernels.SCEN_MISS, p.M + 2,
                     np.where(scen == _kernels.SCEN_IDLE_HIT, k_idle + 1, 1))
    return FrameBatch(scen, k_idle, lrsel, zsel, zspsel, power, service, interference, state)


def simulate_frame_outcomes(p: SystemParams, pol: PowerPolicy, n_frames: int, seed: int,
                            random_select: bool = False) -> FrameBatch:
    """All per-frame outcomes, for tests and diagnostics (memory grows with n_frames)."""
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    parts = [_run_batch(p, pol, _rng(seed, _STREAM_FRAMES, i), n, random_select)
             for i, n in _chunks(n_frames)]
    return FrameBatch(*(np.concatenate([getattr(b, f) for b in parts])
                        for f in FrameBatch.__dataclass_fields__))


@dataclass
class FrameAggregates:
    """Associative sums over simulated frames."""

    theta: float
    M: int
    n: int = 0
    sum_exp: float = 0.0
    sum_exp2: float = 0.0
    sum_int: float = 0.0
    sum_int2: float = 0.0
    sum_service: float = 0.0
    sum_service2: float = 0.0
    scenario_counts: np.ndarray = field(default=None)
    state_counts: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.scenario_counts is None:
            self.scenario_counts = np.zeros(4, dtype=np.int64)
        if self.state_counts is None:
            self.state_counts = np.zeros(self.M + 2, dtype=np.int64)

    @classmethod
    def from_batch(cls, b: FrameBatch, theta: float, M: int) -> "FrameAggregates":
        e = np.exp(-theta * b.service_bits)
        return cls(
            theta=theta, M=M, n=len(e),
            sum_exp=float(np.sum(e)), sum_exp2=float(np.sum(e * e)),
            sum_int=float(np.sum(b.interference_w)),
            sum_int2=float(np.sum(b.interference_w ** 2)),
            sum_service=float(np.sum(b.service_bits)),
            sum_service2=float(np.sum(b.service_bits ** 2)),
            scenario_counts=np.bincount(b.scenario, minlength=5)[1:].astype(np.int64),
            state_counts=np.bincount(b.state_index, minlength=M + 3)[1:].astype(np.int64),
        )

    def merge(self, other: "FrameAggregates") -> "FrameAggregates":
        if other.M != self.M or other.theta != self.theta:
            raise ValueError("cannot merge aggregates of different systems")
        return FrameAggregates(
            theta=self.theta, M=self.M, n=self.n + other.n,
            sum_exp=self.sum_exp + other.sum_exp, sum_exp2=self.sum_exp2 + other.sum_exp2,
            sum_int=self.sum_int + other.sum_int, sum_int2=self.sum_int2 + other.sum_int2,
            sum_service=self.sum_service + other.sum_service,
            sum_service2=self.sum_service2 + other.sum_service2,
            scenario_counts=self.scenario_counts + other.scenario_counts,
            state_counts=self.state_counts + other.state_counts,
        )

    @staticmethod
    def _mean_se(s, s2, n):
        mean = s / n
        var = max(s2 / n - mean * mean, 0.0) * n / (n - 1) if n > 1 else math.inf
        return mean, math.sqrt(var / n)

    @property
    def mean_exp_neg_theta_service(self) -> float:
        return self.sum_exp / self.n

    @property
    def se_exp_neg_theta_service(self) -> float:
        return self._mean_se(self.sum_exp, self.sum_exp2, self.n)[1]

    @property
    def mean_interference(self) -> float:
        return self.sum_int / self.n

    @property
    def se_interference(self) -> float:
        return self._mean_se(self.sum_int, self.sum_int2, self.n)[1]

    @property
    def mean_service(self) -> float:
        return self.sum_service / self.n

    @property
    def scenario_frequencies(self) -> np.ndarray:
        return self.scenario_counts / self.n

    @property
    def state_frequencies(self) -> np.ndarray:
        return self.state_counts / self.n


def simulate_frames(p: SystemParams, pol: PowerPolicy, n_frames: int, seed: int,
                    workers: int = 1, random_select: bool = False) -> FrameAggregates:
    """Aggregate statistics of ``n_frames`` simulated frames.

    Chunks are processed in any order by ``workers`` threads and merged in
    chunk order, so the result is bit-identical for every worker count.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")

    def one(job):
        i, n = job
        b = _run_batch(p, pol, _rng(seed, _STREAM_FRAMES, i), n, random_select)
        return FrameAggregates.from_batch(b, p.theta, p.M)

    jobs = list(_chunks(n_frames))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(one, jobs))
    else:
        parts = [one(j) for j in jobs]
    total = FrameAggregates(theta=p.theta, M=p.M)
    for a in parts:
        total = total.merge(a)
    return total


@dataclass(frozen=True)
class McEstimate:
    re: float
    se: float
    mean_exp: float
    n_frames: int


def estimate_effective_capacity_mc(agg: FrameAggregates, p: SystemParams,
                                   allow_small: bool = False) -> McEstimate:
    """Effective capacity from the empirical per-frame MGF, delta-method SE."""
    if agg.n < MIN_FRAMES_FOR_ESTIMATE and not allow_small:
        raise ValueError(f"need at least {MIN_FRAMES_FOR_ESTIMATE} frames, got {agg.n}")
    if agg.theta != p.theta:
        raise ValueError("aggregates were collected at a different theta")
    mean = agg.mean_exp_neg_theta_service
    if not mean > 0.0:
        raise ArithmeticError("empirical MGF is zero; the estimate is undefined")
    scale = p.theta * p.T * p.Bc
    re = max(0.0, -math.log(mean) / scale)
    se = agg.se_exp_neg_theta_service / (mean * scale)
    return McEstimate(re=re, se=se, mean_exp=mean, n_frames=agg.n)


# --------------------------------------------------------------- queue

@dataclass
class QueueTrace:
    """Backlog statistics of a constant-arrival queue.

    ``q`` holds the attained backlog levels used as tail thresholds (each
    grid point is moved up to the smallest backlog actually reached at or
    above it, which is where the empirical tail steps down); ``tail`` holds
    P(Q >= q). ``slope`` is the fitted decay rate (1/bits, positive).
    """

    arrival: float
    mean_service: float
    n_frames: int
    q: np.ndarray
    tail: np.ndarray
    exceedances: np.ndarray
    fit_mask: np.ndarray
    slope: float
    slope_se: float
    backlog: np.ndarray | None = None
    unstable: bool = False


def _fit_tail(q, counts, n):
    """Weighted least squares of log P(Q >= q) on q.

    Uses thresholds with at least MIN_EXCEEDANCES exceedances in the upper
    three quarters of the usable range (the lowest levels still carry the
    non-exponential head of the distribution). Weights are inverse binomial
    variances of the log-probabilities.
    """
    usable = (counts >= MIN_EXCEEDANCES) & (q > 0)
    if not np.any(usable):
        return usable, math.nan, math.nan
    q_top = q[usable].max()
    mask = usable & (q >= 0.25 * q_top)
    if mask.sum() < 2:
        idx = np.flatnonzero(usable)[-2:]
        mask = np.zeros_like(usable)
        mask[idx] = True
    if mask.sum() < 2:
        return mask, math.nan, math.nan
    P = counts[mask] / n
    y = np.log(P)
    w = n * P / (1.0 - P + 1.0 / n)
    x = q[mask]
    sw = w.sum()
    xm = (w * x).sum() / sw
    ym = (w * y).sum() / sw
    sxx = (w * (x - xm) ** 2).sum()
    if sxx <= 0:
        return mask, math.nan, math.nan
    slope = (w * (x - xm) * (y - ym)).sum() / sxx
    return mask, -slope, math.sqrt(1.0 / sxx)


def default_q_grid(theta: float, size: int = 400) -> np.ndarray:
    return np.geomspace(1e-3 / theta, 80.0 / theta, size)


def simulate_queue(p: SystemParams, pol: PowerPolicy, arrival_bits_per_frame: float,
                   n_frames: int, seed: int, q_grid=None, keep_backlog: bool = False,
                   random_select: bool = False) -> QueueTrace:
    """Run Q <- max(Q + a - S, 0) over ``n_frames`` frames starting empty."""
    a = float(arrival_bits_per_frame)
    if not (a >= 0.0 and math.isfinite(a)):
        raise ValueError("arrival must be a finite nonnegative number of bits")
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    grid = default_q_grid(p.theta) if q_grid is None else np.sort(np.asarray(q_grid, float))
    counts = np.zeros(len(grid), dtype=np.int64)
    attained = np.full(len(grid), np.inf)
    backlog = np.empty(n_frames) if keep_backlog else None
    sum_service = 0.0
    q = 0.0
    pos = 0
    for i, n in _chunks(n_frames):
        b = _run_batch(p, pol, _rng(seed, _STREAM_QUEUE, i), n, random_select)
        out = np.empty(n)
        q = _kernels.lindley_kernel(q, a, b.service_bits, out)
        sum_service += float(np.sum(b.service_bits))
        srt = np.sort(out)
        idx = np.searchsorted(srt, grid, side="left")
        counts += n - idx
        hit = idx < n
        attained[hit] = np.minimum(attained[hit], srt[idx[hit]])
        if keep_backlog:
            backlog[pos:pos + n] = out
        pos += n

    mean_service = sum_service / n_frames
    unstable = a >= mean_service
    if unstable and a > 0:
        warnings.warn(f"arrival {a} bits/frame is not below the mean service "
                      f"{mean_service} bits/frame; the queue is unstable", RuntimeWarning,
                      stacklevel=2)

    # collapse grid points that landed on the same attained level
    seen = np.isfinite(attained)
    levels, first = np.unique(attained[seen], return_index=True)
    lvl_counts = counts[seen][first]
    mask, slope, se = _fit_tail(levels, lvl_counts, n_frames)
    return QueueTrace(arrival=a, mean_service=mean_service, n_frames=n_frames,
                      q=levels, tail=lvl_counts / n_frames, exceedances=lvl_counts,
                      fit_mask=mask, slope=slope, slope_se=se, backlog=backlog,
                      unstable=bool(unstable))
