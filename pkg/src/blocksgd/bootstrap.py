"""Multiplier-bootstrap ensemble around the block-sampled estimator.

k perturbed copies of the dual-trajectory recursion run in lockstep with the
unperturbed one over a single pass of the data.  Each copy multiplies its
gradient by an i.i.d. mean-one, variance-one weight drawn once per iteration
(shared by both trajectories of that copy); the spread of the k averaged
trajectories yields quantile confidence intervals.

Implementation note: the ensemble is advanced as one stacked (d, 1+k)
parameter matrix whose column 0 is the unweighted base recursion.  Together
with the einsum kernels in ``models`` this makes the constant-weight
ensemble collapse onto the base estimator bit-for-bit, which the test suite
asserts.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .block_stream import BlockPair, BlockPairStream, HorizonPlan, StreamExhausted, as_source
from .estimator import EstimatorState, EstimatorConfig, VanillaState
from .models import LossModel
from .schedules import ParamBox

Functional = Union[int, np.ndarray]


def derive_rng(*key: int) -> np.random.Generator:
    """Deterministic generator for a composite integer key."""
    return np.random.default_rng(np.random.SeedSequence(tuple(int(v) for v in key)))


@dataclass(frozen=True)
class WeightDistribution:
    """Mean-one, variance-one multiplier family for the bootstrap weights."""

    family: str = "exponential_unit"

    def __post_init__(self) -> None:
        if self.family not in ("exponential_unit", "constant_one"):
            raise ValueError(f"unknown weight family {self.family!r}")

    def draw(self, rng: np.random.Generator, size=None) -> np.ndarray:
        if self.family == "constant_one":
            return 1.0 if size is None else np.ones(size)
        # inverse-CDF Exp(1): -ln(u) with u uniform on (0, 1]
        u = rng.random(size)
        return -np.log1p(-u)


def draw_weight(dist: WeightDistribution, rng: np.random.Generator) -> float:
    return float(dist.draw(rng))


class WeightStreams:
    """k buffered per-replicate weight streams.

    Replicate j draws from its own generator seeded by (*seed_key, j), so the
    weight sequence of a replicate is independent of how many replicates run
    and of any execution interleaving.
    """

    CHUNK = 1024

    def __init__(self, dist: WeightDistribution, seed_key: Sequence[int], k: int):
        self.dist = dist
        self.k = k
        self._rngs = [derive_rng(*seed_key, j) for j in range(1, k + 1)]
        self._buf = np.empty((k, self.CHUNK))
        self._pos = self.CHUNK

    def next_weights(self) -> np.ndarray:
        """Weights for the next iteration, one per replicate."""
        if self.dist.family == "constant_one":
            return np.ones(self.k)
        if self._pos == self.CHUNK:
            for j, rng in enumerate(self._rngs):
                self._buf[j] = self.dist.draw(rng, self.CHUNK)
            self._pos = 0
        w = self._buf[:, self._pos].copy()
        self._pos += 1
        return w


@dataclass
class BootstrapEnsemble:
    """Stacked cohort of the base recursion (column 0) plus k weighted replicates."""

    t: int
    theta_a: np.ndarray  # (d, 1+k)
    theta_b: np.ndarray
    theta_bar: np.ndarray
    weights: WeightStreams

    @property
    def k(self) -> int:
        return self.theta_a.shape[1] - 1

    @property
    def base_state(self) -> EstimatorState:
        return EstimatorState(
            self.t, self.theta_a[:, 0].copy(), self.theta_b[:, 0].copy(), self.theta_bar[:, 0].copy()
        )

    def replicate_means(self) -> np.ndarray:
        """(k, d) matrix of the k averaged bootstrap trajectories."""
        return self.theta_bar[:, 1:].T.copy()


def make_ensemble(theta0: np.ndarray, k: int, dist: WeightDistribution, seed_key: Sequence[int]) -> BootstrapEnsemble:
    theta0 = np.asarray(theta0, dtype=float)
    cols = np.repeat(theta0[:, None], k + 1, axis=1)
    return BootstrapEnsemble(
        0, cols.copy(), cols.copy(), np.zeros_like(cols), WeightStreams(dist, seed_key, k)
    )


def ensemble_step(
    ens: BootstrapEnsemble, pair: BlockPair, gamma_t: float, model: LossModel, box: ParamBox
) -> BootstrapEnsemble:
    """Advance base and all replicates one iteration on a shared block pair.

    Each replicate draws one weight from its own stream, applied to both of
    its trajectories; gradients are evaluated at each replicate's own
    iterate.
    """
    if pair.t != ens.t + 1:
        raise ValueError(f"out-of-order step: ensemble at t={ens.t}, pair has t={pair.t}")
    w = np.concatenate(([1.0], ens.weights.next_weights()))
    scale = gamma_t * w
    grad_a = model.batch_gradient_multi(pair.batch_a.x, pair.batch_a.y, ens.theta_a)
    grad_b = model.batch_gradient_multi(pair.batch_b.x, pair.batch_b.y, ens.theta_b)
    theta_a = box.project(ens.theta_a - scale[None, :] * grad_a)
    theta_b = box.project(ens.theta_b - scale[None, :] * grad_b)
    t = pair.t
    theta_bar = ens.theta_bar * ((t - 1) / t) + (theta_a + theta_b) / (2 * t)
    return BootstrapEnsemble(t, theta_a, theta_b, theta_bar, ens.weights)


def confidence_interval(samples: Sequence[float], alpha: float) -> tuple[float, float]:
    """Order-statistic interval: the ceil(k*alpha/2)-th and ceil(k*(1-alpha/2))-th
    smallest of the k samples (1-based)."""
    values = np.sort(np.asarray(samples, dtype=float))
    k = values.shape[0]
    if k < 2:
        raise ValueError("need at least 2 bootstrap samples for an interval")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    lo = _order_index(k, alpha / 2.0)
    hi = _order_index(k, 1.0 - alpha / 2.0)
    return float(values[lo - 1]), float(values[hi - 1])


def _order_index(k: int, q: float) -> int:
    # ceil(k*q) with a guard against k*q landing an ulp above an integer
    return min(k, max(1, math.ceil(k * q - 1e-9)))


@dataclass(frozen=True)
class ConfidenceReport:
    functional: str
    point: float
    lower: float
    upper: float
    alpha: float
    samples: np.ndarray  # the k bootstrap values of this functional


@dataclass(frozen=True)
class CiConfig:
    estimator: EstimatorConfig
    k: int
    alpha: float
    weight_dist: WeightDistribution
    weight_seed_key: tuple
    functionals: tuple  # coordinate indices and/or (d,) linear functionals

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("bootstrap replicate count k must be >= 2")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class CiResult:
    reports: tuple
    state: EstimatorState
    plan: HorizonPlan
    samples: np.ndarray  # (k, d) averaged bootstrap trajectories


def _evaluate(functional: Functional, matrix: np.ndarray) -> tuple[str, np.ndarray]:
    """Apply a coordinate or linear functional to rows of a (m, d) matrix."""
    if isinstance(functional, (int, np.integer)):
        return f"coef_{int(functional)}", matrix[:, int(functional)]
    vec = np.asarray(functional, dtype=float)
    return "linear", matrix @ vec


def _make_reports(ens: BootstrapEnsemble, cfg: CiConfig) -> CiResult:
    samples = ens.replicate_means()
    base = ens.base_state
    reports = []
    for g in cfg.functionals:
        name, values = _evaluate(g, samples)
        _, point = _evaluate(g, base.theta_bar[None, :])
        lower, upper = confidence_interval(values, cfg.alpha)
        reports.append(ConfidenceReport(name, float(point[0]), lower, upper, cfg.alpha, values))
    return CiResult(tuple(reports), base, None, samples)


def run_with_ci(source, cfg: CiConfig) -> CiResult:
    """Single data pass: base estimator and bootstrap ensemble in lockstep."""
    est = cfg.estimator
    stream = BlockPairStream(source, est.blocks)
    ens = make_ensemble(est.theta0, cfg.k, cfg.weight_dist, cfg.weight_seed_key)
    for pair in stream:
        ens = ensemble_step(ens, pair, est.lr.rate(pair.t), est.model, est.box)
    if ens.t == 0:
        raise ValueError("stream exhausted before the first block pair; nothing to report")
    result = _make_reports(ens, cfg)
    return CiResult(result.reports, result.state, stream.plan(), result.samples)


def run_vanilla_with_ci(source, cfg: CiConfig) -> CiResult:
    """Naive per-observation baseline: single-trajectory SGD plus its multiplier
    bootstrap, ignoring any dependence structure in the stream.

    Block settings in cfg are ignored; every observation is one iteration.
    """
    est = cfg.estimator
    src = as_source(source)
    theta0 = np.asarray(est.theta0, dtype=float)
    thetas = np.repeat(theta0[:, None], cfg.k + 1, axis=1)
    bars = np.zeros_like(thetas)
    streams = WeightStreams(cfg.weight_dist, cfg.weight_seed_key, cfg.k)
    t = 0
    while True:
        try:
            batch = src.take(1)
        except StreamExhausted:
            break
        t += 1
        w = np.concatenate(([1.0], streams.next_weights()))
        grad = est.model.batch_gradient_multi(batch.x, batch.y, thetas)
        thetas = est.box.project(thetas - (est.lr.rate(t) * w)[None, :] * grad)
        bars = bars * ((t - 1) / t) + thetas / t
    if t == 0:
        raise ValueError("stream exhausted before the first observation; nothing to report")
    samples = bars[:, 1:].T.copy()
    base_bar = bars[:, 0]
    reports = []
    for g in cfg.functionals:
        name, values = _evaluate(g, samples)
        _, point = _evaluate(g, base_bar[None, :])
        lower, upper = confidence_interval(values, cfg.alpha)
        reports.append(ConfidenceReport(name, float(point[0]), lower, upper, cfg.alpha, values))
    state = VanillaState(t, thetas[:, 0].copy(), base_bar.copy())
    plan = HorizonPlan(t, t, src.rows_read - t)
    return CiResult(tuple(reports), state, plan, samples)


def write_samples_csv(path, samples: np.ndarray) -> None:
    """Dump the (k, d) bootstrap averages: one row per replicate, one column per coefficient."""
    samples = np.asarray(samples)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replicate"] + [f"coef_{i}" for i in range(samples.shape[1])])
        for j, row in enumerate(samples, start=1):
            writer.writerow([j] + [repr(float(v)) for v in row])
