"""Dual-trajectory mini-batch SGD with online Polyak-Ruppert averaging.

Two projected trajectories advance on alternating blocks of the stream and
their running average is maintained online:

    theta_bar_t = theta_bar_{t-1} * (t-1)/t + (theta_a_t + theta_b_t) / (2t)

A per-observation single-trajectory variant (the classical baseline this
method is compared against) lives here as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .block_stream import BlockPair, BlockPairStream, HorizonPlan, StreamExhausted
from .models import LossModel, Observation
from .schedules import BlockSchedule, LearningRateSchedule, ParamBox


@dataclass(frozen=True)
class EstimatorState:
    t: int
    theta_a: np.ndarray
    theta_b: np.ndarray
    theta_bar: np.ndarray

    @property
    def dim(self) -> int:
        return self.theta_a.shape[0]


@dataclass(frozen=True)
class VanillaState:
    t: int
    theta: np.ndarray
    theta_bar: np.ndarray


def initial_state(theta0: np.ndarray) -> EstimatorState:
    theta0 = np.asarray(theta0, dtype=float)
    return EstimatorState(0, theta0.copy(), theta0.copy(), np.zeros_like(theta0))


def initial_vanilla_state(theta0: np.ndarray) -> VanillaState:
    theta0 = np.asarray(theta0, dtype=float)
    return VanillaState(0, theta0.copy(), np.zeros_like(theta0))


def batch_gradient(model: LossModel, batch, theta: np.ndarray) -> np.ndarray:
    """Arithmetic mean of per-observation gradients over one batch."""
    theta = np.asarray(theta, dtype=float)
    return model.batch_gradient_multi(batch.x, batch.y, theta[:, None])[:, 0]


def weighted_step(
    state: EstimatorState,
    pair: BlockPair,
    gamma_t: float,
    weight: float,
    model: LossModel,
    box: ParamBox,
) -> EstimatorState:
    """One projected update of both trajectories with a multiplicative gradient weight."""
    if pair.t != state.t + 1:
        raise ValueError(f"out-of-order step: state at t={state.t}, pair has t={pair.t}")
    scale = gamma_t * weight
    theta_a = box.project(state.theta_a - scale * batch_gradient(model, pair.batch_a, state.theta_a))
    theta_b = box.project(state.theta_b - scale * batch_gradient(model, pair.batch_b, state.theta_b))
    t = pair.t
    theta_bar = state.theta_bar * ((t - 1) / t) + (theta_a + theta_b) / (2 * t)
    return EstimatorState(t, theta_a, theta_b, theta_bar)


def step(
    state: EstimatorState, pair: BlockPair, gamma_t: float, model: LossModel, box: ParamBox
) -> EstimatorState:
    return weighted_step(state, pair, gamma_t, 1.0, model, box)


def vanilla_step(
    state: VanillaState,
    z: Observation,
    gamma_t: float,
    weight: float,
    model: LossModel,
    box: ParamBox,
) -> VanillaState:
    """One projected per-observation update of the single-trajectory baseline."""
    grad = model.gradient(z, state.theta)
    theta = box.project(state.theta - gamma_t * weight * grad)
    t = state.t + 1
    theta_bar = state.theta_bar * ((t - 1) / t) + theta / t
    return VanillaState(t, theta, theta_bar)


@dataclass(frozen=True)
class EstimatorConfig:
    model: LossModel
    lr: LearningRateSchedule
    blocks: BlockSchedule
    box: ParamBox
    theta0: np.ndarray


def run(
    source,
    config: EstimatorConfig,
    on_step: Optional[Callable[[EstimatorState], None]] = None,
) -> tuple[EstimatorState, HorizonPlan]:
    """Drive the estimator over a stream until it is exhausted.

    Returns the final state (t == 0 with theta_bar all-zero if the stream
    could not fill even the first pair) and the realized horizon plan.
    """
    stream = BlockPairStream(source, config.blocks)
    state = initial_state(config.theta0)
    for pair in stream:
        state = step(state, pair, config.lr.rate(pair.t), config.model, config.box)
        if on_step is not None:
            on_step(state)
    return state, stream.plan()
