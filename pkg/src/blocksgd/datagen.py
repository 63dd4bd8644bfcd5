"""Seeded synthetic data generators for the simulation studies.

Six regression models share one true parameter vector; models 1-3 draw
i.i.d. covariates and noise, models 4-6 draw covariates from a stationary
VAR(1) and noise from short moving averages, so consecutive observations
are dependent.  A scalar 1-dependent MA process with known autocovariances
backs the naive-bootstrap failure demo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

THETA_STAR = np.array([0.2, -0.3, 0.5, -0.25])  # three slopes plus intercept

VAR_INTERCEPT = np.array([-0.5, 0.3, -0.4])
VAR_COEF = np.array(
    [
        [0.4, -0.3, 0.5],
        [0.6, 0.3, -0.5],
        [0.1, -0.8, -0.4],
    ]
)


@dataclass(frozen=True)
class ModelSpec:
    id: int
    family: str  # loss family the model is estimated with
    dependent: bool  # VAR covariates and moving-average noise

    @property
    def theta_star(self) -> np.ndarray:
        return THETA_STAR.copy()

    @property
    def dim(self) -> int:
        return THETA_STAR.shape[0]


MODELS = {
    1: ModelSpec(1, "linear", False),
    2: ModelSpec(2, "lad", False),
    3: ModelSpec(3, "logistic", False),
    4: ModelSpec(4, "linear", True),
    5: ModelSpec(5, "lad", True),
    6: ModelSpec(6, "logistic", True),
}


def spectral_radius(a: np.ndarray, iters: int = 200) -> float:
    """Power-iteration estimate of the spectral radius via growth of ||A^k v||."""
    rng = np.random.default_rng(12345)
    v = rng.normal(size=a.shape[0])
    log_growth = 0.0
    for _ in range(iters):
        v = a @ v
        norm = np.linalg.norm(v)
        if norm == 0.0:
            return 0.0
        log_growth += math.log(norm)
        v /= norm
    return math.exp(log_growth / iters)


@dataclass(frozen=True)
class VarProcess:
    """Stationary first-order vector autoregression for the covariates."""

    intercept: np.ndarray = field(default_factory=lambda: VAR_INTERCEPT.copy())
    coef: np.ndarray = field(default_factory=lambda: VAR_COEF.copy())
    burn_in: int = 500

    def __post_init__(self) -> None:
        radius = spectral_radius(self.coef)
        if radius >= 0.999:
            raise ValueError(f"VAR coefficient matrix is not stably stationary (radius {radius:.4f})")

    @property
    def stationary_mean(self) -> np.ndarray:
        eye = np.eye(self.coef.shape[0])
        return np.linalg.solve(eye - self.coef, self.intercept)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """(n, 3) draws after discarding the burn-in, starting from the intercept."""
        total = self.burn_in + n
        innovations = rng.normal(size=(total, self.coef.shape[0]))
        state = self.intercept.copy()
        out = np.empty((total, self.coef.shape[0]))
        for i in range(total):
            state = self.intercept + self.coef @ state + innovations[i]
            out[i] = state
        return out[self.burn_in :]


def _covariates(spec: ModelSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    if spec.dependent:
        return VarProcess().sample(n, rng)
    return VAR_INTERCEPT + rng.normal(size=(n, 3))


def _noise(spec: ModelSpec, x: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    if spec.id in (1, 2):
        # heteroskedastic: sd grows with the covariate norm
        sd = np.sqrt((np.sum(x * x, axis=1) + 1.0) / 4.0)
        return sd * rng.normal(size=n)
    if spec.id == 3:
        return rng.logistic(size=n)
    if spec.id in (4, 5):
        # 3-term moving average of standard normals: 2-dependent, variance 3
        e = rng.normal(size=n + 2)
        return e[:n] + e[1 : n + 1] + e[2 : n + 2]
    # model 6: coin-flip mixture of adjacent logistic innovations (1-dependent,
    # marginally standard logistic)
    e = rng.logistic(size=n + 1)
    r = rng.integers(0, 2, size=n)
    return np.where(r == 1, e[:n], e[1 : n + 1])


def gen_model(spec: ModelSpec, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Generate n observations: covariates with intercept column, responses.

    Returns (x, y) with x of shape (n, 4); the last column is the constant 1.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return np.empty((0, spec.dim)), np.empty(0)
    raw = _covariates(spec, n, rng)
    eps = _noise(spec, raw, n, rng)
    x = np.column_stack([raw, np.ones(n)])
    signal = x @ spec.theta_star + eps
    if spec.family == "logistic":
        y = np.where(signal > 0, 1.0, -1.0)
    else:
        y = signal
    return x, y


@dataclass(frozen=True)
class Ma1Process:
    """Scalar 1-dependent sequence: level plus the sum of two adjacent innovations."""

    theta_star: float = 0.0
    sigma: float = math.sqrt(0.5)

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        e = self.sigma * rng.normal(size=n + 1)
        return self.theta_star + e[:n] + e[1 : n + 1]


def gen_ma1(theta_star: float, sigma: float, n: int, rng: np.random.Generator) -> np.ndarray:
    return Ma1Process(theta_star, sigma).sample(n, rng)


def ma1_theory(sigma: float) -> dict:
    """Closed-form autocovariances of the MA process and its long-run variance."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    r0 = 2.0 * sigma * sigma
    r1 = sigma * sigma
    return {"r0": r0, "r1": r1, "longrun": r0 + 2.0 * r1}
