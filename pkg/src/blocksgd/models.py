"""Per-observation loss oracles: linear, least-absolute-deviation, logistic.

Each family supplies the loss, its (sub)gradient, and a vectorized batch
kernel that evaluates the averaged gradient at many parameter vectors at
once.  The batch kernels contract with ``np.einsum`` rather than BLAS
matmul: einsum's fixed-order loops make columns of the result depend only
on the matching input column, which the bootstrap ensemble relies on for
its exact degenerate-weight collapse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import expit

FAMILIES = ("linear", "lad", "logistic")


class DataError(ValueError):
    """Raised for malformed or non-finite observations."""


class Observation(NamedTuple):
    y: float
    x: np.ndarray


def _forward(x: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    # (B, d) @ (d, m) -> (B, m) without BLAS (column-stable, see module doc)
    return np.einsum("bd,dm->bm", x, thetas)


def _contract(x: np.ndarray, s: np.ndarray) -> np.ndarray:
    # sum_b x[b, :] * s[b, :] -> (d, m)
    return np.einsum("bd,bm->dm", x, s)


@dataclass(frozen=True)
class LossModel:
    family: str
    dim: int

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown loss family {self.family!r}; expected one of {FAMILIES}")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    def _check(self, z: Observation, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if z.x.shape != (self.dim,) or theta.shape != (self.dim,):
            raise ValueError(
                f"dimension mismatch: x has shape {z.x.shape}, theta {theta.shape}, model dim {self.dim}"
            )
        if not (np.isfinite(z.x).all() and np.isfinite(z.y)):
            raise DataError("observation contains non-finite values")
        return theta

    def loss(self, z: Observation, theta: np.ndarray) -> float:
        theta = self._check(z, theta)
        resid = z.y - float(z.x @ theta)
        if self.family == "linear":
            return 0.5 * resid * resid
        if self.family == "lad":
            return abs(resid)
        u = z.y * float(z.x @ theta)
        # log(1 + exp(-u)) without overflow for large |u|
        return float(np.logaddexp(0.0, -u))

    def gradient(self, z: Observation, theta: np.ndarray) -> np.ndarray:
        theta = self._check(z, theta)
        return self.batch_gradient_multi(z.x[None, :], np.array([z.y]), theta[:, None])[:, 0]

    def batch_gradient_multi(self, x: np.ndarray, y: np.ndarray, thetas: np.ndarray) -> np.ndarray:
        """Averaged (sub)gradient of a batch, at m parameter vectors.

        x: (B, d) covariates, y: (B,) responses, thetas: (d, m).
        Returns the (d, m) matrix whose column j is the batch-mean gradient
        evaluated at thetas[:, j].
        """
        b = x.shape[0]
        if b == 0:
            raise ValueError("batch must be non-empty")
        if self.family == "linear":
            resid = y[:, None] - _forward(x, thetas)
            return -_contract(x, resid) / b
        if self.family == "lad":
            signs = np.sign(y[:, None] - _forward(x, thetas))
            return -_contract(x, signs) / b
        # logistic: -y*x / (1 + exp(y * x.theta)); expit(-u) is the stable form
        u = y[:, None] * _forward(x, thetas)
        return -_contract(x, y[:, None] * expit(-u)) / b


def finite_diff_check(model: LossModel, z: Observation, theta: np.ndarray, h: float = 1e-5) -> float:
    """Worst relative gap between the gradient and central differences of the loss.

    Only valid for smooth families; the LAD subgradient is not a derivative
    at its kinks.
    """
    if model.family == "lad":
        raise ValueError("finite differences are unsupported for the lad family")
    if not 1e-7 <= h <= 1e-4:
        raise ValueError(f"h must lie in [1e-7, 1e-4], got {h}")
    theta = np.asarray(theta, dtype=float)
    grad = model.gradient(z, theta)
    worst = 0.0
    for i in range(model.dim):
        step = np.zeros(model.dim)
        step[i] = h
        fd = (model.loss(z, theta + step) - model.loss(z, theta - step)) / (2.0 * h)
        err = abs(grad[i] - fd) / max(1.0, abs(grad[i]))
        worst = max(worst, err)
    return worst
