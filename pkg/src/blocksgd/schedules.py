"""Tuning-parameter schedules and the box projection operator.

Everything here is immutable after construction and safe to share across
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LearningRateSchedule:
    """Polynomially decaying step size (t + gamma_offset)^(-rho)."""

    gamma_offset: float = 10.0
    rho: float = 2.0 / 3.0

    def __post_init__(self) -> None:
        if not self.gamma_offset > 0:
            raise ValueError(f"gamma_offset must be > 0, got {self.gamma_offset}")
        if not 0.5 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (1/2, 1), got {self.rho}")

    def rate(self, t: int) -> float:
        if t < 1:
            raise ValueError(f"iteration index must be >= 1, got {t}")
        return (t + self.gamma_offset) ** (-self.rho)


@dataclass(frozen=True)
class BlockSchedule:
    """Block size ceil(scale * t**exponent), floored at one observation."""

    scale: float = 3.0
    exponent: float = 0.3

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise ValueError(f"scale must be > 0, got {self.scale}")
        if not 0.0 <= self.exponent < 1.0:
            raise ValueError(f"exponent must lie in [0, 1), got {self.exponent}")

    def size(self, t: int) -> int:
        if t < 1:
            raise ValueError(f"iteration index must be >= 1, got {t}")
        return max(1, math.ceil(self.scale * t**self.exponent))


@dataclass(frozen=True)
class ParamBox:
    """Compact box parameter set with coordinate-wise bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower/upper must be 1-d arrays of equal length")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ValueError("box bounds must be finite")
        if np.any(lower > upper):
            raise ValueError("box requires lower <= upper coordinate-wise")

    @classmethod
    def cube(cls, dim: int, halfwidth: float = 10.0) -> "ParamBox":
        if halfwidth <= 0:
            raise ValueError("halfwidth must be positive")
        return cls(np.full(dim, -halfwidth), np.full(dim, halfwidth))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def project(self, theta: np.ndarray) -> np.ndarray:
        """Euclidean projection onto the box: coordinate-wise clamp.

        Accepts a (d,) vector or a (d, m) stack of column vectors.
        """
        theta = np.asarray(theta, dtype=float)
        if theta.shape[0] != self.dim:
            raise ValueError(
                f"dimension mismatch: theta has {theta.shape[0]} coordinates, box has {self.dim}"
            )
        if theta.ndim == 1:
            return np.clip(theta, self.lower, self.upper)
        if theta.ndim == 2:
            return np.clip(theta, self.lower[:, None], self.upper[:, None])
        raise ValueError("theta must be a vector or a stack of column vectors")
