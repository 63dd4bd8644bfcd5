"""Block-schedule efficiency factor: how unequal block sizes inflate variance.

For block sizes B_t = ceil(t**alpha) the factor is

    2 * (sum_t B_t) * (sum_t 1/B_t) / T**2

which equals 2 exactly for constant blocks (arithmetic-harmonic mean
inequality) and grows as the sizes spread out.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class KappaCurvePoint:
    alpha: float
    T: int
    value: float


def kappa_value(alpha: float, T: int) -> float:
    """Exact finite-sum evaluation of the efficiency factor at one exponent."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    # plain sequential sums so an independent loop oracle can match bit-for-bit
    total = 0.0
    inverse_total = 0.0
    for t in range(1, T + 1):
        size = math.ceil(t**alpha)
        total += size
        inverse_total += 1.0 / size
    return 2.0 * total * inverse_total / (T * T)


def kappa_curve(alphas: Sequence[float], T: int) -> list[KappaCurvePoint]:
    alphas = list(alphas)
    if not alphas:
        raise ValueError("alpha grid must be non-empty")
    return [KappaCurvePoint(a, T, kappa_value(a, T)) for a in alphas]


def write_curve_csv(path, points: Iterable[KappaCurvePoint]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "T", "n_kappa_sq"])
        for p in points:
            writer.writerow([repr(float(p.alpha)), p.T, repr(float(p.value))])
