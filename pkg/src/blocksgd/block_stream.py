"""Single-pass partitioning of an observation stream into alternating block pairs.

Iteration t consumes 2*B_t consecutive observations: the first B_t form
batch_a, the next B_t form batch_b.  The partitioner holds only the current
pair, so memory stays O(B_T) regardless of stream length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Union

import numpy as np

from .models import Observation
from .schedules import BlockSchedule


class StreamExhausted(Exception):
    """The source ran out of observations mid-pair; the partial pair is discarded."""


class Batch(NamedTuple):
    x: np.ndarray  # (B, d)
    y: np.ndarray  # (B,)

    def __len__(self) -> int:
        return self.y.shape[0]


@dataclass(frozen=True)
class BlockPair:
    t: int
    batch_a: Batch
    batch_b: Batch


@dataclass(frozen=True)
class HorizonPlan:
    T: int
    consumed: int
    leftover: int


class ArraySource:
    """Pull-based source over in-memory arrays; hands out views, never copies."""

    def __init__(self, x: np.ndarray, y: np.ndarray):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
            raise ValueError("expected x of shape (n, d) and y of shape (n,)")
        self._x = x
        self._y = y
        self.rows_read = 0

    def __len__(self) -> int:
        return self._y.shape[0]

    def take(self, m: int) -> Batch:
        if self.rows_read + m > len(self):
            raise StreamExhausted(
                f"needed {m} observations, only {len(self) - self.rows_read} remain"
            )
        lo = self.rows_read
        self.rows_read = lo + m
        return Batch(self._x[lo : lo + m], self._y[lo : lo + m])


class IteratorSource:
    """Adapter for arbitrary iterables of Observation (generators, CSV readers)."""

    def __init__(self, observations: Iterable[Observation]):
        self._it: Iterator[Observation] = iter(observations)
        self.rows_read = 0

    def take(self, m: int) -> Batch:
        rows = []
        for _ in range(m):
            try:
                rows.append(next(self._it))
            except StopIteration:
                self.rows_read += len(rows)
                raise StreamExhausted(
                    f"needed {m} observations, source yielded {len(rows)}"
                ) from None
        self.rows_read += m
        x = np.array([r.x for r in rows], dtype=float)
        y = np.array([r.y for r in rows], dtype=float)
        return Batch(x, y)


Source = Union[ArraySource, IteratorSource]


def as_source(data) -> Source:
    if hasattr(data, "take"):
        return data
    if isinstance(data, tuple) and len(data) == 2:
        return ArraySource(*data)
    return IteratorSource(data)


class BlockPairStream:
    """Stateful single-consumer cursor emitting BlockPairs for t = 1, 2, ...

    Not shareable across threads; the emitted pairs are immutable and may be
    handed to concurrent downstream workers.
    """

    def __init__(self, source, sched: BlockSchedule):
        self.source = as_source(source)
        self.sched = sched
        self.t = 0
        self.consumed = 0

    def next_pair(self) -> BlockPair:
        t = self.t + 1
        size = self.sched.size(t)
        if hasattr(self.source, "__len__"):
            # sized sources can refuse a partial pair without touching any rows,
            # keeping rows_read == consumed exactly
            remaining = len(self.source) - self.source.rows_read
            if remaining < 2 * size:
                raise StreamExhausted(
                    f"pair {t} needs {2 * size} observations, only {remaining} remain"
                )
        batch_a = self.source.take(size)
        batch_b = self.source.take(size)
        self.t = t
        self.consumed += 2 * size
        return BlockPair(t, batch_a, batch_b)

    def __iter__(self) -> Iterator[BlockPair]:
        while True:
            try:
                yield self.next_pair()
            except StreamExhausted:
                return

    def plan(self) -> HorizonPlan:
        """Plan of what was actually consumed.

        For sized sources the leftover is everything not consumed; for bare
        iterators it only counts rows that were pulled and discarded.
        """
        if hasattr(self.source, "__len__"):
            return HorizonPlan(self.t, self.consumed, len(self.source) - self.consumed)
        return HorizonPlan(self.t, self.consumed, self.source.rows_read - self.consumed)


def plan_horizon(n: int, sched: BlockSchedule) -> HorizonPlan:
    """Largest T with 2 * sum_{t<=T} B_t <= n, plus the discarded remainder."""
    if n < 0:
        raise ValueError("n must be non-negative")
    t = 0
    consumed = 0
    while True:
        step = 2 * sched.size(t + 1)
        if consumed + step > n:
            return HorizonPlan(t, consumed, n - consumed)
        consumed += step
        t += 1
