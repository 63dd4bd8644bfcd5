import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blocksgd.block_stream import (
    ArraySource,
    BlockPairStream,
    IteratorSource,
    StreamExhausted,
    plan_horizon,
)
from blocksgd.models import Observation
from blocksgd.schedules import BlockSchedule


def indexed_source(n):
    """Observations whose response records the 1-based stream position."""
    x = np.ones((n, 1))
    y = np.arange(1, n + 1, dtype=float)
    return ArraySource(x, y)


class TestBlockPairs:
    def test_sqrt_schedule_enumeration(self):
        # B_t = ceil(t**0.5): hand enumeration of the first three index pairs
        stream = BlockPairStream(indexed_source(10), BlockSchedule(1.0, 0.5))
        pairs = [stream.next_pair() for _ in range(3)]
        assert [list(p.batch_a.y) for p in pairs] == [[1], [3, 4], [7, 8]]
        assert [list(p.batch_b.y) for p in pairs] == [[2], [5, 6], [9, 10]]

    def test_unit_blocks_alternate(self):
        stream = BlockPairStream(indexed_source(8), BlockSchedule(1.0, 0.0))
        for t, pair in enumerate(stream, start=1):
            assert list(pair.batch_a.y) == [2 * t - 1]
            assert list(pair.batch_b.y) == [2 * t]

    def test_exhaustion_with_leftover(self):
        stream = BlockPairStream(indexed_source(9), BlockSchedule(1.0, 0.0))
        for _ in range(4):
            stream.next_pair()
        with pytest.raises(StreamExhausted):
            stream.next_pair()
        plan = stream.plan()
        assert (plan.T, plan.consumed, plan.leftover) == (4, 8, 1)

    def test_batch_sizes_match_schedule(self):
        sched = BlockSchedule(2.0, 0.4)
        stream = BlockPairStream(indexed_source(500), sched)
        for pair in stream:
            assert len(pair.batch_a) == len(pair.batch_b) == sched.size(pair.t)

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(0, 2000),
        scale=st.floats(0.5, 5.0),
        exponent=st.floats(0.0, 0.9),
    )
    def test_partition_is_exact(self, n, scale, exponent):
        # union of emitted indices = {1..consumed}, in order, no gaps or overlaps
        sched = BlockSchedule(scale, exponent)
        stream = BlockPairStream(indexed_source(n), sched)
        seen = []
        for pair in stream:
            seen.extend(pair.batch_a.y)
            seen.extend(pair.batch_b.y)
        assert seen == list(range(1, len(seen) + 1))
        plan = stream.plan()
        assert plan.consumed == len(seen)
        assert plan.consumed + plan.leftover == n

    def test_partition_exact_large(self):
        sched = BlockSchedule(3.0, 0.3)
        stream = BlockPairStream(indexed_source(10**4), sched)
        seen = []
        for pair in stream:
            seen.extend(pair.batch_a.y)
            seen.extend(pair.batch_b.y)
        assert seen == list(range(1, len(seen) + 1))


class TestPlanHorizon:
    def test_unit_blocks(self):
        plan = plan_horizon(10, BlockSchedule(1.0, 0.0))
        assert (plan.T, plan.consumed, plan.leftover) == (5, 10, 0)
        plan = plan_horizon(11, BlockSchedule(1.0, 0.0))
        assert (plan.T, plan.consumed, plan.leftover) == (5, 10, 1)

    def test_empty_stream(self):
        plan = plan_horizon(0, BlockSchedule(1.0, 0.0))
        assert (plan.T, plan.consumed, plan.leftover) == (0, 0, 0)

    def test_too_small_for_first_pair(self):
        plan = plan_horizon(5, BlockSchedule(3.0, 0.2))
        assert plan.T == 0 and plan.leftover == 5

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(0, 5000),
        scale=st.floats(0.5, 5.0),
        exponent=st.floats(0.0, 0.9),
    )
    def test_round_trip_and_bounds(self, n, scale, exponent):
        sched = BlockSchedule(scale, exponent)
        plan = plan_horizon(n, sched)
        assert plan.consumed + plan.leftover == n
        assert plan.consumed <= n < plan.consumed + 2 * sched.size(plan.T + 1)
        again = plan_horizon(plan.consumed, sched)
        assert again.T == plan.T and again.leftover == 0

    def test_matches_stream_consumption(self):
        sched = BlockSchedule(2.5, 0.45)
        for n in (0, 1, 17, 400, 5000):
            plan = plan_horizon(n, sched)
            stream = BlockPairStream(indexed_source(n), sched)
            count = sum(1 for _ in stream)
            assert count == plan.T
            assert stream.consumed == plan.consumed


class TestIteratorSource:
    def test_generator_stream(self):
        def gen():
            for i in range(1, 11):
                yield Observation(float(i), np.array([1.0]))

        stream = BlockPairStream(IteratorSource(gen()), BlockSchedule(1.0, 0.5))
        pairs = list(stream)
        assert [list(p.batch_a.y) for p in pairs] == [[1], [3, 4], [7, 8]]

    def test_bounded_memory(self):
        # the partitioner must not buffer past blocks: a one-shot generator with
        # a position probe shows only the current pair is ever materialized
        sched = BlockSchedule(1.0, 0.5)
        high_water = {"rows": 0}

        class Probe:
            def __init__(self, n):
                self.n = n
                self.pos = 0

            def __iter__(self):
                return self

            def __next__(self):
                if self.pos >= self.n:
                    raise StopIteration
                self.pos += 1
                return Observation(float(self.pos), np.array([1.0]))

        probe = Probe(4000)
        stream = BlockPairStream(IteratorSource(probe), sched)
        for pair in stream:
            # everything read so far is either consumed or in the live pair
            buffered = probe.pos - stream.consumed
            high_water["rows"] = max(high_water["rows"], buffered)
        assert high_water["rows"] == 0  # pairs are emitted as soon as they fill
        final_block = sched.size(stream.t + 1)
        assert probe.pos - stream.consumed < 2 * final_block


class TestArraySourceCounting:
    def test_reads_equal_consumed(self):
        source = indexed_source(1000)
        stream = BlockPairStream(source, BlockSchedule(2.0, 0.5))
        for _ in stream:
            pass
        assert source.rows_read == stream.consumed
