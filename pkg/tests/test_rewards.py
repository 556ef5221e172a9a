import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastmdp.rewards import (
    AircraftSnapshot,
    RewardPeak,
    TerrainConfig,
    altitude_penalty,
    build_opponent_peaks,
    build_teammate_peaks,
    field_arrays,
    pack_peaks,
    split_peaks,
)


def snap(pos, vel, team="blue", ident=0):
    return AircraftSnapshot(tuple(pos), tuple(vel), team, ident)


class TestTeammatePeaks:
    def test_single_mate_layout(self):
        peaks = build_teammate_peaks([snap((0, 0, 0), (100, 0, 0))])
        wells, top = peaks[:6], peaks[6]
        assert [w.location for w in wells] == [(100.0 * t, 0.0, 0.0) for t in range(6)]
        assert [w.radius for w in wells] == [150, 160, 170, 180, 190, 200]
        assert all(w.magnitude == -100 and w.decay == 0.97 for w in wells)
        assert (top.magnitude, top.decay, top.location, top.radius) == (10, 0.999, (0, 0, 0), math.inf)

    def test_empty(self):
        assert build_teammate_peaks([]) == []

    def test_two_mates(self):
        mates = [snap((0, 0, 0), (1, 0, 0)), snap((5, 5, 5), (0, 1, 0), ident=1)]
        peaks = build_teammate_peaks(mates)
        assert len(peaks) == 14
        assert sum(p.magnitude > 0 for p in peaks) == 2


class TestOpponentPeaks:
    def test_radii_with_floor(self):
        peaks = build_opponent_peaks([snap((0, 0, 0), (200, 0, 0), "red")])
        assert len(peaks) == 5
        assert [p.radius for p in peaks[:4]] == [150, 200, 1000, 2000]
        assert [p.location for p in peaks[:4]] == [(0, 0, 0), (200, 0, 0), (1000, 0, 0), (2000, 0, 0)]
        assert all(p.magnitude == -300 and p.decay == 0.99 for p in peaks[:4])
        top = peaks[4]
        assert (top.magnitude, top.decay, top.radius) == (200, 0.999, math.inf)

    def test_floor_is_configurable(self):
        peaks = build_opponent_peaks([snap((0, 0, 0), (120, 0, 0), "red")], radius_floor=0.0)
        assert peaks[0].radius == 0.0

    def test_empty(self):
        assert build_opponent_peaks([]) == []


class TestAltitudePenalty:
    @pytest.mark.parametrize("alt, want", [(2000, 0.0), (1500, 0.0), (500, 10000.0), (1000, 5000.0), (0, 15000.0)])
    def test_examples(self, alt, want):
        assert altitude_penalty(alt, TerrainConfig(h_max=0)) == want

    def test_terrain_shift(self):
        t = TerrainConfig(h_max=800)
        assert (t.h_deck, t.h_penalty) == (1300, 2300)
        assert altitude_penalty(1300, t) == 10000

    @settings(max_examples=200)
    @given(st.floats(-5000, 20000), st.floats(0, 5000), st.floats(0, 3000))
    def test_monotone_nonnegative(self, a, gap, h_max):
        t = TerrainConfig(h_max=h_max)
        lo, hi = altitude_penalty(a, t), altitude_penalty(a + gap, t)
        assert 0 <= hi <= lo
        if a <= t.h_deck:
            assert lo >= 10000 * (1 - 1e-12)

    def test_array_input(self):
        out = altitude_penalty(np.array([2000.0, 500.0]), TerrainConfig())
        np.testing.assert_array_equal(out, [0.0, 10000.0])


class TestPeakValidation:
    @pytest.mark.parametrize("decay", [0.0, 1.0, -0.5, 1.5])
    def test_decay_range(self, decay):
        with pytest.raises(ValueError):
            RewardPeak(-1.0, decay, (0, 0, 0), 10.0)

    def test_negative_radius(self):
        with pytest.raises(ValueError):
            RewardPeak(-1.0, 0.9, (0, 0, 0), -1.0)

    def test_positive_peaks_unbounded(self):
        with pytest.raises(ValueError):
            RewardPeak(5.0, 0.9, (0, 0, 0), 100.0)


vec = st.tuples(*[st.floats(-2e4, 2e4)] * 3)
vel = st.tuples(*[st.floats(-120, 120)] * 3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(vec, vel), max_size=6), st.lists(st.tuples(vec, vel), max_size=6))
def test_counts_purity_and_track(mates, opps):
    m = [snap(p, v, "blue", i) for i, (p, v) in enumerate(mates)]
    o = [snap(p, v, "red", 10 + i) for i, (p, v) in enumerate(opps)]
    tp, op = build_teammate_peaks(m), build_opponent_peaks(o)
    assert len(tp) == 7 * len(m)
    assert len(op) == 5 * len(o)
    assert tp == build_teammate_peaks(m) and op == build_opponent_peaks(o)
    # wells sit on the constant-velocity track of their source
    for src, peaks, times in ((m, tp, range(6)), (o, op, (0, 1, 5, 10))):
        per = len(times) + 1
        for k, s in enumerate(src):
            for t, w in zip(times, peaks[k * per : k * per + per - 1]):
                expect = np.array(s.position) + t * np.array(s.velocity)
                np.testing.assert_allclose(w.location, expect, rtol=1e-12, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(vec, vel), max_size=5), st.lists(st.tuples(vec, vel), max_size=5))
def test_vectorized_field_matches_builders(mates, opps):
    m = [snap(p, v, "blue", i) for i, (p, v) in enumerate(mates)]
    o = [snap(p, v, "red", 10 + i) for i, (p, v) in enumerate(opps)]
    pos, neg = split_peaks(build_teammate_peaks(m) + build_opponent_peaks(o))
    want_pos, want_neg = pack_peaks(pos), pack_peaks(neg)
    got_pos, got_neg = field_arrays(
        [s.position for s in m], [s.velocity for s in m], [s.position for s in o], [s.velocity for s in o]
    )
    for got, want in ((got_pos, want_pos), (got_neg, want_neg)):
        np.testing.assert_allclose(got.location, want.location, rtol=1e-12, atol=1e-9)
        np.testing.assert_array_equal(got.magnitude, want.magnitude)
        np.testing.assert_array_equal(got.log_decay, want.log_decay)
        np.testing.assert_allclose(got.radius, want.radius, rtol=1e-12)


def test_snapshot_speed_bound():
    s = snap((0, 0, 0), (3, 4, 0))
    assert s.speed == 5.0
