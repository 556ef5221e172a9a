import pytest
from hypothesis import given
from hypothesis import strategies as st

from fastmdp.metrics import TrialSummary, draw_fraction, p_survive, p_win, timing_stats, timing_summary


def trial(outcome, blue=(1, 1), red=(1, 0), times=None):
    times = times or {"blue": (0.002,), "red": (0.002,)}
    return TrialSummary(outcome, {"blue": blue[0], "red": red[0]}, {"blue": blue[1], "red": red[1]}, times)


def test_win_fraction():
    trials = [trial("blue_win")] * 7 + [trial("red_win", (1, 0), (1, 1))] * 3
    assert p_win(trials, "blue") == 0.7
    assert p_win(trials, "red") == 0.3


def test_draws_are_not_wins():
    trials = [trial("draw", red=(1, 1))] * 4
    assert p_win(trials, "blue") == p_win(trials, "red") == 0.0
    assert draw_fraction(trials) == 1.0


def test_full_sweep():
    assert p_win([trial("blue_win")] * 20, "blue") == 1.0


def test_survival_mean():
    assert p_survive([trial("blue_win", (2, 2)), trial("blue_win", (2, 1))], "blue") == 0.75
    assert p_survive([trial("blue_win")] * 3, "blue") == 1.0


def test_survival_ten_vs_ten():
    trials = [trial("blue_win", (10, 10), (10, 0))] * 9 + [trial("blue_win", (10, 9), (10, 0))]
    assert p_survive(trials, "blue") == pytest.approx(0.99)


def test_errors():
    with pytest.raises(ValueError):
        p_win([], "blue")
    with pytest.raises(ValueError):
        p_survive([], "blue")
    with pytest.raises(ValueError):
        p_survive([TrialSummary("draw", {"blue": 0, "red": 1}, {"blue": 0, "red": 1}, {})], "blue")
    with pytest.raises(ValueError):
        trial("blue_win", (1, 2))
    with pytest.raises(ValueError):
        timing_stats([])
    with pytest.raises(ValueError):
        timing_summary([trial("draw", times={"blue": (), "red": ()})])


def test_timing_mean():
    st_ = timing_stats([0.002, 0.002, 0.002])
    assert st_.mean == pytest.approx(0.002)
    assert st_.as_ms()["mean_ms"] == pytest.approx(2.0)


def test_timing_by_size():
    trials = [
        trial("blue_win", times={"blue": (0.001, 0.003), "red": (0.002,)}),
        trial("blue_win", (3, 3), (3, 0), times={"blue": (0.004,), "red": ()}),
    ]
    out = timing_summary(trials)
    assert set(out) == {"1v1", "3v3"}
    assert out["1v1"].mean == pytest.approx(0.002) and out["1v1"].count == 3
    assert timing_summary(trials, "red")["1v1"].max == pytest.approx(0.002)


outcomes = st.sampled_from(["blue_win", "red_win", "draw"])
cases = st.lists(st.tuples(outcomes, st.integers(1, 10), st.integers(0, 10)), min_size=1, max_size=30)


@given(cases, st.randoms())
def test_fractions_sum_and_permutation(rows, rnd):
    trials = [trial(o, (n, min(k, n))) for o, n, k in rows]
    total = p_win(trials, "blue") + p_win(trials, "red") + draw_fraction(trials)
    assert total == pytest.approx(1.0, abs=1e-12)
    ps = p_survive(trials, "blue")
    assert 0 <= ps <= 1
    assert (ps == 1.0) == all(k >= n for _, n, k in rows)
    shuffled = list(trials)
    rnd.shuffle(shuffled)
    assert p_win(shuffled, "blue") == pytest.approx(p_win(trials, "blue"))
    assert p_survive(shuffled, "blue") == pytest.approx(ps)
