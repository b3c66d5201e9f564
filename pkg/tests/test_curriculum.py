import math
import random

import pytest

from btcurator.curriculum import (
    ScheduleConfig,
    SelectionConfig,
    SelectionEpoch,
    combined_score,
    lambda_at,
    replacement_stats,
    select_top,
)
from btcurator.errors import ConfigError, DataError


def test_lambda_anchor_values():
    cfg = ScheduleConfig(c0=0.1, T=5)
    assert lambda_at(0, cfg) == pytest.approx(0.01, abs=1e-12)
    expected_t1 = math.sqrt(1 * (1 - 0.01) / 5) + 0.01
    assert expected_t1 == pytest.approx(0.45497, abs=5e-6)
    assert lambda_at(1, cfg) == pytest.approx(expected_t1, abs=1e-12)
    assert lambda_at(5, cfg) == 1.0
    assert lambda_at(50, cfg) == 1.0


def test_lambda_monotone_nondecreasing():
    for c0, big_t in [(0.0, 1), (0.1, 5), (0.5, 3), (0.9, 10)]:
        cfg = ScheduleConfig(c0=c0, T=big_t)
        vals = [lambda_at(t, cfg) for t in range(0, 25)]
        for prev, cur in zip(vals, vals[1:]):
            assert cur >= prev
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert vals[-1] == 1.0


def test_lambda_starts_at_c0_squared():
    for c0 in (0.0, 0.1, 0.3, 0.7):
        assert lambda_at(0, ScheduleConfig(c0=c0, T=4)) == pytest.approx(c0 * c0)


def test_lambda_reaches_one_at_T():
    # t = T gives sqrt(1 - c0^2) + c0^2 >= 1 for c0 in [0, 1), so the clamp binds
    for c0 in (0.0, 0.2, 0.8):
        for big_t in (1, 3, 9):
            assert lambda_at(big_t, ScheduleConfig(c0=c0, T=big_t)) == 1.0


def test_schedule_config_validation():
    with pytest.raises(ConfigError):
        ScheduleConfig(c0=1.0)
    with pytest.raises(ConfigError):
        ScheduleConfig(c0=-0.1)
    with pytest.raises(ConfigError):
        ScheduleConfig(T=0)
    with pytest.raises(ConfigError):
        lambda_at(-1, ScheduleConfig())


def test_combined_score_endpoints():
    assert combined_score(0.8, 0.3, 1.0) == pytest.approx(0.8)
    assert combined_score(0.8, 0.3, 0.0) == pytest.approx(0.3)
    assert combined_score(0.8, 0.3, 0.5) == pytest.approx(0.55)


def test_combined_score_convexity_bounds():
    rng = random.Random(0)
    for _ in range(200):
        r, s, lam = rng.random(), rng.random(), rng.random()
        c = combined_score(r, s, lam)
        assert min(r, s) - 1e-12 <= c <= max(r, s) + 1e-12


def test_selection_count():
    cfg = SelectionConfig(p=30.0)
    assert cfg.count(100) == 30
    assert cfg.count(10) == 3
    assert cfg.count(1) == 1
    assert cfg.count(3) == 1  # floor(0.9) -> floor then min 1
    assert SelectionConfig(p=100.0).count(7) == 7
    assert SelectionConfig(p=0.5).count(100) == 1


def test_selection_config_validation():
    with pytest.raises(ConfigError):
        SelectionConfig(p=0.0)
    with pytest.raises(ConfigError):
        SelectionConfig(p=101.0)


def test_select_top_small_case():
    scored = {0: 0.2, 1: 0.9, 2: 0.5, 3: 0.7}
    sel = select_top(scored, SelectionConfig(p=50.0), epoch=2, lam=0.4)
    assert sel.selected == [1, 3]
    assert sel.scores == {1: 0.9, 3: 0.7}
    assert sel.epoch == 2 and sel.lam == 0.4


def test_select_top_tie_breaks_to_lower_id():
    scored = {5: 1.0, 2: 1.0, 9: 1.0, 1: 0.1}
    sel = select_top(scored, SelectionConfig(p=50.0))
    assert sel.selected == [2, 5]


def test_select_top_matches_sort_then_slice_oracle():
    rng = random.Random(7)
    for trial in range(20):
        n = rng.randrange(1, 120)
        # coarse values force plenty of ties
        scored = {i: rng.randrange(0, 5) / 4.0 for i in range(n)}
        p = rng.choice([5.0, 25.0, 30.0, 60.0, 100.0])
        cfg = SelectionConfig(p=p)
        sel = select_top(scored, cfg)
        oracle = [
            sid for sid, _ in sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))
        ][: max(1, math.floor(p * n / 100.0))]
        assert sel.selected == oracle, f"trial {trial}"


def test_select_top_empty_errors():
    with pytest.raises(DataError):
        select_top({}, SelectionConfig())


def make_epoch(t, ids):
    return SelectionEpoch(epoch=t, lam=0.0, selected=list(ids),
                          scores={i: 0.0 for i in ids})


def test_replacement_stats_hand_case():
    history = [
        make_epoch(0, [0, 1, 2, 3]),
        make_epoch(1, [2, 3, 4, 5]),
        make_epoch(2, [2, 3, 4, 5]),
    ]
    replaced, coverage = replacement_stats(history, corpus_size=10)
    assert replaced == [0.5, 0.0]
    assert coverage == pytest.approx(0.6)


def test_replacement_stats_random_set_oracle():
    rng = random.Random(3)
    for _ in range(10):
        history = []
        for t in range(5):
            history.append(make_epoch(t, rng.sample(range(50), 12)))
        replaced, coverage = replacement_stats(history, corpus_size=50)
        union = set()
        for h in history:
            union |= h.selected_set
        assert coverage == pytest.approx(len(union) / 50)
        for i, frac in enumerate(replaced):
            new = set(history[i + 1].selected) - set(history[i].selected)
            assert frac == pytest.approx(len(new) / 12)


def test_replacement_stats_needs_two_epochs():
    with pytest.raises(DataError):
        replacement_stats([make_epoch(0, [1])], corpus_size=5)
