import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcekit import (
    AnalysisError,
    Arm,
    CiMethod,
    Comparison,
    HceError,
    WinCounts,
    analyze,
    compare,
    cumulative_components,
    dumps_stats,
    marginal_proportions,
    ordinal_dominance_graph,
    ordinal_pair_counts,
    stats_document,
    win_counts_brute,
    win_counts_fast,
    win_placements,
    win_statistics,
)
from helpers import build_dataset, random_dataset, small_config, theta_of


def dataset_strategy(max_size=40, n_tte=2):
    """Random tie-prone datasets driven by a hypothesis-chosen seed."""
    return st.builds(
        lambda seed, n, m: random_dataset(
            np.random.default_rng(seed), small_config(n_tte=n_tte), n, m
        ),
        st.integers(0, 2**32 - 1),
        st.integers(1, max_size),
        st.integers(1, max_size),
    )


# --- counting -----------------------------------------------------------------

def test_worked_example_counts_and_estimates():
    config = small_config()
    ds = build_dataset(config, [(1, 10.0), (2, 1.0)], [(1, 5.0), (2, 1.0)])
    counts = win_counts_fast(ds)
    assert counts == WinCounts(wins=2, losses=1, ties=1, n_active=2, n_control=2)
    _, stats = analyze(ds, ci_method="bootstrap", boot_reps=50)
    assert stats.win_probability == 0.625
    assert stats.win_odds == 2.5 / 1.5
    assert stats.win_ratio == 2.0
    assert stats.net_benefit == 0.25


@settings(max_examples=120, deadline=None)
@given(dataset_strategy())
def test_fast_counts_match_brute_force(ds):
    assert win_counts_fast(ds) == win_counts_brute(ds)


@settings(max_examples=60, deadline=None)
@given(dataset_strategy(max_size=25, n_tte=1))
def test_placements_match_per_subject_loops(ds):
    counts, placements = win_placements(ds)
    config = ds.config
    active = ds.values(Arm.ACTIVE)
    control = ds.values(Arm.CONTROL)
    for i, a in enumerate(active):
        wins = sum(compare(a, c, config) is Comparison.A_WINS for c in control)
        ties = sum(compare(a, c, config) is Comparison.TIE for c in control)
        assert placements.active_wins[i] == wins
        assert placements.active_ties[i] == ties
    for j, c in enumerate(control):
        wins = sum(compare(a, c, config) is Comparison.B_WINS for a in active)
        ties = sum(compare(a, c, config) is Comparison.TIE for a in active)
        assert placements.control_wins[j] == wins
        assert placements.control_ties[j] == ties


def test_empty_arm_raises():
    ds = build_dataset(small_config(), [(2, 1.0)], [])
    with pytest.raises(AnalysisError, match="empty arm"):
        win_counts_fast(ds)
    with pytest.raises(AnalysisError, match="empty arm"):
        win_counts_brute(ds)


def test_win_counts_validation():
    with pytest.raises(HceError):
        WinCounts(wins=2, losses=1, ties=1, n_active=2, n_control=3)
    swapped = WinCounts(2, 1, 1, 2, 2).swapped()
    assert swapped == WinCounts(1, 2, 1, 2, 2)


# --- arm swap -------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(dataset_strategy(max_size=30))
def test_arm_swap_antisymmetry(ds):
    from hcekit import HceDataset, SubjectRecord

    flipped = HceDataset.from_config(
        ds.config,
        [
            SubjectRecord(
                rec.subject_id,
                Arm.CONTROL if rec.arm is Arm.ACTIVE else Arm.ACTIVE,
                rec.value,
            )
            for rec in ds.subjects
        ],
    )
    counts = win_counts_fast(ds)
    counts_flipped = win_counts_fast(flipped)
    assert counts_flipped == counts.swapped()
    theta = theta_of(counts)
    assert abs(theta_of(counts_flipped) - (1.0 - theta)) <= 1e-12


# --- ordinal dominance curve ------------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(dataset_strategy())
def test_bamber_identity(ds):
    counts = win_counts_fast(ds)
    curve = ordinal_dominance_graph(ds)
    assert abs(curve.area_above - theta_of(counts)) <= 1e-12


def test_odg_endpoints_and_monotonicity():
    rng = np.random.default_rng(5)
    ds = random_dataset(rng, small_config(n_tte=2), 60, 45)
    curve = ordinal_dominance_graph(ds)
    assert curve.vertices[0] == (0.0, 0.0)
    assert curve.vertices[-1] == pytest.approx((1.0, 1.0), abs=1e-12)
    us = [u for u, _ in curve.vertices]
    vs = [v for _, v in curve.vertices]
    assert all(b >= a for a, b in zip(us, us[1:]))
    assert all(b >= a for a, b in zip(vs, vs[1:]))


# --- estimates and intervals -------------------------------------------------------

def test_win_odds_equals_win_ratio_without_ties():
    config = small_config()
    ds = build_dataset(
        config,
        [(2, 0.5), (2, 1.5), (1, 100.0)],
        [(2, 0.25), (2, 1.25), (1, 200.0)],
    )
    counts = win_counts_fast(ds)
    assert counts.ties == 0
    _, stats = analyze(ds)
    assert stats.win_odds == stats.win_ratio  # bit-identical, not approx


def test_win_ratio_edge_cases():
    config = small_config()
    all_wins = build_dataset(config, [(2, 2.0), (2, 3.0)], [(2, 0.0), (2, 1.0)])
    _, stats = analyze(all_wins, ci_method="bootstrap", boot_reps=20)
    assert stats.win_ratio == math.inf
    assert stats.win_odds == math.inf
    assert stats.degenerate

    all_ties = build_dataset(config, [(2, 1.0), (2, 1.0)], [(2, 1.0), (2, 1.0)])
    _, stats = analyze(all_ties, ci_method="bootstrap", boot_reps=20)
    assert math.isnan(stats.win_ratio)
    assert stats.win_probability == 0.5
    assert stats.win_odds == 1.0


def test_analytic_ci_brackets_estimate_and_nests():
    rng = np.random.default_rng(11)
    ds = random_dataset(rng, small_config(n_tte=2), 80, 70)
    _, stats95 = analyze(ds, alpha=0.05)
    _, stats90 = analyze(ds, alpha=0.10)
    lo, hi = stats95.ci_win_odds
    assert lo < stats95.win_odds < hi
    assert stats90.ci_win_odds[0] >= lo
    assert stats90.ci_win_odds[1] <= hi
    nb_lo, nb_hi = stats95.ci_net_benefit
    assert -1.0 <= nb_lo < stats95.net_benefit < nb_hi <= 1.0
    # win probability interval is the net benefit interval mapped to [0, 1]
    assert stats95.ci_win_probability == (
        pytest.approx((nb_lo + 1) / 2), pytest.approx((nb_hi + 1) / 2)
    )


def test_analytic_needs_two_subjects_per_arm():
    ds = build_dataset(small_config(), [(2, 1.0)], [(2, 0.0), (2, 2.0)])
    with pytest.raises(AnalysisError, match="bootstrap"):
        analyze(ds)


def test_alpha_validation():
    ds = build_dataset(small_config(), [(2, 1.0), (2, 2.0)], [(2, 0.0), (2, 3.0)])
    counts, placements = win_placements(ds)
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(HceError, match="alpha"):
            win_statistics(counts, placements, alpha=bad)


def test_bootstrap_is_seed_deterministic():
    rng = np.random.default_rng(3)
    ds = random_dataset(rng, small_config(), 40, 40)
    counts, placements = win_placements(ds)
    a = win_statistics(counts, placements, ci_method="bootstrap",
                       boot_reps=200, seed=9)
    b = win_statistics(counts, placements, ci_method="bootstrap",
                       boot_reps=200, seed=9)
    c = win_statistics(counts, placements, ci_method="bootstrap",
                       boot_reps=200, seed=10)
    assert a.ci_win_odds == b.ci_win_odds
    assert a.ci_win_ratio == b.ci_win_ratio
    assert a.ci_win_odds != c.ci_win_odds
    assert a.ci_method is CiMethod.BOOTSTRAP


def test_bootstrap_ci_brackets_null_effect_sensibly():
    rng = np.random.default_rng(21)
    ds = random_dataset(rng, small_config(n_tte=2), 120, 120)
    counts, placements = win_placements(ds)
    analytic = win_statistics(counts, placements)
    boot = win_statistics(counts, placements, ci_method="bootstrap",
                          boot_reps=500, seed=1)
    lo_a, hi_a = analytic.ci_win_odds
    lo_b, hi_b = boot.ci_win_odds
    # the two interval constructions should roughly agree at this size
    assert abs(lo_a - lo_b) < 0.15
    assert abs(hi_a - hi_b) < 0.15


# --- cumulative components ---------------------------------------------------------

def test_cumulative_depths_and_tie_monotonicity(kidney_config):
    rng = np.random.default_rng(13)
    ds = random_dataset(rng, kidney_config, 90, 80)
    rows = cumulative_components(ds)
    assert [row.depth for row in rows] == list(range(1, 8))
    assert rows[0].included_components == ("Death",)
    assert rows[-1].included_components == tuple(
        c.name for c in kidney_config.components
    )
    ties = [row.tie_pct for row in rows]
    assert all(b <= a + 1e-12 for a, b in zip(ties, ties[1:]))
    counts, placements = win_placements(ds)
    full = win_statistics(counts, placements)
    assert rows[-1].stats.win_probability == full.win_probability
    assert rows[-1].stats.ci_win_odds == full.ci_win_odds


def test_cumulative_depth_one_collapses_everything_else():
    config = small_config(n_tte=2)
    ds = build_dataset(
        config, [(1, 100.0), (2, 50.0), (3, 1.0)], [(1, 200.0), (3, -1.0)]
    )
    rows = cumulative_components(ds)
    # at depth 1 only the first event matters; everything else is one bucket
    counts_d1 = rows[0]
    assert counts_d1.win_pct_active + counts_d1.win_pct_control + \
        counts_d1.tie_pct == pytest.approx(100.0)
    # the (2, 50) vs (3, -1) pair is a tie at depth 1 but decided at depth 2
    assert rows[0].tie_pct > rows[1].tie_pct


# --- ordinal helpers -----------------------------------------------------------------

def test_ordinal_pair_counts_matches_expansion():
    counts, _ = ordinal_pair_counts([3, 1, 2], [2, 2, 2])
    # brute force over the 6x6 expanded pairs
    active = [1] * 3 + [2] * 1 + [3] * 2
    control = [1] * 2 + [2] * 2 + [3] * 2
    wins = sum(a > c for a in active for c in control)
    losses = sum(a < c for a in active for c in control)
    ties = sum(a == c for a in active for c in control)
    assert (counts.wins, counts.losses, counts.ties) == (wins, losses, ties)


def test_marginal_proportions_validation():
    assert marginal_proportions({Arm.ACTIVE: [1, 3]})[Arm.ACTIVE] == (0.25, 0.75)
    with pytest.raises(AnalysisError, match="empty arm"):
        marginal_proportions({Arm.CONTROL: [0, 0]})


# --- JSON document -------------------------------------------------------------------

def test_stats_document_shape_and_nonfinite_encoding():
    config = small_config()
    ds = build_dataset(config, [(2, 2.0), (2, 3.0)], [(2, 0.0), (2, 1.0)])
    counts, placements = win_placements(ds)
    stats = win_statistics(counts, placements, ci_method="bootstrap", boot_reps=50)
    doc = stats_document(counts, stats, cumulative_components(
        ds, ci_method="bootstrap", boot_reps=50))
    text = dumps_stats(doc)
    parsed = json.loads(text)
    assert parsed["counts"]["wins"] + parsed["counts"]["losses"] + \
        parsed["counts"]["ties"] == counts.n_pairs
    assert parsed["win_odds"]["est"] == "inf"
    assert parsed["win_odds"]["degenerate"] is True
    assert parsed["ci_method"] == "bootstrap"
    assert [row["depth"] for row in parsed["cumulative"]] == [1, 2]
    assert text.endswith("\n")
