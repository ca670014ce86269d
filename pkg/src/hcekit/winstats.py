"""Win-statistics engine for hierarchical composite endpoints.

Counts wins, losses, and ties over all active-vs-control subject pairs and
turns them into the win probability, win odds, win ratio, and net benefit
with analytic or bootstrap confidence intervals. Also builds the ordinal
dominance curve and the cumulative-components breakdown that the plotting
layer consumes.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import norm

from .model import (
    AnalysisError,
    Arm,
    Comparison,
    HceDataset,
    HceError,
    compare,
)
from .seeds import mix_seed


@dataclass(frozen=True, slots=True)
class WinCounts:
    """Pairwise comparison tallies; wins/losses are from the active arm's
    point of view and wins + losses + ties = n_active * n_control."""

    wins: int
    losses: int
    ties: int
    n_active: int
    n_control: int

    def __post_init__(self) -> None:
        if min(self.wins, self.losses, self.ties) < 0:
            raise HceError("negative pair count")
        if self.wins + self.losses + self.ties != self.n_active * self.n_control:
            raise HceError("pair counts do not add up to n_active * n_control")

    @property
    def n_pairs(self) -> int:
        return self.n_active * self.n_control

    def swapped(self) -> "WinCounts":
        return WinCounts(self.losses, self.wins, self.ties, self.n_control, self.n_active)


@dataclass(frozen=True)
class Placements:
    """Per-subject pair tallies plus the sort keys they came from.

    ``active_wins[i]`` counts controls beaten by active subject i and
    ``control_wins[j]`` counts actives beaten by control subject j. The key
    arrays (category, direction-signed magnitude) let resampling procedures
    recount pairs without revisiting the dataset. Arrays are treated as
    read-only.
    """

    active_wins: np.ndarray
    active_ties: np.ndarray
    control_wins: np.ndarray
    control_ties: np.ndarray
    active_keys: tuple[np.ndarray, np.ndarray]
    control_keys: tuple[np.ndarray, np.ndarray]


class CiMethod(enum.Enum):
    ANALYTIC = "analytic"
    BOOTSTRAP = "bootstrap"


@dataclass(frozen=True)
class WinStats:
    """Win estimands with two-sided confidence intervals."""

    win_probability: float
    win_odds: float
    win_ratio: float
    net_benefit: float
    ci_win_odds: tuple[float, float]
    ci_win_ratio: tuple[float, float]
    ci_net_benefit: tuple[float, float]
    alpha: float
    ci_method: CiMethod
    degenerate: bool = False

    @property
    def ci_win_probability(self) -> tuple[float, float]:
        lo, hi = self.ci_net_benefit
        return ((lo + 1.0) / 2.0, (hi + 1.0) / 2.0)


@dataclass(frozen=True)
class OdgCurve:
    """Ordinal dominance curve in the unit square.

    Sweeping pooled values from worst to best, each distinct value appends a
    segment moving right by its control mass and up by its active mass; a
    value present in both arms yields one diagonal segment whose rectangle is
    split half-and-half. ``area_above`` equals the tie-credited win
    probability.
    """

    vertices: tuple[tuple[float, float], ...]
    area_above: float


@dataclass(frozen=True)
class CumulativeRow:
    """Win/loss/tie percentages and estimands at one inclusion depth, where
    only the first ``depth`` components distinguish subjects and everyone
    further down the hierarchy sits in a shared best tie bucket."""

    depth: int
    included_components: tuple[str, ...]
    win_pct_active: float
    win_pct_control: float
    tie_pct: float
    stats: WinStats


def sort_key_arrays(
    dataset: HceDataset,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-arm (category, signed magnitude) arrays realizing the composite
    total order: lexicographically larger keys are more favourable."""
    config = dataset.config
    signs = np.array([config.direction_sign(c) for c in range(1, config.k + 1)])

    def keys(arm: Arm) -> tuple[np.ndarray, np.ndarray]:
        values = dataset.values(arm)
        cat = np.array([v.category for v in values], dtype=np.int64)
        mag = np.array([v.magnitude for v in values], dtype=np.float64)
        signed = mag * signs[cat - 1] if len(values) else mag
        return cat, signed

    cat_a, val_a = keys(Arm.ACTIVE)
    cat_c, val_c = keys(Arm.CONTROL)
    return cat_a, val_a, cat_c, val_c


def _pair_sweep(
    cat_a: np.ndarray,
    val_a: np.ndarray,
    cat_c: np.ndarray,
    val_c: np.ndarray,
) -> tuple[WinCounts, Placements]:
    """Single sorted sweep over the pooled sample.

    Groups the pooled keys by exact equality, accumulates control/active
    masses below each group, and reads off wins and ties for every subject in
    O((n+m) log(n+m)).
    """
    n, m = len(cat_a), len(cat_c)
    if n == 0:
        raise AnalysisError("empty arm: Active")
    if m == 0:
        raise AnalysisError("empty arm: Control")
    cats = np.concatenate([cat_a, cat_c])
    vals = np.concatenate([val_a, val_c])
    is_active = np.zeros(n + m, dtype=bool)
    is_active[:n] = True
    order = np.lexsort((vals, cats))
    sc, sv, sa = cats[order], vals[order], is_active[order]
    new_group = np.empty(n + m, dtype=bool)
    new_group[0] = True
    new_group[1:] = (sc[1:] != sc[:-1]) | (sv[1:] != sv[:-1])
    gid_sorted = np.cumsum(new_group) - 1
    n_groups = int(gid_sorted[-1]) + 1
    a_in = np.bincount(gid_sorted[sa], minlength=n_groups)
    c_in = np.bincount(gid_sorted[~sa], minlength=n_groups)
    a_below = np.concatenate([[0], np.cumsum(a_in)[:-1]])
    c_below = np.concatenate([[0], np.cumsum(c_in)[:-1]])
    wins = int(np.dot(a_in, c_below))
    ties = int(np.dot(a_in, c_in))
    losses = n * m - wins - ties
    gid = np.empty(n + m, dtype=np.int64)
    gid[order] = gid_sorted
    ga, gc = gid[:n], gid[n:]
    placements = Placements(
        active_wins=c_below[ga],
        active_ties=c_in[ga],
        control_wins=a_below[gc],
        control_ties=a_in[gc],
        active_keys=(cat_a, val_a),
        control_keys=(cat_c, val_c),
    )
    return WinCounts(wins, losses, ties, n, m), placements


def win_counts_brute(dataset: HceDataset) -> WinCounts:
    """Count wins, losses, and ties by comparing every active-control pair
    directly. Quadratic; serves as the reference for the sweep-based path."""
    active = dataset.values(Arm.ACTIVE)
    control = dataset.values(Arm.CONTROL)
    if not active:
        raise AnalysisError("empty arm: Active")
    if not control:
        raise AnalysisError("empty arm: Control")
    config = dataset.config
    wins = losses = ties = 0
    for a in active:
        for c in control:
            outcome = compare(a, c, config)
            if outcome is Comparison.A_WINS:
                wins += 1
            elif outcome is Comparison.B_WINS:
                losses += 1
            else:
                ties += 1
    return WinCounts(wins, losses, ties, len(active), len(control))


def win_counts_fast(dataset: HceDataset) -> WinCounts:
    """Count wins, losses, and ties via one sort of the pooled sample."""
    counts, _ = _pair_sweep(*sort_key_arrays(dataset))
    return counts


def win_placements(dataset: HceDataset) -> tuple[WinCounts, Placements]:
    """Pair counts together with the per-subject placements needed for
    analytic confidence intervals and bootstrap recounting."""
    return _pair_sweep(*sort_key_arrays(dataset))


def ordinal_pair_counts(
    active_counts: Sequence[int], control_counts: Sequence[int]
) -> tuple[WinCounts, Placements]:
    """Pair counting on ordinal category counts (higher category better),
    e.g. the 8-category expansion of a composite."""
    if len(active_counts) != len(control_counts):
        raise HceError("arms must have the same number of categories")
    if any(c < 0 for c in (*active_counts, *control_counts)):
        raise HceError("negative count")
    cat_a = np.repeat(np.arange(1, len(active_counts) + 1), active_counts)
    cat_c = np.repeat(np.arange(1, len(control_counts) + 1), control_counts)
    return _pair_sweep(
        cat_a.astype(np.int64),
        np.zeros(len(cat_a)),
        cat_c.astype(np.int64),
        np.zeros(len(cat_c)),
    )


def _estimates(counts: WinCounts) -> tuple[float, float, float, float]:
    w, l, t = float(counts.wins), float(counts.losses), float(counts.ties)
    pairs = float(counts.n_pairs)
    theta = (w + 0.5 * t) / pairs
    # Count-level form keeps win odds and win ratio bit-identical when t = 0.
    num, den = w + 0.5 * t, l + 0.5 * t
    win_odds = math.inf if den == 0.0 else num / den
    if l > 0.0:
        win_ratio = w / l
    elif w > 0.0:
        win_ratio = math.inf
    else:
        win_ratio = math.nan
    net_benefit = (w - l) / pairs
    return theta, win_odds, win_ratio, net_benefit


def _analytic_intervals(
    counts: WinCounts, placements: Placements, alpha: float
) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float], bool]:
    n, m = counts.n_active, counts.n_control
    if n < 2 or m < 2:
        raise AnalysisError(
            "analytic confidence intervals need at least 2 subjects per arm; "
            "use ci_method='bootstrap' instead"
        )
    z = float(norm.ppf(1.0 - alpha / 2.0))
    theta, win_odds, win_ratio, net_benefit = _estimates(counts)

    # Placement (two-sample U-statistic projection) variance pieces.
    aw = placements.active_wins / m
    at = placements.active_ties / m
    al = 1.0 - aw - at
    cl = placements.control_wins / n          # share of actives beaten by j
    ct = placements.control_ties / n
    cw = 1.0 - cl - ct                        # share of actives beating j
    p_i = aw + 0.5 * at
    q_j = cw + 0.5 * ct
    var_theta = p_i.var(ddof=1) / n + q_j.var(ddof=1) / m
    se_theta = math.sqrt(max(var_theta, 0.0))

    degenerate = False
    if theta <= 0.0 or theta >= 1.0 or se_theta == 0.0:
        degenerate = True
        ci_wo = (win_odds, win_odds)
    else:
        se_logit = se_theta / (theta * (1.0 - theta))
        log_wo = math.log(theta / (1.0 - theta))
        ci_wo = (math.exp(log_wo - z * se_logit), math.exp(log_wo + z * se_logit))

    p_win = counts.wins / counts.n_pairs
    p_loss = counts.losses / counts.n_pairs
    if p_win == 0.0 or p_loss == 0.0:
        degenerate = True
        ci_wr = (win_ratio, win_ratio)
    else:
        var_pw = aw.var(ddof=1) / n + cw.var(ddof=1) / m
        var_pl = al.var(ddof=1) / n + cl.var(ddof=1) / m
        cov = (
            np.cov(aw, al, ddof=1)[0, 1] / n
            + np.cov(cw, cl, ddof=1)[0, 1] / m
        )
        var_log_wr = (
            var_pw / p_win**2 + var_pl / p_loss**2 - 2.0 * cov / (p_win * p_loss)
        )
        se_log_wr = math.sqrt(max(var_log_wr, 0.0))
        log_wr = math.log(p_win / p_loss)
        ci_wr = (math.exp(log_wr - z * se_log_wr), math.exp(log_wr + z * se_log_wr))

    half = 2.0 * z * se_theta
    ci_nb = (max(net_benefit - half, -1.0), min(net_benefit + half, 1.0))
    if not all(map(math.isfinite, (win_odds, win_ratio, *ci_wo, *ci_wr))):
        degenerate = True
    return ci_wo, ci_wr, ci_nb, degenerate


def _percentile_with_inf(ordered: np.ndarray, q: float) -> float:
    """Linear-interpolation percentile of a sorted array that may contain
    infinities, where interpolating toward an infinite order statistic
    takes its limiting value instead of numpy's inf - inf = nan."""
    h = (len(ordered) - 1) * (q / 100.0)
    a = float(ordered[math.floor(h)])
    b = float(ordered[math.ceil(h)])
    t = h - math.floor(h)
    if t == 0.0 or a == b:
        return a
    if math.isinf(a) and math.isinf(b):
        return math.nan  # opposite-signed neighbors: no defined limit
    if math.isinf(a) or math.isinf(b):
        return a if math.isinf(a) else b
    return a + (b - a) * t


def _bootstrap_intervals(
    placements: Placements, alpha: float, boot_reps: int, seed: int
) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float], bool]:
    cat_a, val_a = placements.active_keys
    cat_c, val_c = placements.control_keys
    n, m = len(cat_a), len(cat_c)
    if boot_reps < 2:
        raise HceError("boot_reps must be >= 2")
    wo = np.empty(boot_reps)
    wr = np.empty(boot_reps)
    nb = np.empty(boot_reps)
    for rep in range(boot_reps):
        rng = np.random.default_rng(mix_seed(seed, rep))
        ia = rng.integers(0, n, n)
        ic = rng.integers(0, m, m)
        counts, _ = _pair_sweep(cat_a[ia], val_a[ia], cat_c[ic], val_c[ic])
        _, wo[rep], wr[rep], nb[rep] = _estimates(counts)
    lo_q, hi_q = 100.0 * alpha / 2.0, 100.0 * (1.0 - alpha / 2.0)

    def pct(values: np.ndarray) -> tuple[float, float]:
        finite_or_inf = values[~np.isnan(values)]
        if len(finite_or_inf) == 0:
            return (math.nan, math.nan)
        if np.isinf(finite_or_inf).any():
            ordered = np.sort(finite_or_inf)
            return (
                _percentile_with_inf(ordered, lo_q),
                _percentile_with_inf(ordered, hi_q),
            )
        return (
            float(np.percentile(finite_or_inf, lo_q)),
            float(np.percentile(finite_or_inf, hi_q)),
        )

    ci_wo, ci_wr, ci_nb = pct(wo), pct(wr), pct(nb)
    degenerate = not all(map(math.isfinite, (*ci_wo, *ci_wr, *ci_nb)))
    return ci_wo, ci_wr, ci_nb, degenerate


def win_statistics(
    counts: WinCounts,
    placements: Placements,
    alpha: float = 0.05,
    ci_method: CiMethod | str = CiMethod.ANALYTIC,
    boot_reps: int = 2000,
    seed: int = 0,
) -> WinStats:
    """Win probability, win odds, win ratio, and net benefit with two-sided
    (1 - alpha) confidence intervals.

    The analytic intervals use the placement decomposition of the two-sample
    U-statistic: the win-odds interval is built on the logit of the win
    probability and back-transformed, the win-ratio interval on the log scale
    via the delta method over the joint (P_win, P_loss) estimate, and the
    net-benefit interval on the identity scale. The bootstrap method takes
    percentile intervals over ``boot_reps`` within-arm resamples with
    replicate seeds derived from ``seed``.
    """
    if not 0.0 < alpha < 1.0:
        raise HceError(f"alpha must be in (0, 1), got {alpha!r}")
    method = CiMethod(ci_method)
    theta, win_odds, win_ratio, net_benefit = _estimates(counts)
    if method is CiMethod.ANALYTIC:
        ci_wo, ci_wr, ci_nb, degenerate = _analytic_intervals(
            counts, placements, alpha
        )
    else:
        ci_wo, ci_wr, ci_nb, degenerate = _bootstrap_intervals(
            placements, alpha, boot_reps, seed
        )
    if not all(map(math.isfinite, (win_odds, win_ratio))):
        degenerate = True
    return WinStats(
        win_probability=theta,
        win_odds=win_odds,
        win_ratio=win_ratio,
        net_benefit=net_benefit,
        ci_win_odds=ci_wo,
        ci_win_ratio=ci_wr,
        ci_net_benefit=ci_nb,
        alpha=alpha,
        ci_method=method,
        degenerate=degenerate,
    )


def analyze(
    dataset: HceDataset,
    alpha: float = 0.05,
    ci_method: CiMethod | str = CiMethod.ANALYTIC,
    boot_reps: int = 2000,
    seed: int = 0,
) -> tuple[WinCounts, WinStats]:
    """One-stop pair counting plus estimation on a dataset."""
    counts, placements = win_placements(dataset)
    stats = win_statistics(counts, placements, alpha, ci_method, boot_reps, seed)
    return counts, stats


def ordinal_dominance_graph(dataset: HceDataset) -> OdgCurve:
    """Ordinal dominance curve of control (x) against active (y) cumulative
    fractions, swept from the worst pooled value to the best."""
    cat_a, val_a, cat_c, val_c = sort_key_arrays(dataset)
    counts, _ = _pair_sweep(cat_a, val_a, cat_c, val_c)
    n, m = counts.n_active, counts.n_control
    cats = np.concatenate([cat_a, cat_c])
    vals = np.concatenate([val_a, val_c])
    is_active = np.zeros(n + m, dtype=bool)
    is_active[:n] = True
    order = np.lexsort((vals, cats))
    sc, sv, sa = cats[order], vals[order], is_active[order]
    new_group = np.empty(n + m, dtype=bool)
    new_group[0] = True
    new_group[1:] = (sc[1:] != sc[:-1]) | (sv[1:] != sv[:-1])
    gid = np.cumsum(new_group) - 1
    n_groups = int(gid[-1]) + 1
    a_in = np.bincount(gid[sa], minlength=n_groups)
    c_in = np.bincount(gid[~sa], minlength=n_groups)
    vertices = [(0.0, 0.0)]
    terms = []
    u = v = 0.0
    for g in range(n_groups):
        du = c_in[g] / m
        dv = a_in[g] / n
        v_new = v + dv
        terms.append(du * (1.0 - 0.5 * (v + v_new)))
        u, v = u + du, v_new
        vertices.append((u, v))
    area_above = math.fsum(terms)
    return OdgCurve(tuple(vertices), area_above)


def _collapsed_keys(
    keys: tuple[np.ndarray, np.ndarray], depth: int
) -> tuple[np.ndarray, np.ndarray]:
    cat, val = keys
    keep = cat <= depth
    return np.where(keep, cat, depth + 1), np.where(keep, val, 0.0)


def cumulative_components(
    dataset: HceDataset,
    alpha: float = 0.05,
    ci_method: CiMethod | str = CiMethod.ANALYTIC,
    boot_reps: int = 2000,
    seed: int = 0,
) -> list[CumulativeRow]:
    """Win statistics at every inclusion depth 1..K.

    At depth k, subjects whose composite category exceeds k are collapsed
    into a shared tie bucket ranked above every included category, so ties
    can only shrink as k grows; the depth-K row reproduces the full analysis.
    """
    config = dataset.config
    cat_a, val_a, cat_c, val_c = sort_key_arrays(dataset)
    rows = []
    for depth in range(1, config.k + 1):
        ca, va = _collapsed_keys((cat_a, val_a), depth)
        cc, vc = _collapsed_keys((cat_c, val_c), depth)
        counts, placements = _pair_sweep(ca, va, cc, vc)
        stats = win_statistics(counts, placements, alpha, ci_method, boot_reps, seed)
        pairs = counts.n_pairs
        rows.append(
            CumulativeRow(
                depth=depth,
                included_components=tuple(
                    c.name for c in config.components[:depth]
                ),
                win_pct_active=100.0 * counts.wins / pairs,
                win_pct_control=100.0 * counts.losses / pairs,
                tie_pct=100.0 * counts.ties / pairs,
                stats=stats,
            )
        )
    return rows


def marginal_proportions(
    counts_by_arm: Mapping[Arm, Sequence[int]]
) -> dict[Arm, tuple[float, ...]]:
    """Normalize per-arm ordinal counts into proportion vectors."""
    out = {}
    for arm, counts in counts_by_arm.items():
        total = sum(counts)
        if total == 0:
            raise AnalysisError(f"empty arm: {arm.value}")
        if any(c < 0 for c in counts):
            raise HceError("negative count")
        out[arm] = tuple(c / total for c in counts)
    return out


def _json_float(x: float) -> float | str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _estimand(est: float, lo: float, hi: float) -> dict:
    entry: dict = {
        "est": _json_float(est),
        "lo": _json_float(lo),
        "hi": _json_float(hi),
    }
    if not all(map(math.isfinite, (est, lo, hi))):
        entry["degenerate"] = True
    return entry


def stats_document(
    counts: WinCounts,
    stats: WinStats,
    cumulative: Sequence[CumulativeRow] | None = None,
) -> dict:
    """Assemble the JSON-ready summary document (full float precision;
    non-finite values encoded as the strings "inf", "-inf", or "nan")."""
    doc = {
        "counts": {
            "wins": counts.wins,
            "losses": counts.losses,
            "ties": counts.ties,
            "n_active": counts.n_active,
            "n_control": counts.n_control,
        },
        "theta": _estimand(stats.win_probability, *stats.ci_win_probability),
        "win_odds": _estimand(stats.win_odds, *stats.ci_win_odds),
        "win_ratio": _estimand(stats.win_ratio, *stats.ci_win_ratio),
        "net_benefit": _estimand(stats.net_benefit, *stats.ci_net_benefit),
        "alpha": stats.alpha,
        "ci_method": stats.ci_method.value,
    }
    if cumulative is not None:
        doc["cumulative"] = [
            {
                "depth": row.depth,
                "included_components": list(row.included_components),
                "win_pct_active": row.win_pct_active,
                "win_pct_control": row.win_pct_control,
                "tie_pct": row.tie_pct,
                "stats": {
                    "theta": _estimand(
                        row.stats.win_probability, *row.stats.ci_win_probability
                    ),
                    "win_odds": _estimand(
                        row.stats.win_odds, *row.stats.ci_win_odds
                    ),
                    "win_ratio": _estimand(
                        row.stats.win_ratio, *row.stats.ci_win_ratio
                    ),
                    "net_benefit": _estimand(
                        row.stats.net_benefit, *row.stats.ci_net_benefit
                    ),
                },
            }
            for row in cumulative
        ]
    return doc


def dumps_stats(doc: Mapping) -> str:
    return json.dumps(doc, indent=2) + "\n"
