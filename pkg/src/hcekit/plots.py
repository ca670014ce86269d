"""SVG renderers for composite-endpoint figures.

Every renderer returns an :class:`~hcekit.svgscene.SvgScene` whose metadata
dict records the derived geometry (band widths, region areas, applied
adjustments), so layout claims can be tested without parsing the SVG.
"""

from __future__ import annotations

import enum
import math
from bisect import bisect_right
from typing import Sequence

import numpy as np

from .contour import extract_iso_contour
from .design import Overlay, SunsetGrid, DEFAULT_ISO_LEVELS
from .kde import box_stats, gaussian_kde
from .model import AnalysisError, Arm, HceDataset, HceError
from .svgscene import SvgScene
from .theme import DEFAULT_THEME, PlotTheme
from .winstats import CumulativeRow, OdgCurve, WinStats


class TieMode(enum.Enum):
    """How the diagonal (same-category) blocks of the paired mosaic are
    drawn: split in half along their diagonals, or traced by the tie-broken
    dominance path."""

    TRIANGLE_SPLIT = "triangles"
    ORDERED_TIE_BREAK = "ordered"


def _scale(domain: tuple[float, float], pixels: tuple[float, float]):
    d0, d1 = domain
    p0, p1 = pixels
    span = d1 - d0
    if span == 0.0:
        span = 1.0
    rate = (p1 - p0) / span

    def to_px(x: float) -> float:
        return p0 + (x - d0) * rate

    return to_px

def _ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(
        (m * mag for m in (1.0, 2.0, 2.5, 5.0, 10.0) if m * mag >= raw), 10.0 * mag
    )
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _fmt_tick(x: float) -> str:
    if x == int(x) and abs(x) < 1e6:
        return str(int(x))
    return f"{x:g}"


def _fmt_interval(stats: WinStats) -> str:
    def one(x: float) -> str:
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.2f}"

    lo, hi = stats.ci_win_odds
    return f"WO {one(stats.win_odds)} ({one(lo)}–{one(hi)})"


def _fmt_win_pct(theta: float) -> str:
    return f"{theta * 100:.0f}% vs {(1 - theta) * 100:.0f}%"


def _shoelace(points: Sequence[tuple[float, float]]) -> float:
    area = 0.0
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        area += x1 * y2 - x2 * y1
    return abs(area) / 2.0


def _violin_outline(
    grid: np.ndarray,
    density: np.ndarray,
    center: float,
    max_half: float,
    to_pos,
    horizontal: bool,
) -> list[tuple[float, float]]:
    peak = float(density.max())
    half = density / peak * max_half
    upper = []
    lower = []
    for g, h in zip(grid, half):
        pos = to_pos(float(g))
        if horizontal:
            upper.append((pos, center - h))
            lower.append((pos, center + h))
        else:
            upper.append((center + h, pos))
            lower.append((center - h, pos))
    return upper + lower[::-1]


def render_shift_plot(
    active_values: Sequence[float],
    control_values: Sequence[float],
    theme: PlotTheme = DEFAULT_THEME,
    width: float = 640.0,
    height: float = 460.0,
    value_label: str = "Value",
) -> SvgScene:
    """Violin-and-box comparison of a continuous outcome, with a shaded
    horizontal band spanning the two arm means."""
    a = np.asarray(active_values, dtype=float)
    c = np.asarray(control_values, dtype=float)
    grids = {}
    for arm_name, values in (("active", a), ("control", c)):
        grids[arm_name] = gaussian_kde(values)
    scene = SvgScene(width, height)
    top, right, bottom, left = theme.margin
    plot_w, plot_h = width - left - right, height - top - bottom
    lo = min(float(grids["active"][0].min()), float(grids["control"][0].min()))
    hi = max(float(grids["active"][0].max()), float(grids["control"][0].max()))
    pad = 0.04 * (hi - lo)
    to_y = _scale((lo - pad, hi + pad), (top + plot_h, top))

    mean_a, mean_c = float(a.mean()), float(c.mean())
    band_lo, band_hi = sorted((mean_a, mean_c))
    if band_hi > band_lo:
        scene.rect(
            "mean-band",
            left,
            to_y(band_hi),
            plot_w,
            to_y(band_lo) - to_y(band_hi),
            fill=theme.band_shade,
            opacity=0.45,
        )
    else:
        scene.line(
            "mean-band",
            left,
            to_y(band_lo),
            left + plot_w,
            to_y(band_lo),
            stroke=theme.band_shade,
            stroke_width=2.0,
        )

    centers = {"active": left + plot_w * 0.3, "control": left + plot_w * 0.7}
    colors = {"active": theme.active_color, "control": theme.control_color}
    for arm_name, values in (("active", a), ("control", c)):
        grid, density = grids[arm_name]
        outline = _violin_outline(
            grid, density, centers[arm_name], plot_w * 0.17, to_y, horizontal=False
        )
        scene.polygon(
            f"violin-{arm_name}",
            outline,
            fill=colors[arm_name],
            opacity=0.55,
            stroke=colors[arm_name],
        )
        box = box_stats(values)
        cx = centers[arm_name]
        scene.line(
            f"whisker-{arm_name}",
            cx,
            to_y(box.whisker_lo),
            cx,
            to_y(box.whisker_hi),
            stroke="#333333",
            stroke_width=1.0,
        )
        scene.rect(
            f"box-{arm_name}",
            cx - 7.0,
            to_y(box.q3),
            14.0,
            to_y(box.q1) - to_y(box.q3),
            fill="#ffffff",
            stroke="#333333",
            stroke_width=1.2,
        )
        scene.line(
            f"median-{arm_name}",
            cx - 7.0,
            to_y(box.median),
            cx + 7.0,
            to_y(box.median),
            stroke="#333333",
            stroke_width=2.0,
        )
        scene.text(
            f"label-{arm_name}",
            cx,
            top + plot_h + 22.0,
            arm_name.capitalize(),
            font_family=theme.font_family,
            font_size=theme.font_size,
            text_anchor="middle",
        )

    scene.line(
        "axis-y", left, top, left, top + plot_h, stroke="#000000", stroke_width=1.0
    )
    for i, tick in enumerate(_ticks(lo - pad, hi + pad)):
        y = to_y(tick)
        scene.line(
            f"tick-y-{i}", left - 5.0, y, left, y, stroke="#000000", stroke_width=1.0
        )
        scene.text(
            f"tick-y-label-{i}",
            left - 9.0,
            y + 4.0,
            _fmt_tick(tick),
            font_family=theme.font_family,
            font_size=10.0,
            text_anchor="end",
        )
    scene.text(
        "axis-y-title",
        16.0,
        top + plot_h / 2.0,
        value_label,
        font_family=theme.font_family,
        font_size=theme.font_size,
        text_anchor="middle",
        transform=f"rotate(-90 16 {top + plot_h / 2.0:.6g})",
    )
    scene.metadata = {
        "plot": "shift",
        "n_active": int(len(a)),
        "n_control": int(len(c)),
        "mean_active": mean_a,
        "mean_control": mean_c,
        "band_extent": abs(mean_a - mean_c),
        "band_px": abs(to_y(band_lo) - to_y(band_hi)),
        "value_domain": [lo - pad, hi + pad],
    }
    return scene


def render_binary_bar(
    active: tuple[int, int],
    control: tuple[int, int],
    theme: PlotTheme = DEFAULT_THEME,
    width: float = 520.0,
    height: float = 420.0,
    outcome_label: str = "Outcome proportion",
) -> SvgScene:
    """Two proportion bars with a shaded band between the arm proportions."""
    for label, (events, n) in (("active", active), ("control", control)):
        if n < 1:
            raise AnalysisError(f"empty arm: {label}")
        if not 0 <= events <= n:
            raise HceError(f"{label}: events must be within [0, n]")
    p_a = active[0] / active[1]
    p_c = control[0] / control[1]
    scene = SvgScene(width, height)
    top, right, bottom, left = theme.margin
    plot_w, plot_h = width - left - right, height - top - bottom
    y_max = min(1.0, max(p_a, p_c, 0.02) * 1.3)
    to_y = _scale((0.0, y_max), (top + plot_h, top))

    band_lo, band_hi = sorted((p_a, p_c))
    if band_hi > band_lo:
        scene.rect(
            "prop-band",
            left,
            to_y(band_hi),
            plot_w,
            to_y(band_lo) - to_y(band_hi),
            fill=theme.band_shade,
            opacity=0.45,
        )
    else:
        scene.line(
            "prop-band",
            left,
            to_y(band_lo),
            left + plot_w,
            to_y(band_lo),
            stroke=theme.band_shade,
            stroke_width=2.0,
        )
    bar_w = plot_w * 0.22
    centers = {"active": left + plot_w * 0.3, "control": left + plot_w * 0.7}
    colors = {"active": theme.active_color, "control": theme.control_color}
    for arm_name, p in (("active", p_a), ("control", p_c)):
        x = centers[arm_name] - bar_w / 2.0
        scene.rect(
            f"bar-{arm_name}",
            x,
            to_y(p),
            bar_w,
            to_y(0.0) - to_y(p),
            fill=colors[arm_name],
        )
        scene.text(
            f"pct-{arm_name}",
            centers[arm_name],
            max(to_y(p) - 6.0, 12.0),
            f"{100 * p:.1f}%",
            font_family=theme.font_family,
            font_size=theme.font_size,
            text_anchor="middle",
        )
        scene.text(
            f"label-{arm_name}",
            centers[arm_name],
            top + plot_h + 22.0,
            arm_name.capitalize(),
            font_family=theme.font_family,
            font_size=theme.font_size,
            text_anchor="middle",
        )
    scene.line(
        "axis-y", left, top, left, top + plot_h, stroke="#000000", stroke_width=1.0
    )
    for i, tick in enumerate(_ticks(0.0, y_max)):
        y = to_y(tick)
        scene.line(
            f"tick-y-{i}", left - 5.0, y, left, y, stroke="#000000", stroke_width=1.0
        )
        scene.text(
            f"tick-y-label-{i}",
            left - 9.0,
            y + 4.0,
            f"{100 * tick:g}%",
            font_family=theme.font_family,
            font_size=10.0,
            text_anchor="end",
        )
    scene.text(
        "axis-y-title",
        16.0,
        top + plot_h / 2.0,
        outcome_label,
        font_family=theme.font_family,
        font_size=theme.font_size,
        text_anchor="middle",
        transform=f"rotate(-90 16 {top + plot_h / 2.0:.6g})",
    )
    scene.metadata = {
        "plot": "binary",
        "prop_active": p_a,
        "prop_control": p_c,
        "band": [band_lo, band_hi],
        "y_max": y_max,
    }
    return scene


def _check_props(props: Sequence[float], label: str) -> None:
    if any(p < 0 for p in props):
        raise HceError(f"{label}: negative proportion")
    if abs(sum(props) - 1.0) > 1e-9:
        raise HceError(f"{label}: proportions must sum to 1 (got {sum(props)!r})")


def render_mosaic(
    active_props: Sequence[float],
    control_props: Sequence[float],
    labels: Sequence[str] | None = None,
    split_index: int | None = None,
    theme: PlotTheme = DEFAULT_THEME,
    width: float = 560.0,
    height: float = 460.0,
) -> SvgScene:
    """Per-arm stacked severity bars (most severe at the bottom), optionally
    split by a gap after category ``split_index`` to separate event
    categories from the rest."""
    if len(active_props) != len(control_props):
        raise HceError("arms must have the same number of categories")
    k = len(active_props)
    if k < 2:
        raise HceError("need at least 2 categories")
    _check_props(active_props, "active")
    _check_props(control_props, "control")
    if split_index is not None and not 1 <= split_index < k:
        raise HceError(f"split_index must be in 1..{k - 1}")
    scene = SvgScene(width, height)
    top, right, bottom, left = theme.margin
    plot_w, plot_h = width - left - right, height - top - bottom
    gap = 14.0 if split_index is not None else 0.0
    usable = plot_h - gap
    ramp = theme.severity_ramp(k)
    bar_w = plot_w * 0.26
    centers = {"active": left + plot_w * 0.3, "control": left + plot_w * 0.7}
    extents: dict[str, list[list[float]]] = {}
    for arm_name, props in (("active", active_props), ("control", control_props)):
        y = top + plot_h
        arm_extents = []
        for idx, p in enumerate(props, start=1):
            h = p * usable
            y -= h
            scene.rect(
                f"seg-{arm_name}-{idx}",
                centers[arm_name] - bar_w / 2.0,
                y,
                bar_w,
                h,
                fill=ramp[idx - 1],
                stroke="#ffffff",
                stroke_width=0.8,
            )
            arm_extents.append([y, y + h])
            if split_index is not None and idx == split_index:
                y -= gap
        extents[arm_name] = arm_extents
        scene.text(
            f"label-{arm_name}",
            centers[arm_name],
            top + plot_h + 22.0,
            arm_name.capitalize(),
            font_family=theme.font_family,
            font_size=theme.font_size,
            text_anchor="middle",
        )
    if labels is not None:
        if len(labels) != k:
            raise HceError("labels must match the number of categories")
        for idx, (name, color) in enumerate(zip(labels, ramp), start=1):
            y = top + 14.0 * idx
            x = left + plot_w * 0.44
            scene.rect(
                f"legend-swatch-{idx}", x, y - 8.0, 9.0, 9.0, fill=color
            )
            scene.text(
                f"legend-label-{idx}",
                x + 13.0,
                y,
                name,
                font_family=theme.font_family,
                font_size=9.5,
            )
    scene.metadata = {
        "plot": "mosaic",
        "categories": k,
        "split_index": split_index,
        "gap_px": gap,
        "segments_px": extents,
        "active_props": list(map(float, active_props)),
        "control_props": list(map(float, control_props)),
    }
    return scene


def _cumulative(props: Sequence[float]) -> list[float]:
    out = [0.0]
    total = 0.0
    for p in props:
        total += p
        out.append(total)
    out[-1] = 1.0
    return out


def render_mosaic_2d(
    active_props: Sequence[float],
    control_props: Sequence[float],
    odg: OdgCurve,
    stats: WinStats,
    tie_mode: TieMode = TieMode.ORDERED_TIE_BREAK,
    labels: Sequence[str] | None = None,
    theme: PlotTheme = DEFAULT_THEME,
    width: float = 640.0,
    height: float = 640.0,
) -> SvgScene:
    """Paired mosaic: column widths follow the control marginals, row heights
    the active marginals, best outcomes at the top and right. The dominance
    path splits the square into a win region (above) and a loss region, with
    the black main diagonal as the no-effect reference."""
    if len(active_props) != len(control_props):
        raise HceError("arms must have the same number of categories")
    k = len(active_props)
    _check_props(active_props, "active")
    _check_props(control_props, "control")
    cum_c = _cumulative(control_props)
    cum_a = _cumulative(active_props)
    for u, v in zip(cum_c, cum_a):
        if not any(
            abs(u - vu) <= 1e-9 and abs(v - vv) <= 1e-9 for vu, vv in odg.vertices
        ):
            raise HceError(
                "dominance curve is inconsistent with the supplied marginals"
            )
    if tie_mode is TieMode.TRIANGLE_SPLIT:
        curve = list(zip(cum_c, cum_a))
    else:
        curve = list(odg.vertices)

    scene = SvgScene(width, height)
    top, right, bottom, left = theme.margin
    side = min(width - left - right, height - top - bottom)
    to_x = _scale((0.0, 1.0), (left, left + side))
    to_y = _scale((0.0, 1.0), (top + side, top))

    def px(points: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
        return [(to_x(u), to_y(v)) for u, v in points]

    win_poly = curve + [(0.0, 1.0)]
    loss_poly = curve + [(1.0, 0.0)]
    scene.polygon("win-region", px(win_poly), fill=theme.win_fill)
    scene.polygon("loss-region", px(loss_poly), fill=theme.loss_fill)
    if tie_mode is TieMode.TRIANGLE_SPLIT:
        for i in range(1, k + 1):
            if active_props[i - 1] <= 0.0 or control_props[i - 1] <= 0.0:
                continue
            x0, x1 = cum_c[i - 1], cum_c[i]
            y0, y1 = cum_a[i - 1], cum_a[i]
            scene.polygon(
                f"tie-upper-{i}",
                px([(x0, y0), (x1, y1), (x0, y1)]),
                fill=theme.tie_win_fill,
            )
            scene.polygon(
                f"tie-lower-{i}",
                px([(x0, y0), (x1, y1), (x1, y0)]),
                fill=theme.tie_loss_fill,
            )
    rect_areas = []
    for i in range(1, k + 1):  # active category (rows)
        row_areas = []
        for j in range(1, k + 1):  # control category (columns)
            x0, x1 = to_x(cum_c[j - 1]), to_x(cum_c[j])
            y0, y1 = to_y(cum_a[i]), to_y(cum_a[i - 1])
            scene.rect(
                f"cell-{i}-{j}",
                x0,
                y0,
                x1 - x0,
                y1 - y0,
                fill="none",
                stroke="#666666",
                stroke_width=0.7,
            )
            row_areas.append(
                (cum_c[j] - cum_c[j - 1]) * (cum_a[i] - cum_a[i - 1])
            )
        rect_areas.append(row_areas)
    scene.line(
        "diagonal",
        to_x(0.0),
        to_y(0.0),
        to_x(1.0),
        to_y(1.0),
        stroke="#000000",
        stroke_width=1.4,
    )
    scene.polyline(
        "dominance-path",
        px(curve),
        stroke="#1a1a1a",
        stroke_width=1.6,
    )
    scene.text(
        "annotation-winpct",
        left + side / 2.0,
        top - 26.0,
        _fmt_win_pct(stats.win_probability),
        font_family=theme.font_family,
        font_size=theme.font_size + 2.0,
        text_anchor="middle",
    )
    scene.text(
        "annotation-wo",
        left + side / 2.0,
        top - 10.0,
        _fmt_interval(stats),
        font_family=theme.font_family,
        font_size=theme.font_size,
        text_anchor="middle",
    )
    scene.text(
        "axis-x-title",
        left + side / 2.0,
        top + side + 30.0,
        "Control (cumulative proportion, worst to best)",
        font_family=theme.font_family,
        font_size=theme.font_size,
        text_anchor="middle",
    )
    scene.text(
        "axis-y-title",
        16.0,
        top + side / 2.0,
        "Active (cumulative proportion, worst to best)",
        font_family=theme.font_family,
        font_size=theme.font_size,
        text_anchor="middle",
        transform=f"rotate(-90 16 {top + side / 2.0:.6g})",
    )
    if labels is not None and len(labels) == k:
        for i, name in enumerate(labels, start=1):
            if active_props[i - 1] > 0.02:
                cy = to_y((cum_a[i - 1] + cum_a[i]) / 2.0)
                scene.text(
                    f"row-label-{i}",
                    left + side + 6.0,
                    cy + 3.0,
                    name,
                    font_family=theme.font_family,
                    font_size=8.5,
                )
    scene.metadata = {
        "plot": "mosaic2d",
        "tie_mode": tie_mode.value,
        "categories": k,
        "rect_areas": rect_areas,
        "win_region_area": _shoelace(win_poly),
        "loss_region_area": _shoelace(loss_poly),
        "theta_annotated": stats.win_probability,
        "active_props": list(map(float, active_props)),
        "control_props": list(map(float, control_props)),
    }
    return scene


_SLIVER = 0.01


def render_maraca(
    dataset: HceDataset,
    stats: WinStats,
    theme: PlotTheme = DEFAULT_THEME,
    width: float = 920.0,
    height: float = 520.0,
) -> SvgScene:
    """Maraca view: the x axis is partitioned into one band per component,
    sized by pooled proportions, with per-arm cumulative step curves over the
    time-to-event bands and horizontal violin-plus-box glyphs for the
    continuous component."""
    config = dataset.config
    k = config.k
    n_a, n_c = dataset.size(Arm.ACTIVE), dataset.size(Arm.CONTROL)
    if n_a == 0 or n_c == 0:
        raise AnalysisError("empty arm")
    counts_a = dataset.category_counts(Arm.ACTIVE)
    counts_c = dataset.category_counts(Arm.CONTROL)
    pooled = [a + c for a, c in zip(counts_a, counts_c)]
    total = n_a + n_c
    raw_fracs = [p / total for p in pooled]
    empty = [p == 0 for p in pooled]
    n_empty = sum(empty)
    scale_factor = 1.0 - _SLIVER * n_empty
    adj_fracs = [
        _SLIVER if is_empty else frac * scale_factor
        for frac, is_empty in zip(raw_fracs, empty)
    ]
    notes = []
    if n_empty:
        notes.append(f"{n_empty} empty band(s) widened to minimal slivers")
    if any(p == total for p in pooled):
        notes.append("degenerate layout: every subject is in one component")

    scene = SvgScene(width, height)
    top, right, bottom, left = theme.margin
    top += 18.0  # room for the two-row band labels
    plot_w, plot_h = width - left - right, height - top - bottom
    edges = [left]
    for frac in adj_fracs:
        edges.append(edges[-1] + frac * plot_w)
    edges[-1] = left + plot_w
    to_y = _scale((0.0, 100.0), (top + plot_h, top))

    scene.rect(
        "frame", left, top, plot_w, plot_h, fill="none", stroke="#888888",
        stroke_width=1.0,
    )
    for idx in range(1, k):
        scene.line(
            f"separator-{idx}",
            edges[idx],
            top,
            edges[idx],
            top + plot_h,
            stroke="#999999",
            stroke_width=1.0,
            stroke_dasharray="4 3",
        )
    tau = dataset.follow_up
    curve_levels = {}
    for arm, arm_name, n_arm, counts in (
        (Arm.ACTIVE, "active", n_a, counts_a),
        (Arm.CONTROL, "control", n_c, counts_c),
    ):
        by_cat: dict[int, list[float]] = {i: [] for i in range(1, k)}
        for value in dataset.values(arm):
            if value.category < k:
                by_cat[value.category].append(value.magnitude)
        points = []
        level = 0.0
        for cat in range(1, k):
            x0, x1 = edges[cat - 1], edges[cat]
            if not points:
                points.append((x0, to_y(level)))
            for t in sorted(by_cat[cat]):
                x = x0 + (t / tau) * (x1 - x0)
                points.append((x, to_y(level)))
                level += 100.0 / n_arm
                points.append((x, to_y(level)))
            points.append((x1, to_y(level)))
        color = theme.active_color if arm is Arm.ACTIVE else theme.control_color
        scene.polyline(
            f"step-{arm_name}", points, stroke=color, stroke_width=1.8
        )
        curve_levels[arm_name] = level

    cont_values = {
        "active": np.asarray(dataset.continuous_values(Arm.ACTIVE)),
        "control": np.asarray(dataset.continuous_values(Arm.CONTROL)),
    }
    pooled_cont = np.concatenate([cont_values["active"], cont_values["control"]])
    violin_offsets = {"active": 62.0, "control": 38.0}
    if len(pooled_cont) > 0:
        x0, x1 = edges[k - 1] + 5.0, edges[k] - 5.0
        kdes: dict[str, tuple[np.ndarray, np.ndarray] | None] = {}
        lo, hi = float(pooled_cont.min()), float(pooled_cont.max())
        for arm_name in ("active", "control"):
            values = cont_values[arm_name]
            if len(values) == 0:
                continue
            try:
                grid, density = gaussian_kde(values)
            except AnalysisError as exc:
                kdes[arm_name] = None
                notes.append(f"{arm_name} violin skipped: {exc}")
                continue
            kdes[arm_name] = (grid, density)
            lo, hi = min(lo, float(grid.min())), max(hi, float(grid.max()))
        pad = 0.02 * (hi - lo) if hi > lo else 1.0
        to_cont_x = _scale((lo - pad, hi + pad), (x0, x1))
        half_px = 9.0 / 100.0 * plot_h
        for arm_name in ("active", "control"):
            values = cont_values[arm_name]
            if len(values) == 0:
                notes.append(f"no continuous values in the {arm_name} arm")
                continue
            cy = to_y(violin_offsets[arm_name])
            color = theme.active_color if arm_name == "active" else theme.control_color
            if kdes[arm_name] is not None:
                grid, density = kdes[arm_name]
                outline = _violin_outline(
                    grid, density, cy, half_px, to_cont_x, horizontal=True
                )
                scene.polygon(
                    f"violin-{arm_name}", outline, fill=color, opacity=0.5,
                    stroke=color,
                )
            box = box_stats(values)
            scene.line(
                f"whisker-{arm_name}",
                to_cont_x(box.whisker_lo),
                cy,
                to_cont_x(box.whisker_hi),
                cy,
                stroke="#333333",
                stroke_width=1.0,
            )
            scene.rect(
                f"box-{arm_name}",
                to_cont_x(box.q1),
                cy - 5.0,
                to_cont_x(box.q3) - to_cont_x(box.q1),
                10.0,
                fill="#ffffff",
                stroke="#333333",
                stroke_width=1.1,
            )
            scene.line(
                f"median-{arm_name}",
                to_cont_x(box.median),
                cy - 5.0,
                to_cont_x(box.median),
                cy + 5.0,
                stroke="#333333",
                stroke_width=1.8,
            )
    else:
        notes.append("no continuous values in either arm")

    for idx, spec in enumerate(config.components, start=1):
        name = spec.name + ("*" if empty[idx - 1] else "")
        cx = (edges[idx - 1] + edges[idx]) / 2.0
        y = top - 24.0 + 12.0 * ((idx - 1) % 2)
        scene.text(
            f"band-label-{idx}",
            cx,
            y,
            f"{name} ({100 * raw_fracs[idx - 1]:.1f}%)",
            font_family=theme.font_family,
            font_size=9.5,
            text_anchor="middle",
        )
    if n_empty:
        scene.text(
            "sliver-footnote",
            left,
            height - 10.0,
            "* component empty; band drawn at minimal width",
            font_family=theme.font_family,
            font_size=9.0,
        )
    scene.text(
        "annotation-wo",
        left + plot_w,
        top - 34.0,
        _fmt_interval(stats),
        font_family=theme.font_family,
        font_size=theme.font_size,
        text_anchor="end",
    )
    for i, tick in enumerate((0, 25, 50, 75, 100)):
        y = to_y(float(tick))
        scene.line(
            f"tick-y-{i}", left - 5.0, y, left, y, stroke="#000000", stroke_width=1.0
        )
        scene.text(
            f"tick-y-label-{i}",
            left - 9.0,
            y + 4.0,
            f"{tick}%",
            font_family=theme.font_family,
            font_size=10.0,
            text_anchor="end",
        )
    scene.text(
        "axis-y-title",
        16.0,
        top + plot_h / 2.0,
        "Cumulative share of arm (%)",
        font_family=theme.font_family,
        font_size=theme.font_size,
        text_anchor="middle",
        transform=f"rotate(-90 16 {top + plot_h / 2.0:.6g})",
    )
    scene.metadata = {
        "plot": "maraca",
        "band_fracs_raw": raw_fracs,
        "band_fracs_adjusted": adj_fracs,
        "sliver_applied": empty,
        "band_edges_px": edges,
        "plot_width_px": plot_w,
        "curve_end_levels": curve_levels,
        "violin_offsets": violin_offsets,
        "notes": notes,
    }
    return scene


def render_component_plot(
    rows: Sequence[CumulativeRow],
    theme: PlotTheme = DEFAULT_THEME,
    width: float = 880.0,
) -> SvgScene:
    """Cumulative component summary: full-width win/tie/loss bars on the
    left, win odds and win ratio on a shared log axis on the right, with a
    dashed no-effect line at 1."""
    if not rows:
        raise HceError("no rows to plot")
    row_h = 56.0
    top_pad, bottom_pad = 72.0, 58.0
    height = top_pad + row_h * len(rows) + bottom_pad
    scene = SvgScene(width, height)
    label_w = 180.0
    bars_x0, bars_w = label_w, 320.0
    forest_x0 = bars_x0 + bars_w + 46.0
    forest_w = width - forest_x0 - 40.0

    finite_vals = [1.0]
    for row in rows:
        for value in (
            row.stats.win_odds,
            row.stats.win_ratio,
            *row.stats.ci_win_odds,
            *row.stats.ci_win_ratio,
        ):
            if math.isfinite(value) and value > 0.0:
                finite_vals.append(value)
    dom_lo = min(finite_vals) / 1.15
    dom_hi = max(finite_vals) * 1.15
    to_fx = _scale((math.log10(dom_lo), math.log10(dom_hi)),
                   (forest_x0, forest_x0 + forest_w))

    def fx(value: float) -> tuple[float, bool]:
        if not math.isfinite(value) or value <= 0.0:
            return forest_x0 + forest_w, True
        return min(max(to_fx(math.log10(value)), forest_x0), forest_x0 + forest_w), False

    scene.text(
        "title-bars",
        bars_x0 + bars_w / 2.0,
        26.0,
        "Wins / ties / losses (% of pairs)",
        font_family=theme.font_family,
        font_size=theme.font_size,
        text_anchor="middle",
    )
    scene.text(
        "title-forest",
        forest_x0 + forest_w / 2.0,
        26.0,
        "Win odds and win ratio (log scale)",
        font_family=theme.font_family,
        font_size=theme.font_size,
        text_anchor="middle",
    )
    scene.circle("legend-wo", forest_x0 + 8.0, 44.0, 4.5, fill="#1a1a1a")
    scene.text(
        "legend-wo-label", forest_x0 + 17.0, 48.0, "Win odds",
        font_family=theme.font_family, font_size=10.0,
    )
    scene.rect(
        "legend-wr", forest_x0 + 92.0, 39.5, 9.0, 9.0,
        fill="#ffffff", stroke="#1a1a1a", stroke_width=1.4,
    )
    scene.text(
        "legend-wr-label", forest_x0 + 107.0, 48.0, "Win ratio",
        font_family=theme.font_family, font_size=10.0,
    )
    one_x, _ = fx(1.0)
    scene.line(
        "no-effect",
        one_x,
        top_pad - 8.0,
        one_x,
        top_pad + row_h * len(rows),
        stroke="#555555",
        stroke_width=1.2,
        stroke_dasharray="5 4",
    )
    meta_rows = []
    bar_h = 24.0
    for r_idx, row in enumerate(rows):
        y_mid = top_pad + row_h * r_idx + row_h / 2.0
        added = row.included_components[-1]
        label = added if row.depth == 1 else f"+ {added}"
        scene.text(
            f"row-label-{row.depth}",
            label_w - 12.0,
            y_mid + 4.0,
            label,
            font_family=theme.font_family,
            font_size=theme.font_size - 1.0,
            text_anchor="end",
        )
        segments = [
            ("win", row.win_pct_active, theme.active_color),
            ("tie", row.tie_pct, theme.tie_color),
            ("loss", row.win_pct_control, theme.control_color),
        ]
        x = bars_x0
        seg_px = {}
        for seg_name, pct, color in segments:
            w = pct / 100.0 * bars_w
            scene.rect(
                f"bar-{seg_name}-{row.depth}",
                x,
                y_mid - bar_h / 2.0,
                w,
                bar_h,
                fill=color,
                stroke="#ffffff",
                stroke_width=0.6,
            )
            if w >= 34.0:
                scene.text(
                    f"bar-{seg_name}-label-{row.depth}",
                    x + w / 2.0,
                    y_mid + 3.5,
                    f"{pct:.1f}%",
                    font_family=theme.font_family,
                    font_size=9.5,
                    text_anchor="middle",
                    fill="#ffffff" if seg_name != "tie" else "#333333",
                )
            seg_px[seg_name] = w
            x += w
        wo_x, wo_clamped = fx(row.stats.win_odds)
        wo_lo_x, c1 = fx(row.stats.ci_win_odds[0])
        wo_hi_x, c2 = fx(row.stats.ci_win_odds[1])
        scene.line(
            f"wo-ci-{row.depth}", wo_lo_x, y_mid - 7.0, wo_hi_x, y_mid - 7.0,
            stroke="#1a1a1a", stroke_width=1.4,
        )
        scene.circle(f"wo-marker-{row.depth}", wo_x, y_mid - 7.0, 4.5, fill="#1a1a1a")
        wr_x, wr_clamped = fx(row.stats.win_ratio)
        wr_lo_x, c3 = fx(row.stats.ci_win_ratio[0])
        wr_hi_x, c4 = fx(row.stats.ci_win_ratio[1])
        scene.line(
            f"wr-ci-{row.depth}", wr_lo_x, y_mid + 7.0, wr_hi_x, y_mid + 7.0,
            stroke="#1a1a1a", stroke_width=1.4,
        )
        scene.rect(
            f"wr-marker-{row.depth}", wr_x - 4.5, y_mid + 2.5, 9.0, 9.0,
            fill="#ffffff", stroke="#1a1a1a", stroke_width=1.4,
        )
        meta_rows.append(
            {
                "depth": row.depth,
                "win_pct_active": row.win_pct_active,
                "tie_pct": row.tie_pct,
                "win_pct_control": row.win_pct_control,
                "segments_px": seg_px,
                "wo_marker_x": wo_x,
                "wr_marker_x": wr_x,
                "clamped": bool(
                    wo_clamped or wr_clamped or c1 or c2 or c3 or c4
                ),
            }
        )
    axis_y = top_pad + row_h * len(rows) + 10.0
    for i, tick in enumerate((0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0)):
        if dom_lo <= tick <= dom_hi:
            x, _ = fx(tick)
            scene.line(
                f"tick-forest-{i}", x, axis_y, x, axis_y + 5.0,
                stroke="#000000", stroke_width=1.0,
            )
            scene.text(
                f"tick-forest-label-{i}", x, axis_y + 17.0, _fmt_tick(tick),
                font_family=theme.font_family, font_size=10.0, text_anchor="middle",
            )
    scene.line(
        "axis-forest", forest_x0, axis_y, forest_x0 + forest_w, axis_y,
        stroke="#000000", stroke_width=1.0,
    )
    scene.metadata = {
        "plot": "components",
        "bars_width_px": bars_w,
        "forest_domain": [dom_lo, dom_hi],
        "no_effect_x": one_x,
        "rows": meta_rows,
    }
    return scene


def render_sunset(
    grid: SunsetGrid,
    iso_levels: Sequence[float] | None = None,
    anchors: Sequence[tuple[float, float, str]] = (),
    overlay: Overlay | None = None,
    theme: PlotTheme = DEFAULT_THEME,
    width: float = 820.0,
    height: float = 560.0,
) -> SvgScene:
    """Win-odds landscape over (hazard ratio, mean difference): filled bands
    between iso levels on a red-to-green ramp (clamped dark red at or below
    1 and dark green at or above the top level), iso polylines, and the
    optional feasibility overlay. A requested level of 1.2 is drawn as a
    solid grey line."""
    if iso_levels is None:
        levels = sorted(set(DEFAULT_ISO_LEVELS) | {1.2})
    else:
        levels = sorted(set(float(x) for x in iso_levels))
        if not levels:
            raise HceError("iso_levels must not be empty")
        for level in levels:
            if not math.isfinite(level):
                raise HceError("iso levels must be finite")
    values = np.asarray(grid.values, dtype=float)
    rows, cols = values.shape
    scene = SvgScene(width, height)
    top, right, bottom, left = theme.margin
    legend_w = 118.0
    plot_w = width - left - right - legend_w
    plot_h = height - top - bottom
    hr_axis = np.asarray(grid.hr_axis)
    delta_axis = np.asarray(grid.delta_axis)
    to_x = _scale((float(hr_axis[0]), float(hr_axis[-1])), (left, left + plot_w))
    to_y = _scale(
        (float(delta_axis[0]), float(delta_axis[-1])), (top + plot_h, top)
    )
    colors = theme.sunset_ramp(len(levels) + 1)

    centers = (values[:-1, :-1] + values[1:, :-1] + values[:-1, 1:] + values[1:, 1:]) / 4.0
    band_idx = np.searchsorted(np.asarray(levels), centers, side="right")
    cell_count = 0
    for i in range(rows - 1):
        j = 0
        run = 0
        while j < cols - 1:
            j_end = j
            while j_end + 1 < cols - 1 and band_idx[i, j_end + 1] == band_idx[i, j]:
                j_end += 1
            x0, x1 = to_x(float(hr_axis[j])), to_x(float(hr_axis[j_end + 1]))
            y0, y1 = to_y(float(delta_axis[i + 1])), to_y(float(delta_axis[i]))
            scene.rect(
                f"band-{i}-{run}",
                x0,
                y0,
                x1 - x0,
                y1 - y0,
                fill=colors[int(band_idx[i, j])],
            )
            cell_count += 1
            run += 1
            j = j_end + 1

    vmin, vmax = float(values.min()), float(values.max())
    drawn, skipped = [], []
    for level in levels:
        polylines = extract_iso_contour(values, level)
        if not polylines:
            skipped.append(level)
            continue
        drawn.append(level)
        is_anchor_line = abs(level - 1.2) < 1e-9
        for p_idx, polyline in enumerate(polylines):
            points = [
                (
                    to_x(float(np.interp(gx, np.arange(cols), hr_axis))),
                    to_y(float(np.interp(gy, np.arange(rows), delta_axis))),
                )
                for gx, gy in polyline
            ]
            scene.polyline(
                f"iso-{level:.6g}-{p_idx}",
                points,
                stroke="#808080" if is_anchor_line else "#ffffff",
                stroke_width=2.4 if is_anchor_line else 0.9,
            )

    warnings = []
    if overlay is not None:
        if overlay.polygon:
            clamped = False
            poly_px = []
            for x, y in overlay.polygon:
                cx = min(max(x, float(hr_axis[0])), float(hr_axis[-1]))
                cy = min(max(y, float(delta_axis[0])), float(delta_axis[-1]))
                clamped = clamped or (cx != x or cy != y)
                poly_px.append((to_x(cx), to_y(cy)))
            scene.polygon(
                "overlay-polygon",
                poly_px,
                fill="#444444",
                opacity=0.22,
                stroke="#222222",
                stroke_width=1.2,
            )
            if clamped:
                warnings.append("overlay polygon clamped to the grid range")
        for p_idx, point in enumerate(overlay.points):
            if not (
                hr_axis[0] <= point.hr <= hr_axis[-1]
                and delta_axis[0] <= point.delta <= delta_axis[-1]
            ):
                warnings.append(
                    f"overlay point ({point.hr}, {point.delta}) outside the grid"
                )
                continue
            x, y = to_x(point.hr), to_y(point.delta)
            scene.circle(
                f"overlay-point-{p_idx}", x, y, 3.5,
                fill="#ffffff", stroke="#222222", stroke_width=1.2,
            )
            if point.label:
                scene.text(
                    f"overlay-label-{p_idx}", min(x + 6.0, width - 4.0), y - 6.0,
                    point.label, font_family=theme.font_family, font_size=9.5,
                )
    for a_idx, (hr, delta, label) in enumerate(anchors):
        if not (
            hr_axis[0] <= hr <= hr_axis[-1]
            and delta_axis[0] <= delta <= delta_axis[-1]
        ):
            warnings.append(f"anchor ({hr}, {delta}) outside the grid")
            continue
        x, y = to_x(hr), to_y(delta)
        scene.circle(f"anchor-{a_idx}", x, y, 4.0, fill="#1a1a1a")
        if label:
            scene.text(
                f"anchor-label-{a_idx}", min(x + 7.0, width - 4.0), y - 7.0, label,
                font_family=theme.font_family, font_size=10.0,
            )

    scene.rect(
        "plot-frame", left, top, plot_w, plot_h,
        fill="none", stroke="#000000", stroke_width=1.0,
    )
    for i, tick in enumerate(_ticks(float(hr_axis[0]), float(hr_axis[-1]), 6)):
        x = to_x(tick)
        scene.line(
            f"tick-x-{i}", x, top + plot_h, x, top + plot_h + 5.0,
            stroke="#000000", stroke_width=1.0,
        )
        scene.text(
            f"tick-x-label-{i}", x, top + plot_h + 18.0, _fmt_tick(tick),
            font_family=theme.font_family, font_size=10.0, text_anchor="middle",
        )
    for i, tick in enumerate(_ticks(float(delta_axis[0]), float(delta_axis[-1]), 6)):
        y = to_y(tick)
        scene.line(
            f"tick-y-{i}", left - 5.0, y, left, y,
            stroke="#000000", stroke_width=1.0,
        )
        scene.text(
            f"tick-y-label-{i}", left - 9.0, y + 4.0, _fmt_tick(tick),
            font_family=theme.font_family, font_size=10.0, text_anchor="end",
        )
    scene.text(
        "axis-x-title", left + plot_w / 2.0, height - 14.0, "Hazard ratio",
        font_family=theme.font_family, font_size=theme.font_size,
        text_anchor="middle",
    )
    scene.text(
        "axis-y-title", 16.0, top + plot_h / 2.0,
        "Mean difference in continuous outcome",
        font_family=theme.font_family, font_size=theme.font_size,
        text_anchor="middle",
        transform=f"rotate(-90 16 {top + plot_h / 2.0:.6g})",
    )
    legend_x = left + plot_w + 18.0
    legend_labels = (
        [f"< {levels[0]:.2f}"]
        + [f"{levels[i]:.2f}–{levels[i + 1]:.2f}" for i in range(len(levels) - 1)]
        + [f"> {levels[-1]:.2f}"]
    )
    swatch_h = min(16.0, plot_h / len(colors))
    for b_idx, (color, lbl) in enumerate(zip(colors, legend_labels)):
        y = top + b_idx * swatch_h
        scene.rect(f"legend-band-{b_idx}", legend_x, y, 12.0, swatch_h, fill=color)
        scene.text(
            f"legend-band-label-{b_idx}", legend_x + 17.0, y + swatch_h / 2.0 + 3.0,
            lbl, font_family=theme.font_family, font_size=8.5,
        )
    scene.text(
        "legend-title", legend_x, top - 8.0, "Win odds",
        font_family=theme.font_family, font_size=10.0,
    )
    scene.metadata = {
        "plot": "sunset",
        "method": grid.method,
        "grid_shape": [rows, cols],
        "value_range": [vmin, vmax],
        "levels_requested": list(levels),
        "levels_drawn": drawn,
        "levels_skipped": skipped,
        "band_rect_count": cell_count,
        "warnings": warnings,
    }
    return scene
