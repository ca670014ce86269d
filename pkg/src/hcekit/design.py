"""Design-stage exploration for composite endpoints.

Provides the two-stratum generative model behind the sunset landscape (an
exponential event process over a fixed follow-up window plus a Gaussian
continuous outcome for event-free subjects), a closed-form win-odds
evaluation of that model, its Monte Carlo counterpart, grid evaluation over
(hazard ratio, mean difference) planes, a multi-component trial simulator,
and feasibility-overlay handling.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from typing import IO, Sequence

import numpy as np
from scipy.stats import norm

from .model import (
    Arm,
    ComponentConfig,
    ComponentKind,
    ComponentSpec,
    ConfigError,
    DataError,
    Direction,
    HceDataset,
    HceError,
    HceValue,
    SubjectRecord,
)
from .seeds import mix_seed
from .winstats import _pair_sweep

DEFAULT_HR_RANGE = (0.50, 1.15)
DEFAULT_DELTA_RANGE = (-0.5, 2.0)
DEFAULT_RESOLUTION = 60
DEFAULT_ISO_LEVELS = tuple(float(x) for x in np.linspace(1.0, 1.86, 11))


@dataclass(frozen=True, slots=True)
class SunsetParams:
    """Shared nuisance parameters of the sunset generative model: the control
    arm's probability of any event within follow-up, the standard deviation
    of the continuous outcome (same in both arms), and the follow-up window."""

    p_event_control: float = 0.5
    sd: float = 1.0
    follow_up: float = 1095.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_event_control < 1.0:
            raise ConfigError("p_event_control must be in [0, 1)")
        if not (math.isfinite(self.sd) and self.sd > 0.0):
            raise ConfigError("sd must be positive")
        if not (math.isfinite(self.follow_up) and self.follow_up > 0.0):
            raise ConfigError("follow_up must be positive")


DEFAULT_PARAMS = SunsetParams()


@dataclass(frozen=True)
class SunsetGrid:
    """Win odds evaluated over a (hazard ratio, mean difference) lattice;
    ``values[i][j]`` belongs to ``delta_axis[i]`` and ``hr_axis[j]``."""

    hr_axis: tuple[float, ...]
    delta_axis: tuple[float, ...]
    values: np.ndarray
    params: SunsetParams
    method: str


@dataclass(frozen=True, slots=True)
class McCell:
    win_odds: float
    se: float


def _validate_cell(hr: float, params: SunsetParams) -> None:
    if not (math.isfinite(hr) and hr > 0.0):
        raise ConfigError(f"hazard ratio must be positive, got {hr!r}")
    if params.p_event_control >= 1.0:
        raise ConfigError("p_event_control must be < 1")


def closed_form_theta(hr: float, delta: float, params: SunsetParams) -> float:
    """Exact win probability of the sunset model.

    Event-free pairs compare Gaussian outcomes, an event-free subject beats
    any event, and pairs where both subjects have events compare event times
    (later is better) under exponentials truncated at follow-up. The tie mass
    is zero, so win odds follow directly as theta / (1 - theta).
    """
    _validate_cell(hr, params)
    continuous_win = float(norm.cdf(delta / (params.sd * math.sqrt(2.0))))
    p = params.p_event_control
    if p == 0.0:
        return continuous_win
    tau = params.follow_up
    lam_c = -math.log1p(-p) / tau
    lam_a = hr * lam_c
    pe_c = p
    pe_a = -math.expm1(-lam_a * tau)
    free_free = (1.0 - pe_a) * (1.0 - pe_c) * continuous_win
    free_event = (1.0 - pe_a) * pe_c
    # P(T_active > T_control and both occur within follow-up) for independent
    # exponentials with rates lam_a, lam_c.
    both_win = lam_c / (lam_a + lam_c) * (-math.expm1(-(lam_a + lam_c) * tau)) - (
        math.exp(-lam_a * tau) * pe_c
    )
    return free_free + free_event + both_win


def sunset_cell_closed_form(hr: float, delta: float, params: SunsetParams) -> float:
    """Closed-form win odds at one (hazard ratio, mean difference) point."""
    theta = closed_form_theta(hr, delta, params)
    if theta >= 1.0:
        return math.inf
    return theta / (1.0 - theta)


def _simulate_sunset_arm(
    rng: np.random.Generator,
    n: int,
    lam: float,
    mean: float,
    sd: float,
    tau: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Category (0 = event, 1 = event-free) and magnitude arrays for one arm.

    Draw order is fixed (event times, then continuous values for everyone) so
    output depends only on the generator state.
    """
    if lam > 0.0:
        times = rng.exponential(1.0 / lam, n)
    else:
        times = np.full(n, np.inf)
    values = rng.normal(mean, sd, n)
    event = times <= tau
    cat = np.where(event, 0, 1).astype(np.int64)
    mag = np.where(event, times, values)
    return cat, mag


def sunset_cell_mc(
    hr: float,
    delta: float,
    params: SunsetParams,
    n_per_arm: int = 500,
    reps: int = 200,
    seed: int = 0,
) -> McCell:
    """Monte Carlo win odds at one grid point: simulate the generative model,
    compute the win probability per replicate via the pair sweep, and report
    the mean win odds with its standard error across replicates."""
    _validate_cell(hr, params)
    if n_per_arm < 2:
        raise ConfigError("n_per_arm must be >= 2")
    if reps < 2:
        raise ConfigError("reps must be >= 2")
    tau = params.follow_up
    lam_c = -math.log1p(-params.p_event_control) / tau
    lam_a = hr * lam_c
    wo = np.empty(reps)
    for rep in range(reps):
        rng = np.random.default_rng(mix_seed(seed, rep))
        cat_c, val_c = _simulate_sunset_arm(rng, n_per_arm, lam_c, 0.0, params.sd, tau)
        cat_a, val_a = _simulate_sunset_arm(rng, n_per_arm, lam_a, delta, params.sd, tau)
        counts, _ = _pair_sweep(cat_a, val_a, cat_c, val_c)
        num = counts.wins + 0.5 * counts.ties
        den = counts.losses + 0.5 * counts.ties
        wo[rep] = math.inf if den == 0.0 else num / den
    return McCell(float(np.mean(wo)), float(np.std(wo, ddof=1) / math.sqrt(reps)))


def sunset_grid(
    hr_range: tuple[float, float] = DEFAULT_HR_RANGE,
    delta_range: tuple[float, float] = DEFAULT_DELTA_RANGE,
    resolution: int = DEFAULT_RESOLUTION,
    params: SunsetParams = DEFAULT_PARAMS,
    method: str = "cf",
    seed: int = 0,
    mc_n_per_arm: int = 500,
    mc_reps: int = 50,
) -> SunsetGrid:
    """Evaluate win odds over the full lattice.

    With ``method="mc"`` each cell gets its own generator seeded from
    (seed, row, column), so the grid is reproducible regardless of traversal
    order.
    """
    if resolution < 2:
        raise ConfigError("resolution must be >= 2")
    if not hr_range[0] < hr_range[1]:
        raise ConfigError("hr_range must be ascending")
    if not delta_range[0] < delta_range[1]:
        raise ConfigError("delta_range must be ascending")
    if method not in ("cf", "mc"):
        raise ConfigError(f"unknown method: {method!r}")
    if hr_range[0] <= 0.0:
        raise ConfigError("hazard ratios must be positive")
    hr_axis = np.linspace(hr_range[0], hr_range[1], resolution)
    delta_axis = np.linspace(delta_range[0], delta_range[1], resolution)
    values = np.empty((resolution, resolution))
    for i, delta in enumerate(delta_axis):
        for j, hr in enumerate(hr_axis):
            if method == "cf":
                values[i, j] = sunset_cell_closed_form(float(hr), float(delta), params)
            else:
                cell = sunset_cell_mc(
                    float(hr),
                    float(delta),
                    params,
                    n_per_arm=mc_n_per_arm,
                    reps=mc_reps,
                    seed=mix_seed(seed, i, j),
                )
                values[i, j] = cell.win_odds
    return SunsetGrid(
        tuple(float(x) for x in hr_axis),
        tuple(float(x) for x in delta_axis),
        values,
        params,
        method,
    )


def grid_to_csv(grid: SunsetGrid) -> str:
    """Matrix CSV with hazard ratios across the header row and the mean
    difference leading each data row."""
    lines = ["delta\\hr," + ",".join(repr(x) for x in grid.hr_axis)]
    for i, delta in enumerate(grid.delta_axis):
        row = ",".join(repr(float(v)) for v in grid.values[i])
        lines.append(f"{delta!r},{row}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Scenario:
    """Multi-component trial recipe.

    ``event_probs`` are the control arm's composite category proportions for
    the time-to-event components, in priority order; together with the
    event-free remainder they sum to one. Active-arm hazards scale every
    component rate by ``hr``.
    """

    config: ComponentConfig
    event_probs: tuple[float, ...]
    hr: float
    mean_active: float
    mean_control: float
    sd: float
    n_per_arm: int
    seed: int

    def __post_init__(self) -> None:
        n_tte = len(self.config.tte_components)
        if len(self.event_probs) != n_tte:
            raise ConfigError(
                f"expected {n_tte} event probabilities, got {len(self.event_probs)}"
            )
        if any(not (0.0 <= p < 1.0) for p in self.event_probs):
            raise ConfigError("event probabilities must be in [0, 1)")
        if sum(self.event_probs) >= 1.0:
            raise ConfigError("total event probability must be < 1")
        if not (math.isfinite(self.hr) and self.hr > 0.0):
            raise ConfigError("hr must be positive")
        if not (math.isfinite(self.sd) and self.sd > 0.0):
            raise ConfigError("sd must be positive")
        for label, x in (("mean_active", self.mean_active),
                         ("mean_control", self.mean_control)):
            if not math.isfinite(x):
                raise ConfigError(f"{label} must be finite")
        if self.n_per_arm < 1:
            raise ConfigError("n_per_arm must be >= 1")


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario JSON document.

    The component list follows the component-configuration contract with one
    extra key, ``control_category_prob``, on every time-to-event entry.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("scenario root must be a JSON object")
    for key in ("n_per_arm", "seed", "hr", "mean_active", "mean_control", "sd",
                "follow_up_days", "components"):
        if key not in doc:
            raise ConfigError(f"missing key: {key}")
    components = doc["components"]
    if not isinstance(components, list):
        raise ConfigError("components must be a list")
    stripped = []
    probs = []
    for entry in components:
        if not isinstance(entry, dict):
            raise ConfigError("each component must be a JSON object")
        entry = dict(entry)
        prob = entry.pop("control_category_prob", None)
        if entry.get("kind") == ComponentKind.TIME_TO_EVENT.value:
            if prob is None:
                raise ConfigError(
                    f"component {entry.get('name')!r}: missing control_category_prob"
                )
            try:
                probs.append(float(prob))
            except (TypeError, ValueError):
                raise ConfigError(
                    f"component {entry.get('name')!r}: control_category_prob "
                    "must be a number"
                ) from None
        elif prob is not None:
            raise ConfigError(
                "control_category_prob is only valid on TimeToEvent components"
            )
        stripped.append(entry)
    config = ComponentConfig(
        tuple(
            ComponentSpec(
                entry.get("name"),
                ComponentKind(entry.get("kind")),
                idx,
                Direction(entry.get("direction")),
            )
            for idx, entry in enumerate(stripped, start=1)
        ),
        float(doc["follow_up_days"]),
    )
    return Scenario(
        config=config,
        event_probs=tuple(probs),
        hr=float(doc["hr"]),
        mean_active=float(doc["mean_active"]),
        mean_control=float(doc["mean_control"]),
        sd=float(doc["sd"]),
        n_per_arm=int(doc["n_per_arm"]),
        seed=int(doc["seed"]),
    )


def scenario_to_json(scenario: Scenario) -> str:
    entries = []
    probs = iter(scenario.event_probs)
    for spec in scenario.config.components:
        entry = {
            "name": spec.name,
            "kind": spec.kind.value,
            "direction": spec.direction.value,
        }
        if spec.kind is ComponentKind.TIME_TO_EVENT:
            entry["control_category_prob"] = next(probs)
        entries.append(entry)
    doc = {
        "n_per_arm": scenario.n_per_arm,
        "seed": scenario.seed,
        "hr": scenario.hr,
        "mean_active": scenario.mean_active,
        "mean_control": scenario.mean_control,
        "sd": scenario.sd,
        "follow_up_days": scenario.config.follow_up,
        "components": entries,
    }
    return json.dumps(doc, indent=2) + "\n"


def component_rates(scenario: Scenario) -> np.ndarray:
    """Control-arm exponential rates reproducing the scenario's category
    proportions.

    Category j occurs when component j fires within follow-up and no more
    severe component does, so its marginal within-window probability is the
    category proportion inflated by the survivors of categories above it.
    """
    tau = scenario.config.follow_up
    rates = []
    remaining = 1.0
    for p in scenario.event_probs:
        marginal = p / remaining
        if marginal >= 1.0:
            raise ConfigError("event probabilities leave no event-free mass")
        rates.append(-math.log1p(-marginal) / tau)
        remaining -= p
    return np.array(rates)


def simulate_trial(scenario: Scenario) -> HceDataset:
    """Simulate one trial and compose subjects into an analysis dataset.

    Per subject, each time-to-event component fires at an independent
    exponential time (active rates scaled by the shared hazard ratio); the
    most severe component firing within follow-up sets the composite value,
    and event-free subjects contribute a Gaussian continuous outcome.
    """
    config = scenario.config
    tau = config.follow_up
    rates_c = component_rates(scenario)
    rng = np.random.default_rng(scenario.seed)
    subjects: list[SubjectRecord] = []
    for arm, prefix, rates, mean in (
        (Arm.ACTIVE, "A", rates_c * scenario.hr, scenario.mean_active),
        (Arm.CONTROL, "C", rates_c, scenario.mean_control),
    ):
        n = scenario.n_per_arm
        n_tte = len(rates)
        std_exp = rng.standard_exponential((n, n_tte))
        values = rng.normal(mean, scenario.sd, n)
        safe = np.where(rates > 0.0, rates, 1.0)
        times = np.where(rates > 0.0, std_exp / safe, np.inf)
        event = times <= tau
        any_event = event.any(axis=1)
        first = np.argmax(event, axis=1)
        for i in range(n):
            if any_event[i]:
                value = HceValue(int(first[i]) + 1, float(times[i, first[i]]))
            else:
                value = HceValue(config.k, float(values[i]))
            subjects.append(SubjectRecord(f"{prefix}{i + 1:05d}", arm, value))
    return HceDataset.from_config(config, subjects)


def scenario_from_sunset(
    params: SunsetParams,
    hr: float,
    delta: float,
    n_per_arm: int,
    seed: int = 0,
) -> Scenario:
    """Single-component scenario matching the sunset generative model, for
    cross-checking the closed form against the trial simulator."""
    config = ComponentConfig(
        (
            ComponentSpec(
                "Event", ComponentKind.TIME_TO_EVENT, 1, Direction.HIGHER_IS_BETTER
            ),
            ComponentSpec(
                "Continuous outcome",
                ComponentKind.CONTINUOUS,
                2,
                Direction.HIGHER_IS_BETTER,
            ),
        ),
        params.follow_up,
    )
    return Scenario(
        config=config,
        event_probs=(params.p_event_control,),
        hr=hr,
        mean_active=delta,
        mean_control=0.0,
        sd=params.sd,
        n_per_arm=n_per_arm,
        seed=seed,
    )


@dataclass(frozen=True, slots=True)
class OverlayPoint:
    hr: float
    delta: float
    label: str = ""


@dataclass(frozen=True)
class Overlay:
    """Feasibility annotation for the sunset landscape: labelled anchor
    points and an optional simple polygon marking the plausible region."""

    points: tuple[OverlayPoint, ...]
    polygon: tuple[tuple[float, float], ...] | None = None


def parse_overlay_csv(source: str | bytes | IO) -> list[OverlayPoint]:
    """Read overlay points from CSV with header ``HR,DELTA`` and an optional
    ``LABEL`` column."""
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DataError("empty overlay file", line=1)
    header = [h.strip() for h in rows[0]]
    for name in ("HR", "DELTA"):
        if name not in header:
            raise DataError(f"missing column: {name}", line=1)
    ihr, idelta = header.index("HR"), header.index("DELTA")
    ilabel = header.index("LABEL") if "LABEL" in header else None
    points = []
    for line, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            hr = float(row[ihr])
            delta = float(row[idelta])
        except (ValueError, IndexError):
            raise DataError("unparseable overlay point", line=line) from None
        if not (math.isfinite(hr) and math.isfinite(delta)):
            raise DataError("overlay point must be finite", line=line)
        label = row[ilabel].strip() if ilabel is not None and ilabel < len(row) else ""
        points.append(OverlayPoint(hr, delta, label))
    return points


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    """Andrew's monotone chain; returns hull vertices counter-clockwise."""
    unique = sorted(set(points))
    if len(unique) < 3:
        raise HceError("convex hull needs at least 3 distinct points")
    lower: list[tuple[float, float]] = []
    for p in unique:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(unique):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = tuple(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        raise HceError("overlay points are collinear; no hull polygon exists")
    return hull


def _segments_properly_intersect(p1, p2, p3, p4) -> bool:
    d1 = _cross(p3, p4, p1)
    d2 = _cross(p3, p4, p2)
    d3 = _cross(p1, p2, p3)
    d4 = _cross(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def _is_simple_polygon(vertices: Sequence[tuple[float, float]]) -> bool:
    n = len(vertices)
    for i in range(n):
        a1, a2 = vertices[i], vertices[(i + 1) % n]
        for j in range(i + 1, n):
            if abs(i - j) <= 1 or (i == 0 and j == n - 1):
                continue
            b1, b2 = vertices[j], vertices[(j + 1) % n]
            if _segments_properly_intersect(a1, a2, b1, b2):
                return False
    return True


def feasibility_overlay(
    points: Sequence[OverlayPoint | tuple],
    polygon: Sequence[tuple[float, float]] | None = None,
    hull: bool = False,
) -> Overlay:
    """Validate overlay points and resolve the region polygon.

    With ``hull=True`` the polygon is the convex hull of the points;
    otherwise an explicitly supplied polygon is checked for simplicity
    (self-intersecting outlines are rejected).
    """
    normalized = []
    for p in points:
        if isinstance(p, OverlayPoint):
            normalized.append(p)
        else:
            normalized.append(OverlayPoint(float(p[0]), float(p[1]),
                                           str(p[2]) if len(p) > 2 else ""))
    for p in normalized:
        if not (math.isfinite(p.hr) and math.isfinite(p.delta)):
            raise HceError("overlay points must be finite")
    if hull:
        if polygon is not None:
            raise HceError("supply either an explicit polygon or hull=True, not both")
        polygon = convex_hull([(p.hr, p.delta) for p in normalized])
    elif polygon is not None:
        polygon = tuple((float(x), float(y)) for x, y in polygon)
        if len(polygon) < 3:
            raise HceError("polygon needs at least 3 vertices")
        if not _is_simple_polygon(polygon):
            raise HceError("polygon is self-intersecting")
    return Overlay(tuple(normalized), tuple(polygon) if polygon else None)
