"""Domain model for hierarchical composite endpoints (HCE).

An HCE collapses several prioritized outcomes into a single per-subject
value: the most severe time-to-event outcome observed within a fixed
follow-up window, tie-broken by event time, or the continuous outcome for
subjects who stayed event-free. This module defines the component
configuration, the per-subject value types, the total order used by every
pairwise win comparison, and the JSON/CSV ingestion contracts.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence


class HceError(ValueError):
    """Base class for validation failures raised by this package."""


class ConfigError(HceError):
    """Invalid component configuration."""


class DataError(HceError):
    """Invalid subject-level data; carries a CSV line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AnalysisError(HceError):
    """Raised when an analysis cannot be carried out on the given data."""


class ComponentKind(enum.Enum):
    TIME_TO_EVENT = "TimeToEvent"
    CONTINUOUS = "Continuous"


class Direction(enum.Enum):
    HIGHER_IS_BETTER = "HigherIsBetter"
    LOWER_IS_BETTER = "LowerIsBetter"


class Arm(enum.Enum):
    ACTIVE = "Active"
    CONTROL = "Control"


class Comparison(enum.Enum):
    A_WINS = 1
    B_WINS = -1
    TIE = 0


@dataclass(frozen=True, slots=True)
class ComponentSpec:
    """One endpoint component: a named outcome with a priority and a
    favourability direction for its magnitude."""

    name: str
    kind: ComponentKind
    priority: int
    direction: Direction

    def __post_init__(self) -> None:
        if not self.name or not self.name.strip():
            raise ConfigError("component name must be non-empty")
        if self.priority < 1:
            raise ConfigError(f"component {self.name!r}: priority must be >= 1")


@dataclass(frozen=True)
class ComponentConfig:
    """Ordered component list plus the shared follow-up window.

    Priorities must run 1..K with exactly one Continuous component at
    priority K (the least severe slot). Lower priority number means a more
    severe outcome.
    """

    components: tuple[ComponentSpec, ...]
    follow_up: float

    def __post_init__(self) -> None:
        if not self.components:
            raise ConfigError("at least one component is required")
        if not math.isfinite(self.follow_up) or self.follow_up <= 0:
            raise ConfigError("follow_up must be a positive finite number")
        priorities = [c.priority for c in self.components]
        if priorities != list(range(1, len(self.components) + 1)):
            raise ConfigError("component priorities must be consecutive 1..K in order")
        names = [c.name for c in self.components]
        for name in names:
            if names.count(name) > 1:
                raise ConfigError(f"duplicate name: {name!r}")
        continuous = [c for c in self.components if c.kind is ComponentKind.CONTINUOUS]
        if len(continuous) != 1:
            raise ConfigError("exactly one Continuous component is required")
        if self.components[-1].kind is not ComponentKind.CONTINUOUS:
            raise ConfigError("continuous must be last")
        signs = tuple(
            1.0 if c.direction is Direction.HIGHER_IS_BETTER else -1.0
            for c in self.components
        )
        object.__setattr__(self, "_signs", signs)

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def continuous(self) -> ComponentSpec:
        return self.components[-1]

    @property
    def tte_components(self) -> tuple[ComponentSpec, ...]:
        return self.components[:-1]

    def component(self, category: int) -> ComponentSpec:
        if not 1 <= category <= self.k:
            raise ConfigError(f"category out of range: {category}")
        return self.components[category - 1]

    def direction_sign(self, category: int) -> float:
        """+1.0 when a larger magnitude is more favourable in this category,
        -1.0 otherwise."""
        if not 1 <= category <= self.k:
            raise ConfigError(f"category out of range: {category}")
        return self._signs[category - 1]


@dataclass(frozen=True, slots=True)
class HceValue:
    """Composite value of one subject: outcome category plus the magnitude
    ranked within that category (event day for TTE, measurement for the
    continuous component)."""

    category: int
    magnitude: float


@dataclass(frozen=True, slots=True)
class SubjectRecord:
    subject_id: str
    arm: Arm
    value: HceValue


@dataclass(frozen=True)
class HceDataset:
    """Validated analysis set: component layout, follow-up, and one composed
    value per subject."""

    components: tuple[ComponentSpec, ...]
    follow_up: float
    subjects: tuple[SubjectRecord, ...]

    def __post_init__(self) -> None:
        config = ComponentConfig(self.components, self.follow_up)
        object.__setattr__(self, "_config", config)
        seen: set[str] = set()
        for rec in self.subjects:
            if rec.subject_id in seen:
                raise DataError(f"duplicate subject id: {rec.subject_id!r}")
            seen.add(rec.subject_id)
            validate_value(rec.value, config, context=rec.subject_id)

    @classmethod
    def from_config(
        cls, config: ComponentConfig, subjects: Iterable[SubjectRecord]
    ) -> "HceDataset":
        return cls(config.components, config.follow_up, tuple(subjects))

    @property
    def config(self) -> ComponentConfig:
        return self._config

    def records(self, arm: Arm) -> tuple[SubjectRecord, ...]:
        return tuple(r for r in self.subjects if r.arm is arm)

    def values(self, arm: Arm) -> tuple[HceValue, ...]:
        return tuple(r.value for r in self.subjects if r.arm is arm)

    def size(self, arm: Arm) -> int:
        return sum(1 for r in self.subjects if r.arm is arm)

    def category_counts(self, arm: Arm) -> tuple[int, ...]:
        counts = [0] * self.config.k
        for rec in self.subjects:
            if rec.arm is arm:
                counts[rec.value.category - 1] += 1
        return tuple(counts)

    def continuous_values(self, arm: Arm) -> tuple[float, ...]:
        k = self.config.k
        return tuple(
            r.value.magnitude
            for r in self.subjects
            if r.arm is arm and r.value.category == k
        )

    def event_fraction(self, arm: Arm) -> float:
        """Share of the arm whose composite value is a time-to-event outcome."""
        n = self.size(arm)
        if n == 0:
            raise AnalysisError(f"empty arm: {arm.value}")
        k = self.config.k
        events = sum(
            1 for r in self.subjects if r.arm is arm and r.value.category < k
        )
        return events / n


def validate_value(
    value: HceValue, config: ComponentConfig, context: str | None = None
) -> None:
    where = f" (subject {context})" if context else ""
    if not 1 <= value.category <= config.k:
        raise DataError(f"category out of range: {value.category}{where}")
    if not math.isfinite(value.magnitude):
        raise DataError(f"magnitude must be finite{where}")
    spec = config.component(value.category)
    if spec.kind is ComponentKind.TIME_TO_EVENT and not (
        0.0 <= value.magnitude <= config.follow_up
    ):
        raise DataError(
            f"event time {value.magnitude!r} outside [0, {config.follow_up!r}]{where}"
        )


def parse_component_config(text: str) -> ComponentConfig:
    """Parse the component-configuration JSON document.

    Expected shape::

        {"follow_up_days": 1095,
         "components": [{"name": ..., "kind": "TimeToEvent" | "Continuous",
                         "direction": "HigherIsBetter" | "LowerIsBetter"}, ...]}

    Components are prioritized in listed order, most severe first; the single
    Continuous component must be listed last.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("configuration root must be a JSON object")
    if "follow_up_days" not in doc:
        raise ConfigError("missing key: follow_up_days")
    if "components" not in doc or not isinstance(doc["components"], list):
        raise ConfigError("missing or invalid key: components")
    try:
        follow_up = float(doc["follow_up_days"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("follow_up_days must be a number") from exc
    specs = []
    for idx, entry in enumerate(doc["components"], start=1):
        if not isinstance(entry, dict):
            raise ConfigError(f"component {idx}: must be a JSON object")
        try:
            kind = ComponentKind(entry.get("kind"))
        except ValueError:
            raise ConfigError(
                f"component {idx}: kind must be one of "
                f"{[k.value for k in ComponentKind]}"
            ) from None
        try:
            direction = Direction(entry.get("direction"))
        except ValueError:
            raise ConfigError(
                f"component {idx}: direction must be one of "
                f"{[d.value for d in Direction]}"
            ) from None
        name = entry.get("name")
        if not isinstance(name, str):
            raise ConfigError(f"component {idx}: name must be a string")
        specs.append(ComponentSpec(name, kind, idx, direction))
    return ComponentConfig(tuple(specs), follow_up)


def compare(a: HceValue, b: HceValue, config: ComponentConfig) -> Comparison:
    """Pairwise comparison under the composite total order.

    A higher category is less severe and always wins. Within a category the
    magnitudes decide, oriented by the component's direction (for
    time-to-event components the default is that a later event is more
    favourable). Exact magnitude equality is a tie.
    """
    if a.category != b.category:
        return Comparison.A_WINS if a.category > b.category else Comparison.B_WINS
    if a.magnitude == b.magnitude:
        return Comparison.TIE
    better = a.magnitude > b.magnitude
    if config.direction_sign(a.category) < 0:
        better = not better
    return Comparison.A_WINS if better else Comparison.B_WINS


def compose_hce(
    flags: Mapping[str, int],
    times: Mapping[str, float | None],
    continuous: float | None,
    config: ComponentConfig,
) -> HceValue:
    """Collapse per-component event flags, event times, and the continuous
    measurement into one composite value.

    The most severe flagged component (smallest priority) determines the
    category and contributes its event time as the magnitude; a subject with
    no flagged event lands in the continuous category.
    """
    for name in flags:
        if name not in {c.name for c in config.tte_components}:
            raise DataError(f"unknown component name: {name!r}")
    for spec in config.tte_components:
        flag = flags.get(spec.name, 0)
        if flag not in (0, 1):
            raise DataError(f"component {spec.name!r}: flag must be 0 or 1")
        if flag == 1:
            time = times.get(spec.name)
            if time is None or not math.isfinite(time):
                raise DataError(f"component {spec.name!r}: flagged event has no time")
            if not 0.0 <= time <= config.follow_up:
                raise DataError(
                    f"component {spec.name!r}: event time {time!r} outside "
                    f"[0, {config.follow_up!r}]"
                )
            return HceValue(spec.priority, float(time))
    if continuous is None or not math.isfinite(continuous):
        raise DataError("event-free subject is missing the continuous value")
    return HceValue(config.k, float(continuous))


_COMPOSED_COLUMNS = ("SUBJID", "ARM", "GROUPN", "AVAL0")


def _as_text(source: str | bytes | IO) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def _arm_lookup(arm_labels: Sequence[str]) -> dict[str, Arm]:
    if len(arm_labels) != 2 or arm_labels[0] == arm_labels[1]:
        raise DataError("arm labels must be two distinct strings")
    return {arm_labels[0]: Arm.ACTIVE, arm_labels[1]: Arm.CONTROL}


def _header_index(
    header: Sequence[str] | None, required: Sequence[str]
) -> dict[str, int]:
    if header is None:
        raise DataError("empty input: missing header row", line=1)
    cleaned = [h.strip() for h in header]
    index = {}
    for name in required:
        if name not in cleaned:
            raise DataError(f"missing column: {name}", line=1)
        index[name] = cleaned.index(name)
    return index


def load_dataset(
    source: str | bytes | IO,
    config: ComponentConfig,
    arm_labels: Sequence[str] = ("Active", "Control"),
) -> HceDataset:
    """Read the composed long-format CSV (``SUBJID,ARM,GROUPN,AVAL0``).

    ``GROUPN`` is the composite category 1..K and ``AVAL0`` the magnitude.
    An empty file yields a dataset with zero subjects; analysis operations
    reject it downstream.
    """
    arms = _arm_lookup(arm_labels)
    rows = list(csv.reader(io.StringIO(_as_text(source))))
    if not rows:
        return HceDataset.from_config(config, ())
    idx = _header_index(rows[0], _COMPOSED_COLUMNS)
    subjects = []
    seen: set[str] = set()
    for line, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(rows[0]):
            raise DataError("wrong number of fields", line=line)
        subject_id = row[idx["SUBJID"]].strip()
        if not subject_id:
            raise DataError("empty SUBJID", line=line)
        if subject_id in seen:
            raise DataError(f"duplicate subject id: {subject_id!r}", line=line)
        seen.add(subject_id)
        arm_label = row[idx["ARM"]].strip()
        if arm_label not in arms:
            raise DataError(f"unknown arm label: {arm_label!r}", line=line)
        try:
            category = int(row[idx["GROUPN"]])
        except ValueError:
            raise DataError(
                f"unparseable GROUPN: {row[idx['GROUPN']]!r}", line=line
            ) from None
        try:
            magnitude = float(row[idx["AVAL0"]])
        except ValueError:
            raise DataError(
                f"unparseable AVAL0: {row[idx['AVAL0']]!r}", line=line
            ) from None
        value = HceValue(category, magnitude)
        try:
            validate_value(value, config)
        except DataError as exc:
            raise DataError(str(exc), line=line) from None
        subjects.append(SubjectRecord(subject_id, arms[arm_label], value))
    return HceDataset.from_config(config, subjects)


def load_wide_dataset(
    source: str | bytes | IO,
    config: ComponentConfig,
    arm_labels: Sequence[str] = ("Active", "Control"),
) -> HceDataset:
    """Read the wide per-component CSV and compose it.

    Expected columns: ``SUBJID``, ``ARM``, ``<name>_EVENT`` and
    ``<name>_TIME`` for every time-to-event component, and
    ``<name>_VALUE`` for the continuous component.
    """
    arms = _arm_lookup(arm_labels)
    rows = list(csv.reader(io.StringIO(_as_text(source))))
    if not rows:
        return HceDataset.from_config(config, ())
    required = ["SUBJID", "ARM"]
    for spec in config.tte_components:
        required += [f"{spec.name}_EVENT", f"{spec.name}_TIME"]
    required.append(f"{config.continuous.name}_VALUE")
    idx = _header_index(rows[0], required)
    subjects = []
    for line, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < len(rows[0]):
            raise DataError("wrong number of fields", line=line)
        subject_id = row[idx["SUBJID"]].strip()
        if not subject_id:
            raise DataError("empty SUBJID", line=line)
        arm_label = row[idx["ARM"]].strip()
        if arm_label not in arms:
            raise DataError(f"unknown arm label: {arm_label!r}", line=line)
        flags: dict[str, int] = {}
        times: dict[str, float | None] = {}
        try:
            for spec in config.tte_components:
                raw_flag = row[idx[f"{spec.name}_EVENT"]].strip()
                raw_time = row[idx[f"{spec.name}_TIME"]].strip()
                flags[spec.name] = int(raw_flag) if raw_flag else 0
                times[spec.name] = float(raw_time) if raw_time else None
            raw_value = row[idx[f"{config.continuous.name}_VALUE"]].strip()
            continuous = float(raw_value) if raw_value else None
        except ValueError as exc:
            raise DataError(f"unparseable number: {exc}", line=line) from None
        try:
            value = compose_hce(flags, times, continuous, config)
        except DataError as exc:
            raise DataError(str(exc), line=line) from None
        subjects.append(SubjectRecord(subject_id, arms[arm_label], value))
    return HceDataset.from_config(config, subjects)


def write_dataset_csv(
    dataset: HceDataset, arm_labels: Sequence[str] = ("Active", "Control")
) -> str:
    """Serialize to the composed CSV contract. Magnitudes use ``repr`` so the
    round trip through text is exact."""
    labels = {Arm.ACTIVE: arm_labels[0], Arm.CONTROL: arm_labels[1]}
    lines = [",".join(_COMPOSED_COLUMNS)]
    for rec in dataset.subjects:
        lines.append(
            f"{rec.subject_id},{labels[rec.arm]},"
            f"{rec.value.category},{rec.value.magnitude!r}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class OrdinalMarginals:
    """Per-arm counts and proportions over an ordered severity scale
    (position 0 = most severe)."""

    labels: tuple[str, ...]
    counts: Mapping[Arm, tuple[int, ...]]
    proportions: Mapping[Arm, tuple[float, ...]]


def ordinalize_8(dataset: HceDataset) -> OrdinalMarginals:
    """Expand a K=7 composite into 8 ordered categories by splitting the
    continuous component at zero: category 7 holds declines (< 0), category 8
    improvements (>= 0, a value of exactly zero counts as category 8)."""
    config = dataset.config
    if config.k != 7:
        raise ConfigError(
            "8-category ordinalization requires a 7-component configuration"
        )
    if config.continuous.direction is not Direction.HIGHER_IS_BETTER:
        raise ConfigError(
            "8-category ordinalization requires a HigherIsBetter continuous "
            "component"
        )
    counts: dict[Arm, list[int]] = {arm: [0] * 8 for arm in Arm}
    for rec in dataset.subjects:
        value = rec.value
        if value.category < 7:
            slot = value.category - 1
        elif value.magnitude < 0:
            slot = 6
        else:
            slot = 7
        counts[rec.arm][slot] += 1
    for arm in Arm:
        if sum(counts[arm]) == 0:
            raise AnalysisError(f"empty arm: {arm.value}")
    name = config.continuous.name
    labels = tuple(c.name for c in config.tte_components) + (
        f"{name} < 0",
        f"{name} >= 0",
    )
    proportions = {
        arm: tuple(c / sum(counts[arm]) for c in counts[arm]) for arm in Arm
    }
    return OrdinalMarginals(
        labels,
        {arm: tuple(counts[arm]) for arm in Arm},
        proportions,
    )
