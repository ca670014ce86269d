"""Shared test utilities: dataset factories and SVG introspection."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET

import numpy as np

from hcekit import (
    Arm,
    ComponentConfig,
    ComponentKind,
    ComponentSpec,
    Direction,
    HceDataset,
    HceValue,
    SubjectRecord,
)


def small_config(
    n_tte: int = 1,
    follow_up: float = 1095.0,
    tte_direction: Direction = Direction.HIGHER_IS_BETTER,
    continuous_direction: Direction = Direction.HIGHER_IS_BETTER,
) -> ComponentConfig:
    specs = [
        ComponentSpec(f"Event {i}", ComponentKind.TIME_TO_EVENT, i, tte_direction)
        for i in range(1, n_tte + 1)
    ]
    specs.append(
        ComponentSpec("Marker", ComponentKind.CONTINUOUS, n_tte + 1,
                      continuous_direction)
    )
    return ComponentConfig(tuple(specs), follow_up)


def build_dataset(config, active_values, control_values) -> HceDataset:
    """Dataset from explicit (category, magnitude) tuples per arm."""
    subjects = [
        SubjectRecord(f"A{i:04d}", Arm.ACTIVE, HceValue(cat, float(mag)))
        for i, (cat, mag) in enumerate(active_values)
    ]
    subjects += [
        SubjectRecord(f"C{i:04d}", Arm.CONTROL, HceValue(cat, float(mag)))
        for i, (cat, mag) in enumerate(control_values)
    ]
    return HceDataset.from_config(config, subjects)


def random_dataset(
    rng: np.random.Generator,
    config: ComponentConfig,
    n_active: int,
    n_control: int,
    tie_bias: float = 0.5,
) -> HceDataset:
    """Random dataset mixing grid-quantized magnitudes (tie-prone) with
    continuous draws."""
    k, tau = config.k, config.follow_up

    def magnitude(cat: int) -> float:
        if cat < k:
            if rng.random() < tie_bias:
                return float(rng.integers(0, 11)) * (tau / 10.0)
            return float(rng.uniform(0.0, tau))
        if rng.random() < tie_bias:
            return float(rng.integers(-3, 4))
        return float(rng.normal())

    def one(idx: int, arm: Arm, prefix: str) -> SubjectRecord:
        cat = int(rng.integers(1, k + 1))
        return SubjectRecord(f"{prefix}{idx:05d}", arm, HceValue(cat, magnitude(cat)))

    subjects = [one(i, Arm.ACTIVE, "A") for i in range(n_active)]
    subjects += [one(i, Arm.CONTROL, "C") for i in range(n_control)]
    return HceDataset.from_config(config, subjects)


def svg_root(svg_text: str) -> ET.Element:
    return ET.fromstring(svg_text)


def find_by_id(svg_text: str, element_id: str) -> ET.Element | None:
    for element in svg_root(svg_text).iter():
        if element.get("id") == element_id:
            return element
    return None


def iter_ids(svg_text: str) -> list[str]:
    return [
        element.get("id")
        for element in svg_root(svg_text).iter()
        if element.get("id") is not None
    ]


def parse_points(element: ET.Element) -> list[tuple[float, float]]:
    return [
        (float(x), float(y))
        for x, y in (pair.split(",") for pair in element.get("points").split())
    ]


def shoelace(points) -> float:
    area = 0.0
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        area += x1 * y2 - x2 * y1
    return abs(area) / 2.0


def theta_of(counts) -> float:
    return (counts.wins + 0.5 * counts.ties) / counts.n_pairs


def assert_close(a: float, b: float, tol: float) -> None:
    assert math.isfinite(a) and math.isfinite(b), (a, b)
    assert abs(a - b) <= tol, f"|{a} - {b}| = {abs(a - b)} > {tol}"
