"""Minimal SVG 1.1 scene model.

Renderers append typed primitives to an :class:`SvgScene`; serialization is a
pure function of the scene contents, so a fixed input always produces byte
identical output. Every element carries a unique id and all coordinates are
validated to be finite and inside the canvas, which lets geometry tests parse
documents back by id. Each scene also carries a ``metadata`` dict that
callers persist as a JSON sidecar.
"""

from __future__ import annotations

import json
import math
from typing import Mapping, Sequence

from .model import HceError


class SceneError(HceError):
    """Invalid drawing instruction (bad coordinates, duplicate id, ...)."""


_EPS = 1e-6


def _fmt(value: float) -> str:
    """Fixed, compact float formatting: 12 significant digits, no exponent
    surprises for the coordinate ranges we use."""
    text = f"{value:.12g}"
    return "0" if text == "-0" else text


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _style_attrs(style: Mapping[str, object]) -> str:
    parts = []
    for key, value in style.items():
        name = key.rstrip("_").replace("_", "-")
        if isinstance(value, float):
            parts.append(f'{name}="{_fmt(value)}"')
        else:
            parts.append(f'{name}="{_escape(str(value))}"')
    return (" " + " ".join(parts)) if parts else ""


class SvgScene:
    """A fixed-size canvas accumulating validated SVG primitives."""

    def __init__(self, width: float, height: float):
        if not (math.isfinite(width) and math.isfinite(height)):
            raise SceneError("canvas size must be finite")
        if width <= 0 or height <= 0:
            raise SceneError("canvas size must be positive")
        self.width = float(width)
        self.height = float(height)
        self.metadata: dict = {}
        self._ids: set[str] = set()
        self._body: list[str] = []

    def _check_id(self, element_id: str) -> None:
        if not element_id:
            raise SceneError("element id must be non-empty")
        if element_id in self._ids:
            raise SceneError(f"duplicate element id: {element_id!r}")
        self._ids.add(element_id)

    def _check_point(self, x: float, y: float, element_id: str) -> None:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise SceneError(f"element {element_id!r}: non-finite coordinate")
        if not (-_EPS <= x <= self.width + _EPS and -_EPS <= y <= self.height + _EPS):
            raise SceneError(
                f"element {element_id!r}: point ({x}, {y}) outside canvas "
                f"{self.width} x {self.height}"
            )

    def rect(self, element_id: str, x: float, y: float, w: float, h: float,
             **style: object) -> None:
        self._check_id(element_id)
        if w < 0 or h < 0:
            raise SceneError(f"element {element_id!r}: negative extent")
        self._check_point(x, y, element_id)
        self._check_point(x + w, y + h, element_id)
        self._body.append(
            f'<rect id="{_escape(element_id)}" x="{_fmt(x)}" y="{_fmt(y)}" '
            f'width="{_fmt(w)}" height="{_fmt(h)}"{_style_attrs(style)}/>'
        )

    def line(self, element_id: str, x1: float, y1: float, x2: float, y2: float,
             **style: object) -> None:
        self._check_id(element_id)
        self._check_point(x1, y1, element_id)
        self._check_point(x2, y2, element_id)
        self._body.append(
            f'<line id="{_escape(element_id)}" x1="{_fmt(x1)}" y1="{_fmt(y1)}" '
            f'x2="{_fmt(x2)}" y2="{_fmt(y2)}"{_style_attrs(style)}/>'
        )

    def _points(self, points: Sequence[tuple[float, float]], element_id: str) -> str:
        if len(points) < 2:
            raise SceneError(f"element {element_id!r}: needs at least 2 points")
        for x, y in points:
            self._check_point(x, y, element_id)
        return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)

    def polyline(self, element_id: str, points: Sequence[tuple[float, float]],
                 **style: object) -> None:
        self._check_id(element_id)
        text = self._points(points, element_id)
        self._body.append(
            f'<polyline id="{_escape(element_id)}" points="{text}" '
            f'fill="none"{_style_attrs(style)}/>'
        )

    def polygon(self, element_id: str, points: Sequence[tuple[float, float]],
                **style: object) -> None:
        self._check_id(element_id)
        if len(points) < 3:
            raise SceneError(f"element {element_id!r}: polygon needs 3+ points")
        text = self._points(points, element_id)
        self._body.append(
            f'<polygon id="{_escape(element_id)}" points="{text}"'
            f'{_style_attrs(style)}/>'
        )

    def path(self, element_id: str, points: Sequence[tuple[float, float]],
             closed: bool = False, **style: object) -> None:
        """Polyline-style path (M/L segments, optional Z)."""
        self._check_id(element_id)
        if len(points) < 2:
            raise SceneError(f"element {element_id!r}: path needs 2+ points")
        for x, y in points:
            self._check_point(x, y, element_id)
        d = "M " + " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in points)
        if closed:
            d += " Z"
        self._body.append(
            f'<path id="{_escape(element_id)}" d="{d}"{_style_attrs(style)}/>'
        )

    def circle(self, element_id: str, cx: float, cy: float, r: float,
               **style: object) -> None:
        self._check_id(element_id)
        if r < 0 or not math.isfinite(r):
            raise SceneError(f"element {element_id!r}: invalid radius")
        self._check_point(cx, cy, element_id)
        self._body.append(
            f'<circle id="{_escape(element_id)}" cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
            f'r="{_fmt(r)}"{_style_attrs(style)}/>'
        )

    def text(self, element_id: str, x: float, y: float, content: str,
             **style: object) -> None:
        self._check_id(element_id)
        self._check_point(x, y, element_id)
        self._body.append(
            f'<text id="{_escape(element_id)}" x="{_fmt(x)}" y="{_fmt(y)}"'
            f'{_style_attrs(style)}>{_escape(content)}</text>'
        )

    def has_id(self, element_id: str) -> bool:
        return element_id in self._ids

    def to_svg(self) -> str:
        w, h = _fmt(self.width), _fmt(self.height)
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">'
        )
        return "\n".join([head, *self._body, "</svg>"]) + "\n"

    def metadata_json(self) -> str:
        return json.dumps(_jsonable(self.metadata), indent=2) + "\n"


def _jsonable(obj):
    """Recursively coerce numpy scalars/arrays and tuples for json.dumps."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        try:
            return _jsonable(obj.item())
        except (AttributeError, ValueError):
            pass
    if hasattr(obj, "tolist"):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj
