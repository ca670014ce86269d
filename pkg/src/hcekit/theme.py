"""Plot themes: arm palettes, severity ramps, fonts, and margins.

The default palette keeps the control arm in the pink/red family and the
active arm in the green/blue family; the colorblind theme swaps in an
Okabe-Ito blue/vermillion pairing and a purple-orange landscape ramp.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import HceError


def _parse_hex(color: str) -> tuple[int, int, int]:
    if not (color.startswith("#") and len(color) == 7):
        raise HceError(f"expected #rrggbb color, got {color!r}")
    return tuple(int(color[i : i + 2], 16) for i in (1, 3, 5))


def _to_hex(rgb: tuple[float, float, float]) -> str:
    return "#" + "".join(f"{max(0, min(255, round(c))):02x}" for c in rgb)


def blend(color_a: str, color_b: str, t: float) -> str:
    """Linear RGB interpolation from ``color_a`` (t=0) to ``color_b`` (t=1)."""
    ra, ga, ba = _parse_hex(color_a)
    rb, gb, bb = _parse_hex(color_b)
    return _to_hex((ra + (rb - ra) * t, ga + (gb - ga) * t, ba + (bb - ba) * t))


def relative_luminance(color: str) -> float:
    """sRGB relative luminance in [0, 1]."""

    def channel(c: int) -> float:
        s = c / 255.0
        return s / 12.92 if s <= 0.04045 else ((s + 0.055) / 1.055) ** 2.4

    r, g, b = (channel(c) for c in _parse_hex(color))
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


def ramp(anchors: tuple[str, ...], n: int) -> tuple[str, ...]:
    """Sample ``n`` colors along the piecewise-linear path through anchors."""
    if n < 1:
        raise HceError("ramp needs n >= 1")
    if n == 1:
        return (anchors[0],)
    out = []
    segments = len(anchors) - 1
    for i in range(n):
        pos = i / (n - 1) * segments
        seg = min(int(pos), segments - 1)
        out.append(blend(anchors[seg], anchors[seg + 1], pos - seg))
    return tuple(out)


@dataclass(frozen=True)
class PlotTheme:
    """Colors, fonts, and margins shared by every renderer."""

    name: str
    active_color: str
    control_color: str
    win_fill: str
    loss_fill: str
    tie_win_fill: str
    tie_loss_fill: str
    tie_color: str
    band_shade: str
    severity_dark: str
    severity_light: str
    sunset_anchors: tuple[str, ...]
    font_family: str = "Helvetica, Arial, sans-serif"
    font_size: float = 12.0
    margin: tuple[float, float, float, float] = (48.0, 36.0, 56.0, 64.0)

    def severity_ramp(self, n: int) -> tuple[str, ...]:
        """``n`` category colors, darkest (most severe) first, with strictly
        increasing lightness."""
        return ramp((self.severity_dark, self.severity_light), n)

    def sunset_ramp(self, n: int) -> tuple[str, ...]:
        return ramp(self.sunset_anchors, n)


DEFAULT_THEME = PlotTheme(
    name="default",
    active_color="#1b7837",
    control_color="#c51b7d",
    win_fill="#a6dba0",
    loss_fill="#f1b6da",
    tie_win_fill="#e3f4df",
    tie_loss_fill="#fbe3f0",
    tie_color="#cccccc",
    band_shade="#bdbdbd",
    severity_dark="#08306b",
    severity_light="#deebf7",
    sunset_anchors=(
        "#67001f",
        "#d6604d",
        "#fddbc7",
        "#ffffbf",
        "#d9f0a3",
        "#78c679",
        "#00441b",
    ),
)

COLORBLIND_THEME = PlotTheme(
    name="colorblind",
    active_color="#0072b2",
    control_color="#d55e00",
    win_fill=blend("#0072b2", "#ffffff", 0.6),
    loss_fill=blend("#d55e00", "#ffffff", 0.6),
    tie_win_fill=blend("#0072b2", "#ffffff", 0.85),
    tie_loss_fill=blend("#d55e00", "#ffffff", 0.85),
    tie_color="#c8c8c8",
    band_shade="#b0b0b0",
    severity_dark="#2d004b",
    severity_light="#f3eaf9",
    sunset_anchors=(
        "#7f3b08",
        "#e08214",
        "#fee0b6",
        "#f7f7f7",
        "#d8daeb",
        "#8073ac",
        "#2d004b",
    ),
)

THEMES = {t.name: t for t in (DEFAULT_THEME, COLORBLIND_THEME)}


def get_theme(name: str) -> PlotTheme:
    try:
        return THEMES[name]
    except KeyError:
        raise HceError(
            f"unknown theme {name!r}; available: {sorted(THEMES)}"
        ) from None
