"""Command-line interface.

Subcommands: ``summarize`` (win statistics as JSON), ``plot`` (figure SVGs
with metadata sidecars), ``sunset`` (win-odds landscape), and ``simulate``
(scenario to composed CSV). All outputs are deterministic for a fixed seed.

Exit codes: 0 success, 2 invalid input or configuration, 3 degenerate
analysis (empty arm, too few values, constant data).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from importlib import resources
from dataclasses import replace
from pathlib import Path

from .design import (
    DEFAULT_DELTA_RANGE,
    DEFAULT_HR_RANGE,
    DEFAULT_RESOLUTION,
    Overlay,
    SunsetParams,
    feasibility_overlay,
    grid_to_csv,
    parse_overlay_csv,
    parse_scenario,
    simulate_trial,
    sunset_grid,
)
from .model import (
    AnalysisError,
    Arm,
    ComponentConfig,
    ConfigError,
    HceDataset,
    HceError,
    load_dataset,
    load_wide_dataset,
    ordinalize_8,
    parse_component_config,
    write_dataset_csv,
)
from .plots import (
    TieMode,
    render_binary_bar,
    render_component_plot,
    render_maraca,
    render_mosaic,
    render_mosaic_2d,
    render_shift_plot,
    render_sunset,
)
from .svgscene import SvgScene
from .theme import THEMES, get_theme
from .winstats import (
    cumulative_components,
    dumps_stats,
    ordinal_dominance_graph,
    ordinal_pair_counts,
    stats_document,
    win_placements,
    win_statistics,
)

PLOT_KINDS = ("shift", "binary", "mosaic", "mosaic2d", "maraca", "components")


def _sig4(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.4g}"


def _require_path(path: str | None, flag: str) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{flag}: no such file: {path}")
    return p


def _load_config(path: str | None) -> ComponentConfig:
    if path is None:
        text = (
            resources.files("hcekit")
            .joinpath("data/kidney_components.json")
            .read_text(encoding="utf-8")
        )
    else:
        text = _require_path(path, "--components").read_text(encoding="utf-8")
    return parse_component_config(text)


def _arm_labels(raw: str) -> tuple[str, str]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 2 or not all(parts):
        raise ConfigError("--arm-labels must be two comma-separated labels")
    return parts[0], parts[1]


def _read_dataset(args: argparse.Namespace) -> HceDataset:
    config = _load_config(args.components)
    labels = _arm_labels(args.arm_labels)
    text = _require_path(args.input, "--input").read_text(encoding="utf-8")
    loader = load_dataset if args.format == "composed" else load_wide_dataset
    return loader(text, config, labels)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _theme():
    name = os.environ.get("HCE_THEME", "default")
    if name not in THEMES:
        raise ConfigError(f"HCE_THEME must be one of {sorted(THEMES)}, got {name!r}")
    return get_theme(name)


def _write_scene(out: Path, name: str, scene: SvgScene) -> None:
    (out / f"{name}.svg").write_text(scene.to_svg(), encoding="utf-8", newline="")
    (out / f"{name}.meta.json").write_text(
        scene.metadata_json(), encoding="utf-8", newline=""
    )


def cmd_summarize(args: argparse.Namespace) -> int:
    dataset = _read_dataset(args)
    counts, placements = win_placements(dataset)
    stats = win_statistics(
        counts, placements, args.alpha, args.ci, args.boot_reps, args.seed
    )
    rows = cumulative_components(
        dataset, args.alpha, args.ci, args.boot_reps, args.seed
    )
    out = _out_dir(args)
    doc = stats_document(counts, stats, rows)
    (out / "stats.json").write_text(dumps_stats(doc), encoding="utf-8", newline="")
    level = 100 * (1 - args.alpha)
    print(f"pairs: {counts.n_active} x {counts.n_control} = {counts.n_pairs}")
    print(f"wins {counts.wins}  losses {counts.losses}  ties {counts.ties}")
    print(f"win probability {_sig4(stats.win_probability)}")
    for label, est, (lo, hi) in (
        ("win odds     ", stats.win_odds, stats.ci_win_odds),
        ("win ratio    ", stats.win_ratio, stats.ci_win_ratio),
        ("net benefit  ", stats.net_benefit, stats.ci_net_benefit),
    ):
        print(
            f"{label}{_sig4(est)}  ({_sig4(level)}% CI "
            f"{_sig4(lo)} to {_sig4(hi)})"
        )
    print(f"wrote {out / 'stats.json'}")
    return 0


def _event_counts(dataset: HceDataset, arm: Arm) -> tuple[int, int]:
    counts = dataset.category_counts(arm)
    return sum(counts[:-1]), sum(counts)


def _ordinal_view(dataset: HceDataset):
    """(labels, active proportions, control proportions, counts) using the
    8-category expansion when the configuration supports it, otherwise the
    raw composite categories."""
    try:
        marginals = ordinalize_8(dataset)
        return (
            list(marginals.labels),
            list(marginals.proportions[Arm.ACTIVE]),
            list(marginals.proportions[Arm.CONTROL]),
            list(marginals.counts[Arm.ACTIVE]),
            list(marginals.counts[Arm.CONTROL]),
        )
    except ConfigError:
        counts_a = dataset.category_counts(Arm.ACTIVE)
        counts_c = dataset.category_counts(Arm.CONTROL)
        n_a, n_c = sum(counts_a), sum(counts_c)
        if n_a == 0 or n_c == 0:
            raise AnalysisError("empty arm") from None
        labels = [c.name for c in dataset.config.components]
        return (
            labels,
            [c / n_a for c in counts_a],
            [c / n_c for c in counts_c],
            list(counts_a),
            list(counts_c),
        )


def _build_plot(
    kind: str, dataset: HceDataset, args: argparse.Namespace, theme, cache: dict
) -> SvgScene:
    def full_stats():
        if "stats" not in cache:
            counts, placements = win_placements(dataset)
            cache["stats"] = (
                counts,
                win_statistics(
                    counts, placements, args.alpha, args.ci, args.boot_reps, args.seed
                ),
            )
        return cache["stats"]

    if kind == "shift":
        return render_shift_plot(
            dataset.continuous_values(Arm.ACTIVE),
            dataset.continuous_values(Arm.CONTROL),
            theme,
            value_label=dataset.config.continuous.name,
        )
    if kind == "binary":
        return render_binary_bar(
            _event_counts(dataset, Arm.ACTIVE),
            _event_counts(dataset, Arm.CONTROL),
            theme,
            outcome_label="Any event within follow-up",
        )
    labels, props_a, props_c, counts_a, counts_c = _ordinal_view(dataset)
    if kind == "mosaic":
        return render_mosaic(
            props_a, props_c, labels, split_index=len(labels) - 1, theme=theme
        )
    if kind == "mosaic2d":
        odg = ordinal_dominance_graph(dataset)
        mode = TieMode(args.tie_mode)
        if mode is TieMode.TRIANGLE_SPLIT:
            counts, placements = ordinal_pair_counts(counts_a, counts_c)
            stats = win_statistics(
                counts, placements, args.alpha, args.ci, args.boot_reps, args.seed
            )
        else:
            _, stats = full_stats()
        return render_mosaic_2d(
            props_a, props_c, odg, stats, tie_mode=mode, labels=labels, theme=theme
        )
    if kind == "maraca":
        _, stats = full_stats()
        return render_maraca(dataset, stats, theme)
    if kind == "components":
        rows = cumulative_components(
            dataset, args.alpha, args.ci, args.boot_reps, args.seed
        )
        return render_component_plot(rows, theme)
    raise ConfigError(f"unknown plot kind: {kind!r}")


def cmd_plot(args: argparse.Namespace) -> int:
    kinds = [k.strip() for k in args.plots.split(",") if k.strip()]
    if not kinds:
        raise ConfigError("--plots selected nothing")
    for kind in kinds:
        if kind not in PLOT_KINDS:
            raise ConfigError(
                f"unknown plot kind: {kind!r} (choose from {', '.join(PLOT_KINDS)})"
            )
    theme = _theme()
    dataset = _read_dataset(args)
    out = _out_dir(args)
    cache: dict = {}
    failures: list[tuple[str, HceError]] = []
    for kind in kinds:
        try:
            scene = _build_plot(kind, dataset, args, theme, cache)
        except HceError as exc:
            failures.append((kind, exc))
            print(f"error: {kind}: {exc}", file=sys.stderr)
            continue
        _write_scene(out, kind, scene)
        print(f"wrote {out / kind}.svg")
    if not failures:
        return 0
    return 3 if any(isinstance(exc, AnalysisError) for _, exc in failures) else 2


def _parse_range(raw: str, flag: str) -> tuple[float, float]:
    parts = raw.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{flag} must be 'low,high'")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"{flag}: unparseable number in {raw!r}") from None
    return lo, hi


def cmd_sunset(args: argparse.Namespace) -> int:
    hr_range = _parse_range(args.hr_range, "--hr-range")
    delta_range = _parse_range(args.delta_range, "--delta-range")
    params = SunsetParams(args.p_event, args.sd, args.tau)
    iso = None
    if args.iso is not None:
        try:
            iso = [float(x) for x in args.iso.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"--iso: unparseable level in {args.iso!r}") from None
    overlay: Overlay | None = None
    if args.overlay is not None:
        text = _require_path(args.overlay, "--overlay").read_text(encoding="utf-8")
        overlay = feasibility_overlay(parse_overlay_csv(text), hull=args.hull)
    elif args.hull:
        raise ConfigError("--hull requires --overlay")
    grid = sunset_grid(
        hr_range,
        delta_range,
        args.grid,
        params,
        method=args.method,
        seed=args.seed,
        mc_n_per_arm=args.mc_n,
        mc_reps=args.mc_reps,
    )
    theme = _theme()
    scene = render_sunset(grid, iso, overlay=overlay, theme=theme)
    out = _out_dir(args)
    _write_scene(out, "sunset", scene)
    (out / "sunset_grid.csv").write_text(
        grid_to_csv(grid), encoding="utf-8", newline=""
    )
    vmin, vmax = scene.metadata["value_range"]
    print(
        f"grid {args.grid}x{args.grid} ({args.method}), "
        f"win odds {_sig4(vmin)} to {_sig4(vmax)}"
    )
    print(f"wrote {out / 'sunset.svg'}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    text = _require_path(args.input, "--input").read_text(encoding="utf-8")
    scenario = parse_scenario(text)
    if args.n is not None:
        scenario = replace(scenario, n_per_arm=args.n)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    dataset = simulate_trial(scenario)
    out = _out_dir(args)
    (out / "dataset.csv").write_text(
        write_dataset_csv(dataset), encoding="utf-8", newline=""
    )
    counts, placements = win_placements(dataset)
    stats = win_statistics(counts, placements)
    print(
        f"events: active {_sig4(100 * dataset.event_fraction(Arm.ACTIVE))}%, "
        f"control {_sig4(100 * dataset.event_fraction(Arm.CONTROL))}%"
    )
    print(f"win probability {_sig4(stats.win_probability)}")
    print(f"win odds {_sig4(stats.win_odds)}")
    print(f"wrote {out / 'dataset.csv'}")
    return 0


def _add_dataset_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="dataset CSV path")
    parser.add_argument(
        "--format",
        choices=("composed", "wide"),
        default="composed",
        help="input layout: composed category/magnitude or wide per-component",
    )
    parser.add_argument(
        "--components", default=None, help="component configuration JSON path"
    )
    parser.add_argument(
        "--arm-labels",
        default="Active,Control",
        help="ARM column labels as 'active,control'",
    )
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument(
        "--ci", choices=("analytic", "bootstrap"), default="analytic"
    )
    parser.add_argument("--boot-reps", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcekit",
        description="Win statistics, design landscapes, and figures for "
        "hierarchical composite endpoints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sum = sub.add_parser("summarize", help="win statistics as JSON + console table")
    _add_dataset_flags(p_sum)
    p_sum.add_argument("--out", required=True, help="output directory")
    p_sum.set_defaults(func=cmd_summarize)

    p_plot = sub.add_parser("plot", help="render figure SVGs with metadata sidecars")
    _add_dataset_flags(p_plot)
    p_plot.add_argument(
        "--plots",
        default="maraca,mosaic,mosaic2d,components",
        help=f"comma-separated kinds from: {', '.join(PLOT_KINDS)}",
    )
    p_plot.add_argument(
        "--tie-mode",
        choices=tuple(m.value for m in TieMode),
        default=TieMode.ORDERED_TIE_BREAK.value,
        help="how mosaic2d draws same-category blocks",
    )
    p_plot.add_argument("--out", required=True, help="output directory")
    p_plot.set_defaults(func=cmd_plot)

    p_sun = sub.add_parser("sunset", help="win-odds landscape over (hr, delta)")
    p_sun.add_argument(
        "--hr-range", default=f"{DEFAULT_HR_RANGE[0]},{DEFAULT_HR_RANGE[1]}"
    )
    p_sun.add_argument(
        "--delta-range",
        default=f"{DEFAULT_DELTA_RANGE[0]},{DEFAULT_DELTA_RANGE[1]}",
    )
    p_sun.add_argument("--grid", type=int, default=DEFAULT_RESOLUTION)
    p_sun.add_argument("--p-event", type=float, default=0.5)
    p_sun.add_argument("--sd", type=float, default=1.0)
    p_sun.add_argument("--tau", type=float, default=1095.0)
    p_sun.add_argument("--method", choices=("cf", "mc"), default="cf")
    p_sun.add_argument("--mc-n", type=int, default=500, help="subjects per arm (mc)")
    p_sun.add_argument("--mc-reps", type=int, default=50, help="replicates per cell (mc)")
    p_sun.add_argument("--seed", type=int, default=0)
    p_sun.add_argument("--iso", default=None, help="comma-separated iso levels")
    p_sun.add_argument("--overlay", default=None, help="overlay points CSV (HR,DELTA[,LABEL])")
    p_sun.add_argument(
        "--hull", action="store_true", help="shade the convex hull of overlay points"
    )
    p_sun.add_argument("--out", required=True, help="output directory")
    p_sun.set_defaults(func=cmd_sunset)

    p_sim = sub.add_parser("simulate", help="simulate a scenario to a composed CSV")
    p_sim.add_argument("--input", required=True, help="scenario JSON path")
    p_sim.add_argument("--n", type=int, default=None, help="override subjects per arm")
    p_sim.add_argument("--seed", type=int, default=None, help="override scenario seed")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except HceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
