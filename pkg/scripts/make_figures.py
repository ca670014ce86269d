"""Render the full figure suite from the shipped example scenarios.

Writes SVGs plus metadata sidecars into figures/ (created next to the
repository root). Everything is seeded, so reruns are byte-identical.

    python3 scripts/make_figures.py [--out figures]
"""

from __future__ import annotations

import argparse
import json
from importlib import resources
from pathlib import Path

from scipy.optimize import brentq

from hcekit import (
    Arm,
    DEFAULT_PARAMS,
    TieMode,
    closed_form_theta,
    cumulative_components,
    feasibility_overlay,
    ordinal_dominance_graph,
    ordinal_pair_counts,
    ordinalize_8,
    parse_scenario,
    render_binary_bar,
    render_component_plot,
    render_maraca,
    render_mosaic,
    render_mosaic_2d,
    render_shift_plot,
    render_sunset,
    simulate_trial,
    sunset_grid,
    win_placements,
    win_statistics,
)


def load_shipped_scenario(name: str):
    text = (
        resources.files("hcekit").joinpath(f"data/{name}.json").read_text("utf-8")
    )
    return parse_scenario(text)


def write(scene, out: Path, name: str) -> None:
    (out / f"{name}.svg").write_text(scene.to_svg(), encoding="utf-8", newline="")
    (out / f"{name}.meta.json").write_text(
        scene.metadata_json(), encoding="utf-8", newline=""
    )
    print(f"wrote {out / name}.svg")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="figures")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    datasets = {
        label: simulate_trial(load_shipped_scenario(f"scenario_{label}"))
        for label in ("a", "b")
    }
    stats = {}
    for label, dataset in datasets.items():
        counts, placements = win_placements(dataset)
        stats[label] = win_statistics(counts, placements)

    # Continuous-only and binary single-endpoint views of scenario A.
    ds = datasets["a"]
    write(
        render_shift_plot(
            ds.continuous_values(Arm.ACTIVE),
            ds.continuous_values(Arm.CONTROL),
            value_label=ds.config.continuous.name,
        ),
        out,
        "shift_a",
    )
    events = {
        arm: (
            sum(ds.category_counts(arm)[:-1]),
            ds.size(arm),
        )
        for arm in Arm
    }
    write(
        render_binary_bar(events[Arm.ACTIVE], events[Arm.CONTROL]),
        out,
        "binary_a",
    )

    # Ordinal views (8 categories: six events, eGFR decline, eGFR improvement).
    marginals = ordinalize_8(ds)
    props_a = list(marginals.proportions[Arm.ACTIVE])
    props_c = list(marginals.proportions[Arm.CONTROL])
    write(
        render_mosaic(props_a, props_c, marginals.labels, split_index=7),
        out,
        "mosaic_a",
    )
    odg = ordinal_dominance_graph(ds)
    write(
        render_mosaic_2d(
            props_a, props_c, odg, stats["a"],
            tie_mode=TieMode.ORDERED_TIE_BREAK, labels=marginals.labels,
        ),
        out,
        "mosaic2d_ordered_a",
    )
    oc, op = ordinal_pair_counts(
        marginals.counts[Arm.ACTIVE], marginals.counts[Arm.CONTROL]
    )
    ordinal_stats = win_statistics(oc, op)
    write(
        render_mosaic_2d(
            props_a, props_c, odg, ordinal_stats,
            tie_mode=TieMode.TRIANGLE_SPLIT, labels=marginals.labels,
        ),
        out,
        "mosaic2d_triangles_a",
    )

    # The pair of maracas telling two different stories at the same win odds.
    for label, dataset in datasets.items():
        write(render_maraca(dataset, stats[label]), out, f"maraca_{label}")

    write(render_component_plot(cumulative_components(ds)), out, "components_a")

    # Landscape with the design anchor: the mean difference whose closed-form
    # win odds at hr = 0.8 equals 1.2.
    target_theta = 1.2 / 2.2
    delta_star = brentq(
        lambda d: closed_form_theta(0.8, d, DEFAULT_PARAMS) - target_theta,
        -0.5,
        2.0,
        xtol=1e-12,
    )
    grid = sunset_grid()
    example_points = [
        (0.62, 1.45, "T1"),
        (0.70, 1.10, "T2"),
        (0.77, 0.90, "T3"),
        (0.84, 0.65, "T4"),
        (0.90, 0.85, "T5"),
        (0.97, 1.30, "T6"),
        (1.05, 1.70, "T7"),
    ]
    overlay = feasibility_overlay(example_points, hull=True)
    write(
        render_sunset(
            grid,
            anchors=[(0.8, delta_star, "WO 1.2")],
            overlay=overlay,
        ),
        out,
        "sunset",
    )
    print(f"anchor: delta* = {delta_star:.6f} (closed-form WO(0.8, delta*) = 1.2)")
    manifest = {
        "scenario_a_win_odds": stats["a"].win_odds,
        "scenario_b_win_odds": stats["b"].win_odds,
        "delta_star": delta_star,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8", newline=""
    )


if __name__ == "__main__":
    main()
