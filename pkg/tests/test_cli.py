import json
import subprocess
import sys

import numpy as np
import pytest
from importlib import resources

from hcekit import write_dataset_csv
from helpers import random_dataset


def run_cli(*args, env_extra=None, cwd=None):
    import os

    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "hcekit.cli", *map(str, args)],
        capture_output=True,
        text=True,
        env=env,
        cwd=cwd,
    )


@pytest.fixture(scope="module")
def dataset_csv(tmp_path_factory, kidney_config):
    rng = np.random.default_rng(42)
    ds = random_dataset(rng, kidney_config, 40, 45, tie_bias=0.3)
    path = tmp_path_factory.mktemp("data") / "trial.csv"
    path.write_text(write_dataset_csv(ds), encoding="utf-8")
    return path


@pytest.fixture(scope="module")
def scenario_path(tmp_path_factory):
    text = (
        resources.files("hcekit").joinpath("data/scenario_a.json").read_text("utf-8")
    )
    path = tmp_path_factory.mktemp("scenario") / "scenario.json"
    path.write_text(text, encoding="utf-8")
    return path


# --- summarize ----------------------------------------------------------------------

def test_summarize_writes_consistent_document(dataset_csv, tmp_path):
    result = run_cli("summarize", "--input", dataset_csv, "--out", tmp_path)
    assert result.returncode == 0, result.stderr
    assert "win probability" in result.stdout
    doc = json.loads((tmp_path / "stats.json").read_text())
    counts = doc["counts"]
    assert counts["wins"] + counts["losses"] + counts["ties"] == (
        counts["n_active"] * counts["n_control"]
    )
    assert counts["n_active"] == 40
    assert 0.0 < doc["theta"]["est"] < 1.0
    assert len(doc["cumulative"]) == 7
    assert doc["ci_method"] == "analytic"


def test_summarize_alpha_widens_and_narrows_intervals(dataset_csv, tmp_path):
    run_cli("summarize", "--input", dataset_csv, "--out", tmp_path / "a95")
    run_cli("summarize", "--input", dataset_csv, "--alpha", "0.1",
            "--out", tmp_path / "a90")
    doc95 = json.loads((tmp_path / "a95" / "stats.json").read_text())
    doc90 = json.loads((tmp_path / "a90" / "stats.json").read_text())
    width95 = doc95["win_odds"]["hi"] - doc95["win_odds"]["lo"]
    width90 = doc90["win_odds"]["hi"] - doc90["win_odds"]["lo"]
    assert width90 < width95


def test_summarize_bootstrap_ci(dataset_csv, tmp_path):
    result = run_cli("summarize", "--input", dataset_csv, "--ci", "bootstrap",
                     "--boot-reps", "100", "--out", tmp_path)
    assert result.returncode == 0, result.stderr
    doc = json.loads((tmp_path / "stats.json").read_text())
    assert doc["ci_method"] == "bootstrap"


def test_summarize_missing_column_names_it(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("SUBJID,TREATMENT,GROUPN,AVAL0\nS1,Active,7,0.1\n")
    result = run_cli("summarize", "--input", bad, "--out", tmp_path / "out")
    assert result.returncode == 2
    assert "ARM" in result.stderr


def test_summarize_missing_input_file(tmp_path):
    result = run_cli("summarize", "--input", tmp_path / "nope.csv",
                     "--out", tmp_path / "out")
    assert result.returncode == 2
    assert "no such file" in result.stderr


def test_summarize_empty_arm_is_an_analysis_error(tmp_path):
    csv_path = tmp_path / "one_arm.csv"
    csv_path.write_text(
        "SUBJID,ARM,GROUPN,AVAL0\nS1,Active,7,0.1\nS2,Active,7,0.4\n"
    )
    result = run_cli("summarize", "--input", csv_path, "--out", tmp_path / "out")
    assert result.returncode == 3
    assert "empty arm" in result.stderr


def test_summarize_custom_arm_labels(tmp_path):
    csv_path = tmp_path / "labels.csv"
    csv_path.write_text(
        "SUBJID,ARM,GROUPN,AVAL0\n"
        "S1,Drug,7,0.5\nS2,Drug,7,1.5\nS3,Placebo,7,-0.5\nS4,Placebo,7,0.2\n"
    )
    result = run_cli("summarize", "--input", csv_path,
                     "--arm-labels", "Drug,Placebo", "--out", tmp_path / "out")
    assert result.returncode == 0, result.stderr
    bad = run_cli("summarize", "--input", csv_path,
                  "--arm-labels", "OnlyOne", "--out", tmp_path / "out2")
    assert bad.returncode == 2


def test_wide_format_matches_composed(dataset_csv, tmp_path, kidney_config):
    from hcekit import Arm, load_dataset

    ds = load_dataset(dataset_csv.read_text(), kidney_config)
    names = [spec.name for spec in kidney_config.tte_components]
    header = ["SUBJID", "ARM"]
    for name in names:
        header += [f"{name}_EVENT", f"{name}_TIME"]
    header.append("eGFR change_VALUE")
    lines = [",".join(header)]
    for rec in ds.subjects:
        arm = "Active" if rec.arm is Arm.ACTIVE else "Control"
        row = [rec.subject_id, arm]
        for idx in range(1, 7):
            if rec.value.category == idx:
                row += ["1", repr(rec.value.magnitude)]
            else:
                row += ["0", ""]
        row.append(repr(rec.value.magnitude) if rec.value.category == 7 else "")
        lines.append(",".join(row))
    wide = tmp_path / "wide.csv"
    wide.write_text("\n".join(lines) + "\n")
    run_cli("summarize", "--input", dataset_csv, "--out", tmp_path / "composed")
    result = run_cli("summarize", "--input", wide, "--format", "wide",
                     "--out", tmp_path / "wide_out")
    assert result.returncode == 0, result.stderr
    assert (tmp_path / "composed" / "stats.json").read_bytes() == (
        tmp_path / "wide_out" / "stats.json"
    ).read_bytes()


# --- plot ---------------------------------------------------------------------------

def test_plot_writes_svgs_and_sidecars(dataset_csv, tmp_path):
    result = run_cli("plot", "--input", dataset_csv, "--out", tmp_path)
    assert result.returncode == 0, result.stderr
    for kind in ("maraca", "mosaic", "mosaic2d", "components"):
        assert (tmp_path / f"{kind}.svg").is_file()
        meta = json.loads((tmp_path / f"{kind}.meta.json").read_text())
        assert meta["plot"] == kind


def test_plot_reruns_are_byte_identical(dataset_csv, tmp_path):
    run_cli("plot", "--input", dataset_csv, "--plots", "maraca,mosaic2d",
            "--out", tmp_path / "one")
    run_cli("plot", "--input", dataset_csv, "--plots", "maraca,mosaic2d",
            "--out", tmp_path / "two")
    for name in ("maraca.svg", "maraca.meta.json", "mosaic2d.svg",
                 "mosaic2d.meta.json"):
        assert (tmp_path / "one" / name).read_bytes() == (
            tmp_path / "two" / name
        ).read_bytes()


def test_plot_failures_do_not_block_other_plots(tmp_path):
    csv_path = tmp_path / "tiny.csv"
    csv_path.write_text(
        "SUBJID,ARM,GROUPN,AVAL0\n"
        "A1,Active,7,-0.5\nA2,Active,7,0.3\nA3,Active,7,1.1\n"
        "C1,Control,7,-0.8\nC2,Control,7,0.1\nC3,Control,7,0.9\n"
    )
    result = run_cli("plot", "--input", csv_path, "--plots", "shift,mosaic",
                     "--out", tmp_path / "out")
    assert result.returncode == 3
    assert "error: shift:" in result.stderr
    assert not (tmp_path / "out" / "shift.svg").exists()
    assert (tmp_path / "out" / "mosaic.svg").is_file()


def test_plot_rejects_unknown_kind(dataset_csv, tmp_path):
    result = run_cli("plot", "--input", dataset_csv, "--plots", "maraca,sparkline",
                     "--out", tmp_path)
    assert result.returncode == 2
    assert "unknown plot kind" in result.stderr
    assert not (tmp_path / "maraca.svg").exists()  # validated before rendering


def test_plot_tie_mode_changes_mosaic2d(dataset_csv, tmp_path):
    run_cli("plot", "--input", dataset_csv, "--plots", "mosaic2d",
            "--out", tmp_path / "ordered")
    run_cli("plot", "--input", dataset_csv, "--plots", "mosaic2d",
            "--tie-mode", "triangles", "--out", tmp_path / "triangles")
    ordered = (tmp_path / "ordered" / "mosaic2d.svg").read_bytes()
    triangles = (tmp_path / "triangles" / "mosaic2d.svg").read_bytes()
    assert ordered != triangles
    meta = json.loads((tmp_path / "triangles" / "mosaic2d.meta.json").read_text())
    assert meta["tie_mode"] == "triangles"


def test_theme_env_var(dataset_csv, tmp_path):
    run_cli("plot", "--input", dataset_csv, "--plots", "mosaic",
            "--out", tmp_path / "default")
    run_cli("plot", "--input", dataset_csv, "--plots", "mosaic",
            "--out", tmp_path / "cb", env_extra={"HCE_THEME": "colorblind"})
    assert (tmp_path / "default" / "mosaic.svg").read_bytes() != (
        tmp_path / "cb" / "mosaic.svg"
    ).read_bytes()
    bogus = run_cli("plot", "--input", dataset_csv, "--plots", "mosaic",
                    "--out", tmp_path / "x", env_extra={"HCE_THEME": "neon"})
    assert bogus.returncode == 2
    assert "HCE_THEME" in bogus.stderr


# --- sunset -------------------------------------------------------------------------

def test_sunset_outputs_and_determinism(tmp_path):
    args = ("sunset", "--grid", "12", "--hr-range", "0.6,1.4",
            "--delta-range=-0.8,0.8")
    first = run_cli(*args, "--out", tmp_path / "one")
    assert first.returncode == 0, first.stderr
    assert "win odds" in first.stdout
    again = run_cli(*args, "--out", tmp_path / "two")
    for name in ("sunset.svg", "sunset.meta.json", "sunset_grid.csv"):
        assert (tmp_path / "one" / name).read_bytes() == (
            tmp_path / "two" / name
        ).read_bytes()
    meta = json.loads((tmp_path / "one" / "sunset.meta.json").read_text())
    assert meta["grid_shape"] == [12, 12]
    assert meta["method"] == "cf"


def test_sunset_mc_round_trips_with_seed(tmp_path):
    args = ("sunset", "--method", "mc", "--grid", "3", "--mc-n", "30",
            "--mc-reps", "4", "--hr-range", "0.7,1.3", "--delta-range=-0.5,0.5")
    run_cli(*args, "--seed", "5", "--out", tmp_path / "one")
    run_cli(*args, "--seed", "5", "--out", tmp_path / "two")
    run_cli(*args, "--seed", "6", "--out", tmp_path / "three")
    one = (tmp_path / "one" / "sunset_grid.csv").read_bytes()
    assert one == (tmp_path / "two" / "sunset_grid.csv").read_bytes()
    assert one != (tmp_path / "three" / "sunset_grid.csv").read_bytes()


def test_sunset_flag_validation(tmp_path):
    bad_range = run_cli("sunset", "--hr-range", "1.4,0.6", "--out", tmp_path)
    assert bad_range.returncode == 2
    assert "ascending" in bad_range.stderr
    unparseable = run_cli("sunset", "--hr-range", "low,high", "--out", tmp_path)
    assert unparseable.returncode == 2
    hull = run_cli("sunset", "--hull", "--out", tmp_path)
    assert hull.returncode == 2
    assert "--overlay" in hull.stderr


def test_sunset_overlay_hull(tmp_path):
    overlay = tmp_path / "points.csv"
    overlay.write_text(
        "HR,DELTA,LABEL\n0.8,0.2,plan\n0.9,-0.1,\n1.1,0.3,alt\n1.0,0.0,null\n"
    )
    result = run_cli("sunset", "--grid", "10", "--overlay", overlay, "--hull",
                     "--out", tmp_path / "out")
    assert result.returncode == 0, result.stderr
    svg = (tmp_path / "out" / "sunset.svg").read_text()
    assert 'id="overlay-polygon"' in svg
    assert 'id="overlay-point-0"' in svg


# --- simulate -----------------------------------------------------------------------

def test_simulate_round_trip(scenario_path, tmp_path):
    result = run_cli("simulate", "--input", scenario_path, "--n", "60",
                     "--seed", "3", "--out", tmp_path / "sim")
    assert result.returncode == 0, result.stderr
    assert "win odds" in result.stdout
    lines = (tmp_path / "sim" / "dataset.csv").read_text().strip().split("\n")
    assert lines[0] == "SUBJID,ARM,GROUPN,AVAL0"
    assert len(lines) == 1 + 120
    summary = run_cli("summarize", "--input", tmp_path / "sim" / "dataset.csv",
                      "--out", tmp_path / "stats")
    assert summary.returncode == 0, summary.stderr


def test_simulate_determinism_and_seed_override(scenario_path, tmp_path):
    args = ("simulate", "--input", scenario_path, "--n", "50")
    run_cli(*args, "--seed", "9", "--out", tmp_path / "one")
    run_cli(*args, "--seed", "9", "--out", tmp_path / "two")
    run_cli(*args, "--seed", "10", "--out", tmp_path / "three")
    one = (tmp_path / "one" / "dataset.csv").read_bytes()
    assert one == (tmp_path / "two" / "dataset.csv").read_bytes()
    assert one != (tmp_path / "three" / "dataset.csv").read_bytes()


def test_simulate_rejects_bad_overrides(scenario_path, tmp_path):
    result = run_cli("simulate", "--input", scenario_path, "--n", "0",
                     "--out", tmp_path)
    assert result.returncode == 2
    assert "n_per_arm" in result.stderr
