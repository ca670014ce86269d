import math

import pytest

from hcekit import (
    Arm,
    Comparison,
    ComponentConfig,
    ComponentKind,
    ComponentSpec,
    ConfigError,
    DataError,
    Direction,
    HceDataset,
    HceValue,
    SubjectRecord,
    compare,
    compose_hce,
    load_dataset,
    load_wide_dataset,
    ordinalize_8,
    parse_component_config,
    validate_value,
    write_dataset_csv,
)
from helpers import build_dataset, small_config


def spec(name, kind, priority, direction=Direction.HIGHER_IS_BETTER):
    return ComponentSpec(name, kind, priority, direction)


TTE = ComponentKind.TIME_TO_EVENT
CONT = ComponentKind.CONTINUOUS


# --- configuration validation -------------------------------------------------

def test_kidney_config_shape(kidney_config):
    assert kidney_config.k == 7
    assert kidney_config.follow_up == 1095.0
    assert kidney_config.continuous.name == "eGFR change"
    assert [c.priority for c in kidney_config.components] == list(range(1, 8))
    assert all(c.kind is TTE for c in kidney_config.tte_components)


def test_config_rejects_gapped_priorities():
    with pytest.raises(ConfigError, match="consecutive"):
        ComponentConfig(
            (spec("A", TTE, 1), spec("B", CONT, 3)), 100.0
        )


def test_config_rejects_duplicate_names():
    with pytest.raises(ConfigError, match="duplicate name"):
        ComponentConfig(
            (spec("A", TTE, 1), spec("A", CONT, 2)), 100.0
        )


def test_config_requires_exactly_one_continuous():
    with pytest.raises(ConfigError, match="exactly one Continuous"):
        ComponentConfig(
            (spec("A", TTE, 1), spec("B", TTE, 2)), 100.0
        )
    with pytest.raises(ConfigError, match="exactly one Continuous"):
        ComponentConfig(
            (spec("A", CONT, 1), spec("B", CONT, 2)), 100.0
        )


def test_config_requires_continuous_last():
    with pytest.raises(ConfigError, match="last"):
        ComponentConfig(
            (spec("A", CONT, 1), spec("B", TTE, 2)), 100.0
        )


def test_config_rejects_bad_follow_up():
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ConfigError):
            ComponentConfig((spec("A", CONT, 1),), bad)


def test_direction_signs():
    config = ComponentConfig(
        (spec("A", TTE, 1, Direction.LOWER_IS_BETTER), spec("B", CONT, 2)), 10.0
    )
    assert config.direction_sign(1) == -1.0
    assert config.direction_sign(2) == 1.0
    with pytest.raises(ConfigError, match="out of range"):
        config.direction_sign(3)


def test_parse_component_config_errors():
    with pytest.raises(ConfigError, match="malformed JSON"):
        parse_component_config("{nope")
    with pytest.raises(ConfigError, match="follow_up_days"):
        parse_component_config('{"components": []}')
    with pytest.raises(ConfigError, match="kind"):
        parse_component_config(
            '{"follow_up_days": 10, "components": '
            '[{"name": "A", "kind": "Wrong", "direction": "HigherIsBetter"}]}'
        )


# --- comparison ----------------------------------------------------------------

def test_compare_higher_category_wins():
    config = small_config(n_tte=2)
    a = HceValue(3, -5.0)
    b = HceValue(1, 1000.0)
    assert compare(a, b, config) is Comparison.A_WINS
    assert compare(b, a, config) is Comparison.B_WINS


def test_compare_within_tte_later_event_wins():
    config = small_config()
    assert compare(HceValue(1, 400.0), HceValue(1, 100.0), config) is Comparison.A_WINS
    assert compare(HceValue(1, 100.0), HceValue(1, 400.0), config) is Comparison.B_WINS


def test_compare_within_category_respects_direction():
    config = small_config(continuous_direction=Direction.LOWER_IS_BETTER)
    assert compare(HceValue(2, 1.0), HceValue(2, 2.0), config) is Comparison.A_WINS
    flipped = small_config(tte_direction=Direction.LOWER_IS_BETTER)
    assert compare(HceValue(1, 100.0), HceValue(1, 400.0), flipped) is Comparison.A_WINS


def test_compare_exact_equality_is_tie():
    config = small_config()
    assert compare(HceValue(1, 500.0), HceValue(1, 500.0), config) is Comparison.TIE
    assert compare(HceValue(2, -0.0), HceValue(2, 0.0), config) is Comparison.TIE


# --- composition and value validation -------------------------------------------

def test_compose_picks_most_severe_flag(kidney_config):
    flags = {"Death": 0, "Kidney failure": 1, "Outcome 4": 1}
    times = {"Kidney failure": 700.0, "Outcome 4": 30.0}
    value = compose_hce(flags, times, None, kidney_config)
    assert value == HceValue(2, 700.0)


def test_compose_event_free_uses_continuous(kidney_config):
    value = compose_hce({}, {}, -4.25, kidney_config)
    assert value == HceValue(7, -4.25)


def test_compose_event_free_requires_continuous(kidney_config):
    with pytest.raises(DataError, match="missing the continuous"):
        compose_hce({}, {}, None, kidney_config)


def test_compose_flagged_event_needs_time(kidney_config):
    with pytest.raises(DataError, match="no time"):
        compose_hce({"Death": 1}, {}, None, kidney_config)


def test_compose_rejects_unknown_component(kidney_config):
    with pytest.raises(DataError, match="unknown component"):
        compose_hce({"Sneeze": 1}, {"Sneeze": 1.0}, None, kidney_config)


def test_validate_value_bounds(kidney_config):
    validate_value(HceValue(1, 0.0), kidney_config)
    validate_value(HceValue(1, 1095.0), kidney_config)
    with pytest.raises(DataError, match="outside"):
        validate_value(HceValue(1, 1095.5), kidney_config)
    with pytest.raises(DataError, match="outside"):
        validate_value(HceValue(1, -1.0), kidney_config)
    with pytest.raises(DataError, match="category out of range"):
        validate_value(HceValue(8, 0.0), kidney_config)
    with pytest.raises(DataError, match="finite"):
        validate_value(HceValue(7, math.nan), kidney_config)
    # the continuous component is not clamped to the follow-up window
    validate_value(HceValue(7, -1e6), kidney_config)


# --- dataset -------------------------------------------------------------------

def test_dataset_rejects_duplicate_ids():
    config = small_config()
    subjects = (
        SubjectRecord("S1", Arm.ACTIVE, HceValue(2, 0.0)),
        SubjectRecord("S1", Arm.CONTROL, HceValue(2, 0.0)),
    )
    with pytest.raises(DataError, match="duplicate"):
        HceDataset.from_config(config, subjects)


def test_dataset_accessors():
    config = small_config()
    ds = build_dataset(config, [(1, 100.0), (2, 0.5)], [(2, -0.5)])
    assert ds.size(Arm.ACTIVE) == 2
    assert ds.size(Arm.CONTROL) == 1
    assert ds.category_counts(Arm.ACTIVE) == (1, 1)
    assert ds.continuous_values(Arm.CONTROL) == (-0.5,)
    assert ds.event_fraction(Arm.ACTIVE) == 0.5
    assert ds.event_fraction(Arm.CONTROL) == 0.0


# --- composed CSV ----------------------------------------------------------------

COMPOSED = """SUBJID,ARM,GROUPN,AVAL0
S1,Active,1,120.5
S2,Control,2,-0.75
S3,Active,2,1.5
"""


def test_load_dataset_roundtrip():
    config = small_config()
    ds = load_dataset(COMPOSED, config)
    assert ds.size(Arm.ACTIVE) == 2
    assert ds.values(Arm.CONTROL) == (HceValue(2, -0.75),)
    again = load_dataset(write_dataset_csv(ds), config)
    assert again.subjects == ds.subjects


def test_load_dataset_header_by_name_not_position():
    config = small_config()
    shuffled = "AVAL0,SUBJID,GROUPN,ARM\n120.5,S1,1,Active\n-0.75,S2,2,Control\n"
    ds = load_dataset(shuffled, config)
    assert ds.values(Arm.ACTIVE) == (HceValue(1, 120.5),)


def test_load_dataset_reports_line_numbers():
    config = small_config()
    bad = "SUBJID,ARM,GROUPN,AVAL0\nS1,Active,1,120.5\nS2,Control,nope,1.0\n"
    with pytest.raises(DataError, match="line 3") as excinfo:
        load_dataset(bad, config)
    assert excinfo.value.line == 3
    assert "GROUPN" in str(excinfo.value)


def test_load_dataset_rejects_unknown_arm():
    with pytest.raises(DataError, match="unknown arm label"):
        load_dataset(
            "SUBJID,ARM,GROUPN,AVAL0\nS1,Placebo,1,10.0\n", small_config()
        )


def test_load_dataset_custom_arm_labels():
    ds = load_dataset(
        "SUBJID,ARM,GROUPN,AVAL0\nS1,TRT,1,10.0\nS2,PBO,2,0.1\n",
        small_config(),
        arm_labels=("TRT", "PBO"),
    )
    assert ds.size(Arm.ACTIVE) == 1
    assert ds.size(Arm.CONTROL) == 1


def test_load_dataset_missing_column_named():
    with pytest.raises(DataError, match="ARM"):
        load_dataset("SUBJID,GROUPN,AVAL0\nS1,1,10.0\n", small_config())


def test_load_dataset_empty_inputs():
    ds = load_dataset("", small_config())
    assert ds.subjects == ()
    header_only = load_dataset("SUBJID,ARM,GROUPN,AVAL0\n", small_config())
    assert header_only.subjects == ()


def test_load_dataset_duplicate_subject():
    text = "SUBJID,ARM,GROUPN,AVAL0\nS1,Active,1,10.0\nS1,Control,1,20.0\n"
    with pytest.raises(DataError, match="duplicate subject"):
        load_dataset(text, small_config())


def test_load_dataset_magnitude_roundtrip_is_exact():
    config = small_config()
    value = 0.1 + 0.2  # not representable as a short decimal
    ds = build_dataset(config, [(2, value)], [(2, 1.0)])
    again = load_dataset(write_dataset_csv(ds), config)
    assert again.values(Arm.ACTIVE)[0].magnitude == value


# --- wide CSV --------------------------------------------------------------------

def test_load_wide_matches_composed(kidney_config):
    wide = (
        "SUBJID,ARM,Death_EVENT,Death_TIME,Kidney failure_EVENT,"
        "Kidney failure_TIME,Outcome 3_EVENT,Outcome 3_TIME,Outcome 4_EVENT,"
        "Outcome 4_TIME,Outcome 5_EVENT,Outcome 5_TIME,Outcome 6_EVENT,"
        "Outcome 6_TIME,eGFR change_VALUE\n"
        "S1,Active,0,,1,700,0,,1,30,0,,0,,\n"
        "S2,Control,0,,0,,0,,0,,0,,0,,-3.5\n"
    )
    ds = load_wide_dataset(wide, kidney_config)
    assert ds.values(Arm.ACTIVE) == (HceValue(2, 700.0),)
    assert ds.values(Arm.CONTROL) == (HceValue(7, -3.5),)


def test_load_wide_reports_line_numbers(kidney_config):
    wide = (
        "SUBJID,ARM," + ",".join(
            f"{c.name}_EVENT,{c.name}_TIME" for c in kidney_config.tte_components
        ) + ",eGFR change_VALUE\n"
        "S1,Active,1,,0,,0,,0,,0,,0,,\n"
    )
    with pytest.raises(DataError, match="line 2"):
        load_wide_dataset(wide, kidney_config)


# --- 8-category ordinal expansion -------------------------------------------------

def test_ordinalize_8_splits_continuous_at_zero(kidney_config):
    ds = build_dataset(
        kidney_config,
        [(1, 10.0), (7, -0.5), (7, 0.0)],
        [(7, 2.0), (7, -2.0)],
    )
    marginals = ordinalize_8(ds)
    assert marginals.counts[Arm.ACTIVE] == (1, 0, 0, 0, 0, 0, 1, 1)
    assert marginals.counts[Arm.CONTROL] == (0, 0, 0, 0, 0, 0, 1, 1)
    assert marginals.labels[6] == "eGFR change < 0"
    assert marginals.labels[7] == "eGFR change >= 0"
    assert sum(marginals.proportions[Arm.ACTIVE]) == pytest.approx(1.0)


def test_ordinalize_8_requires_seven_components():
    ds = build_dataset(small_config(), [(2, 1.0)], [(2, 0.0)])
    with pytest.raises(ConfigError, match="7-component"):
        ordinalize_8(ds)
