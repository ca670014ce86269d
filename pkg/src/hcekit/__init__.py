"""Win statistics, design-stage landscapes, and SVG figures for
hierarchical composite endpoints."""

from .design import (
    DEFAULT_DELTA_RANGE,
    DEFAULT_HR_RANGE,
    DEFAULT_ISO_LEVELS,
    DEFAULT_PARAMS,
    DEFAULT_RESOLUTION,
    McCell,
    Overlay,
    OverlayPoint,
    Scenario,
    SunsetGrid,
    SunsetParams,
    closed_form_theta,
    component_rates,
    convex_hull,
    feasibility_overlay,
    grid_to_csv,
    parse_overlay_csv,
    parse_scenario,
    scenario_from_sunset,
    scenario_to_json,
    simulate_trial,
    sunset_cell_closed_form,
    sunset_cell_mc,
    sunset_grid,
)
from .kde import BoxStats, box_stats, gaussian_kde, silverman_bandwidth
from .contour import extract_iso_contour
from .model import (
    AnalysisError,
    Arm,
    Comparison,
    ComponentConfig,
    ComponentKind,
    ComponentSpec,
    ConfigError,
    DataError,
    Direction,
    HceDataset,
    HceError,
    HceValue,
    OrdinalMarginals,
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
from .seeds import mix_seed
from .svgscene import SceneError, SvgScene
from .theme import COLORBLIND_THEME, DEFAULT_THEME, PlotTheme, get_theme
from .winstats import (
    CiMethod,
    CumulativeRow,
    OdgCurve,
    Placements,
    WinCounts,
    WinStats,
    analyze,
    cumulative_components,
    dumps_stats,
    marginal_proportions,
    ordinal_dominance_graph,
    ordinal_pair_counts,
    stats_document,
    win_counts_brute,
    win_counts_fast,
    win_placements,
    win_statistics,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "Arm",
    "BoxStats",
    "CiMethod",
    "COLORBLIND_THEME",
    "Comparison",
    "ComponentConfig",
    "ComponentKind",
    "ComponentSpec",
    "ConfigError",
    "CumulativeRow",
    "DataError",
    "DEFAULT_DELTA_RANGE",
    "DEFAULT_HR_RANGE",
    "DEFAULT_ISO_LEVELS",
    "DEFAULT_PARAMS",
    "DEFAULT_RESOLUTION",
    "DEFAULT_THEME",
    "Direction",
    "HceDataset",
    "HceError",
    "HceValue",
    "McCell",
    "OdgCurve",
    "OrdinalMarginals",
    "Overlay",
    "OverlayPoint",
    "Placements",
    "PlotTheme",
    "Scenario",
    "SceneError",
    "SubjectRecord",
    "SunsetGrid",
    "SunsetParams",
    "SvgScene",
    "TieMode",
    "WinCounts",
    "WinStats",
    "analyze",
    "box_stats",
    "closed_form_theta",
    "compare",
    "component_rates",
    "compose_hce",
    "convex_hull",
    "cumulative_components",
    "dumps_stats",
    "extract_iso_contour",
    "feasibility_overlay",
    "gaussian_kde",
    "get_theme",
    "grid_to_csv",
    "load_dataset",
    "load_wide_dataset",
    "marginal_proportions",
    "mix_seed",
    "ordinal_dominance_graph",
    "ordinal_pair_counts",
    "ordinalize_8",
    "parse_component_config",
    "parse_overlay_csv",
    "parse_scenario",
    "render_binary_bar",
    "render_component_plot",
    "render_maraca",
    "render_mosaic",
    "render_mosaic_2d",
    "render_shift_plot",
    "render_sunset",
    "scenario_from_sunset",
    "scenario_to_json",
    "silverman_bandwidth",
    "simulate_trial",
    "stats_document",
    "sunset_cell_closed_form",
    "sunset_cell_mc",
    "sunset_grid",
    "validate_value",
    "win_counts_brute",
    "win_counts_fast",
    "win_placements",
    "win_statistics",
    "write_dataset_csv",
]
