"""Synthetic and station-based delivery scenarios."""

from dronemfp.scenarios.er import ErConfig, generate_er
from dronemfp.scenarios.tessellation import (
    BBox,
    Tessellation,
    TessellationKind,
    build_tessellation,
    build_tessellation_graph,
    tessellation_graph,
)
from dronemfp.scenarios.traces import DEFAULT_SPEED_ALPHABET, generate_wind_trace
from dronemfp.scenarios.wcu import (
    WcuRecord,
    format_wcu_csv,
    load_wcu_csv,
    parse_wcu_csv,
    scale_dataset,
    station_locations,
    synthetic_wcu_records,
    write_wcu_csv,
)

__all__ = [
    "BBox",
    "DEFAULT_SPEED_ALPHABET",
    "ErConfig",
    "Tessellation",
    "TessellationKind",
    "WcuRecord",
    "build_tessellation",
    "build_tessellation_graph",
    "format_wcu_csv",
    "generate_er",
    "generate_wind_trace",
    "load_wcu_csv",
    "parse_wcu_csv",
    "scale_dataset",
    "station_locations",
    "synthetic_wcu_records",
    "tessellation_graph",
    "write_wcu_csv",
]
