"""Mission feasibility of single-package drone deliveries under time-varying wind."""

from dronemfp.energy_model import DroneParams, FlightCondition, PowerBreakdown, compute_power_breakdown
from dronemfp.mission import (
    MissionLog,
    MissionSpec,
    MissionStatus,
    VertexColor,
    clairvoyant_optimum,
    preprocess,
    run_dsp,
    run_gsp,
    run_osp,
)
from dronemfp.td_graph import CostModel, DeliveryGraph, WindTrace
from dronemfp.wind_model import GlobalWind, Point2D

__version__ = "0.1.0"

__all__ = [
    "CostModel",
    "DeliveryGraph",
    "DroneParams",
    "FlightCondition",
    "GlobalWind",
    "MissionLog",
    "MissionSpec",
    "MissionStatus",
    "Point2D",
    "PowerBreakdown",
    "VertexColor",
    "WindTrace",
    "clairvoyant_optimum",
    "compute_power_breakdown",
    "preprocess",
    "run_dsp",
    "run_gsp",
    "run_osp",
]
