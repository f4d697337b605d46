"""Command-line entry point: ``dronemfp <command> [options]``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from dronemfp.energy_model import DroneParams
from dronemfp.errors import DroneMFPError
from dronemfp.harness import ExperimentConfig, emit_outputs, run_campaign, station_scenario, with_overrides
from dronemfp.mission import ALGORITHMS, MissionSpec, MissionStatus, bound_cycles, clairvoyant_optimum
from dronemfp.scenarios import (
    DEFAULT_SPEED_ALPHABET,
    ErConfig,
    TessellationKind,
    build_tessellation_graph,
    generate_er,
    generate_wind_trace,
)
from dronemfp.td_graph import DeliveryGraph, WindTrace


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser, *, out_required: bool = False) -> None:
    p.add_argument("--seed", type=int, default=None, help="random seed")
    p.add_argument("--budget", type=float, default=None, help="battery budget in joules")
    p.add_argument("--payload", type=float, default=None, help="payload in kg")
    p.add_argument("--speed", type=float, default=None, help="ground speed in m/s")
    p.add_argument("--classes", type=int, choices=(4, 8), default=None, help="wind direction classes")
    p.add_argument("--slot-duration", type=float, default=None, help="seconds per wind slot")
    p.add_argument("--config", type=Path, default=None, help="INI file with [drone] and [campaign] sections")
    p.add_argument("--out", type=Path, required=out_required, default=None, help="output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dronemfp", description="Drone delivery feasibility under time-varying wind.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-er", help="sample a connected random delivery graph")
    _common(p, out_required=True)
    p.add_argument("--n", type=int, default=26)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--area", type=float, default=2000.0, help="side of the square area in metres")

    p = sub.add_parser("generate-trace", help="sample a random wind trace")
    _common(p, out_required=True)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--regions", default=None, help="comma-separated region names")
    p.add_argument("--graph", type=Path, default=None, help="take region names from this graph")
    p.add_argument("--speeds", type=_floats, default=DEFAULT_SPEED_ALPHABET, help="wind speed alphabet")

    p = sub.add_parser("tessellate", help="build a VG, DG or HG graph over wind stations")
    _common(p, out_required=True)
    p.add_argument("--kind", choices=[k.value for k in TessellationKind], default="HG")
    p.add_argument("--wcu", type=Path, default=None, help="station CSV; synthetic stations when omitted")
    p.add_argument("--stations", type=int, default=12)
    p.add_argument("--hours", type=int, default=48)
    p.add_argument("--trace-out", type=Path, default=None, help="also write the scaled station trace")

    p = sub.add_parser("preprocess", help="color vertices GREEN, GRAY or BLACK")
    _common(p)
    p.add_argument("--graph", type=Path, required=True)

    p = sub.add_parser("run", help="fly one mission")
    _common(p)
    p.add_argument("--algo", choices=[*ALGORITHMS, "oracle"], required=True)
    p.add_argument("--graph", type=Path, required=True)
    p.add_argument("--trace", type=Path, required=True)
    p.add_argument("--dest", type=int, required=True, help="customer vertex")
    p.add_argument("--start-slot", type=int, default=0)
    p.add_argument("--horizon", type=int, default=None, help="edge cap for the oracle")

    p = sub.add_parser("campaign", help="run a full experiment and write CSV tables")
    _common(p, out_required=True)
    p.add_argument("--scenario", choices=("er", "tessellation"), default=None)
    p.add_argument("--graphs", type=int, default=None, help="graphs per c value")
    p.add_argument("--c", type=_floats, default=None, help="comma-separated c values")
    p.add_argument("--fractions", type=_floats, default=None, help="budget fractions")
    p.add_argument("--wcu", type=str, default=None, help="station CSV for the tessellation scenario")
    p.add_argument("--workers", type=int, default=None)
    return parser


def _drone(args) -> DroneParams:
    return DroneParams.from_config(args.config) if args.config else DroneParams()


def _mission_settings(args, params: DroneParams) -> tuple[float, float, float, int]:
    budget = params.battery_budget if args.budget is None else args.budget
    payload = params.max_payload if args.payload is None else args.payload
    speed = params.cruise_speed if args.speed is None else args.speed
    k = 4 if args.classes is None else args.classes
    return budget, payload, speed, k


def _cmd_generate_er(args) -> int:
    g = generate_er(ErConfig(args.n, args.c, args.area, args.seed or 0))
    g.save(args.out)
    print(f"{g.n_vertices} vertices, {len(g.edges)} directed edges -> {args.out}")
    return 0


def _cmd_generate_trace(args) -> int:
    if args.graph:
        regions = sorted(DeliveryGraph.load(args.graph).regions())
    elif args.regions:
        regions = [r.strip() for r in args.regions.split(",") if r.strip()]
    else:
        regions = ["global"]
    slot = 60.0 if args.slot_duration is None else args.slot_duration
    tr = generate_wind_trace(args.seed or 0, args.horizon, slot, args.speeds, regions)
    tr.save(args.out)
    print(f"{tr.horizon} slots x {len(regions)} region(s) -> {args.out}")
    return 0


def _cmd_tessellate(args) -> int:
    config = ExperimentConfig.tessellation_defaults(
        seed=args.seed or 0,
        wcu_csv=str(args.wcu) if args.wcu else None,
        stations=args.stations,
        hours=args.hours,
    )
    where, trace, bbox = station_scenario(config)
    g = build_tessellation_graph(list(where.values()), args.kind, bbox, list(where))
    g.save(args.out)
    if args.trace_out:
        trace.save(args.trace_out)
    print(f"{args.kind}: {g.n_vertices} vertices, {len(g.edges)} directed edges -> {args.out}")
    return 0


def _cmd_preprocess(args) -> int:
    params = _drone(args)
    budget, payload, speed, k = _mission_settings(args, params)
    g = DeliveryGraph.load(args.graph)
    bounds = bound_cycles(g, params, payload, speed, k)
    colors = bounds.colors(budget)
    tally = {c: sum(1 for v in colors.values() if v.value == c) for c in ("GREEN", "GRAY", "BLACK")}
    print(" ".join(f"{c}={n}" for c, n in tally.items()))
    if args.out:
        data = {
            "budget": budget,
            "colors": {str(v): c.value for v, c in sorted(colors.items())},
            "upper": {str(v): bounds.upper[v] for v in sorted(colors)},
            "lower": {str(v): bounds.lower[v] for v in sorted(colors)},
        }
        args.out.write_text(json.dumps(data, indent=1, sort_keys=True, default=_json_float) + "\n")
    return 0


def _json_float(x):
    return None if isinstance(x, float) and math.isinf(x) else x


def _cmd_run(args) -> int:
    params = _drone(args)
    budget, payload, speed, k = _mission_settings(args, params)
    g = DeliveryGraph.load(args.graph)
    tr = WindTrace.load(args.trace)
    spec = MissionSpec(args.dest, budget, payload, speed, k, args.start_slot)
    if args.algo == "oracle":
        walk = clairvoyant_optimum(g, tr, params, spec, horizon=args.horizon)
        status = MissionStatus.SUCCESS if walk is not None else MissionStatus.CANCELED
        consumed = walk.total if walk is not None else 0.0
        record = {
            "algorithm": "oracle",
            "status": status.value,
            "consumed": consumed,
            "edges": walk.edges if walk else [],
            "departure_slots": walk.departure_slots if walk else [],
        }
        text = json.dumps(record, sort_keys=True)
    else:
        log = ALGORITHMS[args.algo](g, tr, params, spec)
        status, consumed = log.status, log.consumed
        text = log.to_json()
    print(f"{status.value} {consumed:.6f}")
    if args.out:
        args.out.write_text(text + "\n")
    return 0


def _cmd_campaign(args) -> int:
    overrides = dict(
        scenario=args.scenario,
        seed=args.seed,
        budget=args.budget,
        payload=args.payload,
        speed=args.speed,
        class_count=args.classes,
        slot_duration=args.slot_duration,
        graphs_per_c=args.graphs,
        c_values=args.c,
        budget_fractions=args.fractions,
        wcu_csv=args.wcu,
        workers=args.workers,
    )
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.config:
        config = ExperimentConfig.from_config(args.config, **overrides)
    elif overrides.get("scenario") == "tessellation":
        config = ExperimentConfig.tessellation_defaults(**overrides)
    else:
        config = with_overrides(ExperimentConfig(), **overrides)
    result = run_campaign(config)
    paths = emit_outputs(result, args.out)
    for s in result.scenarios:
        print(f"{s.name}: {s.graphs} graph(s), {s.skipped} skipped")
    print(f"wrote {len(paths)} files to {args.out}")
    return 0


COMMANDS = {
    "generate-er": _cmd_generate_er,
    "generate-trace": _cmd_generate_trace,
    "tessellate": _cmd_tessellate,
    "preprocess": _cmd_preprocess,
    "run": _cmd_run,
    "campaign": _cmd_campaign,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (DroneMFPError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"dronemfp {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
