"""Operator entry points: replay, bench, simulate, serve.

Set A2D_LOG=DEBUG|INFO|WARNING to control log verbosity.
"""

from __future__ import annotations

import argparse
import asyncio
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .core import EngineConfig, FilterParams, HitParams, StickId, validate_config
from .engine import run_trace
from .simulate import (
    NoiseModel,
    StrokePattern,
    bench_sweep,
    generate,
    write_bench_table,
    write_plot_data,
)
from .traceio import read_trace, read_zones, write_events, write_trace, write_truth
from .zones import DEFAULT_ZONES, ZoneSet


def _setup_logging() -> None:
    level = os.environ.get("A2D_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")


def _load_config(zones_path: str | None) -> EngineConfig:
    zones = read_zones(zones_path).zones if zones_path else DEFAULT_ZONES
    return validate_config(FilterParams(), HitParams(), zones)


def _parse_bpm_range(spec: str, step: float) -> list[float]:
    """'60..140' with a step, or a comma list like '60,80,100'."""
    if ".." in spec:
        lo_s, hi_s = spec.split("..", 1)
        lo, hi = float(lo_s), float(hi_s)
        if hi < lo or step <= 0:
            raise ValueError(f"bad bpm range {spec!r} with step {step}")
        out = list(np.arange(lo, hi + step / 2, step))
        return [float(b) for b in out]
    return [float(b) for b in spec.split(",")]


def cmd_replay(args) -> int:
    trace = read_trace(args.trace)
    config = _load_config(args.zones)
    snapshots, events = run_trace(trace, config, paced=args.paced)
    out = args.out or (str(Path(args.trace).with_suffix("")) + "_events.a2dhits")
    write_events(events, out)
    per_stick = {s: sum(1 for e in events if e.stick is s) for s in StickId}
    mean_speed = float(np.mean([e.strike_speed for e in events])) if events else 0.0
    print(f"frames processed: {len(snapshots)}")
    print(f"hits: {len(events)} (left {per_stick[StickId.LEFT]}, right {per_stick[StickId.RIGHT]})")
    print(f"mean strike speed: {mean_speed:.1f} px/s")
    print(f"event log: {out}")
    return 0


def cmd_bench(args) -> int:
    config = _load_config(args.zones)
    bpms = _parse_bpm_range(args.bpm, args.step)
    noise = NoiseModel(
        meas_noise_std=args.noise_std,
        dropout_prob=args.dropout,
        clutter_prob=args.clutter,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = bench_sweep(
        bpms,
        noise,
        config,
        seeds=range(args.seeds),
        duration=args.duration,
        artifact_dir=out_dir / "runs" if args.artifacts else None,
    )
    table = out_dir / "bench.tsv"
    plot = out_dir / "fp_fn_by_tempo.tsv"
    write_bench_table(rows, table)
    write_plot_data(rows, plot)
    write_bench_table(rows, sys.stdout)
    print(f"table: {table}")
    print(f"plot data: {plot}")
    return 0


def cmd_simulate(args) -> int:
    config = _load_config(args.zones)
    pattern = StrokePattern(bpm=args.bpm, duration=args.duration)
    noise = NoiseModel(
        meas_noise_std=args.noise_std,
        dropout_prob=args.dropout,
        clutter_prob=args.clutter,
        seed=args.seed,
    )
    trace, truth = generate(pattern, noise, config)
    write_trace(trace, args.out)
    truth_out = args.truth_out or (str(Path(args.out).with_suffix("")) + "_truth.a2dhits")
    write_truth(truth, truth_out)
    print(f"trace: {args.out} ({len(trace.frames)} frames)")
    print(f"ground truth: {truth_out} ({len(truth)} hits)")
    return 0


def cmd_serve(args) -> int:
    from .service import serve  # deferred: keeps offline commands import-light

    config = _load_config(args.zones)
    source = None
    if args.source:
        kind, _, value = args.source.partition(":")
        if kind == "trace":
            source = ("trace", value)
        elif kind == "synthetic":
            source = ("synthetic", float(value or 80))
        else:
            print(f"error: unknown source {args.source!r} (use trace:PATH or synthetic:BPM)",
                  file=sys.stderr)
            return 2
    try:
        asyncio.run(serve(config, args.port, host=args.host, source=source))
    except KeyboardInterrupt:
        pass
    except OSError as exc:
        print(f"error: cannot listen on {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="airdrum", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    rp = sub.add_parser("replay", help="replay a detection trace and log hit events")
    rp.add_argument("trace", help="input .a2dtrace")
    rp.add_argument("--zones", help="zone file (.a2dzones); default built-in layout")
    rp.add_argument("--out", help="output event log (.a2dhits)")
    rp.add_argument("--paced", action="store_true", help="sleep to wall-clock frame times")
    rp.set_defaults(fn=cmd_replay)

    bp = sub.add_parser("bench", help="tempo sweep: miss/spurious rates vs BPM")
    bp.add_argument("--bpm", default="60..140", help="range LO..HI or comma list (bpm)")
    bp.add_argument("--step", type=float, default=20.0, help="range step (bpm)")
    bp.add_argument("--dropout", type=float, default=0.10, help="per-tip dropout probability")
    bp.add_argument("--noise-std", type=float, default=2.0, help="measurement noise std (px)")
    bp.add_argument("--clutter", type=float, default=0.05, help="clutter probability per frame")
    bp.add_argument("--seeds", type=int, default=5, help="number of seeds per tempo")
    bp.add_argument("--duration", type=float, default=60.0, help="trace length per run (s)")
    bp.add_argument("--zones", help="zone file (.a2dzones)")
    bp.add_argument("--out-dir", default="bench_out", help="output directory")
    bp.add_argument("--artifacts", action="store_true", help="keep per-run trace/event files")
    bp.set_defaults(fn=cmd_bench)

    sp = sub.add_parser("simulate", help="write a synthetic trace plus ground truth")
    sp.add_argument("--bpm", type=float, default=80.0, help="strikes per minute (bpm)")
    sp.add_argument("--duration", type=float, default=60.0, help="trace length (s)")
    sp.add_argument("--dropout", type=float, default=0.0, help="per-tip dropout probability")
    sp.add_argument("--noise-std", type=float, default=2.0, help="measurement noise std (px)")
    sp.add_argument("--clutter", type=float, default=0.0, help="clutter probability per frame")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed")
    sp.add_argument("--zones", help="zone file (.a2dzones)")
    sp.add_argument("--out", default="synthetic.a2dtrace", help="output trace path")
    sp.add_argument("--truth-out", help="output ground-truth path (.a2dhits)")
    sp.set_defaults(fn=cmd_simulate)

    vp = sub.add_parser("serve", help="run the streaming service")
    vp.add_argument("--port", type=int, default=8765)
    vp.add_argument("--host", default="127.0.0.1")
    vp.add_argument("--zones", help="zone file (.a2dzones)")
    vp.add_argument("--source", help="initial source: trace:PATH or synthetic:BPM")
    vp.set_defaults(fn=cmd_serve)

    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
