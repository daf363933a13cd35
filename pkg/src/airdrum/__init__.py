"""Air-drumming engine: tracked stick trajectories from noisy tip detections,
zero-crossing hit detection with velocity-scaled volume, configurable drum
zones, a synthetic FP/FN benchmark, and a streaming service for live play."""

from .core import (
    DetectionFrame,
    DrumZone,
    EngineConfig,
    FilterParams,
    HitEvent,
    HitParams,
    StickId,
    TipCandidate,
    validate_config,
)
from .engine import Engine, FrameSnapshot, run_trace
from .simulate import NoiseModel, StrokePattern, bench_sweep, generate, score
from .traceio import DetectionTrace, TraceHeader, read_trace, read_zones, write_trace, write_zones
from .zones import DEFAULT_ZONES, ZoneSet, lookup

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ZONES",
    "DetectionFrame",
    "DetectionTrace",
    "DrumZone",
    "Engine",
    "EngineConfig",
    "FilterParams",
    "FrameSnapshot",
    "HitEvent",
    "HitParams",
    "NoiseModel",
    "StickId",
    "StrokePattern",
    "TipCandidate",
    "TraceHeader",
    "ZoneSet",
    "bench_sweep",
    "generate",
    "lookup",
    "read_trace",
    "read_zones",
    "run_trace",
    "score",
    "validate_config",
    "write_trace",
    "write_zones",
]
