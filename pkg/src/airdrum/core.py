"""Shared domain types, configuration, and coordinate conventions.

Coordinate convention (global): pixel origin at the top-left of the frame,
x grows rightward, y grows downward.  A downstroke therefore has positive
vertical velocity, and the stroke reversal (the hit) is the instant vy
changes sign from positive to negative.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

DEFAULT_FRAME_WIDTH = 640
DEFAULT_FRAME_HEIGHT = 480
MAX_CANDIDATES = 3


class ConfigError(ValueError):
    """A type invariant was violated; the message names the offending field."""


class StickId(enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    def __str__(self) -> str:  # for log/file records
        return self.value


STICKS = (StickId.LEFT, StickId.RIGHT)


@dataclass(frozen=True)
class TipCandidate:
    """One detector output: bounding-box centroid, size, and confidence."""

    cx: float
    cy: float
    w: float
    h: float
    confidence: float

    def validate(self, frame_width: float, frame_height: float) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ConfigError(f"confidence out of [0,1]: {self.confidence}")
        if self.w <= 0 or self.h <= 0:
            raise ConfigError(f"non-positive box size: w={self.w} h={self.h}")
        if not 0.0 <= self.cx <= frame_width:
            raise ConfigError(f"cx out of frame: {self.cx}")
        if not 0.0 <= self.cy <= frame_height:
            raise ConfigError(f"cy out of frame: {self.cy}")


@dataclass(frozen=True)
class DetectionFrame:
    """One camera frame's timestamp plus up to three tip candidates."""

    frame_index: int
    t: float
    candidates: tuple[TipCandidate, ...] = ()

    def __post_init__(self) -> None:
        if len(self.candidates) > MAX_CANDIDATES:
            raise ConfigError(
                f"frame {self.frame_index}: {len(self.candidates)} candidates, max {MAX_CANDIDATES}"
            )


@dataclass(frozen=True)
class FilterParams:
    """Kinematic filter parameters.

    ``subdivision`` is the number of filter steps per frame interval, so the
    filter period is T = 1 / (fps * subdivision) and every frame time is a
    filter time point.  sigma_w and sigma_v are variances: sigma_w of the
    driving-noise force in (px/s^2)^2, sigma_v of the measurement noise in
    px^2.
    """

    fps: float = 60.0
    subdivision: int = 2
    sigma_w: float = 4e7
    sigma_v: float = 4.0
    max_coast_frames: int = 30

    @property
    def frame_dt(self) -> float:
        return 1.0 / self.fps

    @property
    def step_dt(self) -> float:
        return 1.0 / (self.fps * self.subdivision)

    def validate(self) -> None:
        if self.fps <= 0:
            raise ConfigError(f"fps must be positive: {self.fps}")
        if self.subdivision < 1:
            raise ConfigError(f"subdivision below 1: {self.subdivision}")
        if self.sigma_w <= 0:
            raise ConfigError(f"sigma_w must be positive: {self.sigma_w}")
        if self.sigma_v <= 0:
            raise ConfigError(f"sigma_v must be positive: {self.sigma_v}")
        if self.max_coast_frames < 1:
            raise ConfigError(f"max_coast_frames below 1: {self.max_coast_frames}")


@dataclass(frozen=True)
class HitParams:
    """Hit-detection parameters: queue length, speed threshold, refractory
    period, and the downward speed that maps to full volume."""

    queue_len: int = 4
    strike_speed_min: float = 300.0
    refractory: float = 0.1
    volume_ref_speed: float = 3000.0

    def validate(self) -> None:
        if self.queue_len < 3:
            raise ConfigError(f"queue_len below 3: {self.queue_len}")
        if self.strike_speed_min <= 0:
            raise ConfigError(f"strike_speed_min must be positive: {self.strike_speed_min}")
        if self.refractory < 0:
            raise ConfigError(f"refractory must be >= 0: {self.refractory}")
        if self.volume_ref_speed <= 0:
            raise ConfigError(f"volume_ref_speed must be positive: {self.volume_ref_speed}")


@dataclass(frozen=True)
class DrumZone:
    """Axis-aligned pixel rectangle bound to a sound. Zones may overlap."""

    zone_id: str
    x_min: float
    y_min: float
    x_max: float
    y_max: float
    sound_id: str
    color: str = "#888888"

    def validate(self) -> None:
        if not self.x_min < self.x_max:
            raise ConfigError(f"degenerate zone {self.zone_id!r}: x_min {self.x_min} >= x_max {self.x_max}")
        if not self.y_min < self.y_max:
            raise ConfigError(f"degenerate zone {self.zone_id!r}: y_min {self.y_min} >= y_max {self.y_max}")

    def contains(self, x: float, y: float) -> bool:
        # half-open: includes (x_min, y_min), excludes (x_max, y_max), so
        # adjacent zones sharing an edge never both claim a point
        return self.x_min <= x < self.x_max and self.y_min <= y < self.y_max


@dataclass(frozen=True)
class HitEvent:
    """A detected strike.

    ``t`` is the engine's estimate of the reversal instant, ``x``/``y`` the
    tip position at the triggering filter step, ``strike_speed`` the maximum
    downward speed over the queue window.  ``zones`` holds every zone the
    impact point falls in; two or more ids mean a composite sound, an empty
    set is a silent air strike.
    """

    t: float
    stick: StickId
    x: float
    y: float
    strike_speed: float
    volume: float
    zones: frozenset[str]


@dataclass(frozen=True)
class EngineConfig:
    """Validated bundle of everything the per-frame pipeline needs."""

    filter: FilterParams = field(default_factory=FilterParams)
    hits: HitParams = field(default_factory=HitParams)
    zones: tuple[DrumZone, ...] = ()
    frame_width: float = DEFAULT_FRAME_WIDTH
    frame_height: float = DEFAULT_FRAME_HEIGHT
    gate_radius: float = 120.0
    min_confidence: float = 0.5
    # initial covariance for freshly seeded tracks
    init_pos_var: float = 1e4
    init_vel_var: float = 1e6

    def with_zones(self, zones) -> "EngineConfig":
        return replace(self, zones=tuple(zones))


def validate_config(
    filter_params: FilterParams,
    hit_params: HitParams,
    zones,
    frame_width: float = DEFAULT_FRAME_WIDTH,
    frame_height: float = DEFAULT_FRAME_HEIGHT,
    **extra,
) -> EngineConfig:
    """Check every invariant and return the assembled configuration.

    Raises ConfigError naming the first violated field.
    """
    filter_params.validate()
    hit_params.validate()
    zones = tuple(zones)
    seen: set[str] = set()
    for z in zones:
        z.validate()
        if z.zone_id in seen:
            raise ConfigError(f"duplicate zone_id {z.zone_id!r}")
        seen.add(z.zone_id)
    if frame_width <= 0 or frame_height <= 0:
        raise ConfigError(f"frame size must be positive: {frame_width}x{frame_height}")
    cfg = EngineConfig(
        filter=filter_params,
        hits=hit_params,
        zones=zones,
        frame_width=frame_width,
        frame_height=frame_height,
        **extra,
    )
    if not 0.0 <= cfg.min_confidence <= 1.0:
        raise ConfigError(f"min_confidence out of [0,1]: {cfg.min_confidence}")
    if cfg.gate_radius <= 0:
        raise ConfigError(f"gate_radius must be positive: {cfg.gate_radius}")
    return cfg
