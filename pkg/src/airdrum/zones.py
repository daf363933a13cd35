"""Drum-zone registry, point-in-zone lookup, and hit finalization.

Zones may overlap; an impact inside several zones produces one event whose
zone set names every sound to play together (a composite hit).  Containment
is half-open (min edges in, max edges out) so adjacent zones sharing an edge
never both claim a point.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ConfigError, DrumZone, HitEvent, HitParams, StickId
from .hitdetect import HitPrecursor, volume


# Illustrative five-piece layout for the default 640x480 frame; replace via
# a zones file or the editor to taste.
DEFAULT_ZONES: tuple[DrumZone, ...] = (
    DrumZone("crash", 30.0, 70.0, 180.0, 185.0, "crash", "#e8c34a"),
    DrumZone("hihat", 60.0, 250.0, 215.0, 375.0, "hihat", "#53c1a9"),
    DrumZone("snare", 245.0, 265.0, 395.0, 400.0, "snare", "#d95454"),
    DrumZone("tom", 425.0, 245.0, 575.0, 375.0, "tom", "#5a8fd9"),
    DrumZone("ride", 455.0, 65.0, 610.0, 180.0, "ride", "#9a6fd0"),
)


@dataclass(frozen=True)
class ZoneSet:
    """Ordered zone list; order affects rendering only, never lookup."""

    zones: tuple[DrumZone, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for z in self.zones:
            z.validate()
            if z.zone_id in seen:
                raise ConfigError(f"duplicate zone_id {z.zone_id!r}")
            seen.add(z.zone_id)

    def __iter__(self):
        return iter(self.zones)

    def __len__(self) -> int:
        return len(self.zones)

    def ids(self) -> tuple[str, ...]:
        return tuple(z.zone_id for z in self.zones)


def lookup(point: tuple[float, float], zs: ZoneSet) -> frozenset[str]:
    """All zone ids whose rectangle contains the point."""
    x, y = point
    return frozenset(z.zone_id for z in zs.zones if z.contains(x, y))


def finalize_hit(
    precursor: HitPrecursor,
    stick: StickId,
    zs: ZoneSet,
    params: HitParams,
    t: float | None = None,
) -> HitEvent:
    """Attach zone set and volume to a hit precursor.

    ``t`` overrides the event timestamp when the engine has a better estimate
    of the reversal instant than the detection step time.
    """
    return HitEvent(
        t=precursor.t if t is None else t,
        stick=stick,
        x=precursor.x,
        y=precursor.y,
        strike_speed=precursor.strike_speed,
        volume=volume(precursor.strike_speed, params),
        zones=lookup((precursor.x, precursor.y), zs),
    )
