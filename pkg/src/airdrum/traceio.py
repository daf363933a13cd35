"""Versioned line-oriented file formats for traces, zones, and hit logs.

Every file is UTF-8 text with LF newlines: the first line is a JSON header
object, each following line one JSON record.  Floats are serialized with
repr precision so read(write(x)) is value-identical.  See FORMATS.md for the
field-by-field schemas.

Extensions: ``.a2dtrace`` (detection traces), ``.a2dzones`` (zone sets),
``.a2dhits`` (hit events or ground truth, distinguished by the header's
``content`` field).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

from .core import (
    DetectionFrame,
    DrumZone,
    HitEvent,
    StickId,
    TipCandidate,
)
from .zones import ZoneSet

FORMAT_VERSION = 1

TRACE_SUFFIX = ".a2dtrace"
ZONES_SUFFIX = ".a2dzones"
HITS_SUFFIX = ".a2dhits"


class TraceFormatError(ValueError):
    """Malformed file; message carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class TraceHeader:
    fps: float
    width: float
    height: float
    source: str = ""
    format_version: int = FORMAT_VERSION

    def validate(self) -> None:
        if self.format_version != FORMAT_VERSION:
            raise ValueError(f"unsupported format_version {self.format_version}")
        if self.fps <= 0:
            raise ValueError(f"fps must be positive: {self.fps}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"frame size must be positive: {self.width}x{self.height}")


@dataclass(frozen=True)
class DetectionTrace:
    """Replayable sequence of detection frames plus capture metadata."""

    header: TraceHeader
    frames: tuple[DetectionFrame, ...]


def _dump(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"), sort_keys=True)


def _open_write(sink) -> tuple[IO[str], bool]:
    if hasattr(sink, "write"):
        return sink, False
    return open(sink, "w", encoding="utf-8", newline="\n"), True


def _read_lines(source) -> list[str]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    return text.splitlines()


def _parse_line(line_no: int, line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(line_no, f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise TraceFormatError(line_no, "record must be a JSON object")
    return obj


def _require(line_no: int, obj: dict, key: str):
    if key not in obj:
        raise TraceFormatError(line_no, f"missing field {key!r}")
    return obj[key]


# -- detection traces -------------------------------------------------------


def candidate_to_list(c: TipCandidate) -> list:
    return [c.cx, c.cy, c.w, c.h, c.confidence]


def candidate_from_list(line_no: int, raw) -> TipCandidate:
    if not isinstance(raw, list) or len(raw) != 5:
        raise TraceFormatError(line_no, f"candidate must be [cx,cy,w,h,conf], got {raw!r}")
    try:
        return TipCandidate(*(float(v) for v in raw))
    except (TypeError, ValueError) as exc:
        raise TraceFormatError(line_no, f"bad candidate values: {exc}") from exc


def frame_to_record(frame: DetectionFrame) -> dict:
    return {
        "frame": frame.frame_index,
        "t": frame.t,
        "candidates": [candidate_to_list(c) for c in frame.candidates],
    }


def frame_from_record(line_no: int, obj: dict) -> DetectionFrame:
    idx = _require(line_no, obj, "frame")
    t = _require(line_no, obj, "t")
    raw_cands = _require(line_no, obj, "candidates")
    if not isinstance(raw_cands, list):
        raise TraceFormatError(line_no, "candidates must be a list")
    if len(raw_cands) > 3:
        raise TraceFormatError(line_no, f"{len(raw_cands)} candidates, max 3")
    try:
        return DetectionFrame(
            int(idx), float(t), tuple(candidate_from_list(line_no, c) for c in raw_cands)
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, TraceFormatError):
            raise
        raise TraceFormatError(line_no, str(exc)) from exc


def write_trace(trace: DetectionTrace, sink) -> None:
    trace.header.validate()
    f, owned = _open_write(sink)
    try:
        header = {
            "format_version": trace.header.format_version,
            "kind": "trace",
            "fps": trace.header.fps,
            "width": trace.header.width,
            "height": trace.header.height,
            "source": trace.header.source,
        }
        f.write(_dump(header) + "\n")
        for frame in trace.frames:
            f.write(_dump(frame_to_record(frame)) + "\n")
    finally:
        if owned:
            f.close()


def read_trace(source) -> DetectionTrace:
    lines = _read_lines(source)
    if not lines:
        raise TraceFormatError(1, "empty file, header expected")
    head = _parse_line(1, lines[0])
    if head.get("kind") != "trace":
        raise TraceFormatError(1, f"expected kind 'trace', got {head.get('kind')!r}")
    try:
        header = TraceHeader(
            fps=float(_require(1, head, "fps")),
            width=float(_require(1, head, "width")),
            height=float(_require(1, head, "height")),
            source=str(head.get("source", "")),
            format_version=int(_require(1, head, "format_version")),
        )
        header.validate()
    except ValueError as exc:
        if isinstance(exc, TraceFormatError):
            raise
        raise TraceFormatError(1, str(exc)) from exc

    frames: list[DetectionFrame] = []
    last_idx: int | None = None
    last_t: float | None = None
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        frame = frame_from_record(line_no, _parse_line(line_no, line))
        if last_idx is not None and frame.frame_index <= last_idx:
            raise TraceFormatError(
                line_no, f"frame_index {frame.frame_index} not above previous {last_idx}"
            )
        if last_t is not None and frame.t <= last_t:
            raise TraceFormatError(line_no, f"timestamp {frame.t} not above previous {last_t}")
        for c in frame.candidates:
            c.validate(header.width, header.height)
        last_idx, last_t = frame.frame_index, frame.t
        frames.append(frame)
    return DetectionTrace(header, tuple(frames))


# -- zone sets ---------------------------------------------------------------


def zone_to_record(z: DrumZone) -> dict:
    return {
        "zone_id": z.zone_id,
        "x_min": z.x_min,
        "y_min": z.y_min,
        "x_max": z.x_max,
        "y_max": z.y_max,
        "sound_id": z.sound_id,
        "color": z.color,
    }


def zone_from_record(line_no: int, obj: dict) -> DrumZone:
    try:
        zone = DrumZone(
            zone_id=str(_require(line_no, obj, "zone_id")),
            x_min=float(_require(line_no, obj, "x_min")),
            y_min=float(_require(line_no, obj, "y_min")),
            x_max=float(_require(line_no, obj, "x_max")),
            y_max=float(_require(line_no, obj, "y_max")),
            sound_id=str(_require(line_no, obj, "sound_id")),
            color=str(obj.get("color", "#888888")),
        )
        zone.validate()
        return zone
    except ValueError as exc:
        if isinstance(exc, TraceFormatError):
            raise
        raise TraceFormatError(line_no, str(exc)) from exc


def write_zones(zs: ZoneSet, sink) -> None:
    f, owned = _open_write(sink)
    try:
        f.write(_dump({"format_version": FORMAT_VERSION, "kind": "zones"}) + "\n")
        for z in zs:
            f.write(_dump(zone_to_record(z)) + "\n")
    finally:
        if owned:
            f.close()


def read_zones(source) -> ZoneSet:
    lines = _read_lines(source)
    if not lines:
        raise TraceFormatError(1, "empty file, header expected")
    head = _parse_line(1, lines[0])
    if head.get("kind") != "zones":
        raise TraceFormatError(1, f"expected kind 'zones', got {head.get('kind')!r}")
    if head.get("format_version") != FORMAT_VERSION:
        raise TraceFormatError(1, f"unsupported format_version {head.get('format_version')!r}")
    zones: list[DrumZone] = []
    seen: set[str] = set()
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        zone = zone_from_record(line_no, _parse_line(line_no, line))
        if zone.zone_id in seen:
            raise TraceFormatError(line_no, f"duplicate zone_id {zone.zone_id!r}")
        seen.add(zone.zone_id)
        zones.append(zone)
    return ZoneSet(tuple(zones))


# -- hit events and ground truth ----------------------------------------------


def event_to_record(e: HitEvent) -> dict:
    return {
        "t": e.t,
        "stick": e.stick.value,
        "x": e.x,
        "y": e.y,
        "strike_speed": e.strike_speed,
        "volume": e.volume,
        "zones": sorted(e.zones),
    }


def event_from_record(line_no: int, obj: dict) -> HitEvent:
    try:
        return HitEvent(
            t=float(_require(line_no, obj, "t")),
            stick=StickId(_require(line_no, obj, "stick")),
            x=float(_require(line_no, obj, "x")),
            y=float(_require(line_no, obj, "y")),
            strike_speed=float(_require(line_no, obj, "strike_speed")),
            volume=float(_require(line_no, obj, "volume")),
            zones=frozenset(str(z) for z in _require(line_no, obj, "zones")),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, TraceFormatError):
            raise
        raise TraceFormatError(line_no, str(exc)) from exc


def write_events(events: Iterable[HitEvent], sink) -> None:
    f, owned = _open_write(sink)
    try:
        f.write(
            _dump({"format_version": FORMAT_VERSION, "kind": "hits", "content": "events"}) + "\n"
        )
        for e in events:
            f.write(_dump(event_to_record(e)) + "\n")
    finally:
        if owned:
            f.close()


def read_events(source) -> list[HitEvent]:
    lines = _read_lines(source)
    head = _parse_line(1, lines[0]) if lines else {}
    if not lines or head.get("kind") != "hits" or head.get("content") != "events":
        raise TraceFormatError(1, "expected a hits file with content 'events'")
    return [
        event_from_record(n, _parse_line(n, line))
        for n, line in enumerate(lines[1:], start=2)
        if line.strip()
    ]


def write_truth(truth, sink) -> None:
    """Ground truth: (t, stick, zone_id) per record, same container format."""
    f, owned = _open_write(sink)
    try:
        f.write(
            _dump({"format_version": FORMAT_VERSION, "kind": "hits", "content": "truth"}) + "\n"
        )
        for t, stick, zone_id in truth:
            f.write(_dump({"t": t, "stick": stick.value, "zone_id": zone_id}) + "\n")
    finally:
        if owned:
            f.close()


def read_truth(source) -> list[tuple[float, StickId, str]]:
    lines = _read_lines(source)
    head = _parse_line(1, lines[0]) if lines else {}
    if not lines or head.get("kind") != "hits" or head.get("content") != "truth":
        raise TraceFormatError(1, "expected a hits file with content 'truth'")
    out = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        obj = _parse_line(n, line)
        try:
            out.append(
                (
                    float(_require(n, obj, "t")),
                    StickId(_require(n, obj, "stick")),
                    str(_require(n, obj, "zone_id")),
                )
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, TraceFormatError):
                raise
            raise TraceFormatError(n, str(exc)) from exc
    return out
