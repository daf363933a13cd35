"""Bidirectional streaming endpoint for UIs and external detector feeds.

Transport is a WebSocket carrying one JSON message per WebSocket text frame:
``{"kind": ..., "seq": ..., "payload": {...}}`` with seq strictly increasing
per direction.  On connect a client receives ``hello`` then ``zones`` (then
``config``), after which it is streamed one ``frame_snapshot`` per processed
frame plus ``hit_event`` messages as they occur.  Clients may push
``detector_frame`` messages (the live feed a camera+detector process plugs
into), ``zones`` hot-swaps, and ``control`` messages to select and drive a
source.

Backpressure: a slow client loses frame_snapshots oldest-first; hit_events
are never dropped and are delivered in order.  Malformed or unknown inbound
messages get an ``error`` reply and the connection stays open.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .core import DetectionFrame, EngineConfig, HitEvent, StickId
from .engine import Engine, FrameSnapshot
from .simulate import NoiseModel, StrokePattern, generate
from .traceio import (
    FORMAT_VERSION,
    TraceFormatError,
    candidate_from_list,
    event_to_record,
    read_trace,
    zone_from_record,
    zone_to_record,
)
from .zones import ZoneSet

log = logging.getLogger("airdrum.service")

SNAPSHOT_BUFFER = 32  # per-client retained snapshots before oldest-first drop


def snapshot_to_record(snap: FrameSnapshot) -> dict:
    sticks = {}
    for s in (StickId.LEFT, StickId.RIGHT):
        st = snap.sticks[s]
        sticks[s.value] = {
            "initialized": st.initialized,
            "x": st.x,
            "y": st.y,
            "vx": st.vx,
            "vy": st.vy,
            "coasting": st.coasting,
            "measured": st.measured,
        }
    return {
        "frame": snap.frame_index,
        "t": snap.t,
        "sticks": sticks,
        "zone_ids": list(snap.zone_ids),
        "hits": [event_to_record(h) for h in snap.hits],
    }


class _ClientSession:
    """Outbound fan-out buffers and the per-direction sequence counter."""

    def __init__(self) -> None:
        self.events: deque[tuple[str, dict]] = deque()
        self.snapshots: deque[tuple[str, dict]] = deque(maxlen=SNAPSHOT_BUFFER)
        self.wake = asyncio.Event()
        self.seq = 0
        self.is_live_source = False

    def push(self, kind: str, payload: dict) -> None:
        if kind == "hit_event":
            self.events.append((kind, payload))
        else:
            self.snapshots.append((kind, payload))  # oldest-first drop via maxlen
        self.wake.set()

    def push_now(self, kind: str, payload: dict) -> None:
        """Control-plane messages ride the lossless queue."""
        self.events.append((kind, payload))
        self.wake.set()

    def drain(self) -> list[tuple[str, dict]]:
        out = list(self.events)
        self.events.clear()
        out.extend(self.snapshots)
        self.snapshots.clear()
        self.wake.clear()
        return out


@dataclass
class _TraceSource:
    frames: list[DetectionFrame]
    fps: float
    pos: int = 0
    playing: bool = True


@dataclass
class _SyntheticSource:
    pattern_bpm: float
    noise: NoiseModel
    chunk: float = 10.0
    frames: list[DetectionFrame] = field(default_factory=list)
    pos: int = 0
    offset_frames: int = 0
    playing: bool = True


class DrumService:
    """One engine pipeline, many subscribers, one live source at a time."""

    def __init__(self, config: EngineConfig, paced: bool = True):
        self.config = config
        self.paced = paced
        self.engine = Engine(config)
        self.clients: set[_ClientSession] = set()
        self.source: _TraceSource | _SyntheticSource | None = None
        self._live_queue: asyncio.Queue[DetectionFrame] = asyncio.Queue(maxsize=256)
        self._live_client: _ClientSession | None = None
        self._source_changed = asyncio.Event()
        self._epoch = 0.0  # wall-time pacing anchor
        self._started: float | None = None

    # -- source selection -------------------------------------------------

    def select_trace(self, path: str | Path) -> None:
        trace = read_trace(path)
        sx = self.config.frame_width / trace.header.width
        sy = self.config.frame_height / trace.header.height
        frames = list(trace.frames)
        if sx != 1.0 or sy != 1.0:
            from .engine import _rescaled

            frames = [_rescaled(f, sx, sy) for f in frames]
        self._reset_engine()
        self.source = _TraceSource(frames=frames, fps=trace.header.fps)
        self._live_client = None
        self._source_changed.set()

    def select_synthetic(self, bpm: float, noise: NoiseModel | None = None) -> None:
        self._reset_engine()
        self.source = _SyntheticSource(
            pattern_bpm=bpm, noise=noise or NoiseModel(dropout_prob=0.02)
        )
        self._live_client = None
        self._source_changed.set()

    def select_live(self, client: _ClientSession | None = None) -> None:
        self._reset_engine()
        self.source = None
        self._live_client = client
        while not self._live_queue.empty():
            self._live_queue.get_nowait()
        self._source_changed.set()

    def _reset_engine(self) -> None:
        self.engine = Engine(self.config.with_zones(tuple(self.engine.zone_set)))
        self._started = None

    # -- fan-out ------------------------------------------------------------

    def _broadcast(self, kind: str, payload: dict) -> None:
        for c in self.clients:
            c.push(kind, payload)

    def _broadcast_now(self, kind: str, payload: dict) -> None:
        for c in self.clients:
            c.push_now(kind, payload)

    def _process(self, frame: DetectionFrame) -> None:
        snap, events = self.engine.step(frame)
        for e in events:
            self._broadcast_now("hit_event", event_to_record(e))
        self._broadcast("frame_snapshot", snapshot_to_record(snap))

    # -- the pipeline task ---------------------------------------------------

    async def run_pipeline(self) -> None:
        loop = asyncio.get_running_loop()
        while True:
            self._source_changed.clear()
            src = self.source
            try:
                if src is None:
                    frame = await self._next_live_frame()
                    if frame is not None:
                        try:
                            self._process(frame)
                        except ValueError as exc:
                            log.warning("live frame rejected: %s", exc)
                    continue
                frame = self._next_source_frame(src)
                if frame is None:
                    await asyncio.sleep(0.05)
                    continue
                if self.paced:
                    if self._started is None:
                        self._started = loop.time()
                        self._epoch = frame.t
                    lag = (frame.t - self._epoch) - (loop.time() - self._started)
                    if lag > 0:
                        with contextlib.suppress(asyncio.TimeoutError):
                            await asyncio.wait_for(self._source_changed.wait(), timeout=lag)
                        if self._source_changed.is_set():
                            continue
                self._process(frame)
            except asyncio.CancelledError:
                raise
            except Exception:
                log.exception("pipeline error")
                await asyncio.sleep(0.1)

    async def _next_live_frame(self) -> DetectionFrame | None:
        get = asyncio.ensure_future(self._live_queue.get())
        changed = asyncio.ensure_future(self._source_changed.wait())
        done, pending = await asyncio.wait(
            {get, changed}, return_when=asyncio.FIRST_COMPLETED
        )
        for p in pending:
            p.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await p
        if get in done:
            return get.result()
        return None

    def _next_source_frame(self, src) -> DetectionFrame | None:
        if not src.playing:
            return None
        if isinstance(src, _TraceSource):
            if src.pos >= len(src.frames):
                return None
            frame = src.frames[src.pos]
            src.pos += 1
            return frame
        # synthetic: regenerate chunks endlessly, shifting time forward
        if src.pos >= len(src.frames):
            pattern = StrokePattern(bpm=src.pattern_bpm, duration=src.chunk)
            noise = NoiseModel(
                meas_noise_std=src.noise.meas_noise_std,
                dropout_prob=src.noise.dropout_prob,
                clutter_prob=src.noise.clutter_prob,
                seed=src.noise.seed + src.offset_frames,  # fresh draw per chunk
            )
            trace, _truth = generate(pattern, noise, self.config)
            fps = self.config.filter.fps
            base = src.offset_frames
            src.frames = [
                DetectionFrame(base + f.frame_index, (base + f.frame_index) / fps, f.candidates)
                for f in trace.frames
            ]
            src.offset_frames += len(src.frames)
            src.pos = 0
        frame = src.frames[src.pos]
        src.pos += 1
        return frame

    # -- per-client protocol ----------------------------------------------------

    async def handle_client(self, ws) -> None:
        session = _ClientSession()
        # handshake goes through the lossless queue before the session joins
        # the broadcast set, so hello/zones always precede any snapshot
        session.push_now("hello", {
            "format_version": FORMAT_VERSION,
            "fps": self.config.filter.fps,
            "width": self.config.frame_width,
            "height": self.config.frame_height,
        })
        session.push_now("zones", {
            "zones": [zone_to_record(z) for z in self.engine.zone_set]
        })
        session.push_now("config", self._config_payload())
        writer = asyncio.ensure_future(self._writer(ws, session))
        self.clients.add(session)
        try:
            async for raw in ws:
                self._handle_message(session, raw)
        except ConnectionClosed:
            pass
        finally:
            self.clients.discard(session)
            if self._live_client is session:
                self._live_client = None
            writer.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await writer

    def _config_payload(self) -> dict:
        f, h = self.config.filter, self.config.hits
        return {
            "filter": {
                "fps": f.fps,
                "subdivision": f.subdivision,
                "sigma_w": f.sigma_w,
                "sigma_v": f.sigma_v,
                "max_coast_frames": f.max_coast_frames,
            },
            "hits": {
                "queue_len": h.queue_len,
                "strike_speed_min": h.strike_speed_min,
                "refractory": h.refractory,
                "volume_ref_speed": h.volume_ref_speed,
            },
        }

    async def _send(self, ws, session: _ClientSession, kind: str, payload: dict) -> None:
        session.seq += 1
        await ws.send(json.dumps({"kind": kind, "seq": session.seq, "payload": payload}))

    async def _writer(self, ws, session: _ClientSession) -> None:
        try:
            while True:
                await session.wake.wait()
                for kind, payload in session.drain():
                    await self._send(ws, session, kind, payload)
        except (ConnectionClosed, asyncio.CancelledError):
            pass

    def _handle_message(self, session: _ClientSession, raw) -> None:
        def reply_error(message: str) -> None:
            session.push_now("error", {"message": message})

        try:
            msg = json.loads(raw)
        except json.JSONDecodeError as exc:
            reply_error(f"invalid JSON: {exc}")
            return
        if not isinstance(msg, dict) or "kind" not in msg:
            reply_error("message must be an object with a 'kind'")
            return
        kind = msg.get("kind")
        payload = msg.get("payload") or {}
        try:
            if kind == "detector_frame":
                self._on_detector_frame(session, payload)
            elif kind == "zones":
                self._on_zones(payload)
            elif kind == "control":
                self._on_control(session, payload)
            elif kind == "config":
                reply_error("config updates are not supported over the wire yet")
            else:
                reply_error(f"unknown kind {kind!r}")
        except (TraceFormatError, ValueError, KeyError, TypeError) as exc:
            reply_error(str(exc))

    def _on_detector_frame(self, session: _ClientSession, payload: dict) -> None:
        if self.source is not None or (
            self._live_client is not None and self._live_client is not session
        ):
            raise ValueError("not the designated live source")
        if self._live_client is None:
            self.select_live(session)
        cands = tuple(
            candidate_from_list(0, c) for c in payload.get("candidates", [])
        )
        frame = DetectionFrame(int(payload["frame"]), float(payload["t"]), cands)
        try:
            self._live_queue.put_nowait(frame)
        except asyncio.QueueFull:
            log.warning("live queue full, dropping frame %d", frame.frame_index)

    def _on_zones(self, payload: dict) -> None:
        zones = [zone_from_record(0, z) for z in payload["zones"]]
        zone_set = ZoneSet(tuple(zones))
        self.engine.set_zones(zone_set)  # atomic swap, next lookup uses it
        self._broadcast_now("zones", {"zones": [zone_to_record(z) for z in zone_set]})

    def _on_control(self, session: _ClientSession, payload: dict) -> None:
        action = payload.get("action")
        if action == "source":
            src = payload.get("source", {})
            stype = src.get("type")
            if stype == "trace":
                self.select_trace(src["path"])
            elif stype == "synthetic":
                noise = NoiseModel(
                    meas_noise_std=float(src.get("noise_std", 2.0)),
                    dropout_prob=float(src.get("dropout", 0.02)),
                    clutter_prob=float(src.get("clutter", 0.0)),
                    seed=int(src.get("seed", 0)),
                )
                self.select_synthetic(float(src.get("bpm", 80.0)), noise)
            elif stype == "live":
                self.select_live(session)
            else:
                raise ValueError(f"unknown source type {stype!r}")
        elif action == "play":
            if self.source is not None:
                self.source.playing = True
                self._started = None
                self._source_changed.set()
        elif action == "pause":
            if self.source is not None:
                self.source.playing = False
                self._started = None
        elif action == "seek":
            if not isinstance(self.source, _TraceSource):
                raise ValueError("seek requires a trace source")
            frames = self.source.frames
            fps = self.source.fps
            playing = self.source.playing
            target = int(payload.get("frame", 0))
            target = max(0, min(target, len(frames)))
            self._reset_engine()
            self.source = _TraceSource(frames=frames, fps=fps, pos=target, playing=playing)
            self._source_changed.set()
        else:
            raise ValueError(f"unknown control action {action!r}")


async def serve(
    config: EngineConfig,
    port: int,
    host: str = "127.0.0.1",
    source: tuple[str, object] | None = None,
    paced: bool = True,
    ready: asyncio.Event | None = None,
):
    """Run the service until cancelled.

    ``source`` preselects an input: ("trace", path) or ("synthetic", bpm);
    default is to wait for a live feed or a control message.
    """
    service = DrumService(config, paced=paced)
    if source is not None:
        kind, value = source
        if kind == "trace":
            service.select_trace(value)  # type: ignore[arg-type]
        elif kind == "synthetic":
            service.select_synthetic(float(value))  # type: ignore[arg-type]
        else:
            raise ValueError(f"unknown source kind {kind!r}")
    pipeline = asyncio.ensure_future(service.run_pipeline())
    try:
        async with ws_serve(service.handle_client, host, port):
            log.info("serving on ws://%s:%d", host, port)
            if ready is not None:
                ready.set()
            await asyncio.Future()
    finally:
        pipeline.cancel()
        with contextlib.suppress(asyncio.CancelledError):
            await pipeline
