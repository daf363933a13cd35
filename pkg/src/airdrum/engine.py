"""The per-frame pipeline: ingest detections, associate, filter, detect hits.

Each camera frame is processed as ``subdivision`` filter steps; every step
advances both tracks by one predict, and the frame-aligned (last) step runs
association and folds assigned measurements in.  Measurement-updated steps
push the fresh estimates through hit detection; predict-only steps keep the
velocity estimate frozen, so they refine snapshots and gap handling but add
nothing the hit queue could use.  Tracks that go unmeasured for
max_coast_frames consecutive frames are de-initialized and later re-seeded
from fresh detections.

Hit timestamps: a reversal is typically observed one or more measurements
after it happened (later still when detections dropped out around the
impact).  The engine therefore reports the interpolated zero-crossing time
of the vertical velocity between the last two measurement-backed estimates,
which stays close to the physical impact instant even across detection gaps.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass, field

from . import association, estimator, hitdetect
from .core import (
    STICKS,
    DetectionFrame,
    EngineConfig,
    HitEvent,
    StickId,
    TipCandidate,
)
from .zones import ZoneSet, finalize_hit


@dataclass(frozen=True)
class StickState:
    """Per-stick slice of a frame snapshot."""

    initialized: bool
    x: float | None = None
    y: float | None = None
    vx: float | None = None
    vy: float | None = None
    coasting: bool = False
    measured: bool = False


@dataclass(frozen=True)
class FrameSnapshot:
    """Deterministic digest of engine state after one processed frame."""

    frame_index: int
    t: float
    sticks: dict[StickId, StickState]
    zone_ids: tuple[str, ...]
    hits: tuple[HitEvent, ...]


@dataclass
class _TrackSlot:
    belief: estimator.TrackBelief | None = None
    # (t, vy) at the most recent measurement update, for hit-time interpolation
    last_update: tuple[float, float] | None = None

    def reset(self) -> None:
        self.belief = None
        self.last_update = None


class Engine:
    """Single-owner pipeline; process frames strictly in time order."""

    def __init__(self, config: EngineConfig):
        config.filter.validate()
        config.hits.validate()
        self.config = config
        self.model = estimator.build_model(
            config.filter.step_dt, config.filter.sigma_w, config.filter.sigma_v
        )
        self.zone_set = ZoneSet(tuple(config.zones))
        self.clock: float | None = None
        self._slots: dict[StickId, _TrackSlot] = {s: _TrackSlot() for s in STICKS}
        self._queues = {
            s: hitdetect.StickQueue(s, config.hits.queue_len) for s in STICKS
        }

    # -- configuration hot-swaps -------------------------------------------

    def set_zones(self, zone_set: ZoneSet) -> None:
        self.zone_set = zone_set

    # -- pipeline ------------------------------------------------------------

    def step(self, frame: DetectionFrame) -> tuple[FrameSnapshot, list[HitEvent]]:
        cfg = self.config
        if self.clock is not None and frame.t <= self.clock:
            raise ValueError(
                f"out-of-order frame: t={frame.t} after clock={self.clock}"
            )
        for cand in frame.candidates:
            cand.validate(cfg.frame_width, cfg.frame_height)
        candidates = [
            c for c in frame.candidates if c.confidence >= cfg.min_confidence
        ]

        T = cfg.filter.step_dt
        if self.clock is None:
            n_steps = 1
            step_times = [frame.t]
        else:
            n_steps = max(1, round((frame.t - self.clock) / T))
            # nominal step times, final step snapped to the frame timestamp
            step_times = [self.clock + i * T for i in range(1, n_steps)] + [frame.t]

        events: list[HitEvent] = []
        measured: dict[StickId, bool] = {s: False for s in STICKS}

        for step_i, t_sub in enumerate(step_times):
            final = step_i == n_steps - 1
            updated_now: dict[StickId, bool] = {s: False for s in STICKS}

            for s in STICKS:
                slot = self._slots[s]
                if slot.belief is not None and self.clock is not None:
                    slot.belief = estimator.predict(slot.belief, self.model)

            if final:
                self._associate_and_update(candidates, measured, updated_now)

            for s in STICKS:
                slot = self._slots[s]
                if slot.belief is None or not updated_now[s]:
                    # predict-only steps leave the velocity estimate untouched,
                    # so they carry nothing the hit queue can use; pushing their
                    # duplicates would flush real stroke history during coasting
                    continue
                x, y = slot.belief.position
                _vx, vy = slot.belief.velocity
                precursor = hitdetect.push_and_detect(
                    self._queues[s], (t_sub, x, y, vy), cfg.hits
                )
                if precursor is not None:
                    t_event = self._reversal_time(slot, t_sub, vy)
                    events.append(
                        finalize_hit(precursor, s, self.zone_set, cfg.hits, t=t_event)
                    )
                slot.last_update = (t_sub, vy)

        self.clock = frame.t
        snapshot = FrameSnapshot(
            frame_index=frame.frame_index,
            t=frame.t,
            sticks={s: self._stick_state(s, measured[s]) for s in STICKS},
            zone_ids=self.zone_set.ids(),
            hits=tuple(events),
        )
        return snapshot, events

    # -- internals -------------------------------------------------------

    def _effective_gate(self) -> float:
        """Widen the association gate for coasting tracks: a tip that
        reversed during a detection gap diverges from the coasted prediction
        at up to twice its speed, so a fixed gate would lose it."""
        cfg = self.config
        extra = 0.0
        for s in STICKS:
            belief = self._slots[s].belief
            if belief is None or belief.frames_since_measurement == 0:
                continue
            coast_s = belief.frames_since_measurement * cfg.filter.frame_dt
            speed = math.hypot(*belief.velocity)
            extra = max(extra, coast_s * (1.5 * speed + 300.0))
        return cfg.gate_radius + extra

    def _associate_and_update(
        self,
        candidates: list[TipCandidate],
        measured: dict[StickId, bool],
        updated_now: dict[StickId, bool],
    ) -> None:
        cfg = self.config
        tracks = {s: self._slots[s].belief for s in STICKS}
        assignment = association.associate(candidates, tracks, self._effective_gate())

        for s in STICKS:
            slot = self._slots[s]
            if slot.belief is None:
                continue
            ci = assignment.pairs.get(s)
            if ci is not None:
                cand = candidates[ci]
                slot.belief = estimator.update(
                    slot.belief, (cand.cx, cand.cy), self.model
                )
                measured[s] = True
                updated_now[s] = True
            else:
                coasts = slot.belief.frames_since_measurement + 1
                if coasts >= cfg.filter.max_coast_frames:
                    slot.reset()
                    self._queues[s].clear()
                else:
                    slot.belief = estimator.TrackBelief(
                        stick=slot.belief.stick,
                        x_axis=slot.belief.x_axis,
                        y_axis=slot.belief.y_axis,
                        frames_since_measurement=coasts,
                        initialized=True,
                    )

        self._reseed(candidates, assignment, measured, updated_now)

    def _reseed(
        self,
        candidates: list[TipCandidate],
        assignment: association.Assignment,
        measured: dict[StickId, bool],
        updated_now: dict[StickId, bool],
    ) -> None:
        cfg = self.config
        dead = [s for s in STICKS if self._slots[s].belief is None]
        if not dead:
            return
        free = sorted(assignment.unassigned_candidates)
        if len(dead) == 2:
            seeds = association.bootstrap(
                [candidates[i] for i in free], cfg.min_confidence
            )
            if seeds is None:
                return
            for s, meas in zip((StickId.LEFT, StickId.RIGHT), seeds):
                self._seed(s, meas, measured, updated_now)
        else:
            # single dead track: re-seed from the best leftover detection
            best = None
            for i in free:
                c = candidates[i]
                if c.confidence >= cfg.min_confidence and (
                    best is None or c.confidence > best.confidence
                ):
                    best = c
            if best is not None:
                self._seed(dead[0], (best.cx, best.cy), measured, updated_now)

    def _seed(self, s, meas, measured, updated_now) -> None:
        cfg = self.config
        self._slots[s].reset()
        self._queues[s].clear()
        self._slots[s].belief = estimator.initialize(
            s, meas, cfg.init_pos_var, cfg.init_vel_var
        )
        measured[s] = True
        updated_now[s] = True

    def _reversal_time(self, slot: _TrackSlot, t_now: float, vy_now: float) -> float:
        """Interpolate the vy sign change between the last two measurement
        updates; falls back to the detection step time."""
        if slot.last_update is None:
            return t_now
        t0, vy0 = slot.last_update
        if not (vy0 > 0.0 > vy_now and t0 < t_now):
            return t_now
        t_est = t0 + vy0 / (vy0 - vy_now) * (t_now - t0)
        return min(max(t_est, t0), t_now)

    def _stick_state(self, s: StickId, was_measured: bool) -> StickState:
        belief = self._slots[s].belief
        if belief is None:
            return StickState(initialized=False)
        x, y = belief.position
        vx, vy = belief.velocity
        return StickState(
            initialized=True,
            x=x,
            y=y,
            vx=vx,
            vy=vy,
            coasting=belief.frames_since_measurement > 0,
            measured=was_measured,
        )


def _rescaled(frame: DetectionFrame, sx: float, sy: float) -> DetectionFrame:
    if sx == 1.0 and sy == 1.0:
        return frame
    cands = tuple(
        TipCandidate(c.cx * sx, c.cy * sy, c.w * sx, c.h * sy, c.confidence)
        for c in frame.candidates
    )
    return DetectionFrame(frame.frame_index, frame.t, cands)


def run_trace(
    trace,
    config: EngineConfig,
    paced: bool = False,
    sleep=_time.sleep,
    clock=_time.monotonic,
) -> tuple[list[FrameSnapshot], list[HitEvent]]:
    """Fold the pipeline over a recorded trace.

    Offline mode (default) runs as fast as possible; paced mode sleeps so
    frames are processed at their recorded wall-clock spacing.
    """
    eng = Engine(config)
    sx = config.frame_width / trace.header.width
    sy = config.frame_height / trace.header.height
    snapshots: list[FrameSnapshot] = []
    events: list[HitEvent] = []
    start_wall = clock()
    start_t: float | None = None
    for frame in trace.frames:
        if paced:
            if start_t is None:
                start_t = frame.t
            lag = (frame.t - start_t) - (clock() - start_wall)
            if lag > 0:
                sleep(lag)
        snap, hits = eng.step(_rescaled(frame, sx, sy))
        snapshots.append(snap)
        events.extend(hits)
    return snapshots, events
