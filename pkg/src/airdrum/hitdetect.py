"""Stroke-reversal (hit) detection over a short FIFO of filter estimates.

Each stick owns a FIFO of the N most recent (t, x, y, vy) estimates.  A hit
fires when the queue is full, the newest vertical velocity is negative
(moving up) while an older entry was positive (was moving down), the
strongest downward speed in the window clears the threshold, and the
refractory period since the previous hit has elapsed.  The threshold filters
out zero crossings produced by a stick standing still or jittering; the
refractory period stops a single reversal that spans several filter steps
from double-triggering.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .core import HitParams, StickId


@dataclass(frozen=True)
class HitPrecursor:
    """A raw detection before zone lookup: when, where, how fast."""

    t: float
    x: float
    y: float
    strike_speed: float


@dataclass(frozen=True)
class QueueEntry:
    t: float
    x: float
    y: float
    vy: float


class StickQueue:
    """FIFO of recent estimates for one stick, plus the last hit time."""

    def __init__(self, stick: StickId, queue_len: int):
        self.stick = stick
        self.entries: deque[QueueEntry] = deque(maxlen=queue_len)
        self.last_hit_t: float | None = None

    def __len__(self) -> int:
        return len(self.entries)

    def clear(self) -> None:
        """Drop buffered estimates (track died); the refractory clock keeps
        running so a reborn track cannot instantly re-trigger."""
        self.entries.clear()

    def snapshot(self) -> tuple[QueueEntry, ...]:
        return tuple(self.entries)


def push_and_detect(
    q: StickQueue,
    est: tuple[float, float, float, float],
    params: HitParams,
) -> HitPrecursor | None:
    """Append (t, x, y, vy) and report a hit precursor if the reversal
    conditions all hold.  Timestamps must be strictly increasing."""
    t, x, y, vy = est
    if q.entries and t <= q.entries[-1].t:
        raise ValueError(f"non-monotone estimate time: {t} after {q.entries[-1].t}")
    q.entries.append(QueueEntry(t, x, y, vy))

    if len(q.entries) < params.queue_len:
        return None
    newest = q.entries[-1]
    if newest.vy >= 0:
        return None
    older = list(q.entries)[:-1]
    if not any(e.vy > 0 for e in older):
        return None
    strike_speed = max(e.vy for e in q.entries)
    if strike_speed < params.strike_speed_min:
        return None
    if q.last_hit_t is not None and t - q.last_hit_t < params.refractory:
        return None
    q.last_hit_t = t
    return HitPrecursor(t=newest.t, x=newest.x, y=newest.y, strike_speed=strike_speed)


def route(
    q_left: StickQueue,
    q_right: StickQueue,
    est: tuple[float, float, float, float],
    stick: StickId | None = None,
) -> StickQueue:
    """Pick the queue an estimate belongs to.

    Estimates from the tracker arrive labeled and route by identity.  An
    unlabeled estimate (external feed) goes to the queue whose last entry is
    nearest in the plane; ties and the empty-queues case go left.
    """
    if stick is StickId.LEFT:
        return q_left
    if stick is StickId.RIGHT:
        return q_right
    _, x, y, _ = est

    def dist(q: StickQueue) -> float:
        if not q.entries:
            return math.inf
        tail = q.entries[-1]
        return math.hypot(x - tail.x, y - tail.y)

    return q_right if dist(q_right) < dist(q_left) else q_left


def volume(strike_speed: float, params: HitParams) -> float:
    """Linear in strike speed, saturating at 1.0 at volume_ref_speed."""
    return min(1.0, strike_speed / params.volume_ref_speed)
