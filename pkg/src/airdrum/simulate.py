"""Synthetic stroke traces with noise/dropout/clutter, plus the FP/FN scorer.

The generator lays out strikes at the requested tempo (strikes per minute,
alternating sticks by default), moves each stick tip through a smooth
reversal bump into its target zone, and emits per-frame detections: true tip
positions with Gaussian noise and random dropout, an occasional uniform
clutter detection at low confidence, capped at three candidates per frame by
confidence.  Ground truth records each reversal instant.

Scoring pairs ground-truth hits with emitted events one-to-one (greedy
nearest within a time window, per stick).  Naming note: this scorer calls an
undetected real hit a *miss* (conventional false negative) and an event with
no real hit a *spurious* (conventional false positive); the original study's
prose used the FP/FN labels the other way around, so paper-labeled aliases
are provided for comparison either way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import DetectionFrame, EngineConfig, HitEvent, StickId, TipCandidate
from .engine import run_trace
from .traceio import DetectionTrace, TraceHeader, write_events, write_trace, write_truth

TIP_BOX_PX = 14.0
TRUE_CONF = (0.75, 0.98)
CLUTTER_CONF = (0.05, 0.45)
DEFAULT_MATCH_WINDOW = 0.06

GroundTruth = list[tuple[float, StickId, str]]


def _default_schedule() -> dict[StickId, tuple[str, ...]]:
    return {StickId.LEFT: ("snare",), StickId.RIGHT: ("tom",)}


@dataclass(frozen=True)
class StrokePattern:
    """Strike schedule: tempo (strikes/minute, alternating sticks), the zones
    each stick cycles through, and the stroke geometry."""

    bpm: float
    duration: float
    schedule: dict[StickId, tuple[str, ...]] = field(default_factory=_default_schedule)
    amplitude: float = 150.0
    stroke_duration: float = 0.3  # full width of the reversal bump, seconds

    def validate(self) -> None:
        if not 30.0 <= self.bpm <= 300.0:
            raise ValueError(f"bpm out of [30, 300]: {self.bpm}")
        if self.duration <= 0:
            raise ValueError(f"duration must be positive: {self.duration}")
        if self.amplitude <= 0:
            raise ValueError(f"amplitude must be positive: {self.amplitude}")
        if self.stroke_duration <= 0:
            raise ValueError(f"stroke_duration must be positive: {self.stroke_duration}")
        for stick, zones in self.schedule.items():
            if not zones:
                raise ValueError(f"empty zone schedule for {stick}")


@dataclass(frozen=True)
class NoiseModel:
    """Detector imperfections: per-axis Gaussian position noise, per-tip
    per-frame dropout, and per-frame uniform clutter at low confidence."""

    meas_noise_std: float = 2.0
    dropout_prob: float = 0.0
    clutter_prob: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.meas_noise_std < 0:
            raise ValueError(f"meas_noise_std must be >= 0: {self.meas_noise_std}")
        for name in ("dropout_prob", "clutter_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} out of [0,1]: {v}")


def _bump(u: float) -> float:
    """Smooth reversal profile on [-1, 1]: squared half-cosine, so velocity
    and acceleration vanish at the stroke boundaries."""
    if abs(u) >= 1.0:
        return 0.0
    c = math.cos(math.pi * u / 2.0)
    return c * c * c * c


def _smoothstep(u: float) -> float:
    u = min(1.0, max(0.0, u))
    return u * u * (3.0 - 2.0 * u)


@dataclass(frozen=True)
class _StickPlan:
    strikes: list  # [(t_hit, zone_id, impact_x, impact_y)]
    amplitude: float
    tau: float

    def pose(self, t: float) -> tuple[float, float]:
        """True tip position at time t: hover anchor plus stroke bump."""
        if not self.strikes:
            return (0.0, 0.0)
        # anchor (x, rest_y) interpolates between consecutive strike targets
        i = 0
        while i < len(self.strikes) and self.strikes[i][0] < t:
            i += 1
        if i == 0:
            _, _, ax, ay = self.strikes[0]
        elif i == len(self.strikes):
            _, _, ax, ay = self.strikes[-1]
        else:
            t0, _, x0, y0 = self.strikes[i - 1]
            t1, _, x1, y1 = self.strikes[i]
            lo, hi = t0 + self.tau, t1 - self.tau
            s = _smoothstep((t - lo) / (hi - lo)) if hi > lo else 1.0
            ax = x0 + (x1 - x0) * s
            ay = y0 + (y1 - y0) * s
        rest_y = ay - self.amplitude
        y = rest_y
        for t_hit, _, _, iy in self.strikes:
            if abs(t - t_hit) < self.tau:
                y = (iy - self.amplitude) + self.amplitude * _bump((t - t_hit) / self.tau)
                break
            if t_hit - self.tau > t:
                break
        return (ax, y)


def _plan(pattern: StrokePattern, config: EngineConfig) -> tuple[dict[StickId, _StickPlan], GroundTruth]:
    zones_by_id = {z.zone_id: z for z in config.zones}
    interval = 60.0 / pattern.bpm
    tau = min(pattern.stroke_duration / 2.0, 0.45 * interval)
    n_strokes = int(math.floor(pattern.bpm * pattern.duration / 60.0))
    order = (StickId.LEFT, StickId.RIGHT)

    truth: GroundTruth = []
    per_stick: dict[StickId, list] = {s: [] for s in order}
    counters = {s: 0 for s in order}
    for i in range(n_strokes):
        t_hit = interval / 2.0 + i * interval
        stick = order[i % 2]
        cycle = pattern.schedule[stick]
        zone_id = cycle[counters[stick] % len(cycle)]
        counters[stick] += 1
        if zone_id not in zones_by_id:
            raise ValueError(f"schedule references unknown zone {zone_id!r}")
        z = zones_by_id[zone_id]
        cx = (z.x_min + z.x_max) / 2.0
        cy = (z.y_min + z.y_max) / 2.0
        truth.append((t_hit, stick, zone_id))
        per_stick[stick].append((t_hit, zone_id, cx, cy))

    plans = {}
    for stick in order:
        strikes = per_stick[stick]
        if not strikes:
            # idle stick hovers over its first scheduled zone
            zone_id = pattern.schedule[stick][0]
            z = zones_by_id.get(zone_id)
            if z is None:
                raise ValueError(f"schedule references unknown zone {zone_id!r}")
            strikes = [(-1e9, zone_id, (z.x_min + z.x_max) / 2.0, (z.y_min + z.y_max) / 2.0)]
        plans[stick] = _StickPlan(strikes, pattern.amplitude, tau)
    return plans, truth


def generate(
    pattern: StrokePattern,
    noise: NoiseModel,
    config: EngineConfig,
) -> tuple[DetectionTrace, GroundTruth]:
    """Produce a detection trace and its ground truth, deterministic by seed."""
    pattern.validate()
    noise.validate()
    plans, truth = _plan(pattern, config)
    rng = np.random.default_rng(noise.seed)
    fps = config.filter.fps
    W, H = config.frame_width, config.frame_height
    n_frames = int(round(pattern.duration * fps))

    frames: list[DetectionFrame] = []
    for i in range(n_frames):
        t = i / fps
        cands: list[TipCandidate] = []
        for stick in (StickId.LEFT, StickId.RIGHT):
            x, y = plans[stick].pose(t)
            dropped = rng.random() < noise.dropout_prob
            nx = x + rng.normal(0.0, noise.meas_noise_std)
            ny = y + rng.normal(0.0, noise.meas_noise_std)
            conf = rng.uniform(*TRUE_CONF)
            if not dropped:
                cands.append(
                    TipCandidate(
                        cx=min(max(nx, 0.0), W),
                        cy=min(max(ny, 0.0), H),
                        w=TIP_BOX_PX,
                        h=TIP_BOX_PX,
                        confidence=conf,
                    )
                )
        if rng.random() < noise.clutter_prob:
            cands.append(
                TipCandidate(
                    cx=rng.uniform(0.0, W),
                    cy=rng.uniform(0.0, H),
                    w=rng.uniform(8.0, 24.0),
                    h=rng.uniform(8.0, 24.0),
                    confidence=rng.uniform(*CLUTTER_CONF),
                )
            )
        cands.sort(key=lambda c: -c.confidence)
        frames.append(DetectionFrame(i, t, tuple(cands[:3])))

    header = TraceHeader(fps=fps, width=W, height=H, source=f"synthetic bpm={pattern.bpm} seed={noise.seed}")
    return DetectionTrace(header, tuple(frames)), truth


# -- scoring -------------------------------------------------------------------


@dataclass(frozen=True)
class ScoreReport:
    """One-to-one matching outcome.

    miss = ground-truth hit with no matched event (conventional false
    negative); spurious = emitted event with no matched ground-truth hit
    (conventional false positive).  The paper_* aliases carry the swapped
    labels used in the original study's prose.
    """

    truth_count: int
    event_count: int
    miss_count: int
    spurious_count: int
    time_errors: tuple[float, ...]  # signed seconds, event minus truth, matched pairs

    @property
    def miss_rate(self) -> float:
        return self.miss_count / self.truth_count if self.truth_count else 0.0

    @property
    def spurious_rate(self) -> float:
        return self.spurious_count / self.truth_count if self.truth_count else 0.0

    # the study's prose swaps the conventional FP/FN labels; expose both namings
    @property
    def paper_fp_count(self) -> int:
        return self.miss_count

    @property
    def paper_fn_count(self) -> int:
        return self.spurious_count

    @property
    def paper_fp_rate(self) -> float:
        return self.miss_rate

    @property
    def paper_fn_rate(self) -> float:
        return self.spurious_rate

    @property
    def mean_abs_time_error(self) -> float:
        if not self.time_errors:
            return 0.0
        return float(np.mean(np.abs(self.time_errors)))


def score(
    events: list[HitEvent],
    truth: GroundTruth,
    match_window: float = DEFAULT_MATCH_WINDOW,
) -> ScoreReport:
    """Greedy one-to-one matching: walk truth hits in time order, pair each
    with the nearest unmatched same-stick event within the window (ties to
    the earlier event)."""
    errors: list[float] = []
    matched_events: set[int] = set()
    miss = 0
    for t_truth, stick, _zone in sorted(truth):
        best_i = None
        best_d = None
        for i, e in enumerate(events):
            if i in matched_events or e.stick is not stick:
                continue
            d = abs(e.t - t_truth)
            if d <= match_window and (
                best_d is None or d < best_d or (d == best_d and e.t < events[best_i].t)
            ):
                best_i, best_d = i, d
        if best_i is None:
            miss += 1
        else:
            matched_events.add(best_i)
            errors.append(events[best_i].t - t_truth)
    spurious = len(events) - len(matched_events)
    return ScoreReport(
        truth_count=len(truth),
        event_count=len(events),
        miss_count=miss,
        spurious_count=spurious,
        time_errors=tuple(errors),
    )


# -- benchmark sweep ------------------------------------------------------------


@dataclass(frozen=True)
class BenchRow:
    bpm: float
    miss_rate: float
    spurious_rate: float
    mean_time_error_ms: float
    truth_count: int
    miss_count: int
    spurious_count: int


def bench_sweep(
    bpm_list,
    noise: NoiseModel,
    config: EngineConfig,
    seeds=(0,),
    duration: float = 60.0,
    match_window: float = DEFAULT_MATCH_WINDOW,
    pattern_kwargs: dict | None = None,
    artifact_dir: str | Path | None = None,
) -> list[BenchRow]:
    """Run generate -> replay -> score per tempo, pooled across seeds.

    With artifact_dir set, the trace and event log of every run are written
    there for inspection.
    """
    out = []
    art = Path(artifact_dir) if artifact_dir is not None else None
    if art is not None:
        art.mkdir(parents=True, exist_ok=True)
    for bpm in bpm_list:
        pattern = StrokePattern(bpm=bpm, duration=duration, **(pattern_kwargs or {}))
        truth_total = miss_total = spur_total = 0
        abs_errors: list[float] = []
        for seed in seeds:
            run_noise = NoiseModel(
                meas_noise_std=noise.meas_noise_std,
                dropout_prob=noise.dropout_prob,
                clutter_prob=noise.clutter_prob,
                seed=int(seed),
            )
            trace, truth = generate(pattern, run_noise, config)
            _snapshots, events = run_trace(trace, config)
            report = score(events, truth, match_window)
            truth_total += report.truth_count
            miss_total += report.miss_count
            spur_total += report.spurious_count
            abs_errors.extend(abs(e) for e in report.time_errors)
            if art is not None:
                stem = f"bpm{bpm:g}_seed{seed}"
                write_trace(trace, art / f"{stem}.a2dtrace")
                write_truth(truth, art / f"{stem}_truth.a2dhits")
                write_events(events, art / f"{stem}_events.a2dhits")
        out.append(
            BenchRow(
                bpm=float(bpm),
                miss_rate=miss_total / truth_total if truth_total else 0.0,
                spurious_rate=spur_total / truth_total if truth_total else 0.0,
                mean_time_error_ms=float(np.mean(abs_errors) * 1000.0) if abs_errors else 0.0,
                truth_count=truth_total,
                miss_count=miss_total,
                spurious_count=spur_total,
            )
        )
    return out


def write_bench_table(rows: list[BenchRow], sink) -> None:
    """Tab-separated sweep table, one row per tempo."""
    f, owned = (sink, False) if hasattr(sink, "write") else (open(sink, "w", encoding="utf-8", newline="\n"), True)
    try:
        f.write("bpm\tmiss_rate\tspurious_rate\tmean_time_error_ms\ttruth\tmisses\tspurious\n")
        for r in rows:
            f.write(
                f"{r.bpm:g}\t{r.miss_rate:.6f}\t{r.spurious_rate:.6f}\t"
                f"{r.mean_time_error_ms:.3f}\t{r.truth_count}\t{r.miss_count}\t{r.spurious_count}\n"
            )
    finally:
        if owned:
            f.close()


def write_plot_data(rows: list[BenchRow], sink) -> None:
    """Plot-friendly table with the study's swapped FP/FN axis labels:
    fp_percent = undetected real hits, fn_percent = events with no real hit."""
    f, owned = (sink, False) if hasattr(sink, "write") else (open(sink, "w", encoding="utf-8", newline="\n"), True)
    try:
        f.write("bpm\tfp_percent\tfn_percent\n")
        for r in rows:
            f.write(f"{r.bpm:g}\t{100.0 * r.miss_rate:.3f}\t{100.0 * r.spurious_rate:.3f}\n")
    finally:
        if owned:
            f.close()
