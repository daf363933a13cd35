import numpy as np
import pytest

from airdrum.core import FilterParams, HitEvent, HitParams, StickId, validate_config
from airdrum.engine import run_trace
from airdrum.simulate import (
    NoiseModel,
    StrokePattern,
    bench_sweep,
    generate,
    score,
)
from airdrum.zones import DEFAULT_ZONES

from .oracles import optimal_matching

CONFIG = validate_config(FilterParams(), HitParams(), DEFAULT_ZONES)
L, R = StickId.LEFT, StickId.RIGHT


def ev(t, stick=L):
    return HitEvent(t, stick, 320.0, 332.0, 1000.0, 0.33, frozenset({"snare"}))


class TestGenerate:
    def test_total_dropout_empties_every_frame(self):
        trace, _ = generate(
            StrokePattern(bpm=80, duration=5.0),
            NoiseModel(dropout_prob=1.0, clutter_prob=0.0),
            CONFIG,
        )
        assert all(f.candidates == () for f in trace.frames)

    def test_stroke_count_matches_tempo(self):
        _, truth = generate(
            StrokePattern(bpm=80, duration=60.0), NoiseModel(), CONFIG
        )
        assert len(truth) == 80

    def test_same_seed_reproduces_trace(self):
        pat = StrokePattern(bpm=100, duration=10.0)
        noise = NoiseModel(dropout_prob=0.2, clutter_prob=0.1, seed=9)
        a, ta = generate(pat, noise, CONFIG)
        b, tb = generate(pat, noise, CONFIG)
        assert a == b and ta == tb

    def test_different_seed_differs(self):
        pat = StrokePattern(bpm=100, duration=10.0)
        a, _ = generate(pat, NoiseModel(seed=1), CONFIG)
        b, _ = generate(pat, NoiseModel(seed=2), CONFIG)
        assert a != b

    def test_truth_sorted_and_alternating(self):
        _, truth = generate(StrokePattern(bpm=120, duration=10.0), NoiseModel(), CONFIG)
        times = [t for t, _, _ in truth]
        assert times == sorted(times)
        assert [s for _, s, _ in truth][:4] == [L, R, L, R]

    def test_candidates_within_frame(self):
        trace, _ = generate(
            StrokePattern(bpm=80, duration=5.0),
            NoiseModel(meas_noise_std=30.0, clutter_prob=0.5, seed=4),
            CONFIG,
        )
        for f in trace.frames:
            assert len(f.candidates) <= 3
            for c in f.candidates:
                assert 0 <= c.cx <= 640 and 0 <= c.cy <= 480

    def test_unknown_zone_rejected(self):
        pat = StrokePattern(bpm=80, duration=5.0, schedule={L: ("nope",), R: ("tom",)})
        with pytest.raises(ValueError, match="nope"):
            generate(pat, NoiseModel(), CONFIG)

    def test_bpm_bounds(self):
        with pytest.raises(ValueError):
            StrokePattern(bpm=20, duration=5.0).validate()


class TestScore:
    def test_perfect_match(self):
        truth = [(1.0, L, "snare"), (2.0, R, "tom")]
        events = [ev(1.0, L), ev(2.0, R)]
        rep = score(events, truth)
        assert rep.miss_count == 0 and rep.spurious_count == 0
        assert rep.miss_rate == 0.0 and rep.spurious_rate == 0.0

    def test_extra_event_is_spurious(self):
        truth = [(1.0, L, "snare")]
        events = [ev(1.0, L), ev(5.0, L)]
        rep = score(events, truth)
        assert rep.spurious_count == 1 and rep.miss_count == 0

    def test_missing_event_is_miss(self):
        truth = [(1.0, L, "snare"), (2.0, L, "snare")]
        rep = score([ev(1.01, L)], truth)
        assert rep.miss_count == 1

    def test_stick_identity_respected(self):
        truth = [(1.0, L, "snare")]
        rep = score([ev(1.0, R)], truth)
        assert rep.miss_count == 1 and rep.spurious_count == 1

    def test_window_boundary(self):
        truth = [(1.0, L, "snare")]
        assert score([ev(1.05, L)], truth).miss_count == 0
        assert score([ev(1.075, L)], truth).miss_count == 1

    def test_paper_aliases_swap_labels(self):
        truth = [(1.0, L, "snare"), (2.0, L, "snare")]
        rep = score([ev(1.0, L), ev(5.0, L)], truth)
        assert rep.paper_fp_count == rep.miss_count == 1
        assert rep.paper_fn_count == rep.spurious_count == 1

    def test_time_errors_signed(self):
        truth = [(1.0, L, "snare")]
        rep = score([ev(1.02, L)], truth)
        assert rep.time_errors == pytest.approx((0.02,))

    def test_greedy_equals_optimal_on_separated_instances(self):
        # per-stick truth separated by > 2*window, so each event can match at
        # most one truth hit; greedy must then equal the brute-force optimum
        rng = np.random.default_rng(17)
        window = 0.06
        for _ in range(500):
            n_truth = int(rng.integers(0, 7))
            times = np.cumsum(rng.uniform(2.5 * window, 0.6, size=n_truth))
            truth = [(float(t), L, "snare") for t in times]
            events = []
            for t in times:
                if rng.random() < 0.8:
                    events.append(ev(float(t + rng.uniform(-1.2, 1.2) * window)))
            for _ in range(rng.integers(0, 3)):
                events.append(ev(float(rng.uniform(0, max(1.0, times[-1] if n_truth else 1.0)))))
            events.sort(key=lambda e: e.t)
            rep = score(events, truth, window)
            matched, _ = optimal_matching(
                [t for t, _, _ in truth], [e.t for e in events], window
            )
            assert rep.miss_count == len(truth) - matched
            assert rep.spurious_count == len(events) - matched


class TestBenchSweep:
    def test_noiseless_sweep_is_perfect(self):
        rows = bench_sweep(
            [60, 100, 140],
            NoiseModel(meas_noise_std=0.0),
            CONFIG,
            seeds=(0,),
            duration=10.0,
        )
        assert [r.bpm for r in rows] == [60, 100, 140]
        assert all(r.miss_rate == 0.0 for r in rows)
        assert all(r.spurious_rate == 0.0 for r in rows)

    def test_row_per_tempo_and_rates_in_range(self):
        rows = bench_sweep(
            [60, 90, 120],
            NoiseModel(dropout_prob=0.2, clutter_prob=0.1, meas_noise_std=3.0),
            CONFIG,
            seeds=(0, 1),
            duration=8.0,
        )
        assert len(rows) == 3
        for r in rows:
            assert 0.0 <= r.miss_rate <= 1.0
            assert 0.0 <= r.spurious_rate <= 1.0

    def test_same_seeds_reproduce_table(self):
        noise = NoiseModel(dropout_prob=0.15, meas_noise_std=2.0)
        a = bench_sweep([80], noise, CONFIG, seeds=(3,), duration=8.0)
        b = bench_sweep([80], noise, CONFIG, seeds=(3,), duration=8.0)
        assert a == b

    def test_artifacts_written(self, tmp_path):
        bench_sweep(
            [60],
            NoiseModel(),
            CONFIG,
            seeds=(0,),
            duration=5.0,
            artifact_dir=tmp_path,
        )
        assert (tmp_path / "bpm60_seed0.a2dtrace").exists()
        assert (tmp_path / "bpm60_seed0_truth.a2dhits").exists()
        assert (tmp_path / "bpm60_seed0_events.a2dhits").exists()


class TestNoiseProperties:
    def test_miss_rate_monotone_in_dropout(self):
        seeds = range(20)
        rates = []
        for dropout in (0.3, 0.0):
            miss = truth = 0
            for seed in seeds:
                trace, gt = generate(
                    StrokePattern(bpm=120, duration=15.0),
                    NoiseModel(meas_noise_std=2.0, dropout_prob=dropout, seed=seed),
                    CONFIG,
                )
                _s, events = run_trace(trace, CONFIG)
                rep = score(events, gt)
                miss += rep.miss_count
                truth += rep.truth_count
            rates.append(miss / truth)
        assert rates[1] <= rates[0] + 0.01  # 1 percentage-point slack

    def test_tempo_trend_matches_reported_shape(self):
        noise = NoiseModel(meas_noise_std=2.0, dropout_prob=0.15)
        rows = bench_sweep([60, 140], noise, CONFIG, seeds=range(20), duration=30.0)
        by_bpm = {r.bpm: r.miss_rate for r in rows}
        assert by_bpm[140] >= by_bpm[60]
