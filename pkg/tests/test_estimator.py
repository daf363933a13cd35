import numpy as np
import pytest

from airdrum.core import StickId
from airdrum.estimator import (
    AxisEstimate,
    TrackBelief,
    build_model,
    initialize,
    predict,
    update,
)

from .oracles import batch_posterior


class TestBuildModel:
    def test_unit_step_matrices(self):
        m = build_model(T=1.0, sigma_w=1.0, sigma_v=1.0)
        assert np.array_equal(m.A, [[1.0, 1.0], [0.0, 1.0]])
        assert np.array_equal(m.G, [[0.5], [1.0]])
        # (2,1) entry is T^3/2, forced by Q = G G^T sigma_w and symmetry
        assert np.allclose(m.Q, [[0.25, 0.5], [0.5, 1.0]])
        assert m.R == 1.0

    def test_frame_rate_step(self):
        m = build_model(T=1.0 / 60.0, sigma_w=1.0, sigma_v=1.0)
        assert m.A[0][1] == 1.0 / 60.0

    @pytest.mark.parametrize("T", [1e-3, 1 / 120, 1 / 60, 0.5, 2.0])
    def test_q_symmetric(self, T):
        m = build_model(T=T, sigma_w=3.7, sigma_v=1.0)
        assert np.array_equal(m.Q, m.Q.T)

    @pytest.mark.parametrize("bad", [dict(T=0), dict(sigma_w=0), dict(sigma_v=-1)])
    def test_rejects_nonpositive(self, bad):
        kwargs = dict(T=0.01, sigma_w=1.0, sigma_v=1.0)
        kwargs.update(bad)
        with pytest.raises(ValueError):
            build_model(**kwargs)


class TestPredict:
    def test_zero_velocity_holds_position(self):
        m = build_model(1 / 60, 1.0, 1.0)
        b = initialize(StickId.LEFT, (100.0, 100.0))
        b2 = predict(b, m)
        assert b2.x_axis.p == 100.0 and b2.y_axis.p == 100.0

    def test_velocity_advances_position_exactly(self):
        m = build_model(1 / 60, 1.0, 1.0)
        est = AxisEstimate(np.array([0.0, 60.0]), np.eye(2))
        b = TrackBelief(StickId.LEFT, est, est)
        b2 = predict(b, m)
        assert b2.x_axis.p == 1.0

    def test_zero_covariance_becomes_q(self):
        m = build_model(1.0, 1.0, 1.0)
        est = AxisEstimate(np.zeros(2), np.zeros((2, 2)))
        b = TrackBelief(StickId.LEFT, est, est)
        b2 = predict(b, m)
        assert np.allclose(b2.x_axis.P, [[0.25, 0.5], [0.5, 1.0]])

    def test_rejects_uninitialized(self):
        m = build_model(1 / 60, 1.0, 1.0)
        b = initialize(StickId.LEFT, (0.0, 0.0))
        dead = TrackBelief(StickId.LEFT, b.x_axis, b.y_axis, initialized=False)
        with pytest.raises(ValueError):
            predict(dead, m)

    def test_coast_counter_untouched(self):
        m = build_model(1 / 60, 1.0, 1.0)
        b = initialize(StickId.LEFT, (0.0, 0.0))
        b = TrackBelief(b.stick, b.x_axis, b.y_axis, frames_since_measurement=7)
        assert predict(b, m).frames_since_measurement == 7


class TestUpdate:
    def test_zero_innovation_keeps_position_shrinks_variance(self):
        m = build_model(1 / 60, 100.0, 4.0)
        b = initialize(StickId.LEFT, (320.0, 240.0))
        b2 = update(b, (320.0, 240.0), m)
        assert b2.x_axis.p == pytest.approx(320.0)
        assert b2.x_axis.P[0, 0] < b.x_axis.P[0, 0]
        assert b2.frames_since_measurement == 0

    def test_diffuse_prior_snaps_to_measurement(self):
        m = build_model(1 / 60, 100.0, 4.0)
        est = AxisEstimate(np.array([0.0, 0.0]), np.diag([1e6 * m.R, 1e6 * m.R]))
        b = TrackBelief(StickId.LEFT, est, est)
        b2 = update(b, (123.0, 45.0), m)
        assert b2.x_axis.p == pytest.approx(123.0, rel=1e-3)
        assert b2.y_axis.p == pytest.approx(45.0, rel=1e-3)

    def test_unit_case_gain_half(self):
        # P = I, R = 1 -> K = [0.5, 0]; innovation 2 shifts position by 1
        m = build_model(1 / 60, 1.0, 1.0)
        est = AxisEstimate(np.array([10.0, 0.0]), np.eye(2))
        b = TrackBelief(StickId.LEFT, est, est)
        b2 = update(b, (12.0, 10.0), m)
        assert b2.x_axis.p == pytest.approx(11.0)
        assert b2.y_axis.p == pytest.approx(10.0)

    def test_rejects_nonfinite(self):
        m = build_model(1 / 60, 1.0, 1.0)
        b = initialize(StickId.LEFT, (0.0, 0.0))
        with pytest.raises(ValueError):
            update(b, (float("nan"), 0.0), m)


class TestInitialize:
    def test_seeds_at_measurement(self):
        b = initialize(StickId.RIGHT, (320.0, 240.0))
        assert b.position == (320.0, 240.0)
        assert b.velocity == (0.0, 0.0)
        assert b.initialized

    def test_covariance_psd(self):
        b = initialize(StickId.LEFT, (1.0, 2.0))
        assert np.all(np.linalg.eigvalsh(b.x_axis.P) > 0)

    def test_deterministic(self):
        a = initialize(StickId.LEFT, (5.0, 6.0))
        b = initialize(StickId.LEFT, (5.0, 6.0))
        assert np.array_equal(a.x_axis.x, b.x_axis.x)
        assert np.array_equal(a.x_axis.P, b.x_axis.P)


class TestProperties:
    def test_covariance_symmetric_psd_under_interleaving(self):
        rng = np.random.default_rng(7)
        m = build_model(1 / 120, 4e7, 4.0)
        b = initialize(StickId.LEFT, (320.0, 240.0))
        for _ in range(2000):
            if rng.random() < 0.5:
                b = predict(b, m)
            else:
                b = update(b, (rng.uniform(0, 640), rng.uniform(0, 480)), m)
            for P in (b.x_axis.P, b.y_axis.P):
                assert np.array_equal(P, P.T)
                assert np.linalg.eigvalsh(P).min() >= -1e-9

    def test_predict_only_grows_trace(self):
        rng = np.random.default_rng(8)
        m = build_model(1 / 120, 4e7, 4.0)
        b = initialize(StickId.LEFT, (320.0, 240.0))
        for _ in range(10):
            b = update(b, (rng.uniform(0, 640), rng.uniform(0, 480)), m)
            b = predict(b, m)
        for _ in range(100):
            prev = np.trace(b.y_axis.P)
            b = predict(b, m)
            assert np.trace(b.y_axis.P) > prev

    def test_matches_batch_least_squares(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n = int(rng.integers(1, 21))
            T = rng.uniform(1 / 240, 1 / 30)
            sigma_w = 10.0 ** rng.uniform(2, 8)
            sigma_v = 10.0 ** rng.uniform(-0.5, 2)
            p0 = rng.uniform(0, 640)
            pos_var = rng.uniform(10, 1e4)
            vel_var = rng.uniform(100, 1e6)
            meas = list(p0 + np.cumsum(rng.normal(0, 5, size=n)))

            m = build_model(T, sigma_w, sigma_v)
            est = AxisEstimate(np.array([p0, 0.0]), np.diag([pos_var, vel_var]))
            b = TrackBelief(StickId.LEFT, est, est)
            for y in meas:
                b = update(predict(b, m), (y, y), m)

            ref = batch_posterior(
                [p0, 0.0], np.diag([pos_var, vel_var]), T, sigma_w, sigma_v, meas
            )
            got = np.array([b.x_axis.p, b.x_axis.v])
            assert np.all(np.abs(got - ref) <= 1e-9 * np.maximum(1.0, np.abs(ref)))

    def test_constant_velocity_convergence(self):
        m = build_model(1 / 60, 4e7, 4.0)
        v_true = 240.0
        b = initialize(StickId.LEFT, (0.0, 0.0))
        for k in range(1, 8):
            b = update(predict(b, m), (v_true * k / 60.0, v_true * k / 60.0), m)
        assert b.x_axis.v == pytest.approx(v_true, rel=0.01)
