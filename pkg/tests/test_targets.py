import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_spd, philox
from langevin_lab.targets import (
    QuadraticSpec,
    check_curvature,
    custom_target,
    load_target,
    logistic_target,
    quadratic_target,
    target_from_dict,
    temper,
)


class TestQuadratic:
    def test_eval_and_grad_match_definition(self, rng):
        p = 4
        A = make_spd(rng, p)
        mu = rng.standard_normal(p)
        t = quadratic_target(mu, A)
        x = rng.standard_normal(p)
        d = x - mu
        assert t.eval(x) == pytest.approx(0.5 * d @ A @ d, rel=1e-12)
        np.testing.assert_allclose(t.grad(x), A @ d, rtol=1e-12)

    def test_batch_axis_vectorizes(self, rng):
        t = quadratic_target(rng.standard_normal(3), make_spd(rng, 3))
        xs = rng.standard_normal((7, 3))
        fs = t.eval(xs)
        gs = t.grad(xs)
        assert fs.shape == (7,)
        assert gs.shape == (7, 3)
        for i in range(7):
            assert fs[i] == pytest.approx(float(t.eval(xs[i])), rel=1e-12)
            np.testing.assert_allclose(gs[i], t.grad(xs[i]), rtol=1e-12)

    def test_curvature_constants_are_extreme_eigenvalues(self, rng):
        A = make_spd(rng, 5, 2.0, 9.0)
        t = quadratic_target(np.zeros(5), A)
        w = np.linalg.eigvalsh(A)
        assert t.m == pytest.approx(w[0], rel=1e-12)
        assert t.M == pytest.approx(w[-1], rel=1e-12)
        assert t.kappa == pytest.approx(w[-1] / w[0], rel=1e-12)

    def test_rejects_asymmetric_precision(self):
        with pytest.raises(ValueError, match="symmetric"):
            quadratic_target(np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_rejects_indefinite_precision(self):
        with pytest.raises(ValueError, match="positive definite"):
            quadratic_target(np.zeros(2), np.diag([1.0, -0.5]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            QuadraticSpec(np.zeros(3), np.eye(2))


class TestLogistic:
    @pytest.fixture
    def data(self):
        r = philox(7)
        X = r.standard_normal((20, 3)) / 2.0
        y = (r.uniform(size=20) < 0.5).astype(float)
        return X, y

    def test_gradient_matches_finite_differences(self, data):
        X, y = data
        t = logistic_target(X, y, ridge=0.7)
        theta = philox(8).standard_normal(3) / 2.0
        g = t.grad(theta)
        eps = 1e-6
        for j in range(3):
            e = np.zeros(3)
            e[j] = eps
            num = (float(t.eval(theta + e)) - float(t.eval(theta - e))) / (2.0 * eps)
            assert g[j] == pytest.approx(num, rel=1e-5, abs=1e-7)

    def test_curvature_constants(self, data):
        X, y = data
        ridge = 0.3
        t = logistic_target(X, y, ridge)
        assert t.m == ridge
        top = float(np.linalg.eigvalsh(X.T @ X)[-1])
        assert t.M == pytest.approx(ridge + top / 4.0, rel=1e-12)

    def test_full_batch_subsample_equals_gradient(self, data):
        X, y = data
        t = logistic_target(X, y, ridge=0.5)
        theta = philox(9).standard_normal(3)
        idx = philox(10).permutation(len(y))
        full = t.parts.obs_grad(theta, idx).sum(axis=0) + t.parts.common_grad(theta)
        np.testing.assert_allclose(full, t.grad(theta), rtol=1e-10)

    def test_rejects_bad_labels(self, data):
        X, y = data
        y = y.copy()
        y[3] = 2.0
        with pytest.raises(ValueError, match=r"y\[3\]"):
            logistic_target(X, y, ridge=1.0)

    def test_rejects_nonpositive_ridge(self, data):
        X, y = data
        with pytest.raises(ValueError, match="ridge"):
            logistic_target(X, y, ridge=0.0)

    def test_rejects_mismatched_shapes(self, data):
        X, y = data
        with pytest.raises(ValueError, match="shape"):
            logistic_target(X, y[:-1], ridge=1.0)


class TestCustomAndTemper:
    def test_custom_target_lifts_scalar_callables(self):
        t = custom_target(
            2,
            1.0,
            1.0,
            eval=lambda x: 0.5 * float(x @ x),
            grad=lambda x: np.asarray(x, dtype=float),
            vectorized=False,
        )
        xs = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_allclose(t.eval(xs), [2.5, 12.5])
        np.testing.assert_allclose(t.grad(xs), xs)

    def test_rejects_bad_constants(self):
        with pytest.raises(ValueError, match="0 < m <= M"):
            custom_target(1, 2.0, 1.0, eval=lambda x: x, grad=lambda x: x)
        with pytest.raises(ValueError, match="0 < m <= M"):
            custom_target(1, 0.0, 1.0, eval=lambda x: x, grad=lambda x: x)

    def test_temper_scales_everything(self, rng):
        A = make_spd(rng, 3)
        t = quadratic_target(rng.standard_normal(3), A)
        s = temper(t, 4.0)
        x = rng.standard_normal(3)
        assert s.m == pytest.approx(t.m / 4.0, rel=1e-12)
        assert s.M == pytest.approx(t.M / 4.0, rel=1e-12)
        assert float(s.eval(x)) == pytest.approx(float(t.eval(x)) / 4.0, rel=1e-12)
        np.testing.assert_allclose(s.grad(x), t.grad(x) / 4.0, rtol=1e-12)
        np.testing.assert_allclose(s.oracle_meta.precision, A / 4.0, rtol=1e-12)
        assert s.temperature == 4.0

    def test_temper_composes_multiplicatively(self, rng):
        t = quadratic_target(np.zeros(2), make_spd(rng, 2))
        s = temper(temper(t, 2.0), 3.0)
        assert s.temperature == 6.0
        assert s.m == pytest.approx(t.m / 6.0, rel=1e-12)

    def test_temper_rejects_nonpositive_tau(self, rng):
        t = quadratic_target(np.zeros(2), make_spd(rng, 2))
        with pytest.raises(ValueError, match="tau"):
            temper(t, 0.0)

    def test_temper_preserves_sum_structure(self):
        r = philox(11)
        X = r.standard_normal((10, 2))
        y = (r.uniform(size=10) < 0.5).astype(float)
        t = logistic_target(X, y, ridge=1.0)
        s = temper(t, 2.0)
        theta = np.array([0.3, -0.2])
        idx = np.arange(10)
        np.testing.assert_allclose(
            s.parts.obs_grad(theta, idx), t.parts.obs_grad(theta, idx) / 2.0, rtol=1e-12
        )


class TestSerialization:
    def test_quadratic_round_trip(self, tmp_path, rng):
        A = make_spd(rng, 2)
        payload = {"type": "quadratic", "mean": [1.0, -2.0], "precision": A.tolist()}
        path = tmp_path / "quad.json"
        path.write_text(json.dumps(payload))
        t = load_target(path)
        assert t.dim == 2
        np.testing.assert_allclose(t.oracle_meta.mean, [1.0, -2.0])

    def test_logistic_from_dict(self):
        r = philox(12)
        X = r.standard_normal((6, 2))
        y = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0]
        t = target_from_dict({"type": "logistic", "X": X.tolist(), "y": y, "ridge": 0.5})
        assert t.dim == 2
        assert t.parts.n_obs == 6

    def test_unknown_type_names_the_type(self):
        with pytest.raises(ValueError, match="banana"):
            target_from_dict({"type": "banana"})

    def test_missing_fields_are_named(self):
        with pytest.raises(ValueError, match="precision"):
            target_from_dict({"type": "quadratic", "mean": [0.0]})


class TestCheckCurvature:
    def test_accepts_true_constants(self, rng):
        t = quadratic_target(rng.standard_normal(4), make_spd(rng, 4))
        out = check_curvature(t, trials=500, seed=3)
        assert out["pairs"] == 500
        assert out["max_lipschitz_ratio"] <= t.M * (1.0 + 1e-9)

    def test_detects_inflated_m(self, rng):
        A = make_spd(rng, 3)
        good = quadratic_target(rng.standard_normal(3), A)
        bad = custom_target(3, good.m * 1.5, good.M, eval=good.eval, grad=good.grad)
        with pytest.raises(ValueError, match="strong convexity"):
            check_curvature(bad, trials=500, seed=4)

    def test_detects_understated_lipschitz(self, rng):
        A = make_spd(rng, 3)
        good = quadratic_target(rng.standard_normal(3), A)
        bad = custom_target(3, good.m, good.m, eval=good.eval, grad=good.grad)
        with pytest.raises(ValueError, match="Lipschitz"):
            check_curvature(bad, trials=500, seed=5)


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    p=st.integers(1, 6),
    scale=st.floats(0.1, 3.0),
)
def test_quadratic_curvature_inequalities_hold(seed, p, scale):
    """Declared (m, M) of a quadratic satisfy both defining inequalities."""
    r = philox(seed, 77)
    t = quadratic_target(r.standard_normal(p), make_spd(r, p, 0.5, 8.0))
    x = scale * r.standard_normal(p)
    y = scale * r.standard_normal(p)
    dx = y - x
    lower = float(t.eval(x)) + float(t.grad(x) @ dx) + 0.5 * t.m * float(dx @ dx)
    assert float(t.eval(y)) >= lower - 1e-9 * max(1.0, abs(lower))
    lip = float(np.linalg.norm(t.grad(x) - t.grad(y)))
    assert lip <= t.M * float(np.linalg.norm(dx)) * (1.0 + 1e-9) + 1e-12
