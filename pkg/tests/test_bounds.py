import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from langevin_lab.bounds import (
    BoundInputs,
    LARGE_STEP,
    SMALL_STEP,
    baseline_bound,
    baseline_value,
    contraction_factor,
    init_w2_from_f,
    init_w2_from_mean,
    lmc_bound,
    lmc_value_small_step,
    noisy_lmc_bound,
)


class TestContractionFactor:
    def test_small_step_branch(self):
        assert contraction_factor(4.0, 5.0, 0.1) == pytest.approx(0.6, rel=1e-12)

    def test_large_step_branch(self):
        assert contraction_factor(4.0, 5.0, 0.3) == pytest.approx(0.5, rel=1e-12)

    def test_branches_meet_at_boundary(self):
        m, M = 3.0, 7.0
        h = 2.0 / (m + M)
        assert 1.0 - m * h == pytest.approx(M * h - 1.0, rel=1e-12)
        assert contraction_factor(m, M, h) == pytest.approx(1.0 - m * h, rel=1e-12)

    def test_always_below_one(self):
        for h in np.linspace(0.01, 0.39, 25):
            assert 0.0 <= contraction_factor(4.0, 5.0, float(h)) < 1.0

    def test_rejects_out_of_range_step(self):
        with pytest.raises(ValueError, match="2/M"):
            contraction_factor(4.0, 5.0, 0.4)
        with pytest.raises(ValueError, match="2/M"):
            contraction_factor(4.0, 5.0, 0.0)


class TestLmcBound:
    def test_frozen_value_at_boundary(self):
        r = lmc_bound(BoundInputs(m=4.0, M=5.0, h=2.0 / 9.0, K=10, p=1, w2_init=1.0))
        assert r.value == 1.0724452850863944
        assert r.regime == SMALL_STEP
        assert r.value == r.contraction_term + r.bias_term
        assert r.gamma == pytest.approx(1.0 - 4.0 * 2.0 / 9.0, rel=1e-12)

    def test_forced_branches_agree_at_boundary(self):
        i = BoundInputs(m=4.0, M=5.0, h=2.0 / 9.0, K=10, p=1, w2_init=1.0)
        a = lmc_bound(i, regime=SMALL_STEP).value
        b = lmc_bound(i, regime=LARGE_STEP).value
        assert a == pytest.approx(b, rel=1e-12)

    def test_regime_dispatch(self):
        lo = lmc_bound(BoundInputs(m=4.0, M=5.0, h=0.1, K=3, p=2, w2_init=1.0))
        hi = lmc_bound(BoundInputs(m=4.0, M=5.0, h=0.3, K=3, p=2, w2_init=1.0))
        assert lo.regime == SMALL_STEP
        assert hi.regime == LARGE_STEP

    def test_forcing_wrong_regime_is_rejected(self):
        i = BoundInputs(m=4.0, M=5.0, h=0.1, K=3, p=2, w2_init=1.0)
        with pytest.raises(ValueError, match="large_step"):
            lmc_bound(i, regime=LARGE_STEP)
        j = BoundInputs(m=4.0, M=5.0, h=0.3, K=3, p=2, w2_init=1.0)
        with pytest.raises(ValueError, match="small_step"):
            lmc_bound(j, regime=SMALL_STEP)
        with pytest.raises(ValueError, match="regime"):
            lmc_bound(i, regime="medium")

    def test_step_must_be_below_two_over_m(self):
        with pytest.raises(ValueError, match="2/M"):
            lmc_bound(BoundInputs(m=4.0, M=5.0, h=0.4, K=1, p=1, w2_init=1.0))

    def test_monotone_nonincreasing_in_k(self):
        vals = [
            lmc_bound(BoundInputs(m=2.0, M=6.0, h=0.1, K=k, p=3, w2_init=5.0)).value
            for k in range(0, 60, 5)
        ]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_zero_initial_distance_leaves_only_bias(self):
        r = lmc_bound(BoundInputs(m=2.0, M=6.0, h=0.1, K=0, p=3, w2_init=0.0))
        assert r.contraction_term == 0.0
        assert r.value == r.bias_term

    def test_scalar_and_array_paths_agree(self):
        m, M, K, p, w2 = 3.0, 8.0, 17, 4, 2.5
        hs = np.geomspace(1e-6, 2.0 / (m + M), 50)
        arr = lmc_value_small_step(m, M, hs, float(K), p, w2)
        for h, v in zip(hs, arr):
            got = lmc_bound(BoundInputs(m=m, M=M, h=float(h), K=K, p=p, w2_init=w2)).value
            assert got == pytest.approx(float(v), rel=1e-14)


class TestNoisyBound:
    def test_frozen_branch_values_at_boundary(self):
        i = BoundInputs(m=4.0, M=5.0, h=2.0 / 9.0, K=0, p=1, w2_init=0.0, sigma=0.0)
        assert noisy_lmc_bound(i, regime=SMALL_STEP).value == 1.5138251770487456
        assert noisy_lmc_bound(i, regime=LARGE_STEP).value == 2.03100960115899

    def test_branches_differ_at_boundary(self):
        # The two branch formulas do not meet at h = 2/(m+M): the
        # large-step bias brace 6.6*M/(2 - Mh) equals 3.3*M*(m+M)/m there,
        # not the small-step brace 3.3*M^2/m.  Dispatch uses the
        # small-step form at the boundary.
        i = BoundInputs(m=4.0, M=5.0, h=2.0 / 9.0, K=0, p=1, w2_init=0.0, sigma=0.0)
        a = noisy_lmc_bound(i, regime=SMALL_STEP).value
        b = noisy_lmc_bound(i, regime=LARGE_STEP).value
        assert abs(a - b) / a > 0.3
        assert noisy_lmc_bound(i).regime == SMALL_STEP

    def test_gamma_is_continuous_at_boundary_even_so(self):
        m, M = 4.0, 5.0
        i = BoundInputs(m=m, M=M, h=2.0 / (m + M), K=5, p=1, w2_init=1.0)
        a = noisy_lmc_bound(i, regime=SMALL_STEP)
        b = noisy_lmc_bound(i, regime=LARGE_STEP)
        assert a.gamma == pytest.approx(b.gamma, rel=1e-12)

    def test_increasing_in_sigma(self):
        vals = [
            noisy_lmc_bound(
                BoundInputs(m=2.0, M=5.0, h=0.1, K=10, p=2, w2_init=1.0, sigma=s)
            ).value
            for s in (0.0, 0.5, 1.0, 2.0, 4.0)
        ]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_infinite_bias_at_two_over_m(self):
        i = BoundInputs(m=1.0, M=5.0, h=2.0 / 5.0, K=3, p=1, w2_init=1.0, sigma=1.0)
        r = noisy_lmc_bound(i)
        assert r.regime == LARGE_STEP
        assert math.isinf(r.value)

    def test_step_beyond_two_over_m_rejected(self):
        with pytest.raises(ValueError, match="2/M"):
            noisy_lmc_bound(BoundInputs(m=1.0, M=5.0, h=0.41, K=1, p=1, w2_init=1.0))


class TestBaselineBound:
    def test_frozen_value(self):
        i = BoundInputs(m=4.0, M=5.0, h=2.0 / 9.0, K=10, p=1, w2_init=1.0)
        assert baseline_bound(i) == 2.005299661143275

    def test_only_stated_below_boundary(self):
        with pytest.raises(ValueError, match="2/\\(m\\+M\\)"):
            baseline_bound(BoundInputs(m=4.0, M=5.0, h=0.23, K=1, p=1, w2_init=1.0))

    def test_no_universal_ordering_against_additive_bound(self):
        # Counterexample: near the small-step limit the additive bound's
        # bias exceeds the squared-form bound's whenever M/m > 1.22, and
        # even at M = m the additive combination contraction + bias can
        # exceed sqrt(contraction^2*2 + bias^2).  So element-wise
        # domination fails in both directions; only the certified
        # minimal iteration counts are comparable (see planner tests).
        m = M = 2.0
        h, p = 0.001, 1
        w2 = 1.82 * (M / m) * math.sqrt(h * p)
        i = BoundInputs(m=m, M=M, h=h, K=0, p=p, w2_init=w2)
        additive = lmc_bound(i).value
        squared = baseline_bound(i)
        assert additive > squared
        # and with a large start the squared form is the looser one
        j = BoundInputs(m=4.0, M=5.0, h=2.0 / 9.0, K=10, p=1, w2_init=1.0)
        assert lmc_bound(j).value < baseline_bound(j)


class TestInitBounds:
    def test_mean_based_formula(self):
        assert init_w2_from_mean(0.0, 1, 1.0) == 1.0
        assert init_w2_from_mean(1.0, 1, 1.0) == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_f_based_frozen_example(self):
        assert init_w2_from_f(1.0, 1, 1.0, 0.0) == 2.0

    def test_f_based_tighter_floor_is_tighter(self):
        loose = init_w2_from_f(3.0, 2, 1.5, 0.0)
        tight = init_w2_from_f(3.0, 2, 1.5, 1.0)
        assert tight < loose

    def test_negative_radicand_is_rejected(self):
        with pytest.raises(ValueError, match="radicand"):
            init_w2_from_f(-3.0, 1, 1.0, 0.0)

    def test_argument_validation(self):
        with pytest.raises(ValueError, match="dist2"):
            init_w2_from_mean(-1.0, 1, 1.0)
        with pytest.raises(ValueError, match="p"):
            init_w2_from_mean(1.0, 0, 1.0)
        with pytest.raises(ValueError, match="m"):
            init_w2_from_f(1.0, 1, 0.0)


class TestBoundInputs:
    def test_validation_messages_name_the_field(self):
        with pytest.raises(ValueError, match="0 < m <= M"):
            BoundInputs(m=2.0, M=1.0, h=0.1, K=1, p=1, w2_init=1.0)
        with pytest.raises(ValueError, match="step size h"):
            BoundInputs(m=1.0, M=2.0, h=0.0, K=1, p=1, w2_init=1.0)
        with pytest.raises(ValueError, match="K"):
            BoundInputs(m=1.0, M=2.0, h=0.1, K=-1, p=1, w2_init=1.0)
        with pytest.raises(ValueError, match="p"):
            BoundInputs(m=1.0, M=2.0, h=0.1, K=1, p=0, w2_init=1.0)
        with pytest.raises(ValueError, match="w2_init"):
            BoundInputs(m=1.0, M=2.0, h=0.1, K=1, p=1, w2_init=-0.1)
        with pytest.raises(ValueError, match="sigma"):
            BoundInputs(m=1.0, M=2.0, h=0.1, K=1, p=1, w2_init=1.0, sigma=-1.0)

    def test_boundary_property(self):
        i = BoundInputs(m=4.0, M=5.0, h=0.1, K=1, p=1, w2_init=1.0)
        assert i.boundary == pytest.approx(2.0 / 9.0, rel=1e-15)


@settings(max_examples=80, deadline=None)
@given(
    m=st.floats(0.05, 10.0),
    ratio=st.floats(1.0, 25.0),
    k=st.integers(0, 2000),
    p=st.integers(1, 200),
    w2=st.floats(0.0, 100.0),
)
def test_bound_branches_agree_at_regime_boundary(m, ratio, k, p, w2):
    """At h = 2/(m+M) the two branch formulas are the same number."""
    M = m * ratio
    i = BoundInputs(m=m, M=M, h=2.0 / (m + M), K=k, p=p, w2_init=w2)
    a = lmc_bound(i, regime=SMALL_STEP).value
    b = lmc_bound(i, regime=LARGE_STEP).value
    assert a == pytest.approx(b, rel=1e-9, abs=1e-300)


@settings(max_examples=80, deadline=None)
@given(
    m=st.floats(0.05, 5.0),
    ratio=st.floats(1.0, 20.0),
    frac=st.floats(1e-6, 1.0),
    k=st.integers(0, 500),
    p=st.integers(1, 100),
    w2=st.floats(0.0, 50.0),
)
def test_baseline_scalar_matches_vectorized(m, ratio, frac, k, p, w2):
    M = m * ratio
    h = frac * 2.0 / (m + M)
    i = BoundInputs(m=m, M=M, h=h, K=k, p=p, w2_init=w2)
    assert baseline_bound(i) == float(baseline_value(m, M, h, k, p, w2))
