import math

import numpy as np
import pytest
from scipy import stats as sps

from fpplab.estimators import (
    AssumptionError,
    box_concentration_fit,
    direction_fan,
    estimate_mu,
    kesten_decay_fit,
    lower_tail_fit,
    nonrandom_fluctuation_fit,
    norm_equivalence_report,
    passage_samples,
    ray_radii,
    shape_deviation,
    tail_fit_from_samples,
    unit_l1,
    z_moment_report,
)
from fpplab.stats import FitError, binomial_ci, mean_stderr, wls_fit
from fpplab.weights import Distribution

EXP = Distribution.exponential()
ATOM = Distribution.atom_mixture(0.3, 1.0)


# -- stats helpers -------------------------------------------------------------------


def test_wls_needs_four_points():
    with pytest.raises(FitError):
        wls_fit([1, 2, 3], [1, 2, 3])


def test_wls_exact_line():
    x = np.arange(6.0)
    f = wls_fit(x, 2.0 - 0.5 * x)
    assert f.slope == pytest.approx(-0.5, abs=1e-12)
    assert f.intercept == pytest.approx(2.0, abs=1e-12)
    assert f.r2 == pytest.approx(1.0)


def test_wls_matches_scipy_and_ci_contains_estimate():
    rng = np.random.default_rng(4)
    x = np.linspace(0, 5, 12)
    y = 1.0 + 0.3 * x + rng.normal(0, 0.2, x.size)
    f = wls_fit(x, y)
    ref = sps.linregress(x, y)
    assert f.slope == pytest.approx(ref.slope, rel=1e-10)
    half = sps.t.ppf(0.975, x.size - 2) * ref.stderr
    assert f.slope_ci == pytest.approx((ref.slope - half, ref.slope + half), rel=1e-8)
    assert f.slope_ci[0] <= f.slope <= f.slope_ci[1]


def test_binomial_ci_edges():
    lo, hi = binomial_ci(0, 100)
    assert lo == 0.0 and hi == pytest.approx(1 - 0.025 ** (1 / 100))
    lo, hi = binomial_ci(100, 100)
    assert hi == 1.0 and lo == pytest.approx(0.025 ** (1 / 100))
    lo, hi = binomial_ci(30, 100)
    assert lo < 0.3 < hi


def test_mean_stderr():
    m, se = mean_stderr([1.0, 2.0, 3.0, 4.0])
    assert m == 2.5 and se == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)


# -- time constant --------------------------------------------------------------------


@pytest.mark.parametrize("c,x", [(1.0, (1, 0)), (2.5, (1, 1)), (0.7, (2, 1, 0))])
def test_mu_constant(c, x):
    est = estimate_mu(Distribution.constant(c), x, (1, 2, 4), 3)
    norm = sum(abs(v) for v in x)
    assert all(m == pytest.approx(c * norm, abs=1e-12) for m in est.means)
    assert all(v == 0 for v in est.variances)
    assert est.mu_upper == pytest.approx(c * norm, abs=1e-12)
    assert est.certified


@pytest.fixture(scope="module")
def exp_mu():
    return estimate_mu(EXP, (1, 0), (2, 4, 8, 16), 150, master_seed=11)


def test_mu_subadditive_trend(exp_mu):
    m, s = exp_mu.means, exp_mu.stderrs
    for j in range(len(m) - 1):
        assert m[j] >= m[j + 1] - 3 * s[j + 1]
    assert exp_mu.monotone_ok
    assert exp_mu.mu_upper >= exp_mu.mu_point - 3 * exp_mu.mu_point_stderr


def test_mu_variance_decreases(exp_mu):
    v = exp_mu.variances
    assert all(b < a for a, b in zip(v, v[1:]))


def test_mu_seed_reproducible_and_seeds_agree(exp_mu):
    again = estimate_mu(EXP, (1, 0), (2, 4, 8, 16), 150, master_seed=11)
    assert np.array_equal(again.raw, exp_mu.raw)
    other = estimate_mu(EXP, (1, 0), (2, 4, 8, 16), 150, master_seed=12)
    assert not np.array_equal(other.raw, exp_mu.raw)
    z = 1.96
    a = (exp_mu.mu_point - z * exp_mu.mu_point_stderr, exp_mu.mu_point + z * exp_mu.mu_point_stderr)
    b = (other.mu_point - z * other.mu_point_stderr, other.mu_point + z * other.mu_point_stderr)
    assert a[0] <= b[1] and b[0] <= a[1]


def test_mu_worker_independence():
    a = estimate_mu(EXP, (1, 1), (2, 4), 16, master_seed=3, workers=1)
    b = estimate_mu(EXP, (1, 1), (2, 4), 16, master_seed=3, workers=2)
    assert np.array_equal(a.raw, b.raw)


def test_mu_rejects_bad_input():
    with pytest.raises(ValueError):
        estimate_mu(EXP, (1, 0), (4, 2), 10)
    with pytest.raises(AssumptionError):
        estimate_mu(Distribution.atom_mixture(0.6, 1.0), (1, 0), (1, 2), 10)


# -- fluctuation ------------------------------------------------------------------------


def test_fluctuation_constant_degenerate():
    f = nonrandom_fluctuation_fit(Distribution.constant(1.0), (1, 0), (2, 4, 8, 16, 32), 3)
    assert f.degenerate and f.fit is None
    assert all(g == 0 for g in f.gaps)
    assert f.lower_bound_ok


def test_fluctuation_uses_given_estimate(exp_mu):
    f = nonrandom_fluctuation_fit(EXP, (1, 0), (), 0, estimate=exp_mu)
    n = np.asarray(exp_mu.n_grid, dtype=float)
    assert f.gaps == pytest.approx(tuple(np.asarray(exp_mu.means) * n - n * exp_mu.mu_upper))
    assert f.lower_bound_ok


# -- lower tail -------------------------------------------------------------------------------


def test_lower_tail_deterministic():
    tf = lower_tail_fit(Distribution.constant(1.0), (6, 0), 1000, t_grid=(0.1, 0.5, 1.0, 2.0))
    assert all(p == 0 for p in tf.tail)
    assert tf.rate == math.inf


def test_lower_tail_needs_1000():
    with pytest.raises(ValueError):
        lower_tail_fit(EXP, (5, 0), 999)


def test_tail_at_zero_and_monotone():
    T, bad = passage_samples(EXP, (12, 0), 1000, master_seed=2)
    assert bad == 0
    tf = tail_fit_from_samples(T, 12, t_grid=(0.0, 0.2, 0.4, 0.6, 0.8, 1.0))
    assert 0.3 <= tf.tail[0] <= 0.7
    assert tf.monotone
    for p, (lo, hi) in zip(tf.tail, tf.ci):
        assert lo <= p <= hi


def test_tail_fit_gaussian_samples():
    # Gaussian lower tail: log P(Z <= -t) is concave in t^2 with negative slope
    T = np.random.default_rng(0).normal(100.0, 3.0, 20000)
    tf = tail_fit_from_samples(T, 9.0)
    assert tf.fit is not None and tf.rate > 0 and tf.rate_ci[0] > 0


# -- shape --------------------------------------------------------------------------------------


def test_direction_fan():
    fan = direction_fan(8)
    assert (1, 0) in fan and (1, 1) in fan and (0, 1) in fan
    assert len(fan) >= 8
    assert direction_fan(3, d=3)[-1] == (1, 1, 1)
    assert unit_l1((3, -1)) == pytest.approx([0.75, -0.25])


def test_ray_radii_square():
    # cells with max |c_i| <= 2 form the cube [-2.5, 2.5]^2
    def mask(c):
        return max(abs(v) for v in c) <= 2

    o, i = ray_radii(mask, np.array([1.0, 0.0]), 20)
    assert o == pytest.approx(2.5) and i == pytest.approx(2.5)
    o, i = ray_radii(mask, unit_l1((1, 1)), 20)
    assert o == pytest.approx(5.0) and i == pytest.approx(5.0)


@pytest.mark.parametrize("t", [10.0, 20.0])
def test_shape_constant_is_l1_ball(t):
    (sd,) = shape_deviation(Distribution.constant(1.0), (t,), 8, 1)
    assert sd.n_excluded == 0
    assert 0 <= sd.outer_excess <= 2 / t
    assert 0 <= sd.inner_deficit <= 2 / t
    assert all(r >= 0 for r in sd.outer_radii + sd.inner_radii)


def test_shape_random_definitional():
    series = shape_deviation(EXP, (6.0, 10.0), 4, 6, mu_hat={v: 0.4 for v in direction_fan(4)})
    for sd in series:
        assert sd.outer_excess >= 0 and sd.inner_deficit >= 0
        for o, i in zip(sd.outer_radii, sd.inner_radii):
            assert o >= i >= 0
        assert sd.outer_envelope > 0 and sd.inner_envelope > 0


# -- Kesten event ----------------------------------------------------------------------------------


def test_kesten_constant_never():
    kf = kesten_decay_fit(Distribution.constant(1.0), 0.5, (2, 3, 4, 5), 20)
    assert all(p == 0 for p in kf.probs)
    assert kf.degenerate and kf.used_m == ()
    assert kf.geodesic_fraction == 1.0


def test_kesten_above_support_always():
    dist = Distribution.finite_discrete([0.5, 1.0], [0.5, 0.5])
    kf = kesten_decay_fit(dist, 1.5, (2, 3, 4, 5), 20)
    assert all(p == 1 for p in kf.probs)


def test_kesten_bad_threshold():
    with pytest.raises(ValueError):
        kesten_decay_fit(EXP, 0.0, (2, 3), 5)


# -- box concentration ---------------------------------------------------------------------------


def test_box_deterministic_and_sandwich():
    (bc,) = box_concentration_fit(Distribution.constant(1.0), (6,), 0.2, 3)
    assert bc.tail == 0.0 and bc.n_uncertified == 0
    series = box_concentration_fit(EXP, (6, 8), 0.2, 15, master_seed=5)
    for bc in series:
        assert bc.sandwich_ok == bc.n_samples
        assert bc.n_uncertified == 0


def test_box_time_below_point_time():
    (bc,) = box_concentration_fit(EXP, (8,), 0.2, 12, master_seed=9, experiment="bx")
    direct, _ = passage_samples(EXP, (8, 0), 12, master_seed=9, experiment="bx-8")
    assert (bc.values <= direct + 1e-9).all()


# -- norm equivalence -----------------------------------------------------------------------------


def test_norm_equivalence_constant():
    ests = [estimate_mu(Distribution.constant(1.0), v, (1, 2), 2) for v in direction_fan(8)]
    ne = norm_equivalence_report(ests)
    assert ne.c9 == pytest.approx(1.0) and ne.ok
    assert ne.c9_range == pytest.approx((1.0, 1.0))


def test_norm_equivalence_needs_eight():
    ests = [estimate_mu(Distribution.constant(1.0), v, (1, 2), 2) for v in direction_fan(3)]
    with pytest.raises(ValueError):
        norm_equivalence_report(ests)


def test_axis_symmetry():
    a = estimate_mu(EXP, (1, 0), (4, 8, 16), 100, master_seed=1, experiment="e1")
    b = estimate_mu(EXP, (0, 1), (4, 8, 16), 100, master_seed=1, experiment="e2")
    z = 1.96
    assert abs(a.mu_point - b.mu_point) <= z * (a.mu_point_stderr + b.mu_point_stderr)


# -- Z moments --------------------------------------------------------------------------------------


def test_z_moment_examples():
    r = z_moment_report(Distribution.pareto(1.1), 2)
    assert r.z_order == pytest.approx(4.4) and not r.inner_hypothesis and not r.condition_met
    r = z_moment_report(Distribution.pareto(1.6), 2)
    assert r.inner_hypothesis and r.condition_met
    assert r.needed == 6 and r.delta_max == pytest.approx(0.4)
    r = z_moment_report(EXP, 3)
    assert r.z_order == math.inf and r.inner_hypothesis and r.condition_met


def test_kesten_decay_small_threshold():
    # with a = 0.1 and m <= 10 the event needs an all-zero path, which is subcritical
    kf = kesten_decay_fit(ATOM, 0.1, (4, 6, 8, 10), 2000)
    assert all(b < a for a, b in zip(kf.probs, kf.probs[1:]))
    assert kf.fit is not None and kf.fit.slope_ci[1] < 0
