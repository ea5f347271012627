import math

import numpy as np
import pytest
from oracles import moment_integral_finite
from scipy import stats

from fpplab.lattice import Edge, Window
from fpplab.rng import generator
from fpplab.weights import (
    Distribution,
    WeightField,
    min_of_copies_survival,
    moment_finite,
    moment_order,
    pc_value,
    sample,
    validate_assumptions,
)


def test_constant_sample():
    rng = generator(1)
    assert all(sample(Distribution.constant(2.5), rng) == 2.5 for _ in range(20))


def test_atom_mixture_mean():
    d = Distribution.atom_mixture(0.3, 1.0)
    x = d.sample(generator(2), 10**6)
    p = 0.7
    sigma = math.sqrt(p * (1 - p) / x.size)
    assert abs(x.mean() - p) < 3 * sigma


def test_pareto_mean():
    d = Distribution.pareto(3.0)
    x = d.sample(generator(3), 10**6)
    se = x.std() / math.sqrt(x.size)
    assert abs(x.mean() - 1.5) < 4 * se
    assert d.mean() == pytest.approx(1.5)


def test_weight_at_deterministic_and_window_free():
    f = WeightField(Distribution.exponential(), 99)
    e = Edge((3, 4), (3, 5))
    assert f.weight_at(e) == f.weight_at(e)
    for r in (6, 9, 15):
        w = Window((0, 0), r)
        W = f.window_weights(w)
        assert W[e.axis, w.index(e.u)] == f.weight_at(e)


def test_weight_field_ks():
    d = Distribution.exponential(2.0)
    f = WeightField(d, 5)
    edges = [Edge((i, j), (i + 1, j)) for i in range(0, 1000, 3) for j in range(300)]
    w = f.weights_of(edges[:100000])
    p = stats.kstest(w, "expon", args=(0, 0.5)).pvalue
    assert p > 0.01


def test_distinct_seeds_differ():
    e = Edge((0, 0), (1, 0))
    vals = {WeightField(Distribution.uniform(), s).weight_at(e) for s in range(50)}
    assert len(vals) == 50


def test_survival_nonincreasing():
    for d in (Distribution.exponential(1, p0=0.2), Distribution.pareto(1.5), Distribution.uniform(1, 3), Distribution.atom_mixture(0.4, 2.0)):
        grid = np.linspace(0, 10, 101)
        s = [d.survival(x) for x in grid]
        assert all(b <= a + 1e-15 for a, b in zip(s, s[1:]))
        assert s[0] == 1.0


def test_min_of_copies_survival_examples():
    half = Distribution.atom_mixture(0.5, 1.0)
    assert min_of_copies_survival(half, 4, 0.5) == pytest.approx(0.0625)
    assert min_of_copies_survival(Distribution.exponential(), 3, 0.0) == 1.0
    assert min_of_copies_survival(Distribution.pareto(1.0), 4, 2.0) == pytest.approx(0.0625)


def test_pareto_min_tail_empirical():
    alpha, k = 1.3, 3
    d = Distribution.pareto(alpha)
    y = d.sample(generator(8), (10**5, k)).min(axis=1)
    for lam in (2, 4, 8):
        p = lam ** (-k * alpha)
        emp = (y >= lam).mean()
        sigma = math.sqrt(p * (1 - p) / y.size)
        assert abs(emp - p) <= 3 * sigma + 1e-12


def test_moment_finite_examples():
    assert not moment_finite(Distribution.pareto(1.0), 2, 2.0)
    assert moment_finite(Distribution.pareto(1.1), 2, 2.0)
    assert moment_finite(Distribution.exponential(), 5, 10.0)
    assert moment_order(Distribution.exponential()) == math.inf


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
@pytest.mark.parametrize("k", [2, 4])
@pytest.mark.parametrize("beta", [1.0, 2.0, 3.0])
def test_moment_finite_matches_integration(alpha, k, beta):
    d = Distribution.pareto(alpha)
    assert moment_finite(d, k, beta) == moment_integral_finite(d.survival, k, beta)


def test_assumption_examples():
    r = validate_assumptions(Distribution.atom_mixture(0.6, 1.0), 2)
    assert not r.a2_holds and "(A2)" in r.diagnostic()
    assert validate_assumptions(Distribution.pareto(1.1), 2).a1_holds
    for d in (2, 3, 5):
        assert validate_assumptions(Distribution.constant(1.0), d).ok


def test_moment_orders_ordered():
    d = Distribution.pareto(0.7)
    r = validate_assumptions(d, 3)
    assert r.z_moment_order >= r.y_moment_order >= r.tail_exponent


def test_pc_values():
    assert pc_value(2).value == 0.5
    v = pc_value(3, override=0.2488)
    assert v.value == 0.2488 and v.provenance == "user"
    with pytest.raises(ValueError):
        pc_value(9)


@pytest.mark.parametrize(
    "dist",
    [
        Distribution.constant(2.0),
        Distribution.atom_mixture(0.3, 1.5),
        Distribution.finite_discrete([0.0, 1.0, 2.0], [0.2, 0.5, 0.3]),
        Distribution.uniform(0.5, 2.0),
        Distribution.exponential(1.5, p0=0.1),
        Distribution.pareto(1.6, 2.0),
    ],
)
def test_distribution_text_roundtrip(dist):
    assert Distribution.from_dict(dist.to_dict()) == dist


def test_negative_support_rejected():
    with pytest.raises(ValueError):
        Distribution.finite_discrete([-1.0, 1.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        Distribution.atom_mixture(1.0, 1.0)
