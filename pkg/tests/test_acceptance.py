"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (the lines are printed
even under output capture) or ``python3 tests/test_acceptance.py``.
"""

import itertools
import math
import time

import numpy as np
import pytest
from oracles import brute_force_geodesics, grid_system, moment_integral_finite, saw_min_bruteforce, simple_paths

from fpplab.cli.main import main as cli_main
from fpplab.cli.records import read_jsonl
from fpplab.entropy import SLACK, ExactSystem, exact_report
from fpplab.estimators import (
    box_concentration_fit,
    kesten_decay_fit,
    lower_tail_fit,
    nonrandom_fluctuation_fit,
    shape_deviation,
    z_moment_report,
)
from fpplab.lattice import Edge, Window, local_box
from fpplab.passage import (
    ball,
    dijkstra,
    exact_passage_time,
    geodesic_dag,
    geodesics_to,
    min_saw_time,
    pivotal_edges,
    resample_region,
    restricted_sum,
)
from fpplab.rng import generator
from fpplab.weights import ArrayField, Distribution, WeightField, moment_finite, validate_assumptions

EXP = Distribution.exponential(1.0)
ATOM = Distribution.atom_mixture(0.3, 1.0)
N_FIELDS = 100


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'} | {detail}")
        assert ok, detail

    return emit


# 1 -------------------------------------------------------------------------------


def test_criterion_1_exact_inequalities(report):
    two = Distribution.finite_discrete([1.0, 2.0], [0.4, 0.6])
    three = Distribution.finite_discrete([0.0, 1.0, 2.0], [0.2, 0.5, 0.3])
    systems = {
        "1-edge two-point": ExactSystem.line(1, two),
        "1-edge three-point": ExactSystem.line(1, three),
        "2x2 two-point": ExactSystem.grid(2, two),
        "2x2 three-point": ExactSystem.grid(2, three),
        "3x3 two-point": ExactSystem.grid(3, two),
        "3x3 three-point": ExactSystem.grid(3, three),
    }
    start = time.perf_counter()
    bad, worst = [], math.inf
    for name, system in systems.items():
        for r in exact_report(system, n_random_w=50):
            if not r.passed:
                bad.append((name, r.lam, r.flags))
            worst = min(worst, r.tensorization.slack_edges, r.tensorization.slack_boxes, *(b.margin for b in r.blm), r.association.rhs - r.association.lhs)
    elapsed = time.perf_counter() - start
    ok = not bad and worst >= -SLACK and elapsed < 60
    report(1, ok, f"{len(systems)} systems x 4 lambdas, worst slack {worst:.3e}, {elapsed:.1f}s, failures {bad}")


# 2 -------------------------------------------------------------------------------


def _pathwise_triangle():
    fails = 0
    for seed in range(N_FIELDS):
        rng = generator(seed)
        f = WeightField(EXP, seed)
        x, y = (tuple(int(v) for v in rng.integers(-6, 7, 2)) for _ in range(2))
        t0y = exact_passage_time(f, y).value
        t0x = exact_passage_time(f, x).value
        txy = exact_passage_time(f, y, source=x).value
        fails += not t0y <= t0x + txy + 1e-12
    return fails


def _pathwise_sandwich():
    (bc,) = box_concentration_fit(EXP, (8,), 0.2, N_FIELDS, master_seed=2)
    return N_FIELDS - bc.sandwich_ok + bc.n_uncertified


def _pathwise_resampling():
    """Resample a local box 10 times per field; check both pathwise facts."""
    x = (4, 2)
    diff_fail = new_fail = premise = reverse_fail = 0
    for seed in range(N_FIELDS):
        f = WeightField(EXP, seed)
        res, dag = geodesics_to(f, x)
        T = res.value
        piv = pivotal_edges(dag)
        rng = generator(10_000 + seed)
        for _ in range(10):
            box = local_box((int(rng.integers(-1, 6)), int(rng.integers(-1, 4))))
            g = resample_region(f, box, rng)
            Ti = exact_passage_time(g, x).value
            tol = 1e-12 * max(1.0, T)
            if not piv & set(box.edges):
                premise += 1
                diff_fail += Ti > T + tol
                reverse_fail += Ti < T - tol
            new_fail += max(Ti - T, 0.0) > restricted_sum(g, box) + tol
    return diff_fail, new_fail, premise, reverse_fail


def _pathwise_balls():
    fails = 0
    for seed in range(N_FIELDS):
        pf = dijkstra(WeightField(EXP, seed), (0, 0), Window((0, 0), 16))
        balls = [ball(pf, t) for t in (0.5, 1.0, 2.0, 3.0)]
        fails += not all(a.issubset(b) for a, b in zip(balls, balls[1:]))
    return fails


def test_criterion_2_pathwise(report):
    tri = _pathwise_triangle()
    sandwich = _pathwise_sandwich()
    diff_fail, new_fail, premise, reverse = _pathwise_resampling()
    balls = _pathwise_balls()
    ok = tri == 0 and sandwich == 0 and diff_fail == 0 and new_fail == 0 and balls == 0 and premise > 0
    report(
        2,
        ok,
        f"{N_FIELDS} fields each: triangle fails {tri}, sandwich fails {sandwich}, "
        f"difference T_i <= T fails {diff_fail}/{premise} (literal T_i >= T fails {reverse}), "
        f"new fails {new_fail}/{10 * N_FIELDS}, ball nesting fails {balls}",
    )


# 3 -------------------------------------------------------------------------------


def _array_field(edges, weights):
    return ArrayField({Edge(a, b): float(w) for (a, b), w in zip(edges, weights)})


def test_criterion_3_oracles(report):
    win = Window((1, 1), 1)
    dij_fail = n_dij = 0
    for side in (2, 3):
        sites, edges = grid_system(side)
        paths = {t: simple_paths(edges, (0, 0), t) for t in sites}
        for conf in itertools.product([1.0, 2.5], repeat=len(edges)):
            pf = dijkstra(_array_field(edges, conf), (0, 0), win)
            for t in sites:
                best = 0.0 if t == (0, 0) else min(sum(conf[j] for j in p) for p in paths[t])
                dij_fail += abs(pf.at(t) - best) > 1e-12
                n_dij += 1
    sites, edges = grid_system(3)
    rng = generator(33)
    piv_fail = 0
    for _ in range(60):
        w = rng.choice([0.0, 1.0, 2.0], size=len(edges), p=[0.25, 0.45, 0.3])
        _, _, piv = brute_force_geodesics(edges, w, (0, 0), (2, 2))
        f = _array_field(edges, w)
        dag = geodesic_dag(dijkstra(f, (0, 0), win), dijkstra(f, (2, 2), win))
        piv_fail += {(e.u, e.v) for e in pivotal_edges(dag)} != {edges[j] for j in piv}
    saw_fail = 0
    law = Distribution.finite_discrete([0.0, 1.0, 2.0, 5.0], [0.2, 0.3, 0.3, 0.2])
    for seed in range(10):
        f = WeightField(law, seed)
        for m in range(1, 7):
            saw_fail += min_saw_time(f, m) != saw_min_bruteforce(lambda a, b: f.weight_at(Edge(a, b)), m)
    ok = dij_fail == piv_fail == saw_fail == 0
    report(3, ok, f"dijkstra mismatches {dij_fail}/{n_dij}, pivotal mismatches {piv_fail}/60, SAW mismatches {saw_fail}/60")


# 4 -------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_4_lower_tail(report):
    start = time.perf_counter()
    tf = lower_tail_fit(ATOM, (50, 0), 10_000, workers=1)
    elapsed = time.perf_counter() - start
    fit = tf.fit
    ok = fit is not None and fit.slope < 0 and fit.slope_ci[1] < 0 and elapsed < 600
    detail = "no fit" if fit is None else f"slope {fit.slope:.4f} CI ({fit.slope_ci[0]:.4f}, {fit.slope_ci[1]:.4f}), R2 {fit.r2:.3f}"
    report(4, ok, f"{detail}, {elapsed:.1f}s single-threaded")


# 5 -------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_5_fluctuation(report):
    ff = nonrandom_fluctuation_fit(EXP, (1, 0), (8, 16, 32, 64, 128), 2000, master_seed=0, workers=4)
    fit = ff.fit
    ok = fit is not None and ff.sublinear
    detail = "degenerate" if fit is None else f"a = {fit.slope:.3f} CI ({fit.slope_ci[0]:.3f}, {fit.slope_ci[1]:.3f}), reference 0.5"
    report(5, ok, f"{detail}, mu_upper {ff.mu_hat:.4f}, gaps {np.round(ff.gaps, 3).tolist()}")


# 6 -------------------------------------------------------------------------------


def test_criterion_6_shape_constant(report):
    series = shape_deviation(Distribution.constant(1.0), (10.0, 20.0, 40.0), 8, 1)
    ok = all(s.outer_excess <= 2 / s.t and s.inner_deficit <= 2 / s.t and s.n_excluded == 0 for s in series)
    report(6, ok, ", ".join(f"t={s.t:g}: excess {s.outer_excess:.4f} deficit {s.inner_deficit:.4f} (bound {2 / s.t:.4f})" for s in series))


# 7 -------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_7_kesten(report):
    kf = kesten_decay_fit(ATOM, 0.2, (4, 6, 8, 10), 5000)
    fit = kf.fit
    ok = fit is not None and fit.slope_ci[1] < 0
    detail = "no fit" if fit is None else f"slope {fit.slope:.4f} CI ({fit.slope_ci[0]:.4f}, {fit.slope_ci[1]:.4f})"
    report(7, ok, f"P(A_m) = {kf.probs}, {detail}")


# 8 -------------------------------------------------------------------------------


def test_criterion_8_moments(report):
    mismatches = []
    for alpha, k, beta in itertools.product((0.5, 1.0, 1.5, 2.0), (2, 4), (1.0, 2.0, 3.0)):
        d = Distribution.pareto(alpha)
        oracle = moment_integral_finite(d.survival, k, beta)
        if moment_finite(d, k, beta) != oracle:
            mismatches.append(("moment_finite", alpha, k, beta))
        if k == 4 and (beta < z_moment_report(d, 2).z_order) != oracle:
            mismatches.append(("z_moment_report", alpha, k, beta))
    rule = []
    for dim in (2, 3, 4):
        edge = 2 / dim
        for alpha in (0.5 * edge, edge, 1.001 * edge, 2 * edge):
            a1 = validate_assumptions(Distribution.pareto(alpha), dim).a1_holds
            if a1 != (alpha > edge):
                rule.append((dim, alpha, a1))
    ok = not mismatches and not rule
    report(8, ok, f"24 (alpha,k,beta) cells, mismatches {mismatches}; pareto (A1) rule violations {rule}")


# 9 -------------------------------------------------------------------------------

CONFIGS = {
    "tau-sample": """
[experiment]
name = tau-sample
d = 2
master_seed = 3
samples = 40
[distribution]
kind = exponential
rate = 1.0
[grid]
n = 4,8
[params]
direction = 1,1
""",
    "kesten": """
[experiment]
name = kesten
d = 2
master_seed = 5
samples = 200
[distribution]
kind = atom-mixture
p0 = 0.3
value = 1.0
[grid]
m = 4,5,6,7
[params]
a = 0.1
""",
    "entropy-exact": """
[experiment]
name = entropy-exact
d = 2
[distribution]
kind = finite-discrete
values = 1.0,2.0
probs = 0.4,0.6
[params]
system = grid:2
""",
}


def test_criterion_9_determinism(report, tmp_path, monkeypatch):
    diffs = []
    for name, text in CONFIGS.items():
        cfg = tmp_path / f"{name}.ini"
        cfg.write_text(text)
        payloads = []
        for workers in ("1", "4"):
            monkeypatch.setenv("FPP_WORKERS", workers)
            out = tmp_path / f"{name}-{workers}.jsonl"
            assert cli_main(["run", str(cfg), "-o", str(out)]) == 0
            payloads.append([r.payload_json() for r in read_jsonl(out)])
        if payloads[0] != payloads[1] or not payloads[0]:
            diffs.append(name)
    report(9, not diffs, f"experiments {list(CONFIGS)} with FPP_WORKERS 1 vs 4, differing: {diffs}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
