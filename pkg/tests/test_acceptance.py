"""Acceptance gate: one test per release criterion, each printing a
PASS line with its measured runtime (run with -s to see them live)."""
import time

import numpy as np
import pytest

from mdskit.baselines import GdParams, gradient_descent, spectral_embed
from mdskit.bench import run_bench
from mdskit.csp import brute_force_csp, greedy_csp, random_instance
from mdskit.graphs import (
    Graph,
    apsp,
    clique_path_integer_layout,
    gen_clique_path,
)
from mdskit.hardness import (
    GadgetParams,
    SatInstance,
    build_reduction_graph,
    gap_probe,
    regularity_failures,
    regularize,
)
from mdskit.nets import build_net, snap
from mdskit.scheme import SchemeParams, kk_scheme, net_restricted_optimum, payoff_bound
from mdskit.stress import stress, stress_gradient
from mdskit.structural import clique_metric, clique_optimal, energy_lower_bound

from conftest import assert_energy_bound
from test_hardness import reconstruct_forbidden_pairs
from test_stress import finite_difference_gradient


class _Timer:
    def __init__(self, number, limit, description):
        self.number = number
        self.limit = limit
        self.description = description

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if exc_type is None else "FAIL"
        print(f"ACCEPTANCE {self.number} [{self.description}]: {status} ({elapsed:.1f}s)")
        if exc_type is None:
            assert elapsed < self.limit, (
                f"criterion {self.number} exceeded its {self.limit}s budget: {elapsed:.1f}s"
            )


def random_connected_graph(n, rng):
    edges = [(i, int(rng.integers(0, i))) for i in range(1, n)]
    extra = rng.random((n, n)) < 0.25
    edges += [(i, j) for i in range(n) for j in range(i + 1, n) if extra[i, j]]
    return Graph.from_edges(n, edges)


def test_criterion_1_clique_closed_form():
    with _Timer(1, 5.0, "clique closed form, n=2..200"):
        for n in range(2, 201):
            layout, energy = clique_optimal(n)
            assert energy == (n - 1) * (n - 2) / 6
            assert abs(stress(layout, clique_metric(n)) - energy) < 1e-9


def test_criterion_2_gradient_matches_finite_differences():
    with _Timer(2, 10.0, "analytic gradient vs central differences"):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for trial in range(100):
            n = int(rng.integers(3, 21))
            r = int(rng.integers(1, 4))
            d = apsp(random_connected_graph(n, rng))
            x = rng.standard_normal((n, r)) * (1.0 + rng.random())
            analytic = stress_gradient(x, d)
            numeric = finite_difference_gradient(x, d, h=1e-5)
            scale = max(np.abs(numeric).max(), 1.0)
            worst = max(worst, np.abs(analytic - numeric).max() / scale)
        assert worst < 1e-6, f"max relative gradient error {worst}"


def test_criterion_3_discretization_bound():
    with _Timer(3, 5.0, "snap stress increase <= 4*eps*R*n^2"):
        rng = np.random.default_rng(3)
        R = 1.0
        for trial in range(50):
            eps = 0.1 if trial % 2 == 0 else 0.2
            net = build_net(R, eps, 2)
            n = int(rng.integers(2, 21))
            d = apsp(random_connected_graph(n, rng))
            x = rng.standard_normal((n, 2))
            x *= R / max(np.linalg.norm(x, axis=1).max(), 1e-9) * rng.random()
            increase = stress(snap(x, net), d) - stress(x, d)
            assert increase <= 4 * eps * R * n**2 + 1e-9


def test_criterion_4_greedy_exact_at_full_prefix():
    with _Timer(4, 30.0, "greedy with t0=n equals brute force"):
        rng = np.random.default_rng(4)
        for trial in range(50):
            n = int(rng.integers(2, 9))
            sigma = int(rng.integers(2, 4))
            inst = random_instance(n, sigma, seed=1000 + trial)
            _, v_greedy = greedy_csp(inst, t0=n, seed=trial)
            _, v_opt = brute_force_csp(inst)
            assert v_greedy == pytest.approx(v_opt, rel=1e-12, abs=1e-12)


def test_criterion_5_scheme_vs_net_exhaustive_oracle():
    with _Timer(5, 60.0, "scheme within additive slack of net optimum"):
        rng = np.random.default_rng(5)
        R = 1.5
        M = payoff_bound(R)
        for trial in range(20):
            n = int(rng.integers(2, 6))
            d = apsp(random_connected_graph(n, rng))
            eps1 = 0.6 if trial % 2 == 0 else 0.75
            net = build_net(R, eps1, 1)
            assert net.size <= 5
            _, opt = net_restricted_optimum(d, net)
            stresses = []
            for seed in range(20):
                layout = kk_scheme(d, SchemeParams(r=1, R=R, eps1=eps1, t0=min(2, n), seed=seed))
                stresses.append(stress(layout, d))
            assert np.mean(stresses) <= opt + 0.25 * M * n**2


def test_criterion_6_structural_lower_bound_hook():
    with _Timer(6, 120.0, "universal lower bound on every method's output"):
        produced = []

        # low-diameter gadget graph, r=1: D=2 needs n >= 40
        inst = SatInstance(num_vars=2, clauses=((1, 2), (-1, -2)))
        gadget = build_reduction_graph(inst, GadgetParams(Nv=24, Nt=4, Nc=2))
        d_gadget = gadget.metric
        assert d_gadget.diameter == 2 and gadget.n >= 40
        assert energy_lower_bound(gadget.n, 2, 1) is not None

        layout = kk_scheme(d_gadget, SchemeParams(r=1, R=2.5, eps1=0.5, t0=2, seed=0))
        produced.append((stress(layout, d_gadget), gadget.n, 2, 1))
        gd_layout, _ = gradient_descent(d_gadget, 1, GdParams(lr=0.002, steps=300, seed=0))
        produced.append((stress(gd_layout, d_gadget), gadget.n, 2, 1))
        spec_layout = spectral_embed(gadget.graph, 1)
        produced.append((stress(spec_layout, d_gadget), gadget.n, 2, 1))

        # complete graph, r=1: D=1 needs n >= 20
        d_k = clique_metric(40)
        produced.append((clique_optimal(40)[1], 40, 1, 1))
        gd_k, _ = gradient_descent(d_k, 1, GdParams(lr=0.002, steps=300, seed=1))
        produced.append((stress(gd_k, d_k), 40, 1, 1))

        # r=2 needs n >= 200 for D=1
        d_k2 = clique_metric(200)
        gd_k2, _ = gradient_descent(d_k2, 2, GdParams(lr=0.002, steps=100, seed=2))
        produced.append((stress(gd_k2, d_k2), 200, 1, 2))

        for value, n, diameter, r in produced:
            assert_energy_bound(value, n, diameter, r)
        # the embedding entry points also self-check (InvariantViolation
        # on violation), so any suite-produced layout is covered


def test_criterion_7_clique_path_value():
    with _Timer(7, 1.0, "clique-path integer layout value"):
        d = apsp(gen_clique_path(2, 4))
        x = clique_path_integer_layout(2, 4)
        n, cliques = d.n, 2
        assert stress(x, d) == 12.0 == (n / 2) * (n / cliques - 1)


def test_criterion_8_davis_reproduction(tmp_path):
    with _Timer(8, 300.0, "Davis bench best-of-10 stress targets"):
        results = {r.method: r for r in run_bench("davis", seed=0, trials=10, out_dir=tmp_path)}
        grad_best = results["grad"].best_norm_stress
        combo_best = results["greedy+grad"].best_norm_stress
        print(f"  grad best {grad_best:.4f} (target <= 0.055), "
              f"greedy+grad best {combo_best:.4f} (target <= 0.052)")
        assert grad_best <= 0.055
        assert combo_best <= 0.052
        assert (tmp_path / "results.csv").exists()


def test_criterion_9_gadget_invariants():
    with _Timer(9, 30.0, "gadget invariants on 10 regularized instances"):
        rng = np.random.default_rng(9)
        micro = GadgetParams(Nv=16, Nt=4, Nc=2)
        for trial in range(10):
            num_vars = int(rng.integers(1, 3))
            clauses = []
            for _ in range(int(rng.integers(1, 3))):
                size = int(rng.integers(1, 4))
                lits = [
                    int(rng.integers(1, num_vars + 1)) * (1 if rng.random() < 0.5 else -1)
                    for _ in range(size)
                ]
                clauses.append(tuple(lits))
            reg = regularize(SatInstance(num_vars=num_vars, clauses=tuple(clauses)))
            assert regularity_failures(reg) == []
            gadget = build_reduction_graph(reg, micro)
            d = apsp(gadget.graph)
            assert d.diameter == 2
            n = gadget.n
            all_pairs = {(i, j) for i in range(n) for j in range(i + 1, n)}
            assert all_pairs - gadget.graph.edges == reconstruct_forbidden_pairs(reg, micro)


def test_criterion_10_gap_probe_monotonicity():
    with _Timer(10, 120.0, "gap probe Spearman positive (exhaustive, 2 vars)"):
        inst = SatInstance(num_vars=2, clauses=((1, 2), (-1, -2)))
        report = gap_probe(inst, GadgetParams(Nv=16, Nt=4, Nc=2), trials=4)
        assert len(report.rows) == 4
        assert report.spearman is not None
        assert report.spearman > 0
        assert report.consistent is True


def test_criterion_11_spectral_cycle():
    with _Timer(11, 1.0, "spectral embedding of the 12-cycle"):
        g = Graph.from_edges(12, [(i, (i + 1) % 12) for i in range(12)])
        x = spectral_embed(g, 2)
        dists = [np.linalg.norm(x[i] - x[(i + 1) % 12]) for i in range(12)]
        assert max(dists) - min(dists) < 1e-6
