import itertools

import numpy as np
import pytest

from mdskit.csp import CspInstance, brute_force_csp, csp_value, greedy_csp, random_instance
from mdskit.exceptions import ResourceGuardError


def equality_instance(n=3, sigma=2):
    tables = {}
    for i in range(n):
        for j in range(i + 1, n):
            tables[(i, j)] = np.eye(sigma)
    return CspInstance.from_pair_tables(n, sigma, tables, M=1.0)


def zero_instance(n=3, sigma=2):
    return CspInstance(n=n, sigma=sigma, tables=np.zeros((n, n, sigma, sigma)), M=1.0)


def value_by_double_loop(inst, a):
    # second, independent accumulation of the pair sum
    total = 0.0
    for j in range(inst.n):
        for i in range(j):
            total += inst.tables[i, j, a[i], a[j]]
    return total


class TestCspValue:
    def test_zero_instance(self):
        inst = zero_instance()
        for a in itertools.product(range(2), repeat=3):
            assert csp_value(inst, list(a)) == 0.0

    def test_equality_payoff_agreeing(self):
        inst = equality_instance()
        assert csp_value(inst, [0, 0, 0]) == 3.0
        assert csp_value(inst, [1, 1, 1]) == 3.0
        assert csp_value(inst, [0, 0, 1]) == 1.0

    def test_matches_double_entry_oracle(self, rng):
        inst = random_instance(5, 2, seed=11)
        for _ in range(20):
            a = rng.integers(0, 2, size=5)
            assert csp_value(inst, a) == pytest.approx(value_by_double_loop(inst, a), rel=1e-12)

    def test_out_of_range_symbol(self):
        with pytest.raises(ValueError, match="out of range"):
            csp_value(equality_instance(), [0, 0, 2])


class TestBruteForce:
    def test_equality_instance_lexicographic_tie(self):
        a, v = brute_force_csp(equality_instance())
        assert v == 3.0
        assert list(a) == [0, 0, 0]  # beats (1,1,1) lexicographically

    def test_zero_instance(self):
        a, v = brute_force_csp(zero_instance())
        assert v == 0.0
        assert list(a) == [0, 0, 0]

    def test_single_variable(self):
        inst = CspInstance(n=1, sigma=3, tables=np.zeros((1, 1, 3, 3)), M=1.0)
        a, v = brute_force_csp(inst)
        assert v == 0.0
        assert list(a) == [0]

    def test_guard(self):
        inst = CspInstance(n=30, sigma=3, tables=np.zeros((30, 30, 3, 3)), M=1.0)
        with pytest.raises(ResourceGuardError):
            brute_force_csp(inst)

    def test_matches_slow_enumeration(self):
        inst = random_instance(4, 3, seed=5)
        best_v = -np.inf
        best = None
        for a in itertools.product(range(3), repeat=4):
            v = value_by_double_loop(inst, a)
            if v > best_v:
                best_v, best = v, a
        a, v = brute_force_csp(inst)
        assert v == pytest.approx(best_v, rel=1e-12)
        assert tuple(a) == best


class TestGreedy:
    def test_full_prefix_equals_brute_force(self):
        for seed in range(5):
            inst = random_instance(5, 2, seed=seed)
            _, v_greedy = greedy_csp(inst, t0=5, seed=seed)
            _, v_opt = brute_force_csp(inst)
            assert v_greedy == pytest.approx(v_opt, rel=1e-12)

    def test_equality_instance_propagates_from_any_prefix(self):
        inst = equality_instance()
        for seed in range(10):
            _, v = greedy_csp(inst, t0=1, seed=seed)
            assert v == 3.0

    def test_zero_instance_zero_prefix(self):
        _, v = greedy_csp(zero_instance(), t0=0, seed=0)
        assert v == 0.0

    def test_never_beats_brute_force(self):
        for seed in range(10):
            inst = random_instance(6, 2, seed=100 + seed)
            _, v_opt = brute_force_csp(inst)
            for t0 in (0, 2, 4):
                _, v = greedy_csp(inst, t0=t0, seed=seed)
                assert v <= v_opt + 1e-9

    def test_deterministic_given_seed(self):
        inst = random_instance(7, 2, seed=42)
        a1, v1 = greedy_csp(inst, t0=3, seed=9)
        a2, v2 = greedy_csp(inst, t0=3, seed=9)
        assert v1 == v2
        assert np.array_equal(a1, a2)

    def test_value_consistent_with_csp_value(self):
        inst = random_instance(6, 3, seed=1)
        a, v = greedy_csp(inst, t0=2, seed=4)
        assert v == pytest.approx(csp_value(inst, a), rel=1e-12)

    def test_mean_over_seeds_additive_guarantee(self):
        # loose instantiation of the expected-value guarantee at t0=4:
        # mean greedy value >= optimum - 0.25 * M * n^2
        n, M = 8, 1.0
        gaps = []
        for inst_seed in range(5):
            inst = random_instance(n, 2, seed=200 + inst_seed, M=M)
            _, v_opt = brute_force_csp(inst)
            vals = [greedy_csp(inst, t0=4, seed=s)[1] for s in range(50)]
            gaps.append(v_opt - np.mean(vals))
        assert max(gaps) <= 0.25 * M * n**2

    def test_minimization_via_negation(self):
        inst = random_instance(5, 2, seed=77)
        neg = inst.negated()
        _, v_max_neg = brute_force_csp(neg)
        # the minimum of inst is -max of the negated instance
        worst = min(
            value_by_double_loop(inst, a) for a in itertools.product(range(2), repeat=5)
        )
        assert -v_max_neg == pytest.approx(worst, rel=1e-12)

    def test_prefix_restrictions_respected(self):
        inst = equality_instance(4, 3)
        a, _ = greedy_csp(inst, t0=2, seed=0, prefix_choices=[np.array([2])])
        rng = np.random.default_rng(0)
        first_var = rng.permutation(4)[0]
        assert a[first_var] == 2

    def test_t0_out_of_range(self):
        with pytest.raises(ValueError):
            greedy_csp(equality_instance(), t0=4, seed=0)

    def test_matches_sequential_reference(self):
        # plain-loop re-implementation of the same algorithm: shared
        # shuffled order, per-branch greedy extension, best objective
        def reference(inst, t0, seed, prefix_choices=None):
            perm = np.random.default_rng(seed).permutation(inst.n)
            choices = [list(range(inst.sigma))] * t0
            if prefix_choices is not None:
                for t, allowed in enumerate(prefix_choices):
                    choices[t] = list(allowed)
            best_val, best = -np.inf, None
            for prefix in itertools.product(*choices):
                x = {}
                for t in range(inst.n):
                    v = perm[t]
                    if t < t0:
                        x[v] = prefix[t]
                    else:
                        scores = [
                            sum(inst.tables[j, v, x[j], s] for j in x) for s in range(inst.sigma)
                        ]
                        x[v] = int(np.argmax(scores))
                val = sum(
                    inst.tables[i, j, x[i], x[j]]
                    for i in range(inst.n) for j in range(i + 1, inst.n)
                )
                if val > best_val:
                    best_val, best = val, [x[v] for v in range(inst.n)]
            return np.array(best), best_val

        for seed in range(6):
            inst = random_instance(6, 3, seed=300 + seed)
            for t0 in (0, 1, 2, 3):
                a_fast, v_fast = greedy_csp(inst, t0=t0, seed=seed)
                a_ref, v_ref = reference(inst, t0, seed)
                assert v_fast == pytest.approx(v_ref, rel=1e-12)
                assert np.array_equal(a_fast, a_ref)
        # with per-position restrictions
        inst = random_instance(5, 3, seed=400)
        restr = [np.array([1]), np.array([0, 2])]
        a_fast, v_fast = greedy_csp(inst, t0=2, seed=8, prefix_choices=restr)
        a_ref, v_ref = reference(inst, 2, 8, prefix_choices=restr)
        assert v_fast == pytest.approx(v_ref, rel=1e-12)
        assert np.array_equal(a_fast, a_ref)
