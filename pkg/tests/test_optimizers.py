"""Greedy maximizers: selections, tie-breaks, laziness, sampling, stop flags."""

import numpy as np
import pytest

from submax import (DisparityMin, DisparitySum, FacilityLocation, GraphCut,
                    GraphCutMI, LogDeterminant, OptimizeSpec, ProbabilisticSetCover,
                    SetCover, build_cross_kernel, build_dense_kernel,
                    kernel_from_matrix, lazier_than_lazy_greedy, lazy_greedy,
                    maximize, naive_greedy, stochastic_greedy)
from submax.optimizers import _sample_size
from submax import QueryContext, CrossKernel
from conftest import random_kernel, random_points


def sample_functions(seed, n):
    """A spread of submodular functions on one random instance."""
    k = random_kernel(seed, n)
    rng = np.random.default_rng(seed + 1000)
    covers = [list(rng.choice(n, size=rng.integers(1, 4), replace=False))
              for _ in range(n)]
    probs = rng.uniform(0, 1, size=(n, 5))
    return [
        FacilityLocation(k),
        GraphCut(k, 0.4),
        GraphCut(k, 0.8),
        LogDeterminant(k, reg=1e-4),
        SetCover(covers, num_concepts=n),
        ProbabilisticSetCover(probs),
    ]


class TestSpecValidation:
    def test_budget_bounds(self, kernel3):
        fl = FacilityLocation(kernel3)
        with pytest.raises(ValueError, match="budget"):
            naive_greedy(fl, OptimizeSpec(budget=0))
        with pytest.raises(ValueError, match="exceeds"):
            naive_greedy(fl, OptimizeSpec(budget=4))

    def test_unknown_optimizer(self, kernel3):
        with pytest.raises(ValueError, match="unknown optimizer"):
            maximize(FacilityLocation(kernel3), OptimizeSpec(budget=1, optimizer="best"))

    def test_epsilon_required_and_ranged(self, kernel3):
        fl = FacilityLocation(kernel3)
        with pytest.raises(ValueError, match="epsilon"):
            stochastic_greedy(fl, OptimizeSpec(budget=1, optimizer="stochastic"))
        bad = OptimizeSpec(budget=1, optimizer="stochastic", epsilon=1.5, seed=0)
        with pytest.raises(ValueError, match="epsilon"):
            stochastic_greedy(fl, bad)


class TestNaiveGreedy:
    def test_worked_example(self, kernel3):
        res = naive_greedy(FacilityLocation(kernel3), OptimizeSpec(budget=2))
        assert res.indices == [1, 2]
        assert res.gains == pytest.approx([2.0, 0.8])
        assert res.value == pytest.approx(2.8)

    def test_full_budget_is_permutation(self):
        f = FacilityLocation(random_kernel(80, 7))
        res = naive_greedy(f, OptimizeSpec(budget=7))
        assert sorted(res.indices) == list(range(7))

    def test_modular_function_takes_top_singletons(self):
        rng = np.random.default_rng(81)
        vals = rng.uniform(0, 1, size=(12, 2))
        ctx = QueryContext(cross=CrossKernel(12, 2, vals))
        f = GraphCutMI(0.5, ctx)
        res = naive_greedy(f, OptimizeSpec(budget=4))
        top = np.argsort(-vals.sum(axis=1))[:4]
        assert sorted(res.indices) == sorted(int(i) for i in top)

    def test_ties_break_to_smallest_index(self):
        f = FacilityLocation(kernel_from_matrix(np.eye(5)))
        res = naive_greedy(f, OptimizeSpec(budget=3))
        assert res.indices == [0, 1, 2]

    def test_gains_non_increasing_for_submodular(self):
        for f in sample_functions(82, 10):
            res = naive_greedy(f, OptimizeSpec(budget=6))
            g = res.gains
            assert all(g[i] >= g[i + 1] - 1e-12 for i in range(len(g) - 1))

    def test_evaluation_count_is_exact(self):
        n, b = 9, 4
        res = naive_greedy(FacilityLocation(random_kernel(83, n)),
                           OptimizeSpec(budget=b))
        assert res.gain_evaluations == sum(n - i for i in range(b))


class TestLazyGreedy:
    def test_matches_naive_across_functions(self):
        for f in sample_functions(84, 11):
            want = naive_greedy(f, OptimizeSpec(budget=5))
            got = lazy_greedy(f, OptimizeSpec(budget=5, optimizer="lazy"))
            assert got.indices == want.indices
            assert got.gains == pytest.approx(want.gains)

    def test_fewer_evaluations_than_naive(self):
        f = FacilityLocation(random_kernel(85, 40))
        naive = naive_greedy(f, OptimizeSpec(budget=8))
        lazy = lazy_greedy(f, OptimizeSpec(budget=8, optimizer="lazy"))
        assert lazy.gain_evaluations < naive.gain_evaluations

    def test_rejects_non_submodular(self, kernel3):
        spec = OptimizeSpec(budget=2, optimizer="lazy")
        for f in (DisparityMin(kernel3), DisparitySum(kernel3)):
            with pytest.raises(ValueError, match="submodular"):
                lazy_greedy(f, spec)

    def test_accepts_non_monotone_submodular(self, kernel3):
        res = lazy_greedy(GraphCut(kernel3, 0.9),
                          OptimizeSpec(budget=2, optimizer="lazy"))
        assert len(res.indices) == 2

    def test_modular_function_needs_single_pass(self):
        rng = np.random.default_rng(86)
        vals = rng.uniform(0, 1, size=(30, 3))
        f = GraphCutMI(0.5, QueryContext(cross=CrossKernel(30, 3, vals)))
        res = lazy_greedy(f, OptimizeSpec(budget=10, optimizer="lazy"))
        assert res.gain_evaluations == 30


class TestStochasticGreedy:
    def test_sample_size_formula(self):
        assert _sample_size(500, 10, 0.1) == 116
        assert _sample_size(10, 10, 0.5) == 1
        assert _sample_size(100, 1, 0.99) == 2

    def test_full_sample_matches_naive(self):
        f = FacilityLocation(random_kernel(87, 15))
        want = naive_greedy(f, OptimizeSpec(budget=5))
        spec = OptimizeSpec(budget=5, optimizer="stochastic", epsilon=1e-12, seed=3)
        got = stochastic_greedy(f, spec)
        assert got.indices == want.indices

    def test_seed_determinism(self):
        f = FacilityLocation(random_kernel(88, 30))
        spec = OptimizeSpec(budget=6, optimizer="stochastic", epsilon=0.4, seed=11)
        a = stochastic_greedy(f, spec)
        b = stochastic_greedy(f, spec)
        assert a.indices == b.indices and a.gains == b.gains
        assert a.gain_evaluations == b.gain_evaluations

    def test_never_repeats_elements(self):
        f = FacilityLocation(random_kernel(89, 25))
        spec = OptimizeSpec(budget=25, optimizer="stochastic", epsilon=0.9, seed=5)
        res = stochastic_greedy(f, spec)
        assert sorted(res.indices) == list(range(25))

    def test_evaluation_count_bounded_by_sample(self):
        n, b, eps = 60, 12, 0.1
        f = FacilityLocation(random_kernel(90, n))
        res = stochastic_greedy(
            f, OptimizeSpec(budget=b, optimizer="stochastic", epsilon=eps, seed=1))
        assert res.gain_evaluations <= b * _sample_size(n, b, eps)


class TestLazierThanLazyGreedy:
    def test_full_sample_matches_lazy(self):
        for f in sample_functions(91, 12):
            want = lazy_greedy(f, OptimizeSpec(budget=5, optimizer="lazy"))
            got = lazier_than_lazy_greedy(
                f, OptimizeSpec(budget=5, optimizer="lazier", epsilon=1e-12, seed=0))
            assert got.indices == want.indices

    def test_seed_determinism(self):
        f = FacilityLocation(random_kernel(92, 40))
        spec = OptimizeSpec(budget=8, optimizer="lazier", epsilon=0.3, seed=21)
        a = lazier_than_lazy_greedy(f, spec)
        b = lazier_than_lazy_greedy(f, spec)
        assert a.indices == b.indices and a.gains == pytest.approx(b.gains)

    def test_rejects_non_submodular(self, kernel3):
        with pytest.raises(ValueError, match="submodular"):
            lazier_than_lazy_greedy(
                DisparitySum(kernel3),
                OptimizeSpec(budget=2, optimizer="lazier", epsilon=0.5, seed=0))

    def test_no_more_evaluations_than_stochastic(self):
        f = FacilityLocation(random_kernel(93, 60))
        kw = dict(budget=12, epsilon=0.1, seed=7)
        st = stochastic_greedy(f, OptimizeSpec(optimizer="stochastic", **kw))
        lz = lazier_than_lazy_greedy(f, OptimizeSpec(optimizer="lazier", **kw))
        assert lz.gain_evaluations <= st.gain_evaluations


class TestStopFlags:
    def build_saturating(self):
        # two elements cover every concept; the rest add nothing
        covers = [[0, 1], [2, 3], [0, 1, 2, 3], []]
        return SetCover([covers[2], covers[0], covers[1], covers[3]], 4)

    def test_zero_gain_stop(self):
        f = self.build_saturating()
        res = naive_greedy(f, OptimizeSpec(budget=4, stop_if_zero_gain=True))
        assert res.indices == [0]
        assert all(g > 0 for g in res.gains)

    def test_without_flags_runs_to_budget(self):
        f = self.build_saturating()
        res = naive_greedy(f, OptimizeSpec(budget=4))
        assert len(res.indices) == 4

    def test_negative_gain_stop(self):
        k = random_kernel(94, 8)
        f = GraphCut(k, 2.5)  # heavily penalized: gains go negative quickly
        res = naive_greedy(f, OptimizeSpec(budget=8, stop_if_negative_gain=True))
        assert all(g >= 0 for g in res.gains)
        unrestricted = naive_greedy(f, OptimizeSpec(budget=8))
        assert min(unrestricted.gains) < 0  # the instance does go negative

    def test_flags_respected_by_all_optimizers(self):
        f = self.build_saturating()
        for opt in ("naive", "lazy", "stochastic", "lazier"):
            spec = OptimizeSpec(budget=4, optimizer=opt, epsilon=1e-12, seed=0,
                                stop_if_zero_gain=True)
            res = maximize(f, spec)
            assert res.indices == [0], opt


class TestMaximizeDispatch:
    def test_routes_by_name(self):
        f = FacilityLocation(random_kernel(95, 20))
        naive = maximize(f, OptimizeSpec(budget=4, optimizer="naive"))
        lazy = maximize(f, OptimizeSpec(budget=4, optimizer="lazy"))
        assert naive.indices == lazy.indices

    def test_result_accessors(self, kernel3):
        res = maximize(FacilityLocation(kernel3), OptimizeSpec(budget=2))
        assert res.indices == [p[0] for p in res.picks]
        assert res.gains == [p[1] for p in res.picks]
        assert res.value == pytest.approx(sum(res.gains))


class TestRepresentedAndCrossSetups:
    def test_greedy_over_query_only_function(self):
        pts = random_points(96, 40, dims=2)
        qpts = random_points(97, 3, dims=2)
        from submax import FacilityLocationQueryMI, query_context
        f = FacilityLocationQueryMI(query_context(pts, qpts))
        res = lazy_greedy(f, OptimizeSpec(budget=5, optimizer="lazy"))
        assert len(res.indices) == 5
        naive = naive_greedy(f, OptimizeSpec(budget=5))
        assert res.indices == naive.indices

    def test_represented_facility_location(self):
        pts = random_points(98, 30, dims=2)
        upts = random_points(99, 10, dims=2)
        f = FacilityLocation(build_cross_kernel(upts, pts))
        res = naive_greedy(f, OptimizeSpec(budget=4))
        assert len(res.indices) == 4
        assert res.value == pytest.approx(f.evaluate(res.indices))
