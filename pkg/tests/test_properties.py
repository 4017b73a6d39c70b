"""Property checks: diminishing returns, monotonicity, memo consistency."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from submax import (DisparityMin, FacilityLocation, FacilityLocationMI,
                    FeatureBased, GraphCut, ProbabilisticSetCover, QueryContext,
                    CrossKernel, SetCover, build_dense_kernel, kernel_from_matrix)
from conftest import random_kernel, random_points


def draw_nested_triple(rng, n):
    """X subset of Y, plus an element e outside Y."""
    e = int(rng.integers(0, n))
    others = np.setdiff1d(np.arange(n), [e])
    y_size = int(rng.integers(0, len(others) + 1))
    Y = rng.choice(others, size=y_size, replace=False)
    X = rng.choice(Y, size=int(rng.integers(0, y_size + 1)), replace=False) \
        if y_size else np.array([], dtype=int)
    return list(X), list(Y), e


def function_zoo(seed, n):
    k = random_kernel(seed, n)
    rng = np.random.default_rng(seed + 5000)
    covers = [list(rng.choice(6, size=rng.integers(0, 3), replace=False))
              for _ in range(n)]
    return {
        "fl": FacilityLocation(k),
        "gc-low": GraphCut(k, 0.3),
        "gc-high": GraphCut(k, 0.9),
        "sc": SetCover(covers, num_concepts=6),
        "psc": ProbabilisticSetCover(rng.uniform(0, 1, size=(n, 4))),
        "fb": FeatureBased(rng.uniform(0, 2, size=(n, 3)), concave="log1p"),
    }


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_submodular_flagged_functions_have_diminishing_returns(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    for name, f in function_zoo(seed, n).items():
        assert f.is_submodular, name
        X, Y, e = draw_nested_triple(rng, n)
        assert f.marginal_gain(X, e) >= f.marginal_gain(Y, e) - 1e-9, name


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_monotone_flagged_functions_never_lose_value(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    for name, f in function_zoo(seed, n).items():
        if not f.is_monotone:
            continue
        X, Y, e = draw_nested_triple(rng, n)
        assert f.marginal_gain(Y, e) >= -1e-9, name


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_memoized_gains_match_direct_evaluation(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 9))
    for name, f in function_zoo(seed, n).items():
        order = rng.permutation(n)[:int(rng.integers(1, n + 1))]
        memo = f.fresh_memo()
        for i, e in enumerate(order):
            e = int(e)
            assert f.marginal_gain_with_memo(memo, e) == pytest.approx(
                f.marginal_gain([int(x) for x in order[:i]], e), abs=1e-9), name
            f.update_memo(memo, e)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_dense_kernel_invariants(seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(int(rng.integers(2, 10)), int(rng.integers(1, 4))))
    for metric in ("euclidean", "cosine"):
        if metric == "cosine" and np.any(np.linalg.norm(pts, axis=1) == 0):
            continue
        m = build_dense_kernel(pts, metric).dense
        assert np.allclose(m, m.T)
        assert np.allclose(np.diag(m), 1.0)
        assert m.min() >= 0.0 and m.max() <= 1.0 + 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_query_relevance_mi_is_monotone_submodular(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 8))
    k = random_kernel(seed, n)
    vals = rng.uniform(0, 1, size=(n, 2))
    f = FacilityLocationMI(k, QueryContext(cross=CrossKernel(n, 2, vals)))
    assert f.is_submodular and f.is_monotone
    X, Y, e = draw_nested_triple(rng, n)
    assert f.marginal_gain(X, e) >= f.marginal_gain(Y, e) - 1e-9
    assert f.marginal_gain(Y, e) >= -1e-9


def test_disparity_min_breaks_diminishing_returns():
    """Witness triple where the larger context has the larger gain."""
    S = np.array([[1.0, 0.1, 0.7, 0.65],
                  [0.1, 1.0, 0.1, 0.65],
                  [0.7, 0.1, 1.0, 0.66],
                  [0.65, 0.65, 0.66, 1.0]])
    f = DisparityMin(kernel_from_matrix(S))
    assert not f.is_submodular
    gain_small = f.marginal_gain([0, 1], 2)
    gain_large = f.marginal_gain([0, 1, 3], 2)
    assert gain_small == pytest.approx(-0.6)
    assert gain_large == pytest.approx(-0.05)
    assert gain_small < gain_large  # diminishing returns would need >=


def test_disparity_min_breaks_monotonicity():
    S = np.array([[1.0, 0.1, 0.7], [0.1, 1.0, 0.1], [0.7, 0.1, 1.0]])
    f = DisparityMin(kernel_from_matrix(S))
    assert f.marginal_gain([0, 1], 2) < 0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_graph_cut_above_half_lambda_stays_submodular(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 8))
    f = GraphCut(random_kernel(seed, n), 0.9)
    assert f.is_submodular and not f.is_monotone
    X, Y, e = draw_nested_triple(rng, n)
    assert f.marginal_gain(X, e) >= f.marginal_gain(Y, e) - 1e-9
