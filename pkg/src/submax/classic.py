"""Similarity-, coverage-, and feature-driven set functions.

Kernel-driven: facility location, graph cut, log-determinant, and the two
dispersion scores (disparity-min / disparity-sum, which trade away
submodularity for diversity). Coverage-driven: set cover, probabilistic set
cover, and feature-based saturation. ``Clustered`` composes any of them over
a partition of the ground set.

Each class implements the memo contract of :mod:`submax.base` with the cheap
sufficient statistic for its form: per-row running maxima (FL), per-row
selected-sums (GC), an incrementally grown Cholesky factor (log-det),
covered-concept masks and products (SC/PSC), and feature accumulators (FB).
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .base import FactorizationError, MemoState, SetFunction, as_indices
from .kernels import ClusterMap, CrossKernel, SimilarityKernel

CONCAVE_CHOICES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sqrt": np.sqrt,
    "log1p": np.log1p,
    "inverse": lambda t: t / (1.0 + t),
}


def _concave(name: str) -> Callable[[np.ndarray], np.ndarray]:
    try:
        return CONCAVE_CHOICES[name]
    except KeyError:
        raise ValueError(
            f"unknown concave shape {name!r}; choose from {sorted(CONCAVE_CHOICES)}") from None


class FacilityLocation(SetFunction):
    """f(X) = sum over represented rows of the best similarity into X.

    Accepts a dense or sparse :class:`SimilarityKernel` (rows = ground set)
    or a :class:`CrossKernel` whose rows are a separate represented set and
    whose columns are the ground set.
    """

    name = "facility-location"

    def __init__(self, kernel: SimilarityKernel | CrossKernel):
        self.kernel = kernel
        if isinstance(kernel, CrossKernel):
            self.n = kernel.cols
            self._rows = kernel.values          # represented x ground
            self._csr = None
        elif kernel.mode == "dense":
            self.n = kernel.n
            self._rows = kernel.dense
            self._csr = None
        else:
            self.n = kernel.n
            self._rows = None
            self._csr = kernel.sparse

    def _value(self, idx):
        if idx.size == 0:
            return 0.0
        if self._rows is not None:
            return float(self._rows[:, idx].max(axis=1).sum())
        best = self._csr[:, idx].max(axis=1)    # implicit zeros are valid: s >= 0
        return float(best.toarray().sum())

    def _memo_data(self):
        m = self._rows.shape[0] if self._rows is not None else self.n
        return np.zeros(m)

    def _memo_gain(self, memo, e):
        best = memo.data
        if self._rows is not None:
            return float(np.maximum(self._rows[:, e] - best, 0.0).sum())
        row = self._csr.getrow(e)               # symmetric, so row e == column e
        return float(np.maximum(row.data - best[row.indices], 0.0).sum())

    def _memo_apply(self, memo, e):
        best = memo.data
        if self._rows is not None:
            np.maximum(best, self._rows[:, e], out=best)
        else:
            row = self._csr.getrow(e)
            np.maximum.at(best, row.indices, row.data)


class GraphCut(SetFunction):
    """f(X) = sum of similarities into X minus lam times X's internal mass.

    The first term sums s_ij over all (represented row i, j in X); the
    penalty sums s_ij over ordered pairs of X including i == j. Monotone
    exactly when lam <= 0.5; submodular for every lam >= 0.
    """

    name = "graph-cut"

    def __init__(self, kernel: SimilarityKernel, lam: float,
                 universe: CrossKernel | None = None):
        if not np.isfinite(lam) or lam < 0:
            raise ValueError(f"lambda must be finite and >= 0, got {lam}")
        self.kernel = kernel
        self.lam = float(lam)
        self.n = kernel.n
        self.is_monotone = self.lam <= 0.5
        if kernel.mode == "dense":
            self._dense, self._csr = kernel.dense, None
            self._diag = np.diag(self._dense).copy()
        else:
            self._dense, self._csr = None, kernel.sparse
            self._diag = self._csr.diagonal()
        if universe is not None:
            if universe.cols != self.n:
                raise ValueError("represented-set kernel columns must match the ground set")
            self._total = universe.values.sum(axis=0)
        elif self._dense is not None:
            self._total = self._dense.sum(axis=0)
        else:
            self._total = np.asarray(self._csr.sum(axis=0)).ravel()

    def _pair_column(self, e: int) -> np.ndarray:
        if self._dense is not None:
            return self._dense[:, e]
        return self._csr.getrow(e).toarray().ravel()

    def _value(self, idx):
        if idx.size == 0:
            return 0.0
        first = float(self._total[idx].sum())
        if self._dense is not None:
            internal = float(self._dense[np.ix_(idx, idx)].sum())
        else:
            internal = float(self._csr[idx][:, idx].sum())
        return first - self.lam * internal

    def _memo_data(self):
        # per-element similarity mass into the selected set
        return np.zeros(self.n)

    def _memo_gain(self, memo, e):
        within = memo.data[e]
        return float(self._total[e] - self.lam * (2.0 * within + self._diag[e]))

    def _memo_apply(self, memo, e):
        memo.data += self._pair_column(e)


class LogDeterminant(SetFunction):
    """f(X) = log det of the regularized kernel block S_X + reg I.

    Marginal gains come from a grown Cholesky factor: for every candidate j
    the memo keeps the solved column c_j and residual pivot d2_j, so a gain
    is log(d2_e) and an accepted element updates all candidates at once.
    """

    name = "log-determinant"
    is_monotone = False

    def __init__(self, kernel: SimilarityKernel, reg: float = 1e-6):
        if kernel.mode != "dense":
            raise ValueError("log-determinant requires a dense kernel")
        if not np.isfinite(reg) or reg < 0:
            raise ValueError(f"reg must be finite and >= 0, got {reg}")
        self.kernel = kernel
        self.reg = float(reg)
        self.n = kernel.n
        self._S = kernel.dense.copy()
        self._S[np.diag_indices(self.n)] += self.reg

    def _value(self, idx):
        if idx.size == 0:
            return 0.0
        return chol_logdet(self._S[np.ix_(idx, idx)], labels=idx)

    def _memo_data(self):
        return {"cols": [], "d2": np.diag(self._S).copy()}

    def _memo_gain(self, memo, e):
        d2 = memo.data["d2"][e]
        if d2 <= 0.0 or not np.isfinite(d2):
            raise FactorizationError(
                f"non-positive pivot {d2:.3e} at element {e}; "
                f"the regularized kernel is not positive definite", pivot=e)
        return float(np.log(d2))

    def _memo_apply(self, memo, e):
        cols, d2 = memo.data["cols"], memo.data["d2"]
        dot = np.zeros(self.n)
        for c in cols:
            dot += c[e] * c
        new = (self._S[:, e] - dot) / np.sqrt(d2[e])
        cols.append(new)
        d2 -= new * new


def chol_logdet(matrix: np.ndarray, labels: np.ndarray | None = None) -> float:
    """log det via a plain Cholesky loop; errors name the failing element."""
    m = matrix.shape[0]
    L = np.zeros_like(matrix, dtype=float)
    acc = 0.0
    for i in range(m):
        pivot = matrix[i, i] - float(L[i, :i] @ L[i, :i])
        if pivot <= 0.0 or not np.isfinite(pivot):
            who = int(labels[i]) if labels is not None else i
            raise FactorizationError(
                f"non-positive pivot {pivot:.3e} at element {who}; "
                f"matrix is not positive definite", pivot=who)
        L[i, i] = np.sqrt(pivot)
        if i + 1 < m:
            L[i + 1:, i] = (matrix[i + 1:, i] - L[i + 1:, :i] @ L[i, :i]) / L[i, i]
        acc += np.log(pivot)
    return float(acc)


class DisparityMin(SetFunction):
    """f(X) = smallest pairwise distance in X (0 when |X| <= 1). Not submodular."""

    name = "disparity-min"
    is_submodular = False
    is_monotone = False

    def __init__(self, kernel: SimilarityKernel):
        self.kernel = kernel
        self.n = kernel.n
        self._d = kernel.distances()

    def _value(self, idx):
        if idx.size <= 1:
            return 0.0
        block = self._d[np.ix_(idx, idx)].copy()
        np.fill_diagonal(block, np.inf)
        return float(block.min())

    def _memo_data(self):
        return {"min": None}

    def _memo_gain(self, memo, e):
        members = memo.members
        if not members:
            return 0.0
        nearest = float(self._d[sorted(members), e].min())
        cur = memo.data["min"]
        if cur is None:                          # one member so far
            return nearest
        return min(cur, nearest) - cur

    def _memo_apply(self, memo, e):
        members = memo.members
        if not members:
            return
        nearest = float(self._d[sorted(members), e].min())
        cur = memo.data["min"]
        memo.data["min"] = nearest if cur is None else min(cur, nearest)


class DisparitySum(SetFunction):
    """f(X) = sum of pairwise distances over unordered pairs. Supermodular."""

    name = "disparity-sum"
    is_submodular = False
    is_monotone = True

    def __init__(self, kernel: SimilarityKernel):
        self.kernel = kernel
        self.n = kernel.n
        self._d = kernel.distances()

    def _value(self, idx):
        if idx.size <= 1:
            return 0.0
        return float(self._d[np.ix_(idx, idx)].sum() / 2.0)

    def _memo_data(self):
        # distance mass from each element into the selected set
        return np.zeros(self.n)

    def _memo_gain(self, memo, e):
        return float(memo.data[e])

    def _memo_apply(self, memo, e):
        memo.data += self._d[:, e]


class SetCover(SetFunction):
    """Weighted count of concepts touched by at least one selected element."""

    name = "set-cover"

    def __init__(self, covers: Sequence[Sequence[int]], num_concepts: int | None = None,
                 weights: np.ndarray | None = None):
        self.covers = [np.unique(np.asarray(list(c), dtype=np.int64)) for c in covers]
        self.n = len(self.covers)
        top = max((int(c[-1]) for c in self.covers if c.size), default=-1)
        self.m = int(num_concepts) if num_concepts is not None else top + 1
        if top >= self.m:
            raise ValueError(f"concept id {top} exceeds num_concepts={self.m}")
        if any(c.size and c[0] < 0 for c in self.covers):
            raise ValueError("concept ids must be nonnegative")
        self.weights = _checked_weights(weights, self.m)

    def _value(self, idx):
        hit = np.zeros(self.m, dtype=bool)
        for x in idx:
            hit[self.covers[x]] = True
        return float(self.weights[hit].sum())

    def _memo_data(self):
        return np.zeros(self.m, dtype=bool)

    def _memo_gain(self, memo, e):
        c = self.covers[e]
        fresh = c[~memo.data[c]]
        return float(self.weights[fresh].sum())

    def _memo_apply(self, memo, e):
        memo.data[self.covers[e]] = True


class ProbabilisticSetCover(SetFunction):
    """f(X) = sum_u w_u (1 - prod_{x in X} (1 - p_xu)).

    ``probs`` is either a dense (n x m) matrix of coverage probabilities or a
    per-element list of (concept, p) pairs.
    """

    name = "probabilistic-set-cover"

    def __init__(self, probs, num_concepts: int | None = None,
                 weights: np.ndarray | None = None):
        self.P = _prob_matrix(probs, num_concepts)
        self.n, self.m = self.P.shape
        self.weights = _checked_weights(weights, self.m)

    def _value(self, idx):
        if idx.size == 0:
            return 0.0
        miss = np.prod(1.0 - self.P[idx], axis=0)
        return float(self.weights @ (1.0 - miss))

    def _memo_data(self):
        # probability that each concept is still uncovered
        return np.ones(self.m)

    def _memo_gain(self, memo, e):
        return float(self.weights @ (memo.data * self.P[e]))

    def _memo_apply(self, memo, e):
        memo.data *= 1.0 - self.P[e]


class FeatureBased(SetFunction):
    """f(X) = sum_f w_f g(accumulated feature mass), g concave with g(0)=0."""

    name = "feature-based"

    def __init__(self, features: np.ndarray, weights: np.ndarray | None = None,
                 concave: str = "sqrt"):
        F = np.asarray(features, dtype=float)
        if F.ndim != 2:
            raise ValueError("features must be a 2-D (elements x features) array")
        if not np.isfinite(F).all() or (F < 0).any():
            raise ValueError("feature scores must be finite and nonnegative")
        self.F = F
        self.n, self.m = F.shape
        self.weights = _checked_weights(weights, self.m)
        self.concave_name = concave
        self.g = _concave(concave)
        self.name = f"feature-based[{concave}]"

    def _value(self, idx):
        if idx.size == 0:
            return 0.0
        return float(self.weights @ self.g(self.F[idx].sum(axis=0)))

    def _memo_data(self):
        return np.zeros(self.m)

    def _memo_gain(self, memo, e):
        s = memo.data
        return float(self.weights @ (self.g(s + self.F[e]) - self.g(s)))

    def _memo_apply(self, memo, e):
        memo.data += self.F[e]


class Clustered(SetFunction):
    """Sum of per-cluster functions, each seeing only its own members.

    ``subfunctions[c]`` works over a local ground set 0..|cluster c|-1 whose
    order matches ascending global indices of the cluster's members.
    """

    def __init__(self, subfunctions: Sequence[SetFunction], cluster_map: ClusterMap):
        self.cluster_map = cluster_map
        self.subs = list(subfunctions)
        if len(self.subs) != cluster_map.k:
            raise ValueError(
                f"{len(self.subs)} subfunctions for {cluster_map.k} clusters")
        self.n = cluster_map.n
        self._cluster_of = cluster_map.assignments
        self._local = np.empty(self.n, dtype=np.int64)
        for c in range(cluster_map.k):
            members = cluster_map.members(c)
            if self.subs[c].n != members.size:
                raise ValueError(
                    f"subfunction {c} covers {self.subs[c].n} elements but "
                    f"cluster {c} has {members.size}")
            self._local[members] = np.arange(members.size)
        self.is_submodular = all(s.is_submodular for s in self.subs)
        self.is_monotone = all(s.is_monotone for s in self.subs)
        self.is_modular = all(s.is_modular for s in self.subs)
        inner = self.subs[0].name if self.subs else "empty"
        self.name = f"clustered({inner} x{len(self.subs)})"

    def _value(self, idx):
        total = 0.0
        for c in range(self.cluster_map.k):
            local = self._local[idx[self._cluster_of[idx] == c]]
            if local.size:
                total += self.subs[c]._value(np.sort(local))
        return total

    def _memo_data(self):
        return [s.fresh_memo() for s in self.subs]

    def _memo_gain(self, memo, e):
        c = self._cluster_of[e]
        return self.subs[c].marginal_gain_with_memo(memo.data[c], int(self._local[e]))

    def _memo_apply(self, memo, e):
        c = self._cluster_of[e]
        self.subs[c].update_memo(memo.data[c], int(self._local[e]))


def clustered_function(builder: Callable[[SimilarityKernel], SetFunction],
                       cluster_map: ClusterMap,
                       kernels: Sequence[SimilarityKernel]) -> Clustered:
    """Apply a kernel->function builder per cluster and sum the results."""
    return Clustered([builder(k) for k in kernels], cluster_map)


def _checked_weights(weights, m: int) -> np.ndarray:
    if weights is None:
        return np.ones(m)
    w = np.asarray(weights, dtype=float)
    if w.shape != (m,):
        raise ValueError(f"expected {m} weights, got shape {w.shape}")
    if not np.isfinite(w).all() or (w < 0).any():
        raise ValueError("weights must be finite and nonnegative")
    return w


def _prob_matrix(probs, num_concepts: int | None) -> np.ndarray:
    if isinstance(probs, np.ndarray) and probs.ndim == 2:
        P = np.asarray(probs, dtype=float)
        if num_concepts is not None and P.shape[1] != num_concepts:
            raise ValueError(f"probability matrix has {P.shape[1]} concepts, "
                             f"expected {num_concepts}")
    else:
        pairs = [[(int(u), float(p)) for u, p in row] for row in probs]
        top = max((u for row in pairs for u, _ in row), default=-1)
        m = int(num_concepts) if num_concepts is not None else top + 1
        if top >= m:
            raise ValueError(f"concept id {top} exceeds num_concepts={m}")
        P = np.zeros((len(pairs), m))
        for i, row in enumerate(pairs):
            for u, p in row:
                P[i, u] = p
    if ((P < 0) | (P > 1)).any() or not np.isfinite(P).all():
        raise ValueError("coverage probabilities must lie in [0, 1]")
    return P
