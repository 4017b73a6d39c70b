"""Query- and privacy-aware set functions in closed form.

Mutual-information forms reward similarity to a query set Q, conditional-gain
forms penalize similarity to a private set P, and the conditional-mutual-
information forms do both at once. Each is a set function over the ground set
alone; the external sets enter only through cross-similarity kernels held in
:class:`QueryContext` / :class:`PrivateContext`, with the trade-off scalings
eta (query relevance) and nu (privacy strictness) applied to those cross
kernels, never to the stored ground kernel.

The coverage-style variants at the bottom reduce to plain (probabilistic)
set cover with filtered concept lists or reweighted concepts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import ConditionalMutualInformation, SetFunction, FactorizationError
from .classic import (CONCAVE_CHOICES, FacilityLocation, GraphCut,
                      ProbabilisticSetCover, SetCover, _concave, chol_logdet)
from .kernels import (CrossKernel, SimilarityKernel, build_cross_kernel,
                      build_dense_kernel, validate_features)


@dataclass(frozen=True)
class QueryContext:
    """Ground-to-query similarities plus the relevance scaling eta.

    ``self_kernel`` (query x query similarities) is only needed by the
    log-determinant forms.
    """

    cross: CrossKernel
    eta: float = 1.0
    self_kernel: np.ndarray | None = None

    def __post_init__(self):
        if not np.isfinite(self.eta) or self.eta < 0:
            raise ValueError(f"eta must be finite and >= 0, got {self.eta}")
        if self.self_kernel is not None and self.self_kernel.shape != (self.size, self.size):
            raise ValueError("query self-kernel shape must match the query count")

    @property
    def size(self) -> int:
        return self.cross.cols

    def scaled(self) -> np.ndarray:
        return self.eta * self.cross.values


@dataclass(frozen=True)
class PrivateContext:
    """Ground-to-private similarities plus the privacy scaling nu."""

    cross: CrossKernel
    nu: float = 1.0
    self_kernel: np.ndarray | None = None

    def __post_init__(self):
        if not np.isfinite(self.nu) or self.nu < 0:
            raise ValueError(f"nu must be finite and >= 0, got {self.nu}")
        if self.self_kernel is not None and self.self_kernel.shape != (self.size, self.size):
            raise ValueError("private self-kernel shape must match the private count")

    @property
    def size(self) -> int:
        return self.cross.cols

    def scaled(self) -> np.ndarray:
        return self.nu * self.cross.values


def query_context(data: np.ndarray, query_data: np.ndarray, metric: str = "euclidean",
                  eta: float = 1.0, with_self_kernel: bool = False) -> QueryContext:
    cross = build_cross_kernel(data, query_data, metric)
    inner = build_dense_kernel(query_data, metric).dense if with_self_kernel else None
    return QueryContext(cross=cross, eta=eta, self_kernel=inner)


def private_context(data: np.ndarray, private_data: np.ndarray, metric: str = "euclidean",
                    nu: float = 1.0, with_self_kernel: bool = False) -> PrivateContext:
    cross = build_cross_kernel(data, private_data, metric)
    inner = build_dense_kernel(private_data, metric).dense if with_self_kernel else None
    return PrivateContext(cross=cross, nu=nu, self_kernel=inner)


def _require_dense(kernel: SimilarityKernel, who: str) -> np.ndarray:
    if kernel.mode != "dense":
        raise ValueError(f"{who} requires a dense ground kernel")
    return kernel.dense


def _check_rows(ctx, n: int, who: str) -> None:
    if ctx.cross.rows != n:
        raise ValueError(f"{who}: cross-kernel rows ({ctx.cross.rows}) must match "
                         f"the ground set ({n})")


def _col_max(values: np.ndarray) -> np.ndarray:
    """Per-row max over an (n x m) cross kernel; zeros when m == 0."""
    if values.shape[1] == 0:
        return np.zeros(values.shape[0])
    return values.max(axis=1)


class _CappedRowMax(SetFunction):
    """Shared core for the facility-location MI/CG/CMI closed forms.

    Each scores sum_i h(best similarity of row i into the selection), where
    the per-row transform h folds in the query cap and/or private floor and
    satisfies h(0) = 0. The memo is the per-row running max.
    """

    def __init__(self, kernel: SimilarityKernel):
        self._S = _require_dense(kernel, self.name)
        self.kernel = kernel
        self.n = kernel.n

    def _h(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _value(self, idx):
        if idx.size == 0:
            return 0.0
        return float(self._h(self._S[:, idx].max(axis=1)).sum())

    def _memo_data(self):
        return np.zeros(self.n)

    def _memo_gain(self, memo, e):
        cur = memo.data
        return float((self._h(np.maximum(cur, self._S[:, e])) - self._h(cur)).sum())

    def _memo_apply(self, memo, e):
        np.maximum(memo.data, self._S[:, e], out=memo.data)


class FacilityLocationMI(_CappedRowMax):
    """sum_i min(max_{j in A} s_ij, eta * max over query similarities of i)."""

    name = "facility-location-mi"

    def __init__(self, kernel: SimilarityKernel, query: QueryContext):
        super().__init__(kernel)
        _check_rows(query, self.n, self.name)
        self.query = query
        self._qcap = query.eta * _col_max(query.cross.values)

    def _h(self, t):
        return np.minimum(t, self._qcap)


class FacilityLocationCG(_CappedRowMax):
    """sum_i max(max_{j in A} s_ij - nu * best private similarity of i, 0)."""

    name = "facility-location-cg"

    def __init__(self, kernel: SimilarityKernel, private: PrivateContext):
        super().__init__(kernel)
        _check_rows(private, self.n, self.name)
        self.private = private
        self._pfloor = private.nu * _col_max(private.cross.values)

    def _h(self, t):
        return np.maximum(t - self._pfloor, 0.0)


class FacilityLocationCMI(_CappedRowMax):
    """Query-capped, private-floored row maxima: both effects at once."""

    name = "facility-location-cmi"

    def __init__(self, kernel: SimilarityKernel, query: QueryContext,
                 private: PrivateContext):
        super().__init__(kernel)
        _check_rows(query, self.n, self.name)
        _check_rows(private, self.n, self.name)
        self.query, self.private = query, private
        self._qcap = query.eta * _col_max(query.cross.values)
        self._pfloor = private.nu * _col_max(private.cross.values)

    def _h(self, t):
        return np.maximum(np.minimum(t, self._qcap) - self._pfloor, 0.0)


class FacilityLocationQueryMI(SetFunction):
    """Bipartite form needing only the ground x query kernel.

    f(A) = sum over queries of their best similarity into A, plus eta times
    the modular sum over A of each element's best query similarity.
    """

    name = "facility-location-query-mi"

    def __init__(self, query: QueryContext):
        self.query = query
        self.n = query.cross.rows
        self._C = query.cross.values
        self._row_best = query.eta * _col_max(self._C)

    def _value(self, idx):
        if idx.size == 0:
            return 0.0
        first = float(self._C[idx].max(axis=0).sum()) if self.query.size else 0.0
        return first + float(self._row_best[idx].sum())

    def _memo_data(self):
        return np.zeros(self.query.size)

    def _memo_gain(self, memo, e):
        lift = np.maximum(self._C[e] - memo.data, 0.0).sum()
        return float(lift + self._row_best[e])

    def _memo_apply(self, memo, e):
        np.maximum(memo.data, self._C[e], out=memo.data)


class GraphCutMI(SetFunction):
    """2 lam * total (eta-scaled) query similarity of the selection; modular."""

    name = "graph-cut-mi"
    is_modular = True

    def __init__(self, lam: float, query: QueryContext):
        if not np.isfinite(lam) or lam < 0:
            raise ValueError(f"lambda must be finite and >= 0, got {lam}")
        self.lam = float(lam)
        self.query = query
        self.n = query.cross.rows
        self._mass = 2.0 * self.lam * query.scaled().sum(axis=1)

    def _value(self, idx):
        return float(self._mass[idx].sum())

    def _memo_data(self):
        return None

    def _memo_gain(self, memo, e):
        return float(self._mass[e])

    def _memo_apply(self, memo, e):
        pass


class ConcaveOverModular(SetFunction):
    """eta-scaled concave row scores plus concave per-query column masses.

    f(A) = eta * sum_{i in A} psi(total query similarity of i)
         + sum_{q} psi(total similarity of A to q).
    """

    name = "concave-over-modular"

    def __init__(self, query: QueryContext, concave: str = "sqrt"):
        self.query = query
        self.n = query.cross.rows
        self.concave_name = concave
        self.psi = _concave(concave)
        self._C = query.cross.values
        self._row_term = query.eta * self.psi(self._C.sum(axis=1))
        self.name = f"concave-over-modular[{concave}]"

    def _value(self, idx):
        if idx.size == 0:
            return 0.0
        cols = float(self.psi(self._C[idx].sum(axis=0)).sum()) if self.query.size else 0.0
        return float(self._row_term[idx].sum()) + cols

    def _memo_data(self):
        return np.zeros(self.query.size)

    def _memo_gain(self, memo, e):
        s = memo.data
        return float(self._row_term[e] + (self.psi(s + self._C[e]) - self.psi(s)).sum())

    def _memo_apply(self, memo, e):
        memo.data += self._C[e]


class GraphCutCG(SetFunction):
    """Graph-cut value minus the modular private-similarity penalty.

    f(A) = f_gc(A) - 2 lam nu sum_{a in A, p in P} s_ap.
    """

    name = "graph-cut-cg"
    is_monotone = False

    def __init__(self, kernel: SimilarityKernel, lam: float, private: PrivateContext):
        self._gc = GraphCut(kernel, lam)
        _check_rows(private, kernel.n, self.name)
        self.kernel = kernel
        self.lam = self._gc.lam
        self.private = private
        self.n = kernel.n
        self._penalty = 2.0 * self.lam * private.scaled().sum(axis=1)

    def _value(self, idx):
        return self._gc._value(idx) - float(self._penalty[idx].sum())

    def _memo_data(self):
        return self._gc.fresh_memo()

    def _memo_gain(self, memo, e):
        return self._gc.marginal_gain_with_memo(memo.data, e) - float(self._penalty[e])

    def _memo_apply(self, memo, e):
        self._gc.update_memo(memo.data, e)


class _GrownCholesky:
    """Cholesky factor of a fixed matrix grown one accepted element at a time.

    Keeps, for every candidate j, the solved column against the accepted
    block and the residual pivot d2_j, so a marginal log-det gain is just
    log(d2_e).
    """

    def __init__(self, M: np.ndarray):
        self.M = M
        self.cols: list[np.ndarray] = []
        self.d2 = np.diag(M).copy()

    def gain(self, e: int) -> float:
        d2 = self.d2[e]
        if d2 <= 0.0 or not np.isfinite(d2):
            raise FactorizationError(
                f"non-positive pivot {d2:.3e} at element {e}; "
                f"matrix is not positive definite", pivot=e)
        return float(np.log(d2))

    def accept(self, e: int) -> None:
        dot = np.zeros(self.M.shape[0])
        for c in self.cols:
            dot += c[e] * c
        new = (self.M[:, e] - dot) / np.sqrt(self.d2[e])
        self.cols.append(new)
        self.d2 -= new * new


def _regularized(matrix: np.ndarray, reg: float) -> np.ndarray:
    out = np.array(matrix, dtype=float, copy=True)
    out[np.diag_indices(out.shape[0])] += reg
    return out


def _schur_reduction(S_reg: np.ndarray, cross_scaled: np.ndarray,
                     inner: np.ndarray | None, reg: float, who: str) -> np.ndarray:
    """S_reg minus cross * inner^{-1} * cross^T, with pivot-named failures."""
    if cross_scaled.shape[1] == 0:
        return S_reg.copy()
    if inner is None:
        raise ValueError(f"{who} requires the external set's self-kernel")
    inner_reg = _regularized(inner, reg)
    chol_logdet(inner_reg)  # positive-definiteness gate names the failing pivot
    solved = np.linalg.solve(inner_reg, cross_scaled.T)
    return S_reg - cross_scaled @ solved


class LogDeterminantMI(SetFunction):
    """log det(S_A) - log det((S - eta^2 C S_Q^{-1} C^T)_A), regularized."""

    name = "log-determinant-mi"

    def __init__(self, kernel: SimilarityKernel, query: QueryContext,
                 reg: float = 1e-6):
        S = _require_dense(kernel, self.name)
        _check_rows(query, kernel.n, self.name)
        self.kernel, self.query, self.reg = kernel, query, float(reg)
        self.n = kernel.n
        self._S = _regularized(S, self.reg)
        self._D = _schur_reduction(self._S, query.scaled(), query.self_kernel,
                                   self.reg, self.name)

    def _value(self, idx):
        if idx.size == 0:
            return 0.0
        block = np.ix_(idx, idx)
        return chol_logdet(self._S[block], labels=idx) - chol_logdet(self._D[block], labels=idx)

    def _memo_data(self):
        return {"full": _GrownCholesky(self._S), "reduced": _GrownCholesky(self._D)}

    def _memo_gain(self, memo, e):
        return memo.data["full"].gain(e) - memo.data["reduced"].gain(e)

    def _memo_apply(self, memo, e):
        memo.data["full"].accept(e)
        memo.data["reduced"].accept(e)


class LogDeterminantCG(SetFunction):
    """log det of the private-reduced kernel block: privacy via Schur complement."""

    name = "log-determinant-cg"
    is_monotone = False

    def __init__(self, kernel: SimilarityKernel, private: PrivateContext,
                 reg: float = 1e-6):
        S = _require_dense(kernel, self.name)
        _check_rows(private, kernel.n, self.name)
        self.kernel, self.private, self.reg = kernel, private, float(reg)
        self.n = kernel.n
        self._E = _schur_reduction(_regularized(S, self.reg), private.scaled(),
                                   private.self_kernel, self.reg, self.name)

    def _value(self, idx):
        if idx.size == 0:
            return 0.0
        return chol_logdet(self._E[np.ix_(idx, idx)], labels=idx)

    def _memo_data(self):
        return _GrownCholesky(self._E)

    def _memo_gain(self, memo, e):
        return memo.data.gain(e)

    def _memo_apply(self, memo, e):
        memo.data.accept(e)


class LogDeterminantCMI(SetFunction):
    """Conditional mutual information of the regularized log-det function.

    Evaluated by composition: condition the joint-kernel log-det on the
    private block, then take mutual information with the query block. The
    joint kernel stacks ground, query, and private points with eta/nu applied
    to the ground-to-query and ground-to-private cross blocks.
    """

    name = "log-determinant-cmi"

    def __init__(self, kernel: SimilarityKernel, query: QueryContext,
                 private: PrivateContext, query_private: np.ndarray | None = None,
                 reg: float = 1e-6):
        from .classic import LogDeterminant  # local import to avoid cycle at module load

        S = _require_dense(kernel, self.name)
        _check_rows(query, kernel.n, self.name)
        _check_rows(private, kernel.n, self.name)
        n, q, p = kernel.n, query.size, private.size
        self.kernel, self.query, self.private = kernel, query, private
        self.reg = float(reg)
        self.n = n
        if q and query.self_kernel is None:
            raise ValueError(f"{self.name} requires the query self-kernel")
        if p and private.self_kernel is None:
            raise ValueError(f"{self.name} requires the private self-kernel")
        if q and p:
            if query_private is None:
                raise ValueError(f"{self.name} requires query-to-private cross-similarities")
            if query_private.shape != (q, p):
                raise ValueError(f"query-to-private block must be {(q, p)}, "
                                 f"got {query_private.shape}")
        qp = query_private if (q and p) else np.zeros((q, p))
        joint = np.zeros((n + q + p, n + q + p))
        joint[:n, :n] = S
        joint[:n, n:n + q] = query.scaled()
        joint[n:n + q, :n] = query.scaled().T
        joint[:n, n + q:] = private.scaled()
        joint[n + q:, :n] = private.scaled().T
        joint[n:n + q, n:n + q] = query.self_kernel if q else np.zeros((0, 0))
        joint[n + q:, n + q:] = private.self_kernel if p else np.zeros((0, 0))
        joint[n:n + q, n + q:] = qp
        joint[n + q:, n:n + q] = qp.T
        base = LogDeterminant(
            SimilarityKernel(n=n + q + p, mode="dense", metric=kernel.metric, dense=joint),
            reg=self.reg)
        self._inner = ConditionalMutualInformation(
            base, np.arange(n, n + q), np.arange(n + q, n + q + p))

    def _value(self, idx):
        return self._inner._value(idx)

    def _memo_data(self):
        return self._inner.fresh_memo()

    def _memo_gain(self, memo, e):
        return self._inner.marginal_gain_with_memo(memo.data, e)

    def _memo_apply(self, memo, e):
        self._inner.update_memo(memo.data, e)


# -- coverage-style information measures ----------------------------------


def _concept_ids(concepts, m: int, who: str) -> np.ndarray:
    ids = np.unique(np.asarray(list(concepts), dtype=np.int64)) if concepts is not None \
        else np.empty(0, np.int64)
    if ids.size and (ids[0] < 0 or ids[-1] >= m):
        bad = ids[0] if ids[0] < 0 else ids[-1]
        raise ValueError(f"{who}: concept id {bad} outside 0..{m - 1}")
    return ids


def set_cover_mi(sc: SetCover, query_concepts) -> SetCover:
    """Set cover counting only concepts the query also covers."""
    qc = _concept_ids(query_concepts, sc.m, "set-cover-mi")
    out = SetCover([np.intersect1d(c, qc) for c in sc.covers], sc.m, sc.weights)
    out.name = "set-cover-mi"
    return out


def set_cover_cg(sc: SetCover, private_concepts) -> SetCover:
    """Set cover counting only concepts the private set does not cover."""
    pc = _concept_ids(private_concepts, sc.m, "set-cover-cg")
    out = SetCover([np.setdiff1d(c, pc) for c in sc.covers], sc.m, sc.weights)
    out.name = "set-cover-cg"
    return out


def set_cover_cmi(sc: SetCover, query_concepts, private_concepts) -> SetCover:
    """Concepts covered by the query and not by the private set."""
    qc = _concept_ids(query_concepts, sc.m, "set-cover-cmi")
    pc = _concept_ids(private_concepts, sc.m, "set-cover-cmi")
    keep = np.setdiff1d(qc, pc)
    out = SetCover([np.intersect1d(c, keep) for c in sc.covers], sc.m, sc.weights)
    out.name = "set-cover-cmi"
    return out


def _coverage_vector(coverage, m: int, who: str) -> np.ndarray:
    """Per-concept coverage probability; concept-id collections mean certainty."""
    arr = np.asarray(list(coverage) if not isinstance(coverage, np.ndarray) else coverage)
    if arr.size and np.issubdtype(arr.dtype, np.floating):
        if arr.shape != (m,):
            raise ValueError(f"{who}: coverage probabilities must have length {m}")
        if ((arr < 0) | (arr > 1)).any():
            raise ValueError(f"{who}: coverage probabilities must lie in [0, 1]")
        return arr.astype(float)
    out = np.zeros(m)
    out[_concept_ids(arr, m, who)] = 1.0
    return out


def prob_set_cover_mi(psc: ProbabilisticSetCover, query_coverage) -> ProbabilisticSetCover:
    """Concept weights scaled by the probability the query covers them."""
    qcov = _coverage_vector(query_coverage, psc.m, "prob-set-cover-mi")
    out = ProbabilisticSetCover(psc.P, psc.m, psc.weights * qcov)
    out.name = "prob-set-cover-mi"
    return out


def prob_set_cover_cg(psc: ProbabilisticSetCover, private_coverage) -> ProbabilisticSetCover:
    """Concept weights scaled by the probability the private set misses them."""
    pcov = _coverage_vector(private_coverage, psc.m, "prob-set-cover-cg")
    out = ProbabilisticSetCover(psc.P, psc.m, psc.weights * (1.0 - pcov))
    out.name = "prob-set-cover-cg"
    return out


def prob_set_cover_cmi(psc: ProbabilisticSetCover, query_coverage,
                       private_coverage) -> ProbabilisticSetCover:
    """Both effects: query-covered and private-missed concepts keep weight."""
    qcov = _coverage_vector(query_coverage, psc.m, "prob-set-cover-cmi")
    pcov = _coverage_vector(private_coverage, psc.m, "prob-set-cover-cmi")
    out = ProbabilisticSetCover(psc.P, psc.m, psc.weights * qcov * (1.0 - pcov))
    out.name = "prob-set-cover-cmi"
    return out
