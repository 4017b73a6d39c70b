"""Literal reference evaluators and exhaustive search, for tests only.

Everything here is written as a straight transcription of the defining
formulas - python loops, ``np.linalg`` determinants, no memoization and no
shared state with the production classes - so tests can compare two
genuinely independent computations. Exhaustive enumeration provides exact
optima for approximation-ratio checks on small instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .base import SetFunction


# -- similarity-driven forms ----------------------------------------------


def reference_facility_location(rows: np.ndarray, X) -> float:
    total = 0.0
    for i in range(rows.shape[0]):
        best = 0.0
        for j in X:
            best = max(best, rows[i, j])
        total += best
    return total


def reference_graph_cut(S: np.ndarray, lam: float, X, totals_rows: np.ndarray | None = None) -> float:
    rows = totals_rows if totals_rows is not None else S
    first = 0.0
    for i in range(rows.shape[0]):
        for j in X:
            first += rows[i, j]
    penalty = 0.0
    for i in X:
        for j in X:
            penalty += S[i, j]
    return first - lam * penalty


def reference_log_determinant(S: np.ndarray, reg: float, X) -> float:
    idx = sorted(X)
    if not idx:
        return 0.0
    block = S[np.ix_(idx, idx)] + reg * np.eye(len(idx))
    sign, value = np.linalg.slogdet(block)
    if sign <= 0:
        raise ValueError("reference log-determinant: block is not positive definite")
    return float(value)


def reference_disparity_min(S: np.ndarray, X) -> float:
    idx = sorted(X)
    if len(idx) <= 1:
        return 0.0
    return min(1.0 - S[i, j] for i, j in itertools.combinations(idx, 2))


def reference_disparity_sum(S: np.ndarray, X) -> float:
    idx = sorted(X)
    return sum(1.0 - S[i, j] for i, j in itertools.combinations(idx, 2))


# -- coverage-driven forms ------------------------------------------------


def reference_set_cover(covers, weights, X) -> float:
    hit = set()
    for x in X:
        hit.update(int(u) for u in covers[x])
    return sum(weights[u] for u in hit)


def reference_prob_set_cover(P: np.ndarray, weights, X) -> float:
    total = 0.0
    for u in range(P.shape[1]):
        miss = 1.0
        for x in X:
            miss *= 1.0 - P[x, u]
        total += weights[u] * (1.0 - miss)
    return total


def reference_feature_based(F: np.ndarray, weights, g, X) -> float:
    total = 0.0
    for j in range(F.shape[1]):
        mass = sum(F[x, j] for x in X)
        total += weights[j] * float(g(np.asarray(mass)))
    return total


# -- query/private closed forms (eta, nu explicit) ------------------------


def reference_flvmi(S: np.ndarray, Cq: np.ndarray, eta: float, X) -> float:
    total = 0.0
    for i in range(S.shape[0]):
        amax = max((S[i, j] for j in X), default=0.0)
        qmax = max(Cq[i], default=0.0) if Cq.shape[1] else 0.0
        total += min(amax, eta * qmax)
    return total


def reference_flqmi(Cq: np.ndarray, eta: float, X) -> float:
    first = 0.0
    for q in range(Cq.shape[1]):
        first += max((Cq[j, q] for j in X), default=0.0)
    second = 0.0
    for i in X:
        second += max(Cq[i], default=0.0) if Cq.shape[1] else 0.0
    return first + eta * second


def reference_gcmi(Cq: np.ndarray, lam: float, eta: float, X) -> float:
    total = 0.0
    for i in X:
        for q in range(Cq.shape[1]):
            total += eta * Cq[i, q]
    return 2.0 * lam * total


def reference_com(Cq: np.ndarray, psi, eta: float, X) -> float:
    first = sum(float(psi(np.asarray(Cq[i].sum()))) for i in X)
    second = 0.0
    for q in range(Cq.shape[1]):
        second += float(psi(np.asarray(sum(Cq[i, q] for i in X))))
    return eta * first + second


def reference_flcg(S: np.ndarray, Cp: np.ndarray, nu: float, X) -> float:
    total = 0.0
    for i in range(S.shape[0]):
        amax = max((S[i, j] for j in X), default=0.0)
        pmax = max(Cp[i], default=0.0) if Cp.shape[1] else 0.0
        total += max(amax - nu * pmax, 0.0)
    return total


def reference_gccg(S: np.ndarray, Cp: np.ndarray, lam: float, nu: float, X) -> float:
    private = 0.0
    for i in X:
        for p in range(Cp.shape[1]):
            private += Cp[i, p]
    return reference_graph_cut(S, lam, X) - 2.0 * lam * nu * private


def reference_flcmi(S: np.ndarray, Cq: np.ndarray, Cp: np.ndarray,
                    eta: float, nu: float, X) -> float:
    total = 0.0
    for i in range(S.shape[0]):
        amax = max((S[i, j] for j in X), default=0.0)
        qmax = max(Cq[i], default=0.0) if Cq.shape[1] else 0.0
        pmax = max(Cp[i], default=0.0) if Cp.shape[1] else 0.0
        total += max(min(amax, eta * qmax) - nu * pmax, 0.0)
    return total


def _reg_eye(M: np.ndarray, reg: float) -> np.ndarray:
    return M + reg * np.eye(M.shape[0])


def reference_logdetmi(S: np.ndarray, Cq: np.ndarray, Sq: np.ndarray,
                       eta: float, reg: float, X) -> float:
    idx = sorted(X)
    if not idx or Cq.shape[1] == 0:
        return 0.0
    SX = _reg_eye(S[np.ix_(idx, idx)], reg)
    CX = eta * Cq[idx]
    reduced = SX - CX @ np.linalg.inv(_reg_eye(Sq, reg)) @ CX.T
    return reference_log_determinant(S, reg, idx) - float(np.linalg.slogdet(reduced)[1])


def reference_logdetcg(S: np.ndarray, Cp: np.ndarray, Sp: np.ndarray,
                       nu: float, reg: float, X) -> float:
    idx = sorted(X)
    if not idx:
        return 0.0
    SX = _reg_eye(S[np.ix_(idx, idx)], reg)
    if Cp.shape[1] == 0:
        return float(np.linalg.slogdet(SX)[1])
    CX = nu * Cp[idx]
    reduced = SX - CX @ np.linalg.inv(_reg_eye(Sp, reg)) @ CX.T
    return float(np.linalg.slogdet(reduced)[1])


def reference_logdetcmi_ratio(S: np.ndarray, Cq: np.ndarray, Cp: np.ndarray,
                              Sq: np.ndarray, Sp: np.ndarray,
                              query_private: np.ndarray, reg: float, X) -> float:
    """Determinant-ratio form of the log-det conditional mutual information.

    Valid at eta = nu = 1: log of det(I - S_P^{-1} S_PQ S_Q^{-1} S_PQ^T)
    over the same expression with P replaced by A u P.
    """
    idx = sorted(X)
    a, p, q = len(idx), Sp.shape[0], Sq.shape[0]
    if q == 0:
        return 0.0
    Sq_r = _reg_eye(Sq, reg)
    Sp_r = _reg_eye(Sp, reg)
    S_pq = query_private.T                                   # p x q
    numerator = np.eye(p) - np.linalg.inv(Sp_r) @ S_pq @ np.linalg.inv(Sq_r) @ S_pq.T
    ap = np.zeros((a + p, a + p))
    ap[:a, :a] = S[np.ix_(idx, idx)]
    ap[:a, a:] = Cp[idx]
    ap[a:, :a] = Cp[idx].T
    ap[a:, a:] = Sp
    ap_r = _reg_eye(ap, reg)
    S_apq = np.vstack([Cq[idx], S_pq])                       # (a+p) x q
    denominator = np.eye(a + p) - np.linalg.inv(ap_r) @ S_apq @ np.linalg.inv(Sq_r) @ S_apq.T
    return float(np.linalg.slogdet(numerator)[1] - np.linalg.slogdet(denominator)[1])


# -- exhaustive search ----------------------------------------------------


@dataclass
class ExhaustiveResult:
    best_subset: tuple[int, ...]
    best_value: float
    all_values: dict[tuple[int, ...], float]


def brute_force_opt(f: SetFunction, budget: int, limit: int = 2_000_000) -> ExhaustiveResult:
    """Exact optimum over all subsets of size <= budget, by direct evaluation."""
    total = sum(math.comb(f.n, k) for k in range(budget + 1))
    if total > limit:
        raise ValueError(f"instance too large for exhaustive search: "
                         f"{total} subsets exceeds the {limit} cap")
    best_subset, best_value = (), 0.0
    all_values: dict[tuple[int, ...], float] = {}
    for k in range(budget + 1):
        for combo in itertools.combinations(range(f.n), k):
            v = f.evaluate(combo)
            all_values[combo] = v
            if v > best_value:
                best_subset, best_value = combo, v
    return ExhaustiveResult(best_subset, best_value, all_values)
