"""Cardinality-constrained greedy maximizers.

Four strategies over one memo-driven skeleton:

* naive - full argmax sweep each round;
* lazy - priority queue of stale upper bounds (valid under diminishing
  returns), recomputing only entries that surface;
* stochastic - argmax over a fresh random sample each round;
* lazier - the sampled search reusing persistent lazy bounds.

All four break gain ties toward the smallest element index, so the lazy
variants reproduce the naive selection element for element. Reported
``gain_evaluations`` counts marginal-gain probes (the per-accept memo update
is bookkeeping and is not counted), making efficiency comparisons
hardware-independent.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .base import SetFunction

OPTIMIZERS = ("naive", "lazy", "stochastic", "lazier")
_SAMPLING = ("stochastic", "lazier")


@dataclass
class OptimizeSpec:
    """Budget, strategy, and stopping/sampling knobs for one greedy run."""

    budget: int
    optimizer: str = "naive"
    epsilon: float | None = None
    seed: int | None = None
    stop_if_zero_gain: bool = False
    stop_if_negative_gain: bool = False

    def validated(self, n: int) -> "OptimizeSpec":
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}; "
                             f"choose from {OPTIMIZERS}")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.budget > n:
            raise ValueError(f"budget {self.budget} exceeds ground set size {n}")
        if self.optimizer in _SAMPLING:
            if self.epsilon is None:
                raise ValueError(f"{self.optimizer} greedy requires epsilon")
            if not (0.0 < self.epsilon < 1.0):
                raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        return self


@dataclass
class GreedyResult:
    """Selection order with at-selection gains and the probe count."""

    picks: list[tuple[int, float]] = field(default_factory=list)
    gain_evaluations: int = 0

    @property
    def indices(self) -> list[int]:
        return [e for e, _ in self.picks]

    @property
    def gains(self) -> list[float]:
        return [g for _, g in self.picks]

    @property
    def value(self) -> float:
        return float(sum(g for _, g in self.picks))


def _should_stop(spec: OptimizeSpec, best_gain: float) -> bool:
    if spec.stop_if_zero_gain and best_gain <= 0.0:
        return True
    if spec.stop_if_negative_gain and best_gain < 0.0:
        return True
    return False


def _sample_size(n: int, budget: int, epsilon: float) -> int:
    return max(1, math.ceil((n / budget) * math.log(1.0 / epsilon)))


def naive_greedy(f: SetFunction, spec: OptimizeSpec) -> GreedyResult:
    """Full argmax sweep per round; ties go to the smallest index."""
    spec = spec.validated(f.n)
    memo = f.fresh_memo()
    remaining = list(range(f.n))
    out = GreedyResult()
    for _ in range(spec.budget):
        best_e, best_gain = -1, -math.inf
        for e in remaining:
            g = f.marginal_gain_with_memo(memo, e)
            out.gain_evaluations += 1
            if g > best_gain:
                best_e, best_gain = e, g
        if _should_stop(spec, best_gain):
            break
        f.update_memo(memo, best_e)
        remaining.remove(best_e)
        out.picks.append((best_e, best_gain))
    return out


def _require_submodular(f: SetFunction, who: str) -> None:
    if not f.is_submodular:
        raise ValueError(
            f"{who} relies on diminishing returns and rejects {f.name!r}, "
            f"which is not flagged submodular")


def lazy_greedy(f: SetFunction, spec: OptimizeSpec) -> GreedyResult:
    """Priority-queue greedy with stale upper bounds.

    A heap entry is (-bound, element, round-of-computation). A popped entry
    computed this round is exact and, because every other bound is an upper
    bound on its true gain, can be accepted immediately; a stale one is
    recomputed and pushed back. Equal bounds pop in index order, which makes
    the accepted element the smallest-index argmax - the naive choice.
    For modular functions every bound stays exact, so nothing is ever
    recomputed after the initial pass.
    """
    spec = spec.validated(f.n)
    _require_submodular(f, "lazy greedy")
    memo = f.fresh_memo()
    out = GreedyResult()
    heap = []
    for e in range(f.n):
        g = f.marginal_gain_with_memo(memo, e)
        out.gain_evaluations += 1
        heap.append((-g, e, 0))
    heapq.heapify(heap)
    for rnd in range(spec.budget):
        chosen = None
        while heap:
            neg, e, stamp = heapq.heappop(heap)
            if f.is_modular or stamp == rnd:
                chosen = (e, -neg)
                break
            g = f.marginal_gain_with_memo(memo, e)
            out.gain_evaluations += 1
            heapq.heappush(heap, (-g, e, rnd))
        if chosen is None:
            break
        best_e, best_gain = chosen
        if _should_stop(spec, best_gain):
            break
        f.update_memo(memo, best_e)
        out.picks.append((best_e, best_gain))
    return out


def stochastic_greedy(f: SetFunction, spec: OptimizeSpec) -> GreedyResult:
    """Argmax over a fresh uniform sample of unselected elements per round."""
    spec = spec.validated(f.n)
    rng = np.random.default_rng(spec.seed)
    s = _sample_size(f.n, spec.budget, spec.epsilon)
    memo = f.fresh_memo()
    pool = np.arange(f.n)
    out = GreedyResult()
    for _ in range(spec.budget):
        take = min(s, pool.size)
        sample = np.sort(rng.choice(pool, size=take, replace=False))
        best_e, best_gain = -1, -math.inf
        for e in sample:
            g = f.marginal_gain_with_memo(memo, int(e))
            out.gain_evaluations += 1
            if g > best_gain:
                best_e, best_gain = int(e), g
        if _should_stop(spec, best_gain):
            break
        f.update_memo(memo, best_e)
        pool = pool[pool != best_e]
        out.picks.append((best_e, best_gain))
    return out


def lazier_than_lazy_greedy(f: SetFunction, spec: OptimizeSpec) -> GreedyResult:
    """Sampled lazy greedy: per-round sample, bounds persisting across rounds.

    Unvisited elements carry an infinite bound (forcing one evaluation on
    first surfacing); thereafter the recorded bound is a valid upper bound
    for every later round, exactly as in lazy greedy.
    """
    spec = spec.validated(f.n)
    _require_submodular(f, "lazier-than-lazy greedy")
    rng = np.random.default_rng(spec.seed)
    s = _sample_size(f.n, spec.budget, spec.epsilon)
    memo = f.fresh_memo()
    pool = np.arange(f.n)
    bounds = np.full(f.n, math.inf)
    stamps = np.full(f.n, -1)
    out = GreedyResult()
    for rnd in range(spec.budget):
        take = min(s, pool.size)
        sample = rng.choice(pool, size=take, replace=False)
        heap = [(-bounds[e], int(e)) for e in sample]
        heapq.heapify(heap)
        chosen = None
        while heap:
            neg, e = heapq.heappop(heap)
            if stamps[e] == rnd or (f.is_modular and np.isfinite(bounds[e])):
                chosen = (e, -neg)
                break
            g = f.marginal_gain_with_memo(memo, e)
            out.gain_evaluations += 1
            bounds[e], stamps[e] = g, rnd
            heapq.heappush(heap, (-g, e))
        if chosen is None:
            break
        best_e, best_gain = chosen
        if _should_stop(spec, best_gain):
            break
        f.update_memo(memo, best_e)
        pool = pool[pool != best_e]
        out.picks.append((best_e, best_gain))
    return out


_DISPATCH = {
    "naive": naive_greedy,
    "lazy": lazy_greedy,
    "stochastic": stochastic_greedy,
    "lazier": lazier_than_lazy_greedy,
}


def maximize(f: SetFunction, spec: OptimizeSpec) -> GreedyResult:
    """Run the optimizer named in ``spec.optimizer``."""
    spec.validated(f.n)
    return _DISPATCH[spec.optimizer](f, spec)
