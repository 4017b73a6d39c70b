"""Set-function contract, incremental memo contract, and generic compositions.

Every function in the library scores subsets of a ground set {0..n-1} and
fixes the empty-set value at 0. Greedy optimizers never re-evaluate from
scratch; they drive the memo contract: a :class:`MemoState` summarizes the
current subset with a function-specific statistic so that marginal gains and
the running value come cheap, and ``update_memo`` advances it by one element.

The generic compositions condition or query any base function:

* conditional gain        g(A) = f(A | P) = f(A u P) - f(P)
* mutual information      g(A) = f(A) + f(Q) - f(A u Q)
* conditional mutual info g(A) = f(A u P) + f(Q u P) - f(A u Q u P) - f(P)

They reuse the base function's memoization, holding one seeded base memo per
union term that depends on A.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

Subset = Iterable[int]


class MemoOwnershipError(ValueError):
    """A memo was presented to a function other than the one that created it."""


class FactorizationError(ValueError):
    """A matrix factorization hit a non-positive pivot."""

    def __init__(self, message: str, pivot: int):
        super().__init__(message)
        self.pivot = pivot


def as_indices(X: Subset, n: int) -> np.ndarray:
    """Normalize a subset to a sorted, duplicate-free index array in 0..n-1."""
    idx = np.unique(np.fromiter(X, dtype=np.int64)) if X is not None else np.empty(0, np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        bad = idx[0] if idx[0] < 0 else idx[-1]
        raise ValueError(f"element index {bad} outside ground set 0..{n - 1}")
    return idx


@dataclass
class MemoState:
    """Incremental summary of one growing subset.

    Owned by the function that created it and by one selection run; the
    ``data`` payload is function specific and opaque to callers.
    """

    owner: "SetFunction"
    members: set[int] = field(default_factory=set)
    value: float = 0.0
    data: Any = None


class SetFunction:
    """Common surface shared by every implemented set function."""

    n: int
    name: str = "set-function"
    is_submodular: bool = True
    is_monotone: bool = True
    is_modular: bool = False

    # -- direct evaluation ------------------------------------------------

    def evaluate(self, X: Subset) -> float:
        """f(X) per the defining formula; f(empty) = 0."""
        return self._value(as_indices(X, self.n))

    def marginal_gain(self, X: Subset, e: int) -> float:
        """f(X u {e}) - f(X); errors if e is already a member."""
        idx = as_indices(X, self.n)
        e = int(e)
        if e < 0 or e >= self.n:
            raise ValueError(f"element index {e} outside ground set 0..{self.n - 1}")
        if e in idx:
            raise ValueError(f"element {e} already in the subset")
        if self.is_modular:
            # modular gain is f({e}) regardless of X; skip the difference
            return self._value(np.asarray([e], dtype=np.int64))
        with_e = np.sort(np.append(idx, e))
        return self._value(with_e) - self._value(idx)

    def _value(self, idx: np.ndarray) -> float:
        raise NotImplementedError

    # -- memoized path ----------------------------------------------------

    def fresh_memo(self) -> MemoState:
        return MemoState(owner=self, data=self._memo_data())

    def memo_for(self, X: Subset) -> MemoState:
        """Memo advanced to an arbitrary starting subset."""
        memo = self.fresh_memo()
        for e in as_indices(X, self.n):
            self.update_memo(memo, int(e))
        return memo

    def eval_with_memo(self, memo: MemoState) -> float:
        self._check_memo(memo)
        return memo.value

    def marginal_gain_with_memo(self, memo: MemoState, e: int) -> float:
        self._check_memo(memo)
        e = int(e)
        if e < 0 or e >= self.n:
            raise ValueError(f"element index {e} outside ground set 0..{self.n - 1}")
        if e in memo.members:
            raise ValueError(f"element {e} already in the memoized subset")
        return self._memo_gain(memo, e)

    def update_memo(self, memo: MemoState, e: int) -> MemoState:
        """Advance the memo from A to A u {e} in place and return it."""
        gain = self.marginal_gain_with_memo(memo, e)
        self._memo_apply(memo, int(e))
        memo.members.add(int(e))
        memo.value += gain
        return memo

    def _check_memo(self, memo: MemoState) -> None:
        if memo.owner is not self:
            raise MemoOwnershipError(
                f"memo belongs to {getattr(memo.owner, 'name', memo.owner)!r}, "
                f"not to this {self.name!r} instance")

    def _memo_data(self):
        raise NotImplementedError

    def _memo_gain(self, memo: MemoState, e: int) -> float:
        raise NotImplementedError

    def _memo_apply(self, memo: MemoState, e: int) -> None:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} n={self.n}>"


class _Composed(SetFunction):
    """Shared plumbing for the three generic compositions.

    ``data`` holds one seeded base memo per A-dependent union term. An update
    touches a term's memo only when the element is genuinely new to that
    union, which keeps overlap between A and the conditioning sets legal.
    """

    def __init__(self, base: SetFunction):
        self.base = base
        self.n = base.n
        self.is_submodular = base.is_submodular
        self.is_modular = base.is_modular

    def _seeded(self, seed: np.ndarray) -> MemoState:
        return self.base.memo_for(seed)

    def _term_gain(self, inner: MemoState, e: int) -> float:
        if e in inner.members:
            return 0.0
        return self.base.marginal_gain_with_memo(inner, e)

    def _term_apply(self, inner: MemoState, e: int) -> None:
        if e not in inner.members:
            self.base.update_memo(inner, e)


class ConditionalGain(_Composed):
    """g(A) = f(A u P) - f(P): the novelty of A given a conditioning set P."""

    def __init__(self, base: SetFunction, private: Subset):
        super().__init__(base)
        self.private = as_indices(private, base.n)
        self._f_private = base.evaluate(self.private)
        self.is_monotone = base.is_monotone
        self.name = f"cg({base.name})"

    def _value(self, idx):
        union = np.union1d(idx, self.private)
        return self.base._value(union) - self._f_private

    def _memo_data(self):
        return {"ap": self._seeded(self.private)}

    def _memo_gain(self, memo, e):
        return self._term_gain(memo.data["ap"], e)

    def _memo_apply(self, memo, e):
        self._term_apply(memo.data["ap"], e)


class MutualInformation(_Composed):
    """g(A) = f(A) + f(Q) - f(A u Q): the similarity of A to a query set Q."""

    def __init__(self, base: SetFunction, query: Subset):
        super().__init__(base)
        self.query = as_indices(query, base.n)
        self._f_query = base.evaluate(self.query)
        # gains f(e|A) - f(e|A u Q) are nonnegative exactly when f has
        # diminishing returns, so monotonicity rides on submodularity here
        self.is_monotone = base.is_submodular
        self.name = f"mi({base.name})"

    def _value(self, idx):
        union = np.union1d(idx, self.query)
        return self.base._value(idx) + self._f_query - self.base._value(union)

    def _memo_data(self):
        return {"a": self.base.fresh_memo(), "aq": self._seeded(self.query)}

    def _memo_gain(self, memo, e):
        return self._term_gain(memo.data["a"], e) - self._term_gain(memo.data["aq"], e)

    def _memo_apply(self, memo, e):
        self._term_apply(memo.data["a"], e)
        self._term_apply(memo.data["aq"], e)


class ConditionalMutualInformation(_Composed):
    """g(A) = f(A u P) + f(Q u P) - f(A u Q u P) - f(P)."""

    def __init__(self, base: SetFunction, query: Subset, private: Subset):
        super().__init__(base)
        self.query = as_indices(query, base.n)
        self.private = as_indices(private, base.n)
        self._qp = np.union1d(self.query, self.private)
        self._const = base.evaluate(self._qp) - base.evaluate(self.private)
        self.is_monotone = base.is_submodular
        self.name = f"cmi({base.name})"

    def _value(self, idx):
        ap = np.union1d(idx, self.private)
        aqp = np.union1d(idx, self._qp)
        return self.base._value(ap) - self.base._value(aqp) + self._const

    def _memo_data(self):
        return {"ap": self._seeded(self.private), "aqp": self._seeded(self._qp)}

    def _memo_gain(self, memo, e):
        return self._term_gain(memo.data["ap"], e) - self._term_gain(memo.data["aqp"], e)

    def _memo_apply(self, memo, e):
        self._term_apply(memo.data["ap"], e)
        self._term_apply(memo.data["aqp"], e)


def generic_cg(base: SetFunction, private: Subset) -> ConditionalGain:
    return ConditionalGain(base, private)


def generic_mi(base: SetFunction, query: Subset) -> MutualInformation:
    return MutualInformation(base, query)


def generic_cmi(base: SetFunction, query: Subset, private: Subset) -> ConditionalMutualInformation:
    return ConditionalMutualInformation(base, query, private)
