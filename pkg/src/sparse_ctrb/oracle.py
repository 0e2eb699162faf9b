"""Brute-force schedule enumeration: the ground truth the fast tests answer to.

A support schedule fixes which ``s`` input channels are active at each of K
steps; the scheduled reachability matrix is ``[D^(K-1) H_{S_1}, ...,
H_{S_K}]``.  The system is s-sparse controllable iff some schedule of some
length reaches rank N, and the search below decides that by enumeration.
Worst-case cost is exponential in K; budgets make overruns an explicit
inconclusive outcome instead of a wrong answer.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ctrb import SystemModel, _check_sparsity, _require_output_map, sparse_pbh_test
from .errors import BudgetExceededError
from .linalg import DEFAULT_TOLERANCE, Tolerance, _empty_basis, _independent_columns, rank

__all__ = [
    "OracleBudget",
    "SupportSchedule",
    "partition_schedule",
    "schedule_submatrix",
    "kalman_type_rank_test",
    "exact_min_k",
    "decision_horizon",
    "rstar_sequence",
    "output_kalman_type_rank_test",
]


@dataclass(frozen=True)
class OracleBudget:
    """Search budget. ``max_k=None`` lets callers derive the decision horizon."""

    max_k: Optional[int] = None
    max_enumerations: int = 1_000_000
    deadline_s: Optional[float] = None

    def __post_init__(self):
        if self.max_k is not None and not (
            isinstance(self.max_k, int) and self.max_k >= 1
        ):
            raise ValueError(f"max_k must be a positive integer or None, got {self.max_k!r}")
        if not (isinstance(self.max_enumerations, int) and self.max_enumerations >= 1):
            raise ValueError("max_enumerations must be a positive integer")
        if self.deadline_s is not None and not self.deadline_s > 0:
            raise ValueError("deadline_s must be positive or None")


@dataclass(frozen=True)
class SupportSchedule:
    """Ordered supports (S_1, ..., S_K); each S_i is a sorted tuple of column
    indices with |S_i| <= s.  Empty supports force a zero input at that step."""

    supports: tuple
    s: int

    def __post_init__(self):
        if not (isinstance(self.s, int) and self.s >= 1):
            raise ValueError(f"s must be a positive integer, got {self.s!r}")
        cleaned = []
        for sup in self.supports:
            sup = tuple(int(j) for j in sup)
            if len(sup) > self.s:
                raise ValueError(f"support {sup} exceeds sparsity {self.s}")
            if any(j < 0 for j in sup):
                raise ValueError(f"support {sup} has negative indices")
            if any(a >= b for a, b in zip(sup, sup[1:])):
                raise ValueError(f"support {sup} must be strictly increasing")
            cleaned.append(sup)
        object.__setattr__(self, "supports", tuple(cleaned))

    @property
    def k(self) -> int:
        return len(self.supports)


def partition_schedule(l: int, s: int) -> SupportSchedule:
    """Schedule of ceil(L/s) size-s supports covering all L channels in order;
    a short final set is padded from the tail of the index range."""
    if not (isinstance(l, int) and l >= 1):
        raise ValueError(f"L must be a positive integer, got {l!r}")
    if not (isinstance(s, int) and 1 <= s <= l):
        raise ValueError(f"s must satisfy 1 <= s <= L={l}, got {s!r}")
    supports = []
    for i in range(math.ceil(l / s)):
        start = i * s
        sup = tuple(range(start, min(start + s, l)))
        if len(sup) < s:
            sup = tuple(range(l - s, l))
        supports.append(sup)
    return SupportSchedule(supports=tuple(supports), s=s)


def _ascending_power_blocks(d, h, k):
    blocks = [np.asarray(h)]
    for _ in range(k - 1):
        blocks.append(d @ blocks[-1])
    return blocks


def schedule_submatrix(sys: SystemModel, schedule: SupportSchedule) -> np.ndarray:
    """Scheduled reachability matrix ``[D^(K-1) H_{S_1}, ..., H_{S_K}]``."""
    k = schedule.k
    n, l = sys.n_states, sys.n_inputs
    for sup in schedule.supports:
        if any(j >= l for j in sup):
            raise ValueError(f"support {sup} out of range for L={l}")
    if k == 0:
        return np.zeros((n, 0))
    powers = _ascending_power_blocks(sys.D, sys.H, k)
    pieces = []
    for i, sup in enumerate(schedule.supports, start=1):
        if sup:
            pieces.append(powers[k - i][:, list(sup)])
    if not pieces:
        return np.zeros((n, 0))
    return np.hstack(pieces)


class _Counter:
    def __init__(self, budget: OracleBudget):
        self.budget = budget
        self.used = 0
        self.deadline = (
            None if budget.deadline_s is None else time.monotonic() + budget.deadline_s
        )

    def tick(self, k):
        self.used += 1
        if self.used > self.budget.max_enumerations:
            raise BudgetExceededError(
                "schedule search exceeded enumeration budget",
                enumerations=self.used,
                k_reached=k,
            )
        if self.deadline is not None and (self.used & 0xFF) == 0:
            if time.monotonic() > self.deadline:
                raise BudgetExceededError(
                    "schedule search exceeded deadline",
                    enumerations=self.used,
                    k_reached=k,
                )


def _search_full_rank(blocks, target_rank, s, supports, counter, k, tol, projector=None):
    """Depth-first search for a schedule whose scheduled matrix reaches
    ``target_rank``.  ``blocks`` are in descending power order and already
    mapped through the output matrix when ``projector`` is set.

    Pruning uses an independence-biased Gram-Schmidt rank estimate plus a
    per-power capacity bound; an accepting leaf is re-verified with a full
    SVD rank so pruning cannot flip the verdict.
    """
    if rank(np.hstack(blocks), tol) < target_rank:
        return None
    caps = [min(s, rank(b, tol)) for b in blocks]  # caps[d] for depth-d block
    # suffix_cap[d] = capacity of blocks at depths >= d
    suffix_cap = [0] * (k + 1)
    for d in range(k - 1, -1, -1):
        suffix_cap[d] = suffix_cap[d + 1] + caps[d]

    rows = blocks[0].shape[0]
    chosen = []

    def dfs(depth, basis):
        for sup in supports:
            counter.tick(k)
            block = blocks[depth][:, list(sup)]
            nxt, _ = _independent_columns(basis, block)
            if nxt.shape[1] + suffix_cap[depth + 1] < target_rank:
                continue
            chosen.append(sup)
            if depth + 1 == k:
                if nxt.shape[1] >= target_rank:
                    leaf = np.hstack(
                        [blocks[d][:, list(c)] for d, c in enumerate(chosen) if c]
                    )
                    if rank(leaf, tol) == target_rank:
                        return list(chosen)
            else:
                found = dfs(depth + 1, nxt)
                if found is not None:
                    return found
            chosen.pop()
        return None

    return dfs(0, _empty_basis(rows))


def kalman_type_rank_test(
    sys: SystemModel,
    s: int,
    k: int,
    budget: Optional[OracleBudget] = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
):
    """(verdict, witness) for: does some K-step schedule reach state rank N?

    The witness is the lexicographically smallest rank-N schedule (supports
    enumerated in lexicographic order, schedule positions left to right).
    """
    _check_sparsity(sys, s)
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise ValueError(f"K must be a positive integer, got {k!r}")
    counter = _Counter(budget or OracleBudget())
    witness = _schedule_witness(sys, s, int(k), counter, tol)
    if witness is None:
        return False, None
    return True, witness


def _schedule_witness(sys, s, k, counter, tol, output=False):
    blocks = _ascending_power_blocks(sys.D, sys.H, k)[::-1]
    if output:
        a = _require_output_map(sys)
        blocks = [a @ b for b in blocks]
        target = sys.n_outputs
    else:
        target = sys.n_states
    supports = list(itertools.combinations(range(sys.n_inputs), s))
    found = _search_full_rank(blocks, target, s, supports, counter, k, tol)
    if found is None:
        return None
    return SupportSchedule(supports=tuple(found), s=s)


def decision_horizon(sys: SystemModel, s: int, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Schedule length that decides s-sparse controllability outright.

    When the sparse rank test passes, the steering-time upper bound applies;
    otherwise N * ceil(L/s) steps suffice: if no schedule of that length
    reaches rank N, none of any length does (repeating the partition schedule
    N times realizes the unconstrained rank).
    """
    _check_sparsity(sys, s)
    if sparse_pbh_test(sys, s, tol).verdict:
        from .bounds import kstar_bounds_sparse

        return kstar_bounds_sparse(sys, s, tol).upper
    return sys.n_states * math.ceil(sys.n_inputs / s)


def exact_min_k(
    sys: SystemModel,
    s: int,
    budget: Optional[OracleBudget] = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
):
    """Smallest K admitting a rank-N schedule, with its witness.

    Searches K = 1..max_k (the decision horizon by default) and returns
    ``(None, None)`` when no schedule exists within that range, which is
    definitive when max_k is at least the decision horizon.
    """
    _check_sparsity(sys, s)
    budget = budget or OracleBudget()
    max_k = budget.max_k if budget.max_k is not None else decision_horizon(sys, s, tol)
    counter = _Counter(budget)
    for k in range(1, max_k + 1):
        witness = _schedule_witness(sys, s, k, counter, tol)
        if witness is not None:
            return k, witness
    return None, None


def rstar_sequence(
    sys: SystemModel,
    s: int,
    k_max: int,
    budget: Optional[OracleBudget] = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
):
    """Best achievable scheduled rank for each K = 1..k_max.

    The sequence increases strictly until the minimal steering time and is
    constant afterwards.
    """
    _check_sparsity(sys, s)
    if not (isinstance(k_max, (int, np.integer)) and k_max >= 1):
        raise ValueError(f"k_max must be a positive integer, got {k_max!r}")
    counter = _Counter(budget or OracleBudget())
    supports = list(itertools.combinations(range(sys.n_inputs), s))
    n = sys.n_states
    out = []
    for k in range(1, int(k_max) + 1):
        blocks = _ascending_power_blocks(sys.D, sys.H, k)[::-1]
        ceiling = min(n, rank(np.hstack(blocks), tol))
        caps = [min(s, rank(b, tol)) for b in blocks]
        suffix_cap = [0] * (k + 1)
        for d in range(k - 1, -1, -1):
            suffix_cap[d] = suffix_cap[d + 1] + caps[d]
        ceiling = min(ceiling, suffix_cap[0])
        best = 0
        chosen = []

        def dfs(depth, basis):
            nonlocal best
            if best == ceiling:
                return
            for sup in supports:
                counter.tick(k)
                block = blocks[depth][:, list(sup)]
                nxt, _ = _independent_columns(basis, block)
                if nxt.shape[1] + suffix_cap[depth + 1] <= best:
                    continue
                chosen.append(sup)
                if depth + 1 == k:
                    if nxt.shape[1] > best:
                        leaf = np.hstack(
                            [blocks[d][:, list(c)] for d, c in enumerate(chosen) if c]
                        )
                        best = max(best, rank(leaf, tol))
                else:
                    dfs(depth + 1, nxt)
                chosen.pop()
                if best == ceiling:
                    return

        dfs(0, _empty_basis(n))
        out.append(best)
    return out


def output_kalman_type_rank_test(
    sys: SystemModel,
    s: int,
    k: int,
    budget: Optional[OracleBudget] = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
):
    """(verdict, witness) for: does some K-step schedule reach output rank m?"""
    _require_output_map(sys)
    _check_sparsity(sys, s)
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise ValueError(f"K must be a positive integer, got {k!r}")
    counter = _Counter(budget or OracleBudget())
    witness = _schedule_witness(sys, s, int(k), counter, tol, output=True)
    if witness is None:
        return False, None
    return True, witness
