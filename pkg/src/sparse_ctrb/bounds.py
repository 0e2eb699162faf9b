"""Bounds on the minimal number of steps K* needed to steer between any two
states (or outputs) under a per-step sparsity budget.

All variants share one assembly helper over integer quantities (state
dimension, rank of H, rank of D, minimal-polynomial degree q, minimal
controllable support size S*), so the floating-point and exact-rational
routes cannot diverge in the formulas.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .ctrb import (
    SystemModel,
    _check_sparsity,
    _require_output_map,
    common_support_test,
    input_restriction,
    pbh_test,
    sparse_pbh_test,
)
from .errors import BudgetExceededError, UncontrollableSystemError
from .linalg import DEFAULT_TOLERANCE, Tolerance, min_poly_degree, rank

__all__ = [
    "KStarBounds",
    "BOUND_VARIANTS",
    "s_star",
    "kstar_bounds_unconstrained",
    "kstar_bounds_sparse",
    "kstar_bounds_relaxed",
    "output_kstar_bounds",
    "common_support_kstar_bounds",
]

BOUND_VARIANTS = ("unconstrained", "sparse", "relaxed", "output", "common_support")


@dataclass(frozen=True)
class KStarBounds:
    """Two-sided bound lower <= K* <= upper for one variant.

    ``lower_exact`` keeps the raw rational before ceiling (e.g. 3/2), ``q`` the
    minimal-polynomial degree of D, ``r_hs_star`` the effective per-step rank
    min(rank(H), s) (rank(A H) in the output variant), and ``s_star`` the
    minimal controllable support size when the variant uses it.
    """

    variant: str
    lower: int
    upper: int
    lower_exact: Fraction
    q: int
    r_hs_star: int
    s_star: Optional[int] = None


def _ceil_frac(num: int, den: int) -> int:
    return -(-num // den)


def _bounds_from_quantities(
    variant: str,
    target_dim: int,
    r_eff: int,
    q: int,
    *,
    s: Optional[int] = None,
    s_star_value: Optional[int] = None,
    r_h: Optional[int] = None,
    r_d: Optional[int] = None,
    n: Optional[int] = None,
) -> KStarBounds:
    """Pure-integer bound assembly shared by the float and exact backends."""
    if r_eff < 1:
        raise UncontrollableSystemError(
            f"{variant} bounds undefined: effective per-step rank is zero"
        )
    lower_exact = Fraction(target_dim, r_eff)
    lower = _ceil_frac(target_dim, r_eff)
    if variant == "unconstrained":
        upper = min(q, target_dim - r_eff + 1)
    elif variant == "sparse":
        upper = min(q * _ceil_frac(s_star_value, s), target_dim - r_eff + 1)
    elif variant == "relaxed":
        upper = min(q * _ceil_frac(r_h, s), r_d + 1, target_dim)
    elif variant == "output":
        upper = min(q * _ceil_frac(r_h, s), target_dim - r_eff + 1)
    elif variant == "common_support":
        upper = min(q, target_dim - r_eff + 1)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return KStarBounds(
        variant=variant,
        lower=lower,
        upper=upper,
        lower_exact=lower_exact,
        q=q,
        r_hs_star=r_eff,
        s_star=s_star_value,
    )


def s_star(
    sys: SystemModel,
    tol: Tolerance = DEFAULT_TOLERANCE,
    max_size: Optional[int] = None,
    max_subsets: Optional[int] = None,
) -> int:
    """Smallest support size T such that some (D, H_S) with |S| = T is
    controllable.  Undefined (raises) for uncontrollable systems; optional
    caps turn combinatorial blowup into an inconclusive error."""
    if not pbh_test(sys, tol).verdict:
        raise UncontrollableSystemError(
            "S* undefined: system is not controllable"
        )
    l = sys.n_inputs
    cap = l if max_size is None else min(int(max_size), l)
    tried = 0
    for size in range(1, cap + 1):
        for support in itertools.combinations(range(l), size):
            tried += 1
            if max_subsets is not None and tried > max_subsets:
                raise BudgetExceededError(
                    "support search exceeded subset budget", enumerations=tried
                )
            if pbh_test(input_restriction(sys, support), tol).verdict:
                return size
    raise BudgetExceededError(
        f"no controllable support within size cap {cap}", enumerations=tried
    )


def kstar_bounds_unconstrained(
    sys: SystemModel, tol: Tolerance = DEFAULT_TOLERANCE
) -> KStarBounds:
    """ceil(N / rank(H)) <= K* <= min(q, N - rank(H) + 1) for controllable systems."""
    if not pbh_test(sys, tol).verdict:
        raise UncontrollableSystemError("K* undefined: system is not controllable")
    n = sys.n_states
    r_h = rank(sys.H, tol)
    q = min_poly_degree(sys.D, tol)
    return _bounds_from_quantities("unconstrained", n, r_h, q)


def kstar_bounds_sparse(
    sys: SystemModel, s: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> KStarBounds:
    """ceil(N / min(rank(H), s)) <= K* <= min(q * ceil(S*/s), N - min(rank(H), s) + 1).

    Requires s-sparse controllability.  For s = 1 the two sides coincide at N.
    """
    if not sparse_pbh_test(sys, s, tol).verdict:
        raise UncontrollableSystemError(
            "K* undefined: system is not s-sparse controllable"
        )
    n = sys.n_states
    r_h = rank(sys.H, tol)
    q = min_poly_degree(sys.D, tol)
    sstar = s_star(sys, tol)
    return _bounds_from_quantities(
        "sparse", n, min(r_h, s), q, s=int(s), s_star_value=sstar
    )


def kstar_bounds_relaxed(
    sys: SystemModel, s: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> KStarBounds:
    """Enumeration-free variant: upper = min(q * ceil(rank(H)/s), rank(D) + 1, N).

    Never tighter than the sparse variant but avoids the S* subset search.
    """
    if not sparse_pbh_test(sys, s, tol).verdict:
        raise UncontrollableSystemError(
            "K* undefined: system is not s-sparse controllable"
        )
    n = sys.n_states
    r_h = rank(sys.H, tol)
    r_d = rank(sys.D, tol)
    q = min_poly_degree(sys.D, tol)
    return _bounds_from_quantities(
        "relaxed", n, min(r_h, s), q, s=int(s), r_h=r_h, r_d=r_d
    )


def output_kstar_bounds(
    sys: SystemModel, s: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> KStarBounds:
    """ceil(m / min(rank(A H), s)) <= K* <= min(q * ceil(rank(H)/s), m - min(rank(A H), s) + 1).

    The caller asserts s-sparse output controllability; this routine only
    screens the necessary rank quantity (rank(A H) >= 1).
    """
    a = _require_output_map(sys)
    _check_sparsity(sys, s)
    m = a.shape[0]
    r_ah = rank(a @ sys.H, tol)
    r_h = rank(sys.H, tol)
    q = min_poly_degree(sys.D, tol)
    return _bounds_from_quantities(
        "output", m, min(r_ah, s), q, s=int(s), r_h=r_h
    )


def common_support_kstar_bounds(
    sys: SystemModel, s: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> KStarBounds:
    """ceil(N / min(rank(H), s)) <= K* <= min(q, N - min(rank(H), s) + 1) when a
    single common support works."""
    verdict, _ = common_support_test(sys, s, tol)
    if not verdict:
        raise UncontrollableSystemError(
            "K* undefined: no single size-s support is controllable"
        )
    n = sys.n_states
    r_h = rank(sys.H, tol)
    q = min_poly_degree(sys.D, tol)
    return _bounds_from_quantities("common_support", n, min(r_h, s), q, s=int(s))
