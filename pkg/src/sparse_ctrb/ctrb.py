"""Controllability tests for linear systems driven by sparse inputs.

The plant is ``x_k = D x_{k-1} + H h_k`` with state dimension N and L input
channels; at most ``s`` channels may be active per step.  An optional output
map ``y_k = A x_k`` enables the output-controllability variants.

The decisive characterization implemented here: the system is s-sparse
controllable iff the eigenvalue rank condition ``rank([lambda*I - D, H]) = N``
holds for every eigenvalue lambda of D and additionally ``N <= s + rank(D)``.
Only eigenvalues of D can violate the rank condition, so the sweep is finite.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import (
    DEFAULT_TOLERANCE,
    Tolerance,
    _as_matrix,
    _square,
    controllability_matrix,
    eigenvalue_probes,
    max_geometric_multiplicity,
    rank,
)

__all__ = [
    "SystemModel",
    "ControllabilityReport",
    "input_restriction",
    "pbh_test",
    "kalman_test",
    "sparse_pbh_test",
    "common_support_test",
    "output_kalman_test",
    "output_pbh_necessary",
    "output_sparse_necessary",
]


@dataclass(frozen=True)
class SystemModel:
    """Immutable container for a system (D, H) with optional output map A.

    Arrays are validated, converted to float64, and frozen (read-only views).
    ``A`` with at least as many rows as states is accepted with a warning:
    output controllability is only a relaxation when m < N.
    """

    D: np.ndarray
    H: np.ndarray
    A: Optional[np.ndarray] = None

    def __post_init__(self):
        d = _square(self.D, "D")
        h = _as_matrix(self.H, "H")
        if h.shape[0] != d.shape[0]:
            raise ValueError(
                f"H must have {d.shape[0]} rows to match D, got {h.shape[0]}"
            )
        if h.shape[1] < 1:
            raise ValueError("H must have at least one column")
        a = None
        if self.A is not None:
            a = _as_matrix(self.A, "A")
            if a.shape[1] != d.shape[0]:
                raise ValueError(
                    f"A must have {d.shape[0]} columns to match D, got {a.shape[1]}"
                )
            if a.shape[0] >= d.shape[0]:
                warnings.warn(
                    "output map has m >= N rows; output controllability does "
                    "not relax state controllability in this regime",
                    stacklevel=2,
                )
        for name, arr in (("D", d), ("H", h), ("A", a)):
            if arr is None:
                continue
            arr = np.ascontiguousarray(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_states(self) -> int:
        return self.D.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.H.shape[1]

    @property
    def n_outputs(self) -> Optional[int]:
        return None if self.A is None else self.A.shape[0]


@dataclass(frozen=True)
class ControllabilityReport:
    """Outcome of an eigenvalue rank-condition test.

    ``verdict`` is ``rank_condition_holds and inequality_holds``.  For the
    plain (non-sparse) test the inequality is vacuous and ``slack`` is None;
    for the sparse test ``slack = s + rank(D) - N`` (negative iff the
    inequality fails).  On a rank failure, ``witness_lambda`` is the offending
    eigenvalue (first in the deterministic (real, imag) probe order) and
    ``witness_z`` a left null vector with ``z^T [lambda*I - D, H] ~ 0``.
    """

    verdict: bool
    rank_condition_holds: bool
    inequality_holds: bool
    witness_lambda: Optional[complex]
    witness_z: Optional[np.ndarray]
    slack: Optional[int]
    tolerance: Tolerance


def input_restriction(sys: SystemModel, support) -> SystemModel:
    """System with H restricted to the given sorted tuple of column indices."""
    cols = tuple(support)
    if len(cols) == 0:
        raise ValueError("support must be non-empty")
    if any(not (0 <= j < sys.n_inputs) for j in cols):
        raise ValueError(f"support {cols} out of range for L={sys.n_inputs}")
    return SystemModel(D=sys.D, H=sys.H[:, list(cols)], A=sys.A)


def _rank_condition(d, h, tol):
    """Sweep the eigenvalue probes; return (holds, witness_lambda, witness_z)."""
    n = d.shape[0]
    eye = np.eye(n)
    for lam in eigenvalue_probes(d, tol):
        pencil = np.hstack([lam * eye - d, h.astype(complex)])
        if rank(pencil, tol) < n:
            # left null vector from the smallest singular triplet
            u = np.linalg.svd(pencil)[0]
            z = np.conj(u[:, -1])
            return False, lam, z
    return True, None, None


def pbh_test(sys: SystemModel, tol: Tolerance = DEFAULT_TOLERANCE) -> ControllabilityReport:
    """Eigenvalue rank test for plain controllability."""
    holds, lam, z = _rank_condition(sys.D, sys.H, tol)
    return ControllabilityReport(
        verdict=holds,
        rank_condition_holds=holds,
        inequality_holds=True,
        witness_lambda=lam,
        witness_z=z,
        slack=None,
        tolerance=tol,
    )


def kalman_test(sys: SystemModel, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Rank test on the stacked reachability matrix with N blocks."""
    n = sys.n_states
    return rank(controllability_matrix(sys.D, sys.H, n), tol) == n


def sparse_pbh_test(
    sys: SystemModel, s: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> ControllabilityReport:
    """Decisive test for s-sparse controllability.

    Combines the eigenvalue rank condition with ``N <= s + rank(D)``.
    """
    _check_sparsity(sys, s)
    holds, lam, z = _rank_condition(sys.D, sys.H, tol)
    slack = s + rank(sys.D, tol) - sys.n_states
    inequality = slack >= 0
    return ControllabilityReport(
        verdict=holds and inequality,
        rank_condition_holds=holds,
        inequality_holds=inequality,
        witness_lambda=lam,
        witness_z=z,
        slack=slack,
        tolerance=tol,
    )


def common_support_test(
    sys: SystemModel, s: int, tol: Tolerance = DEFAULT_TOLERANCE
):
    """s-sparse controllability restricted to a single common support.

    Returns ``(verdict, support)`` where ``support`` is the lexicographically
    smallest size-s column set S with (D, H_S) controllable, or None.  A
    necessary screen (``min(rank(H), s) >= g_D >= N - rank(D)``, with g_D the
    largest geometric multiplicity of D) short-circuits to False before any
    enumeration.
    """
    _check_sparsity(sys, s)
    g = max_geometric_multiplicity(sys.D, tol)
    r_h = rank(sys.H, tol)
    r_d = rank(sys.D, tol)
    n = sys.n_states
    if not (min(r_h, s) >= g >= n - r_d):
        return False, None
    for support in itertools.combinations(range(sys.n_inputs), s):
        if pbh_test(input_restriction(sys, support), tol).verdict:
            return True, support
    return False, None


def output_kalman_test(sys: SystemModel, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Decisive output-controllability test: rank(A * [D^(N-1) H ... H]) = m.

    The rank stabilizes by K = N blocks, so this horizon is exact.
    """
    a = _require_output_map(sys)
    return rank(a @ controllability_matrix(sys.D, sys.H, sys.n_states), tol) == a.shape[0]


def output_pbh_necessary(sys: SystemModel, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Necessary eigenvalue-sweep condition for output controllability.

    Checks ``rank(A [lambda*I - D, H]) = m`` at all eigenvalue probes of D and
    at one off-spectrum probe (1 + spectral radius): when rank(A) < m the rank
    can drop even away from the spectrum.  False disproves output
    controllability; True proves nothing.
    """
    a = _require_output_map(sys)
    m = a.shape[0]
    n = sys.n_states
    eye = np.eye(n)
    w = np.linalg.eigvals(sys.D)
    spectral_radius = float(np.max(np.abs(w))) if w.size else 0.0
    probes = eigenvalue_probes(sys.D, tol) + [complex(1.0 + spectral_radius)]
    for lam in probes:
        pencil = a @ np.hstack([lam * eye - sys.D, sys.H.astype(complex)])
        if rank(pencil, tol) < m:
            return False
    return True


def output_sparse_necessary(
    sys: SystemModel, s: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """Necessary condition for s-sparse output controllability:
    ``s >= m - rank(A D)`` together with the eigenvalue-sweep condition."""
    a = _require_output_map(sys)
    _check_sparsity(sys, s)
    if s < a.shape[0] - rank(a @ sys.D, tol):
        return False
    return output_pbh_necessary(sys, tol)


def _check_sparsity(sys: SystemModel, s: int):
    if not (isinstance(s, (int, np.integer)) and 1 <= s <= sys.n_inputs):
        raise ValueError(
            f"sparsity s must satisfy 1 <= s <= L={sys.n_inputs}, got {s!r}"
        )
    return int(s)


def _require_output_map(sys: SystemModel) -> np.ndarray:
    if sys.A is None:
        raise ValueError("system has no output map A")
    return sys.A
