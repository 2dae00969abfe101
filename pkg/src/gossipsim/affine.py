"""Synchronous affine iterations ``x(k+1) = P x(k) + u`` and their fixed points.

This module is the deterministic reference against which the randomized
gossip dynamics are measured: every application (localization, PageRank,
opinions) reduces to one of these systems, and the ergodic time-averages
of the randomized runs must land on the fixed point computed here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvariantViolation, NotSchurStable, NotSubstochastic
from .numerics import (
    DEFAULT_POLICY,
    NumericPolicy,
    StabilityVerdict,
    as_square,
    as_vector,
    linear_solve,
    spectral_radius_estimate,
)


@dataclass(frozen=True, eq=False)
class AffineSystem:
    """An affine iteration, defined by the pair ``(P, u)``.

    ``adjacency`` is an optional boolean mask; when given, ``P`` must be
    adapted to it (``P[i, j] != 0`` only where the mask is true).
    """

    p: np.ndarray
    u: np.ndarray
    adjacency: np.ndarray | None = None

    def __post_init__(self):
        p = as_square(self.p, "P")
        u = as_vector(self.u, "u")
        if u.shape[0] != p.shape[0]:
            raise DimensionMismatch(
                f"u has length {u.shape[0]}, expected {p.shape[0]}"
            )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "u", u)
        if self.adjacency is not None:
            mask = np.asarray(self.adjacency, dtype=bool)
            if mask.shape != p.shape:
                raise DimensionMismatch("adjacency mask shape differs from P")
            if np.any((p != 0.0) & ~mask):
                raise InvariantViolation("P has nonzeros outside the attached adjacency")
            object.__setattr__(self, "adjacency", mask)

    @property
    def dim(self) -> int:
        return self.p.shape[0]


@dataclass(eq=False)
class SyncTrajectory:
    """A recorded synchronous run: ``states[k]`` is the state after k steps."""

    states: np.ndarray
    converged: bool
    iterations: int

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def iterate_sync(system: AffineSystem, x0, steps: int) -> SyncTrajectory:
    """Run ``steps`` synchronous updates from ``x0`` and record every state."""
    x = as_vector(x0, "x0")
    if x.shape[0] != system.dim:
        raise DimensionMismatch(f"x0 has length {x.shape[0]}, expected {system.dim}")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    states = np.empty((steps + 1, system.dim))
    states[0] = x
    for k in range(steps):
        x = system.p @ x + system.u
        states[k + 1] = x
    if not np.isfinite(states[-1]).all():
        raise InvariantViolation("trajectory diverged to non-finite values")
    converged = bool(
        steps >= 1
        and np.abs(states[-1] - states[-2]).max()
        <= 1e-12 * (1.0 + np.abs(states[-1]).max())
    )
    return SyncTrajectory(states=states, converged=converged, iterations=steps)


def fixed_point(
    system: AffineSystem,
    force: bool = False,
    policy: NumericPolicy = DEFAULT_POLICY,
) -> np.ndarray:
    """Solve ``(I - P) x = u`` for the limit of the stable iteration.

    The system must carry a stability certificate from
    :func:`spectral_radius_estimate`; pass ``force=True`` to solve anyway
    (e.g. when stability is known analytically but the certificate is
    inconclusive).  Solving directly, rather than iterating, keeps this
    usable as an exact oracle for the randomized runs.
    """
    if not force:
        verdict = spectral_radius_estimate(system.p, policy)
        if not verdict.is_stable:
            raise NotSchurStable(
                f"stability verdict is '{verdict.status}'; "
                "pass force=True to solve regardless"
            )
    eye = np.eye(system.dim)
    return linear_solve(eye - system.p, system.u, policy)


def stability_verdict(system: AffineSystem, policy: NumericPolicy = DEFAULT_POLICY) -> StabilityVerdict:
    """Convenience wrapper: stability certificate for the system matrix."""
    return spectral_radius_estimate(system.p, policy)


def substochastic_schur_check(
    q,
    orientation: str = "rows",
    policy: NumericPolicy = DEFAULT_POLICY,
) -> bool:
    """Certify Schur stability of a substochastic matrix by reachability.

    A nonnegative matrix whose row (or column) sums are at most one is
    Schur stable provided every node of its associated graph has a path
    to a *deficiency* node (one whose sum is strictly below one).  This
    runs a breadth-first sweep backwards from the deficiency set and
    returns ``True`` exactly when the sweep covers all nodes; ``True`` is
    a stability certificate, ``False`` says nothing either way.

    ``orientation`` selects row sums (``"rows"``) or column sums
    (``"columns"``); the associated graph is transposed accordingly.
    An exactly stochastic matrix has no deficiency nodes and yields
    ``False`` rather than an error.
    """
    a = as_square(q)
    if orientation == "columns":
        a = a.T
    elif orientation != "rows":
        raise ValueError(f"orientation must be 'rows' or 'columns', got {orientation!r}")

    tol = policy.deficiency_tol
    if np.any(a < -tol):
        raise NotSubstochastic("matrix has a negative entry")
    sums = a.sum(axis=1)
    if np.any(sums > 1.0 + tol):
        raise NotSubstochastic(
            f"{orientation[:-1]} sums reach {sums.max():.15g} > 1"
        )

    deficient = sums < 1.0 - tol
    if not deficient.any():
        return False
    adj = a > 0.0
    reached = deficient.copy()
    while True:
        grown = reached | (adj @ reached)
        if np.array_equal(grown, reached):
            break
        reached = grown
    return bool(reached.all())
