"""Dense linear-algebra kernels shared by every other module.

The routines here are deliberately small and dense-only: the simulator
targets desk-scale networks (a few hundred nodes), where Gaussian
elimination with partial pivoting and norm-of-powers stability
certificates are simple, fast and easy to audit.

All tolerances live in one :class:`NumericPolicy` record so a caller can
tighten or relax the whole stack consistently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotBalanced, SingularMatrix, ValidationError


@dataclass(frozen=True)
class NumericPolicy:
    """Numeric tolerances used across the package.

    Attributes
    ----------
    solve_residual_rtol : float
        ``linear_solve`` guarantees ``|M y - rhs|_inf <= rtol * (1 + |rhs|_inf)``
        and raises ``SingularMatrix`` when it cannot.
    pivot_rtol : float
        A pivot below ``pivot_rtol * max|M|`` is treated as zero.
    balance_atol : float
        Absolute tolerance on ``sum(rhs)`` for the Laplacian pseudo-solve.
    deficiency_tol : float
        Row/column sums within this tolerance of one count as exactly one.
    stochastic_tol : float
        Tolerance on probability vectors and stochastic matrices summing to one.
    blowup_threshold : float
        Power norm above this value certifies instability by growth.
    max_squarings : int
        Number of repeated squarings tried by the stability estimator.
    """

    solve_residual_rtol: float = 1e-10
    pivot_rtol: float = 1e-13
    balance_atol: float = 1e-10
    deficiency_tol: float = 1e-12
    stochastic_tol: float = 1e-12
    blowup_threshold: float = 1e9
    max_squarings: int = 30


DEFAULT_POLICY = NumericPolicy()


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-D float64 array (copying if needed)."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValidationError(f"{name} contains non-finite entries")
    return a


def as_square(m, name: str = "matrix") -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Return ``v`` as a finite 1-D float64 array (copying if needed)."""
    a = np.asarray(v, dtype=np.float64)
    if a.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValidationError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of the norm-of-powers spectral radius estimate.

    ``status`` is one of ``"stable"``, ``"unstable"``, ``"inconclusive"``.
    A stable verdict carries ``bound`` with ``rho(M) <= bound < 1`` (this
    is a certificate: ``rho <= |M^k|^(1/k)`` for any k).  An unstable
    verdict carries the observed power norm as ``evidence``; it signals
    numeric blow-up, not a proof.  ``power`` is the matrix power at which
    the verdict was reached.
    """

    status: str
    bound: float | None = None
    evidence: float | None = None
    power: int | None = None

    @property
    def is_stable(self) -> bool:
        return self.status == "stable"

    @property
    def is_unstable(self) -> bool:
        return self.status == "unstable"


def linear_solve(m, rhs, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Solve ``M y = rhs`` by Gaussian elimination with partial pivoting.

    Parameters
    ----------
    m : array_like, shape (n, n)
    rhs : array_like, shape (n,)
    policy : NumericPolicy

    Returns
    -------
    numpy.ndarray
        Solution ``y`` with ``|M y - rhs|_inf <= rtol * (1 + |rhs|_inf)``.

    Raises
    ------
    SingularMatrix
        When a pivot falls below ``pivot_rtol * max|M|`` or the residual
        guarantee cannot be met (near-singular system).
    """
    a = as_square(m)
    b = as_vector(rhs)
    n = a.shape[0]
    if b.shape[0] != n:
        raise DimensionMismatch(f"rhs has length {b.shape[0]}, expected {n}")

    scale = float(np.abs(a).max()) if n else 0.0
    if scale == 0.0:
        raise SingularMatrix("matrix of zeros")
    pivot_floor = policy.pivot_rtol * scale

    aug = np.concatenate([a, b[:, None]], axis=1)
    for col in range(n):
        p = col + int(np.argmax(np.abs(aug[col:, col])))
        pivot = aug[p, col]
        if abs(pivot) < pivot_floor:
            raise SingularMatrix(
                f"pivot {pivot:.3e} below threshold {pivot_floor:.3e} at column {col}"
            )
        if p != col:
            aug[[col, p]] = aug[[p, col]]
        factors = aug[col + 1 :, col] / aug[col, col]
        aug[col + 1 :, col:] -= np.outer(factors, aug[col, col:])

    y = np.empty(n)
    for i in range(n - 1, -1, -1):
        y[i] = (aug[i, n] - aug[i, i + 1 : n] @ y[i + 1 :]) / aug[i, i]

    residual = float(np.abs(a @ y - b).max())
    if not residual <= policy.solve_residual_rtol * (1.0 + float(np.abs(b).max())):
        raise SingularMatrix(
            f"residual {residual:.3e} exceeds guarantee; system is near-singular"
        )
    return y


def spectral_radius_estimate(m, policy: NumericPolicy = DEFAULT_POLICY) -> StabilityVerdict:
    """Certify Schur stability via norms of repeated squarings.

    Computes ``|M^(2^j)|_inf`` for ``j = 0..max_squarings``.  Any power
    norm below one proves ``rho(M) < 1`` (stable, with the bound
    ``norm^(1/power)``); a power norm above ``blowup_threshold`` is
    reported as unstable by growth.  Otherwise the verdict is
    inconclusive -- a legal answer the caller must handle (e.g. matrices
    with ``rho(M) = 1`` never produce a certificate either way).
    """
    a = as_square(m)
    n = a.shape[0]
    eps = np.finfo(np.float64).eps
    power = 1
    b = a.copy()
    for j in range(policy.max_squarings + 1):
        norm = float(np.abs(b).sum(axis=1).max())
        if not np.isfinite(norm) or norm > policy.blowup_threshold:
            return StabilityVerdict("unstable", evidence=norm, power=power)
        # a certificate must clear the worst-case rounding budget of the
        # repeated squarings (~power * n * eps for norms near one), else
        # drift alone could certify an exactly-stochastic matrix
        margin = policy.deficiency_tol + power * n * eps
        if norm < 1.0 - margin:
            bound = norm ** (1.0 / power) if norm > 0.0 else 0.0
            return StabilityVerdict("stable", bound=bound, power=power)
        if j < policy.max_squarings:
            b = b @ b
            power *= 2
    return StabilityVerdict("inconclusive")


def laplacian_pseudo_solve(lap, rhs, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Minimum-norm solution of ``L x = rhs`` for a graph Laplacian ``L``.

    Requires ``L`` symmetric with zero row sums and ``rhs`` orthogonal to
    the all-ones vector.  Instead of an SVD, exploits that ``rhs`` is
    balanced: solves the rank-one regularised system
    ``(L + (1/n) 1 1^T) y = rhs`` and de-means ``y``, which returns the
    unique zero-mean solution.

    Raises
    ------
    NotBalanced
        If ``|sum(rhs)|`` exceeds ``balance_atol``.
    SingularMatrix
        If the regularised system is singular (disconnected graph).
    """
    a = as_square(lap, "laplacian")
    b = as_vector(rhs)
    n = a.shape[0]
    if b.shape[0] != n:
        raise DimensionMismatch(f"rhs has length {b.shape[0]}, expected {n}")
    scale = max(1.0, float(np.abs(a).max()))
    if float(np.abs(a - a.T).max()) > policy.balance_atol * scale:
        raise ValidationError("matrix is not symmetric")
    if float(np.abs(a.sum(axis=1)).max()) > policy.balance_atol * scale:
        raise ValidationError("matrix rows do not sum to zero; not a Laplacian")
    if abs(float(b.sum())) > policy.balance_atol:
        raise NotBalanced(f"sum(rhs) = {b.sum():.3e} exceeds {policy.balance_atol:.1e}")

    regularised = a + np.full((n, n), 1.0 / n)
    y = linear_solve(regularised, b, policy)
    return y - y.mean()
