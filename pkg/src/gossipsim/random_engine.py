"""Randomized affine dynamics and the time-averaging machinery.

A run draws i.i.d. indices from a finite family of affine kernels
``(P_t, u_t)`` and iterates ``x <- P x + u``.  Such runs typically
oscillate forever; what converges is the Cesaro time-average, provided
the *expected* kernel is a lazy version of a Schur-stable map:

    E[P] = (1 - alpha) I + alpha P_sync,   E[u] = alpha u_sync

for some ``alpha`` in (0, 1].  :func:`verify_expectation` checks that
identity exactly on an explicit kernel family, and the averagers,
backward process and log-norm diagnostic in this module provide the
evidence that the time-averages land on the fixed point of
``(P_sync, u_sync)``.

Randomness discipline: every consumer owns a named Philox stream derived
from ``(seed, stream path)``, so identical seeds reproduce trajectories
bit-for-bit and replications are independent by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .affine import AffineSystem
from .errors import DegenerateProduct, DimensionMismatch, ValidationError
from .numerics import DEFAULT_POLICY, as_square, as_vector
from .trajectory import TrajectoryLog, log_points

# Stream identifiers: the first element of a Philox spawn key names the
# consumer, so different subsystems can never collide on one seed.
STREAM_KERNELS = 0
STREAM_EDGES = 1
STREAM_MEASUREMENTS = 2
STREAM_TRUE_STATE = 3
STREAM_GRAPH = 4

_DRAW_CHUNK = 8192


def make_stream(seed: int, *path: int) -> np.random.Generator:
    """Counter-based generator for the named stream ``(seed, *path)``."""
    seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True, eq=False)
class KernelDistribution:
    """A finite family of affine kernels with selection probabilities.

    ``p_stack`` has shape (m, n, n), ``u_stack`` shape (m, n) and
    ``probs`` shape (m,); ``probs`` must be a probability vector.
    """

    p_stack: np.ndarray
    u_stack: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p_stack, dtype=np.float64)
        u = np.asarray(self.u_stack, dtype=np.float64)
        w = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 3 or p.shape[1] != p.shape[2]:
            raise DimensionMismatch(f"p_stack must be (m, n, n), got {p.shape}")
        if u.shape != p.shape[:2]:
            raise DimensionMismatch(f"u_stack must be {p.shape[:2]}, got {u.shape}")
        if w.shape != (p.shape[0],):
            raise DimensionMismatch(f"probs must have length {p.shape[0]}")
        if not (np.isfinite(p).all() and np.isfinite(u).all()):
            raise ValidationError("kernels contain non-finite entries")
        if np.any(w < 0.0):
            raise ValidationError("probabilities must be nonnegative")
        if abs(float(w.sum()) - 1.0) > DEFAULT_POLICY.stochastic_tol:
            raise ValidationError(f"probabilities sum to {w.sum():.17g}, not 1")
        object.__setattr__(self, "p_stack", p)
        object.__setattr__(self, "u_stack", u)
        object.__setattr__(self, "probs", w)

    @classmethod
    def from_pairs(cls, pairs, probs=None) -> "KernelDistribution":
        """Build from a list of ``(P, u)`` pairs; uniform probabilities by default."""
        ps = [as_square(p, "kernel matrix") for p, _ in pairs]
        us = [as_vector(u, "kernel input") for _, u in pairs]
        if probs is None:
            probs = np.full(len(ps), 1.0 / len(ps))
        return cls(np.stack(ps), np.stack(us), np.asarray(probs, dtype=np.float64))

    @property
    def size(self) -> int:
        return self.p_stack.shape[0]

    @property
    def dim(self) -> int:
        return self.p_stack.shape[1]

    def expected_p(self) -> np.ndarray:
        """Exact probability-weighted mean of the kernel matrices."""
        return np.einsum("m,mij->ij", self.probs, self.p_stack)

    def expected_u(self) -> np.ndarray:
        return self.probs @ self.u_stack


@dataclass(frozen=True)
class ExpectationReport:
    """Entrywise deviations of the kernel means from the lazy target."""

    p_deviation: float
    u_deviation: float
    alpha: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.p_deviation <= self.tolerance and self.u_deviation <= self.tolerance


def verify_expectation(
    dist: KernelDistribution,
    p,
    u,
    alpha: float,
    tolerance: float = 1e-12,
) -> ExpectationReport:
    """Check ``E[P] = (1-alpha) I + alpha P`` and ``E[u] = alpha u`` exactly.

    The expectations are computed by exact probability-weighted sums over
    the kernel family, so a pass certifies the ergodicity hypothesis for
    the target system up to floating-point rounding.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    p = as_square(p, "target P")
    u = as_vector(u, "target u")
    if p.shape[0] != dist.dim or u.shape[0] != dist.dim:
        raise DimensionMismatch("target system dimension differs from kernels")
    lazy_p = (1.0 - alpha) * np.eye(dist.dim) + alpha * p
    p_dev = float(np.abs(dist.expected_p() - lazy_p).max())
    u_dev = float(np.abs(dist.expected_u() - alpha * u).max())
    return ExpectationReport(p_dev, u_dev, alpha, tolerance)


class ForwardProcess:
    """Single-owner randomized iteration ``x <- P_theta x + u_theta``.

    Kernel indices are drawn from the distribution's probabilities using
    the process's own stream; draws are buffered in blocks, so a process
    is deterministic given ``(seed, stream_path)`` but must not share its
    generator with other consumers.
    """

    def __init__(self, dist: KernelDistribution, x0, seed: int, stream_path: tuple = ()):
        x = as_vector(x0, "x0")
        if x.shape[0] != dist.dim:
            raise DimensionMismatch(f"x0 has length {x.shape[0]}, expected {dist.dim}")
        self._dist = dist
        self._x = x.copy()
        self._k = 0
        self._rng = make_stream(seed, STREAM_KERNELS, *stream_path)
        self._buffer = np.empty(0, dtype=np.int64)
        self._pos = 0

    @property
    def state(self) -> np.ndarray:
        return self._x

    @property
    def steps_taken(self) -> int:
        return self._k

    @property
    def distribution(self) -> KernelDistribution:
        return self._dist

    def _next_index(self) -> int:
        if self._pos >= self._buffer.shape[0]:
            self._buffer = self._rng.choice(
                self._dist.size, size=_DRAW_CHUNK, p=self._dist.probs
            ).astype(np.int64)
            self._pos = 0
        idx = self._buffer[self._pos]
        self._pos += 1
        return int(idx)

    def sample_step(self) -> np.ndarray:
        """Draw a kernel, apply it, and return a copy of the new state."""
        t = self._next_index()
        self._x = self._dist.p_stack[t] @ self._x + self._dist.u_stack[t]
        self._k += 1
        return self._x.copy()


class CesaroAverager:
    """Running arithmetic mean, kept in incremental form.

    The update ``mean += (x - mean) / count`` avoids the cancellation
    that a rescaled-sum form would accumulate over 1e6-1e7 samples.
    """

    def __init__(self, dim: int):
        self._mean = np.zeros(dim)
        self._count = 0

    @property
    def mean(self) -> np.ndarray:
        return self._mean.copy()

    @property
    def count(self) -> int:
        return self._count

    def update(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != self._mean.shape:
            raise DimensionMismatch(f"sample has shape {x.shape}, expected {self._mean.shape}")
        self._count += 1
        self._mean += (x - self._mean) / self._count
        return self._mean.copy()


class WeightedAverager:
    """Average over a 0/1-weighted subsequence of samples.

    The state is the exact pair (weighted sum, weight total); ``value``
    is ``None`` until the first nonzero weight arrives (an undefined
    average is a legal state, not an error).
    """

    def __init__(self, dim: int):
        self._sum = np.zeros(dim)
        self._total = 0

    @property
    def weight_total(self) -> int:
        return self._total

    @property
    def value(self) -> np.ndarray | None:
        if self._total == 0:
            return None
        return self._sum / self._total

    def update(self, weight, x) -> np.ndarray | None:
        w = int(weight)
        if w not in (0, 1):
            raise ValueError(f"weights must be 0 or 1, got {weight!r}")
        if w:
            x = np.asarray(x, dtype=np.float64)
            if x.shape != self._sum.shape:
                raise DimensionMismatch(
                    f"sample has shape {x.shape}, expected {self._sum.shape}"
                )
            self._sum += x
            self._total += 1
        return self.value


class BackwardProcess:
    """Kernels composed in arrival order *behind* the initial condition.

    After k steps fed with kernels ``K_0 .. K_{k-1}`` the accumulators
    hold ``M = P_0 P_1 ... P_{k-1}`` and ``s = sum_l P_0 ... P_{l-1} u_l``,
    so the iterate ``M x0 + s`` equals the forward iterate with the
    kernel order reversed.  At any fixed k it has the same distribution
    as the forward iterate, but along a path it converges whenever the
    products contract -- which is what makes it the analysis tool.
    """

    def __init__(self, dim: int):
        self._m = np.eye(dim)
        self._s = np.zeros(dim)
        self._k = 0

    @property
    def steps_taken(self) -> int:
        return self._k

    @property
    def product(self) -> np.ndarray:
        return self._m.copy()

    def backward_step(self, p_k, u_k, x0) -> np.ndarray:
        """Absorb one kernel and return the backward iterate from ``x0``."""
        p = as_square(p_k, "P")
        u = as_vector(u_k, "u")
        x = as_vector(x0, "x0")
        n = self._m.shape[0]
        if p.shape[0] != n or u.shape[0] != n or x.shape[0] != n:
            raise DimensionMismatch("kernel dimension differs from process")
        self._s = self._s + self._m @ u
        self._m = self._m @ p
        self._k += 1
        return self._m @ x + self._s


def backward_path(
    dist: KernelDistribution, x0, steps: int, seed: int, stream_path: tuple = ()
) -> np.ndarray:
    """Backward iterates along one sampled path; row k is the iterate after k steps."""
    x = as_vector(x0, "x0")
    rng = make_stream(seed, STREAM_KERNELS, *stream_path)
    draws = rng.choice(dist.size, size=steps, p=dist.probs)
    proc = BackwardProcess(dist.dim)
    out = np.empty((steps + 1, dist.dim))
    out[0] = x
    for k in range(steps):
        t = int(draws[k])
        out[k + 1] = proc.backward_step(dist.p_stack[t], dist.u_stack[t], x)
    return out


def forward_ensemble(
    dist: KernelDistribution, x0, steps: int, reps: int, seed: int
) -> np.ndarray:
    """Forward iterates at time ``steps`` for ``reps`` independent paths.

    Vectorised over replications by grouping same-kernel draws, which is
    what makes 1e4-replication moment checks cheap at desk scale.
    """
    x = as_vector(x0, "x0")
    rng = make_stream(seed, STREAM_KERNELS)
    draws = rng.choice(dist.size, size=(reps, steps), p=dist.probs)
    states = np.tile(x, (reps, 1))
    for t in range(steps):
        idx = draws[:, t]
        for theta in range(dist.size):
            mask = idx == theta
            if mask.any():
                states[mask] = states[mask] @ dist.p_stack[theta].T + dist.u_stack[theta]
    return states


def backward_ensemble(
    dist: KernelDistribution, x0, steps: int, reps: int, seed: int
) -> np.ndarray:
    """Backward iterates at time ``steps`` for ``reps`` independent paths."""
    x = as_vector(x0, "x0")
    rng = make_stream(seed, STREAM_KERNELS)
    draws = rng.choice(dist.size, size=(reps, steps), p=dist.probs)
    n = dist.dim
    prod = np.tile(np.eye(n), (reps, 1, 1))
    acc = np.zeros((reps, n))
    for t in range(steps):
        idx = draws[:, t]
        for theta in range(dist.size):
            mask = idx == theta
            if mask.any():
                acc[mask] += prod[mask] @ dist.u_stack[theta]
                prod[mask] = prod[mask] @ dist.p_stack[theta]
    return prod @ x + acc


@dataclass(frozen=True)
class LyapunovEstimate:
    """Monte Carlo estimate of the product-norm growth rate."""

    value: float
    std_error: float
    horizon: int
    replications: int


def lyapunov_diagnostic(
    dist: KernelDistribution, horizon: int, replications: int, seed: int
) -> LyapunovEstimate:
    """Estimate ``(1/k) E[log |P_1 ... P_k|_1]`` at ``k = horizon``.

    A clearly negative value is evidence (not proof) that the sampled
    backward products contract, hence that backward paths converge.
    Products are renormalised every step so the log-norm is exact even
    when the raw product would underflow.

    Raises
    ------
    DegenerateProduct
        When a sampled product collapses to exact zero norm, where the
        log-norm is -inf and the average is meaningless.
    """
    if horizon < 1 or replications < 1:
        raise ValueError("horizon and replications must be >= 1")
    rng = make_stream(seed, STREAM_KERNELS)
    per_rep = np.empty(replications)
    for rep in range(replications):
        draws = rng.choice(dist.size, size=horizon, p=dist.probs)
        prod = np.eye(dist.dim)
        log_norm = 0.0
        for t in range(horizon):
            prod = prod @ dist.p_stack[int(draws[t])]
            norm = float(np.abs(prod).sum(axis=0).max())  # l1 operator norm
            if norm == 0.0:
                raise DegenerateProduct(
                    f"product norm underflowed to 0 at step {t + 1} "
                    f"of replication {rep} (log-norm -inf)"
                )
            log_norm += np.log(norm)
            prod /= norm
        per_rep[rep] = log_norm / horizon
    value = float(per_rep.mean())
    if replications > 1:
        std_error = float(per_rep.std(ddof=1) / np.sqrt(replications))
    else:
        std_error = float("nan")
    return LyapunovEstimate(value, std_error, horizon, replications)


@dataclass(eq=False)
class ErgodicRunResult:
    """Final Cesaro mean, final raw state, and the optional thinned log."""

    mean: np.ndarray
    final_state: np.ndarray
    log: TrajectoryLog | None


def run_ergodic(
    dist: KernelDistribution,
    x0,
    steps: int,
    seed: int,
    thin: int = 0,
    stream_path: tuple = (),
) -> ErgodicRunResult:
    """Drive a forward process and its Cesaro averager together.

    The averager sees ``x(0), x(1), ..., x(steps)``, so the returned mean
    is the time-average over steps+1 states.  ``thin > 0`` records the
    state and running mean every ``thin`` steps (plus the final step).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    proc = ForwardProcess(dist, x0, seed, stream_path)
    avg = CesaroAverager(dist.dim)
    avg.update(proc.state)

    log = None
    if thin > 0:
        points = log_points(steps, thin)
        states = np.empty((points.shape[0], dist.dim))
        means = np.empty_like(states)
        states[0] = proc.state
        means[0] = avg.mean
        next_row = 1
    for k in range(1, steps + 1):
        x = proc.sample_step()
        mean = avg.update(x)
        if thin > 0 and next_row < points.shape[0] and k == points[next_row]:
            states[next_row] = x
            means[next_row] = mean
            next_row += 1
    if thin > 0:
        log = TrajectoryLog(
            steps=points,
            columns={"state": states, "mean": means},
            meta={"seed": seed, "steps": steps, "thin": thin},
        )
    return ErgodicRunResult(mean=avg.mean, final_state=proc.state.copy(), log=log)


def expected_system(dist: KernelDistribution) -> AffineSystem:
    """The affine system driven by the exact kernel means ``(E[P], E[u])``."""
    return AffineSystem(dist.expected_p(), dist.expected_u())


def ecdf_distance(samples_a: np.ndarray, samples_b: np.ndarray) -> np.ndarray:
    """Per-coordinate sup distance between two empirical CDFs.

    Offered as an optional distributional report for forward/backward
    comparisons; moment checks are the load-bearing tests because ECDF
    distances are statistically fragile at desk-scale replication counts.
    """
    a = np.atleast_2d(np.asarray(samples_a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(samples_b, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch("sample sets have different dimension")
    out = np.empty(a.shape[1])
    for c in range(a.shape[1]):
        grid = np.sort(np.concatenate([a[:, c], b[:, c]]))
        fa = np.searchsorted(np.sort(a[:, c]), grid, side="right") / a.shape[0]
        fb = np.searchsorted(np.sort(b[:, c]), grid, side="right") / b.shape[0]
        out[c] = np.abs(fa - fb).max()
    return out
