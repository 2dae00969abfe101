"""Relative localization from noisy edge measurements.

Nodes of an oriented graph hold unknown scalar states; each edge (i, j)
carries a measurement ``b_ij = s_i - s_j + noise``.  The least-squares
estimate is the minimum-norm solution of the normal equations on the
graph Laplacian.  Three routes are provided:

* :func:`ls_oracle` -- direct pseudo-solve (the ground truth),
* :func:`grad_descent` -- the synchronous gradient iteration,
* :func:`run_gossip_localization` -- asynchronous pairwise updates with
  per-node local clocks and per-node time-averages; the raw estimates
  oscillate under measurement noise, while the time-averages settle on
  the least-squares solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _fastloops
from .affine import AffineSystem, SyncTrajectory, iterate_sync
from .errors import (
    DimensionMismatch,
    EdgeNotInGraph,
    TauTooLarge,
    ValidationError,
)
from .numerics import DEFAULT_POLICY, NumericPolicy, as_vector, laplacian_pseudo_solve
from .random_engine import (
    STREAM_EDGES,
    STREAM_MEASUREMENTS,
    KernelDistribution,
    make_stream,
)
from .trajectory import TrajectoryLog, log_points


@dataclass(frozen=True)
class OrientedGraph:
    """Undirected measurement topology with a fixed edge orientation.

    Edges are ordered pairs ``(i, j)`` with ``i < j``; the orientation
    only fixes measurement signs.  At least three nodes, no duplicates.
    """

    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 3:
            raise ValidationError(f"graph needs at least 3 nodes, got {self.n}")
        seen = set()
        norm = []
        for i, j in self.edges:
            i, j = int(i), int(j)
            if not 0 <= i < self.n or not 0 <= j < self.n:
                raise ValidationError(f"edge ({i}, {j}) references a node outside 0..{self.n - 1}")
            if i >= j:
                raise ValidationError(f"oriented edge ({i}, {j}) must satisfy i < j")
            if (i, j) in seen:
                raise ValidationError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            norm.append((i, j))
        object.__setattr__(self, "edges", tuple(norm))
        if not norm:
            raise ValidationError("graph has no edges")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_index(self) -> dict:
        return {e: k for k, e in enumerate(self.edges)}

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    @cached_property
    def is_weakly_connected(self) -> bool:
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n


def path_graph(n: int) -> OrientedGraph:
    return OrientedGraph(n, tuple((i, i + 1) for i in range(n - 1)))


def complete_graph(n: int) -> OrientedGraph:
    return OrientedGraph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def incidence_matrix(graph: OrientedGraph) -> np.ndarray:
    """|E| x n matrix with +1 at the tail and -1 at the head of each edge."""
    a = np.zeros((graph.edge_count, graph.n))
    for e, (i, j) in enumerate(graph.edges):
        a[e, i] = 1.0
        a[e, j] = -1.0
    return a


def graph_laplacian(graph: OrientedGraph) -> np.ndarray:
    a = incidence_matrix(graph)
    return a.T @ a


@dataclass(frozen=True)
class MeasurementSet:
    """One scalar measurement per edge, in the graph's edge order."""

    values: np.ndarray
    sigma: float = 0.0
    true_state: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", as_vector(self.values, "measurements"))
        if self.sigma < 0.0:
            raise ValidationError("sigma must be nonnegative")
        if self.true_state is not None:
            object.__setattr__(self, "true_state", as_vector(self.true_state, "true state"))


def synth_measurements(
    graph: OrientedGraph, s, sigma: float, seed: int
) -> MeasurementSet:
    """Synthesise ``b = A s + noise`` with i.i.d. Gaussian noise of std ``sigma``.

    Noise comes from the measurement stream of ``seed``, so a fixed seed
    reproduces measurements bit-for-bit.
    """
    s = as_vector(s, "true state")
    if s.shape[0] != graph.n:
        raise DimensionMismatch(f"state has length {s.shape[0]}, expected {graph.n}")
    if sigma < 0.0:
        raise ValidationError("sigma must be nonnegative")
    b = incidence_matrix(graph) @ s
    if sigma > 0.0:
        rng = make_stream(seed, STREAM_MEASUREMENTS)
        b = b + sigma * rng.standard_normal(graph.edge_count)
    return MeasurementSet(values=b, sigma=float(sigma), true_state=s)


def ls_oracle(
    graph: OrientedGraph, meas: MeasurementSet, policy: NumericPolicy = DEFAULT_POLICY
) -> np.ndarray:
    """Zero-mean minimum-norm least-squares estimate (the exact target)."""
    if meas.values.shape[0] != graph.edge_count:
        raise DimensionMismatch("one measurement per edge required")
    a = incidence_matrix(graph)
    return laplacian_pseudo_solve(a.T @ a, a.T @ meas.values, policy)


def gradient_system(graph: OrientedGraph, meas: MeasurementSet, tau: float) -> AffineSystem:
    """The affine form of the gradient iteration: ``P = (I - tau L) Omega``, ``u = tau A^T b``."""
    a = incidence_matrix(graph)
    lap = a.T @ a
    omega = np.eye(graph.n) - np.full((graph.n, graph.n), 1.0 / graph.n)
    p = (np.eye(graph.n) - tau * lap) @ omega
    u = tau * (a.T @ meas.values)
    return AffineSystem(p, u)


def grad_descent(
    graph: OrientedGraph,
    meas: MeasurementSet,
    tau: float,
    steps: int,
    force: bool = False,
) -> SyncTrajectory:
    """Synchronous gradient descent from the zero state.

    ``tau`` must stay below ``1 / max_degree`` for convergence; at or
    above the threshold the call fails unless ``force=True``.
    """
    if tau <= 0.0:
        raise ValidationError("tau must be positive")
    limit = 1.0 / graph.max_degree
    if tau >= limit and not force:
        raise TauTooLarge(f"tau = {tau:.6g} >= 1/max_degree = {limit:.6g}")
    system = gradient_system(graph, meas, tau)
    return iterate_sync(system, np.zeros(graph.n), steps)


@dataclass
class LocalizationGossipState:
    """Per-node triple: raw estimate, local clock, clock-averaged estimate."""

    x: np.ndarray
    kappa: np.ndarray
    xtilde: np.ndarray
    gamma: float

    @classmethod
    def initial(cls, n: int, gamma: float) -> "LocalizationGossipState":
        if not 0.0 < gamma < 1.0:
            raise ValidationError(f"gamma must be in (0, 1), got {gamma}")
        return cls(
            x=np.zeros(n),
            kappa=np.zeros(n, dtype=np.int64),
            xtilde=np.zeros(n),
            gamma=float(gamma),
        )


def gossip_localization_step(
    state: LocalizationGossipState,
    graph: OrientedGraph,
    edge: tuple,
    b_ij: float,
) -> LocalizationGossipState:
    """One pairwise update on ``edge`` (mutates and returns ``state``).

    Both endpoints move symmetrically toward agreement with the
    measurement using the pre-update value of the partner; their clocks
    advance and their time-averages absorb the new raw values.  The sum
    of all raw estimates is conserved.
    """
    if edge not in graph.edge_index:
        raise EdgeNotInGraph(f"edge {edge} not in graph")
    i, j = edge
    g = state.gamma
    x = state.x
    xi = x[i]
    xj = x[j]
    x[i] = (1.0 - g) * xi + g * xj + g * b_ij
    x[j] = (1.0 - g) * xj + g * xi - g * b_ij
    state.kappa[i] += 1
    state.kappa[j] += 1
    state.xtilde[i] = ((state.kappa[i] - 1) * state.xtilde[i] + x[i]) / state.kappa[i]
    state.xtilde[j] = ((state.kappa[j] - 1) * state.xtilde[j] + x[j]) / state.kappa[j]
    return state


def localization_kernels(
    graph: OrientedGraph, meas: MeasurementSet, gamma: float
) -> KernelDistribution:
    """Explicit per-edge kernel family of the gossip dynamics.

    For edge (i, j) with difference vector ``d = e_i - e_j`` the kernel
    is ``P = (I - gamma d d^T) Omega`` and ``u = gamma b_ij d``; the
    projector Omega is absorbed into the kernels because zero-sum states
    are invariant.  The uniform mixture reproduces the gradient system
    with ``tau = gamma / |E|``.
    """
    if not 0.0 < gamma < 1.0:
        raise ValidationError(f"gamma must be in (0, 1), got {gamma}")
    n = graph.n
    omega = np.eye(n) - np.full((n, n), 1.0 / n)
    pairs = []
    for e, (i, j) in enumerate(graph.edges):
        d = np.zeros(n)
        d[i] = 1.0
        d[j] = -1.0
        q = np.eye(n) - gamma * np.outer(d, d)
        pairs.append((q @ omega, gamma * meas.values[e] * d))
    return KernelDistribution.from_pairs(pairs)


@dataclass(eq=False)
class GossipHistory:
    """Full per-step record: sampled edge indices and every raw state."""

    edges_drawn: np.ndarray
    states: np.ndarray  # (steps + 1, n); row 0 is the initial state


@dataclass(eq=False)
class LocalizationGossipResult:
    state: LocalizationGossipState
    log: TrajectoryLog
    oracle: np.ndarray
    raw_window_variance: np.ndarray
    smoothed_window_variance: np.ndarray
    history: GossipHistory | None = None


def run_gossip_localization(
    graph: OrientedGraph,
    meas: MeasurementSet,
    gamma: float,
    steps: int,
    seed: int,
    thin: int = 0,
    window_frac: float = 0.1,
    full_history: bool = False,
    stream_path: tuple = (),
) -> LocalizationGossipResult:
    """Run the pairwise gossip estimator with uniform edge selection.

    Logs (every ``thin`` steps; default picks ~500 rows) the raw and
    averaged estimates together with their sup-norm errors against
    :func:`ls_oracle`.  Per-coordinate variances of both estimates over
    the trailing ``window_frac`` of the run quantify how much the
    time-average suppresses the oscillation of the raw state.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not graph.is_weakly_connected:
        raise ValidationError("graph must be weakly connected")
    state = LocalizationGossipState.initial(graph.n, gamma)
    oracle = ls_oracle(graph, meas)

    if thin <= 0:
        thin = max(1, steps // 500)
    points = log_points(steps, thin)

    edge_i = _fastloops._as_index_array([e[0] for e in graph.edges])
    edge_j = _fastloops._as_index_array([e[1] for e in graph.edges])
    rng = make_stream(seed, STREAM_EDGES, *stream_path)
    draws = rng.integers(0, graph.edge_count, size=steps).astype(np.int64)

    win_from = steps - max(1, int(round(steps * window_frac)))
    wsum_x = np.zeros(graph.n)
    wsq_x = np.zeros(graph.n)
    wsum_t = np.zeros(graph.n)
    wsq_t = np.zeros(graph.n)

    hist = np.empty((steps if full_history else 0, graph.n))

    rows = points.shape[0]
    log_x = np.empty((rows, graph.n))
    log_t = np.empty((rows, graph.n))
    log_k = np.empty((rows, graph.n), dtype=np.int64)
    log_x[0] = state.x
    log_t[0] = state.xtilde
    log_k[0] = state.kappa

    for row in range(1, rows):
        k0, k1 = int(points[row - 1]), int(points[row])
        seg = draws[k0:k1]
        seg_win = min(max(win_from - k0, 0), k1 - k0)
        seg_hist = hist[k0:k1] if full_history else hist
        _fastloops.localization_loop(
            state.x, state.kappa, state.xtilde, edge_i, edge_j, meas.values,
            state.gamma, seg, seg_win, wsum_x, wsq_x, wsum_t, wsq_t,
            seg_hist, full_history,
        )
        log_x[row] = state.x
        log_t[row] = state.xtilde
        log_k[row] = state.kappa

    wn = steps - win_from
    raw_var = wsq_x / wn - (wsum_x / wn) ** 2
    smooth_var = wsq_t / wn - (wsum_t / wn) ** 2

    log = TrajectoryLog(
        steps=points,
        columns={
            "x": log_x,
            "xtilde": log_t,
            "kappa": log_k,
            "err_x_inf": np.abs(log_x - oracle).max(axis=1),
            "err_xtilde_inf": np.abs(log_t - oracle).max(axis=1),
            "sum_x": log_x.sum(axis=1),
        },
        meta={"seed": seed, "steps": steps, "thin": thin, "gamma": gamma},
    )
    history = None
    if full_history:
        states = np.empty((steps + 1, graph.n))
        states[0] = 0.0
        states[1:] = hist
        history = GossipHistory(edges_drawn=draws, states=states)
    return LocalizationGossipResult(
        state=state,
        log=log,
        oracle=oracle,
        raw_window_variance=raw_var,
        smoothed_window_variance=smooth_var,
        history=history,
    )
