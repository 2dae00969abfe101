"""PageRank by synchronous power iteration and by edge gossip.

The ranking vector is the stochastic fixed point of
``x = (1-m) A x + (m/n) 1`` where ``A`` spreads each page's score over
its outgoing links.  The gossip variant activates one link per step and
leaks a vanishing share of every score to keep the vector stochastic;
its running time-average converges to the same ranking when the step
parameter ``r`` is matched to ``m`` and the edge count.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import _fastloops
from .affine import AffineSystem, SyncTrajectory, fixed_point, iterate_sync
from .errors import (
    DanglingNode,
    DimensionMismatch,
    EdgeNotInGraph,
    NotStochastic,
    ValidationError,
)
from .numerics import DEFAULT_POLICY, as_vector
from .random_engine import STREAM_EDGES, STREAM_GRAPH, KernelDistribution, make_stream
from .trajectory import TrajectoryLog, log_points


@dataclass(frozen=True)
class WebGraph:
    """Directed link graph; edge (i, j) means page i links to page j."""

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
            if (i, j) in seen:
                raise ValidationError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            norm.append((i, j))
        object.__setattr__(self, "edges", tuple(norm))
        out = np.zeros(self.n, dtype=np.int64)
        for i, _ in norm:
            out[i] += 1
        for node in range(self.n):
            if out[node] == 0:
                raise DanglingNode(node)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def out_degrees(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        for i, _ in self.edges:
            out[i] += 1
        return out


def three_cycle() -> WebGraph:
    return WebGraph(3, ((0, 1), (1, 2), (2, 0)))


def random_web_graph(n: int, extra_edges: int, seed: int) -> WebGraph:
    """Strongly connected random digraph: a full cycle plus random links."""
    rng = make_stream(seed, STREAM_GRAPH)
    edges = {(i, (i + 1) % n) for i in range(n)}
    while len(edges) < n + extra_edges:
        i = int(rng.integers(0, n))
        j = int(rng.integers(0, n))
        if i != j:
            edges.add((i, j))
    return WebGraph(n, tuple(sorted(edges)))


def link_matrix(graph: WebGraph) -> np.ndarray:
    """Column-stochastic link matrix: entry (j, i) is 1/out_degree(i) per link i->j."""
    a = np.zeros((graph.n, graph.n))
    out = graph.out_degrees
    for i, j in graph.edges:
        a[j, i] = 1.0 / out[i]
    return a


def pagerank_system(graph: WebGraph, m: float) -> AffineSystem:
    """Affine form of the teleporting power iteration: ``P = (1-m) A``, ``u = (m/n) 1``."""
    if not 0.0 < m < 1.0:
        raise ValidationError(f"m must be in (0, 1), got {m}")
    a = link_matrix(graph)
    return AffineSystem((1.0 - m) * a, np.full(graph.n, m / graph.n))


def power_method(graph: WebGraph, m: float, steps: int, x0) -> SyncTrajectory:
    """Synchronous iteration from a stochastic start; every iterate stays stochastic."""
    x = as_vector(x0, "x0")
    if x.shape[0] != graph.n:
        raise DimensionMismatch(f"x0 has length {x.shape[0]}, expected {graph.n}")
    if abs(float(x.sum()) - 1.0) > DEFAULT_POLICY.stochastic_tol or np.any(x < 0.0):
        raise NotStochastic("x0 must be a stochastic vector")
    return iterate_sync(pagerank_system(graph, m), x, steps)


class GossipStepParams(NamedTuple):
    """Step parameter of the gossip update and its mixing coefficient."""

    r: float
    alpha: float


def r_from_m(m: float, edge_count: int) -> GossipStepParams:
    """Match the gossip leak rate to the teleport fraction.

    ``r = m / (m - |E| m + |E|)`` makes the expected gossip kernel a
    lazy copy of the synchronous one with ``alpha = 1 / (m - |E| m + |E|)``;
    note ``r = alpha * m``.
    """
    if not 0.0 < m < 1.0:
        raise ValidationError(f"m must be in (0, 1), got {m}")
    if edge_count < 1:
        raise ValidationError("edge_count must be >= 1")
    denom = m - edge_count * m + edge_count
    return GossipStepParams(r=m / denom, alpha=1.0 / denom)


@dataclass
class PageRankGossipState:
    """Raw score vector, its running time-average, and the shared clock."""

    x: np.ndarray
    xbar: np.ndarray
    k: int
    m: float
    r: float

    @classmethod
    def initial(cls, x0, m: float, r: float) -> "PageRankGossipState":
        x = as_vector(x0, "x0").copy()
        if abs(float(x.sum()) - 1.0) > DEFAULT_POLICY.stochastic_tol:
            raise NotStochastic(f"x0 sums to {x.sum():.17g}, not 1")
        if np.any(x < -1e-15):
            raise NotStochastic("x0 has negative entries")
        np.clip(x, 0.0, None, out=x)
        if not 0.0 < m < 1.0:
            raise ValidationError(f"m must be in (0, 1), got {m}")
        if not 0.0 < r < 1.0:
            raise ValidationError(f"r must be in (0, 1), got {r}")
        return cls(x=x, xbar=x.copy(), k=0, m=float(m), r=float(r))


def gossip_pagerank_step(
    state: PageRankGossipState, graph: WebGraph, edge: tuple
) -> PageRankGossipState:
    """One link activation (mutates and returns ``state``).

    The tail of the activated link ships a 1/out_degree share of its
    score to the head, every node keeps the fraction ``1 - r`` of its
    score and receives the uniform leak ``r/n``, so the total stays one.
    The running average absorbs the new vector.
    """
    if edge not in graph.edge_set:
        raise EdgeNotInGraph(f"edge {edge} not in graph")
    i, j = edge
    x = state.x
    omr = 1.0 - state.r
    d = omr * (x[i] / graph.out_degrees[i])
    x *= omr
    x += state.r / graph.n
    x[i] -= d
    x[j] += d
    c = float(state.k + 1)  # states averaged so far (x(0) .. x(k))
    state.xbar = (state.xbar * c + x) / (c + 1.0)
    state.k += 1
    return state


def pagerank_kernels(graph: WebGraph, m: float) -> tuple:
    """Explicit per-edge kernel family; returns ``(distribution, alpha)``.

    For the link (i, j) the kernel matrix rescales everything by
    ``1 - r`` after moving a 1/out_degree share from i to j, and the
    input is the uniform leak ``(r/n) 1``.
    """
    params = r_from_m(m, graph.edge_count)
    n = graph.n
    out = graph.out_degrees
    leak = np.full(n, params.r / n)
    pairs = []
    for i, j in graph.edges:
        a_k = np.eye(n)
        a_k[i, i] -= 1.0 / out[i]
        a_k[j, i] += 1.0 / out[i]
        pairs.append(((1.0 - params.r) * a_k, leak))
    return KernelDistribution.from_pairs(pairs), params.alpha


@dataclass(eq=False)
class PageRankGossipResult:
    state: PageRankGossipState
    log: TrajectoryLog
    pi: np.ndarray


def run_gossip_pagerank(
    graph: WebGraph,
    m: float,
    steps: int,
    seed: int,
    x0=None,
    thin: int = 0,
    dump_every: int = 0,
    stream_path: tuple = (),
) -> PageRankGossipResult:
    """Run the edge-gossip ranking with uniform link selection.

    The log records, every ``thin`` steps, the l1 distance of the
    running average from the exact ranking (computed by the fixed-point
    oracle), plus the minimum entry and entry sum of the raw vector.
    ``dump_every > 0`` additionally stores full score vectors on that
    coarser grid.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if x0 is None:
        x0 = np.full(graph.n, 1.0 / graph.n)
    params = r_from_m(m, graph.edge_count)
    state = PageRankGossipState.initial(x0, m, params.r)
    pi = fixed_point(pagerank_system(graph, m))

    if thin <= 0:
        thin = max(1, steps // 500)
    points = log_points(steps, thin)
    if dump_every > 0:
        dump_grid = set(range(0, steps + 1, dump_every)) | {steps}
        points = np.unique(np.concatenate([points, np.fromiter(dump_grid, dtype=np.int64)]))
    else:
        dump_grid = set()
    edge_i = _fastloops._as_index_array([e[0] for e in graph.edges])
    edge_j = _fastloops._as_index_array([e[1] for e in graph.edges])
    out_deg = graph.out_degrees.astype(np.float64)
    rng = make_stream(seed, STREAM_EDGES, *stream_path)
    draws = rng.integers(0, graph.edge_count, size=steps).astype(np.int64)

    rows = points.shape[0]
    l1_err = np.empty(rows)
    min_entry = np.empty(rows)
    sum_entries = np.empty(rows)
    l1_err[0] = float(np.abs(state.xbar - pi).sum())
    min_entry[0] = float(state.x.min())
    sum_entries[0] = float(state.x.sum())

    dump_rows = []
    dump_steps = []
    if dump_every > 0:
        dump_rows.append(state.x.copy())
        dump_steps.append(0)

    count = float(state.k + 1)
    for row in range(1, rows):
        k0, k1 = int(points[row - 1]), int(points[row])
        count = _fastloops.pagerank_loop(
            state.x, state.xbar, out_deg, edge_i, edge_j,
            draws[k0:k1], state.r, count,
        )
        state.k = k1
        l1_err[row] = float(np.abs(state.xbar - pi).sum())
        min_entry[row] = float(state.x.min())
        sum_entries[row] = float(state.x.sum())
        if k1 in dump_grid:
            dump_rows.append(state.x.copy())
            dump_steps.append(k1)

    columns = {
        "l1_error_vs_pi": l1_err,
        "min_entry": min_entry,
        "sum_entries": sum_entries,
    }
    log = TrajectoryLog(
        steps=points,
        columns=columns,
        meta={"seed": seed, "steps": steps, "thin": thin, "m": m, "r": params.r},
    )
    if dump_every > 0:
        log.meta["dump_steps"] = np.asarray(dump_steps, dtype=np.int64)
        log.meta["dump_states"] = np.asarray(dump_rows)
    return PageRankGossipResult(state=state, log=log, pi=pi)
