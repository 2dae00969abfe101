"""Friedkin-Johnsen opinion dynamics, synchronous and gossip.

Agents hold scalar beliefs anchored to fixed prejudices.  In the
synchronous model every agent simultaneously mixes its neighbours'
beliefs (weighted by the row-stochastic influence matrix W, scaled by
the susceptibility 1 - W_ii) with its own prejudice.  The gossip model
replaces the simultaneous round by random pairwise meetings: when agent
i meets agent j it keeps an ``openness`` share of a two-opinion blend
and re-anchors the rest to its prejudice.  The meeting coefficients are
calibrated so the *expected* meeting reproduces the synchronous update,
which makes the time-averaged gossip beliefs converge to the classical
equilibrium.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _fastloops
from .affine import AffineSystem
from .errors import (
    AssumptionViolated,
    DimensionMismatch,
    EdgeNotInGraph,
    InvariantViolation,
    NegativeEntry,
    NotRowStochastic,
)
from .numerics import DEFAULT_POLICY, NumericPolicy, as_square, as_vector, linear_solve
from .random_engine import STREAM_EDGES, STREAM_GRAPH, KernelDistribution, make_stream
from .trajectory import TrajectoryLog, log_points

_SELF_WEIGHT_EPS = 1e-15  # threshold for "this agent is stubborn"


@dataclass(frozen=True, eq=False)
class InfluenceNetwork:
    """Row-stochastic influence weights plus per-agent prejudices.

    The interaction graph is the support of W together with a structural
    self-loop at every node (a zero self-weight still counts as an edge).
    ``susceptibility[i] = 1 - W[i, i]`` is how much agent i listens to
    anyone at all.
    """

    weights: np.ndarray
    prejudices: np.ndarray

    def __post_init__(self):
        w = as_square(self.weights, "W")
        v = as_vector(self.prejudices, "prejudices")
        if v.shape[0] != w.shape[0]:
            raise DimensionMismatch(
                f"prejudices have length {v.shape[0]}, expected {w.shape[0]}"
            )
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "prejudices", v)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @cached_property
    def susceptibility(self) -> np.ndarray:
        return 1.0 - np.diag(self.weights)

    @cached_property
    def edges(self) -> tuple:
        """Support of W plus the structural self-loops, sorted."""
        found = {(i, i) for i in range(self.n)}
        rows, cols = np.nonzero(self.weights > 0.0)
        found.update(zip(rows.tolist(), cols.tolist()))
        return tuple(sorted(found))

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def out_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, _ in self.edges:
            deg[i] += 1
        return deg

    @cached_property
    def coupling_matrix(self) -> np.ndarray:
        """``Lambda W``: the state matrix of the synchronous dynamics."""
        return self.susceptibility[:, None] * self.weights

    @cached_property
    def anchor_input(self) -> np.ndarray:
        """``(I - Lambda) v``: the prejudice input of the synchronous dynamics."""
        return (1.0 - self.susceptibility) * self.prejudices


def build_network(w, v, policy: NumericPolicy = DEFAULT_POLICY) -> InfluenceNetwork:
    """Validate and wrap an influence matrix and prejudice vector."""
    w = as_square(w, "W")
    if np.any(w < 0.0):
        raise NegativeEntry("W has a negative entry")
    row_sums = w.sum(axis=1)
    bad = np.abs(row_sums - 1.0) > policy.stochastic_tol
    if bad.any():
        row = int(np.argmax(np.abs(row_sums - 1.0)))
        raise NotRowStochastic(f"row {row} of W sums to {row_sums[row]:.17g}")
    return InfluenceNetwork(weights=w, prejudices=as_vector(v, "prejudices"))


def random_influence_network(
    n: int,
    seed: int,
    extra_links: int | None = None,
    self_weight_range: tuple = (0.2, 0.6),
) -> InfluenceNetwork:
    """Random network in which every agent keeps a positive self-weight."""
    rng = make_stream(seed, STREAM_GRAPH)
    if extra_links is None:
        extra_links = 2 * n
    w = np.zeros((n, n))
    lo, hi = self_weight_range
    self_w = lo + (hi - lo) * rng.random(n)
    for i in range(n):
        others = [(i + 1) % n]  # ring keeps the graph connected
        w[i, others[0]] = 1.0
    for _ in range(extra_links):
        i = int(rng.integers(0, n))
        j = int(rng.integers(0, n))
        if i != j:
            w[i, j] += rng.random()
    for i in range(n):
        w[i, i] = 0.0
        total = w[i].sum()
        w[i] *= (1.0 - self_w[i]) / total
        w[i, i] = self_w[i]
    v = rng.uniform(-1.0, 1.0, size=n)
    return build_network(w, v)


def stubborn_reachability_check(net: InfluenceNetwork) -> bool:
    """True iff every agent has an influence path to some stubborn agent."""
    stubborn = np.diag(net.weights) > _SELF_WEIGHT_EPS
    if not stubborn.any():
        return False
    adj = net.weights > 0.0
    reached = stubborn.copy()
    while True:
        grown = reached | (adj @ reached)
        if np.array_equal(grown, reached):
            break
        reached = grown
    return bool(reached.all())


def fj_system(net: InfluenceNetwork) -> AffineSystem:
    """Affine form of the synchronous dynamics."""
    return AffineSystem(net.coupling_matrix, net.anchor_input)


def fj_sync_step(net: InfluenceNetwork, x) -> np.ndarray:
    """One simultaneous round of influence plus prejudice anchoring."""
    x = as_vector(x, "x")
    if x.shape[0] != net.n:
        raise DimensionMismatch(f"x has length {x.shape[0]}, expected {net.n}")
    return net.coupling_matrix @ x + net.anchor_input


def fj_fixed_point(net: InfluenceNetwork, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Equilibrium opinions: solve ``(I - Lambda W) x = (I - Lambda) v``.

    Requires stubborn reachability, which is exactly what makes the
    coupling matrix Schur stable.
    """
    if not stubborn_reachability_check(net):
        raise AssumptionViolated(
            "some agent cannot reach a stubborn agent; no stable equilibrium"
        )
    eye = np.eye(net.n)
    return linear_solve(eye - net.coupling_matrix, net.anchor_input, policy)


@dataclass(frozen=True, eq=False)
class GossipCoefficients:
    """Meeting coefficients: per-agent openness and partner mixing weights.

    ``openness[i]`` is the share of the pairwise blend agent i retains
    in a meeting (the rest re-anchors to the prejudice); ``mixing`` is
    the row-stochastic matrix of within-meeting partner weights.
    """

    openness: np.ndarray
    mixing: np.ndarray


def gossip_coefficients(
    net: InfluenceNetwork, policy: NumericPolicy = DEFAULT_POLICY
) -> GossipCoefficients:
    """Calibrate meeting coefficients so expected meetings match the synchronous round.

    For an agent with meeting degree d and susceptibility lam:
    ``openness = 1 - (1 - lam)/d`` (zero when the self-loop is the only
    edge), off-diagonal mixing ``lam W_ij / openness`` and the diagonal
    takes the remainder.  Row-stochasticity follows from the identity
    ``d * (1 - openness) = 1 - lam``; both properties are re-validated on
    the computed matrix to surface inputs outside the intended domain.
    """
    n = net.n
    lam = net.susceptibility
    deg = net.out_degrees
    openness = np.zeros(n)
    mixing = np.zeros((n, n))
    for i in range(n):
        if deg[i] == 1:
            # self-loop only: fully anchored meetings
            mixing[i, i] = 1.0
            continue
        h = 1.0 - (1.0 - lam[i]) / deg[i]
        openness[i] = h
        for j in np.nonzero(net.weights[i])[0]:
            if j != i:
                mixing[i, j] = lam[i] * net.weights[i, j] / h
        mixing[i, i] = (deg[i] * (1.0 - h) + h - (1.0 - lam[i] * net.weights[i, i])) / h

    if np.any(mixing < -policy.stochastic_tol):
        raise InvariantViolation("computed mixing matrix has a negative entry")
    row_err = float(np.abs(mixing.sum(axis=1) - 1.0).max())
    if row_err > policy.stochastic_tol:
        raise InvariantViolation(f"mixing rows deviate from 1 by {row_err:.3e}")
    if np.any(openness < 0.0) or np.any(openness > 1.0):
        raise InvariantViolation("openness outside [0, 1]")
    return GossipCoefficients(openness=openness, mixing=np.clip(mixing, 0.0, None))


@dataclass
class OpinionGossipState:
    """Current beliefs, their running time-average, and the step counter."""

    x: np.ndarray
    xbar: np.ndarray
    k: int

    @classmethod
    def initial(cls, net: InfluenceNetwork) -> "OpinionGossipState":
        # beliefs start at the prejudices
        return cls(x=net.prejudices.copy(), xbar=net.prejudices.copy(), k=0)


def gossip_opinion_step(
    state: OpinionGossipState,
    net: InfluenceNetwork,
    coeffs: GossipCoefficients,
    edge: tuple,
) -> OpinionGossipState:
    """One meeting on ``edge = (i, j)``: only agent i moves.

    A self-loop meeting (j = i) degenerates to pure prejudice anchoring.
    The running average absorbs the full belief vector.
    """
    if edge not in net.edge_set:
        raise EdgeNotInGraph(f"edge {edge} not in graph")
    i, j = edge
    g = coeffs.mixing[i, j]
    hi = coeffs.openness[i]
    x = state.x
    x[i] = hi * ((1.0 - g) * x[i] + g * x[j]) + (1.0 - hi) * net.prejudices[i]
    c = float(state.k + 1)  # states averaged so far (x(0) .. x(k))
    state.xbar = (state.xbar * c + x) / (c + 1.0)
    state.k += 1
    return state


def opinion_kernels(
    net: InfluenceNetwork, coeffs: GossipCoefficients | None = None
) -> KernelDistribution:
    """Explicit per-edge kernel family of the meeting dynamics."""
    if coeffs is None:
        coeffs = gossip_coefficients(net)
    n = net.n
    pairs = []
    for i, j in net.edges:
        p = np.eye(n)
        g = coeffs.mixing[i, j]
        hi = coeffs.openness[i]
        if i == j:
            p[i, i] = hi
        else:
            p[i, i] = hi * (1.0 - g)
            p[i, j] = hi * g
        u = np.zeros(n)
        u[i] = (1.0 - hi) * net.prejudices[i]
        pairs.append((p, u))
    return KernelDistribution.from_pairs(pairs)


@dataclass(eq=False)
class OpinionGossipResult:
    state: OpinionGossipState
    log: TrajectoryLog
    equilibrium: np.ndarray


def run_gossip_opinions(
    net: InfluenceNetwork,
    steps: int,
    seed: int,
    thin: int = 0,
    stream_path: tuple = (),
) -> OpinionGossipResult:
    """Run random pairwise meetings with uniform edge selection.

    Requires stubborn reachability.  Beliefs start at the prejudices.
    The log records beliefs, running averages and the sup-norm error of
    the average against the synchronous equilibrium.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    equilibrium = fj_fixed_point(net)  # also enforces reachability
    coeffs = gossip_coefficients(net)
    state = OpinionGossipState.initial(net)

    if thin <= 0:
        thin = max(1, steps // 500)
    points = log_points(steps, thin)
    edge_i = _fastloops._as_index_array([e[0] for e in net.edges])
    edge_j = _fastloops._as_index_array([e[1] for e in net.edges])
    edge_mix = np.array([coeffs.mixing[i, j] for i, j in net.edges])
    rng = make_stream(seed, STREAM_EDGES, *stream_path)
    draws = rng.integers(0, len(net.edges), size=steps).astype(np.int64)

    rows = points.shape[0]
    log_x = np.empty((rows, net.n))
    log_xbar = np.empty((rows, net.n))
    log_x[0] = state.x
    log_xbar[0] = state.xbar

    count = float(state.k + 1)
    for row in range(1, rows):
        k0, k1 = int(points[row - 1]), int(points[row])
        count = _fastloops.opinions_loop(
            state.x, state.xbar, edge_i, edge_j, edge_mix,
            coeffs.openness, net.prejudices, draws[k0:k1], count,
        )
        state.k = k1
        log_x[row] = state.x
        log_xbar[row] = state.xbar

    log = TrajectoryLog(
        steps=points,
        columns={
            "x": log_x,
            "xbar": log_xbar,
            "err_xbar_inf": np.abs(log_xbar - equilibrium).max(axis=1),
        },
        meta={"seed": seed, "steps": steps, "thin": thin},
    )
    return OpinionGossipResult(state=state, log=log, equilibrium=equilibrium)
