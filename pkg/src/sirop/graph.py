"""Transmission and opinion networks.

Node indices are 0-based. An edge ``(i, j, w)`` puts weight ``w`` on matrix
entry ``(i, j)``: the influence of community ``j`` on community ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class GraphError(ValueError):
    """Raised when a network violates its structural requirements."""


class SelfLoopError(GraphError):
    pass


class WeightFloorError(GraphError):
    pass


class NotStronglyConnectedError(GraphError):
    def __init__(self, unreachable):
        self.unreachable = list(unreachable)
        shown = ", ".join(f"{i}->{j}" for i, j in self.unreachable[:20])
        more = "" if len(self.unreachable) <= 20 else f" (+{len(self.unreachable) - 20} more)"
        super().__init__(f"graph is not strongly connected; no path for pairs {shown}{more}")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _reach(adj, start):
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(adj[u]):
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return seen


def _flow(adjacency):
    # entry (i, j) != 0 means j influences i, i.e. a directed edge j -> i
    return (np.asarray(adjacency) != 0).T


def unreachable_pairs(adjacency) -> list[tuple[int, int]]:
    """Ordered pairs ``(u, v)`` with no directed path from ``u`` to ``v``."""
    flow = _flow(adjacency)
    n = flow.shape[0]
    pairs = []
    for u in range(n):
        seen = _reach(flow, u)
        pairs.extend((u, v) for v in range(n) if v != u and not seen[v])
    return pairs


def is_strongly_connected(adjacency) -> bool:
    """True iff every node reaches every other node along nonzero entries.

    Uses one forward and one reverse sweep from node 0.
    """
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency must be square")
    n = a.shape[0]
    if n == 1:
        return True
    flow = _flow(a)
    return bool(_reach(flow, 0).all() and _reach(flow.T, 0).all())


def _edges_to_matrix(n, edges):
    m = np.zeros((n, n))
    for i, j, w in edges:
        i, j = int(i), int(j)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise SelfLoopError(f"self-loop on node {i} is not allowed")
        if m[i, j] != 0:
            raise GraphError(f"duplicate edge ({i}, {j})")
        m[i, j] = float(w)
    return m


@dataclass(frozen=True, eq=False)
class TransmissionMatrix:
    """Disease transmission rates ``beta_ij`` with the common floor ``beta_min``."""

    entries: np.ndarray
    beta_min: float

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))
        object.__setattr__(self, "beta_min", float(self.beta_min))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def support(self) -> np.ndarray:
        return (self.entries > 0).astype(float)

    @property
    def floor_matrix(self) -> np.ndarray:
        """``beta_min`` on the support of the rates, zero elsewhere."""
        return self.beta_min * self.support


@dataclass(frozen=True, eq=False)
class OpinionNetwork:
    """Opinion influence weights and their Laplacian ``diag(row sums) - A``."""

    adjacency: np.ndarray
    laplacian: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = _frozen(self.adjacency)
        object.__setattr__(self, "adjacency", a)
        lap = np.diag(a.sum(axis=1)) - a
        lap.setflags(write=False)
        object.__setattr__(self, "laplacian", lap)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


@dataclass(frozen=True, eq=False)
class RecoveryRates:
    gamma: np.ndarray
    gamma_min: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", _frozen(self.gamma))
        object.__setattr__(self, "gamma_min", float(self.gamma_min))

    @property
    def n(self) -> int:
        return self.gamma.shape[0]


def build_transmission(n: int, edges, beta_min: float) -> TransmissionMatrix:
    if n < 2:
        raise GraphError(f"need at least 2 communities, got n={n}")
    if not beta_min > 0:
        raise WeightFloorError(f"beta_min must be positive, got {beta_min}")
    m = _edges_to_matrix(n, edges)
    low = (m != 0) & (m < beta_min)
    if low.any():
        i, j = np.argwhere(low)[0]
        raise WeightFloorError(
            f"transmission rate {m[i, j]} on edge ({i}, {j}) is below beta_min={beta_min}"
        )
    bad = unreachable_pairs(m)
    if bad:
        raise NotStronglyConnectedError(bad)
    return TransmissionMatrix(m, beta_min)


def build_opinion_network(n: int, edges) -> OpinionNetwork:
    if n < 2:
        raise GraphError(f"need at least 2 communities, got n={n}")
    m = _edges_to_matrix(n, edges)
    if (m < 0).any() or any(float(w) <= 0 for _, _, w in edges):
        raise GraphError("opinion edge weights must be positive")
    bad = unreachable_pairs(m)
    if bad:
        raise NotStronglyConnectedError(bad)
    return OpinionNetwork(m)


def build_recovery(gamma, gamma_min: float) -> RecoveryRates:
    g = np.asarray(gamma, dtype=float)
    if g.ndim != 1:
        raise GraphError("gamma must be a vector")
    if not gamma_min > 0:
        raise WeightFloorError(f"gamma_min must be positive, got {gamma_min}")
    if (g < gamma_min).any():
        i = int(np.argmax(g < gamma_min))
        raise WeightFloorError(f"gamma[{i}]={g[i]} is below gamma_min={gamma_min}")
    return RecoveryRates(g, gamma_min)


def unit_opinion_network(tm: TransmissionMatrix) -> OpinionNetwork:
    """Opinion graph with the transmission topology and unit weights."""
    n = tm.n
    edges = [(i, j, 1.0) for i, j in np.argwhere(tm.entries > 0)]
    return build_opinion_network(n, edges)


def ring_plus_chords(n: int, chords: int, rng) -> list[tuple[int, int]]:
    """Directed ring ``i -> i+1 (mod n)`` plus ``chords`` distinct random extra edges.

    Returned pairs are matrix positions ``(i, j)`` (``j`` influences ``i``):
    the ring edge ``j -> j+1`` is position ``(j+1, j)``. Chords are drawn
    uniformly from the remaining off-diagonal positions, in order, by
    rejection on ``rng.randbelow``. ``chords`` larger than the number of free
    positions is capped, yielding the complete digraph.
    """
    if n < 2:
        raise GraphError(f"need at least 2 communities, got n={n}")
    pairs = [((j + 1) % n, j) for j in range(n)]
    taken = set(pairs)
    free = n * (n - 1) - len(taken)
    for _ in range(min(chords, free)):
        while True:
            i = rng.randbelow(n)
            j = rng.randbelow(n)
            if i != j and (i, j) not in taken:
                break
        taken.add((i, j))
        pairs.append((i, j))
    return pairs
