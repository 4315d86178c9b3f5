"""Cluster-head election (LEACH, SEP, DEEC) and cluster association.

Every election consumes exactly ``n`` uniform draws from the run's
generator, one per node in id order, whether or not a node is eligible.
That keeps the random stream aligned across runs that differ only in
which nodes are asleep.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError
from .radio_model import RadioParams
from .topology import Network


class Kind(enum.Enum):
    LEACH = "leach"
    SEP = "sep"
    DEEC = "deec"


@dataclass(frozen=True)
class ProtocolKind:
    kind: Kind = Kind.LEACH
    p: float = 0.1
    m: float = 0.0
    a: float = 0.0

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ConfigError(f"p: cluster-head probability must be in (0, 1), got {self.p}")

    @property
    def p_nrm(self) -> float:
        return self.p / (1 + self.a * self.m)

    @property
    def p_adv(self) -> float:
        return self.p * (1 + self.a) / (1 + self.a * self.m)


@dataclass
class ElectionState:
    """Rotation bookkeeping.  ``barred`` is the set G of recent heads."""

    barred: np.ndarray
    # DEEC only
    lifetime_rounds: float | None = None
    mean_initial_energy: float | None = None
    fixed_prob: np.ndarray | None = None

    @classmethod
    def fresh(cls, net: Network, lifetime_rounds: float | None = None) -> "ElectionState":
        return cls(
            barred=np.zeros(net.n, dtype=bool),
            lifetime_rounds=lifetime_rounds,
            mean_initial_energy=float(net.initial_energy.sum()) / net.n,
        )


@dataclass
class ClusterAssignment:
    heads: np.ndarray
    member_of: np.ndarray

    @property
    def membership(self) -> dict[int, int | None]:
        """Member id -> head id, or None for direct-to-sink."""
        out = {}
        for i in np.flatnonzero(self.member_of != kernels.NOT_MEMBER):
            h = int(self.member_of[i])
            out[int(i)] = None if h == kernels.DIRECT else h
        return out

    def members(self, head: int) -> np.ndarray:
        return np.flatnonzero(self.member_of == head)


def node_probabilities(net: Network, proto: ProtocolKind, state: ElectionState) -> np.ndarray:
    """Per-node target head probability for the current round."""
    if proto.kind is Kind.LEACH:
        return np.full(net.n, proto.p)
    if proto.kind is Kind.SEP:
        return np.where(net.advanced, proto.p_adv, proto.p_nrm)
    r = net.round
    mean_energy = state.mean_initial_energy * (1 - r / state.lifetime_rounds)
    if mean_energy <= 0:
        # past the estimated lifetime: fall back to the measured average
        mean_energy = float(net.energy.sum()) / net.n
    if mean_energy <= 0:
        return np.zeros(net.n)
    return proto.p * net.energy / mean_energy


def elect(net: Network, proto: ProtocolKind, state: ElectionState, rng: np.random.Generator, prob=None) -> np.ndarray:
    """Return the sorted ids of this round's cluster heads.

    A candidate (alive, awake, not in G) with probability p_i becomes head
    when its draw falls below ``p_i / (1 - p_i * (r mod ceil(1/p_i)))``.
    G is cleared per node whenever ``r mod ceil(1/p_i) == 0``.  ``prob``
    lets the caller pass precomputed per-node probabilities.
    """
    draws = rng.random(net.n)
    if prob is None:
        prob = node_probabilities(net, proto, state)
    return kernels.elect(prob, draws, net.active, state.barred, net.round)


def associate(net: Network, heads) -> ClusterAssignment:
    """Each awake alive non-head joins its nearest head (lowest id on ties)."""
    heads = np.sort(np.asarray(heads, dtype=np.int64))
    joiners = net.active.copy()
    joiners[heads] = False
    member_of = kernels.associate(net.x, net.y, joiners, heads)
    return ClusterAssignment(heads=heads, member_of=member_of)


def estimate_lifetime(net: Network, proto: ProtocolKind, radio: RadioParams, bits: float, seed) -> float:
    """Rounds the network would last at the cost of one full-population round.

    The dry run elects ``max(1, round(p * n))`` heads uniformly at random
    from a generator private to the estimate, so the run's own stream is
    untouched.
    """
    rng = np.random.default_rng([0xDEEC, 0 if seed is None else int(seed)])
    k = max(1, round(proto.p * net.n))
    heads = np.sort(rng.choice(net.n, size=min(k, net.n), replace=False))
    is_head = np.zeros(net.n, dtype=bool)
    is_head[heads] = True
    member_of = kernels.associate(net.x, net.y, ~is_head, heads)
    cost, _ = kernels.deliver(
        net.x, net.y, net.dist_sink, member_of, is_head, np.ones(net.n, dtype=bool), bits, radio
    )
    per_round = float(cost.sum())
    if per_round <= 0:
        return math.inf
    return float(net.initial_energy.sum()) / per_round
