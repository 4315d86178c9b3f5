"""Field geometry, seeded deployment and distance queries."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError


class NodeClass(enum.Enum):
    NORMAL = "normal"
    ADVANCED = "advanced"


@dataclass(frozen=True)
class Position:
    x: float
    y: float


@dataclass(frozen=True)
class Node:
    """Read-only snapshot of one sensor.

    ``asleep_since`` is the round the node entered sleep, or None when
    it is active.
    """

    id: int
    pos: Position
    energy: float
    initial_energy: float
    node_class: NodeClass
    asleep_since: int | None
    alive: bool

    @property
    def asleep(self) -> bool:
        return self.asleep_since is not None


@dataclass
class Network:
    """Sensor population stored column-wise.

    Node ``i`` is described by index ``i`` of every array.  ``sleep_since``
    holds -1 for active nodes.
    """

    width: float
    height: float
    sink: Position
    x: np.ndarray
    y: np.ndarray
    energy: np.ndarray
    initial_energy: np.ndarray
    advanced: np.ndarray
    alive: np.ndarray
    sleep_since: np.ndarray
    round: int = 0
    dist_sink: np.ndarray = field(init=False, repr=False)
    far_order: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.dist_sink = distances_to(self.x, self.y, self.sink.x, self.sink.y)
        # farthest first, lowest id among equals
        self.far_order = np.lexsort((np.arange(len(self.x)), -self.dist_sink))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def asleep(self) -> np.ndarray:
        return self.sleep_since >= 0

    @property
    def active(self) -> np.ndarray:
        return self.alive & (self.sleep_since < 0)

    def node(self, i: int) -> Node:
        since = int(self.sleep_since[i])
        return Node(
            id=i,
            pos=Position(float(self.x[i]), float(self.y[i])),
            energy=float(self.energy[i]),
            initial_energy=float(self.initial_energy[i]),
            node_class=NodeClass.ADVANCED if self.advanced[i] else NodeClass.NORMAL,
            asleep_since=since if since >= 0 else None,
            alive=bool(self.alive[i]),
        )

    @property
    def nodes(self) -> list[Node]:
        return [self.node(i) for i in range(self.n)]

    def copy(self) -> "Network":
        return Network(
            width=self.width,
            height=self.height,
            sink=self.sink,
            x=self.x.copy(),
            y=self.y.copy(),
            energy=self.energy.copy(),
            initial_energy=self.initial_energy.copy(),
            advanced=self.advanced.copy(),
            alive=self.alive.copy(),
            sleep_since=self.sleep_since.copy(),
            round=self.round,
        )

    @classmethod
    def from_positions(cls, positions, width, height, energies, advanced=None, sink=None):
        """Build a network from explicit coordinates (handy for scripted scenarios)."""
        xy = np.asarray(positions, dtype=float).reshape(-1, 2)
        n = len(xy)
        energies = np.broadcast_to(np.asarray(energies, dtype=float), (n,)).copy()
        if advanced is None:
            advanced = np.zeros(n, dtype=bool)
        if sink is None:
            sink = Position(width / 2, height / 2)
        return cls(
            width=float(width),
            height=float(height),
            sink=sink,
            x=xy[:, 0].copy(),
            y=xy[:, 1].copy(),
            energy=energies,
            initial_energy=energies.copy(),
            advanced=np.asarray(advanced, dtype=bool).copy(),
            alive=energies > 0,
            sleep_since=np.full(n, -1, dtype=np.int64),
        )


def distance(a: Position, b: Position) -> float:
    dx = a.x - b.x
    dy = a.y - b.y
    return math.sqrt(dx * dx + dy * dy)


def distances_to(x: np.ndarray, y: np.ndarray, px: float, py: float) -> np.ndarray:
    dx = x - px
    dy = y - py
    return np.sqrt(dx * dx + dy * dy)


def deploy(
    n: int,
    width: float,
    height: float,
    e0: float,
    hetero: tuple[float, float] = (0.0, 0.0),
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> Network:
    """Scatter ``n`` nodes uniformly over a ``width`` x ``height`` field.

    The lowest ``floor(m * n)`` ids are advanced nodes carrying
    ``e0 * (1 + a)``.  Positions are drawn as all x coordinates, then all
    y coordinates, from ``rng`` (or a fresh generator seeded with ``seed``).
    """
    m, a = hetero
    if n < 1:
        raise ConfigError(f"n: node count must be >= 1, got {n}")
    if not (width > 0 and height > 0):
        raise ConfigError(f"field dimensions must be > 0, got {width} x {height}")
    if not e0 > 0:
        raise ConfigError(f"e0_j: initial energy must be > 0, got {e0}")
    if not 0 <= m <= 1:
        raise ConfigError(f"hetero_m: advanced fraction must be in [0, 1], got {m}")
    if not a >= 0:
        raise ConfigError(f"hetero_a: extra-energy factor must be >= 0, got {a}")
    if rng is None:
        rng = np.random.default_rng(seed)

    x = rng.uniform(0.0, width, n)
    y = rng.uniform(0.0, height, n)
    advanced = np.zeros(n, dtype=bool)
    advanced[: math.floor(m * n)] = True
    energy = np.where(advanced, e0 * (1 + a), e0).astype(float)
    return Network(
        width=float(width),
        height=float(height),
        sink=Position(width / 2, height / 2),
        x=x,
        y=y,
        energy=energy,
        initial_energy=energy.copy(),
        advanced=advanced,
        alive=np.ones(n, dtype=bool),
        sleep_since=np.full(n, -1, dtype=np.int64),
    )


def max_distance_alive(net: Network) -> tuple[int, float] | None:
    """Farthest alive node from the sink (sleepers included); lowest id on ties."""
    ranked = net.alive[net.far_order]
    k = int(np.argmax(ranked))
    if not ranked[k]:
        return None
    i = int(net.far_order[k])
    return i, float(net.dist_sink[i])
