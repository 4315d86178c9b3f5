"""Threshold-energy sleep/awake scheduling.

Each round the sink derives a threshold from the cost of reaching it
from the farthest alive node.  Nodes holding less than the threshold go
to sleep, up to a cap; when the sleeper count exceeds the cap the
longest sleepers are woken first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .radio_model import RadioParams
from .topology import Network, max_distance_alive


@dataclass(frozen=True)
class EhormConfig:
    enabled: bool = False
    ns_cap: int = 10
    packet_bits: int = 4000

    def __post_init__(self):
        if self.ns_cap < 0:
            raise ConfigError(f"ns_cap: sleep cap must be >= 0, got {self.ns_cap}")
        if self.packet_bits < 0:
            raise ConfigError(f"packet_bits: must be >= 0, got {self.packet_bits}")


@dataclass
class SleepQueue:
    """Sleepers as ``(node id, round entered)``, oldest first."""

    entries: deque = field(default_factory=deque)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def ids(self) -> list[int]:
        return [i for i, _ in self.entries]


@dataclass(frozen=True)
class ScheduleResult:
    woken: tuple[int, ...]
    slept: tuple[int, ...]
    purged: tuple[int, ...]


def threshold_energy(d: float, radio: RadioParams, packet_bits: float) -> float:
    d2 = d * d
    return (radio.e_elec + radio.e_da) * packet_bits + radio.e_mp * packet_bits * (d2 * d2)


def compute_threshold(net: Network, radio: RadioParams, packet_bits: float) -> float | None:
    """Energy the farthest alive node needs to reach the sink; None if all are dead."""
    far = max_distance_alive(net)
    if far is None:
        return None
    return threshold_energy(far[1], radio, packet_bits)


def schedule(net: Network, queue: SleepQueue, e_th: float | None, cfg: EhormConfig, round: int | None = None) -> ScheduleResult:
    """Apply one round of sleep/awake transitions in place.

    Order: drop dead sleepers, wake the oldest while over the cap, then
    put below-threshold awake nodes to sleep in ascending id until the
    cap is reached.
    """
    if not cfg.enabled or e_th is None:
        return ScheduleResult((), (), ())
    if round is None:
        round = net.round

    purged = [i for i, _ in queue.entries if not net.alive[i]]
    if purged:
        queue.entries = deque(e for e in queue.entries if net.alive[e[0]])
        net.sleep_since[purged] = -1

    woken = []
    while len(queue) > cfg.ns_cap:
        i, _ = queue.entries.popleft()
        net.sleep_since[i] = -1
        woken.append(i)

    slept = []
    if len(queue) < cfg.ns_cap:
        for i in np.flatnonzero(net.active & (net.energy < e_th)):
            if len(queue) >= cfg.ns_cap:
                break
            i = int(i)
            queue.entries.append((i, round))
            net.sleep_since[i] = round
            slept.append(i)
    return ScheduleResult(tuple(woken), tuple(slept), tuple(purged))


def transmit_gate(node, e_th: float | None) -> bool:
    """True iff an awake, alive node holds at least the threshold energy."""
    if not node.alive or node.asleep:
        return False
    return e_th is None or node.energy >= e_th


def gate_mask(net: Network, e_th: float | None) -> np.ndarray:
    """Vectorised :func:`transmit_gate` over the whole population."""
    mask = net.active
    if e_th is not None:
        mask = mask & (net.energy >= e_th)
    return mask
