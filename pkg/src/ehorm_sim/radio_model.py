"""First-order radio energy model.

Transmission cost is piecewise: a free-space d^2 amplifier term below the
reference distance ``d0`` and a multipath d^4 term at or above it.  All
energies are in joules, distances in metres, packet sizes in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class RadioParams:
    e_elec: float = 50e-9
    e_fs: float = 10e-12
    e_mp: float = 0.0013e-12
    e_da: float = 5e-9
    # None -> sqrt(e_fs / e_mp)
    d0: float | None = field(default=None)

    def __post_init__(self):
        for name in ("e_elec", "e_fs", "e_mp", "e_da"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")
        if self.d0 is None:
            if self.e_mp > 0:
                object.__setattr__(self, "d0", math.sqrt(self.e_fs / self.e_mp))
            else:
                object.__setattr__(self, "d0", math.inf)
        elif not self.d0 >= 0:
            raise ValueError(f"d0 must be >= 0, got {self.d0!r}")


DEFAULT_RADIO = RadioParams()


def _check_bits(bits):
    if bits < 0:
        raise ValueError(f"packet length must be >= 0 bits, got {bits!r}")


def tx_energy(bits: float, d: float, p: RadioParams = DEFAULT_RADIO) -> float:
    """Energy to transmit ``bits`` over distance ``d``.

    Uses the free-space branch for ``d < d0`` and the multipath branch
    for ``d >= d0``.
    """
    _check_bits(bits)
    if d < 0:
        raise ValueError(f"distance must be >= 0, got {d!r}")
    d2 = d * d
    if d < p.d0:
        return bits * p.e_elec + bits * p.e_fs * d2
    return bits * p.e_elec + bits * p.e_mp * (d2 * d2)


def rx_energy(bits: float, p: RadioParams = DEFAULT_RADIO) -> float:
    _check_bits(bits)
    return bits * p.e_elec


def agg_energy(bits: float, p: RadioParams = DEFAULT_RADIO) -> float:
    _check_bits(bits)
    return bits * p.e_da


def ch_tx_energy(bits: float, d: float, p: RadioParams = DEFAULT_RADIO) -> float:
    """Cluster-head uplink: aggregate one packet, then send it ``d`` metres."""
    return agg_energy(bits, p) + tx_energy(bits, d, p)


def head_role_energy(bits: float, d_sink: float, members: int, p: RadioParams = DEFAULT_RADIO) -> float:
    """Full per-round cost of serving as head for ``members`` senders."""
    if members < 0:
        raise ValueError(f"member count must be >= 0, got {members!r}")
    return members * rx_energy(bits, p) + ch_tx_energy(bits, d_sink, p)
