"""Per-cluster energy totals, sleeper savings, and k%-die-time lookups."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .radio_model import RadioParams, rx_energy, tx_energy


@dataclass(frozen=True)
class SavingsRecord:
    """Energy the sleepers kept this round.

    ``per_sleeper`` pairs each sleeper id with what the round would have
    cost the network had that node been awake and sending.  Cluster totals
    are keyed by head id.
    """

    per_sleeper: tuple[tuple[int, float], ...]
    e_save_total: float
    e_save_average: float
    e_total_ch: dict
    e_average_ch: dict


def cluster_energy(assignment, ledger) -> tuple[dict, dict]:
    """Head plus member consumption per cluster, and its mean over cluster size."""
    ledger = np.asarray(ledger, dtype=float)
    if len(assignment.heads) == 0:
        return {}, {}
    total, size = kernels.cluster_totals(assignment.heads, assignment.member_of, ledger)
    ids = assignment.heads.tolist()
    totals = dict(zip(ids, total.tolist()))
    averages = dict(zip(ids, (total / size).tolist()))
    return totals, averages


def sleeper_saving(net, i: int, heads, can_send, radio: RadioParams, bits: float) -> float:
    """What node ``i`` would have cost the round as an ordinary sender.

    It would join the nearest elected head; if that head relays, the node's
    uplink plus the head's reception is saved, otherwise the node's direct
    uplink to the sink.
    """
    joiner = np.zeros(net.n, dtype=bool)
    joiner[i] = True
    h = int(kernels.associate(net.x, net.y, joiner, heads)[i])
    return _saving_for(net, i, h, can_send, radio, bits)


def _saving_for(net, i, h, can_send, radio, bits):
    if h >= 0 and can_send[h]:
        dx = net.x[i] - net.x[h]
        dy = net.y[i] - net.y[h]
        d = float(np.sqrt(dx * dx + dy * dy))
        return tx_energy(bits, d, radio) + rx_energy(bits, radio)
    return tx_energy(bits, float(net.dist_sink[i]), radio)


def savings_record(sleeper_ids, saved, assignment, ledger, n: int, clusters=None) -> SavingsRecord:
    """Assemble a round's SavingsRecord from per-sleeper savings and the consumption ledger.

    ``clusters`` may carry precomputed ``(total, size)`` arrays in head order.
    """
    per = tuple(zip(np.asarray(sleeper_ids).tolist(), np.asarray(saved).tolist()))
    total = float(sum(s for _, s in per))
    if clusters is not None:
        ids = assignment.heads.tolist()
        totals = dict(zip(ids, clusters[0].tolist()))
        averages = dict(zip(ids, (clusters[0] / clusters[1]).tolist()))
    elif ledger is not None:
        totals, averages = cluster_energy(assignment, ledger)
    else:
        totals, averages = {}, {}
    return SavingsRecord(
        per_sleeper=per,
        e_save_total=total,
        e_save_average=total / n,
        e_total_ch=totals,
        e_average_ch=averages,
    )


def sleep_savings(net, assignment, can_send, radio: RadioParams, bits: float, ledger=None) -> SavingsRecord:
    """Savings attributable to the current sleepers, plus per-cluster totals.

    The average divides by the whole population, not the sleeper count.
    ``ledger`` (this round's per-node consumption) enables the cluster totals.
    """
    sleepers = net.alive & net.asleep
    ids = np.flatnonzero(sleepers)
    saved = np.zeros(0)
    if len(ids):
        nearest = kernels.associate(net.x, net.y, sleepers, assignment.heads)
        saved = kernels.member_savings(net.x, net.y, net.dist_sink, nearest, can_send, bits, radio)[ids]
    return savings_record(ids, saved, assignment, ledger, net.n)


def _alive_count(entry):
    return entry if isinstance(entry, (int, np.integer)) else entry.alive


def kdt(series, k: float, n: int) -> int | None:
    """First round at which at least ``k`` percent of ``n`` nodes are dead.

    ``series`` holds one entry per round (round 1 first): either round
    records with an ``alive`` attribute or bare alive counts.
    """
    if not 0 < k <= 100:
        raise ValueError(f"k must be in (0, 100], got {k!r}")
    for r, entry in enumerate(series, start=1):
        if (n - _alive_count(entry)) * 100 >= k * n:
            return r
    return None


def first_death(series, n: int) -> int | None:
    for r, entry in enumerate(series, start=1):
        if _alive_count(entry) < n:
            return r
    return None
