"""Pure-Python fallback for the compiled kernels in ``_kernels.pyx``."""

import math

import numpy as np

NOT_MEMBER = -2
DIRECT = -1


def _tx(bits, d, e_elec, e_fs, e_mp, d0):
    d2 = d * d
    if d < d0:
        return bits * e_elec + bits * e_fs * d2
    return bits * e_elec + bits * e_mp * (d2 * d2)


def associate(x, y, joiners, heads):
    xs = x.tolist()
    ys = y.tolist()
    hs = [int(h) for h in heads]
    out = [NOT_MEMBER] * len(xs)
    sqrt = math.sqrt
    for i, join in enumerate(joiners.tolist()):
        if not join:
            continue
        xi = xs[i]
        yi = ys[i]
        best = DIRECT
        best_d = 0.0
        for h in hs:
            dx = xi - xs[h]
            dy = yi - ys[h]
            dd = sqrt(dx * dx + dy * dy)
            if best == DIRECT or dd < best_d:
                best = h
                best_d = dd
        out[i] = best
    return np.array(out, dtype=np.int64)


def deliver(x, y, dist_sink, membership, is_head, can_send, bits, e_elec, e_fs, e_mp, e_da, d0):
    xs = x.tolist()
    ys = y.tolist()
    ds = dist_sink.tolist()
    member_of = membership.tolist()
    heads = is_head.tolist()
    send = can_send.tolist()
    n = len(xs)
    cost = [0.0] * n
    recv = [0] * n
    for i in range(n):
        h = member_of[i]
        if h == NOT_MEMBER or not send[i]:
            continue
        if h >= 0 and send[h]:
            dx = xs[i] - xs[h]
            dy = ys[i] - ys[h]
            dd = math.sqrt(dx * dx + dy * dy)
            cost[i] = _tx(bits, dd, e_elec, e_fs, e_mp, d0)
            recv[h] += 1
        else:
            cost[i] = _tx(bits, ds[i], e_elec, e_fs, e_mp, d0)
    for i in range(n):
        if heads[i] and send[i]:
            cost[i] = recv[i] * (bits * e_elec) + (
                bits * e_da + _tx(bits, ds[i], e_elec, e_fs, e_mp, d0))
    return np.array(cost, dtype=np.float64), np.array(recv, dtype=np.int64)


def member_savings(x, y, dist_sink, nearest, can_send, bits, e_elec, e_fs, e_mp, d0):
    out = np.zeros(len(x), dtype=np.float64)
    send = can_send.tolist()
    for i in np.flatnonzero(nearest != NOT_MEMBER).tolist():
        h = int(nearest[i])
        if h >= 0 and send[h]:
            dx = float(x[i]) - float(x[h])
            dy = float(y[i]) - float(y[h])
            dd = math.sqrt(dx * dx + dy * dy)
            out[i] = _tx(bits, dd, e_elec, e_fs, e_mp, d0) + bits * e_elec
        else:
            out[i] = _tx(bits, float(dist_sink[i]), e_elec, e_fs, e_mp, d0)
    return out


def elect(prob, draws, active, barred, r):
    u = draws.tolist()
    act = active.tolist()
    heads = []
    for i, p in enumerate(prob.tolist()):
        if not p > 0:
            continue
        period = math.ceil(1.0 / p)
        phase = r % period
        if phase == 0:
            barred[i] = 0
        if act[i] and not barred[i] and u[i] < p / (1 - p * phase):
            heads.append(i)
            barred[i] = 1
    return np.array(heads, dtype=np.int64)


def settle(energy, alive, requested):
    n = len(energy)
    taken = [0.0] * n
    died = [False] * n
    for i, c in enumerate(requested.tolist()):
        e = float(energy[i])
        if c > 0 and c >= e:
            taken[i] = e
            energy[i] = 0.0
            alive[i] = 0
            died[i] = True
        else:
            taken[i] = c
            energy[i] = e - c
    return np.array(taken, dtype=np.float64), np.array(died, dtype=bool)


def cluster_totals(heads, membership, ledger):
    sums = {}
    counts = {}
    values = ledger.tolist()
    for i, h in enumerate(membership.tolist()):
        if h >= 0:
            sums[h] = sums.get(h, 0.0) + values[i]
            counts[h] = counts.get(h, 0) + 1
    total = [values[h] + sums.get(h, 0.0) for h in heads.tolist()]
    size = [counts.get(h, 0) + 1 for h in heads.tolist()]
    return np.array(total, dtype=np.float64), np.array(size, dtype=np.int64)


def play(x, y, dist_sink, energy, alive, active, barred, prob, draws, r, gated, e_th,
         bits, e_elec, e_fs, e_mp, e_da, d0):
    heads = elect(prob, draws, active, barred, r)
    is_head = np.zeros(len(x), dtype=bool)
    is_head[heads] = True
    act = active.view(bool)
    member = associate(x, y, act & ~is_head, heads)
    sleepers = alive.view(bool) & ~act
    nearest = associate(x, y, sleepers, heads)
    send = act & (energy >= e_th) if gated else act.copy()
    send_u8 = send.view(np.uint8)
    req, _ = deliver(x, y, dist_sink, member, is_head.view(np.uint8), send_u8, bits, e_elec, e_fs, e_mp, e_da, d0)
    save = member_savings(x, y, dist_sink, nearest, send_u8, bits, e_elec, e_fs, e_mp, d0)
    taken, died = settle(energy, alive, req)
    total, size = cluster_totals(heads, member, taken)
    return heads, member, send, req, taken, died, nearest, save, total, size
