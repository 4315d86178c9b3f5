# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-round kernels: cluster association and traffic delivery.

Arithmetic order mirrors ``_kernels_py`` term for term so both backends
produce bit-identical results.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, sqrt

cnp.import_array()

cdef enum:
    NOT_MEMBER = -2
    DIRECT = -1


cdef inline double _tx(double bits, double d, double e_elec, double e_fs,
                       double e_mp, double d0) nogil:
    cdef double d2 = d * d
    if d < d0:
        return bits * e_elec + bits * e_fs * d2
    return bits * e_elec + bits * e_mp * (d2 * d2)


def associate(const double[::1] x, const double[::1] y,
              const cnp.uint8_t[::1] joiners, const cnp.int64_t[::1] heads):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t nh = heads.shape[0]
    cdef Py_ssize_t i, k
    cdef cnp.int64_t h, best
    cdef double dx, dy, dd, best_d
    out_arr = np.full(n, NOT_MEMBER, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    with nogil:
        for i in range(n):
            if not joiners[i]:
                continue
            best = DIRECT
            best_d = 0.0
            for k in range(nh):
                h = heads[k]
                dx = x[i] - x[h]
                dy = y[i] - y[h]
                dd = sqrt(dx * dx + dy * dy)
                if best == DIRECT or dd < best_d:
                    best = h
                    best_d = dd
            out[i] = best
    return out_arr


def deliver(const double[::1] x, const double[::1] y,
            const double[::1] dist_sink, const cnp.int64_t[::1] membership,
            const cnp.uint8_t[::1] is_head, const cnp.uint8_t[::1] can_send,
            double bits, double e_elec, double e_fs, double e_mp, double e_da,
            double d0):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i
    cdef cnp.int64_t h
    cdef double dx, dy, dd
    cost_arr = np.zeros(n, dtype=np.float64)
    recv_arr = np.zeros(n, dtype=np.int64)
    cdef double[::1] cost = cost_arr
    cdef cnp.int64_t[::1] recv = recv_arr
    with nogil:
        for i in range(n):
            h = membership[i]
            if h == NOT_MEMBER or not can_send[i]:
                continue
            if h >= 0 and can_send[h]:
                dx = x[i] - x[h]
                dy = y[i] - y[h]
                dd = sqrt(dx * dx + dy * dy)
                cost[i] = _tx(bits, dd, e_elec, e_fs, e_mp, d0)
                recv[h] += 1
            else:
                cost[i] = _tx(bits, dist_sink[i], e_elec, e_fs, e_mp, d0)
        for i in range(n):
            if is_head[i] and can_send[i]:
                cost[i] = recv[i] * (bits * e_elec) + (
                    bits * e_da + _tx(bits, dist_sink[i], e_elec, e_fs, e_mp, d0))
    return cost_arr, recv_arr


def member_savings(const double[::1] x, const double[::1] y,
                   const double[::1] dist_sink, const cnp.int64_t[::1] nearest,
                   const cnp.uint8_t[::1] can_send,
                   double bits, double e_elec, double e_fs, double e_mp, double d0):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i
    cdef cnp.int64_t h
    cdef double dx, dy, dd
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            h = nearest[i]
            if h == NOT_MEMBER:
                continue
            if h >= 0 and can_send[h]:
                dx = x[i] - x[h]
                dy = y[i] - y[h]
                dd = sqrt(dx * dx + dy * dy)
                out[i] = _tx(bits, dd, e_elec, e_fs, e_mp, d0) + bits * e_elec
            else:
                out[i] = _tx(bits, dist_sink[i], e_elec, e_fs, e_mp, d0)
    return out_arr


def elect(const double[::1] prob, const double[::1] draws,
          const cnp.uint8_t[::1] active, cnp.uint8_t[::1] barred, long r):
    cdef Py_ssize_t n = prob.shape[0]
    cdef Py_ssize_t i, count = 0
    cdef double p
    cdef long period, phase
    heads_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] heads = heads_arr
    with nogil:
        for i in range(n):
            p = prob[i]
            if not p > 0:
                continue
            period = <long>ceil(1.0 / p)
            phase = r % period
            if phase == 0:
                barred[i] = 0
            if active[i] and not barred[i]:
                if draws[i] < p / (1 - p * phase):
                    heads[count] = i
                    count += 1
                    barred[i] = 1
    return heads_arr[:count].copy()


def settle(double[::1] energy, cnp.uint8_t[::1] alive, const double[::1] requested):
    cdef Py_ssize_t n = energy.shape[0]
    cdef Py_ssize_t i
    cdef double c
    taken_arr = np.zeros(n, dtype=np.float64)
    died_arr = np.zeros(n, dtype=np.uint8)
    cdef double[::1] taken = taken_arr
    cdef cnp.uint8_t[::1] died = died_arr
    with nogil:
        for i in range(n):
            c = requested[i]
            if c > 0 and c >= energy[i]:
                taken[i] = energy[i]
                energy[i] = 0.0
                alive[i] = 0
                died[i] = 1
            else:
                taken[i] = c
                energy[i] = energy[i] - c
    return taken_arr, died_arr.view(bool)


def cluster_totals(const cnp.int64_t[::1] heads, const cnp.int64_t[::1] membership,
                   const double[::1] ledger):
    cdef Py_ssize_t n = ledger.shape[0]
    cdef Py_ssize_t nh = heads.shape[0]
    cdef Py_ssize_t i, k
    cdef cnp.int64_t h
    sums_arr = np.zeros(n, dtype=np.float64)
    counts_arr = np.zeros(n, dtype=np.int64)
    total_arr = np.empty(nh, dtype=np.float64)
    size_arr = np.empty(nh, dtype=np.int64)
    cdef double[::1] sums = sums_arr
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef double[::1] total = total_arr
    cdef cnp.int64_t[::1] size = size_arr
    with nogil:
        for i in range(n):
            h = membership[i]
            if h >= 0:
                sums[h] += ledger[i]
                counts[h] += 1
        for k in range(nh):
            h = heads[k]
            total[k] = ledger[h] + sums[h]
            size[k] = counts[h] + 1
    return total_arr, size_arr


def play(const double[::1] x, const double[::1] y, const double[::1] dist_sink,
         double[::1] energy, cnp.uint8_t[::1] alive, const cnp.uint8_t[::1] active,
         cnp.uint8_t[::1] barred, const double[::1] prob, const double[::1] draws,
         long r, bint gated, double e_th,
         double bits, double e_elec, double e_fs, double e_mp, double e_da, double d0):
    """One full round after sleep scheduling, in a single pass over the arrays."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, k, nh = 0
    cdef cnp.int64_t h, best
    cdef double p, dx, dy, dd, best_d, c
    cdef long period, phase

    heads_arr = np.empty(n, dtype=np.int64)
    member_arr = np.full(n, NOT_MEMBER, dtype=np.int64)
    nearest_arr = np.full(n, NOT_MEMBER, dtype=np.int64)
    send_arr = np.zeros(n, dtype=np.uint8)
    req_arr = np.zeros(n, dtype=np.float64)
    taken_arr = np.zeros(n, dtype=np.float64)
    died_arr = np.zeros(n, dtype=np.uint8)
    recv_arr = np.zeros(n, dtype=np.int64)
    save_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.int64_t[::1] heads = heads_arr
    cdef cnp.int64_t[::1] member = member_arr
    cdef cnp.int64_t[::1] nearest = nearest_arr
    cdef cnp.uint8_t[::1] send = send_arr
    cdef double[::1] req = req_arr
    cdef double[::1] taken = taken_arr
    cdef cnp.uint8_t[::1] died = died_arr
    cdef cnp.int64_t[::1] recv = recv_arr
    cdef double[::1] save = save_arr

    with nogil:
        # election
        for i in range(n):
            p = prob[i]
            if not p > 0:
                continue
            period = <long>ceil(1.0 / p)
            phase = r % period
            if phase == 0:
                barred[i] = 0
            if active[i] and not barred[i]:
                if draws[i] < p / (1 - p * phase):
                    heads[nh] = i
                    nh += 1
                    barred[i] = 1
        # gate
        for i in range(n):
            send[i] = active[i] and (not gated or energy[i] >= e_th)
        # association: awake non-heads join, sleepers get a hypothetical head
        for i in range(n):
            if not alive[i]:
                continue
            best = DIRECT
            best_d = 0.0
            for k in range(nh):
                h = heads[k]
                if h == i:
                    best = NOT_MEMBER
                    break
                dx = x[i] - x[h]
                dy = y[i] - y[h]
                dd = sqrt(dx * dx + dy * dy)
                if best == DIRECT or dd < best_d:
                    best = h
                    best_d = dd
            if best == NOT_MEMBER:
                continue
            if active[i]:
                member[i] = best
            else:
                nearest[i] = best
        # traffic
        for i in range(n):
            h = member[i]
            if h == NOT_MEMBER or not send[i]:
                continue
            if h >= 0 and send[h]:
                dx = x[i] - x[h]
                dy = y[i] - y[h]
                dd = sqrt(dx * dx + dy * dy)
                req[i] = _tx(bits, dd, e_elec, e_fs, e_mp, d0)
                recv[h] += 1
            else:
                req[i] = _tx(bits, dist_sink[i], e_elec, e_fs, e_mp, d0)
        for k in range(nh):
            i = heads[k]
            if send[i]:
                req[i] = recv[i] * (bits * e_elec) + (
                    bits * e_da + _tx(bits, dist_sink[i], e_elec, e_fs, e_mp, d0))
        # counterfactual savings for sleepers
        for i in range(n):
            h = nearest[i]
            if h == NOT_MEMBER:
                continue
            if h >= 0 and send[h]:
                dx = x[i] - x[h]
                dy = y[i] - y[h]
                dd = sqrt(dx * dx + dy * dy)
                save[i] = _tx(bits, dd, e_elec, e_fs, e_mp, d0) + bits * e_elec
            else:
                save[i] = _tx(bits, dist_sink[i], e_elec, e_fs, e_mp, d0)
        # settle
        for i in range(n):
            c = req[i]
            if c > 0 and c >= energy[i]:
                taken[i] = energy[i]
                energy[i] = 0.0
                alive[i] = 0
                died[i] = 1
            else:
                taken[i] = c
                energy[i] = energy[i] - c

    return (heads_arr[:nh].copy(), member_arr, send_arr.view(bool), req_arr, taken_arr,
            died_arr.view(bool), nearest_arr, save_arr) + cluster_totals(heads_arr[:nh], member_arr, taken_arr)
