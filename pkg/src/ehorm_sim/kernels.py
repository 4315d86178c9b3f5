"""Backend selection for the per-round kernels.

The compiled extension is used when it imports; set
``EHORM_SIM_PURE_PYTHON=1`` to force the pure-Python fallback.
"""

import os

import numpy as np

from . import _kernels_py
from .radio_model import RadioParams

NOT_MEMBER = _kernels_py.NOT_MEMBER
DIRECT = _kernels_py.DIRECT

_backend = _kernels_py
BACKEND = "python"
if not os.environ.get("EHORM_SIM_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _backend = _compiled
        BACKEND = "cython"


def _u8(mask):
    return np.ascontiguousarray(mask, dtype=bool).view(np.uint8)


def associate(x, y, joiners, heads, backend=None):
    """Map each joiner to its nearest head id (lowest id on ties).

    Returns an int64 array with ``DIRECT`` for joiners when ``heads`` is
    empty and ``NOT_MEMBER`` for everyone outside ``joiners``.
    """
    impl = backend or _backend
    heads = np.ascontiguousarray(np.sort(np.asarray(heads, dtype=np.int64)))
    return impl.associate(x, y, _u8(joiners), heads)


def deliver(x, y, dist_sink, membership, is_head, can_send, bits, radio: RadioParams, backend=None):
    """Per-node energy requested by one round of traffic, plus packets received per head."""
    impl = backend or _backend
    return impl.deliver(
        x, y, dist_sink,
        np.ascontiguousarray(membership, dtype=np.int64),
        _u8(is_head), _u8(can_send),
        float(bits), radio.e_elec, radio.e_fs, radio.e_mp, radio.e_da, float(radio.d0),
    )


def member_savings(x, y, dist_sink, nearest, can_send, bits, radio: RadioParams, backend=None):
    """Counterfactual sender cost for every node with a ``nearest`` entry.

    Joining a relaying head costs the uplink plus the head's reception;
    otherwise the node's direct uplink to the sink.
    """
    impl = backend or _backend
    return impl.member_savings(
        x, y, dist_sink,
        np.ascontiguousarray(nearest, dtype=np.int64), _u8(can_send),
        float(bits), radio.e_elec, radio.e_fs, radio.e_mp, float(radio.d0),
    )


def elect(prob, draws, active, barred, r, backend=None):
    """Rotating-epoch threshold election; updates ``barred`` (bool array) in place.

    A node with probability p clears its G flag when ``r mod ceil(1/p) == 0``
    and, if active and not barred, is elected when its draw falls below
    ``p / (1 - p * (r mod ceil(1/p)))``.
    """
    impl = backend or _backend
    flags = barred.view(np.uint8)
    return impl.elect(
        np.ascontiguousarray(prob, dtype=np.float64), draws, _u8(active), flags, int(r)
    )


def settle(energy, alive, requested, backend=None):
    """Deduct ``requested`` in place; a node whose request meets its residual dies at 0 J.

    Returns the energy actually taken and the mask of nodes that died.
    """
    impl = backend or _backend
    return impl.settle(energy, alive.view(np.uint8), requested)


def cluster_totals(heads, membership, ledger, backend=None):
    """Per-head (head + members) consumption and cluster size, in ``heads`` order."""
    impl = backend or _backend
    return impl.cluster_totals(
        np.ascontiguousarray(heads, dtype=np.int64), np.ascontiguousarray(membership, dtype=np.int64), ledger
    )


def play(net, barred, prob, draws, e_th, bits, radio: RadioParams, backend=None):
    """Fused round after sleep scheduling: elect, associate, gate, deliver, save, settle.

    Mutates ``net.energy``, ``net.alive`` and ``barred`` in place.  Returns
    ``(heads, member_of, can_send, requested, taken, died, nearest, savings,
    cluster_total, cluster_size)``: ``nearest``/``savings`` describe each
    sleeper's hypothetical head and counterfactual cost, the last two are
    per-head totals in ``heads`` order.  ``e_th=None`` disables the gate.
    """
    impl = backend or _backend
    gated = e_th is not None
    return impl.play(
        net.x, net.y, net.dist_sink, net.energy, net.alive.view(np.uint8), _u8(net.active),
        barred.view(np.uint8), prob, draws, int(net.round), gated, float(e_th) if gated else 0.0,
        float(bits), radio.e_elec, radio.e_fs, radio.e_mp, radio.e_da, float(radio.d0),
    )
