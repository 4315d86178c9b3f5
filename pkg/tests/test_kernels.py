import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ehorm_sim import _kernels_py, kernels
from ehorm_sim.radio_model import RadioParams

try:
    from ehorm_sim import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


@st.composite
def rounds(draw):
    n = draw(st.integers(1, 60))
    seed = draw(st.integers(0, 2**31))
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 200, n)
    y = rng.uniform(0, 200, n)
    k = draw(st.integers(0, n))
    heads = np.sort(rng.choice(n, size=k, replace=False)).astype(np.int64)
    joiners = rng.random(n) < 0.8
    joiners[heads] = False
    can_send = rng.random(n) < 0.8
    bits = draw(st.sampled_from([0, 1, 2000, 4000]))
    return x, y, heads, joiners, can_send, bits


@needs_ext
@given(rounds(), st.sampled_from([RadioParams(), RadioParams(d0=87.0), RadioParams(e_fs=1e-11, e_mp=1e-14)]))
@settings(max_examples=100, deadline=None)
def test_backends_bit_identical(case, radio):
    x, y, heads, joiners, can_send, bits = case
    dist_sink = np.sqrt((x - 100.0) ** 2 + (y - 100.0) ** 2)
    m_c = kernels.associate(x, y, joiners, heads, backend=compiled)
    m_p = kernels.associate(x, y, joiners, heads, backend=_kernels_py)
    assert np.array_equal(m_c, m_p)
    is_head = np.zeros(len(x), dtype=bool)
    is_head[heads] = True
    c_cost, c_recv = kernels.deliver(x, y, dist_sink, m_c, is_head, can_send, bits, radio, backend=compiled)
    p_cost, p_recv = kernels.deliver(x, y, dist_sink, m_p, is_head, can_send, bits, radio, backend=_kernels_py)
    assert c_cost.tobytes() == p_cost.tobytes()
    assert np.array_equal(c_recv, p_recv)
    s_c = kernels.member_savings(x, y, dist_sink, m_c, can_send, bits, radio, backend=compiled)
    s_p = kernels.member_savings(x, y, dist_sink, m_p, can_send, bits, radio, backend=_kernels_py)
    assert s_c.tobytes() == s_p.tobytes()


@pytest.mark.parametrize("impl", [_kernels_py, compiled], ids=["python", "cython"])
def test_deliver_small_case(impl, radio):
    if impl is None:
        pytest.skip("compiled extension not built")
    # head 0 at (0,0); members 1 (3,4) and 2 (6,8); node 3 silent
    x = np.array([0.0, 3.0, 6.0, 1.0])
    y = np.array([0.0, 4.0, 8.0, 1.0])
    sink = np.array([10.0, 10.0, 10.0, 10.0])
    member_of = np.array([kernels.NOT_MEMBER, 0, 0, 0])
    is_head = np.array([True, False, False, False])
    can_send = np.array([True, True, True, False])
    cost, recv = kernels.deliver(x, y, sink, member_of, is_head, can_send, 4000, radio, backend=impl)
    assert recv.tolist() == [2, 0, 0, 0]
    assert cost[1] == 4000 * 50e-9 + 4000 * 10e-12 * 25.0
    assert cost[2] == 4000 * 50e-9 + 4000 * 10e-12 * 100.0
    assert cost[3] == 0.0
    assert cost[0] == pytest.approx(2 * 2e-4 + 2e-5 + 2e-4 + 4000 * 10e-12 * 100, rel=1e-15)


def test_silent_head_diverts_members(radio):
    x = np.array([0.0, 3.0])
    y = np.array([0.0, 4.0])
    ds = np.array([70.0, 65.0])
    cost, recv = kernels.deliver(
        x, y, ds, np.array([kernels.NOT_MEMBER, 0]), np.array([True, False]), np.array([False, True]), 4000, radio
    )
    assert cost[0] == 0.0 and recv[0] == 0
    assert cost[1] == 4000 * 50e-9 + 4000 * 10e-12 * 65.0**2


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_pure_python_fallback_selected_by_env():
    import os
    import subprocess
    import sys

    code = (
        "from ehorm_sim import kernels; from ehorm_sim.engine import run, SimConfig;"
        "r = run(SimConfig(seed=4, max_rounds=300));"
        "print(kernels.BACKEND, r.records[-1].residual.hex(), r.records[-1].alive)"
    )
    env = dict(os.environ, EHORM_SIM_PURE_PYTHON="1")
    slow = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    env.pop("EHORM_SIM_PURE_PYTHON")
    fast = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    backend, *state = slow.stdout.split()
    assert backend == "python"
    assert state == fast.stdout.split()[1:]


@st.composite
def networks(draw):
    from ehorm_sim.topology import deploy

    n = draw(st.integers(1, 50))
    seed = draw(st.integers(0, 2**31))
    net = deploy(n, 100.0, 100.0, 0.5, hetero=(0.1, 1.0), seed=seed)
    rng = np.random.default_rng(seed + 1)
    net.energy[:] = rng.uniform(0.0, 2e-3, n)
    net.alive[:] = rng.random(n) < 0.9
    net.energy[~net.alive] = 0.0
    asleep = net.alive & (rng.random(n) < 0.2)
    net.sleep_since[asleep] = 0
    net.round = draw(st.integers(0, 30))
    barred = rng.random(n) < 0.3
    prob = np.full(n, draw(st.sampled_from([0.05, 0.1, 0.5])))
    draws = rng.random(n)
    e_th = draw(st.sampled_from([None, 0.0, 3e-4, 1e-3]))
    return net, barred, prob, draws, e_th


def _play(net, barred, prob, draws, e_th, radio, backend):
    net = net.copy()
    barred = barred.copy()
    out = kernels.play(net, barred, prob, draws, e_th, 4000, radio, backend=backend)
    return net, barred, out


@needs_ext
@given(networks())
@settings(max_examples=100, deadline=None)
def test_fused_round_backends_bit_identical(case):
    radio = RadioParams()
    net_c, barred_c, out_c = _play(*case, radio, compiled)
    net_p, barred_p, out_p = _play(*case, radio, _kernels_py)
    assert net_c.energy.tobytes() == net_p.energy.tobytes()
    assert np.array_equal(net_c.alive, net_p.alive)
    assert np.array_equal(barred_c, barred_p)
    for a, b in zip(out_c, out_p):
        assert np.asarray(a).tobytes() == np.asarray(b).tobytes()


@given(networks())
@settings(max_examples=60, deadline=None)
def test_fused_round_matches_stagewise_kernels(case):
    radio = RadioParams()
    net, barred, prob, draws, e_th = case
    after, barred_after, out = _play(net, barred, prob, draws, e_th, radio, None)
    heads, member_of, can_send, requested, taken, died, _, _, total, size = out

    active = net.active
    b = barred.copy()
    assert np.array_equal(kernels.elect(prob, draws, active, b, net.round), heads)
    assert np.array_equal(b, barred_after)
    gate = active & net.alive if e_th is None else active & net.alive & (net.energy >= e_th)
    assert np.array_equal(can_send, gate)
    joiners = active.copy()
    joiners[heads] = False
    assert np.array_equal(member_of[joiners], kernels.associate(net.x, net.y, joiners, heads)[joiners])
    is_head = np.zeros(net.n, dtype=bool)
    is_head[heads] = True
    cost, _ = kernels.deliver(
        net.x, net.y, net.dist_sink, np.where(joiners, member_of, kernels.NOT_MEMBER),
        is_head, can_send, 4000, radio,
    )
    assert requested.tobytes() == cost.tobytes()
    energy, alive = net.energy.copy(), net.alive.copy()
    t, d = kernels.settle(energy, alive, cost)
    assert t.tobytes() == taken.tobytes() and np.array_equal(d, died)
    assert energy.tobytes() == after.energy.tobytes()
    ct, cs = kernels.cluster_totals(heads, member_of, taken)
    assert ct.tobytes() == total.tobytes() and np.array_equal(cs, size)
