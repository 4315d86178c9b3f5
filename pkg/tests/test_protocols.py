import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ehorm_sim import kernels
from ehorm_sim.errors import ConfigError
from ehorm_sim.protocols import (
    ElectionState, Kind, ProtocolKind, associate, elect, estimate_lifetime, node_probabilities,
)
from ehorm_sim.topology import Network, deploy

LEACH = ProtocolKind(Kind.LEACH, 0.1)


def grid_net(n=100, energy=0.5):
    rng = np.random.default_rng(99)
    return Network.from_positions(rng.uniform(0, 100, (n, 2)), 100, 100, energy)


def test_all_barred_gives_no_heads():
    net = grid_net()
    net.round = 3
    state = ElectionState.fresh(net)
    state.barred[:] = True
    assert len(elect(net, LEACH, state, np.random.default_rng(0))) == 0


def monte_carlo_rate(net, proto, rounds_phase, trials, seed):
    rng = np.random.default_rng(seed)
    hits = 0
    net.round = rounds_phase
    for _ in range(trials):
        state = ElectionState.fresh(net, lifetime_rounds=1e9)
        hits += len(elect(net, proto, state, rng))
    return hits / (trials * net.n)


def test_leach_first_round_rate_matches_p():
    # closed form at r mod 10 == 0: T = p / (1 - p * 0) = 0.1
    rate = monte_carlo_rate(grid_net(), LEACH, 0, 1000, seed=1)
    assert abs(rate - 0.1) <= 0.01


def test_leach_mid_epoch_rate_matches_threshold():
    # r = 5: T = 0.1 / (1 - 0.1 * 5) = 0.2 for nodes outside G
    rate = monte_carlo_rate(grid_net(), LEACH, 5, 1000, seed=2)
    assert abs(rate - 0.2) <= 0.01


def test_last_round_of_epoch_elects_every_eligible_node():
    net = grid_net(20)
    net.round = 9
    state = ElectionState.fresh(net)
    state.barred[:5] = True
    heads = elect(net, LEACH, state, np.random.default_rng(0))
    assert heads.tolist() == list(range(5, 20))


def test_barred_until_epoch_completes():
    net = grid_net(50)
    state = ElectionState.fresh(net)
    rng = np.random.default_rng(5)
    seen = set()
    for r in range(10):
        net.round = r
        heads = set(elect(net, LEACH, state, rng).tolist())
        assert not heads & seen
        seen |= heads
    assert seen == set(range(50))  # T reaches 1 in the last round of the epoch
    assert state.barred.all()


def test_epoch_reset_clears_g():
    net = grid_net(10)
    state = ElectionState.fresh(net)
    state.barred[:] = True
    net.round = 10
    heads = elect(net, LEACH, state, np.random.default_rng(0))
    # cleared at the boundary; only this round's heads are barred again
    assert np.flatnonzero(state.barred).tolist() == heads.tolist()


def test_election_is_deterministic():
    net = deploy(100, 100, 100, 0.5, seed=4)
    a = elect(net, LEACH, ElectionState.fresh(net), np.random.default_rng(11))
    b = elect(net, LEACH, ElectionState.fresh(net), np.random.default_rng(11))
    assert a.tolist() == b.tolist()


def test_sleeping_and_dead_never_elected():
    net = grid_net(30)
    net.round = 9  # T = 1 for every candidate
    net.sleep_since[:10] = 0
    net.alive[10:15] = False
    heads = elect(net, LEACH, ElectionState.fresh(net), np.random.default_rng(0))
    assert heads.tolist() == list(range(15, 30))


def test_election_consumes_one_draw_per_node():
    net = grid_net(30)
    net.sleep_since[:10] = 0
    rng = np.random.default_rng(3)
    elect(net, LEACH, ElectionState.fresh(net), rng)
    ref = np.random.default_rng(3)
    ref.random(30)
    assert rng.random() == ref.random()


@given(m=st.floats(0, 1), a=st.floats(0, 10), p=st.floats(0.01, 0.99))
def test_sep_weights_preserve_expected_head_count(m, a, p):
    proto = ProtocolKind(Kind.SEP, p, m, a)
    n = 100
    expected = proto.p_nrm * (1 - m) * n + proto.p_adv * m * n
    assert math.isclose(expected, p * n, rel_tol=1e-12)


def test_sep_probabilities_by_class():
    net = deploy(100, 100, 100, 0.5, (0.1, 1.0), seed=0)
    proto = ProtocolKind(Kind.SEP, 0.1, 0.1, 1.0)
    probs = node_probabilities(net, proto, ElectionState.fresh(net))
    assert np.allclose(probs[:10], 0.2 / 1.1) and np.allclose(probs[10:], 0.1 / 1.1)


def test_deec_exhausted_node_never_elected():
    net = grid_net(20)
    net.energy[3] = 0.0
    proto = ProtocolKind(Kind.DEEC, 0.1)
    state = ElectionState.fresh(net, lifetime_rounds=2000)
    probs = node_probabilities(net, proto, state)
    assert probs[3] == 0.0
    for r in range(50):
        net.round = r
        assert 3 not in elect(net, proto, state, np.random.default_rng(r))


def test_deec_probability_scales_with_residual():
    net = grid_net(4)
    net.energy[:] = [0.5, 0.25, 1.0, 0.5]
    net.round = 500
    state = ElectionState.fresh(net, lifetime_rounds=1000)
    probs = node_probabilities(net, ProtocolKind(Kind.DEEC, 0.1), state)
    # estimated mean = 0.5 * (1 - 500/1000) = 0.25
    assert np.allclose(probs, 0.1 * net.energy / 0.25, rtol=1e-15)


def test_deec_past_estimated_lifetime_uses_measured_mean():
    net = grid_net(4)
    net.energy[:] = [0.2, 0.1, 0.0, 0.1]
    net.round = 1000
    probs = node_probabilities(net, ProtocolKind(Kind.DEEC, 0.1), ElectionState.fresh(net, 1000))
    assert np.allclose(probs, 0.1 * net.energy / 0.1)


def test_protocol_probability_range():
    with pytest.raises(ConfigError):
        ProtocolKind(Kind.LEACH, 1.0)


def test_associate_one_head():
    net = grid_net(10)
    ca = associate(net, [4])
    assert ca.membership == {i: 4 for i in range(10) if i != 4}


def test_associate_no_heads_goes_direct():
    net = grid_net(10)
    net.sleep_since[2] = 1
    ca = associate(net, [])
    assert ca.membership == {i: None for i in range(10) if i != 2}


def test_associate_tie_prefers_lower_head():
    pts = [(0, 0)] * 8
    pts[3] = (40, 50)
    pts[7] = (60, 50)
    pts[0] = (50, 50)
    net = Network.from_positions(pts, 100, 100, 0.5)
    assert associate(net, [7, 3]).membership[0] == 3


def test_associate_excludes_sleepers_and_dead():
    net = grid_net(10)
    net.sleep_since[1] = 0
    net.alive[2] = False
    ca = associate(net, [0])
    assert set(ca.membership) == set(range(3, 10))


@given(seed=st.integers(0, 10_000), k=st.integers(1, 15))
@settings(max_examples=40)
def test_associate_minimality(seed, k):
    net = deploy(60, 100, 100, 0.5, seed=seed)
    heads = np.random.default_rng(seed).choice(60, size=k, replace=False)
    ca = associate(net, heads)
    for i, h in ca.membership.items():
        d = np.hypot(net.x[heads] - net.x[i], net.y[heads] - net.y[i])
        own = math.hypot(net.x[h] - net.x[i], net.y[h] - net.y[i])
        assert own <= d.min() * (1 + 1e-15)
    assert (ca.member_of[heads] == kernels.NOT_MEMBER).all()


def test_lifetime_estimate_deterministic(radio):
    net = deploy(100, 100, 100, 0.5, seed=2)
    proto = ProtocolKind(Kind.DEEC, 0.1)
    a = estimate_lifetime(net, proto, radio, 4000, 2)
    assert a == estimate_lifetime(net, proto, radio, 4000, 2)
    assert 500 < a < 5000
    assert estimate_lifetime(net, proto, radio, 0, 2) == math.inf
