import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tslec.agent import Action, Level, StateKey
from tslec.lexicon import Concept, Intent, ListenerModel, Vocabulary, reveal_round
from tslec.social import (
    StrategyStore, TeachingEntry, TraceStep, TrustMatrix, TrustParams, build_teaching,
    consider_adoption, decode_teaching, network_density, network_transitivity,
    recent_mean, should_teach, update_trust,
)

P = TrustParams()


def _state(t):
    return StateKey((Level.HIGH,) * 5, t)


def test_trust_params_validation():
    with pytest.raises(ValueError):
        TrustParams(beta_pos=0.05, beta_neg=0.1)
    with pytest.raises(ValueError):
        TrustParams(adopt_threshold=1.0)


def test_trust_matrix_init():
    m = TrustMatrix(4)
    assert m.row(2) == {0: 0.5, 1: 0.5, 3: 0.5}
    assert m.mean() == 0.5 and m.off_diagonal().size == 12


def test_update_trust_examples():
    assert update_trust(0.5, 12, 10, P) == 0.6
    assert update_trust(0.98, 12, 10, P) == 1.0
    assert update_trust(0.02, 8, 10, P) == 0.0
    assert update_trust(0.5, 10, 10, P) == 0.45  # ties count as failure


def test_trust_fuzz_stays_in_bounds():
    rng = np.random.default_rng(0)
    tau = 0.5
    succ = rng.random(200_000) < 0.5
    for s in succ:
        tau = update_trust(tau, 1.0 if s else -1.0, 0.0, P)
        assert 0.0 <= tau <= 1.0


@given(st.lists(st.booleans(), max_size=300), st.floats(0, 1))
def test_trust_bounds_property(outcomes, tau):
    for s in outcomes:
        tau = update_trust(tau, 1.0 if s else -1.0, 0.0, P)
        assert 0.0 <= tau <= 1.0


@given(k=st.integers(1, 8), start=st.sampled_from([0.5, 0.6, 0.65, 0.7]))
def test_asymmetry_recovery_takes_half_the_steps(k, start):
    tau = start
    for _ in range(k):
        tau = update_trust(tau, 0.0, 1.0, P)
    low = tau
    steps = 0
    while tau < start:
        tau = update_trust(tau, 1.0, 0.0, P)
        steps += 1
    if low > 0.0:  # clamping at 0 only makes recovery cheaper
        assert steps == math.ceil(k / 2)
    else:
        assert steps <= math.ceil(k / 2)


def test_recent_mean():
    assert recent_mean([1, 2, 3, 4, 5, 6], 5) == 4.0
    assert recent_mean([], 5) == 0.0


def test_should_teach_examples():
    assert should_teach(15, [12] * 4)
    assert not should_teach(12, [10, 14])
    assert not should_teach(99, [])
    # only the last ten episodes count
    assert should_teach(5, [100] * 5 + [1] * 10)


def _trace(rewards):
    return [
        TraceStep(_state(t + 1), Action(t % 3), r, (Concept(Intent.DEMAND, t, 1),))
        for t, r in enumerate(rewards)
    ]


def test_build_teaching_examples():
    t = build_teaching(_trace([3, 9, 5]), Vocabulary(0))
    assert [e.state.round for e in t.entries] == [2, 3]
    t = build_teaching(_trace([5, 5, 1]), Vocabulary(0))
    assert [e.state.round for e in t.entries] == [1, 2]
    t = build_teaching(_trace([4]), Vocabulary(0))
    assert len(t.entries) == 1
    with pytest.raises(ValueError):
        build_teaching([], Vocabulary(0))


def test_build_teaching_message_frame_and_determinism():
    v1, v2 = Vocabulary(1), Vocabulary(1)
    a = build_teaching(_trace([3, 9, 5]), v1)
    b = build_teaching(_trace([3, 9, 5]), v2)
    assert a.encoded.symbols == b.encoded.symbols
    syms = a.encoded.symbols
    strategy, end = syms[0], syms[-1]
    assert syms.count(strategy) == 2 and syms.count(end) == 1
    assert [syms[x:y] for x, y in a.spans] == [[v1.map[Concept(Intent.DEMAND, 1, 1)]], [v1.map[Concept(Intent.DEMAND, 2, 1)]]]


def test_decode_teaching_drops_unreadable_entries():
    teacher = Vocabulary(1)
    t = build_teaching(_trace([3, 9, 5]), teacher)
    model = ListenerModel(0)
    assert decode_teaching(model, t) == []
    # learner has seen the round-2 concept's symbol only
    model.peer(1)[teacher.map[Concept(Intent.DEMAND, 1, 1)]] = Concept(Intent.DEMAND, 1, 1)
    got = decode_teaching(model, t)
    assert [e.state.round for e in got] == [2]
    reveal_round([model], [t.encoded], {1: teacher})
    assert len(decode_teaching(model, t)) == 2


def _entries():
    return [TeachingEntry(_state(1), Action.COOPERATIVE, 9.0, ())]


def test_adoption_gates():
    store, ev = consider_adoption(StrategyStore(), _entries(), 0.8, 14, 10, P, 5, learner=2, teacher=0)
    assert ev is not None and ev.tau_at_adoption == 0.8 and ev.learner_reward_before == 10
    assert store.lookup(0, _state(1)).action is Action.COOPERATIVE
    assert consider_adoption(StrategyStore(), _entries(), 0.6, 14, 10, P, 5)[1] is None
    assert consider_adoption(StrategyStore(), _entries(), 0.9, 8, 10, P, 5)[1] is None
    assert consider_adoption(StrategyStore(), _entries(), 0.7, 14, 10, P, 5)[1] is None
    assert consider_adoption(StrategyStore(), [], 0.9, 14, 10, P, 5)[1] is None
    # the random-trust gate replaces the trust test but not the performance test
    assert consider_adoption(StrategyStore(), _entries(), 0.1, 14, 10, P, 5, gate=True)[1] is not None
    assert consider_adoption(StrategyStore(), _entries(), 0.9, 14, 10, P, 5, gate=False)[1] is None
    assert consider_adoption(StrategyStore(), _entries(), 0.1, 8, 10, P, 5, gate=True)[1] is None


def test_store_overwrites_per_teacher_and_state():
    store = StrategyStore()
    store.merge(0, _entries(), 1)
    store.merge(0, [TeachingEntry(_state(1), Action.BALANCED, 3.0, ())], 2)
    store.merge(1, _entries(), 2)
    assert len(store) == 2
    assert store.lookup(0, _state(1)) == (Action.BALANCED, 3.0, 2)


def _tau(n, value):
    t = np.full((n, n), value)
    np.fill_diagonal(t, np.nan)
    return t


def test_density_examples():
    assert network_density(_tau(4, 0.5)) == 0.0
    assert network_density(_tau(4, 0.9)) == 1.0
    t = _tau(4, 0.5)
    t[0, 1:] = t[1, [0, 2, 3]] = 0.9  # 6 of 12 ordered pairs
    assert network_density(t) == 0.5
    assert network_density(TrustMatrix(4)) == 0.0


def test_transitivity_examples():
    assert network_transitivity(_tau(4, 0.9)) == 1.0
    star = _tau(4, 0.5)
    for j in (1, 2, 3):
        star[0, j] = star[j, 0] = 0.9
    assert network_transitivity(star) == 0.0
    assert network_transitivity(_tau(4, 0.5)) == 0.0
    # one-sided trust is not an edge
    one_way = _tau(3, 0.5)
    one_way[0, 1] = one_way[1, 2] = one_way[0, 2] = 0.9
    assert network_transitivity(one_way) == 0.0
