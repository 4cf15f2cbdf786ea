import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from s3sim.agent import (
    AgentState,
    Attitude,
    DEFAULT_AUTHENTICITY,
    Demographics,
    EmotionLevel,
    MemoryConfig,
    Message,
    Occupation,
    SourceRelation,
    authenticity_score,
    decay_emotion,
    init_agent,
    insert_memory,
    make_memory_item,
    relevance_score,
    rescore_memory,
    time_score,
)
from s3sim.network import Post, UserCategory, UserRecord

from oracles import memory_sequence_matches


def _agent(**kw):
    return AgentState("u1", Demographics(), UserCategory.REGULAR, **kw)


def _item(mid, score, step=0):
    msg = Message(mid, "a", step, "text", "e")
    return make_memory_item(msg, step, step, SourceRelation.SELF_POST, 0.0,
                            MemoryConfig(weights=(0.0, 0.0, 1.0),
                                         authenticity={**DEFAULT_AUTHENTICITY,
                                                       SourceRelation.SELF_POST: score}))


def test_init_agent_defaults():
    rec = UserRecord("u", "desc", tuple(Post(i, f"p{i}") for i in range(5)))
    st_ = init_agent(rec, Demographics(30), UserCategory.REGULAR)
    assert st_.emotion is EmotionLevel.CALM
    assert st_.attitude is None and not st_.aware and st_.memory == []
    assert len(st_.history) == 5
    assert init_agent(UserRecord("v"), Demographics(), UserCategory.REGULAR).history == []


def test_demographics_bounds():
    with pytest.raises(ValueError):
        Demographics(age=121)
    assert Demographics(occupation=Occupation.ENGINEER).occupation.value == "Engineer"


def test_time_score_values():
    assert time_score(3, 3, 0.7) == 1.0
    assert time_score(0, 50, 0.0) == 1.0
    assert time_score(0, 2, 0.5) == pytest.approx(0.36788, abs=1e-5)
    with pytest.raises(ValueError):
        time_score(5, 4, 0.1)


@given(st.floats(0.01, 5), st.integers(0, 50))
def test_time_score_strictly_decreasing(lam, dt):
    assert time_score(0, dt + 1, lam) < time_score(0, dt, lam)


def test_relevance_mapping():
    vecs = {"same": np.array([1.0, 0.0]), "perp": np.array([0.0, 1.0]), "anti": np.array([-1.0, 0.0])}
    agent = _agent()
    base = agent.attribute_text()
    embed = lambda text: vecs["same"] if text == base else vecs[text]
    assert relevance_score(agent, Message("m", "a", 0, "same", "e"), lambda t: vecs["same"]) == 1.0
    assert relevance_score(agent, Message("m", "a", 0, "perp", "e"), embed) == 0.5
    assert relevance_score(agent, Message("m", "a", 0, "anti", "e"), embed) == 0.0
    assert relevance_score(agent, Message("m", "a", 0, "x", "e"), lambda t: np.zeros(2)) == 0.5


def test_authenticity_defaults():
    assert authenticity_score(SourceRelation.SELF_POST) == 1.0
    assert authenticity_score(SourceRelation.MUTUAL_FOLLOWEE) == 0.8
    assert authenticity_score(SourceRelation.UNIDIRECTIONAL_FOLLOWEE) == 0.6
    assert authenticity_score(SourceRelation.PLATFORM_RECOMMENDATION) == 0.4
    custom = {**DEFAULT_AUTHENTICITY, SourceRelation.SELF_POST: 0.9}
    assert authenticity_score("SelfPost", custom) == 0.9


def test_memory_config_validates_weights():
    with pytest.raises(ValueError):
        MemoryConfig(weights=(0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        MemoryConfig(capacity=0)


def test_insert_evicts_min():
    agent = _agent()
    insert_memory(agent, _item("a", 0.9), 2)
    insert_memory(agent, _item("b", 0.5), 2)
    ev = insert_memory(agent, _item("c", 0.7), 2)
    assert ev.message.message_id == "b"
    assert sorted(it.combined_score for it in agent.memory) == [0.7, 0.9]


def test_insert_non_full_no_eviction():
    agent = _agent()
    assert insert_memory(agent, _item("a", 0.1), 3) is None
    assert len(agent.memory) == 1


def test_insert_tie_evicts_older():
    agent = _agent()
    insert_memory(agent, _item("old", 0.5, step=1), 2)
    insert_memory(agent, _item("hi", 0.9, step=1), 2)
    ev = insert_memory(agent, _item("new", 0.5, step=4), 2)
    assert ev.message.message_id == "old"


def test_insert_tie_same_step_by_id():
    agent = _agent()
    insert_memory(agent, _item("m2", 0.5), 1)
    ev = insert_memory(agent, _item("m1", 0.5), 1)
    assert ev.message.message_id == "m1"


def test_rescore_decay_disabled_keeps_scores():
    cfg = MemoryConfig(decay_rate=0.0)
    agent = _agent()
    msg = Message("m", "a", 0, "t", "e")
    insert_memory(agent, make_memory_item(msg, 0, 0, SourceRelation.MUTUAL_FOLLOWEE, 0.3, cfg), 5)
    before = agent.memory[0].combined_score
    rescore_memory(agent, 10, cfg)
    assert agent.memory[0].combined_score == before


def test_rescore_single_item_formula():
    cfg = MemoryConfig(decay_rate=0.5, weights=(1.0, 0.0, 0.0))
    agent = _agent()
    insert_memory(agent, make_memory_item(Message("m", "a", 0, "t", "e"), 0, 0,
                                          SourceRelation.SELF_POST, 0.2, cfg), 5)
    assert agent.memory[0].combined_score == 1.0
    rescore_memory(agent, 2, cfg)
    assert agent.memory[0].combined_score == pytest.approx(0.36788, abs=1e-5)
    assert agent.memory[0].relevance_score == 0.2


@given(
    st.lists(st.tuples(st.floats(0, 1), st.sampled_from(list(SourceRelation)), st.integers(0, 10)),
             min_size=1, max_size=15),
    st.integers(0, 20),
    st.floats(0, 2),
)
@settings(deadline=None)
def test_rescore_monotone_and_decomposed(items, advance, lam):
    cfg = MemoryConfig(capacity=50, decay_rate=lam, weights=(0.2, 0.3, 0.5))
    agent = _agent()
    for k, (rel, src, step) in enumerate(items):
        insert_memory(agent, make_memory_item(Message(f"m{k}", "a", step, "t", "e"), step, 10, src, rel, cfg), 50)
    before = {it.message.message_id: it.combined_score for it in agent.memory}
    rescore_memory(agent, 10 + advance, cfg)
    for it in agent.memory:
        assert it.combined_score <= before[it.message.message_id] + 1e-12
        expect = 0.2 * it.time_score + 0.3 * it.relevance_score + 0.5 * it.authenticity_score
        assert abs(it.combined_score - expect) < 1e-9
        assert 0 <= it.time_score <= 1 and 0 <= it.combined_score <= 1


@pytest.mark.parametrize("capacity", [1, 5, 20])
@pytest.mark.parametrize("seed", range(20))
def test_memory_matches_bruteforce(capacity, seed):
    assert memory_sequence_matches(seed, capacity)


def test_decay_emotion_rules():
    a = _agent(emotion=EmotionLevel.INTENSE)
    assert decay_emotion(a, 3, 3) and a.emotion is EmotionLevel.MODERATE
    b = _agent(emotion=EmotionLevel.CALM)
    assert not decay_emotion(b, 100, 3) and b.emotion is EmotionLevel.CALM
    c = _agent(emotion=EmotionLevel.MODERATE)
    assert not decay_emotion(c, 2, 3) and c.emotion is EmotionLevel.MODERATE


@given(st.lists(st.integers(0, 10), max_size=30), st.integers(1, 5))
def test_decay_never_rises(idle_steps, threshold):
    a = _agent(emotion=EmotionLevel.INTENSE)
    seen = [a.emotion]
    for idle in idle_steps:
        decay_emotion(a, idle, threshold)
        seen.append(a.emotion)
    assert all(x >= y for x, y in zip(seen, seen[1:]))


def test_attitude_opposite():
    assert Attitude.POSITIVE.opposite() is Attitude.NEGATIVE
    assert Attitude.NEGATIVE.opposite() is Attitude.POSITIVE
