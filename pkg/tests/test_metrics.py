import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from s3sim.agent import AgentState, Attitude, Demographics, EmotionLevel
from s3sim.metrics import (
    EvalSet,
    MetricsSeries,
    StepRecord,
    accuracy,
    auc,
    build_interaction_eval_set,
    cosine_similarity,
    emotion_density,
    evaluate,
    f1,
    macro_f1,
    mae,
    mean_pct_error,
    mse,
    positive_fraction,
    precision,
)
from s3sim.network import UserCategory

from oracles import auc_pairs, metric_mismatches, random_eval_case


def _agent(uid, emotion=EmotionLevel.CALM, attitude=None, aware=True):
    a = AgentState(uid, Demographics(), UserCategory.REGULAR, emotion=emotion, attitude=attitude)
    if aware:
        a.aware.add("e")
    return a


def test_emotion_density_examples():
    assert emotion_density([_agent("a"), _agent("b")], "e") == 0.0
    assert emotion_density([_agent("a", EmotionLevel.INTENSE)], "e") == 1.0
    pair = [_agent("a", EmotionLevel.MODERATE), _agent("b", EmotionLevel.INTENSE)]
    assert emotion_density(pair, "e") == 0.75
    assert emotion_density([_agent("z", EmotionLevel.INTENSE, aware=False)], "e") == 0.0
    assert emotion_density(list(reversed(pair)), "e") == 0.75


def test_positive_fraction_examples():
    ags = [_agent(str(i), attitude=Attitude.POSITIVE) for i in range(3)] + [_agent("n", attitude=Attitude.NEGATIVE)]
    assert positive_fraction(ags) == 0.75
    assert positive_fraction([_agent("x")]) is None
    assert positive_fraction([_agent("x", attitude=Attitude.NEGATIVE)]) == 0.0


def test_auc_examples():
    assert auc([1, 1, 0, 0], [0.9, 0.4, 0.5, 0.1]) == 0.75
    assert auc([1, 0], [0.9, 0.1]) == 1.0
    assert auc([1, 1], [0.3, 0.4]) is None
    assert auc([1, 0], [0.5, 0.5]) == 0.5


def test_classification_examples():
    assert accuracy([1, 0, 1], [1, 0, 1]) == 1.0 and f1([1, 0, 1], [1, 0, 1]) == 1.0
    assert precision([1, 1, 1, 0], [1, 1, 1, 1]) == 0.75
    assert precision([1, 0], [0, 0]) == 0.0
    assert precision([1, 0, 1, 0], [1, 1, 1, 1]) == 0.5
    assert f1([0, 0], [0, 0]) == 0.0
    assert macro_f1(["a", "b"], ["a", "b"]) == 1.0


def test_regression_examples():
    assert mse([30], [30]) == 0 and mae([30], [30]) == 0 and mean_pct_error([30], [30]) == 0
    assert mse([20, 30], [30, 20]) == 100 and mae([20, 30], [30, 20]) == 10
    assert mean_pct_error([30], [24]) == pytest.approx(20.0)
    with pytest.raises(ValueError):
        mean_pct_error([0], [5])


def test_cosine_examples():
    assert cosine_similarity([1, 2], [1, 2]) == pytest.approx(1.0)
    assert cosine_similarity([1, 0], [0, 1]) == 0.0
    assert cosine_similarity([1, 0], [1, 1]) == pytest.approx(0.70711, abs=1e-5)
    with pytest.raises(ValueError):
        cosine_similarity([0, 0], [1, 1])


@pytest.mark.parametrize("seed", range(50))
def test_metrics_match_oracles(seed):
    assert metric_mismatches(random_eval_case(random.Random(seed))) == []


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(-1000, 1000)), min_size=2, max_size=40))
@settings(max_examples=200)
def test_auc_monotone_invariance(pairs):
    # a 0.1 grid keeps the transforms strictly increasing in floating point
    true = [t for t, _ in pairs]
    s = [x / 10 for _, x in pairs]
    base = auc(true, s)
    want = auc_pairs(true, s)
    assert (base is None and want is None) or abs(base - want) < 1e-12
    for f in (lambda x: 3 * x + 7, lambda x: math.atan(x), lambda x: x ** 3):
        got = auc(true, [f(x) for x in s])
        assert (got is None and base is None) or abs(got - base) < 1e-12


def _decisions(n_act, n_inactive):
    recs = []
    for i in range(n_act + n_inactive):
        recs.append({"type": "decision", "message_id": f"m{i}", "user_id": f"u{i}", "step": 1,
                     "action": "Forward" if i < n_act else "Inactive", "score": 0.3, "suppressed": False})
    recs.append({"type": "decision", "message_id": "dup", "user_id": "x", "step": 2,
                 "action": "Inactive", "score": None, "suppressed": True})
    return recs


def test_interaction_eval_set_counts():
    es = build_interaction_eval_set(_decisions(2, 8), negative_ratio=4, seed=1)
    assert sorted(es.true) == [0] * 8 + [1] * 2
    es1 = build_interaction_eval_set(_decisions(2, 8), negative_ratio=1, seed=5)
    assert sorted(es1.true) == [0, 0, 1, 1]
    assert es1 == build_interaction_eval_set(_decisions(2, 8), negative_ratio=1, seed=5)
    with pytest.raises(ValueError):
        build_interaction_eval_set([], 1)
    with pytest.raises(ValueError):
        build_interaction_eval_set(_decisions(0, 3), 1)


def test_evaluate_reports():
    es = EvalSet("gender", [1, 0, 1, 0], [1, 1, 1, 0], [0.9, 0.6, 0.8, 0.1])
    rep = evaluate(es)
    assert rep["precision"] == pytest.approx(2 / 3) and rep["auc"] == 1.0
    emo = evaluate(EvalSet("emotion", [0, 1, 2], [0, 1, 1]))
    assert set(emo) == {"task", "n", "accuracy", "macro_f1"}
    age = evaluate(EvalSet("age", [20.0, 30.0], [30.0, 20.0]))
    assert age["mse"] == 100 and age["mae"] == 10


def test_evalset_validation_and_csv():
    with pytest.raises(ValueError):
        EvalSet("action", [], [])
    with pytest.raises(ValueError):
        EvalSet("action", [1], [1, 0])
    es = EvalSet("action", [1, 0, 1], [1, 0, 0], [0.7, 0.2, 0.4])
    assert EvalSet.from_csv(es.to_csv(), "action") == es
    ages = EvalSet("age", [20.0, 31.5], [22.0, 30.0])
    assert EvalSet.from_csv(ages.to_csv(), "age") == ages
    with pytest.raises(ValueError):
        EvalSet.from_csv("a,b\n1,2\n", "action")


@given(st.lists(st.tuples(st.integers(0, 10**6), st.floats(0, 1), st.one_of(st.none(), st.floats(0, 1)),
                          st.integers(0, 100)), max_size=20))
def test_series_csv_round_trip(rows):
    s = MetricsSeries([StepRecord(i, a, d, p, m) for i, (a, d, p, m) in enumerate(rows)])
    back = MetricsSeries.from_csv(s.to_csv())
    assert back == s
    assert back.to_csv() == s.to_csv()
