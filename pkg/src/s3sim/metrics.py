"""Population time series and individual-level evaluation metrics."""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Optional, Sequence

import numpy as np

from .agent import AgentState, Attitude

# population-level


def emotion_density(agents: Iterable[AgentState], event_id: str | None = None) -> float:
    """Mean emotion index over aware agents, scaled to [0, 1]."""
    levels = [
        int(a.emotion)
        for a in agents
        if (a.is_aware(event_id) if event_id is not None else bool(a.aware))
    ]
    if not levels:
        return 0.0
    return sum(levels) / (2 * len(levels))


def positive_fraction(agents: Iterable[AgentState]) -> Optional[float]:
    holders = [a.attitude for a in agents if a.attitude is not None]
    if not holders:
        return None
    return sum(h is Attitude.POSITIVE for h in holders) / len(holders)


SERIES_HEADER = ["step", "aware", "emotion_density", "positive_fraction", "messages"]


@dataclass(frozen=True)
class StepRecord:
    step: int
    aware: int
    emotion_density: float
    positive_fraction: Optional[float]
    messages: int


@dataclass
class MetricsSeries:
    records: list[StepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.records]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SERIES_HEADER)
        for r in self.records:
            pf = "" if r.positive_fraction is None else repr(r.positive_fraction)
            w.writerow([r.step, r.aware, repr(r.emotion_density), pf, r.messages])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "MetricsSeries":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != SERIES_HEADER:
            raise ValueError("not a metrics series CSV")
        out = []
        for row in rows[1:]:
            step, aware, dens, pf, msgs = row
            out.append(StepRecord(int(step), int(aware), float(dens), float(pf) if pf else None, int(msgs)))
        return cls(out)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


# individual-level

TASKS = ("emotion", "attitude", "action", "gender", "age")


@dataclass
class EvalSet:
    task: str
    true: list
    pred: list
    scores: Optional[list] = None

    def __post_init__(self):
        if not self.true:
            raise ValueError("empty evaluation set")
        if len(self.true) != len(self.pred) or (self.scores is not None and len(self.scores) != len(self.true)):
            raise ValueError("length mismatch")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["score", "pred", "true"])
        scores = self.scores or [None] * len(self.true)
        for s, p, t in zip(scores, self.pred, self.true):
            w.writerow(["" if s is None else repr(float(s)), p, t])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, task: str) -> "EvalSet":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["score", "pred", "true"]:
            raise ValueError("expected header score,pred,true")
        conv = float if task == "age" else _label
        scores, pred, true = [], [], []
        for row in rows[1:]:
            if not row:
                continue
            s, p, t = row
            scores.append(float(s) if s.strip() else None)
            pred.append(conv(p))
            true.append(conv(t))
        if any(s is None for s in scores):
            scores = None
        return cls(task, true, pred, scores)


def _label(text: str):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return text


def accuracy(true: Sequence, pred: Sequence) -> float:
    if len(true) != len(pred) or not true:
        raise ValueError("need equal-length non-empty sequences")
    return sum(t == p for t, p in zip(true, pred)) / len(true)


def _confusion(true, pred, positive) -> tuple[int, int, int, int]:
    tp = fp = fn = tn = 0
    for t, p in zip(true, pred):
        if p == positive:
            if t == positive:
                tp += 1
            else:
                fp += 1
        elif t == positive:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def precision(true: Sequence, pred: Sequence, positive: Hashable = 1) -> float:
    tp, fp, _, _ = _confusion(true, pred, positive)
    return tp / (tp + fp) if tp + fp else 0.0


def recall(true: Sequence, pred: Sequence, positive: Hashable = 1) -> float:
    tp, _, fn, _ = _confusion(true, pred, positive)
    return tp / (tp + fn) if tp + fn else 0.0


def f1(true: Sequence, pred: Sequence, positive: Hashable = 1) -> float:
    p = precision(true, pred, positive)
    r = recall(true, pred, positive)
    return 2 * p * r / (p + r) if p + r else 0.0


def macro_f1(true: Sequence, pred: Sequence, labels: Sequence | None = None) -> float:
    labels = sorted(set(true) | set(pred), key=str) if labels is None else list(labels)
    return sum(f1(true, pred, c) for c in labels) / len(labels)


def auc(true: Sequence, scores: Sequence[float], positive: Hashable = 1) -> Optional[float]:
    """Probability a random positive outscores a random negative (ties count 1/2).

    Computed from average ranks; None when either class is missing.
    """
    y = np.array([t == positive for t in true], dtype=bool)
    s = np.asarray(scores, dtype=np.float64)
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(len(s), dtype=np.float64)
    sorted_s = s[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def _check_ages(true: Sequence[float], pred: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    t = np.asarray(true, dtype=np.float64)
    p = np.asarray(pred, dtype=np.float64)
    if t.shape != p.shape or t.size == 0:
        raise ValueError("need equal-length non-empty sequences")
    return t, p


def mse(true: Sequence[float], pred: Sequence[float]) -> float:
    t, p = _check_ages(true, pred)
    return float(np.mean((p - t) ** 2))


def mae(true: Sequence[float], pred: Sequence[float]) -> float:
    t, p = _check_ages(true, pred)
    return float(np.mean(np.abs(p - t)))


def mean_pct_error(true: Sequence[float], pred: Sequence[float]) -> float:
    """Mean absolute percentage error, in percent."""
    t, p = _check_ages(true, pred)
    if np.any(t <= 0):
        raise ValueError("true ages must be positive")
    return float(100.0 * np.mean(np.abs(p - t) / t))


def cosine_similarity(a: Sequence[float], b: Sequence[float]) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine similarity undefined for a zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def evaluate(es: EvalSet, positive: Hashable = 1) -> dict:
    """Table-style report for one task."""
    if es.task == "age":
        return {"task": "age", "n": len(es.true), "mse": mse(es.true, es.pred),
                "mae": mae(es.true, es.pred), "mean_pct_error": mean_pct_error(es.true, es.pred)}
    if es.task == "emotion":
        return {"task": "emotion", "n": len(es.true), "accuracy": accuracy(es.true, es.pred),
                "macro_f1": macro_f1(es.true, es.pred)}
    return {
        "task": es.task,
        "n": len(es.true),
        "accuracy": accuracy(es.true, es.pred),
        "precision": precision(es.true, es.pred, positive),
        "f1": f1(es.true, es.pred, positive),
        "auc": auc(es.true, es.scores, positive) if es.scores is not None else None,
    }


def build_interaction_eval_set(
    records: Iterable[dict],
    negative_ratio: float = 1.0,
    seed: int = 0,
    threshold: float = 0.5,
) -> EvalSet:
    """Action-task eval set from an event log's decision records.

    Every delivery followed by Forward/PostNew is a positive; negatives are a
    seeded sample of Inactive deliveries, ``negative_ratio`` per positive.
    Suppressed duplicates are excluded since no decision was made.
    """
    decisions = [r for r in records if r.get("type") == "decision" and not r.get("suppressed")]
    pos = [i for i, r in enumerate(decisions) if r["action"] != "Inactive"]
    neg = [i for i, r in enumerate(decisions) if r["action"] == "Inactive"]
    if not pos:
        raise ValueError("event log has no positive interactions")
    k = min(len(neg), int(round(negative_ratio * len(pos))))
    chosen = sorted(pos + random.Random(seed).sample(neg, k))
    true, pred, scores = [], [], []
    for i in chosen:
        r = decisions[i]
        label = int(r["action"] != "Inactive")
        s = r.get("score")
        true.append(label)
        scores.append(s)
        pred.append(int(s >= threshold) if s is not None else label)
    return EvalSet("action", true, pred, None if any(s is None for s in scores) else scores)
