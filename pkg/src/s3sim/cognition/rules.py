"""Deterministic rule backend.

All randomness is derived by hashing (seed, operation, user, step, message)
so results do not depend on call order or thread scheduling.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Optional, Sequence

from ..agent import (
    Attitude,
    EmotionLevel,
    Gender,
    Message,
    Occupation,
)
from .base import (
    OCCUPATION_ALIASES,
    Action,
    ActionDecision,
    CognitionBackend,
    Profile,
    StateSummary,
    normalize,
)

FEMALE_WORDS = frozenset(
    "mother mom mum wife girl woman she her daughter sister lady aunt grandma girlfriend".split()
)
MALE_WORDS = frozenset(
    "father dad husband boy man he his son brother guy uncle grandpa boyfriend".split()
)

POST_TEMPLATES = {
    (Attitude.NEGATIVE, EmotionLevel.INTENSE): "I am outraged about {event}: this must stop.",
    (Attitude.NEGATIVE, EmotionLevel.MODERATE): "I am worried about {event}.",
    (Attitude.NEGATIVE, EmotionLevel.CALM): "I have doubts about {event}.",
    (Attitude.POSITIVE, EmotionLevel.INTENSE): "I strongly support {event}: this is the right call!",
    (Attitude.POSITIVE, EmotionLevel.MODERATE): "I think {event} is reasonable.",
    (Attitude.POSITIVE, EmotionLevel.CALM): "Noted: {event} seems fine.",
}
NEUTRAL_TEMPLATE = "Sharing news about {event}."


def unit_hash(seed: int, *parts: object) -> float:
    """Uniform float in [0, 1) from a stable hash of ``parts``."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed).encode())
    for p in parts:
        h.update(b"\x1f")
        h.update(str(p).encode("utf-8"))
    return int.from_bytes(h.digest(), "little") / 2.0**64


def int_hash(seed: int, *parts: object) -> int:
    return int(unit_hash(seed, *parts) * 2**53)


@dataclass(frozen=True)
class RuleProfile:
    # fixed per-message forward probability; None selects the emotion-driven rules
    forward_probability: Optional[float] = None
    action_rates: tuple[float, float, float] = (0.05, 0.15, 0.30)  # Calm, Moderate, Intense
    disagree_factor: float = 0.4
    post_new_share: float = 0.2
    post_new_relevance: float = 0.7
    inactive_relevance: float = 0.3
    intensity_relevance: float = 0.75
    flip_threshold: int = 3
    positive_prior: float = 0.0  # shifts the initial-attitude draw; (1 + prior) / 2 ~ P(positive)
    stance_weight: float = 0.5
    positive_words: tuple[str, ...] = ("support", "safe", "good", "agree", "benefit", "reasonable")
    negative_words: tuple[str, ...] = ("oppose", "dangerous", "bad", "against", "toxic", "outraged", "harm")
    max_post_length: int = 280

    @classmethod
    def always_forward(cls) -> "RuleProfile":
        return cls(forward_probability=1.0)


def _stance_balance(texts: Sequence[str], pos: Sequence[str], neg: Sequence[str]) -> int:
    bal = 0
    for t in texts:
        words = normalize(t).split()
        bal += sum(w in pos for w in words) - sum(w in neg for w in words)
    return bal


class RuleBackend(CognitionBackend):
    def __init__(self, seed: int = 0, profile: RuleProfile | None = None):
        self.seed = seed
        self.profile = profile or RuleProfile()

    def identity(self) -> dict:
        return {"kind": "rule", "seed": self.seed}

    def predict_gender(self, description: str) -> tuple[Gender, float]:
        words = normalize(description).split()
        f = sum(w in FEMALE_WORDS for w in words)
        m = sum(w in MALE_WORDS for w in words)
        conf = 1.0 - 0.5 ** abs(f - m) if f != m else 0.0
        if conf < 0.5:
            return Gender.UNKNOWN, conf
        return (Gender.FEMALE if f > m else Gender.MALE), conf

    def predict_age(self, posts: Sequence[str]) -> int:
        if not posts:
            raise ValueError("age prediction needs at least one post")
        return min(100, max(10, 10 + int_hash(self.seed, "age", "\n".join(posts)) % 60))

    def predict_occupation(self, description: str, posts: Sequence[str]) -> Occupation:
        text = " " + normalize(" ".join([description, *posts])) + " "
        counts: dict[Occupation, int] = {}
        for alias, occ in OCCUPATION_ALIASES.items():
            if occ is Occupation.UNKNOWN:
                continue
            n = text.count(f" {alias} ")
            if n:
                counts[occ] = counts.get(occ, 0) + n
        if not counts:
            return Occupation.UNKNOWN
        order = list(Occupation)
        return max(counts, key=lambda o: (counts[o], -order.index(o)))

    def next_emotion(self, profile, current, received, memory_context, summary) -> EmotionLevel:
        if not received:
            return current
        points = len(received) + (summary.relevance >= self.profile.intensity_relevance)
        if points >= 2:
            return EmotionLevel.INTENSE
        return max(current, EmotionLevel.MODERATE)

    def initial_attitude(self, profile: Profile, event_description: str = "", default=None) -> Attitude:
        p = self.profile
        u = unit_hash(self.seed, "attitude0", profile.user_id)
        bal = _stance_balance(profile.history, p.positive_words, p.negative_words)
        value = (2 * u - 1) + p.positive_prior + p.stance_weight * bal
        return Attitude.POSITIVE if value >= 0 else Attitude.NEGATIVE

    def next_attitude(self, profile, current, received, summary) -> Attitude:
        opposing = sum(m.stance is not None and m.stance != current for m in received)
        if not opposing:
            return current
        p_flip = min(1.0, opposing / self.profile.flip_threshold)
        if unit_hash(self.seed, "flip", profile.user_id, summary.step) < p_flip:
            return current.opposite()
        return current

    def decide_action(self, profile: Profile, received: Message, summary: StateSummary) -> ActionDecision:
        p = self.profile
        u = unit_hash(self.seed, "act", profile.user_id, summary.step, received.message_id)
        if p.forward_probability is not None:
            act = Action.FORWARD if u < p.forward_probability else Action.INACTIVE
            return ActionDecision(act, p.forward_probability)
        if summary.emotion == EmotionLevel.INTENSE and summary.relevance >= p.post_new_relevance:
            return ActionDecision(Action.POST_NEW, 1.0)
        if summary.emotion == EmotionLevel.CALM and summary.relevance < p.inactive_relevance:
            return ActionDecision(Action.INACTIVE, 0.0)
        rate = p.action_rates[int(summary.emotion)]
        if summary.attitude is not None and received.stance is not None and received.stance != summary.attitude:
            rate *= p.disagree_factor
        if u >= rate:
            return ActionDecision(Action.INACTIVE, rate)
        v = unit_hash(self.seed, "kind", profile.user_id, summary.step, received.message_id)
        return ActionDecision(Action.POST_NEW if v < p.post_new_share else Action.FORWARD, rate)

    def generate_post(self, profile, summary, event_description, memory_context) -> str:
        if summary.attitude is None:
            tmpl = NEUTRAL_TEMPLATE
        else:
            tmpl = POST_TEMPLATES[(summary.attitude, summary.emotion)]
        text = tmpl.format(event=event_description or "this event")
        return text[: self.profile.max_post_length]
