"""Cognition backend interface and the shared reply parsers."""

from __future__ import annotations

import abc
import re
import string
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from ..agent import (
    Attitude,
    Demographics,
    EmotionLevel,
    Gender,
    MemoryItem,
    Message,
    Occupation,
)
from .embedding import trigram_embedding


class Action(str, Enum):
    FORWARD = "Forward"
    POST_NEW = "PostNew"
    INACTIVE = "Inactive"


class BackendError(Exception):
    """A backend call failed after exhausting its retries."""


@dataclass(frozen=True)
class Profile:
    """Static inputs about one agent that every judgment may use."""

    user_id: str
    demographics: Demographics
    description: str = ""
    history: tuple[str, ...] = ()


@dataclass(frozen=True)
class StateSummary:
    step: int
    emotion: EmotionLevel
    attitude: Optional[Attitude]
    relevance: float = 0.5


@dataclass(frozen=True)
class ActionDecision:
    action: Action
    # backend's probability of a non-Inactive action, when it has one
    score: Optional[float] = None


_PUNCT = str.maketrans({c: " " for c in string.punctuation})


def normalize(text: str) -> str:
    return " ".join(text.lower().translate(_PUNCT).split())


def last_line(reply: object) -> str:
    if not isinstance(reply, str):
        return ""
    lines = [ln for ln in reply.splitlines() if ln.strip()]
    return normalize(lines[-1]) if lines else ""


GENDER_ALIASES = {
    "female": Gender.FEMALE, "woman": Gender.FEMALE, "f": Gender.FEMALE,
    "male": Gender.MALE, "man": Gender.MALE, "m": Gender.MALE,
    "unknown": Gender.UNKNOWN, "none": Gender.UNKNOWN,
}

EMOTION_ALIASES = {
    "calm": EmotionLevel.CALM, "0": EmotionLevel.CALM,
    "moderate": EmotionLevel.MODERATE, "1": EmotionLevel.MODERATE,
    "intense": EmotionLevel.INTENSE, "2": EmotionLevel.INTENSE,
}

ATTITUDE_ALIASES = {
    "positive": Attitude.POSITIVE, "support": Attitude.POSITIVE,
    "negative": Attitude.NEGATIVE, "oppose": Attitude.NEGATIVE,
}

ACTION_ALIASES = {
    "forward": Action.FORWARD, "repost": Action.FORWARD, "retweet": Action.FORWARD,
    "postnew": Action.POST_NEW, "post new": Action.POST_NEW, "post": Action.POST_NEW,
    "new post": Action.POST_NEW,
    "inactive": Action.INACTIVE, "nothing": Action.INACTIVE, "none": Action.INACTIVE,
    "do nothing": Action.INACTIVE, "ignore": Action.INACTIVE,
}

OCCUPATION_ALIASES = {normalize(o.value): o for o in Occupation}
OCCUPATION_ALIASES.update({
    "teacher": Occupation.EDUCATION, "professor": Occupation.EDUCATION,
    "lecturer": Occupation.EDUCATION, "educator": Occupation.EDUCATION,
    "tutor": Occupation.EDUCATION,
    "manager": Occupation.ADMINISTRATIVE, "officer": Occupation.ADMINISTRATIVE,
    "civil servant": Occupation.ADMINISTRATIVE, "administrator": Occupation.ADMINISTRATIVE,
    "official": Occupation.ADMINISTRATIVE,
    "student": Occupation.UNEMPLOYED_STUDENT, "unemployed": Occupation.UNEMPLOYED_STUDENT,
    "retired": Occupation.UNEMPLOYED_STUDENT, "housewife": Occupation.UNEMPLOYED_STUDENT,
    "engineer": Occupation.ENGINEER, "programmer": Occupation.ENGINEER,
    "developer": Occupation.ENGINEER, "software engineer": Occupation.ENGINEER,
    "worker": Occupation.LABOR, "technician": Occupation.LABOR,
    "laborer": Occupation.LABOR, "mechanic": Occupation.LABOR, "farmer": Occupation.LABOR,
    "driver": Occupation.LOGISTICS, "courier": Occupation.LOGISTICS,
    "logistics": Occupation.LOGISTICS, "delivery": Occupation.LOGISTICS,
    "doctor": Occupation.MEDICAL, "nurse": Occupation.MEDICAL,
    "physician": Occupation.MEDICAL, "pharmacist": Occupation.MEDICAL,
    "accountant": Occupation.FINANCIAL, "banker": Occupation.FINANCIAL,
    "analyst": Occupation.FINANCIAL, "trader": Occupation.FINANCIAL,
    "finance": Occupation.FINANCIAL,
    "journalist": Occupation.MEDIA, "reporter": Occupation.MEDIA,
    "editor": Occupation.MEDIA, "blogger": Occupation.MEDIA, "media": Occupation.MEDIA,
    "actor": Occupation.ENTERTAINMENT_ARTS, "actress": Occupation.ENTERTAINMENT_ARTS,
    "singer": Occupation.ENTERTAINMENT_ARTS, "artist": Occupation.ENTERTAINMENT_ARTS,
    "musician": Occupation.ENTERTAINMENT_ARTS, "painter": Occupation.ENTERTAINMENT_ARTS,
    "writer": Occupation.ENTERTAINMENT_ARTS,
})


def _lookup(reply: object, table: dict):
    key = last_line(reply)
    if key in table:
        return table[key]
    compact = key.replace(" ", "")
    return table.get(compact)


def parse_gender(reply: object) -> Optional[Gender]:
    return _lookup(reply, GENDER_ALIASES)


def parse_emotion(reply: object) -> Optional[EmotionLevel]:
    return _lookup(reply, EMOTION_ALIASES)


def parse_attitude(reply: object) -> Optional[Attitude]:
    return _lookup(reply, ATTITUDE_ALIASES)


def parse_action(reply: object) -> Optional[Action]:
    return _lookup(reply, ACTION_ALIASES)


def parse_occupation(reply: object) -> Occupation:
    """Map a free-text reply onto the closed occupation set; Unknown if unmappable."""
    return _lookup(reply, OCCUPATION_ALIASES) or Occupation.UNKNOWN


_INT_RE = re.compile(r"-?\d+")


def parse_age(reply: object) -> Optional[int]:
    m = _INT_RE.findall(last_line(reply))
    if not m:
        return None
    try:
        age = int(m[-1])
    except ValueError:
        return None
    return age if 10 <= age <= 100 else None


class CognitionBackend(abc.ABC):
    """Every judgment the simulator delegates to a language model."""

    supports_embedding: bool = False
    supports_logprob: bool = False

    @abc.abstractmethod
    def predict_gender(self, description: str) -> tuple[Gender, float]: ...

    @abc.abstractmethod
    def predict_age(self, posts: Sequence[str]) -> int: ...

    @abc.abstractmethod
    def predict_occupation(self, description: str, posts: Sequence[str]) -> Occupation: ...

    @abc.abstractmethod
    def next_emotion(
        self,
        profile: Profile,
        current: EmotionLevel,
        received: Sequence[Message],
        memory_context: Sequence[MemoryItem],
        summary: StateSummary,
    ) -> EmotionLevel: ...

    @abc.abstractmethod
    def initial_attitude(
        self, profile: Profile, event_description: str, default: Attitude = Attitude.POSITIVE
    ) -> Attitude: ...

    @abc.abstractmethod
    def next_attitude(
        self,
        profile: Profile,
        current: Attitude,
        received: Sequence[Message],
        summary: StateSummary,
    ) -> Attitude: ...

    @abc.abstractmethod
    def decide_action(self, profile: Profile, received: Message, summary: StateSummary) -> ActionDecision: ...

    @abc.abstractmethod
    def generate_post(
        self,
        profile: Profile,
        summary: StateSummary,
        event_description: str,
        memory_context: Sequence[MemoryItem],
    ) -> str: ...

    def embed(self, text: str) -> np.ndarray:
        return trigram_embedding(text)

    def identity(self) -> dict:
        return {"kind": type(self).__name__}
