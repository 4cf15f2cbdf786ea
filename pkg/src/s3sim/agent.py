"""Per-agent state: demographics, emotion, attitude, awareness and memory pool."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from typing import Callable, Optional

import numpy as np

from .network import UserCategory, UserRecord

log = logging.getLogger(__name__)


class Gender(str, Enum):
    FEMALE = "Female"
    MALE = "Male"
    UNKNOWN = "Unknown"


class Occupation(str, Enum):
    EDUCATION = "Education Practitioner"
    ADMINISTRATIVE = "Administrative Manager / Officer"
    UNEMPLOYED_STUDENT = "Unemployed / Student"
    ENGINEER = "Engineer"
    LABOR = "Labor Technician / Worker"
    LOGISTICS = "Logistics Practitioner"
    MEDICAL = "Medical Personnel"
    FINANCIAL = "Financial Practitioner"
    MEDIA = "Media Personnel"
    ENTERTAINMENT_ARTS = "Entertainment and Arts Practitioner"
    UNKNOWN = "Unknown"


class EmotionLevel(IntEnum):
    CALM = 0
    MODERATE = 1
    INTENSE = 2


class Attitude(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"

    def opposite(self) -> "Attitude":
        return Attitude.NEGATIVE if self is Attitude.POSITIVE else Attitude.POSITIVE


class SourceRelation(str, Enum):
    UNIDIRECTIONAL_FOLLOWEE = "UnidirectionalFollowee"
    MUTUAL_FOLLOWEE = "MutualFollowee"
    PLATFORM_RECOMMENDATION = "PlatformRecommendation"
    SELF_POST = "SelfPost"


@dataclass(frozen=True)
class Demographics:
    age: Optional[int] = None
    gender: Gender = Gender.UNKNOWN
    occupation: Occupation = Occupation.UNKNOWN

    def __post_init__(self):
        if self.age is not None and not 0 <= self.age <= 120:
            raise ValueError(f"age out of range: {self.age}")

    def render(self) -> str:
        age = "unknown" if self.age is None else str(self.age)
        return f"age {age}; gender {self.gender.value}; occupation {self.occupation.value}"


@dataclass(frozen=True)
class Message:
    message_id: str
    author: str
    step: int
    content: str
    event_id: str
    forward_of: Optional[str] = None  # parent message id; None for an original post
    root_id: Optional[str] = None  # original at the end of the forward chain
    stance: Optional[Attitude] = None
    emotion: Optional[EmotionLevel] = None

    @property
    def root(self) -> str:
        return self.root_id or self.message_id

    @property
    def is_forward(self) -> bool:
        return self.forward_of is not None

    def to_json(self) -> dict:
        return {
            "message_id": self.message_id,
            "author": self.author,
            "step": self.step,
            "content": self.content,
            "event_id": self.event_id,
            "kind": "Forward" if self.is_forward else "Original",
            "forward_of": self.forward_of,
            "root_id": self.root,
            "stance": self.stance.value if self.stance else None,
            "emotion": self.emotion.name if self.emotion is not None else None,
        }


@dataclass(frozen=True)
class MemoryItem:
    message: Message
    received_step: int
    source: SourceRelation
    time_score: float
    relevance_score: float
    authenticity_score: float
    combined_score: float

    def eviction_key(self) -> tuple:
        # lowest key is evicted first
        return (self.combined_score, self.received_step, self.message.message_id)


DEFAULT_AUTHENTICITY = {
    SourceRelation.SELF_POST: 1.0,
    SourceRelation.MUTUAL_FOLLOWEE: 0.8,
    SourceRelation.UNIDIRECTIONAL_FOLLOWEE: 0.6,
    SourceRelation.PLATFORM_RECOMMENDATION: 0.4,
}


@dataclass(frozen=True)
class MemoryConfig:
    capacity: int = 10
    decay_rate: float = 0.1
    weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)  # time, relevance, authenticity
    authenticity: dict = field(default_factory=lambda: dict(DEFAULT_AUTHENTICITY))

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("memory capacity must be >= 1")
        if self.decay_rate < 0:
            raise ValueError("decay rate must be >= 0")
        if len(self.weights) != 3 or any(w < 0 for w in self.weights):
            raise ValueError("weights must be three non-negative numbers")
        if not math.isclose(sum(self.weights), 1.0, abs_tol=1e-9):
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")

    def combine(self, t: float, r: float, a: float) -> float:
        wt, wr, wa = self.weights
        return wt * t + wr * r + wa * a


@dataclass
class AgentState:
    user_id: str
    demographics: Demographics
    category: UserCategory
    description: str = ""
    emotion: EmotionLevel = EmotionLevel.CALM
    attitude: Optional[Attitude] = None
    aware: set = field(default_factory=set)  # event ids
    memory: list = field(default_factory=list)
    history: list = field(default_factory=list)  # own posts as text or Message
    last_stimulus_step: int = 0
    last_decay_step: int = 0
    seen_roots: set = field(default_factory=set)  # cascade roots already decided on or authored

    def is_aware(self, event_id: str) -> bool:
        return event_id in self.aware

    def attribute_text(self) -> str:
        return f"{self.demographics.render()}; {self.description}".strip()

    def history_texts(self) -> list[str]:
        return [h.content if isinstance(h, Message) else h for h in self.history]

    def copy(self) -> "AgentState":
        return replace(
            self,
            aware=set(self.aware),
            memory=list(self.memory),
            history=list(self.history),
            seen_roots=set(self.seen_roots),
        )


def init_agent(record: UserRecord, demographics: Demographics, category: UserCategory) -> AgentState:
    return AgentState(
        user_id=record.user_id,
        demographics=demographics,
        category=category,
        description=record.description,
        history=[p.text for p in record.posts],
    )


def time_score(received_step: int, now_step: int, decay_rate: float) -> float:
    """exp(-decay_rate * elapsed)."""
    if now_step < received_step:
        raise ValueError(f"now_step {now_step} precedes received_step {received_step}")
    if decay_rate < 0:
        raise ValueError("decay rate must be >= 0")
    return math.exp(-decay_rate * (now_step - received_step))


def _cosine01(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        log.debug("zero-norm embedding in relevance score; using neutral 0.5")
        return 0.5
    cos = float(np.dot(u, v)) / (nu * nv)
    cos = min(1.0, max(-1.0, cos))
    return (cos + 1.0) / 2.0


def relevance_score(agent: AgentState, message: Message, embed: Callable[[str], np.ndarray]) -> float:
    """Cosine between attribute text and message content, mapped onto [0, 1]."""
    return _cosine01(embed(agent.attribute_text()), embed(message.content))


def authenticity_score(source: SourceRelation, table: dict | None = None) -> float:
    return (table or DEFAULT_AUTHENTICITY)[SourceRelation(source)]


def make_memory_item(
    message: Message,
    received_step: int,
    now_step: int,
    source: SourceRelation,
    relevance: float,
    config: MemoryConfig,
) -> MemoryItem:
    t = time_score(received_step, now_step, config.decay_rate)
    a = authenticity_score(source, config.authenticity)
    return MemoryItem(message, received_step, source, t, relevance, a, config.combine(t, relevance, a))


def insert_memory(state: AgentState, item: MemoryItem, capacity: int) -> Optional[MemoryItem]:
    """Append ``item``; when over capacity evict and return the weakest item.

    Weakest = lowest combined score, then older received step, then smaller
    message id.
    """
    state.memory.append(item)
    if len(state.memory) <= capacity:
        return None
    idx = min(range(len(state.memory)), key=lambda i: state.memory[i].eviction_key())
    return state.memory.pop(idx)


def rescore_memory(state: AgentState, now_step: int, config: MemoryConfig) -> None:
    out = []
    for it in state.memory:
        t = time_score(it.received_step, now_step, config.decay_rate)
        out.append(replace(it, time_score=t,
                           combined_score=config.combine(t, it.relevance_score, it.authenticity_score)))
    state.memory = out


def decay_emotion(state: AgentState, steps_since_last_stimulus: int, threshold: int) -> bool:
    """Step emotion down one level once the idle time reaches ``threshold``.

    Returns True when the level changed.
    """
    if steps_since_last_stimulus >= threshold and state.emotion > EmotionLevel.CALM:
        state.emotion = EmotionLevel(state.emotion - 1)
        return True
    return False


def memory_context(state: AgentState) -> list[MemoryItem]:
    """Pool contents, strongest first."""
    return sorted(state.memory, key=MemoryItem.eviction_key, reverse=True)
