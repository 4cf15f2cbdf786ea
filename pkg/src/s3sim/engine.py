"""Synchronous time-stepped propagation loop.

Messages produced at step t reach followers' mailboxes for step t + 1. Agent
updates within a step may be computed on worker threads, but every update is
a function of that agent's own snapshot and mailbox, and results are committed
in sorted user-id order, so the thread count never changes the outcome.
"""

from __future__ import annotations

import json
import logging
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, IO, Iterable, Optional

from .agent import (
    AgentState,
    Attitude,
    Demographics,
    EmotionLevel,
    MemoryConfig,
    Message,
    SourceRelation,
    decay_emotion,
    init_agent,
    insert_memory,
    make_memory_item,
    memory_context,
    relevance_score,
    rescore_memory,
)
from .cognition import Action, CognitionBackend, Profile, StateSummary
from .cognition.rules import int_hash
from .metrics import MetricsSeries, StepRecord, emotion_density, positive_fraction
from .network import CategoryThresholds, SocialGraph, UserRecord, classify_user

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeedPost:
    user_id: str
    text: str
    step: int = 0
    stance: Optional[Attitude] = None


@dataclass(frozen=True)
class EventConfig:
    event_id: str = "event"
    description: str = ""
    seed_posts: tuple[SeedPost, ...] = ()
    max_steps: int = 20
    default_stance: Attitude = Attitude.POSITIVE


@dataclass(frozen=True)
class RecommendationConfig:
    enabled: bool = False
    top_k: int = 3
    sample_size: int = 5


@dataclass(frozen=True)
class EngineConfig:
    seed: int = 0
    emotion_decay_steps: int = 3
    workers: int = 1
    memory: MemoryConfig = field(default_factory=MemoryConfig)
    recommendation: RecommendationConfig = field(default_factory=RecommendationConfig)


class EventLog:
    """Append-only list of JSON records, optionally mirrored to a file."""

    def __init__(self, sink: IO[str] | None = None):
        self.records: list[dict] = []
        self.sink = sink

    def append(self, record: dict) -> None:
        self.records.append(record)
        if self.sink is not None:
            self.sink.write(dumps_record(record) + "\n")

    def extend(self, records: Iterable[dict]) -> None:
        for r in records:
            self.append(r)


def dumps_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


@dataclass
class World:
    graph: SocialGraph
    agents: dict[str, AgentState]
    event: EventConfig
    backend: CognitionBackend
    config: EngineConfig = field(default_factory=EngineConfig)
    mailboxes: dict[str, list[tuple[Message, SourceRelation]]] = field(default_factory=dict)
    clock: int = 0
    messages: dict[str, Message] = field(default_factory=dict)
    log: EventLog = field(default_factory=EventLog)
    forward_counts: Counter = field(default_factory=Counter)
    produced_last_step: int = 0
    injected: bool = False
    relevance_cache: dict = field(default_factory=dict, repr=False)

    def relevance(self, state: AgentState, msg: Message) -> float:
        key = (state.user_id, msg.content)
        rel = self.relevance_cache.get(key)
        if rel is None:
            rel = self.relevance_cache[key] = relevance_score(state, msg, self.backend.embed)
        return rel


def build_world(
    records: list[UserRecord],
    graph: SocialGraph,
    backend: CognitionBackend,
    event: EventConfig,
    config: EngineConfig = EngineConfig(),
    demographics: dict[str, Demographics] | None = None,
    thresholds: CategoryThresholds = CategoryThresholds(),
    log_sink: IO[str] | None = None,
) -> World:
    demographics = demographics or {}
    by_id = {r.user_id: r for r in records}
    agents = {}
    for uid in graph.nodes:
        rec = by_id.get(uid, UserRecord(uid))
        cat = classify_user(graph, uid, len(rec.posts), thresholds)
        agents[uid] = init_agent(rec, demographics.get(uid, Demographics()), cat)
    return World(graph, agents, event, backend, config, log=EventLog(log_sink))


def source_relation(graph: SocialGraph, author: str, recipient: str) -> SourceRelation:
    if author == recipient:
        return SourceRelation.SELF_POST
    if graph.is_mutual(author, recipient):
        return SourceRelation.MUTUAL_FOLLOWEE
    return SourceRelation.UNIDIRECTIONAL_FOLLOWEE


def _profile(state: AgentState) -> Profile:
    return Profile(state.user_id, state.demographics, state.description, tuple(state.history_texts()))


@dataclass
class _Update:
    state: AgentState
    produced: list[Message]
    records: list[dict]


def _deliver(world: World, msg: Message) -> None:
    for f in world.graph.followers(msg.author):
        world.mailboxes.setdefault(f, []).append((msg, source_relation(world.graph, msg.author, f)))


def _publish(world: World, msg: Message) -> None:
    world.messages[msg.message_id] = msg
    world.log.append({"type": "message", "step": world.clock, **msg.to_json()})
    if msg.is_forward:
        world.forward_counts[msg.root] += 1
    _deliver(world, msg)


def _seed_message(world: World, index: int, post: SeedPost) -> None:
    if post.user_id not in world.agents:
        raise KeyError(f"unknown seed author {post.user_id!r}")
    agent = world.agents[post.user_id]
    msg = Message(f"seed-{index}", post.user_id, post.step, post.text, world.event.event_id, stance=post.stance)
    agent.history.append(msg)
    agent.seen_roots.add(msg.message_id)
    if not agent.is_aware(world.event.event_id):
        agent.aware.add(world.event.event_id)
        world.log.append({"type": "aware", "step": world.clock, "user_id": agent.user_id})
    _publish(world, msg)


def inject_event(world: World, event: EventConfig | None = None) -> World:
    """Publish step-0 seed posts; later ones are published when the clock reaches them."""
    if world.clock != 0 or world.injected:
        raise RuntimeError("events can only be injected into a fresh world")
    if event is not None:
        world.event = event
    for p in world.event.seed_posts:
        if p.user_id not in world.agents:
            raise KeyError(f"unknown seed author {p.user_id!r}")
    world.injected = True
    n = 0
    for i, p in enumerate(world.event.seed_posts):
        if p.step == 0:
            _seed_message(world, i, p)
            n += 1
    world.produced_last_step = n
    return world


def _update_active(world: World, state: AgentState, inbox: list[tuple[Message, SourceRelation]]) -> _Update:
    t = world.clock
    ev = world.event
    cfg = world.config
    backend = world.backend
    memcfg = cfg.memory
    state = state.copy()
    uid = state.user_id
    records: list[dict] = []
    produced: list[Message] = []

    if not state.is_aware(ev.event_id):
        state.aware.add(ev.event_id)
        records.append({"type": "aware", "step": t, "user_id": uid})

    rescore_memory(state, t, memcfg)
    relevances = []
    for msg, src in inbox:
        rel = world.relevance(state, msg)
        relevances.append(rel)
        insert_memory(state, make_memory_item(msg, t, t, src, rel, memcfg), memcfg.capacity)
    received = [m for m, _ in inbox]
    profile = _profile(state)
    mean_rel = sum(relevances) / len(relevances)

    ctx = memory_context(state)
    new_em = backend.next_emotion(profile, state.emotion, received, ctx,
                                  StateSummary(t, state.emotion, state.attitude, mean_rel))
    if new_em != state.emotion:
        records.append({"type": "emotion", "step": t, "user_id": uid, "from": state.emotion.name,
                        "to": new_em.name, "cause": "stimulus"})
        state.emotion = EmotionLevel(new_em)
    state.last_stimulus_step = t

    if state.attitude is None:
        new_att = backend.initial_attitude(profile, ev.description, ev.default_stance)
        records.append({"type": "attitude", "step": t, "user_id": uid, "from": None, "to": new_att.value})
    else:
        new_att = backend.next_attitude(profile, state.attitude, received,
                                        StateSummary(t, state.emotion, state.attitude, mean_rel))
        if new_att != state.attitude:
            records.append({"type": "attitude", "step": t, "user_id": uid,
                            "from": state.attitude.value, "to": new_att.value})
    state.attitude = Attitude(new_att)

    posted = False
    for (msg, src), rel in zip(inbox, relevances):
        rec = {"type": "decision", "step": t, "user_id": uid, "message_id": msg.message_id,
               "source": src.value, "relevance": rel}
        # one decision per agent per cascade root
        if msg.root in state.seen_roots:
            records.append({**rec, "action": Action.INACTIVE.value, "score": None, "suppressed": True})
            continue
        summary = StateSummary(t, state.emotion, state.attitude, rel)
        decision = backend.decide_action(profile, msg, summary)
        action = Action(decision.action)
        state.seen_roots.add(msg.root)
        coerced = False
        if action is Action.FORWARD:
            k = len(produced)
            out = Message(f"m{t}-{uid}-{k}", uid, t, msg.content, ev.event_id,
                          forward_of=msg.message_id, root_id=msg.root,
                          stance=msg.stance, emotion=state.emotion)
            produced.append(out)
        elif action is Action.POST_NEW:
            if posted:
                action, coerced = Action.INACTIVE, True
            else:
                text = backend.generate_post(profile, summary, ev.description, memory_context(state))
                mid = f"m{t}-{uid}-{len(produced)}"
                out = Message(mid, uid, t, text, ev.event_id, stance=state.attitude, emotion=state.emotion)
                produced.append(out)
                state.seen_roots.add(mid)
                posted = True
        rec.update(action=action.value, score=decision.score, suppressed=False)
        if coerced:
            rec["coerced"] = True
        records.append(rec)

    for out in produced:
        state.history.append(out)
        rel = world.relevance(state, out)
        insert_memory(state, make_memory_item(out, t, t, SourceRelation.SELF_POST, rel, memcfg),
                      memcfg.capacity)
    return _Update(state, produced, records)


def _update_idle(world: World, state: AgentState) -> None:
    t = world.clock
    rescore_memory(state, t, world.config.memory)
    last = max(state.last_stimulus_step, state.last_decay_step)
    before = state.emotion
    if decay_emotion(state, t - last, world.config.emotion_decay_steps):
        state.last_decay_step = t
        world.log.append({"type": "emotion", "step": t, "user_id": state.user_id, "from": before.name,
                          "to": state.emotion.name, "cause": "decay"})


def _recommend(world: World) -> None:
    rc = world.config.recommendation
    if not rc.enabled or not world.forward_counts:
        return
    top = sorted(world.forward_counts.items(), key=lambda kv: (-kv[1], kv[0]))[: rc.top_k]
    ev = world.event.event_id
    pool = [u for u in world.graph.nodes if not world.agents[u].is_aware(ev) and u not in world.mailboxes]
    if not pool:
        return
    rng = random.Random(int_hash(world.config.seed, "recommend", world.clock))
    for u in sorted(rng.sample(pool, min(rc.sample_size, len(pool)))):
        for root, _ in top:
            world.mailboxes.setdefault(u, []).append(
                (world.messages[root], SourceRelation.PLATFORM_RECOMMENDATION))


def step(world: World, executor: ThreadPoolExecutor | None = None) -> World:
    if not world.injected:
        raise RuntimeError("inject_event must run before step")
    world.clock += 1
    t = world.clock
    inbox, world.mailboxes = world.mailboxes, {}
    active = sorted(inbox)

    def work(uid: str) -> _Update:
        return _update_active(world, world.agents[uid], inbox[uid])

    if executor is not None and len(active) > 1:
        updates = list(executor.map(work, active))
    else:
        updates = [work(uid) for uid in active]

    n_produced = 0
    for i, p in enumerate(world.event.seed_posts):
        if p.step == t:
            _seed_message(world, i, p)
            n_produced += 1
    for uid, upd in zip(active, updates):
        world.agents[uid] = upd.state
        world.log.extend(upd.records)
        for msg in upd.produced:
            _publish(world, msg)
        n_produced += len(upd.produced)

    ev = world.event.event_id
    active_set = set(active)
    for uid in world.graph.nodes:
        st = world.agents[uid]
        if uid not in active_set and st.is_aware(ev):
            _update_idle(world, st)
    _recommend(world)
    world.produced_last_step = n_produced
    return world


def is_quiescent(world: World) -> bool:
    if any(world.mailboxes.values()):
        return False
    if any(p.step > world.clock for p in world.event.seed_posts):
        return False
    return all(a.emotion == EmotionLevel.CALM for a in world.agents.values())


def observe(world: World) -> StepRecord:
    ev = world.event.event_id
    agents = list(world.agents.values())
    return StepRecord(
        step=world.clock,
        aware=sum(a.is_aware(ev) for a in agents),
        emotion_density=emotion_density(agents, ev),
        positive_fraction=positive_fraction(agents),
        messages=world.produced_last_step,
    )


def run(
    world: World,
    observer: Callable[[World, StepRecord], None] | None = None,
    max_steps: int | None = None,
) -> MetricsSeries:
    """Step until ``max_steps`` or quiescence; one record per observed step."""
    if not world.injected:
        inject_event(world)
    limit = world.event.max_steps if max_steps is None else max_steps
    series = MetricsSeries([observe(world)])
    if observer:
        observer(world, series.records[-1])
    executor = ThreadPoolExecutor(max_workers=world.config.workers) if world.config.workers > 1 else None
    try:
        while world.clock < limit and not is_quiescent(world):
            step(world, executor)
            series.records.append(observe(world))
            if observer:
                observer(world, series.records[-1])
    finally:
        if executor is not None:
            executor.shutdown()
    return series
