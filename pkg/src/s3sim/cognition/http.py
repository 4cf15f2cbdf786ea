"""Chat-completion backend over HTTP with retries, a FIFO concurrency limit and
a content-addressed response cache."""

from __future__ import annotations

import collections
import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional, Sequence, TypeVar

import httpx
import numpy as np

from ..agent import Attitude, EmotionLevel, Gender, Occupation
from .base import (
    Action,
    ActionDecision,
    BackendError,
    CognitionBackend,
    Profile,
    parse_action,
    parse_age,
    parse_attitude,
    parse_emotion,
    parse_gender,
    parse_occupation,
)
from .embedding import trigram_embedding
from .rules import NEUTRAL_TEMPLATE, POST_TEMPLATES

log = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class HttpConfig:
    url: str = "http://localhost:8000/v1/chat/completions"
    model: str = "gpt-3.5-turbo"
    temperature: float = 0.0
    timeout: float = 30.0
    retries: int = 2
    max_concurrency: int = 4
    backoff: float = 0.5
    cache_dir: Optional[str] = None
    api_key_env: str = "S3_API_KEY"
    embedding_url: Optional[str] = None
    embedding_model: str = "text-embedding-ada-002"
    prompt_dir: Optional[str] = None
    max_post_length: int = 280


class FifoLimiter:
    """Counting semaphore that admits waiters in arrival order."""

    def __init__(self, limit: int):
        if limit < 1:
            raise ValueError("limit must be >= 1")
        self._free = limit
        self._cond = threading.Condition()
        self._queue: collections.deque = collections.deque()

    def __enter__(self):
        ticket = object()
        with self._cond:
            self._queue.append(ticket)
            while self._queue[0] is not ticket or self._free == 0:
                self._cond.wait()
            self._queue.popleft()
            self._free -= 1
            self._cond.notify_all()
        return self

    def __exit__(self, *exc):
        with self._cond:
            self._free += 1
            self._cond.notify_all()


class ResponseCache:
    """One file per (op, prompt, model, temperature), named by its sha256."""

    def __init__(self, directory: str | Path):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    @staticmethod
    def key(op: str, prompt: str, model: str, temperature: float) -> str:
        blob = json.dumps([op, prompt, model, temperature], ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def lock(self, key: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(key, threading.Lock())

    def get(self, key: str) -> Optional[str]:
        path = self.dir / key
        try:
            return path.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None

    def put(self, key: str, reply: str) -> None:
        tmp = self.dir / f".{key}.tmp"
        tmp.write_text(reply, encoding="utf-8")
        tmp.replace(self.dir / key)


def load_prompt(name: str, prompt_dir: str | None = None) -> str:
    if prompt_dir:
        return (Path(prompt_dir) / f"{name}.txt").read_text(encoding="utf-8")
    return resources.files("s3sim.cognition").joinpath("prompts", f"{name}.txt").read_text(encoding="utf-8")


def _render(template: str, **values) -> str:
    return template.format_map(collections.defaultdict(str, values))


def _bullets(texts: Sequence[str]) -> str:
    return "\n".join(f"- {t}" for t in texts) if texts else "(none)"


class HttpBackend(CognitionBackend):
    def __init__(
        self,
        config: HttpConfig = HttpConfig(),
        client: httpx.Client | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.client = client or httpx.Client(timeout=config.timeout)
        self.limiter = FifoLimiter(config.max_concurrency)
        self.cache = ResponseCache(config.cache_dir) if config.cache_dir else None
        self.supports_embedding = config.embedding_url is not None
        self._sleep = sleep
        self._prompts: dict[str, str] = {}
        self.request_count = 0
        self._count_lock = threading.Lock()

    def identity(self) -> dict:
        return {"kind": "http", "url": self.config.url, "model": self.config.model,
                "temperature": self.config.temperature}

    def prompt(self, name: str, **values) -> str:
        if name not in self._prompts:
            self._prompts[name] = load_prompt(name, self.config.prompt_dir)
        return _render(self._prompts[name], **values)

    def _headers(self) -> dict:
        key = os.environ.get(self.config.api_key_env)
        return {"Authorization": f"Bearer {key}"} if key else {}

    def _post_chat(self, prompt: str) -> str:
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        }
        with self._count_lock:
            self.request_count += 1
        with self.limiter:
            resp = self.client.post(self.config.url, json=body, headers=self._headers(),
                                    timeout=self.config.timeout)
        resp.raise_for_status()
        content = resp.json()["choices"][0]["message"]["content"]
        if not isinstance(content, str):
            raise ValueError("reply content is not a string")
        return content

    def ask(self, op: str, prompt: str, parse: Callable[[str], Optional[T]]) -> T:
        """Send ``prompt`` until ``parse`` accepts a reply, at most retries + 1 times.

        Only accepted replies are cached. Raises BackendError when every
        attempt fails.
        """
        key = None
        if self.cache is not None:
            key = ResponseCache.key(op, prompt, self.config.model, self.config.temperature)
        lock = self.cache.lock(key) if key else threading.Lock()
        with lock:
            if key:
                cached = self.cache.get(key)
                if cached is not None:
                    value = parse(cached)
                    if value is not None:
                        return value
            last_err: object = None
            for attempt in range(self.config.retries + 1):
                if attempt and self.config.backoff:
                    self._sleep(self.config.backoff * attempt)
                try:
                    reply = self._post_chat(prompt)
                except (httpx.HTTPError, ValueError, KeyError, IndexError, TypeError) as exc:
                    last_err = exc
                    continue
                value = parse(reply)
                if value is not None:
                    if key:
                        self.cache.put(key, reply)
                    return value
                last_err = f"unparseable reply {reply[:80]!r}"
        raise BackendError(f"{op}: no usable reply after {self.config.retries + 1} attempts ({last_err})")

    # demographics

    def predict_gender(self, description: str) -> tuple[Gender, float]:
        if not description.strip():
            return Gender.UNKNOWN, 0.0
        g = self.ask("gender", self.prompt("gender", description=description), parse_gender)
        return g, (0.0 if g is Gender.UNKNOWN else 1.0)

    def predict_age(self, posts: Sequence[str]) -> int:
        if not posts:
            raise ValueError("age prediction needs at least one post")
        return self.ask("age", self.prompt("age", posts=_bullets(posts)), parse_age)

    def predict_occupation(self, description: str, posts: Sequence[str]) -> Occupation:
        if not description.strip() and not any(p.strip() for p in posts):
            return Occupation.UNKNOWN
        cats = "\n".join(o.value for o in Occupation if o is not Occupation.UNKNOWN)
        prompt = self.prompt("occupation", description=description, posts=_bullets(posts), categories=cats)
        return self.ask("occupation", prompt, lambda r: parse_occupation(r) if isinstance(r, str) else None)

    # state transitions

    def _profile_values(self, profile: Profile) -> dict:
        return {
            "profile": profile.demographics.render(),
            "description": profile.description,
            "history": _bullets(profile.history[-5:]),
        }

    def next_emotion(self, profile, current, received, memory_context, summary) -> EmotionLevel:
        if not received and not memory_context:
            return current
        prompt = self.prompt(
            "emotion",
            emotion=current.name.capitalize(),
            messages=_bullets([m.content for m in received]),
            memory=_bullets([it.message.content for it in memory_context]),
            **self._profile_values(profile),
        )
        try:
            return self.ask("emotion", prompt, parse_emotion)
        except BackendError as exc:
            log.warning("emotion update degraded for %s: %s", profile.user_id, exc)
            return current

    def initial_attitude(self, profile, event_description="", default=Attitude.POSITIVE) -> Attitude:
        prompt = self.prompt("initial_attitude", event=event_description, **self._profile_values(profile))
        try:
            return self.ask("initial_attitude", prompt, parse_attitude)
        except BackendError as exc:
            log.warning("initial attitude degraded for %s: %s", profile.user_id, exc)
            return default

    def next_attitude(self, profile, current, received, summary) -> Attitude:
        if not received:
            return current
        prompt = self.prompt(
            "attitude",
            attitude=current.value,
            messages=_bullets([m.content for m in received]),
            **self._profile_values(profile),
        )
        try:
            return self.ask("attitude", prompt, parse_attitude)
        except BackendError as exc:
            log.warning("attitude update degraded for %s: %s", profile.user_id, exc)
            return current

    def decide_action(self, profile, received, summary) -> ActionDecision:
        prompt = self.prompt(
            "action",
            profile=profile.demographics.render(),
            emotion=summary.emotion.name.capitalize(),
            attitude=summary.attitude.value if summary.attitude else "undecided",
            author=received.author,
            message=received.content,
        )
        try:
            return ActionDecision(self.ask("action", prompt, parse_action))
        except BackendError as exc:
            log.warning("action decision degraded for %s: %s", profile.user_id, exc)
            return ActionDecision(Action.INACTIVE)

    def generate_post(self, profile, summary, event_description, memory_context) -> str:
        limit = self.config.max_post_length
        prompt = self.prompt(
            "post",
            emotion=summary.emotion.name.capitalize(),
            attitude=summary.attitude.value if summary.attitude else "undecided",
            memory=_bullets([it.message.content for it in memory_context]),
            event=event_description,
            max_length=limit,
            **self._profile_values(profile),
        )
        try:
            text = self.ask("post", prompt, lambda r: r.strip() or None)
        except BackendError as exc:
            log.warning("post generation degraded for %s: %s", profile.user_id, exc)
            if summary.attitude is None:
                text = NEUTRAL_TEMPLATE.format(event=event_description)
            else:
                text = POST_TEMPLATES[(summary.attitude, summary.emotion)].format(event=event_description)
        return text[:limit]

    def embed(self, text: str) -> np.ndarray:
        if not self.supports_embedding or not text:
            return trigram_embedding(text)
        try:
            with self.limiter:
                resp = self.client.post(
                    self.config.embedding_url,
                    json={"model": self.config.embedding_model, "input": text},
                    headers=self._headers(),
                    timeout=self.config.timeout,
                )
            resp.raise_for_status()
            vec = np.asarray(resp.json()["data"][0]["embedding"], dtype=np.float64)
            norm = np.linalg.norm(vec)
            if vec.ndim != 1 or not np.isfinite(norm) or norm == 0:
                raise ValueError("degenerate embedding")
            return vec / norm
        except (httpx.HTTPError, ValueError, KeyError, IndexError, TypeError) as exc:
            log.warning("embedding request failed, using trigram fallback: %s", exc)
            return trigram_embedding(text)
