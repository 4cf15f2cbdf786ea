"""Scenario worlds reproducing the qualitative propagation patterns, and the
shape statistics used to check them."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from . import fixtures
from .agent import Attitude
from .cognition import RuleBackend, RuleProfile
from .engine import EngineConfig, EventConfig, SeedPost, World, build_world


def spread_world(seed: int, n: int = 500, mean_degree: float = 6.0, forward_probability: float = 0.5,
                 workers: int = 1) -> World:
    """One seed post on a connected ER graph with a fixed forward probability."""
    recs, g = fixtures.erdos_renyi(n, mean_degree, seed)
    author = g.nodes[random.Random(seed).randrange(n)]
    event = EventConfig("spread", "breaking news", (SeedPost(author, "breaking news"),), max_steps=60)
    backend = RuleBackend(seed, RuleProfile(forward_probability=forward_probability))
    return build_world(recs, g, backend, event, EngineConfig(seed=seed, workers=workers))


def two_peak_world(seed: int, forward_probability: float = 0.8, decay_steps: int = 3) -> World:
    """Three A-side accounts post at step 0; B only hears through the bridge."""
    recs, g, _ = fixtures.two_communities(seed=seed)
    posts = tuple(SeedPost(f"a{k:04d}", f"Report {k}: the school closure story") for k in range(3))
    event = EventConfig("two-peaks", "the school closure story", posts, max_steps=60)
    backend = RuleBackend(seed, RuleProfile(forward_probability=forward_probability))
    return build_world(recs, g, backend, event, EngineConfig(seed=seed, emotion_decay_steps=decay_steps))


def trough_world(seed: int, positive_prior: float = 0.6, rebuttal_step: int = 10, n_rebuttals: int = 1) -> World:
    """Officials post negative reports at step 0 and a positive rebuttal later."""
    recs, g, officials = fixtures.with_officials(seed=seed)
    posts = tuple(
        SeedPost(o, "The plant discharge is dangerous and we oppose it", 0, Attitude.NEGATIVE)
        for o in officials
    )
    posts += tuple(
        SeedPost(o, "Experts agree the treated discharge is safe", rebuttal_step, Attitude.POSITIVE)
        for o in officials[:n_rebuttals]
    )
    event = EventConfig("discharge", "the river plant discharge", posts, max_steps=30)
    backend = RuleBackend(seed, RuleProfile(positive_prior=positive_prior))
    return build_world(recs, g, backend, event, EngineConfig(seed=seed))


def gains(aware: Sequence[int]) -> list[int]:
    return [b - a for a, b in zip(aware, aware[1:])]


def saturating(aware: Sequence[int]) -> bool:
    """Non-decreasing series whose per-step gain never rises after its peak."""
    g = gains(aware)
    if any(x < 0 for x in g):
        return False
    if not g:
        return True
    peak = g.index(max(g))
    return all(g[i + 1] <= g[i] for i in range(peak, len(g) - 1))


def local_maxima(values: Sequence[float]) -> list[int]:
    """Indices that rise strictly from the left and do not fall short on the right."""
    return [i for i in range(1, len(values) - 1) if values[i] > values[i - 1] and values[i] >= values[i + 1]]


def two_peaks(values: Sequence[float], min_gap: int = 3) -> Optional[tuple[int, int]]:
    """First pair of local maxima at least ``min_gap`` steps apart with a real dip between."""
    peaks = local_maxima(values)
    for i, p in enumerate(peaks):
        for q in peaks[i + 1:]:
            if q - p >= min_gap and min(values[p:q + 1]) < min(values[p], values[q]):
                return p, q
    return None


@dataclass(frozen=True)
class TroughStats:
    initial: float
    minimum: float
    minimum_step: int
    recovery: float  # max after the minimum, minus the minimum

    def passes(self, depth: float = 0.6, min_recovery: float = 0.10) -> bool:
        return self.minimum < depth * self.initial and self.recovery >= min_recovery


def trough_stats(fractions: Sequence[Optional[float]]) -> TroughStats:
    idx = [i for i, v in enumerate(fractions) if v is not None]
    if not idx:
        raise ValueError("no step has an attitude holder")
    vals = [fractions[i] for i in idx]
    m = min(vals)
    j = vals.index(m)
    return TroughStats(vals[0], m, idx[j], max(vals[j:]) - m)
