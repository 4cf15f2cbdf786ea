"""Dataset ingestion, event subgraph extraction and the directed follow graph.

Edges are stored followee -> follower, so an edge points in the direction a
message travels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable


class DatasetError(Exception):
    """Fatal ingestion problem (unreadable file, duplicate user id)."""


@dataclass(frozen=True)
class Post:
    t: int
    text: str


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    description: str = ""
    posts: tuple[Post, ...] = ()
    followees: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "user_id": self.user_id,
            "description": self.description,
            "posts": [{"t": p.t, "text": p.text} for p in self.posts],
            "followees": list(self.followees),
        }


@dataclass
class Diagnostics:
    skipped_lines: list[dict] = field(default_factory=list)
    dropped_edges: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"skipped_lines": self.skipped_lines, "dropped_edges": self.dropped_edges}


class UserCategory(str, Enum):
    INFLUENTIAL = "Influential"
    REGULAR = "Regular"
    LOW_IMPACT = "LowImpact"


@dataclass(frozen=True)
class CategoryThresholds:
    influential_ratio: float = 10.0  # followers >= ratio * max(1, followees)
    low_followers: int = 3
    low_posts: int = 2


def _parse_record(obj: object) -> UserRecord:
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    uid = obj.get("user_id")
    if not isinstance(uid, str) or not uid:
        raise ValueError("missing or non-string user_id")
    desc = obj.get("description", "")
    if desc is None:
        desc = ""
    if not isinstance(desc, str):
        raise ValueError("description must be a string")
    posts = []
    for p in obj.get("posts", []) or []:
        if not isinstance(p, dict) or not isinstance(p.get("text"), str):
            raise ValueError("post must be an object with a string 'text'")
        t = p.get("t", 0)
        if isinstance(t, bool) or not isinstance(t, int):
            raise ValueError("post 't' must be an integer step")
        posts.append(Post(t, p["text"]))
    if any(a.t > b.t for a, b in zip(posts, posts[1:])):
        raise ValueError("posts not ordered by t")
    followees = obj.get("followees", []) or []
    if not isinstance(followees, list) or not all(isinstance(f, str) for f in followees):
        raise ValueError("followees must be a list of strings")
    return UserRecord(uid, desc, tuple(posts), tuple(followees))


def load_dataset(path: str | Path) -> tuple[list[UserRecord], Diagnostics]:
    """Read a JSON-lines user dataset.

    Malformed lines are skipped and reported in the returned diagnostics.
    An unreadable file or a duplicated ``user_id`` raises :class:`DatasetError`.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DatasetError(f"cannot read dataset {path}: {exc}") from exc

    records: list[UserRecord] = []
    diag = Diagnostics()
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = _parse_record(json.loads(line))
        except (json.JSONDecodeError, ValueError) as exc:
            diag.skipped_lines.append({"line": lineno, "reason": str(exc)})
            continue
        if rec.user_id in seen:
            raise DatasetError(f"duplicate user_id {rec.user_id!r} on line {lineno}")
        seen.add(rec.user_id)
        records.append(rec)
    return records, diag


def write_dataset(records: Iterable[UserRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


def extract_event_subgraph(records: list[UserRecord], keywords: list[str]) -> list[UserRecord]:
    """Seed users with a keyword-matching post plus their 1-hop neighbourhood.

    Matching is case-insensitive substring search. Neighbours are followees or
    followers of a seed, ignoring direction. Output is sorted by user id.
    """
    if not keywords:
        raise ValueError("keywords must be non-empty")
    kws = [k.lower() for k in keywords if k]
    by_id = {r.user_id: r for r in records}
    seeds = {
        r.user_id
        for r in records
        if any(k in p.text.lower() for p in r.posts for k in kws)
    }
    if not seeds:
        return []
    keep = set(seeds)
    for r in records:
        if r.user_id in seeds:
            keep.update(f for f in r.followees if f in by_id)
        elif any(f in seeds for f in r.followees):
            keep.add(r.user_id)
    return [by_id[u] for u in sorted(keep)]


@dataclass(frozen=True)
class SocialGraph:
    nodes: tuple[str, ...]
    _followers: dict[str, tuple[str, ...]]
    _followees: dict[str, tuple[str, ...]]

    def followers(self, user_id: str) -> tuple[str, ...]:
        """Users who receive ``user_id``'s messages."""
        return self._followers[user_id]

    def followees(self, user_id: str) -> tuple[str, ...]:
        return self._followees[user_id]

    def indegree(self, user_id: str) -> int:
        return len(self._followers[user_id])

    def outdegree(self, user_id: str) -> int:
        return len(self._followees[user_id])

    def __contains__(self, user_id: object) -> bool:
        return user_id in self._followers

    def __len__(self) -> int:
        return len(self.nodes)

    def is_mutual(self, a: str, b: str) -> bool:
        return b in self._followers[a] and a in self._followers[b]

    def edges(self) -> list[tuple[str, str]]:
        """All (followee, follower) pairs, sorted."""
        return sorted((u, v) for u in self.nodes for v in self._followers[u])

    def to_edge_list(self) -> str:
        return "".join(f"{u}\t{v}\n" for u, v in self.edges())

    @classmethod
    def from_edges(cls, nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> "SocialGraph":
        node_list = sorted(set(nodes))
        fol: dict[str, set[str]] = {n: set() for n in node_list}
        fee: dict[str, set[str]] = {n: set() for n in node_list}
        for u, v in edges:
            if u == v:
                continue
            if u not in fol or v not in fol:
                raise ValueError(f"edge {u}->{v} references an unknown node")
            fol[u].add(v)
            fee[v].add(u)
        return cls(
            tuple(node_list),
            {n: tuple(sorted(s)) for n, s in fol.items()},
            {n: tuple(sorted(s)) for n, s in fee.items()},
        )


def build_graph(records: list[UserRecord], diagnostics: Diagnostics | None = None) -> SocialGraph:
    """Edge f -> u for every followee f of u that is itself a record."""
    ids = {r.user_id for r in records}
    edges = []
    for r in records:
        for f in r.followees:
            if f == r.user_id:
                reason = "self-follow"
            elif f not in ids:
                reason = "followee not in user set"
            else:
                edges.append((f, r.user_id))
                continue
            if diagnostics is not None:
                diagnostics.dropped_edges.append(
                    {"followee": f, "follower": r.user_id, "reason": reason}
                )
    return SocialGraph.from_edges(ids, edges)


def read_edge_list(path: str | Path, nodes: Iterable[str] = ()) -> SocialGraph:
    node_set = set(nodes)
    edges = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line:
            continue
        u, v = line.split("\t")
        node_set.update((u, v))
        edges.append((u, v))
    return SocialGraph.from_edges(node_set, edges)


def classify_user(
    graph: SocialGraph,
    user_id: str,
    post_count: int,
    thresholds: CategoryThresholds = CategoryThresholds(),
) -> UserCategory:
    if user_id not in graph:
        raise KeyError(f"unknown user {user_id!r}")
    followers = graph.indegree(user_id)
    followees = graph.outdegree(user_id)
    if followers >= thresholds.influential_ratio * max(1, followees):
        return UserCategory.INFLUENTIAL
    if followers <= thresholds.low_followers and post_count <= thresholds.low_posts:
        return UserCategory.LOW_IMPACT
    return UserCategory.REGULAR
