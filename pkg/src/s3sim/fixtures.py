"""Synthetic datasets for tests and scenario scripts."""

from __future__ import annotations

import random

import networkx as nx

from .network import Post, SocialGraph, UserRecord, build_graph


def records_from_edges(
    nodes: list[str],
    edges: list[tuple[str, str]],
    descriptions: dict[str, str] | None = None,
    posts: dict[str, list[str]] | None = None,
) -> list[UserRecord]:
    """Records such that build_graph reproduces ``edges`` (followee, follower)."""
    descriptions = descriptions or {}
    posts = posts or {}
    fol: dict[str, list[str]] = {n: [] for n in nodes}
    for u, v in edges:
        fol[v].append(u)
    return [
        UserRecord(n, descriptions.get(n, ""),
                   tuple(Post(0, t) for t in posts.get(n, [])), tuple(sorted(set(fol[n]))))
        for n in nodes
    ]


def _name(i: int) -> str:
    return f"u{i:04d}"


def line(n: int = 3) -> tuple[list[UserRecord], SocialGraph]:
    nodes = [_name(i) for i in range(n)]
    recs = records_from_edges(nodes, list(zip(nodes, nodes[1:])))
    return recs, build_graph(recs)


def star(n_leaves: int) -> tuple[list[UserRecord], SocialGraph]:
    hub = "hub"
    leaves = [_name(i) for i in range(n_leaves)]
    recs = records_from_edges([hub, *leaves], [(hub, v) for v in leaves])
    return recs, build_graph(recs)


def mutual_edges(g: nx.Graph, relabel) -> list[tuple[str, str]]:
    out = []
    for a, b in g.edges():
        out += [(relabel(a), relabel(b)), (relabel(b), relabel(a))]
    return out


def connected_er(n: int, mean_degree: float, seed: int) -> nx.Graph:
    """Undirected G(n, p) with p = mean_degree / (n - 1), redrawn until connected."""
    p = mean_degree / (n - 1)
    rng = random.Random(seed)
    while True:
        g = nx.gnp_random_graph(n, p, seed=rng.randrange(2**31))
        if nx.is_connected(g):
            return g


def erdos_renyi(n: int = 500, mean_degree: float = 6.0, seed: int = 0, prefix: str = "u"):
    """Connected ER graph with every undirected edge as a mutual follow."""
    g = connected_er(n, mean_degree, seed)
    name = lambda i: f"{prefix}{i:04d}"
    nodes = [name(i) for i in range(n)]
    recs = records_from_edges(nodes, mutual_edges(g, name))
    return recs, build_graph(recs)


def two_communities(n_a: int = 100, n_b: int = 300, mean_degree: float = 6.0, seed: int = 0):
    """Two ER communities joined by a single edge between low-degree nodes.

    The bridge leaves the A node farthest from a000 (lowest degree among
    those) and reaches B's lowest-degree node, so B hears late.
    """
    ga = connected_er(n_a, mean_degree, seed)
    gb = connected_er(n_b, mean_degree, seed + 7919)
    A = lambda i: f"a{i:04d}"
    B = lambda i: f"b{i:04d}"
    edges = mutual_edges(ga, A) + mutual_edges(gb, B)
    dist = nx.single_source_shortest_path_length(ga, 0)
    far = max(dist.values())
    a_end = min((n for n, d in dist.items() if d == far), key=lambda n: (ga.degree(n), n))
    b_end = min(gb.nodes, key=lambda n: (gb.degree(n), n))
    edges.append((A(a_end), B(b_end)))
    nodes = [A(i) for i in range(n_a)] + [B(i) for i in range(n_b)]
    recs = records_from_edges(nodes, edges)
    return recs, build_graph(recs), (A(a_end), B(b_end))


def with_officials(n: int = 300, mean_degree: float = 6.0, seed: int = 0, n_officials: int = 3):
    """ER population of mutual friends plus official accounts followed by everyone."""
    g = connected_er(n, mean_degree, seed)
    U = lambda i: f"u{i:04d}"
    officials = [f"official{k}" for k in range(n_officials)]
    edges = mutual_edges(g, U)
    for o in officials:
        edges += [(o, U(i)) for i in range(n)]
    recs = records_from_edges(officials + [U(i) for i in range(n)], edges)
    return recs, build_graph(recs), officials
