"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import random
from collections import deque

import networkx as nx

from syncindex.events import ACTION_TYPES, ActionRecord


def random_actions(
    rng: random.Random,
    max_users: int = 50,
    max_records: int = 500,
    vocabulary: int = 20,
    window_seconds: int = 300,
    n_buckets: int = 6,
) -> list[ActionRecord]:
    """Small dense random instance: few artifacts so collisions are common."""
    n_users = rng.randint(2, max_users)
    users = [f"u{i:03d}" for i in range(n_users)]
    records = []
    for _ in range(rng.randint(1, max_records)):
        records.append(
            ActionRecord(
                user_id=rng.choice(users),
                timestamp=rng.randrange(n_buckets * window_seconds),
                action_type=rng.choice(ACTION_TYPES),
                artifact_id=f"a{rng.randrange(vocabulary)}",
            )
        )
    return records


def random_graph(rng: random.Random, max_nodes: int = 30, edge_prob: float = 0.2) -> nx.Graph:
    n = rng.randint(3, max_nodes)
    graph = nx.Graph()
    graph.add_nodes_from(f"n{i:02d}" for i in range(n))
    nodes = sorted(graph.nodes)
    for i, u in enumerate(nodes):
        for v in nodes[i + 1 :]:
            if rng.random() < edge_prob:
                graph.add_edge(u, v)
    return graph


def _bfs_counts(graph: nx.Graph, source: str) -> tuple[dict, dict]:
    dist = {v: -1 for v in graph}
    sigma = {v: 0 for v in graph}
    dist[source] = 0
    sigma[source] = 1
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in sorted(graph.adj[v]):
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
    return dist, sigma


def naive_betweenness(graph: nx.Graph) -> dict[str, float]:
    """All-pairs path-counting betweenness: for every pair (s, t), a node v lies
    on sigma_s(v) * sigma_t(v) of the sigma_s(t) shortest s-t paths when
    d_s(v) + d_t(v) equals d_s(t). No dependency accumulation."""
    nodes = sorted(graph.nodes)
    n = len(nodes)
    result = dict.fromkeys(nodes, 0.0)
    if n < 3:
        return result
    dist = {}
    sigma = {}
    for node in nodes:
        dist[node], sigma[node] = _bfs_counts(graph, node)
    for i, s in enumerate(nodes):
        for t in nodes[i + 1 :]:
            if dist[s][t] < 0 or sigma[s][t] == 0:
                continue
            total = sigma[s][t]
            for v in nodes:
                if v is s or v is t:
                    continue
                ds, dt = dist[s][v], dist[t][v]
                if ds >= 0 and dt >= 0 and ds + dt == dist[s][t]:
                    result[v] += sigma[s][v] * sigma[t][v] / total
    scale = 2.0 / ((n - 1) * (n - 2))
    return {v: value * scale for v, value in result.items()}
