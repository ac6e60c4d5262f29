"""Node centralities and whole-graph structure metrics.

Shortest paths are unweighted throughout: synchronization edge weights are
similarity strengths, not distances. Eigenvector centrality does use the
weights. All functions are pure and permutation-invariant; accumulation
orders are fixed (sorted nodes) so outputs are bit-deterministic.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from statistics import fmean, pstdev

import networkx as nx

logger = logging.getLogger(__name__)


class MetricUndefinedError(ValueError):
    """The metric does not exist for this graph (too few nodes, no edges)."""


class PowerIterationError(RuntimeError):
    """Eigenvector iteration failed to converge; carries the last iterate."""

    def __init__(self, message: str, last_iterate: dict[str, float]):
        super().__init__(message)
        self.last_iterate = last_iterate


def degree_centrality(graph: nx.Graph) -> dict[str, float]:
    """Unweighted degree divided by (n - 1)."""
    n = graph.number_of_nodes()
    if n < 2:
        raise MetricUndefinedError("degree centrality needs at least 2 nodes")
    return {node: graph.degree(node) / (n - 1) for node in sorted(graph.nodes)}


def betweenness_centrality(graph: nx.Graph) -> dict[str, float]:
    """Brandes betweenness on unweighted shortest paths, normalized by (n-1)(n-2)/2.

    Fewer than 3 nodes: all zeros (no interior positions exist).
    """
    nodes = sorted(graph.nodes)
    n = len(nodes)
    accum = {node: 0.0 for node in nodes}
    if n < 3:
        return accum
    adjacency = {node: sorted(graph.adj[node]) for node in nodes}

    for source in nodes:
        stack: list[str] = []
        predecessors: dict[str, list[str]] = {node: [] for node in nodes}
        sigma = dict.fromkeys(nodes, 0)
        sigma[source] = 1
        dist = dict.fromkeys(nodes, -1)
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adjacency[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    predecessors[w].append(v)
        delta = dict.fromkeys(nodes, 0.0)
        while stack:
            w = stack.pop()
            for v in predecessors[w]:
                delta[v] += (sigma[v] / sigma[w]) * (1.0 + delta[w])
            if w != source:
                accum[w] += delta[w]

    # Each unordered pair is visited from both endpoints, so the pair-halving
    # and the (n-1)(n-2)/2 normalizer combine into one factor.
    scale = 1.0 / ((n - 1) * (n - 2))
    return {node: accum[node] * scale for node in nodes}


def eigenvector_centrality(
    graph: nx.Graph, tol: float = 1e-9, max_iter: int = 1000
) -> dict[str, float]:
    """Power iteration on the weighted adjacency, scaled so the max component is 1.

    Starts from a uniform positive vector; converged when successive
    max-normalized iterates differ by less than tol in max norm. Iterates
    with the identity added so bipartite graphs cannot oscillate.
    """
    if graph.number_of_edges() == 0:
        raise MetricUndefinedError("eigenvector centrality needs at least one edge")
    nodes = sorted(graph.nodes)
    weighted = {
        node: [(nbr, float(graph[node][nbr].get("weight", 1.0))) for nbr in sorted(graph.adj[node])]
        for node in nodes
    }
    x = dict.fromkeys(nodes, 1.0)
    for _ in range(max_iter):
        nxt = {}
        for node in nodes:
            acc = x[node]
            for nbr, w in weighted[node]:
                acc += w * x[nbr]
            nxt[node] = acc
        peak = max(nxt.values())
        nxt = {node: value / peak for node, value in nxt.items()}
        delta = max(abs(nxt[node] - x[node]) for node in nodes)
        x = nxt
        if delta < tol:
            return x
    raise PowerIterationError(f"no convergence after {max_iter} iterations", last_iterate=x)


def eigenvector_residual(graph: nx.Graph, centrality: dict[str, float]) -> float:
    """Max-norm residual |A x - lambda x| with lambda the Rayleigh quotient."""
    nodes = sorted(centrality)
    ax = {}
    for node in nodes:
        acc = 0.0
        for nbr in sorted(graph.adj[node]):
            acc += float(graph[node][nbr].get("weight", 1.0)) * centrality[nbr]
        ax[node] = acc
    norm_sq = sum(centrality[node] ** 2 for node in nodes)
    lam = sum(centrality[node] * ax[node] for node in nodes) / norm_sq
    return max(abs(ax[node] - lam * centrality[node]) for node in nodes)


def newman_modularity(graph: nx.Graph, partition: dict[str, int]) -> float:
    """Unweighted Q = sum_c (e_cc - a_c^2) over communities."""
    missing = [node for node in graph.nodes if node not in partition]
    if missing:
        raise ValueError(f"partition does not cover {len(missing)} nodes")
    m = graph.number_of_edges()
    if m == 0:
        logger.warning("modularity of an edgeless graph reported as 0")
        return 0.0
    internal: dict[int, int] = {}
    degree_sum: dict[int, int] = {}
    for node in graph.nodes:
        community = partition[node]
        degree_sum[community] = degree_sum.get(community, 0) + graph.degree(node)
    for u, v in graph.edges:
        if partition[u] == partition[v]:
            internal[partition[u]] = internal.get(partition[u], 0) + 1
    q = 0.0
    for community in sorted(degree_sum):
        e_cc = internal.get(community, 0) / m
        a_c = degree_sum[community] / (2 * m)
        q += e_cc - a_c * a_c
    return q


def louvain_partition(graph: nx.Graph, seed: int = 0) -> dict[str, int]:
    """Greedy modularity partition (unweighted, seeded, deterministic).

    Community ids are assigned 0..k-1 in order of each community's smallest
    member. Nodes are relabeled to sorted integer indices first so results
    do not depend on string hash randomization.
    """
    if graph.number_of_edges() == 0:
        raise MetricUndefinedError("community detection needs at least one edge")
    nodes = sorted(graph.nodes)
    index = {node: i for i, node in enumerate(nodes)}
    relabeled = nx.Graph()
    relabeled.add_nodes_from(range(len(nodes)))
    relabeled.add_edges_from((index[u], index[v]) for u, v in graph.edges)
    communities = nx.community.louvain_communities(relabeled, weight=None, seed=seed)
    groups = sorted((sorted(c) for c in communities), key=lambda c: c[0])
    partition: dict[str, int] = {}
    for community_id, group in enumerate(groups):
        for i in group:
            partition[nodes[i]] = community_id
    return partition


def krackhardt_hierarchy(
    graph: nx.Graph,
    orientation: str = "csi_order",
    user_scores: dict[str, float] | None = None,
) -> float:
    """1 minus the fraction of reachable node pairs that are mutually reachable.

    csi_order orients each edge from the lower-scoring endpoint to the
    higher (scores from user_scores or the csi_user node attribute; ties
    point toward the lexicographically larger id). symmetric replaces each
    edge with both arcs, which yields 0 on any connected graph. Graphs with
    no reachable pairs score 1 by convention.
    """
    if orientation not in ("csi_order", "symmetric"):
        raise ValueError(f"unknown orientation: {orientation}")
    nodes = sorted(graph.nodes)
    if not nodes:
        raise MetricUndefinedError("hierarchy of an empty graph")

    def score(node: str) -> float:
        if user_scores is not None and node in user_scores:
            return float(user_scores[node])
        return float(graph.nodes[node].get("csi_user", 0.0))

    out: dict[str, list[str]] = {node: [] for node in nodes}
    for u, v in graph.edges:
        if orientation == "symmetric":
            out[u].append(v)
            out[v].append(u)
            continue
        su, sv = score(u), score(v)
        if su < sv:
            out[u].append(v)
        elif sv < su:
            out[v].append(u)
        elif u < v:
            out[u].append(v)
        else:
            out[v].append(u)

    reach: dict[str, set[str]] = {}
    for node in nodes:
        seen = {node}
        queue = deque([node])
        while queue:
            current = queue.popleft()
            for nxt in out[current]:
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        seen.discard(node)
        reach[node] = seen

    reachable = 0
    mutual = 0
    for i, u in enumerate(nodes):
        for v in nodes[i + 1 :]:
            forward = v in reach[u]
            backward = u in reach[v]
            if forward or backward:
                reachable += 1
                if forward and backward:
                    mutual += 1
    if reachable == 0:
        return 1.0
    return 1.0 - mutual / reachable


def _triangles_and_triples(graph: nx.Graph) -> tuple[dict[str, int], dict[str, int]]:
    """Per node: number of edges among its neighbors, and C(degree, 2)."""
    adjacency = {node: set(graph.adj[node]) for node in graph.nodes}
    triangles: dict[str, int] = {}
    triples: dict[str, int] = {}
    for node in graph.nodes:
        neighbors = sorted(adjacency[node])
        degree = len(neighbors)
        triples[node] = degree * (degree - 1) // 2
        count = 0
        for i, u in enumerate(neighbors):
            adj_u = adjacency[u]
            for v in neighbors[i + 1 :]:
                if v in adj_u:
                    count += 1
        triangles[node] = count
    return triangles, triples


def transitivity(graph: nx.Graph) -> float:
    """Global clustering coefficient: 3 * triangles / connected triples."""
    triangles, triples = _triangles_and_triples(graph)
    total_triples = sum(triples.values())
    if total_triples == 0:
        logger.warning("no connected triples: transitivity reported as 0")
        return 0.0
    return sum(triangles.values()) / total_triples


def avg_local_clustering(graph: nx.Graph) -> float:
    """Mean per-node clustering; nodes with degree < 2 contribute 0."""
    if graph.number_of_nodes() == 0:
        logger.warning("average clustering of an empty graph reported as 0")
        return 0.0
    triangles, triples = _triangles_and_triples(graph)
    total = 0.0
    for node in sorted(graph.nodes):
        if triples[node] > 0:
            total += triangles[node] / triples[node]
    return total / graph.number_of_nodes()


def density(graph: nx.Graph) -> float:
    """2|E| / (n(n-1))."""
    n = graph.number_of_nodes()
    if n < 2:
        raise MetricUndefinedError("density needs at least 2 nodes")
    return 2.0 * graph.number_of_edges() / (n * (n - 1))


@dataclass
class ParticipationCentrality:
    """Per-user centralities on the all-communication graph, grouped by the
    number of action types the user synchronizes across."""

    rows: list[tuple[str, int, float, float, float]] = field(default_factory=list)
    level_stats: dict[int, dict[str, tuple[float, float]]] = field(default_factory=dict)
    excluded: list[str] = field(default_factory=list)


def centrality_by_action_type_count(
    allcomm: nx.Graph, participation: dict[str, int]
) -> ParticipationCentrality:
    """Join synchrony participation levels with all-communication centralities.

    Users absent from the graph are excluded and reported. Level statistics
    are the mean and population standard deviation per centrality.
    """
    result = ParticipationCentrality()
    present = {user: level for user, level in participation.items() if allcomm.has_node(user)}
    result.excluded = sorted(set(participation) - set(present))
    if result.excluded:
        logger.warning("%d synchronizing users missing from the interaction graph", len(result.excluded))
    if not present:
        return result

    degrees = degree_centrality(allcomm) if allcomm.number_of_nodes() >= 2 else {}
    betweenness = betweenness_centrality(allcomm)
    if allcomm.number_of_edges() > 0:
        eigenvector = eigenvector_centrality(allcomm)
    else:
        eigenvector = dict.fromkeys(allcomm.nodes, 0.0)

    for user in sorted(present):
        result.rows.append(
            (
                user,
                present[user],
                degrees.get(user, 0.0),
                betweenness.get(user, 0.0),
                eigenvector.get(user, 0.0),
            )
        )

    for level in sorted(set(present.values())):
        level_rows = [row for row in result.rows if row[1] == level]
        stats: dict[str, tuple[float, float]] = {}
        for name, position in (("total_degree", 2), ("betweenness", 3), ("eigenvector", 4)):
            values = [row[position] for row in level_rows]
            stats[name] = (fmean(values), pstdev(values) if len(values) > 1 else 0.0)
        result.level_stats[level] = stats
    return result
