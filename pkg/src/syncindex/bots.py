"""External bot-likelihood ingestion and class-partitioned statistics.

Scores come from an upstream classifier and are ingested, never computed.
A user is a bot when its likelihood is strictly above the threshold
(default 0.70). Users without a score stay "unknown" and are surfaced
separately rather than silently defaulted.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean, pstdev
from typing import Iterable, Mapping

import networkx as nx

from . import metrics

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.70
PAIR_CLASSES = ("bot-bot", "bot-human", "human-human", "unknown-involved")


class ScoreError(ValueError):
    """Bot likelihood outside [0, 1] or unreadable score table."""


def classify_user(score: float, threshold: float = DEFAULT_THRESHOLD) -> str:
    """bot when score is strictly above the threshold, human otherwise."""
    if not 0.0 <= score <= 1.0:
        raise ScoreError(f"score outside [0, 1]: {score!r}")
    return "bot" if score > threshold else "human"


@dataclass(frozen=True)
class BotScoreTable:
    """Read-only user -> likelihood mapping with a classification threshold."""

    scores: Mapping[str, float]
    threshold: float = DEFAULT_THRESHOLD
    rejected: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        for user, score in self.scores.items():
            if not 0.0 <= score <= 1.0:
                raise ScoreError(f"score outside [0, 1] for {user!r}: {score!r}")

    def classify(self, user: str) -> str:
        score = self.scores.get(user)
        if score is None:
            return "unknown"
        return classify_user(score, self.threshold)

    def pair_class(self, u: str, v: str) -> str:
        classes = {self.classify(u), self.classify(v)}
        if "unknown" in classes:
            return "unknown-involved"
        if classes == {"bot"}:
            return "bot-bot"
        if classes == {"human"}:
            return "human-human"
        return "bot-human"


def load_bot_scores(path: str | Path, threshold: float = DEFAULT_THRESHOLD) -> BotScoreTable:
    """Read the user_id,score CSV (header required); invalid rows are rejected."""
    scores: dict[str, float] = {}
    rejected = 0
    with Path(path).open("r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        names = reader.fieldnames or []
        if "user_id" not in names or "score" not in names:
            raise ScoreError(f"bot score file {path} must have a user_id,score header")
        for row in reader:
            user = (row.get("user_id") or "").strip()
            try:
                score = float(row.get("score") or "")
                if not 0.0 <= score <= 1.0 or not user:
                    raise ValueError
            except ValueError:
                rejected += 1
                continue
            scores[user] = score
    if rejected:
        logger.warning("rejected %d bot score rows from %s", rejected, path)
    return BotScoreTable(scores=scores, threshold=threshold, rejected=rejected)


@dataclass
class ClassMeans:
    """Per-class mean (and count); classes with no members are absent."""

    means: dict[str, float] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)


def average_csi_by_pair_class(
    pair_scores: Mapping[tuple[str, str], float], table: BotScoreTable
) -> ClassMeans:
    """Mean pair score per pair class; pairs with an unknown member kept separate."""
    buckets: dict[str, list[float]] = {}
    for pair in sorted(pair_scores):
        cls = table.pair_class(*pair)
        buckets.setdefault(cls, []).append(pair_scores[pair])
    result = ClassMeans()
    for cls, values in buckets.items():
        result.means[cls] = fmean(values)
        result.counts[cls] = len(values)
    return result


@dataclass
class ClassSpread:
    """Per-class mean and population standard deviation; unknowns counted apart."""

    means: dict[str, float] = field(default_factory=dict)
    sds: dict[str, float] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    unknown: int = 0


def average_csi_by_user_class(
    user_scores: Mapping[str, float], table: BotScoreTable
) -> ClassSpread:
    buckets: dict[str, list[float]] = {}
    unknown = 0
    for user in sorted(user_scores):
        cls = table.classify(user)
        if cls == "unknown":
            unknown += 1
            continue
        buckets.setdefault(cls, []).append(user_scores[user])
    result = ClassSpread(unknown=unknown)
    for cls, values in buckets.items():
        result.means[cls] = fmean(values)
        result.sds[cls] = pstdev(values) if len(values) > 1 else 0.0
        result.counts[cls] = len(values)
    return result


def centrality_by_class(
    allcomm: nx.Graph,
    table: BotScoreTable,
    sync_users: set[str] | frozenset[str],
) -> dict[str, dict[str, float]]:
    """Per-class mean centralities on the all-communication graph, restricted to
    users that participate in synchronous activities."""
    eligible = sorted(u for u in sync_users if allcomm.has_node(u))
    if not eligible:
        return {}
    degrees = metrics.degree_centrality(allcomm) if allcomm.number_of_nodes() >= 2 else {}
    betweenness = metrics.betweenness_centrality(allcomm)
    if allcomm.number_of_edges() > 0:
        eigenvector = metrics.eigenvector_centrality(allcomm)
    else:
        eigenvector = dict.fromkeys(allcomm.nodes, 0.0)

    buckets: dict[str, list[str]] = {}
    for user in eligible:
        cls = table.classify(user)
        if cls == "unknown":
            continue
        buckets.setdefault(cls, []).append(user)

    out: dict[str, dict[str, float]] = {}
    for cls, users in sorted(buckets.items()):
        out[cls] = {
            "total_degree": fmean(degrees.get(u, 0.0) for u in users),
            "betweenness": fmean(betweenness.get(u, 0.0) for u in users),
            "eigenvector": fmean(eigenvector.get(u, 0.0) for u in users),
            "count": len(users),
        }
    return out


def clustering_by_class(sync_graph: nx.Graph, table: BotScoreTable) -> dict[str, float]:
    """Transitivity of each class-induced subgraph; empty classes are absent."""
    out: dict[str, float] = {}
    for cls in ("bot", "human"):
        nodes = [n for n in sync_graph.nodes if table.classify(n) == cls]
        if not nodes:
            continue
        out[cls] = metrics.transitivity(sync_graph.subgraph(nodes))
    return out


def user_classes(users: Iterable[str], table: BotScoreTable) -> dict[str, str]:
    """Classify a user collection; handy for graph node attributes."""
    return {user: table.classify(user) for user in users}


def pair_class_counts(
    pair_scores: Mapping[tuple[str, str], float], table: BotScoreTable
) -> dict[str, int]:
    counts = dict.fromkeys(PAIR_CLASSES, 0)
    for pair in pair_scores:
        counts[table.pair_class(*pair)] += 1
    return counts
