"""Co-timed action detection within fixed 5-minute windows.

Two users synchronize on an action type when they post the same canonical
artifact inside the same epoch-aligned bucket (floor(timestamp / window)).
Every group of k distinct users sharing (action type, artifact, bucket)
contributes one count to each of its C(k, 2) unordered pairs.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .events import ACTION_TYPES, ActionRecord

BRUTE_FORCE_LIMIT = 10_000


@dataclass(frozen=True)
class SyncWindowConfig:
    """Fixed epoch-aligned bucketing; bucket = floor(timestamp / window_seconds)."""

    window_seconds: int = 300
    alignment: str = "epoch_buckets"

    def __post_init__(self) -> None:
        if self.window_seconds <= 0:
            raise ValueError("window_seconds must be positive")
        if self.alignment != "epoch_buckets":
            raise ValueError(f"unsupported alignment: {self.alignment}")

    def bucket(self, timestamp: int) -> int:
        return timestamp // self.window_seconds


def pair_key(u: str, v: str) -> tuple[str, str]:
    """Unordered pair as a lexicographically sorted tuple; self-pairs rejected."""
    if u == v:
        raise ValueError(f"self-pair: {u!r}")
    return (u, v) if u < v else (v, u)


class PairSyncCounts:
    """Per unordered user pair, per action type, the synchrony count S(u, v, a)."""

    __slots__ = ("_table",)

    def __init__(self) -> None:
        self._table: dict[tuple[str, str], dict[str, int]] = {}

    def add(self, u: str, v: str, action_type: str, amount: int = 1) -> None:
        if amount <= 0:
            raise ValueError("count increments must be positive")
        actions = self._table.setdefault(pair_key(u, v), {})
        actions[action_type] = actions.get(action_type, 0) + amount

    def get(self, u: str, v: str, action_type: str) -> int:
        return self._table.get(pair_key(u, v), {}).get(action_type, 0)

    def actions(self, pair: tuple[str, str]) -> dict[str, int]:
        return dict(self._table.get(pair, {}))

    def s_total(self, pair: tuple[str, str]) -> int:
        return sum(self._table.get(pair, {}).values())

    def num_action_types(self, pair: tuple[str, str]) -> int:
        return len(self._table.get(pair, {}))

    def pairs(self) -> list[tuple[str, str]]:
        return sorted(self._table)

    def users(self) -> list[str]:
        seen = {u for pair in self._table for u in pair}
        return sorted(seen)

    def restrict(self, action_type: str) -> "PairSyncCounts":
        """Counts keeping only one action type; pairs without it disappear."""
        out = PairSyncCounts()
        for pair, actions in self._table.items():
            if action_type in actions:
                out._table[pair] = {action_type: actions[action_type]}
        return out

    def copy(self) -> "PairSyncCounts":
        out = PairSyncCounts()
        out._table = {pair: dict(actions) for pair, actions in self._table.items()}
        return out

    def rows(self) -> Iterator[tuple[str, str, str, int]]:
        """Sorted (user_u, user_v, action_type, count) rows."""
        for pair in self.pairs():
            for action_type, count in sorted(self._table[pair].items()):
                yield pair[0], pair[1], action_type, count

    def __len__(self) -> int:
        return len(self._table)

    def __bool__(self) -> bool:
        return bool(self._table)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self._table

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PairSyncCounts):
            return NotImplemented
        return self._table == other._table

    def __repr__(self) -> str:
        return f"PairSyncCounts({len(self._table)} pairs)"


def _count_groups(groups: Sequence[tuple[str, tuple[str, ...]]]) -> dict[tuple[str, str, str], int]:
    agg: dict[tuple[str, str, str], int] = defaultdict(int)
    for action_type, users in groups:
        for u, v in combinations(users, 2):
            agg[(u, v, action_type)] += 1
    return agg


def detect(
    actions: Iterable[ActionRecord],
    config: SyncWindowConfig | None = None,
    max_workers: int = 1,
) -> PairSyncCounts:
    """Group actions by (action type, artifact, bucket) and count pair co-memberships.

    A user appearing several times in one group contributes as a single
    member: no self-pairs and no double counting within a group. The result
    is independent of input order and of max_workers.
    """
    config = config or SyncWindowConfig()
    members: dict[tuple[str, str, int], set[str]] = defaultdict(set)
    for record in actions:
        key = (record.action_type, record.artifact_id, config.bucket(record.timestamp))
        members[key].add(record.user_id)

    groups = sorted(
        (key[0], tuple(sorted(users)))
        for key, users in members.items()
        if len(users) >= 2
    )

    if max_workers <= 1 or len(groups) < 2:
        partials = [_count_groups(groups)]
    else:
        chunks = [groups[i::max_workers] for i in range(max_workers)]
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            partials = list(pool.map(_count_groups, chunks))

    counts = PairSyncCounts()
    for partial in partials:
        for (u, v, action_type), amount in partial.items():
            counts.add(u, v, action_type, amount)
    return counts


def brute_force_detect(
    actions: Sequence[ActionRecord],
    config: SyncWindowConfig | None = None,
) -> PairSyncCounts:
    """Oracle: enumerate every record pair, then collapse per-group duplicates.

    Same output contract as detect, computed without grouping. Intended for
    small inputs only.
    """
    if len(actions) > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force oracle limited to {BRUTE_FORCE_LIMIT} records")
    config = config or SyncWindowConfig()
    keys = [(r.action_type, r.artifact_id, config.bucket(r.timestamp)) for r in actions]
    users = [r.user_id for r in actions]

    hits: set[tuple[str, str, int, str, str]] = set()
    n = len(actions)
    for i in range(n):
        key_i = keys[i]
        user_i = users[i]
        for j in range(i + 1, n):
            if keys[j] == key_i and users[j] != user_i:
                u, v = (user_i, users[j]) if user_i < users[j] else (users[j], user_i)
                hits.add(key_i + (u, v))

    counts = PairSyncCounts()
    for action_type, _artifact, _bucket, u, v in hits:
        counts.add(u, v, action_type)
    return counts


def user_action_type_counts(counts: PairSyncCounts) -> dict[str, int]:
    """Per user, the number of distinct action types with at least one synchronizing pair."""
    per_user: dict[str, set[str]] = defaultdict(set)
    for pair in counts.pairs():
        for action_type in counts.actions(pair):
            per_user[pair[0]].add(action_type)
            per_user[pair[1]].add(action_type)
    return {user: len(types) for user, types in per_user.items()}


def action_type_participation(counts: PairSyncCounts) -> dict[int, float]:
    """Fraction of synchronizing users coordinating across 1, 2 and 3 action types."""
    per_user = user_action_type_counts(counts)
    if not per_user:
        return {}
    total = len(per_user)
    dist = {level: 0 for level in (1, 2, 3)}
    for count in per_user.values():
        dist[count] += 1
    return {level: dist[level] / total for level in (1, 2, 3)}


def write_pair_counts_csv(counts: PairSyncCounts, path: str | Path) -> Path:
    """Pair-count export: user_u,user_v,action_type,count with lexicographic rows."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["user_u", "user_v", "action_type", "count"])
        for row in counts.rows():
            writer.writerow(row)
    return path


def read_pair_counts_csv(path: str | Path) -> PairSyncCounts:
    counts = PairSyncCounts()
    with Path(path).open("r", encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            counts.add(row["user_u"], row["user_v"], row["action_type"], int(row["count"]))
    return counts


def counts_from_mapping(
    table: Mapping[tuple[str, str], Mapping[str, int]]
) -> PairSyncCounts:
    """Build a count table from {(u, v): {action_type: count}} (test/fixture helper)."""
    counts = PairSyncCounts()
    for (u, v), actions in table.items():
        for action_type, amount in actions.items():
            if action_type not in ACTION_TYPES:
                raise ValueError(f"unknown action type: {action_type}")
            counts.add(u, v, action_type, amount)
    return counts
