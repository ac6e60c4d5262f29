"""Event ingestion: parse raw post/interaction records, filter, and canonicalize.

Input is line-delimited JSON (canonical) or CSV with the same column names
(list fields pipe-delimited). Timestamps are normalized to UTC epoch seconds
at parse time; sub-second precision is truncated.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator
from urllib.parse import urlsplit, urlunsplit

logger = logging.getLogger(__name__)

POST_TYPES = ("original", "retweet", "quote", "reply")
INTERACTION_TYPES = ("retweet", "quote", "mention", "reply")
ACTION_TYPES = ("hashtag", "url", "mention")


class CorpusRejectedError(ValueError):
    """More than half of the input lines were malformed."""


class ArtifactError(ValueError):
    """Raw artifact cannot be canonicalized."""


@dataclass(frozen=True)
class PostEvent:
    """One authored post with its extracted action artifacts (raw strings)."""

    post_id: str
    user_id: str
    timestamp: int
    post_type: str
    lang: str | None = None
    hashtags: frozenset[str] = frozenset()
    urls: frozenset[str] = frozenset()
    mentions: frozenset[str] = frozenset()


@dataclass(frozen=True)
class InteractionRecord:
    source_user: str
    target_user: str
    interaction_type: str
    timestamp: int


@dataclass(frozen=True)
class ActionRecord:
    """A single canonicalized action taken by a user at a point in time."""

    user_id: str
    timestamp: int
    action_type: str
    artifact_id: str


@dataclass(frozen=True)
class EventDataset:
    """Immutable parsed dataset; posts sorted by timestamp ascending."""

    posts: tuple[PostEvent, ...] = ()
    interactions: tuple[InteractionRecord, ...] = ()
    label: str = ""
    malformed: int = field(default=0, compare=False)


def _coerce_timestamp(value: object) -> int:
    """Accept epoch seconds (int/float/int-string) or ISO-8601; return UTC epoch seconds."""
    if isinstance(value, bool):
        raise ValueError("timestamp must be a number or ISO-8601 string")
    if isinstance(value, int):
        ts = value
    elif isinstance(value, float):
        ts = int(value)
    elif isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty timestamp")
        try:
            ts = int(text)
        except ValueError:
            dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
            if dt.tzinfo is None:
                dt = dt.replace(tzinfo=timezone.utc)
            ts = int(dt.timestamp())
    else:
        raise ValueError(f"bad timestamp type: {type(value).__name__}")
    if ts < 0:
        raise ValueError("timestamp before epoch")
    return ts


def _required_str(obj: dict, key: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value.strip():
        raise ValueError(f"missing or empty field: {key}")
    return value.strip()


def _artifact_set(value: object) -> frozenset[str]:
    if value is None or value == "":
        return frozenset()
    if not isinstance(value, (list, tuple, set, frozenset)):
        raise ValueError("artifact field must be a list")
    cleaned = set()
    for item in value:
        if not isinstance(item, str):
            raise ValueError("artifact entries must be strings")
        item = item.strip()
        if item:
            cleaned.add(item)
    return frozenset(cleaned)


def _post_from_mapping(obj: dict) -> PostEvent:
    post_type = _required_str(obj, "post_type")
    if post_type not in POST_TYPES:
        raise ValueError(f"unknown post_type: {post_type}")
    lang = obj.get("lang")
    if lang is not None:
        if not isinstance(lang, str):
            raise ValueError("lang must be a string")
        lang = lang.strip().lower() or None
    return PostEvent(
        post_id=_required_str(obj, "post_id"),
        user_id=_required_str(obj, "user_id"),
        timestamp=_coerce_timestamp(obj["timestamp"]),
        post_type=post_type,
        lang=lang,
        hashtags=_artifact_set(obj.get("hashtags")),
        urls=_artifact_set(obj.get("urls")),
        mentions=_artifact_set(obj.get("mentions")),
    )


def _interaction_from_mapping(obj: dict) -> InteractionRecord | None:
    """Returns None for self-interactions, which are dropped (not malformed)."""
    interaction_type = _required_str(obj, "interaction_type")
    if interaction_type not in INTERACTION_TYPES:
        raise ValueError(f"unknown interaction_type: {interaction_type}")
    source = _required_str(obj, "source_user")
    target = _required_str(obj, "target_user")
    if source == target:
        return None
    return InteractionRecord(
        source_user=source,
        target_user=target,
        interaction_type=interaction_type,
        timestamp=_coerce_timestamp(obj["timestamp"]),
    )


def _csv_row_to_mapping(row: dict) -> dict:
    """Translate a CSV row to the JSONL record shape (pipe-delimited lists)."""
    obj: dict = {k: v for k, v in row.items() if k is not None and v not in (None, "")}
    for key in ("hashtags", "urls", "mentions"):
        if key in obj:
            obj[key] = [part for part in obj[key].split("|") if part]
    return obj


def parse_events(
    stream: Iterable[str] | Iterable[dict],
    format: str = "jsonl",
    label: str = "",
) -> EventDataset:
    """Parse line-delimited records into an EventDataset.

    Malformed lines are counted and skipped; duplicated post ids count as
    malformed. Raises CorpusRejectedError when more than half of the
    non-blank lines are malformed.
    """
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unknown format: {format}")

    posts: list[PostEvent] = []
    interactions: list[InteractionRecord] = []
    seen_post_ids: set[str] = set()
    malformed = 0
    dropped_self = 0
    total = 0

    if format == "csv":
        records: Iterator[dict] = (_csv_row_to_mapping(row) for row in csv.DictReader(stream))
    else:
        records = _iter_jsonl(stream)

    for obj in records:
        total += 1
        if obj is None:
            malformed += 1
            continue
        try:
            if "source_user" in obj or "target_user" in obj:
                record = _interaction_from_mapping(obj)
                if record is None:
                    dropped_self += 1
                else:
                    interactions.append(record)
            else:
                post = _post_from_mapping(obj)
                if post.post_id in seen_post_ids:
                    raise ValueError(f"duplicate post_id: {post.post_id}")
                seen_post_ids.add(post.post_id)
                posts.append(post)
        except (ValueError, KeyError, TypeError):
            malformed += 1

    if total and malformed * 2 > total:
        raise CorpusRejectedError(f"{malformed} of {total} lines malformed")
    if dropped_self:
        logger.warning("dropped %d self-interaction records", dropped_self)

    posts.sort(key=lambda p: (p.timestamp, p.post_id))
    interactions.sort(key=lambda r: (r.timestamp, r.source_user, r.target_user, r.interaction_type))
    return EventDataset(
        posts=tuple(posts),
        interactions=tuple(interactions),
        label=label,
        malformed=malformed,
    )


def _iter_jsonl(stream: Iterable[str]) -> Iterator[dict | None]:
    for line in stream:
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            yield None
            continue
        yield obj if isinstance(obj, dict) else None


def filter_originals(dataset: EventDataset) -> EventDataset:
    """Keep only posts authored as originals; interactions are untouched."""
    kept = tuple(p for p in dataset.posts if p.post_type == "original")
    return replace(dataset, posts=kept)


def filter_language(dataset: EventDataset, lang: str) -> EventDataset:
    """Keep posts whose provided language tag matches; empty code disables the filter.

    No language detection is performed; posts without a tag are removed.
    """
    code = lang.strip().lower()
    if not code:
        return dataset
    if dataset.posts and not any(p.lang for p in dataset.posts):
        logger.warning("language filter %r removed all posts: no post carries a lang tag", code)
    kept = tuple(p for p in dataset.posts if p.lang == code)
    return replace(dataset, posts=kept)


def canonicalize_artifact(action_type: str, raw: str) -> str:
    """Reduce a raw artifact to its canonical id. Idempotent.

    hashtag/mention: leading marker stripped, lowercased. url: scheme and
    host lowercased, fragment removed, trailing slash removed, path and
    query otherwise preserved byte-exact.
    """
    if raw is None or not raw.strip():
        raise ArtifactError("artifact is empty or whitespace-only")
    text = raw.strip()
    if action_type == "hashtag":
        canon = text.lstrip("#").lower()
    elif action_type == "mention":
        canon = text.lstrip("@").lower()
    elif action_type == "url":
        parts = urlsplit(text)
        canon = urlunsplit(
            (parts.scheme.lower(), parts.netloc.lower(), parts.path.rstrip("/"), parts.query, "")
        )
    else:
        raise ArtifactError(f"unknown action type: {action_type}")
    if not canon:
        raise ArtifactError(f"artifact reduces to nothing: {raw!r}")
    return canon


def extract_actions(dataset: EventDataset) -> list[ActionRecord]:
    """One ActionRecord per (post, action type, distinct canonical artifact).

    Duplicates of the same artifact within one post emit a single record.
    Expects the dataset to be filtered to original posts already.
    """
    records: list[ActionRecord] = []
    for post in dataset.posts:
        for action_type, raws in (
            ("hashtag", post.hashtags),
            ("url", post.urls),
            ("mention", post.mentions),
        ):
            canons = set()
            for raw in raws:
                try:
                    canons.add(canonicalize_artifact(action_type, raw))
                except ArtifactError:
                    logger.warning("rejected %s artifact %r on post %s", action_type, raw, post.post_id)
            for artifact_id in sorted(canons):
                records.append(
                    ActionRecord(
                        user_id=post.user_id,
                        timestamp=post.timestamp,
                        action_type=action_type,
                        artifact_id=artifact_id,
                    )
                )
    return records


def post_record(post: PostEvent) -> dict:
    obj = {
        "post_id": post.post_id,
        "user_id": post.user_id,
        "timestamp": post.timestamp,
        "post_type": post.post_type,
        "hashtags": sorted(post.hashtags),
        "urls": sorted(post.urls),
        "mentions": sorted(post.mentions),
    }
    if post.lang is not None:
        obj["lang"] = post.lang
    return obj


def interaction_record(rec: InteractionRecord) -> dict:
    return {
        "source_user": rec.source_user,
        "target_user": rec.target_user,
        "interaction_type": rec.interaction_type,
        "timestamp": rec.timestamp,
    }


def dataset_lines(dataset: EventDataset) -> Iterator[str]:
    """Canonical JSONL serialization: posts then interactions, sorted keys."""
    for post in dataset.posts:
        yield json.dumps(post_record(post), sort_keys=True, separators=(",", ":"))
    for rec in dataset.interactions:
        yield json.dumps(interaction_record(rec), sort_keys=True, separators=(",", ":"))


def write_events_jsonl(dataset: EventDataset, path: str | Path) -> Path:
    path = Path(path)
    lines = list(dataset_lines(dataset))
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return path


def read_events_file(path: str | Path, format: str | None = None, label: str = "") -> EventDataset:
    """Parse an events file; format inferred from the suffix unless given."""
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    with path.open("r", encoding="utf-8", newline="") as handle:
        return parse_events(handle, format=format, label=label or path.stem)


def merge_datasets(*datasets: EventDataset, label: str = "") -> EventDataset:
    """Combine datasets (e.g. separate post and interaction files) into one."""
    posts = sorted(
        (p for d in datasets for p in d.posts), key=lambda p: (p.timestamp, p.post_id)
    )
    interactions = sorted(
        (r for d in datasets for r in d.interactions),
        key=lambda r: (r.timestamp, r.source_user, r.target_user, r.interaction_type),
    )
    return EventDataset(
        posts=tuple(posts),
        interactions=tuple(interactions),
        label=label or (datasets[0].label if datasets else ""),
        malformed=sum(d.malformed for d in datasets),
    )
