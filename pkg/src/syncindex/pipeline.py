"""End-to-end orchestration: events in, event report and artifacts out.

The pipeline runs detect -> index -> graphs -> metrics -> bot overlay and
emits a deterministic report. Report floats are serialized with 6
significant digits; intermediate CSV artifacts keep full precision so
stages can be re-run from files bit-exactly.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import networkx as nx

from . import bots as botmod
from . import csi as csimod
from . import graphs as graphmod
from . import metrics as metricmod
from . import synchrony
from .events import (
    extract_actions,
    filter_language,
    filter_originals,
    merge_datasets,
    read_events_file,
)

logger = logging.getLogger(__name__)


class ReportParseError(ValueError):
    """A report file could not be read or lacks required fields."""


@dataclass(frozen=True)
class PipelineOptions:
    window_seconds: int = 300
    bot_threshold: float = botmod.DEFAULT_THRESHOLD
    pair_formula: str = "anchored"
    normalization: str = "none"
    min_partners: int = 5
    lang: str = ""
    seed: int = 0
    events_format: str | None = None
    label: str = ""


@dataclass
class EventReport:
    event_label: str
    config: dict
    counts: dict
    action_type_participation: dict[str, float]
    csi_network_combined: float | None = None
    csi_per_action: dict[str, float | None] = field(default_factory=dict)
    reason: str | None = None
    avg_csi_userpair_by_pair_class: dict | None = None
    avg_csi_user_by_user_class: dict | None = None
    centrality_by_class: dict | None = None
    dominant_sync_class: str | None = None
    structure: dict | None = None
    notices: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "event_label": self.event_label,
            "config": self.config,
            "counts": self.counts,
            "action_type_participation": self.action_type_participation,
            "csi_network_combined": self.csi_network_combined,
            "csi_per_action": self.csi_per_action,
            "reason": self.reason,
            "avg_csi_userpair_by_pair_class": self.avg_csi_userpair_by_pair_class,
            "avg_csi_user_by_user_class": self.avg_csi_user_by_user_class,
            "centrality_by_class": self.centrality_by_class,
            "dominant_sync_class": self.dominant_sync_class,
            "structure": self.structure,
            "notices": self.notices,
        }


def _round_sig(value: float, digits: int = 6) -> float:
    return float(f"{value:.{digits}g}")


def round_floats(obj: object, digits: int = 6) -> object:
    """Recursively round floats to significant digits for serialization."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return _round_sig(obj, digits)
    if isinstance(obj, dict):
        return {key: round_floats(value, digits) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(value, digits) for value in obj]
    return obj


def report_json_text(report: EventReport) -> str:
    payload = round_floats(report.to_dict())
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_report_json(report: EventReport, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(report_json_text(report), encoding="utf-8")
    return path


def write_report_csv(report: EventReport, path: str | Path) -> Path:
    """Flattened section,name,value view of the report."""

    def rows(prefix: str, obj: object):
        if isinstance(obj, dict):
            for key in sorted(obj):
                yield from rows(f"{prefix}.{key}" if prefix else str(key), obj[key])
        elif isinstance(obj, list):
            for i, item in enumerate(obj):
                yield from rows(f"{prefix}[{i}]", item)
        else:
            yield prefix, obj

    payload = round_floats(report.to_dict())
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["field", "value"])
        for name, value in rows("", payload):
            writer.writerow([name, "" if value is None else value])
    return path


def _structure_section(
    sync: nx.Graph,
    user_scores: dict[str, float],
    bot_table: botmod.BotScoreTable | None,
    seed: int,
) -> dict:
    partition = metricmod.louvain_partition(sync, seed=seed)
    section = {
        "density": metricmod.density(sync),
        "modularity": metricmod.newman_modularity(sync, partition),
        "partition_method": "louvain",
        "hierarchy": metricmod.krackhardt_hierarchy(sync, "csi_order", user_scores=user_scores),
        "hierarchy_orientation": "csi_order",
        "transitivity": metricmod.transitivity(sync),
        "avg_local_clustering": metricmod.avg_local_clustering(sync),
    }
    if bot_table is not None:
        section["clustering_by_class"] = botmod.clustering_by_class(sync, bot_table)
    return section


def _dominant_class(spread: botmod.ClassSpread) -> str | None:
    candidates = {cls: spread.means[cls] for cls in ("bot", "human") if cls in spread.means}
    if not candidates:
        return None
    return max(sorted(candidates), key=lambda cls: candidates[cls])


def _write_participation_centrality_csv(
    table: metricmod.ParticipationCentrality, path: Path
) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["user_id", "num_action_types", "total_degree", "betweenness", "eigenvector"])
        for user, level, deg, bet, eig in table.rows:
            writer.writerow([user, level, repr(deg), repr(bet), repr(eig)])


def _write_metrics_json(structure: dict | None, path: Path) -> None:
    payload = round_floats(structure if structure is not None else {})
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def run_pipeline(
    events_path: str | Path,
    bots_path: str | Path | None = None,
    out_dir: str | Path | None = None,
    options: PipelineOptions | None = None,
    interactions_path: str | Path | None = None,
) -> EventReport:
    """Run the full analysis over an events file; write artifacts when out_dir given.

    Artifacts: pair_counts.csv, pairs.csv, users.csv, network.json, sync
    GraphML (raw and pruned), metrics.json, centrality_by_action_types.csv,
    report.json. Deterministic for fixed inputs and options.
    """
    options = options or PipelineOptions()
    notices: list[str] = []

    dataset = read_events_file(events_path, format=options.events_format, label=options.label)
    if interactions_path is not None:
        extra = read_events_file(interactions_path, format=options.events_format)
        dataset = merge_datasets(dataset, extra, label=dataset.label)
    if options.lang:
        dataset = filter_language(dataset, options.lang)

    originals = filter_originals(dataset)
    actions = extract_actions(originals)
    window = synchrony.SyncWindowConfig(window_seconds=options.window_seconds)
    counts = synchrony.detect(actions, window)

    bot_table = None
    if bots_path is not None:
        bot_table = botmod.load_bot_scores(bots_path, threshold=options.bot_threshold)
    else:
        notices.append("bot scores not provided; class sections omitted")

    config_echo = {
        "window_seconds": options.window_seconds,
        "pair_formula": options.pair_formula,
        "normalization": options.normalization,
        "bot_threshold": options.bot_threshold,
        "min_partners": options.min_partners,
        "lang": options.lang,
        "seed": options.seed,
    }
    counts_section = {
        "posts": len(dataset.posts),
        "original_posts": len(originals.posts),
        "interactions": len(dataset.interactions),
        "action_records": len(actions),
        "malformed_lines": dataset.malformed,
        "sync_users": len(counts.users()),
        "sync_pairs": len(counts),
    }
    report = EventReport(
        event_label=dataset.label or Path(events_path).stem,
        config=config_echo,
        counts=counts_section,
        action_type_participation={
            str(level): value for level, value in synchrony.action_type_participation(counts).items()
        },
        notices=notices,
    )

    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        synchrony.write_pair_counts_csv(counts, out / "pair_counts.csv")

    if not counts:
        report.reason = "no synchronized pairs detected"
        report.csi_per_action = {a: None for a in ("hashtag", "url", "mention")}
        if out is not None:
            _write_metrics_json(None, out / "metrics.json")
            write_report_json(report, out / "report.json")
        return report

    csi_config = csimod.CsiConfig(
        pair_formula=options.pair_formula, normalization=options.normalization
    )
    tables = csimod.compute_tables(counts, csi_config)
    report.csi_network_combined = tables.network_score
    report.csi_per_action = {
        a: tables.per_action_network.get(a) for a in ("hashtag", "url", "mention")
    }

    user_classes = None
    if bot_table is not None:
        user_classes = botmod.user_classes(counts.users(), bot_table)
    sync = graphmod.build_sync_graph(
        tables.pair_scores, user_classes=user_classes, user_scores=tables.user_scores
    )
    pruned = graphmod.prune_by_partner_count(sync, options.min_partners)

    allcomm_users = {p.user_id for p in dataset.posts}
    for record in dataset.interactions:
        allcomm_users.add(record.source_user)
        allcomm_users.add(record.target_user)
    allcomm = graphmod.build_allcomm_graph(dataset.interactions, users=allcomm_users)

    report.structure = _structure_section(sync, tables.user_scores, bot_table, options.seed)

    if bot_table is not None:
        by_pair = botmod.average_csi_by_pair_class(tables.pair_scores, bot_table)
        report.avg_csi_userpair_by_pair_class = {
            cls: {"mean": by_pair.means[cls], "count": by_pair.counts[cls]}
            for cls in sorted(by_pair.means)
        }
        by_user = botmod.average_csi_by_user_class(tables.user_scores, bot_table)
        report.avg_csi_user_by_user_class = {
            cls: {
                "mean": by_user.means[cls],
                "sd": by_user.sds[cls],
                "count": by_user.counts[cls],
            }
            for cls in sorted(by_user.means)
        }
        if by_user.unknown:
            report.notices.append(f"{by_user.unknown} synchronizing users without bot scores")
        report.centrality_by_class = botmod.centrality_by_class(
            allcomm, bot_table, set(tables.user_scores)
        )
        report.dominant_sync_class = _dominant_class(by_user)

    if out is not None:
        csimod.write_pair_scores_csv(tables, counts, out / "pairs.csv")
        csimod.write_user_scores_csv(tables, out / "users.csv")
        csimod.write_network_summary_json(tables, out / "network.json")
        graphmod.export(sync, "graphml", out / "sync.graphml")
        graphmod.export(pruned, "graphml", out / "sync_pruned.graphml")
        _write_metrics_json(report.structure, out / "metrics.json")
        fig2 = metricmod.centrality_by_action_type_count(
            allcomm, synchrony.user_action_type_counts(counts)
        )
        _write_participation_centrality_csv(fig2, out / "centrality_by_action_types.csv")
        write_report_json(report, out / "report.json")

    return report


def compare(report_paths: Sequence[str | Path]) -> list[tuple[str, float]]:
    """Rank events ascending by combined network score; ties break by label."""
    entries: list[tuple[str, float]] = []
    for path in report_paths:
        path = Path(path)
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
            label = obj["event_label"]
            value = obj["csi_network_combined"]
            if not isinstance(label, str) or isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError("missing or non-numeric csi_network_combined")
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ReportParseError(f"{path}: {exc}") from exc
        entries.append((label, float(value)))
    entries.sort(key=lambda entry: (entry[1], entry[0]))
    return entries
