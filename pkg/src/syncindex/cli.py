"""Command line front end.

Subcommands mirror the pipeline stages (ingest, detect, score, graph,
metrics, report, simulate, compare); each reads and writes the documented
file formats so stages can be chained or run independently.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import bots as botmod
from . import csi as csimod
from . import graphs as graphmod
from . import metrics as metricmod
from . import pipeline
from . import simulate as simmod
from . import synchrony
from .events import (
    CorpusRejectedError,
    extract_actions,
    filter_language,
    filter_originals,
    merge_datasets,
    read_events_file,
    write_events_jsonl,
)

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _add_out(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=".", help="output directory (default: current)")


def _add_csi_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pair-formula", choices=csimod.PAIR_FORMULAS, default="anchored")
    parser.add_argument("--normalization", choices=csimod.NORMALIZATIONS, default="none")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="syncindex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and canonicalize raw event data")
    p.add_argument("--events", required=True, help="raw events file (JSONL or CSV)")
    p.add_argument("--interactions", help="optional separate interactions file")
    p.add_argument("--lang", default="", help="keep only posts with this language tag")
    p.add_argument("--label", default="", help="event label stored in downstream reports")
    _add_out(p)

    p = sub.add_parser("detect", help="detect synchronous user pairs")
    p.add_argument("--events", required=True)
    p.add_argument("--window", type=int, default=300, help="window seconds (default 300)")
    p.add_argument("--lang", default="")
    _add_out(p)

    p = sub.add_parser("score", help="compute the synchronization index hierarchy")
    p.add_argument("--pairs", required=True, help="pair_counts.csv from detect")
    _add_csi_flags(p)
    _add_out(p)

    p = sub.add_parser("graph", help="build and export synchronization graphs")
    p.add_argument("--pairs", required=True, help="pairs.csv from score")
    p.add_argument("--users", help="users.csv from score (adds csi_user attributes)")
    p.add_argument("--bots", help="bot score CSV (adds user_class attributes)")
    p.add_argument("--bot-threshold", type=float, default=botmod.DEFAULT_THRESHOLD)
    p.add_argument("--min-partners", type=int, default=5)
    _add_out(p)

    p = sub.add_parser("metrics", help="structure metrics and centralities")
    p.add_argument("--pairs", required=True, help="pairs.csv from score")
    p.add_argument("--users", help="users.csv from score (hierarchy orientation)")
    p.add_argument("--bots", help="bot score CSV (class clustering)")
    p.add_argument("--bot-threshold", type=float, default=botmod.DEFAULT_THRESHOLD)
    p.add_argument("--events", help="events file; adds all-communication centrality CSV")
    p.add_argument("--seed", type=int, default=0)
    _add_out(p)

    p = sub.add_parser("report", help="run the full pipeline and emit the event report")
    p.add_argument("--events", required=True)
    p.add_argument("--interactions")
    p.add_argument("--bots")
    p.add_argument("--bot-threshold", type=float, default=botmod.DEFAULT_THRESHOLD)
    p.add_argument("--window", type=int, default=300)
    _add_csi_flags(p)
    p.add_argument("--min-partners", type=int, default=5)
    p.add_argument("--lang", default="")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label", default="")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_out(p)

    p = sub.add_parser("simulate", help="generate a synthetic dataset with ground truth")
    p.add_argument("--config", required=True, help="simulation config JSON")
    p.add_argument("--seed", type=int, help="override the config seed")
    _add_out(p)

    p = sub.add_parser("compare", help="rank event reports by synchronization level")
    p.add_argument("reports", nargs="+", help="report.json files")
    p.add_argument("--out", help="optional ranking.json output path")

    return parser


def _cmd_ingest(args: argparse.Namespace) -> int:
    dataset = read_events_file(args.events, label=args.label)
    if args.interactions:
        dataset = merge_datasets(dataset, read_events_file(args.interactions), label=dataset.label)
    if args.lang:
        dataset = filter_language(dataset, args.lang)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = write_events_jsonl(dataset, out / "events.jsonl")
    print(
        f"wrote {path}: {len(dataset.posts)} posts, {len(dataset.interactions)} interactions, "
        f"{dataset.malformed} malformed lines"
    )
    return 0


def _cmd_detect(args: argparse.Namespace) -> int:
    dataset = read_events_file(args.events)
    if args.lang:
        dataset = filter_language(dataset, args.lang)
    actions = extract_actions(filter_originals(dataset))
    counts = synchrony.detect(actions, synchrony.SyncWindowConfig(window_seconds=args.window))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = synchrony.write_pair_counts_csv(counts, out / "pair_counts.csv")
    print(f"wrote {path}: {len(counts)} pairs over {len(counts.users())} users")
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    counts = synchrony.read_pair_counts_csv(args.pairs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = csimod.CsiConfig(pair_formula=args.pair_formula, normalization=args.normalization)
    if not counts:
        (out / "pairs.csv").write_text(
            "user_u,user_v,num_action_types,s_total,csi_userpair\n", encoding="utf-8"
        )
        (out / "users.csv").write_text("user_id,csi_user\n", encoding="utf-8")
        summary = {
            "csi_network": None,
            "per_action": {a: None for a in ("hashtag", "url", "mention")},
            "formula": config.pair_formula,
            "normalization": config.normalization,
            "reason": "no synchronized pairs",
        }
        (out / "network.json").write_text(
            json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
        print("no synchronized pairs; wrote empty score tables")
        return 0
    tables = csimod.compute_tables(counts, config)
    csimod.write_pair_scores_csv(tables, counts, out / "pairs.csv")
    csimod.write_user_scores_csv(tables, out / "users.csv")
    csimod.write_network_summary_json(tables, out / "network.json")
    print(f"csi_network={tables.network_score!r} over {len(tables.user_scores)} users")
    return 0


def _load_graph_inputs(args: argparse.Namespace):
    pair_scores = csimod.read_pair_scores_csv(args.pairs)
    user_scores = csimod.read_user_scores_csv(args.users) if args.users else None
    table = botmod.load_bot_scores(args.bots, threshold=args.bot_threshold) if args.bots else None
    classes = None
    if table is not None:
        users = {u for pair in pair_scores for u in pair}
        classes = botmod.user_classes(sorted(users), table)
    return pair_scores, user_scores, table, classes


def _cmd_graph(args: argparse.Namespace) -> int:
    pair_scores, user_scores, _table, classes = _load_graph_inputs(args)
    sync = graphmod.build_sync_graph(pair_scores, user_classes=classes, user_scores=user_scores)
    pruned = graphmod.prune_by_partner_count(sync, args.min_partners)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    graphmod.export(sync, "graphml", out / "sync.graphml")
    graphmod.export(pruned, "graphml", out / "sync_pruned.graphml")
    graphmod.export(sync, "dot", out / "sync.dot")
    graphmod.export(sync, "edge_csv", out / "sync_edges.csv")
    print(
        f"sync graph: {sync.number_of_nodes()} nodes, {sync.number_of_edges()} edges; "
        f"pruned(k={args.min_partners}): {pruned.number_of_nodes()} nodes, {pruned.number_of_edges()} edges"
    )
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    pair_scores, user_scores, table, _classes = _load_graph_inputs(args)
    if not pair_scores:
        raise csimod.UndefinedNetworkError("no pairs: metrics undefined")
    sync = graphmod.build_sync_graph(pair_scores, user_scores=user_scores)
    partition = metricmod.louvain_partition(sync, seed=args.seed)
    payload = {
        "density": metricmod.density(sync),
        "modularity": metricmod.newman_modularity(sync, partition),
        "partition_method": "louvain",
        "hierarchy": metricmod.krackhardt_hierarchy(sync, "csi_order", user_scores=user_scores or {}),
        "hierarchy_orientation": "csi_order",
        "transitivity": metricmod.transitivity(sync),
        "avg_local_clustering": metricmod.avg_local_clustering(sync),
    }
    if table is not None:
        payload["clustering_by_class"] = botmod.clustering_by_class(
            graphmod.build_sync_graph(
                pair_scores,
                user_classes=botmod.user_classes(sorted({u for p in pair_scores for u in p}), table),
            ),
            table,
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rounded = pipeline.round_floats(payload)
    (out / "metrics.json").write_text(
        json.dumps(rounded, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    if args.events:
        dataset = read_events_file(args.events)
        users = {p.user_id for p in dataset.posts}
        for record in dataset.interactions:
            users.add(record.source_user)
            users.add(record.target_user)
        allcomm = graphmod.build_allcomm_graph(dataset.interactions, users=users)
        degrees = metricmod.degree_centrality(allcomm) if allcomm.number_of_nodes() >= 2 else {}
        betweenness = metricmod.betweenness_centrality(allcomm)
        if allcomm.number_of_edges() > 0:
            eigen = metricmod.eigenvector_centrality(allcomm)
        else:
            eigen = dict.fromkeys(allcomm.nodes, 0.0)
        with (out / "centrality.csv").open("w", encoding="utf-8", newline="") as handle:
            handle.write("user_id,total_degree,betweenness,eigenvector\n")
            for user in sorted(allcomm.nodes):
                handle.write(
                    f"{user},{degrees.get(user, 0.0)!r},{betweenness.get(user, 0.0)!r},{eigen.get(user, 0.0)!r}\n"
                )
    print(f"wrote metrics for {sync.number_of_nodes()} nodes to {out / 'metrics.json'}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    options = pipeline.PipelineOptions(
        window_seconds=args.window,
        bot_threshold=args.bot_threshold,
        pair_formula=args.pair_formula,
        normalization=args.normalization,
        min_partners=args.min_partners,
        lang=args.lang,
        seed=args.seed,
        label=args.label,
    )
    report = pipeline.run_pipeline(
        args.events,
        bots_path=args.bots,
        out_dir=args.out,
        options=options,
        interactions_path=args.interactions,
    )
    if args.format == "csv":
        pipeline.write_report_csv(report, Path(args.out) / "report.csv")
    if report.csi_network_combined is None:
        print(f"report written to {Path(args.out) / 'report.json'} ({report.reason})")
    else:
        print(
            f"report written to {Path(args.out) / 'report.json'} "
            f"(csi_network={pipeline.round_floats(report.csi_network_combined)})"
        )
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = simmod.config_from_json(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    dataset, truth = simmod.generate(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_events_jsonl(dataset, out / "events.jsonl")
    simmod.write_ground_truth_csv(truth, out / "ground_truth.csv")
    simmod.write_bot_scores_csv(simmod.bot_scores_from_truth(truth), out / "bots.csv")
    print(
        f"wrote {len(dataset.posts)} posts, {len(truth.pairs)} planted pair rows, "
        f"{len(truth.user_classes)} scored users to {out}"
    )
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    ranking = pipeline.compare(args.reports)
    for label, value in ranking:
        print(f"{pipeline.round_floats(value)}\t{label}")
    if args.out:
        payload = [
            {"event_label": label, "csi_network_combined": value} for label, value in ranking
        ]
        Path(args.out).write_text(
            json.dumps(pipeline.round_floats(payload), indent=2) + "\n", encoding="utf-8"
        )
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "detect": _cmd_detect,
    "score": _cmd_score,
    "graph": _cmd_graph,
    "metrics": _cmd_metrics,
    "report": _cmd_report,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (
        OSError,
        CorpusRejectedError,
        botmod.ScoreError,
        simmod.SimConfigError,
        pipeline.ReportParseError,
        csimod.UndefinedNetworkError,
        metricmod.MetricUndefinedError,
        ValueError,
    ) as exc:
        print(f"syncindex {args.command}: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
