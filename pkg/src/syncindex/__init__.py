"""Synchronized-action detection and the combined synchronization index.

Quantifies co-timed user behavior in social media event data: detects
users posting the same hashtag, URL, or mention inside 5-minute windows,
scores pairs, users, and whole networks, builds synchronization graphs,
and partitions the result by externally supplied bot likelihoods.
"""

from .csi import (
    CsiConfig,
    CsiTables,
    UndefinedNetworkError,
    compute_tables,
    csi_network,
    csi_single_action,
    csi_user,
    csi_userpair,
    normalize_counts,
)
from .events import (
    ActionRecord,
    ArtifactError,
    CorpusRejectedError,
    EventDataset,
    InteractionRecord,
    PostEvent,
    canonicalize_artifact,
    extract_actions,
    filter_language,
    filter_originals,
    parse_events,
)
from .synchrony import (
    PairSyncCounts,
    SyncWindowConfig,
    action_type_participation,
    brute_force_detect,
    detect,
)

__version__ = "0.1.0"

__all__ = [
    "ActionRecord",
    "ArtifactError",
    "CorpusRejectedError",
    "CsiConfig",
    "CsiTables",
    "EventDataset",
    "InteractionRecord",
    "PairSyncCounts",
    "PostEvent",
    "SyncWindowConfig",
    "UndefinedNetworkError",
    "action_type_participation",
    "brute_force_detect",
    "canonicalize_artifact",
    "compute_tables",
    "csi_network",
    "csi_single_action",
    "csi_user",
    "csi_userpair",
    "detect",
    "extract_actions",
    "filter_language",
    "filter_originals",
    "normalize_counts",
    "parse_events",
]
