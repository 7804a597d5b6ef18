"""Evaluation reports: per-level metrics, sliced overall and per source.

The report is a plain JSON-serializable dict so that a persisted and
reloaded estimator can be checked byte-for-byte against an in-memory one.
No timestamps are embedded.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from .documents import LabeledDocument
from .errors import EmptyEvaluation
from .estimators import (
    DecodeMode,
    HierarchicalEstimator,
    ProbabilityProfile,
    profile_from_vector,
)
from .features import vectorize
from .metrics import (
    EvalRecord,
    confusion_matrix,
    level_log_loss,
    path_accuracy,
    recall_at_k,
)


def build_records(
    est: HierarchicalEstimator,
    documents: Sequence[LabeledDocument],
    threads: int = 1,
) -> list[EvalRecord]:
    """Profiles for all documents, optionally sharded across threads.

    Each profile is computed independently, so the thread count never
    changes results; the merge preserves document order.
    """
    if not documents:
        raise EmptyEvaluation("no documents to evaluate")
    vectors = [vectorize(est.tfidf, d.text) for d in documents]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            profiles: list[ProbabilityProfile] = list(
                pool.map(lambda v: profile_from_vector(est, v), vectors)
            )
    else:
        profiles = [profile_from_vector(est, v) for v in vectors]
    return [
        EvalRecord(profile=p, true_codes=d.codes, weight=d.weight)
        for p, d in zip(profiles, documents)
    ]


def _slice_report(
    records: list[EvalRecord], decode: DecodeMode, ks: Sequence[int]
) -> dict:
    depth = records[0].profile.tree.level_count
    accuracy = path_accuracy(records, decode)
    for shallow, deep in zip(accuracy, accuracy[1:]):
        # guaranteed by path consistency; a violation is an internal bug
        if deep > shallow + 1e-12:
            raise AssertionError(
                f"per-level accuracy increased with depth: {accuracy}"
            )
    levels = {}
    for level in range(1, depth + 1):
        entry = {"log_loss": level_log_loss(records, level)}
        for k in ks:
            entry[f"recall@{k}"] = recall_at_k(records, level, k)
        entry["accuracy"] = accuracy[level - 1]
        levels[str(level)] = entry
    confusion = {
        str(level): confusion_matrix(records, level, decode).to_sparse_dict()
        for level in range(1, depth + 1)
    }
    return {
        "count": len(records),
        "weight": sum(r.weight for r in records),
        "levels": levels,
        "path_accuracy": accuracy,
        "confusion": confusion,
    }


def evaluation_report(
    est: HierarchicalEstimator,
    documents: Sequence[LabeledDocument],
    decode: DecodeMode = "leaf_argmax",
    ks: Sequence[int] = (1, 3, 5),
    threads: int = 1,
) -> dict:
    """Metrics for the whole dataset plus one slice per document source."""
    records = build_records(est, documents, threads=threads)
    slices = {"overall": _slice_report(records, decode, ks)}
    by_source: dict[str, list[EvalRecord]] = {}
    for record, doc in zip(records, documents):
        by_source.setdefault(doc.source, []).append(record)
    for source in sorted(by_source):
        slices[f"source:{source}"] = _slice_report(by_source[source], decode, ks)
    return {
        "decode": decode,
        "record_count": len(records),
        "multi_code_log_loss": "max_true_ancestor",
        "slices": slices,
    }
