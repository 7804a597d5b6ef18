"""Per-level evaluation metrics and coder-agreement statistics.

Evaluation works on :class:`EvalRecord` rows that pair a probability
profile with one or more flagged true leaf codes and a sampling weight.
Log loss for multi-code records scores the most favorable flagged
ancestor; recall@k follows the usual definition where the denominator is
the number of distinct relevant codes at the level.

Coder agreement operates on paired code strings compared at a digit
prefix; confidence intervals are weighted Wilson intervals (not
design-based survey variance estimates).  Cohen's kappa is the plain
chance-corrected coefficient with record weights entering both the
observed agreement and the marginals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BadDigitLevel,
    DegenerateTable,
    EmptyEvaluation,
    EmptyTable,
    MalformedCode,
)
from .estimators import DecodeMode, ProbabilityProfile, predict_path, top_k
from .hierarchy import ClassCode

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class EvalRecord:
    """One evaluated document: its profile, flagged true leaves, weight."""

    profile: ProbabilityProfile
    true_codes: tuple[ClassCode, ...]
    weight: float = 1.0

    def __post_init__(self):
        if not self.true_codes:
            raise EmptyEvaluation("record carries no true codes")
        if self.weight <= 0:
            raise ValueError("record weight must be positive")
        depth = self.profile.tree.level_count
        for code in self.true_codes:
            if code.level != depth:
                raise ValueError(f"true code {code} is not full depth")


def _check_records(records: Sequence[EvalRecord]) -> None:
    if not records:
        raise EmptyEvaluation("no evaluation records")


def _true_ancestors(record: EvalRecord, level: int) -> set[ClassCode]:
    return {code.prefix(level) for code in record.true_codes}


def level_log_loss(records: Sequence[EvalRecord], level: int) -> float:
    """Weighted mean of -ln p(true ancestor) at one level.

    For multi-code records the highest probability among the flagged
    ancestors is scored.  Probabilities are clamped to [1e-12, 1].
    """
    _check_records(records)
    total = 0.0
    weight_sum = 0.0
    for record in records:
        level_map = record.profile.level(level)
        p = max(level_map.get(a, 0.0) for a in _true_ancestors(record, level))
        p = min(max(p, PROB_FLOOR), 1.0)
        total += record.weight * -math.log(p)
        weight_sum += record.weight
    return total / weight_sum


def recall_at_k(records: Sequence[EvalRecord], level: int, k: int) -> float:
    """Weighted mean fraction of relevant level codes captured in the top k."""
    _check_records(records)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    total = 0.0
    weight_sum = 0.0
    for record in records:
        relevant = _true_ancestors(record, level)
        predicted = {code for code, _ in top_k(record.profile, level, k)}
        total += record.weight * len(predicted & relevant) / len(relevant)
        weight_sum += record.weight
    return total / weight_sum


def path_accuracy(
    records: Sequence[EvalRecord], mode: DecodeMode = "leaf_argmax"
) -> list[float]:
    """Weighted per-level exact-match accuracy of decoded paths.

    A level counts as correct when the decoded code equals the ancestor of
    any flagged true code.  Because decoded paths are root-to-leaf
    consistent, the returned list is non-increasing in depth.
    """
    _check_records(records)
    depth = records[0].profile.tree.level_count
    hits = np.zeros(depth)
    weight_sum = 0.0
    for record in records:
        path = predict_path(record.profile, mode)
        weight_sum += record.weight
        for i, code in enumerate(path):
            if code in _true_ancestors(record, i + 1):
                hits[i] += record.weight
    return [float(h / weight_sum) for h in hits]


@dataclass
class ConfusionMatrix:
    """Weighted confusion counts over one level's codes (rows = truth)."""

    codes: tuple[ClassCode, ...]
    counts: np.ndarray

    def normalized(self) -> np.ndarray:
        """Row-percentage view; rows with no mass stay zero."""
        row_sums = self.counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(row_sums > 0, 100.0 * self.counts / row_sums, 0.0)
        return out

    def to_sparse_dict(self) -> dict[str, dict[str, float]]:
        out: dict[str, dict[str, float]] = {}
        for i, true_code in enumerate(self.codes):
            row = {
                self.codes[j].render(): float(v)
                for j, v in enumerate(self.counts[i])
                if v > 0
            }
            if row:
                out[true_code.render()] = row
        return out


def confusion_matrix(
    records: Sequence[EvalRecord], level: int, mode: DecodeMode = "leaf_argmax"
) -> ConfusionMatrix:
    """Truth vs. predicted code at a level, predictions via predict_path.

    Multi-code records contribute their first flagged code as the truth
    row.
    """
    _check_records(records)
    codes = records[0].profile.tree.level_nodes(level)
    index = {code: i for i, code in enumerate(codes)}
    counts = np.zeros((len(codes), len(codes)))
    for record in records:
        true_code = record.true_codes[0].prefix(level)
        predicted = predict_path(record.profile, mode)[level - 1]
        counts[index[true_code], index[predicted]] += record.weight
    return ConfusionMatrix(codes=codes, counts=counts)


# -- coder agreement ------------------------------------------------------


@dataclass
class CoderTable:
    """Paired code assignments from two coders, with record weights."""

    coder_a: tuple[str, ...]
    coder_b: tuple[str, ...]
    weights: tuple[float, ...] = field(default=())
    digit_levels: tuple[int, ...] = (1, 2, 3, 4, 6)

    def __post_init__(self):
        if not self.weights:
            self.weights = tuple(1.0 for _ in self.coder_a)
        if not (len(self.coder_a) == len(self.coder_b) == len(self.weights)):
            raise EmptyTable("coder columns and weights must have equal length")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")

    def __len__(self) -> int:
        return len(self.coder_a)

    def prefixes(self, digits: int) -> tuple[list[str], list[str]]:
        if digits not in self.digit_levels:
            raise BadDigitLevel(
                f"{digits} digits not in the hierarchy's levels {self.digit_levels}"
            )
        for code in (*self.coder_a, *self.coder_b):
            if len(code) < digits:
                raise MalformedCode(
                    f"code {code!r} too short to compare at {digits} digits"
                )
        return (
            [c[:digits] for c in self.coder_a],
            [c[:digits] for c in self.coder_b],
        )


def _wilson_interval(p: float, n_eff: float, z: float = 1.959963984540054) -> tuple[float, float]:
    denom = 1.0 + z * z / n_eff
    center = (p + z * z / (2 * n_eff)) / denom
    margin = z * math.sqrt(p * (1 - p) / n_eff + z * z / (4 * n_eff * n_eff)) / denom
    return max(0.0, center - margin), min(1.0, center + margin)


def agreement_rate(table: CoderTable, digits: int) -> tuple[float, tuple[float, float]]:
    """Weighted percent agreement at a digit prefix, with a 95% Wilson CI.

    The interval uses the Kish effective sample size for weighted data; it
    is a pragmatic interval, not a design-based variance estimate.
    """
    if len(table) == 0:
        raise EmptyTable("no paired assignments")
    a, b = table.prefixes(digits)
    weights = np.asarray(table.weights)
    agree = np.array([x == y for x, y in zip(a, b)], dtype=np.float64)
    p = float(np.sum(weights * agree) / np.sum(weights))
    n_eff = float(np.sum(weights) ** 2 / np.sum(weights**2))
    lo, hi = _wilson_interval(p, n_eff)
    return 100.0 * p, (100.0 * lo, 100.0 * hi)


def cohens_kappa(table: CoderTable, digits: int) -> float:
    """Chance-corrected agreement kappa = (p_o - p_e) / (1 - p_e).

    Record weights enter the observed agreement and both coders'
    marginals; expected agreement is the weighted marginal product.
    """
    if len(table) == 0:
        raise EmptyTable("no paired assignments")
    a, b = table.prefixes(digits)
    weights = np.asarray(table.weights)
    total = float(np.sum(weights))
    p_o = float(np.sum(weights * np.array([x == y for x, y in zip(a, b)]))) / total

    categories = sorted(set(a) | set(b))
    p_e = 0.0
    for cat in categories:
        pa = float(np.sum(weights * np.array([x == cat for x in a]))) / total
        pb = float(np.sum(weights * np.array([x == cat for x in b]))) / total
        p_e += pa * pb
    if abs(1.0 - p_e) < 1e-12:
        raise DegenerateTable("expected agreement is 1; kappa undefined")
    return (p_o - p_e) / (1.0 - p_e)
