"""Synthetic labeled corpora with long-tail class frequencies.

Real occupation-coded corpora are heavily imbalanced: a handful of codes
account for most ads while a third of all codes appear fewer than ten
times.  This generator reproduces that shape over any taxonomy with a
Zipf-like rank-frequency law, so training and evaluation code can be
stress-tested at desk scale without the production datasets.

Each leaf owns a small private vocabulary; ``class_token_signal`` sets the
fraction of document tokens drawn from it versus a shared noise
vocabulary.  At signal 1 the corpus is linearly separable by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .documents import LabeledDocument
from .errors import InvalidSpec
from .hierarchy import HierarchyTree


@dataclass
class CorpusSpec:
    tree: HierarchyTree
    total_docs: int
    tail_exponent: float = 1.2
    tokens_per_doc: tuple[int, int] = (10, 40)
    class_token_signal: float = 0.8
    seed: int = 0
    class_vocab_size: int = 12
    noise_vocab_size: int = 500
    source: str = "synthetic"
    # flagged option: probability of attaching a second distinct leaf code
    multi_code_rate: float = 0.0

    def __post_init__(self):
        lo, hi = self.tokens_per_doc
        if self.total_docs < 1:
            raise InvalidSpec("total_docs must be at least 1")
        if self.tail_exponent < 0:
            raise InvalidSpec("tail_exponent must be non-negative")
        if not 1 <= lo <= hi:
            raise InvalidSpec(f"bad tokens_per_doc range ({lo}, {hi})")
        if not 0.0 <= self.class_token_signal <= 1.0:
            raise InvalidSpec("class_token_signal must be in [0, 1]")
        if self.class_vocab_size < 1 or self.noise_vocab_size < 1:
            raise InvalidSpec("vocabulary sizes must be at least 1")
        if not 0.0 <= self.multi_code_rate < 1.0:
            raise InvalidSpec("multi_code_rate must be in [0, 1)")


def leaf_probabilities(spec: CorpusSpec) -> np.ndarray:
    """Normalized rank^(-tail_exponent) frequencies, one per leaf.

    Ranks follow the canonical leaf order, so the programmed frequency is
    non-increasing in rank.
    """
    ranks = np.arange(1, len(spec.tree.leaves) + 1, dtype=np.float64)
    raw = ranks ** (-spec.tail_exponent)
    return raw / raw.sum()


def generate_corpus(spec: CorpusSpec) -> list[LabeledDocument]:
    """Deterministic synthetic corpus following the spec's frequency law."""
    leaves = spec.tree.leaves
    probs = leaf_probabilities(spec)
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.tokens_per_doc

    docs = []
    for i in range(spec.total_docs):
        leaf_idx = int(rng.choice(len(leaves), p=probs))
        leaf = leaves[leaf_idx]
        n_tokens = int(rng.integers(lo, hi + 1))
        signal = rng.random(n_tokens) < spec.class_token_signal
        class_picks = rng.integers(0, spec.class_vocab_size, n_tokens)
        noise_picks = rng.integers(0, spec.noise_vocab_size, n_tokens)
        tokens = [
            f"k{leaf.render()}x{class_picks[j]}" if signal[j] else f"n{noise_picks[j]}"
            for j in range(n_tokens)
        ]
        codes = [leaf]
        if spec.multi_code_rate > 0 and rng.random() < spec.multi_code_rate:
            other = int(rng.choice(len(leaves), p=probs))
            if other != leaf_idx:
                codes.append(leaves[other])
        docs.append(
            LabeledDocument(
                id=f"{spec.source}-{i:06d}",
                text=" ".join(tokens),
                codes=tuple(codes),
                source=spec.source,
                weight=1.0,
            )
        )
    return docs


def uniform_tree_codes(branching: tuple[int, ...]) -> tuple[list[str], tuple[int, ...]]:
    """Full-depth codes of a uniform tree with the given per-level fanout.

    Returns (codes, segment_lengths); each level's segment is zero-padded
    to the width its fanout needs.
    """
    if not branching or any(b < 1 for b in branching):
        raise InvalidSpec(f"bad branching {branching}")
    widths = tuple(len(str(b - 1)) for b in branching)
    codes = [""]
    for b, w in zip(branching, widths):
        codes = [c + f"{i:0{w}d}" for c in codes for i in range(b)]
    return codes, widths


# Published level structure of the 2023 KZiS occupation classification:
# per major group, the number of sub-major groups, minor groups, unit
# groups, and 6-digit occupation codes.
KZIS_GROUP_STRUCTURE: dict[str, tuple[int, int, int, int]] = {
    "0": (3, 3, 3, 3),
    "1": (4, 11, 31, 202),
    "2": (6, 31, 99, 789),
    "3": (5, 20, 87, 610),
    "4": (4, 8, 27, 89),
    "5": (4, 13, 39, 166),
    "6": (3, 9, 17, 63),
    "7": (5, 14, 69, 476),
    "8": (3, 14, 41, 387),
    "9": (6, 11, 32, 126),
}

KZIS_SEGMENT_LENGTHS = (1, 1, 1, 1, 2)


def _spread(total: int, buckets: int) -> list[int]:
    """Split `total` into `buckets` near-equal positive parts, larger first."""
    base, extra = divmod(total, buckets)
    return [base + 1 if i < extra else base for i in range(buckets)]


def kzis_structure_codes() -> list[str]:
    """A deterministic 6-digit code list with the exact KZiS level structure.

    The real dictionary assigns meaningful digits; here children are simply
    numbered consecutively, but the per-group counts at every level match
    the published classification, giving level sizes (10, 43, 134, 445,
    2911).
    """
    codes = []
    for group, (n_sub, n_minor, n_unit, n_six) in sorted(KZIS_GROUP_STRUCTURE.items()):
        subs = [f"{group}{i + 1}" for i in range(n_sub)]
        minors = [
            f"{sub}{i + 1}"
            for sub, count in zip(subs, _spread(n_minor, n_sub))
            for i in range(count)
        ]
        units = [
            f"{minor}{i + 1}"
            for minor, count in zip(minors, _spread(n_unit, n_minor))
            for i in range(count)
        ]
        codes.extend(
            f"{unit}{i + 1:02d}"
            for unit, count in zip(units, _spread(n_six, n_unit))
            for i in range(count)
        )
    return codes
