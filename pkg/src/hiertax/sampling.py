"""Deterministic stratified sampling and train/test construction.

The per-stratum sample size is ``max{1, round_half_up(fraction * N_h)}``
with simple random sampling without replacement inside each stratum.
Sizes are computed in exact rational arithmetic (the fraction is taken at
its decimal-literal value), so "matches the formula" is well defined even
where binary floats would round the wrong way.

The train/test split stratifies by (source, leaf code): singleton strata
go wholly to test, larger strata keep at least one case on each side, and
documents from the always-train sources (official dictionary, thesaurus)
are appended wholly to the training set.

Every stratum draws from its own generator seeded by (seed, stratum key),
so strata are independent and the procedure is reproducible and
parallelizable.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .documents import LabeledDocument
from .errors import EmptyInput

StrataKey = Callable[[LabeledDocument], str | tuple]

# character-count bins used for stratifying ad descriptions by length
CHAR_BIN_THRESHOLDS = (50, 100, 200, 300, 400, 500)


def char_bin(text: str, thresholds: Sequence[int] = CHAR_BIN_THRESHOLDS) -> str:
    """Label of the character-count bin a text falls into."""
    n = len(text)
    lower = 0
    for t in thresholds:
        if n <= t:
            return f"[0,{t}]" if lower == 0 else f"({lower},{t}]"
        lower = t
    return f">{thresholds[-1]}"


def by_source(doc: LabeledDocument) -> str:
    return doc.source


def by_code(doc: LabeledDocument) -> str:
    return doc.codes[0].render()


def by_char_bin(doc: LabeledDocument) -> str:
    return char_bin(doc.text)


def composite_key(*keys: StrataKey) -> StrataKey:
    def key(doc: LabeledDocument) -> tuple:
        return tuple(k(doc) for k in keys)

    return key


def _canonical(key: str | tuple) -> str:
    if isinstance(key, tuple):
        return json.dumps(list(key), ensure_ascii=False)
    return str(key)


def _stratum_rng(seed: int, key: str) -> np.random.Generator:
    digest = int.from_bytes(
        hashlib.sha256(f"{seed}\x1f{key}".encode("utf-8")).digest()[:16], "big"
    )
    return np.random.default_rng([seed, digest])


def round_half_up(x: Fraction) -> int:
    """Round half away from zero, exact over rationals."""
    if x >= 0:
        return math.floor(x + Fraction(1, 2))
    return -math.floor(-x + Fraction(1, 2))


def exact_fraction(value: float | str | Fraction) -> Fraction:
    """The rational value of a fraction given as a decimal literal."""
    if isinstance(value, Fraction):
        return value
    return Fraction(str(value))


def stratum_sample_size(fraction: Fraction, n_h: int) -> int:
    return max(1, round_half_up(fraction * n_h))


def _group(
    docs: Sequence[LabeledDocument], strata_key: StrataKey
) -> dict[str, list[LabeledDocument]]:
    groups: dict[str, list[LabeledDocument]] = {}
    for doc in docs:
        groups.setdefault(_canonical(strata_key(doc)), []).append(doc)
    return groups


def _draw(
    members: list[LabeledDocument], size: int, rng: np.random.Generator
) -> set[str]:
    ordered = sorted(members, key=lambda d: d.id)
    picked = rng.choice(len(ordered), size=size, replace=False)
    return {ordered[i].id for i in picked}


def stratified_sample(
    docs: Sequence[LabeledDocument],
    strata_key: StrataKey,
    fraction: float,
    seed: int = 0,
) -> list[LabeledDocument]:
    """Simple random sample of max{1, round_half_up(f*N_h)} per stratum."""
    if not docs:
        raise EmptyInput("no documents to sample")
    frac = exact_fraction(fraction)
    if not 0 < frac <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    selected: set[str] = set()
    for key, members in _group(docs, strata_key).items():
        size = stratum_sample_size(frac, len(members))
        selected |= _draw(members, size, _stratum_rng(seed, key))
    return [d for d in docs if d.id in selected]


def sample_manifest(
    docs: Sequence[LabeledDocument],
    strata_key: StrataKey,
    fraction: float,
    seed: int = 0,
) -> dict:
    """Per-stratum population and sample sizes for the sampling rule."""
    frac = exact_fraction(fraction)
    strata = {
        key: {"N": len(members), "n": stratum_sample_size(frac, len(members))}
        for key, members in sorted(_group(docs, strata_key).items())
    }
    return {
        "seed": seed,
        "fraction": str(frac),
        "strata": strata,
        "population": len(docs),
        "sample": sum(s["n"] for s in strata.values()),
    }


@dataclass
class SplitResult:
    train: list[LabeledDocument]
    test: list[LabeledDocument]
    manifest: dict


def train_test_split(
    docs: Sequence[LabeledDocument],
    always_train_sources: Iterable[str] = (),
    train_fraction: float = 0.7,
    seed: int = 0,
) -> SplitResult:
    """Stratified split by (source, leaf code) with singleton strata in test.

    Strata with more than one case send round_half_up(f*N_h) cases to
    train, clamped so both sides keep at least one.  Documents from the
    always-train sources bypass the strata entirely and are appended to
    the training set.
    """
    if not docs:
        raise EmptyInput("no documents to split")
    frac = exact_fraction(train_fraction)
    if not 0 < frac < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    always = set(always_train_sources)

    fixed_train = [d for d in docs if d.source in always]
    eligible = [d for d in docs if d.source not in always]

    train_ids: set[str] = set()
    strata_info: dict[str, dict] = {}
    key = composite_key(by_source, by_code)
    for stratum, members in _group(eligible, key).items():
        n_h = len(members)
        if n_h == 1:
            n_train = 0
        else:
            n_train = min(max(round_half_up(frac * n_h), 1), n_h - 1)
            train_ids |= _draw(members, n_train, _stratum_rng(seed, stratum))
        strata_info[stratum] = {"N": n_h, "n_train": n_train, "n_test": n_h - n_train}

    train = fixed_train + [d for d in eligible if d.id in train_ids]
    test = [d for d in eligible if d.id not in train_ids]
    manifest = {
        "seed": seed,
        "train_fraction": str(frac),
        "always_train_sources": sorted(always),
        "always_train_count": len(fixed_train),
        "strata": dict(sorted(strata_info.items())),
        "train_count": len(train),
        "test_count": len(test),
        "input_count": len(docs),
    }
    return SplitResult(train=train, test=test, manifest=manifest)
