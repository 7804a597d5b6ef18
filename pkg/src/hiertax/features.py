"""Sparse TF-IDF features for the linear baseline.

Tokenization is deliberately simple and language-agnostic: lowercase,
Unicode word segmentation, digits kept, punctuation (including the
underscore) dropped.  No stemming or lemmatization is applied, so the
baseline stays reproducible for any language.

The weighting is the smoothed variant: ``idf(t) = ln((N+1)/(df(t)+1)) + 1``
over raw term frequencies, with L2 normalization of each document vector.
Only unigrams are used; the choice is recorded in the model metadata.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCorpus

# Unicode word characters minus the underscore; keeps letters and digits.
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased Unicode word tokens; punctuation dropped, digits kept."""
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class SparseVector:
    """Sorted sparse feature vector; L2 norm is 1 unless the vector is empty."""

    indices: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def is_empty(self) -> bool:
        return len(self.indices) == 0

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2)))

    def to_dense(self, width: int) -> np.ndarray:
        dense = np.zeros(width)
        dense[self.indices] = self.values
        return dense


_EMPTY = SparseVector(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))


@dataclass
class TfidfModel:
    """Fitted vocabulary with smoothed inverse document frequencies."""

    vocabulary: dict[str, int]
    idf: np.ndarray
    min_df: int
    document_count: int
    ngram: str = field(default="unigram")

    @property
    def width(self) -> int:
        return len(self.vocabulary)

    def vocabulary_hash(self) -> str:
        """Stable digest of (token, index, idf) triples, for model sidecars."""
        h = hashlib.sha256()
        for token, index in sorted(self.vocabulary.items()):
            h.update(f"{token}\x1f{index}\x1f{self.idf[index]!r}\n".encode("utf-8"))
        return h.hexdigest()


def fit_vocabulary(corpus: Iterable[str], min_df: int = 2) -> TfidfModel:
    """Fit token document frequencies over a corpus.

    Tokens seen in fewer than ``min_df`` documents are discarded.  Feature
    indices are dense and assigned in sorted token order.
    """
    if min_df < 1:
        raise ValueError(f"min_df must be >= 1, got {min_df}")
    df: Counter[str] = Counter()
    n_docs = 0
    for text in corpus:
        n_docs += 1
        df.update(set(tokenize(text)))
    if n_docs == 0:
        raise EmptyCorpus("cannot fit a vocabulary on an empty corpus")

    kept = sorted(t for t, count in df.items() if count >= min_df)
    vocabulary = {token: i for i, token in enumerate(kept)}
    idf = np.array(
        [math.log((n_docs + 1) / (df[t] + 1)) + 1.0 for t in kept], dtype=np.float64
    )
    return TfidfModel(vocabulary=vocabulary, idf=idf, min_df=min_df, document_count=n_docs)


def vectorize(model: TfidfModel, text: str) -> SparseVector:
    """TF-IDF weights for one document, L2-normalized.

    Out-of-vocabulary tokens are ignored; a document with no in-vocabulary
    token maps to the empty vector.
    """
    counts: Counter[int] = Counter()
    for token in tokenize(text):
        index = model.vocabulary.get(token)
        if index is not None:
            counts[index] += 1
    if not counts:
        return _EMPTY
    indices = np.array(sorted(counts), dtype=np.int64)
    values = np.array([counts[i] for i in indices], dtype=np.float64)
    values *= model.idf[indices]
    values /= np.sqrt(np.sum(values**2))
    return SparseVector(indices=indices, values=values)


def vectorize_many(model: TfidfModel, texts: Sequence[str]) -> list[SparseVector]:
    return [vectorize(model, text) for text in texts]
