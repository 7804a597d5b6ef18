"""Coherency-preserving hierarchical probability estimators.

Two classical constructions over a prefix-code tree, both built from the
softmax primitive in :mod:`hiertax.linear`:

* ``bottom_up`` trains a single softmax over all leaves and reconstructs
  every ancestor's probability as the sum of its children's, level by
  level up to the root.
* ``top_down`` (hierarchical softmax) trains one softmax per internal
  node over that node's children; the probability of any code is the
  chain-rule product of the node conditionals along its path.

Both therefore produce per-level distributions that sum to one and in
which each parent's mass equals the sum of its children's, by
construction rather than by post-hoc repair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .documents import LabeledDocument
from .errors import EmptyTrainingSet, LevelOutOfRange, MalformedCode, NonLeafLabel
from .features import SparseVector, TfidfModel, vectorize
from .hierarchy import ClassCode, HierarchyTree
from .linear import (
    SoftmaxModel,
    TrainConfig,
    predict_proba,
    predict_proba_many,
    train_softmax,
)

Mode = Literal["bottom_up", "top_down"]
DecodeMode = Literal["leaf_argmax", "greedy"]


@dataclass
class ProbabilityProfile:
    """Per-level probability maps for one document.

    ``levels[l - 1]`` maps every code of level ``l`` to its probability;
    codes with no leaf descendants carry 0.
    """

    tree: HierarchyTree
    levels: tuple[dict[ClassCode, float], ...]

    def level(self, level: int) -> dict[ClassCode, float]:
        if not 1 <= level <= len(self.levels):
            raise LevelOutOfRange(f"level {level} outside 1..{len(self.levels)}")
        return self.levels[level - 1]

    def probability(self, code: ClassCode) -> float:
        return self.levels[code.level - 1].get(code, 0.0)

    def coherency_violation(self, tol: float = 1e-6) -> str | None:
        """Description of the first violated coherency relation, or None."""
        for l, level_map in enumerate(self.levels, start=1):
            total = sum(level_map.values())
            if abs(total - 1.0) > tol:
                return f"level {l} sums to {total!r}"
            for code, p in level_map.items():
                if not -tol <= p <= 1.0 + tol:
                    return f"probability of {code} is {p!r}"
        for l in range(1, len(self.levels)):
            for code, p in self.levels[l - 1].items():
                kids = self.tree.children(code)
                if kids:
                    child_sum = sum(self.levels[l][k] for k in kids)
                    if abs(child_sum - p) > tol:
                        return (
                            f"node {code}: parent mass {p!r} != child sum {child_sum!r}"
                        )
        return None

    def is_coherent(self, tol: float = 1e-6) -> bool:
        return self.coherency_violation(tol) is None


@dataclass
class HierarchicalEstimator:
    """A trained bottom-up or top-down estimator over one tree."""

    mode: Mode
    tree: HierarchyTree
    tfidf: TfidfModel
    leaf_model: SoftmaxModel | None = None
    node_models: dict[ClassCode, SoftmaxModel] | None = None

    def estimate(self, text: str) -> ProbabilityProfile:
        return estimate(self, text)


def _leaf_examples(
    tree: HierarchyTree,
    documents: Sequence[LabeledDocument],
    vectors: Sequence[SparseVector],
) -> list[tuple[SparseVector, ClassCode]]:
    """Expand multi-code documents into one (vector, leaf) example per code."""
    examples = []
    for doc, vec in zip(documents, vectors):
        for code in doc.codes:
            if not tree.is_leaf(code):
                raise NonLeafLabel(
                    f"document {doc.id!r} labeled with non-leaf code {code}"
                )
            examples.append((vec, code))
    return examples


def _require_grounded(tree: HierarchyTree) -> None:
    # A childless node above full depth makes chain-rule mass vanish before
    # the last level, so top-down profiles could not stay coherent.
    for level in range(1, tree.level_count):
        for code in tree.level_nodes(level):
            if not tree.children(code):
                raise MalformedCode(
                    f"taxonomy has dead-end internal code {code}; top-down "
                    "training needs every branch to reach full depth"
                )


def train_bottom_up(
    tree: HierarchyTree,
    documents: Sequence[LabeledDocument],
    tfidf: TfidfModel,
    config: TrainConfig,
) -> HierarchicalEstimator:
    """Single softmax over all leaves, trained on full-depth labels."""
    if not documents:
        raise EmptyTrainingSet("no training documents")
    vectors = [vectorize(tfidf, d.text) for d in documents]
    leaf_index = {code: i for i, code in enumerate(tree.leaves)}
    examples = [
        (vec, leaf_index[code])
        for vec, code in _leaf_examples(tree, documents, vectors)
    ]
    model = train_softmax(examples, tree.leaves, config, width=tfidf.width)
    return HierarchicalEstimator(
        mode="bottom_up", tree=tree, tfidf=tfidf, leaf_model=model
    )


def train_top_down(
    tree: HierarchyTree,
    documents: Sequence[LabeledDocument],
    tfidf: TfidfModel,
    config: TrainConfig,
) -> HierarchicalEstimator:
    """One softmax per internal node, each over that node's children.

    A node's training set consists of every document whose label path
    passes through it, labeled by the next code segment.  Nodes reached
    by no document keep zero-initialized weights and therefore predict
    the uniform distribution over their children; single-child nodes
    predict that child with probability exactly 1.
    """
    if not documents:
        raise EmptyTrainingSet("no training documents")
    _require_grounded(tree)
    vectors = [vectorize(tfidf, d.text) for d in documents]
    leaf_pairs = _leaf_examples(tree, documents, vectors)

    per_node: dict[ClassCode, list[tuple[SparseVector, int]]] = {
        node: [] for node in tree.internal_nodes()
    }
    child_index: dict[ClassCode, dict[ClassCode, int]] = {
        node: {c: i for i, c in enumerate(tree.children(node))} for node in per_node
    }
    for vec, code in leaf_pairs:
        for level in range(code.level):
            node = code.prefix(level) if level else tree.root
            child = code.prefix(level + 1)
            per_node[node].append((vec, child_index[node][child]))

    node_models: dict[ClassCode, SoftmaxModel] = {}
    for node, examples in per_node.items():
        children = tree.children(node)
        if examples and len(children) > 1:
            node_models[node] = train_softmax(
                examples, children, config, width=tfidf.width
            )
        else:
            # untrained: uniform over children (and trivially 1 for a
            # single child), matching the zero-epoch convention
            node_models[node] = SoftmaxModel(
                class_list=children,
                weights=np.zeros((len(children), tfidf.width)),
                bias=np.zeros(len(children)),
                config=config,
            )
    return HierarchicalEstimator(
        mode="top_down", tree=tree, tfidf=tfidf, node_models=node_models
    )


# -- inference -----------------------------------------------------------


def _empty_levels(tree: HierarchyTree) -> tuple[dict[ClassCode, float], ...]:
    return tuple({code: 0.0 for code in tree.level_nodes(l)} for l in range(1, tree.level_count + 1))


def profile_from_vector(
    est: HierarchicalEstimator, vec: SparseVector
) -> ProbabilityProfile:
    """Per-level coherent distributions for one feature vector."""
    tree = est.tree
    levels = _empty_levels(tree)
    if est.mode == "bottom_up":
        probs = predict_proba(est.leaf_model, vec)
        leaf_level = levels[tree.level_count - 1]
        for code, p in zip(tree.leaves, probs):
            leaf_level[code] = float(p)
        for l in range(tree.level_count - 1, 0, -1):
            upper = levels[l - 1]
            for code, p in levels[l].items():
                upper[code.prefix(l)] += p
    else:
        mass: dict[ClassCode, float] = {tree.root: 1.0}
        for node in tree.internal_nodes():
            conditionals = predict_proba(est.node_models[node], vec)
            parent_mass = mass[node]
            for child, q in zip(tree.children(node), conditionals):
                value = parent_mass * float(q)
                mass[child] = value
                levels[child.level - 1][child] = value
    return ProbabilityProfile(tree=tree, levels=levels)


def estimate(est: HierarchicalEstimator, text: str) -> ProbabilityProfile:
    return profile_from_vector(est, vectorize(est.tfidf, text))


def estimate_many(
    est: HierarchicalEstimator, texts: Sequence[str]
) -> list[ProbabilityProfile]:
    return [estimate(est, text) for text in texts]


def leaf_marginals_many(
    est: HierarchicalEstimator, vectors: Sequence[SparseVector]
) -> np.ndarray:
    """Leaf-level probabilities for many vectors at once.

    Returns an array of shape (n_vectors, n_leaves) with columns in the
    tree's canonical leaf order.  Faster than building full profiles when
    only the last level matters.
    """
    tree = est.tree
    if est.mode == "bottom_up":
        return predict_proba_many(est.leaf_model, vectors)
    n = len(vectors)
    mass: dict[ClassCode, np.ndarray] = {tree.root: np.ones(n)}
    for node in tree.internal_nodes():
        conditionals = predict_proba_many(est.node_models[node], vectors)
        for j, child in enumerate(tree.children(node)):
            mass[child] = mass[node] * conditionals[:, j]
    out = np.empty((n, len(tree.leaves)))
    for j, leaf in enumerate(tree.leaves):
        out[:, j] = mass[leaf]
    return out


def predict_path(
    profile: ProbabilityProfile, mode: DecodeMode = "leaf_argmax"
) -> list[ClassCode]:
    """Root-to-leaf consistent path; ties break to the smallest code.

    ``leaf_argmax`` picks the most probable leaf and returns its ancestor
    path (the Bayes rule for leaf recall@1).  ``greedy`` descends the tree
    picking the most probable child at each step, the classic
    hierarchical softmax decoding.
    """
    tree = profile.tree
    if mode == "leaf_argmax":
        leaf_level = profile.levels[tree.level_count - 1]
        best = min(leaf_level, key=lambda c: (-leaf_level[c], c))
        return tree.ancestor_path(best)
    if mode == "greedy":
        path: list[ClassCode] = []
        node = tree.root
        while True:
            kids = tree.children(node)
            if not kids:
                return path
            level_map = profile.levels[kids[0].level - 1]
            node = min(kids, key=lambda c: (-level_map.get(c, 0.0), c))
            path.append(node)
    raise ValueError(f"unknown decode mode {mode!r}")


def top_k(
    profile: ProbabilityProfile, level: int, k: int
) -> list[tuple[ClassCode, float]]:
    """The k most probable codes at a level, descending, ties by code order."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    level_map = profile.level(level)
    ranked = sorted(level_map.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]
