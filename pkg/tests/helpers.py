"""Shared test utilities: rigged estimators, direct profile builders, oracles."""

import numpy as np

from hiertax import TfidfModel, TrainConfig, build_hierarchy, fit_vocabulary
from hiertax.estimators import HierarchicalEstimator, ProbabilityProfile
from hiertax.hierarchy import HierarchyTree
from hiertax.linear import SoftmaxModel


def minimal_tfidf() -> TfidfModel:
    return fit_vocabulary(["placeholder"], min_df=1)


def bias_model(class_list, probs, width=1) -> SoftmaxModel:
    """Zero-weight softmax whose bias reproduces the given distribution."""
    probs = np.asarray(probs, dtype=np.float64)
    return SoftmaxModel(
        class_list=tuple(class_list),
        weights=np.zeros((len(probs), width)),
        bias=np.log(probs),
        config=TrainConfig(),
    )


def rigged_bottom_up(tree: HierarchyTree, leaf_probs) -> HierarchicalEstimator:
    """Bottom-up estimator that outputs the given leaf distribution on any text."""
    tfidf = minimal_tfidf()
    return HierarchicalEstimator(
        mode="bottom_up",
        tree=tree,
        tfidf=tfidf,
        leaf_model=bias_model(tree.leaves, leaf_probs, width=tfidf.width),
    )


def rigged_top_down(tree: HierarchyTree, conditionals: dict) -> HierarchicalEstimator:
    """Top-down estimator with fixed node conditionals.

    ``conditionals`` maps a rendered node code ("" for the root) to the
    distribution over that node's children; unlisted nodes get uniform.
    """
    tfidf = minimal_tfidf()
    node_models = {}
    for node in tree.internal_nodes():
        kids = tree.children(node)
        probs = conditionals.get(node.render(), np.full(len(kids), 1.0 / len(kids)))
        node_models[node] = bias_model(kids, probs, width=tfidf.width)
    return HierarchicalEstimator(
        mode="top_down", tree=tree, tfidf=tfidf, node_models=node_models
    )


def profile_from_leaf_probs(tree: HierarchyTree, leaf_probs) -> ProbabilityProfile:
    """Build a coherent profile directly by summing leaf mass upward."""
    levels = tuple(
        {code: 0.0 for code in tree.level_nodes(l)}
        for l in range(1, tree.level_count + 1)
    )
    for code, p in zip(tree.leaves, leaf_probs):
        levels[tree.level_count - 1][code] = float(p)
    for l in range(tree.level_count - 1, 0, -1):
        for code, p in levels[l].items():
            levels[l - 1][code.prefix(l)] += p
    return ProbabilityProfile(tree=tree, levels=levels)


def flat_tree(n_leaves: int) -> HierarchyTree:
    """Single-level tree with the given number of leaves."""
    width = len(str(n_leaves - 1))
    return build_hierarchy([f"{i:0{width}d}" for i in range(n_leaves)], (width,))


def numeric_grad(f, arr, eps=1e-5):
    """Central finite differences of a scalar function of an array."""
    grad = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        orig = arr[idx]
        arr[idx] = orig + eps
        up = f()
        arr[idx] = orig - eps
        down = f()
        arr[idx] = orig
        grad[idx] = (up - down) / (2 * eps)
        it.iternext()
    return grad
