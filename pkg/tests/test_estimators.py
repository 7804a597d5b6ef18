import itertools

import numpy as np
import pytest

from hiertax import (
    ClassCode,
    LabeledDocument,
    TrainConfig,
    build_hierarchy,
    estimate,
    fit_vocabulary,
    predict_path,
    predict_proba,
    top_k,
    train_bottom_up,
    train_softmax,
    train_top_down,
    vectorize,
)
from hiertax.datagen import CorpusSpec, generate_corpus, uniform_tree_codes
from hiertax.errors import EmptyTrainingSet, LevelOutOfRange, MalformedCode, NonLeafLabel
from hiertax.estimators import leaf_marginals_many, profile_from_vector

from helpers import profile_from_leaf_probs, rigged_bottom_up, rigged_top_down

FIG1_LEAF_PROBS = (0.5, 0.2, 0.1, 0.05, 0.05, 0.1)  # leaves 00,01,02,10,11,12


def code(text: str, widths=(1, 1)) -> ClassCode:
    return ClassCode.parse(text, widths)


def one_doc_per_leaf(tree):
    return [
        LabeledDocument(id=f"d{i}", text=f"tok{c.render()}", codes=(c,))
        for i, c in enumerate(tree.leaves)
    ]


class TestTrainBottomUp:
    def test_separable_per_leaf_recall(self, fig1_tree):
        docs = one_doc_per_leaf(fig1_tree)
        tfidf = fit_vocabulary((d.text for d in docs), min_df=1)
        est = train_bottom_up(fig1_tree, docs, tfidf, TrainConfig(learning_rate=0.1, warmup_steps=0))
        for doc in docs:
            path = predict_path(estimate(est, doc.text))
            assert path[-1] == doc.codes[0]

    def test_zero_epochs_uniform_leaves(self, fig1_tree):
        docs = one_doc_per_leaf(fig1_tree)
        tfidf = fit_vocabulary((d.text for d in docs), min_df=1)
        est = train_bottom_up(fig1_tree, docs, tfidf, TrainConfig(epochs=0))
        profile = estimate(est, "anything")
        for p in profile.level(2).values():
            assert p == pytest.approx(1 / 6, abs=1e-12)
        level1 = profile.level(1)
        assert level1[code("0")] == pytest.approx(0.5, abs=1e-12)
        assert level1[code("1")] == pytest.approx(0.5, abs=1e-12)

    def test_internal_code_label_rejected(self, fig1_tree):
        docs = [LabeledDocument(id="bad", text="x", codes=(code("0", (1,)),))]
        tfidf = fit_vocabulary(["x"], min_df=1)
        with pytest.raises(NonLeafLabel):
            train_bottom_up(fig1_tree, docs, tfidf, TrainConfig())

    def test_empty_training_set(self, fig1_tree):
        tfidf = fit_vocabulary(["x"], min_df=1)
        with pytest.raises(EmptyTrainingSet):
            train_bottom_up(fig1_tree, [], tfidf, TrainConfig())

    def test_multi_code_docs_expand_per_code(self, fig1_tree):
        doc = LabeledDocument(id="m", text="tok", codes=(code("00"), code("01")))
        tfidf = fit_vocabulary(["tok"], min_df=1)
        config = TrainConfig(epochs=2, seed=9)
        est = train_bottom_up(fig1_tree, [doc], tfidf, config)
        # oracle: the flat softmax trained on the expanded example list
        vec = vectorize(tfidf, "tok")
        flat = train_softmax([(vec, 0), (vec, 1)], fig1_tree.leaves, config, width=tfidf.width)
        assert np.array_equal(est.leaf_model.weights, flat.weights)

    def test_flat_softmax_equivalence_bitwise(self, fig1_tree):
        docs = one_doc_per_leaf(fig1_tree) * 3
        docs = [LabeledDocument(id=f"d{i}", text=d.text, codes=d.codes) for i, d in enumerate(docs)]
        tfidf = fit_vocabulary((d.text for d in docs), min_df=1)
        config = TrainConfig(learning_rate=0.05, epochs=4, seed=17)
        est = train_bottom_up(fig1_tree, docs, tfidf, config)

        leaf_index = {c: i for i, c in enumerate(fig1_tree.leaves)}
        examples = [
            (vectorize(tfidf, d.text), leaf_index[d.codes[0]]) for d in docs
        ]
        flat = train_softmax(examples, fig1_tree.leaves, config, width=tfidf.width)
        assert np.array_equal(est.leaf_model.weights, flat.weights)
        assert np.array_equal(est.leaf_model.bias, flat.bias)
        for doc in docs[:4]:
            vec = vectorize(tfidf, doc.text)
            leaf_level = profile_from_vector(est, vec).level(2)
            flat_probs = predict_proba(flat, vec)
            for c, p in zip(fig1_tree.leaves, flat_probs):
                assert leaf_level[c] == p  # bitwise


class TestTrainTopDown:
    def test_fig1_node_model_structure(self, fig1_tree):
        docs = one_doc_per_leaf(fig1_tree)
        tfidf = fit_vocabulary((d.text for d in docs), min_df=1)
        est = train_top_down(fig1_tree, docs, tfidf, TrainConfig(epochs=1))
        assert len(est.node_models) == 3
        sizes = {node.render(): model.n_classes for node, model in est.node_models.items()}
        assert sizes == {"": 2, "0": 3, "1": 3}

    def test_unreached_node_predicts_uniform(self, fig1_tree):
        docs = [
            LabeledDocument(id="a", text="alfa", codes=(code("00"),)),
            LabeledDocument(id="b", text="beta", codes=(code("01"),)),
        ]
        tfidf = fit_vocabulary((d.text for d in docs), min_df=1)
        est = train_top_down(fig1_tree, docs, tfidf, TrainConfig(learning_rate=0.1))
        node_one = code("1", (1,))
        probs = predict_proba(est.node_models[node_one], vectorize(tfidf, "alfa"))
        np.testing.assert_allclose(probs, np.full(3, 1 / 3), atol=0)

    def test_single_child_probability_exactly_one(self):
        tree = build_hierarchy(["11", "21", "22"], (1, 1))
        docs = [
            LabeledDocument(id="a", text="solo", codes=(code("11"),)),
            LabeledDocument(id="b", text="left", codes=(code("21"),)),
            LabeledDocument(id="c", text="right", codes=(code("22"),)),
        ]
        tfidf = fit_vocabulary((d.text for d in docs), min_df=1)
        est = train_top_down(tree, docs, tfidf, TrainConfig(learning_rate=0.1))
        profile = estimate(est, "solo")
        assert profile.level(2)[code("11")] == profile.level(1)[code("1", (1,))]
        probs = predict_proba(est.node_models[code("1", (1,))], vectorize(tfidf, "solo"))
        assert probs[0] == 1.0

    def test_dead_end_internal_code_rejected(self):
        tree = build_hierarchy(["00", "01", "1"], (1, 1))
        docs = [LabeledDocument(id="a", text="x", codes=(code("00"),))]
        tfidf = fit_vocabulary(["x"], min_df=1)
        with pytest.raises(MalformedCode):
            train_top_down(tree, docs, tfidf, TrainConfig())

    def test_bottom_up_tolerates_dead_end_internal_code(self):
        tree = build_hierarchy(["00", "01", "1"], (1, 1))
        docs = [
            LabeledDocument(id="a", text="x", codes=(code("00"),)),
            LabeledDocument(id="b", text="y", codes=(code("01"),)),
        ]
        tfidf = fit_vocabulary(["x", "y"], min_df=1)
        est = train_bottom_up(tree, docs, tfidf, TrainConfig(epochs=1))
        profile = estimate(est, "x")
        assert profile.is_coherent()
        assert profile.level(1)[code("1", (1,))] == 0.0


class TestEstimate:
    def test_bottom_up_ancestor_sums(self, fig1_tree):
        est = rigged_bottom_up(fig1_tree, FIG1_LEAF_PROBS)
        profile = estimate(est, "")
        assert profile.level(1)[code("0")] == pytest.approx(0.8, abs=1e-9)
        assert profile.level(1)[code("1")] == pytest.approx(0.2, abs=1e-9)

    def test_top_down_chain_rule_products(self, fig1_tree):
        est = rigged_top_down(
            fig1_tree, {"": (0.6, 0.4), "0": (0.5, 0.3, 0.2)}
        )
        profile = estimate(est, "")
        assert profile.level(2)[code("00")] == pytest.approx(0.30, abs=1e-9)
        assert profile.level(2)[code("01")] == pytest.approx(0.18, abs=1e-9)
        assert profile.level(2)[code("02")] == pytest.approx(0.12, abs=1e-9)

    def test_levels_sum_to_one_for_any_text(self, fig1_tree):
        docs = one_doc_per_leaf(fig1_tree)
        tfidf = fit_vocabulary((d.text for d in docs), min_df=1)
        for trainer in (train_bottom_up, train_top_down):
            est = trainer(fig1_tree, docs, tfidf, TrainConfig(epochs=2))
            for text in ("tok00", "tok11 tok12", "", "unseen words only"):
                profile = estimate(est, text)
                assert profile.is_coherent(1e-6)

    def test_top_down_product_equals_independent_recompute(self):
        codes_list, widths = uniform_tree_codes((3, 3, 2))
        tree = build_hierarchy(codes_list, widths)
        spec = CorpusSpec(tree=tree, total_docs=300, class_token_signal=0.7, seed=5)
        docs = generate_corpus(spec)
        tfidf = fit_vocabulary((d.text for d in docs), min_df=1)
        est = train_top_down(tree, docs, tfidf, TrainConfig(learning_rate=0.05, epochs=3))
        for doc in docs[:10]:
            vec = vectorize(tfidf, doc.text)
            profile = profile_from_vector(est, vec)
            node_probs = {
                node: predict_proba(est.node_models[node], vec)
                for node in tree.internal_nodes()
            }
            for leaf in tree.leaves:
                product = 1.0
                for ancestor in tree.ancestor_path(leaf):
                    parent = tree.parent(ancestor)
                    j = tree.children(parent).index(ancestor)
                    product *= node_probs[parent][j]
                assert abs(profile.level(tree.level_count)[leaf] - product) <= 1e-9

    def test_leaf_marginals_match_profiles(self, fig1_tree):
        docs = one_doc_per_leaf(fig1_tree)
        tfidf = fit_vocabulary((d.text for d in docs), min_df=1)
        for trainer in (train_bottom_up, train_top_down):
            est = trainer(fig1_tree, docs, tfidf, TrainConfig(epochs=2))
            vecs = [vectorize(tfidf, d.text) for d in docs]
            marginals = leaf_marginals_many(est, vecs)
            for row, vec in zip(marginals, vecs):
                leaf_level = profile_from_vector(est, vec).level(2)
                for j, leaf in enumerate(fig1_tree.leaves):
                    assert row[j] == pytest.approx(leaf_level[leaf], abs=1e-12)


class TestPredictPath:
    def test_leaf_argmax_example(self, fig1_tree):
        profile = profile_from_leaf_probs(fig1_tree, FIG1_LEAF_PROBS)
        path = predict_path(profile, "leaf_argmax")
        assert [c.render() for c in path] == ["0", "00"]

    def test_uniform_profile_ties_to_smallest_path(self, fig1_tree):
        profile = profile_from_leaf_probs(fig1_tree, [1 / 6] * 6)
        for mode in ("leaf_argmax", "greedy"):
            path = predict_path(profile, mode)
            assert [c.render() for c in path] == ["0", "00"]

    def test_greedy_and_leaf_argmax_can_differ_but_stay_consistent(self, fig1_tree):
        # brute-force search over a probability grid for a profile whose
        # level-1 marginal argmax disagrees with the best leaf's branch
        found = None
        grid = [g / 20 for g in range(21)]
        for a, b, c in itertools.product(grid, repeat=3):
            rest = 1.0 - (a + b + c)
            if rest < 0 or rest > 1:
                continue
            leaf_probs = (a, b, c, rest, 0.0, 0.0)
            if a + b + c <= 0.5 or max(leaf_probs[:3]) >= rest:
                continue
            found = leaf_probs
            break
        assert found is not None
        profile = profile_from_leaf_probs(fig1_tree, found)
        greedy = predict_path(profile, "greedy")
        argmax = predict_path(profile, "leaf_argmax")
        assert greedy != argmax
        for path in (greedy, argmax):
            assert len(path) == 2
            assert path[1].extends(path[0])

    def test_tie_break_is_deterministic(self, fig1_tree):
        profile = profile_from_leaf_probs(fig1_tree, [1 / 6] * 6)
        paths = {tuple(predict_path(profile)) for _ in range(5)}
        assert len(paths) == 1


class TestTopK:
    @pytest.fixture()
    def profile(self, fig1_tree):
        return profile_from_leaf_probs(fig1_tree, FIG1_LEAF_PROBS)

    def test_level_one_top_one(self, profile):
        assert top_k(profile, 1, 1) == [(code("0", (1,)), pytest.approx(0.8, abs=1e-12))]

    def test_k_larger_than_level_returns_full_level(self, profile):
        result = top_k(profile, 1, 10)
        assert [c.render() for c, _ in result] == ["0", "1"]

    def test_leaf_level_top_two(self, profile):
        result = top_k(profile, 2, 2)
        assert [(c.render(), p) for c, p in result] == [("00", 0.5), ("01", 0.2)]

    def test_ties_break_by_code_order(self, fig1_tree):
        profile = profile_from_leaf_probs(fig1_tree, [0.2, 0.2, 0.2, 0.2, 0.1, 0.1])
        result = top_k(profile, 2, 3)
        assert [c.render() for c, _ in result] == ["00", "01", "02"]

    def test_level_out_of_range(self, profile):
        with pytest.raises(LevelOutOfRange):
            top_k(profile, 3, 1)

    def test_bad_k(self, profile):
        with pytest.raises(ValueError):
            top_k(profile, 1, 0)
