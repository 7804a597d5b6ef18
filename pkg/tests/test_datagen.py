from collections import Counter

import numpy as np
import pytest

from hiertax import TrainConfig, build_hierarchy, fit_vocabulary, train_bottom_up, vectorize
from hiertax.datagen import (
    CorpusSpec,
    generate_corpus,
    kzis_structure_codes,
    leaf_probabilities,
    uniform_tree_codes,
)
from hiertax.errors import InvalidSpec
from hiertax.estimators import leaf_marginals_many


@pytest.fixture(scope="module")
def small_tree():
    codes, widths = uniform_tree_codes((2, 3))
    return build_hierarchy(codes, widths)


class TestUniformTreeCodes:
    def test_two_by_three(self):
        codes, widths = uniform_tree_codes((2, 3))
        assert widths == (1, 1)
        assert codes == ["00", "01", "02", "10", "11", "12"]

    def test_wide_level_gets_two_digit_segment(self):
        codes, widths = uniform_tree_codes((12,))
        assert widths == (2,)
        assert len(codes) == 12
        assert codes[0] == "00" and codes[-1] == "11"

    def test_bad_branching(self):
        with pytest.raises(InvalidSpec):
            uniform_tree_codes((0,))


class TestKzisStructure:
    def test_code_count_and_uniqueness(self):
        codes = kzis_structure_codes()
        assert len(codes) == 2911
        assert len(set(codes)) == 2911
        assert all(len(c) == 6 and c.isdigit() for c in codes)


class TestGenerateCorpus:
    def test_deterministic_under_seed(self, small_tree):
        spec = CorpusSpec(tree=small_tree, total_docs=50, seed=3)
        a = generate_corpus(spec)
        b = generate_corpus(spec)
        assert [(d.id, d.text, d.codes) for d in a] == [(d.id, d.text, d.codes) for d in b]

    def test_different_seed_differs(self, small_tree):
        a = generate_corpus(CorpusSpec(tree=small_tree, total_docs=50, seed=3))
        b = generate_corpus(CorpusSpec(tree=small_tree, total_docs=50, seed=4))
        assert [d.text for d in a] != [d.text for d in b]

    def test_single_code_by_default(self, small_tree):
        docs = generate_corpus(CorpusSpec(tree=small_tree, total_docs=80, seed=0))
        assert all(len(d.codes) == 1 for d in docs)
        assert all(small_tree.is_leaf(d.codes[0]) for d in docs)

    def test_multi_code_flagged_option(self, small_tree):
        spec = CorpusSpec(tree=small_tree, total_docs=300, seed=0, multi_code_rate=0.5)
        docs = generate_corpus(spec)
        assert any(len(d.codes) == 2 for d in docs)

    def test_flat_exponent_near_uniform_counts(self, small_tree):
        spec = CorpusSpec(tree=small_tree, total_docs=30_000, tail_exponent=0.0, seed=2)
        counts = Counter(d.codes[0] for d in generate_corpus(spec))
        values = [counts[c] for c in small_tree.leaves]
        assert max(values) / min(values) <= 1.1

    def test_programmed_frequencies_non_increasing(self, small_tree):
        probs = leaf_probabilities(CorpusSpec(tree=small_tree, total_docs=10, tail_exponent=1.3))
        assert np.all(np.diff(probs) <= 0)
        assert probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_signal_one_uses_only_class_tokens(self, small_tree):
        spec = CorpusSpec(tree=small_tree, total_docs=40, class_token_signal=1.0, seed=1)
        for doc in generate_corpus(spec):
            prefix = f"k{doc.codes[0].render()}x"
            assert all(tok.startswith(prefix) for tok in doc.text.split())

    def test_signal_zero_uses_only_noise_tokens(self, small_tree):
        spec = CorpusSpec(tree=small_tree, total_docs=40, class_token_signal=0.0, seed=1)
        for doc in generate_corpus(spec):
            assert all(tok.startswith("n") for tok in doc.text.split())

    def test_token_count_in_range(self, small_tree):
        spec = CorpusSpec(tree=small_tree, total_docs=60, tokens_per_doc=(3, 5), seed=6)
        for doc in generate_corpus(spec):
            assert 3 <= len(doc.text.split()) <= 5

    def test_invalid_specs(self, small_tree):
        with pytest.raises(InvalidSpec):
            CorpusSpec(tree=small_tree, total_docs=0)
        with pytest.raises(InvalidSpec):
            CorpusSpec(tree=small_tree, total_docs=1, tail_exponent=-0.1)
        with pytest.raises(InvalidSpec):
            CorpusSpec(tree=small_tree, total_docs=1, tokens_per_doc=(5, 2))
        with pytest.raises(InvalidSpec):
            CorpusSpec(tree=small_tree, total_docs=1, class_token_signal=1.5)
        with pytest.raises(InvalidSpec):
            CorpusSpec(tree=small_tree, total_docs=1, multi_code_rate=1.0)

    def test_full_signal_corpus_is_separable(self):
        codes, widths = uniform_tree_codes((5, 6))
        tree = build_hierarchy(codes, widths)
        spec = CorpusSpec(tree=tree, total_docs=1200, class_token_signal=1.0, seed=11)
        docs = generate_corpus(spec)
        tfidf = fit_vocabulary((d.text for d in docs), min_df=1)
        est = train_bottom_up(
            tree, docs, tfidf,
            TrainConfig(learning_rate=0.1, epochs=5, batch_size=64, warmup_steps=0),
        )
        vecs = [vectorize(tfidf, d.text) for d in docs]
        leaf_index = {c: i for i, c in enumerate(tree.leaves)}
        truth = np.array([leaf_index[d.codes[0]] for d in docs])
        predictions = np.argmax(leaf_marginals_many(est, vecs), axis=1)
        assert (predictions == truth).mean() >= 0.99
