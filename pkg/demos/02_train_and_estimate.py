"""
Training the two hierarchical estimators
========================================

Both estimators share one softmax primitive but use it differently:

* bottom-up - one softmax over all leaves; ancestor probabilities are the
  sums of their children's (so the hierarchy is used only at inference).
* top-down - one softmax per internal node; a class's probability is the
  chain-rule product of node conditionals along its path (hierarchical
  softmax).

Either way the per-level distributions are coherent by construction:
each level sums to 1 and every parent equals the sum of its children.
"""

import numpy as np

from hiertax import (
    TrainConfig,
    build_hierarchy,
    estimate,
    fit_vocabulary,
    predict_path,
    top_k,
    train_bottom_up,
    train_top_down,
)
from hiertax.datagen import CorpusSpec, generate_corpus, uniform_tree_codes

# ----------------------------------------------------------------------
# A synthetic long-tail corpus over a 3-level, 60-leaf taxonomy.

codes, widths = uniform_tree_codes((5, 4, 3))
tree = build_hierarchy(codes, widths)
spec = CorpusSpec(tree=tree, total_docs=2000, class_token_signal=0.9, seed=0)
docs = generate_corpus(spec)
print(f"{len(docs)} documents over {len(tree.leaves)} leaves")

tfidf = fit_vocabulary((d.text for d in docs), min_df=2)
print("vocabulary size:", tfidf.width)

config = TrainConfig(learning_rate=0.05, epochs=5, batch_size=64, seed=1)
bottom_up = train_bottom_up(tree, docs, tfidf, config)
top_down = train_top_down(tree, docs, tfidf, config)
print("top-down node models:", len(top_down.node_models))

# ----------------------------------------------------------------------
# Estimating probabilities for one text gives a full per-level profile.

text = docs[0].text
print("\ntrue code:", docs[0].codes[0].render())
for name, est in (("bottom-up", bottom_up), ("top-down", top_down)):
    profile = estimate(est, text)
    assert profile.is_coherent(1e-6)
    path = predict_path(profile, "leaf_argmax")
    print(f"{name:9s} decoded path:", " -> ".join(c.render() for c in path))
    print(f"{name:9s} top-3 leaves:",
          [(c.render(), round(p, 4)) for c, p in top_k(profile, tree.level_count, 3)])

# Level sums stay at 1 whatever the input - even an empty or fully
# out-of-vocabulary text (which falls back to the bias distribution).
profile = estimate(bottom_up, "words the model has never seen")
sums = [sum(profile.level(l).values()) for l in range(1, tree.level_count + 1)]
print("\nlevel sums on unseen text:", np.round(sums, 12))

# Greedy decoding walks the tree level by level instead of committing to
# the best leaf; the two can disagree when a branch is collectively
# strong but has no single strong leaf.
greedy = predict_path(estimate(top_down, text), "greedy")
print("greedy path:", " -> ".join(c.render() for c in greedy))
