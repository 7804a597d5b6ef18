"""
Per-level evaluation
====================

Classification quality is reported separately at every hierarchy level:
log loss measures probability quality, recall@k measures whether the
true code sits among the k most probable ones, and the confusion matrix
shows where mass leaks between groups.  Because decoded paths are
root-to-leaf consistent, exact-match accuracy can only fall with depth.
"""

import numpy as np

from hiertax import TrainConfig, build_hierarchy, fit_vocabulary, train_top_down
from hiertax.datagen import CorpusSpec, generate_corpus, uniform_tree_codes
from hiertax.metrics import confusion_matrix, level_log_loss, path_accuracy, recall_at_k
from hiertax.reporting import build_records, evaluation_report

codes, widths = uniform_tree_codes((5, 4, 3))
tree = build_hierarchy(codes, widths)
spec = CorpusSpec(tree=tree, total_docs=2400, class_token_signal=0.8, seed=7)
docs = generate_corpus(spec)
train_docs, test_docs = docs[:2000], docs[2000:]

tfidf = fit_vocabulary((d.text for d in train_docs), min_df=2)
est = train_top_down(tree, train_docs, tfidf,
                     TrainConfig(learning_rate=0.05, epochs=5, batch_size=64, seed=3))

# ----------------------------------------------------------------------
# EvalRecords pair a probability profile with the flagged true codes.

records = build_records(est, test_docs)

print("per-level metrics on the held-out slice")
for level in range(1, tree.level_count + 1):
    print(f"  level {level}: "
          f"log_loss={level_log_loss(records, level):.4f}  "
          f"recall@1={recall_at_k(records, level, 1):.4f}  "
          f"recall@3={recall_at_k(records, level, 3):.4f}  "
          f"recall@5={recall_at_k(records, level, 5):.4f}")

accuracy = path_accuracy(records, "leaf_argmax")
print("path accuracy by level (never increases):", np.round(accuracy, 4))

# ----------------------------------------------------------------------
# Confusion at the top level, row-normalized to percentages.

cm = confusion_matrix(records, 1)
print("\ntop-level confusion (% of row):")
print("      " + "  ".join(f"{c.render():>5s}" for c in cm.codes))
for code, row in zip(cm.codes, cm.normalized()):
    print(f"  {code.render():>3s} " + "  ".join(f"{v:5.1f}" for v in row))

# ----------------------------------------------------------------------
# The full report bundles everything, sliced overall and per source.

report = evaluation_report(est, test_docs)
overall = report["slices"]["overall"]["levels"]
print("\nreport slices:", sorted(report["slices"]))
print("leaf-level entry:", {k: round(v, 4) for k, v in overall[str(tree.level_count)].items()})
