"""
Stratified sampling and train/test construction
===============================================

Two survey-style procedures used to build working datasets:

* stratified subsampling with the per-stratum rule
  max{1, round_half_up(fraction * N_h)}, e.g. to thin an oversized
  administrative source while keeping every stratum represented;
* a train/test split stratified by (source, leaf code) where singleton
  strata go wholly to test and dictionary-like sources go wholly to
  train, so every code keeps at least one training example.

Both are deterministic for a fixed seed, with per-stratum derived
generators.
"""

from collections import Counter

from hiertax import build_hierarchy, stratified_sample, train_test_split
from hiertax.datagen import CorpusSpec, generate_corpus, uniform_tree_codes
from hiertax.documents import LabeledDocument
from hiertax.sampling import by_char_bin, by_code, composite_key, sample_manifest

codes, widths = uniform_tree_codes((4, 4))
tree = build_hierarchy(codes, widths)
docs = generate_corpus(CorpusSpec(tree=tree, total_docs=3000, seed=21,
                                  tokens_per_doc=(5, 120)))

# ----------------------------------------------------------------------
# Thin the corpus to ~20% with strata = (leaf code, description length).

key = composite_key(by_code, by_char_bin)
sampled = stratified_sample(docs, key, fraction=0.2, seed=4)
manifest = sample_manifest(docs, key, fraction=0.2, seed=4)
print(f"sampled {len(sampled)} of {len(docs)} documents "
      f"across {len(manifest['strata'])} strata")
smallest = min(manifest["strata"].values(), key=lambda e: e["N"])
print("smallest stratum:", smallest, "(never sampled below one case)")

# ----------------------------------------------------------------------
# Train/test split: dictionary rows bypass the strata and guarantee
# full code coverage in training.

dictionary = [
    LabeledDocument(id=f"dict-{c.render()}", text=f"definition of {c.render()}",
                    codes=(c,), source="official")
    for c in tree.leaves
]
result = train_test_split(docs + dictionary,
                          always_train_sources={"official"},
                          train_fraction=0.7, seed=9)
print(f"\ntrain={len(result.train)}  test={len(result.test)}")

train_codes = {d.codes[0] for d in result.train}
print("all", len(tree.leaves), "leaf codes covered in train:",
      set(tree.leaves) <= train_codes)

singletons = [k for k, v in result.manifest["strata"].items() if v["N"] == 1]
test_sources = Counter(d.source for d in result.test)
print(f"singleton strata sent to test: {len(singletons)}")
print("test docs by source:", dict(test_sources))
