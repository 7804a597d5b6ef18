"""
Prefix-code taxonomies
======================

Occupation classifications encode their hierarchy directly in the class
codes: every prefix of a code is an ancestor group.  This demo builds two
trees - a small two-level one and a full KZiS-shaped taxonomy - and walks
through navigation and level queries.
"""

from hiertax import build_hierarchy, kzis_structure_codes

# ----------------------------------------------------------------------
# A small two-level hierarchy: two branches with three leaves each.
# Codes are one digit per level, so "02" means branch 0, leaf 2.

tree = build_hierarchy(["00", "01", "02", "10", "11", "12"], segment_lengths=(1, 1))

print("levels:", tree.level_count)
print("level 1 nodes:", [c.render() for c in tree.level_nodes(1)])
print("level 2 nodes:", [c.render() for c in tree.level_nodes(2)])

code = tree.parse("01")
print("ancestors of 01:", [c.render() for c in tree.ancestor_path(code)])
print("parent of 01:", tree.parent(code).render())
print("children of 0:", [c.render() for c in tree.children(tree.parse("0"))])

# ----------------------------------------------------------------------
# The full KZiS shape: 6-digit codes over five levels (1+1+1+1+2 digits).
# kzis_structure_codes() reproduces the published level structure of the
# 2023 classification - 10 major groups, 43 sub-major, 134 minor,
# 445 unit groups and 2,911 occupation codes.

kzis = build_hierarchy(kzis_structure_codes(), segment_lengths=(1, 1, 1, 1, 2))

print("\nKZiS-shaped taxonomy")
for level in range(1, kzis.level_count + 1):
    print(f"  level {level} ({kzis.digit_levels[level - 1]} digits): "
          f"{len(kzis.level_nodes(level))} groups")

leaf = kzis.leaves[1000]
print("example leaf:", leaf.render())
print("its path:", " -> ".join(c.render() for c in kzis.ancestor_path(leaf)))
print("leaves under major group 2:",
      kzis.leaf_descendant_count(kzis.parse("2")))

# Codes shorter than full depth are tolerated as internal nodes, but only
# full-depth codes count as leaves (classification targets).
unbalanced = build_hierarchy(["00", "01", "1"], segment_lengths=(1, 1))
print("\nunbalanced input: leaves =", [c.render() for c in unbalanced.leaves],
      "| '1' is a leaf:", unbalanced.is_leaf(unbalanced.parse("1")))
