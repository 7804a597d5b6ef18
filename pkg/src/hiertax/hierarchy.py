"""Prefix-code taxonomy tree.

Occupation classifications such as KZiS encode their hierarchy directly in
the class codes: every prefix of a code names an ancestor group.  KZiS uses
six digits split over five levels (1+1+1+1+2), so the level widths are
supplied explicitly as ``segment_lengths`` instead of assuming one symbol
per level.

The tree is immutable after construction and safe to share between
threads.  Node identity is the code itself; dense per-level indices are
available for building matrices but are an internal detail.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import EmptyInput, LevelOutOfRange, MalformedCode, UnknownCode


@dataclass(frozen=True, order=True)
class ClassCode:
    """A class code: one symbol group per hierarchy level.

    ``ClassCode(("2", "5", "2", "1", "02"))`` renders as ``"252102"``.
    Codes compare lexicographically by segments, which for fixed-width
    levels matches the rendered string order.
    """

    segments: tuple[str, ...]

    def __post_init__(self):
        if not isinstance(self.segments, tuple):
            object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def level(self) -> int:
        return len(self.segments)

    def render(self) -> str:
        return "".join(self.segments)

    def __str__(self) -> str:
        return self.render()

    def prefix(self, level: int) -> "ClassCode":
        """The ancestor code of the given level (1 <= level <= self.level)."""
        if not 1 <= level <= self.level:
            raise LevelOutOfRange(f"prefix level {level} of a level-{self.level} code")
        return ClassCode(self.segments[:level])

    def extends(self, other: "ClassCode") -> bool:
        """True when ``other`` is this code or one of its ancestors."""
        return self.segments[: len(other.segments)] == other.segments

    @classmethod
    def parse(cls, text: str, segment_lengths: Sequence[int]) -> "ClassCode":
        """Split a rendered code into segments.

        The text length must land exactly on a level boundary, i.e. equal
        ``sum(segment_lengths[:k])`` for some ``k >= 1``.  Symbols must be
        alphanumeric; anything else indicates a malformed input line.
        """
        boundaries = list(itertools.accumulate(segment_lengths))
        if len(text) not in boundaries:
            raise MalformedCode(
                f"code {text!r} has length {len(text)}, expected one of {boundaries}"
            )
        if not text.isalnum():
            raise MalformedCode(f"code {text!r} contains a non-alphabet symbol")
        segments = []
        start = 0
        for width in segment_lengths:
            if start >= len(text):
                break
            segments.append(text[start : start + width])
            start += width
        return cls(tuple(segments))


@dataclass(frozen=True)
class _Node:
    code: ClassCode
    parent: ClassCode | None
    children: tuple[ClassCode, ...]
    label: str | None


class HierarchyTree:
    """Immutable prefix-code tree built from full-depth class codes.

    Codes shorter than the full depth are tolerated on input (they become
    ordinary internal nodes), but only full-depth codes are leaves and
    thus valid training or evaluation targets.
    """

    def __init__(self, nodes: dict[ClassCode, _Node], segment_lengths: tuple[int, ...]):
        self._nodes = nodes
        self.segment_lengths = segment_lengths
        self.level_count = len(segment_lengths)
        # cumulative rendered-code lengths, e.g. (1, 2, 3, 4, 6) for KZiS
        self.digit_levels = tuple(itertools.accumulate(segment_lengths))
        levels: list[list[ClassCode]] = [[] for _ in range(self.level_count)]
        for code in nodes:
            if code.level > 0:
                levels[code.level - 1].append(code)
        self.levels: tuple[tuple[ClassCode, ...], ...] = tuple(
            tuple(sorted(lv)) for lv in levels
        )
        self._level_index: tuple[dict[ClassCode, int], ...] = tuple(
            {code: i for i, code in enumerate(lv)} for lv in self.levels
        )
        self._internal_nodes: tuple[ClassCode, ...] | None = None

    # -- queries ---------------------------------------------------------

    @property
    def root(self) -> ClassCode:
        return ClassCode(())

    @property
    def leaves(self) -> tuple[ClassCode, ...]:
        """All full-depth codes, in canonical (sorted) order."""
        return self.levels[self.level_count - 1]

    def __contains__(self, code: ClassCode) -> bool:
        return code in self._nodes

    def __len__(self) -> int:
        """Number of nodes excluding the synthetic root."""
        return len(self._nodes) - 1

    def node(self, code: ClassCode) -> _Node:
        try:
            return self._nodes[code]
        except KeyError:
            raise UnknownCode(f"code {code} is not in the tree") from None

    def label(self, code: ClassCode) -> str | None:
        return self.node(code).label

    def parent(self, code: ClassCode) -> ClassCode | None:
        return self.node(code).parent

    def children(self, code: ClassCode) -> tuple[ClassCode, ...]:
        return self.node(code).children

    def is_leaf(self, code: ClassCode) -> bool:
        """True only for full-depth codes present in the tree."""
        return code in self._nodes and code.level == self.level_count

    def internal_nodes(self) -> tuple[ClassCode, ...]:
        """Root plus every node with at least one child, in BFS order."""
        if self._internal_nodes is None:
            out = []
            queue = deque([self.root])
            while queue:
                code = queue.popleft()
                kids = self._nodes[code].children
                if kids:
                    out.append(code)
                    queue.extend(kids)
            self._internal_nodes = tuple(out)
        return self._internal_nodes

    def ancestor_path(self, code: ClassCode) -> list[ClassCode]:
        """Codes of all prefixes from level 1 down to the code itself."""
        if code not in self._nodes or code.level == 0:
            raise UnknownCode(f"code {code} is not in the tree")
        return [code.prefix(l) for l in range(1, code.level + 1)]

    def level_nodes(self, level: int) -> tuple[ClassCode, ...]:
        """All codes whose segment count equals ``level``, sorted."""
        if not 1 <= level <= self.level_count:
            raise LevelOutOfRange(
                f"level {level} outside 1..{self.level_count}"
            )
        return self.levels[level - 1]

    def level_index(self, code: ClassCode) -> int:
        """Dense index of a code within its own level."""
        try:
            return self._level_index[code.level - 1][code]
        except (KeyError, IndexError):
            raise UnknownCode(f"code {code} is not in the tree") from None

    def leaf_descendant_count(self, code: ClassCode) -> int:
        node = self.node(code)
        if code.level == self.level_count:
            return 1
        return sum(self.leaf_descendant_count(child) for child in node.children)

    def parse(self, text: str) -> ClassCode:
        """Parse a rendered code and check tree membership."""
        code = ClassCode.parse(text, self.segment_lengths)
        if code not in self._nodes:
            raise UnknownCode(f"code {text!r} is not in the tree")
        return code


def build_hierarchy(
    leaf_codes: Iterable[str],
    segment_lengths: Sequence[int],
    labels: Mapping[str, str] | None = None,
) -> HierarchyTree:
    """Build the tree containing every prefix of every input code.

    Input codes are rendered strings; duplicates are deduplicated.  Labels,
    when given, map rendered codes to human-readable names.
    """
    segment_lengths = tuple(int(w) for w in segment_lengths)
    if not segment_lengths or any(w < 1 for w in segment_lengths):
        raise MalformedCode(f"invalid segment lengths {segment_lengths}")
    codes = [ClassCode.parse(text, segment_lengths) for text in leaf_codes]
    if not codes:
        raise EmptyInput("no codes supplied")

    children: dict[ClassCode, set[ClassCode]] = {ClassCode(()): set()}
    for code in codes:
        for level in range(1, code.level + 1):
            node = code.prefix(level)
            parent = node.prefix(level - 1) if level > 1 else ClassCode(())
            children.setdefault(node, set())
            children.setdefault(parent, set()).add(node)

    label_map = dict(labels) if labels else {}
    nodes: dict[ClassCode, _Node] = {}
    for code, kids in children.items():
        parent = None if code.level == 0 else (
            code.prefix(code.level - 1) if code.level > 1 else ClassCode(())
        )
        nodes[code] = _Node(
            code=code,
            parent=parent,
            children=tuple(sorted(kids)),
            label=label_map.get(code.render()),
        )
    return HierarchyTree(nodes, segment_lengths)


def load_hierarchy(path, segment_lengths: Sequence[int]) -> HierarchyTree:
    """Read a hierarchy file: one leaf code per line, optional tab-separated label."""
    codes: list[str] = []
    labels: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            code, _, label = line.partition("\t")
            code = code.strip()
            codes.append(code)
            if label.strip():
                labels[code] = label.strip()
    return build_hierarchy(codes, segment_lengths, labels)


def save_hierarchy(tree: HierarchyTree, path) -> None:
    """Write the leaf codes (and labels when present) back to a hierarchy file."""
    with open(path, "w", encoding="utf-8") as fh:
        for code in tree.leaves:
            label = tree.label(code)
            fh.write(code.render() if label is None else f"{code.render()}\t{label}")
            fh.write("\n")
