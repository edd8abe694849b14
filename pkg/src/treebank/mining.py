"""
Frequent Subtree Mining (syn_feats)

Mines induced ordered labeled subtrees of dependency trees by rightmost
extension: every pattern of size n+1 is generated exactly once, from the
pattern obtained by deleting its last node in preorder.

An occurrence of a pattern is summarised by the tree position of its rightmost
leaf. Since parent-child edges are preserved, the images of the whole rightmost
path are the ancestors of that position, which is all an extension needs.

Support is document frequency: a tree counts once however often the pattern
occurs in it.
"""

from collections import defaultdict
from typing import Iterable, Optional, Sequence

import structlog

from src.domain.trees import DependencyForest, DependencyTree, Encoding, SubtreePattern

logger = structlog.get_logger(__name__)

# (tree number, node position of the rightmost leaf image)
Occurrence = tuple[int, int]


def _ancestor(tree: DependencyTree, position: int, steps: int) -> int:
    for _ in range(steps):
        position = tree.parents[position]
    return position


def _support(occurrences: Iterable[Occurrence]) -> int:
    return len({tree_no for tree_no, _ in occurrences})


def _extensions(
    trees: Sequence[DependencyTree],
    occurrences: Sequence[Occurrence],
    rightmost_depth: int,
) -> dict[tuple[int, str], set[Occurrence]]:
    """All one-node rightmost extensions of a pattern, keyed by (new depth, label)."""
    grown: dict[tuple[int, str], set[Occurrence]] = defaultdict(set)
    for tree_no, leaf in occurrences:
        tree = trees[tree_no]
        labels = tree.labels
        # Attach under the rightmost-path node at each depth p.
        below = None
        node = leaf
        for p in range(rightmost_depth, -1, -1):
            siblings = tree.children[node]
            if below is None:
                candidates = siblings
            else:
                candidates = siblings[siblings.index(below) + 1:]
            for child in candidates:
                grown[(p + 1, labels[child])].add((tree_no, child))
            below = node
            node = tree.parents[node]
    return grown


def mine_frequent_subtrees(
    trees: Sequence[DependencyTree],
    min_support: int = 10,
    min_size: int = 2,
    max_size: Optional[int] = None,
) -> list[SubtreePattern]:
    """
    Complete set of frequent induced ordered subtrees.

    Args:
        trees: Mining corpus (one tree per sentence)
        min_support: Minimum number of distinct trees containing the pattern
        min_size: Minimum node count of reported patterns
        max_size: Optional cap on pattern node count

    Returns:
        Patterns sorted by (size, encoding), with feature_index = list position
    """
    if min_support < 1 or min_size < 1:
        raise ValueError("min_support and min_size must be >= 1")
    trees = list(trees)

    seeds: dict[str, set[Occurrence]] = defaultdict(set)
    for tree_no, tree in enumerate(trees):
        for position, label in enumerate(tree.labels):
            seeds[label].add((tree_no, position))

    found: list[tuple[Encoding, int]] = []
    stack: list[tuple[Encoding, list[Occurrence]]] = []
    for label in sorted(seeds):
        occurrences = sorted(seeds[label])
        if _support(occurrences) >= min_support:
            stack.append((((0, label),), occurrences))

    while stack:
        encoding, occurrences = stack.pop()
        if len(encoding) >= min_size:
            found.append((encoding, _support(occurrences)))
        if max_size is not None and len(encoding) >= max_size:
            continue
        rightmost_depth = encoding[-1][0]
        for key, grown in sorted(_extensions(trees, occurrences, rightmost_depth).items()):
            if _support(grown) >= min_support:
                stack.append((encoding + (key,), sorted(grown)))

    found.sort(key=lambda item: (len(item[0]), item[0]))
    patterns = [
        SubtreePattern(encoding=encoding, support=support, feature_index=i)
        for i, (encoding, support) in enumerate(found)
    ]
    logger.info(
        "subtrees_mined",
        trees=len(trees),
        patterns=len(patterns),
        min_support=min_support,
        min_size=min_size,
    )
    return patterns


def _matches_at(tree: DependencyTree, pattern: SubtreePattern, p: int, t: int) -> bool:
    """Does pattern node p (with its subtree) embed with p mapped onto tree node t?"""
    if pattern.encoding[p][1] != tree.labels[t]:
        return False
    wanted = pattern.children[p]
    if not wanted:
        return True
    # Greedy leftmost assignment is exact for ordered subsequence embedding.
    i = 0
    for child in tree.children[t]:
        if _matches_at(tree, pattern, wanted[i], child):
            i += 1
            if i == len(wanted):
                return True
    return False


def contains(tree: DependencyTree, pattern: SubtreePattern) -> bool:
    """
    True iff the pattern embeds into the tree as an induced ordered subtree:
    labels equal, parent-child edges preserved, sibling order preserved.
    """
    if not pattern.encoding:
        return True
    return any(_matches_at(tree, pattern, 0, t) for t in range(len(tree)))


def subtree_features(forest: Optional[DependencyForest], patterns: Sequence[SubtreePattern]) -> set[int]:
    """
    Feature indices of the patterns found in any sentence of the forest.

    Posts without a forest have no syntactic features.
    """
    if forest is None:
        return set()
    return {
        pattern.feature_index
        for pattern in patterns
        if any(contains(tree, pattern) for tree in forest.sentences)
    }


def count_support(trees: Sequence[DependencyTree], pattern: SubtreePattern) -> int:
    """Number of trees containing the pattern, counted by direct matching."""
    return sum(1 for tree in trees if contains(tree, pattern))


def mine_per_class(
    positive_trees: Sequence[DependencyTree],
    negative_trees: Sequence[DependencyTree],
    min_support: int = 10,
    min_size: int = 2,
    max_size: Optional[int] = None,
) -> list[SubtreePattern]:
    """
    Mine each class separately and union the results.

    Supports of the union are recounted over the trees of both classes, so
    `support` keeps meaning "training trees containing the pattern".
    """
    encodings: set[Encoding] = set()
    for class_trees in (positive_trees, negative_trees):
        encodings.update(
            p.encoding for p in mine_frequent_subtrees(class_trees, min_support, min_size, max_size)
        )
    everything = list(positive_trees) + list(negative_trees)
    ordered = sorted(encodings, key=lambda e: (len(e), e))
    return [
        SubtreePattern(
            encoding=encoding,
            support=count_support(everything, SubtreePattern(encoding, 0)),
            feature_index=i,
        )
        for i, encoding in enumerate(ordered)
    ]
