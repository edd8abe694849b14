"""
Dependency Tree Domain Models

Defines parsed dependency trees (one per sentence), the per-post forest, and
frequent subtree patterns mined from them.

Patterns are stored in preorder encoding: a tuple of (depth, label) pairs with
the root at depth 0 and children listed in left-to-right sentence order.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from src.domain.errors import TreeStructureError

ROOT = 0

Encoding = tuple[tuple[int, str], ...]


@dataclass(frozen=True)
class TreeNode:
    """One token of a parsed sentence. `head` is ROOT (0) for the sentence root."""
    index: int
    form: str
    head: int


@dataclass(frozen=True)
class DependencyTree:
    """A single sentence's dependency tree."""
    nodes: tuple[TreeNode, ...]
    post_id: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(self.nodes, key=lambda n: n.index)))
        self._validate()

    def _validate(self):
        indices = [node.index for node in self.nodes]
        if len(set(indices)) != len(indices):
            raise TreeStructureError(self.post_id, "duplicate token index")
        known = set(indices)
        roots = [node for node in self.nodes if node.head == ROOT]
        if len(roots) != 1:
            raise TreeStructureError(self.post_id, f"expected exactly one root, found {len(roots)}")
        heads = {node.index: node.head for node in self.nodes}
        for node in self.nodes:
            if node.head != ROOT and node.head not in known:
                raise TreeStructureError(
                    self.post_id, f"token {node.index} points to missing head {node.head}"
                )
        # Every node must reach the root without revisiting a node.
        for node in self.nodes:
            seen = {node.index}
            current = node.head
            while current != ROOT:
                if current in seen:
                    raise TreeStructureError(self.post_id, f"cycle through token {current}")
                seen.add(current)
                current = heads[current]

    def __len__(self) -> int:
        return len(self.nodes)

    @cached_property
    def position(self) -> dict[int, int]:
        """Token index -> position in `nodes`."""
        return {node.index: i for i, node in enumerate(self.nodes)}

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """Children positions of each node position, in sentence order."""
        kids: list[list[int]] = [[] for _ in self.nodes]
        for i, node in enumerate(self.nodes):
            if node.head != ROOT:
                kids[self.position[node.head]].append(i)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def parents(self) -> tuple[int, ...]:
        """Parent position of each node position; -1 for the root."""
        return tuple(
            -1 if node.head == ROOT else self.position[node.head] for node in self.nodes
        )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(node.form for node in self.nodes)

    @property
    def root(self) -> int:
        return self.parents.index(-1)

    def __repr__(self) -> str:
        return f"DependencyTree(tokens={len(self.nodes)}, root='{self.nodes[self.root].form}')"


@dataclass(frozen=True)
class DependencyForest:
    """All sentence trees of one post, in sentence order."""
    post_id: str
    sentences: tuple[DependencyTree, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)

    def __repr__(self) -> str:
        return f"DependencyForest(post_id='{self.post_id}', sentences={len(self.sentences)})"


@dataclass(frozen=True)
class SubtreePattern:
    """An ordered labeled subtree found in at least `support` training trees."""
    encoding: Encoding
    support: int
    feature_index: int = -1

    @property
    def size(self) -> int:
        return len(self.encoding)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        """Children positions of each pattern node, in order."""
        kids: list[list[int]] = [[] for _ in self.encoding]
        stack: list[int] = []
        for i, (depth, _) in enumerate(self.encoding):
            del stack[depth:]
            if stack:
                kids[stack[-1]].append(i)
            stack.append(i)
        return tuple(tuple(k) for k in kids)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for _, label in self.encoding)

    def render(self) -> str:
        """Bracket form, e.g. 'has(grandpa,alzheimer's)'."""
        def walk(i: int) -> str:
            label = self.encoding[i][1]
            kids = self.children[i]
            if not kids:
                return label
            return f"{label}({','.join(walk(k) for k in kids)})"

        return walk(0) if self.encoding else ""

    def __repr__(self) -> str:
        return f"SubtreePattern('{self.render()}', support={self.support}, index={self.feature_index})"
