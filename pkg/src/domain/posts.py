"""
Post and Corpus Domain Models

Defines the labeled social-media post, the ordered corpus of posts, and the
fold plan used by cross-validation.
"""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Iterator, Mapping, Optional

import numpy as np
import pandas as pd

from src.domain.errors import DuplicatePostIdError, UnknownLabelError

if TYPE_CHECKING:
    from src.domain.trees import DependencyForest


class Label(str, Enum):
    """Binary class of a post. Positive means a personal health mention."""
    POSITIVE = "pos"
    NEGATIVE = "neg"

    @classmethod
    def parse(cls, value) -> "Label":
        """Accepts pos/positive/1 and neg/negative/0, case-insensitive."""
        if isinstance(value, Label):
            return value
        if isinstance(value, bool):
            return cls.POSITIVE if value else cls.NEGATIVE
        text = str(value).strip().lower()
        if text in ("pos", "positive", "1"):
            return cls.POSITIVE
        if text in ("neg", "negative", "0"):
            return cls.NEGATIVE
        raise UnknownLabelError(str(value))

    @property
    def is_positive(self) -> bool:
        return self is Label.POSITIVE


@dataclass(frozen=True)
class Post:
    """
    A single labeled post.

    `tokens` is derived from `text` by the fixed tokenizer when not supplied.
    `prev_text` / `next_text` hold the author's previous and next posts when
    they are available.
    """
    id: str
    text: str
    label: Label
    tokens: tuple[str, ...] = ()
    topic: Optional[str] = None
    prev_text: Optional[str] = None
    next_text: Optional[str] = None
    tree: Optional["DependencyForest"] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "label", Label.parse(self.label))
        if not self.tokens and self.text:
            from src.corpus.tokenizer import tokenize
            object.__setattr__(self, "tokens", tuple(tokenize(self.text)))
        else:
            object.__setattr__(self, "tokens", tuple(self.tokens))

    @property
    def is_positive(self) -> bool:
        return self.label.is_positive

    def with_tree(self, tree: Optional["DependencyForest"]) -> "Post":
        return Post(
            id=self.id,
            text=self.text,
            label=self.label,
            tokens=self.tokens,
            topic=self.topic,
            prev_text=self.prev_text,
            next_text=self.next_text,
            tree=tree,
        )

    def __repr__(self) -> str:
        preview = self.text if len(self.text) <= 40 else self.text[:37] + "..."
        return f"Post(id='{self.id}', label={self.label.value}, text='{preview}')"


@dataclass(frozen=True)
class Corpus:
    """Ordered, id-unique collection of posts."""
    posts: tuple[Post, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "posts", tuple(self.posts))
        seen: set[str] = set()
        for post in self.posts:
            if post.id in seen:
                raise DuplicatePostIdError(post.id)
            seen.add(post.id)

    def __len__(self) -> int:
        return len(self.posts)

    def __iter__(self) -> Iterator[Post]:
        return iter(self.posts)

    def __getitem__(self, index: int) -> Post:
        return self.posts[index]

    @property
    def positive_count(self) -> int:
        return sum(1 for post in self.posts if post.is_positive)

    @property
    def negative_count(self) -> int:
        return len(self.posts) - self.positive_count

    @property
    def ids(self) -> list[str]:
        return [post.id for post in self.posts]

    @property
    def labels(self) -> np.ndarray:
        """Labels as a 0/1 integer array (1 = positive)."""
        return np.array([1 if post.is_positive else 0 for post in self.posts], dtype=np.int64)

    @property
    def topics(self) -> list[str]:
        """Distinct topics in first-occurrence order; posts without one count as 'unknown'."""
        return list(dict.fromkeys(post.topic or "unknown" for post in self.posts))

    def subset(self, ids: Iterable[str]) -> "Corpus":
        """Posts whose id is in `ids`, in corpus order."""
        wanted = set(ids)
        return Corpus(tuple(post for post in self.posts if post.id in wanted))

    def filter(self, predicate) -> "Corpus":
        return Corpus(tuple(post for post in self.posts if predicate(post)))

    def to_frame(self) -> pd.DataFrame:
        """One row per post, for inspection and summary statistics."""
        return pd.DataFrame(
            {
                "id": [p.id for p in self.posts],
                "label": [p.label.value for p in self.posts],
                "topic": [p.topic for p in self.posts],
                "n_tokens": [len(p.tokens) for p in self.posts],
                "has_prev": [p.prev_text is not None for p in self.posts],
                "has_next": [p.next_text is not None for p in self.posts],
                "has_tree": [p.tree is not None for p in self.posts],
            }
        )

    def __repr__(self) -> str:
        return f"Corpus(posts={len(self)}, positive={self.positive_count}, negative={self.negative_count})"


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of every post id to one of `k` cross-validation folds."""
    k: int
    assignment: Mapping[str, int]
    seed: int

    def fold_ids(self, fold: int) -> list[str]:
        return [post_id for post_id, f in self.assignment.items() if f == fold]

    def fold_of(self, post_id: str) -> int:
        return self.assignment[post_id]

    @property
    def plan_hash(self) -> str:
        """Stable digest identifying this plan; shared by every report built on it."""
        payload = json.dumps(
            {"k": self.k, "seed": self.seed, "assignment": sorted(self.assignment.items())},
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"FoldPlan(k={self.k}, posts={len(self.assignment)}, hash={self.plan_hash})"
