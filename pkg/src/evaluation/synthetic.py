"""
Seeded Synthetic Fixture

Builds a small labeled corpus, a matching embedding table and chain-shaped
dependency trees in which the class signal lives mostly in the embedding
space:

- every post fills a shared sentence template with one topic word and three
  class words, so function words and topics carry no label signal
- positive class words come from a large pool of symptom words placed near a
  positive anchor direction; most of them occur in one or two posts only,
  so test positives mostly use words unseen in training n-grams while their
  vectors still sit near the training positives
- negative class words come from a smaller pool near a negative anchor
- some posts carry previous/next context posts of the same class

With impure_cluster=True, half of the negatives of the first topic use decoy
words placed near the positive anchor, which makes that topic's embedding
cluster class-impure.

With held_out_vocabulary=True, positives draw their class words from a
smaller shared symptom pool that a lexical model can learn, and each slot is
swapped with probability SWAP_RATE for a freshly minted embedding neighbour of
that word. A minted neighbour occurs exactly once, so it is never seen in
training when its post is tested. Negatives keep their shared pool.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import structlog

from src.domain.posts import Corpus, Label, Post
from src.domain.trees import DependencyForest, DependencyTree, TreeNode
from src.embeddings.table import EmbeddingTable

logger = structlog.get_logger(__name__)

FUNCTION_WORDS = (
    "i", "my", "the", "a", "is", "was", "has", "have", "so", "just", "today", "about",
    "this", "that", "and", "with", "me", "it", "of", "to", "after", "again", "still", "our",
)
TOPICS = ("flu", "cancer", "migraine", "asthma")
TEMPLATES = (
    "my {t} {w} is {w} and {w} today",
    "just {w} with the {t} {w} {w} again",
    "so {w} about this {t} and {w} {w}",
    "i have {w} {t} {w} after {w}",
    "the {t} {w} was {w} and still {w}",
    "our {w} {t} has {w} with {w}",
)
CLASS_SLOTS = 3
SWAP_RATE = 2 / 3
NEIGHBOUR_SPREAD = 0.3
DECIMALS = 6


@dataclass(frozen=True)
class Fixture:
    """Posts (with trees attached), embedding table and forests keyed by post id."""
    corpus: Corpus
    table: EmbeddingTable
    forests: dict[str, DependencyForest]


def _unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _near(rng: np.random.Generator, anchor: np.ndarray, spread: float) -> np.ndarray:
    return anchor + rng.normal(scale=spread / np.sqrt(anchor.size), size=anchor.size)


def chain_forest(post_id: str, tokens: list[str]) -> Optional[DependencyForest]:
    """One sentence in which token i heads token i+1."""
    if not tokens:
        return None
    nodes = tuple(TreeNode(index=i + 1, form=tok, head=i) for i, tok in enumerate(tokens))
    return DependencyForest(post_id, (DependencyTree(nodes, post_id=post_id),))


def generate_fixture(
    seed: int,
    n_posts: int = 800,
    positive_rate: float = 0.2,
    dim: int = 50,
    impure_cluster: bool = False,
    held_out_vocabulary: bool = False,
) -> Fixture:
    """
    Generate the synthetic corpus.

    Args:
        seed: RNG seed; identical arguments give identical fixtures
        n_posts: Number of posts
        positive_rate: Share of positive posts
        dim: Embedding dimension
        impure_cluster: Make the first topic's embedding cluster class-impure
        held_out_vocabulary: Draw positive class words from a smaller shared pool
            and swap each slot, with probability SWAP_RATE, for an embedding
            neighbour that occurs only once

    Returns:
        Fixture
    """
    if not 0.0 < positive_rate < 1.0:
        raise ValueError(f"positive_rate must be in (0, 1), got {positive_rate}")
    rng = np.random.default_rng(seed)
    n_pos = max(1, int(round(n_posts * positive_rate)))
    n_neg = n_posts - n_pos

    positive_anchor = _unit(rng, dim)
    negative_anchor = _unit(rng, dim)
    negative_anchor -= (negative_anchor @ positive_anchor) * positive_anchor
    negative_anchor /= np.linalg.norm(negative_anchor)

    vectors: dict[str, np.ndarray] = {}
    for word in FUNCTION_WORDS:
        vectors[word] = rng.normal(scale=1.0 / np.sqrt(dim), size=dim)
    for topic in TOPICS:
        vectors[topic] = 2.0 * _unit(rng, dim)

    symptom_words = [f"sym{i:04d}" for i in range(max(20, 4 * n_pos))]
    for word in symptom_words:
        vectors[word] = _near(rng, positive_anchor, 0.8)
    negative_words = [f"neg{i:03d}" for i in range(max(20, n_neg // 4))]
    for word in negative_words:
        vectors[word] = _near(rng, negative_anchor, 0.8)
    decoy_words = [f"decoy{i:03d}" for i in range(max(20, n_neg // 2))]
    for word in decoy_words:
        vectors[word] = _near(rng, positive_anchor, 0.8)

    labels = [Label.POSITIVE] * n_pos + [Label.NEGATIVE] * n_neg
    order = rng.permutation(n_posts)

    pools = {"sym": symptom_words, "neg": negative_words, "decoy": decoy_words}
    if held_out_vocabulary:
        pools["sym"] = symptom_words[: max(20, n_pos // 4)]
    minted = 0

    def class_words(kind: str) -> list[str]:
        nonlocal minted
        pool = pools[kind]
        words = [pool[i] for i in rng.integers(len(pool), size=CLASS_SLOTS)]
        if not held_out_vocabulary or kind != "sym":
            return words
        for slot, word in enumerate(words):
            if rng.random() < SWAP_RATE:
                neighbour = f"symx{minted:05d}"
                minted += 1
                vectors[neighbour] = _near(rng, vectors[word], NEIGHBOUR_SPREAD)
                words[slot] = neighbour
        return words

    def sentence(kind: str, topic: str) -> str:
        template = TEMPLATES[rng.integers(len(TEMPLATES))]
        return template.replace("{t}", topic).replace("{w}", "{}").format(*class_words(kind))

    posts = []
    forests: dict[str, DependencyForest] = {}
    for n, i in enumerate(order):
        label = labels[i]
        post_id = f"p{n:04d}"
        topic = TOPICS[rng.integers(len(TOPICS))]
        if label is Label.POSITIVE:
            kind = "sym"
        elif impure_cluster and topic == TOPICS[0] and rng.random() < 0.5:
            kind = "decoy"
        else:
            kind = "neg"
        text = sentence(kind, topic)
        # Context posts share the anchor post's class words kind.
        prev_text = sentence(kind, topic) if rng.random() < 0.5 else None
        next_text = sentence(kind, topic) if rng.random() < 0.5 else None

        post = Post(
            id=post_id,
            text=text,
            label=label,
            topic=topic,
            prev_text=prev_text,
            next_text=next_text,
        )
        forest = chain_forest(post_id, list(post.tokens))
        forests[post_id] = forest
        posts.append(post.with_tree(forest))

    words = tuple(vectors)
    matrix = np.round(np.array([vectors[w] for w in words]), DECIMALS)
    table = EmbeddingTable(words=words, matrix=matrix, source="word2vec-text")
    logger.info(
        "fixture_generated",
        seed=seed,
        posts=n_posts,
        positive=n_pos,
        words=len(words),
        impure_cluster=impure_cluster,
        held_out_vocabulary=held_out_vocabulary,
    )
    return Fixture(corpus=Corpus(tuple(posts)), table=table, forests=forests)


def write_posts_jsonl(corpus: Corpus, path: Path) -> Path:
    lines = []
    for post in corpus:
        record = {"id": post.id, "text": post.text, "label": post.label.value}
        for key in ("topic", "prev_text", "next_text"):
            value = getattr(post, key)
            if value is not None:
                record[key] = value
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return Path(path)


def write_word2vec_text(table: EmbeddingTable, path: Path) -> Path:
    lines = [f"{len(table)} {table.dim}"]
    for word, row in zip(table.words, table.matrix):
        lines.append(word + " " + " ".join(f"{x:.{DECIMALS}f}" for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def write_conll(forests: dict[str, DependencyForest], path: Path) -> Path:
    lines = []
    for post_id, forest in forests.items():
        if forest is None:
            continue
        lines.append(f"# id = {post_id}")
        for tree in forest.sentences:
            for node in tree.nodes:
                lines.append(f"{node.index}\t{node.form}\t_\t_\t_\t_\t{node.head}\t_\t_\t_")
            lines.append("")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    return Path(path)


def write_fixture(fixture: Fixture, out_dir: Path) -> dict[str, Path]:
    """Write posts.jsonl, embeddings.txt (word2vec text) and trees.conll."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return {
        "posts": write_posts_jsonl(fixture.corpus, out_dir / "posts.jsonl"),
        "embeddings": write_word2vec_text(fixture.table, out_dir / "embeddings.txt"),
        "trees": write_conll(fixture.forests, out_dir / "trees.conll"),
    }
