"""N-gram enumeration and vocabulary indexing (lex_feats)."""

from typing import Iterable, Sequence

from src.domain.posts import Corpus

BIGRAM_JOINER = "_"


def ngrams(tokens: Sequence[str], orders: Iterable[int] = (1, 2)) -> list[str]:
    """
    N-gram keys of a token sequence, lower orders first.

    Bigrams are joined with '_' ("heart_attack"); the tokenizer never emits '_',
    so keys cannot collide with unigrams.
    """
    keys: list[str] = []
    for n in sorted(set(orders)):
        for i in range(len(tokens) - n + 1):
            keys.append(BIGRAM_JOINER.join(tokens[i:i + n]))
    return keys


def ngram_vocab(corpus: Corpus, orders: Iterable[int] = (1, 2)) -> dict[str, int]:
    """
    Dense index over every n-gram in the corpus.

    Indices follow first occurrence in corpus order, so the vocabulary is
    deterministic given the corpus.

    Args:
        corpus: Training posts
        orders: N-gram orders to include

    Returns:
        Mapping n-gram -> feature index
    """
    orders = tuple(orders)
    vocab: dict[str, int] = {}
    for post in corpus:
        for key in ngrams(post.tokens, orders):
            if key not in vocab:
                vocab[key] = len(vocab)
    return vocab
