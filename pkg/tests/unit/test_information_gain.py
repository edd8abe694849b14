"""
Unit tests for information gain weights
"""

import math

import numpy as np
import pytest

from src.domain.errors import DegenerateCorpusError
from src.embeddings.table import EmbeddingTable
from src.wespad.information_gain import IGResolver, IGWeights, binary_entropy, compute_ig, ig_lookup
from tests.conftest import make_corpus


def entropy(p):
    if p in (0.0, 1.0):
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def ig_by_definition(corpus, word):
    n = len(corpus)
    pos = corpus.positive_count
    with_w = [post for post in corpus if word in post.tokens]
    without = [post for post in corpus if word not in post.tokens]

    def part(posts):
        if not posts:
            return 0.0
        return len(posts) / n * entropy(sum(p.is_positive for p in posts) / len(posts))

    return entropy(pos / n) - part(with_w) - part(without)


class TestBinaryEntropy:
    """Test two-class entropy."""

    def test_balanced_is_one_bit(self):
        assert binary_entropy(5, 10) == pytest.approx(1.0)

    def test_pure_and_empty(self):
        assert binary_entropy(0, 4) == 0.0
        assert binary_entropy(4, 4) == 0.0
        assert binary_entropy(0, 0) == 0.0


class TestComputeIG:
    """Test per-word information gain."""

    def test_matches_definition(self, small_corpus):
        ig = compute_ig(small_corpus)

        for word in ig.table:
            assert ig.table[word] == pytest.approx(ig_by_definition(small_corpus, word))

    def test_matches_definition_on_random_corpora(self):
        rng = np.random.default_rng(0)
        words = ("flu", "cold", "fever", "cough", "shot", "news")
        for _ in range(200):
            n = int(rng.integers(2, 15))
            labels = ["pos", "neg"] + [("pos", "neg")[i] for i in rng.integers(2, size=n - 2)]
            rows = [
                (f"r{i}", " ".join(rng.choice(words, size=int(rng.integers(1, 5)))), label)
                for i, label in enumerate(labels)
            ]
            corpus = make_corpus(rows)

            ig = compute_ig(corpus)

            assert set(ig.table) == {token for post in corpus for token in post.tokens}
            for word, value in ig.table.items():
                assert value == pytest.approx(ig_by_definition(corpus, word), abs=1e-12)

    def test_bounded_by_corpus_entropy(self, small_corpus):
        ig = compute_ig(small_corpus)

        assert ig.corpus_entropy == pytest.approx(entropy(0.4))
        assert all(0.0 <= v <= ig.corpus_entropy for v in ig.table.values())

    def test_perfect_predictor_gets_full_entropy(self):
        corpus = make_corpus([("1", "sick flu", "pos"), ("2", "sick cold", "pos"), ("3", "news flu", "neg")])

        ig = compute_ig(corpus)

        assert ig.table["sick"] == pytest.approx(ig.corpus_entropy)
        assert ig.table["news"] == pytest.approx(ig.corpus_entropy)

    def test_repeated_word_counts_once(self):
        once = make_corpus([("1", "flu", "pos"), ("2", "cold", "neg"), ("3", "flu cold", "neg")])
        twice = make_corpus([("1", "flu flu flu", "pos"), ("2", "cold", "neg"), ("3", "flu cold", "neg")])

        assert compute_ig(once).table["flu"] == pytest.approx(compute_ig(twice).table["flu"])

    def test_single_class_corpus(self):
        corpus = make_corpus([("1", "a", "pos"), ("2", "b", "pos")])

        with pytest.raises(DegenerateCorpusError):
            compute_ig(corpus)

    def test_empty_corpus(self):
        with pytest.raises(DegenerateCorpusError):
            compute_ig(make_corpus([]))

    def test_dict_roundtrip(self, small_corpus):
        ig = compute_ig(small_corpus)

        restored = IGWeights.from_dict(ig.to_dict())

        assert restored.table == pytest.approx(ig.table)
        assert restored.train_vocab == ig.train_vocab


class TestIGResolver:
    """Test IG lookup for unseen words."""

    @pytest.fixture
    def ig(self):
        return IGWeights(table={"fever": 0.8, "vaccine": 0.1}, corpus_entropy=1.0)

    @pytest.fixture
    def table(self):
        return EmbeddingTable(
            words=("fever", "vaccine", "chills", "shot"),
            matrix=np.array([[1.0, 0.0], [0.0, 1.0], [0.9, 0.1], [0.1, 0.9]]),
        )

    def test_training_word_direct(self, ig, table):
        assert ig_lookup("fever", ig, table) == 0.8

    def test_unseen_word_borrows_nearest(self, ig, table):
        resolver = IGResolver(ig, table)

        assert resolver("chills") == 0.8
        assert resolver("shot") == 0.1

    def test_unknown_everywhere_is_zero(self, ig, table):
        assert ig_lookup("blorp", ig, table) == 0.0
