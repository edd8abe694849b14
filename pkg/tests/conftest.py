"""
Shared fixtures and post builders
"""

import pytest

from src.domain.posts import Corpus, Label, Post


def make_post(post_id, text, label, **kwargs):
    """Build a post; label accepts anything Label.parse does."""
    return Post(id=post_id, text=text, label=Label.parse(label), **kwargs)


def make_corpus(rows):
    """Corpus from (id, text, label) tuples."""
    return Corpus(tuple(make_post(*row) for row in rows))


@pytest.fixture
def small_corpus():
    """Ten posts, four positive."""
    return make_corpus(
        [
            ("a1", "i have the flu today", "pos"),
            ("a2", "my fever is awful", "pos"),
            ("a3", "i think i caught the flu", "pos"),
            ("a4", "my cough will not stop", "pos"),
            ("b1", "flu season starts in october", "neg"),
            ("b2", "get your flu shot", "neg"),
            ("b3", "new vaccine trial announced", "neg"),
            ("b4", "cough syrup on sale", "neg"),
            ("b5", "hospital opens new wing", "neg"),
            ("b6", "health officials warn of fever outbreak", "neg"),
        ]
    )
