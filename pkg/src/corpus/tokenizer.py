"""
Post tokenizer.

Lowercases, splits on whitespace and punctuation, keeps intra-token apostrophes
("alzheimer's") and a leading '#' or '@' ("#flu", "@user"). No stemming, no
stopword removal.
"""

import re

# Typographic apostrophes are folded into ASCII before matching.
_APOSTROPHES = str.maketrans({"’": "'", "‘": "'", "ʼ": "'"})

# [^\W_] is a Unicode letter or digit.
_TOKEN_RE = re.compile(r"[#@]?[^\W_]+(?:'[^\W_]+)*", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """
    Split a post into lowercased tokens.

    Args:
        text: Raw post text

    Returns:
        Token list (empty for empty text)
    """
    if not text:
        return []
    return _TOKEN_RE.findall(text.translate(_APOSTROPHES).lower())
