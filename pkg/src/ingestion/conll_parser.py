"""
CoNLL Dependency Tree Parser

Parses CoNLL-X / CoNLL-U style files into per-post dependency forests.

Format:
- one token per line, tab-separated columns (ID, FORM, ..., HEAD, ...)
- a blank line ends a sentence
- a comment line "# id = <post_id>" binds the following sentences to a post
- other comment lines are ignored; multiword ranges (3-4) and empty nodes
  (5.1) are skipped

Forms are lowercased so that tree labels match tokenizer output.
"""

import re
from collections import OrderedDict
from pathlib import Path
from typing import Optional

import structlog

from src.domain.errors import MissingInputError, TreebankFormatError
from src.domain.posts import Corpus
from src.domain.trees import DependencyForest, DependencyTree, TreeNode

logger = structlog.get_logger(__name__)

_POST_ID_RE = re.compile(r"^#\s*id\s*=\s*(.+?)\s*$")


class CoNLLParser:
    """Parse a CoNLL file into forests keyed by post id."""

    def __init__(self, id_col: int = 0, form_col: int = 1, head_col: int = 6):
        """
        Initialize parser.

        Args:
            id_col: Zero-based column of the token index
            form_col: Zero-based column of the word form
            head_col: Zero-based column of the head index
        """
        self.id_col = id_col
        self.form_col = form_col
        self.head_col = head_col
        self.sentence_count = 0

    def parse(self, path: Path) -> dict[str, DependencyForest]:
        """
        Parse all sentences in the file.

        Args:
            path: CoNLL file

        Returns:
            Mapping post id -> DependencyForest, in file order

        Raises:
            TreebankFormatError: malformed token line or sentence without a post id
            TreeStructureError: cycle, multiple roots or dangling head
        """
        path = Path(path)
        if not path.exists():
            raise MissingInputError(f"CoNLL file not found: {path}")

        sentences: "OrderedDict[str, list[DependencyTree]]" = OrderedDict()
        post_id: Optional[str] = None
        block: list[TreeNode] = []
        block_start = 0

        def flush():
            nonlocal block
            if not block:
                return
            if post_id is None:
                raise TreebankFormatError(
                    f"{path}:{block_start}: sentence appears before any '# id = ...' line"
                )
            sentences.setdefault(post_id, []).append(DependencyTree(tuple(block), post_id=post_id))
            self.sentence_count += 1
            block = []

        with open(path, "r", encoding="utf-8") as f:
            for line_num, raw in enumerate(f, 1):
                line = raw.rstrip("\r\n")
                if not line.strip():
                    flush()
                    continue
                if line.startswith("#"):
                    match = _POST_ID_RE.match(line)
                    if match:
                        flush()
                        post_id = match.group(1)
                    continue
                node = self._parse_token(line, line_num, path)
                if node is not None:
                    if not block:
                        block_start = line_num
                    block.append(node)
            flush()

        forests = {pid: DependencyForest(pid, tuple(trees)) for pid, trees in sentences.items()}
        logger.info("conll_loaded", path=str(path), posts=len(forests), sentences=self.sentence_count)
        return forests

    def _parse_token(self, line: str, line_num: int, path: Path) -> Optional[TreeNode]:
        columns = line.split("\t") if "\t" in line else line.split()
        needed = max(self.id_col, self.form_col, self.head_col) + 1
        if len(columns) < needed:
            raise TreebankFormatError(f"{path}:{line_num}: expected at least {needed} columns")

        token_id = columns[self.id_col]
        if "-" in token_id or "." in token_id:
            return None
        try:
            index = int(token_id)
            head = int(columns[self.head_col])
        except ValueError as e:
            raise TreebankFormatError(f"{path}:{line_num}: non-integer ID or HEAD column") from e
        return TreeNode(index=index, form=columns[self.form_col].lower(), head=head)


def load_conll(path: Path, id_col: int = 0, form_col: int = 1, head_col: int = 6) -> dict[str, DependencyForest]:
    """
    Load dependency forests from a CoNLL file.

    Args:
        path: CoNLL file
        id_col, form_col, head_col: Zero-based column positions

    Returns:
        Mapping post id -> DependencyForest
    """
    return CoNLLParser(id_col, form_col, head_col).parse(path)


def attach_trees(corpus: Corpus, forests: dict[str, DependencyForest]) -> tuple[Corpus, int]:
    """
    Bind forests to the posts with matching ids.

    Forests whose id matches no post are dropped and counted.

    Returns:
        (Corpus with trees attached, number of dropped forests)
    """
    known = set(corpus.ids)
    dropped = sum(1 for pid in forests if pid not in known)
    if dropped:
        logger.warning("trees_without_posts", dropped=dropped)
    attached = Corpus(tuple(post.with_tree(forests.get(post.id, post.tree)) for post in corpus))
    return attached, dropped
