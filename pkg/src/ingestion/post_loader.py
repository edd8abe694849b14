"""
Post File Loader

Parses labeled posts from JSONL or two-column TSV into a Corpus.

JSONL: one object per line with id, text, label and optional topic,
prev_text, next_text.
TSV: label TAB text, UTF-8, no header; ids are generated from line numbers.

The first malformed record aborts the load with its line number. Blank lines
are skipped.
"""

import json
from pathlib import Path
from typing import Iterator

import structlog

from src.domain.errors import DuplicatePostIdError, MissingInputError, PostParseError, UnknownLabelError
from src.domain.posts import Corpus, Label, Post

logger = structlog.get_logger(__name__)

POST_FORMATS = ("jsonl", "tsv")


class PostLoader:
    """Parse a post file into Post records."""

    REQUIRED_FIELDS = ("id", "text", "label")
    OPTIONAL_FIELDS = ("topic", "prev_text", "next_text")

    def __init__(self, path: Path, format: str = "jsonl"):
        """
        Initialize loader.

        Args:
            path: Post file
            format: 'jsonl' or 'tsv'
        """
        if format not in POST_FORMATS:
            raise ValueError(f"Unknown post format {format!r} (expected one of {POST_FORMATS})")
        self.path = Path(path)
        self.format = format
        self.parsed_count = 0
        self.skipped_count = 0

    def parse(self) -> Iterator[Post]:
        """
        Parse the file line by line.

        Yields:
            Post objects in file order
        """
        if not self.path.exists():
            raise MissingInputError(f"Post file not found: {self.path}")

        parse_line = self._parse_json_line if self.format == "jsonl" else self._parse_tsv_line
        with open(self.path, "r", encoding="utf-8") as f:
            for line_num, line in enumerate(f, 1):
                line = line.rstrip("\r\n")
                if not line.strip():
                    self.skipped_count += 1
                    continue
                post = parse_line(line, line_num)
                self.parsed_count += 1
                yield post

    def _parse_json_line(self, line: str, line_num: int) -> Post:
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise PostParseError(self.path, line_num, f"invalid JSON ({e.msg})") from e
        if not isinstance(record, dict):
            raise PostParseError(self.path, line_num, "record is not a JSON object")

        missing = [name for name in self.REQUIRED_FIELDS if record.get(name) is None]
        if missing:
            raise PostParseError(self.path, line_num, f"missing field(s): {', '.join(missing)}")

        optional = {}
        for name in self.OPTIONAL_FIELDS:
            value = record.get(name)
            if value is not None and not isinstance(value, str):
                raise PostParseError(self.path, line_num, f"field {name!r} must be a string")
            optional[name] = value

        return Post(
            id=str(record["id"]),
            text=str(record["text"]),
            label=self._parse_label(record["label"], line_num),
            **optional,
        )

    def _parse_tsv_line(self, line: str, line_num: int) -> Post:
        if "\t" not in line:
            raise PostParseError(self.path, line_num, "expected 'label<TAB>text'")
        label, text = line.split("\t", 1)
        return Post(
            id=f"line-{line_num}",
            text=text,
            label=self._parse_label(label, line_num),
        )

    def _parse_label(self, value, line_num: int) -> Label:
        try:
            return Label.parse(value)
        except UnknownLabelError:
            logger.error("unknown_label", path=str(self.path), line=line_num, label=str(value))
            raise


def load_posts(path: Path, format: str = "jsonl") -> Corpus:
    """
    Load a post file into a Corpus.

    Args:
        path: Post file
        format: 'jsonl' or 'tsv'

    Returns:
        Corpus with posts in file order

    Raises:
        PostParseError: malformed record (carries the line number)
        UnknownLabelError: label spelling not recognised
        DuplicatePostIdError: two records share an id
    """
    loader = PostLoader(path, format)
    posts = list(loader.parse())
    try:
        corpus = Corpus(tuple(posts))
    except DuplicatePostIdError as e:
        logger.error("duplicate_post_id", path=str(path), post_id=e.post_id)
        raise

    logger.info(
        "posts_loaded",
        path=str(path),
        posts=len(corpus),
        positive=corpus.positive_count,
        negative=corpus.negative_count,
        blank_lines=loader.skipped_count,
    )
    return corpus
