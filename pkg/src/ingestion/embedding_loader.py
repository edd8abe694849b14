"""
Embedding File Loader

Reads pretrained word vectors in three formats:
- word2vec-text: header "<vocab_count> <dim>", then "word v1 ... vd" rows
- word2vec-binary: the same header, then per word "word<space>" followed by
  dim little-endian float32 values (an optional newline may follow)
- glove-text: no header; dim is taken from the first row

Duplicate words keep their first occurrence. An optional vocabulary restricts
which rows are kept, to shrink memory for large tables.
"""

from pathlib import Path
from typing import BinaryIO, Iterable, Optional

import numpy as np
import structlog

from src.domain.errors import (
    DimensionMismatchError,
    EmbeddingFormatError,
    MalformedHeaderError,
    MissingInputError,
)
from src.embeddings.table import EmbeddingTable
from src.utils.config import EMBEDDING_FORMATS

logger = structlog.get_logger(__name__)


class EmbeddingLoader:
    """Parse an embedding file into an EmbeddingTable."""

    def __init__(self, path: Path, format: str = "word2vec-text", vocabulary: Optional[Iterable[str]] = None):
        """
        Initialize loader.

        Args:
            path: Embedding file
            format: One of word2vec-binary, word2vec-text, glove-text
            vocabulary: If given, only these words are kept
        """
        if format not in EMBEDDING_FORMATS:
            raise ValueError(f"Unknown embedding format {format!r} (expected one of {EMBEDDING_FORMATS})")
        self.path = Path(path)
        self.format = format
        self.vocabulary = None if vocabulary is None else frozenset(vocabulary)
        self.duplicate_count = 0
        self.skipped_count = 0

    def load(self) -> EmbeddingTable:
        """
        Read the whole file.

        Returns:
            EmbeddingTable

        Raises:
            MalformedHeaderError: bad word2vec header
            DimensionMismatchError: a row with the wrong component count
            EmbeddingFormatError: other format violations
        """
        if not self.path.exists():
            raise MissingInputError(f"Embedding file not found: {self.path}")

        if self.format == "word2vec-binary":
            words, rows, dim = self._load_binary()
        else:
            words, rows, dim = self._load_text(has_header=self.format == "word2vec-text")

        matrix = np.vstack(rows) if rows else np.zeros((0, dim or 0))
        table = EmbeddingTable(words=tuple(words), matrix=matrix, source=self.format)
        logger.info(
            "embeddings_loaded",
            path=str(self.path),
            format=self.format,
            words=len(table),
            dim=table.dim,
            duplicates=self.duplicate_count,
            skipped=self.skipped_count,
        )
        if self.duplicate_count:
            logger.warning("duplicate_embedding_words", count=self.duplicate_count)
        return table

    def _keep(self, word: str, seen: set[str]) -> bool:
        if word in seen:
            self.duplicate_count += 1
            return False
        if self.vocabulary is not None and word not in self.vocabulary:
            self.skipped_count += 1
            return False
        return True

    @staticmethod
    def _parse_header(line: str) -> tuple[int, int]:
        parts = line.split()
        if len(parts) != 2:
            raise MalformedHeaderError(f"Expected '<vocab_count> <dim>' header, got {line.strip()!r}")
        try:
            count, dim = int(parts[0]), int(parts[1])
        except ValueError as e:
            raise MalformedHeaderError(f"Non-integer header {line.strip()!r}") from e
        if count < 0 or dim < 1:
            raise MalformedHeaderError(f"Invalid header values {line.strip()!r}")
        return count, dim

    def _load_text(self, has_header: bool) -> tuple[list[str], list[np.ndarray], Optional[int]]:
        words: list[str] = []
        rows: list[np.ndarray] = []
        seen: set[str] = set()
        dim: Optional[int] = None

        with open(self.path, "r", encoding="utf-8") as f:
            for line_num, line in enumerate(f, 1):
                if has_header and line_num == 1:
                    _, dim = self._parse_header(line)
                    continue
                parts = line.rstrip("\r\n").split()
                if not parts:
                    continue
                word, values = parts[0], parts[1:]
                if dim is None:
                    dim = len(values)
                    if dim == 0:
                        raise EmbeddingFormatError(f"Row {line_num}: word {word!r} has no components")
                if len(values) != dim:
                    raise DimensionMismatchError(line_num, dim, len(values))
                if not self._keep(word, seen):
                    continue
                try:
                    vector = np.array(values, dtype=np.float64)
                except ValueError as e:
                    raise EmbeddingFormatError(f"Row {line_num}: non-numeric component") from e
                if not np.all(np.isfinite(vector)):
                    raise EmbeddingFormatError(f"Row {line_num}: non-finite component")
                seen.add(word)
                words.append(word)
                rows.append(vector)

        return words, rows, dim

    def _load_binary(self) -> tuple[list[str], list[np.ndarray], int]:
        words: list[str] = []
        rows: list[np.ndarray] = []
        seen: set[str] = set()

        with open(self.path, "rb") as f:
            header = f.readline()
            try:
                count, dim = self._parse_header(header.decode("utf-8"))
            except UnicodeDecodeError as e:
                raise MalformedHeaderError("Header is not UTF-8 text") from e

            width = 4 * dim
            for row_num in range(1, count + 1):
                word = self._read_word(f, row_num)
                payload = f.read(width)
                if len(payload) != width:
                    raise EmbeddingFormatError(
                        f"Entry {row_num}: truncated vector ({len(payload)} of {width} bytes)"
                    )
                if not self._keep(word, seen):
                    continue
                vector = np.frombuffer(payload, dtype="<f4").astype(np.float64)
                if not np.all(np.isfinite(vector)):
                    raise EmbeddingFormatError(f"Entry {row_num}: non-finite component")
                seen.add(word)
                words.append(word)
                rows.append(vector)

        return words, rows, dim

    @staticmethod
    def _read_word(f: BinaryIO, row_num: int) -> str:
        chars = bytearray()
        while True:
            ch = f.read(1)
            if not ch:
                raise EmbeddingFormatError(f"Entry {row_num}: unexpected end of file")
            if ch == b" ":
                break
            if ch != b"\n":  # newline left over from the previous entry
                chars.extend(ch)
        try:
            return chars.decode("utf-8")
        except UnicodeDecodeError as e:
            raise EmbeddingFormatError(f"Entry {row_num}: word is not UTF-8") from e


def load_embeddings(
    path: Path,
    format: str = "word2vec-text",
    vocabulary: Optional[Iterable[str]] = None,
) -> EmbeddingTable:
    """
    Load a pretrained embedding table.

    Args:
        path: Embedding file
        format: One of word2vec-binary, word2vec-text, glove-text
        vocabulary: Optional word restriction

    Returns:
        EmbeddingTable with a consistent dim
    """
    return EmbeddingLoader(path, format, vocabulary).load()
