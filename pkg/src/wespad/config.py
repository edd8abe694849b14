"""
WESPAD Model Configuration

Hyperparameters, feature-group toggles and the feature-space layout derived
from them. Configurations serialise to flat JSON so the same object can be
stored in manifests, bundles and config files.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.domain.errors import MissingInputError, InputError


class FeatureGroup(str, Enum):
    """Feature groups in layout order."""
    LEX = "lex_feats"
    SYN = "syn_feats"
    CENTROID = "centroid"
    PARTITIONING = "we_partitioning"
    DISTORTION = "we_distortion"
    CONTEXT_PREV = "context_prev"
    CONTEXT_NEXT = "context_next"


class WespadConfig(BaseModel):
    """Complete configuration of one fit."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # Noisy-region thresholds and partition counts, regular (alpha, K) and distorted (alpha2, K2) space
    alpha: float = Field(default=0.15, ge=0.0, lt=0.5)
    alpha2: float = Field(default=0.15, ge=0.0, lt=0.5)
    k_partitions: int = Field(default=4, ge=1)
    k2_partitions: int = Field(default=4, ge=1)

    # Logistic regression
    l2: float = Field(default=1.0, ge=0.0)
    max_iter: int = Field(default=200, ge=1)
    tol: float = Field(default=1e-6, gt=0.0)

    # k-means
    kmeans_restarts: int = Field(default=5, ge=1)
    kmeans_max_iter: int = Field(default=100, ge=1)

    # Subtree mining
    min_support: int = Field(default=10, ge=1)
    min_size: int = Field(default=2, ge=1)
    max_size: Optional[int] = Field(default=None, ge=1)
    per_class_mining: bool = False

    # Feature groups
    lex_feats: bool = True
    syn_feats: bool = True
    centroid: bool = False
    we_partitioning: bool = True
    we_distortion: bool = True
    context_prev: bool = True
    context_next: bool = True
    context_distorted: bool = False

    seed: int = 0

    def enabled(self, group: FeatureGroup) -> bool:
        return bool(getattr(self, group.value))

    @property
    def enabled_groups(self) -> list[FeatureGroup]:
        return [group for group in FeatureGroup if self.enabled(group)]

    def with_overrides(self, **overrides: Any) -> "WespadConfig":
        """New config with the given fields replaced and re-validated."""
        return WespadConfig(**{**self.model_dump(), **overrides})

    def without(self, *groups: FeatureGroup) -> "WespadConfig":
        return self.with_overrides(**{FeatureGroup(g).value: False for g in groups})

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), sort_keys=True)


def load_config(path: Path) -> WespadConfig:
    """
    Read a flat JSON config file.

    Raises:
        MissingInputError: file does not exist
        InputError: invalid JSON, unknown key or out-of-range value
    """
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"Config file not found: {path} (--config)")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InputError(f"{path}: config must be a JSON object")
    try:
        return WespadConfig(**data)
    except ValidationError as e:
        raise InputError(f"{path}: invalid config: {e}") from e


class FeatureLayout(BaseModel):
    """
    Offsets of the enabled feature groups in the final feature vector.

    Groups are laid out contiguously in FeatureGroup order; disabled groups
    are absent entirely.
    """

    model_config = ConfigDict(frozen=True)

    sizes: dict[str, int]

    @classmethod
    def build(cls, sizes: dict[FeatureGroup, int]) -> "FeatureLayout":
        return cls(sizes={group.value: int(sizes[group]) for group in FeatureGroup if group in sizes})

    @property
    def offsets(self) -> dict[str, int]:
        offsets: dict[str, int] = {}
        position = 0
        for name, size in self.sizes.items():
            offsets[name] = position
            position += size
        return offsets

    @property
    def dim(self) -> int:
        return sum(self.sizes.values())

    def has(self, group: FeatureGroup) -> bool:
        return group.value in self.sizes

    def offset(self, group: FeatureGroup) -> int:
        return self.offsets[group.value]

    def size(self, group: FeatureGroup) -> int:
        return self.sizes[group.value]
