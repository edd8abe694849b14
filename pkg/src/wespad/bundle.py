"""
Model Bundle Serialization

A bundle is one UTF-8 JSON document holding every fitted component of a
WespadModel, its config and layout. Floats are written with repr precision, so
weights round-trip exactly at 64-bit precision. The embedding table is not
embedded: the bundle records its path, format and sha256 digest.

Keys are sorted and no timestamps are written, so identical fits produce
byte-identical bundles.
"""

import json
from pathlib import Path
from typing import Any, Optional

import structlog
from pydantic import ValidationError

from src.domain.errors import BundleError, BundleVersionError, CorruptBundleError, MissingInputError
from src.domain.trees import SubtreePattern
from src.embeddings.table import EmbeddingTable
from src.learners.logistic import LinearModel
from src.utils.hashing import file_sha256
from src.wespad.config import FeatureLayout, WespadConfig
from src.wespad.information_gain import IGWeights
from src.wespad.model import FeatureSpace, WespadModel, needs_embeddings
from src.wespad.regions import RegionFlagModel

logger = structlog.get_logger(__name__)

BUNDLE_FORMAT = "wespad-bundle"
BUNDLE_VERSION = 1

_REGION_SLOTS = ("regular", "distorted", "prev_context", "next_context")


def embeddings_ref(path: Path, format: str) -> dict[str, str]:
    """Reference to an embedding file as stored in bundles and manifests."""
    path = Path(path)
    return {"path": str(path), "format": format, "sha256": file_sha256(path)}


def bundle_to_dict(model: WespadModel) -> dict[str, Any]:
    f = model.features
    vocab = sorted(f.vocab, key=f.vocab.__getitem__)
    return {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "config": f.config.model_dump(),
        # A list keeps the group order, which sorted keys would lose.
        "layout": [[name, size] for name, size in f.layout.sizes.items()],
        "vocab": vocab,
        "patterns": [
            {
                "encoding": [[depth, label] for depth, label in p.encoding],
                "support": p.support,
                "feature_index": p.feature_index,
            }
            for p in f.patterns
        ],
        "ig": None if f.ig is None else f.ig.to_dict(),
        "regions": {
            slot: (None if getattr(f, slot) is None else getattr(f, slot).to_dict())
            for slot in _REGION_SLOTS
        },
        "final_classifier": model.final_classifier.to_dict(),
        "embeddings": model.embeddings_ref,
    }


def bundle_from_dict(data: dict[str, Any], table: Optional[EmbeddingTable] = None) -> WespadModel:
    """
    Rebuild a model from its bundle document.

    Raises:
        CorruptBundleError: wrong format tag or missing/invalid fields
        BundleVersionError: unsupported version
    """
    if not isinstance(data, dict) or data.get("format") != BUNDLE_FORMAT:
        raise CorruptBundleError("Not a wespad model bundle")
    if data.get("version") != BUNDLE_VERSION:
        raise BundleVersionError(
            f"Unsupported bundle version {data.get('version')!r}; this build reads version {BUNDLE_VERSION}"
        )
    try:
        config = WespadConfig(**data["config"])
        layout = FeatureLayout(sizes={str(name): int(size) for name, size in data["layout"]})
        patterns = tuple(
            SubtreePattern(
                encoding=tuple((int(depth), str(label)) for depth, label in p["encoding"]),
                support=int(p["support"]),
                feature_index=int(p["feature_index"]),
            )
            for p in data["patterns"]
        )
        regions = {
            slot: (None if data["regions"][slot] is None else RegionFlagModel.from_dict(data["regions"][slot]))
            for slot in _REGION_SLOTS
        }
        features = FeatureSpace(
            config=config,
            layout=layout,
            vocab={word: i for i, word in enumerate(data["vocab"])},
            patterns=patterns,
            ig=None if data["ig"] is None else IGWeights.from_dict(data["ig"]),
            table=table,
            **regions,
        )
        final = LinearModel.from_dict(data["final_classifier"])
        ref = data["embeddings"]
    except (KeyError, TypeError, ValueError, ValidationError) as e:
        raise CorruptBundleError(f"Bundle is missing or has invalid fields: {e}") from e

    if final.dim != layout.dim:
        raise CorruptBundleError(f"Classifier dim {final.dim} != layout dim {layout.dim}")
    if needs_embeddings(config) and table is None:
        raise MissingInputError("This bundle needs its embedding table (--embeddings)")
    return WespadModel(features=features, final_classifier=final, embeddings_ref=ref)


def save_bundle(model: WespadModel, path: Path) -> Path:
    """Write the bundle; returns the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(bundle_to_dict(model), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    path.write_text(text + "\n", encoding="utf-8")
    logger.info("bundle_saved", path=str(path), dim=model.layout.dim)
    return path


def read_bundle(path: Path) -> dict[str, Any]:
    """Parse a bundle file without rebuilding the model."""
    path = Path(path)
    if not path.exists():
        raise MissingInputError(f"Bundle not found: {path} (--bundle)")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise CorruptBundleError(f"{path}: not valid JSON: {e}") from e


def load_bundle(path: Path, table: Optional[EmbeddingTable] = None) -> WespadModel:
    """Read and rebuild a model bundle."""
    model = bundle_from_dict(read_bundle(path), table)
    logger.info("bundle_loaded", path=str(path), dim=model.layout.dim)
    return model


def verify_embeddings(model: WespadModel, path: Path) -> None:
    """
    Check that `path` holds the embedding file the model was trained with.

    Raises:
        BundleError: digest differs from the recorded one
    """
    ref = model.embeddings_ref
    if not ref:
        return
    actual = file_sha256(Path(path))
    if actual != ref.get("sha256"):
        raise BundleError(
            f"Embeddings {path} do not match the training embeddings "
            f"(sha256 {actual[:12]} != {str(ref.get('sha256'))[:12]})"
        )
