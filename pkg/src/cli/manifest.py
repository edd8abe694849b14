"""
Run Manifests

Every command writes a manifest next to its outputs: the config snapshot, the
sha256 digest of each input file, the seed, the tool version and timing.
"""

import json
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional

from src import __version__
from src.utils.hashing import file_sha256


@dataclass
class RunManifest:
    """Provenance of one command run."""
    command: str
    seed: int
    config: dict[str, Any] = field(default_factory=dict)
    inputs: dict[str, dict[str, str]] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    version: str = __version__
    started_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    elapsed_seconds: Optional[float] = None
    plan_hash: Optional[str] = None
    _clock: float = field(default_factory=time.perf_counter, repr=False)

    def add_input(self, name: str, path: Optional[Path]) -> None:
        if path is None:
            return
        path = Path(path)
        self.inputs[name] = {"path": str(path), "sha256": file_sha256(path)}

    def add_outputs(self, paths) -> None:
        self.outputs.extend(str(p) for p in paths)

    def finish(self) -> "RunManifest":
        self.elapsed_seconds = round(time.perf_counter() - self._clock, 3)
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "started_at": self.started_at,
            "elapsed_seconds": self.elapsed_seconds,
            "plan_hash": self.plan_hash,
        }

    def write(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path
