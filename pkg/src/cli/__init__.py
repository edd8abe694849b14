"""Command-line entry point and run manifests"""

from src.cli.main import build_parser, main
from src.cli.manifest import RunManifest

__all__ = [
    'build_parser',
    'main',
    'RunManifest',
]
