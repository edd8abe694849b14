#!/usr/bin/env python3
"""
WESPAD Command Launcher

Runs the wespad CLI from a source checkout without installing the package.

Usage:
    python scripts/wespad.py gen-fixture --seed 7 --out fixture/
    python scripts/wespad.py cv --posts fixture/posts.jsonl --embeddings fixture/embeddings.txt
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
