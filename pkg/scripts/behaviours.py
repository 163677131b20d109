"""
Command-line entry point, e.g.

    python scripts/behaviours.py member data/documents/anbn.stack --start q0 --stack Z --word aabb
"""
import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
