"""Timed systems with data structures, graph realizability and dynamic logic."""

from pathlib import Path

__version__ = "0.1.0"


def data_path(name: str) -> Path:
    """Location of a bundled example file (graphs, systems, specifications)."""
    return Path(__file__).with_name("data") / name
