"""Shipped fixture configurations (see data/fixtures/README.md)."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .lattice_core import Configuration


def _dir():
    return resources.files("latrigid") / "data" / "fixtures"


def names() -> list:
    return sorted(p.name[:-4] for p in _dir().iterdir() if p.name.endswith(".txt"))


def path(name: str):
    return _dir() / f"{name}.txt"


@lru_cache(maxsize=None)
def load(name: str) -> Configuration:
    from .cli_io import parse_config

    return parse_config(path(name).read_text())


def description(name: str) -> str:
    first = path(name).read_text().splitlines()[0]
    return first.split(":", 1)[1].strip() if ":" in first else ""
