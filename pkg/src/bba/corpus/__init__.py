"""Bundled example algebras, complexes and maps."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

FILES = (
    "kodaira-thurston.alg",
    "filiform.alg",
    "hopf.alg",
    "hopf-quotient.alg",
    "hopf-to-quotient.map",
    "calabi-eckmann.alg",
    "flag-su3.alg",
    "flag-su3-invariant.cx",
    "flag-to-invariant.map",
    "iwasawa-sub.alg",
)


def path(name: str) -> Path:
    """Filesystem path of a bundled file (``.alg`` is appended if missing)."""
    root = resources.files(__name__)
    cand = root / name
    if not cand.is_file():
        for ext in (".alg", ".cx", ".map"):
            if (root / (name + ext)).is_file():
                cand = root / (name + ext)
                break
    return Path(str(cand))


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")
