"""Bundled data files: vector sets (.vec) and prepare/measure fragments (.frag)."""

from pathlib import Path

ROOT = Path(__file__).resolve().parent


def vector_path(name: str) -> Path:
    """Path of a bundled vector-set file, e.g. vector_path('peres33.vec')."""
    return ROOT / "vectors" / name


def fragment_path(name: str) -> Path:
    """Path of a bundled fragment file, e.g. fragment_path('d2_zx.frag')."""
    return ROOT / "fragments" / name


def list_vector_sets():
    return sorted(p.name for p in (ROOT / "vectors").glob("*.vec"))


def list_fragments():
    return sorted(p.name for p in (ROOT / "fragments").glob("*.frag"))
