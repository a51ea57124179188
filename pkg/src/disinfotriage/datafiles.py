"""Loaders for the bundled data snapshots (keyword lists, suffixes, WHOIS aliases)."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path

DATA_DIR = Path(__file__).parent / "data"


def _read_lines(path: Path) -> list[str]:
    lines = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


@lru_cache(maxsize=None)
def news_keywords(path: str | None = None) -> tuple[str, ...]:
    """The bundled news-keyword list (lowercase, one keyword per line)."""
    p = Path(path) if path else DATA_DIR / "news_keywords.txt"
    return tuple(k.lower() for k in _read_lines(p))


@lru_cache(maxsize=None)
def proxy_keywords(path: str | None = None) -> tuple[str, ...]:
    """Keywords indicating a WHOIS privacy/proxy registrant organization."""
    p = Path(path) if path else DATA_DIR / "proxy_keywords.txt"
    return tuple(k.lower() for k in _read_lines(p))


@lru_cache(maxsize=None)
def novelty_tlds(path: str | None = None) -> frozenset[str]:
    """TLDs treated as novelty TLDs."""
    p = Path(path) if path else DATA_DIR / "novelty_tlds.txt"
    return frozenset(k.lower().lstrip(".") for k in _read_lines(p))


@lru_cache(maxsize=None)
def public_suffixes(path: str | None = None) -> frozenset[str]:
    """Pinned public-suffix snapshot."""
    p = Path(path) if path else DATA_DIR / "public_suffixes.txt"
    return frozenset(s.lower() for s in _read_lines(p))


@lru_cache(maxsize=None)
def whois_aliases(path: str | None = None) -> dict[str, tuple[str, ...]]:
    """Field-name alias table for WHOIS key matching, keyed by canonical field."""
    p = Path(path) if path else DATA_DIR / "whois_aliases.json"
    raw = json.loads(p.read_text(encoding="utf-8"))
    return {field: tuple(a.lower() for a in aliases) for field, aliases in raw.items()}
