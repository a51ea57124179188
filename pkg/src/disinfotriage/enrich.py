"""Network metadata: IP-to-ASN, IP-to-country, and WordPress fingerprinting.

Lookup tables are offline snapshots loaded once and shared read-only;
nothing here touches the network.
"""

from __future__ import annotations

import csv
import ipaddress
import re
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class CmsInfo:
    wordpress: bool = False
    plugins: frozenset[str] = frozenset()
    theme: str | None = None


class AsnTable:
    """Prefix-to-AS snapshot with longest-prefix-match lookup.

    File format: one `prefix<TAB>asn<TAB>name` line per route. Lookup masks
    the address at each prefix length present in the table, longest first,
    so cost scales with the number of distinct lengths rather than rows.
    """

    def __init__(self, entries: list[tuple[str, int, str]]):
        # (version, prefixlen) -> {network_int: (asn, name)}
        self._buckets: dict[tuple[int, int], dict[int, tuple[int, str]]] = {}
        seen: set[str] = set()
        for prefix, asn, name in entries:
            network = ipaddress.ip_network(prefix)
            key = network.with_prefixlen
            if key in seen:
                raise ValueError(f"duplicate prefix {key}")
            seen.add(key)
            bucket = self._buckets.setdefault((network.version, network.prefixlen), {})
            bucket[int(network.network_address)] = (int(asn), name)
        self._lengths = {
            version: sorted((l for v, l in self._buckets if v == version), reverse=True)
            for version in {v for v, _ in self._buckets}
        }

    @classmethod
    def load(cls, path: str | Path) -> "AsnTable":
        entries = []
        for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{line_no}: expected prefix<TAB>asn<TAB>name")
            entries.append((parts[0], int(parts[1]), parts[2]))
        return cls(entries)

    def lookup(self, ip: str) -> tuple[int, str] | None:
        address = ipaddress.ip_address(ip)
        bits = address.max_prefixlen
        value = int(address)
        for length in self._lengths.get(address.version, ()):
            masked = value >> (bits - length) << (bits - length) if length else 0
            hit = self._buckets[(address.version, length)].get(masked)
            if hit is not None:
                return hit
        return None


def asn_lookup(ip: str, table: AsnTable) -> tuple[int, str] | None:
    return table.lookup(ip)


class GeoTable:
    """Inclusive IP ranges to ISO country codes, binary-searched by start."""

    def __init__(self, entries: list[tuple[str, str, str]]):
        rows = []
        for start, end, country in entries:
            lo = ipaddress.ip_address(start)
            hi = ipaddress.ip_address(end)
            if lo.version != hi.version or int(lo) > int(hi):
                raise ValueError(f"invalid range {start}-{end}")
            country = country.strip().upper()
            if not re.fullmatch(r"[A-Z]{2}", country):
                raise ValueError(f"country code must be 2 letters, got {country!r}")
            rows.append((lo.version, int(lo), int(hi), country))
        rows.sort()
        for prev, cur in zip(rows, rows[1:]):
            if prev[0] == cur[0] and cur[1] <= prev[2]:
                raise ValueError("overlapping ranges after normalization")
        self._rows = rows
        self._starts = [(v, lo) for v, lo, _, _ in rows]

    @classmethod
    def load(cls, path: str | Path) -> "GeoTable":
        entries = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                if len(row) != 3:
                    raise ValueError(f"{path}: expected start,end,country rows")
                entries.append((row[0].strip(), row[1].strip(), row[2]))
        return cls(entries)

    def lookup(self, ip: str) -> str | None:
        import bisect

        address = ipaddress.ip_address(ip)
        key = (address.version, int(address))
        index = bisect.bisect_right(self._starts, key) - 1
        if index < 0:
            return None
        version, lo, hi, country = self._rows[index]
        if version == address.version and lo <= int(address) <= hi:
            return country
        return None


def geo_lookup(ip: str, table: GeoTable) -> str | None:
    return table.lookup(ip)


_PLUGIN_RE = re.compile(r"wp-content/plugins/([A-Za-z0-9_.-]+)/")
_THEME_RE = re.compile(r"wp-content/themes/([A-Za-z0-9_.-]+)/")
_ASSET_RE = re.compile(r"wp-(?:content|includes)/")
_META_RE = re.compile(r"<meta\b[^>]*>", re.IGNORECASE)


def _generator_names_wordpress(tag: str) -> bool:
    if not re.search(r"name\s*=\s*[\"']?generator", tag, re.IGNORECASE):
        return False
    content = re.search(r"content\s*=\s*[\"']([^\"']*)[\"']", tag, re.IGNORECASE)
    return bool(content and "wordpress" in content.group(1).lower())


def fingerprint_cms(body: str, headers: list[tuple[str, str]] | None = None) -> CmsInfo:
    """Detect WordPress, installed plugin slugs, and the active theme.

    The signal is body-only: wp-content/wp-includes asset paths or a
    generator meta tag. With several theme paths the lexicographically
    smallest slug wins.
    """
    if not body:
        return CmsInfo()

    wordpress = bool(_ASSET_RE.search(body)) or any(
        _generator_names_wordpress(tag) for tag in _META_RE.findall(body)
    )
    if not wordpress:
        return CmsInfo()

    plugins = frozenset(_PLUGIN_RE.findall(body))
    themes = sorted(set(_THEME_RE.findall(body)))
    return CmsInfo(wordpress=True, plugins=plugins, theme=themes[0] if themes else None)
