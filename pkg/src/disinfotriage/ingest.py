"""Feed ingestion: normalize registration/certificate/social events into candidate domains.

Replay files are UTF-8 with one JSON record per line:
  registration: {"domain": "...", "ts": "<ISO 8601 UTC>"}
  certificate:  {"san_list": ["...", ...], "ts": "..."}  (a "domain" field is also accepted)
  social:       {"text": "... https://host/path ...", "ts": "..."}
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Iterable, Iterator

from . import datafiles

FEED_KINDS = ("registration", "certificate", "social")

STAGE_BY_FEED = {
    "registration": "registered",
    "certificate": "certified",
    "social": "shared",
}

_DOMAIN_RE = re.compile(r"^[a-z0-9.-]+$")
_URL_RE = re.compile(r"https?://[^\s<>\"']+")


class NotRegistrableError(ValueError):
    """Hostname is equal to or shorter than its public suffix."""


@dataclass(frozen=True)
class FeedEvent:
    feed_kind: str
    raw_line: str
    observed_at: datetime


@dataclass(frozen=True)
class CandidateDomain:
    domain: str
    source: str
    first_seen: datetime
    stage: str


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO 8601 timestamp into an aware UTC datetime."""
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def registrable_domain(hostname: str, suffixes: frozenset[str] | None = None) -> str:
    """Reduce a hostname to its registrable domain (longest public suffix + one label).

    An unmatched trailing label is treated as the public suffix itself, so the
    result is total for any multi-label hostname.
    """
    if suffixes is None:
        suffixes = datafiles.public_suffixes()
    hostname = hostname.strip(".").lower()
    labels = hostname.split(".")
    if len(labels) < 2 or not all(labels):
        raise NotRegistrableError(f"not a registrable hostname: {hostname!r}")
    suffix_len = 1  # fall back to the bare TLD
    for take in range(2, len(labels) + 1):
        if ".".join(labels[-take:]) in suffixes:
            suffix_len = take
    if suffix_len >= len(labels):
        raise NotRegistrableError(f"hostname is a bare public suffix: {hostname!r}")
    return ".".join(labels[-(suffix_len + 1):])


def public_suffix_of(domain: str, suffixes: frozenset[str] | None = None) -> str:
    """The public-suffix tail of a registrable domain."""
    if suffixes is None:
        suffixes = datafiles.public_suffixes()
    labels = domain.lower().split(".")
    suffix_len = 1
    for take in range(2, len(labels)):
        if ".".join(labels[-take:]) in suffixes:
            suffix_len = take
    return ".".join(labels[-suffix_len:])


def strip_public_suffix(domain: str, suffixes: frozenset[str] | None = None) -> str:
    """The domain with its public-suffix tail (and the joining dot) removed."""
    stem = domain.lower()
    suffix = public_suffix_of(stem, suffixes)
    if stem.endswith("." + suffix):
        return stem[: -(len(suffix) + 1)]
    return stem


def keyword_prefilter(domain: str, keywords: Iterable[str] | None = None) -> bool:
    """True iff any news keyword is a substring of the domain with its TLD removed."""
    if keywords is None:
        keywords = datafiles.news_keywords()
    stem = strip_public_suffix(domain)
    return any(kw in stem for kw in keywords)


def _hostname_from_url(url: str) -> str | None:
    from urllib.parse import urlsplit

    host = urlsplit(url).hostname
    return host.lower() if host else None


def parse_feed_event(event: FeedEvent) -> CandidateDomain | None:
    """Extract the registrable domain from one feed record; None when there is none."""
    try:
        record = json.loads(event.raw_line)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return None
    if not isinstance(record, dict):
        return None

    host: str | None = None
    if event.feed_kind == "registration":
        host = record.get("domain")
    elif event.feed_kind == "certificate":
        host = record.get("domain")
        if not host:
            san_list = record.get("san_list") or []
            if isinstance(san_list, list) and san_list:
                host = str(san_list[0])
    elif event.feed_kind == "social":
        text = record.get("text") or ""
        match = _URL_RE.search(str(text))
        if match:
            host = _hostname_from_url(match.group(0))
    else:
        return None

    if not host or not isinstance(host, str):
        return None
    host = host.lower().removeprefix("*.").strip(".")
    if not _DOMAIN_RE.match(host):
        return None
    try:
        domain = registrable_domain(host)
    except NotRegistrableError:
        return None
    return CandidateDomain(
        domain=domain,
        source=event.feed_kind,
        first_seen=event.observed_at,
        stage=STAGE_BY_FEED[event.feed_kind],
    )


@dataclass
class FeedStats:
    events: int = 0
    skipped: int = 0
    prefilter_rejected: int = 0


def read_feed(path: str, feed_kind: str, stats: FeedStats | None = None) -> Iterator[FeedEvent]:
    """Yield events from a replay file, skipping (and counting) malformed records.

    Records whose timestamps regress within the file are treated as malformed.
    """
    if stats is None:
        stats = FeedStats()
    last_ts: datetime | None = None
    with open(path, encoding="utf-8", errors="replace") as handle:
        for raw_line in handle:
            line = raw_line.strip()
            if not line:
                continue
            stats.events += 1
            try:
                record = json.loads(line)
                ts = parse_timestamp(record["ts"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                stats.skipped += 1
                continue
            if last_ts is not None and ts < last_ts:
                stats.skipped += 1
                continue
            last_ts = ts
            yield FeedEvent(feed_kind=feed_kind, raw_line=line, observed_at=ts)


class Admitter:
    """Deduplicates candidates across feeds; the single serialization point for ingestion."""

    def __init__(self, window: timedelta = timedelta(days=7)):
        if window <= timedelta(0):
            raise ValueError("window must be positive")
        self.window = window
        self._last_admitted: dict[str, datetime] = {}
        self._lock = threading.Lock()

    def admit(self, candidate: CandidateDomain) -> bool:
        with self._lock:
            previous = self._last_admitted.get(candidate.domain)
            if previous is not None and candidate.first_seen - previous < self.window:
                return False
            self._last_admitted[candidate.domain] = candidate.first_seen
            return True

    def seen(self, domain: str, at: datetime):
        """Record an admission that happened outside this process, e.g. a
        domain already present in the archive from an earlier replay."""
        with self._lock:
            self._last_admitted[domain] = at


def candidate_stream(
    feeds: dict[str, str],
    admitter: Admitter,
    keywords: Iterable[str] | None = None,
    stats: FeedStats | None = None,
) -> Iterator[CandidateDomain]:
    """Parse, prefilter (registration feed only), and dedup feed files into candidates.

    ``feeds`` maps feed kind to replay-file path. Files are consumed in the
    fixed kind order so replays are deterministic.
    """
    if stats is None:
        stats = FeedStats()
    if keywords is None:
        keywords = datafiles.news_keywords()
    for kind in FEED_KINDS:
        path = feeds.get(kind)
        if not path:
            continue
        for event in read_feed(path, kind, stats):
            candidate = parse_feed_event(event)
            if candidate is None:
                stats.skipped += 1
                continue
            if kind == "registration" and not keyword_prefilter(candidate.domain, keywords):
                stats.prefilter_rejected += 1
                continue
            if admitter.admit(candidate):
                yield candidate
