"""Triage orchestration: configuration, the probe-to-queue pipeline,
classification with freshness reuse, decision-path explanations, and the
persistent moderation queue.

The pipeline consumes admitted candidate domains, probes them through a
transport, enriches and extracts features, archives every record, classifies
with the loaded forest, and enqueues domains whose predicted class is
disinformation for human review. Per-domain failures are recorded as
all-unavailable probes; they never abort a run.
"""

from __future__ import annotations

import json
import os
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import ingest
from .enrich import AsnTable, CmsInfo, GeoTable, fingerprint_cms
from .features import SPEC_BY_NAME, FeatureVector, extract
from .forest import Forest, predict_proba
from .probe import (
    CertObservation,
    DnsObservation,
    HttpObservation,
    ProbeLimits,
    ProbeRecord,
    WhoisObservation,
    probe_domain,
)
from .store import Archive, ArchiveEntry, LabeledExample, dataset_append, model_version
from .transport import FixtureTransport, LiveTransport


# --- configuration ----------------------------------------------------------

_PATH_KEYS = (
    "registration_feed", "certificate_feed", "social_feed",
    "asn_table", "geo_table",
    "archive", "dataset", "queue", "model", "fixture_root",
)


@dataclass(frozen=True)
class Config:
    """Runtime settings, normally read from a key=value file."""

    registration_feed: str | None = None
    certificate_feed: str | None = None
    social_feed: str | None = None
    asn_table: str | None = None
    geo_table: str | None = None
    archive: str = "archive.jsonl"
    dataset: str = "dataset.csv"
    queue: str = "queue.json"
    model: str = "model.json"
    fixture_root: str | None = None
    bind_host: str = "127.0.0.1"
    bind_port: int = 8300
    workers: int = 8
    dedup_window_hours: float = 168.0
    freshness_window_hours: float = 24.0

    def feeds(self) -> dict[str, str]:
        pairs = (
            ("registration", self.registration_feed),
            ("certificate", self.certificate_feed),
            ("social", self.social_feed),
        )
        return {kind: path for kind, path in pairs if path}

    def dedup_window(self) -> timedelta:
        return timedelta(hours=self.dedup_window_hours)

    def freshness_window(self) -> timedelta:
        return timedelta(hours=self.freshness_window_hours)

    def make_transport(self):
        if self.fixture_root:
            return FixtureTransport(self.fixture_root)
        return LiveTransport()

    def load_tables(self) -> tuple[AsnTable | None, GeoTable | None]:
        asn = AsnTable.load(self.asn_table) if self.asn_table else None
        geo = GeoTable.load(self.geo_table) if self.geo_table else None
        return asn, geo


def load_config(path: str | Path) -> Config:
    """Parse a key=value config file; '#' starts a comment.

    Relative paths are resolved against the config file's directory so a
    bundled replay setup works from any working directory.
    """
    path = Path(path)
    base = path.parent
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if key == "bind":
            host, _, port = value.rpartition(":")
            if not host or not port.isdigit():
                raise ValueError(f"{path}:{lineno}: bind must be host:port")
            values["bind_host"], values["bind_port"] = host, int(port)
        elif key == "workers":
            values[key] = int(value)
        elif key in ("dedup_window_hours", "freshness_window_hours"):
            values[key] = float(value)
        elif key in _PATH_KEYS:
            values[key] = str((base / value).resolve()) if value else None
        else:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    config = Config(**values)
    if config.workers < 1:
        raise ValueError("workers must be at least 1")
    if config.dedup_window_hours <= 0 or config.freshness_window_hours <= 0:
        raise ValueError("window hours must be positive")
    return config


# --- domain validation ------------------------------------------------------

_LABEL_RE = re.compile(r"^[a-z0-9]([a-z0-9-]{0,61}[a-z0-9])?$")


def normalize_domain(raw: str) -> str:
    """Lowercased registrable domain, or ValueError for malformed input."""
    if not isinstance(raw, str):
        raise ValueError("domain must be a string")
    domain = raw.strip().lower().rstrip(".")
    if "://" in domain or "/" in domain:
        raise ValueError("expected a bare domain, not a URL")
    if not domain or len(domain) > 253:
        raise ValueError("domain length out of range")
    labels = domain.split(".")
    if len(labels) < 2 or not all(_LABEL_RE.match(l) for l in labels):
        raise ValueError(f"malformed domain {raw!r}")
    return ingest.registrable_domain(domain)


# --- predictions and explanations -------------------------------------------


@dataclass(frozen=True)
class Prediction:
    domain: str
    probabilities: dict[str, float]
    predicted_class: str
    top_features: tuple[tuple[str, float], ...]
    model_version: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "domain": self.domain,
            "probabilities": dict(self.probabilities),
            "predicted_class": self.predicted_class,
            "top_features": [[name, value] for name, value in self.top_features],
            "model_version": self.model_version,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Prediction":
        return cls(
            domain=data["domain"],
            probabilities=dict(data["probabilities"]),
            predicted_class=data["predicted_class"],
            top_features=tuple((n, float(v)) for n, v in data["top_features"]),
            model_version=data["model_version"],
        )


def _column_source(forest: Forest, tree_column: int) -> str:
    """Source feature name for a tree's column index."""
    original = tree_column
    if forest.feature_mask is not None:
        # masked forests are trained on the kept columns in sorted order
        original = sorted(forest.feature_mask)[tree_column]
    if forest.encoder is not None:
        return forest.encoder.source_of(original)
    return f"col{original}"


def _source_rank(name: str) -> int:
    spec = SPEC_BY_NAME.get(name)
    if spec is not None:
        return spec.rank
    # encoder-less fallback names sort after catalog features, by column
    return 1000 + int(name[3:]) if name.startswith("col") else 9999


def explain_contributions(
    forest: Forest, row: np.ndarray, class_index: int | None = None
) -> dict[str, float]:
    """Per-source-feature contribution to the predicted-class probability.

    Walks each tree root to leaf and attributes to the split feature the
    change in the target class's frequency between parent and child, then
    averages over trees. Every feature the forest uses appears in the
    result, so the values sum to the forest probability minus the mean root
    prior for the target class.
    """
    row = np.asarray(row, dtype=np.float64).reshape(-1)
    if class_index is None:
        probs = predict_proba(forest, row)
        class_index = int(np.argmax(probs))

    sums: dict[str, float] = {}
    stack = list(forest.trees)
    while stack:  # seed with every feature the forest can use
        node = stack.pop()
        if not node.is_leaf:
            sums.setdefault(_column_source(forest, node.feature_index), 0.0)
            stack.extend((node.left, node.right))

    for tree in forest.trees:
        node = tree
        while not node.is_leaf:
            counts = node.class_counts
            parent_p = counts[class_index] / sum(counts)
            child = node.left if row[node.feature_index] <= node.threshold else node.right
            c_counts = child.class_counts
            child_p = c_counts[class_index] / sum(c_counts)
            name = _column_source(forest, node.feature_index)
            sums[name] = sums.get(name, 0.0) + float(child_p - parent_p)
            node = child

    n = len(forest.trees)
    return {name: value / n for name, value in sums.items()}


def top_features(contributions: dict[str, float], k: int = 3) -> tuple[tuple[str, float], ...]:
    """k largest contributions by magnitude; ties break to the better-ranked feature."""
    ordered = sorted(
        contributions.items(), key=lambda kv: (-abs(kv[1]), _source_rank(kv[0]), kv[0])
    )
    return tuple(ordered[:k])


def predict_vector(forest: Forest, vector: FeatureVector, domain: str) -> Prediction:
    """Classify one feature vector and attach its top-3 explanation."""
    if forest.encoder is None:
        raise ValueError("model has no encoder; train it on feature vectors")
    row = forest.encoder.transform(vector)
    if forest.feature_mask is not None:
        row = row[sorted(forest.feature_mask)]
    probs = predict_proba(forest, row)
    idx = int(np.argmax(probs))
    contributions = explain_contributions(forest, row, idx)
    return Prediction(
        domain=domain,
        probabilities={c: float(p) for c, p in zip(forest.class_order, probs)},
        predicted_class=str(forest.class_order[idx]),
        top_features=top_features(contributions, 3),
        model_version=model_version(forest),
    )


# --- moderation queue --------------------------------------------------------

QUEUE_STATES = ("pending", "labeled")


class UnknownItemError(KeyError):
    """No moderation item with that id."""


class VerdictConflictError(RuntimeError):
    """The item already carries a verdict."""


@dataclass
class ModerationItem:
    id: int
    domain: str
    prediction: dict[str, Any]
    evidence_ref: int  # archive byte offset of the probe evidence
    first_seen: str    # ISO time the item entered the queue
    state: str = "pending"
    verdict: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "domain": self.domain,
            "prediction": self.prediction,
            "evidence_ref": self.evidence_ref,
            "first_seen": self.first_seen,
            "state": self.state,
            "verdict": self.verdict,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModerationItem":
        return cls(**data)


class ModerationQueue:
    """File-backed review queue; one pending item per domain.

    The whole queue rewrites atomically on every change. Queues hold human
    review work, so they stay small; simplicity beats write throughput here.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._items: dict[int, ModerationItem] = {}
        self._next_id = 1
        if self.path.exists():
            data = json.loads(self.path.read_text())
            self._next_id = data["next_id"]
            for raw in data["items"]:
                item = ModerationItem.from_dict(raw)
                self._items[item.id] = item

    def _save(self):
        document = {
            "next_id": self._next_id,
            "items": [item.to_dict() for item in self._items.values()],
        }
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp.write_text(json.dumps(document, sort_keys=True) + "\n")
        os.replace(tmp, self.path)

    def enqueue(self, prediction: Prediction, evidence_ref: int, now: datetime) -> tuple[ModerationItem, bool]:
        """Add a pending item; an existing pending item for the domain wins."""
        with self._lock:
            for item in self._items.values():
                if item.domain == prediction.domain and item.state == "pending":
                    return item, False
            item = ModerationItem(
                id=self._next_id,
                domain=prediction.domain,
                prediction=prediction.to_dict(),
                evidence_ref=int(evidence_ref),
                first_seen=now.astimezone(timezone.utc).isoformat(),
            )
            self._next_id += 1
            self._items[item.id] = item
            self._save()
            return item, True

    def items(self, state: str | None = None) -> list[ModerationItem]:
        with self._lock:
            out = sorted(self._items.values(), key=lambda i: i.id)
        if state is None:
            return out
        if state not in QUEUE_STATES:
            raise ValueError(f"state must be one of {QUEUE_STATES}")
        return [i for i in out if i.state == state]

    def get(self, item_id: int) -> ModerationItem:
        with self._lock:
            try:
                return self._items[item_id]
            except KeyError:
                raise UnknownItemError(item_id) from None

    def submit_verdict(self, item_id: int, label: str, note: str, now: datetime) -> ModerationItem:
        """pending -> labeled, exactly once; a second verdict is a conflict."""
        from .store import CLASS_ORDER

        if label not in CLASS_ORDER:
            raise ValueError(f"label must be one of {CLASS_ORDER}")
        with self._lock:
            item = self._items.get(item_id)
            if item is None:
                raise UnknownItemError(item_id)
            if item.state != "pending":
                raise VerdictConflictError(f"item {item_id} already labeled")
            item.state = "labeled"
            item.verdict = {
                "label": label,
                "moderator_note": note,
                "decided_at": now.astimezone(timezone.utc).isoformat(),
            }
            self._save()
            return item


def record_verdict(
    queue: ModerationQueue,
    archive: Archive,
    dataset_path: str | Path,
    item_id: int,
    label: str,
    note: str,
    now: datetime,
) -> ModerationItem:
    """Apply a moderator verdict and bank the labeled example for retraining."""
    item = queue.submit_verdict(item_id, label, note, now)
    entry = archive.read_at(item.evidence_ref)
    example = LabeledExample(
        domain=item.domain,
        features=entry.features,
        label=label,
        label_source="moderator",
        labeled_at=now.astimezone(timezone.utc).isoformat(),
    )
    dataset_append(example, dataset_path)
    return item


# --- pipeline ----------------------------------------------------------------


def _unavailable_record(domain: str, now: datetime) -> ProbeRecord:
    return ProbeRecord(
        domain=domain,
        probed_at=now,
        dns=DnsObservation(),
        whois=WhoisObservation(),
        cert=CertObservation(),
        http=HttpObservation(),
    )


@dataclass
class PipelineSummary:
    candidates: int = 0
    probed: int = 0
    failed: int = 0
    archived: int = 0
    classified: int = 0
    flagged: int = 0
    per_class: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "candidates": self.candidates,
            "probed": self.probed,
            "failed": self.failed,
            "archived": self.archived,
            "classified": self.classified,
            "flagged": self.flagged,
            "per_class": dict(self.per_class),
        }


def run_pipeline(
    candidates: Iterable[Any],
    *,
    transport,
    forest: Forest,
    archive: Archive,
    queue: ModerationQueue | None = None,
    asn_table: AsnTable | None = None,
    geo_table: GeoTable | None = None,
    workers: int = 8,
    limits: ProbeLimits | None = None,
    now: datetime | None = None,
) -> PipelineSummary:
    """Probe, enrich, classify, archive, and flag a batch of candidates.

    Probes run on a bounded worker pool; results are archived in input
    order so replays are byte-reproducible. A candidate may be a domain
    string or anything with a ``domain`` attribute.
    """
    domains = [c if isinstance(c, str) else c.domain for c in candidates]
    summary = PipelineSummary(candidates=len(domains))
    if not domains:
        return summary
    if now is None:
        now = transport.now()
    if limits is None:
        limits = ProbeLimits()

    def probe_one(domain: str):
        try:
            return probe_domain(domain, transport, limits)
        except Exception:
            return None

    with ThreadPoolExecutor(max_workers=max(1, int(workers))) as pool:
        records = list(pool.map(probe_one, domains))

    for domain, record in zip(domains, records):
        if record is None:
            summary.failed += 1
            record = _unavailable_record(domain, now)
            archive.append(ArchiveEntry(domain, now, record, _extract_safe(record, None, None, now)))
            summary.archived += 1
            continue
        summary.probed += 1
        cms = fingerprint_cms(record.http.body or "", record.http.headers)
        vector = _extract_safe(record, asn_table, geo_table, now, cms)
        prediction = predict_vector(forest, vector, domain)
        entry = ArchiveEntry(domain, record.probed_at, record, vector, prediction.to_dict())
        offset = archive.append(entry)
        summary.archived += 1
        summary.classified += 1
        cls = prediction.predicted_class
        summary.per_class[cls] = summary.per_class.get(cls, 0) + 1
        if cls == "disinformation" and queue is not None:
            _, created = queue.enqueue(prediction, offset, now)
            if created:
                summary.flagged += 1
    return summary


def _extract_safe(record, asn_table, geo_table, now, cms: CmsInfo | None = None) -> FeatureVector:
    if cms is None:
        cms = CmsInfo(False, frozenset(), None)
    return extract(record, cms, asn_table, geo_table, now)


def classify_domain(
    raw_domain: str,
    *,
    transport,
    forest: Forest,
    archive: Archive,
    asn_table: AsnTable | None = None,
    geo_table: GeoTable | None = None,
    freshness: timedelta = timedelta(hours=24),
    limits: ProbeLimits | None = None,
    now: datetime | None = None,
) -> tuple[Prediction, ArchiveEntry, bool]:
    """Classify one domain, reusing archived evidence when still fresh.

    Returns (prediction, archive entry, reprobed). A recent-enough archive
    entry short-circuits the probe; otherwise the domain is probed now and
    the new evidence is archived with its prediction.
    """
    domain = normalize_domain(raw_domain)
    if now is None:
        now = transport.now()

    offset = archive.build_index().get(domain)
    if offset is not None:
        entry = archive.read_at(offset)
        age = now - entry.probed_at
        if timedelta(0) <= age <= freshness:
            return predict_vector(forest, entry.features, domain), entry, False

    record = probe_domain(domain, transport, limits or ProbeLimits())
    cms = fingerprint_cms(record.http.body or "", record.http.headers)
    vector = extract(record, cms, asn_table, geo_table, now)
    prediction = predict_vector(forest, vector, domain)
    entry = ArchiveEntry(domain, record.probed_at, record, vector, prediction.to_dict())
    archive.append(entry)
    return prediction, entry, True
