"""Persistence: append-only archive, labeled datasets, model files.

Everything is plain structured text (JSON lines and CSV) plus an in-memory
domain index rebuilt on start; at pilot scale nothing needs a database.
Archive appends are atomic per entry for writers sharing one Archive
instance, scans tolerate corrupt lines by counting and skipping them, and
moderation items reference entries by byte offset.
"""

from __future__ import annotations

import csv
import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator, Sequence

import numpy as np

from . import PIPELINE_VERSION
from .features import (
    CSV_HEADER,
    FeatureVector,
    vector_from_csv_row,
    vector_from_dict,
    vector_to_csv_row,
    vector_to_dict,
)
from .forest import CLASS_ORDER, Forest, forest_from_dict, forest_to_dict
from .probe import ProbeRecord, record_from_dict, record_to_dict

MODEL_FORMAT_VERSION = 1

LABEL_SOURCES = ("seed_corpus", "moderator")


class IncompatibleModelError(Exception):
    """Model file unreadable or from a different format version."""


@dataclass
class ArchiveEntry:
    domain: str
    probed_at: datetime
    record: ProbeRecord
    features: FeatureVector
    prediction: dict[str, Any] | None = None
    pipeline_version: str = PIPELINE_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {
            "domain": self.domain,
            "probed_at": self.probed_at.astimezone(timezone.utc).isoformat(),
            "record": record_to_dict(self.record),
            "features": vector_to_dict(self.features),
            "prediction": self.prediction,
            "pipeline_version": self.pipeline_version,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ArchiveEntry":
        return cls(
            domain=data["domain"],
            probed_at=datetime.fromisoformat(data["probed_at"]),
            record=record_from_dict(data["record"]),
            features=vector_from_dict(data["features"]),
            prediction=data.get("prediction"),
            pipeline_version=data["pipeline_version"],
        )


@dataclass
class ScanStats:
    entries: int = 0
    corrupt: int = 0


class Archive:
    """Append-only JSONL file of ArchiveEntry, one object per line.

    One writer handle with internal locking; each append is a single write
    of one full line, so concurrent appends through the same instance never
    tear. Scans open their own read handle and may run during appends.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._handle = None

    def append(self, entry: ArchiveEntry) -> int:
        """Append one entry; returns the byte offset of its line."""
        line = json.dumps(entry.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"
        data = line.encode("utf-8")
        with self._lock:
            if self._handle is None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                self._handle = open(self.path, "ab")
            offset = self._handle.tell()
            self._handle.write(data)
            self._handle.flush()
        return offset

    def close(self):
        with self._lock:
            if self._handle is not None:
                self._handle.close()
                self._handle = None

    def scan(self, stats: ScanStats | None = None) -> Iterator[tuple[int, ArchiveEntry]]:
        """Yield (offset, entry) in write order, skipping corrupt lines."""
        if not self.path.exists():
            return
        with open(self.path, "rb") as fh:
            offset = 0
            for raw in fh:
                line_offset = offset
                offset += len(raw)
                try:
                    entry = ArchiveEntry.from_dict(json.loads(raw.decode("utf-8")))
                except Exception:
                    if stats is not None:
                        stats.corrupt += 1
                    continue
                if stats is not None:
                    stats.entries += 1
                yield line_offset, entry

    def read_at(self, offset: int) -> ArchiveEntry:
        with open(self.path, "rb") as fh:
            fh.seek(offset)
            raw = fh.readline()
        return ArchiveEntry.from_dict(json.loads(raw.decode("utf-8")))

    def build_index(self) -> dict[str, int]:
        """domain -> offset of its most recent entry."""
        index: dict[str, int] = {}
        for offset, entry in self.scan():
            index[entry.domain] = offset
        return index


def archive_append(entry: ArchiveEntry, sink: Archive) -> int:
    return sink.append(entry)


def archive_scan(sink: Archive, stats: ScanStats | None = None) -> Iterator[tuple[int, ArchiveEntry]]:
    return sink.scan(stats)


# --- labeled datasets --------------------------------------------------------

@dataclass(frozen=True)
class LabeledExample:
    domain: str
    features: FeatureVector
    label: str
    label_source: str = "seed_corpus"
    labeled_at: str = ""

    def __post_init__(self):
        if self.label not in CLASS_ORDER:
            raise ValueError(f"label must be one of {CLASS_ORDER}, got {self.label!r}")
        if self.label_source not in LABEL_SOURCES:
            raise ValueError(f"label_source must be one of {LABEL_SOURCES}")


DATASET_HEADER = ("domain",) + CSV_HEADER + ("label", "label_source", "labeled_at")


def dataset_save(examples: Sequence[LabeledExample], path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DATASET_HEADER)
        for example in examples:
            writer.writerow(_example_row(example))


def _example_row(example: LabeledExample) -> list[str]:
    return (
        [example.domain]
        + vector_to_csv_row(example.features)
        + [example.label, example.label_source, example.labeled_at]
    )


def dataset_append(example: LabeledExample, path: str | Path):
    """Append one labeled row, writing the header first on a fresh file."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(DATASET_HEADER)
        writer.writerow(_example_row(example))


def dataset_load(path: str | Path) -> list[LabeledExample]:
    """Read labeled examples; a later row for the same domain supersedes the
    earlier one."""
    by_domain: dict[str, LabeledExample] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != DATASET_HEADER:
            raise ValueError(f"unexpected dataset header in {path}")
        n_features = len(CSV_HEADER)
        for row in reader:
            if len(row) != len(DATASET_HEADER):
                raise ValueError(f"malformed dataset row in {path}: {row[:2]}...")
            domain = row[0]
            features = vector_from_csv_row(row[1 : 1 + n_features])
            label, label_source, labeled_at = row[1 + n_features :]
            by_domain[domain] = LabeledExample(domain, features, label, label_source, labeled_at)
    return list(by_domain.values())


def dataset_balance(examples: Sequence[LabeledExample], seed: int = 0) -> list[LabeledExample]:
    """Downsample every class to the minority-class size with seeded
    sampling; example contents are untouched."""
    by_label: dict[str, list[LabeledExample]] = {c: [] for c in CLASS_ORDER}
    for example in examples:
        by_label[example.label].append(example)
    sizes = {label: len(group) for label, group in by_label.items()}
    empty = [label for label, size in sizes.items() if size == 0]
    if empty:
        raise ValueError(f"cannot balance: empty class {empty[0]!r}")
    target = min(sizes.values())
    rng = np.random.default_rng(seed)
    balanced: list[LabeledExample] = []
    for label in CLASS_ORDER:
        group = by_label[label]
        chosen = sorted(rng.choice(len(group), size=target, replace=False).tolist())
        balanced.extend(group[i] for i in chosen)
    return balanced


# --- model files -------------------------------------------------------------

def model_version(forest: Forest) -> str:
    """Stable short identifier for a trained model: hash of its canonical form."""
    blob = json.dumps(forest_to_dict(forest), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def model_save(forest: Forest, path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"format_version": MODEL_FORMAT_VERSION, "model": forest_to_dict(forest)}
    path.write_text(json.dumps(document, sort_keys=True, separators=(",", ":")) + "\n")


def model_load(path: str | Path) -> Forest:
    try:
        document = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise IncompatibleModelError(f"unreadable model file {path}: {exc}") from exc
    if not isinstance(document, dict) or "format_version" not in document:
        raise IncompatibleModelError(f"{path} is not a model file")
    version = document["format_version"]
    if version != MODEL_FORMAT_VERSION:
        raise IncompatibleModelError(
            f"model format version {version} unsupported (expected {MODEL_FORMAT_VERSION})"
        )
    try:
        return forest_from_dict(document["model"])
    except Exception as exc:
        raise IncompatibleModelError(f"malformed model document in {path}: {exc}") from exc
