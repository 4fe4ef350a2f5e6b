"""Label-file ingestion: grouping classifier outputs into per-batch counts.

Two row formats are accepted, keyed by file suffix:

* ``.csv``: header ``batch_id,predicted_class[,count]``; a missing count
  column means one sample per row.
* ``.jsonl`` / ``.ndjson``: one JSON object per line with the same fields
  (``count`` optional, default 1).

Rows are grouped by ``batch_id`` in first-seen order.  Every batch must
contain the same total number of samples; proportions are the exact ratios
count / n so that multiplying back by n recovers the integer counts.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .exceptions import DataError
from .types import ClassDistribution, PhatSeries


@dataclass(frozen=True)
class LabelRecord:
    """One ingested row: a predicted class observed ``count`` times in a batch."""

    batch_id: str
    predicted_class: int
    count: int = 1


@dataclass(frozen=True)
class BatchTable:
    """Per-batch predicted-class counts, one row per batch in file order."""

    batch_ids: tuple[str, ...]
    counts: np.ndarray
    n: int

    @property
    def s(self) -> int:
        return len(self.batch_ids)

    @property
    def n_classes(self) -> int:
        return int(self.counts.shape[1])

    def proportions(self) -> np.ndarray:
        """Exact per-class proportions, shape (s, n_classes)."""
        return self.counts / float(self.n)

    def phat_series(self) -> PhatSeries:
        """Class-0 proportion series (the estimator input for binary attributes)."""
        return PhatSeries.from_counts(self.counts[:, 0], self.n)

    def mean_distribution(self) -> ClassDistribution:
        """Mean predicted-class distribution over all batches."""
        return ClassDistribution(self.proportions().mean(axis=0))


def _parse_csv(path: Path) -> Iterator[tuple[int, LabelRecord]]:
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            return
        fields = [name.strip() for name in reader.fieldnames]
        if "batch_id" not in fields or "predicted_class" not in fields:
            raise DataError(f"{path}: expected header with batch_id and predicted_class, got {fields}")
        has_count = "count" in fields
        for row in reader:
            line = reader.line_num
            try:
                count = int(row["count"]) if has_count and row.get("count") not in (None, "") else 1
                yield line, LabelRecord(
                    batch_id=str(row["batch_id"]).strip(),
                    predicted_class=int(row["predicted_class"]),
                    count=count,
                )
            except (TypeError, ValueError) as exc:
                raise DataError(f"{path}:{line}: malformed row ({exc})") from exc


def _parse_jsonl(path: Path) -> Iterator[tuple[int, LabelRecord]]:
    with path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                yield line_number, LabelRecord(
                    batch_id=str(row["batch_id"]),
                    predicted_class=int(row["predicted_class"]),
                    count=int(row.get("count", 1)),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{line_number}: malformed row ({exc})") from exc


def iter_label_records(path: str | Path) -> Iterator[tuple[int, LabelRecord]]:
    """Yield (line number, record) pairs from a label file."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"label file not found: {path}")
    suffix = path.suffix.lower()
    if suffix == ".csv":
        yield from _parse_csv(path)
    elif suffix in (".jsonl", ".ndjson"):
        yield from _parse_jsonl(path)
    else:
        raise DataError(f"{path}: unsupported label format {suffix!r} (expected .csv, .jsonl, or .ndjson)")


def ingest_labels(path: str | Path, n_classes: int = 2) -> BatchTable:
    """Group a label file into per-batch predicted-class counts.

    Raises :class:`~cleam.exceptions.DataError` on malformed rows (with the
    line number), unknown class indices, empty input, or batches of unequal
    size (naming the offending batch).
    """
    n_classes = int(n_classes)
    if n_classes < 2:
        raise DataError(f"n_classes must be >= 2, got {n_classes}")
    order: list[str] = []
    totals: dict[str, np.ndarray] = {}
    for line, record in iter_label_records(path):
        if record.count < 1:
            raise DataError(f"{path}:{line}: count must be >= 1, got {record.count}")
        if not 0 <= record.predicted_class < n_classes:
            raise DataError(
                f"{path}:{line}: predicted_class {record.predicted_class} is outside "
                f"[0, {n_classes - 1}] for batch {record.batch_id!r}"
            )
        if record.batch_id not in totals:
            order.append(record.batch_id)
            totals[record.batch_id] = np.zeros(n_classes, dtype=np.int64)
        totals[record.batch_id][record.predicted_class] += record.count
    if not order:
        raise DataError(f"{path}: no label records found")

    counts = np.vstack([totals[batch_id] for batch_id in order])
    batch_sizes = counts.sum(axis=1)
    n = int(batch_sizes[0])
    mismatched = np.nonzero(batch_sizes != n)[0]
    if mismatched.size:
        bad = order[int(mismatched[0])]
        raise DataError(
            f"{path}: every batch must contain the same number of samples; "
            f"batch {bad!r} has {int(batch_sizes[mismatched[0]])} but batch {order[0]!r} has {n}"
        )
    counts.setflags(write=False)
    return BatchTable(batch_ids=tuple(order), counts=counts, n=n)


def write_label_csv(path: str | Path, table: BatchTable) -> None:
    """Write a batch table back out as aggregated label rows."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["batch_id", "predicted_class", "count"])
        for batch_id, row in zip(table.batch_ids, table.counts):
            for predicted_class, count in enumerate(row):
                if count > 0:
                    writer.writerow([batch_id, predicted_class, int(count)])
