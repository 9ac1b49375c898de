"""Record serialization for the command line: JSON lines and CSV, both exactly round-trippable."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

SCHEMA_VERSION = 1
FORMATS = ("jsonl", "csv")
_CSV_FIELDS = ("group", "matrix", "norm_sq", "meta", "schema")


def _plain(v):
    """numpy scalars and nested sequences to plain Python values."""
    if hasattr(v, "tolist"):
        return v.tolist()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return v


@dataclass(frozen=True)
class MatrixRecord:
    """One sampled element. ``matrix`` is a list of rows; vectors are a single row.

    ``norm_sq`` (SL(2,Z) and lattice records) is written only when set.
    """

    group: str
    matrix: list
    meta: dict = field(default_factory=dict)
    norm_sq: int | None = None
    schema: int = SCHEMA_VERSION

    def __post_init__(self):
        object.__setattr__(self, "matrix", _plain(self.matrix))
        object.__setattr__(self, "meta", _plain(self.meta))

    def to_dict(self) -> dict:
        d = {"group": self.group, "matrix": self.matrix}
        if self.norm_sq is not None:
            d["norm_sq"] = self.norm_sq
        d["meta"] = self.meta
        d["schema"] = self.schema
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MatrixRecord":
        missing = {"group", "matrix"} - set(d)
        if missing:
            raise ValueError(f"record lacks {sorted(missing)}")
        schema = d.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {schema}")
        return cls(d["group"], d["matrix"], d.get("meta", {}), d.get("norm_sq"), schema)


def _dumps(obj: Any) -> str:
    # floats go out via repr, so parse(serialize(x)) is exact
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def to_jsonl(records: Iterable[MatrixRecord]) -> str:
    return "".join(_dumps(r.to_dict()) + "\n" for r in records)


def from_jsonl(text: str) -> list[MatrixRecord]:
    return [MatrixRecord.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]


def to_csv(records: Iterable[MatrixRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_FIELDS)
    for r in records:
        w.writerow([r.group, _dumps(r.matrix), "" if r.norm_sq is None else r.norm_sq, _dumps(r.meta), r.schema])
    return buf.getvalue()


def from_csv(text: str) -> list[MatrixRecord]:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None:
        return []
    if tuple(header) != _CSV_FIELDS:
        raise ValueError(f"unexpected CSV header {header}")
    return [
        MatrixRecord(g, json.loads(m), json.loads(meta), int(k) if k else None, int(s)) for g, m, k, meta, s in rows
    ]


def serialize(records: Iterable[MatrixRecord], fmt: str) -> str:
    if fmt == "jsonl":
        return to_jsonl(records)
    if fmt == "csv":
        return to_csv(records)
    raise ValueError(f"unknown format {fmt!r}")


def parse(text: str, fmt: str) -> list[MatrixRecord]:
    if fmt == "jsonl":
        return from_jsonl(text)
    if fmt == "csv":
        return from_csv(text)
    raise ValueError(f"unknown format {fmt!r}")


def table(rows: list[dict], fmt: str) -> str:
    """Flat key/value rows (counts, reports) as JSON lines or a CSV table."""
    rows = [_plain(r) for r in rows]
    if fmt == "jsonl":
        return "".join(_dumps(r) + "\n" for r in rows)
    if fmt == "csv":
        if not rows:
            return ""
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def iter_records(path) -> Iterator[MatrixRecord]:
    with open(path) as fh:
        text = fh.read()
    fmt = "csv" if text.startswith(",".join(_CSV_FIELDS)) else "jsonl"
    yield from parse(text, fmt)
