"""Sweep records, their CSV form and an order-preserving worker pool."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import NumericalError, UsageError


def fmt_float(v: float) -> str:
    return "%.12g" % v


@dataclass
class ScanRecord:
    """One row of a sweep: named parameters, criterion values, flags and a status."""

    params: dict[str, float]
    values: dict[str, float]
    flags: dict[str, bool] = field(default_factory=dict)
    status: str = "ok"

    def __post_init__(self):
        names = list(self.params) + list(self.values) + list(self.flags)
        if len(set(names)) != len(names) or "status" in names:
            raise UsageError(f"record field names must be unique, got {names}")
        if self.status == "ok":
            bad = [k for k, v in {**self.params, **self.values}.items() if not math.isfinite(v)]
            if bad:
                raise NumericalError(f"non-finite values {bad} in a record marked ok")

    def header(self) -> list[str]:
        return list(self.params) + list(self.values) + list(self.flags) + ["status"]

    def row(self) -> list[str]:
        nums = [fmt_float(v) for v in list(self.params.values()) + list(self.values.values())]
        return nums + [str(bool(v)).lower() for v in self.flags.values()] + [self.status]

    def as_dict(self) -> dict:
        return {**self.params, **self.values, **self.flags, "status": self.status}


def map_ordered(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally on a process pool; order always follows ``items``."""
    if jobs < 1:
        raise UsageError(f"jobs must be positive, got {jobs}")
    if jobs == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def records_to_csv(records: Sequence[ScanRecord]) -> str:
    if not records:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(records[0].header())
    for rec in records:
        if rec.header() != records[0].header():
            raise UsageError("records in one table must share a header")
        writer.writerow(rec.row())
    return buf.getvalue()
