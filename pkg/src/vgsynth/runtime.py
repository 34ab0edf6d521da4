"""Wall-clock accounting for generation work, per ticker or time segment.

Durations are stored at millisecond precision and only floored to whole
seconds when formatted for the summary table (``days hh:mm:ss``).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

UNIT_KINDS = ("ticker", "segment")


@dataclass
class RuntimeRecord:
    unit_id: str
    method: str
    elapsed_ms: int
    unit_kind: str = "ticker"
    valid: bool = True

    def __post_init__(self):
        if self.unit_kind not in UNIT_KINDS:
            raise ValueError(f"unknown unit kind {self.unit_kind!r}")
        if self.elapsed_ms < 0:
            raise ValueError("elapsed time cannot be negative")


def time_unit(task, unit_id: str, method: str, unit_kind: str = "ticker",
              collector: list | None = None):
    """Run ``task()`` and measure it with a monotonic clock.

    Returns (result, record) and appends the record to ``collector`` when one
    is given. If the task raises, a record flagged invalid is still appended
    and attached to the exception as ``partial_record`` before re-raising.
    """
    start = time.perf_counter_ns()
    try:
        result = task()
    except Exception as exc:
        elapsed_ms = (time.perf_counter_ns() - start) // 1_000_000
        record = RuntimeRecord(unit_id=unit_id, method=method,
                               elapsed_ms=int(elapsed_ms), unit_kind=unit_kind,
                               valid=False)
        if collector is not None:
            collector.append(record)
        exc.partial_record = record
        raise
    elapsed_ms = (time.perf_counter_ns() - start) // 1_000_000
    record = RuntimeRecord(unit_id=unit_id, method=method,
                           elapsed_ms=int(elapsed_ms), unit_kind=unit_kind)
    if collector is not None:
        collector.append(record)
    return result, record


@dataclass
class MethodTotal:
    elapsed_ms: int
    unit_kind: str  # "ticker", "segment", or "mixed"

    def formatted(self) -> str:
        return format_duration(self.elapsed_ms)


def aggregate(records: list[RuntimeRecord]) -> dict[str, MethodTotal]:
    """Sum elapsed time per method; order of records does not matter."""
    if not records:
        raise ValueError("no runtime records to aggregate")
    totals: dict[str, int] = {}
    kinds: dict[str, set[str]] = {}
    for rec in records:
        totals[rec.method] = totals.get(rec.method, 0) + rec.elapsed_ms
        kinds.setdefault(rec.method, set()).add(rec.unit_kind)
    return {
        method: MethodTotal(
            elapsed_ms=totals[method],
            unit_kind=next(iter(kinds[method])) if len(kinds[method]) == 1 else "mixed",
        )
        for method in sorted(totals)
    }


def format_duration(elapsed_ms: int) -> str:
    """Render milliseconds as ``days hh:mm:ss`` (floored to whole seconds)."""
    seconds = int(elapsed_ms) // 1000
    days, rem = divmod(seconds, 86400)
    hours, rem = divmod(rem, 3600)
    minutes, secs = divmod(rem, 60)
    return f"{days} {hours:02d}:{minutes:02d}:{secs:02d}"


def summary_table(records: list[RuntimeRecord]) -> str:
    """Human-readable per-method totals."""
    totals = aggregate(records)
    lines = [f"{'method':<12} {'unit':<8} {'time (days hh:mm:ss)':>22}"]
    for method, total in totals.items():
        lines.append(f"{method:<12} {total.unit_kind:<8} {total.formatted():>22}")
    return "\n".join(lines)


def write_runtime_log(records: list[RuntimeRecord], path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for rec in records:
            fh.write(json.dumps({
                "unit_id": rec.unit_id,
                "unit_kind": rec.unit_kind,
                "method": rec.method,
                "elapsed_ms": rec.elapsed_ms,
            }) + "\n")


def read_runtime_log(path: str | Path) -> list[RuntimeRecord]:
    out = []
    with Path(path).open() as fh:
        for line in fh:
            rec = json.loads(line)
            out.append(RuntimeRecord(unit_id=rec["unit_id"], method=rec["method"],
                                     elapsed_ms=rec["elapsed_ms"],
                                     unit_kind=rec["unit_kind"]))
    return out
