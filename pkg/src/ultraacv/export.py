"""CSV / JSONL persistence of run records."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable

from .harness import RunRecord

CSV_COLUMNS = [
    "run_id", "p", "T", "lag", "dist", "seed", "rep", "lambda_max", "lambda_min_pos",
    "ks_squared", "ks_quarter", "m1", "m2", "m3", "m4", "m5", "m6", "wall_ms",
]


class ExportError(OSError):
    pass


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def csv_rows(records: Iterable[RunRecord]):
    for rec in records:
        cfg = rec.config
        for r in rec.replications:
            moments = dict(zip(cfg.moment_orders, r.moments or []))
            yield [
                rec.run_id, cfg.p, cfg.T, cfg.lag, cfg.distribution.tag, r.seed, r.rep,
                r.lambda_max, r.lambda_min_pos, r.ks_squared, r.ks_quarter,
                *(moments.get(k) for k in range(1, 7)),
                r.wall_ms,
            ]


def to_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in csv_rows(records):
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def to_jsonl(records: Iterable[RunRecord]) -> str:
    return "".join(json.dumps(rec.to_dict(), sort_keys=True) + "\n" for rec in records)


def read_jsonl(path: str | Path) -> list[RunRecord]:
    with open(path) as fh:
        return [RunRecord.from_dict(json.loads(line)) for line in fh if line.strip()]


def export(records: Iterable[RunRecord], fmt: str, path: str | Path) -> None:
    fmt = fmt.lower()
    if fmt == "csv":
        text = to_csv(records)
    elif fmt == "jsonl":
        text = to_jsonl(records)
    else:
        raise ValueError(f"unknown export format {fmt!r} (expected csv or jsonl)")
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
