"""JSON-lines and CSV serialization of check reports."""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .bounds import CheckReport

__all__ = ["CSV_HEADER", "to_jsonl", "to_csv", "write_reports", "read_jsonl"]

CSV_HEADER = "check,alpha,p1,q1,p2,q2,s,t,E,G,seed,ratio,constant,pass"


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return repr(float(x)) if isinstance(x, float) else str(x)


def to_jsonl(reports) -> str:
    return "".join(r.to_json() + "\n" for r in reports)


def to_csv(reports) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    for r in reports:
        p = r.params
        w.writerow([
            r.check,
            _num(p.get("alpha")),
            _num(p.get("p1", p.get("p"))),
            _num(p.get("q1", p.get("q"))),
            _num(p.get("p2")),
            _num(p.get("q2")),
            _num(p.get("s")),
            _num(p.get("t")),
            r.extent,
            r.gen,
            _num(r.seed),
            _num(r.ratio),
            _num(r.constant),
            _num(r.passed),
        ])
    return buf.getvalue()


def write_reports(reports, path) -> Path:
    """CSV when ``path`` ends in ``.csv``, JSON lines otherwise."""
    path = Path(path)
    text = to_csv(reports) if path.suffix.lower() == ".csv" else to_jsonl(reports)
    path.write_text(text)
    return path


def read_jsonl(path) -> list[CheckReport]:
    lines = Path(path).read_text().splitlines()
    return [CheckReport.from_json(line) for line in lines if line.strip()]
