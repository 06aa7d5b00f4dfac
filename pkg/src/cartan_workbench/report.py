"""Check records, reports and their JSON / text rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
TEXT_TABLE_ROWS = 10


def jsonable(value: Any) -> Any:
    """Convert exact values to JSON-friendly form (angles as "p/q" strings)."""
    # local imports keep this module free of cycles
    from .scalars import CircleElement, Cyclotomic

    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, float):
        return value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, CircleElement):
        return str(value)
    if isinstance(value, Cyclotomic):
        return value.to_json()
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_json"):
        return value.to_json()
    raise TypeError(f"cannot serialize {type(value).__name__}")


@dataclass
class Clause:
    name: str
    ok: bool | None
    witnesses: list[dict] = field(default_factory=list)
    samples: int | None = None

    @property
    def verdict(self) -> str:
        if self.ok is None:
            return INCONCLUSIVE
        return PASS if self.ok else FAIL

    def to_json(self) -> dict:
        out = {"name": self.name, "verdict": self.verdict, "witnesses": jsonable(self.witnesses)}
        if self.samples is not None:
            out["samples"] = self.samples
        return out


def combine(verdicts: Iterable[str]) -> str:
    vs = list(verdicts)
    if FAIL in vs:
        return FAIL
    if INCONCLUSIVE in vs:
        return INCONCLUSIVE
    return PASS


@dataclass
class CheckResult:
    check: str
    verdict: str
    ball: int | None = None
    witnesses: list[dict] = field(default_factory=list)
    values: dict = field(default_factory=dict)
    clauses: list[Clause] = field(default_factory=list)
    seed: int | None = None
    note: str = ""
    wall_time: float = 0.0

    @classmethod
    def from_clauses(cls, check: str, clauses: list[Clause], **kw) -> CheckResult:
        verdict = combine(c.verdict for c in clauses)
        witnesses = []
        for c in clauses:
            if c.verdict != PASS:
                witnesses.extend({"clause": c.name, **w} for w in c.witnesses)
        return cls(check, verdict, witnesses=witnesses, clauses=clauses, **kw)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def clause(self, name: str) -> Clause:
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "check": self.check,
            "verdict": self.verdict,
            "ball": self.ball,
            "witnesses": jsonable(self.witnesses),
            "values": jsonable(self.values),
            "clauses": [c.to_json() for c in self.clauses],
            "seed": self.seed,
        }
        if self.note:
            out["note"] = self.note
        if timings:
            out["wall_time"] = round(self.wall_time, 3)
        return out

    @classmethod
    def from_json(cls, data: dict) -> CheckResult:
        clauses = [
            Clause(
                c["name"],
                None if c["verdict"] == INCONCLUSIVE else c["verdict"] == PASS,
                c.get("witnesses", []),
                c.get("samples"),
            )
            for c in data.get("clauses", [])
        ]
        return cls(
            data["check"],
            data["verdict"],
            ball=data.get("ball"),
            witnesses=data.get("witnesses", []),
            values=data.get("values", {}),
            clauses=clauses,
            seed=data.get("seed"),
            note=data.get("note", ""),
            wall_time=data.get("wall_time", 0.0),
        )


@dataclass
class Report:
    title: str
    checks: list[CheckResult] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    verdict: str | None = None

    def add(self, result: CheckResult) -> CheckResult:
        self.checks.append(result)
        return result

    def extend(self, results: Iterable[CheckResult]) -> None:
        self.checks.extend(results)

    def get(self, check: str) -> CheckResult:
        for c in self.checks:
            if c.check == check:
                return c
        raise KeyError(check)

    @property
    def root_verdict(self) -> str:
        if self.verdict is not None:
            return self.verdict
        return combine(c.verdict for c in self.checks)

    def to_json(self, timings: bool = False) -> dict:
        return {
            "title": self.title,
            "verdict": self.root_verdict,
            "meta": jsonable(self.meta),
            "summary": jsonable(self.summary),
            "checks": [c.to_json(timings) for c in self.checks],
            "tables": jsonable(self.tables),
        }

    @classmethod
    def from_json(cls, data: dict) -> Report:
        return cls(
            data["title"],
            [CheckResult.from_json(c) for c in data["checks"]],
            meta=data.get("meta", {}),
            summary=data.get("summary", {}),
            tables=data.get("tables", {}),
            verdict=data.get("verdict"),
        )


def _witness_text(w: dict) -> str:
    parts = []
    for k, v in w.items():
        if isinstance(v, list) and all(isinstance(x, int) for x in v):
            v = "(" + ",".join(str(x) for x in v) + ")"
        parts.append(f"{k}={v}")
    return " ".join(parts)


def emit_report(report: Report, fmt: str = "json", timings: bool = False) -> bytes:
    if fmt == "json":
        text = json.dumps(report.to_json(timings), sort_keys=True, indent=2) + "\n"
        return text.encode("utf-8")
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"== {report.title} :: {report.root_verdict.upper()}"]
    for key, value in sorted(report.meta.items()):
        lines.append(f"   {key}: {jsonable(value)}")
    for c in report.checks:
        ball = f"B={c.ball}" if c.ball is not None else "B=-"
        line = f"{c.verdict.upper():<13} {c.check:<40} [{ball}]"
        if timings:
            line += f" {c.wall_time:7.2f}s" if c.wall_time else "        -"
        if c.witnesses:
            line += "  witness: " + _witness_text(jsonable(c.witnesses[0]))
        if c.note:
            line += f"  ({c.note})"
        lines.append(line)
    for key, value in sorted(report.summary.items()):
        lines.append(f"-- {key}: {json.dumps(jsonable(value), sort_keys=True)}")
    for key, rows in sorted(report.tables.items()):
        lines.append(f"-- table {key} ({len(rows)} rows, first {min(len(rows), TEXT_TABLE_ROWS)} shown)")
        for row in rows[:TEXT_TABLE_ROWS]:
            lines.append("   " + _witness_text(jsonable(row)))
    return ("\n".join(lines) + "\n").encode("utf-8")
