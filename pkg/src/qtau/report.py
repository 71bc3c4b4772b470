"""Verification reports: per-item results, JSON and CSV output."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["ReportItem", "VerificationReport", "write_coefficient_csv"]


@dataclass
class ReportItem:
    label: str
    expected: str
    actual: str
    passed: bool
    group: str = ""
    detail: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "group": self.group,
            "expected": self.expected,
            "actual": self.actual,
            "pass": self.passed,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerificationReport:
    """Outcome of one campaign.  Passes iff every item passes.

    ``timing`` is kept apart from the body so that identical configurations
    produce byte-identical bodies.
    """

    campaign: str
    parameters: dict
    items: list[ReportItem] = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    def add(self, label, expected, actual, passed, group="", detail=None) -> ReportItem:
        item = ReportItem(str(label), str(expected), str(actual), bool(passed), str(group), list(detail or []))
        self.items.append(item)
        return item

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        for it in other.items:
            self.items.append(
                ReportItem(it.label, it.expected, it.actual, it.passed,
                           (prefix + it.group) if prefix else it.group, it.detail)
            )

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    @property
    def failures(self) -> list[ReportItem]:
        return [it for it in self.items if not it.passed]

    def counts(self) -> dict:
        n_fail = len(self.failures)
        return {"items": len(self.items), "passed": len(self.items) - n_fail, "failed": n_fail}

    def body(self) -> dict:
        return {
            "campaign": self.campaign,
            "parameters": self.parameters,
            "summary": {**self.counts(), "status": "pass" if self.passed else "fail"},
            "items": [it.to_json() for it in self.items],
        }

    def to_json(self) -> dict:
        return {**self.body(), "timing": self.timing}

    def dumps(self, include_timing: bool = True) -> str:
        obj = self.to_json() if include_timing else self.body()
        return json.dumps(obj, indent=2, sort_keys=True)

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps() + "\n")
        return path

    def write_csv(self, path) -> Path:
        """One row per item: group, label, expected, actual, pass."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["group", "label", "expected", "actual", "pass"])
            for it in self.items:
                w.writerow([it.group, it.label, it.expected, it.actual, int(it.passed)])
        return path

    def summary(self) -> str:
        c = self.counts()
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{self.campaign}: {status} ({c['passed']}/{c['items']} items)"]
        for it in self.failures[:20]:
            lines.append(f"  mismatch [{it.group}] {it.label}: expected {it.expected}, got {it.actual}")
            lines.extend(f"    {d}" for d in it.detail[:10])
        return "\n".join(lines)


def write_coefficient_csv(series, path) -> Path:
    """Coefficient table of an HbarSeries: hbar_order, monomial, coefficient."""
    from .polyring import _format_monomial
    from .scalars import format_scalar

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["hbar_order", "monomial", "coefficient"])
        for e, poly in series.items():
            for m, c in poly.sorted_terms():
                w.writerow([str(e), _format_monomial(m) or "1", format_scalar(c)])
    return path
