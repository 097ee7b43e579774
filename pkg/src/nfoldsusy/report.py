"""Run reports: deterministic JSON records plus human-readable tables.

The JSON view is the machine-readable source of truth and is byte-stable
across runs for symbolic commands (timing lives only in the table view).
Spectra additionally go to CSV with one row per eigenvalue.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

from . import __version__

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_FALSIFIED = 3  # a recorded (conjectured) identity failed and survived
                    # the independent rational-coupling recheck

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_RECORDED = "recorded"


@dataclass
class CheckRecord:
    """One verdict: the identity or quantity checked, and what happened."""

    name: str
    anchor: str  # the identity / quantity in formula form
    status: str  # pass | fail | recorded
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0


@dataclass
class RunReport:
    command: str
    config: dict
    records: list = field(default_factory=list)
    notes: list = field(default_factory=list)  # human-readable extras only

    def add(self, record: CheckRecord) -> CheckRecord:
        self.records.append(record)
        return record

    @property
    def n_fail(self) -> int:
        return sum(1 for r in self.records if r.status == STATUS_FAIL)

    @property
    def n_falsified(self) -> int:
        return sum(1 for r in self.records
                   if r.status == STATUS_RECORDED and r.detail.get("falsified"))

    def exit_code(self) -> int:
        if self.n_fail:
            return EXIT_FAIL
        if self.n_falsified:
            return EXIT_FALSIFIED
        return EXIT_OK

    def to_dict(self) -> dict:
        return {
            "tool": "nfoldsusy",
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "records": [
                {"name": r.name, "anchor": r.anchor, "status": r.status,
                 "detail": r.detail}
                for r in sorted(self.records, key=lambda r: r.name)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self) -> str:
        lines = [f"nfoldsusy {__version__} :: {self.command}"]
        width = max((len(r.name) for r in self.records), default=10)
        for r in self.records:
            mark = {"pass": "PASS", "fail": "FAIL", "recorded": "REC "}[r.status]
            extra = ""
            if r.status == STATUS_RECORDED:
                extra = " falsified" if r.detail.get("falsified") else " holds"
            lines.append(f"  [{mark}] {r.name:<{width}}  ({r.seconds:.2f}s){extra}")
        lines.append(f"  {len(self.records)} checks, {self.n_fail} failed, "
                     f"{self.n_falsified} conjectures falsified")
        return "\n".join(lines)


SPECTRUM_COLUMNS = ("model", "sign", "N", "g", "boundary", "index", "E",
                    "convergence_estimate")


def write_spectra_csv(path: str, rows) -> None:
    """Rows are tuples in SPECTRUM_COLUMNS order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SPECTRUM_COLUMNS)
        writer.writerows(rows)


def spectrum_rows(kind: str, sign: int, n: int, g: float, boundary: str,
                  result, limit: int | None = None):
    """Flatten a SpectralResult into CSV rows."""
    count = result.eigenvalues.size if limit is None else min(limit, result.eigenvalues.size)
    for i in range(count):
        yield (kind, "+" if sign > 0 else "-", n, repr(g), boundary, i,
               repr(float(result.eigenvalues[i])),
               repr(float(result.convergence_estimate[i])))
