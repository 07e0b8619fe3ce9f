"""Reproducible experiment reports.

A report captures the configuration echo, the artifact version, per-item
results and pass/fail verdicts of one run.  The serialized payload (JSON or
CSV) is a pure function of the configuration and seed: wall-clock duration
is kept on the object for logging but *never* written into the payload, so
re-runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

try:
    from importlib.metadata import version as _pkg_version

    VERSION = "qidcodes " + _pkg_version("qidcodes")
except Exception:  # pragma: no cover - source tree without metadata
    VERSION = "qidcodes 0.1.0"


@dataclass
class Verdict:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


@dataclass
class ExperimentReport:
    command: str
    config: dict
    results: list[dict] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    version: str = VERSION
    duration_s: float = 0.0  # logging only, excluded from payloads

    @property
    def all_pass(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def add_verdict(self, name: str, passed: bool, detail: str = "") -> None:
        self.verdicts.append(Verdict(name, bool(passed), detail))

    def payload(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "config": _jsonable(self.config),
            "results": _jsonable(self.results),
            "verdicts": [v.as_dict() for v in self.verdicts],
            "all_pass": self.all_pass,
        }

    def to_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        """Tabular form: one row per result item, verdict rows appended.

        Field order is the sorted union of result keys, fixed independent of
        item order, so output is deterministic.
        """
        buf = io.StringIO()
        keys = sorted({k for item in self.results for k in item})
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["row_kind"] + keys)
        for item in self.results:
            writer.writerow(["result"] + [_csv_cell(item.get(k, "")) for k in keys])
        for v in self.verdicts:
            row = ["verdict", v.name, "pass" if v.passed else "FAIL", v.detail]
            row += [""] * max(0, len(keys) + 1 - len(row))
            writer.writerow(row[: len(keys) + 1] if keys else row)
        return buf.getvalue()

    def write(self, path: str, fmt: str = "json") -> None:
        text = self.to_json() if fmt == "json" else self.to_csv()
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _jsonable(obj):
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return str(obj)


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
