"""Report assembly, JSON serialization and markdown rendering."""
from __future__ import annotations

import datetime as _dt
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .ch_identities import CHReport

SCHEMA = 1
BAD = ("fail", "error")


@dataclass
class CaseResult:
    k: int
    section: str             # structure | evaluation | spectral
    report: CHReport
    seconds: float = 0.0

    @property
    def status(self) -> str:
        st = {e.status for e in self.report.entries}
        if "error" in st:
            return "error"
        if "fail" in st:
            return "fail"
        return "pass"

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "section": self.section,
            "evaluation": self.report.evaluation,
            "status": self.status,
            "entries": self.report.rows(),
        }


@dataclass
class RunReport:
    command: str
    config: dict
    cases: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    started: str = ""

    def counts(self) -> dict:
        c = {"pass": 0, "fail": 0, "skip": 0, "error": 0}
        for case in self.cases:
            for e in case.report.entries:
                c[e.status] += 1
        return c

    @property
    def ok(self) -> bool:
        c = self.counts()
        return c["fail"] == 0 and c["error"] == 0 and not self.extra.get("bad", False)

    def as_dict(self) -> dict:
        out = {
            "schema": SCHEMA,
            "command": self.command,
            "version": __version__,
            "config": self.config,
            "cases": [c.as_dict() for c in self.cases],
        }
        out.update({key: val for key, val in self.extra.items() if key != "bad"})
        out["summary"] = self.counts()
        out["status"] = "pass" if self.ok else "fail"
        # everything run-dependent lives under this one key
        out["timestamp"] = {
            "utc": self.started,
            "seconds": {f"{c.k}/{c.section}/{c.report.evaluation}": round(c.seconds, 3) for c in self.cases},
        }
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False) + "\n"


def now_utc() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def strip_timestamp(doc: dict | str) -> dict:
    if isinstance(doc, str):
        doc = json.loads(doc)
    return {key: val for key, val in doc.items() if key != "timestamp"}


def run_parallel(jobs: list, n_threads: int) -> list:
    """Run zero-argument callables, returning results in submission order."""
    if n_threads <= 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [f.result() for f in futures]


def _cell(text: str) -> str:
    return str(text).replace("|", "\\|").replace("\n", " ")


def markdown(run: RunReport) -> str:
    lines = [f"# qch {run.command}", ""]
    cfg = run.config
    lines.append(f"k = {cfg.get('k')}, ring = {cfg.get('ring')}, q = {cfg.get('q')}")
    c = run.counts()
    lines.append(f"pass {c['pass']}, fail {c['fail']}, skip {c['skip']}, error {c['error']}; "
                 f"overall **{'pass' if run.ok else 'fail'}**")
    if run.cases:
        lines += ["", "| k | section | evaluation | identity | status | residual | detail |",
                  "|---|---|---|---|---|---|---|"]
    for case in run.cases:
        for e in case.report.entries:
            lines.append("| " + " | ".join(_cell(x) for x in (
                case.k, case.section, case.report.evaluation, e.identity, e.status, e.residual, e.detail)) + " |")
    for key, rows in run.extra.items():
        if key == "spectra" and rows:
            lines += ["", "## spectra", "", "| k | evaluation | case | status | roundtrip | max pair residual |",
                      "|---|---|---|---|---|---|"]
            for r in rows:
                pr = max(r.get("pair_residuals") or [0.0])
                lines.append(f"| {r['k']} | {_cell(r['evaluation'])} | {r.get('case', '')} | {r['status']} | "
                             f"{r.get('roundtrip_residual', '')} | {pr} |")
    return "\n".join(lines) + "\n"


def write(run: RunReport, output: str | None) -> list[Path]:
    if not output:
        return []
    base = Path(output)
    base.parent.mkdir(parents=True, exist_ok=True)
    js = base.with_suffix(".json")
    md = base.with_suffix(".md")
    js.write_text(run.to_json())
    md.write_text(markdown(run))
    return [js, md]
