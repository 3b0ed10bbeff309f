"""Command line driver: ``qch verify|spectrum|bench|ybdump``."""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import bench as benchmod
from . import config as cfgmod
from . import spectral as spc
from .ch_identities import CHReport
from .char_subalg import CharError, char_data
from .config import ConfigError, RunConfig
from .pipeline import (
    KNOWN_IDS,
    evaluation_label,
    run_evaluation,
    select,
    spectral_report,
    structure_report,
)
from .qm_algebra import EvaluationError, _pair, make_evaluation
from .report import CaseResult, RunReport, markdown, now_utc, run_parallel, write
from .scalar_ring import RingError
from .tensor_ops import LegOperator, dump_operator
from .yang_baxter import YBError, rho_weights, yb_data

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _timed(k: int, section: str, fn) -> CaseResult:
    t0 = time.perf_counter()
    rep = fn()
    return CaseResult(k, section, rep, time.perf_counter() - t0)


def _error_case(k: int, section: str, label: str, name: str, exc: Exception) -> CaseResult:
    rep = CHReport(k, label, "exact")
    rep.error(name, f"{type(exc).__name__}: {exc}")
    return CaseResult(k, section, rep)


def _prepare(k: int, cfg: RunConfig):
    ring = cfg.ring_config()
    yb = yb_data(k, ring)
    # warm lazy caches so worker threads only read shared state
    if ring.exact or k <= 5:
        yb.antisym(k + 1)
        yb.sym(k)
    for f in cfg.F:
        _pair(yb, f)
    return yb


def _with_missing(rep: CHReport, idents: tuple, pool: set) -> CHReport:
    """Selected identities absent from a case are listed as skips."""
    have = {e.identity.split(":")[-1] for e in rep.entries}
    for name in idents:
        if name in pool and name not in have:
            rep.skip(name, "not applicable for this case")
    return rep


def _exact_q(cfg: RunConfig) -> str:
    """The spectral layer always runs exactly; a float q falls back to 7/5."""
    return cfg.q if "/" in cfg.q or cfg.q.isdigit() else "7/5"


def cmd_verify(cfg: RunConfig) -> RunReport:
    cfg.validate()
    unknown = [i for i in cfg.identities if i not in KNOWN_IDS]
    if unknown:
        raise ConfigError(f"unknown identities: {', '.join(unknown)}")
    idents = set(cfg.identities) or None
    run = RunReport("verify", cfg.public(), started=now_utc())
    jobs = []
    from .pipeline import CHAIN_IDS, CHAR_IDS, EVALUATION_IDS, SPECTRAL_IDS, STRUCTURE_IDS

    for k in cfg.k:
        try:
            yb = _prepare(k, cfg)
        except (YBError, RingError, ValueError, ArithmeticError) as exc:
            jobs.append(lambda k=k, exc=exc: _error_case(k, "structure", "structure", "yang-baxter", exc))
            continue
        jobs.append(lambda k=k, yb=yb: _timed(k, "structure", lambda: _with_missing(
            select(structure_report(yb), idents), cfg.identities, set(STRUCTURE_IDS))))
        for spec in cfg.evaluations_for(k):
            jobs.append(lambda k=k, yb=yb, spec=spec: _timed(k, "evaluation", lambda: _with_missing(
                select(run_evaluation(yb, spec, m_max=cfg.m_max, cross_max_k=cfg.cross_max_k), idents),
                cfg.identities, set(EVALUATION_IDS + CHAR_IDS + CHAIN_IDS))))
        if cfg.spectral:
            jobs.append(lambda k=k: _timed(k, "spectral", lambda: _with_missing(
                select(spectral_report(k, cfg.spectral_points, cfg.seed, q=_exact_q(cfg)), idents),
                cfg.identities, set(SPECTRAL_IDS) | {"popo"})))
    for res in run_parallel(jobs, cfgmod.threads()):
        if res.report.entries:
            run.cases.append(res)
    return run


# ---------------------------------------------------------------- spectrum


def spectrum_evaluations(k: int, cfg: RunConfig) -> list[dict]:
    if cfg.evaluations:
        evs = [e for e in cfg.evaluations_for(k) if e.get("kind", "torus") != "operator"]
        return evs
    evs = [{"kind": "torus", "F": "P", "t": [2 ** (i + 1) for i in range(k)]},
           {"kind": "identity", "F": "P", "c": 2}]
    if k == 2:
        evs.append({"kind": "reflection", "F": "P", "t": [], "a": 2, "c": 3})
    elif k % 2 == 0:
        evs.append({"kind": "reflection", "F": "P", "t": [2] * (k // 2 - 1), "a": 3, "c": 5})
    return [e for e in evs if e.get("F", "P") in cfg.F]


def torus_prediction(k: int, t, q: float) -> list[complex]:
    """ν-values a torus point should produce: t_i q^{-2ρ_i} μ."""
    mu = q ** (1 - k)
    return [complex(cfgmod._float_q(str(x))) * q ** (-r) * mu for x, r in zip(t, rho_weights(k))]


def multiset_distance(a: list, b: list) -> float:
    if len(a) != len(b):
        return float("inf")
    key = lambda z: (round(z.real, 6), round(z.imag, 6))
    return max((abs(x - y) for x, y in zip(sorted(a, key=key), sorted(b, key=key))), default=0.0)


def spectrum_row(k: int, spec: dict, cfg: RunConfig, ring) -> dict:
    label = evaluation_label(spec)
    row = {"k": k, "evaluation": label}
    try:
        yb = yb_data(k, ring)
        ev = make_evaluation(yb, dict(spec, label=label))
        if ev.aux_dim != 1:
            raise spc.SpectralError("spectrum extraction needs a scalar-entry evaluation")
        cd = char_data(ev, n_max=k + 1)
        case = spc.case_for(k, cd.sign)
        point = spc.extract_spectrum(cd, case, cfg.tol)
    except (spc.SpectralError, EvaluationError, CharError, YBError, ValueError) as exc:
        row.update(status="error", detail=str(exc))
        return row
    row.update(spc.spectrum_report(point, cd))
    scale = max(1.0, abs(point.nu0) ** 2)
    ok = max([0.0] + row["pair_residuals"]) <= cfg.tol * scale and row["roundtrip_residual"] <= cfg.tol
    if spec.get("kind", "torus") == "torus":
        got = list(point.nus) + ([point.nu0] if case == "Odd" else [])
        d = multiset_distance(got, torus_prediction(k, spec["t"], ring.qe.real))
        row["torus_relation_residual"] = float(f"{d:.3e}")
        ok = ok and d <= 1e-9 * max(1.0, max(abs(z) for z in got))
    row["status"] = "pass" if ok else "fail"
    return row


def cmd_spectrum(cfg: RunConfig) -> RunReport:
    cfg.validate()
    ring = cfg.ring_config("float")
    run = RunReport("spectrum", dict(cfg.public(), ring="float"), started=now_utc())
    jobs = [lambda k=k, s=s: spectrum_row(k, s, cfg, ring) for k in cfg.k for s in spectrum_evaluations(k, cfg)]
    rows = run_parallel(jobs, cfgmod.threads())
    run.extra["spectra"] = rows
    run.extra["bad"] = any(r["status"] != "pass" for r in rows)
    return run


# ---------------------------------------------------------------- bench / ybdump


def cmd_bench(cfg: RunConfig) -> str:
    cfg.validate()
    rows = []
    for k in cfg.k:
        rows += benchmod.kernel_rows(k, cfg.bench_n_legs, cfg.bench_repeats, cfg.seed)
    ring = cfg.ring_config()
    for k in cfg.k:
        rows.append(benchmod.suite_row(k, ring, cfg.evaluations_for(k), cfg.m_max))
    return benchmod.to_csv(rows)


def cmd_ybdump(cfg: RunConfig, out: Path) -> list[Path]:
    cfg.validate()
    ring = cfg.ring_config()
    k = cfg.k[0]
    yb = yb_data(k, ring)
    pair = _pair(yb, cfg.F[0])
    out.mkdir(parents=True, exist_ok=True)
    items = {"R": yb.R, "D": yb.D, "K": yb.K,
             "G": LegOperator(1, yb.N, 1, pair.G), "Ginv": LegOperator(1, yb.N, 1, pair.Ginv)}
    paths = []
    for name, op in items.items():
        p = out / f"{name}_k{k}_F{pair.F_tag}.dump"
        p.write_text(dump_operator(op, ring))
        paths.append(p)
    return paths


# ---------------------------------------------------------------- argparse


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qch", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("verify", "run every identity check"),
                        ("spectrum", "extract spectral variables (float ring)"),
                        ("bench", "time kernels and suites, CSV output"),
                        ("ybdump", "write R, D, K, G in the dump format")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="TOML configuration file")
        p.add_argument("--k", help="heights, e.g. 3 or 2,3 or 2-4")
        p.add_argument("--f", help="F tags, e.g. P or P,R")
        p.add_argument("--ring", choices=sorted(cfgmod.RING_ALIASES))
        p.add_argument("--q", help="deformation parameter, e.g. 7/5 or 1.4")
        p.add_argument("--ident", help="comma separated identity names (default: all)")
        p.add_argument("--output", help="output path stem (verify/spectrum/bench) or directory (ybdump)")
        p.add_argument("--quiet", action="store_true", help="no markdown on stdout")
    return ap


def _overrides(ns) -> dict:
    out = {}
    if ns.k:
        out["k"] = ns.k
    if ns.f:
        out["F"] = [x.strip() for x in ns.f.split(",") if x.strip()]
    if ns.ring:
        out["ring"] = ns.ring
    if ns.q:
        out["q"] = ns.q
    if ns.ident:
        out["identities"] = [x.strip() for x in ns.ident.split(",") if x.strip()]
    if ns.output:
        out["output"] = ns.output
    return out


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = cfgmod.load(ns.config, _overrides(ns))
        if ns.command == "verify":
            run = cmd_verify(cfg)
        elif ns.command == "spectrum":
            run = cmd_spectrum(cfg)
        elif ns.command == "bench":
            text = cmd_bench(cfg)
            sys.stdout.write(text)
            if cfg.output:
                p = Path(cfg.output).with_suffix(".csv")
                p.parent.mkdir(parents=True, exist_ok=True)
                p.write_text(text)
            return EXIT_OK
        else:
            for p in cmd_ybdump(cfg, Path(cfg.output or ".")):
                print(p)
            return EXIT_OK
    except (ConfigError, RingError, YBError) as exc:
        print(f"qch: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    paths = write(run, cfg.output)
    if not ns.quiet:
        sys.stdout.write(markdown(run))
    for p in paths:
        print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK if run.ok else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
