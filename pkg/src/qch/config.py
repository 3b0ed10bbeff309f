"""Run configuration: a TOML file plus command-line overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import tomli

from .scalar_ring import RingConfig, RingError

RING_ALIASES = {"exact": "rational", "rational": "rational", "float": "float", "laurent": "laurent"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    k: tuple = (2,)
    F: tuple = ("P", "R")
    ring: str = "rational"
    q: str = "7/5"
    tol: float = 1e-9
    identities: tuple = ()          # empty = all
    evaluations: tuple = ()         # dicts; a missing "k" means every k
    m_max: int = 1
    spectral: bool = True
    spectral_points: int = 10
    seed: int = 0
    cross_max_k: int = 4
    output: str | None = None
    bench_n_legs: int = 4
    bench_repeats: int = 3

    def ring_config(self, kind: str | None = None) -> RingConfig:
        kind = kind or self.ring
        if kind == "rational":
            return RingConfig.rational(self.q)
        if kind == "float":
            return RingConfig.floating(_float_q(self.q), self.tol)
        return RingConfig.laurent()

    def validate(self) -> None:
        """Reject bad k or q before any work starts."""
        if not self.k:
            raise ConfigError("no heights selected")
        for k in self.k:
            if not isinstance(k, int) or k < 2:
                raise ConfigError(f"height must be an integer >= 2, got {k!r}")
        for f in self.F:
            if f not in ("P", "R"):
                raise ConfigError(f"F must be P or R, got {f!r}")
        try:
            ring = self.ring_config()
            for k in self.k:
                ring.validate(k)
        except (RingError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(str(exc) or "parameter restriction violated") from exc

    def evaluations_for(self, k: int) -> list[dict]:
        from .pipeline import default_evaluations

        mine = [dict(e) for e in self.evaluations if e.get("k", k) == k]
        if not self.evaluations:
            mine = default_evaluations(k)
        for e in mine:
            e.pop("k", None)
        return [e for e in mine if e.get("F", "P") in self.F]

    def public(self) -> dict:
        """The subset of fields that shapes the report (no paths)."""
        return {
            "k": list(self.k),
            "F": list(self.F),
            "ring": self.ring,
            "q": self.q,
            "tol": self.tol,
            "identities": list(self.identities) or "all",
            "m_max": self.m_max,
            "spectral": self.spectral,
            "spectral_points": self.spectral_points,
            "seed": self.seed,
        }


def _float_q(q: str) -> float:
    if "/" in str(q):
        a, b = str(q).split("/")
        return int(a) / int(b)
    return float(q)


def _as_tuple(v) -> tuple:
    if v is None:
        return ()
    if isinstance(v, (list, tuple)):
        return tuple(v)
    return (v,)


def _parse_k(v) -> tuple:
    out = []
    for item in _as_tuple(v):
        if isinstance(item, str):
            for part in item.split(","):
                part = part.strip()
                if "-" in part:
                    a, b = part.split("-")
                    out.extend(range(int(a), int(b) + 1))
                elif part:
                    out.append(int(part))
        else:
            out.append(item)
    return tuple(out)


def _stringify(v):
    if isinstance(v, list):
        return [_stringify(x) for x in v]
    if isinstance(v, float):
        raise ConfigError("evaluation entries must be integers or rational strings like \"7/5\"")
    return v


def from_dict(data: dict, base: RunConfig | None = None) -> RunConfig:
    cfg = base or RunConfig()
    kw = {}
    if "k" in data:
        kw["k"] = _parse_k(data["k"])
    if "F" in data:
        kw["F"] = tuple(str(x) for x in _as_tuple(data["F"]))
    if "ring" in data:
        if data["ring"] not in RING_ALIASES:
            raise ConfigError(f"unknown ring {data['ring']!r}")
        kw["ring"] = RING_ALIASES[data["ring"]]
    if "q" in data:
        kw["q"] = str(data["q"])
    for key, cast in (("tol", float), ("m_max", int), ("spectral", bool), ("spectral_points", int),
                      ("seed", int), ("cross_max_k", int), ("bench_n_legs", int), ("bench_repeats", int)):
        if key in data:
            kw[key] = cast(data[key])
    if "identities" in data:
        v = data["identities"]
        kw["identities"] = () if v == "all" else tuple(_as_tuple(v))
    if "output" in data:
        kw["output"] = str(data["output"])
    if "evaluation" in data:
        evs = []
        for e in data["evaluation"]:
            e = {key: _stringify(val) for key, val in e.items()}
            if e.get("kind", "torus") not in ("torus", "identity", "operator", "reflection"):
                raise ConfigError(f"unknown evaluation kind {e.get('kind')!r}")
            evs.append(e)
        kw["evaluations"] = tuple(evs)
    unknown = set(data) - {"k", "F", "ring", "q", "tol", "m_max", "spectral", "spectral_points", "seed",
                           "cross_max_k", "identities", "output", "evaluation", "bench_n_legs", "bench_repeats"}
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return replace(cfg, **kw)


def load(path: str | os.PathLike | None, overrides: dict | None = None) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        p = Path(path)
        try:
            data = tomli.loads(p.read_text())
        except (OSError, tomli.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {p}: {exc}") from exc
        cfg = from_dict(data, cfg)
    if overrides:
        cfg = from_dict({key: val for key, val in overrides.items() if val is not None}, cfg)
    return cfg


def threads() -> int:
    raw = os.environ.get("QCH_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"QCH_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)
