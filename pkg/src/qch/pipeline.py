"""End-to-end verification of one (k, F, evaluation) case.

Each stage appends named entries to a CHReport; a stage that raises is
recorded as an error entry and the remaining stages still run when they can.
"""
from __future__ import annotations

import random

import numpy as np

from . import ch_identities as ci
from . import spectral as spc
from .ch_identities import CHReport
from .char_subalg import (
    CharError,
    char_data,
    newton_e_residual,
    p0_closed_forms,
    projector_sums,
    reciprocal_residual,
    resolution_residuals,
    wronski_residual,
)
from .linalg import rank
from .qm_algebra import (
    Evaluation,
    EvaluationError,
    g_permutation_residual,
    make_evaluation,
    qmai_residual,
    tau2_residual,
)
from .scalar_ring import Residual, RingConfig, q_number, to_mpq
from .yang_baxter import (
    YBData,
    YBError,
    braid_residual,
    check_compatible,
    minimal_poly_residual,
    yb_data,
)

STRUCTURE_IDS = (
    "braid", "skew-strict", "Tr2R", "minpoly", "idempotents", "rank-K",
    "antisym-dims", "twist-P", "twist-R", "p0-closed",
)
EVALUATION_IDS = ("qmai", "tau2", "g-perm")
CHAR_IDS = (
    "Newton-a", "e-vanish", "Wronski", "e-cross", "h-cross",
    "reciprocal", "component", "resolution", "g-half",
)
SPECTRAL_IDS = (
    "pi-reciprocal", "factorized-CH", "involution", "delta-sum", "GS", "p-param",
    "h-param", "mod-N", "mod-W", "popo", "partial-fractions", "w0",
)


def _exact_flag(ring: RingConfig) -> str:
    return "exact" if ring.exact else "float"


def _zero(ring: RingConfig) -> Residual:
    return Residual(0, True) if ring.exact else Residual(0.0, False, ring.tol)


def _bool(ok: bool, ring: RingConfig) -> Residual:
    """A yes/no check rendered as a residual (0 or 1)."""
    if ring.exact:
        return Residual(0 if ok else 1, True)
    return Residual(0.0 if ok else 1.0, False, ring.tol)


class _Stage:
    """Context manager turning exceptions into error entries."""

    def __init__(self, rep: CHReport, name: str):
        self.rep, self.name = rep, name

    def __enter__(self):
        return self

    def __exit__(self, et, exc, tb):
        if exc is None:
            return False
        if isinstance(exc, (ValueError, ArithmeticError, np.linalg.LinAlgError)):
            self.rep.error(self.name, str(exc) or type(exc).__name__)
            return True
        return False


# ---------------------------------------------------------------- structure


def structure_report(yb: YBData, n_extra: int = 1) -> CHReport:
    ring, k = yb.ring, yb.k
    rep = CHReport(k, "structure", _exact_flag(ring))
    rep.add("braid", braid_residual(yb.R, ring))
    rep.add("skew-strict", _bool(yb.strict, ring))
    with _Stage(rep, "Tr2R"):
        N = yb.N
        f4 = yb.R.data.reshape(N, N, N, N)
        tr = np.einsum("iajb,ba->ij", f4, yb.D.data)
        rep.add("Tr2R", ring.residual(tr - ring.eye(N), tr))
    rep.add("minpoly", minimal_poly_residual(yb.R, ring, yb.mu))
    I = ring.eye(yb.R.dim)
    A, S, C = yb.A2, yb.S2, yb.C2
    rep.add("idempotents", [
        ring.residual(A + S + C - I, I),
        ring.residual(A @ S, A), ring.residual(S @ C, S), ring.residual(A @ C, A),
        ring.residual(A @ A - A, A), ring.residual(S @ S - S, S), ring.residual(C @ C - C, C),
    ])
    rep.add("rank-K", _bool(rank(yb.K.data, ring) == 1, ring))
    with _Stage(rep, "antisym-dims"):
        dims = [p.dim for p in yb.antisym(k + n_extra)[1:]]
        ok = all(d > 0 for d in dims[:k]) and dims[k - 1] == 1 and all(d == 0 for d in dims[k:])
        rep.add("antisym-dims", _bool(ok, ring), "dims " + ",".join(map(str, dims)))
    rep.add("twist-P", list(check_compatible(yb.R, yb.flip(), ring)))
    rep.add("twist-R", list(check_compatible(yb.R, yb.R, ring)))
    p0 = sum((yb.D.data[i, i] for i in range(yb.N)), ring.zero)
    a, b = p0_closed_forms(k, ring)
    rep.add("p0-closed", [ring.residual(np.array([p0 - a]), np.array([a])),
                          ring.residual(np.array([p0 - b]), np.array([b]))])
    return rep


# ---------------------------------------------------------------- evaluation + char


def evaluation_checks(rep: CHReport, ev: Evaluation, cd) -> None:
    ring = ev.ring
    rep.add("qmai", [qmai_residual(ev, i, 3) for i in (1, 2)])
    rep.add("tau2", tau2_residual(ev, cd.g))
    if cd.g_inv is None:
        rep.skip("g-perm", "g is not invertible")
    else:
        rep.add("g-perm", g_permutation_residual(ev, cd.g, cd.g_inv))


def char_checks(rep: CHReport, ev: Evaluation, cd, cross_max_k: int = 4) -> None:
    ring, k = ev.ring, ev.k
    n = len(cd.p) - 1
    rep.add("Newton-a", [newton_e_residual(cd.e, cd.p, cd.g, k, j, ring) for j in range(1, n + 1)])
    rep.add("e-vanish", [ring.residual(cd.e[j], cd.p[1], cd.g) for j in range(k + 1, n + 1)])
    rep.add("Wronski", wronski_residual(cd.e, cd.h, cd.g, min(n, 2 * k), ring))
    if k <= cross_max_k:
        with _Stage(rep, "e-cross"):
            e2, h2 = projector_sums(ev, k)
            rep.add("e-cross", [ring.residual(cd.e[i] - e2[i], e2[i]) for i in range(k + 1)])
            rep.add("h-cross", [ring.residual(cd.h[i] - h2[i], h2[i]) for i in range(k + 1)])
    else:
        rep.skip("e-cross", f"projector route limited to k <= {cross_max_k}")
        rep.skip("h-cross", f"projector route limited to k <= {cross_max_k}")
    if cd.g_inv is None:
        for name in ("reciprocal", "component", "resolution", "g-half"):
            rep.skip(name, "g is not invertible")
        return
    rep.add("reciprocal", reciprocal_residual(cd))
    if k % 2 == 0:
        if cd.sign is None:
            rep.skip("component", "g^-l e_2l is not ±1")
        else:
            rep.add("component", _zero(ring), f"sign {cd.sign:+d}")
        rep.add("resolution", resolution_residuals(cd) or None, "" if cd.sign else "component undetermined")
        rep.skip("g-half", "even height")
    else:
        rep.skip("component", "odd height")
        with _Stage(rep, "resolution"):
            rep.add("resolution", resolution_residuals(cd))
        gh = cd.g_half
        rep.add("g-half", [ring.residual(gh @ gh - cd.g, cd.g)])


# ---------------------------------------------------------------- spectral (exact ν points)


def spectral_report(k: int, points: int = 10, seed: int = 0, symbolic_max_l: int = 3, q="7/5") -> CHReport:
    """Exact checks of the spectral layer for height k at rational ν points."""
    q = to_mpq(q)
    rep = CHReport(k, "spectral", "exact")
    cases = ["Odd"] if k % 2 else ["EvenPlus", "EvenMinus"]
    l = (k + 1) // 2
    rng = random.Random(seed * 1000 + k)
    n_max = 2 * k + 2
    ok = lambda vals: Residual(max((abs(v) for v in vals), default=0), True)
    for case in cases:
        if case != "EvenPlus" and l < 2:
            rep.skip(f"{case}:all", "needs l >= 2")
            continue
        tag = f"{case}:"
        if l <= symbolic_max_l:
            rep.add(tag + "pi-reciprocal", _bool(spc.symbolic_reciprocal_check(case, l), RingConfig()))
            rep.add(tag + "factorized-CH", _bool(spc.factorized_ch_check(spc.symbolic_point(case, l)), RingConfig()))
            rep.add(tag + "involution", _bool(spc.involution_identities(case, l), RingConfig()))
        else:
            for name in ("pi-reciprocal", "factorized-CH", "involution"):
                rep.skip(tag + name, f"symbolic checks limited to l <= {symbolic_max_l}")
        acc = {name: [] for name in ("delta-sum", "GS", "p-param", "h-param", "mod-N", "mod-W", "partial-fractions", "w0")}
        for _ in range(points):
            p = spc.random_point(case, l, rng)
            acc["delta-sum"].append(spc.delta_sum_rule(spc.weights(p, q), q))
            acc["GS"].extend(spc.gs_residuals(p, q, n_max))
            pn, hn = spc.newton_images(p, q, n_max)
            pp, hp = spc.parameterize_p_h(p, q, n_max)
            acc["p-param"].extend(a - b for a, b in zip(pn, pp))
            acc["h-param"].extend(a - b for a, b in zip(hn, hp))
            ms = spc.modified_sums(spc.pi_map_e(p, n_max), hn, pn, spc.pi_g(p), p.k, q, n_max)
            acc["mod-N"].extend(ms.residuals["mod-N-e"] + ms.residuals["mod-N-h"])
            acc["mod-W"].extend(ms.residuals["mod-W-e"] + ms.residuals["mod-W-h"])
            for vals in spc.partial_fraction_check(p, q, rng).values():
                acc["partial-fractions"].extend(vals)
            acc["w0"].extend(spc.pf_at_zero(p, q).values())
        for name, vals in acc.items():
            rep.add(tag + name, ok(vals), f"{points} rational points")
    rep.add("popo", ok([spc.popo_residual(k, q)]))
    return rep


# ---------------------------------------------------------------- case driver


def evaluation_label(spec: dict) -> str:
    if spec.get("label"):
        return spec["label"]
    kind = spec.get("kind", "torus")
    F = spec.get("F", "P")
    if kind == "torus":
        return f"torus[{','.join(str(x) for x in spec.get('t', []))}]/F={F}"
    if kind == "identity":
        return f"identity[{spec.get('c', 1)}]/F={F}"
    if kind == "reflection":
        t = ",".join(str(x) for x in spec.get("t", []))
        return f"reflection[{t};a={spec['a']};c={spec['c']}]/F={F}"
    return f"{kind}/F={F}"


def select(rep: CHReport, idents: set | None) -> CHReport:
    if not idents:
        return rep
    keep = [e for e in rep.entries if e.identity in idents or e.identity.split(":")[-1] in idents]
    return CHReport(rep.k, rep.evaluation, rep.mode, keep)


def run_evaluation(yb: YBData, spec: dict, chain: bool = True, m_max: int = 1,
                   cross_max_k: int = 4) -> CHReport:
    ring = yb.ring
    spec = dict(spec)
    spec["label"] = evaluation_label(spec)
    rep = CHReport(yb.k, spec["label"], _exact_flag(ring))
    try:
        ev = make_evaluation(yb, spec)
    except (EvaluationError, YBError, ValueError, KeyError) as exc:
        rep.error("evaluation", f"{type(exc).__name__}: {exc}")
        return rep
    try:
        cd = char_data(ev)
    except (CharError, ValueError, ArithmeticError) as exc:
        rep.error("char-data", str(exc))
        return rep
    evaluation_checks(rep, ev, cd)
    char_checks(rep, ev, cd, cross_max_k)
    if chain:
        try:
            sub = ci.run_chain(ev, cd, m_max)
            rep.entries.extend(sub.entries)
        except (ValueError, ArithmeticError) as exc:
            rep.error("chain", str(exc))
    return rep


def default_evaluations(k: int) -> list[dict]:
    """A scalar torus point and the operator point for both F."""
    t = [2 ** (i + 1) for i in range(k)]
    out = [
        {"kind": "torus", "F": "P", "t": t},
        {"kind": "operator", "F": "P"},
        {"kind": "operator", "F": "R"},
    ]
    return out


def structure_for(k: int, ring: RingConfig) -> YBData:
    return yb_data(k, ring)


__all__ = [
    "structure_report", "evaluation_checks", "char_checks", "spectral_report",
    "run_evaluation", "default_evaluations", "evaluation_label", "select", "q_number",
]

CHAIN_IDS = (
    "AB-boundary", "cor1ab", "rek1", "rek2", "UinvV", "Nx2N", "X-rek", "X-rel-gen",
    "ahah-A", "ahah-B", "ahah1", "exAfin", "exBfin", "ortho-5", "ortho-6", "ortho-7", "ortho-8",
    "CH-O+", "CH-O-1", "CC4", "DD4", "ortho-9", "CC4-DD4", "CH-O-odd",
)
KNOWN_IDS = frozenset(
    STRUCTURE_IDS + EVALUATION_IDS + CHAR_IDS + CHAIN_IDS + SPECTRAL_IDS + ("evaluation", "char-data", "chain")
)
