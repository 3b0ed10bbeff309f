"""Timing of the contraction kernels and of whole verification suites."""
from __future__ import annotations

import csv
import io
import time

import numpy as np

from .scalar_ring import RingConfig
from .tensor_ops import kernels
from .yang_baxter import yb_data

COLUMNS = ("what", "k", "ring", "kernel", "n_legs", "seconds")


def _best(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_rows(k: int, n_legs: int = 4, repeats: int = 3, seed: int = 0) -> list[dict]:
    """Apply R on legs 2,3 of a random complex block, once per backend."""
    ring = RingConfig.floating(1.4)
    R = yb_data(k, ring).R
    N = k
    rng = np.random.default_rng(seed)
    cols = N ** n_legs
    state = rng.standard_normal((N ** n_legs, cols)) + 0j
    pre, mid, post = N, N * N, N ** (n_legs - 3)
    rows = []
    ref = None
    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    for kern in backends:
        run = lambda: kernels.apply_block(R.data, state, pre, mid, post, 1, False, kernel=kern)
        out = run()  # warm-up (numba compiles here)
        if ref is None:
            ref = out
        elif not np.allclose(out, ref):
            raise RuntimeError("kernel backends disagree")
        rows.append({"what": "kernel", "k": k, "ring": "float", "kernel": kern,
                     "n_legs": n_legs, "seconds": _best(run, repeats)})
    return rows


def suite_row(k: int, ring: RingConfig, evaluations: list[dict], m_max: int = 1) -> dict:
    from .pipeline import run_evaluation, structure_report

    t0 = time.perf_counter()
    yb = yb_data(k, ring)
    structure_report(yb)
    for spec in evaluations:
        run_evaluation(yb, spec, m_max=m_max)
    return {"what": "suite", "k": k, "ring": ring.kind, "kernel": kernels.backend(),
            "n_legs": "", "seconds": time.perf_counter() - t0}


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        r = dict(r)
        if isinstance(r["seconds"], float):
            r["seconds"] = f"{r['seconds']:.6f}"
        w.writerow(r)
    return buf.getvalue()
