"""Leg-local contraction kernels.

The state layout is (pre, mid, post, aux, cols): ``mid`` is the block of legs
the operator touches, ``aux`` the auxiliary leg.  Two implementations exist:
a numba loop nest that skips zero operator entries, and a numpy path
(transpose + matmul) that also serves object arrays of exact scalars.
``QCH_KERNEL=numpy`` forces the numpy path for float data.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


def backend() -> str:
    want = os.environ.get("QCH_KERNEL", "numba").strip().lower()
    if want not in ("numba", "numpy"):
        raise ValueError(f"QCH_KERNEL must be numba or numpy, got {want!r}")
    if want == "numba" and not HAVE_NUMBA:
        return "numpy"
    return want


def apply_block_numpy(op, state, pre, mid, post, aux, with_aux):
    cols = state.shape[1]
    s = state.reshape(pre, mid, post, aux, cols)
    if with_aux:
        t = s.transpose(1, 3, 0, 2, 4).reshape(mid * aux, -1)
        r = (op @ t).reshape(mid, aux, pre, post, cols).transpose(2, 0, 3, 1, 4)
    else:
        t = s.transpose(1, 0, 2, 3, 4).reshape(mid, -1)
        r = (op @ t).reshape(mid, pre, post, aux, cols).transpose(1, 0, 2, 3, 4)
    return np.ascontiguousarray(r).reshape(state.shape)


@njit(cache=True)
def _apply_plain(op, s, out):
    pre, mid, rest = s.shape
    for a in range(pre):
        for m in range(mid):
            for mp in range(mid):
                c = op[m, mp]
                if c != 0:
                    for r in range(rest):
                        out[a, m, r] += c * s[a, mp, r]


@njit(cache=True)
def _apply_aux(op, s, out):
    pre, mid, post, aux, cols = s.shape
    for a in range(pre):
        for b in range(post):
            for m in range(mid):
                for u in range(aux):
                    row = m * aux + u
                    for mp in range(mid):
                        for up in range(aux):
                            c = op[row, mp * aux + up]
                            if c != 0:
                                for j in range(cols):
                                    out[a, m, b, u, j] += c * s[a, mp, b, up, j]


def apply_block_numba(op, state, pre, mid, post, aux, with_aux):
    dt = np.result_type(op.dtype, state.dtype)
    op = np.ascontiguousarray(op, dtype=dt)
    state = np.ascontiguousarray(state, dtype=dt)
    cols = state.shape[1]
    if with_aux:
        s = state.reshape(pre, mid, post, aux, cols)
        out = np.zeros_like(s)
        _apply_aux(op, s, out)
    else:
        s = state.reshape(pre, mid, post * aux * cols)
        out = np.zeros_like(s)
        _apply_plain(op, s, out)
    return out.reshape(state.shape)


def apply_block(op, state, pre, mid, post, aux, with_aux, kernel=None):
    if state.dtype == object or op.dtype == object:
        return apply_block_numpy(op, state, pre, mid, post, aux, with_aux)
    kernel = kernel or backend()
    if kernel == "numba":
        return apply_block_numba(op, state, pre, mid, post, aux, with_aux)
    return apply_block_numpy(op, state, pre, mid, post, aux, with_aux)
