"""Operators on V^⊗n ⊗ U with explicit leg structure.

Basis order: quantum legs 1..n with leg 1 slowest, auxiliary leg last.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..scalar_ring import RingConfig, format_scalar, parse_scalar
from .kernels import apply_block, backend

__all__ = [
    "LegOperator",
    "apply_local",
    "apply_local_right",
    "backend",
    "dump_operator",
    "embed",
    "identity",
    "load_operator",
    "partial_trace",
    "r_trace",
]


@dataclass(frozen=True, eq=False)
class LegOperator:
    n_legs: int
    N: int
    aux_dim: int
    data: np.ndarray

    def __post_init__(self):
        d = self.N ** self.n_legs * self.aux_dim
        if self.data.shape != (d, d):
            raise ValueError(
                f"data shape {self.data.shape} does not match legs={self.n_legs} N={self.N} aux={self.aux_dim}"
            )

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def like(self, data) -> "LegOperator":
        return LegOperator(self.n_legs, self.N, self.aux_dim, data)

    def __matmul__(self, other: "LegOperator") -> "LegOperator":
        if (self.n_legs, self.N, self.aux_dim) != (other.n_legs, other.N, other.aux_dim):
            raise ValueError("leg structure mismatch")
        return self.like(self.data @ other.data)

    @property
    def T(self) -> "LegOperator":
        return self.like(np.ascontiguousarray(self.data.T))


def identity(n: int, N: int, aux: int, ring: RingConfig) -> LegOperator:
    return LegOperator(n, N, aux, ring.eye(N ** n * aux))


def _op_legs(op: LegOperator) -> int:
    return op.n_legs


def apply_local(op: LegOperator, i: int, states: np.ndarray, n: int, aux: int = 1) -> np.ndarray:
    """Apply ``op`` to legs i..i+j-1 of every column of ``states``.

    ``states`` has N^n * aux rows.  An op carrying an auxiliary leg acts on it
    too; an op without one acts trivially there.
    """
    j = _op_legs(op)
    N = op.N
    if not 1 <= i <= n - j + 1:
        raise IndexError(f"position {i} out of range for a {j}-leg operator on {n} legs")
    if op.aux_dim != 1 and op.aux_dim != aux:
        raise ValueError("auxiliary dimension mismatch")
    if states.shape[0] != N ** n * aux:
        raise ValueError("state dimension mismatch")
    vec = states.ndim == 1
    st = states.reshape(states.shape[0], -1)
    out = apply_block(
        op.data, st, N ** (i - 1), N ** j, N ** (n - i - j + 1), aux, op.aux_dim != 1
    )
    return out.ravel() if vec else out


def apply_local_right(x: np.ndarray, op: LegOperator, i: int, n: int, aux: int = 1) -> np.ndarray:
    """Rows of ``x`` times the embedded ``op`` (x @ embed(op))."""
    return apply_local(op.T, i, np.ascontiguousarray(x.T), n, aux).T


def embed(op: LegOperator, i: int, n: int, aux: int | None = None) -> LegOperator:
    aux = op.aux_dim if aux is None else aux
    d = op.N ** n * aux
    eye = np.eye(d, dtype=op.data.dtype) if op.data.dtype != object else _obj_eye(d, op.data)
    return LegOperator(n, op.N, aux, apply_local(op, i, eye, n, aux))


def _obj_eye(d, like):
    z = next((v for v in like.flat), 0) * 0
    one = z + 1
    out = np.empty((d, d), dtype=object)
    out.fill(z)
    for a in range(d):
        out[a, a] = one
    return out


def partial_trace(op: LegOperator, legs) -> LegOperator:
    """Trace over the given quantum legs (1-based); the aux leg is kept."""
    legs = sorted(set(legs))
    if op.data.size == 0:
        raise ValueError("empty input matrix")
    n, N, aux = op.n_legs, op.N, op.aux_dim
    if any(not 1 <= l <= n for l in legs):
        raise IndexError("leg out of range")
    t = op.data.reshape((N,) * n + (aux,) + (N,) * n + (aux,))
    width = n + 1
    for l in reversed(legs):
        t = np.trace(t, axis1=l - 1, axis2=l - 1 + width)
        width -= 1
    m = n - len(legs)
    d = N ** m * aux
    return LegOperator(m, N, aux, np.ascontiguousarray(t).reshape(d, d))


def r_trace(x: LegOperator, d: LegOperator, legs) -> LegOperator:
    """Weighted trace: D inserted on the left on every traced leg."""
    if d.n_legs != 1 or d.aux_dim != 1 or d.N != x.N:
        raise ValueError("leg mismatch: D must be a plain 1-leg operator")
    data = x.data
    for l in legs:
        data = apply_local(d, l, data, x.n_legs, x.aux_dim)
    return partial_trace(x.like(data), legs)


def dump_operator(op: LegOperator, ring: RingConfig) -> str:
    lines = [f"legs={op.n_legs} N={op.N} aux={op.aux_dim} ring={ring.kind}"]
    lines.extend(format_scalar(v) for v in op.data.flat)
    return "\n".join(lines) + "\n"


def load_operator(text: str) -> tuple[LegOperator, str]:
    lines = text.strip("\n").split("\n")
    head = dict(part.split("=", 1) for part in lines[0].split())
    n, N, aux, kind = int(head["legs"]), int(head["N"]), int(head["aux"]), head["ring"]
    d = N ** n * aux
    vals = [parse_scalar(s, kind) for s in lines[1:]]
    if len(vals) != d * d:
        raise ValueError(f"expected {d * d} entries, found {len(vals)}")
    data = np.array(vals, dtype=np.complex128 if kind == "float" else object)
    if data.dtype == object:
        out = np.empty(d * d, dtype=object)
        out[:] = vals
        data = out
    return LegOperator(n, N, aux, data.reshape(d, d)), kind
