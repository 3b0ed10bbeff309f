"""Dense linear algebra over the configured ring.

Exact rings use Gauss-Jordan elimination on object arrays of mpq; the float
ring defers to numpy/LAPACK with a relative singular-value cutoff.
"""
from __future__ import annotations

import numpy as np

from .scalar_ring import RingConfig, RingError


class SingularError(ArithmeticError):
    pass


def _need_field(ring: RingConfig):
    if ring.kind == "laurent":
        raise RingError("linear solves need a field; specialize q first")


def rref(a: np.ndarray, ring: RingConfig):
    """Reduced row echelon form and pivot columns (exact rings only)."""
    _need_field(ring)
    m = np.array(a, dtype=object, copy=True)
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = [i for i in range(r, rows) if m[i, c] != 0]
        if not nz:
            continue
        p = nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        m[r] = m[r] / m[r, c]
        hit = np.array([i != r and m[i, c] != 0 for i in range(rows)], dtype=bool)
        if hit.any():
            m[hit] = m[hit] - np.outer(m[hit, c], m[r])
        pivots.append(c)
        r += 1
    return m, pivots


def _float_rcut(s: np.ndarray, shape) -> float:
    if s.size == 0:
        return 0.0
    return max(shape) * np.finfo(float).eps * 1e3 * s[0]


def rank(a: np.ndarray, ring: RingConfig) -> int:
    if a.size == 0:
        return 0
    if ring.exact:
        return len(rref(a, ring)[1])
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > _float_rcut(s, a.shape)))


def nullspace(a: np.ndarray, ring: RingConfig) -> np.ndarray:
    """Columns spanning {x : a x = 0}."""
    rows, cols = a.shape
    if ring.exact:
        m, piv = rref(a, ring)
        free = [c for c in range(cols) if c not in piv]
        basis = ring.zeros((cols, len(free)))
        for j, f in enumerate(free):
            basis[f, j] = ring.one
            for r, pc in enumerate(piv):
                basis[pc, j] = -m[r, f]
        return basis
    if rows == 0:
        return np.eye(cols, dtype=np.complex128)
    # thin SVD already yields a full V when rows >= cols; U is never needed
    _, s, vh = np.linalg.svd(a, full_matrices=rows < cols)
    rk = int(np.sum(s > _float_rcut(s, a.shape)))
    return vh[rk:].conj().T.copy()


def solve(a: np.ndarray, b: np.ndarray, ring: RingConfig) -> np.ndarray:
    """Solve a x = b for square invertible a."""
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("solve needs a square matrix")
    vec = b.ndim == 1
    bb = b.reshape(n, -1)
    if not ring.exact:
        x = np.linalg.solve(a, bb)
        return x.ravel() if vec else x
    m, piv = rref(np.concatenate([a, bb], axis=1), ring)
    if piv[:n] != list(range(n)) or (len(piv) > n):
        raise SingularError("singular matrix")
    x = m[:, n:]
    return x.ravel() if vec else x


def inverse(a: np.ndarray, ring: RingConfig) -> np.ndarray:
    return solve(a, ring.eye(a.shape[0]), ring)


def is_invertible(a: np.ndarray, ring: RingConfig) -> bool:
    return rank(a, ring) == a.shape[0]


def intersect(basis_a: np.ndarray, basis_b: np.ndarray, ring: RingConfig) -> np.ndarray:
    """Basis of span(a) ∩ span(b), expressed in ambient coordinates."""
    if basis_a.shape[1] == 0 or basis_b.shape[1] == 0:
        return ring.zeros((basis_a.shape[0], 0))
    ns = nullspace(np.concatenate([basis_a, -basis_b], axis=1), ring)
    return basis_a @ ns[: basis_a.shape[1]]
