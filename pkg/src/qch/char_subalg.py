"""Elements of the characteristic subalgebra: g, power sums, elementary and
complete sums, and the relations among them.

All elements are dim U × dim U matrices (1×1 for scalar-entry points).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .qm_algebra import Evaluation, PowerTable, apply_copy, apply_copy_product, r_trace_cols
from .scalar_ring import RingConfig, RingError, q_number


class CharError(ValueError):
    pass


def _mpow(x: np.ndarray, n: int, ring: RingConfig) -> np.ndarray:
    if n < 0:
        return _mpow(linalg.inverse(x, ring), -n, ring)
    out = ring.eye(x.shape[0])
    for _ in range(n):
        out = out @ x
    return out


def _qn(n: int, ring: RingConfig):
    v = q_number(n, ring)
    if v == 0:
        raise CharError("root of unity")
    return v


# ---------------------------------------------------------------- power sums


def r_trace_1(ev: Evaluation, X: np.ndarray) -> np.ndarray:
    """Tr_R over the quantum leg of an (N·dimU)² matrix."""
    N, aux = ev.N, ev.aux_dim
    Xw = r_trace_cols(ev, X, 1, [1])
    return np.trace(Xw.reshape(N, aux, N, aux), axis1=0, axis2=2)


def power_sums(ev: Evaluation, n_max: int, table: PowerTable | None = None) -> list:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    table = table or PowerTable(ev)
    ring = ev.ring
    p0 = sum((ev.yb.D.data[i, i] for i in range(ev.N)), ring.zero)
    out = [ev.one_u() * p0]
    for i in range(1, n_max + 1):
        out.append(r_trace_1(ev, table[i]))
    return out


def p0_closed_forms(k: int, ring: RingConfig):
    """Both closed forms of Tr_R Id: (q-μ)(1/q+μ)/(q-1/q) and q^(1-k)(1+(k-1)_q)."""
    q, mu = ring.qe, ring.mu(k)
    a = (q - mu) * (ring.inv(q) + mu) / ring.lam()
    b = ring.qpow(1 - k) * (ring.one + q_number(k - 1, ring))
    return a, b


# ---------------------------------------------------------------- Newton / Wronski


def newton_e(p: list, g: np.ndarray, k: int, n_max: int, ring: RingConfig) -> list:
    """e_0..e_{n_max} from the (q, μ=q^(1-k)) Newton relations."""
    one = ring.eye(g.shape[0])
    q = ring.qe
    e = [one]
    gp = [one]
    for n in range(1, n_max + 1):
        gp.append(gp[-1] @ g)
        s = sum(((-q) ** i * (e[i] @ p[n - i]) for i in range(n)), 0 * one)
        corr = 0 * one
        for i in range(1, n // 2 + 1):
            corr = corr + (ring.qpow(n - 2 * i - k) - ring.qpow(-n + 2 * i)) * (e[n - 2 * i] @ gp[i])
        s = s - (-1) ** n * q * corr
        e.append(s / ((-1) ** (n - 1) * _qn(n, ring)))
    return e


def newton_h(p: list, g: np.ndarray, k: int, n_max: int, ring: RingConfig) -> list:
    one = ring.eye(g.shape[0])
    h = [one]
    gp = [one]
    for n in range(1, n_max + 1):
        gp.append(gp[-1] @ g)
        s = sum((ring.qpow(-i) * (h[i] @ p[n - i]) for i in range(n)), 0 * one)
        for i in range(1, n // 2 + 1):
            s = s - (ring.qpow(n - 2 * i - 1) + ring.qpow(-n + 2 * i + 1 - k)) * (h[n - 2 * i] @ gp[i])
        h.append(s / _qn(n, ring))
    return h


def newton_e_residual(e, p, g, k, n, ring):
    """Σ(-q)^i e_i p_{n-i} - (-1)^(n-1) n_q e_n - (-1)^n q Σ(...)."""
    q = ring.qe
    one = ring.eye(g.shape[0])
    lhs = sum(((-q) ** i * (e[i] @ p[n - i]) for i in range(n)), 0 * one)
    rhs = (-1) ** (n - 1) * q_number(n, ring) * e[n]
    for i in range(1, n // 2 + 1):
        rhs = rhs + (-1) ** n * q * (ring.qpow(n - 2 * i - k) - ring.qpow(-n + 2 * i)) * (e[n - 2 * i] @ _mpow(g, i, ring))
    return ring.residual(lhs - rhs, lhs, rhs)


def wronski_residual(e: list, h: list, g: np.ndarray, n_max: int, ring: RingConfig) -> list:
    out = []
    one = ring.eye(g.shape[0])
    for n in range(n_max + 1):
        s = 0 * one
        for i in range(n + 1):
            ei = e[i] if i < len(e) else 0 * one
            s = s + (-1) ** i * (ei @ h[n - i])
        if n == 0:
            s = s - one
        if n == 2:
            s = s + g
        out.append(ring.residual(s, g, one))
    return out


# ---------------------------------------------------------------- projector route


def _proj_parts(ev: Evaluation, proj, keep_first: bool, copy_first: bool = True):
    ring = ev.ring
    n = proj.n_legs
    N, aux = ev.N, ev.aux_dim
    d = proj.dim
    U = proj.U if aux == 1 else np.kron(proj.U, ring.eye(aux))
    if copy_first:
        Z = apply_copy_product(ev, n, U)
    else:
        Z = U
        for i in range(n, 1, -1):
            Z = apply_copy(ev, i, Z, n)
    legs = range(2, n + 1) if keep_first else range(1, n + 1)
    Z = r_trace_cols(ev, Z, n, legs)
    W = proj.Y @ proj.C.T
    return Z.reshape(N, N ** (n - 1), aux, d, aux), W.reshape(N, N ** (n - 1), d)


def wedge_power(ev: Evaluation, proj, copy_first: bool = True) -> np.ndarray:
    """Tr_R(2..n)(M̄_1…M̄_n A_n) for a low-rank projector A_n.

    With ``copy_first=False`` the first copy is left out: Tr_R(2..n)(M̄_2…M̄_n A_n).
    """
    N, aux = ev.N, ev.aux_dim
    if proj.dim == 0:
        return ev.ring.zeros((N * aux, N * aux))
    Z, W = _proj_parts(ev, proj, True, copy_first)
    t = np.tensordot(Z, W, axes=([1, 3], [1, 2]))  # (a, u, v, b)
    return np.ascontiguousarray(t.transpose(0, 1, 3, 2)).reshape(N * aux, N * aux)


def proj_char(ev: Evaluation, proj) -> np.ndarray:
    """ch of the projector: Tr_R(1..n)(M̄_1…M̄_n A_n)."""
    aux = ev.aux_dim
    if proj.dim == 0:
        return ev.ring.zeros((aux, aux))
    Z, W = _proj_parts(ev, proj, False)
    return np.tensordot(Z, W, axes=([0, 1, 3], [0, 1, 2]))  # (u, v)


def projector_sums(ev: Evaluation, n_max: int):
    yb = ev.yb
    ring = ev.ring
    one = ev.one_u()
    A = yb.antisym(n_max)
    S = yb.sym(n_max)
    e = [one] + [proj_char(ev, A[i]) for i in range(1, n_max + 1)]
    h = [one] + [proj_char(ev, S[i]) for i in range(1, n_max + 1)]
    return e, h


# ---------------------------------------------------------------- CharData


@dataclass
class CharData:
    k: int
    ring: RingConfig
    g: np.ndarray
    g_inv: np.ndarray | None
    p: list
    e: list
    h: list
    sign: int | None = None
    g_half: np.ndarray | None = None
    table: PowerTable | None = field(default=None, repr=False)
    ev: Evaluation | None = field(default=None, repr=False)

    @property
    def l(self) -> int:
        return (self.k + 1) // 2

    def gpow(self, n: int) -> np.ndarray:
        if n >= 0:
            return _mpow(self.g, n, self.ring)
        if self.g_inv is None:
            raise CharError("g is not invertible")
        return _mpow(self.g_inv, -n, self.ring)

    def ee(self, i: int) -> np.ndarray:
        """e_i with e_i = 0 outside 0..k."""
        if 0 <= i < len(self.e):
            return self.e[i]
        return 0 * self.e[0]


def char_data(ev: Evaluation, n_max: int | None = None, table: PowerTable | None = None) -> CharData:
    ring = ev.ring
    k = ev.k
    n_max = n_max or 2 * k + 2
    table = table or PowerTable(ev)
    g = table.g
    try:
        g_inv = linalg.inverse(g, ring)
    except (linalg.SingularError, np.linalg.LinAlgError):
        g_inv = None
    p = power_sums(ev, n_max, table)
    e = newton_e(p, g, k, n_max, ring)
    h = newton_h(p, g, k, n_max, ring)
    cd = CharData(k, ring, g, g_inv, p, e, h, table=table, ev=ev)
    if k % 2 == 0 and g_inv is not None:
        try:
            cd.sign = classify_component(cd)
        except CharError:
            cd.sign = None
    if k % 2 == 1 and g_inv is not None:
        cd.g_half = g_half(cd, check=False)
    return cd


def reciprocal_residual(cd: CharData) -> list:
    ring, k = cd.ring, cd.k
    out = []
    for i in range(k + 1):
        lhs = cd.gpow(k - i) @ cd.e[i]
        rhs = cd.e[k] @ cd.e[k - i]
        out.append(ring.residual(lhs - rhs, lhs, rhs))
    return out


def is_central(cd: CharData, s: np.ndarray) -> bool:
    ev = cd.ev
    if ev is None or ev.aux_dim == 1:
        return True
    S = ev.scalar_matrix(s)
    return cd.ring.is_zero(S @ ev.M - ev.M @ S, ev.M)


def classify_component(cd: CharData):
    if cd.k % 2:
        raise CharError("components exist for even k only")
    if cd.g_inv is None:
        raise CharError("g is not invertible")
    ring = cd.ring
    l = cd.k // 2
    s = cd.gpow(-l) @ cd.e[cd.k]
    if not is_central(cd, s):
        raise CharError("assumption on g^-l e_2l fails for this evaluation")
    one = ring.eye(s.shape[0])
    for sign in (1, -1):
        if ring.is_zero(s - sign * one, s):
            if sign == -1 and not ring.is_zero(cd.e[l], cd.e[l], s):
                raise CharError("negative component but e_l is nonzero")
            return sign
    return None


def g_half(cd: CharData, check: bool = True) -> np.ndarray:
    if cd.k % 2 == 0:
        raise CharError("g^(1/2) is defined for odd k")
    l = cd.l
    gh = cd.gpow(1 - l) @ cd.e[2 * l - 1]
    if check:
        ring = cd.ring
        if not ring.is_zero(gh @ gh - cd.g, cd.g):
            raise CharError("reciprocal relations violated")
        if not ring.is_zero(_mpow(gh, 2 * l - 1, ring) - cd.e[2 * l - 1], cd.e[2 * l - 1]):
            raise CharError("reciprocal relations violated")
    return gh


def resolution_residuals(cd: CharData) -> list:
    """e_{l+i} - s g^i e_{l-i} (even) or e_{l+i} - g^i g^(1/2) e_{l-1-i} (odd)."""
    ring = cd.ring
    l = cd.l
    out = []
    if cd.k % 2 == 0:
        if cd.sign is None:
            return out
        for i in range(l + 1):
            rhs = cd.sign * (cd.gpow(i) @ cd.e[l - i])
            out.append(ring.residual(cd.e[l + i] - rhs, rhs, cd.e[l + i]))
    else:
        gh = cd.g_half if cd.g_half is not None else g_half(cd)
        for i in range(l):
            rhs = cd.gpow(i) @ gh @ cd.e[l - 1 - i]
            out.append(ring.residual(cd.e[l + i] - rhs, rhs, cd.e[l + i]))
    return out


def det_q(cd: CharData) -> np.ndarray:
    return cd.ring.qpow(cd.k * (cd.k - 1)) * cd.e[cd.k]
