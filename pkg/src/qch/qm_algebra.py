"""Evaluation points of the quantum matrix algebra and the matrix-power machinery.

A quantum matrix is stored as an operator on V ⊗ U (quantum leg, auxiliary
leg): an N×N matrix whose entries are dim U × dim U blocks.  Products of
matrices with End(U) entries are plain operator products in this layout, and
an End(U) coefficient ζ multiplies a matrix X on the right as X (Id_V ⊗ ζ).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .scalar_ring import RingConfig
from .tensor_ops import LegOperator, apply_local, partial_trace
from .yang_baxter import CompatiblePair, YBData, compatible_pair


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class BraidWord:
    n_strands: int
    letters: tuple = ()

    def __post_init__(self):
        for s in self.letters:
            if s == 0 or abs(s) >= self.n_strands:
                raise ValueError(f"generator {s} out of range for {self.n_strands} strands")

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        n = max(self.n_strands, other.n_strands)
        return BraidWord(n, self.letters + other.letters)

    def shifted(self, by: int, n_strands: int) -> "BraidWord":
        return BraidWord(n_strands, tuple(s + by if s > 0 else s - by for s in self.letters))


def power_word(n: int) -> BraidWord:
    """σ_{n-1} … σ_2 σ_1 on n strands."""
    return BraidWord(max(n, 1), tuple(range(n - 1, 0, -1)))


def star_word(a: BraidWord, b: BraidWord) -> BraidWord:
    """Braid composition realizing M^a ⋆ M^b."""
    n, i = a.n_strands, b.n_strands
    tot = n + i
    tail = tuple(range(n, 0, -1)) + tuple(-j for j in range(2, n + 1))
    return BraidWord(tot, a.letters + b.shifted(n, tot).letters + tail)


# ---------------------------------------------------------------- evaluations


@dataclass
class Evaluation:
    k: int
    pair: CompatiblePair
    M: np.ndarray          # (N*aux) x (N*aux)
    aux_dim: int
    kind: str
    label: str
    residual: object = None
    convention: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def N(self) -> int:
        return self.k

    @property
    def ring(self) -> RingConfig:
        return self.pair.ring

    @property
    def F_tag(self) -> str:
        return self.pair.F_tag

    @property
    def yb(self) -> YBData:
        return self.pair.yb

    def op(self) -> LegOperator:
        return LegOperator(1, self.N, self.aux_dim, self.M)

    # End(U) helpers

    def one_u(self) -> np.ndarray:
        return self.ring.eye(self.aux_dim)

    def scalar_matrix(self, zeta: np.ndarray) -> np.ndarray:
        """Id_V ⊗ ζ."""
        return np.kron(self.ring.eye(self.N), zeta)

    def times(self, x: np.ndarray, zeta: np.ndarray) -> np.ndarray:
        """Matrix x times the End(U) coefficient ζ (right action)."""
        if self.aux_dim == 1:
            return x * zeta[0, 0]
        return x @ self.scalar_matrix(zeta)


def _aux_expand(cols: np.ndarray, aux: int, ring: RingConfig) -> np.ndarray:
    """cols (N^n × c) ↦ cols ⊗ Id_U, column order (c, u)."""
    if aux == 1:
        return cols
    return np.kron(cols, ring.eye(aux))


def apply_copy(ev: Evaluation, i: int, x: np.ndarray, n: int) -> np.ndarray:
    """M̄_i acting on the columns of x (rows: V^⊗n ⊗ U)."""
    M = ev.op()
    aux = ev.aux_dim
    if ev.F_tag == "P":
        return apply_local(M, i, x, n, aux)
    F, Fi = ev.pair.F, ev.pair.Finv
    for j in range(i - 1, 0, -1):
        x = apply_local(Fi, j, x, n, aux)
    x = apply_local(M, 1, x, n, aux)
    for j in range(1, i):
        x = apply_local(F, j, x, n, aux)
    return x


def apply_copy_product(ev: Evaluation, n: int, x: np.ndarray, upto: int | None = None) -> np.ndarray:
    """M̄_1 M̄_2 … M̄_m x with m = upto or n."""
    m = n if upto is None else upto
    for i in range(m, 0, -1):
        x = apply_copy(ev, i, x, n)
    return x


def copies_dense(ev: Evaluation, n: int) -> list:
    """Materialized copies M̄_1..M̄_n on V^⊗n ⊗ U (testing helper)."""
    d = ev.N ** n * ev.aux_dim
    eye = ev.ring.eye(d)
    return [LegOperator(n, ev.N, ev.aux_dim, apply_copy(ev, i, eye, n)) for i in range(1, n + 1)]


def matrix_copies(ev: Evaluation, n: int) -> list:
    if n < 1:
        raise ValueError("n must be at least 1")
    return copies_dense(ev, n)


def qmai_residual(ev: Evaluation, i: int = 1, n: int | None = None):
    n = max(n or 2, i + 1)
    ring = ev.ring
    R = ev.yb.R
    d = ev.N ** n * ev.aux_dim
    eye = ring.eye(d)
    mm = apply_copy(ev, i, apply_copy(ev, i + 1, eye, n), n)
    lhs = apply_local(R, i, mm, n, ev.aux_dim)
    rhs = apply_copy(ev, i, apply_copy(ev, i + 1, apply_local(R, i, eye, n, ev.aux_dim), n), n)
    return ring.residual(lhs - rhs, lhs)


def _finish(ev: Evaluation, strict: bool = True) -> Evaluation:
    res = qmai_residual(ev)
    ev.residual = res
    if strict and not res.ok:
        raise EvaluationError("not a point of the algebra for this (R,F)")
    return ev


def _pair(yb: YBData, F_tag: str) -> CompatiblePair:
    key = ("pair", F_tag)
    if key not in yb._cache:
        yb._cache[key] = compatible_pair(yb, F_tag)
    return yb._cache[key]


def torus_point(yb: YBData, F_tag: str, t, c=None, label: str | None = None) -> Evaluation:
    """Diagonal M = diag(t) with t_i t_{k+1-i} = c."""
    ring = yb.ring
    k = yb.k
    t = [ring.elt(x) for x in t]
    if len(t) != k:
        raise EvaluationError(f"need {k} diagonal entries")
    if any(x == 0 for x in t):
        raise EvaluationError("torus entries must be nonzero")
    c = ring.elt(c) if c is not None else t[0] * t[-1]
    for i in range(k):
        if not ring.is_zero(np.array([t[i] * t[k - 1 - i] - c]), np.array([c])):
            raise EvaluationError(f"t_{i + 1} t_{k - i} differs from c")
    M = ring.zeros((k, k))
    for i in range(k):
        M[i, i] = t[i]
    ev = Evaluation(k, _pair(yb, F_tag), M, 1, "torus", label or "torus")
    return _finish(ev)


def identity_point(yb: YBData, F_tag: str, c=1, label: str | None = None) -> Evaluation:
    ring = yb.ring
    M = ring.eye(yb.k) * ring.elt(c)
    return _finish(Evaluation(yb.k, _pair(yb, F_tag), M, 1, "identity", label or "identity"))


def reflection_point(yb: YBData, F_tag: str, t, a, c, label: str | None = None) -> Evaluation:
    """Even k: torus entries t_1..t_{ℓ-1} (partners c/t_i) with the two middle
    basis vectors swapped, M[ℓ,ℓ+1] = a, M[ℓ+1,ℓ] = c/a."""
    ring = yb.ring
    k = yb.k
    if k % 2:
        raise EvaluationError("reflection points need even k")
    l = k // 2
    t = [ring.elt(x) for x in t]
    if len(t) != l - 1:
        raise EvaluationError(f"need {l - 1} free torus entries")
    a, c = ring.elt(a), ring.elt(c)
    if a == 0 or c == 0 or any(x == 0 for x in t):
        raise EvaluationError("entries must be nonzero")
    M = ring.zeros((k, k))
    for i, x in enumerate(t):
        M[i, i] = x
        M[k - 1 - i, k - 1 - i] = c / x
    M[l - 1, l] = a
    M[l, l - 1] = c / a
    ev = Evaluation(k, _pair(yb, F_tag), M, 1, "reflection", label or "reflection")
    return _finish(ev)


def _leg_transpose(x: np.ndarray, N: int, aux: int, leg: bool, auxt: bool) -> np.ndarray:
    t = x.reshape(N, aux, N, aux)
    if leg:
        t = t.transpose(2, 1, 0, 3)
    if auxt:
        t = t.transpose(0, 3, 2, 1)
    return np.ascontiguousarray(t).reshape(N * aux, N * aux)


def operator_candidates(yb: YBData, F_tag: str):
    """Conventions tried for the canonical operator point, in order."""
    ring = yb.ring
    N = yb.N
    R = yb.R.data
    P = yb.flip().data
    bases = [("PR", P @ R), ("RP", R @ P)]
    if F_tag == "R":
        bases.reverse()
    for name, base in bases:
        if F_tag == "R":
            # L = R21 R12 with the second leg read as the auxiliary space
            base = P @ base @ P @ base
            name = f"L({name})"
        for leg, auxt in itertools.product((False, True), repeat=2):
            tag = name + ("^t1" if leg else "") + ("^t2" if auxt else "")
            yield tag, _leg_transpose(base, N, N, leg, auxt)


def operator_point(yb: YBData, F_tag: str, label: str | None = None) -> Evaluation:
    pair = _pair(yb, F_tag)
    tried = []
    for tag, M in operator_candidates(yb, F_tag):
        ev = Evaluation(yb.k, pair, M, yb.N, "operator", label or f"operator-{F_tag}", convention=tag)
        res = qmai_residual(ev)
        tried.append(tag)
        if res.ok:
            ev.residual = res
            return ev
    raise EvaluationError("no canonical operator point; conventions exhausted")


def make_evaluation(yb: YBData, spec: dict) -> Evaluation:
    kind = spec.get("kind", "torus")
    F = spec.get("F", "P")
    label = spec.get("label")
    if kind == "torus":
        return torus_point(yb, F, spec["t"], spec.get("c"), label)
    if kind == "identity":
        return identity_point(yb, F, spec.get("c", 1), label)
    if kind == "operator":
        return operator_point(yb, F, label)
    if kind == "reflection":
        return reflection_point(yb, F, spec.get("t", []), spec["a"], spec["c"], label)
    raise EvaluationError(f"unknown evaluation kind {kind!r}")


# ---------------------------------------------------------------- traces


def r_trace_cols(ev: Evaluation, z: np.ndarray, n: int, legs, D: LegOperator | None = None) -> np.ndarray:
    """Apply D on each listed leg of the rows of z (in place of a trace weight)."""
    D = ev.yb.D if D is None else D
    for l in legs:
        z = apply_local(D, l, z, n, ev.aux_dim)
    return z


def trace_legs(ev: Evaluation, X: np.ndarray, n: int, legs, D: LegOperator | None = None) -> np.ndarray:
    """R-trace of a full operator on V^⊗n ⊗ U over ``legs``."""
    Xw = r_trace_cols(ev, X, n, legs, D)
    return partial_trace(LegOperator(n, ev.N, ev.aux_dim, Xw), legs).data


def ch_braid(ev: Evaluation, w: BraidWord) -> np.ndarray:
    """Tr_R(1..n)(M̄_1…M̄_n ρ(w)) as a dim U × dim U matrix."""
    n = w.n_strands
    X = rho_word(ev, w, ev.ring.eye(ev.N ** n * ev.aux_dim), n)
    X = apply_copy_product(ev, n, X)
    return trace_legs(ev, X, n, range(1, n + 1))


def rho_word(ev: Evaluation, w: BraidWord, x: np.ndarray, n: int) -> np.ndarray:
    """ρ_R(w) x; the leftmost letter acts last."""
    R = ev.yb.R
    Rinv = ev.yb._cache.get("Rinv")
    if Rinv is None:
        Rinv = R.like(linalg.inverse(R.data, ev.ring))
        ev.yb._cache["Rinv"] = Rinv
    for s in reversed(w.letters):
        x = apply_local(R if s > 0 else Rinv, abs(s), x, n, ev.aux_dim)
    return x


def power_braid(ev: Evaluation, w: BraidWord) -> np.ndarray:
    """(M^w)_1 = Tr_R(2..n)(M̄_1…M̄_n ρ(w))."""
    n = w.n_strands
    if n == 1:
        return ev.M.copy()
    X = rho_word(ev, w, ev.ring.eye(ev.N ** n * ev.aux_dim), n)
    X = apply_copy_product(ev, n, X)
    return trace_legs(ev, X, n, range(2, n + 1))


# ---------------------------------------------------------------- maps on P


def _bar2(ev: Evaluation, X: np.ndarray) -> np.ndarray:
    """X̄_2 = F_1 X_1 F_1^-1 as an operator on V⊗V⊗U."""
    aux = ev.aux_dim
    op = LegOperator(1, ev.N, aux, X)
    d = ev.N ** 2 * aux
    eye = ev.ring.eye(d)
    if ev.F_tag == "P":
        return apply_local(op, 2, eye, 2, aux)
    y = apply_local(ev.pair.Finv, 1, eye, 2, aux)
    y = apply_local(op, 1, y, 2, aux)
    return apply_local(ev.pair.F, 1, y, 2, aux)


def _right_leg_op(ev: Evaluation, X: np.ndarray, op: LegOperator) -> np.ndarray:
    """X (acting on V⊗V⊗U) times op_1 on the right."""
    aux = ev.aux_dim
    return np.ascontiguousarray(apply_local(op.T, 1, np.ascontiguousarray(X.T), 2, aux).T)


def phi(ev: Evaluation, X: np.ndarray) -> np.ndarray:
    """φ(X)_1 = Tr_R(2)(X̄_2 R_1)."""
    Y = _right_leg_op(ev, _bar2(ev, X), ev.yb.R)
    return trace_legs(ev, Y, 2, [2])


def xi_map(ev: Evaluation, X: np.ndarray) -> np.ndarray:
    """ξ(X)_1 = Tr_R(2)(X̄_2 K_1)."""
    Y = _right_leg_op(ev, _bar2(ev, X), ev.yb.K)
    return trace_legs(ev, Y, 2, [2])


def phi_inv(ev: Evaluation, X: np.ndarray) -> np.ndarray:
    """μ^-2 Tr_{R_F(2)}(F_1^-1 X_1 F_1 (R_F)^-1_1)."""
    aux = ev.aux_dim
    pair = ev.pair
    op = LegOperator(1, ev.N, aux, X)
    d = ev.N ** 2 * aux
    y = apply_local(pair.RFinv, 1, ev.ring.eye(d), 2, aux)
    y = apply_local(pair.F, 1, y, 2, aux)
    y = apply_local(op, 1, y, 2, aux)
    y = apply_local(pair.Finv, 1, y, 2, aux)
    mu = ev.yb.mu
    return trace_legs(ev, y, 2, [2], D=pair.D_RF) / (mu * mu)


def mt_map(ev: Evaluation, X: np.ndarray) -> np.ndarray:
    return ev.M @ xi_map(ev, X)


def star_M(ev: Evaluation, X: np.ndarray) -> np.ndarray:
    return ev.M @ phi(ev, X)


def contraction_g(ev: Evaluation) -> np.ndarray:
    """g = μλ/((q-μ)(1/q+μ)) Tr_R(1,2)(M̄_1 M̄_2 K_1)."""
    yb = ev.yb
    ring = ev.ring
    q, mu, lam = yb.q, yb.mu, yb.lam
    d = ev.N ** 2 * ev.aux_dim
    X = apply_local(yb.K, 1, ring.eye(d), 2, ev.aux_dim)
    X = apply_copy_product(ev, 2, X)
    tr = trace_legs(ev, X, 2, [1, 2])
    return tr * (mu * lam / ((q - mu) * (ring.inv(q) + mu)))


def tau2_residual(ev: Evaluation, g: np.ndarray):
    """K_1 M̄_1 M̄_2 = M̄_1 M̄_2 K_1 = μ^-2 K_1 g."""
    yb = ev.yb
    ring = ev.ring
    aux = ev.aux_dim
    d = ev.N ** 2 * aux
    eye = ring.eye(d)
    MM = apply_copy_product(ev, 2, eye)
    KMM = apply_local(yb.K, 1, MM, 2, aux)
    MMK = apply_copy_product(ev, 2, apply_local(yb.K, 1, eye, 2, aux))
    Kg = apply_local(yb.K, 1, np.kron(ring.eye(ev.N ** 2), g), 2, aux) / (yb.mu * yb.mu)
    r1 = ring.residual(KMM - MMK, KMM)
    r2 = ring.residual(KMM - Kg, KMM)
    return r1 if not r1.ok else r2


def g_permutation_residual(ev: Evaluation, g: np.ndarray, g_inv: np.ndarray):
    """M g = g (G^-1 M G) and g^-1 M = (G^-1 M G) g^-1."""
    ring = ev.ring
    G = np.kron(ev.pair.G, ev.one_u())
    Gi = np.kron(ev.pair.Ginv, ev.one_u())
    Mc = Gi @ ev.M @ G
    gm, gim = ev.scalar_matrix(g), ev.scalar_matrix(g_inv)
    r1 = ring.residual(ev.M @ gm - gm @ Mc, ev.M)
    r2 = ring.residual(gim @ ev.M - Mc @ gim, ev.M)
    return r1 if not r1.ok else r2


# ---------------------------------------------------------------- powers


class PowerTable:
    """M^{\\bar n} for n in [lo, hi], built lazily by ⋆-multiplication."""

    def __init__(self, ev: Evaluation, g: np.ndarray | None = None):
        self.ev = ev
        self._pos = {0: ev.ring.eye(ev.N * ev.aux_dim), 1: ev.M.copy()}
        self._neg = {}
        self._g = g
        self._minv = None

    @property
    def g(self) -> np.ndarray:
        if self._g is None:
            self._g = contraction_g(self.ev)
        return self._g

    def m_inverse(self) -> np.ndarray:
        """M^-1 = μ ξ(M) g^-1 (ordinary matrix inverse)."""
        if self._minv is None:
            ev = self.ev
            try:
                gi = linalg.inverse(self.g, ev.ring)
            except (linalg.SingularError, np.linalg.LinAlgError) as exc:
                raise EvaluationError("extension unavailable: g is singular") from exc
            self._minv = ev.times(xi_map(ev, ev.M) * ev.yb.mu, gi)
        return self._minv

    def __getitem__(self, n: int) -> np.ndarray:
        if n >= 0:
            while n not in self._pos:
                top = max(self._pos)
                self._pos[top + 1] = star_M(self.ev, self._pos[top])
            return self._pos[n]
        if -1 not in self._neg:
            self._neg[-1] = phi_inv(self.ev, self.m_inverse())
        while n not in self._neg:
            low = min(self._neg)
            self._neg[low - 1] = self.star_minv(self._neg[low])
        return self._neg[n]

    def star_minv(self, X: np.ndarray) -> np.ndarray:
        """M^{\\bar{-1}} ⋆ X = φ^-1(M^-1 · X)."""
        return phi_inv(self.ev, self.m_inverse() @ X)

    def star(self, n: int, X: np.ndarray) -> np.ndarray:
        """M^{\\bar n} ⋆ X for X in the span of powers and their C-multiples."""
        for _ in range(max(n, 0)):
            X = star_M(self.ev, X)
        for _ in range(max(-n, 0)):
            X = self.star_minv(X)
        return X


def star_power(ev: Evaluation, n: int, table: PowerTable | None = None) -> np.ndarray:
    return (table or PowerTable(ev))[n]


def star_power_braid(ev: Evaluation, n: int) -> np.ndarray:
    """M^{\\bar n} from the braid word σ_{n-1}…σ_1 (cross-check route)."""
    if n == 0:
        return ev.ring.eye(ev.N * ev.aux_dim)
    return power_braid(ev, power_word(n))
