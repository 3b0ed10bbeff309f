"""The orthogonal Yang-Baxter matrix R°, the flip P and their structure operators."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .scalar_ring import Laurent, RingConfig, RingError
from .tensor_ops import LegOperator, apply_local, apply_local_right, partial_trace


class YBError(ValueError):
    pass


def rho_weights(k: int) -> list:
    """ρ_1..ρ_k as halves: returns 2ρ_i (integers)."""
    two_rho = [0] * (k + 1)
    for i in range(1, k // 2 + 1):
        two_rho[i] = k - 2 * i
        two_rho[k + 1 - i] = -(k - 2 * i)
    return two_rho[1:]


def _gauge_halves(k: int) -> list:
    # exponent (in halves of q) of the diagonal basis rescaling used for odd k:
    # d_i = 1 up to the middle, q^(1/2) after it
    if k % 2 == 0:
        return [0] * k
    return [0 if i <= (k + 1) // 2 else 1 for i in range(1, k + 1)]


def standard_R_entries(k: int, gauged: bool = True) -> dict:
    """Entries of R° as {(row, col): [(coefficient kind, exponent in halves)]}.

    kind is "q" for a plain power of q and "lam" for (q - q^-1) times a power.
    Row/col index E_ij⊗E_ab as ((i-1)N + a-1, (j-1)N + b-1).
    """
    N = k
    tr = rho_weights(k)
    gh = _gauge_halves(k) if gauged else [0] * k
    pr = lambda i: k + 1 - i
    out: dict = {}

    def add(i, j, a, b, kind, sign, halves):
        # basis rescaling by G⊗G multiplies E_ij⊗E_ab by d_j d_b/(d_i d_a)
        halves += gh[j - 1] + gh[b - 1] - gh[i - 1] - gh[a - 1]
        out.setdefault(((i - 1) * N + a - 1, (j - 1) * N + b - 1), []).append((kind, sign, halves))

    for i in range(1, k + 1):
        for j in range(1, k + 1):
            add(i, j, j, i, "q", 1, 2 * ((i == j) - (i == pr(j))))
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            add(i, i, j, j, "lam", 1, 0)
            add(i, pr(j), pr(i), j, "lam", -1, tr[j - 1] - tr[i - 1])
    return out


def _entry_value(terms, ring: RingConfig):
    v = ring.zero
    for kind, sign, halves in terms:
        if halves % 2:
            raise YBError("half-integer power of q needs the balanced basis")
        p = ring.qpow(halves // 2)
        if kind == "lam":
            p = p * ring.lam()
        v = v + (p if sign > 0 else -p)
    return v


def flip_data(N: int, ring: RingConfig) -> np.ndarray:
    P = ring.zeros((N * N, N * N))
    for a in range(N):
        for b in range(N):
            P[b * N + a, a * N + b] = ring.one
    return P


def build_flip(N: int, ring: RingConfig) -> LegOperator:
    return LegOperator(2, N, 1, flip_data(N, ring))


def braid_residual(F: LegOperator, ring: RingConfig):
    N = F.N
    eye = ring.eye(N ** 3)
    f1 = lambda x: apply_local(F, 1, x, 3)
    f2 = lambda x: apply_local(F, 2, x, 3)
    lhs = f1(f2(f1(eye)))
    rhs = f2(f1(f2(eye)))
    return ring.residual(lhs - rhs, lhs)


@dataclass(frozen=True)
class RConstruction:
    R: LegOperator
    convention: str  # "verbatim" or "legs-transposed"
    balanced: bool   # odd-k diagonal rescaling applied


def build_standard_R_full(k: int, ring: RingConfig) -> RConstruction:
    if k < 2:
        raise YBError("height must be at least 2")
    try:
        ring.validate(k)
    except RingError as exc:
        raise YBError("parameter restriction violated") from exc
    N = k
    balanced = k % 2 == 1
    R = ring.zeros((N * N, N * N))
    for (r, c), terms in standard_R_entries(k, gauged=balanced).items():
        R[r, c] = _entry_value(terms, ring)
    op = LegOperator(2, N, 1, R)
    if braid_residual(op, ring).ok:
        return RConstruction(op, "verbatim", balanced)
    P = flip_data(N, ring)
    alt = LegOperator(2, N, 1, P @ R @ P)
    if braid_residual(alt, ring).ok:
        return RConstruction(alt, "legs-transposed", balanced)
    raise YBError("no index convention gives a braid-form R")


def build_standard_R(k: int, ring: RingConfig) -> LegOperator:
    return build_standard_R_full(k, ring).R


def skew_inverse(F: LegOperator, ring: RingConfig):
    """D with Tr_2((Id⊗D)F) = Id.  Returns (D, strict)."""
    N = F.N
    f4 = F.data.reshape(N, N, N, N)  # f4[i, a, j, b] = F[(i,a),(j,b)]
    # Psi(E_bc)[i, j] = F[(i,c),(j,b)]
    psi = np.ascontiguousarray(f4.transpose(0, 2, 3, 1)).reshape(N * N, N * N)
    rhs = ring.eye(N).reshape(N * N)
    try:
        d = linalg.solve(psi, rhs, ring)
    except (linalg.SingularError, np.linalg.LinAlgError) as exc:
        raise YBError("not skew invertible") from exc
    D = LegOperator(1, N, 1, np.asarray(d).reshape(N, N))
    return D, linalg.is_invertible(D.data, ring)


def bmw_idempotents(R: LegOperator, ring: RingConfig, mu):
    """(A2, S2, C2) from the cubic minimal polynomial with roots q, -1/q, mu."""
    q = ring.qe
    qi = ring.inv(q)
    I = ring.eye(R.dim)
    r = R.data
    S2 = (r + qi * I) @ (r - mu * I) / ((q + qi) * (q - mu))
    A2 = (r - q * I) @ (r - mu * I) / ((-qi - q) * (-qi - mu))
    C2 = (r - q * I) @ (r + qi * I) / ((mu - q) * (mu + qi))
    return A2, S2, C2


def contractor_K(R: LegOperator, ring: RingConfig, mu) -> LegOperator:
    q = ring.qe
    qi = ring.inv(q)
    if mu == q or mu == -qi:
        raise YBError("mu collides with q or -1/q")
    _, _, C2 = bmw_idempotents(R, ring, mu)
    if not ring.is_zero(C2 @ C2 - C2, C2):
        raise YBError("R not BMW type")
    K = (q - mu) * (qi + mu) / (mu * ring.lam()) * C2
    return R.like(K)


def minimal_poly_residual(R: LegOperator, ring: RingConfig, mu):
    q = ring.qe
    I = ring.eye(R.dim)
    r = R.data
    res = (q * I - r) @ (ring.inv(q) * I + r) @ (mu * I - r)
    return ring.residual(res, r)


@dataclass
class Projector:
    """Idempotent with image span(U) and kernel ann(Y^T): U (Y^T U)^-1 Y^T."""

    U: np.ndarray
    Y: np.ndarray
    C: np.ndarray
    n_legs: int
    N: int

    @property
    def dim(self) -> int:
        return self.U.shape[1]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.U @ (self.C @ (self.Y.T @ x))

    def dense(self) -> np.ndarray:
        return self.U @ self.C @ self.Y.T


def _eigen_chain(R: LegOperator, ring: RingConfig, shift, n_max: int):
    """Bases of ∩_{i<n} ker(R_i + shift) for n = 1..n_max (column bases)."""
    N = R.N
    bases = [None, ring.eye(N)]
    for n in range(2, n_max + 1):
        prev = bases[-1]
        d = prev.shape[1]
        cand = ring.zeros((N ** n, d * N))
        # prev ⊗ e_a, column index (col, a)
        for a in range(N):
            cand[a::N, a::N] = prev
        if d == 0:
            bases.append(ring.zeros((N ** n, 0)))
            continue
        z = apply_local(R, n - 1, cand, n) + shift * cand
        ns = linalg.nullspace(z, ring)
        bases.append(cand @ ns)
    return bases


def _projectors(R: LegOperator, ring: RingConfig, shift, n_max: int):
    U = _eigen_chain(R, ring, shift, n_max)
    Y = _eigen_chain(R.T, ring, shift, n_max)
    out = [None]
    for n in range(1, n_max + 1):
        u, y = U[n], Y[n]
        if u.shape[1] != y.shape[1]:
            raise YBError("non-generic parameters: projector undefined")
        g = y.T @ u
        try:
            c = linalg.inverse(g, ring) if g.shape[0] else g
        except (linalg.SingularError, np.linalg.LinAlgError) as exc:
            raise YBError("non-generic parameters: projector undefined") from exc
        out.append(Projector(u, y, c, n, R.N))
    return out


def antisym_images(R: LegOperator, ring: RingConfig, n_max: int) -> list:
    """Projectors a^(n) for n = 1..n_max (index 0 unused)."""
    return _projectors(R, ring, ring.inv(ring.qe), n_max)


def sym_images(R: LegOperator, ring: RingConfig, n_max: int) -> list:
    return _projectors(R, ring, -ring.qe, n_max)


def antisym_image(R: LegOperator, ring: RingConfig, n: int):
    p = antisym_images(R, ring, n)[n]
    return p, p.dim


def sym_image(R: LegOperator, ring: RingConfig, n: int):
    p = sym_images(R, ring, n)[n]
    return p, p.dim


def twist(R: LegOperator, F: LegOperator, ring: RingConfig) -> LegOperator:
    return R.like(linalg.inverse(F.data, ring) @ R.data @ F.data)


def check_compatible(R: LegOperator, F: LegOperator, ring: RingConfig):
    """Residuals of R1 F2 F1 = F2 F1 R2 and R2 F1 F2 = F1 F2 R1."""
    eye = ring.eye(R.N ** 3)
    a = lambda op, i, x: apply_local(op, i, x, 3)
    # operator products act right-to-left on columns
    l1 = a(R, 1, a(F, 2, a(F, 1, eye)))
    r1 = a(F, 2, a(F, 1, a(R, 2, eye)))
    l2 = a(R, 2, a(F, 1, a(F, 2, eye)))
    r2 = a(F, 1, a(F, 2, a(R, 1, eye)))
    return ring.residual(l1 - r1, l1), ring.residual(l2 - r2, l2)


def g_matrix(F: LegOperator, K: LegOperator, ring: RingConfig):
    """G_1 = Tr_(23) K_2 F_1^-1 F_2^-1 and G_1^-1 = Tr_(23) F_2 F_1 K_2."""
    Finv = F.like(linalg.inverse(F.data, ring))
    eye = ring.eye(F.N ** 3)
    x = apply_local(Finv, 2, eye, 3)          # F2^-1
    x = apply_local(Finv, 1, x, 3)            # F1^-1 F2^-1
    x = apply_local(K, 2, x, 3)               # K2 F1^-1 F2^-1
    G = partial_trace(LegOperator(3, F.N, 1, x), [2, 3]).data
    y = apply_local(K, 2, eye, 3)
    y = apply_local(F, 1, y, 3)
    y = apply_local(F, 2, y, 3)
    Gi = partial_trace(LegOperator(3, F.N, 1, y), [2, 3]).data
    if not ring.is_zero(G @ Gi - ring.eye(F.N), G, Gi):
        raise YBError("G construction inconsistent")
    return G, Gi


@dataclass
class YBData:
    """R° at height k with its skew inverse, contractor and idempotents."""

    k: int
    ring: RingConfig
    R: LegOperator
    convention: str
    balanced: bool
    D: LegOperator
    strict: bool
    K: LegOperator
    A2: np.ndarray
    S2: np.ndarray
    C2: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def N(self) -> int:
        return self.k

    @property
    def q(self):
        return self.ring.qe

    @property
    def mu(self):
        return self.ring.mu(self.k)

    @property
    def lam(self):
        return self.ring.lam()

    def flip(self) -> LegOperator:
        return build_flip(self.N, self.ring)

    def antisym(self, n_max: int) -> list:
        have = self._cache.get("antisym")
        if have is None or len(have) <= n_max:
            have = antisym_images(self.R, self.ring, n_max)
            self._cache["antisym"] = have
        return have

    def sym(self, n_max: int) -> list:
        have = self._cache.get("sym")
        if have is None or len(have) <= n_max:
            have = sym_images(self.R, self.ring, n_max)
            self._cache["sym"] = have
        return have


def yb_data(k: int, ring: RingConfig) -> YBData:
    rc = build_standard_R_full(k, ring)
    R = rc.R
    D, strict = skew_inverse(R, ring)
    if not strict:
        raise YBError("R is skew invertible but not strict")
    mu = ring.mu(k)
    K = contractor_K(R, ring, mu)
    A2, S2, C2 = bmw_idempotents(R, ring, mu)
    return YBData(k, ring, R, rc.convention, rc.balanced, D, strict, K, A2, S2, C2)


@dataclass
class CompatiblePair:
    """A compatible pair {R, F} with everything the algebra layer needs."""

    yb: YBData
    F: LegOperator
    F_tag: str
    Finv: LegOperator
    RF: LegOperator       # twisted matrix F^-1 R F
    RFinv: LegOperator
    D_RF: LegOperator
    G: np.ndarray
    Ginv: np.ndarray

    @property
    def ring(self) -> RingConfig:
        return self.yb.ring


def compatible_pair(yb: YBData, F_tag: str) -> CompatiblePair:
    ring = yb.ring
    if F_tag == "P":
        F = yb.flip()
    elif F_tag == "R":
        F = yb.R
    else:
        raise YBError(f"unknown F tag {F_tag!r}")
    r1, r2 = check_compatible(yb.R, F, ring)
    if not (r1.ok and r2.ok):
        raise YBError("twist relations fail for this pair")
    Finv = F.like(linalg.inverse(F.data, ring))
    RF = twist(yb.R, F, ring)
    RFinv = RF.like(linalg.inverse(RF.data, ring))
    D_RF, strict = skew_inverse(RF, ring)
    if not strict:
        raise YBError("twisted matrix not strict skew invertible")
    G, Ginv = g_matrix(F, yb.K, ring)
    return CompatiblePair(yb, F, F_tag, Finv, RF, RFinv, D_RF, G, Ginv)
