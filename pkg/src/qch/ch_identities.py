"""Descendant matrices, the U/V/Q/X recursion machinery, and the orthogonal
Cayley–Hamilton identities, all as residual checks on an evaluation point.

Sums are written out index by index as displayed; nothing is simplified
before evaluation.  Elements of the characteristic subalgebra (g, e_j) act
on matrices from the right through ``Evaluation.times``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .char_subalg import CharData, CharError, wedge_power
from .qm_algebra import Evaluation, PowerTable, mt_map, phi_inv, xi_map
from .scalar_ring import Residual, RingConfig, RingError, q_number


class ParameterError(ValueError):
    pass


# ---------------------------------------------------------------- polynomials in M̄


class MatPoly:
    """Σ_n M^{\\bar n} ζ_n with End(U) coefficients ζ_n (⋆ is commutative on powers)."""

    def __init__(self, terms: dict | None = None):
        self.terms = dict(terms or {})

    @classmethod
    def power(cls, n: int, zeta: np.ndarray) -> "MatPoly":
        return cls({n: zeta})

    def copy(self) -> "MatPoly":
        return MatPoly(self.terms)

    def add_term(self, n: int, zeta: np.ndarray) -> "MatPoly":
        if n in self.terms:
            self.terms[n] = self.terms[n] + zeta
        else:
            self.terms[n] = zeta
        return self

    def __add__(self, other: "MatPoly") -> "MatPoly":
        out = self.copy()
        for n, z in other.terms.items():
            out.add_term(n, z)
        return out

    def __neg__(self) -> "MatPoly":
        return MatPoly({n: -z for n, z in self.terms.items()})

    def __sub__(self, other: "MatPoly") -> "MatPoly":
        return self + (-other)

    def scale(self, c) -> "MatPoly":
        return MatPoly({n: z * c for n, z in self.terms.items()})

    def times(self, zeta: np.ndarray) -> "MatPoly":
        return MatPoly({n: z @ zeta for n, z in self.terms.items()})

    def star(self, other: "MatPoly") -> "MatPoly":
        out = MatPoly()
        for a, za in self.terms.items():
            for b, zb in other.terms.items():
                out.add_term(a + b, za @ zb)
        return out

    def shift(self, m: int) -> "MatPoly":
        """M^{\\bar m} ⋆ self."""
        return MatPoly({n + m: z for n, z in self.terms.items()})

    def degree(self, ring: RingConfig) -> int | None:
        live = [n for n, z in self.terms.items() if not ring.is_zero(z, z)]
        return max(live) if live else None

    def evaluate(self, ctx: "ChContext") -> np.ndarray:
        out = ctx.zero_matrix()
        for n, z in sorted(self.terms.items()):
            out = out + ctx.ev.times(ctx.table[n], z)
        return out


@dataclass
class BlockPair:
    """An N×2N row object (left, right)."""

    left: np.ndarray
    right: np.ndarray

    def __add__(self, other: "BlockPair") -> "BlockPair":
        return BlockPair(self.left + other.left, self.right + other.right)

    def __sub__(self, other: "BlockPair") -> "BlockPair":
        return BlockPair(self.left - other.left, self.right - other.right)

    def scale(self, c) -> "BlockPair":
        return BlockPair(self.left * c, self.right * c)


# 2×2 blocks of MatPoly entries: U, V (powers 0 only) and Q (powers 0 and 2)
Block = list


def block_mul(a: Block, b: Block) -> Block:
    return [
        [a[r][0].star(b[0][c]) + a[r][1].star(b[1][c]) for c in range(2)]
        for r in range(2)
    ]


# ---------------------------------------------------------------- context


@dataclass
class ChContext:
    ev: Evaluation
    cd: CharData
    table: PowerTable = field(repr=False)
    _memo: dict = field(default_factory=dict, repr=False)

    @property
    def ring(self) -> RingConfig:
        return self.ev.ring

    @property
    def k(self) -> int:
        return self.ev.k

    @property
    def q(self):
        return self.ring.qe

    @property
    def mu(self):
        return self.ring.mu(self.k)

    @property
    def lam(self):
        """λ = q - 1/q."""
        return self.ring.lam()

    def qp(self, n: int):
        return self.ring.qpow(n)

    def mq(self, n: int):
        """(-q)^n for any integer n."""
        return (-1) ** (n % 2) * self.ring.qpow(n)

    def one(self) -> np.ndarray:
        return self.ev.one_u()

    def zero_u(self) -> np.ndarray:
        return 0 * self.ev.one_u()

    def zero_matrix(self) -> np.ndarray:
        return self.ring.zeros((self.ev.N * self.ev.aux_dim,) * 2)

    def e(self, j: int) -> np.ndarray:
        if j < 0 or j > self.k:
            return self.zero_u()
        return self.cd.e[j]

    def g(self, r: int = 1) -> np.ndarray:
        return self.cd.gpow(r)

    def P(self, n: int, zeta: np.ndarray | None = None) -> MatPoly:
        return MatPoly.power(n, self.one() if zeta is None else zeta)

    def star(self, X: np.ndarray, poly: MatPoly) -> np.ndarray:
        """X ⋆ poly, using commutativity of ⋆ on the powers algebra."""
        out = self.zero_matrix()
        for n, z in sorted(poly.terms.items()):
            out = out + self.ev.times(self.table.star(n, X), z)
        return out

    def nonzero(self, x, what: str):
        if x == 0:
            raise ParameterError(f"parameter restriction violated: {what} vanishes")
        return x

    def res(self, diff: np.ndarray, *terms) -> Residual:
        if self.ring.exact:
            return self.ring.residual(diff)
        return self.ring.residual(diff, np.array([self.ref_scale()]), *terms)

    def ref_scale(self) -> float:
        """Float-mode normalization: size of the summands an identity cancels,
        max |M^{\\bar n}| · max |e_j| · max(1, |g|)^(k+1) over the ranges used."""
        if "scale" not in self._memo:
            ring, k = self.ring, self.k
            pw = max(float(ring.magnitude(self.table[n])) for n in range(-1, 2 * k + 4))
            ee = max(float(ring.magnitude(e)) for e in self.cd.e[: k + 1])
            gg = max(1.0, float(ring.magnitude(self.cd.g)))
            self._memo["scale"] = pw * ee * gg ** (k + 1)
        return self._memo["scale"]


def make_context(ev: Evaluation, cd: CharData) -> ChContext:
    if ev.ring.kind == "laurent":
        raise RingError("identity checks need a specialized q")
    table = cd.table or PowerTable(ev)
    return ChContext(ev, cd, table)


def worst(residuals) -> Residual:
    residuals = list(residuals)
    if not residuals:
        raise ValueError("no residuals")
    bad = [r for r in residuals if not r.ok]
    pool = bad or residuals
    return max(pool, key=lambda r: r.value)


# ---------------------------------------------------------------- descendants


class DescendantTable:
    """A^{(m,i)}, B^{(m,i)} for m ≥ -1 and 0 ≤ i ≤ k+1, computed on demand."""

    def __init__(self, ctx: ChContext):
        self.ctx = ctx
        self._wedge: dict[int, np.ndarray] = {}
        self._A: dict[tuple, np.ndarray] = {}
        self._B: dict[tuple, np.ndarray] = {}
        self._proj = ctx.ev.yb.antisym(ctx.k + 1)

    def iq(self, i: int):
        return q_number(i, self.ctx.ring)

    def wedge(self, i: int) -> np.ndarray:
        """M^{a^(i)}."""
        if i < 1:
            raise IndexError("wedge powers start at i = 1")
        if i not in self._wedge:
            ev = self.ctx.ev
            self._wedge[i] = ev.M.copy() if i == 1 else wedge_power(ev, self._proj[i])
        return self._wedge[i]

    def _tail(self, i: int) -> np.ndarray:
        ev = self.ctx.ev
        if i == 1:
            return self.ctx.ring.eye(ev.N * ev.aux_dim)
        return wedge_power(ev, self._proj[i], copy_first=False)

    def A(self, m: int, i: int) -> np.ndarray:
        if m < -1:
            raise IndexError("A^(m,i) needs m >= -1")
        ctx = self.ctx
        if i == 0:
            return ctx.zero_matrix()
        key = (m, i)
        if key not in self._A:
            if m == -1:
                val = phi_inv(ctx.ev, self._tail(i))
            else:
                val = ctx.table.star(m, self.wedge(i))
            self._A[key] = val * self.iq(i)
        return self._A[key]

    def B(self, m: int, i: int) -> np.ndarray:
        if m < 0:
            raise IndexError("B^(m,i) needs m >= 0")
        ctx = self.ctx
        if i == 0:
            return ctx.zero_matrix()
        key = (m, i)
        if key not in self._B:
            if m == 0:
                val = phi_inv(ctx.ev, xi_map(ctx.ev, self.wedge(i)))
            else:
                val = ctx.table.star(m - 1, mt_map(ctx.ev, self.wedge(i)))
            self._B[key] = val * self.iq(i)
        return self._B[key]

    def X(self, m: int, i: int) -> BlockPair:
        """X^{(m,i)} = (A^{(m-1,i)}, B^{(m+1,i)})."""
        return BlockPair(self.A(m - 1, i), self.B(m + 1, i))

    def uniform_boundary_residuals(self, i: int) -> tuple[Residual, Residual]:
        """Boundary entries against i_q M^{\\bar{-1}} ⋆ (...) (needs g invertible)."""
        ctx = self.ctx
        a = ctx.table.star_minv(self.wedge(i)) * self.iq(i)
        b = ctx.table.star_minv(mt_map(ctx.ev, self.wedge(i))) * self.iq(i)
        return (
            ctx.res(self.A(-1, i) - a, a),
            ctx.res(self.B(0, i) - b, b),
        )


def descendants_def(ev: Evaluation, cd: CharData) -> DescendantTable:
    return DescendantTable(make_context(ev, cd))


# ---------------------------------------------------------------- closed forms


def closed_form_A(ctx: ChContext, m: int, i: int) -> MatPoly:
    if not 1 <= i or m < i - 2:
        raise ValueError("closed form for A^(m,i) needs i >= 1 and m >= i-2")
    q, mu = ctx.q, ctx.mu
    den = ctx.nonzero(1 + mu * ctx.qp(2 * i - 3), "1+μq^(2i-3)")
    c = (1 - ctx.qp(-2)) / den
    out = MatPoly()
    for j in range(i):
        inner = ctx.P(m + i - j)
        for r in range(1, i - j):
            inner = inner + ctx.P(m + i - j - 2 * r, ctx.g(r) * ctx.qp(2 * r)).scale(c)
        out = out + inner.times(ctx.e(j)).scale((-1) ** (i - 1) * ctx.mq(j))
    return out


def closed_form_B(ctx: ChContext, m: int, i: int) -> MatPoly:
    if not 1 <= i or m < i:
        raise ValueError("closed form for B^(m,i) needs i >= 1 and m >= i")
    q, mu = ctx.q, ctx.mu
    den = ctx.nonzero(1 + mu * ctx.qp(2 * i - 3), "1+μq^(2i-3)")
    c = ctx.ring.inv(q) * (1 - ctx.qp(-2)) / den
    out = MatPoly()
    for j in range(i):
        inner = ctx.P(m - i + j, ctx.g(i - j)).scale(ctx.ring.inv(mu) * ctx.qp(-2 * j))
        for r in range(1, i - j):
            inner = inner - ctx.P(m + i - j - 2 * r, ctx.g(r) * ctx.qp(2 * r)).scale(c)
        out = out + inner.times(ctx.e(j)).scale((-1) ** (i - 1) * ctx.mq(j))
    return out


def closed_forms(ctx: ChContext, m: int, i: int):
    """(A^{(m,i)}, B^{(m,i)}) from the resolved recursions; B is None when m < i."""
    A = closed_form_A(ctx, m, i).evaluate(ctx)
    B = closed_form_B(ctx, m, i).evaluate(ctx) if m >= i else None
    return A, B


def closed_form_residuals(tab: DescendantTable, m_extra: int = 1) -> list[Residual]:
    ctx = tab.ctx
    out = []
    for i in range(1, ctx.k + 2):
        for m in range(max(i - 2, -1), i + m_extra + 1):
            A, B = closed_forms(ctx, m, i)
            out.append(ctx.res(A - tab.A(m, i), A))
            if B is not None:
                out.append(ctx.res(B - tab.B(m, i), B))
    return out


# ---------------------------------------------------------------- recursions


def recursion_residuals(tab: DescendantTable, m_max: int = 2) -> dict[str, list[Residual]]:
    ctx = tab.ctx
    q, mu, lam = ctx.q, ctx.mu, ctx.lam
    rek1, rek2 = [], []
    for i in range(ctx.k + 1):
        b = ctx.nonzero(1 + mu * ctx.qp(2 * i - 1), "1+μq^(2i-1)")
        for m in range(m_max + 1):
            Pm_e = ctx.P(m, ctx.e(i)).evaluate(ctx)
            rhs1 = Pm_e * ctx.qp(i) - tab.A(m, i) - tab.B(m, i) * (mu * ctx.qp(2 * i - 1) * lam / b)
            lhs1 = tab.A(m - 1, i + 1)
            rek1.append(ctx.res(lhs1 - rhs1, lhs1, rhs1))
            inner = Pm_e * (ctx.ring.inv(mu) * ctx.qp(-i)) + tab.A(m, i) * (lam / b) - tab.B(m, i)
            rhs2 = ctx.ev.times(inner, ctx.g())
            lhs2 = tab.B(m + 1, i + 1)
            rek2.append(ctx.res(lhs2 - rhs2, lhs2, rhs2))
    return {"rek1": rek1, "rek2": rek2}


def _ab(ctx: ChContext, i: int):
    a = ctx.nonzero(1 + ctx.mu * ctx.qp(2 * i - 3), "1+μq^(2i-3)")
    b = ctx.nonzero(1 + ctx.mu * ctx.qp(2 * i - 1), "1+μq^(2i-1)")
    return a, b, ctx.mu * ctx.qp(2 * i - 3)


def build_U(ctx: ChContext, i: int) -> Block:
    a, _, x = _ab(ctx, i)
    lam, one, g = ctx.lam, ctx.one(), ctx.g()
    return [
        [ctx.P(0, -one), ctx.P(0, g * (lam / a))],
        [ctx.P(0, one * (-x * lam / a)), ctx.P(0, -g)],
    ]


def build_V(ctx: ChContext, i: int, printed: bool = False) -> Block:
    """V^(i).  The upper-left entry carries a minus sign; ``printed=True``
    gives the variant without it, for which U V is not a multiple of I."""
    a, b, x = _ab(ctx, i)
    lam, one, g = ctx.lam, ctx.one(), ctx.g()
    s = 1 if printed else -1
    f = a / b
    return [
        [ctx.P(0, g * (s * a * f)), ctx.P(0, g * (-lam * f))],
        [ctx.P(0, one * (x * lam * f)), ctx.P(0, one * (-a * f))],
    ]


def build_Q(ctx: ChContext, i: int, printed: bool = False) -> Block:
    """Q^(i) = V^(i) ⋆ diag(I, M^{\\bar 2})."""
    V = build_V(ctx, i, printed)
    D = [[ctx.P(0), MatPoly()], [MatPoly(), ctx.P(2)]]
    return block_mul(V, D)


def uv_residual(ctx: ChContext, i: int, printed: bool = False) -> Residual:
    UV = block_mul(build_U(ctx, i), build_V(ctx, i, printed))
    target = ctx.g() * (1 + ctx.mu * ctx.qp(2 * i - 5))
    zero = ctx.zero_u()
    diffs = [
        UV[0][0].terms.get(0, zero) - target,
        UV[0][1].terms.get(0, zero),
        UV[1][0].terms.get(0, zero),
        UV[1][1].terms.get(0, zero) - target,
    ]
    return worst(ctx.res(d, target) for d in diffs)


def pair_star_block(ctx: ChContext, X: BlockPair, blk: Block) -> BlockPair:
    return BlockPair(
        ctx.star(X.left, blk[0][0]) + ctx.star(X.right, blk[1][0]),
        ctx.star(X.left, blk[0][1]) + ctx.star(X.right, blk[1][1]),
    )


def poly_pair(ctx: ChContext, left: MatPoly, right: MatPoly) -> BlockPair:
    return BlockPair(left.evaluate(ctx), right.evaluate(ctx))


def pair_residual(ctx: ChContext, lhs: BlockPair, rhs: BlockPair) -> Residual:
    return worst([
        ctx.res(lhs.left - rhs.left, lhs.left, rhs.left),
        ctx.res(lhs.right - rhs.right, lhs.right, rhs.right),
    ])


def nx2n_residual(tab: DescendantTable, m: int, i: int) -> Residual:
    ctx = tab.ctx
    U = build_U(ctx, i)
    lead = poly_pair(
        ctx,
        ctx.P(m, ctx.e(i - 1) * ctx.qp(i - 1)),
        ctx.P(m, ctx.g() @ ctx.e(i - 1) * (ctx.ring.inv(ctx.mu) * ctx.qp(1 - i))),
    )
    rhs = lead + pair_star_block(ctx, BlockPair(tab.A(m, i - 1), tab.B(m, i - 1)), U)
    return pair_residual(ctx, tab.X(m, i), rhs)


def xrek_rhs(tab: DescendantTable, m: int, i: int, g_right: int = 2) -> BlockPair:
    """Right side of the X recursion; ``g_right`` is the power of g on the
    right component (2 as displayed, 1 as the s=1 case of the general form)."""
    ctx = tab.ctx
    a = 1 + ctx.mu * ctx.qp(2 * i - 3)
    c = -ctx.ring.inv(ctx.q) * a
    left = ctx.P(m, ctx.g() @ ctx.e(i - 1) * ctx.qp(i - 2))
    right = ctx.P(m + 2, ctx.g(g_right) @ ctx.e(i - 1) * (ctx.ring.inv(ctx.mu) * ctx.qp(2 - i)))
    lead = poly_pair(ctx, left, right).scale(c)
    Xn = tab.X(m + 1, i - 1)
    tail = BlockPair(ctx.ev.times(Xn.left, ctx.g()), ctx.ev.times(Xn.right, ctx.g()))
    return lead + tail.scale(1 + ctx.mu * ctx.qp(2 * i - 5))


def xrek_residual(tab: DescendantTable, m: int, i: int, g_right: int = 2) -> Residual:
    ctx = tab.ctx
    lhs = pair_star_block(ctx, tab.X(m, i), build_Q(ctx, i))
    return pair_residual(ctx, lhs, xrek_rhs(tab, m, i, g_right))


# ---------------------------------------------------------------- general relation


def _prefactor(ctx: ChContext, i: int, s: int):
    out = ctx.ring.one
    for p in range(2, s + 1):
        out = out * (1 + ctx.mu * ctx.qp(2 * (i - p) - 1))
    return out


def alpha_term(ctx: ChContext, m: int, i: int, s: int) -> tuple[MatPoly, MatPoly]:
    q, mu = ctx.q, ctx.mu
    left, right = MatPoly(), MatPoly()
    for j in range(s):
        left = left + ctx.P(s - j - 1, ctx.e(i + j - s) @ ctx.g(s)).scale(ctx.mq(j))
        right = right + ctx.P(s + j + 1, ctx.e(i + j - s) @ ctx.g(s - j)).scale(ctx.mq(-j))
    left = left.scale(ctx.qp(i - s - 1))
    right = right.scale(ctx.ring.inv(mu) * ctx.qp(s + 1 - i))
    c = -ctx.ring.inv(q) * (1 + mu * ctx.qp(2 * (i - s) - 1))
    return left.shift(m).scale(c), right.shift(m).scale(c)


def beta_term(ctx: ChContext, m: int, i: int, s: int) -> tuple[MatPoly, MatPoly]:
    inner = MatPoly()
    for j in range(1, s):
        for r in range(j, s):
            inner = inner + ctx.P(2 * (s - r) + j - 1, ctx.e(i - j) @ ctx.g(r)).scale(ctx.mq(2 * r - j - s + 1))
    inner = inner.shift(m).scale(-ctx.lam * ctx.qp(i - s - 2))
    return inner, inner.times(ctx.g()).scale(-ctx.q)


def gamma_term(tab: DescendantTable, m: int, i: int, s: int) -> BlockPair:
    ctx = tab.ctx
    X = tab.X(m + s, i - s)
    gs = ctx.g(s)
    c = 1 + ctx.mu * ctx.qp(2 * (i - s) - 3)
    return BlockPair(ctx.ev.times(X.left, gs), ctx.ev.times(X.right, gs)).scale(c)


def xrel_rhs(tab: DescendantTable, m: int, i: int, s: int) -> BlockPair:
    ctx = tab.ctx
    al, ar = alpha_term(ctx, m, i, s)
    bl, br = beta_term(ctx, m, i, s)
    total = poly_pair(ctx, al + bl, ar + br) + gamma_term(tab, m, i, s)
    return total.scale(_prefactor(ctx, i, s))


def xrel_lhs(tab: DescendantTable, m: int, i: int, s: int) -> BlockPair:
    ctx = tab.ctx
    X = tab.X(m, i)
    for p in range(i, i - s, -1):
        X = pair_star_block(ctx, X, build_Q(ctx, p))
    return X


def xrel_residual(tab: DescendantTable, m: int, i: int, s: int) -> Residual:
    if not 1 <= s <= i <= tab.ctx.k + 1 or m < 0:
        raise ValueError("need m >= 0 and 1 <= s <= i <= k+1")
    return pair_residual(tab.ctx, xrel_lhs(tab, m, i, s), xrel_rhs(tab, m, i, s))


def basic_identities(tab: DescendantTable, m_max: int = 2) -> dict[str, list[Residual]]:
    """A^{(m-1,k+1)} = B^{(m,k+1)} = 0, checked through the recursions at i = k
    (the definitional values vanish with the level-(k+1) antisymmetrizer)."""
    ctx = tab.ctx
    k, q, mu, lam = ctx.k, ctx.q, ctx.mu, ctx.lam
    b = ctx.nonzero(1 + mu * ctx.qp(2 * k - 1), "1+μq^(2k-1)")
    outA, outB = [], []
    for m in range(m_max + 1):
        Pm_e = ctx.P(m, ctx.e(k)).evaluate(ctx)
        a_val = Pm_e * ctx.qp(k) - tab.A(m, k) - tab.B(m, k) * (mu * ctx.qp(2 * k - 1) * lam / b)
        outA.append(ctx.res(a_val, Pm_e, tab.A(m, k)))
        if m >= 1:
            inner = (
                ctx.P(m - 1, ctx.e(k)).evaluate(ctx) * (ctx.ring.inv(mu) * ctx.qp(-k))
                + tab.A(m - 1, k) * (lam / b)
                - tab.B(m - 1, k)
            )
            b_val = ctx.ev.times(inner, ctx.g())
            outB.append(ctx.res(b_val, tab.B(m - 1, k)))
    zero_level = ctx.ev.yb.antisym(k + 1)[k + 1].dim == 0
    return {"ahah-A": outA, "ahah-B": outB, "height": zero_level}


def ahah1_residual(tab: DescendantTable) -> Residual:
    """Right side of the general relation at i = k+1, s = ⌊(k+1)/2⌋, m = 0."""
    ctx = tab.ctx
    s = (ctx.k + 1) // 2
    rhs = xrel_rhs(tab, 0, ctx.k + 1, s)
    return worst([ctx.res(rhs.left, ctx.table[ctx.k]), ctx.res(rhs.right, ctx.table[ctx.k])])


# ---------------------------------------------------------------- even k = 2ℓ


def u_ell(ctx: ChContext) -> MatPoly:
    l = ctx.k // 2
    out = MatPoly()
    for j in range(l):
        diff = ctx.e(2 * l - j) @ ctx.g(j) - ctx.e(j) @ ctx.g(l)
        for r in range(1, l - j + 1):
            out = out + ctx.P(2 * (l - r) - j, diff @ ctx.g(r)).scale(ctx.mq(2 * r + j))
    return out.scale(1 - ctx.qp(-2))


def _ortho6_inner(ctx: ChContext, with_top: bool) -> MatPoly:
    l = ctx.k // 2
    out = MatPoly()
    for j in range(2 * l - 1):
        coef = ctx.zero_u()
        for r in range(max(0, j + 1 - l), j // 2 + 1):
            if with_top:
                term = ctx.e(2 * l - j + 2 * r) @ ctx.g(j - 2 * r) - ctx.e(j - 2 * r) @ ctx.g(l)
            else:
                term = ctx.e(j - 2 * r)
            coef = coef + term @ ctx.g(r)
        out = out + ctx.P(2 * l - j - 2, coef).scale(ctx.mq(j))
    return out


def _m2_minus_g(ctx: ChContext) -> MatPoly:
    return ctx.P(2) - ctx.P(0, ctx.g())


def even_polys(ctx: ChContext) -> dict[str, MatPoly]:
    if ctx.k % 2:
        raise ValueError("even identities need even k")
    l = ctx.k // 2
    U = u_ell(ctx)
    half = ctx.ring.inv(ctx.ring.elt(2))
    ex_a, ex_b, o5, ch = MatPoly(), MatPoly(), MatPoly(), MatPoly()
    for j in range(2 * l + 1):
        c = ctx.mq(j)
        ex_a = ex_a + ctx.P(2 * l - j, ctx.e(j) @ ctx.g(l)).scale(c)
        ex_b = ex_b + ctx.P(2 * l - j, ctx.e(2 * l - j) @ ctx.g(j + 1)).scale(c)
        o5 = o5 + ctx.P(2 * l - j, ctx.e(2 * l - j) @ ctx.g(j) + ctx.e(j) @ ctx.g(l)).scale(c)
        ch = ch + ctx.P(2 * l - j, ctx.e(j)).scale(c)
    ex_a = ex_a - U.scale(half)
    ex_b = ex_b + U.shift(2).scale(half)
    o6 = _m2_minus_g(ctx).star(_ortho6_inner(ctx, True))
    left8 = _m2_minus_g(ctx).star(_ortho6_inner(ctx, False))
    return {
        "exAfin": ex_a,
        "exBfin": ex_b,
        "ortho-5": o5,
        "ortho-6": o6,
        "ortho-7": ch.times(ctx.e(2 * l) + ctx.g(l)),
        "ortho-8": left8.times(ctx.e(2 * l) - ctx.g(l)),
    }


def even_intermediate(ctx: ChContext) -> dict[str, Residual]:
    out = {}
    for name, poly in even_polys(ctx).items():
        val = poly.evaluate(ctx)
        out[name] = ctx.res(val, ctx.table[ctx.k])
    return out


def resolved_e(ctx: ChContext) -> list[np.ndarray]:
    """e_0..e_{2ℓ} with e_{ℓ+j} replaced by g^j e_{ℓ-j}."""
    l = ctx.k // 2
    es = [ctx.e(j) for j in range(l + 1)]
    for j in range(1, l + 1):
        es.append(ctx.g(j) @ ctx.e(l - j))
    return es


def ch_even_plus_poly(ctx: ChContext) -> MatPoly:
    l = ctx.k // 2
    es = resolved_e(ctx)
    out = MatPoly()
    for j in range(2 * l + 1):
        out = out + ctx.P(2 * l - j, es[j]).scale(ctx.mq(j))
    return out


def epsilon_even(ctx: ChContext) -> list[np.ndarray]:
    """ε_0..ε_{2ℓ-2}: ε_j = Σ_r e_{j-2r} g^r, then ε_{ℓ-1+j} = ε_{ℓ-1-j} g^j."""
    l = ctx.k // 2
    eps = []
    for j in range(l):
        acc = ctx.zero_u()
        for r in range(j // 2 + 1):
            acc = acc + ctx.e(j - 2 * r) @ ctx.g(r)
        eps.append(acc)
    for j in range(1, l):
        eps.append(eps[l - 1 - j] @ ctx.g(j))
    return eps


def ch_even_minus_poly(ctx: ChContext) -> MatPoly:
    l = ctx.k // 2
    eps = epsilon_even(ctx)
    inner = MatPoly()
    for j in range(2 * l - 1):
        inner = inner + ctx.P(2 * l - j - 2, eps[j]).scale(ctx.mq(j))
    return _m2_minus_g(ctx).star(inner)


def _component(ctx: ChContext):
    if ctx.k % 2:
        raise CharError("components exist for even k only")
    return ctx.cd.sign


def ch_even_plus(ctx: ChContext) -> Residual:
    if _component(ctx) != 1:
        raise CharError("identity not applicable: evaluation is not in the positive component")
    return ctx.res(ch_even_plus_poly(ctx).evaluate(ctx), ctx.table[ctx.k])


def ch_even_minus(ctx: ChContext) -> Residual:
    if _component(ctx) != -1:
        raise CharError("identity not applicable: evaluation is not in the negative component")
    return ctx.res(ch_even_minus_poly(ctx).evaluate(ctx), ctx.table[ctx.k])


# ---------------------------------------------------------------- odd k = 2ℓ-1


def _odd_sum(ctx: ChContext, offset: int, bracket) -> MatPoly:
    """Σ_j Σ_r (-q)^j M^{\\bar{2(ℓ-r)-j-2+offset}} (q²g)^r ⋆ bracket(j)."""
    l = (ctx.k + 1) // 2
    out = MatPoly()
    for j in range(l):
        b = bracket(j)
        for r in range(l - j):
            c = ctx.mq(j) * ctx.qp(2 * r)
            out = out + b.shift(2 * (l - r) - j - 2 + offset).times(ctx.g(r)).scale(c)
    return out


def _eg(ctx: ChContext, idx: int, gp: int) -> np.ndarray:
    """e_idx g^gp, zero when e_idx is out of range (so g^-1 is never formed)."""
    if idx < 0 or idx > ctx.k:
        return ctx.zero_u()
    return ctx.e(idx) @ ctx.g(gp)


def odd_polys(ctx: ChContext) -> dict[str, MatPoly]:
    if ctx.k % 2 == 0:
        raise ValueError("odd identities need odd k")
    l = (ctx.k + 1) // 2
    g = ctx.g()

    def cc(j):
        return (
            ctx.P(0, _eg(ctx, 2 * l - j - 1, j)) - ctx.P(1, _eg(ctx, j, l - 1))
            + ctx.P(1, _eg(ctx, 2 * l - j, j - 1)) - ctx.P(0, _eg(ctx, j - 1, l))
        ).times(g)

    def dd(j):
        return (
            ctx.P(0, _eg(ctx, j, l)) - ctx.P(1, _eg(ctx, 2 * l - j - 1, j))
            + ctx.P(1, _eg(ctx, j - 1, l)) - ctx.P(0, _eg(ctx, 2 * l - j, j))
        ).times(g)

    top = ctx.e(2 * l - 1)

    def o9(j):
        return (
            (ctx.P(0, top) - ctx.P(1, ctx.g(l - 1))).times(ctx.e(j))
            + (ctx.P(1, top) - ctx.P(0, ctx.g(l))).times(ctx.e(j - 1))
        )

    cc4 = _odd_sum(ctx, 0, cc)
    dd4 = _odd_sum(ctx, 1, dd)
    dep = ctx.P(1).star(cc4).times(top) - dd4.times(ctx.g(l - 1))
    return {"CC4": cc4, "DD4": dd4, "ortho-9": _odd_sum(ctx, 0, o9), "CC4-DD4": dep}


def odd_intermediate(ctx: ChContext) -> dict[str, Residual]:
    out = {}
    for name, poly in odd_polys(ctx).items():
        out[name] = ctx.res(poly.evaluate(ctx), ctx.table[ctx.k])
    return out


def epsilon_odd(ctx: ChContext) -> list[np.ndarray]:
    """ε_0..ε_{2ℓ-2}: ε_j = Σ_r e_{j-r}(-g^{1/2})^r, then ε_{ℓ-1+j} = ε_{ℓ-1-j} g^j."""
    l = (ctx.k + 1) // 2
    gh = ctx.cd.g_half
    if gh is None:
        raise CharError("g^(1/2) unavailable: g is not invertible")
    eps = []
    for j in range(l):
        acc = ctx.zero_u()
        p = ctx.one()
        for r in range(j + 1):
            acc = acc + ctx.e(j - r) @ p
            p = p @ (-gh)
        eps.append(acc)
    for j in range(1, l):
        eps.append(eps[l - 1 - j] @ ctx.g(j))
    return eps


def ch_odd_poly(ctx: ChContext) -> MatPoly:
    l = (ctx.k + 1) // 2
    eps = epsilon_odd(ctx)
    inner = MatPoly()
    for j in range(2 * l - 1):
        inner = inner + ctx.P(2 * l - j - 2, eps[j]).scale(ctx.mq(j))
    return (ctx.P(1) - ctx.P(0, ctx.cd.g_half)).star(inner)


def ch_odd(ctx: ChContext) -> Residual:
    if ctx.k % 2 == 0:
        raise CharError("identity not applicable: k is even")
    return ctx.res(ch_odd_poly(ctx).evaluate(ctx), ctx.table[ctx.k])


# ---------------------------------------------------------------- report


@dataclass
class CHEntry:
    identity: str
    status: str              # pass | fail | skip | error
    residual: str
    detail: str = ""


@dataclass
class CHReport:
    k: int
    evaluation: str
    mode: str
    entries: list[CHEntry] = field(default_factory=list)

    def add(self, name: str, res: Residual | list | None, detail: str = ""):
        if res is None:
            self.entries.append(CHEntry(name, "skip", "", detail))
            return
        r = worst(res) if isinstance(res, list) else res
        self.entries.append(CHEntry(name, "pass" if r.ok else "fail", r.text(), detail))

    def skip(self, name: str, reason: str):
        self.entries.append(CHEntry(name, "skip", "", reason))

    def error(self, name: str, reason: str):
        self.entries.append(CHEntry(name, "error", "", reason))

    def get(self, name: str) -> CHEntry:
        for e in self.entries:
            if e.identity == name:
                return e
        raise KeyError(name)

    @property
    def ok(self) -> bool:
        return all(e.status in ("pass", "skip") for e in self.entries)

    def rows(self) -> list[dict]:
        out = []
        for e in self.entries:
            row = {
                "identity": e.identity,
                "k": self.k,
                "evaluation": self.evaluation,
                "residual": e.residual,
                "mode": self.mode,
                "status": e.status,
            }
            if e.detail:
                row["detail"] = e.detail
            out.append(row)
        return out


def xrel_grid(tab: DescendantTable, m_max: int = 1) -> list[Residual]:
    k = tab.ctx.k
    return [
        xrel_residual(tab, m, i, s)
        for m in range(m_max + 1)
        for i in range(1, k + 2)
        for s in range(1, i + 1)
    ]


def run_chain(ev: Evaluation, cd: CharData, m_max: int = 1) -> CHReport:
    """Every check of the derivation chain plus the applicable CH identity."""
    ctx = make_context(ev, cd)
    k = ev.k
    rep = CHReport(k, ev.label, "exact" if ev.ring.exact else "float")
    tab = DescendantTable(ctx)
    invertible = cd.g_inv is not None

    if invertible:
        rep.add("AB-boundary", [r for i in range(1, k + 2) for r in tab.uniform_boundary_residuals(i)])
    else:
        rep.skip("AB-boundary", "g is not invertible")
    rep.add("cor1ab", closed_form_residuals(tab, m_max))
    lem = recursion_residuals(tab, m_max + 1)
    rep.add("rek1", lem["rek1"])
    rep.add("rek2", lem["rek2"])
    rep.add("UinvV", [uv_residual(ctx, i) for i in range(1, k + 2)])
    rep.add("Nx2N", [nx2n_residual(tab, m, i) for m in range(m_max + 1) for i in range(1, k + 2)])
    rep.add("X-rek", [xrek_residual(tab, m, i, g_right=1) for m in range(m_max + 1) for i in range(1, k + 2)])
    rep.add("X-rel-gen", xrel_grid(tab, m_max))
    basic = basic_identities(tab, m_max + 1)
    rep.add("ahah-A", basic["ahah-A"])
    rep.add("ahah-B", basic["ahah-B"])
    rep.add("ahah1", ahah1_residual(tab))

    if k % 2 == 0:
        if not invertible:
            for name in ("exAfin", "exBfin", "ortho-5", "ortho-6", "ortho-7", "ortho-8", "CH-O+", "CH-O-1"):
                rep.skip(name, "g is not invertible")
            return rep
        for name, r in even_intermediate(ctx).items():
            rep.add(name, r)
        sign = cd.sign
        if sign == 1:
            rep.add("CH-O+", ch_even_plus(ctx))
            rep.skip("CH-O-1", "evaluation lies in the positive component")
        elif sign == -1:
            rep.skip("CH-O+", "evaluation lies in the negative component")
            rep.add("CH-O-1", ch_even_minus(ctx))
        else:
            rep.skip("CH-O+", "component undetermined")
            rep.skip("CH-O-1", "component undetermined")
    else:
        if not invertible:
            for name in ("CC4", "DD4", "ortho-9", "CC4-DD4", "CH-O-odd"):
                rep.skip(name, "g is not invertible")
            return rep
        for name, r in odd_intermediate(ctx).items():
            rep.add(name, r)
        rep.add("CH-O-odd", ch_odd(ctx))
    return rep


def ch_degree(ctx: ChContext) -> int | None:
    """Degree in M^{\\bar j} of the applicable CH polynomial."""
    if ctx.k % 2:
        return ch_odd_poly(ctx).degree(ctx.ring)
    if ctx.cd.sign == -1:
        return ch_even_minus_poly(ctx).degree(ctx.ring)
    return ch_even_plus_poly(ctx).degree(ctx.ring)
