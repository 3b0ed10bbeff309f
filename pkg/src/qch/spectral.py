"""Spectral variables for the orthogonal characteristic subalgebras.

Three cases are handled: EvenPlus (k = 2ℓ, positive component), EvenMinus
(k = 2ℓ, negative component) and Odd (k = 2ℓ-1).  Scalars are whatever the
caller passes: mpq, float/complex, or sympy expressions; every formula uses
plain arithmetic so the same code serves exact points and symbolic checks.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy as sp

from .scalar_ring import Residual, RingConfig, complete, elementary, to_mpq

CASES = ("EvenPlus", "EvenMinus", "Odd")


class SpectralError(ValueError):
    pass


def _check_case(case: str):
    if case not in CASES:
        raise SpectralError(f"unknown case {case!r}")


def case_k(case: str, l: int) -> int:
    _check_case(case)
    return 2 * l - 1 if case == "Odd" else 2 * l


def case_for(k: int, sign: int | None = None) -> str:
    if k % 2:
        return "Odd"
    if sign == -1:
        return "EvenMinus"
    return "EvenPlus"


def n_nus(case: str, l: int) -> int:
    """Number of ν_1, ν_2, … (ν_0 excluded)."""
    _check_case(case)
    return 2 * l if case == "EvenPlus" else 2 * l - 2


def qn(n: int, q):
    """n_q = (q^n - q^-n)/(q - 1/q)."""
    return (q ** n - q ** (-n)) / (q - q ** (-1))


# ---------------------------------------------------------------- points


@dataclass(frozen=True)
class SpectralPoint:
    case: str
    l: int
    nu0: object
    nus: tuple

    def __post_init__(self):
        _check_case(self.case)
        if len(self.nus) != n_nus(self.case, self.l):
            raise SpectralError(f"{self.case} with l={self.l} needs {n_nus(self.case, self.l)} values")

    @property
    def k(self) -> int:
        return case_k(self.case, self.l)

    @property
    def m(self) -> int:
        return len(self.nus)

    def nu(self, j: int):
        """ν_j with 1-based j; ν_0 at j = 0."""
        return self.nu0 if j == 0 else self.nus[j - 1]

    def partner(self, j: int) -> int:
        """Index paired with j: ν_j ν_partner = ν_0²."""
        return self.m + 1 - j

    def pair_residuals(self) -> list:
        n0 = self.nu0 * self.nu0
        return [self.nu(j) * self.nu(self.partner(j)) - n0 for j in range(1, self.m // 2 + 1)]


def make_spectral(case: str, l: int, nu0, free) -> SpectralPoint:
    """ν_1..ν_n given freely; the partners follow from ν_j ν_{2n+1-j} = ν_0²."""
    _check_case(case)
    if l < 1 or (case != "EvenPlus" and l < 2):
        raise SpectralError("l too small for this case")
    free = list(free)
    n = n_nus(case, l) // 2
    if len(free) != n:
        raise SpectralError(f"need {n} free values")
    if nu0 == 0 or any(v == 0 for v in free):
        raise SpectralError("spectral variables must be invertible (nonzero)")
    n0 = nu0 * nu0
    tail = [n0 / v for v in reversed(free)]
    return SpectralPoint(case, l, nu0, tuple(free + tail))


def random_point(case: str, l: int, rng: random.Random, lo: int = 2, hi: int = 40) -> SpectralPoint:
    """Rational point with pairwise distinct ν's (and distinct from ±ν_0)."""
    while True:
        nu0 = to_mpq(Fraction(rng.randint(lo, hi), rng.randint(lo, hi)))
        free = [to_mpq(Fraction(rng.randint(lo, hi), rng.randint(lo, hi))) for _ in range(n_nus(case, l) // 2)]
        try:
            sp_ = make_spectral(case, l, nu0, free)
        except SpectralError:
            continue
        vals = list(sp_.nus) + [nu0, -nu0]
        if len(set(vals)) == len(vals):
            return sp_


# ---------------------------------------------------------------- π maps


def pi_args(sp_: SpectralPoint) -> list:
    if sp_.case == "EvenPlus":
        return list(sp_.nus)
    if sp_.case == "EvenMinus":
        return [sp_.nu0, -sp_.nu0] + list(sp_.nus)
    return [sp_.nu0] + list(sp_.nus)


def pi_map_e(sp_: SpectralPoint, n_max: int | None = None) -> list:
    """Images of e_0..e_{n_max} (default k); e_i = 0 past the argument count."""
    n_max = sp_.k if n_max is None else n_max
    one = sp_.nu0 ** 0
    return elementary(pi_args(sp_), n_max, one)


def pi_g(sp_: SpectralPoint):
    return sp_.nu0 * sp_.nu0


def reciprocal_images(sp_: SpectralPoint) -> list:
    """g^{k-i} e_i - e_k e_{k-i} on the images, i = 0..k."""
    k = sp_.k
    e = pi_map_e(sp_)
    g = pi_g(sp_)
    return [g ** (k - i) * e[i] - e[k] * e[k - i] for i in range(k + 1)]


def _symbols(case: str, l: int):
    nu0 = sp.Symbol("nu0", nonzero=True)
    free = sp.symbols(f"nu1:{n_nus(case, l) // 2 + 1}", nonzero=True)
    return nu0, list(free)


def symbolic_point(case: str, l: int) -> SpectralPoint:
    nu0, free = _symbols(case, l)
    return make_spectral(case, l, nu0, free)


def is_zero_rational(expr) -> bool:
    num, _ = sp.fraction(sp.together(sp.expand(expr)))
    return sp.expand(num) == 0


def symbolic_reciprocal_check(case: str, l: int) -> bool:
    return all(is_zero_rational(r) for r in reciprocal_images(symbolic_point(case, l)))


def involution_identities(case: str, l: int) -> bool:
    """e_{n-i}(ν) = e_i(1/ν) e_n(ν) and e_i(1/ν) = ν_0^{-2i} e_i(ν) for the paired set."""
    p = symbolic_point(case, l)
    nus = list(p.nus)
    n = len(nus)
    e = elementary(nus, n, sp.Integer(1))
    einv = elementary([1 / v for v in nus], n, sp.Integer(1))
    ok = all(is_zero_rational(e[n - i] - einv[i] * e[n]) for i in range(n + 1))
    return ok and all(is_zero_rational(einv[i] - p.nu0 ** (-2 * i) * e[i]) for i in range(n + 1))


# ---------------------------------------------------------------- factorized forms


def epsilon_images(sp_: SpectralPoint) -> list:
    """ε_j of the CH identity built from the π-images of e_j (mirror rule included)."""
    l = sp_.l
    e = pi_map_e(sp_, 2 * l)
    g = pi_g(sp_)
    zero = 0 * sp_.nu0
    if sp_.case == "EvenPlus":
        return e[: 2 * l + 1]
    eps = []
    for j in range(l):
        acc = zero
        if sp_.case == "EvenMinus":
            for r in range(j // 2 + 1):
                acc = acc + e[j - 2 * r] * g ** r
        else:
            for r in range(j + 1):
                acc = acc + e[j - r] * (-sp_.nu0) ** r
        eps.append(acc)
    for j in range(1, l):
        eps.append(eps[l - 1 - j] * g ** j)
    return eps


def ch_polynomial(sp_: SpectralPoint, x, q):
    """Σ(-q)^j x^{deg-j} c_j with the case's left factor, as written in the CH identity."""
    eps = epsilon_images(sp_)
    deg = len(eps) - 1
    inner = sum(((-q) ** j * x ** (deg - j) * eps[j] for j in range(deg + 1)), 0 * x)
    if sp_.case == "EvenPlus":
        return inner
    if sp_.case == "EvenMinus":
        return (x ** 2 - pi_g(sp_)) * inner
    return (x - sp_.nu0) * inner


def factorized_polynomial(sp_: SpectralPoint, x, q):
    out = x ** 0
    for v in sp_.nus:
        out = out * (x - q * v)
    if sp_.case == "EvenMinus":
        out = out * (x - sp_.nu0) * (x + sp_.nu0)
    elif sp_.case == "Odd":
        out = out * (x - sp_.nu0)
    return out


def factorized_ch_check(sp_: SpectralPoint, q=None) -> bool:
    """Coefficientwise equality of the CH polynomial and its factorized form."""
    x = sp.Symbol("x")
    q = sp.Symbol("q", nonzero=True) if q is None else q
    diff = ch_polynomial(sp_, x, q) - factorized_polynomial(sp_, x, q)
    return is_zero_rational(diff)


# ---------------------------------------------------------------- Newton data


def newton_p_from_e(e: list, g, k: int, q, n_max: int, p0) -> list:
    """p_1..p_{n_max} from the (q, μ=q^{1-k}) Newton relation, e_i = 0 past len(e)."""
    ee = lambda i: e[i] if i < len(e) else 0 * e[0]
    p = [p0]
    for n in range(1, n_max + 1):
        rhs = (-1) ** (n - 1) * qn(n, q) * ee(n)
        for i in range(1, n // 2 + 1):
            rhs = rhs + (-1) ** n * q * (q ** (n - 2 * i - k) - q ** (-n + 2 * i)) * ee(n - 2 * i) * g ** i
        for i in range(1, n):
            rhs = rhs - (-q) ** i * ee(i) * p[n - i]
        p.append(rhs)
    return p


def wronski_h_from_e(e: list, g, n_max: int) -> list:
    ee = lambda i: e[i] if i < len(e) else 0 * e[0]
    h = [e[0] ** 0]
    for n in range(1, n_max + 1):
        acc = -g if n == 2 else 0 * e[0]
        for i in range(1, n + 1):
            acc = acc - (-1) ** i * ee(i) * h[n - i]
        h.append(acc)
    return h


def p0_value(k: int, q):
    return q ** (1 - k) * (1 + qn(k - 1, q))


@dataclass
class ModifiedSums:
    e1: list    # e'
    h1: list    # h'
    p1: list    # p'
    p2: list    # p''
    residuals: dict = field(default_factory=dict)


def modified_sums(e: list, h: list, p: list, g, k: int, q, n_max: int, mul=None) -> ModifiedSums:
    """Modified sequences with the mod-N / mod-W / popo residuals.

    ``mul`` multiplies two elements (defaults to ``*``; pass ``np.matmul``
    for End(U) matrices)."""
    mul = mul or (lambda a, b: a * b)
    zero = 0 * e[0]
    ee = lambda i: e[i] if 0 <= i < len(e) else zero
    e1, h1 = [], []
    for i in range(n_max + 1):
        e1.append(ee(i) + (mul(e1[i - 2], g) if i >= 2 else zero))
        h1.append(h[i] + (mul(h1[i - 2], g) if i >= 2 else zero))
    one = e[0]
    p1 = [one * (q ** (-k) * qn(k, q)), p[1]]
    p2 = [one * (q ** (2 - k) * qn(k - 2, q)), p[1]]
    for i in range(2, n_max + 1):
        p1.append(p[i] + mul(p1[i - 2] * q ** 2 - p[i - 2], g))
        p2.append(p[i] + mul(p2[i - 2] * q ** (-2) - p[i - 2], g))
    res = {"mod-N-e": [], "mod-N-h": [], "mod-W-e": [], "mod-W-h": []}
    for n in range(1, n_max + 1):
        a = sum((mul(ee(i), p1[n - i]) * (-q) ** i for i in range(n)), zero)
        res["mod-N-e"].append(a - ee(n) * ((-1) ** (n - 1) * qn(n, q)))
        b = sum((mul(h[i], p2[n - i]) * q ** (-i) for i in range(n)), zero)
        res["mod-N-h"].append(b - h[n] * qn(n, q))
    for n in range(n_max + 1):
        delta = one if n == 0 else zero
        res["mod-W-e"].append(sum((mul(e1[i], h[n - i]) * (-1) ** i for i in range(n + 1)), zero) - delta)
        res["mod-W-h"].append(sum((mul(ee(i), h1[n - i]) * (-1) ** i for i in range(n + 1)), zero) - delta)
    res["popo"] = [q ** 2 * (q ** (-k) * qn(k, q)) - p0_value(k, q) - (q - q ** (1 - k))]
    return ModifiedSums(e1, h1, p1, p2, res)


def popo_residual(k: int, q):
    return q ** 2 * (q ** (-k) * qn(k, q)) - p0_value(k, q) - (q - q ** (1 - k))


# ---------------------------------------------------------------- weights


@dataclass
class WeightTable:
    case: str
    delta_vars: list        # variables entering δ_j (ν_0 first in the Odd case)
    delta: list
    d: list                 # d_1..d_m for ν_1..ν_m
    d0: object = None       # Odd
    d0_parity: tuple = ()   # EvenMinus: (d_{0,0}, d_{0,1})

    def d0_at(self, i: int):
        if self.case == "Odd":
            return self.d0
        if self.case == "EvenMinus":
            return self.d0_parity[i % 2]
        return 0


def _ratio(a, b, q):
    if a == b:
        raise SpectralError("weights undefined: extend ring by inverse differences")
    return (a - q ** (-2) * b) / (a - b)


def deltas(vals: list, q) -> list:
    out = []
    for j, a in enumerate(vals):
        acc = a ** 0
        for r, b in enumerate(vals):
            if r != j:
                acc = acc * _ratio(a, b, q)
        out.append(acc)
    return out


def weights(sp_: SpectralPoint, q) -> WeightTable:
    case, l, m = sp_.case, sp_.l, sp_.m
    nus = list(sp_.nus)
    dvars = ([sp_.nu0] + nus) if case == "Odd" else nus
    dl = deltas(dvars, q)
    d = []
    for j in range(1, m + 1):
        jb = sp_.partner(j)
        a = sp_.nu(j)
        acc = a ** 0
        for r in range(1, m + 1):
            if r not in (j, jb):
                acc = acc * _ratio(a, sp_.nu(r), q)
        if case == "EvenMinus":
            b = sp_.nu(jb)
            if a == b:
                raise SpectralError("weights undefined: extend ring by inverse differences")
            acc = acc * (a - q ** (-4) * b) / (a - b)
        elif case == "Odd":
            acc = acc * _ratio(a, sp_.nu0, q)
        d.append(acc)
    wt = WeightTable(case, dvars, dl, d)
    if case == "Odd":
        wt.d0 = q ** (2 - 2 * l)
    elif case == "EvenMinus":
        wt.d0_parity = (2 * q ** (1 - 2 * l), 0 * q)
    return wt


def delta_sum_rule(wt: WeightTable, q):
    """q^{-1} Σ δ_j - q^{-n} n_q with n the number of δ variables."""
    n = len(wt.delta)
    return sum(wt.delta) / q - q ** (-n) * qn(n, q)


def parameterize_p_h(sp_: SpectralPoint, q, n_max: int) -> tuple[list, list]:
    """Images of p_0..p_{n_max} and h_0..h_{n_max}."""
    wt = weights(sp_, q)
    nus = list(sp_.nus)
    p = []
    for i in range(n_max + 1):
        acc = q ** (i - 1) * sum((dj * v ** i for dj, v in zip(wt.d, nus)), 0 * q)
        if sp_.case == "Odd":
            acc = acc + wt.d0 * sp_.nu0 ** i
        elif sp_.case == "EvenMinus":
            acc = acc + wt.d0_at(i) * sp_.nu0 ** i
        p.append(acc)
    hv = complete(nus, n_max, sp_.nu0 ** 0)
    h = []
    for i in range(n_max + 1):
        if sp_.case == "EvenPlus":
            h.append(hv[i] - (sp_.nu0 ** 2 * hv[i - 2] if i >= 2 else 0))
        elif sp_.case == "EvenMinus":
            h.append(hv[i])
        else:
            h.append(hv[i] + (sp_.nu0 * hv[i - 1] if i >= 1 else 0))
    return p, h


def newton_images(sp_: SpectralPoint, q, n_max: int) -> tuple[list, list]:
    """p and h from the π-image e's via the Newton and Wronski relations."""
    k = sp_.k
    e = pi_map_e(sp_, n_max)
    g = pi_g(sp_)
    p = newton_p_from_e(e, g, k, q, n_max, p0_value(k, q))
    h = wronski_h_from_e(e, g, n_max)
    return p, h


def gs_residuals(sp_: SpectralPoint, q, n_max: int) -> list:
    """Modified power sums (p' or p'') against q^{i-1} Σ δ_j ν_j^i."""
    k = sp_.k
    p, h = newton_images(sp_, q, n_max)
    e = pi_map_e(sp_, n_max)
    ms = modified_sums(e, h, p, pi_g(sp_), k, q, n_max)
    target = ms.p2 if sp_.case == "EvenMinus" else ms.p1
    wt = weights(sp_, q)
    return [
        target[i] - q ** (i - 1) * sum((dj * v ** i for dj, v in zip(wt.delta, wt.delta_vars)), 0 * q)
        for i in range(n_max + 1)
    ]


# ---------------------------------------------------------------- partial fractions


def _w_product(vals, z, q):
    out = z ** 0
    for v in vals:
        out = out * (z - q ** (-2) * v) / (z - v)
    return out


def pf_functions(sp_: SpectralPoint, q):
    """(name, product form, simple-ratio form) triples for w, v and v·z."""
    wt = weights(sp_, q)
    l, n0 = sp_.l, sp_.nu0
    nus = list(sp_.nus)
    dv = wt.delta_vars
    out = [(
        "w",
        lambda z: _w_product(dv, z, q),
        lambda z: 1 + sum(((1 - q ** (-2)) * dj * v / (z - v) for dj, v in zip(wt.delta, dv)), 0 * z),
    )]
    a, b = q ** (-1) * n0, -(q ** (-1)) * n0
    # in the odd case the simple-ratio weights are δ over ν_1..ν_{2ℓ-2} only
    dd = list(zip(nus, wt.d, wt.delta if sp_.case != "Odd" else deltas(nus, q)))
    if sp_.case == "EvenPlus":
        u = lambda z: _w_product(nus, z, q)
        out.append((
            "v",
            lambda z: n0 ** 2 / (z ** 2 - q ** (-2) * n0 ** 2) * u(z),
            lambda z: sum((v * (de - d) / (z - v) for v, d, de in dd), 0 * z)
            + n0 * q ** (1 - 2 * l) / 2 * (1 / (z - a) - 1 / (z - b)),
        ))
        out.append((
            "vz",
            lambda z: n0 ** 2 / (z ** 2 - q ** (-2) * n0 ** 2) * u(z) * z,
            lambda z: sum((v ** 2 * (de - d) / (z - v) for v, d, de in dd), 0 * z)
            + n0 ** 2 * q ** (-2 * l) / 2 * (1 / (z - a) + 1 / (z - b)),
        ))
    elif sp_.case == "Odd":
        u = lambda z: _w_product(nus, z, q)
        out.append((
            "v",
            lambda z: z * n0 / (z ** 2 - q ** (-2) * n0 ** 2) * u(z),
            lambda z: sum((v * (d - de) / (z - v) for v, d, de in dd), 0 * z)
            + n0 * q ** (2 - 2 * l) / 2 * (1 / (z - a) + 1 / (z - b)),
        ))
        out.append((
            "vz",
            lambda z: z * n0 / (z ** 2 - q ** (-2) * n0 ** 2) * u(z) * z,
            # v(z)z tends to ν_0 at infinity, hence the constant term
            lambda z: n0 + sum((v ** 2 * (d - de) / (z - v) for v, d, de in dd), 0 * z)
            + n0 ** 2 * q ** (1 - 2 * l) / 2 * (1 / (z - a) - 1 / (z - b)),
        ))
    else:
        u = lambda z: _w_product(nus, z, q)
        out.append((
            "v",
            lambda z: n0 ** 2 / (z ** 2 - q ** (-2) * n0 ** 2) * u(z),
            lambda z: sum((q ** 2 * v * (d - de) / (z - v) for v, d, de in dd), 0 * z)
            + n0 * q ** (3 - 2 * l) / 2 * (1 / (z - a) - 1 / (z - b)),
        ))
        out.append((
            "vz",
            lambda z: n0 ** 2 / (z ** 2 - q ** (-2) * n0 ** 2) * u(z) * z,
            lambda z: sum((q ** 2 * v ** 2 * (d - de) / (z - v) for v, d, de in dd), 0 * z)
            + n0 ** 2 * q ** (2 - 2 * l) / 2 * (1 / (z - a) + 1 / (z - b)),
        ))
    return out


def partial_fraction_check(sp_: SpectralPoint, q, rng: random.Random, samples: int = 3) -> dict:
    """Product form minus simple-ratio form at random rational z (poles resampled)."""
    poles = set(list(sp_.nus) + [sp_.nu0 / q, -sp_.nu0 / q, sp_.nu0])
    out = {}
    for name, prod, ratio in pf_functions(sp_, q):
        vals = []
        while len(vals) < samples:
            z = to_mpq(Fraction(rng.randint(-50, 50), rng.randint(1, 13)))
            if z in poles or z == 0:
                continue
            vals.append(prod(z) - ratio(z))
        out[name] = vals
    return out


def pf_at_zero(sp_: SpectralPoint, q) -> dict:
    """w(0) = q^{-2n} and α_j = (1-q^{-2}) δ_j ν_j as residue of w, β for EvenPlus."""
    wt = weights(sp_, q)
    n = len(wt.delta_vars)
    out = {"w0": _w_product(wt.delta_vars, 0 * q, q) - q ** (-2 * n)}
    if sp_.case == "EvenPlus":
        u = _w_product(list(sp_.nus), q ** (-1) * sp_.nu0, q)
        beta = u * sp_.nu0 * q / 2
        out["beta"] = beta - sp_.nu0 * q ** (1 - 2 * sp_.l) / 2
    return out


# ---------------------------------------------------------------- numeric inversion


def _ch_coefficients(cd, case: str) -> tuple[list, object]:
    """Scalar coefficients c_j of Σ(-q)^j x^{deg-j} c_j and ν_0 for a 1×1 CharData."""
    if cd.ev is not None and cd.ev.aux_dim != 1:
        raise SpectralError("spectrum extraction needs a scalar-entry evaluation")
    k = cd.k
    s = lambda a: complex(a[0, 0])
    g = s(cd.g)
    if case == "Odd":
        if cd.g_half is None:
            raise SpectralError("g^(1/2) unavailable")
        nu0 = s(cd.g_half)
    else:
        nu0 = complex(np.sqrt(g))
    l = (k + 1) // 2
    e = [s(cd.e[j]) for j in range(k + 1)]
    if case == "EvenPlus":
        return e, nu0
    eps = []
    for j in range(l):
        acc = 0j
        if case == "EvenMinus":
            for r in range(j // 2 + 1):
                acc += e[j - 2 * r] * g ** r
        else:
            for r in range(j + 1):
                acc += e[j - r] * (-nu0) ** r
        eps.append(acc)
    for j in range(1, l):
        eps.append(eps[l - 1 - j] * g ** j)
    return eps, nu0


def pair_roots(nus: list, nu0, tol: float) -> list:
    """Greedy pairing by magnitude: each ν_j gets the partner with ν_j ν ≈ ν_0²."""
    target = nu0 * nu0
    left = sorted(nus, key=abs)
    lo, hi = [], []
    while left:
        a = left.pop(0)
        best = min(range(len(left)), key=lambda i: abs(a * left[i] - target), default=None)
        if best is None:
            raise SpectralError("spectrum does not satisfy the pairing constraint (odd count)")
        b = left.pop(best)
        if abs(a * b - target) > tol * max(1.0, abs(target)):
            raise SpectralError("spectrum does not satisfy the pairing constraint")
        lo.append(a)
        hi.append(b)
    return lo + list(reversed(hi))


def extract_spectrum(cd, case: str, tol: float = 1e-9) -> SpectralPoint:
    """Roots of the CH polynomial (companion-matrix eigenvalues), divided by q."""
    ring: RingConfig = cd.ring
    if ring.exact:
        raise SpectralError("spectrum extraction runs in the float ring only")
    q = ring.qe
    coeffs, nu0 = _ch_coefficients(cd, case)
    poly = [(-q) ** j * c for j, c in enumerate(coeffs)]
    roots = np.roots(poly) / q
    nus = pair_roots([complex(r) for r in roots], nu0, tol)
    l = (cd.k + 1) // 2
    return SpectralPoint(case, l, nu0, tuple(nus))


def roundtrip_residual(sp_: SpectralPoint, cd) -> float:
    e_img = pi_map_e(sp_)
    e_cd = [complex(cd.e[j][0, 0]) for j in range(cd.k + 1)]
    scale = max(1.0, max(abs(v) for v in e_cd))
    return max(abs(a - b) for a, b in zip(e_img, e_cd)) / scale


def spectrum_report(sp_: SpectralPoint, cd) -> dict:
    def fmt(z):
        z = complex(z)
        return [float(f"{z.real:.12g}"), float(f"{z.imag:.12g}")]

    return {
        "case": sp_.case,
        "nu0": fmt(sp_.nu0),
        "nus": [fmt(v) for v in sp_.nus],
        "pair_residuals": [float(f"{abs(r):.3e}") for r in sp_.pair_residuals()],
        "roundtrip_residual": float(f"{roundtrip_residual(sp_, cd):.3e}"),
    }


def residual_of(values: list, exact: bool = True, tol: float = 1e-9) -> Residual:
    if exact:
        return Residual(max((abs(v) for v in values), default=0), True)
    return Residual(max((abs(complex(v)) for v in values), default=0.0), False, tol)
