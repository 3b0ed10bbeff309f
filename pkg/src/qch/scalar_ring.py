"""Coefficient rings: exact rationals, Laurent polynomials in q, complex floats.

A run works in exactly one ring, described by a :class:`RingConfig`.  Ring
elements are stored in numpy arrays: ``object`` arrays of ``gmpy2.mpq`` or
:class:`Laurent` for the exact rings, ``complex128`` for the float ring.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from gmpy2 import mpq

RING_KINDS = ("rational", "laurent", "float")


class RingError(ValueError):
    pass


def to_mpq(x) -> mpq:
    if isinstance(x, str):
        return mpq(x.strip())
    if isinstance(x, float):
        raise RingError("float given where an exact rational is required")
    return mpq(x)


class Laurent:
    """Laurent polynomial in q with rational coefficients.

    Terms are kept as a tuple of (exponent, coefficient) pairs sorted by
    decreasing exponent; zero coefficients are never stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        acc: dict[int, mpq] = {}
        if terms is None:
            pass
        elif isinstance(terms, dict):
            for e, c in terms.items():
                acc[int(e)] = acc.get(int(e), mpq(0)) + mpq(c)
        else:
            for e, c in terms:
                acc[int(e)] = acc.get(int(e), mpq(0)) + mpq(c)
        self._terms = tuple(sorted(((e, c) for e, c in acc.items() if c != 0), reverse=True))

    @classmethod
    def const(cls, c) -> "Laurent":
        return cls({0: c})

    @classmethod
    def mono(cls, e: int, c=1) -> "Laurent":
        return cls({e: c})

    @property
    def terms(self):
        return self._terms

    def as_dict(self) -> dict[int, mpq]:
        return dict(self._terms)

    @staticmethod
    def _lift(x) -> "Laurent":
        if isinstance(x, Laurent):
            return x
        if isinstance(x, (int, Fraction)) or type(x).__name__ == "mpq" or type(x).__name__ == "mpz":
            return Laurent.const(x)
        return NotImplemented

    def __add__(self, other):
        o = Laurent._lift(other)
        if o is NotImplemented:
            return o
        d = self.as_dict()
        for e, c in o._terms:
            d[e] = d.get(e, mpq(0)) + c
        return Laurent(d)

    __radd__ = __add__

    def __neg__(self):
        return Laurent({e: -c for e, c in self._terms})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = Laurent._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = Laurent._lift(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = Laurent._lift(other)
        if o is NotImplemented:
            return o
        d: dict[int, mpq] = {}
        for e1, c1 in self._terms:
            for e2, c2 in o._terms:
                d[e1 + e2] = d.get(e1 + e2, mpq(0)) + c1 * c2
        return Laurent(d)

    __rmul__ = __mul__

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise RingError("only monomials are invertible in the Laurent ring")
            (e, c), = self._terms
            return Laurent({e * n: c ** n})
        out = Laurent.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        o = Laurent._lift(other)
        if o is NotImplemented:
            return o
        quo, rem = self.divmod_exact(o)
        if rem:
            raise RingError("Laurent division is not exact")
        return quo

    def __rtruediv__(self, other):
        o = Laurent._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def divmod_exact(self, o: "Laurent"):
        # long division on the top-degree terms; the remainder is what is left
        # once the quotient would drop below the divisor's span
        if not o:
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if not self:
            return Laurent(), Laurent()
        ot = o._terms
        top_e, top_c = ot[0]
        span = top_e - ot[-1][0]
        rem = self.as_dict()
        quo: dict[int, mpq] = {}
        low = self._terms[-1][0]
        while rem:
            e = max(rem)
            if e - span < low:
                break
            c = rem[e] / top_c
            quo[e - top_e] = c
            for oe, oc in ot:
                k = oe + e - top_e
                v = rem.get(k, mpq(0)) - c * oc
                if v == 0:
                    rem.pop(k, None)
                else:
                    rem[k] = v
        return Laurent(quo), Laurent(rem)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        o = Laurent._lift(other)
        if o is NotImplemented:
            return False
        return self._terms == o._terms

    def __hash__(self):
        if not self._terms:
            return hash(0)
        if len(self._terms) == 1 and self._terms[0][0] == 0:
            return hash(self._terms[0][1])
        return hash(self._terms)

    def evaluate(self, q0):
        q0 = to_mpq(q0)
        if q0 == 0:
            raise RingError("evaluation pole")
        return sum((c * q0 ** e for e, c in self._terms), mpq(0))

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{c}*q^{e}" for e, c in self._terms)

    def __repr__(self):
        return f"Laurent({self})"


_TERM = re.compile(r"^\s*([-+]?\d+(?:/\d+)?)\s*\*\s*q\^([-+]?\d+)\s*$")


def parse_laurent(text: str) -> Laurent:
    text = text.strip()
    if text == "0":
        return Laurent()
    terms = []
    for part in text.split(" + "):
        m = _TERM.match(part)
        if not m:
            raise RingError(f"bad Laurent term {part!r}")
        terms.append((int(m.group(2)), mpq(m.group(1))))
    return Laurent(terms)


def format_scalar(x) -> str:
    if isinstance(x, Laurent):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        return repr(complex(x))
    if isinstance(x, (float, np.floating)):
        return repr(complex(x))
    return str(mpq(x))


def parse_scalar(text: str, kind: str):
    if kind == "rational":
        return mpq(text.strip())
    if kind == "laurent":
        return parse_laurent(text)
    if kind == "float":
        return complex(text.strip())
    raise RingError(f"unknown ring kind {kind!r}")


@dataclass(frozen=True)
class Residual:
    """Size of a residual.  Exact rings report the largest |entry| (or a
    nonzero flag for Laurent); the float ring reports a relative size."""

    value: object
    exact: bool
    tol: float = 0.0

    @property
    def ok(self) -> bool:
        if self.exact:
            return self.value == 0
        return bool(self.value <= self.tol)

    def text(self) -> str:
        if self.exact:
            return str(self.value)
        return f"{float(self.value):.3e}"


@dataclass(frozen=True)
class RingConfig:
    kind: str = "rational"
    q: object = mpq(7, 5)
    tol: float = 1e-9

    def __post_init__(self):
        if self.kind not in RING_KINDS:
            raise RingError(f"unknown ring kind {self.kind!r}")
        if self.kind == "rational":
            object.__setattr__(self, "q", to_mpq(self.q))
        elif self.kind == "float":
            object.__setattr__(self, "q", float(self.q))
        else:
            object.__setattr__(self, "q", None)

    @classmethod
    def rational(cls, q="7/5"):
        return cls("rational", to_mpq(q))

    @classmethod
    def laurent(cls):
        return cls("laurent", None)

    @classmethod
    def floating(cls, q=1.4, tol=1e-9):
        return cls("float", float(q), tol)

    @property
    def exact(self) -> bool:
        return self.kind != "float"

    @property
    def dtype(self):
        return object if self.exact else np.complex128

    @property
    def tag(self) -> str:
        if self.kind == "laurent":
            return "laurent"
        return f"{self.kind}:{format_scalar(self.q) if self.kind == 'rational' else repr(self.q)}"

    # elements

    def elt(self, x):
        if self.kind == "rational":
            return to_mpq(x) if not isinstance(x, str) else mpq(x)
        if self.kind == "laurent":
            if isinstance(x, Laurent):
                return x
            if isinstance(x, str):
                return parse_laurent(x) if "q" in x else Laurent.const(mpq(x))
            return Laurent.const(to_mpq(x))
        if isinstance(x, str):
            return complex(mpq(x)) if "/" in x else complex(x)
        return complex(x)

    @property
    def qe(self):
        if self.kind == "laurent":
            return Laurent.mono(1)
        return self.elt(self.q)

    def qpow(self, n: int):
        if self.kind == "laurent":
            return Laurent.mono(n)
        return self.qe ** n

    @property
    def zero(self):
        return self.elt(0)

    @property
    def one(self):
        return self.elt(1)

    def inv(self, x):
        if self.kind == "laurent":
            return Laurent.const(1) / x
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.one / x

    def mu(self, k: int):
        return self.qpow(1 - k)

    def lam(self):
        return self.qe - self.qpow(-1)

    # arrays

    def zeros(self, shape):
        if self.exact:
            a = np.empty(shape, dtype=object)
            a.fill(self.zero)
            return a
        return np.zeros(shape, dtype=np.complex128)

    def eye(self, n: int):
        a = self.zeros((n, n))
        for i in range(n):
            a[i, i] = self.one
        return a

    def asarray(self, rows) -> np.ndarray:
        a = np.array(rows, dtype=object)
        if self.exact:
            out = np.empty(a.shape, dtype=object)
            for idx, v in np.ndenumerate(a):
                out[idx] = self.elt(v)
            return out
        return np.vectorize(self.elt, otypes=[np.complex128])(a) if a.size else np.zeros(a.shape, np.complex128)

    def convert(self, arr: np.ndarray) -> np.ndarray:
        return self.asarray(arr)

    # residuals

    def magnitude(self, arr) -> object:
        a = np.asarray(arr)
        if a.size == 0:
            return 0
        if self.kind == "rational":
            return max(abs(v) for v in a.flat)
        if self.kind == "laurent":
            return 0 if all(not v for v in a.flat) else 1
        return float(np.max(np.abs(a)))

    def residual(self, diff, *terms) -> Residual:
        """Residual of an expression expected to vanish.  ``terms`` are the
        pieces it was assembled from; in float mode they set the scale."""
        if self.kind == "rational":
            return Residual(self.magnitude(diff), True)
        if self.kind == "laurent":
            a = np.asarray(diff)
            bad = next((v for v in a.flat if v), None)
            return Residual(0 if bad is None else str(bad), True)
        scale = max([1.0] + [float(self.magnitude(t)) for t in terms])
        return Residual(float(self.magnitude(diff)) / scale, False, self.tol)

    def is_zero(self, arr, *terms) -> bool:
        return self.residual(arr, *terms).ok

    # parameter restrictions

    def validate(self, k: int):
        """Reject q violating q != 0, q^(2i) != 1 (i=1..k), q^(k+2) != -1."""
        if self.kind == "laurent":
            return
        q = self.qe
        bad = q == 0
        tol = 1e-12 if self.kind == "float" else 0
        for i in range(1, k + 1):
            if bad:
                break
            bad = abs(q ** (2 * i) - 1) <= tol
        if not bad:
            bad = abs(q ** (k + 2) + 1) <= tol
        if bad:
            raise RingError("parameter restriction violated")


def q_number(n: int, ring: RingConfig):
    """Symmetric q-number n_q = (q^n - q^-n)/(q - q^-1)."""
    if ring.kind != "laurent" and ring.qe ** 2 == 1:
        raise RingError("degenerate q")
    num = ring.qpow(n) - ring.qpow(-n)
    return num / ring.lam()


def eval_at_q(s: Laurent, q0):
    if not isinstance(s, Laurent):
        raise RingError("eval_at_q expects a Laurent polynomial")
    return s.evaluate(q0)


def specialize(arr: np.ndarray, q0) -> np.ndarray:
    """Entrywise eval_at_q over an object array."""
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = v.evaluate(q0)
    return out


def elementary(values: Iterable, n: int, one=1):
    """Elementary symmetric polynomials e_0..e_n of ``values``."""
    e = [one] + [0 * one] * n
    for v in values:
        for i in range(n, 0, -1):
            e[i] = e[i] + e[i - 1] * v
    return e


def complete(values: Iterable, n: int, one=1):
    """Complete symmetric polynomials h_0..h_n of ``values``."""
    h = [one] + [0 * one] * n
    for v in values:
        for i in range(1, n + 1):
            h[i] = h[i] + h[i - 1] * v
    return h
