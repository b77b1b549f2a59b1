"""Dense univariate polynomials, coefficients stored lowest degree first."""
from __future__ import annotations

from math import gcd as igcd
from typing import Sequence

from ..errors import NonDivisible, RingMismatch
from .ring import ZZ, CoefficientRing


class UniPoly:
    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: CoefficientRing, coeffs: Sequence[int] = ()):
        self.ring = ring
        c = [ring.reduce(v) for v in coeffs]
        while c and not c[-1]:
            c.pop()
        self.coeffs = c

    @classmethod
    def _raw(cls, ring, coeffs):
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        p = cls.__new__(cls)
        p.ring = ring
        p.coeffs = coeffs
        return p

    @classmethod
    def x(cls, ring: CoefficientRing = ZZ) -> UniPoly:
        return cls(ring, [0, 1])

    @classmethod
    def from_roots_of_unity_factor(cls, k: int, ring: CoefficientRing = ZZ) -> UniPoly:
        """s^k - 1."""
        return cls(ring, [-1] + [0] * (k - 1) + [1])

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading_coefficient(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def _coerce(self, other):
        if isinstance(other, UniPoly):
            if other.ring != self.ring:
                raise RingMismatch(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, int):
            return UniPoly(self.ring, [other])
        return NotImplemented

    def _norm(self, c):
        mod = self.ring.modulus
        return [v % mod for v in c] if mod else c

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] += v
        return UniPoly._raw(self.ring, self._norm(out))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly._raw(self.ring, self._norm([-v for v in self.coeffs]))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return UniPoly._raw(self.ring, self._norm([v * other for v in self.coeffs]))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly(self.ring)
        out = [0] * (len(a) + len(b) - 1)
        for i, va in enumerate(a):
            if va:
                for j, vb in enumerate(b):
                    out[i + j] += va * vb
        return UniPoly._raw(self.ring, self._norm(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = UniPoly(self.ring, [1])
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = UniPoly(self.ring, [other])
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, tuple(self.coeffs)))

    def divmod(self, other: UniPoly) -> tuple[UniPoly, UniPoly]:
        """Division with remainder; over ZZ the divisor must have unit leading coefficient
        or the quotient coefficients must come out integral."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        ring = self.ring
        mod = ring.modulus
        r = list(self.coeffs)
        db = other.degree()
        lc = other.coeffs[-1]
        inv = ring.inv(lc) if mod else None
        if len(r) - 1 < db:
            return UniPoly(ring), self
        q = [0] * (len(r) - db)
        b = other.coeffs
        for i in range(len(r) - 1, db - 1, -1):
            c = r[i]
            if mod:
                c %= mod
            if not c:
                continue
            if mod:
                f = c * inv % mod
            else:
                f, rem = divmod(c, lc)
                if rem:
                    raise NonDivisible("non-integral quotient coefficient over ZZ")
            q[i - db] = f
            for j in range(db + 1):
                r[i - db + j] -= f * b[j]
        r = r[:db]
        return UniPoly._raw(ring, self._norm(q)), UniPoly._raw(ring, self._norm(r))

    def exact_div(self, other: UniPoly) -> UniPoly:
        q, r = self.divmod(other)
        if not r.is_zero():
            raise NonDivisible("nonzero remainder")
        return q

    def divides(self, other: UniPoly) -> bool:
        try:
            other.exact_div(self)
        except NonDivisible:
            return False
        return True

    def content(self) -> int:
        g = 0
        for v in self.coeffs:
            g = igcd(g, v)
        return g

    def primitive(self) -> UniPoly:
        """Positive-leading primitive part over ZZ, monic over a field."""
        if self.is_zero():
            return self
        if self.ring.is_field:
            return self * self.ring.inv(self.coeffs[-1])
        g = self.content()
        if self.coeffs[-1] < 0:
            g = -g
        return UniPoly._raw(self.ring, [v // g for v in self.coeffs])

    monic = primitive

    def pseudo_rem(self, other: UniPoly) -> UniPoly:
        """lc(other)^(deg self - deg other + 1) * self mod other, kept integral."""
        r = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        lc = b[-1]
        while len(r) - 1 >= db and r:
            c = r[-1]
            shift = len(r) - 1 - db
            r = [v * lc for v in r]
            for j in range(db + 1):
                r[shift + j] -= c * b[j]
            r = self._norm(r)
            while r and not r[-1]:
                r.pop()
        return UniPoly._raw(self.ring, r)

    def gcd(self, other: UniPoly) -> UniPoly:
        other = self._coerce(other)
        a, b = self, other
        if self.ring.is_field:
            while not b.is_zero():
                a, b = b, a.divmod(b)[1]
            return a.primitive()
        # primitive remainder sequence over ZZ
        ca, cb = a.content(), b.content()
        g = igcd(ca, cb)
        if a.is_zero():
            return b.primitive()
        if b.is_zero():
            return a.primitive()
        a, b = a.primitive(), b.primitive()
        if a.degree() < b.degree():
            a, b = b, a
        while not b.is_zero():
            r = a.pseudo_rem(b)
            a, b = b, (r.primitive() if not r.is_zero() else r)
        return a.primitive() * g

    def evaluate(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        if self.ring.modulus and isinstance(acc, int):
            acc %= self.ring.modulus
        return acc

    __call__ = evaluate

    def derivative(self) -> UniPoly:
        return UniPoly(self.ring, [i * c for i, c in enumerate(self.coeffs)][1:])

    def reverse(self) -> UniPoly:
        """s^deg * p(1/s)."""
        return UniPoly(self.ring, list(reversed(self.coeffs)))

    def symmetric_coeffs(self) -> list[int]:
        return [self.ring.symmetric(c) for c in self.coeffs]

    def to_text(self, var: str = "s") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e in range(self.degree(), -1, -1):
            c = self.ring.symmetric(self.coeffs[e])
            if not c:
                continue
            mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
            a = abs(c)
            body = str(a) if not mono else (mono if a == 1 else f"{a}*{mono}")
            parts.append(("-" if c < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"UniPoly({self.to_text()!r}, ring={self.ring})"
