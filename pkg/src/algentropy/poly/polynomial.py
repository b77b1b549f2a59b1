"""Sparse multivariate polynomials over ZZ or a prime field.

Terms live in a dict mapping exponent tuples to nonzero coefficients.  All
values are treated as immutable once built.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from ..errors import NonDivisible, RingMismatch
from .ring import ZZ, CoefficientRing


def grlex_key(m: tuple) -> tuple:
    return (sum(m), m)


class Polynomial:
    __slots__ = ("ring", "variables", "terms", "_hash")

    def __init__(self, ring: CoefficientRing, variables: Sequence[str], terms: Mapping[tuple, int] | None = None):
        self.ring = ring
        self.variables = tuple(variables)
        n = len(self.variables)
        clean = {}
        if terms:
            for m, c in terms.items():
                m = tuple(m)
                if len(m) != n:
                    raise ValueError(f"monomial {m} has wrong length for {n} variables")
                if any(e < 0 or e >= 1 << 16 for e in m):
                    raise ValueError(f"exponent out of range in {m}")
                c = ring.reduce(c)
                if c:
                    clean[m] = c
        self.terms = clean
        self._hash = None

    # construction helpers

    @classmethod
    def _raw(cls, ring, variables, terms):
        p = cls.__new__(cls)
        p.ring = ring
        p.variables = variables
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, ring, variables, c) -> Polynomial:
        n = len(variables)
        return cls(ring, variables, {(0,) * n: c})

    @classmethod
    def zero(cls, ring, variables) -> Polynomial:
        return cls._raw(ring, tuple(variables), {})

    @classmethod
    def one(cls, ring, variables) -> Polynomial:
        return cls.constant(ring, tuple(variables), 1)

    @classmethod
    def gen(cls, ring, variables, name_or_index) -> Polynomial:
        variables = tuple(variables)
        i = variables.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        m = [0] * len(variables)
        m[i] = 1
        return cls._raw(ring, variables, {tuple(m): 1})

    @classmethod
    def gens(cls, ring, variables) -> list[Polynomial]:
        return [cls.gen(ring, variables, i) for i in range(len(variables))]

    @classmethod
    def parse(cls, text: str, variables: Sequence[str], ring: CoefficientRing = ZZ, params=None) -> Polynomial:
        from .parse import parse_polynomial

        return parse_polynomial(text, variables, ring=ring, params=params)

    # basic queries

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def degree_in(self, var) -> int:
        i = self.variables.index(var) if isinstance(var, str) else var
        if not self.terms:
            return -1
        return max(m[i] for m in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def leading_monomial(self) -> tuple:
        return max(self.terms, key=grlex_key)

    def leading_coefficient(self) -> int:
        return self.terms[self.leading_monomial()] if self.terms else 0

    def sorted_terms(self) -> list[tuple[tuple, int]]:
        return sorted(self.terms.items(), key=lambda mc: grlex_key(mc[0]), reverse=True)

    def with_ring(self, ring: CoefficientRing) -> Polynomial:
        """Reduce coefficients into ``ring`` (e.g. ZZ -> GF(p)); symmetric lift for GF -> ZZ."""
        if ring == self.ring:
            return self
        if ring.is_field:
            return Polynomial(ring, self.variables, self.terms)
        return Polynomial(ring, self.variables, {m: self.ring.symmetric(c) for m, c in self.terms.items()})

    # arithmetic

    def _check(self, other: Polynomial):
        if self.ring != other.ring:
            raise RingMismatch(f"ring mismatch: {self.ring} vs {other.ring}")
        if self.variables != other.variables:
            raise RingMismatch(f"variable mismatch: {self.variables} vs {other.variables}")

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, int):
            return Polynomial.constant(self.ring, self.variables, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        mod = self.ring.modulus
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if mod:
                v %= mod
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial._raw(self.ring, self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.modulus
        if mod:
            return Polynomial._raw(self.ring, self.variables, {m: (mod - c) % mod for m, c in self.terms.items()})
        return Polynomial._raw(self.ring, self.variables, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> Polynomial:
        c = self.ring.reduce(c)
        if not c:
            return Polynomial.zero(self.ring, self.variables)
        mod = self.ring.modulus
        if mod:
            return Polynomial._raw(self.ring, self.variables, {m: v * c % mod for m, v in self.terms.items()})
        return Polynomial._raw(self.ring, self.variables, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        mod = self.ring.modulus
        out: dict = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                out[m] = get(m, 0) + ca * cb
        if mod:
            out = {m: c % mod for m, c in out.items() if c % mod}
        else:
            out = {m: c for m, c in out.items() if c}
        return Polynomial._raw(self.ring, self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = Polynomial.one(self.ring, self.variables)
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
            return self.terms == ({(0,) * self.nvars: self.ring.reduce(other)} if self.ring.reduce(other) else {})
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.variables, frozenset(self.terms.items())))
        return self._hash

    # division

    def exact_div(self, q: Polynomial) -> Polynomial:
        """Return self / q, raising NonDivisible unless the division is exact.

        Classical division by the grlex leading term; a monomial order makes
        leading terms multiplicative, so a non-divisible leading term proves a
        nonzero remainder.
        """
        q = self._coerce(q)
        if q.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return self
        ring = self.ring
        mod = ring.modulus
        lm_q = q.leading_monomial()
        lc_q = q.terms[lm_q]
        inv = ring.inv(lc_q) if mod else None
        rem = dict(self.terms)
        quot: dict = {}
        qterms = list(q.terms.items())
        deg_q = sum(lm_q)
        while rem:
            lm = max(rem, key=grlex_key)
            if sum(lm) < deg_q:
                raise NonDivisible("nonzero remainder")
            shift = tuple(x - y for x, y in zip(lm, lm_q))
            if min(shift) < 0:
                raise NonDivisible("leading monomial not divisible")
            c = rem[lm]
            if mod:
                f = c * inv % mod
            else:
                f, r = divmod(c, lc_q)
                if r:
                    raise NonDivisible("coefficient not divisible over ZZ")
            quot[shift] = f
            for m, cq in qterms:
                mm = tuple(x + y for x, y in zip(m, shift))
                v = rem.get(mm, 0) - f * cq
                if mod:
                    v %= mod
                if v:
                    rem[mm] = v
                else:
                    rem.pop(mm, None)
        return Polynomial._raw(ring, self.variables, quot)

    def divides(self, other: Polynomial) -> bool:
        try:
            other.exact_div(self)
        except NonDivisible:
            return False
        return True

    def __truediv__(self, other):
        return self.exact_div(other)

    def gcd(self, other: Polynomial) -> Polynomial:
        from .gcd import poly_gcd

        return poly_gcd(self, other)

    def normalize(self) -> Polynomial:
        """Monic over a field; primitive with positive leading coefficient over ZZ."""
        if self.is_zero():
            return self
        if self.ring.is_field:
            return self.scale(self.ring.inv(self.leading_coefficient()))
        from math import gcd

        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
        if self.leading_coefficient() < 0:
            g = -g
        return Polynomial._raw(self.ring, self.variables, {m: c // g for m, c in self.terms.items()})

    def content(self) -> int:
        from math import gcd

        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
        return g

    def is_associate(self, other: Polynomial) -> bool:
        return self.normalize() == other.normalize()

    # substitution

    def evaluate(self, point: Sequence[int]) -> int:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} entries, expected {self.nvars}")
        mod = self.ring.modulus
        total = 0
        for m, c in self.terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v *= pow(x, e, mod) if mod else x**e
            total += v
        return total % mod if mod else total

    def compose(self, values: Sequence):
        """Substitute arbitrary ring-like objects (polynomials, univariates, ints) for the variables."""
        if len(values) != self.nvars:
            raise ValueError("wrong number of substitution values")
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                cache[key] = values[i] ** e
            return cache[key]

        total = None
        for m, c in self.sorted_terms():
            term = None
            for i, e in enumerate(m):
                if e:
                    f = power(i, e)
                    term = f if term is None else term * f
            c = self.ring.symmetric(c)
            term = c if term is None else term * c
            total = term if total is None else total + term
        if total is None:
            return 0 * values[0] if values else 0
        return total

    def substitute(self, values: Sequence[Polynomial]) -> Polynomial:
        if not values:
            return self
        out = self.compose(values)
        if isinstance(out, int):
            return Polynomial.constant(values[0].ring, values[0].variables, out)
        return out

    def restrict_to_line(self, base: Sequence[int], direction: Sequence[int]):
        """Univariate polynomial in s obtained from variable_i = base_i + s*direction_i."""
        from .univariate import UniPoly

        if len(base) != self.nvars or len(direction) != self.nvars:
            raise ValueError("base/direction length must equal the variable count")
        lines = [UniPoly(self.ring, [b, d]) for b, d in zip(base, direction)]
        out = self.compose(lines)
        if isinstance(out, int):
            return UniPoly(self.ring, [out])
        return out

    def monomial_content(self) -> tuple:
        """Componentwise minimum exponent over all terms (the largest monomial factor)."""
        if not self.terms:
            return (0,) * self.nvars
        it = iter(self.terms)
        lo = list(next(it))
        for m in it:
            for i, e in enumerate(m):
                if e < lo[i]:
                    lo[i] = e
        return tuple(lo)

    def shift_down(self, m: tuple) -> Polynomial:
        return Polynomial._raw(
            self.ring, self.variables, {tuple(a - b for a, b in zip(k, m)): c for k, c in self.terms.items()}
        )

    # printing

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({str(self)!r}, ring={self.ring}, variables={self.variables})"


def format_monomial(m: Iterable[int], variables: Sequence[str]) -> str:
    parts = []
    for v, e in zip(variables, m):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    """Render in the text grammar, grlex-descending, symmetric coefficients over GF(p)."""
    if p.is_zero():
        return "0"
    out = []
    for m, c in p.sorted_terms():
        c = p.ring.symmetric(c)
        mono = format_monomial(m, p.variables)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text
