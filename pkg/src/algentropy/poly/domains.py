"""Arithmetic backends for iteration.

A domain supplies the starting point (the generic point, or a random line),
ring operations on its elements, exact-division probes, gcd and scalar
handling.  The FLINT domains do the heavy lifting; the pure-Python ones run
the same algorithms through this package's own Polynomial/UniPoly types and
serve as an independent cross-check.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

import flint
from flint.utils.flint_exceptions import DomainError

from ..errors import NonDivisible
from .polynomial import Polynomial
from .ring import MERSENNE61, ZZ, CoefficientRing, GF
from .univariate import UniPoly


class Domain:
    """Interface shared by every backend."""

    name = "abstract"
    symbolic = False  # True when elements are polynomials in all map variables
    modulus: int | None = None

    def gens(self) -> list:
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def degree(self, a) -> int:
        raise NotImplementedError

    def try_div(self, a, b):
        """a / b if exact, else None."""
        raise NotImplementedError

    def gcd(self, a, b):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def lead(self, a):
        """Leading coefficient (a scalar) under a fixed order."""
        raise NotImplementedError

    # scalars

    def scalar(self, n: int):
        raise NotImplementedError

    def scale(self, a, s):
        return a * s

    def monic(self, a):
        lc = self.lead(a)
        return self.scale(a, self.sinv(lc)), lc

    def sinv(self, s):
        return 1 / s

    def smul(self, a, b):
        return a * b

    def scalar_value(self, s):
        """A scalar as a Python number: symmetric residue mod p, or a Fraction over QQ."""
        v = int(s) % self.modulus
        return v - self.modulus if v > self.modulus // 2 else v

    def evaluate(self, poly: Polynomial, values: Sequence):
        """poly(values) with map coefficients brought into the domain."""
        acc = None
        powers: dict = {}
        for m, c in poly.sorted_terms():
            term = self.scalar(poly.ring.symmetric(c))
            t = None
            for i, e in enumerate(m):
                if e:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = values[i] ** e
                    t = powers[key] if t is None else t * powers[key]
            term = self.scale(t, term) if t is not None else self.one() * term
            acc = term if acc is None else acc + term
        return acc if acc is not None else self.one() * self.scalar(0)

    def random_point(self, rng: random.Random) -> tuple:
        """A random evaluation point for elements of this domain."""
        raise NotImplementedError

    def at(self, a, point):
        """Value of element ``a`` at ``point`` (a scalar)."""
        raise NotImplementedError

    def to_polynomial(self, a) -> Polynomial:
        raise TypeError(f"{self.name} elements are not multivariate polynomials")

    def describe(self) -> dict:
        return {"domain": self.name, "prime": self.modulus}


class FlintMPolyDomain(Domain):
    """Multivariate polynomials with coefficients mod p (nmod_mpoly) or in QQ (fmpq_mpoly)."""

    symbolic = True

    def __init__(self, variables: Sequence[str], modulus: int | None = MERSENNE61):
        self.variables = tuple(variables)
        self.modulus = modulus
        if modulus is None:
            self.ctx = flint.fmpq_mpoly_ctx.get(self.variables)
            self.name = "flint-mpoly-QQ"
            self.ring = ZZ
        else:
            self.ctx = flint.nmod_mpoly_ctx.get(self.variables, modulus=modulus)
            self.name = "flint-mpoly-GF"
            self.ring = GF(modulus)

    def gens(self):
        return list(self.ctx.gens())

    def one(self):
        return self.ctx.from_dict({(0,) * len(self.variables): 1})

    def degree(self, a):
        return -1 if a.is_zero() else a.total_degree()

    def try_div(self, a, b):
        try:
            return a / b
        except (DomainError, ZeroDivisionError):
            return None

    def gcd(self, a, b):
        return a.gcd(b)

    def lead(self, a):
        return a.leading_coefficient()

    def scalar(self, n):
        if self.modulus is None:
            return flint.fmpq(n) if not isinstance(n, Fraction) else flint.fmpq(n.numerator, n.denominator)
        return flint.nmod(n, self.modulus)

    def sinv(self, s):
        return self.scalar(1) / s

    def scalar_value(self, s):
        if self.modulus is None:
            q = flint.fmpq(s)
            return Fraction(int(q.p), int(q.q))
        return super().scalar_value(s)

    def to_polynomial(self, a) -> Polynomial:
        terms = {}
        for m, c in a.to_dict().items():
            if self.modulus is None:
                c = flint.fmpq(c)
                if c.q != 1:
                    raise NonDivisible("non-integral coefficient in QQ element")
                terms[tuple(m)] = int(c.p)
            else:
                terms[tuple(m)] = int(c)
        return Polynomial(self.ring, self.variables, terms)

    def from_polynomial(self, p: Polynomial):
        return self.evaluate(p, self.gens())

    def random_point(self, rng):
        if self.modulus is None:
            return tuple(flint.fmpq(rng.randrange(-10**6, 10**6)) for _ in self.variables)
        return tuple(flint.nmod(rng.randrange(self.modulus), self.modulus) for _ in self.variables)

    def at(self, a, point):
        return a(*point)


class FlintLineDomain(Domain):
    """Univariate polynomials in s over GF(p): variable_i = base_i + s*direction_i."""

    def __init__(self, nvars: int, modulus: int = MERSENNE61, seed: int = 0,
                 base: Sequence[int] | None = None, direction: Sequence[int] | None = None):
        self.modulus = modulus
        self.seed = seed
        rng = random.Random(seed)
        self.base = list(base) if base is not None else [rng.randrange(modulus) for _ in range(nvars)]
        self.direction = list(direction) if direction is not None else [rng.randrange(1, modulus) for _ in range(nvars)]
        self.name = "flint-line"

    def gens(self):
        return [flint.nmod_poly([b, d], self.modulus) for b, d in zip(self.base, self.direction)]

    def one(self):
        return flint.nmod_poly([1], self.modulus)

    def degree(self, a):
        return a.degree()

    def try_div(self, a, b):
        q, r = divmod(a, b)
        return q if r.is_zero() else None

    def gcd(self, a, b):
        return a.gcd(b)

    def lead(self, a):
        return a.coeffs()[-1] if not a.is_zero() else flint.nmod(0, self.modulus)

    def scalar(self, n):
        return flint.nmod(n, self.modulus)

    def sinv(self, s):
        return flint.nmod(1, self.modulus) / s

    def random_point(self, rng):
        return (flint.nmod(rng.randrange(self.modulus), self.modulus),)

    def at(self, a, point):
        return a(point[0])

    def describe(self):
        return {"domain": self.name, "prime": self.modulus, "seed": self.seed}


class PyMPolyDomain(Domain):
    """Pure-Python multivariate backend over GF(p)."""

    symbolic = True

    def __init__(self, variables: Sequence[str], ring: CoefficientRing | None = None):
        self.variables = tuple(variables)
        self.ring = ring if ring is not None else GF()
        if not self.ring.is_field:
            raise ValueError("the pure-Python symbolic domain needs a prime field")
        self.modulus = self.ring.modulus
        self.name = "python-mpoly"

    def gens(self):
        return Polynomial.gens(self.ring, self.variables)

    def one(self):
        return Polynomial.one(self.ring, self.variables)

    def degree(self, a):
        return a.total_degree()

    def try_div(self, a, b):
        try:
            return a.exact_div(b)
        except NonDivisible:
            return None

    def gcd(self, a, b):
        return a.gcd(b)

    def lead(self, a):
        return a.leading_coefficient()

    def scalar(self, n):
        return n % self.modulus

    def scale(self, a, s):
        return a.scale(s)

    def sinv(self, s):
        return pow(s, -1, self.modulus)

    def smul(self, a, b):
        return a * b % self.modulus

    def to_polynomial(self, a):
        return a

    def from_polynomial(self, p):
        return p.with_ring(self.ring)

    def random_point(self, rng):
        return tuple(rng.randrange(self.modulus) for _ in self.variables)

    def at(self, a, point):
        return a.evaluate(list(point)) % self.modulus


class PyLineDomain(Domain):
    """Pure-Python univariate line backend over GF(p)."""

    def __init__(self, nvars: int, modulus: int = MERSENNE61, seed: int = 0,
                 base: Sequence[int] | None = None, direction: Sequence[int] | None = None):
        self.ring = GF(modulus)
        self.modulus = modulus
        self.seed = seed
        rng = random.Random(seed)
        self.base = list(base) if base is not None else [rng.randrange(modulus) for _ in range(nvars)]
        self.direction = list(direction) if direction is not None else [rng.randrange(1, modulus) for _ in range(nvars)]
        self.name = "python-line"

    def gens(self):
        return [UniPoly(self.ring, [b, d]) for b, d in zip(self.base, self.direction)]

    def one(self):
        return UniPoly(self.ring, [1])

    def degree(self, a):
        return a.degree()

    def try_div(self, a, b):
        q, r = a.divmod(b)
        return q if r.is_zero() else None

    def gcd(self, a, b):
        return a.gcd(b)

    def lead(self, a):
        return a.leading_coefficient()

    def scalar(self, n):
        return n % self.modulus

    def sinv(self, s):
        return pow(s, -1, self.modulus)

    def smul(self, a, b):
        return a * b % self.modulus

    def random_point(self, rng):
        return (rng.randrange(self.modulus),)

    def at(self, a, point):
        return a.evaluate(point[0])

    def describe(self):
        return {"domain": self.name, "prime": self.modulus, "seed": self.seed}


def make_domain(kind: str, variables: Sequence[str], prime: int | None = MERSENNE61, seed: int = 0,
                backend: str = "flint") -> Domain:
    """kind: 'exact' (symbolic variables) or 'line'; prime None means characteristic zero."""
    if kind == "exact":
        if backend == "flint":
            return FlintMPolyDomain(variables, prime)
        if prime is None:
            raise ValueError("the pure-Python symbolic backend needs a prime")
        return PyMPolyDomain(variables, GF(prime))
    if kind == "line":
        if prime is None:
            raise ValueError("line mode needs a prime")
        if backend == "flint":
            return FlintLineDomain(len(variables), prime, seed)
        return PyLineDomain(len(variables), prime, seed)
    raise ValueError(f"unknown domain kind {kind!r}")
