"""Dominant real roots of integer polynomials.

Two independent routes: exact Sturm counting plus bisection on rationals, and
the eigenvalues of the companion matrix (numpy).  Each result records the
value from the other route.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import NoRootInRange
from ..poly import ZZ, UniPoly
from .ratios import render_ratio

WIDTH = Fraction(1, 2**40)  # well inside the 1e-9 contract
AGREEMENT = 1e-9


class Which(enum.Enum):
    LARGEST_REAL = "LargestRealRoot"
    SMALLEST_MODULUS_RECIPROCAL = "SmallestModulusRootReciprocal"


def as_poly(p) -> UniPoly:
    if isinstance(p, UniPoly):
        return p
    return UniPoly(ZZ, [int(c) for c in p])


def squarefree(p: UniPoly) -> UniPoly:
    g = p.gcd(p.derivative())
    return p.exact_div(g).primitive() if g.degree() > 0 else p.primitive()


def _rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    r = list(a)
    db = len(b) - 1
    while len(r) - 1 >= db and r:
        f = r[-1] / b[-1]
        shift = len(r) - 1 - db
        for j in range(db + 1):
            r[shift + j] -= f * b[j]
        r.pop()
        while r and r[-1] == 0:
            r.pop()
    return r


def _clear(r: list[Fraction]) -> list[int]:
    """Positive multiple with coprime integer coefficients (sign preserved)."""
    den = math.lcm(*(c.denominator for c in r))
    ints = [int(c * den) for c in r]
    g = math.gcd(*ints)
    return [v // g for v in ints]


def sturm_sequence(p: UniPoly) -> list[list[int]]:
    seq = [list(p.coeffs), list(p.derivative().coeffs)]
    while len(seq[-1]) > 1:
        r = _rem([Fraction(c) for c in seq[-2]], [Fraction(c) for c in seq[-1]])
        if not r:
            break
        seq.append([-v for v in _clear(r)])
    return seq


def _eval(coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _variations(seq, x: Fraction) -> int:
    signs = [v for v in (_eval(c, x) for c in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(seq, lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots in (lo, hi]."""
    return _variations(seq, lo) - _variations(seq, hi)


def root_bound(p: UniPoly) -> Fraction:
    lc = abs(p.leading_coefficient())
    return 1 + Fraction(max(abs(c) for c in p.coeffs[:-1]), lc) if p.degree() > 0 else Fraction(1)


def largest_real_root_interval(p, lower: Fraction = Fraction(1), width: Fraction = WIDTH) -> tuple[Fraction, Fraction]:
    """Isolating interval [lo, hi] of the largest real root >= lower, hi - lo <= width."""
    p = squarefree(as_poly(p))
    if p.degree() < 1:
        raise NoRootInRange("constant polynomial has no roots")
    seq = sturm_sequence(p)
    hi = max(root_bound(p), lower)
    lo = Fraction(lower)
    n = count_roots(seq, lo, hi)
    if n == 0:
        if _eval(p.coeffs, lo) == 0:
            return lo, lo
        raise NoRootInRange(f"no real root in [{lower}, {float(hi):.6g}]")
    # narrow until exactly one root remains in (lo, hi]
    while n > 1:
        mid = (lo + hi) / 2
        upper = count_roots(seq, mid, hi)
        if upper:
            lo, n = mid, upper
        else:
            hi = mid
    # sign-change bisection on the squarefree polynomial
    f_hi = _eval(p.coeffs, hi)
    if f_hi == 0:
        return hi, hi
    while hi - lo > width:
        mid = (lo + hi) / 2
        f_mid = _eval(p.coeffs, mid)
        if f_mid == 0:
            return mid, mid
        if (f_mid > 0) == (f_hi > 0):
            hi, f_hi = mid, f_mid
        else:
            lo = mid
    return lo, hi


def companion_roots(p) -> np.ndarray:
    p = as_poly(p)
    return np.roots([float(c) for c in reversed(p.coeffs)])


@dataclass
class AlgebraicGrowthRate:
    polynomial: UniPoly
    interval: tuple[Fraction, Fraction] | None
    value: float
    which: Which
    cross_check: float | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def decimal(self) -> str:
        if self.interval is not None:
            return render_ratio((self.interval[0] + self.interval[1]) / 2)
        return f"{self.value:.10g}"

    @property
    def entropy(self) -> float:
        return math.log(self.value) if self.value > 0 else float("-inf")

    @property
    def agrees(self) -> bool:
        return self.cross_check is None or abs(self.cross_check - self.value) <= AGREEMENT

    def to_dict(self) -> dict:
        return {
            "polynomial": list(self.polynomial.coeffs),
            "which": self.which.value,
            "interval": None if self.interval is None else [str(self.interval[0]), str(self.interval[1])],
            "decimal": self.decimal,
            "entropy": self.entropy,
            "cross_check": self.cross_check,
        }


def _largest_real_numeric(p) -> float | None:
    roots = companion_roots(p)
    real = [r.real for r in roots if abs(r.imag) <= 1e-9 * max(1.0, abs(r))]
    return max(real) if real else None


def dominant_root(poly, which: Which | str = Which.LARGEST_REAL) -> AlgebraicGrowthRate:
    """Growth rate encoded by ``poly``.

    LargestRealRoot: the largest real root >= 1 by Sturm bisection.
    SmallestModulusRootReciprocal: 1/|z| for the root z of least modulus, from
    the companion matrix, checked against the reversed polynomial's largest
    real root when z is real.
    """
    which = Which(which)
    p = as_poly(poly)
    if p.degree() < 1:
        raise ValueError("polynomial must be nonconstant")
    if which is Which.LARGEST_REAL:
        lo, hi = largest_real_root_interval(p)
        value = float((lo + hi) / 2)
        return AlgebraicGrowthRate(p, (lo, hi), value, which, _largest_real_numeric(p))
    # strip zero roots: p = s^m * q
    m = next(i for i, c in enumerate(p.coeffs) if c)
    q = UniPoly(ZZ, p.coeffs[m:])
    if q.degree() < 1:
        raise NoRootInRange("no nonzero roots")
    roots = companion_roots(q)
    z = min(roots, key=abs)
    value = 1.0 / abs(z)
    rate = AlgebraicGrowthRate(p, None, value, which)
    if abs(z.imag) <= 1e-9 * abs(z):
        rev = q.reverse()
        if z.real < 0:
            rev = UniPoly(ZZ, [c if i % 2 == 0 else -c for i, c in enumerate(rev.coeffs)])
        lower = Fraction(min(1.0, value) * 0.5)
        try:
            lo, hi = largest_real_root_interval(rev, lower=lower)
        except NoRootInRange:
            rate.diagnostics["exact_check"] = "reversed polynomial has no real root in range"
        else:
            exact = (lo + hi) / 2
            rate.interval = (lo, hi)
            rate.cross_check = value
            rate.value = float(exact)
            rate.diagnostics["reversed"] = list(rev.coeffs)
    else:
        rate.diagnostics["complex_dominant"] = [z.real, z.imag]
    return rate
