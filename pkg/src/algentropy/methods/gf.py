"""Rational generating functions of integer sequences."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from ..errors import NonDivisible
from ..poly import ZZ, UniPoly
from .recurrence import LinearRecurrence

MAX_CYCLOTOMIC = 64


def _poly(coeffs) -> UniPoly:
    return coeffs if isinstance(coeffs, UniPoly) else UniPoly(ZZ, [int(c) for c in coeffs])


@dataclass(frozen=True)
class RationalGF:
    """numerator(s) / denominator(s), integer coefficients, lowest degree first."""

    numerator: tuple[int, ...]
    denominator: tuple[int, ...]

    def __post_init__(self):
        if not self.denominator or self.denominator[0] == 0:
            raise ValueError("denominator must not vanish at s = 0")

    @classmethod
    def from_polys(cls, num, den) -> RationalGF:
        num, den = _poly(num), _poly(den)
        return cls(tuple(num.coeffs), tuple(den.coeffs))

    @property
    def num(self) -> UniPoly:
        return _poly(self.numerator)

    @property
    def den(self) -> UniPoly:
        return _poly(self.denominator)

    def normalized(self) -> RationalGF:
        """Cancel the common gcd and integer content; denominator(0) > 0."""
        num, den = self.num, self.den
        g = num.gcd(den)
        if g.degree() > 0:
            num, den = num.exact_div(g), den.exact_div(g)
        c = num.content()
        c = gcd(c, den.content()) or 1
        if den[0] < 0:
            c = -c
        return RationalGF(tuple(v // c for v in num.coeffs), tuple(v // c for v in den.coeffs))

    def to_dict(self) -> dict:
        return {"numerator": list(self.numerator), "denominator": list(self.denominator)}

    @classmethod
    def from_dict(cls, d: dict) -> RationalGF:
        if "denominator" in d:
            den = _poly(d["denominator"])
        else:
            den = UniPoly(ZZ, [1])
            for f in d["denominator_factors"]:
                den = den * _poly(f)
        return cls.from_polys(d["numerator"], den)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def __str__(self):
        return f"({self.num.to_text()}) / ({self.den.to_text()})"


def gf_from_recurrence(values, rec: LinearRecurrence) -> RationalGF:
    """Denominator 1 - c_1 s - ... - c_L s^L (cleared of fractions); numerator from the initial terms."""
    values = [int(v) for v in getattr(values, "values", values)]
    scale = rec.denominator
    den = [scale] + [-int(c * scale) for c in rec.coefficients]
    # (sum d_k s^k) * den is a polynomial of degree < start
    num = []
    for n in range(rec.start):
        num.append(sum(den[i] * values[n - i] for i in range(min(n, len(den) - 1) + 1)))
    return RationalGF.from_polys(num, den).normalized()


def expand_gf(gf: RationalGF, n: int) -> list:
    """Taylor coefficients 0..n; integers whenever they are integral."""
    den = gf.denominator
    num = gf.numerator
    d0 = den[0]
    out: list = []
    for k in range(n + 1):
        acc = num[k] if k < len(num) else 0
        for i in range(1, min(k, len(den) - 1) + 1):
            acc -= den[i] * out[k - i]
        if d0 in (1, -1):
            v = acc * d0
        else:
            v = Fraction(acc, d0)
            if v.denominator == 1:
                v = v.numerator
        out.append(v)
    return out


@lru_cache(maxsize=None)
def cyclotomic(k: int) -> UniPoly:
    """Phi_k by dividing s^k - 1 by the Phi_d of the proper divisors d of k."""
    p = UniPoly.from_roots_of_unity_factor(k)
    for d in range(1, k):
        if k % d == 0:
            p = p.exact_div(cyclotomic(d))
    return p


@dataclass(frozen=True)
class CyclotomicSplit:
    core: UniPoly
    removed: tuple[int, ...]  # k of each removed Phi_k, with multiplicity
    unit: int  # +1 or -1 so that poly = unit * core * prod Phi_k

    def removed_product(self) -> UniPoly:
        p = UniPoly(ZZ, [1])
        for k in self.removed:
            p = p * cyclotomic(k)
        return p


def strip_cyclotomic(poly, max_k: int = MAX_CYCLOTOMIC) -> CyclotomicSplit:
    """Divide out every Phi_k (k <= max_k) as often as it goes."""
    p = _poly(poly)
    if p.is_zero():
        raise ValueError("zero polynomial")
    removed = []
    for k in range(1, max_k + 1):
        phi = cyclotomic(k)
        if phi.degree() > p.degree():
            continue
        while p.degree() >= phi.degree():
            try:
                p = p.exact_div(phi)
            except NonDivisible:
                break
            removed.append(k)
    unit = 1
    if p.leading_coefficient() < 0:
        p, unit = -p, -1
    return CyclotomicSplit(p, tuple(removed), unit)



@dataclass
class ExpansionReport:
    expanded: list
    reference: list
    discrepancies: list  # (index, expanded, reference)

    @property
    def agreed(self) -> int:
        """Length of the common prefix."""
        first = self.discrepancies[0][0] if self.discrepancies else min(len(self.expanded), len(self.reference))
        return first

    def to_dict(self) -> dict:
        return {"expanded": [str(v) for v in self.expanded], "compared": min(len(self.expanded), len(self.reference)),
                "agreed_prefix": self.agreed,
                "discrepancies": [{"index": i, "expanded": str(a), "reference": str(b)} for i, a, b in self.discrepancies]}

    def to_text(self) -> str:
        n = min(len(self.expanded), len(self.reference))
        lines = [f"compared {n} terms; first {self.agreed} agree"]
        for i, a, b in self.discrepancies:
            lines.append(f"  DISCREPANCY at index {i}: expansion {a}, reference {b}")
        return "\n".join(lines) + "\n"


def compare_expansion(gf: RationalGF, reference, n: int | None = None) -> ExpansionReport:
    """Expand ``gf`` through index n (default: the reference length) and flag every differing term."""
    reference = [int(v) for v in getattr(reference, "values", reference)]
    if n is None:
        n = len(reference) - 1
    got = expand_gf(gf, n)
    bad = [(i, a, b) for i, (a, b) in enumerate(zip(got, reference)) if a != b]
    return ExpansionReport(got, reference[: n + 1], bad)
