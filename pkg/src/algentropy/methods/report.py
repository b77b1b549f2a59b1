"""Combine the available estimates into one entropy report."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..errors import InsufficientData, NoRootInRange
from ..poly import UniPoly
from .gf import gf_from_recurrence, strip_cyclotomic
from .ratios import ratio_table
from .recurrence import LinearRecurrence, NoFit, fit_linear_recurrence
from .roots import AlgebraicGrowthRate, Which, dominant_root

CONSISTENCY = 1e-4
ZERO_MARGIN = 1e-9

METHOD0 = "Method0"
METHOD1 = "Method1"
METHOD2 = "Method2"


@dataclass
class EntropyEstimate:
    method: str
    value: float | None  # None when the method produced no estimate
    growth: AlgebraicGrowthRate | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "value": self.value,
            "growth": None if self.growth is None else self.growth.to_dict(),
            "diagnostics": self.diagnostics,
        }


@dataclass
class EntropyReport:
    estimates: list[EntropyEstimate]
    consistent: bool
    spread: float

    def by_method(self, method: str) -> EntropyEstimate | None:
        return next((e for e in self.estimates if e.method == method), None)

    def to_dict(self) -> dict:
        return {"estimates": [e.to_dict() for e in self.estimates], "consistent": self.consistent,
                "spread": self.spread}

    def to_text(self) -> str:
        lines = []
        for e in self.estimates:
            if e.value is None:
                lines.append(f"{e.method}: no estimate ({e.diagnostics.get('outcome', 'n/a')})")
                continue
            rate = f"  growth {e.growth.decimal}" if e.growth is not None else ""
            lines.append(f"{e.method}: entropy {e.value:.10f}{rate}")
            core = e.diagnostics.get("minimal_polynomial") or e.diagnostics.get("core")
            if core:
                lines.append(f"  polynomial {core}")
        verdict = "consistent" if self.consistent else "DISAGREE"
        lines.append(f"verdict: {verdict} (spread {self.spread:.2e})")
        return "\n".join(lines) + "\n"


def _divisors(n: int) -> set[int]:
    n = abs(n)
    out = set()
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.update((i, n // i))
        i += 1
    return out


def _has_rational_root(p: UniPoly, limit: int = 10**12) -> bool | None:
    """Rational root test; None when the end coefficients are too large to enumerate divisors."""
    if p.coeffs[0] == 0:
        return True
    a0, an = p.coeffs[0], p.leading_coefficient()
    if abs(a0) > limit or abs(an) > limit:
        return None
    deg = p.degree()
    for num in _divisors(a0):
        for den in _divisors(an):
            for x in (num, -num):
                if sum(c * x**i * den ** (deg - i) for i, c in enumerate(p.coeffs)) == 0:
                    return True
    return False


def minimal_polynomial_claim(core: UniPoly) -> tuple[UniPoly, bool]:
    """(core, irreducible_claimed).

    The claim rests on trivial tests only: no rational root, and for a
    quartic no split into two integer quadratics.
    """
    if core.degree() <= 1:
        return core, True
    if _has_rational_root(core) is not False:
        return core, False
    if core.degree() == 4:
        return core, _no_quadratic_split(core)
    return core, True


def _no_quadratic_split(p: UniPoly) -> bool:
    """Monic integer quartic: no factorization into two integer quadratics."""
    if abs(p.leading_coefficient()) != 1:
        return False
    if p.leading_coefficient() < 0:
        p = -p
    a0, a1, a2, a3 = p.coeffs[:4]
    for b in range(-abs(a0), abs(a0) + 1):
        if b == 0 or a0 % b:
            continue
        d = a0 // b
        # (x^2 + a x + b)(x^2 + c x + d): a + c = a3, ac + b + d = a2, ad + bc = a1
        for a in range(-abs(a3) - abs(a2) - abs(a1) - 4, abs(a3) + abs(a2) + abs(a1) + 5):
            c = a3 - a
            if a * c + b + d == a2 and a * d + b * c == a1:
                return False
    return True


def method0(values) -> EntropyEstimate:
    table = ratio_table(values)
    last = table.last()
    return EntropyEstimate(METHOD0, math.log(last), None, {"last_ratio": table.rows[-1].text, "n": table.rows[-1].n})


def method1(values, fit: LinearRecurrence | NoFit | None = None, holdout: int | None = None) -> EntropyEstimate:
    if fit is None:
        try:
            fit = fit_linear_recurrence(values, holdout)
        except InsufficientData as exc:
            return EntropyEstimate(METHOD1, None, None, {"outcome": "InsufficientData", "detail": str(exc)})
    if isinstance(fit, NoFit):
        return EntropyEstimate(METHOD1, None, None, {"outcome": "NoFit", **fit.to_dict()})
    gf = gf_from_recurrence(values, fit)
    split = strip_cyclotomic(gf.den)
    diag = {"outcome": "fit", "recurrence": str(fit), "order": fit.order, "generating_function": str(gf),
            "cyclotomic": list(split.removed), "core": split.core.to_text()}
    if split.core.degree() < 1:
        diag["zero_rule"] = "denominator is a product of cyclotomic factors"
        return EntropyEstimate(METHOD1, 0.0, None, diag)
    rate = dominant_root(split.core, Which.SMALLEST_MODULUS_RECIPROCAL)
    core, claimed = minimal_polynomial_claim(split.core)
    if claimed:
        diag["minimal_polynomial"] = core.to_text()
    if rate.value <= 1 + ZERO_MARGIN:
        diag["zero_rule"] = "no pole inside the unit disc"
        return EntropyEstimate(METHOD1, 0.0, rate, diag)
    return EntropyEstimate(METHOD1, rate.entropy, rate, diag)


def method2(char_poly) -> EntropyEstimate:
    try:
        rate = dominant_root(char_poly, Which.LARGEST_REAL)
    except NoRootInRange:
        return EntropyEstimate(METHOD2, 0.0, None, {"zero_rule": "no real root above 1"})
    diag = {"characteristic_polynomial": rate.polynomial.to_text("r")}
    if rate.value <= 1 + ZERO_MARGIN:
        diag["zero_rule"] = "no real root above 1"
        return EntropyEstimate(METHOD2, 0.0, rate, diag)
    return EntropyEstimate(METHOD2, rate.entropy, rate, diag)


def entropy_report(values, fit=None, char_poly=None, holdout: int | None = None) -> EntropyReport:
    """Method 0 always, Method 1 unless the data are too short, Method 2 when a characteristic polynomial is given."""
    values = list(getattr(values, "values", values))
    if len(values) < 3:
        raise ValueError("need at least three terms")
    estimates = [method0(values), method1(values, fit, holdout)]
    if char_poly is not None:
        estimates.append(method2(char_poly))
    numbers = [e.value for e in estimates if e.value is not None]
    spread = max(numbers) - min(numbers) if numbers else 0.0
    return EntropyReport(estimates, spread < CONSISTENCY, spread)
