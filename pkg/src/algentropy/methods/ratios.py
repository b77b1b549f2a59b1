"""Successive degree ratios."""
from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction

SIG_DIGITS = 10


def render_ratio(r: Fraction, digits: int = SIG_DIGITS) -> str:
    """Integers print as ``N.``; anything else with ``digits`` significant digits, zeros kept."""
    if r.denominator == 1:
        return f"{r.numerator}."
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        d = Decimal(r.numerator) / Decimal(r.denominator)
    return f"{d:.{max(digits - d.adjusted() - 1, 0)}f}"


@dataclass(frozen=True)
class RatioRow:
    n: int
    ratio: Fraction

    @property
    def text(self) -> str:
        return render_ratio(self.ratio)


@dataclass
class RatioTable:
    rows: list[RatioRow]

    def __len__(self):
        return len(self.rows)

    def strings(self) -> list[str]:
        return [r.text for r in self.rows]

    def last(self) -> Fraction:
        return self.rows[-1].ratio

    def to_dict(self) -> dict:
        return {"rows": [[r.n, r.text] for r in self.rows]}

    def to_text(self) -> str:
        width = len(str(self.rows[-1].n)) if self.rows else 1
        return "\n".join(f"{r.n:>{width}}  {r.text}" for r in self.rows) + "\n"


def ratio_table(values) -> RatioTable:
    """Row n holds d_n / d_(n-1), for n = 1 .. len-1."""
    values = list(getattr(values, "values", values))
    if len(values) < 2:
        raise ValueError("need at least two terms")
    if any(v <= 0 for v in values):
        raise ValueError("degrees must be positive")
    return RatioTable([RatioRow(n, Fraction(values[n], values[n - 1])) for n in range(1, len(values))])
