"""Minimal linear recurrences with constant coefficients, fitted exactly and checked on held-out terms."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from ..errors import InsufficientData

DEFAULT_HOLDOUT = 8
SHORT_HOLDOUT = 4


@dataclass(frozen=True)
class LinearRecurrence:
    """d_n = c_1 d_(n-1) + ... + c_L d_(n-L) for every n >= start."""

    coefficients: tuple[Fraction, ...]
    start: int
    window: int  # number of leading terms used for the fit
    holdout: int

    @property
    def order(self) -> int:
        return len(self.coefficients)

    @property
    def denominator(self) -> int:
        """Common denominator of the coefficients (1 when they are integers)."""
        return lcm(*(c.denominator for c in self.coefficients)) if self.coefficients else 1

    @property
    def is_integral(self) -> bool:
        return self.denominator == 1

    def predict(self, values, n: int) -> Fraction:
        return sum(c * values[n - i - 1] for i, c in enumerate(self.coefficients))

    def holds_on(self, values) -> bool:
        return all(self.predict(values, n) == values[n] for n in range(self.start, len(values)))

    def extend(self, values, count: int) -> list:
        out = list(values)
        for _ in range(count):
            v = self.predict(out, len(out))
            out.append(int(v) if v.denominator == 1 else v)
        return out

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "coefficients": [str(c) for c in self.coefficients],
            "denominator": self.denominator,
            "start": self.start,
            "window": self.window,
            "holdout": self.holdout,
        }

    @classmethod
    def from_dict(cls, d: dict) -> LinearRecurrence:
        return cls(tuple(Fraction(c) for c in d["coefficients"]), d.get("start", len(d["coefficients"])),
                   d.get("window", 0), d.get("holdout", 0))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def __str__(self):
        text = ""
        for i, c in enumerate(self.coefficients, 1):
            if not c:
                continue
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            if not text:
                text = ("-" if c < 0 else "") + f"{mag}d[n-{i}]"
            else:
                text += (" - " if c < 0 else " + ") + f"{mag}d[n-{i}]"
        return "d[n] = " + (text or "0")


@dataclass(frozen=True)
class NoFit:
    """No order up to ``max_order`` fits the window and predicts the held-out terms."""

    max_order: int
    window: int
    holdout: int
    tried: tuple = ()  # (order, reason) pairs

    def to_dict(self) -> dict:
        return {"result": "NoFit", "max_order": self.max_order, "window": self.window, "holdout": self.holdout}

    def __bool__(self):
        return False


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]):
    """Unique solution of an overdetermined system, or None if inconsistent or underdetermined."""
    n = len(rows[0])
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_row = 0
    for col in range(n):
        p = next((r for r in range(piv_row, len(m)) if m[r][col] != 0), None)
        if p is None:
            return None
        m[piv_row], m[p] = m[p], m[piv_row]
        inv = 1 / m[piv_row][col]
        m[piv_row] = [v * inv for v in m[piv_row]]
        for r in range(len(m)):
            if r != piv_row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[piv_row])]
        piv_row += 1
    if any(row[n] != 0 for row in m[piv_row:]):
        return None
    return [m[i][n] for i in range(n)]


def default_holdout(length: int) -> int:
    return DEFAULT_HOLDOUT if length >= 3 * DEFAULT_HOLDOUT else SHORT_HOLDOUT


def fit_linear_recurrence(values, holdout: int | None = None, max_order: int | None = None):
    """Smallest order whose exact fit on the leading terms also predicts the last ``holdout`` terms.

    Returns a LinearRecurrence, or NoFit.  The fit for order L uses every
    equation d_n = sum c_i d_(n-i) with L <= n < window, so the window must
    hold at least 2L terms.
    """
    values = [Fraction(v) for v in getattr(values, "values", values)]
    if holdout is None:
        holdout = default_holdout(len(values))
    if holdout < SHORT_HOLDOUT:
        raise ValueError(f"holdout must be at least {SHORT_HOLDOUT}")
    window = len(values) - holdout
    limit = window // 2
    if max_order is not None:
        limit = min(limit, max_order)
    if limit < 1:
        raise InsufficientData(f"{len(values)} terms with holdout {holdout} leave no room for any order")
    tried = []
    for order in range(1, limit + 1):
        rows = [[values[n - i] for i in range(1, order + 1)] for n in range(order, window)]
        rhs = [values[n] for n in range(order, window)]
        sol = _solve_exact(rows, rhs)
        if sol is None:
            tried.append((order, "window"))
            continue
        rec = LinearRecurrence(tuple(sol), order, window, holdout)
        if rec.holds_on(values):
            return rec
        tried.append((order, "holdout"))
    return NoFit(limit, window, holdout, tuple(tried))
