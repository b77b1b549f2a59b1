"""Empirical Laurent-property checks for derived recurrences.

The relation is run forward in exact rational arithmetic at an integer
specialization of the map variables.  A step is exact when the new value
comes out an integer.  Nothing here proves anything; the report only says how
far the divisions stayed exact.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .derived import DerivedRecurrence, RelTerm
from .tracker import TrackResult


class Init(Enum):
    ALL_ONES = "AllOnes"
    TRACKED = "TrackedFactors"


SMALL = 10**12  # values up to this size are kept verbatim in the report


@dataclass
class LaurentReport:
    init: str
    order: int
    steps_requested: int
    steps_done: int
    exact: bool  # every completed step divided exactly
    first_failure: int | None  # index of the first non-integral value
    stopped: str  # "done", "non-exact", "zero-divisor", "budget"
    point: dict
    values: list = field(default_factory=list)  # new values, verbatim when small
    digits: list = field(default_factory=list)  # decimal size of each new value
    decorations: str = "relation"  # where decorations came from
    notes: list = field(default_factory=list)
    tracked_agreement: int | None = None  # new values matching tracked factors (TrackedFactors only)

    def __bool__(self):
        return self.exact and self.stopped == "done"

    def to_dict(self) -> dict:
        return {
            "init": self.init, "order": self.order, "steps_requested": self.steps_requested,
            "steps_done": self.steps_done, "exact": self.exact, "first_failure": self.first_failure,
            "stopped": self.stopped, "point": self.point,
            "values": [str(v) for v in self.values], "digits": self.digits,
            "decorations": self.decorations, "notes": self.notes, "tracked_agreement": self.tracked_agreement,
        }

    def to_text(self) -> str:
        lines = [f"Laurent test ({self.init}, order {self.order}): {self.steps_done}/{self.steps_requested} steps,"
                 f" {'all exact' if self.exact else f'first non-integral value at index {self.first_failure}'}"
                 f" [{self.stopped}]"]
        small = [str(v) for v in self.values if abs(v) < SMALL]
        if small:
            lines.append("  first values: " + ", ".join(small[:8]))
        if self.digits:
            lines.append(f"  largest value: {self.digits[-1]} digits")
        lines.append(f"  decorations: {self.decorations}")
        lines.extend("  note: " + n for n in self.notes)
        return "\n".join(lines) + "\n"


def _digits(v) -> int:
    n = abs(v.numerator) if isinstance(v, Fraction) else abs(v)
    return max(1, math.floor(n.bit_length() * math.log10(2)) + 1) if n else 1


def _mono(deco, point) -> int:
    acc = 1
    for v, e in deco:
        acc *= point[v] ** e
    return acc


def random_point(variables: Sequence[str], seed: int = 0, bound: int = 9) -> dict:
    """Nonzero integers in [-bound, bound] for each variable."""
    rng = random.Random(seed)
    return {v: rng.choice([i for i in range(-bound, bound + 1) if i]) for v in variables}


def tracked_initial(result: TrackResult, order: int, point: Mapping[str, int], first: int = 1) -> list:
    """Tracked factors B[first..] evaluated at an integer point.

    Over a prime field the coefficients are lifted to symmetric residues,
    which is exact as long as the true coefficients are small.
    """
    dom = result.iterator.domain
    if not dom.symbolic:
        raise ValueError("tracked initial data needs symbolic (exact-mode) tracking")
    by_birth = {f.birth: f for f in result.iterator.factors if f.parent is None}
    out = []
    for b in range(first, first + order):
        if b not in by_birth:
            raise ValueError(f"no tracked factor born at {b}")
        poly = dom.to_polynomial(by_birth[b].element)
        vals = [point[v] for v in poly.variables]
        out.append(_lift(poly, vals, dom.modulus))
    return out


def _lift(poly, vals, modulus):
    total = 0
    for m, c in poly.sorted_terms():
        if modulus is not None:
            c = c % modulus
            c = c - modulus if c > modulus // 2 else c
        t = c
        for x, e in zip(vals, m):
            if e:
                t *= x**e
        total += t
    return total


def laurent_test(
    rec: DerivedRecurrence,
    init: Init | str = Init.ALL_ONES,
    steps: int = 30,
    point: Mapping[str, int] | None = None,
    seed: int = 0,
    initial: Sequence[int] | None = None,
    decorations: Mapping[int, tuple] | Callable | str | None = None,
    coefficients: Sequence | None = None,
    first_index: int = 1,
    tracked: TrackResult | None = None,
    max_seconds: float | None = None,
    max_digits: int | None = 10**6,
) -> LaurentReport:
    """Run ``rec`` forward from ``order`` initial values and check every division.

    ``decorations`` maps the index of the new value to (product decoration,
    [term decorations]) as recorded by derive_recurrence; without it the
    relation's own decorations are used at every step, or unit ones when
    ``decorations == "unit"``.  ``coefficients`` overrides the term
    coefficients (needed for line-mode relations, whose coefficients are
    generic).  Steps stop early on a non-integral value, a zero divisor,
    ``max_seconds`` or a value longer than ``max_digits``.
    """
    init = Init(init)
    order = rec.order
    table = None
    if isinstance(decorations, Mapping):
        table = {n: (tuple(pd), [_deco_of(item) for item in td]) for n, (pd, td) in decorations.items()}
    variables = {v for t in (rec.product, *rec.terms) for v, _ in t.decoration}
    for pd, tds in (table or {}).values():
        variables.update(v for d in (pd, *tds) for v, _ in d)
    if point is None:
        point = random_point(sorted(variables) or ["x"], seed)
    point = dict(point)
    notes = []

    coefs = list(coefficients) if coefficients is not None else [t.coefficient for t in rec.terms]
    pcoef = rec.product.coefficient if coefficients is None else 1
    if any(c is None for c in coefs) or pcoef is None:
        raise ValueError("relation has generic coefficients; pass explicit ones")

    if initial is not None:
        values = [int(v) for v in initial]
    elif init is Init.ALL_ONES:
        values = [1] * order
    else:
        if tracked is None:
            raise ValueError("TrackedFactors needs the TrackResult")
        values = tracked_initial(tracked, order, point, first_index)
    if len(values) != order:
        raise ValueError(f"need {order} initial values, got {len(values)}")

    if decorations is None:
        deco_src = "relation"
    elif decorations == "unit":
        deco_src = "unit"
    elif table is None:
        deco_src = "callable"
    else:
        deco_src = f"tracked (indices {min(table)}..{max(table)})" if table else "tracked (none)"

    def decos_for(n):
        if decorations is None:
            return rec.product.decoration, [t.decoration for t in rec.terms]
        if decorations == "unit":
            return (), [() for _ in rec.terms]
        if table is None:
            return decorations(n)
        return table.get(n)

    deadline = None if max_seconds is None else time.monotonic() + max_seconds
    report = LaurentReport(init.value, order, steps, 0, True, None, "done", point, decorations=deco_src, notes=notes)
    by_birth = None
    if tracked is not None:
        by_birth = {f.birth: f for f in tracked.iterator.factors if f.parent is None}
        report.tracked_agreement = 0
    for step in range(steps):
        n = first_index + order + step  # index of the value being produced
        d = decos_for(n)
        if d is None:
            report.stopped = "decorations"
            notes.append(f"no decorations recorded for index {n}; stopped after {step} steps")
            break
        pdeco, tdecos = d

        def term_value(t: RelTerm):
            acc = 1
            for o, e in t.factors:
                if o < 0:
                    acc *= values[len(values) + o] ** e
            return acc

        num = Fraction(0)
        for t, c, deco in zip(rec.terms, coefs, tdecos):
            num += Fraction(c) * _mono(deco, point) * term_value(t)
        den = Fraction(pcoef) * _mono(pdeco, point) * term_value(rec.product)
        if den == 0:
            report.stopped = "zero-divisor"
            report.exact = False
            report.first_failure = n
            notes.append(f"divisor vanishes at index {n}")
            break
        q = num / den
        report.steps_done += 1
        if q.denominator != 1:
            report.exact = False
            report.first_failure = n
            report.stopped = "non-exact"
            report.values.append(q)
            report.digits.append(_digits(q))
            break
        v = int(q)
        values.append(v)
        report.values.append(v)
        report.digits.append(_digits(v))
        if by_birth is not None and n in by_birth:
            poly = tracked.iterator.domain.to_polynomial(by_birth[n].element)
            if _lift(poly, [point[x] for x in poly.variables], tracked.iterator.domain.modulus) == v:
                report.tracked_agreement += 1
        if max_digits is not None and report.digits[-1] > max_digits and step + 1 < steps:
            report.stopped = "budget"
            notes.append(f"values reached {report.digits[-1]} digits after {step + 1} steps")
            break
        if deadline is not None and time.monotonic() > deadline and step + 1 < steps:
            report.stopped = "budget"
            notes.append(f"time budget spent after {step + 1} steps")
            break
    return report


def _deco_of(item) -> tuple:
    """A term decoration, from either a bare decoration or a (coefficient, decoration) pair."""
    if len(item) == 2 and isinstance(item[1], tuple) and not isinstance(item[0], str):
        return tuple(item[1])
    return tuple(item)


def with_coefficients(rec: DerivedRecurrence, reference: DerivedRecurrence) -> list:
    """Term coefficients of ``reference`` in the term order of ``rec`` (same factor structure required)."""
    if rec.structure() != reference.structure():
        raise ValueError("relations have different factor structure")
    ref = {t.factors: t.coefficient for t in reference.terms}
    scale = Fraction(reference.product.coefficient)
    return [Fraction(ref[t.factors]) / scale for t in rec.terms]
