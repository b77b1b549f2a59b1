"""Periodic monomial cofactors of the iterates.

Each coordinate of a factored iterate carries a monomial in the map variables
next to its product of tracked factors.  Iterates are only defined up to a
common factor, so the meaningful data are the exponents relative to one
reference coordinate (the last one by default).  This module extracts those
sequences, finds their minimal periods, checks shift relations between
variables and compares against tabulated values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import InsufficientDepth
from .tracker import TrackResult

ROLES5 = ("alpha", "beta", "gamma", "delta", "eta")


@dataclass
class PeriodFit:
    period: int
    checked: int  # number of (i, i + period) pairs compared
    confirmed: bool  # at least two full periods were seen

    def to_dict(self) -> dict:
        return {"period": self.period, "checked": self.checked, "confirmed": self.confirmed}


def minimal_period(seq: Sequence[int]) -> PeriodFit | None:
    """Smallest p with seq[i] == seq[i + p] wherever both exist; None if no p < len(seq) works."""
    n = len(seq)
    for p in range(1, n):
        if all(seq[i] == seq[i + p] for i in range(n - p)):
            return PeriodFit(p, n - p, n >= 2 * p)
    return None


def role_names(n: int) -> tuple[str, ...]:
    return ROLES5 if n == len(ROLES5) else tuple(f"c{i}" for i in range(n))


@dataclass
class AdventiveExponentTable:
    variables: tuple[str, ...]
    roles: tuple[str, ...]
    start: int  # iterate index of the first entry
    reference_role: str
    relative: dict  # variable -> role -> exponents minus those of the reference role
    absolute: dict  # variable -> role -> exponents as found in the reduced iterate
    periods: dict  # variable -> role -> PeriodFit | None (relative sequences)
    variable_periods: dict  # variable -> lcm over roles, None when some role has no period yet
    global_period: int | None
    complete: bool  # every period seen at least twice
    shift_checks: list = field(default_factory=list)
    reference_check: dict | None = None

    @property
    def depth(self) -> int:
        v = self.variables[0]
        return len(self.relative[v][self.roles[0]])

    def to_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "roles": list(self.roles),
            "start": self.start,
            "depth": self.depth,
            "reference_role": self.reference_role,
            "relative": self.relative,
            "absolute": self.absolute,
            "periods": {v: {r: (None if p is None else p.to_dict()) for r, p in rp.items()}
                        for v, rp in self.periods.items()},
            "variable_periods": self.variable_periods,
            "global_period": self.global_period,
            "complete": self.complete,
            "shift_checks": self.shift_checks,
            "reference_check": self.reference_check,
        }

    def to_text(self) -> str:
        lines = [f"adventive exponents over k = {self.start}..{self.start + self.depth - 1}"
                 f" (relative to {self.reference_role})"]
        for v in self.variables:
            fits = self.periods[v]
            parts = []
            for r in self.roles:
                p = fits[r]
                parts.append(f"{r}:{'-' if p is None else p.period}{'' if p is None or p.confirmed else '?'}")
            lines.append(f"  {v.upper()}: period {self.variable_periods[v]}  ({', '.join(parts)})")
        lines.append(f"  global period: {self.global_period}"
                     + ("" if self.complete else "  (some periods seen less than twice: tentative)"))
        for s in self.shift_checks:
            lines.append(f"  {s['relation']}: {'holds' if s['holds'] else 'fails'} on {s['checked']} values")
        if self.reference_check is not None:
            rc = self.reference_check
            lines.append(f"  tables: {rc['matched']}/{rc['compared']} entries agree")
        return "\n".join(lines) + "\n"


def _lcm(values):
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def adventive_analysis(
    result: TrackResult,
    start: int = 1,
    reference_role: int = -1,
    shifts: Sequence[tuple[str, str, int]] = (("y", "z", 2), ("u", "x", 4)),
    reference: Mapping | None = None,
) -> AdventiveExponentTable:
    """Exponent sequences, periods, shift relations and an optional comparison with tables.

    ``shifts`` lists (a, b, s) meaning a(k) = b(k + s) for every role.
    ``reference`` holds tables as {"start_index", "tables": {VAR: {role: [...]}}},
    one period each; entries are compared relative to the reference role.
    """
    variables = tuple(result.database.variables)
    iters = [it for it in result.iterates if it.index >= start]
    if len(iters) < 4:
        raise InsufficientDepth(f"only {len(iters)} iterates from k={start}")
    ncoord = len(iters[0].coordinates)
    roles = role_names(ncoord)
    ref_i = reference_role % ncoord
    absolute: dict = {v: {r: [] for r in roles} for v in variables}
    relative: dict = {v: {r: [] for r in roles} for v in variables}
    for it in iters:
        if any(c is None for c in it.coordinates):
            raise InsufficientDepth(f"iterate {it.index} has a vanishing coordinate")
        base = it.coordinates[ref_i].monomial
        for ci, c in enumerate(it.coordinates):
            for vi, v in enumerate(variables):
                absolute[v][roles[ci]].append(c.monomial[vi])
                relative[v][roles[ci]].append(c.monomial[vi] - base[vi])

    periods = {v: {r: minimal_period(relative[v][r]) for r in roles} for v in variables}
    variable_periods = {}
    for v in variables:
        fits = list(periods[v].values())
        variable_periods[v] = None if any(p is None for p in fits) else _lcm(p.period for p in fits)
    known = [p for p in variable_periods.values() if p is not None]
    global_period = _lcm(known) if len(known) == len(variables) else None
    complete = all(p is not None and p.confirmed for fits in periods.values() for p in fits.values())

    shift_checks = []
    for a, b, s in shifts:
        if a not in variables or b not in variables:
            continue
        for label, table in (("relative", relative), ("absolute", absolute)):
            checked = 0
            bad = []
            for r in roles:
                sa, sb = table[a][r], table[b][r]
                for i in range(len(sa)):
                    if 0 <= i + s < len(sb):
                        checked += 1
                        if sa[i] != sb[i + s]:
                            bad.append((r, start + i))
            shift_checks.append({"relation": f"{a.upper()}(k) = {b.upper()}(k{s:+d}) [{label}]",
                                 "holds": not bad and checked > 0, "checked": checked, "mismatches": bad[:10]})

    ref_check = None
    if reference is not None:
        ref_check = compare_tables(relative, roles, roles[ref_i], start, reference)
    return AdventiveExponentTable(variables, roles, start, roles[ref_i], relative, absolute, periods,
                                  variable_periods, global_period, complete, shift_checks, ref_check)


def compare_tables(relative: Mapping, roles, reference_role: str, start: int, reference: Mapping) -> dict:
    """Compare computed relative exponents with one-period tables, extended periodically."""
    t0 = reference.get("start_index", 1)
    compared = matched = 0
    mismatches = []
    per_table = {}
    for var, table in reference["tables"].items():
        v = var.lower()
        if v not in relative or reference_role not in table:
            continue
        base = table[reference_role]
        ok = total = 0
        for r in roles:
            if r not in table:
                continue
            row = table[r]
            for i, got in enumerate(relative[v][r]):
                k = start + i
                want = row[(k - t0) % len(row)] - base[(k - t0) % len(base)]
                total += 1
                if got == want:
                    ok += 1
                else:
                    mismatches.append((var, r, k, got, want))
        per_table[var] = {"compared": total, "matched": ok}
        compared += total
        matched += ok
    return {"compared": compared, "matched": matched, "tables": per_table, "mismatches": mismatches[:20]}
