"""Factor bookkeeping for the iterates of a map.

Wraps the factored iterator and exposes the family of tracked factors and
the exponent vector of every coordinate of every iterate.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from ..errors import BudgetExceeded
from ..maps.factored import FactoredIterator
from ..maps.projective import ProjectiveMap
from ..poly import MERSENNE61, format_polynomial
from ..poly.domains import make_domain


@dataclass
class TrackedFactor:
    label: str
    birth: int
    family: int  # which atom of the map produced it
    degree: int
    alive: bool
    parent: str | None
    text: str | None  # polynomial in the text grammar (symbolic domains only)

    def to_dict(self) -> dict:
        return {"label": self.label, "birth": self.birth, "family": self.family, "degree": self.degree,
                "alive": self.alive, "parent": self.parent, "polynomial": self.text}


@dataclass
class FactorDatabase:
    variables: tuple[str, ...]
    factors: list[TrackedFactor]
    mode: str
    prime: int | None

    def by_label(self, label: str) -> TrackedFactor:
        return next(f for f in self.factors if f.label == label)

    def to_dict(self) -> dict:
        return {"variables": list(self.variables), "mode": self.mode, "prime": self.prime,
                "factors": [f.to_dict() for f in self.factors]}


@dataclass
class FactoredCoordinate:
    scalar: object  # int, or Fraction over the rationals
    monomial: tuple[int, ...]  # exponents of the coordinate variables
    factors: dict  # factor index in the database -> exponent

    def degree(self, db: FactorDatabase) -> int:
        return sum(self.monomial) + sum(db.factors[j].degree * e for j, e in self.factors.items())


@dataclass
class FactoredIterate:
    index: int
    coordinates: list  # FactoredCoordinate, or None for a vanishing coordinate
    degree: int
    residual: int = 1  # the factored form is complete by construction

    def render(self, db: FactorDatabase, family_name: str = "B") -> str:
        parts = []
        for c in self.coordinates:
            if c is None:
                parts.append("0")
                continue
            items = []
            for v, e in zip(db.variables, c.monomial):
                if e:
                    items.append(v if e == 1 else f"{v}^{e}")
            for j in sorted(c.factors, key=lambda j: (db.factors[j].birth, j)):
                e = c.factors[j]
                name = db.factors[j].label.replace("B", family_name, 1)
                items.append(name if e == 1 else f"{name}^{e}")
            parts.append("*".join(items) or "1")
        return f"p[{self.index}] = [" + ", ".join(parts) + "]"


@dataclass
class TrackResult:
    database: FactorDatabase
    iterates: list[FactoredIterate]
    iterator: FactoredIterator
    events: list = field(default_factory=list)
    complete: bool = True

    @property
    def degrees(self) -> list[int]:
        return [it.degree for it in self.iterates]

    def to_dict(self) -> dict:
        db = self.database
        return {
            "database": db.to_dict(),
            "iterates": [
                {"index": it.index, "degree": it.degree,
                 "coordinates": [None if c is None else {
                     "monomial": list(c.monomial),
                     "factors": {db.factors[j].label: e for j, e in sorted(c.factors.items())}}
                     for c in it.coordinates]}
                for it in self.iterates
            ],
            "events": [{"k": e.k, "kind": e.kind, "detail": e.detail} for e in self.events],
            "complete": self.complete,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    def report(self, family_name: str = "B") -> str:
        return "\n".join(it.render(self.database, family_name) for it in self.iterates) + "\n"


def _database(it: FactoredIterator, mode: str, prime) -> FactorDatabase:
    dom = it.domain
    out = []
    for f in it.factors:
        text = None
        if dom.symbolic:
            text = format_polynomial(dom.to_polynomial(f.element))
        parent = it.factors[f.parent].label if f.parent is not None else None
        out.append(TrackedFactor(f.label, f.birth, f.slot, f.degree, f.alive, parent, text))
    return FactorDatabase(tuple(it.map.variables), out, mode, prime)


def _iterates(it: FactoredIterator) -> list[FactoredIterate]:
    dom = it.domain
    out = []
    for rec in it.history:
        coords = []
        for c in rec.coords:
            if c is None:
                coords.append(None)
            else:
                coords.append(FactoredCoordinate(dom.scalar_value(c.scalar), tuple(c.var), dict(c.fac)))
        out.append(FactoredIterate(rec.k, coords, rec.degree))
    return out


def snapshot(it: FactoredIterator, mode: str, prime, complete: bool = True) -> TrackResult:
    return TrackResult(_database(it, mode, prime), _iterates(it), it, list(it.events), complete)


def track_factors(
    fmap: ProjectiveMap,
    n_max: int,
    mode: str = "exact",
    prime: int | None = MERSENNE61,
    seed: int = 0,
    max_seconds: float | None = None,
    backend: str = "flint",
) -> TrackResult:
    """Iterate in factored form up to n_max and collect the factor family.

    ``mode='exact'`` keeps every variable symbolic (coefficients mod ``prime``);
    ``mode='line'`` restricts to a random line, which is much cheaper and still
    exposes the exponent structure.  On budget exhaustion BudgetExceeded
    carries the TrackResult computed so far.
    """
    domain = make_domain(mode, fmap.variables, prime, seed=seed, backend=backend)
    it = FactoredIterator(fmap, domain)
    deadline = None if max_seconds is None else time.monotonic() + max_seconds
    try:
        it.run(n_max, deadline)
    except BudgetExceeded as exc:
        raise BudgetExceeded(str(exc), partial=snapshot(it, mode, prime, complete=False)) from None
    return snapshot(it, mode, prime)


def reconstruct(result: TrackResult, k: int) -> list:
    """Expanded coordinates of iterate k from the factored form (domain elements)."""
    return result.iterator.coordinate_values(k)
