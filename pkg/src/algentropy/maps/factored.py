"""Iteration in factored form.

Every map coordinate is written as  c_i * x^m_i * prod_a atom_a^e_ia  where the
atoms are the non-monomial cofactors of the coordinates, refined into a
pairwise coprime basis.  An iterate is kept as a vector of factored
coordinates (scalar, variable exponents, exponents over a growing base of
coprime factors B_j).  Composing with the map only requires the values of the
atoms at the current iterate: for each atom the common part of its terms is
pulled out, the remaining sum is expanded, and the known factors are divided
off by trial division.  What survives is a new factor.

The arithmetic runs over any Domain: symbolic multivariate polynomials (exact
factor tracking) or a random line (fast degrees).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Sequence

from ..errors import AllCoordinatesZero, AlgEntropyError, BudgetExceeded, MapValidationError
from ..poly import ZZ, Polynomial, poly_gcd
from ..poly.domains import Domain


# --- map decomposition ------------------------------------------------------


@dataclass
class CoordinateSpec:
    coefficient: int
    monomial: tuple
    atoms: dict  # atom index -> exponent


def _gcd_free_basis(polys: list[Polynomial]) -> list[Polynomial]:
    basis = [p.normalize() for p in polys if p.total_degree() > 0]
    changed = True
    while changed:
        changed = False
        uniq = []
        for p in basis:
            if not any(p == q for q in uniq):
                uniq.append(p)
        basis = uniq
        for i in range(len(basis)):
            for j in range(i + 1, len(basis)):
                g = poly_gcd(basis[i], basis[j])
                if g.total_degree() > 0:
                    a, b = basis[i].exact_div(g), basis[j].exact_div(g)
                    rest = [q for k, q in enumerate(basis) if k not in (i, j)]
                    basis = rest + [g] + [q.normalize() for q in (a, b) if q.total_degree() > 0]
                    changed = True
                    break
            if changed:
                break
    return basis


def decompose_map(polys: Sequence[Polynomial]) -> tuple[list[Polynomial], list[CoordinateSpec]]:
    """Split coordinates into coefficient, monomial and powers of coprime atoms (over ZZ)."""
    polys = [p.with_ring(ZZ) for p in polys]
    cofactors = []
    monos = []
    for p in polys:
        m = p.monomial_content()
        monos.append(m)
        cofactors.append(p.shift_down(m))
    atoms = _gcd_free_basis(cofactors)
    specs = []
    for q, m in zip(cofactors, monos):
        exps = {}
        rest = q
        for a, atom in enumerate(atoms):
            while rest.total_degree() >= atom.total_degree() and atom.divides(rest):
                rest = rest.exact_div(atom)
                exps[a] = exps.get(a, 0) + 1
        if rest.total_degree() != 0:
            raise MapValidationError(f"could not express {q} over the atom basis")
        specs.append(CoordinateSpec(rest.constant_value(), m, exps))
    return atoms, specs


# --- factored values --------------------------------------------------------


@dataclass
class FCoord:
    """scalar * prod gens^var * prod B_j^fac[j]."""

    scalar: Any
    var: tuple
    fac: dict

    def copy(self):
        return FCoord(self.scalar, self.var, dict(self.fac))


def _fmin(values: Sequence[FCoord]) -> tuple[tuple, dict]:
    var = tuple(min(col) for col in zip(*(v.var for v in values)))
    keys = set(values[0].fac)
    for v in values[1:]:
        keys &= set(v.fac)
    fac = {}
    for j in keys:
        e = min(v.fac[j] for v in values)
        if e:
            fac[j] = e
    return var, fac


def _fsub(v: FCoord, var: tuple, fac: dict) -> FCoord:
    out = dict(v.fac)
    for j, e in fac.items():
        r = out[j] - e
        if r:
            out[j] = r
        else:
            del out[j]
    return FCoord(v.scalar, tuple(a - b for a, b in zip(v.var, var)), out)


def _fadd_exps(var_a, fac_a, var_b, fac_b, times=1):
    var = tuple(a + times * b for a, b in zip(var_a, var_b))
    fac = dict(fac_a)
    for j, e in fac_b.items():
        fac[j] = fac.get(j, 0) + times * e
    return var, fac


@dataclass
class FactorEntry:
    element: Any
    degree: int
    birth: int
    slot: int
    alive: bool = True
    label: str = ""
    parent: int | None = None


@dataclass
class AtomRecord:
    """How atom ``slot`` evaluated at iterate k-1 produced (part of) iterate k.

    sum_T coef_T * scalar_T * M_T  ==  lead * gens^strip_var * prod B^strip_fac * B_new
    where M_T = gens^var_T * prod B^fac_T after cancelling the common part.
    """

    k: int
    slot: int
    terms: list  # list of (coef index in atom, FCoord) after removing the common part
    common: tuple  # (var, fac)
    strip_var: tuple
    strip_fac: dict
    lead: Any
    new_factor: int | None
    vanished: bool = False


@dataclass
class TrackEvent:
    k: int
    kind: str  # "ResidualNotNew"
    detail: str


@dataclass
class StepRecord:
    k: int
    coords: list  # FCoord or None (zero coordinate)
    degree: int
    seconds: float
    atoms: list = field(default_factory=list)


class FactoredIterator:
    """Iterate a map in factored form over ``domain``."""

    def __init__(self, fmap, domain: Domain, check_coprime: bool | None = None, keep_atoms: bool = True):
        self.map = fmap
        self.domain = domain
        self.atoms, self.specs = decompose_map(fmap.forward)
        dom = domain
        self.atom_terms = [
            [(dom.scalar(a.ring.symmetric(c)), m, a.ring.symmetric(c)) for m, c in a.sorted_terms()]
            for a in self.atoms
        ]
        self.spec_scalars = [dom.scalar(s.coefficient) for s in self.specs]
        self.gens = dom.gens()
        self.gen_degrees = [dom.degree(g) for g in self.gens]
        self.nvars = len(self.gens)
        self.factors: list[FactorEntry] = []
        self.events: list[TrackEvent] = []
        self.check_coprime = domain.symbolic if check_coprime is None else check_coprime
        self.keep_atoms = keep_atoms
        one = dom.scalar(1)
        self.state = [FCoord(one, tuple(int(i == j) for j in range(self.nvars)), {}) for i in range(self.nvars)]
        self.k = 0
        self.history: list[StepRecord] = [StepRecord(0, [c.copy() for c in self.state], 1, 0.0)]
        self._pow_cache: dict = {}
        self._by_birth: dict = {}
        self._splits: dict = {}  # dead factor -> {child: exponent}
        self._deadline: float | None = None

    # expansion helpers

    def _power(self, kind, j, e):
        key = (kind, j, e)
        cache = self._pow_cache
        if key not in cache:
            base = self.gens[j] if kind == "g" else self.factors[j].element
            cache[key] = base**e
        return cache[key]

    def _tick(self):
        """Abort the current step once the run's deadline has passed."""
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise BudgetExceeded(f"budget exhausted during iterate {self.k + 1}", partial=self.degrees())

    def expand(self, var: tuple, fac: dict):
        acc = None
        for j, e in enumerate(var):
            if e:
                t = self._power("g", j, e)
                acc = t if acc is None else acc * t
        for j, e in sorted(fac.items()):
            if e:
                self._tick()
                t = self.factors[j].element ** e
                acc = t if acc is None else acc * t
        return acc if acc is not None else self.domain.one()

    def value(self, c: FCoord):
        return self.domain.scale(self.expand(c.var, c.fac), c.scalar)

    def factor_degree_sum(self, c: FCoord) -> int:
        return sum(d * e for d, e in zip(self.gen_degrees, c.var)) + sum(
            self.factors[j].degree * e for j, e in c.fac.items()
        )

    def _mono_eval(self, m: tuple, P: list) -> FCoord | None:
        dom = self.domain
        scalar = dom.scalar(1)
        var = (0,) * self.nvars
        fac: dict = {}
        for j, e in enumerate(m):
            if not e:
                continue
            pj = P[j]
            if pj is None:
                return None
            scalar = dom.smul(scalar, pj.scalar**e if e > 1 else pj.scalar)
            var, fac = _fadd_exps(var, fac, pj.var, pj.fac, e)
        return FCoord(scalar, var, fac)

    def _strip(self, E, terms=None, hint=None):
        """Divide E by the generators and base factors as often as possible.

        With ``terms`` (the reduced summands of E) a factor missing from at
        most one summand is skipped: modulo that factor E is congruent to a
        single product of coprime factors, hence nonzero.  ``hint`` maps
        factor ids to an expected exponent, tried first as one division.
        """
        dom = self.domain
        var = [0] * self.nvars
        skip_var, skip_fac = set(), set()
        if terms is not None and len(terms) > 1:
            for i in range(self.nvars):
                if sum(1 for t in terms if t.var[i] == 0) < 2:
                    skip_var.add(i)
            counts: dict = {}
            for t in terms:
                for j in t.fac:
                    counts[j] = counts.get(j, 0) + 1
            skip_fac = {j for j, c in counts.items() if len(terms) - c < 2}
        for i, g in enumerate(self.gens):
            if i in skip_var:
                continue
            while True:
                q = dom.try_div(E, g)
                if q is None:
                    break
                E = q
                var[i] += 1
        fac = {}
        hint = hint or {}
        for j, f in enumerate(self.factors):
            if not f.alive or j in skip_fac:
                continue
            self._tick()
            e = hint.get(j, 0)
            if e > 1 and dom.degree(E) >= e * f.degree:
                q = dom.try_div(E, f.element**e)
                if q is not None:
                    E = q
                    fac[j] = e
            while dom.degree(E) >= f.degree:
                q = dom.try_div(E, f.element)
                if q is None:
                    break
                E = q
                fac[j] = fac.get(j, 0) + 1
        return E, tuple(var), fac

    def _hint(self, slot: int) -> dict:
        """Strip exponents of the previous step for this atom, shifted forward by one index."""
        if len(self.history) < 2 or not self.history[-1].atoms:
            return {}
        prev = self.history[-1].atoms[slot]
        out = {}
        for j, e in prev.strip_fac.items():
            f = self.factors[j]
            nxt = self._by_birth.get((f.birth + 1, f.slot))
            if nxt is not None:
                out[nxt] = e
        return out

    def _register(self, element, birth, slot, parent=None, label=None) -> int:
        fid = len(self.factors)
        self.factors.append(
            FactorEntry(element, self.domain.degree(element), birth, slot, True, label or f"B[{birth}]", parent)
        )
        if parent is None:
            self._by_birth[(birth, slot)] = fid
        return fid

    def _split(self, j: int, g):
        """Factor j shares the monic factor g with a new residual: replace it by g^e * h."""
        dom = self.domain
        old = self.factors[j]
        h, e = old.element, 0
        while True:
            q = dom.try_div(h, g)
            if q is None:
                break
            h, e = q, e + 1
        h, _ = dom.monic(h)
        old.alive = False
        a = self._register(g, old.birth, old.slot, parent=j, label=old.label + "a")
        b = self._register(h, old.birth, old.slot, parent=j, label=old.label + "b") if dom.degree(h) > 0 else None
        repl = {a: e}
        if b is not None:
            repl[b] = 1
        self._splits[j] = repl

        def rewrite(fac):
            if j in fac:
                ej = fac.pop(j)
                for t, m in repl.items():
                    fac[t] = fac.get(t, 0) + ej * m

        for c in self.state:
            if c is not None:
                rewrite(c.fac)
        for rec in self.history:
            for c in rec.coords:
                if c is not None:
                    rewrite(c.fac)
            for ar in rec.atoms:
                rewrite(ar.strip_fac)
                rewrite(ar.common[1])
                for _, t in ar.terms:
                    rewrite(t.fac)
        self._pow_cache.clear()
        self.events.append(TrackEvent(self.k + 1, "ResidualNotNew",
                                      f"residual shares a factor with {old.label}; split into {len(repl)} part(s)"))
        return a

    def _resolve(self, fac: dict) -> dict:
        """Rewrite a factor product in terms of live factors only."""
        if not any(j in self._splits for j in fac):
            return fac
        out: dict = {}
        for j, e in fac.items():
            parts = self._resolve(self._splits[j]) if j in self._splits else {j: 1}
            for t, m in parts.items():
                out[t] = out.get(t, 0) + e * m
        return out

    def _make_coprime(self, L, born: int | None = None):
        """Remove from L any factor shared with the base (splitting the base entry); returns (L, extra fac).

        With ``born`` only factors registered at that step are checked.
        """
        dom = self.domain
        extra: dict = {}
        changed = True
        while changed and dom.degree(L) > 0:
            changed = False
            for j, f in enumerate(self.factors):
                if not f.alive or (born is not None and f.birth != born):
                    continue
                self._tick()
                g = dom.gcd(L, f.element)
                if dom.degree(g) > 0:
                    g, _ = dom.monic(g)
                    a = self._split(j, g)
                    while True:
                        q = dom.try_div(L, g)
                        if q is None:
                            break
                        L = q
                        extra[a] = extra.get(a, 0) + 1
                    L, _ = dom.monic(L)
                    changed = True
                    break
        return L, extra

    # one iterate

    def step(self) -> StepRecord:
        t0 = time.perf_counter()
        dom = self.domain
        P = self.state
        k = self.k + 1
        zero_var = (0,) * self.nvars
        atom_vals = []
        atom_recs = []
        for slot, terms in enumerate(self.atom_terms):
            tvals = []
            for idx, (c, m, _) in enumerate(terms):
                fc = self._mono_eval(m, P)
                if fc is None:
                    continue
                fc.scalar = dom.smul(fc.scalar, c)
                tvals.append((idx, fc))
            if not tvals:
                atom_vals.append(None)
                atom_recs.append(AtomRecord(k, slot, [], (zero_var, {}), zero_var, {}, None, None, True))
                continue
            cvar, cfac = _fmin([fc for _, fc in tvals])
            reduced = [(idx, _fsub(fc, cvar, cfac)) for idx, fc in tvals]
            E = None
            for _, fc in reduced:
                v = self.value(fc)
                E = v if E is None else E + v
            if dom.is_zero(E):
                atom_vals.append(None)
                atom_recs.append(AtomRecord(k, slot, reduced, (cvar, cfac), zero_var, {}, None, None, True))
                continue
            E, svar, sfac = self._strip(E, [fc for _, fc in reduced], self._hint(slot))
            L, lead = dom.monic(E)
            new = None
            if dom.degree(L) > 0:
                if self.factors and (self.check_coprime or len(self.atom_terms) > 1):
                    # atoms of one step can share a brand-new factor even when old ones are not checked
                    L, extra = self._make_coprime(L, None if self.check_coprime else k)
                    for j, e in extra.items():
                        sfac[j] = sfac.get(j, 0) + e
                if dom.degree(L) > 0:
                    new = self._register(L, k, slot)
            var, fac = _fadd_exps(cvar, cfac, svar, sfac)
            if new is not None:
                fac[new] = 1
            atom_vals.append(FCoord(lead, var, fac))
            atom_recs.append(AtomRecord(k, slot, reduced, (cvar, cfac), svar, sfac, lead, new))

        # earlier atoms of this step may still refer to factors split since
        for av in atom_vals:
            if av is not None:
                av.fac = self._resolve(av.fac)

        Q = []
        for spec, sc in zip(self.specs, self.spec_scalars):
            fc = self._mono_eval(spec.monomial, P)
            if fc is not None:
                fc.scalar = dom.smul(fc.scalar, sc)
                for a, e in spec.atoms.items():
                    av = atom_vals[a]
                    if av is None:
                        fc = None
                        break
                    fc.scalar = dom.smul(fc.scalar, av.scalar**e if e > 1 else av.scalar)
                    fc.var, fc.fac = _fadd_exps(fc.var, fc.fac, av.var, av.fac, e)
            Q.append(fc)
        nonzero = [q for q in Q if q is not None]
        if not nonzero:
            raise AllCoordinatesZero(k)
        gvar, gfac = _fmin(nonzero)
        new_state = [None if q is None else _fsub(q, gvar, gfac) for q in Q]
        inv = dom.sinv(nonzero[0].scalar)
        for c in new_state:
            if c is not None:
                c.scalar = dom.smul(c.scalar, inv)
        degs = {self.factor_degree_sum(c) for c in new_state if c is not None}
        if len(degs) != 1 and dom.symbolic:
            raise AlgEntropyError(f"inconsistent coordinate degrees {sorted(degs)} at iterate {k}")
        self.state = new_state
        self.k = k
        rec = StepRecord(k, [None if c is None else c.copy() for c in new_state], max(degs),
                         time.perf_counter() - t0, atom_recs if self.keep_atoms else [])
        self.history.append(rec)
        return rec

    def run(self, n_max: int, deadline: float | None = None, progress=None) -> list[StepRecord]:
        """Advance to iterate n_max; BudgetExceeded carries the degree prefix if the deadline passes.

        The deadline is also checked inside a step, which is then abandoned;
        the iterator should not be advanced again after that.
        """
        self._deadline = deadline
        while self.k < n_max:
            if deadline is not None and time.monotonic() > deadline:
                raise BudgetExceeded(f"budget exhausted after iterate {self.k}", partial=self.degrees())
            rec = self.step()
            if progress:
                progress(rec)
        return self.history

    def degrees(self) -> list[int]:
        return [r.degree for r in self.history]

    def coordinate_values(self, k: int | None = None) -> list:
        """Expanded domain elements of iterate k (default: current)."""
        rec = self.history[self.k if k is None else k]
        return [self.domain.scale(self.domain.one(), self.domain.scalar(0)) if c is None else self.value(c)
                for c in rec.coords]
