"""Multiplicative recurrences satisfied by the tracked factor family.

A relation reads

    c_P * m_P * prod B[k+o]^e   =   sum_T  c_T * m_T * prod B[k+o]^e

where the left side (the "product") holds the newest factor B[k] to the first
power, every offset o is <= 0 and the m are monomials in the map variables
(decorations).  Relations come either from tracked iterates or from text.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from ..errors import (AlgEntropyError, NoRootInRange, PolySyntaxError, SpanExceedsData,
                      UnbalancedRelation, VerificationFailed)
from ..poly import ZZ, UniPoly
from ..methods.roots import dominant_root
from .pattern import StabilizationPattern
from .tracker import TrackResult

DEFAULT_POINTS = 20
BALANCE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class RelTerm:
    coefficient: int | Fraction | None  # None: a generic nonzero scalar (line-mode data)
    decoration: tuple  # sorted (variable, exponent) pairs
    factors: tuple  # sorted (offset, exponent) pairs

    @property
    def exps(self) -> dict:
        return dict(self.factors)

    def shifted(self, by: int) -> RelTerm:
        return RelTerm(self.coefficient, self.decoration, tuple((o + by, e) for o, e in self.factors))

    def structure(self) -> tuple:
        return self.factors

    def render(self, family: str, anchor: int | None, with_sign: bool = True) -> str:
        items = []
        for o, e in sorted(self.factors):
            idx = str(anchor + o) if anchor is not None else ("k" if o == 0 else f"k{o:+d}")
            name = f"{family}[{idx}]"
            items.append(name if e == 1 else f"{name}^{e}")
        for v, e in self.decoration:
            items.append(v if e == 1 else f"{v}^{e}")
        c = self.coefficient
        mag = None if c is None else abs(c)
        if c is None:
            items.insert(0, "c")
        elif mag != 1 or not items:
            items.insert(0, str(mag))
        body = "*".join(items)
        if with_sign and c is not None and c < 0:
            return "-" + body
        return body


def _render_sum(terms, family, anchor) -> str:
    out = ""
    for t in terms:
        neg = t.coefficient is not None and t.coefficient < 0
        body = t.render(family, anchor, with_sign=False)
        if not out:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out


@dataclass
class DerivedRecurrence:
    product: RelTerm
    terms: tuple  # RelTerm
    family: str = "B"
    anchor: int | None = None  # absolute index of the newest factor, when the relation is pinned
    window: tuple[int, int] | None = None  # iterates the relation was read from
    decorations: dict = field(default_factory=dict)  # k -> (product decoration, [(coef, decoration) per term])
    verification: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        offs = [o for t in (self.product, *self.terms) for o, _ in t.factors]
        return -min(offs)

    @property
    def verified(self) -> bool:
        v = self.verification
        return bool(v) and v.get("passed") == v.get("checked") and v.get("checked", 0) > 0

    def render(self) -> str:
        return f"{self.product.render(self.family, self.anchor)} = {_render_sum(self.terms, self.family, self.anchor)}"

    def __str__(self):
        return self.render()

    def structure(self) -> tuple:
        return self.product.factors, tuple(sorted(t.factors for t in self.terms))

    def equivalent(self, other: DerivedRecurrence, coefficients: bool = True, up_to_signs: bool = False) -> bool:
        """Same relation up to an overall scalar: identical factor structure, decorations and coefficient ratios.

        With ``up_to_signs`` the factors themselves may be rescaled by -1
        (monic normalization can pick either associate), so coefficient ratios
        only need to agree in size and up to a sign pattern that such a
        rescaling can produce.
        """
        if self.structure() != other.structure():
            return False
        mine = {t.factors: t for t in self.terms}
        for t in other.terms:
            s = mine[t.factors]
            if s.decoration != t.decoration:
                return False
        if self.product.decoration != other.product.decoration:
            return False
        if not coefficients:
            return True
        if any(t.coefficient is None for t in (self.product, other.product, *self.terms, *other.terms)):
            return False
        ratio = Fraction(other.product.coefficient) / Fraction(self.product.coefficient)
        if not up_to_signs:
            return all(Fraction(t.coefficient) == ratio * Fraction(mine[t.factors].coefficient) for t in other.terms)
        rows = []
        pe = self.product.exps
        for t in other.terms:
            q = Fraction(t.coefficient) / (ratio * Fraction(mine[t.factors].coefficient))
            if abs(q) != 1:
                return False
            te = t.exps
            parity = {o for o in set(te) | set(pe) if (te.get(o, 0) - pe.get(o, 0)) % 2}
            rows.append((parity, q < 0))
        return _gf2_solvable(rows)

    def to_dict(self) -> dict:
        def term(t):
            return {"coefficient": None if t.coefficient is None else str(t.coefficient),
                    "decoration": [[v, e] for v, e in t.decoration],
                    "factors": {str(o): e for o, e in t.factors}}

        return {
            "family": self.family,
            "anchor": self.anchor,
            "order": self.order,
            "relation": self.render(),
            "product": term(self.product),
            "terms": [term(t) for t in self.terms],
            "window": None if self.window is None else list(self.window),
            "decorations": {str(k): {"product": [[v, e] for v, e in pd],
                                     "terms": [[[v, e] for v, e in d] for _, d in td]}
                            for k, (pd, td) in sorted(self.decorations.items())},
            "verification": self.verification,
        }

    @classmethod
    def from_dict(cls, d: dict) -> DerivedRecurrence:
        def term(t):
            c = t.get("coefficient")
            coef = None if c is None else Fraction(c)
            if coef is not None and coef.denominator == 1:
                coef = coef.numerator
            return RelTerm(coef, _pairs(t.get("decoration", [])),
                           tuple(sorted((int(o), int(e)) for o, e in t["factors"].items())))

        product = term(d["product"])
        terms = tuple(term(t) for t in d["terms"])
        decorations = {}
        for k, entry in d.get("decorations", {}).items():
            pd = _pairs(entry["product"])
            td = [(t.coefficient, _pairs(x)) for t, x in zip(terms, entry["terms"])]
            decorations[int(k)] = (pd, td)
        window = d.get("window")
        return cls(product, terms, d.get("family", "B"), d.get("anchor"),
                   None if window is None else tuple(window), decorations, d.get("verification", {}))


def _pairs(deco) -> tuple:
    """A decoration from [[var, exp], ...] (order kept) or an older {var: exp} mapping."""
    items = deco.items() if isinstance(deco, dict) else deco
    return tuple((str(v), int(e)) for v, e in items)


# ---------------------------------------------------------------- text form

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))", re.S)


def _gf2_solvable(rows) -> bool:
    """Is there a sign per offset whose products give each row's flip? Rows are (offset set, flip)."""
    pivots: dict = {}  # pivot offset -> (support, flip)
    for support, flip in rows:
        support = frozenset(support)
        for col, (psup, pflip) in pivots.items():
            if col in support:
                support, flip = support ^ psup, flip ^ pflip
        if not support:
            if flip:
                return False
            continue
        col = min(support)
        for c, (ps, pf) in list(pivots.items()):
            if col in ps:
                pivots[c] = (ps ^ support, pf ^ flip)
        pivots[col] = (support, flip)
    return True


def _tokens(text):
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        col = m.start(m.lastindex) + 1
        out.append((m.lastindex, m.group(m.lastindex), col))
        pos = m.end()
    out.append((0, "", len(text) + 1))
    return out


class _RelationParser:
    """side '=' side; side := ['-'] term (('+'|'-') term)*; term := factor ('*' factor)*;
    factor := INT | NAME '[' index ']' ['^' INT] | NAME ['^' INT]; index := 'k' [('+'|'-') INT] | INT."""

    def __init__(self, text, params, family):
        self.text = text
        self.toks = _tokens(text)
        self.i = 0
        self.params = dict(params or {})
        self.family = family

    def err(self, msg):
        raise PolySyntaxError(msg, 1, self.toks[self.i][2], "relation")

    def peek(self):
        return self.toks[self.i]

    def take(self, want=None):
        tok = self.toks[self.i]
        if want is not None and tok[1] != want:
            self.err(f"expected {want!r}")
        self.i += 1
        return tok

    def parse(self):
        left = self.side()
        self.take("=")
        right = self.side()
        if self.peek()[0] != 0:
            self.err(f"unexpected {self.peek()[1]!r}")
        return left, right

    def side(self):
        terms = []
        sign = 1
        if self.peek()[1] in ("+", "-") and self.peek()[0] == 3:
            sign = -1 if self.take()[1] == "-" else 1
        terms.append(self.term(sign))
        while self.peek()[0] == 3 and self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
            terms.append(self.term(sign))
        return terms

    def exponent(self):
        if self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != 1:
                self.err("exponent must be a nonnegative integer")
            return int(tok[1])
        return 1

    def term(self, sign):
        coef = sign
        deco: dict = {}
        facs: dict = {}  # (relative?, value) -> exp
        while True:
            kind, val, _ = self.take()
            if kind == 1:
                coef *= int(val) ** self.exponent()
            elif kind == 2 and self.peek()[1] == "[":
                if self.family is None:
                    self.family = val
                elif val != self.family:
                    self.err(f"mixed factor families {self.family!r} and {val!r}")
                self.take("[")
                key = self.index()
                self.take("]")
                facs[key] = facs.get(key, 0) + self.exponent()
            elif kind == 2:
                e = self.exponent()
                if val in self.params:
                    coef *= int(self.params[val]) ** e
                else:
                    deco[val] = deco.get(val, 0) + e
            else:
                self.i -= 1
                self.err(f"unexpected {val!r}")
            if self.peek()[1] == "*":
                self.take()
                continue
            return coef, deco, facs

    def index(self):
        kind, val, _ = self.take()
        if kind == 2 and val == "k":
            if self.peek()[1] in ("+", "-"):
                sign = -1 if self.take()[1] == "-" else 1
                tok = self.take()
                if tok[0] != 1:
                    self.err("expected an integer offset")
                return ("rel", sign * int(tok[1]))
            return ("rel", 0)
        if kind == 1:
            return ("abs", int(val))
        self.i -= 1
        self.err("expected 'k', 'k+n', 'k-n' or an integer index")


def parse_relation(text: str, params: Mapping[str, int] | None = None, family: str | None = None) -> DerivedRecurrence:
    """Read e.g. ``B[k-27]*B[k] = B[k-25]*B[k-2] - t^3*x*B[k-23]*B[k-4]``.

    Indices are all relative (k+n) or all absolute (integers); the newest
    index must sit alone in a single-term side, which becomes the product.
    Names bound in ``params`` are folded into the coefficients; other bare
    names are decoration variables.
    """
    p = _RelationParser(text, params, family)
    left, right = p.parse()
    kinds = {key[0] for side in (left, right) for _, _, f in side for key in f}
    if len(kinds) != 1:
        raise PolySyntaxError("indices must be all relative or all absolute", 1, 1, "relation")
    kind = kinds.pop()
    newest = max(key[1] for side in (left, right) for _, _, f in side for key in f)
    holders = [side for side in (left, right) if any(key[1] == newest for _, _, f in side for key in f)]
    if len(holders) != 1 or len(holders[0]) != 1:
        raise PolySyntaxError("the newest factor must appear alone in a single-term side", 1, 1, "relation")
    prod_side = holders[0]
    sum_side = right if prod_side is left else left
    if prod_side[0][2][("abs" if kind == "abs" else "rel", newest)] != 1:
        raise PolySyntaxError("the newest factor must appear to the first power", 1, 1, "relation")

    def mk(c, deco, facs):
        return RelTerm(c, tuple(sorted(deco.items())), tuple(sorted((key[1] - newest, e) for key, e in facs.items())))

    product = mk(*prod_side[0])
    terms = tuple(mk(*t) for t in sum_side)
    return DerivedRecurrence(product, terms, p.family or "B", newest if kind == "abs" else None)


# ---------------------------------------------------------------- from tracking


def _relation_at(result: TrackResult, k: int, variables):
    """The relation read off the atom record that created the factor born at step k."""
    it = result.iterator
    rec = it.history[k]
    atoms = [a for a in rec.atoms if a.new_factor is not None]
    if len(atoms) != 1:
        return None
    ar = atoms[0]
    dom = it.domain
    exact = dom.symbolic
    inv_lead = dom.sinv(ar.lead)

    def offsets(fac):
        out = []
        for j, e in fac.items():
            f = it.factors[j]
            if f.parent is not None:
                raise AlgEntropyError(f"factor {f.label} was split; relation extraction needs unsplit factors")
            out.append((f.birth - k, e))
        return tuple(sorted(out))

    def deco(var):
        return tuple((v, e) for v, e in zip(variables, var) if e)

    terms = []
    scalars = []
    for _, fc in ar.terms:
        c = dom.smul(fc.scalar, inv_lead)  # fc.scalar already includes the atom coefficient
        scalars.append(c)
        coef = dom.scalar_value(c) if exact else None
        terms.append(RelTerm(coef, deco(fc.var), offsets(fc.fac)))
    pfac = dict(ar.strip_fac)
    pfac[ar.new_factor] = 1
    product = RelTerm(1 if exact else None, deco(ar.strip_var), offsets(pfac))
    return product, tuple(terms), scalars, ar


def derive_recurrence(result: TrackResult, pattern: StabilizationPattern | None = None,
                      points: int = DEFAULT_POINTS, seed: int = 0, family: str = "B") -> DerivedRecurrence:
    """Read the relation that produces each new factor, check it is shift-invariant, verify it numerically.

    The relation is taken from the steps after stabilization whose structure
    (offsets and exponents) is identical through the last tracked iterate.
    Every such step is checked at ``points`` random points of the domain.
    """
    it = result.iterator
    if pattern is not None and pattern.degenerate:
        raise SpanExceedsData("degenerate pattern: no factor family to relate")
    if len(it.atoms) != 1:
        raise SpanExceedsData("relation extraction handles maps with a single factor family")
    variables = tuple(it.map.variables)
    first = (pattern.onset + 1) if pattern is not None else 1
    rels = {}
    for k in range(first, it.k + 1):
        r = _relation_at(result, k, variables)
        if r is not None:
            rels[k] = r
    if not rels:
        raise SpanExceedsData("no step in the window created a new factor")
    ks = sorted(rels)
    last_struct = (rels[ks[-1]][0].factors, tuple(t.factors for t in rels[ks[-1]][1]))
    start = len(ks) - 1
    while start > 0 and (rels[ks[start - 1]][0].factors,
                         tuple(t.factors for t in rels[ks[start - 1]][1])) == last_struct:
        start -= 1
    window_ks = ks[start:]
    span = -min(o for o, _ in last_struct[0] + tuple(x for t in last_struct[1] for x in t))
    if window_ks[0] - span < 1 and len(window_ks) < 2:
        raise SpanExceedsData("relation span exceeds the tracked data")
    if len(window_ks) < 2:
        raise SpanExceedsData(f"relation stable on {len(window_ks)} step(s) only; track further")
    k0 = window_ks[0]
    product, terms, _, _ = rels[k0]
    decorations = {k: (rels[k][0].decoration, [(t.coefficient, t.decoration) for t in rels[k][1]]) for k in window_ks}
    rec = DerivedRecurrence(product, terms, family, None, (k0, window_ks[-1]), decorations)
    rec.verification = verify_tracked(result, rels, window_ks, points, seed)
    if not rec.verified:
        raise VerificationFailed(f"relation failed at {rec.verification['failures'][:5]}")
    return rec


def verify_tracked(result: TrackResult, rels: dict, ks, points: int, seed: int) -> dict:
    it = result.iterator
    dom = it.domain
    rng = random.Random(seed)
    by_birth = {f.birth: f for f in it.factors if f.parent is None}
    checked = passed = 0
    failures = []
    for k in ks:
        product, terms, scalars, ar = rels[k]
        for _ in range(points):
            pt = dom.random_point(rng)
            gvals = [dom.at(g, pt) for g in it.gens]
            bvals: dict = {}

            def val(t: RelTerm, scalar):
                acc = scalar
                for v, e in t.decoration:
                    acc = acc * gvals[it.map.variables.index(v)] ** e
                for o, e in t.factors:
                    b = k + o
                    if b not in bvals:
                        bvals[b] = dom.at(by_birth[b].element, pt)
                    acc = acc * bvals[b] ** e
                return acc

            lhs = val(product, dom.scalar(1))
            rhs = None
            for t, sc in zip(terms, scalars):
                v = val(t, sc)
                rhs = v if rhs is None else rhs + v
            checked += 1
            if lhs == rhs:
                passed += 1
            else:
                failures.append(k)
    return {"checked": checked, "passed": passed, "points_per_step": points, "steps": [ks[0], ks[-1]],
            "domain": dom.name, "failures": failures}


# ---------------------------------------------------------------- degrees


def _term_poly(product: RelTerm, term: RelTerm, anchor: int | None) -> UniPoly:
    """Characteristic polynomial of deg(newest) = weight(term) - weight(product without newest)."""
    coeffs: dict = {}
    for o, e in product.factors:
        coeffs[o] = coeffs.get(o, 0) + e
    for o, e in term.factors:
        coeffs[o] = coeffs.get(o, 0) - e
    if anchor is not None:
        shift = anchor
    else:
        shift = -min(coeffs)
    exps = {o + shift: c for o, c in coeffs.items() if c}
    if anchor is None and exps:
        low = min(exps)
        exps = {e - low: c for e, c in exps.items()}
    if any(e < 0 for e in exps):
        raise ValueError("anchor too small for the offsets")
    top = max(exps)
    return UniPoly(ZZ, [exps.get(i, 0) for i in range(top + 1)])


def char_poly_of_recurrence(rec: DerivedRecurrence, return_term: bool = False):
    """Characteristic polynomial of the linear recurrence on factor degrees.

    Decorations are bounded and ignored.  Each additive term gives a
    candidate; the largest growth wins, ties going to an undecorated term
    that reaches the most recent offsets.  All terms must carry the same
    weight at that growth, otherwise UnbalancedRelation.
    """
    cands = []
    for t in rec.terms:
        poly = _term_poly(rec.product, t, rec.anchor)
        try:
            root = dominant_root(poly).value
        except NoRootInRange:
            root = 1.0
        cands.append((root, t, poly))
    best_root = max(c[0] for c in cands)

    def pref(c):
        root, t, _ = c
        top = max(o for o, _ in t.factors) if t.factors else -10**9
        return (abs(root - best_root) <= 1e-9, not t.decoration, top, t.exps.get(top, 0),
                t.coefficient is not None and t.coefficient > 0)

    root, term, poly = max(cands, key=pref)
    if root > 1 + 1e-9:
        weights = [sum(e * root**o for o, e in t.factors) for t in rec.terms]
        ref = max(weights)
        if any(abs(w - ref) > BALANCE_TOLERANCE * ref for w in weights):
            raise UnbalancedRelation(f"term weights differ at growth {root:.10f}: {weights}")
    return (poly, term) if return_term else poly
