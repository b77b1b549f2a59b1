"""Projective maps: map files, validation, direct iteration, birationality, conjugation."""
from __future__ import annotations

import hashlib
import random
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..errors import (
    AllCoordinatesZero,
    DegreeMismatch,
    InverseMissing,
    MapValidationError,
    NonHomogeneous,
    PolySyntaxError,
    SingularMatrix,
)
from ..poly import GF, MERSENNE61, ZZ, Polynomial, parse_polynomial
from ..poly.domains import Domain, FlintMPolyDomain, make_domain

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


@dataclass
class ProjectiveMap:
    variables: tuple[str, ...]
    forward: list[Polynomial]
    inverse: list[Polynomial] | None = None
    params: dict[str, int] = field(default_factory=dict)
    random_params: tuple[str, ...] = ()
    name: str | None = None
    source_text: dict | None = None  # raw coordinate strings, for symbolic rendering

    def __post_init__(self):
        self.variables = tuple(self.variables)
        self.degree = validate_coordinates(self.forward, "phi")
        if self.inverse is not None:
            if len(self.inverse) != len(self.forward):
                raise MapValidationError("psi must have as many coordinates as phi")
            self.inverse_degree = validate_coordinates(self.inverse, "psi")

    @property
    def dimension(self) -> int:
        return len(self.variables) - 1

    @property
    def map_id(self) -> str:
        if self.name:
            return self.name
        digest = hashlib.sha256(self.canonical_text().encode()).hexdigest()
        return f"map-{digest[:12]}"

    def canonical_text(self) -> str:
        return ";".join(str(p) for p in self.forward)

    def check_reduced(self, prime: int = MERSENNE61):
        """The forward coordinates must have no common factor."""
        dom = FlintMPolyDomain(self.variables, prime)
        g = None
        for p in self.forward:
            if p.is_zero():
                continue
            e = dom.from_polynomial(p)
            g = e if g is None else dom.gcd(g, e)
        if g is not None and dom.degree(g) > 0:
            raise MapValidationError(f"phi coordinates share the factor {g}")

    def check_inverse(self, samples: int = 4, prime: int = MERSENNE61, seed: int = 0):
        if self.inverse is None:
            return
        rep = check_birational(self, samples, prime=prime, seed=seed)
        if not rep.passed:
            raise MapValidationError("psi is not an inverse of phi at random points")

    def to_toml(self) -> str:
        def arr(polys):
            return "[" + ", ".join(f'"{p}"' for p in polys) + "]"

        lines = ["[map]"]
        if self.name:
            lines.append(f'name = "{self.name}"')
        lines.append("vars = [" + ", ".join(f'"{v}"' for v in self.variables) + "]")
        lines.append(f"phi = {arr(self.forward)}")
        if self.inverse is not None:
            lines.append(f"psi = {arr(self.inverse)}")
        return "\n".join(lines) + "\n"


def validate_coordinates(coords: Sequence[Polynomial], label: str) -> int:
    degree = None
    for i, p in enumerate(coords):
        if p.is_zero():
            raise MapValidationError(f"{label}[{i}] is identically zero")
        if not p.is_homogeneous():
            degs = sorted({sum(m) for m in p.terms})
            raise NonHomogeneous(
                f"{label}[{i}] = {p} is not homogeneous (degrees {', '.join(map(str, degs))})", coordinate=i
            )
        d = p.total_degree()
        if degree is None:
            degree = d
        elif d != degree:
            raise DegreeMismatch(
                f"{label}[{i}] has degree {d} but {label}[0] has degree {degree}", coordinate=i
            )
    if degree is None or degree < 1:
        raise MapValidationError(f"{label} must have degree >= 1")
    return degree


_TOML_POS = re.compile(r"\(at line (\d+), column (\d+)\)")


def _locate(text: str, needle: str) -> tuple[int, int]:
    idx = text.find(needle)
    if idx < 0:
        return 1, 1
    line = text.count("\n", 0, idx) + 1
    col = idx - (text.rfind("\n", 0, idx) + 1) + 1
    return line, col


def parse_map(
    text: str,
    source: str | None = None,
    bind: dict | None = None,
    seed: int = 0,
    prime: int = MERSENNE61,
    validate: bool = True,
) -> ProjectiveMap:
    """Read a map file.

    Unbound parameters receive random nonzero values mod ``prime`` drawn from
    ``seed``; their names are recorded in ``random_params``.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _TOML_POS.search(str(exc))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (1, 1)
        raise PolySyntaxError(str(exc).split(" (at line")[0], line, col, source) from None
    if "map" not in doc or not isinstance(doc["map"], dict):
        raise PolySyntaxError("missing [map] section", 1, 1, source)
    sec = doc["map"]
    for key in ("vars", "phi"):
        if key not in sec:
            raise PolySyntaxError(f"[map] is missing '{key}'", 1, 1, source)
    variables = tuple(sec["vars"])
    if len(set(variables)) != len(variables) or len(variables) < 2:
        raise MapValidationError("vars must list at least two distinct names")
    params = list(sec.get("params", []))
    bound = dict(sec.get("bind", {}))
    if bind:
        bound.update(bind)
    for k in bound:
        if k not in params:
            params.append(k)
    rng = random.Random(seed)
    values, randomized = {}, []
    for name in params:
        if name in variables:
            raise MapValidationError(f"parameter {name!r} clashes with a variable")
        if name in bound:
            values[name] = int(bound[name])
        else:
            values[name] = rng.randrange(1, prime)
            randomized.append(name)

    def polys(key):
        out = []
        raw = sec[key]
        if len(raw) != len(variables):
            raise MapValidationError(f"{key} has {len(raw)} coordinates, expected {len(variables)}")
        for s in raw:
            try:
                out.append(parse_polynomial(s, variables, ZZ, values))
            except PolySyntaxError as exc:
                line, col = _locate(text, s)
                raise PolySyntaxError(
                    str(exc).split(": ", 1)[-1], line, col + exc.column - 1 if exc.line == 1 else exc.column, source
                ) from None
        return out

    forward = polys("phi")
    inverse = polys("psi") if "psi" in sec else None
    fmap = ProjectiveMap(
        variables,
        forward,
        inverse,
        params=values,
        random_params=tuple(randomized),
        name=sec.get("name"),
        source_text={"phi": list(sec["phi"]), "params": params},
    )
    if validate:
        fmap.check_reduced(prime)
        fmap.check_inverse(prime=prime, seed=seed)
    return fmap


def load_map(path, **kwargs) -> ProjectiveMap:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_map(text, source=str(path), **kwargs)


# --- direct iteration -------------------------------------------------------


@dataclass
class IterateState:
    index: int
    coordinates: list  # domain elements
    degree: int
    domain: Domain

    def polynomials(self) -> list[Polynomial]:
        return [self.domain.to_polynomial(c) for c in self.coordinates]


def initial_state(fmap: ProjectiveMap, domain: Domain) -> IterateState:
    return IterateState(0, domain.gens(), 1, domain)


def reduce_coordinates(coords: list, domain: Domain, index: int = 0):
    nonzero = [c for c in coords if not domain.is_zero(c)]
    if not nonzero:
        raise AllCoordinatesZero(index)
    g = nonzero[0]
    for c in nonzero[1:]:
        if domain.degree(g) == 0:
            break
        g = domain.gcd(g, c)
    if domain.degree(g) > 0:
        coords = [c if domain.is_zero(c) else domain.try_div(c, g) for c in coords]
    # projective normalization: first nonzero coordinate gets leading coefficient 1
    first = next(c for c in coords if not domain.is_zero(c))
    inv = domain.sinv(domain.lead(first))
    coords = [domain.scale(c, inv) for c in coords]
    degree = max(domain.degree(c) for c in coords if not domain.is_zero(c))
    return coords, degree


def apply(fmap: ProjectiveMap, state: IterateState, inverse: bool = False) -> IterateState:
    """One iterate: compose the map with the state and divide out the coordinate gcd."""
    dom = state.domain
    polys = fmap.inverse if inverse else fmap.forward
    if polys is None:
        raise InverseMissing("map has no declared inverse")
    coords = [dom.evaluate(p, state.coordinates) for p in polys]
    coords, degree = reduce_coordinates(coords, dom, state.index + 1)
    return IterateState(state.index + 1, coords, degree, dom)


def iterate_direct(fmap: ProjectiveMap, domain: Domain, n_max: int, deadline=None):
    """Yield IterateState for n = 0..n_max by repeated apply."""
    import time

    state = initial_state(fmap, domain)
    yield state
    for _ in range(n_max):
        if deadline is not None and time.monotonic() > deadline:
            return
        state = apply(fmap, state)
        yield state


# --- birationality ----------------------------------------------------------


@dataclass
class BirationalReport:
    samples: list[bool]
    prime: int
    seed: int

    @property
    def passed(self) -> bool:
        return bool(self.samples) and all(self.samples)

    @property
    def n_passed(self) -> int:
        return sum(self.samples)


def _proportional(a, b, p) -> bool:
    if not any(a) or not any(b):
        return False
    n = len(a)
    return all((a[i] * b[j] - a[j] * b[i]) % p == 0 for i in range(n) for j in range(i + 1, n))


def check_birational(fmap: ProjectiveMap, samples: int = 20, prime: int = MERSENNE61, seed: int = 0) -> BirationalReport:
    """forward(inverse(P)) ~ P at random points P of GF(prime)^(N+1)."""
    if fmap.inverse is None:
        raise InverseMissing("map has no declared inverse")
    rng = random.Random(seed)
    fwd = [q.with_ring(GF(prime)) for q in fmap.forward]
    inv = [q.with_ring(GF(prime)) for q in fmap.inverse]
    out = []
    for _ in range(samples):
        pt = [rng.randrange(prime) for _ in fmap.variables]
        q = [f.evaluate(pt) for f in inv]
        r = [f.evaluate(q) for f in fwd] if any(q) else [0] * len(pt)
        out.append(_proportional(r, pt, prime))
    return BirationalReport(out, prime, seed)


def inverse_composition_factor(fmap: ProjectiveMap, prime: int = MERSENNE61):
    """inverse(forward(x)) computed symbolically; returns the common factor h with psi(phi(x)) = h*x, or None."""
    if fmap.inverse is None:
        raise InverseMissing("map has no declared inverse")
    dom = FlintMPolyDomain(fmap.variables, prime)
    gens = dom.gens()
    img = [dom.evaluate(p, gens) for p in fmap.forward]
    back = [dom.evaluate(p, img) for p in fmap.inverse]
    h = dom.try_div(back[0], gens[0])
    if h is None:
        return None
    for b, g in zip(back, gens):
        if b != h * g:
            return None
    return h


# --- linear conjugation -----------------------------------------------------


def _det(matrix) -> Fraction:
    m = [[Fraction(v) for v in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return det


def adjugate(matrix) -> list[list[int]]:
    n = len(matrix)
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(matrix) if k != i]
            cof = _det(minor) if minor else Fraction(1)
            adj[j][i] = int(cof) * (-1 if (i + j) % 2 else 1)
    return adj


def _linear_forms(matrix, variables, ring=ZZ) -> list[Polynomial]:
    gens = Polynomial.gens(ring, variables)
    out = []
    for row in matrix:
        acc = Polynomial.zero(ring, variables)
        for c, g in zip(row, gens):
            if c:
                acc = acc + g.scale(c)
        out.append(acc)
    return out


def conjugate(fmap: ProjectiveMap, matrix: Sequence[Sequence[int]]) -> ProjectiveMap:
    """L^-1 o phi o L for an invertible integer matrix L (the adjugate stands in for L^-1)."""
    n = len(fmap.variables)
    matrix = [list(map(int, row)) for row in matrix]
    if len(matrix) != n or any(len(r) != n for r in matrix):
        raise SingularMatrix(f"matrix must be {n}x{n}")
    if _det(matrix) == 0:
        raise SingularMatrix("matrix is singular")
    adj = adjugate(matrix)
    lin = _linear_forms(matrix, fmap.variables)

    def conj(polys):
        inner = [p.substitute(lin) for p in polys]
        outer = [sum((q.scale(c) for c, q in zip(row, inner) if c), Polynomial.zero(ZZ, fmap.variables))
                 for row in adj]
        cont = 0
        from math import gcd

        for q in outer:
            cont = gcd(cont, q.content())
        return [Polynomial._raw(ZZ, q.variables, {m: c // cont for m, c in q.terms.items()}) for q in outer]

    fwd = conj(fmap.forward)
    inv = conj(fmap.inverse) if fmap.inverse is not None else None
    name = f"{fmap.map_id}-conj" if fmap.name else None
    return ProjectiveMap(fmap.variables, fwd, inv, params=dict(fmap.params), name=name)


def random_invertible_matrix(n: int, rng: random.Random, bound: int = 3) -> list[list[int]]:
    while True:
        m = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)]
        if _det(m) != 0:
            return m


def identity_map(variables: Sequence[str]) -> ProjectiveMap:
    return ProjectiveMap(tuple(variables), Polynomial.gens(ZZ, variables), Polynomial.gens(ZZ, variables),
                         name="identity")


def default_domain(fmap: ProjectiveMap, kind: str = "exact", prime: int | None = MERSENNE61, seed: int = 0,
                   backend: str = "flint") -> Domain:
    return make_domain(kind, fmap.variables, prime, seed, backend)
