"""Multivariate gcd.

Over a prime field: recursive primitive remainder sequence in the highest
occurring variable, contents handled by recursion on the remaining ones.
Over ZZ: images modulo several word-size primes combined by CRT, checked by
trial division.
"""
from __future__ import annotations

from math import gcd as igcd

from ..errors import NonDivisible
from .polynomial import Polynomial, grlex_key
from .ring import GF, MERSENNE61, ZZ, is_prime


def _main_var(*polys: Polynomial) -> int:
    best = -1
    for p in polys:
        for m in p.terms:
            for i in range(len(m) - 1, best, -1):
                if m[i]:
                    best = i
                    break
    return best


def _coeffs_in(p: Polynomial, v: int) -> dict[int, Polynomial]:
    """Split p as sum_e c_e * x_v^e with c_e free of x_v."""
    parts: dict[int, dict] = {}
    for m, c in p.terms.items():
        e = m[v]
        mm = m[:v] + (0,) + m[v + 1:]
        parts.setdefault(e, {})[mm] = c
    return {e: Polynomial._raw(p.ring, p.variables, t) for e, t in parts.items()}


def _from_coeffs(parts: dict[int, Polynomial], v: int, like: Polynomial) -> Polynomial:
    terms = {}
    for e, c in parts.items():
        for m, val in c.terms.items():
            terms[m[:v] + (e,) + m[v + 1:]] = val
    return Polynomial._raw(like.ring, like.variables, terms)


def _content(p: Polynomial, v: int) -> Polynomial:
    g = None
    for c in _coeffs_in(p, v).values():
        g = c if g is None else _gf_gcd(g, c)
        if g.is_constant():
            return Polynomial.one(p.ring, p.variables)
    return g


def _prem(a: dict[int, Polynomial], b: dict[int, Polynomial]) -> dict[int, Polynomial]:
    """Pseudo-remainder of a by b, both given by coefficient dicts in one variable."""
    db = max(b)
    lc = b[db]
    r = dict(a)
    while r and max(r) >= db:
        da = max(r)
        c = r.pop(da)
        shift = da - db
        r = {e: x * lc for e, x in r.items()}
        for e, x in b.items():
            if e == db:
                continue
            k = e + shift
            val = r.get(k)
            t = val - c * x if val is not None else -(c * x)
            if t.is_zero():
                r.pop(k, None)
            else:
                r[k] = t
    return r


def _gf_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero():
        return b.normalize()
    if b.is_zero():
        return a.normalize()
    v = _main_var(a, b)
    if v < 0:
        return Polynomial.one(a.ring, a.variables)
    ca, cb = _content(a, v), _content(b, v)
    g_cont = _gf_gcd(ca, cb)
    pa, pb = a.exact_div(ca), b.exact_div(cb)
    da, db = pa.degree_in(v), pb.degree_in(v)
    if da == 0 or db == 0:
        return g_cont.normalize()
    A, B = _coeffs_in(pa, v), _coeffs_in(pb, v)
    if da < db:
        A, B = B, A
    while True:
        R = _prem(A, B)
        if not R:
            break
        rpoly = _from_coeffs(R, v, a)
        if max(R) == 0:
            return g_cont.normalize()
        rpoly = rpoly.exact_div(_content(rpoly, v))
        A, B = B, _coeffs_in(rpoly, v)
    g = _from_coeffs(B, v, a)
    g = g.exact_div(_content(g, v))
    return (g * g_cont).normalize()


def _crt_primes():
    p = MERSENNE61
    while True:
        p -= 2
        if is_prime(p):
            yield p


def _zz_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero():
        return b.normalize()
    if b.is_zero():
        return a.normalize()
    a, b = a.normalize(), b.normalize()
    gamma = igcd(a.leading_coefficient(), b.leading_coefficient())
    bound_lm = None
    acc: dict | None = None
    modulus = 1
    prev = None
    for p in _crt_primes():
        if a.leading_coefficient() % p == 0 or b.leading_coefficient() % p == 0:
            continue
        ring = GF(p)
        gp = _gf_gcd(a.with_ring(ring), b.with_ring(ring))
        if gp.is_constant():
            return Polynomial.one(ZZ, a.variables)
        lm = gp.leading_monomial()
        if bound_lm is not None and grlex_key(lm) > grlex_key(bound_lm):
            continue  # unlucky prime
        gp = gp.scale(gamma)
        if bound_lm is None or grlex_key(lm) < grlex_key(bound_lm):
            bound_lm, acc, modulus, prev = lm, dict(gp.terms), p, None
        else:
            new = {}
            inv = pow(modulus, -1, p)
            for m in set(acc) | set(gp.terms):
                x = acc.get(m, 0)
                y = gp.terms.get(m, 0)
                new[m] = (x + modulus * ((y - x) * inv % p)) % (modulus * p)
            acc, modulus = new, modulus * p
        half = modulus // 2
        lifted = {m: (c - modulus if c > half else c) for m, c in acc.items() if c}
        cand = Polynomial._raw(ZZ, a.variables, lifted).normalize()
        if prev is not None and cand == prev:
            try:
                a.exact_div(cand)
                b.exact_div(cand)
            except NonDivisible:
                pass
            else:
                return cand
        prev = cand


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Normalized gcd: monic over GF(p), primitive with positive leading coefficient over ZZ."""
    a._check(b)
    if a.ring.is_field:
        return _gf_gcd(a, b)
    return _zz_gcd(a, b)


def poly_gcd_many(polys) -> Polynomial:
    polys = list(polys)
    g = polys[0].normalize()
    for p in polys[1:]:
        if g.is_constant() and not g.is_zero():
            break
        g = poly_gcd(g, p)
    return g
