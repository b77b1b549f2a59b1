import random

import flint
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algentropy.errors import NonDivisible, PolySyntaxError, RingMismatch
from algentropy.poly import (GF, MERSENNE61, ZZ, Polynomial, UniPoly, format_polynomial, is_prime,
                             parse_polynomial, poly_gcd)
from algentropy.poly.domains import FlintMPolyDomain, PyMPolyDomain

V = ("x", "y", "z")


def P(text, ring=ZZ):
    return parse_polynomial(text, V, ring)


monomials = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(monomials, st.integers(-20, 20), max_size=6).map(
    lambda d: Polynomial(ZZ, V, {m: c for m, c in d.items() if c}))
nonzero_polys = polys.filter(lambda p: not p.is_zero())
small_polys = st.dictionaries(st.tuples(*[st.integers(0, 2)] * 3), st.integers(-5, 5), min_size=1, max_size=4).map(
    lambda d: Polynomial(ZZ, V, {m: c for m, c in d.items() if c})).filter(lambda p: not p.is_zero())


def test_parse_precedence_and_powers():
    assert P("x + y*z^2") == P("x + (y*(z^2))")
    assert P("-x^2") == P("-(x^2)")
    assert P("(x+y)^2") == P("x^2 + 2*x*y + y^2")


def test_parse_parameters_fold_into_coefficients():
    p = parse_polynomial("a*x^2 - y", V, params={"a": 3})
    assert p == P("3*x^2 - y")


@pytest.mark.parametrize("text, column", [("x + * y", 5), ("x + w", 5), ("(x + y", 7)])
def test_parse_errors_carry_position(text, column):
    with pytest.raises(PolySyntaxError) as err:
        P(text)
    assert err.value.line == 1
    assert err.value.column == column


def test_homogeneity_and_degree():
    p = P("x^3 + a*z^3 - y*x^2".replace("a", "2"))
    assert p.is_homogeneous() and p.total_degree() == 3
    assert not P("x^2 + y").is_homogeneous()


def test_exact_division_refuses_remainders():
    with pytest.raises(NonDivisible):
        P("x").exact_div(P("y"))
    assert P("x^2 - y^2").exact_div(P("x - y")) == P("x + y")


def test_gcd_of_products():
    a, b, g = P("x - z"), P("y + z"), P("x + y")
    got = poly_gcd(a * g, b * g)
    assert got.is_associate(g)


def test_prime_field_reduction():
    p = P("8*x - 6*y", GF(7))
    assert p == P("x + y", GF(7))


def test_mixed_rings_are_rejected():
    with pytest.raises(RingMismatch):
        P("x") + P("x", GF(7))


def test_is_prime():
    assert is_prime(MERSENNE61)
    assert not is_prime(MERSENNE61 + 2)
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_univariate_basics():
    u = UniPoly(ZZ, [1, -3, 1])
    assert u.to_text() == "s^2 - 3*s + 1"
    q, r = (u * UniPoly(ZZ, [2, 1])).divmod(u)
    assert q == UniPoly(ZZ, [2, 1]) and r.is_zero()
    assert u.gcd(u * UniPoly(ZZ, [1, 1])) == u
    assert u.evaluate(3) == 1


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_format_parse_round_trip(a, b):
    p = a * b - a
    assert parse_polynomial(format_polynomial(p), V) == p


@settings(max_examples=60, deadline=None)
@given(nonzero_polys, nonzero_polys)
def test_exact_div_inverts_multiplication(a, b):
    assert (a * b).exact_div(b) == a


@settings(max_examples=25, deadline=None)
@given(small_polys, small_polys, small_polys)
def test_gcd_divides_both_and_keeps_common_factor(a, b, c):
    g = poly_gcd(a * c, b * c)
    assert g.divides(a * c) and g.divides(b * c)
    assert c.normalize().divides(g)


@settings(max_examples=25, deadline=None)
@given(small_polys, small_polys, small_polys)
def test_pure_python_gcd_agrees_with_flint(a, b, c):
    """Same gcd from the in-house routine and from FLINT, over GF(p)."""
    ring = GF(MERSENNE61)
    dom = FlintMPolyDomain(V)
    a, b = (a * c).with_ring(ring), (b * c).with_ring(ring)
    mine = a.gcd(b)
    theirs = dom.to_polynomial(dom.gcd(dom.from_polynomial(a), dom.from_polynomial(b)))
    assert mine.is_associate(theirs)


def test_domains_agree_on_evaluation():
    rng = random.Random(5)
    p = P("x^3 + 2*z^3 - y*x^2")
    fd, pd = FlintMPolyDomain(V), PyMPolyDomain(V)
    fe, pe = fd.from_polynomial(p), pd.from_polynomial(p)
    for _ in range(5):
        pt = [rng.randrange(MERSENNE61) for _ in V]
        assert int(fd.at(fe, [flint.nmod(v, MERSENNE61) for v in pt])) == pd.at(pe, pt)
