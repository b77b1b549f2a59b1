import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algentropy.errors import InsufficientData, NoRootInRange
from algentropy.methods.gf import (RationalGF, compare_expansion, cyclotomic, expand_gf, gf_from_recurrence,
                                   strip_cyclotomic)
from algentropy.methods.ratios import ratio_table, render_ratio
from algentropy.methods.recurrence import LinearRecurrence, NoFit, fit_linear_recurrence
from algentropy.methods.report import entropy_report, method2, minimal_polynomial_claim
from algentropy.methods.roots import Which, dominant_root, largest_real_root_interval
from algentropy.poly import UniPoly
from algentropy.poly.ring import ZZ

GOLDEN_SQ = (3 + math.sqrt(5)) / 2


def test_render_ratio_forms():
    assert render_ratio(Fraction(3)) == "3."
    assert render_ratio(Fraction(5, 4)) == "1.250000000"
    assert render_ratio(Fraction(73, 27)) == "2.703703704"
    assert render_ratio(Fraction(1, 7)) == "0.1428571429"


def test_hv_ratio_table_matches_printed_prefixes(hv_ref):
    table = ratio_table(hv_ref["degrees"])
    for (n, printed), row in zip(hv_ref["ratio_table"], table.rows):
        assert row.n == n
        if printed.endswith("..."):
            assert row.text.startswith(printed[:-3])
        else:
            assert row.text == printed


def test_ratio_table_rejects_bad_input():
    with pytest.raises(ValueError):
        ratio_table([1])
    with pytest.raises(ValueError):
        ratio_table([1, 0, 2])


def test_fit_finds_hv_recurrence(hv_ref):
    rec = fit_linear_recurrence(hv_ref["degrees"], holdout=4)
    assert isinstance(rec, LinearRecurrence)
    assert rec.coefficients == (3, 0, -3, 1)
    assert rec.holds_on(hv_ref["degrees"])
    assert rec.extend(hv_ref["degrees"], 2)[-2:] == [165889, 434307]


def test_fit_on_fibonacci_like_data():
    fib = [1, 1]
    for _ in range(20):
        fib.append(fib[-1] + fib[-2])
    rec = fit_linear_recurrence(fib, holdout=4)
    assert rec.coefficients == (1, 1)


def test_fit_needs_room():
    with pytest.raises(InsufficientData):
        fit_linear_recurrence([1, 2, 3, 4, 5], holdout=4)
    with pytest.raises(ValueError):
        fit_linear_recurrence(list(range(1, 20)), holdout=2)


def test_fit_gives_nofit_on_long_4d_data(f4_ref):
    out = fit_linear_recurrence(f4_ref["degrees"], holdout=8)
    assert isinstance(out, NoFit)
    assert not out


def test_recurrence_round_trip(hv_ref):
    rec = fit_linear_recurrence(hv_ref["degrees"], holdout=4)
    assert LinearRecurrence.from_dict(rec.to_dict()) == rec


def test_gf_from_recurrence_matches_reference(hv_ref):
    rec = fit_linear_recurrence(hv_ref["degrees"], holdout=4)
    gf = gf_from_recurrence(hv_ref["degrees"], rec)
    ref = RationalGF.from_dict(hv_ref["generating_function"]).normalized()
    assert gf == ref
    assert expand_gf(gf, 11) == hv_ref["degrees"]


def test_cyclotomic_polynomials():
    assert cyclotomic(1).coeffs == [-1, 1]
    assert cyclotomic(2).coeffs == [1, 1]
    assert cyclotomic(6).coeffs == [1, -1, 1]
    assert cyclotomic(12).coeffs == [1, 0, -1, 0, 1]


def test_strip_cyclotomic_leaves_hv_core():
    split = strip_cyclotomic([1, -3, 0, 3, -1])
    assert split.core.coeffs == [1, -3, 1]
    assert sorted(split.removed) == [1, 2]
    assert (split.core * split.removed_product()).coeffs == [split.unit * c for c in [1, -3, 0, 3, -1]]


def test_strip_cyclotomic_of_pure_cyclotomic_product():
    p = cyclotomic(7) * cyclotomic(32) * cyclotomic(1)
    assert strip_cyclotomic(p).core.degree() == 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=2, max_size=6).filter(lambda c: c[-1] != 0))
def test_strip_then_multiply_recovers_polynomial(coeffs):
    split = strip_cyclotomic(coeffs)
    back = split.core * split.removed_product()
    assert [split.unit * c for c in back.coeffs] == UniPoly(ZZ, coeffs).coeffs


def test_largest_real_root_golden():
    lo, hi = largest_real_root_interval(UniPoly(ZZ, [1, -3, 1]))
    assert lo <= Fraction(GOLDEN_SQ) <= hi or abs(float(lo) - GOLDEN_SQ) < 1e-12
    rate = dominant_root([1, -3, 1])
    assert abs(rate.value - GOLDEN_SQ) < 1e-12
    assert rate.agrees


def test_smallest_modulus_reciprocal():
    rate = dominant_root([1, -3, 1], Which.SMALLEST_MODULUS_RECIPROCAL)
    assert abs(rate.value - GOLDEN_SQ) < 1e-12


def test_no_root_above_one():
    with pytest.raises(NoRootInRange):
        largest_real_root_interval(UniPoly(ZZ, [1, 0, 1]))
    assert method2([1, 0, 1]).value == 0.0


def test_characteristic_root_matches_q_reciprocal(f4_ref, gf4_ref):
    big = dominant_root(f4_ref["characteristic_polynomial"])
    assert big.decimal == f4_ref["growth_value"]
    small = dominant_root(gf4_ref["Q"], Which.SMALLEST_MODULUS_RECIPROCAL)
    assert abs(small.value - big.value) < 1e-9


def test_minimal_polynomial_claim():
    assert minimal_polynomial_claim(UniPoly(ZZ, [1, -3, 1]))[1]
    assert not minimal_polynomial_claim(UniPoly(ZZ, [-2, 1, 1]))[1]  # root 1
    quartic = UniPoly(ZZ, [1, -3, 1]) * UniPoly(ZZ, [1, 1, 1])
    assert not minimal_polynomial_claim(quartic)[1]


def test_entropy_report_hv_consistent(hv_ref):
    rep = entropy_report(hv_ref["degrees"], holdout=4, char_poly=[-1, 3, 0, -3, 1])
    assert rep.consistent
    m1 = rep.by_method("Method1")
    assert abs(m1.value - math.log(GOLDEN_SQ)) < 1e-9
    assert m1.diagnostics["minimal_polynomial"] == "s^2 - 3*s + 1"
    assert "verdict: consistent" in rep.to_text()


def test_entropy_report_zero_for_polynomial_growth():
    linear = list(range(1, 25))
    rep = entropy_report(linear, holdout=8)
    assert rep.by_method("Method1").value == 0.0


def test_expansion_flags_the_misprint(f4_ref, gf4_ref):
    rep = compare_expansion(RationalGF.from_dict(gf4_ref["g_p"]), f4_ref["degrees"])
    assert rep.agreed == 53
    assert [i for i, _, _ in rep.discrepancies] == [53]
    assert "DISCREPANCY at index 53" in rep.to_text()
