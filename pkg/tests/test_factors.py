import random

import pytest

from algentropy.errors import BudgetExceeded, InsufficientDepth, SpanExceedsData
from algentropy.factors.adventive import adventive_analysis, minimal_period
from algentropy.factors.derived import DerivedRecurrence, char_poly_of_recurrence, derive_recurrence, parse_relation
from algentropy.factors.laurent import Init, laurent_test, random_point, with_coefficients
from algentropy.factors.pattern import NotStabilized, detect_stabilization
from algentropy.factors.tracker import track_factors
from algentropy.maps.projective import conjugate, identity_map, random_invertible_matrix
from algentropy.methods.roots import dominant_root
from algentropy.reference import load_reference

GOLDEN_SQ = (3 + 5 ** 0.5) / 2


@pytest.fixture(scope="module")
def hv_relation(relations):
    r = relations["hv_derived"]
    return parse_relation(r["text"], r["params"], family="A")


@pytest.fixture(scope="module")
def f4_relation(f4_line_track):
    return derive_recurrence(f4_line_track, detect_stabilization(f4_line_track))


# tracking and templates

def test_hv_line_tracking_degrees(hv_line_track, hv_ref):
    assert hv_line_track.degrees == hv_ref["degrees"] + [165889]


def test_hv_template_stabilizes_early(hv_line_track, hv_ref):
    pat = detect_stabilization(hv_line_track)
    assert pat.onset <= 8
    assert pat.render("A", ("x", "y", "z")) == hv_ref["stable_pattern"]
    assert not pat.degenerate


def test_exact_and_line_tracking_agree(hv_exact_track, hv_line_track):
    pat_e = detect_stabilization(hv_exact_track, window=3)
    pat_l = detect_stabilization(hv_line_track)
    assert pat_e.templates == pat_l.templates
    assert hv_exact_track.degrees == hv_line_track.degrees[:8]


def test_identity_map_is_degenerate():
    res = track_factors(identity_map(("x", "y", "z")), 6, mode="exact")
    pat = detect_stabilization(res)
    assert pat.degenerate
    with pytest.raises(SpanExceedsData):
        derive_recurrence(res, pat)


def test_short_track_does_not_stabilize(hv_map):
    res = track_factors(hv_map, 5, mode="line")
    out = detect_stabilization(res, window=5)
    assert isinstance(out, NotStabilized)
    assert not out


def test_shared_residual_is_split(hv_map):
    rng = random.Random(11)
    random_invertible_matrix(3, rng)
    m = random_invertible_matrix(3, rng)
    res = track_factors(conjugate(hv_map, m), 6, mode="line")
    assert res.degrees == [1, 3, 9, 27, 73, 195, 513]
    assert any(e.kind == "ResidualNotNew" for e in res.events)


def test_budget_returns_partial_track(f4_map):
    with pytest.raises(BudgetExceeded) as err:
        track_factors(f4_map, 400, mode="line", max_seconds=0.5)
    part = err.value.partial
    assert not part.complete
    assert part.degrees[:6] == [1, 4, 5, 9, 11, 16]


# derived relations

def test_hv_relation_from_exact_tracking(hv_exact_track, hv_relation):
    rec = derive_recurrence(hv_exact_track, detect_stabilization(hv_exact_track, window=3), family="A")
    assert rec.verified
    assert rec.verification["checked"] >= 20
    assert rec.equivalent(hv_relation, up_to_signs=True)
    assert rec.structure() == hv_relation.structure()
    root = dominant_root(char_poly_of_recurrence(rec)).value
    assert abs(root - GOLDEN_SQ) < 1e-9


def test_sign_equivalence_is_not_plain_equality(hv_exact_track, hv_relation):
    rec = derive_recurrence(hv_exact_track, detect_stabilization(hv_exact_track, window=3), family="A")
    flipped = DerivedRecurrence.from_dict(rec.to_dict())
    t = flipped.terms[0]
    flipped.terms = (type(t)(-t.coefficient * 3, t.decoration, t.factors),) + flipped.terms[1:]
    assert not rec.equivalent(flipped, up_to_signs=True)


def test_hv_line_relation_has_generic_coefficients(hv_line_track, hv_relation):
    rec = derive_recurrence(hv_line_track, detect_stabilization(hv_line_track))
    assert rec.structure() == hv_relation.structure()
    assert rec.equivalent(hv_relation, coefficients=False)
    assert not rec.equivalent(hv_relation)


def test_relation_span_larger_than_data(hv_map):
    res = track_factors(hv_map, 6, mode="line")
    with pytest.raises(SpanExceedsData):
        derive_recurrence(res, detect_stabilization(res, window=2))


def test_f4_relation_structure(f4_relation, relations, f4_ref):
    at44 = parse_relation(relations["f4_at_44"]["text"])
    assert f4_relation.verified
    assert f4_relation.order == 27
    assert f4_relation.structure() == at44.structure()
    assert f4_relation.window[0] == f4_ref["stabilization_onset"] + 1


def test_f4_characteristic_polynomial(relations, f4_ref):
    at44 = parse_relation(relations["f4_at_44"]["text"])
    assert char_poly_of_recurrence(at44).coeffs == f4_ref["characteristic_polynomial"]
    general = parse_relation(relations["f4_general"]["text"])
    assert dominant_root(char_poly_of_recurrence(general)).decimal == f4_ref["growth_value"]


def test_hv_characteristic_polynomial(relations, hv_relation):
    assert char_poly_of_recurrence(hv_relation).coeffs == relations["hv_derived"]["characteristic_polynomial"]


def test_relation_round_trip(f4_relation):
    again = DerivedRecurrence.from_dict(f4_relation.to_dict())
    assert again.to_dict() == f4_relation.to_dict()
    assert again.decorations == f4_relation.decorations


# Laurent checks

def test_hv_laurent_prefix(hv_relation, hv_ref):
    pre = hv_ref["laurent_prefix"]
    rep = laurent_test(hv_relation, Init.ALL_ONES, steps=6, point={"z": pre["z"]})
    assert rep.exact
    assert rep.values[:4] == pre["values"]


def test_hv_laurent_stops_on_size_budget(hv_relation):
    rep = laurent_test(hv_relation, steps=30, point={"z": 1}, max_digits=10**4)
    assert rep.exact
    assert rep.stopped == "budget"
    assert rep.steps_done < 30


def test_laurent_all_ones_with_unit_parameter(relations):
    rec = parse_relation(relations["hv_derived"]["text"], {"a": 1}, family="A")
    rep = laurent_test(rec, steps=30, point={"z": 1})
    assert rep
    assert set(rep.values) == {1}


def test_laurent_flags_non_integral_values():
    rec = parse_relation("B[k-2]*B[k] = B[k-1] + 2")
    rep = laurent_test(rec, steps=10, initial=[1, 2])
    assert not rep.exact
    assert rep.stopped == "non-exact"
    assert "first non-integral" in rep.to_text()


def test_laurent_generic_coefficients_need_values(f4_relation):
    with pytest.raises(ValueError):
        laurent_test(f4_relation, steps=3)


def test_f4_laurent_with_tracked_decorations(f4_relation, relations):
    coefs = with_coefficients(f4_relation, parse_relation(relations["f4_at_44"]["text"]))
    first = min(f4_relation.decorations) - f4_relation.order
    rep = laurent_test(f4_relation, steps=40, point=random_point("xyzut", 5), decorations=f4_relation.decorations,
                       coefficients=coefs, first_index=first)
    assert rep.exact
    assert rep.steps_done >= 10
    assert rep.stopped == "decorations"


# adventive monomials

def test_minimal_period():
    assert minimal_period([1, 2, 3, 1, 2, 3, 1]).period == 3
    assert minimal_period([1, 2, 3, 1, 2, 3, 1]).confirmed
    assert minimal_period([1, 2]) is None
    assert minimal_period([0, 1, 2, 3]) is None


def test_adventive_tables_agree_with_reference(f4_line_track):
    ref = load_reference("adventive_4d")
    table = adventive_analysis(f4_line_track, reference=ref)
    rc = table.reference_check
    assert rc["compared"] > 0 and rc["matched"] == rc["compared"]
    assert table.variable_periods["y"] == ref["periods"]["Y"]
    assert table.variable_periods["z"] == ref["periods"]["Z"]
    assert all(s["holds"] for s in table.shift_checks)
    # the longer periods have not been seen twice at this depth
    assert not table.complete
    assert "tentative" in table.to_text()


def test_adventive_needs_depth(hv_map):
    res = track_factors(hv_map, 2, mode="line")
    with pytest.raises(InsufficientDepth):
        adventive_analysis(res)
