import random
import time

import pytest

from algentropy.errors import (BudgetExceeded, DegreeMismatch, MapValidationError, NonHomogeneous,
                               PolySyntaxError)
from algentropy.maps.degrees import (DegreeSequence, degree_sequence_exact, degree_sequence_line,
                                     submultiplicativity_violations)
from algentropy.maps.factored import FactoredIterator
from algentropy.maps.projective import (check_birational, conjugate, identity_map, iterate_direct, parse_map,
                                        random_invertible_matrix)
from algentropy.poly.domains import make_domain

HV_TEXT = """
[map]
vars = ["x", "y", "z"]
params = ["a"]
phi = ["x^3 + a*z^3 - y*x^2", "x^3", "x^2*z"]
"""


def test_unbound_parameter_gets_a_random_value():
    fmap = parse_map(HV_TEXT, seed=3)
    assert fmap.random_params == ("a",)
    assert fmap.params["a"] != 0


def test_bound_parameter(hv_map):
    assert hv_map.params == {"a": 2}
    assert hv_map.degree == 3


def test_syntax_error_points_at_the_coordinate():
    bad = '[map]\nvars = ["x", "y"]\nphi = ["x^2 + ", "y^2"]\n'
    with pytest.raises(PolySyntaxError) as err:
        parse_map(bad, source="bad.map")
    assert err.value.line == 3
    assert "bad.map" in str(err.value)


def test_nonhomogeneous_coordinate_is_named():
    with pytest.raises(NonHomogeneous) as err:
        parse_map('[map]\nvars = ["x", "y"]\nphi = ["x^2 + y", "y^2"]\n')
    assert err.value.coordinate == 0


def test_coordinates_of_different_degrees():
    with pytest.raises(DegreeMismatch):
        parse_map('[map]\nvars = ["x", "y"]\nphi = ["x^2", "y^3"]\n')


def test_common_factor_is_rejected():
    with pytest.raises(MapValidationError):
        parse_map('[map]\nvars = ["x", "y"]\nphi = ["x^2", "x*y"]\n')


def test_wrong_inverse_is_rejected():
    text = '[map]\nvars = ["x", "y", "z"]\nphi = ["y*z", "x*z", "x*y"]\npsi = ["x", "y", "z"]\n'
    with pytest.raises(MapValidationError):
        parse_map(text)


def test_identity_map_has_constant_degrees():
    seq = degree_sequence_exact(identity_map(["x", "y", "z"]), 6)
    assert seq.values == [1] * 7


def test_standard_cremona_involution():
    fmap = parse_map('[map]\nvars = ["x", "y", "z"]\nphi = ["y*z", "x*z", "x*y"]\npsi = ["y*z", "x*z", "x*y"]\n')
    assert degree_sequence_exact(fmap, 6).values == [1, 2, 1, 2, 1, 2, 1]
    assert check_birational(fmap).passed


def test_hv_exact_prefix(hv_map, hv_ref):
    seq = degree_sequence_exact(hv_map, 6)
    assert seq.values == hv_ref["degrees"][:7]


def test_direct_and_factored_iteration_agree(hv_map):
    a = degree_sequence_exact(hv_map, 5, method="direct").values
    b = degree_sequence_exact(hv_map, 5, method="factored").values
    assert a == b


def test_pure_python_backend_cross_check(hv_map, f4_map):
    assert (degree_sequence_line(hv_map, 8, backend="python").values
            == degree_sequence_line(hv_map, 8).values)
    assert (degree_sequence_exact(f4_map, 5, backend="python").values
            == degree_sequence_exact(f4_map, 5).values)


def test_line_mode_matches_exact(f4_map):
    assert degree_sequence_line(f4_map, 10).values == degree_sequence_exact(f4_map, 10).values


def test_budget_exhaustion_keeps_partial_result(f4_map):
    with pytest.raises(BudgetExceeded) as err:
        degree_sequence_exact(f4_map, 40, max_seconds=0.5)
    part = err.value.partial
    assert not part.complete and len(part.values) >= 1


def test_artifact_round_trip(hv_map):
    seq = degree_sequence_line(hv_map, 6, seed=4)
    again = DegreeSequence.from_json(seq.to_json())
    assert again.values == seq.values and again.seeds == seq.seeds
    assert seq.to_json() == degree_sequence_line(hv_map, 6, seed=4).to_json()


def test_submultiplicativity_detector():
    assert submultiplicativity_violations([1, 2, 4, 8]) == []
    assert submultiplicativity_violations([1, 2, 5]) == [(1, 1)]


def test_birational_maps(f4_map):
    rep = check_birational(f4_map, samples=20)
    assert rep.n_passed == 20


def test_conjugation_preserves_degrees(hv_map):
    rng = random.Random(11)
    base = degree_sequence_line(hv_map, 8).values
    for _ in range(3):
        m = random_invertible_matrix(3, rng)
        assert degree_sequence_line(conjugate(hv_map, m), 8).values == base


def test_factored_coordinates_reconstruct_engine_iterates(hv_map):
    dom = make_domain("exact", hv_map.variables)
    it = FactoredIterator(hv_map, dom)
    it.run(5)
    for state in iterate_direct(hv_map, make_domain("exact", hv_map.variables), 5):
        got = it.coordinate_values(state.index)
        ref = state.coordinates
        # projective equality: proportional coordinate vectors
        i = next(j for j, c in enumerate(ref) if not c.is_zero())
        for a, b in zip(got, ref):
            assert a * ref[i] == b * got[i]


def test_exact_budget_is_a_hard_limit(hv_map):
    t0 = time.monotonic()
    with pytest.raises(BudgetExceeded) as err:
        degree_sequence_exact(hv_map, 11, max_seconds=2)
    assert time.monotonic() - t0 < 10
    assert err.value.partial.values == [1, 3, 9, 27, 73, 195, 513][:len(err.value.partial.values)]
    assert not err.value.partial.complete


def test_bounded_run_returns_full_sequence(f4_map, f4_ref):
    assert degree_sequence_exact(f4_map, 10, max_seconds=60).values == f4_ref["degrees"][:11]
