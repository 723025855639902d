import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcalc.errors import GluingMismatch, IndexMismatch, NonEtaleAtP, NotADivisor, UnboundedDegree
from qcalc.habiro import (
    GAUSSIAN,
    GOLDEN,
    INTEGERS,
    EtaleAlgebraSpec,
    HabiroPrecision,
    ModulePresentation,
    build_relative_habiro,
    check_pairs,
    compare_qwitt,
    consistency_check,
    frobenius_lift,
    ghost,
    habiro_from_poly,
    ladder_stabilises,
    ladder_stage,
    module_quotient,
    nakayama_probe,
    resolution_window_check,
)
from qcalc.qcore import ONE, Q, ZqPoly, cyclotomic, q_pochhammer

RINGS = [INTEGERS, GAUSSIAN, GOLDEN]


def test_constant_element():
    E = habiro_from_poly(ONE, [1, 2, 3, 6])
    assert E.valid()
    for m in E.indices:
        assert E[m].coeffs[0].rep == ONE
        assert all(c.is_zero() for c in E[m].coeffs[1:])


def test_q_element_two_indices():
    E = habiro_from_poly(Q, [1, 2], HabiroPrecision(primes=(2,)))
    assert [c.rep for c in E[1].coeffs[:2]] == [ONE, ONE]
    assert [c.rep for c in E[2].coeffs[:2]] == [ZqPoly([-1]), ONE]
    assert E.valid()


def test_pochhammer_on_divisors_of_six():
    assert habiro_from_poly(q_pochhammer(3), range(1, 7)).valid()


def test_consistency_check_examples():
    E = habiro_from_poly(Q ** 2 - 1, [1, 3])
    assert consistency_check(E, 3, 1, 4, 4)["pass"]
    E = habiro_from_poly(q_pochhammer(4), [1, 2, 4])
    assert consistency_check(E, 2, 2, 4, 4)["pass"]


@pytest.mark.parametrize("k", [0, 1, 3])
def test_corruption_is_located(k):
    E = habiro_from_poly(q_pochhammer(2), [1, 2]).corrupt(1, k)
    report = consistency_check(E, 2, 1, 4, 4)
    assert not report["pass"]
    assert report["discrepancy"]["coefficient"] == k


def test_index_set_must_be_divisor_closed():
    with pytest.raises(IndexMismatch):
        habiro_from_poly(Q, [2, 4])
    assert check_pairs([1, 2, 3, 6]) == [(2, 1), (2, 3), (3, 1), (3, 2)]


polys = st.lists(st.integers(-3, 3), min_size=1, max_size=5).map(ZqPoly)
index_sets = st.sampled_from([[1, 2], [1, 3], [1, 2, 4], [1, 2, 3, 6], [1, 2, 4, 8]])


@settings(max_examples=15, deadline=None)
@given(polys, polys, index_sets)
def test_arithmetic_preserves_consistency(f, g, indices):
    precision = HabiroPrecision(N=3, a=3)
    E, F = habiro_from_poly(f, indices, precision), habiro_from_poly(g, indices, precision)
    assert (E + F).valid()
    assert (E - F).valid()
    assert (E * F).valid()


def test_ladder_examples():
    stage = ladder_stage(ModulePresentation.cyclic(Q - 1), 1)
    assert stage["free_rank"] == 1 and not stage["zero"]
    for n in (1, 2, 3):
        assert ladder_stage(ModulePresentation.localisation_window(3), n)["zero"]
    stage = ladder_stage(ModulePresentation.cyclic(cyclotomic(3)), 3)
    assert stage["free_rank"] == 2 and not stage["zero"]


def test_ladder_rejects_unbounded():
    with pytest.raises(UnboundedDegree):
        module_quotient(ModulePresentation.free(), ZqPoly([2, 1]))


@pytest.mark.parametrize("d", [1, 2, 3, 4, 6])
def test_ladder_stabilises_on_cyclotomic_torsion(d):
    P = ModulePresentation.cyclic(cyclotomic(d))
    assert ladder_stabilises(P, range(d, d + 3))["stable"]


def test_nakayama_probe_examples():
    report = nakayama_probe(ModulePresentation.cyclic(cyclotomic(5)), [1, 2, 3, 4, 5])
    assert "5" in report["quotients"] and not report["quotients"]["5"]["zero"]
    assert not report["flagged"]
    report = nakayama_probe(ModulePresentation.localisation_window(6), range(1, 7))
    assert report["flagged"]
    report = nakayama_probe(ModulePresentation.cyclic(Q ** 2 - 1), [1, 2])
    assert not report["quotients"]["1"]["zero"]


@pytest.mark.parametrize("n", [1, 3, 5])
def test_resolution_window(n):
    report = resolution_window_check(n)
    assert report["pass"]
    assert report["checks"]["injective"] and report["checks"]["exact_in_middle"]


def test_resolution_literal_map_does_not_compose_to_zero():
    # (q;q)_i a_{i-1} differs from (1 - q^i) a_{i-1} once i >= 2
    assert resolution_window_check(1)["checks"]["composite_zero_literal"]
    assert not resolution_window_check(3)["checks"]["composite_zero_literal"]


@pytest.mark.parametrize(
    "spec,p,expected",
    [(GAUSSIAN, 5, "x"), (GAUSSIAN, 3, "-x"), (GOLDEN, 2, "1-x"), (GOLDEN, 3, "1-x")],
)
def test_frobenius_lift_examples(spec, p, expected):
    lift = frobenius_lift(spec, p, 4)
    assert lift["image_str"] == expected
    assert lift["unique"] and lift["congruent_to_power"]


@pytest.mark.parametrize("spec,p", [(GAUSSIAN, 2), (GOLDEN, 5)])
def test_frobenius_lift_non_etale(spec, p):
    with pytest.raises(NonEtaleAtP):
        frobenius_lift(spec, p, 4)


def test_etale_spec_validation():
    with pytest.raises(NonEtaleAtP):
        EtaleAlgebraSpec([1, 0, 1])
    spec = EtaleAlgebraSpec.from_json({"g": ["1", "0", "1"], "delta": "2"})
    assert spec.to_json() == {"g": ["1", "0", "1"], "delta": "2"}


def test_integers_components():
    G = build_relative_habiro(INTEGERS, 6)
    assert sorted(G.components) == [1, 2, 3, 6]
    assert G.validation["pass"]


def test_gaussian_gluing():
    G = build_relative_habiro(GAUSSIAN, 3)
    assert G.lifts[3]["image_str"] == "-x"
    with pytest.raises(GluingMismatch):
        G.constant([0, 1])
    G5 = build_relative_habiro(GAUSSIAN, 5)
    assert G5.lifts[5]["image_str"] == "x"
    G5.constant([0, 1])


@pytest.mark.parametrize("spec", RINGS)
@pytest.mark.parametrize("m", range(1, 13))
def test_gluing_validates(spec, m):
    assert build_relative_habiro(spec, m).validation["pass"]


@pytest.mark.parametrize("spec", RINGS)
@pytest.mark.parametrize("m", range(1, 7))
def test_compare_qwitt(spec, m):
    assert compare_qwitt(build_relative_habiro(spec, m))["pass"]


def test_ghost_projection():
    G = build_relative_habiro(INTEGERS, 4)
    one = G.constant([1])
    for d in G.divisors:
        assert ghost(G, d, one) == G.components[d].from_terms({(0, 0): 1})
    q = G.q_element()
    assert ghost(G, 2, q) == G.components[2].from_terms({(1, 0): 1})
    with pytest.raises(NotADivisor):
        ghost(G, 3, one)
