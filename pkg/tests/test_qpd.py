from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcalc.deltaq import DeltaPoly
from qcalc.errors import InsufficientTruncation, ZeroElement
from qcalc.qcore import ZqPoly, cyclotomic, q_factorial
from qcalc.qpd import (
    QDivModule,
    alpha_one_obstruction,
    build_gamma_q_tilde,
    frobenius_q_factorial,
    gammaq_qminus1_closed_form,
    nygaard_level,
    nygaard_rationalised_image,
    phi_divided_power_divisibility,
    q_factorial_unit_ratio,
    tilde_residue_check,
)


def test_nygaard_level_examples():
    assert nygaard_level(QDivModule(3, 4, 4, {0: 1})) == 0
    assert nygaard_level(QDivModule(3, 4, 4, {1: 1})) == 1
    assert nygaard_level(QDivModule(3, 4, 4, {0: cyclotomic(3)})) == 1


def test_nygaard_level_of_zero_raises():
    with pytest.raises(ZeroElement):
        nygaard_level(QDivModule(2, 3, 3))


def test_fractional_index_floor():
    assert nygaard_level(QDivModule(2, 3, 4, {Fraction(3, 2): 1})) == 1


@pytest.mark.parametrize("n,p", [(0, 2), (1, 2), (2, 3), (3, 2)])
def test_nygaard_rationalised_image(n, p):
    assert nygaard_rationalised_image(n, p, 4, n + 2, n + 1)["pass"]


def test_nygaard_rationalised_image_needs_room():
    with pytest.raises(InsufficientTruncation):
        nygaard_rationalised_image(3, 2, 4, 5, 2)


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from([2, 3]),
    st.integers(0, 6),
    st.integers(0, 3),
    st.integers(0, 6),
    st.integers(0, 3),
)
def test_nygaard_levels_superadditive(p, i2, n1, j2, n2):
    # indices in N[1/p]; i2, j2 count steps of 1/p
    kw = {"p": p, "a": 4, "N": 8}
    e = QDivModule.spanning_element(i=Fraction(i2, p), n=n1, **kw)
    f = QDivModule.spanning_element(i=Fraction(j2, p), n=n2, **kw)
    prod = e * f
    if not prod.is_zero():
        assert nygaard_level(prod) >= nygaard_level(e) + nygaard_level(f)


@pytest.mark.parametrize(
    "p,n,expected",
    [(2, 1, ZqPoly([1])), (2, 2, ZqPoly([1, 1, 1])), (3, 1, ZqPoly([1, 1]))],
)
def test_unit_ratio_examples(p, n, expected):
    w = q_factorial_unit_ratio(p, n)
    assert w == expected
    assert w(1) % p != 0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("n", range(1, 7))
def test_unit_ratio_exact_everywhere(p, n):
    w = q_factorial_unit_ratio(p, n)
    assert w * frobenius_q_factorial(n, p) * cyclotomic(p) ** n == q_factorial(p * n)
    assert w(1) % p != 0


@pytest.mark.parametrize("n,p", [(1, 2), (2, 2), (1, 3), (3, 5)])
def test_phi_divided_power_divisibility(n, p):
    assert phi_divided_power_divisibility(n, p, 4)["pass"]


@pytest.mark.parametrize("alpha", [2, 3])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_gamma_q_tilde_certificates(alpha, p):
    report = build_gamma_q_tilde(alpha, p, 2 * p + 2)
    assert report["C1"] and report["C2"] and report["C3"] and report["pass"]


def test_gamma_q_tilde_paper_parameters():
    assert build_gamma_q_tilde(2, 3, 8, 8)["pass"]
    assert build_gamma_q_tilde(2, 5, 10, 10)["pass"]


def test_gamma_q_tilde_rejects_alpha_one():
    with pytest.raises(ValueError):
        build_gamma_q_tilde(1, 3, 8)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_alpha_one_obstruction(p):
    report = alpha_one_obstruction(p, p + 3)
    assert report["nonzero"] and report["expected_coordinate_found"]


def test_alpha_one_obstruction_p3_coordinate():
    report = alpha_one_obstruction(3, 6, 6)
    hits = [r for r in report["residue"] if r["monomial"] == "dx" and r["t"] == 2]
    assert hits and hits[0]["pval"] == -1


@pytest.mark.parametrize("p", [2, 3, 5])
def test_modified_element_has_no_residue(p):
    assert tilde_residue_check(2, p, 2 * p + 2)


def test_gamma_q_of_q_minus_one_p2_vanishes():
    assert DeltaPoly.t(2, 6).gamma_q().is_zero()
    assert gammaq_qminus1_closed_form(2, 6)["pass"]
    assert gammaq_qminus1_closed_form(5, 8)["pass"]
