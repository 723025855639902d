import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcalc.deltaq import (
    DeltaPoly,
    check_frobenius_lift,
    decompose_gamma_iterate,
    decompose_gammaq_iterate,
    gamma_split,
    gammaq_qminus1_closed_form,
    max_discrepancy,
    verify_product_rules,
    verify_sum_rules,
    witness_report,
)
from qcalc.suites import random_delta_poly

N = 6


def x(p, n=N):
    return DeltaPoly.var(p, n, 1, 0)


def dx(p, n=N):
    return DeltaPoly.var(p, n, 1, 1)


def y(p, n=N):
    return DeltaPoly.var(p, n, 2, 0)


def test_frobenius_of_generator():
    for p in (2, 3, 5):
        assert x(p).frobenius() == x(p) ** p + dx(p) * p


def test_frobenius_of_q_minus_one():
    phi = DeltaPoly.t(3, N).frobenius()
    t = DeltaPoly.t(3, N)
    # q^3 - 1 = 3t + 3t^2 + t^3
    assert phi == t * 3 + t * t * 3 + t * t * t


def test_frobenius_of_square_p2():
    expected = x(2) ** 4 + (x(2) ** 2) * dx(2) * 4 + (dx(2) ** 2) * 4
    assert (x(2) ** 2).frobenius() == expected


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_delta_of_square(p):
    expected = (x(p) ** p) * dx(p) * 2 + (dx(p) ** 2) * p
    assert (x(p) ** 2).delta() == expected


def test_delta_of_generator():
    assert x(3).delta() == dx(3)


def test_gamma_has_valuation_minus_one():
    g = x(3).gamma()
    assert g == (x(3) ** 3) / 3
    assert g.min_valuation() == -1


def test_gamma_q_of_q_minus_one_p3():
    t = DeltaPoly.t(3, 4)
    assert t.gamma_q() == -(t * t)
    assert gammaq_qminus1_closed_form(3, 4)["pass"]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_gamma_q_of_q_minus_one_closed_form(p):
    assert gammaq_qminus1_closed_form(p, 8)["pass"]


def test_sum_rules_examples():
    zero = DeltaPoly(2, 4)
    assert verify_sum_rules(x(2, 4), zero)["pass"]
    assert verify_sum_rules(x(2, 4), dx(2, 4))["pass"]
    assert verify_sum_rules(DeltaPoly.t(3, N), x(3))["pass"]


def test_product_rule_gamma_q():
    assert verify_product_rules(x(3), y(3))["pass"]


@pytest.mark.parametrize("f,p,n", [("x", 2, 6), ("x", 5, 4), ("x2", 3, 4)])
def test_gamma_split(f, p, n):
    elem = x(p, n) if f == "x" else x(p, n) ** 2
    assert gamma_split(elem)["pass"]


@pytest.mark.parametrize("n,p,N_,a", [(1, 2, 6, 64), (1, 3, 6, 6), (2, 2, 8, 10)])
def test_decompose_gamma(n, p, N_, a):
    dec = decompose_gamma_iterate(n, p, N_, a)
    assert dec.residual == 0 and dec.passed
    assert witness_report(dec)["pass"]


def test_decompose_gamma_n1_p2_first_slot():
    dec = decompose_gamma_iterate(1, 2, 6)
    assert dec.passed
    assert 1 in dec.ys


@pytest.mark.parametrize("n,p,N_", [(1, 3, 5), (1, 2, 6), (2, 2, 6)])
def test_decompose_gamma_q(n, p, N_):
    dec = decompose_gammaq_iterate(n, p, N_)
    assert dec.residual == 0 and dec.passed


def test_json_round_trip():
    f = (x(3) ** 2) * dx(3) / 3 + DeltaPoly.t(3, N) * y(3)
    assert DeltaPoly.from_json(f.to_json()) == f
    assert all(isinstance(term["coeff"]["val"], str) for term in f.to_json()["terms"])


seeds = st.integers(0, 10 ** 6)
primes = st.sampled_from([2, 3, 5])


@settings(max_examples=30, deadline=None)
@given(primes, seeds)
def test_frobenius_is_ring_homomorphism(p, seed):
    rng = random.Random(seed)
    f, g = random_delta_poly(p, 4, rng), random_delta_poly(p, 4, rng)
    assert (f * g).frobenius() == f.frobenius() * g.frobenius()
    assert (f + g).frobenius() == f.frobenius() + g.frobenius()


@settings(max_examples=30, deadline=None)
@given(primes, seeds)
def test_delta_product_law(p, seed):
    rng = random.Random(seed)
    f, g = random_delta_poly(p, 4, rng), random_delta_poly(p, 4, rng)
    lhs = (f * g).delta()
    rhs = (f ** p) * g.delta() + (g ** p) * f.delta() + f.delta() * g.delta() * p
    assert max_discrepancy(lhs - rhs) == 0


@settings(max_examples=30, deadline=None)
@given(primes, seeds)
def test_frobenius_lifts_p_power(p, seed):
    f = random_delta_poly(p, 4, random.Random(seed))
    assert check_frobenius_lift(f)
    assert f.delta().is_integral()


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_t_power_span_stability(p, n):
    depth = n + 3
    t = DeltaPoly.t(p, depth)
    xs, dxs, ys = x(p, depth), dx(p, depth), y(p, depth)
    for gen in (xs, dxs, xs * ys, DeltaPoly.const(p, depth, 1)):
        e = (t ** n) * gen
        d = e.delta()
        assert d.is_integral() and (d.is_zero() or d.t_order() >= n)
        g = e.gamma_q()
        assert g.is_integral() and (g.is_zero() or g.t_order() >= n + 1)


def test_gamma_budget():
    from qcalc.errors import ValuationBudgetExceeded

    with pytest.raises(ValuationBudgetExceeded):
        (x(3) / 3).gamma(budget=1)
    assert x(3).gamma(budget=1).min_valuation() == -1
    assert Fraction(1, 3) in set((x(3).gamma()).terms[next(iter(x(3).gamma().terms))])
