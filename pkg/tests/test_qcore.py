import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qcalc.errors import IndexMismatch, InsufficientInputPrecision, NotAUnit
from qcalc.qcore import (
    ONE,
    Q,
    LocalElement,
    Precision,
    RootSeries,
    ZqPoly,
    crt_exponent,
    cyclotomic,
    discriminant,
    embed_cyclotomic,
    embed_series,
    format_poly,
    invert,
    k_max,
    q_analogue,
    q_binomial,
    q_factorial,
    q_integer,
    q_pochhammer,
    reexpand,
    series_in_t,
    taylor_at_root,
    unit_decompose,
    zeta,
)

small_polys = st.lists(st.integers(-6, 6), min_size=1, max_size=21).map(ZqPoly)


def test_cyclotomic_small_cases():
    assert cyclotomic(1) == Q - 1
    assert cyclotomic(2) == Q + 1
    assert format_poly(cyclotomic(6)) == "1-q+q^2"


@pytest.mark.parametrize("m", [1, 2, 3, 4, 6, 12, 15, 30, 105])
def test_cyclotomic_matches_sympy(m):
    q = sympy.Symbol("q")
    oracle = sympy.Poly(sympy.cyclotomic_poly(m, q), q).all_coeffs()[::-1]
    assert cyclotomic(m).dense() == [int(c) for c in oracle]


def test_q_analogue_examples():
    assert format_poly(q_analogue("integer", 3)) == "1+q+q^2"
    assert format_poly(q_analogue("factorial", 3)) == "1+2q+2q^2+q^3"
    assert q_analogue("pochhammer", 2) == ZqPoly([1, -1, -1, 1])
    assert q_integer(-2) == -(ZqPoly([1, 1]).shift(-2))


def test_q_analogue_rejects_unknown_kind():
    with pytest.raises(ValueError):
        q_analogue("gamma", 3)


@pytest.mark.parametrize("n", range(0, 31, 5))
def test_binomial_times_factorials(n):
    for k in range(n + 1):
        assert q_binomial(n, k) * q_factorial(k) * q_factorial(n - k) == q_factorial(n)


def test_factorial_is_product_of_integers():
    for n in range(12):
        prod = ONE
        for k in range(1, n + 1):
            prod = prod * q_integer(k)
        assert prod == q_factorial(n)


def test_unit_decompose_examples():
    assert unit_decompose(2, 4).rep == ONE
    assert unit_decompose(3, 4).rep == Q
    assert unit_decompose(5, 2).rep == ZqPoly([-1, 2])


@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("N", [1, 4, 9, 16])
def test_unit_decompose_identity(p, N):
    u = unit_decompose(p, N)
    residual = u.rep * p + (Q - 1) ** (p - 1) - q_integer(p)
    prec = Precision("qpower", 1, N)
    assert LocalElement(residual, prec).is_zero()
    assert LocalElement(u.rep - 1, Precision("qpower", 1, 1)).is_zero()


def test_invert_examples():
    one = LocalElement(ONE, Precision("qpower", 1, 3))
    assert invert(one) == one
    prec = Precision("qpower", 1, 2, 3, 3)
    q = LocalElement(Q, prec)
    inv = invert(q)
    assert inv.rep == ZqPoly([2, 26])
    assert q * inv == LocalElement(1, prec)
    with pytest.raises(NotAUnit):
        invert(LocalElement(Q - 1, Precision("qpower", 1, 3)))


@settings(max_examples=40, deadline=None)
@given(small_polys, st.sampled_from([2, 3, 5]), st.integers(1, 4))
def test_invert_two_sided_when_it_returns(f, p, N):
    prec = Precision("qpower", 1, N, p, 3)
    e = LocalElement(f, prec)
    try:
        inv = invert(e)
    except NotAUnit:
        return
    assert e * inv == LocalElement(1, prec) and inv * e == LocalElement(1, prec)


def test_taylor_examples():
    s = taylor_at_root(Q - 1, 1, 3)
    assert [c.rep for c in s.coeffs] == [ZqPoly(), ONE, ZqPoly()]
    s = taylor_at_root(Q - 1, 2, 3)
    assert [c.rep for c in s.coeffs] == [ZqPoly([-2]), ONE, ZqPoly()]
    # (1-q)(1-q^2) = 4t + O(t^2) around q = -1, frozen from direct expansion
    s = taylor_at_root(q_pochhammer(2), 2, 2)
    assert [c.rep for c in s.coeffs] == [ZqPoly(), ZqPoly([4])]


def test_crt_embedding_examples():
    assert embed_cyclotomic(zeta(1), 5).rep == ONE
    # zeta_2 goes to zeta_4^2 = -1 in Z[q]/Phi_4
    assert embed_cyclotomic(zeta(2), 4).rep == ZqPoly([-1])
    image = embed_cyclotomic(zeta(3), 6)
    assert crt_exponent(3, 6) == 4
    # Phi_3 vanishes on the image
    phi3 = image * image + image + LocalElement(1, image.precision)
    assert phi3.is_zero()


def test_crt_exponent_rejects_non_prime_ratio():
    with pytest.raises(IndexMismatch):
        crt_exponent(1, 6)


def test_reexpand_examples():
    # (q - zeta_2)^2 re-centred at zeta_1 over Z/8: c = 2 gives t^2 + 4t + 4
    K = 3 + k_max(2, 3, 1) - 1
    prec = Precision("cyclotomic", 2, 1)
    coeffs = [ZqPoly(), ZqPoly(), ONE] + [ZqPoly()] * (K - 3)
    s = RootSeries(2, 2, [LocalElement(c, prec) for c in coeffs])
    out = reexpand(s, 2, 3, 3)
    assert [c.rep for c in out.coeffs] == [ZqPoly([4]), ZqPoly([4]), ONE]


def test_reexpand_requires_length():
    s = taylor_at_root(Q, 2, 2)
    with pytest.raises(InsufficientInputPrecision):
        reexpand(s, 2, 5, 2)


@settings(max_examples=25, deadline=None)
@given(small_polys, st.sampled_from([(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)]), st.integers(1, 5))
def test_equaliser_condition_for_polynomials(f, pm, a):
    p, m = pm
    N = 3
    K = N + k_max(p, a, m) - 1
    lhs = embed_series(taylor_at_root(f, m, N), p * m).reduce_mod(p, a)
    rhs = reexpand(taylor_at_root(f, p * m, K), p, a, N)
    assert lhs == rhs


@pytest.mark.parametrize("args,expected", [((2, 2, 1), 2), ((2, 5, 2), 10), ((2, 5, 4), 20), ((3, 5, 3), 30), ((3, 5, 1), 10)])
def test_k_max_frozen(args, expected):
    assert k_max(*args) == expected


@settings(max_examples=50, deadline=None)
@given(small_polys, small_polys)
def test_poly_ring_laws(f, g):
    assert (f + g) - g == f
    assert f * g == g * f
    assert (f * g)(2) == f(2) * g(2)


@settings(max_examples=30, deadline=None)
@given(small_polys)
def test_json_round_trip(f):
    assert ZqPoly.from_json(f.to_json()) == f
    for c in f.to_json()["coeffs"]:
        assert isinstance(c, str)


def test_series_in_t_handles_laurent():
    # q^-1 = 1 - t + t^2 - ...
    assert series_in_t(ZqPoly.monomial(1, -1), 4) == [1, -1, 1, -1]


def test_discriminants():
    assert discriminant(ZqPoly([1, 0, 1])) == -4
    assert discriminant(ZqPoly([-1, -1, 1])) == 5
