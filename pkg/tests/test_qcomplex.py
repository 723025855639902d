import csv
import io
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcalc.errors import (
    BaseMismatch,
    DivisionNotExact,
    InsufficientTruncation,
    NotADivisor,
    TorsionAmbient,
    WindowTooSmall,
)
from qcalc.qcomplex import (
    FlatRing,
    KoszulPiece,
    ToricSpec,
    bockstein,
    build_complex,
    cohomology_mod,
    cohomology_table,
    decalage,
    frobenius_transition,
    kunneth_rank_check,
    naive_cohomology_n1,
    parallel_map,
    qhodge_filtration,
    rational_qpartial,
    tables_equal,
    tensor,
    verify_decalage_structure,
    verify_tensor_structure,
)
from qcalc.qcore import Q, ZqPoly, q_integer


def one_var(flavor, laurent=True, lo=-4, hi=4):
    return build_complex(ToricSpec.box(1, laurent, lo, hi), flavor)


def summary(table, a, j):
    entry = table.entries[(a, j)]
    return entry.free_rank, entry.torsion


@pytest.mark.parametrize("k", [-3, -1, 1, 2, 5])
def test_one_variable_scalars(k):
    assert one_var("qHodge", lo=-6, hi=6).piece((k,)).scalars == (ZqPoly.monomial(1, k) - 1,)
    assert one_var("qdeRham", lo=-6, hi=6).piece((k,)).scalars == (q_integer(k),)


def test_polynomial_variable_at_zero_has_no_direction():
    K = one_var("qdeRham", laurent=False, lo=0, hi=3)
    assert K.piece((0,)).n == 0
    assert K.piece((2,)).n == 1


def test_window_errors():
    with pytest.raises(WindowTooSmall):
        one_var("qHodge", lo=-2, hi=2).piece((3,))
    with pytest.raises(WindowTooSmall):
        ToricSpec(1, (False,), ((-1, 2),))


@pytest.mark.parametrize("flavor", ["qdeRham", "qHodge"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_d_squared_zero_over_window(flavor, n):
    K = build_complex(ToricSpec.box(n, True, -2, 2), flavor)
    assert K.check_d_squared()


@pytest.mark.parametrize("ring", [FlatRing.qpower(2, 2), FlatRing.qpower(3), FlatRing.tpower(4)])
def test_flat_d_squared_zero(ring):
    K = build_complex(ToricSpec.box(3, True, -1, 2), "qHodge")
    for a in K.multidegrees()[:20]:
        piece = K.piece(a)
        for j in range(piece.n - 1):
            d1, d0 = piece.flat_differential(ring, j + 1), piece.flat_differential(ring, j)
            for row in d1:
                for c in range(len(d0[0])):
                    assert sum(row[k] * d0[k][c] for k in range(len(row))) == 0


def test_operators_preserve_multidegree():
    # every differential entry is a scalar: pieces never mix multidegrees
    K = build_complex(ToricSpec.box(2, True, -2, 2), "qHodge")
    for a in K.multidegrees():
        piece = K.piece(a)
        assert piece.scalars == tuple(ZqPoly.monomial(1, x) - 1 for x in a)


@pytest.mark.parametrize("k", [-5, -2, 1, 3, 7])
def test_qderham_mod_q_minus_1(k):
    table = cohomology_mod(one_var("qdeRham", lo=-8, hi=8), 1, multidegrees=[(k,)])
    assert summary(table, (k,), 0) == (0, [])
    assert summary(table, (k,), 1) == (0, [abs(k)] if abs(k) > 1 else [])


def test_qhodge_mod_q2_minus_1_at_one():
    table = cohomology_mod(one_var("qHodge"), 2, multidegrees=[(1,)])
    assert summary(table, (1,), 0) == (1, [])
    assert summary(table, (1,), 1) == (1, [])


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_zero_scalar_gives_whole_ring(m):
    table = cohomology_mod(one_var("qHodge"), m, multidegrees=[(0,)])
    assert summary(table, (0,), 0) == (m, [])
    assert summary(table, (0,), 1) == (m, [])


@pytest.mark.parametrize("m", range(1, 13))
def test_one_variable_against_naive_oracle(m):
    for flavor in ("qdeRham", "qHodge"):
        K = one_var(flavor, lo=-12, hi=12)
        degrees = [(k,) for k in range(-12, 13)]
        table = cohomology_mod(K, m, multidegrees=degrees, with_q=False)
        for (k,) in degrees:
            oracle = naive_cohomology_n1(K.piece((k,)).scalars[0], m, 1)
            for j in (0, 1):
                assert summary(table, (k,), j) == (oracle[j]["free_rank"], oracle[j]["torsion"])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_qhodge_mod_q_minus_1_is_free_of_binomial_rank(n):
    K = build_complex(ToricSpec.box(n, True, -2, 2), "qHodge")
    table = cohomology_mod(K, 1, with_q=False)
    for a in K.multidegrees():
        for j in range(n + 1):
            assert summary(table, a, j) == (comb(n, j), [])


@pytest.mark.parametrize("k", [-3, 1, 2, 6])
def test_bockstein_at_m1_is_multiplication(k):
    table = bockstein(one_var("qHodge", lo=-6, hi=6), 1, [(k,)])
    assert table.entries[((k,), 0)].bockstein == [[k]]
    assert table.beta_squared_zero


def test_bockstein_zero_scalar():
    table = bockstein(one_var("qHodge"), 2, [(0,)])
    assert all(x == 0 for row in table.entries[((0,), 0)].bockstein for x in row)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_bockstein_squares_to_zero(m):
    K = build_complex(ToricSpec.box(2, True, -2, 2), "qHodge")
    assert bockstein(K, m).beta_squared_zero


def test_bockstein_m2_a1_frozen():
    table = bockstein(one_var("qHodge"), 2, [(1,)])
    assert table.beta_squared_zero
    assert len(table.entries[((1,), 0)].bockstein) == 1


def test_transition_identity():
    result = frobenius_transition(one_var("qHodge", lo=-2, hi=2), 3, 3)
    for (a, j), mat in result["maps"].items():
        rank = len(result["source"].entries[(a, j)].group.orders)
        assert mat == [[int(r == c) for c in range(rank)] for r in range(rank)]


@pytest.mark.parametrize("m,d", [(2, 1), (4, 2), (6, 3), (6, 2)])
def test_transition_intertwines_bockstein(m, d):
    assert frobenius_transition(one_var("qHodge", lo=-3, hi=3), m, d)["intertwines"]


def test_transition_rejects_non_divisor():
    with pytest.raises(NotADivisor):
        frobenius_transition(one_var("qHodge"), 4, 3)


@pytest.mark.parametrize("k", [-4, 1, 3, 5])
def test_decalage_one_variable(k):
    eta = decalage(one_var("qHodge", lo=-6, hi=6))
    assert eta.piece((k,)).scalars == (q_integer(k),)


def test_decalage_at_zero_and_acyclic_case():
    eta = decalage(build_complex(ToricSpec.box(2, True, -1, 1), "qHodge"))
    assert eta.piece((0, 0)).scalars == (ZqPoly(), ZqPoly())
    assert eta.piece((1, 1)).scalars == (ZqPoly([1]), ZqPoly([1]))
    table = cohomology_table(eta, FlatRing.tpower(3), [(1, 1)])
    assert all(e.free_rank == 0 and not e.torsion for e in table.entries.values())


def test_decalage_errors():
    with pytest.raises(TorsionAmbient):
        decalage(build_complex(ToricSpec.box(1), "qHodge", base=FlatRing.qpower(2)))
    with pytest.raises(DivisionNotExact):
        decalage(one_var("qdeRham")).piece((2,))


def test_decalage_structure():
    K = build_complex(ToricSpec.box(2, True, -2, 2), "qHodge")
    eta = decalage(K)
    assert all(verify_decalage_structure(K, eta, a) for a in K.multidegrees())


@pytest.mark.parametrize("n,bound", [(1, 6), (2, 6)])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_decalage_matches_qderham(n, bound, k):
    spec = ToricSpec.box(n, True, -bound, bound)
    ring = FlatRing.qpower(1, k)
    eta = decalage(build_complex(spec, "qHodge"))
    direct = build_complex(spec, "qdeRham")
    assert tables_equal(cohomology_table(eta, ring, with_q=False), cohomology_table(direct, ring, with_q=False))


@pytest.mark.parametrize("n,i", [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2)])
def test_qhodge_filtration(n, i):
    K = build_complex(ToricSpec.box(n, True, -2, 2), "qdeRham")
    result = qhodge_filtration(K, i, i + n + 1)
    assert result["pass"]


def test_qhodge_filtration_examples():
    K = build_complex(ToricSpec.box(1, True, -3, 3), "qdeRham")
    gr0 = qhodge_filtration(K, 0, 3)["pieces"][(2,)]["conjugate"]
    assert [g["free_rank"] for g in gr0] == [1, 0]
    gr1 = qhodge_filtration(K, 1, 3)["pieces"][(2,)]["conjugate"]
    assert [g["free_rank"] for g in gr1] == [0, 1]
    K2 = build_complex(ToricSpec.box(2, True, 0, 1), "qdeRham")
    gr1 = qhodge_filtration(K2, 1, 4)["pieces"][(1, 0)]["conjugate"]
    assert [g["free_rank"] for g in gr1] == [0, 2, 0]


def test_qhodge_filtration_needs_length():
    with pytest.raises(InsufficientTruncation):
        qhodge_filtration(one_var("qdeRham"), 1, 2)


@pytest.mark.parametrize("N,k", [(4, 1), (6, 3), (8, 5), (5, -2)])
def test_rational_qpartial(N, k):
    report = rational_qpartial(N, k)
    assert report["pass"]
    if k == 1:
        assert report["operator_series"] == ["1"] + ["0"] * (N - 1)


def test_tensor_unit_and_concatenation():
    K = build_complex(ToricSpec.box(1, True, -2, 2), "qHodge")
    unit = build_complex(ToricSpec(0, (), ()), "qHodge")
    prod = tensor(K, unit)
    for a in K.multidegrees():
        assert prod.piece(a).scalars == K.piece(a).scalars
    both = tensor(K, K)
    assert both.piece((1, 1)).scalars == (Q - 1, Q - 1)


def test_tensor_base_mismatch():
    K1 = build_complex(ToricSpec.box(1), "qHodge")
    K2 = build_complex(ToricSpec.box(1), "qHodge", base=FlatRing.qpower(2))
    with pytest.raises(BaseMismatch):
        tensor(K1, K2)
    with pytest.raises(BaseMismatch):
        tensor(K1, build_complex(ToricSpec.box(1), "qdeRham"))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=0, max_size=2), st.lists(st.integers(-3, 3), min_size=0, max_size=2))
def test_tensor_is_total_complex(a, b):
    p1 = KoszulPiece([ZqPoly.monomial(1, x) - 1 for x in a])
    p2 = KoszulPiece([q_integer(x) for x in b])
    assert verify_tensor_structure(p1, p2)


@pytest.mark.parametrize("a,extra", [((1,), 1), ((2,), 1), ((0,), 2), ((1,), 0)])
def test_kunneth_ranks(a, extra):
    K = build_complex(ToricSpec.box(1, True, -2, 2), "qHodge")
    assert kunneth_rank_check(K, ZqPoly.monomial(1, extra) - 1, FlatRing.qpower(2), a)


def test_table_serialisation():
    table = bockstein(one_var("qHodge", lo=-1, hi=1), 2)
    assert table.euler_ok()
    rows = list(csv.reader(io.StringIO(table.to_csv())))
    assert rows[0] == ["multidegree", "degree", "free_rank", "torsion", "q_matrix", "bockstein_matrix"]
    assert len(rows) == 1 + 3 * 2
    data = table.to_json()
    assert all(isinstance(x, str) for row in data["rows"] for r in row["q_matrix"] for x in r)


def test_parallel_map_is_deterministic():
    K = build_complex(ToricSpec.box(2, True, -2, 2), "qHodge")
    serial = cohomology_mod(K, 2, workers=1)
    threaded = cohomology_mod(K, 2, workers=4)
    assert serial.rows() == threaded.rows()
    assert parallel_map(lambda v: v * v, range(20), 4) == [v * v for v in range(20)]
