"""Verification suites shared by the command line and the acceptance tests.

Each ``criterion_*`` function returns a SuiteResult whose records carry an
id, a pass flag and a witness.  Parameters default to the acceptance ranges.
"""

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import divisors, factorint

from . import deltaq, habiro, qcomplex, qpd
from .errors import GluingMismatch, NonEtaleAtP, QCalcError
from .qcore import ONE, ZqPoly, cyclotomic, format_poly


@dataclass
class SuiteResult:
    criterion: int
    name: str
    limit: float
    records: list = field(default_factory=list)
    seconds: float = 0.0

    def add(self, check_id, ok, witness=None, gate=True):
        self.records.append({"id": check_id, "pass": bool(ok), "witness": witness, "gate": gate})

    @property
    def passed(self):
        return all(r["pass"] for r in self.records if r["gate"]) and bool(self.records)

    @property
    def within_time(self):
        return self.seconds < self.limit

    def to_json(self, timings=True):
        out = {
            "criterion": self.criterion,
            "name": self.name,
            "pass": self.passed,
            "checks": [
                {"id": r["id"], "pass": r["pass"], "gate": r["gate"], "witness": _jsonable(r["witness"])}
                for r in self.records
            ],
        }
        if timings:
            out["seconds"] = round(self.seconds, 3)
            out["limit_seconds"] = self.limit
        return out


def _jsonable(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return str(value)


def _timed(fn):
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        result.seconds = time.perf_counter() - start
        return result

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------
# 1: cyclotomic factorisation


def mobius_cyclotomic(m):
    """Phi_m as prod_{d | m} (q^d - 1)^mu(m/d), built independently of qcore.cyclotomic."""
    numerator, denominator = ONE, ONE
    for d in divisors(m):
        exps = factorint(m // d)
        if any(e > 1 for e in exps.values()):
            continue
        factor = ZqPoly.monomial(1, d) - 1
        if len(exps) % 2 == 0:
            numerator = numerator * factor
        else:
            denominator = denominator * factor
    return numerator.exact_div(denominator)


@_timed
def criterion_1(m_max=200):
    res = SuiteResult(1, "cyclotomic factorisation", 5.0)
    bad_product, bad_mobius = [], []
    for m in range(1, m_max + 1):
        prod = ONE
        for d in divisors(m):
            prod = prod * cyclotomic(d)
        if prod != ZqPoly.monomial(1, m) - 1:
            bad_product.append(m)
        if m <= 60 and mobius_cyclotomic(m) != cyclotomic(m):
            bad_mobius.append(m)
    res.add("product_of_cyclotomics", not bad_product, {"m_max": m_max, "failures": bad_product})
    res.add("mobius_route_agrees", not bad_mobius, {"m_max": min(m_max, 60), "failures": bad_mobius})
    return res


# ---------------------------------------------------------------------------
# 2: delta-ring identities


def random_delta_poly(p, N, rng, terms=3):
    """Sum of a few random monomials in x, delta(x), y with small t-polynomial coefficients."""
    gens = [deltaq.DeltaPoly.var(p, N, 1, 0), deltaq.DeltaPoly.var(p, N, 1, 1), deltaq.DeltaPoly.var(p, N, 2, 0)]
    t = deltaq.DeltaPoly.t(p, N)
    out = deltaq.DeltaPoly(p, N)
    for _ in range(rng.randint(1, terms)):
        mono = deltaq.DeltaPoly.const(p, N, rng.choice([-2, -1, 1, 2, 3]))
        for _ in range(rng.randint(0, 2)):
            mono = mono * rng.choice(gens)
        if rng.random() < 0.3:
            mono = mono * t
        out = out + mono
    return out


@_timed
def criterion_2(primes=(2, 3, 5, 7), N=8, pairs=100, seed=2024):
    res = SuiteResult(2, "delta-ring identities", 30.0)
    rng = random.Random(seed)
    for p in primes:
        x = deltaq.DeltaPoly.var(p, N)
        samples = [x, x * x + x, x + deltaq.DeltaPoly.var(p, N, 1, 1)]
        split = [deltaq.gamma_split(f) for f in samples]
        res.add(f"gamma_split/p={p}", all(r["pass"] for r in split), [r["residual"] for r in split])
        closed = deltaq.gammaq_qminus1_closed_form(p, N)
        res.add(f"gammaq_closed_form/p={p}", closed["pass"], closed["closed_form"])
        failures = []
        for k in range(pairs):
            a, b = random_delta_poly(p, N, rng), random_delta_poly(p, N, rng)
            s, pr = deltaq.verify_sum_rules(a, b), deltaq.verify_product_rules(a, b)
            if not (s["pass"] and pr["pass"]):
                failures.append({"pair": k, "a": str(a), "b": str(b)})
        res.add(f"sum_product_rules/p={p}", not failures, {"pairs": pairs, "failures": failures[:3]})
    return res


# ---------------------------------------------------------------------------
# 3: decomposition witnesses


@_timed
def criterion_3(n_max=2, gamma_primes=(2, 3, 5), gammaq_primes=(2, 3)):
    res = SuiteResult(3, "decomposition witnesses", 60.0)
    for p in gamma_primes:
        for n in range(1, n_max + 1):
            rep = deltaq.witness_report(deltaq.decompose_gamma_iterate(n, p))
            res.add(f"gamma/n={n}/p={p}", rep["pass"], rep)
    for p in gammaq_primes:
        for n in range(1, n_max + 1):
            rep = deltaq.witness_report(deltaq.decompose_gammaq_iterate(n, p))
            res.add(f"gamma_q/n={n}/p={p}", rep["pass"], rep)
    return res


# ---------------------------------------------------------------------------
# 4: the alpha >= 2 construction and the alpha = 1 obstruction


@_timed
def criterion_4(alphas=(2, 3), primes=(3, 5), reported=(2,), obstruction_primes=(2, 3, 5)):
    res = SuiteResult(4, "modified q-divided powers", 60.0)
    for p in tuple(primes) + tuple(reported):
        for alpha in alphas:
            rep = qpd.build_gamma_q_tilde(alpha, p, p + 2)
            witness = {k: rep[k] for k in ("delta_split", "C1", "C2", "C3")}
            res.add(f"tilde/alpha={alpha}/p={p}", rep["pass"], witness, gate=p not in reported)
    for p in obstruction_primes:
        rep = qpd.alpha_one_obstruction(p, p + 2)
        res.add(f"alpha_one_obstruction/p={p}", rep["pass"], rep["residue"])
    return res


# ---------------------------------------------------------------------------
# 5: Nygaard model and factorial ratios


@_timed
def criterion_5(n_max=3, primes=(2, 3), ratio_primes=(2, 3, 5, 7), ratio_n=6):
    res = SuiteResult(5, "Nygaard model", 30.0)
    for p in primes:
        for n in range(1, n_max + 1):
            rep = qpd.nygaard_rationalised_image(n, p, 8, n + 2, n + 1)
            res.add(f"nygaard/n={n}/p={p}", rep["pass"], rep["generators"])
    for p in ratio_primes:
        for n in range(1, ratio_n + 1):
            try:
                w = qpd.q_factorial_unit_ratio(p, n)
                res.add(f"unit_ratio/p={p}/n={n}", w(1) % p != 0, {"w(1)": w(1)})
            except QCalcError as exc:
                res.add(f"unit_ratio/p={p}/n={n}", False, str(exc))
    return res


# ---------------------------------------------------------------------------
# 6: cohomology against the brute-force oracle


@_timed
def criterion_6(m_max=12, k_max=12, powers=(1, 2)):
    res = SuiteResult(6, "cohomology oracle equivalence", 120.0)
    spec = qcomplex.ToricSpec.box(1, True, -k_max, k_max)
    for flavor in qcomplex.FLAVORS:
        K = qcomplex.QKoszul(spec, flavor)
        mismatches = []
        for m in range(1, m_max + 1):
            for power in powers:
                table = qcomplex.cohomology_mod(K, m, power, with_q=False)
                for a in spec.multidegrees():
                    oracle = qcomplex.naive_cohomology_n1(K.scalar(0, a[0]), m, power)
                    for j in (0, 1):
                        e = table.entries[(a, j)]
                        if (e.free_rank, e.torsion) != (oracle[j]["free_rank"], oracle[j]["torsion"]):
                            mismatches.append({"m": m, "power": power, "a": a[0], "degree": j})
        res.add(f"oracle/{flavor}", not mismatches, {"mismatches": mismatches[:5]})
    return res


# ---------------------------------------------------------------------------
# 7: decalage


@_timed
def criterion_7(n_max=2, bound=6, k_max=3):
    res = SuiteResult(7, "decalage", 60.0)
    for n in range(1, n_max + 1):
        spec = qcomplex.ToricSpec.box(n, True, -bound, bound)
        hodge = qcomplex.QKoszul(spec, "qHodge")
        derham = qcomplex.QKoszul(spec, "qdeRham")
        eta = qcomplex.decalage(hodge)
        iso_fail = [
            a
            for a in spec.multidegrees()
            if not qcomplex.verify_decalage_structure(hodge, eta, a)
            or eta.piece(a).scalars != derham.piece(a).scalars
        ]
        res.add(f"isomorphic_per_multidegree/n={n}", not iso_fail, {"failures": iso_fail[:5]})
        for k in range(1, k_max + 1):
            ring = qcomplex.FlatRing.tpower(k)
            same = qcomplex.tables_equal(
                qcomplex.cohomology_table(eta, ring, with_q=False),
                qcomplex.cohomology_table(derham, ring, with_q=False),
            )
            res.add(f"cohomology_mod_(q-1)^{k}/n={n}", same)
    return res


# ---------------------------------------------------------------------------
# 8: Bockstein


@_timed
def criterion_8(k_bound=12, pairs=((2, 1), (4, 2), (6, 3), (6, 2))):
    res = SuiteResult(8, "Bockstein", 60.0)
    spec1 = qcomplex.ToricSpec.box(1, True, -k_bound, k_bound)
    spec2 = qcomplex.ToricSpec.box(2, True, -2, 2)
    for flavor in qcomplex.FLAVORS:
        for spec in (spec1, spec2):
            K = qcomplex.QKoszul(spec, flavor)
            for m in (1, 2, 3, 4, 6):
                table = qcomplex.bockstein(K, m)
                res.add(f"beta_squared/{flavor}/n={spec.n}/m={m}", table.beta_squared_zero)
    hodge = qcomplex.QKoszul(spec1, "qHodge")
    table = qcomplex.bockstein(hodge, 1)
    wrong = []
    for a in spec1.multidegrees():
        entry = table.entries[(a, 0)]
        # H^0 and H^1 are both Z generated by 1 and dx
        if entry.bockstein != [[a[0]]]:
            wrong.append({"k": a[0], "matrix": entry.bockstein})
    res.add("m=1_multiplication_by_k", not wrong, {"failures": wrong})
    for flavor in qcomplex.FLAVORS:
        for spec in (spec1, spec2):
            K = qcomplex.QKoszul(spec, flavor)
            for m, d in pairs:
                rep = qcomplex.frobenius_transition(K, m, d)
                res.add(f"transition/{flavor}/n={spec.n}/({m},{d})", rep["intertwines"])
    return res


# ---------------------------------------------------------------------------
# 9: Habiro equaliser


@_timed
def criterion_9(samples=50, degree=20, indices=tuple(range(1, 9)), primes=(2, 3), a_max=5, N=4, seed=7):
    res = SuiteResult(9, "Habiro equaliser", 60.0)
    rng = random.Random(seed)
    failures, located = [], []
    for k in range(samples):
        f = ZqPoly([rng.randint(-5, 5) for _ in range(rng.randint(1, degree + 1))])
        a = rng.randint(1, a_max)
        E = habiro.habiro_from_poly(f, indices, habiro.HabiroPrecision(N=N, a=a, primes=primes))
        if not E.valid():
            failures.append({"poly": format_poly(f), "a": a})
        if k % 5 == 0:
            # corrupt the lower component: the discrepancy must sit at that coefficient
            p, m = rng.choice(habiro.check_pairs(indices, primes))
            pos = rng.randrange(N)
            bad = E.corrupt(m, pos)
            rec = habiro.consistency_check(bad, p, m, a, N)
            ok = (not rec["pass"]) and rec["discrepancy"]["coefficient"] == pos
            located.append({"poly": format_poly(f), "p": p, "m": m, "position": pos, "located": ok})
    res.add("random_polynomials_consistent", not failures, {"samples": samples, "failures": failures})
    res.add("corrupted_controls_located", all(r["located"] for r in located), located)
    return res


# ---------------------------------------------------------------------------
# 10: relative Habiro rings


RINGS = {"Z": habiro.INTEGERS, "Z[i][1/2]": habiro.GAUSSIAN, "Z[phi][1/5]": habiro.GOLDEN}


@_timed
def criterion_10(m_max=6, precisions=(2, 4, 6)):
    res = SuiteResult(10, "relative Habiro ring", 120.0)
    for name, spec in RINGS.items():
        for m in range(1, m_max + 1):
            for a in precisions:
                try:
                    G = habiro.build_relative_habiro(spec, m, a=a)
                except (NonEtaleAtP, QCalcError) as exc:
                    res.add(f"{name}/m={m}/a={a}", False, str(exc))
                    continue
                cmp = habiro.compare_qwitt(G)
                G.q_element()
                res.add(f"{name}/m={m}/a={a}/gluing", G.validation["pass"], G.validation)
                res.add(f"{name}/m={m}/a={a}/qwitt", cmp["pass"], cmp["frobenius"])
        for p in (2, 3, 5, 7):
            try:
                lift = habiro.frobenius_lift(spec, p, 6)
            except NonEtaleAtP:
                continue
            res.add(f"{name}/uniqueness/p={p}", lift["unique"] and lift["congruent_to_power"], lift["image_str"])
    G = habiro.build_relative_habiro(habiro.GAUSSIAN, 3, a=4)
    try:
        G.constant([0, 1])
        res.add("negative_control/i_not_glued", False)
    except GluingMismatch as exc:
        res.add("negative_control/i_not_glued", True, str(exc))
    return res


# ---------------------------------------------------------------------------
# 11: Habiro completion


@_timed
def criterion_11(n_max=5, window=6, m_range=range(1, 13)):
    res = SuiteResult(11, "Habiro completion", 30.0)
    for n in range(1, n_max + 1):
        rep = habiro.resolution_window_check(n)
        res.add(f"resolution/n_max={n}", rep["pass"], rep["checks"])
    m_list = list(range(1, window + 1))
    probe = habiro.nakayama_probe(habiro.ModulePresentation.localisation_window(window), m_list)
    res.add("localisation_window_flagged", probe["flagged"], probe["vanishing"])
    for m in m_range:
        rep = habiro.nakayama_probe(habiro.ModulePresentation.cyclic(cyclotomic(m)), m_list)
        res.add(f"cyclotomic_not_flagged/m={m}", not rep["flagged"], rep["vanishing"])
    for d in (1, 2, 3):
        for e in (1, 2):
            P = habiro.ModulePresentation.cyclic(cyclotomic(d) ** e)
            rep = habiro.ladder_stabilises(P, range(1, 2 * d * e + 2))
            res.add(f"ladder_stable/Phi_{d}^{e}", rep["stable"], rep["stages"][-1])
    return res


# ---------------------------------------------------------------------------
# 12: log-series operator


@_timed
def criterion_12(N=8, k_max=8):
    res = SuiteResult(12, "operator comparison", 10.0)
    for k in range(0, k_max + 1):
        rep = qcomplex.rational_qpartial(N, k)
        res.add(f"rational_qpartial/k={k}", rep["pass"], rep["operator_series"])
    return res


CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
]


def run_all(workers=1):
    return qcomplex.parallel_map(lambda fn: fn(), CRITERIA, workers)
