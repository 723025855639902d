"""Habiro-ring arithmetic.

Elements are families of Taylor expansions at roots of unity, tied together by
p-adic re-expansion.  The (q;q)_n-ladder, Nakayama-type probes and the
two-term resolution are handled by exact linear algebra after flattening.
Relative Habiro rings of etale Z-algebras Z[x]/g[1/Delta] are assembled from
components R[q]/Phi_d^N glued by Hensel-lifted Frobenii.
"""

import itertools
import random
from dataclasses import dataclass

from sympy import factorint, primefactors

from .errors import (
    GluingMismatch,
    IndexMismatch,
    InsufficientInputPrecision,
    InsufficientPrecision,
    NonEtaleAtP,
    NotADivisor,
    QCalcError,
    UnboundedDegree,
)
from .intlinalg import Cohomology, rank_rational, smith_normal_form
from .qcomplex import FlatRing
from .qcore import (
    ONE,
    Q,
    ResidueRing,
    ZqPoly,
    cyclotomic,
    discriminant,
    embed_series,
    format_poly,
    k_max,
    q_pochhammer,
    reexpand,
    taylor_at_root,
)


def _divisor_closed(indices):
    s = set(indices)
    return all(d in s for m in s for d in range(1, m + 1) if m % d == 0)


def check_pairs(indices, primes=None):
    """All (p, m) with p prime, m and p*m in the index set."""
    s = sorted(set(indices))
    out = []
    for M in s:
        for p in primefactors(M):
            if primes is not None and p not in primes:
                continue
            if M // p in s:
                out.append((p, M // p))
    return sorted(out)


# ---------------------------------------------------------------------------
# Habiro elements


@dataclass(frozen=True)
class HabiroPrecision:
    """Output length N and p-adic exponent a used for the re-expansion checks."""

    N: int = 4
    a: int = 4
    primes: tuple = None

    def length_for(self, M, indices):
        need = self.N
        for p in primefactors(M):
            if self.primes is not None and p not in self.primes:
                continue
            if M // p in indices:
                need = max(need, self.N + k_max(p, self.a, M // p) - 1)
        return need


class HabiroElement:
    """Divisor-closed family m -> expansion at zeta_m, plus a check ledger."""

    def __init__(self, components, precision=None):
        self.components = dict(components)
        if not _divisor_closed(self.components):
            raise IndexMismatch("index set must be divisor-closed")
        for m, s in self.components.items():
            if s.center != m or s.cindex != m:
                raise IndexMismatch(f"component {m} is not an expansion at zeta_{m}")
        self.precision = precision or HabiroPrecision()
        self.ledger = {}

    @property
    def indices(self):
        return sorted(self.components)

    def __getitem__(self, m):
        return self.components[m]

    def _combine(self, other, op):
        if self.indices != other.indices:
            raise IndexMismatch("index sets differ")
        out = {}
        for m in self.indices:
            a, b = self.components[m], other.components[m]
            n = min(a.length, b.length)
            out[m] = op(a.truncate(n), b.truncate(n))
        return HabiroElement(out, self.precision)

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y)

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y)

    def __mul__(self, other):
        return self._combine(other, lambda x, y: x * y)

    def corrupt(self, m, k, delta=1):
        """Copy with coefficient k of component m shifted by delta (negative controls)."""
        series = self.components[m]
        new = series.with_coeff(k, series.coeffs[k] + delta)
        comps = dict(self.components)
        comps[m] = new
        return HabiroElement(comps, self.precision)

    def run_checks(self, primes=None, a=None, N=None):
        a = a or self.precision.a
        N = N or self.precision.N
        primes = primes if primes is not None else self.precision.primes
        self.ledger = {}
        for p, m in check_pairs(self.indices, primes):
            self.ledger[(p, m)] = consistency_check(self, p, m, a, N)
        return self.ledger

    def valid(self):
        if not self.ledger:
            self.run_checks()
        return all(r["pass"] for r in self.ledger.values())

    def to_json(self):
        return {
            "indices": self.indices,
            "components": {str(m): s.to_json() for m, s in self.components.items()},
            "ledger": [
                {"p": p, "m": m, "pass": r["pass"], "discrepancy": r["discrepancy"]}
                for (p, m), r in sorted(self.ledger.items())
            ],
        }


def habiro_from_poly(f, indices, precision=None):
    """Taylor expansions of a Laurent polynomial at every zeta_m, m in indices."""
    precision = precision or HabiroPrecision()
    indices = sorted(set(indices))
    comps = {m: taylor_at_root(f, m, precision.length_for(m, indices)) for m in indices}
    element = HabiroElement(comps, precision)
    element.run_checks()
    return element


def consistency_check(E, p, m, a, N):
    """Compare can(f_m) with the re-expansion of f_pm in (Z/p^a)[zeta_pm][t]/t^N."""
    M = p * m
    if m not in E.components or M not in E.components:
        raise IndexMismatch(f"need components {m} and {M}")
    low = E.components[m]
    if low.length < N:
        raise InsufficientInputPrecision(f"component {m} has length {low.length} < {N}")
    lhs = embed_series(low.truncate(N), M).reduce_mod(p, a)
    rhs = reexpand(E.components[M], p, a, N)
    discrepancy = None
    for k, (x, y) in enumerate(zip(lhs.coeffs, rhs.coeffs)):
        if x != y:
            discrepancy = {
                "coefficient": k,
                "canonical": format_poly(x.rep),
                "reexpanded": format_poly(y.rep),
            }
            break
    return {"p": p, "m": m, "a": a, "N": N, "pass": discrepancy is None, "discrepancy": discrepancy}


# ---------------------------------------------------------------------------
# module presentations, ladder stages and Nakayama probes


class ModulePresentation:
    """coker(P: R^cols -> R^rows) over Z[q^{+-1}], optionally localised at s."""

    def __init__(self, matrix, rows, cols, localise=None, label=""):
        self.matrix = [list(r) for r in matrix]
        self.rows = rows
        self.cols = cols
        self.localise = localise
        self.label = label

    @classmethod
    def cyclic(cls, f, label=None):
        return cls([[f]], 1, 1, label=label or f"Z[q]/({format_poly(f)})")

    @classmethod
    def free(cls, rank=1):
        return cls([[] for _ in range(rank)], rank, 0, label=f"Z[q^+-1]^{rank}")

    @classmethod
    def localisation_window(cls, W):
        """Z[q^{+-1}][1/(q;q)_W]: every Phi_d with d <= W inverted."""
        return cls([[]], 1, 0, localise=q_pochhammer(W), label=f"Z[q^+-1][1/(q;q)_{W}]")


def _flat_ring(f):
    if f.is_zero():
        raise UnboundedDegree("quotient by zero is not degree-bounded")
    dense = f.dense()
    if dense[-1] not in (1, -1) or dense[0] not in (1, -1):
        raise UnboundedDegree(f"{format_poly(f)} does not give a finite free quotient of Z[q^+-1]")
    return FlatRing(f)


def _quotient_group(P, f):
    """(group, ring) for coker(P) tensored with Z[q^{+-1}]/f, flattened over Z."""
    ring = _flat_ring(f)
    dim = ring.dim
    rows = P.rows * dim
    if P.cols == 0 or dim == 0:
        mat = None
    else:
        mat = [[0] * (P.cols * dim) for _ in range(rows)]
        for r in range(P.rows):
            for c in range(P.cols):
                block = ring.mult_matrix(P.matrix[r][c])
                for x in range(dim):
                    for y in range(dim):
                        mat[r * dim + x][c * dim + y] = block[x][y]
    group = Cohomology(rows, mat, None, dim_prev=P.cols * dim if mat else 0, dim_next=0)
    return group, ring


def _action(group, ring, blocks, s):
    block = ring.mult_matrix(s)
    dim = ring.dim
    chain = [[0] * (blocks * dim) for _ in range(blocks * dim)]
    for b in range(blocks):
        for x in range(dim):
            for y in range(dim):
                chain[b * dim + x][b * dim + y] = block[x][y]
    return group.induced(chain, group)


def _is_nilpotent(group, matrix):
    """Whether an endomorphism of a f.g. abelian group is nilpotent."""
    if not group.orders:
        return True
    length = group.free_rank + sum(sum(factorint(o).values()) for o in group.orders if o) + 1
    vectors = [[1 if i == j else 0 for i in range(len(group.orders))] for j in range(len(group.orders))]
    for _ in range(length):
        vectors = [group.reduce([sum(matrix[r][c] * v[c] for c in range(len(v))) for r in range(len(v))]) for v in vectors]
        if all(not any(v) for v in vectors):
            return True
    return False


def module_quotient(P, f):
    """Invariants of M/f for M = coker(P) (localised if requested)."""
    group, ring = _quotient_group(P, f)
    if P.localise is None:
        return {"zero": group.is_zero(), "free_rank": group.free_rank, "torsion": group.torsion}
    matrix = _action(group, ring, P.rows, P.localise)
    if _is_nilpotent(group, matrix):
        return {"zero": True, "free_rank": 0, "torsion": []}
    # localisation keeps the part where s acts non-nilpotently
    return {"zero": False, "free_rank": None, "torsion": None}


def ladder_stage(P, n):
    """Module invariants of M/(q;q)_n."""
    out = module_quotient(P, q_pochhammer(n))
    out["n"] = n
    return out


def ladder_stabilises(P, n_range):
    stages = [ladder_stage(P, n) for n in n_range]
    tail = stages[-2:]
    stable = len(tail) == 2 and (tail[0]["free_rank"], tail[0]["torsion"]) == (tail[1]["free_rank"], tail[1]["torsion"])
    return {"stages": stages, "stable": stable}


def nakayama_probe(P, m_list, ladder_ns=(1, 2, 3)):
    """Which M/Phi_m vanish; flag the module if every tested quotient and ladder stage does."""
    quotients = {m: module_quotient(P, cyclotomic(m)) for m in m_list}
    stages = {n: ladder_stage(P, n) for n in ladder_ns}
    vanish = [m for m in m_list if quotients[m]["zero"]]
    flagged = len(vanish) == len(m_list) and all(s["zero"] for s in stages.values())
    return {
        "module": P.label,
        "quotients": {str(m): quotients[m] for m in m_list},
        "ladder": {str(n): stages[n] for n in ladder_ns},
        "vanishing": vanish,
        "flagged": flagged,
    }


# ---------------------------------------------------------------------------
# the two-term resolution on a finite window


def _resolution_maps(n, literal):
    """First map as a (n+1) x n matrix over Z[q] from the window of size n to size n+1."""
    mat = [[ZqPoly() for _ in range(n)] for _ in range(n + 1)]
    for i in range(n):
        mat[i][i] = ONE
        factor = q_pochhammer(i + 1) if literal else ONE - ZqPoly.monomial(1, i + 1)
        mat[i + 1][i] = -factor
    return mat


def _beta_numerator(vec, n):
    """Numerator of sum b_i/(q;q)_i over the common denominator (q;q)_n."""
    total = ZqPoly()
    full = q_pochhammer(n)
    for i, b in enumerate(vec):
        total = total + b * full.exact_div(q_pochhammer(i))
    return total


def _flatten_beta(n, deg):
    """Z-matrix of b -> numerator, for b_i of degree <= deg."""
    cols = []
    for i in range(n + 1):
        for e in range(deg + 1):
            vec = [ZqPoly() for _ in range(n + 1)]
            vec[i] = ZqPoly.monomial(1, e)
            cols.append(_beta_numerator(vec, n))
    top = max((c.degree() for c in cols if not c.is_zero()), default=0)
    return [[c.coeff(r) for c in cols] for r in range(top + 1)], len(cols)


def resolution_window_check(n_max, degree_bound=3):
    """Verify the two-term resolution of the localisation on the window of size n_max.

    The map (a_i) -> (a_i - (1 - q^i) a_{i-1}) composes to zero with
    (b_i) -> sum b_i/(q;q)_i; the variant with (q;q)_i in place of 1 - q^i is
    evaluated too and reported.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    report = {"n_max": n_max, "degree_bound": degree_bound, "checks": {}}
    for label, literal in (("corrected", False), ("literal", True)):
        alpha = _resolution_maps(n_max, literal)
        composite = [_beta_numerator([alpha[r][c] for r in range(n_max + 1)], n_max) for c in range(n_max)]
        report["checks"][f"composite_zero_{label}"] = all(x.is_zero() for x in composite)
    alpha = _resolution_maps(n_max, False)

    # injectivity: flatten alpha on degree-bounded inputs
    in_deg = degree_bound
    out_deg = degree_bound + n_max
    flat = []
    for i in range(n_max + 1):
        for e in range(out_deg + 1):
            row = []
            for c in range(n_max):
                for f in range(in_deg + 1):
                    row.append((alpha[i][c] * ZqPoly.monomial(1, f)).coeff(e))
            flat.append(row)
    report["checks"]["injective"] = rank_rational(flat) == n_max * (in_deg + 1)

    # exactness: every integral kernel vector of beta is alpha of something
    bmat, ncols = _flatten_beta(n_max, degree_bound)
    form = smith_normal_form(bmat, len(bmat), ncols)
    kernel = [[form.V[r][c] for r in range(ncols)] for c in range(form.rank, ncols)]
    exact = True
    for vec in kernel:
        b = [ZqPoly.from_dict({e: vec[i * (degree_bound + 1) + e] for e in range(degree_bound + 1)}) for i in range(n_max + 1)]
        a = []
        prev = ZqPoly()
        for i in range(n_max):
            prev = b[i] + (ONE - ZqPoly.monomial(1, i)) * prev if i else b[0]
            a.append(prev)
        image = [sum((alpha[r][c] * a[c] for c in range(n_max)), ZqPoly()) for r in range(n_max + 1)]
        if image != b:
            exact = False
            break
    report["checks"]["exact_in_middle"] = exact
    report["kernel_rank"] = len(kernel)

    # surjectivity onto fractions with denominator (q;q)_k, k <= n_max
    lifts = {}
    surj = True
    for k in range(n_max + 1):
        numerator = ONE + Q
        vec = [ZqPoly() for _ in range(n_max + 1)]
        vec[k] = numerator
        value = _beta_numerator(vec, n_max)
        expected = numerator * q_pochhammer(n_max).exact_div(q_pochhammer(k))
        surj = surj and value == expected
        lifts[str(k)] = [format_poly(x) for x in vec]
    report["checks"]["lifts"] = surj
    report["lift_witnesses"] = lifts
    report["pass"] = all(v for k, v in report["checks"].items() if k != "composite_zero_literal")
    return report


# ---------------------------------------------------------------------------
# etale algebras and Frobenius lifts


class EtaleAlgebraSpec:
    """R = Z[x]/g [1/Delta] with disc(g) dividing a power of Delta."""

    def __init__(self, g, delta=1):
        if isinstance(g, (list, tuple)):
            g = ZqPoly([int(c) for c in g])
        dense = g.dense()
        if g.offset < 0 or not dense or dense[-1] != 1:
            raise QCalcError("g must be a monic polynomial")
        self.g = g
        self.delta = int(delta)
        self.degree = g.degree()
        self.disc = discriminant(g) if self.degree > 1 else 1
        if self.disc == 0:
            raise NonEtaleAtP("g has a repeated root")
        rest = abs(self.disc)
        for p in primefactors(rest):
            if self.delta % p:
                raise NonEtaleAtP(f"disc(g) = {self.disc} has prime {p} not inverted")

    @classmethod
    def from_json(cls, data):
        return cls([int(c) for c in data["g"]], int(data.get("delta", "1")))

    def to_json(self):
        return {"g": [str(c) for c in self.g.dense()], "delta": str(self.delta)}

    def inverted(self, p):
        return self.delta % p == 0

    def __repr__(self):
        return f"EtaleAlgebraSpec(g={format_poly(self.g, 'x')}, delta={self.delta})"


INTEGERS = EtaleAlgebraSpec([0, 1])
GAUSSIAN = EtaleAlgebraSpec([1, 0, 1], 2)
GOLDEN = EtaleAlgebraSpec([-1, -1, 1], 5)


def _xring(spec, p, a):
    return ResidueRing(spec.g, pmod=p ** a, prime=p)


def _compose(ring, poly_vec, image):
    """Evaluate a polynomial (coefficient vector in x) at image, in ring."""
    out = ring.zero()
    for c in reversed(poly_vec):
        out = ring.add(ring.mul(out, image), ring.canon([c]))
    return out


def _newton_root(spec, p, a, seed):
    ring = _xring(spec, p, a)
    g = spec.g.dense()
    dg = spec.g.derivative().dense()
    y = ring.canon(seed)
    for _ in range(2 * a.bit_length() + 4):
        value = _compose(ring, g, y)
        if ring.is_zero(value):
            return y
        y = ring.sub(y, ring.mul(value, ring.inverse(_compose(ring, dg, y))))
    if ring.is_zero(_compose(ring, g, y)):
        return y
    raise QCalcError("Newton iteration did not converge")


def frobenius_lift(spec, p, a, power=1):
    """Root of g near x^(p^power) in (Z/p^a)[x]/g, plus a perturbed-seed recheck."""
    if a < 1:
        raise ValueError("a must be >= 1")
    if spec.degree > 1 and spec.disc % p == 0:
        raise NonEtaleAtP(f"g' is not invertible modulo ({p}, g)")
    ring = _xring(spec, p, a)
    seed = ring.pow(ring.reduce(ZqPoly.monomial(1, 1)), p ** power)
    lift = _newton_root(spec, p, a, seed)
    perturbation = ring.canon([p * (k + 1) for k in range(spec.degree)])
    lift2 = _newton_root(spec, p, a, ring.add(seed, perturbation))
    mod_p = [c % p for c in lift] == [c % p for c in seed]
    return {
        "p": p,
        "a": a,
        "power": power,
        "image": lift,
        "image_str": format_poly(ZqPoly([_centred(c, p ** a) for c in lift]), "x"),
        "perturbed_image": lift2,
        "unique": lift == lift2,
        "congruent_to_power": mod_p,
    }


def _centred(c, modulus):
    c %= modulus
    return c - modulus if 2 * c > modulus else c


def _apply_lift(spec, p, a, image, vec):
    ring = _xring(spec, p, a)
    return _compose(ring, list(vec), image)


def global_automorphisms(spec):
    """Automorphisms x -> root of g inside R, for degree <= 2."""
    if spec.degree == 2:
        trace = -spec.g.coeff(1)
        return [(0, 1), (trace, -1)]
    return []


# ---------------------------------------------------------------------------
# glued relative Habiro rings


class BiRing:
    """Z[x, q]/(g(x), h(q)) optionally modulo an integer, elements as tuples of rows."""

    def __init__(self, g, h, pmod=None):
        self.g = g.dense()
        self.h = h.dense()
        if self.h[-1] not in (1, -1) or self.g[-1] != 1:
            raise QCalcError("moduli must be monic")
        self.n = len(self.g) - 1
        self.D = len(self.h) - 1
        self.pmod = pmod

    def _norm(self, c):
        return c % self.pmod if self.pmod else c

    def reduce_rows(self, rows):
        rows = [list(r) for r in rows]
        n, D = self.n, self.D
        # reduce x in each row
        for r in rows:
            for k in range(len(r) - 1, n - 1, -1):
                c = r[k]
                if c:
                    for t in range(n + 1):
                        r[k - n + t] -= c * self.g[t]
        rows = [(r + [0] * n)[:n] for r in rows]
        lead = self.h[-1]
        for k in range(len(rows) - 1, D - 1, -1):
            c = rows[k]
            if any(c):
                for t in range(D + 1):
                    coef = self.h[t] * lead
                    if coef:
                        row = rows[k - D + t]
                        for j in range(n):
                            row[j] -= coef * c[j]
        rows = (rows + [[0] * n for _ in range(D)])[:D]
        return tuple(tuple(self._norm(c) for c in r) for r in rows)

    def from_terms(self, terms):
        """terms: {(q_exp, x_exp): coeff} with nonnegative exponents."""
        qmax = max([e for e, _ in terms] + [0])
        xmax = max([e for _, e in terms] + [0])
        rows = [[0] * (xmax + 1) for _ in range(qmax + 1)]
        for (e, f), c in terms.items():
            rows[e][f] += c
        return self.reduce_rows(rows)

    def add(self, a, b):
        return tuple(tuple(self._norm(x + y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))

    def sub(self, a, b):
        return tuple(tuple(self._norm(x - y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))

    def mul(self, a, b):
        n = self.n
        prod = [[0] * (2 * n - 1 if n else 0) for _ in range(2 * self.D - 1)]
        for i, ra in enumerate(a):
            if not any(ra):
                continue
            for j, rb in enumerate(b):
                if not any(rb):
                    continue
                row = prod[i + j]
                for s, x in enumerate(ra):
                    if x:
                        for t, y in enumerate(rb):
                            if y:
                                row[s + t] += x * y
        return self.reduce_rows(prod)

    def zero(self):
        return tuple(tuple(0 for _ in range(self.n)) for _ in range(self.D))

    def convert(self, element, source_pmod=None):
        """Reduce an element of another BiRing over the same g into this one."""
        return self.reduce_rows(element)


class GluedRing:
    """Components R[q]/Phi_d^N for d | m glued along p-adic Frobenius lifts."""

    def __init__(self, spec, m, N, a):
        self.spec = spec
        self.m = m
        self.N = N
        self.a = a
        self.divisors = [d for d in range(1, m + 1) if m % d == 0]
        self.components = {d: BiRing(spec.g, cyclotomic(d) ** N) for d in self.divisors}
        self.edges = []
        self.skipped = []
        self.lifts = {}
        for d in self.divisors:
            for p in primefactors(m // d) if m // d > 1 else []:
                if spec.inverted(p):
                    self.skipped.append((d, p))
                    continue
                self.edges.append((d, p))
                if p not in self.lifts:
                    self.lifts[p] = frobenius_lift(spec, p, a)
        self.edge_length = {}
        for d, p in self.edges:
            self.edge_length[(d, p)] = _edge_length(d, p, N, a)
            if self.edge_length[(d, p)] < 1:
                raise InsufficientPrecision(f"Phi_{p * d}^{N} does not vanish modulo ({p}^{a}, Phi_{d})")
        self.validation = self._validate()

    def edge_ring(self, d, p):
        return BiRing(self.spec.g, cyclotomic(d) ** self.edge_length[(d, p)], p ** self.a)

    def gluing_map(self, d, p, element):
        """phi_p on R-coefficients, q fixed, in R_p[q]/(p^a, Phi_d^N')."""
        ring = self.edge_ring(d, p)
        reduced = ring.reduce_rows(element)
        image = self.lifts[p]["image"]
        rows = [_apply_lift(self.spec, p, self.a, image, row) for row in reduced]
        return ring.reduce_rows(rows)

    def _validate(self):
        report = {"lifts": {}, "isomorphism": {}, "chains": [], "squares": [], "pass": True}
        for p, lift in sorted(self.lifts.items()):
            ok = lift["unique"] and lift["congruent_to_power"]
            report["lifts"][str(p)] = {"image": lift["image_str"], "unique": lift["unique"], "ok": ok}
            iso = _lift_is_isomorphism(self.spec, p, self.a, lift["image"])
            report["isomorphism"][str(p)] = iso
            report["pass"] &= ok and iso
        for d in self.divisors:
            for p in self.lifts:
                if (self.m // d) % (p * p) == 0:
                    ok = _chain_commutes(self.spec, p, self.a, self.lifts[p]["image"])
                    report["chains"].append({"from": d, "p": p, "to": p * p * d, "pass": ok})
                    report["pass"] &= ok
        autos = global_automorphisms(self.spec)
        for d in self.divisors:
            for p, r in itertools.combinations(sorted(self.lifts), 2):
                if (self.m // d) % (p * r):
                    continue
                ok, detail = _square_commutes(self.spec, p, r, self.a, self.lifts, autos)
                report["squares"].append({"corner": d, "primes": [p, r], "pass": ok, "detail": detail})
                report["pass"] &= ok
        return report

    def element(self, components):
        """A glued element; raises GluingMismatch if some edge disagrees."""
        comps = {d: self.components[d].reduce_rows(components[d]) for d in self.divisors}
        for d, p in self.edges:
            ring = self.edge_ring(d, p)
            upper = ring.reduce_rows(comps[p * d])
            lower = self.gluing_map(d, p, comps[d])
            if upper != lower:
                raise GluingMismatch(f"components {d} and {p * d} disagree under phi_{p}")
        return GluedElement(self, comps)

    def from_terms(self, terms):
        return self.element({d: self.components[d].from_terms(terms) for d in self.divisors})

    def q_element(self):
        return self.from_terms({(1, 0): 1})

    def constant(self, coeffs):
        return self.from_terms({(0, e): c for e, c in enumerate(coeffs)})

    def to_json(self):
        return {
            "spec": self.spec.to_json(),
            "m": self.m,
            "N": self.N,
            "a": self.a,
            "edges": [{"d": d, "p": p, "length": self.edge_length[(d, p)]} for d, p in self.edges],
            "skipped": [{"d": d, "p": p} for d, p in self.skipped],
            "validation": self.validation,
        }


class GluedElement:
    def __init__(self, ring, components):
        self.ring = ring
        self.components = components


def ghost(G, d, element):
    """Phi_d-component of a glued element."""
    if d < 1 or G.m % d:
        raise NotADivisor(f"{d} does not divide {G.m}")
    return element.components[d]


def _edge_length(d, p, N, a):
    """Largest k <= N with Phi_pd^N = 0 in Z/p^a[q]/Phi_d^k."""
    best = 0
    target = cyclotomic(p * d) ** N
    for k in range(1, N + 1):
        ring = ResidueRing(cyclotomic(d) ** k, pmod=p ** a, prime=p)
        if ring.is_zero(ring.reduce(target)):
            best = k
        else:
            break
    return best


def _lift_is_isomorphism(spec, p, a, image):
    """Matrix of phi on the basis x^i has unit determinant modulo p."""
    if spec.degree <= 1:
        return True
    from .intlinalg import det_bareiss

    ring = _xring(spec, p, a)
    cols = [ring.pow(image, i) if i else ring.one() for i in range(spec.degree)]
    det = det_bareiss([[cols[c][r] for c in range(spec.degree)] for r in range(spec.degree)])
    return det % p != 0 and ring.is_zero(_compose(ring, spec.g.dense(), image))


def _chain_commutes(spec, p, a, image):
    """phi_p o phi_p agrees with the independently lifted x^(p^2)."""
    if spec.degree <= 1:
        return True
    ring = _xring(spec, p, a)
    twice = _compose(ring, list(image), image)
    direct = frobenius_lift(spec, p, a, power=2)["image"]
    return twice == direct


def _square_commutes(spec, p, r, a, lifts, autos):
    """Identify each p-adic lift with a global automorphism and compare composites."""
    if spec.degree <= 1:
        return True, "trivial"
    matched = {}
    for prime in (p, r):
        ring = _xring(spec, prime, a)
        for auto in autos:
            if ring.canon(list(auto)) == lifts[prime]["image"]:
                matched[prime] = auto
                break
    if len(matched) < 2:
        return False, "lift not matched by a global automorphism"
    g = spec.g
    sigma, tau = matched[p], matched[r]

    def apply(auto, vec):
        ring = ResidueRing(g)
        return _compose(ring, list(vec), ring.canon(list(auto)))

    x = ResidueRing(g).canon([0, 1])
    one_way = apply(sigma, apply(tau, x))
    other = apply(tau, apply(sigma, x))
    return one_way == other, "global automorphisms commute" if one_way == other else "composites differ"


def build_relative_habiro(spec, m, N=None, a=4):
    N = N if N is not None else a + 4
    return GluedRing(spec, m, N, a)


def compare_qwitt(G, sample_seed=0):
    """Componentwise comparison with R[q]/Phi_d and mod-p Frobenius compatibility."""
    rng = random.Random(sample_seed)
    spec = G.spec
    report = {"m": G.m, "components": {}, "frobenius": {}, "pass": True}
    n = max(spec.degree, 1)
    for d in G.divisors:
        big = G.components[d]
        small = BiRing(spec.g, cyclotomic(d))
        samples = [big.from_terms({(rng.randrange(3), rng.randrange(n)): rng.randrange(-3, 4) for _ in range(3)}) for _ in range(4)]
        hom = all(
            small.reduce_rows(big.mul(x, y)) == small.mul(small.reduce_rows(x), small.reduce_rows(y))
            and small.reduce_rows(big.add(x, y)) == small.add(small.reduce_rows(x), small.reduce_rows(y))
            for x in samples
            for y in samples
        )
        rank = small.D * small.n
        expected_rank = cyclotomic(d).degree() * spec.degree
        ok = hom and rank == expected_rank
        report["components"][str(d)] = {"rank": rank, "ring_map": hom, "pass": ok}
        report["pass"] &= ok
    for d, p in G.edges:
        key = f"{d}->{p * d}"
        if spec.degree <= 1:
            report["frobenius"][key] = {"p": p, "pass": True, "elements": 1}
            continue
        ring = _xring(spec, p, 1)
        image = [c % p for c in G.lifts[p]["image"]]
        image = ring.canon(image)
        elements = list(itertools.product(range(p), repeat=spec.degree))
        ok = all(_compose(ring, list(v), image) == ring.pow(ring.canon(list(v)), p) for v in elements)
        report["frobenius"][key] = {"p": p, "pass": ok, "elements": len(elements)}
        report["pass"] &= ok
    return report
