"""Calculus in free delta-rings.

A DeltaPoly is a polynomial in the symbols delta^j(x_r) with coefficients in
Q[t]/t^N, t = q - 1.  Coefficients are tuples of N Fractions whose
denominators are powers of p.  Frobenius acts on coefficients through
q -> q^p and on symbols through phi(v) = v^p + p * delta(v).

The module also constructs the decomposition witnesses for iterated divided
powers in terms of q-divided powers and vice versa, and re-verifies them
against a direct expansion.
"""

from fractions import Fraction
from functools import lru_cache
from math import comb, gcd

from .errors import DivisionNotExact, QCalcError, ValuationBudgetExceeded
from .qcore import q_integer, series_in_t


# ---------------------------------------------------------------------------
# truncated series in t = q - 1


def s_zero(N):
    return (Fraction(0),) * N


def s_const(c, N):
    return (Fraction(c),) + (Fraction(0),) * (N - 1)


def s_is_zero(a):
    return not any(a)


def s_add(a, b):
    if not any(b):
        return a
    if not any(a):
        return b
    return tuple(x + y for x, y in zip(a, b))


def s_sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def s_scale(a, c):
    return tuple(x * c for x in a)


def _common_denominator(a):
    den = 1
    for x in a:
        d = x.denominator
        if d != 1:
            den = den * d // gcd(den, d)
    return den, [x.numerator * (den // x.denominator) for x in a]


def _integer_terms(terms):
    den = 1
    for c in terms.values():
        for x in c:
            d = x.denominator
            if d != 1:
                den = den * d // gcd(den, d)
    return den, [(m, [x.numerator * (den // x.denominator) for x in c]) for m, c in terms.items()]


def s_mul(a, b):
    # integer convolution over a common denominator, one normalisation per output
    N = len(a)
    da, ia = _common_denominator(a)
    db, ib = _common_denominator(b)
    acc = [0] * N
    for i, x in enumerate(ia):
        if x:
            for j in range(N - i):
                y = ib[j]
                if y:
                    acc[i + j] += x * y
    den = da * db
    return tuple(Fraction(v, den) if v else Fraction(0) for v in acc)


def s_shift(a, k):
    """Multiply by t^k."""
    N = len(a)
    return (Fraction(0),) * min(k, N) + tuple(a[: max(N - k, 0)])


def s_inv(a):
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term")
    N = len(a)
    inv0 = 1 / a[0]
    out = [Fraction(0)] * N
    out[0] = inv0
    for k in range(1, N):
        acc = Fraction(0)
        for i in range(1, k + 1):
            if a[i]:
                acc += a[i] * out[k - i]
        out[k] = -acc * inv0
    return tuple(out)


def s_pow(a, n):
    out = s_const(1, len(a))
    for _ in range(n):
        out = s_mul(out, a)
    return out


def s_from_poly(f, N):
    """Series of a ZqPoly in t."""
    return tuple(Fraction(c) for c in series_in_t(f, N))


@lru_cache(maxsize=None)
def _tau_powers(p, N):
    tau = tuple(Fraction(comb(p, k)) if 1 <= k <= p else Fraction(0) for k in range(N))
    powers = [s_const(1, N)]
    for _ in range(1, N):
        powers.append(s_mul(powers[-1], tau))
    return powers


def s_phi(a, p):
    """Frobenius on coefficients: t -> (1 + t)^p - 1."""
    N = len(a)
    if all(x == 0 for x in a[1:]):
        return tuple(a)
    powers = _tau_powers(p, N)
    out = [Fraction(0)] * N
    for k, c in enumerate(a):
        if c:
            pk = powers[k]
            for i in range(k, N):
                if pk[i]:
                    out[i] += c * pk[i]
    return tuple(out)


@lru_cache(maxsize=None)
def qint_series(p, N):
    """[p]_q as a series in t."""
    return s_from_poly(q_integer(p), N)


@lru_cache(maxsize=None)
def qint_inverse(p, N):
    return s_inv(qint_series(p, N))


@lru_cache(maxsize=None)
def u_series(p, N):
    """u = ([p]_q - t^(p-1))/p."""
    qp = list(qint_series(p, N))
    if p - 1 < N:
        qp[p - 1] -= 1
    return tuple(x / p for x in qp)


@lru_cache(maxsize=None)
def split_factor(p, N):
    """([p]_q - p)/p = (u - 1) + t^(p-1)/p."""
    qp = list(qint_series(p, N))
    qp[0] -= p
    return tuple(x / p for x in qp)


def vp_fraction(c, p):
    """p-adic valuation of a nonzero Fraction."""
    if c == 0:
        raise ValueError("valuation of zero")
    v = 0
    n, d = c.numerator, c.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


# ---------------------------------------------------------------------------
# monomials: sorted tuples of ((r, j), exponent)


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m, var):
    for v, e in m:
        if v == var:
            return e
    return 0


def mono_str(m):
    parts = []
    for (r, j), e in m:
        name = "x" if r == 1 else f"x{r}"
        if j == 1:
            name = f"d{name}"
        elif j > 1:
            name = f"d^{j}{name}"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def _fmt_fraction(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class DeltaPoly:
    """Element of Q[t]/t^N [delta^j x_r] with p fixed."""

    __slots__ = ("p", "N", "terms")

    def __init__(self, p, N, terms=None):
        self.p = p
        self.N = N
        clean = {}
        if terms:
            for m, c in terms.items():
                if any(c):
                    clean[m] = tuple(c)
        self.terms = clean

    # constructors
    @classmethod
    def var(cls, p, N, r=1, j=0):
        return cls(p, N, {(((r, j), 1),): s_const(1, N)})

    @classmethod
    def const(cls, p, N, c=1):
        if isinstance(c, tuple):
            return cls(p, N, {(): c})
        return cls(p, N, {(): s_const(c, N)})

    @classmethod
    def t(cls, p, N):
        """The coefficient q - 1."""
        return cls(p, N, {(): s_shift(s_const(1, N), 1)})

    @classmethod
    def from_qpoly(cls, p, N, f):
        return cls(p, N, {(): s_from_poly(f, N)})

    def zero(self):
        return DeltaPoly(self.p, self.N)

    def one(self):
        return DeltaPoly.const(self.p, self.N, 1)

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, DeltaPoly):
            if other.p != self.p or other.N != self.N:
                raise QCalcError("DeltaPoly arithmetic needs equal (p, N)")
            return other
        if isinstance(other, (int, Fraction)):
            return DeltaPoly.const(self.p, self.N, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = s_add(out[m], c) if m in out else c
        return DeltaPoly(self.p, self.N, out)

    __radd__ = __add__

    def __neg__(self):
        return DeltaPoly(self.p, self.N, {m: tuple(-x for x in c) for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.zero()
            return DeltaPoly(self.p, self.N, {m: tuple(x * other for x in c) for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        # accumulate integer numerators over one common denominator per operand
        N = self.N
        d1, left = _integer_terms(self.terms)
        d2, right = _integer_terms(other.terms)
        acc = {}
        for m1, c1 in left:
            for m2, c2 in right:
                m = mono_mul(m1, m2)
                row = acc.get(m)
                if row is None:
                    row = acc[m] = [0] * N
                for i, x in enumerate(c1):
                    if x:
                        for j in range(N - i):
                            y = c2[j]
                            if y:
                                row[i + j] += x * y
        den = d1 * d2
        out = {m: tuple(Fraction(v, den) if v else Fraction(0) for v in row) for m, row in acc.items()}
        return DeltaPoly(self.p, self.N, out)

    __rmul__ = __mul__

    def scale_series(self, s):
        return DeltaPoly(self.p, self.N, {m: s_mul(c, s) for m, c in self.terms.items()})

    def __truediv__(self, k):
        return self * Fraction(1, k) if isinstance(k, int) else self * (1 / Fraction(k))

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = self.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DeltaPoly.const(self.p, self.N, other)
        if not isinstance(other, DeltaPoly):
            return NotImplemented
        return self.p == other.p and self.N == other.N and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, self.N, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def variables(self):
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return sorted(out)

    def max_delta_depth(self):
        return max((v[1] for v in self.variables()), default=-1)

    # valuations
    def min_valuation(self):
        """Least p-adic valuation among coefficients (None for zero)."""
        vals = [vp_fraction(x, self.p) for c in self.terms.values() for x in c if x]
        return min(vals) if vals else None

    def is_integral(self):
        v = self.min_valuation()
        return v is None or v >= 0

    def t_order(self):
        """Least t-exponent present (None for zero)."""
        orders = [next(i for i, x in enumerate(c) if x) for c in self.terms.values()]
        return min(orders) if orders else None

    def iter_terms(self):
        """Yield (monomial, k, coefficient) for every nonzero coefficient of t^k."""
        for m in sorted(self.terms, key=_mono_key):
            for k, x in enumerate(self.terms[m]):
                if x:
                    yield m, k, x

    @classmethod
    def from_terms(cls, p, N, items):
        out = {}
        for m, k, x in items:
            if k >= N:
                continue
            c = list(out.get(m, s_zero(N)))
            c[k] += x
            out[m] = tuple(c)
        return cls(p, N, out)

    def truncate(self, N):
        return DeltaPoly(self.p, N, {m: tuple(c[:N]) + s_zero(max(0, N - len(c))) for m, c in self.terms.items()})

    # substitution and the delta structure
    def substitute(self, image_of, coeff_map=None):
        """Ring map: symbol v -> image_of(v), coefficients through coeff_map."""
        cache = {}

        def power(v, e):
            key = (v, e)
            if key not in cache:
                if e == 1:
                    cache[key] = image_of(v)
                else:
                    half = power(v, e // 2)
                    sq = half * half
                    cache[key] = sq * image_of(v) if e % 2 else sq
            return cache[key]

        out = self.zero()
        for m, c in self.terms.items():
            cc = coeff_map(c) if coeff_map else c
            term = DeltaPoly(self.p, self.N, {(): cc})
            for v, e in m:
                term = term * power(v, e)
            out = out + term
        return out

    def frobenius(self):
        p = self.p

        def image(v):
            r, j = v
            return DeltaPoly.var(p, self.N, r, j) ** p + DeltaPoly.var(p, self.N, r, j + 1) * p

        return self.substitute(image, lambda c: s_phi(c, p))

    def delta(self, check_integral=False):
        out = (self.frobenius() - self ** self.p) / self.p
        if check_integral and self.is_integral() and not out.is_integral():
            raise DivisionNotExact("delta of an integral element is not integral")
        return out

    def gamma(self, budget=None):
        out = (self ** self.p) / self.p
        _check_budget(out, budget)
        return out

    def gamma_q(self, budget=None):
        out = self.frobenius().scale_series(qint_inverse(self.p, self.N)) - self.delta()
        _check_budget(out, budget)
        return out

    # formatting and serialisation
    def __repr__(self):
        return f"DeltaPoly(p={self.p}, N={self.N}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, k, x in self.iter_terms():
            tpart = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            body = "*".join(s for s in (tpart, mono_str(m) if m else "") if s)
            parts.append(f"{_fmt_fraction(x)}" + (f"*{body}" if body else ""))
        return " + ".join(parts)

    def to_json(self):
        out = []
        for m, k, x in self.iter_terms():
            out.append(
                {
                    "monomial": [[r, j, e] for (r, j), e in m],
                    "t": k,
                    "coeff": {"val": _fmt_fraction(x), "pval": vp_fraction(x, self.p)},
                }
            )
        return {"p": self.p, "N": self.N, "terms": out}

    @classmethod
    def from_json(cls, data):
        items = []
        for term in data["terms"]:
            m = tuple(sorted(((r, j), e) for r, j, e in term["monomial"]))
            items.append((m, term["t"], Fraction(term["coeff"]["val"])))
        return cls.from_terms(data["p"], data["N"], items)


def _mono_key(m):
    return (sum(e for _, e in m), tuple((v[0], v[1], e) for v, e in m))


def _check_budget(f, budget):
    if budget is None:
        return
    v = f.min_valuation()
    if v is not None and v < -budget:
        raise ValuationBudgetExceeded(f"valuation {v} below budget -{budget}")


# ---------------------------------------------------------------------------
# identity checks


def max_discrepancy(f):
    """Largest absolute coefficient of f (0 when f vanishes)."""
    return max((abs(x) for c in f.terms.values() for x in c), default=Fraction(0))


def _sum_cross(a, b):
    p = a.p
    out = a.zero()
    for i in range(1, p):
        out = out + (a ** i) * (b ** (p - i)) * Fraction(comb(p, i), p)
    return out


def verify_sum_rules(a, b):
    """Compare gamma_q(a+b) and delta(a+b) against the expanded sum rules."""
    cross = _sum_cross(a, b)
    gq_res = (a + b).gamma_q() - (a.gamma_q() + b.gamma_q() + cross)
    d_res = (a + b).delta() - (a.delta() + b.delta() - cross)
    return {
        "check": "sum_rules",
        "gamma_q_discrepancy": str(max_discrepancy(gq_res)),
        "delta_discrepancy": str(max_discrepancy(d_res)),
        "pass": gq_res.is_zero() and d_res.is_zero(),
    }


def verify_product_rules(a, b):
    """delta(ab) = a^p delta(b) + b^p delta(a) + p delta(a) delta(b) and
    gamma_q(ab) = phi(b) gamma_q(a) - a^p delta(b)."""
    p = a.p
    da, db = a.delta(), b.delta()
    d_res = (a * b).delta() - ((a ** p) * db + (b ** p) * da + da * db * p)
    g_res = (a * b).gamma_q() - (b.frobenius() * a.gamma_q() - (a ** p) * db)
    phi_res = (a * b).frobenius() - a.frobenius() * b.frobenius()
    return {
        "check": "product_rules",
        "delta_discrepancy": str(max_discrepancy(d_res)),
        "gamma_q_discrepancy": str(max_discrepancy(g_res)),
        "frobenius_discrepancy": str(max_discrepancy(phi_res)),
        "pass": d_res.is_zero() and g_res.is_zero() and phi_res.is_zero(),
    }


def gamma_split(f):
    """Residual of gamma(f) = gamma_q(f) + (([p]_q - p)/p)(gamma_q(f) + delta(f))."""
    gq = f.gamma_q()
    residual = f.gamma() - gq - (gq + f.delta()).scale_series(split_factor(f.p, f.N))
    return {"check": "gamma_split", "residual": str(max_discrepancy(residual)), "pass": residual.is_zero()}


def gammaq_qminus1_closed_form(p, N):
    """gamma_q(q-1) by direct evaluation against the closed form."""
    direct = DeltaPoly.t(p, N).gamma_q()
    closed = [Fraction(0)] * N
    for i in range(2, p):
        if i < N:
            closed[i] = -Fraction(comb(p, i), p)
    closed = DeltaPoly.const(p, N, tuple(closed))
    return {
        "check": "gammaq_qminus1_closed_form",
        "p": p,
        "direct": str(direct),
        "closed_form": str(closed),
        "pass": direct == closed,
    }


def check_frobenius_lift(f):
    """phi(f) - f^p is p times an integral element when f is integral."""
    diff = f.frobenius() - f ** f.p
    return diff.is_zero() or (diff / f.p).is_integral()


# ---------------------------------------------------------------------------
# decomposition witnesses


def b_exponent(p, i):
    """2(p^(i-1) + ... + p + 1)."""
    return 2 * (p ** i - 1) // (p - 1)


def scale_constant(p, N, i):
    """p^(-b_i) t^((p-2)+i) as a coefficient series."""
    s = s_shift(s_const(1, N), (p - 2) + i)
    return tuple(x / Fraction(p) ** b_exponent(p, i) for x in s)


class Decomposition:
    """Witness y_0, y_1, ... for an iterated (q-)divided power of x.

    Symbols r = 1 stand for x; r = k + 1 stand for the formal (q-)divided
    power introduced at step k.
    """

    def __init__(self, kind, p, n, N, budget):
        self.kind = kind
        self.p = p
        self.n = n
        self.N = N
        self.budget = budget
        self.y0 = DeltaPoly.var(p, N, 1, 0)
        self.ys = {}
        self.tree = []
        self.realised = {}
        self.residual = None
        self.certificate = []

    def parts(self):
        p, N = self.p, self.N
        out = [self.y0]
        for i in sorted(self.ys):
            out.append(self.ys[i].scale_series(scale_constant(p, N, i)))
        return out

    def total(self):
        out = self.y0.zero()
        for part in self.parts():
            out = out + part
        return out

    def to_json(self):
        return {
            "kind": self.kind,
            "p": self.p,
            "n": self.n,
            "N": self.N,
            "y0": self.y0.to_json(),
            "y": {str(i): y.to_json() for i, y in sorted(self.ys.items())},
            "tree": self.tree,
            "certificate": self.certificate,
            "residual": None if self.residual is None else str(self.residual),
        }


def _in_generator_ideal(m):
    """Monomial divisible by x or by a formal divided-power symbol."""
    return any(j == 0 for (r, j), _ in m)


def _classify(dec, poly, step):
    p, N = dec.p, dec.N
    y0_items = []
    y_items = {}
    leaves = []
    for m, k, c in poly.iter_terms():
        v = vp_fraction(c, p)
        if v < -dec.budget:
            raise ValuationBudgetExceeded(
                f"step {step}: coefficient valuation {v} below budget -{dec.budget}"
            )
        if v >= 0 and (k >= 1 or _in_generator_ideal(m)):
            y0_items.append((m, k, c))
            leaves.append({"monomial": mono_str(m), "t": k, "reason": "t-multiple" if k >= 1 else "generator-ideal"})
            continue
        if v >= 0:
            raise QCalcError(f"step {step}: integral term {mono_str(m)} without certificate")
        i = 1
        while b_exponent(p, i) < -v:
            i += 1
        shift = (p - 2) + i
        if k < shift:
            raise QCalcError(
                f"step {step}: term {c}*t^{k}*{mono_str(m)} needs t^{shift} for slot {i}"
            )
        y_items.setdefault(i, []).append((m, k - shift, c * Fraction(p) ** b_exponent(p, i)))
    dec.y0 = DeltaPoly.from_terms(p, N, y0_items)
    dec.ys = {i: DeltaPoly.from_terms(p, N, items) for i, items in y_items.items()}
    dec.certificate = leaves
    dec.tree.append(
        {
            "step": step,
            "y0_terms": len(y0_items),
            "slots": {str(i): len(items) for i, items in sorted(y_items.items())},
        }
    )


def _scaled_gamma_q(y, c):
    """gamma_q(c * y) = phi(y) gamma_q(c) - c^p delta(y) for a coefficient c."""
    p, N = y.p, y.N
    cpoly = DeltaPoly.const(p, N, c)
    return y.frobenius() * cpoly.gamma_q() - (cpoly ** p) * y.delta()


def _scaled_gamma(y, c):
    """gamma(c * y) = c^p y^p / p."""
    p, N = y.p, y.N
    return (y ** p) * DeltaPoly.const(p, N, tuple(x / p for x in s_pow(c, p)))


def _cross_terms(parts):
    p = parts[0].p
    total = parts[0].zero()
    powers = parts[0].zero()
    for part in parts:
        total = total + part
        powers = powers + part ** p
    return (total ** p - powers) / p


def decompose_gamma_iterate(n, p, N=8, a=64):
    """Write gamma^(n)(x) = y_0 + sum p^(-b_i) t^((p-2)+i) y_i with y_0 in the q-PD ideal."""
    if n < 1:
        raise ValueError("n must be >= 1")
    dec = Decomposition("gamma", p, n, N, a)
    split = split_factor(p, N)
    for step in range(1, n + 1):
        parts = dec.parts()
        gq = DeltaPoly.var(p, N, step + 1, 0)
        for i in sorted(dec.ys):
            gq = gq + _scaled_gamma_q(dec.ys[i], scale_constant(p, N, i))
        if len(parts) > 1:
            gq = gq + _cross_terms(parts)
        dl = dec.total().delta()
        _realise_generator(dec, step)
        new = gq + (gq + dl).scale_series(split)
        _classify(dec, new, step)
    _verify(dec, _direct_gamma(p, n, N))
    return dec


def decompose_gammaq_iterate(n, p, N=6, a=64, K=None):
    """Write gamma_q^(n)(x) = y_0 + sum p^(-b_i) t^((p-2)+i) y_i with y_0 in the PD ideal."""
    if n < 1:
        raise ValueError("n must be >= 1")
    K = N - (p - 2) if K is None else K
    dec = Decomposition("gamma_q", p, n, N, a)
    split = split_factor(p, N)
    ratio = p_over_qint(p, N)
    for step in range(1, n + 1):
        parts = dec.parts()
        gm = DeltaPoly.var(p, N, step + 1, 0)
        for i in sorted(dec.ys):
            gm = gm + _scaled_gamma(dec.ys[i], scale_constant(p, N, i))
        if len(parts) > 1:
            gm = gm + _cross_terms(parts)
        dl = dec.total().delta()
        _realise_generator(dec, step)
        new = (gm - dl.scale_series(split)).scale_series(ratio)
        _classify(dec, new, step)
        if any(i > K for i in dec.ys):
            raise ValuationBudgetExceeded(f"slot beyond K={K}")
    direct = DeltaPoly.var(p, N)
    for _ in range(n):
        direct = direct.gamma_q()
    _verify(dec, direct)
    return dec


def _realise_generator(dec, step):
    """Record the concrete value of the formal symbol introduced at this step."""
    base = _realise(dec, dec.y0)
    if dec.kind == "gamma":
        dec.realised[(step + 1, 0)] = base.gamma_q()
    else:
        dec.realised[(step + 1, 0)] = base.gamma()


def _realise(dec, poly):
    p, N = dec.p, dec.N

    def image(v):
        r, j = v
        if r == 1:
            return DeltaPoly.var(p, N, 1, j)
        key = (r, j)
        if key not in dec.realised:
            dec.realised[key] = _realise_delta(dec, r, j)
        return dec.realised[key]

    return poly.substitute(image)


def _realise_delta(dec, r, j):
    if (r, j) in dec.realised:
        return dec.realised[(r, j)]
    if j == 0:
        raise QCalcError(f"symbol {r} used before it was introduced")
    value = _realise_delta(dec, r, j - 1).delta()
    dec.realised[(r, j)] = value
    return value


def _direct_gamma(p, n, N):
    e = (p ** n - 1) // (p - 1)
    return DeltaPoly(p, N, {((((1, 0)), p ** n),): s_const(Fraction(1, p ** e), N)})


def _verify(dec, direct):
    total = _realise(dec, dec.total())
    residual = total - direct
    dec.residual = max_discrepancy(residual)
    dec.integral = all(y.is_integral() for y in dec.ys.values()) and dec.y0.is_integral()
    dec.passed = residual.is_zero() and dec.integral


def witness_report(dec):
    return {
        "check": f"decompose_{dec.kind}_iterate",
        "params": {"n": dec.n, "p": dec.p, "N": dec.N},
        "residual": str(dec.residual),
        "slots": sorted(dec.ys),
        "integral": dec.integral,
        "pass": dec.passed,
    }


def p_over_qint(p, N):
    return tuple(x * p for x in qint_inverse(p, N))


def p_over_qint_expansion(p, N, alternating=True):
    """u^-1 * sum_i (-1)^i p^-i u^-i t^((p-1)i).

    With ``alternating=False`` the signs are dropped, which is the form the
    reverse recipe is sometimes quoted in; it does not equal p/[p]_q.
    """
    uinv = s_inv(u_series(p, N))
    out = s_zero(N)
    term = uinv
    i = 0
    while (p - 1) * i < N:
        sign = -1 if alternating and i % 2 else 1
        out = s_add(out, s_shift(tuple(x * sign / Fraction(p) ** i for x in term), (p - 1) * i))
        term = s_mul(term, uinv)
        i += 1
    return out


def reverse_split_sign_check(f):
    """Residuals of gamma_q(f) = (gamma(f) -+ r delta(f)) p/[p]_q for both signs."""
    p, N = f.p, f.N
    r = split_factor(p, N)
    ratio = p_over_qint(p, N)
    gq = f.gamma_q()
    minus = gq - (f.gamma() - f.delta().scale_series(r)).scale_series(ratio)
    plus = gq - (f.gamma() + f.delta().scale_series(r)).scale_series(ratio)
    return {"minus_residual": str(max_discrepancy(minus)), "plus_residual": str(max_discrepancy(plus))}
