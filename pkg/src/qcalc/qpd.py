"""Truncated models of q-PD envelopes.

The perfectoid q-divided-power module with its Nygaard filtration, the
modified q-divided power of x^alpha for alpha >= 2, the obstruction at
alpha = 1, and the q-factorial divisibility facts behind the Nygaard
comparison.
"""

from fractions import Fraction
from math import comb, factorial

from sympy import isprime

from . import deltaq
from .deltaq import (
    DeltaPoly,
    max_discrepancy,
    mono_str,
    s_inv,
    s_mul,
    s_shift,
    u_series,
    vp_fraction,
    _check_budget,
)
from .errors import InsufficientTruncation, QCalcError, ZeroElement
from .qcore import (
    LocalElement,
    Precision,
    ZqPoly,
    _inverse_rational,
    cyclotomic,
    invert,
    q_factorial,
    q_integer,
)


# ---------------------------------------------------------------------------
# q-factorial facts


def frobenius_q_factorial(n, p):
    """[n]_{q^p}! built from the factors [k]_{q^p}."""
    out = ZqPoly.const(1)
    for k in range(1, n + 1):
        out = out * q_integer(k).subs_power(p)
    return out


def q_factorial_unit_ratio(p, n):
    """w = [pn]_q! / ([n]_{q^p}! * Phi_p^n), asserting exactness and w(1) prime to p."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("n must be >= 1")
    w = q_factorial(p * n).exact_div(frobenius_q_factorial(n, p) * cyclotomic(p) ** n)
    if w(1) % p == 0:
        raise QCalcError(f"w(1) = {w(1)} is divisible by {p}")
    return w


def phi_divided_power_divisibility(n, p, N):
    """Check the Frobenius image of x^n/[n]_q! is divisible by Phi_p^n."""
    phi_route = q_factorial(n).subs_power(p)
    product_route = frobenius_q_factorial(n, p)
    w = q_factorial_unit_ratio(p, n)
    phi = cyclotomic(p)
    recombined = w * product_route * phi ** n == q_factorial(p * n)
    _, rem = product_route.divmod(phi)
    congruence = rem == ZqPoly.const(factorial(n))
    prec = Precision("cyclotomic", p, N, p, N)
    w_local = LocalElement(w, prec)
    w_inv = invert(w_local)
    unit = (w_local * w_inv) == LocalElement(1, prec)
    ok = phi_route == product_route and recombined and congruence and unit
    return {
        "check": "phi_divided_power_divisibility",
        "params": {"n": n, "p": p, "N": N},
        "w": str(w),
        "w_at_1": str(w(1)),
        "frobenius_routes_agree": phi_route == product_route,
        "recombined": recombined,
        "congruence_mod_phi": congruence,
        "w_unit_at_precision": unit,
        "pass": ok,
    }


# ---------------------------------------------------------------------------
# the perfectoid q-PD module


def _phi_valuation(c, phi, N, pmod):
    """Largest k <= N with c = 0 modulo (p^a, phi^k)."""
    if c.is_zero():
        return N
    k = 0
    while k < N:
        _, rem = c.divmod(phi ** (k + 1))
        if not rem.mod_int(pmod).is_zero():
            break
        k += 1
    return k


class QDivModule:
    """Finite sums of c_i * x^i / [floor i]_{q^p}! with i in N[1/p].

    Coefficients live in (Z/p^a)[q]/Phi_p^N.  Indices are Fractions with
    p-power denominators bounded by p^depth.
    """

    def __init__(self, p, a, N, coeffs=None, depth=1, i_max=None, twisted=True):
        self.p = p
        self.a = a
        self.N = N
        self.depth = depth
        self.i_max = i_max
        self.twisted = twisted
        self.precision = Precision("cyclotomic", p, N, p, a)
        clean = {}
        for i, c in (coeffs or {}).items():
            i = Fraction(i)
            if (i * p ** depth).denominator != 1 or i < 0:
                raise ValueError(f"index {i} outside N[1/p^{depth}]")
            if i_max is not None and i > i_max:
                raise ValueError(f"index {i} exceeds i_max={i_max}")
            if not isinstance(c, LocalElement):
                c = LocalElement(c if isinstance(c, ZqPoly) else ZqPoly.const(c), self.precision)
            if not c.is_zero():
                clean[i] = c
        self.coeffs = clean

    def _like(self, coeffs):
        return QDivModule(self.p, self.a, self.N, coeffs, self.depth, self.i_max, self.twisted)

    def basis_factorial(self, k):
        f = q_factorial(k)
        return f.subs_power(self.p) if self.twisted else f

    @classmethod
    def spanning_element(cls, p, a, N, i, n, **kw):
        """Phi_p^max(n - floor i, 0) * x^i / [floor i]!."""
        i = Fraction(i)
        power = max(n - (i.numerator // i.denominator), 0)
        return cls(p, a, N, {i: cyclotomic(p) ** power}, **kw)

    def __add__(self, other):
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out[i] + c if i in out else c
        return self._like(out)

    def __mul__(self, other):
        out = {}
        for i, c in self.coeffs.items():
            for j, d in other.coeffs.items():
                fi, fj = i.numerator // i.denominator, j.numerator // j.denominator
                s = i + j
                fs = s.numerator // s.denominator
                ratio = self.basis_factorial(fs).exact_div(self.basis_factorial(fi) * self.basis_factorial(fj))
                term = c * d * LocalElement(ratio, self.precision)
                out[s] = out[s] + term if s in out else term
        return QDivModule(self.p, self.a, self.N, out, self.depth, None, self.twisted)

    def is_zero(self):
        return not self.coeffs

    def __repr__(self):
        body = " + ".join(f"({c})*x^{i}" for i, c in sorted(self.coeffs.items()))
        return f"QDivModule({body or '0'})"


def nygaard_level(e):
    """Largest n with every coefficient divisible by Phi_p^max(n - floor i, 0)."""
    if e.is_zero():
        raise ZeroElement("Nygaard level of zero")
    phi = cyclotomic(e.p)
    pmod = e.p ** e.a
    levels = []
    for i, c in e.coeffs.items():
        v = _phi_valuation(c.rep, phi, e.N, pmod)
        levels.append(i.numerator // i.denominator + v)
    return min(levels)


def _rational_inverse_mod(f, modulus):
    """Inverse of f in Q[q]/modulus as a list of Fractions, checked by multiplication."""
    s = _inverse_rational(f.dense(), modulus.dense())
    if s is None:
        raise QCalcError(f"{f} is not invertible modulo {modulus}")
    return s


def _rational_times_mod(a, b, modulus):
    prod = [Fraction(0)] * (len(a) + len(b))
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] += x * y
    m = [Fraction(c) for c in modulus.dense()]
    d = len(m) - 1
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            for t in range(d + 1):
                prod[k - d + t] -= c * m[t]
    out = prod[:d]
    while out and out[-1] == 0:
        out.pop()
    return out


def nygaard_rationalised_image(n, p, a, N, i_max, depth=1):
    """Check fil^n becomes the ideal (x, Phi_p)^n after inverting p, at precision Phi_p^N."""
    if i_max < n:
        raise InsufficientTruncation(f"i_max={i_max} < n={n}")
    if N <= n:
        raise InsufficientTruncation(f"need N > n to see Phi_p^n, got N={N}")
    phi = cyclotomic(p)
    modulus = phi ** N
    witnesses = []
    ok = True
    # every spanning element lies in the monomial ideal
    step = Fraction(1, p ** depth)
    i = Fraction(0)
    while i <= i_max:
        fl = i.numerator // i.denominator
        j = min(fl, n)
        fact = ZqPoly.const(1)
        for k in range(1, fl + 1):
            fact = fact * q_integer(k).subs_power(p)
        inv = _rational_inverse_mod(fact, modulus)
        unit_ok = _rational_times_mod(inv, fact.dense(), modulus) == [1]
        # Phi^max(n-fl,0) x^i / [fl]! = inv * x^(i-j) * (x^j Phi^(n-j))
        extra_phi = max(n - fl, 0) - (n - j)
        ok = ok and unit_ok and extra_phi == 0
        witnesses.append(
            {
                "index": str(i),
                "generator": f"x^{j}*Phi^{n - j}",
                "cofactor_x_power": str(i - j),
                "factorial_inverse_checked": unit_ok,
            }
        )
        i += step
    # every generator x^j Phi^(n-j) is [j]! times a spanning element
    generators = []
    x_elem = QDivModule(p, a, N, {1: 1})
    for j in range(n + 1):
        elem = QDivModule.spanning_element(p, a, N, j, n)
        gen = QDivModule(p, a, N, {0: phi ** (n - j)})
        for _ in range(j):
            gen = gen * x_elem
        fact = frobenius_q_factorial(j, p)
        # x^j Phi^(n-j) expanded by module multiplication equals [j]! * elem
        scaled = elem.coeffs[Fraction(j)] * LocalElement(fact, elem.precision)
        match = set(gen.coeffs) == {Fraction(j)} and gen.coeffs[Fraction(j)] == scaled
        level_ok = nygaard_level(gen) >= n and nygaard_level(elem) >= n
        ok = ok and match and level_ok
        generators.append(
            {"generator": f"x^{j}*Phi_{p}^{n - j}", "factorial": str(fact), "match": match, "level_ok": level_ok}
        )
    return {
        "check": "nygaard_rationalised_image",
        "params": {"n": n, "p": p, "a": a, "N": N, "i_max": i_max},
        "spanning": witnesses,
        "generators": generators,
        "pass": ok,
    }


# ---------------------------------------------------------------------------
# modified q-divided powers of x^alpha


def _series_u_power(p, N, e):
    u = u_series(p, N)
    base = s_inv(u) if e < 0 else u
    out = (Fraction(1),) + (Fraction(0),) * (N - 1)
    for _ in range(abs(e)):
        out = s_mul(out, base)
    return out


def delta_power_split(alpha, p, N):
    """delta(x^alpha) = alpha x^(p(alpha-1)) delta(x) + p * B; returns B."""
    out = DeltaPoly(p, N)
    x = DeltaPoly.var(p, N)
    dx = DeltaPoly.var(p, N, 1, 1)
    for j in range(2, alpha + 1):
        out = out + (x ** (p * (alpha - j))) * (dx ** j) * (comb(alpha, j) * p ** (j - 2))
    return out


def in_power_ideal(m, k, alpha, p):
    """Is t^k * m inside (x^alpha, t)^p ?"""
    deg = 0
    for (r, j), e in m:
        if r == 1 and j == 0:
            deg = e
    return k + min(p, deg // alpha) >= p


def build_gamma_q_tilde(alpha, p, N, a=None):
    """gamma_q(x^alpha) - (u^-1 - 1) delta(x^alpha) + u^-2 t^(p-1) B with three certificates."""
    if alpha < 2:
        raise ValueError("alpha must be >= 2")
    if N <= p:
        raise InsufficientTruncation(f"need N > p, got N={N}")
    x = DeltaPoly.var(p, N)
    xa = x ** alpha
    gq = xa.gamma_q(budget=a)
    dxa = xa.delta()
    uinv = _series_u_power(p, N, -1)
    uinv2 = _series_u_power(p, N, -2)
    uinv_minus_1 = (uinv[0] - 1,) + uinv[1:]
    B = delta_power_split(alpha, p, N)
    split_ok = dxa == (x ** (p * (alpha - 1))) * DeltaPoly.var(p, N, 1, 1) * alpha + B * p
    modification = B.scale_series(s_shift(uinv2, p - 1)) - dxa.scale_series(uinv_minus_1)
    tilde = gq + modification
    _check_budget(tilde, a)
    c1 = tilde.truncate(1) == DeltaPoly(p, 1, {(((1, 0), alpha * p),): (Fraction(1, p),)})
    c2 = modification.is_integral() and (modification.t_order() or N) >= 1
    bad = [
        (mono_str(m), k, str(c))
        for m, k, c in tilde.iter_terms()
        if not in_power_ideal(m, k, alpha, p)
    ]
    c3 = not bad
    return {
        "check": "build_gamma_q_tilde",
        "params": {"alpha": alpha, "p": p, "N": N},
        "element": tilde,
        "delta_split": split_ok,
        "C1": c1,
        "C2": c2,
        "C3": c3,
        "C3_offending": bad,
        "pass": split_ok and c1 and c2 and c3,
    }


def obstruction_residue(f, alpha):
    """Residue of f modulo t*(integral span) + (x^alpha, t)^p, coordinatewise."""
    p = f.p
    residue = []
    for m, k, c in f.iter_terms():
        if in_power_ideal(m, k, alpha, p):
            continue
        v = vp_fraction(c, p)
        if k >= 1 and v >= 0:
            continue
        residue.append({"monomial": mono_str(m), "t": k, "coeff": str(c), "pval": v})
    return residue


def alpha_one_obstruction(p, N, a=None, basis_bound=2):
    """Nonzero residue of gamma_q(x) shows no (q-1)-modification reaches (x, t)^p."""
    if N <= p:
        raise InsufficientTruncation(f"need N > p, got N={N}")
    gq = DeltaPoly.var(p, N).gamma_q(budget=a)
    depth = gq.max_delta_depth()
    if depth > basis_bound:
        raise InsufficientTruncation(f"basis through delta^{basis_bound} misses depth {depth}")
    residue = obstruction_residue(gq, 1)
    expected = {"monomial": "dx", "t": p - 1, "pval": -1}
    # the coordinate should agree with -1/p modulo Z_(p)
    hit = any(
        r["monomial"] == expected["monomial"]
        and r["t"] == expected["t"]
        and r["pval"] == -1
        and (Fraction(r["coeff"]) + Fraction(1, p) == 0 or vp_fraction(Fraction(r["coeff"]) + Fraction(1, p), p) >= 0)
        for r in residue
    )
    return {
        "check": "alpha_one_obstruction",
        "params": {"p": p, "N": N},
        "residue": residue,
        "nonzero": bool(residue),
        "expected_coordinate_found": hit,
        "pass": bool(residue) and hit,
    }


def tilde_residue_check(alpha, p, N):
    """Control: the modified element has zero residue for (x^alpha, t)^p."""
    tilde = build_gamma_q_tilde(alpha, p, N)["element"]
    return obstruction_residue(tilde, alpha) == []


def gamma_q_tilde_difference(alpha, p, N):
    """Max coefficient of gamma_q_tilde - gamma_q (diagnostic)."""
    built = build_gamma_q_tilde(alpha, p, N)["element"]
    return max_discrepancy(built - (DeltaPoly.var(p, N) ** alpha).gamma_q())


def gammaq_qminus1_closed_form(p, N):
    """gamma_q(q-1) by direct evaluation against its closed form."""
    return deltaq.gammaq_qminus1_closed_form(p, N)
