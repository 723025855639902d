"""Exact arithmetic kernel.

Integer (Laurent) polynomials in q, cyclotomic polynomials, q-analogues,
truncated completed rings Z[q]/(p^a, f^N), Taylor expansions at roots of
unity and p-adic reexpansion between neighbouring expansion centres.

Roots of unity are never approximated: zeta_m is the class of q in
Z[q]/Phi_m(q).
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from sympy import divisors, isprime

from .errors import (
    DivisionNotExact,
    IndexMismatch,
    InsufficientInputPrecision,
    NotAUnit,
    QCalcError,
)


# ---------------------------------------------------------------------------
# dense coefficient-list helpers (lowest degree first)


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] += v
    return out


def _psub(a, b):
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, v in enumerate(b):
        out[i] -= v
    return out


def _pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _prem_unit_lead(a, f):
    """Remainder of a modulo f, where f has leading coefficient +-1."""
    a = list(a)
    df = len(f) - 1
    lead = f[-1]
    if lead not in (1, -1):
        raise QCalcError("modulus must have unit leading coefficient")
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i]
        if c:
            c = c * lead
            shift = i - df
            for k in range(df + 1):
                a[shift + k] -= c * f[k]
    return a[:df] + [0] * max(0, df - len(a))


# ---------------------------------------------------------------------------
# ZqPoly


class ZqPoly:
    """Integer Laurent polynomial in q: q^offset * (c_0 + c_1 q + ...)."""

    __slots__ = ("offset", "coeffs")

    def __init__(self, coeffs=(), offset=0):
        c = [int(x) for x in coeffs]
        lo = 0
        while lo < len(c) and c[lo] == 0:
            lo += 1
        c = _trim(c[lo:])
        self.coeffs = tuple(c)
        self.offset = offset + lo if c else 0

    # constructors
    @classmethod
    def q(cls):
        return cls((0, 1))

    @classmethod
    def const(cls, c):
        return cls((c,))

    @classmethod
    def monomial(cls, c, e):
        return cls((c,), e)

    @classmethod
    def from_dict(cls, d):
        if not d:
            return cls()
        lo = min(d)
        hi = max(d)
        c = [0] * (hi - lo + 1)
        for e, v in d.items():
            c[e - lo] += v
        return cls(c, lo)

    # accessors
    def is_zero(self):
        return not self.coeffs

    def degree(self):
        """Highest exponent (None for zero)."""
        return self.offset + len(self.coeffs) - 1 if self.coeffs else None

    def valuation(self):
        """Lowest exponent (None for zero)."""
        return self.offset if self.coeffs else None

    def is_polynomial(self):
        return self.offset >= 0 or not self.coeffs

    def coeff(self, e):
        i = e - self.offset
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def items(self):
        return [(self.offset + i, c) for i, c in enumerate(self.coeffs) if c]

    def dense(self):
        """Coefficient list from q^0 upwards (polynomials only)."""
        if not self.coeffs:
            return []
        if self.offset < 0:
            raise QCalcError("dense() needs a polynomial, got a Laurent polynomial")
        return [0] * self.offset + list(self.coeffs)

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, ZqPoly):
            return other
        if isinstance(other, int):
            return ZqPoly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        lo = min(self.offset, other.offset)
        a = [0] * (self.offset - lo) + list(self.coeffs)
        b = [0] * (other.offset - lo) + list(other.coeffs)
        return ZqPoly(_padd(a, b), lo)

    __radd__ = __add__

    def __neg__(self):
        return ZqPoly([-c for c in self.coeffs], self.offset)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return ZqPoly([c * other for c in self.coeffs], self.offset)
        if not isinstance(other, ZqPoly):
            return NotImplemented
        return ZqPoly(_pmul(self.coeffs, other.coeffs), self.offset + other.offset)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = ZqPoly((1,))
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = ZqPoly((other,))
        if not isinstance(other, ZqPoly):
            return NotImplemented
        return self.offset == other.offset and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.offset, self.coeffs))

    def shift(self, k):
        """Multiply by q^k."""
        return ZqPoly(self.coeffs, self.offset + k)

    def scale_div(self, d):
        """Divide every coefficient by the integer d, asserting exactness."""
        out = []
        for c in self.coeffs:
            if c % d:
                raise DivisionNotExact(f"coefficient {c} not divisible by {d}")
            out.append(c // d)
        return ZqPoly(out, self.offset)

    def __call__(self, value):
        """Evaluate at an int or Fraction (Horner)."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        if self.offset >= 0:
            return acc * value ** self.offset
        return acc / Fraction(value) ** (-self.offset)

    def subs_power(self, k):
        """Substitute q -> q^k (k >= 1)."""
        return ZqPoly.from_dict({e * k: c for e, c in self.items()})

    def derivative(self):
        return ZqPoly.from_dict({e - 1: e * c for e, c in self.items() if e != 0})

    def taylor_shift(self, c):
        """Coefficients of f(t + c) as a polynomial in t (f a polynomial)."""
        a = self.dense()
        n = len(a)
        # repeated synthetic division
        a = list(a)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                a[j] += c * a[j + 1]
        return ZqPoly(a)

    def mod_int(self, n):
        return ZqPoly([x % n for x in self.coeffs], self.offset)

    # division
    def divmod(self, other):
        """Quotient and remainder for a divisor with unit leading coefficient.

        Both polynomials must have nonnegative offsets.
        """
        a = self.dense()
        f = other.dense()
        if not f:
            raise ZeroDivisionError("division by zero polynomial")
        if len(a) < len(f):
            return ZqPoly(), self
        lead = f[-1]
        df = len(f) - 1
        quo = [0] * (len(a) - df)
        a = list(a)
        for i in range(len(a) - 1, df - 1, -1):
            c = a[i]
            if c:
                if c % lead:
                    raise DivisionNotExact("leading coefficient does not divide")
                t = c // lead
                quo[i - df] = t
                for k in range(df + 1):
                    a[i - df + k] -= t * f[k]
        return ZqPoly(quo), ZqPoly(a[:df])

    def exact_div(self, other):
        """Exact quotient in Z[q^{+-1}]; raises DivisionNotExact otherwise."""
        if isinstance(other, int):
            return self.scale_div(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return ZqPoly()
        a = ZqPoly(self.coeffs)
        b = ZqPoly(other.coeffs)
        quo, rem = a.divmod(b)
        if not rem.is_zero():
            raise DivisionNotExact(f"{other} does not divide {self}")
        return quo.shift(self.offset - other.offset)

    # formatting and serialisation
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"ZqPoly({format_poly(self)!r})"

    def to_json(self):
        return {"offset": self.offset, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        return cls([int(c) for c in data["coeffs"]], int(data.get("offset", 0)))


def format_poly(f, var="q"):
    """Lowest degree first, e.g. ``1+2q+2q^2+q^3``."""
    if not f.coeffs:
        return "0"
    parts = []
    for e, c in f.items():
        if e == 0:
            term = str(c)
        else:
            mono = var if e == 1 else f"{var}^{e}"
            if c == 1:
                term = mono
            elif c == -1:
                term = "-" + mono
            else:
                term = f"{c}{mono}"
        if parts and not term.startswith("-"):
            term = "+" + term
        parts.append(term)
    return "".join(parts)


Q = ZqPoly.q()
ONE = ZqPoly.const(1)


# ---------------------------------------------------------------------------
# cyclotomic polynomials and q-analogues


@lru_cache(maxsize=None)
def cyclotomic(m):
    """Phi_m(q) by exact division of q^m - 1 by the lower-index factors."""
    if m < 1:
        raise ValueError("cyclotomic index must be >= 1")
    f = ZqPoly.monomial(1, m) - 1
    for d in divisors(m):
        if d < m:
            f = f.exact_div(cyclotomic(d))
    return f


def q_integer(k):
    """[k]_q = (q^k - 1)/(q - 1); for k < 0 this is -q^k [-k]_q."""
    if k >= 0:
        return ZqPoly([1] * k)
    return -(q_integer(-k).shift(k))


@lru_cache(maxsize=None)
def q_factorial(n):
    if n < 0:
        raise ValueError("factorial needs n >= 0")
    out = ONE
    for k in range(1, n + 1):
        out = out * q_integer(k)
    return out


def q_binomial(n, k):
    if not 0 <= k <= n:
        raise ValueError("binomial needs 0 <= k <= n")
    return q_factorial(n).exact_div(q_factorial(k) * q_factorial(n - k))


@lru_cache(maxsize=None)
def q_pochhammer(n):
    """(q; q)_n = (1 - q)(1 - q^2)...(1 - q^n)."""
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    out = ONE
    for k in range(1, n + 1):
        out = out * (1 - ZqPoly.monomial(1, k))
    return out


def q_analogue(kind, *args):
    """Dispatch: integer(k), factorial(n), binomial(n, k), pochhammer(n)."""
    table = {
        "integer": q_integer,
        "factorial": q_factorial,
        "binomial": q_binomial,
        "pochhammer": q_pochhammer,
    }
    if kind not in table:
        raise ValueError(f"unknown q-analogue kind {kind!r}")
    return table[kind](*args)


# ---------------------------------------------------------------------------
# field helpers used for base inverses


def _field_xgcd(a, b, inv, norm):
    """Extended gcd of coefficient lists over a field.

    ``inv`` inverts a nonzero scalar, ``norm`` canonicalises a scalar.
    Returns (g, s) with s*a = g mod b, g monic.
    """

    def trim(c):
        c = [norm(x) for x in c]
        while c and c[-1] == 0:
            c.pop()
        return c

    def divmod_(x, y):
        x = list(x)
        q = [0] * max(0, len(x) - len(y) + 1)
        li = inv(y[-1])
        for i in range(len(x) - len(y), -1, -1):
            t = norm(x[i + len(y) - 1] * li)
            q[i] = t
            if t:
                for k in range(len(y)):
                    x[i + k] = norm(x[i + k] - t * y[k])
        return trim(q), trim(x[: len(y) - 1])

    r0, r1 = trim(b), trim(a)
    s0, s1 = [], [1]
    while r1:
        qq, rr = divmod_(r0, r1)
        r0, r1 = r1, rr
        s0, s1 = s1, trim(_psub(s0, _pmul(qq, s1)))
    if not r0:
        return [], []
    li = inv(r0[-1])
    return trim([x * li for x in r0]), trim([x * li for x in s0])


def _inverse_mod_p(a, f, p):
    """Inverse of a modulo (p, f) as an integer list, or None."""
    g, s = _field_xgcd(
        [x % p for x in a], [x % p for x in f], lambda x: pow(x, -1, p), lambda x: x % p
    )
    if g != [1]:
        return None
    return s


def _inverse_rational(a, f):
    """Inverse of a modulo f over Q as a Fraction list, or None."""
    g, s = _field_xgcd(
        [Fraction(x) for x in a],
        [Fraction(x) for x in f],
        lambda x: 1 / Fraction(x),
        lambda x: Fraction(x),
    )
    if g != [1]:
        return None
    return s


# ---------------------------------------------------------------------------
# residue rings (Z/p^a)[q]/(F) and precision metadata


class ResidueRing:
    """The ring Z[q]/(F) or (Z/p^a)[q]/(F) for F with unit leading and constant terms.

    Elements are tuples of length deg F.  ``base`` is the polynomial f whose
    power (together with p) generates the nilpotent ideal used for lifting
    inverses; it defaults to F itself.
    """

    def __init__(self, modulus, pmod=None, base=None, prime=None):
        f = modulus.dense()
        if not f or f[-1] not in (1, -1):
            raise QCalcError("modulus needs unit leading coefficient")
        self.modulus = modulus
        self.f = f
        self.deg = len(f) - 1
        self.pmod = pmod
        self.prime = prime
        self.base = base if base is not None else modulus
        self._qinv = None

    def canon(self, c):
        c = list(c) + [0] * (self.deg - len(c))
        if self.pmod:
            return tuple(x % self.pmod for x in c)
        return tuple(c)

    def reduce_dense(self, c):
        return self.canon(_prem_unit_lead(c, self.f))

    def q_inverse(self):
        if self._qinv is None:
            c0 = self.f[0]
            if c0 not in (1, -1):
                raise NotAUnit("q is not a unit modulo the given modulus")
            # F = q*G + c0  =>  q * (-c0*G) = 1 - c0*F/... = 1 modulo F
            g = self.f[1:]
            self._qinv = self.reduce_dense([-c0 * x for x in g])
        return self._qinv

    def reduce(self, poly):
        """Reduce a ZqPoly (Laurent allowed) to a canonical tuple."""
        if poly.is_zero():
            return self.canon([])
        if poly.offset >= 0:
            return self.reduce_dense(poly.dense())
        body = self.reduce_dense(list(poly.coeffs))
        inv = self.q_inverse()
        for _ in range(-poly.offset):
            body = self.mul(body, inv)
        return body

    def add(self, a, b):
        return self.canon([x + y for x, y in zip(a, b)])

    def sub(self, a, b):
        return self.canon([x - y for x, y in zip(a, b)])

    def neg(self, a):
        return self.canon([-x for x in a])

    def mul(self, a, b):
        return self.reduce_dense(_pmul(a, b))

    def scalar(self, a, k):
        return self.canon([k * x for x in a])

    def one(self):
        return self.canon([1])

    def zero(self):
        return self.canon([])

    def is_zero(self, a):
        return not any(a)

    def to_poly(self, a):
        return ZqPoly(a)

    def pow(self, a, n):
        out = self.one()
        while n:
            if n & 1:
                out = self.mul(out, a)
            n >>= 1
            if n:
                a = self.mul(a, a)
        return out

    def inverse(self, a):
        """Inverse by Newton doubling from an inverse modulo the maximal-ideal data."""
        base = self.base.dense()
        if self.pmod:
            r0 = _inverse_mod_p(list(a), base, self.prime)
            if r0 is None:
                raise NotAUnit("residue is not invertible modulo (p, f)")
            r = self.reduce_dense(r0)
        else:
            s = _inverse_rational(list(a), base)
            if s is None or any(x.denominator != 1 for x in s):
                raise NotAUnit("residue is not invertible modulo f")
            r = self.reduce_dense([int(x) for x in s])
        one = self.one()
        two = self.canon([2])
        for _ in range(128):
            if self.mul(a, r) == one:
                return r
            r = self.mul(r, self.sub(two, self.mul(a, r)))
        raise NotAUnit("Newton lifting did not converge")


MODULUS_KINDS = ("cyclotomic", "qpower", "root")


@dataclass(frozen=True)
class Precision:
    """Truncation data: modulus kind/index/length and optional prime power."""

    kind: str
    index: int
    length: int
    prime: int = None
    exponent: int = None

    def __post_init__(self):
        if self.kind not in MODULUS_KINDS:
            raise ValueError(f"unknown modulus kind {self.kind!r}")
        if self.index < 1 or self.length < 1:
            raise ValueError("index and length must be >= 1")
        if self.prime is not None:
            if not isprime(self.prime):
                raise ValueError(f"{self.prime} is not prime")
            if self.exponent is None or self.exponent < 1:
                raise ValueError("prime part needs exponent >= 1")

    def base_poly(self):
        if self.kind == "qpower":
            return ZqPoly.monomial(1, self.index) - 1
        return cyclotomic(self.index)

    def modulus(self):
        return self.base_poly() ** self.length

    def pmod(self):
        return self.prime ** self.exponent if self.prime is not None else None

    def ring(self):
        return _ring_for(self)

    def to_json(self):
        return {
            "kind": self.kind,
            "index": self.index,
            "length": self.length,
            "prime": None if self.prime is None else str(self.prime),
            "exponent": self.exponent,
        }

    @classmethod
    def from_json(cls, d):
        prime = d.get("prime")
        return cls(
            d["kind"],
            int(d["index"]),
            int(d["length"]),
            None if prime is None else int(prime),
            d.get("exponent"),
        )


@lru_cache(maxsize=None)
def _ring_for(prec):
    return ResidueRing(prec.modulus(), prec.pmod(), base=prec.base_poly(), prime=prec.prime)


class LocalElement:
    """An exact residue in Z[q]/(p^a, f^N), always stored reduced."""

    __slots__ = ("precision", "vec")

    def __init__(self, rep, precision, _reduced=None):
        self.precision = precision
        if _reduced is not None:
            self.vec = _reduced
        else:
            if isinstance(rep, int):
                rep = ZqPoly.const(rep)
            self.vec = precision.ring().reduce(rep)

    @property
    def rep(self):
        return ZqPoly(self.vec)

    def _wrap(self, vec):
        return LocalElement(None, self.precision, _reduced=vec)

    def _check(self, other):
        if isinstance(other, int):
            return LocalElement(other, self.precision)
        if not isinstance(other, LocalElement):
            return NotImplemented
        if other.precision != self.precision:
            raise IndexMismatch("precision mismatch between local elements")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.precision.ring().add(self.vec, other.vec))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.precision.ring().sub(self.vec, other.vec))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self._wrap(self.precision.ring().neg(self.vec))

    def __mul__(self, other):
        if isinstance(other, int):
            return self._wrap(self.precision.ring().scalar(self.vec, other))
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self._wrap(self.precision.ring().mul(self.vec, other.vec))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return invert(self) ** (-n)
        return self._wrap(self.precision.ring().pow(self.vec, n))

    def __eq__(self, other):
        if isinstance(other, int):
            other = LocalElement(other, self.precision)
        if not isinstance(other, LocalElement):
            return NotImplemented
        return self.precision == other.precision and self.vec == other.vec

    def __hash__(self):
        return hash((self.precision, self.vec))

    def is_zero(self):
        return not any(self.vec)

    def __repr__(self):
        return f"LocalElement({format_poly(self.rep)}, {self.precision})"

    def __str__(self):
        return format_poly(self.rep)

    def to_json(self):
        data = self.rep.to_json()
        data["precision"] = self.precision.to_json()
        return data

    @classmethod
    def from_json(cls, data):
        return cls(ZqPoly.from_json(data), Precision.from_json(data["precision"]))


def invert(e):
    """Inverse of a LocalElement, lifted by Newton doubling."""
    ring = e.precision.ring()
    return LocalElement(None, e.precision, _reduced=ring.inverse(e.vec))


def unit_decompose(p, N):
    """u with [p]_q = p*u + (q-1)^(p-1), as a LocalElement modulo (q-1)^N."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if N < 1:
        raise ValueError("N must be >= 1")
    u = (q_integer(p) - (Q - 1) ** (p - 1)).scale_div(p)
    return LocalElement(u, Precision("cyclotomic", 1, N))


# ---------------------------------------------------------------------------
# roots of unity and expansions


def _vp(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def crt_exponent(m, M):
    """Exponent e with zeta_m -> zeta_M^e for M = p*m (the CRT convention)."""
    if M % m:
        raise IndexMismatch(f"{m} does not divide {M}")
    p = M // m
    if not isprime(p):
        raise IndexMismatch(f"{M}/{m} is not prime")
    pv = p ** _vp(M, p)
    rest = M // pv
    # e = p mod pv, e = 1 mod rest
    e = (p * rest * pow(rest, -1, pv) + pv * pow(pv, -1, rest)) % M if rest > 1 else p % M
    return e


def zeta(m, prime=None, exponent=None):
    """zeta_m as a LocalElement of Z[q]/Phi_m (optionally mod p^a)."""
    return LocalElement(Q, Precision("cyclotomic", m, 1, prime, exponent))


def embed_cyclotomic(c, M):
    """Ring map Z[zeta_m] -> Z[zeta_M], zeta_m -> zeta_M^e (M = p*m)."""
    prec = c.precision
    if prec.kind != "cyclotomic" or prec.length != 1:
        raise IndexMismatch("embed_cyclotomic expects an element of Z[q]/Phi_m")
    e = crt_exponent(prec.index, M)
    image = ZqPoly.from_dict({(j * e) % M: v for j, v in enumerate(c.vec) if v})
    return LocalElement(image, Precision("cyclotomic", M, 1, prec.prime, prec.exponent))


def _gen_binom(j, k):
    if j >= 0:
        return comb(j, k)
    return (-1) ** k * comb(k - j - 1, k)


class RootSeries:
    """Truncated expansion sum_k c_k t^k with t = q - zeta_m, c_k in Z[zeta_c]."""

    __slots__ = ("center", "cindex", "coeffs")

    def __init__(self, center, cindex, coeffs):
        if cindex % center:
            raise IndexMismatch("coefficient index must be a multiple of the centre")
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("RootSeries needs at least one coefficient")
        prec = coeffs[0].precision
        for c in coeffs:
            if c.precision != prec:
                raise IndexMismatch("coefficients must share one precision")
        if prec.kind != "cyclotomic" or prec.index != cindex or prec.length != 1:
            raise IndexMismatch("coefficients must live in Z[q]/Phi_c")
        self.center = center
        self.cindex = cindex
        self.coeffs = coeffs

    @property
    def length(self):
        return len(self.coeffs)

    @property
    def coeff_precision(self):
        return self.coeffs[0].precision

    def _check(self, other):
        if (
            self.center != other.center
            or self.cindex != other.cindex
            or self.length != other.length
            or self.coeff_precision != other.coeff_precision
        ):
            raise IndexMismatch("series arithmetic needs equal (m, c, p-part, N)")

    def __add__(self, other):
        self._check(other)
        return RootSeries(self.center, self.cindex, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return RootSeries(self.center, self.cindex, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return RootSeries(self.center, self.cindex, [-a for a in self.coeffs])

    def __mul__(self, other):
        self._check(other)
        n = self.length
        out = []
        for k in range(n):
            acc = self.coeffs[0] * other.coeffs[k]
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * other.coeffs[k - i]
            out.append(acc)
        return RootSeries(self.center, self.cindex, out)

    def __eq__(self, other):
        if not isinstance(other, RootSeries):
            return NotImplemented
        return (
            self.center == other.center
            and self.cindex == other.cindex
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.center, self.cindex, self.coeffs))

    def truncate(self, n):
        if n > self.length:
            raise InsufficientInputPrecision("cannot extend a truncated series")
        return RootSeries(self.center, self.cindex, self.coeffs[:n])

    def reduce_mod(self, p, a):
        prec = Precision("cyclotomic", self.cindex, 1, p, a)
        return RootSeries(self.center, self.cindex, [LocalElement(c.rep, prec) for c in self.coeffs])

    def with_coeff(self, k, value):
        coeffs = list(self.coeffs)
        coeffs[k] = LocalElement(value, self.coeff_precision) if not isinstance(value, LocalElement) else value
        return RootSeries(self.center, self.cindex, coeffs)

    def __repr__(self):
        body = ", ".join(str(c) for c in self.coeffs)
        return f"RootSeries(m={self.center}, c={self.cindex}, [{body}])"

    def to_json(self):
        prec = self.coeff_precision
        return {
            "center": self.center,
            "cindex": self.cindex,
            "precision": prec.to_json(),
            "coeffs": [c.rep.to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, d):
        prec = Precision.from_json(d["precision"])
        return cls(d["center"], d["cindex"], [LocalElement(ZqPoly.from_json(c), prec) for c in d["coeffs"]])


def taylor_at_root(f, m, N, prime=None, exponent=None):
    """Coefficients of f(t + zeta_m) up to t^(N-1), in Z[zeta_m] (optionally mod p^a)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    prec = Precision("cyclotomic", m, 1, prime, exponent)
    items = f.items()
    out = []
    for k in range(N):
        acc = [0] * m
        for j, c in items:
            b = _gen_binom(j, k)
            if b:
                acc[(j - k) % m] += b * c
        out.append(LocalElement(ZqPoly(acc), prec))
    return RootSeries(m, m, out)


def embed_series(s, M):
    """Apply embed_cyclotomic to every coefficient of a series."""
    return RootSeries(s.center, M, [embed_cyclotomic(c, M) for c in s.coeffs])


def centre_difference(m, p, a):
    """c = zeta_m - zeta_pm in (Z/p^a)[zeta_pm]."""
    M = p * m
    zm = embed_cyclotomic(zeta(m, p, a), M)
    return zm - zeta(M, p, a)


@lru_cache(maxsize=None)
def k_max(p, a, m, limit=100000):
    """Least k with (zeta_m - zeta_pm)^k = 0 in (Z/p^a)[zeta_pm], found by powering."""
    c = centre_difference(m, p, a)
    power = LocalElement(1, c.precision)
    for k in range(1, limit):
        power = power * c
        if power.is_zero():
            return k
    raise QCalcError("centre difference not nilpotent within limit")


def reexpand(s, p, a, N):
    """Re-centre a series at zeta_pm to a series at zeta_m over (Z/p^a)[zeta_pm]."""
    M = s.center
    if M % p or not isprime(p):
        raise IndexMismatch(f"centre {M} is not p*m for p={p}")
    if s.cindex != M:
        raise IndexMismatch("input series must have coefficients in Z[zeta_pm]")
    m = M // p
    kmax = k_max(p, a, m)
    K = s.length
    if K < kmax:
        raise InsufficientInputPrecision(f"input length {K} < k_max = {kmax}")
    if K < N + kmax - 1:
        raise InsufficientInputPrecision(
            f"input length {K} too short for {N} exact output terms (need {N + kmax - 1})"
        )
    src = s.reduce_mod(p, a)
    c = centre_difference(m, p, a)
    prec = c.precision
    powers = [LocalElement(1, prec)]
    for _ in range(1, kmax):
        powers.append(powers[-1] * c)
    out = []
    for j in range(N):
        acc = LocalElement(0, prec)
        for k in range(j, min(K, j + kmax)):
            b = comb(k, j)
            acc = acc + src.coeffs[k] * powers[k - j] * b
        out.append(acc)
    return RootSeries(m, M, out)


# ---------------------------------------------------------------------------
# small polynomial utilities shared by other modules


def series_in_t(f, N):
    """Coefficients of f(1 + t) modulo t^N as a list of ints (Laurent f allowed)."""
    if f.is_zero():
        return [0] * N
    if f.offset >= 0:
        c = f.taylor_shift(1).dense()
        return (c + [0] * N)[:N]
    # q^-1 = (1 + t)^-1 = sum (-t)^i
    body = ZqPoly(f.coeffs).taylor_shift(1).dense()
    body = (body + [0] * N)[:N]
    inv = [(-1) ** i for i in range(N)]
    out = body
    for _ in range(-f.offset):
        out = [sum(out[i] * inv[k - i] for i in range(k + 1)) for k in range(N)]
    return out


def resultant(f, g):
    """Resultant of two integer polynomials via the Sylvester determinant."""
    from .intlinalg import det_bareiss

    a = f.dense()
    b = g.dense()
    m, n = len(a) - 1, len(b) - 1
    if m < 0 or n < 0:
        return 0
    size = m + n
    if size == 0:
        return 1
    rows = []
    for i in range(n):
        row = [0] * size
        for k, c in enumerate(reversed(a)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [0] * size
        for k, c in enumerate(reversed(b)):
            row[i + k] = c
        rows.append(row)
    return det_bareiss(rows)


def discriminant(g):
    """Discriminant of a monic polynomial g."""
    n = g.degree()
    r = resultant(g, g.derivative())
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * r
