"""Exact Laurent polynomials over Q, quantum integers, scaled cyclotomic
products and p-adic utilities.

Coefficients are gmpy2 rationals (Fraction fallback), so every operation
is exact; no floating point appears anywhere.  Large multiplications go
through Kronecker substitution (pack coefficients into one big integer,
multiply with GMP, unpack), which keeps the dense cyclotomic expansions
cheap.  The cyclotomic cache is append-only and safe for concurrent
readers under the GIL.
"""

from __future__ import annotations

import math
from functools import lru_cache

try:
    from gmpy2 import mpq, mpz

    _HAVE_GMPY = True
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from fractions import Fraction as mpq

    mpz = int
    _HAVE_GMPY = False

QQ = mpq
ZERO_Q = mpq(0)
ONE_Q = mpq(1)


class IntegralityViolation(Exception):
    """An exact computation produced a non-integral value where integrality
    is guaranteed; this signals a genuine counterexample or a bug."""


def _as_q(x):
    if isinstance(x, type(ONE_Q)):
        return x
    return mpq(x)


class LaurentPoly:
    """Sparse Laurent polynomial {exponent: rational}; zeros never stored."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                v = _as_q(v)
                if v:
                    c[int(e)] = v
        self.c = c

    @classmethod
    def _raw(cls, c: dict) -> "LaurentPoly":
        # trusted constructor: c maps int -> nonzero mpq
        self = object.__new__(cls)
        self.c = c
        return self

    @classmethod
    def const(cls, v) -> "LaurentPoly":
        v = _as_q(v)
        return cls._raw({0: v} if v else {})

    @classmethod
    def v_power(cls, e: int) -> "LaurentPoly":
        return cls._raw({int(e): ONE_Q})

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.c

    def is_one(self) -> bool:
        return self.c == {0: ONE_Q}

    def is_integral(self) -> bool:
        """True iff every coefficient is an integer."""
        return all(v.denominator == 1 for v in self.c.values())

    def is_unit(self) -> bool:
        """True iff a unit of Q[v, 1/v], i.e. a single term."""
        return len(self.c) == 1

    # -- shape --------------------------------------------------------

    @property
    def min_exp(self) -> int:
        return min(self.c)

    @property
    def max_exp(self) -> int:
        return max(self.c)

    @property
    def span(self) -> int:
        """max_exp - min_exp; the Euclidean size used for pivoting."""
        return max(self.c) - min(self.c)

    def height(self):
        """Max absolute numerator/denominator over the coefficients."""
        h = 0
        for v in self.c.values():
            h = max(h, abs(v.numerator), v.denominator)
        return h

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(other)
        if not self.c:
            return other
        if not other.c:
            return self
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        c = dict(a)
        for e, v in b.items():
            s = c.get(e, ZERO_Q) + v
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return LaurentPoly._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({e: -v for e, v in self.c.items()})

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return LaurentPoly.const(other) + (-self)

    def scale(self, s) -> "LaurentPoly":
        s = _as_q(s)
        if not s:
            return LaurentPoly._raw({})
        return LaurentPoly._raw({e: v * s for e, v in self.c.items()})

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by v^k."""
        if k == 0:
            return self
        return LaurentPoly._raw({e + k: v for e, v in self.c.items()})

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return self.scale(other)
        a, b = self.c, other.c
        if not a or not b:
            return LaurentPoly._raw({})
        if len(a) == 1:
            ((e, v),) = a.items()
            return other.scale(v).shift(e)
        if len(b) == 1:
            ((e, v),) = b.items()
            return self.scale(v).shift(e)
        if len(a) * len(b) > 1024:
            return LaurentPoly._raw(_mul_kronecker(a, b))
        out = {}
        for ea, va in a.items():
            for eb, vb in b.items():
                e = ea + eb
                s = out.get(e, ZERO_Q) + va * vb
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return LaurentPoly._raw(out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_unit():
                raise ValueError("negative power of a non-unit")
            ((e, v),) = self.c.items()
            return LaurentPoly._raw({e * n: v ** n})
        out = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.c == other.c
        return self.c == LaurentPoly.const(other).c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    # -- involutions and substitutions ---------------------------------

    def bar(self) -> "LaurentPoly":
        """The involution v -> 1/v."""
        return LaurentPoly._raw({-e: v for e, v in self.c.items()})

    def inflate(self, t: int) -> "LaurentPoly":
        """Substitute v^t for v."""
        if t == 1:
            return self
        if t == 0:
            s = sum(self.c.values(), ZERO_Q)
            return LaurentPoly.const(s)
        return LaurentPoly._raw({e * t: v for e, v in self.c.items()})

    def eval_at(self, a: int, b: int = 1):
        """Exact value at v = a/b (a nonzero, gcd(a,b) = 1)."""
        if a == 0:
            raise ZeroDivisionError("v must be evaluated at a unit")
        theta = mpq(a, b)
        total = ZERO_Q
        for e, v in self.c.items():
            total += v * theta ** e
        return total

    # -- Euclidean structure -------------------------------------------

    def divmod_by(self, other: "LaurentPoly"):
        """(q, r) with self = q*other + r and span(r) < span(other) (or r = 0)."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if not self.c:
            return LaurentPoly._raw({}), LaurentPoly._raw({})
        if len(other.c) == 1:
            ((e, v),) = other.c.items()
            return self.scale(1 / v).shift(-e), LaurentPoly._raw({})
        smin = self.min_exp
        omin = other.min_exp
        r = {e - smin: v for e, v in self.c.items()}
        den = {e - omin: v for e, v in other.c.items()}
        dmax = max(den)
        dlead = den[dmax]
        q = {}
        while r:
            rmax = max(r)
            if rmax < dmax:
                break
            t = r[rmax] / dlead
            qe = rmax - dmax
            q[qe] = q.get(qe, ZERO_Q) + t
            for e, v in den.items():
                ne = e + qe
                s = r.get(ne, ZERO_Q) - t * v
                if s:
                    r[ne] = s
                else:
                    r.pop(ne, None)
        shift_q = smin - omin
        qq = LaurentPoly._raw({e + shift_q: v for e, v in q.items() if v})
        rr = LaurentPoly._raw({e + smin: v for e, v in r.items()})
        return qq, rr

    def divides(self, other: "LaurentPoly") -> bool:
        return other.divmod_by(self)[1].is_zero()

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        q, r = self.divmod_by(other)
        if not r.is_zero():
            raise ValueError("division is not exact")
        return q

    # -- normal forms ---------------------------------------------------

    def content(self):
        """Positive rational c with self/c integer-primitive (0 for zero)."""
        if not self.c:
            return ZERO_Q
        num = 0
        den = 1
        for v in self.c.values():
            num = math.gcd(num, abs(int(v.numerator)))
            den = den * int(v.denominator) // math.gcd(den, int(v.denominator))
        return mpq(num, den)

    def primitive(self) -> "LaurentPoly":
        """Scale by 1/content and shift min exponent to 0."""
        if not self.c:
            return self
        c = self.content()
        m = self.min_exp
        return LaurentPoly._raw({e - m: v / c for e, v in self.c.items()})

    def normalized(self) -> "LaurentPoly":
        """Unit-normal form: monic in v with nonzero constant term."""
        if not self.c:
            return self
        m = self.min_exp
        lead = self.c[self.max_exp]
        return LaurentPoly._raw({e - m: v / lead for e, v in self.c.items()})

    # -- formatting ------------------------------------------------------

    def __repr__(self):
        return "LaurentPoly(%s)" % self.to_str()

    def to_str(self) -> str:
        """Canonical string, terms in ascending powers of v."""
        if not self.c:
            return "0"
        parts = []
        for e in sorted(self.c):
            v = self.c[e]
            sign = "-" if v < 0 else "+"
            av = -v if v < 0 else v
            if e == 0:
                body = str(av)
            else:
                ve = "v" if e == 1 else "v^%d" % e
                body = ve if av == 1 else "%s*%s" % (av, ve)
            if not parts:
                parts.append(body if sign == "+" else "-" + body)
            else:
                parts.append("%s %s" % (sign, body))
        return " ".join(parts)


ZERO = LaurentPoly._raw({})
ONE = LaurentPoly._raw({0: ONE_Q})
V = LaurentPoly._raw({1: ONE_Q})


def _mul_kronecker(a: dict, b: dict) -> dict:
    """Multiply integer- or rational-coefficient dicts by packing into
    big integers; positive and negative parts are packed separately so
    unpacking needs no borrow handling."""
    da = 1
    for v in a.values():
        dv = int(v.denominator)
        da = da * dv // math.gcd(da, dv)
    db = 1
    for v in b.values():
        dv = int(v.denominator)
        db = db * dv // math.gcd(db, dv)
    fa = {e: int(v * da) for e, v in a.items()}
    fb = {e: int(v * db) for e, v in b.items()}
    amin, bmin = min(fa), min(fb)
    wa = max(fa) - amin
    wb = max(fb) - bmin
    max_a = max(abs(c) for c in fa.values())
    max_b = max(abs(c) for c in fb.values())
    bound = 2 * max_a * max_b * min(len(fa), len(fb))
    K = ((bound.bit_length() + 8) // 8) * 8  # byte-aligned limbs

    def pack(f, fmin):
        pos = 0
        neg = 0
        for e, c in f.items():
            if c > 0:
                pos |= c << (K * (e - fmin))
            else:
                neg |= (-c) << (K * (e - fmin))
        return mpz(pos), mpz(neg)

    pa, na = pack(fa, amin)
    pb, nb = pack(fb, bmin)
    pos = int(pa * pb + na * nb)
    neg = int(pa * nb + na * pb)
    nlimbs = wa + wb + 1
    nbytes = K // 8
    pos_b = pos.to_bytes(nlimbs * nbytes, "little")
    neg_b = neg.to_bytes(nlimbs * nbytes, "little")
    scale = mpq(1, da * db)
    out = {}
    base = amin + bmin
    for i in range(nlimbs):
        cp = int.from_bytes(pos_b[i * nbytes : (i + 1) * nbytes], "little")
        cn = int.from_bytes(neg_b[i * nbytes : (i + 1) * nbytes], "little")
        c = cp - cn
        if c:
            out[base + i] = c * scale
    return out


# -- quantum integers --------------------------------------------------


def qint(n: int, m: int = 1) -> LaurentPoly:
    """[n]_m = (v^(mn) - v^(-mn)) / (v^m - v^(-m)); antisymmetric in n."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if n == 0:
        return ZERO
    if n < 0:
        return -qint(-n, m)
    return LaurentPoly._raw({m * (n - 1 - 2 * i): ONE_Q for i in range(n)})


def qfact(n: int, m: int = 1) -> LaurentPoly:
    """[n]_m! = [n]_m [n-1]_m ... [1]_m, with the empty product 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = ONE
    for k in range(2, n + 1):
        out = out * qint(k, m)
    return out


def inflate(t: int, f: LaurentPoly) -> LaurentPoly:
    return f.inflate(t)


def bar(f: LaurentPoly) -> LaurentPoly:
    return f.bar()


def eval_at(f: LaurentPoly, a: int, b: int = 1):
    if math.gcd(a, b) != 1:
        raise ValueError("a/b must be reduced")
    return f.eval_at(a, b)


# -- number-theoretic helpers ------------------------------------------


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple:
    """Prime factorization of n >= 1 as ((p, e), ...) with p ascending."""
    if n < 1:
        raise ValueError("n must be positive")
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    f = 5
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            out.append((f, e))
        f += 2 if f % 6 == 5 else 4
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def divisors(n: int) -> tuple:
    """All positive divisors of n, ascending."""
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p ** k for d in ds for k in range(e + 1)]
    return tuple(sorted(ds))


def euler_phi(n: int) -> int:
    phi = 1
    for p, e in factorize(n):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def val_p(x, p: int):
    """p-adic valuation of a rational; val_p(0) = +infinity."""
    x = _as_q(x)
    if not x:
        return math.inf
    v = 0
    num = int(x.numerator)
    while num % p == 0:
        num //= p
        v += 1
    den = int(x.denominator)
    while den % p == 0:
        den //= p
        v -= 1
    return v


def pi_part(n: int, primes) -> int:
    """Largest divisor of n supported on the prime set `primes`."""
    if n < 1:
        raise ValueError("n must be positive")
    out = 1
    for p, e in factorize(n):
        if p in primes:
            out *= p ** e
    return out


def pi_copart(n: int, primes) -> int:
    """Largest divisor of n with no prime factor in `primes`."""
    return n // pi_part(n, primes)


def p_part(n: int, p: int) -> int:
    return p ** val_p(n, p)


def p_copart(n: int, p: int) -> int:
    return n // p_part(n, p)


# -- cyclotomic machinery ----------------------------------------------

_cyclo_cache = {1: {1: 1, 0: -1}}  # b -> {exp: int coeff} of the b-th cyclotomic


def _cyclotomic_int(b: int) -> dict:
    """Coefficient dict of the b-th cyclotomic polynomial (ordinary poly)."""
    got = _cyclo_cache.get(b)
    if got is not None:
        return got
    # squarefree kernel first; Phi_b(v) = Phi_rad(v^(b/rad))
    rad = 1
    for p, _ in factorize(b):
        rad *= p
    if rad != b:
        base = _cyclotomic_int(rad)
        poly = {e * (b // rad): c for e, c in base.items()}
    else:
        num = LaurentPoly({b: 1, 0: -1})
        den = ONE
        for d in divisors(b):
            if d < b:
                den = den * LaurentPoly({e: c for e, c in _cyclotomic_int(d).items()})
        q = num.exact_div(den)
        poly = {e: int(c) for e, c in q.c.items()}
    _cyclo_cache[b] = poly  # atomic insert; idempotent under races
    return poly


def psi(b: int) -> LaurentPoly:
    """Centered cyclotomic v^(-phi(b)/2) * Phi_b; bar-invariant for b >= 3."""
    if b < 3:
        raise ValueError("b must be >= 3")
    half = euler_phi(b) // 2
    return LaurentPoly({e - half: c for e, c in _cyclotomic_int(b).items()})


class CycloProduct:
    """Formal product of centered cyclotomics, as {index b: exponent}."""

    __slots__ = ("f",)

    def __init__(self, factors=None):
        f = {}
        if factors:
            for b, e in factors.items():
                b = int(b)
                e = int(e)
                if e < 0:
                    raise ValueError("exponents must be nonnegative")
                if b < 3:
                    raise ValueError("factor indices must be >= 3")
                if e:
                    f[b] = e
        self.f = f

    @classmethod
    def _raw(cls, f: dict) -> "CycloProduct":
        self = object.__new__(cls)
        self.f = f
        return self

    def is_one(self) -> bool:
        return not self.f

    def __mul__(self, other: "CycloProduct") -> "CycloProduct":
        f = dict(self.f)
        for b, e in other.f.items():
            f[b] = f.get(b, 0) + e
        return CycloProduct._raw(f)

    def __pow__(self, n: int) -> "CycloProduct":
        if n < 0:
            raise ValueError("exponent must be nonnegative")
        if n == 0:
            return CycloProduct._raw({})
        return CycloProduct._raw({b: e * n for b, e in self.f.items()})

    def __eq__(self, other):
        return isinstance(other, CycloProduct) and self.f == other.f

    def __hash__(self):
        return hash(frozenset(self.f.items()))

    def items(self):
        return sorted(self.f.items())

    def expand(self) -> LaurentPoly:
        """Multiply out to a bar-invariant integer Laurent polynomial."""
        out = ONE
        for b, e in sorted(self.f.items()):
            pb = psi(b)
            for _ in range(e):
                out = out * pb
        return out

    def eval_at(self, a: int, b: int = 1):
        """Exact rational value at v = a/b without expanding."""
        total = ONE_Q
        for c, e in self.f.items():
            total *= psi(c).eval_at(a, b) ** e
        return total

    def __repr__(self):
        if not self.f:
            return "CycloProduct(1)"
        return "CycloProduct(%s)" % " * ".join(
            "Psi%d" % b if e == 1 else "Psi%d^%d" % (b, e) for b, e in self.items()
        )


CYCLO_ONE = CycloProduct._raw({})


def qint_factor(n: int, m: int = 1) -> CycloProduct:
    """Factor [n]_m into centered cyclotomics: indices b >= 3 dividing 2mn
    but not 2m, each with exponent one."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    f = {}
    for b in divisors(2 * m * n):
        if b >= 3 and (2 * m) % b != 0:
            f[b] = 1
    return CycloProduct._raw(f)


def rho(p: int, z: int, P: CycloProduct) -> CycloProduct:
    """Keep the factors whose index has p'-part z (exponents preserved)."""
    if z < 1 or z % p == 0:
        raise ValueError("z must be positive and coprime to p")
    return CycloProduct._raw({b: e for b, e in P.f.items() if p_copart(b, p) == z})
