"""Smith normal forms and invariant factors over the PIDs the pipeline
uses: the integers, integers with a named set of primes inverted, the
rational Laurent ring Q[v, 1/v], and p-local valuations.

The elimination picks the pivot of least Euclidean size (absolute value
over the integers; exponent span, then coefficient height, over the
Laurent ring) to limit intermediate growth; over the Laurent ring rows
and columns are rescaled to primitive integer form after every update,
which is a unit operation there.  Correctness is pivot-independent.

`gcd_minors_oracle` recomputes any chain prefix product as a gcd of
minors and is the independent cross-check for `snf`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .matrices import LabeledMatrix
from .partitions import is_prime
from .qlaurent import LaurentPoly, QQ, ZERO_Q, factorize, val_p


def _gcd_int(a: int, b: int) -> int:
    return math.gcd(a, b)


@dataclass(frozen=True)
class RingSpec:
    """One of the supported coefficient rings (all PIDs / a DVR)."""

    kind: str  # integers | integers_inverted | rational_laurent | p_local
    N: int | None = None
    p: int | None = None

    def __post_init__(self):
        if self.kind == "integers_inverted":
            if not self.N or self.N < 1:
                raise ValueError("integers_inverted needs N >= 1")
        elif self.kind == "p_local":
            if not self.p or not is_prime(self.p):
                raise ValueError("p_local needs a prime p")
        elif self.kind not in ("integers", "rational_laurent"):
            raise ValueError("unknown ring kind %r" % self.kind)

    def __str__(self):
        if self.kind == "integers":
            return "ZZ"
        if self.kind == "integers_inverted":
            return "ZZ[1/%d]" % self.N
        if self.kind == "rational_laurent":
            return "QQ[v,1/v]"
        return "ZZ_(%d)" % self.p


INTEGERS = RingSpec("integers")
RATIONAL_LAURENT = RingSpec("rational_laurent")


def integers_inverted(N: int) -> RingSpec:
    return RingSpec("integers_inverted", N=abs(int(N)))


def p_local(p: int) -> RingSpec:
    return RingSpec("p_local", p=int(p))


class RingMembershipError(ValueError):
    """An entry does not belong to the declared coefficient ring."""


@dataclass(frozen=True)
class InvariantFactors:
    """Normalized divisibility chain d1 | d2 | ... plus rank deficiency.

    chain entries: positive ints (integers), N-prime-free positive ints
    (integers_inverted), monic LaurentPoly with nonzero constant term
    (rational_laurent), or nonnegative valuations (p_local).
    """

    ring: RingSpec
    chain: tuple
    zeros: int = 0

    def serialized(self) -> list:
        if self.ring.kind == "p_local":
            vals = [str(self.ring.p ** e) for e in self.chain]
        elif self.ring.kind == "rational_laurent":
            vals = [f.to_str() for f in self.chain]
        else:
            vals = [str(d) for d in self.chain]
        return vals + ["0"] * self.zeros

    def __str__(self):
        return "(%s)" % ", ".join(self.serialized())


# -- matrix intake -------------------------------------------------------


def _rows_of(M) -> list:
    if isinstance(M, LabeledMatrix):
        return M.copy_rows()
    return [list(r) for r in M]


def _to_rational_rows(rows, ring: RingSpec):
    out = []
    for r in rows:
        row = []
        for x in r:
            if isinstance(x, LaurentPoly):
                raise RingMembershipError("polynomial entry in a numeric ring")
            row.append(QQ(x))
        out.append(row)
    return out


def _denominator_scale(rows, ring: RingSpec) -> int:
    """lcm of denominators, validated to be a unit of the ring."""
    den = 1
    for r in rows:
        for x in r:
            d = int(x.denominator)
            den = den * d // math.gcd(den, d)
    if den == 1:
        return 1
    if ring.kind == "integers":
        raise RingMembershipError("non-integral entry over the integers")
    if ring.kind == "p_local":
        if den % ring.p == 0:
            raise RingMembershipError("denominator divisible by p=%d" % ring.p)
        return den
    # integers_inverted: denominator primes must divide N
    rest = den
    for q, _ in factorize(ring.N):
        while rest % q == 0:
            rest //= q
    if rest != 1:
        raise RingMembershipError("denominator %d is not invertible in %s" % (den, ring))
    return den


def _strip_primes(d: int, primes) -> int:
    for q in primes:
        while d % q == 0:
            d //= q
    return d


# -- integer Smith form ---------------------------------------------------


def _smith_integer(rows) -> tuple:
    """Diagonal divisibility chain of an integer matrix (nonneg ints)."""
    A = [[int(x) for x in r] for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    chain = []
    t = 0
    while t < min(m, n):
        # locate the least nonzero entry in the trailing block
        piv = None
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                x = Ai[j]
                if x:
                    ax = -x if x < 0 else x
                    if best is None or ax < best:
                        best = ax
                        piv = (i, j)
                        if ax == 1:
                            break
            if best == 1:
                break
        if piv is None:
            break
        i0, j0 = piv
        if i0 != t:
            A[t], A[i0] = A[i0], A[t]
        if j0 != t:
            for r in A:
                r[t], r[j0] = r[j0], r[t]
        while True:
            # clear column t
            dirty = False
            p = A[t][t]
            for i in range(t + 1, m):
                x = A[i][t]
                if x:
                    q = x // p
                    if q:
                        Ai, At = A[i], A[t]
                        for j in range(t, n):
                            Ai[j] -= q * At[j]
                    if A[i][t]:
                        A[t], A[i] = A[i], A[t]
                        dirty = True
                        break
            if dirty:
                continue
            # clear row t
            p = A[t][t]
            for j in range(t + 1, n):
                x = A[t][j]
                if x:
                    q = x // p
                    if q:
                        for i in range(t, m):
                            A[i][j] -= q * A[i][t]
                    if A[t][j]:
                        for r in A:
                            r[t], r[j] = r[j], r[t]
                        dirty = True
                        break
            if dirty:
                continue
            # divisibility sweep over the trailing block
            p = A[t][t]
            offender = None
            for i in range(t + 1, m):
                Ai = A[i]
                for j in range(t + 1, n):
                    if Ai[j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            At, Ao = A[t], A[offender]
            for j in range(t, n):
                At[j] += Ao[j]
        chain.append(abs(A[t][t]))
        t += 1
    return tuple(chain), min(m, n) - len(chain)


# -- Laurent Smith form ----------------------------------------------------
#
# Generic Euclidean elimination suffers catastrophic degree/coefficient
# swell on conjugated matrices (rational conjugators make entry spans far
# larger than the invariant factors).  Since every nonzero rational and
# every power of v is a unit of Q[v,1/v], constant-times-v^k row and
# column combinations are unimodular; a weak-Popov style reduction at
# both exponent ends shrinks the matrix to near-minimal spans before the
# pivot phase and keeps the elimination tame.


def _lp_norm(f: LaurentPoly):
    return (f.span, f.height())


def _row_norm_shift(row):
    """Shift a row so its least exponent is 0 and make it integer-primitive."""
    nz = [f for f in row if not f.is_zero()]
    if not nz:
        return row
    shift = min(f.min_exp for f in nz)
    if shift:
        row = [f.shift(-shift) for f in row]
    return _primitive_row(row)


def _row_degree(row):
    deg = None
    for f in row:
        if not f.is_zero():
            me = f.max_exp
            if deg is None or me > deg:
                deg = me
    return deg


def _row_proper_pass(A) -> bool:
    """Reduce rows to row-proper form at the high-exponent end.

    While the leading-coefficient vectors (the coefficients at each row's
    own degree) are Q-linearly dependent, replace the top row of a
    dependency by the combination that cancels its whole leading row;
    constants times powers of v are units, so this is unimodular.  Each
    event strictly lowers that row's degree, so the total degree is a
    terminating potential; at the end the row degrees of a square
    nonsingular matrix sum to the degree of its determinant.
    """
    import bisect

    m = len(A)
    n = len(A[0]) if m else 0
    changed = False
    for i in range(m):
        A[i] = _row_norm_shift(A[i])
    order = [i for i in range(m) if _row_degree(A[i]) is not None]
    order.sort(key=lambda i: _row_degree(A[i]))
    pend_degs = [_row_degree(A[i]) for i in order]
    pending = order
    basis = []  # (reduced lead vector, provenance {row: coeff}, {row: degree}, pivot col)
    while pending:
        i = pending.pop(0)
        di = pend_degs.pop(0)
        row = A[i]
        vec = [row[j].c.get(di, ZERO_Q) for j in range(n)]
        prov = {i: QQ(1)}
        degs = {i: di}
        for bvec, bprov, bdegs, pc in basis:
            f = vec[pc]
            if f:
                f = f / bvec[pc]
                vec = [vec[j] - f * bvec[j] for j in range(n)]
                for r2, c2 in bprov.items():
                    prov[r2] = prov.get(r2, ZERO_Q) - f * c2
                degs.update(bdegs)
        pc = next((j for j in range(n) if vec[j]), None)
        if pc is not None:
            basis.append((vec, prov, degs, pc))
            continue
        new = row
        for r2, c2 in prov.items():
            if r2 == i or not c2:
                continue
            shift = di - degs[r2]
            other = A[r2]
            new = [new[j] + other[j].scale(c2).shift(shift) for j in range(n)]
        new = _row_norm_shift(new)
        A[i] = new
        changed = True
        nd = _row_degree(new)
        if nd is not None:
            at = bisect.bisect_left(pend_degs, nd)
            pending.insert(at, i)
            pend_degs.insert(at, nd)
    return changed


def _total_span(A) -> int:
    return sum(f.span for r in A for f in r if not f.is_zero())


def _reduce_spans(A) -> None:
    """Row-proper reduction at both exponent ends, for rows and columns,
    iterated while the total span strictly decreases."""
    m = len(A)
    n = len(A[0]) if m else 0
    if not m or not n:
        return

    def bar_all(B):
        return [[f.bar() for f in row] for row in B]

    best = _total_span(A)
    while True:
        _row_proper_pass(A)
        B = bar_all(A)
        _row_proper_pass(B)
        A[:] = bar_all(B)
        # columns: the same two passes on the transpose
        T = [[A[i][j] for i in range(m)] for j in range(n)]
        _row_proper_pass(T)
        B = bar_all(T)
        _row_proper_pass(B)
        T = bar_all(B)
        A[:] = [[T[j][i] for j in range(n)] for i in range(m)]
        now = _total_span(A)
        if now >= best:
            return
        best = now


def _primitive_row(row):
    """Rescale a row by a rational unit so entries are integer-primitive."""
    num = 0
    den = 1
    nonzero = False
    for f in row:
        if f.is_zero():
            continue
        nonzero = True
        for v in f.c.values():
            if num != 1:
                num = math.gcd(num, int(v.numerator))
            d = int(v.denominator)
            if d != 1:
                den = den * d // math.gcd(den, d)
    if not nonzero or (num == den == 1):
        return row
    s = QQ(den, num)
    return [f.scale(s) for f in row]


def _smith_laurent(rows) -> tuple:
    A = []
    for r in rows:
        A.append([x if isinstance(x, LaurentPoly) else LaurentPoly.const(x) for x in r])
    m = len(A)
    n = len(A[0]) if m else 0
    chain = []
    t = 0
    while t < min(m, n):
        # span reduction on the trailing block before choosing a pivot
        sub = [A[i][t:] for i in range(t, m)]
        _reduce_spans(sub)
        for i in range(t, m):
            A[i][t:] = sub[i - t]
        piv = None
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                f = Ai[j]
                if not f.is_zero():
                    nm = _lp_norm(f)
                    if best is None or nm < best:
                        best = nm
                        piv = (i, j)
        if piv is None:
            break
        i0, j0 = piv
        if i0 != t:
            A[t], A[i0] = A[i0], A[t]
        if j0 != t:
            for r in A:
                r[t], r[j0] = r[j0], r[t]
        while True:
            dirty = False
            p = A[t][t]
            for i in range(t + 1, m):
                x = A[i][t]
                if x.is_zero():
                    continue
                q, _rem = x.divmod_by(p)
                if not q.is_zero():
                    Ai, At = A[i], A[t]
                    for j in range(t, n):
                        Ai[j] = Ai[j] - q * At[j]
                    A[i] = _primitive_row(Ai)
                if not A[i][t].is_zero():
                    A[t], A[i] = A[i], A[t]
                    dirty = True
                    break
            if dirty:
                continue
            p = A[t][t]
            for j in range(t + 1, n):
                x = A[t][j]
                if x.is_zero():
                    continue
                q, _rem = x.divmod_by(p)
                if not q.is_zero():
                    for i in range(t, m):
                        A[i][j] = A[i][j] - q * A[i][t]
                    col = _primitive_row([A[i][j] for i in range(m)])
                    for i in range(m):
                        A[i][j] = col[i]
                if not A[t][j].is_zero():
                    for row_ in A:
                        row_[t], row_[j] = row_[j], row_[t]
                    dirty = True
                    break
            if dirty:
                continue
            p = A[t][t]
            offender = None
            for i in range(t + 1, m):
                Ai = A[i]
                for j in range(t + 1, n):
                    if not Ai[j].divmod_by(p)[1].is_zero():
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            At, Ao = A[t], A[offender]
            for j in range(t, n):
                At[j] = At[j] + Ao[j]
            A[t] = _primitive_row(At)
        chain.append(A[t][t].normalized())
        t += 1
    return tuple(chain), min(m, n) - len(chain)


# -- public operations -------------------------------------------------------


def snf(M, ring: RingSpec) -> InvariantFactors:
    """Invariant factors of M over the given ring, unit-normalized.

    Raises RingMembershipError when an entry falls outside the ring.
    """
    rows = _rows_of(M)
    if not rows or not rows[0]:
        return InvariantFactors(ring, ())
    if ring.kind == "rational_laurent":
        chain, zeros = _smith_laurent(rows)
        out = chain
    else:
        rat = _to_rational_rows(rows, ring)
        den = _denominator_scale(rat, ring)
        ints = [[int(x * den) for x in r] for r in rat]
        chain, zeros = _smith_integer(ints)
        if ring.kind == "integers":
            out = chain
        elif ring.kind == "p_local":
            out = tuple(val_p(d, ring.p) for d in chain)
        else:
            primes = [q for q, _ in factorize(ring.N)] if ring.N > 1 else []
            out = tuple(_strip_primes(d, primes) for d in chain)
    _assert_chain(out, ring)
    return InvariantFactors(ring, out, zeros)


def _assert_chain(chain, ring: RingSpec):
    for a, b in zip(chain, chain[1:]):
        if ring.kind == "rational_laurent":
            ok = a.divides(b)
        elif ring.kind == "p_local":
            ok = a <= b
        else:
            ok = b % a == 0
        if not ok:
            raise AssertionError("invariant factors %s do not form a chain over %s" % (chain, ring))


def equiv(A, B, ring: RingSpec) -> bool:
    """Unimodular equivalence over a PID: equality of invariant factors."""
    return snf(A, ring) == snf(B, ring)


def specialize(M: LabeledMatrix, a: int, b: int = 1) -> LabeledMatrix:
    """Entrywise evaluation at v = a/b; meta records N = |a*b| so the
    natural downstream ring is integers_inverted(N)."""
    if a == 0:
        raise ValueError("theta must be nonzero")
    if math.gcd(a, b) != 1:
        raise ValueError("theta must be reduced")
    out = M.map_entries(
        lambda f: f.eval_at(a, b) if isinstance(f, LaurentPoly) else QQ(f),
        dict(M.meta, specialized_at=(a, b), inverted=abs(a * b)),
    )
    return out


def _det_int(rows) -> int:
    # Bareiss, integer entries
    M = [list(r) for r in rows]
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if M[r][k]), None)
            if piv is None:
                return 0
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _det_laurent(rows) -> LaurentPoly:
    M = [[x if isinstance(x, LaurentPoly) else LaurentPoly.const(x) for x in r] for r in rows]
    n = len(M)
    if n == 0:
        return LaurentPoly.const(1)
    sign = 1
    prev = LaurentPoly.const(1)
    for k in range(n - 1):
        if M[k][k].is_zero():
            piv = next((r for r in range(k + 1, n) if not M[r][k].is_zero()), None)
            if piv is None:
                return LaurentPoly.const(0)
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]).exact_div(prev)
            M[i][k] = LaurentPoly.const(0)
        prev = M[k][k]
    d = M[n - 1][n - 1]
    return d.scale(-1) if sign < 0 else d


def _laurent_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    while not b.is_zero():
        a, b = b, a.divmod_by(b)[1]
        if not b.is_zero():
            b = b.primitive()
    return a


def gcd_minors_oracle(M, ring: RingSpec, k: int):
    """gcd of all k x k minors, unit-normalized; the chain satisfies
    d1...dk = gcd_minors(k).  Exponential in k; intended as a test oracle
    for small matrices."""
    rows = _rows_of(M)
    m = len(rows)
    n = len(rows[0]) if m else 0
    if not 1 <= k <= min(m, n):
        raise ValueError("k out of range")
    laurent = ring.kind == "rational_laurent"
    if not laurent:
        rat = _to_rational_rows(rows, ring)
        den = _denominator_scale(rat, ring)
        rows = [[int(x * den) for x in r] for r in rat]
    g = None
    for rsel in itertools.combinations(range(m), k):
        for csel in itertools.combinations(range(n), k):
            sub = [[rows[i][j] for j in csel] for i in rsel]
            d = _det_laurent(sub) if laurent else _det_int(sub)
            if laurent:
                if d.is_zero():
                    continue
                g = d if g is None else _laurent_gcd(g, d)
                if g.span == 0:
                    return g.normalized()
            else:
                if d == 0:
                    continue
                g = abs(d) if g is None else _gcd_int(g, abs(d))
                if g == 1:
                    break
        if g == 1 and not laurent:
            break
    if g is None:
        return LaurentPoly.const(0) if laurent else 0
    if laurent:
        return g.normalized()
    if ring.kind == "integers":
        return g
    if ring.kind == "p_local":
        return val_p(g, ring.p)
    primes = [q for q, _ in factorize(ring.N)] if ring.N > 1 else []
    return _strip_primes(g, primes)
