"""Integer partitions stored as multiplicity maps, plus the bijections,
splits and block labels needed by the invariant-factor pipeline.

All values are immutable; every function here is pure.  The canonical
order on partitions of n is lexicographically decreasing on the part
tuples, and every matrix in the package inherits its row/column order
from `parts_all` / `multipartitions`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math


class Partition:
    """A partition of a nonnegative integer, stored as {part: multiplicity}.

    The empty map is the unique partition of 0.  Instances are immutable
    and hashable; `parts` is the weakly decreasing tuple view.
    """

    __slots__ = ("_mult", "_parts", "_hash")

    def __init__(self, parts=()):
        parts = tuple(sorted((int(p) for p in parts), reverse=True))
        if any(p <= 0 for p in parts):
            raise ValueError("parts must be positive")
        self._parts = parts
        mult = {}
        for p in parts:
            mult[p] = mult.get(p, 0) + 1
        self._mult = mult
        self._hash = hash(parts)

    @classmethod
    def from_mult(cls, mult) -> "Partition":
        """Build from a {part: multiplicity} mapping; zero entries are dropped."""
        parts = []
        for k, m in mult.items():
            if m < 0 or k <= 0:
                raise ValueError("invalid multiplicity map")
            parts.extend([int(k)] * int(m))
        return cls(parts)

    @property
    def parts(self) -> tuple:
        return self._parts

    def m(self, k: int) -> int:
        """Multiplicity of the part k."""
        return self._mult.get(k, 0)

    def mult_items(self):
        """(part, multiplicity) pairs with part ascending."""
        return sorted(self._mult.items())

    @property
    def size(self) -> int:
        return sum(self._parts)

    @property
    def length(self) -> int:
        return len(self._parts)

    def __add__(self, other: "Partition") -> "Partition":
        return Partition(self._parts + other._parts)

    def __eq__(self, other):
        return isinstance(other, Partition) and self._parts == other._parts

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        # canonical order: lexicographically decreasing tuples come first
        return self._parts > other._parts

    def __repr__(self):
        return "Partition%r" % (self._parts,)

    def __iter__(self):
        return iter(self._parts)

    def __len__(self):
        return len(self._parts)


EMPTY = Partition()


@dataclass(frozen=True)
class Multipartition:
    """An ordered tuple of partitions; the color count is len(components)."""

    components: tuple

    @property
    def size(self) -> int:
        return sum(c.size for c in self.components)

    def sizes(self) -> tuple:
        return tuple(c.size for c in self.components)

    def __repr__(self):
        return "Multipartition%r" % (tuple(c.parts for c in self.components),)


@dataclass(frozen=True)
class BlockLabel:
    """A core partition together with a nonnegative weight."""

    core: Partition
    weight: int


@lru_cache(maxsize=None)
def parts_all(n: int) -> tuple:
    """All partitions of n, lexicographically decreasing as part tuples.

    This order is the indexing contract for every Par(n)-indexed matrix.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")

    def gen(rest, max_part):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, max_part), 0, -1):
            for tail in gen(rest - first, first):
                yield (first,) + tail

    return tuple(Partition(p) for p in gen(n, n if n else 1))


def parts_filtered(kind: str, s: int, n: int) -> tuple:
    """Sublist of parts_all(n) for kind in {"class_regular", "regular", "pow"}.

    class_regular(s): no part divisible by s; regular(s): every
    multiplicity < s; pow(p): every part a power of p.
    """
    if kind == "class_regular":
        if s < 1:
            raise ValueError("s must be >= 1")
        keep = lambda lam: all(k % s != 0 for k in lam._mult)
    elif kind == "regular":
        if s < 1:
            raise ValueError("s must be >= 1")
        keep = lambda lam: all(m < s for m in lam._mult.values())
    elif kind == "pow":
        if not is_prime(s):
            raise ValueError("p must be prime")
        keep = lambda lam: all(_is_prime_power_of(k, s) for k in lam._mult)
    else:
        raise ValueError("unknown filter kind %r" % kind)
    return tuple(lam for lam in parts_all(n) if keep(lam))


def _is_prime_power_of(k: int, p: int) -> bool:
    while k % p == 0:
        k //= p
    return k == 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def z_of(lam: Partition) -> int:
    """The centralizer order prod_k m_k! * k^(m_k)."""
    z = 1
    for k, m in lam._mult.items():
        z *= math.factorial(m) * k ** m
    return z


def p_adic_split(p: int, lam: Partition):
    """Split lam into its p-class-regular profile and p-power components.

    Returns (nu, family) where m_j(nu) = sum_s m_{j p^s}(lam) p^s for j
    coprime to p, and family[j] is the p-power partition with
    m_{p^s}(family[j]) = m_{j p^s}(lam); keys with empty component are kept
    only when m_j(nu) > 0.
    """
    if not is_prime(p):
        raise ValueError("p must be prime")
    nu_mult = {}
    fam_mult = {}
    for k, m in lam._mult.items():
        s = 0
        j = k
        while j % p == 0:
            j //= p
            s += 1
        nu_mult[j] = nu_mult.get(j, 0) + m * p ** s
        fam_mult.setdefault(j, {})[p ** s] = m
    nu = Partition.from_mult(nu_mult)
    family = {j: Partition.from_mult(d) for j, d in fam_mult.items()}
    return nu, family


def p_adic_merge(p: int, nu: Partition, family: dict) -> Partition:
    """Inverse of p_adic_split: reassemble lam from (nu, family)."""
    mult = {}
    for j, comp in family.items():
        for q, m in comp._mult.items():
            mult[j * q] = mult.get(j * q, 0) + m
    lam = Partition.from_mult(mult)
    check, _ = p_adic_split(p, lam)
    if check != nu:
        raise ValueError("family does not match the declared profile")
    return lam


def glaisher(s: int, lam: Partition) -> Partition:
    """The base-s multiplicity-carry bijection from s-regular to
    s-class-regular partitions: m_{k'} -> sum_j s^j m_{s^j k'}.
    """
    if s < 2:
        raise ValueError("s must be >= 2")
    if any(m >= s for m in lam._mult.values()):
        raise ValueError("partition is not %d-regular" % s)
    mult = {}
    for k, m in lam._mult.items():
        j = 0
        kp = k
        while kp % s == 0:
            kp //= s
            j += 1
        mult[kp] = mult.get(kp, 0) + m * s ** j
    return Partition.from_mult(mult)


def beta(M: int, lam: Partition) -> Partition:
    """Size-preserving self-bijection of partitions built from glaisher.

    Multiplicities are split into the part divisible by M (compressed
    into parts scaled by M) and the M-regular remainder (sent through
    glaisher); beta(1, .) is the identity.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    div_mult = {}
    reg_mult = {}
    for a, m in lam._mult.items():
        q, r = divmod(m, M)
        if q:
            div_mult[a * M] = q
        if r:
            reg_mult[a] = r
    mu = Partition.from_mult(div_mult)
    reg = Partition.from_mult(reg_mult)
    if M == 1 or reg.size == 0:
        return mu + reg
    return mu + glaisher(M, reg)


def cut_red(ell: int, lam: Partition):
    """(cut, red): cut drops parts divisible by ell, red takes floor(m_k/ell)."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    cut_mult = {k: m for k, m in lam._mult.items() if k % ell != 0}
    red_mult = {k: m // ell for k, m in lam._mult.items() if m // ell > 0}
    return Partition.from_mult(cut_mult), Partition.from_mult(red_mult)


def split_r(p: int, r: int, lam: Partition):
    """Split a p-power partition at level p^r into (lo, hi, bar).

    lo keeps multiplicities below p^r, hi shifts levels down by r, and bar
    collapses everything at or above p^r onto p^r.  Identities:
    |lam| = |lo| + p^r |hi| and |bar| = |lam|.
    """
    if not is_prime(p):
        raise ValueError("p must be prime")
    if r < 0:
        raise ValueError("r must be nonnegative")
    lo_mult = {}
    hi_mult = {}
    collapsed = 0
    for k, m in lam._mult.items():
        i = 0
        kp = k
        while kp % p == 0:
            kp //= p
            i += 1
        if kp != 1:
            raise ValueError("partition has a part that is not a power of %d" % p)
        if i < r:
            lo_mult[k] = m
        else:
            hi_mult[p ** (i - r)] = m
            collapsed += p ** (i - r) * m
    bar_mult = dict(lo_mult)
    if collapsed:
        bar_mult[p ** r] = collapsed
    return (
        Partition.from_mult(lo_mult),
        Partition.from_mult(hi_mult),
        Partition.from_mult(bar_mult),
    )


def first_column_hooks(lam: Partition) -> tuple:
    """First-column hook lengths lam_i + len(lam) - i for i = 1..len(lam)."""
    n = lam.length
    return tuple(lam.parts[i] + n - (i + 1) for i in range(n))


def is_core(lam: Partition, ell: int) -> bool:
    """True iff no removable rim ell-hook exists.

    Beta-number form: with B the set of first-column hook lengths, the
    partition is an ell-core iff every b in B with b >= ell has b - ell in
    B (positions below zero count as occupied).  Equivalent to no hook
    length anywhere in the diagram being divisible by ell.
    """
    if ell < 2:
        raise ValueError("ell must be >= 2")
    B = set(first_column_hooks(lam))
    return all(b < ell or (b - ell) in B for b in B)


def blocks(ell: int, n: int) -> tuple:
    """All (core, weight) labels with |core| + ell*weight = n.

    Ordered by weight ascending, then core in canonical partition order.
    """
    if ell < 2:
        raise ValueError("ell must be >= 2")
    out = []
    for d in range(n // ell + 1):
        rest = n - ell * d
        for rho in parts_all(rest):
            if is_core(rho, ell):
                out.append(BlockLabel(rho, d))
    return tuple(out)


def compositions(ell: int, d: int) -> tuple:
    """All tuples of ell nonnegative integers summing to d, lex decreasing."""
    if ell == 0:
        return ((),) if d == 0 else ()

    def gen(slots, rest):
        if slots == 1:
            yield (rest,)
            return
        for first in range(rest, -1, -1):
            for tail in gen(slots - 1, rest - first):
                yield (first,) + tail

    return tuple(gen(ell, d))


@lru_cache(maxsize=None)
def multipartitions(ell: int, d: int) -> tuple:
    """All ell-multipartitions of d, blocked by size composition.

    Compositions come lex decreasing; within a composition the component
    partitions vary in parts_all order with the first component slowest.
    This is the indexing contract for the colored matrices.
    """
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    out = []
    for comp in compositions(ell, d):
        choices = [parts_all(ni) for ni in comp]
        idx = [0] * ell
        while True:
            out.append(Multipartition(tuple(choices[i][idx[i]] for i in range(ell))))
            j = ell - 1
            while j >= 0:
                idx[j] += 1
                if idx[j] < len(choices[j]):
                    break
                idx[j] = 0
                j -= 1
            if j < 0:
                break
    return tuple(out)


@lru_cache(maxsize=None)
def count_multipartitions(ell: int, d: int) -> int:
    """|multipartitions(ell, d)| without materializing the list."""
    if ell == 0:
        return 1 if d == 0 else 0
    if ell == 1:
        return len(parts_all(d))
    total = 0
    for first in range(d + 1):
        total += len(parts_all(first)) * count_multipartitions(ell - 1, d - first)
    return total
