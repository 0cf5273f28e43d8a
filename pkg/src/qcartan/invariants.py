"""Candidate invariant factors attached to partitions: the classical
integer product, its graded refinement, the two diagonal families used on
the right-hand sides of the verification tasks, and their p-local variant,
plus the power-sum averages used in the integrality checks.

Graded values are carried in factored form (CycloProduct); equality of
factored forms is multiset equality and never requires expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .partitions import Partition, parts_all, parts_filtered, z_of, is_prime
from .qlaurent import (
    CycloProduct,
    CYCLO_ONE,
    IntegralityViolation,
    LaurentPoly,
    ONE,
    QQ,
    factorize,
    pi_part,
    qint_factor,
    val_p,
)


def _prime_set(n: int):
    return frozenset(p for p, _ in factorize(n))


def f_factor(ell: int, k: int, t: int) -> CycloProduct:
    """The (k, t) factor of the graded invariant: [ell_k * t_P]_{(ell,k) * t_P'}
    with P the primes of ell_k = ell/gcd(ell, k)."""
    g = math.gcd(ell, k)
    ell_k = ell // g
    if ell_k == 1:
        return CYCLO_ONE
    P = _prime_set(ell_k)
    tp = pi_part(t, P)
    return qint_factor(ell_k * tp, g * (t // tp))


def r_graded(ell: int, lam: Partition) -> CycloProduct:
    """Graded invariant: product of f_factor(ell, k, t) over t <= floor(m_k/ell)."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    out = CYCLO_ONE
    for k, m in lam.mult_items():
        for t in range(1, m // ell + 1):
            out = out * f_factor(ell, k, t)
    return out


def I_graded(ell: int, lam: Partition) -> CycloProduct:
    """Diagonal family: product of f_factor(ell, k, t) over t <= m_k."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    out = CYCLO_ONE
    for k, m in lam.mult_items():
        for t in range(1, m + 1):
            out = out * f_factor(ell, k, t)
    return out


def J_graded(ell: int, lam: Partition) -> CycloProduct:
    """Conjugated family: product of [ell]_k to the power m_k."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    out = CYCLO_ONE
    for k, m in lam.mult_items():
        out = out * qint_factor(ell, k) ** m
    return out


def r_classic(ell: int, lam: Partition) -> int:
    """Ungraded invariant: prod over k not divisible by ell of
    ell_k^floor(m_k/ell) times the pi(ell_k)-part of floor(m_k/ell)!."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    out = 1
    for k, m in lam.mult_items():
        if k % ell == 0:
            continue
        q = m // ell
        if q == 0:
            continue
        ell_k = ell // math.gcd(ell, k)
        P = _prime_set(ell_k)
        out *= ell_k ** q * pi_part(math.factorial(q), P)
    return out


def g_factor(ell: int, p: int, k: int, t: int) -> CycloProduct:
    """p-local analogue of f_factor; branches on val_p(k) against val_p(ell)."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    vk = val_p(k, p)
    vl = val_p(ell, p)
    if vk >= vl:
        ell_pp = ell // p ** vl
        if ell_pp == 1:
            return CYCLO_ONE
        m = (k // p ** vk) * p ** (vl + val_p(t, p))
        return qint_factor(ell_pp, m)
    n = ell * p ** val_p(t, p) // p ** vk
    return qint_factor(n, k)


def I_local(ell: int, p: int, lam: Partition) -> CycloProduct:
    """Product of g_factor(ell, p, k, t) over t <= m_k."""
    out = CYCLO_ONE
    for k, m in lam.mult_items():
        for t in range(1, m + 1):
            out = out * g_factor(ell, p, k, t)
    return out


@dataclass(frozen=True)
class InvariantFormula:
    """A named diagonal family; evaluation dispatches on kind."""

    kind: str  # r_classic | r_graded | I_graded | J_graded | I_local
    ell: int
    p: int | None = None

    def of(self, lam: Partition):
        if self.kind == "r_classic":
            return r_classic(self.ell, lam)
        if self.kind == "r_graded":
            return r_graded(self.ell, lam)
        if self.kind == "I_graded":
            return I_graded(self.ell, lam)
        if self.kind == "J_graded":
            return J_graded(self.ell, lam)
        if self.kind == "I_local":
            return I_local(self.ell, self.p, lam)
        raise ValueError("unknown invariant kind %r" % self.kind)


def a_p_theta(p: int, theta, n: int):
    """Weighted average over p-power partitions of n: sum of
    prod_j theta_j^(m_{p^j}) / z_nu.  theta is indexed by j from 0."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    theta = [QQ(t) for t in theta]
    total = QQ(0)
    for nu in parts_filtered("pow", p, n):
        term = QQ(1, z_of(nu))
        for k, m in nu.mult_items():
            j = 0
            kk = k
            while kk % p == 0:
                kk //= p
                j += 1
            if j >= len(theta):
                raise ValueError("theta too short: need index %d" % j)
            term *= theta[j] ** m
        total += term
    return total


def b_theta(f: LaurentPoly, n: int) -> LaurentPoly:
    """sum over partitions of n of prod_k infl_k(f)^(m_k) / z_lam.

    The result is guaranteed integral for integral f; a non-integral
    outcome signals a counterexample and raises IntegralityViolation.
    """
    if not f.is_integral():
        raise ValueError("f must have integer coefficients")
    total = LaurentPoly.const(0)
    infl = {}
    for lam in parts_all(n):
        term = ONE
        for k, m in lam.mult_items():
            g = infl.get(k)
            if g is None:
                g = infl.setdefault(k, f.inflate(k))
            term = term * g ** m
        total = total + term.scale(QQ(1, z_of(lam)))
    if not total.is_integral():
        raise IntegralityViolation("power-sum average left the integral ring: %s" % total)
    return total
