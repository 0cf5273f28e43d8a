"""Combinatorial matrices: the permutation-character count table M_n and
its p-power submatrix, colored and symmetric-power constructions, the
conjugated diagonal families, and the graded Cartan blocks built from
them.

Builders are pure and cached per parameter; a single build is
single-threaded, but independent parameter instances can be constructed
concurrently.
"""

from __future__ import annotations

from functools import lru_cache, reduce

from .invariants import I_local, J_graded
from .matrices import (
    LabeledMatrix,
    block_diag,
    det_bareiss,
    diagonal,
    inverse_rational,
    kron,
    matmul,
    permuted,
)
from .partitions import (
    EMPTY,
    Multipartition,
    Partition,
    is_prime,
    multipartitions,
    p_adic_split,
    parts_all,
    parts_filtered,
)
from .qlaurent import IntegralityViolation, LaurentPoly, QQ, ONE, qint, val_p


class LocalIntegralityViolation(Exception):
    """A matrix that must be p-integral acquired a denominator divisible
    by p; this signals a genuine counterexample or a bug."""


# -- the count table M_n -------------------------------------------------


@lru_cache(maxsize=None)
def M_matrix(n: int) -> LabeledMatrix:
    """Square table over Par(n): entry (lam, mu) counts the maps that
    distribute the parts of mu over the rows of lam so that the parts sent
    to row i sum to lam_i.

    Computed by a memoized recursion over (multiset of unfilled row
    deficits, remaining parts of mu); rows with equal deficit are
    interchangeable, so states collapse to multisets.
    """
    labels = parts_all(n)
    memo = {}

    def count(state, rest):
        # state: deficits sorted descending, zeros dropped; rest: parts of mu
        if not rest:
            return 1 if not state else 0
        key = (state, rest)
        got = memo.get(key)
        if got is not None:
            return got
        part = rest[0]
        tail = rest[1:]
        total = 0
        seen = set()
        for idx, c in enumerate(state):
            if c < part or c in seen:
                continue
            seen.add(c)
            mult = state.count(c)
            new = list(state)
            del new[idx]
            if c > part:
                new.append(c - part)
            new.sort(reverse=True)
            total += mult * count(tuple(new), tail)
        memo[key] = total
        return total

    a = [[count(lam.parts, mu.parts) for mu in labels] for lam in labels]
    return LabeledMatrix(labels, labels, a, {"built_by": "M_matrix", "n": n})


def M_count_bruteforce(lam: Partition, mu: Partition) -> int:
    """Direct enumeration oracle for M_matrix entries (small sizes only)."""
    import itertools

    L = lam.length
    target = lam.parts
    total = 0
    for f in itertools.product(range(L), repeat=mu.length):
        sums = [0] * L
        for j, row in enumerate(f):
            sums[row] += mu.parts[j]
        if tuple(sums) == target:
            total += 1
    return total


@lru_cache(maxsize=None)
def M_inverse(n: int) -> LabeledMatrix:
    """Exact rational inverse of M_matrix(n)."""
    inv = inverse_rational(M_matrix(n))
    inv.meta.update({"built_by": "M_inverse", "n": n})
    return inv


@lru_cache(maxsize=None)
def N_matrix(p: int, n: int) -> LabeledMatrix:
    """Restriction of M_matrix(n) to the p-power partitions."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    M = M_matrix(n)
    labels = parts_filtered("pow", p, n)
    pos = {lab: i for i, lab in enumerate(M.rows)}
    a = [[M.a[pos[r]][pos[c]] for c in labels] for r in labels]
    return LabeledMatrix(labels, labels, a, {"built_by": "N_matrix", "p": p, "n": n})


@lru_cache(maxsize=None)
def N_inverse(p: int, n: int) -> LabeledMatrix:
    return inverse_rational(N_matrix(p, n))


@lru_cache(maxsize=None)
def L_matrix(p: int, n: int) -> LabeledMatrix:
    """Block-diagonal companion of M_n: partitions with the same
    p-class-regular profile form one block, and the entry is the product
    of N-matrix entries over the p-power components."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    labels = parts_all(n)
    splits = {lam: p_adic_split(p, lam) for lam in labels}
    npos = {}

    def n_entry(size, a_part, b_part):
        N = N_matrix(p, size)
        if size not in npos:
            npos[size] = {lab: i for i, lab in enumerate(N.rows)}
        pos = npos[size]
        return N.a[pos[a_part]][pos[b_part]]

    a = []
    for lam in labels:
        nu_l, fam_l = splits[lam]
        row = []
        for mu in labels:
            nu_m, fam_m = splits[mu]
            if nu_l != nu_m:
                row.append(0)
                continue
            e = 1
            for j, comp in fam_l.items():
                e *= n_entry(comp.size, comp, fam_m[j])
            row.append(e)
        a.append(row)
    return LabeledMatrix(labels, labels, a, {"built_by": "L_matrix", "p": p, "n": n})


# -- conjugated diagonal families ----------------------------------------


def conjugated_diag(n: int, ell: int) -> LabeledMatrix:
    """M_n . diag(J values) . M_n^-1 over Laurent polynomials; every entry
    is checked to be integral before returning."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    labels = parts_all(n)
    M = M_matrix(n)
    Mi = M_inverse(n)
    jpolys = [J_graded(ell, lam).expand() for lam in labels]
    k = len(labels)
    acc = [[{} for _ in range(k)] for _ in range(k)]
    for t in range(k):
        P = jpolys[t].c
        Mt = [M.a[i][t] for i in range(k)]
        Mit = Mi.a[t]
        for i in range(k):
            mi = Mt[i]
            if not mi:
                continue
            for j in range(k):
                s = mi * Mit[j]
                if not s:
                    continue
                d = acc[i][j]
                for e, c in P.items():
                    v = d.get(e, 0) + c * s
                    if v:
                        d[e] = v
                    else:
                        del d[e]
    a = []
    for i in range(k):
        row = []
        for j in range(k):
            f = LaurentPoly(acc[i][j])
            if not f.is_integral():
                raise IntegralityViolation(
                    "non-integral entry at (%r, %r): %s" % (labels[i], labels[j], f)
                )
            row.append(f)
        a.append(row)
    return LabeledMatrix(labels, labels, a, {"built_by": "conjugated_diag", "n": n, "ell": ell})


def conjugated_diag_local(p: int, n: int, ell: int, a: int, b: int = 1) -> LabeledMatrix:
    """N^(p)_n . diag(J values at v = a/b) . inverse over the p-power
    partitions; entries are checked to be p-integral."""
    if not is_prime(p):
        raise ValueError("p must be prime")
    if a % p == 0 or b % p == 0:
        raise ValueError("v must specialize to a p-unit")
    labels = parts_filtered("pow", p, n)
    N = N_matrix(p, n)
    Ni = N_inverse(p, n)
    vals = [J_graded(ell, lam).eval_at(a, b) for lam in labels]
    k = len(labels)
    out = []
    for i in range(k):
        row = []
        for j in range(k):
            s = QQ(0)
            for t in range(k):
                if N.a[i][t]:
                    s += N.a[i][t] * vals[t] * Ni.a[t][j]
            if int(s.denominator) % p == 0:
                raise LocalIntegralityViolation(
                    "entry at (%r, %r) has denominator divisible by %d: %s"
                    % (labels[i], labels[j], p, s)
                )
            row.append(s)
        out.append(row)
    return LabeledMatrix(
        labels, labels, out,
        {"built_by": "conjugated_diag_local", "p": p, "n": n, "ell": ell, "theta": (a, b)},
    )


# -- symmetric powers and colored matrices --------------------------------


def _weakly_increasing(m: int, ell: int):
    if m == 0:
        yield ()
        return
    def gen(prefix, lo):
        if len(prefix) == m:
            yield prefix
            return
        for i in range(lo, ell):
            yield from gen(prefix + (i,), i)
    yield from gen((), 0)


def sym_power(A: LabeledMatrix, m: int) -> LabeledMatrix:
    """Matrix of the m-th symmetric power on the basis of weakly increasing
    index tuples in lexicographic order."""
    ell = len(A.rows)
    if len(A.cols) != ell:
        raise ValueError("matrix is not square")
    basis = list(_weakly_increasing(m, ell))
    pos = {t: i for i, t in enumerate(basis)}
    laurent = ell > 0 and isinstance(A.a[0][0], LaurentPoly)
    one = ONE if laurent else QQ(1)
    zero = LaurentPoly.const(0) if laurent else QQ(0)
    cols_of = [[A.a[i][j] for i in range(ell)] for j in range(ell)]
    out = [[zero] * len(basis) for _ in range(len(basis))]
    for cj, J in enumerate(basis):
        cur = {(): one}
        for a in J:
            vec = cols_of[a]
            new = {}
            for mono, coef in cur.items():
                for i in range(ell):
                    c = vec[i]
                    if (c.is_zero() if laurent else not c):
                        continue
                    key = tuple(sorted(mono + (i,)))
                    term = coef * c
                    if key in new:
                        new[key] = new[key] + term
                    else:
                        new[key] = term
            cur = new
        for mono, coef in cur.items():
            out[pos[mono]][cj] = coef
    labels = tuple(tuple(A.rows[i] for i in t) for t in basis)
    return LabeledMatrix(labels, labels, out, {"built_by": "sym_power", "m": m})


def _inflate_matrix(A: LabeledMatrix, t: int) -> LabeledMatrix:
    return A.map_entries(lambda f: f.inflate(t), {"built_by": "inflate", "t": t})


def S_d(A: LabeledMatrix, d: int) -> LabeledMatrix:
    """Direct sum over shapes lam of d of Kronecker products of symmetric
    powers Sym^{m_t(lam)} of the inflated matrix, reindexed so rows and
    columns carry multipartition labels in multipartitions() order."""
    import itertools

    ell = len(A.rows)
    if len(A.cols) != ell:
        raise ValueError("matrix is not square")
    color_index = {lab: i for i, lab in enumerate(A.rows)}
    blocks = []
    labels = []
    for lam in parts_all(d):
        ts = [t for t, _ in lam.mult_items()]
        if not ts:
            blocks.append(LabeledMatrix(("o",), ("o",), [[ONE]]))
            labels.append(Multipartition((EMPTY,) * ell))
            continue
        mats = [sym_power(_inflate_matrix(A, t), lam.m(t)) for t in ts]
        block = reduce(kron, mats)
        blocks.append(block)
        for combo in itertools.product(*(m.rows for m in mats)):
            comp_mult = [dict() for _ in range(ell)]
            for t, tup in zip(ts, combo):
                for color in tup:
                    j = color_index[color]
                    comp_mult[j][t] = comp_mult[j].get(t, 0) + 1
            labels.append(
                Multipartition(tuple(Partition.from_mult(cm) for cm in comp_mult))
            )
    big = block_diag(blocks, {"built_by": "S_d", "d": d})
    big = LabeledMatrix(labels, labels, big.a, big.meta)
    target = multipartitions(ell, d)
    return permuted(big, target, target)


@lru_cache(maxsize=None)
def M_colored(ell: int, d: int) -> LabeledMatrix:
    """Colored count table over multipartitions: block-diagonal across size
    compositions, transposed count tables componentwise."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    labels = multipartitions(ell, d)
    pos = {}

    def mpos(n):
        if n not in pos:
            pos[n] = {lab: i for i, lab in enumerate(parts_all(n))}
        return pos[n]

    a = []
    for R in labels:
        szR = R.sizes()
        row = []
        for C in labels:
            if szR != C.sizes():
                row.append(0)
                continue
            e = 1
            for i, ni in enumerate(szR):
                Mi = M_matrix(ni)
                p = mpos(ni)
                e *= Mi.a[p[C.components[i]]][p[R.components[i]]]
            row.append(e)
        a.append(row)
    return LabeledMatrix(labels, labels, a, {"built_by": "M_colored", "ell": ell, "d": d})


@lru_cache(maxsize=None)
def M_colored_inverse(ell: int, d: int) -> LabeledMatrix:
    return inverse_rational(M_colored(ell, d))


# -- quantized Cartan data -------------------------------------------------


def quantized_cartan_A(ell: int) -> LabeledMatrix:
    """Tridiagonal type-A quantum matrix: [2] = v + 1/v on the diagonal,
    [-1] = -1 on the adjacent off-diagonals."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    two = qint(2)
    minus_one = LaurentPoly.const(-1)
    zero = LaurentPoly.const(0)
    a = [
        [two if i == j else minus_one if abs(i - j) == 1 else zero for j in range(ell)]
        for i in range(ell)
    ]
    labels = tuple(range(1, ell + 1))
    return LabeledMatrix(labels, labels, a, {"built_by": "quantized_cartan_A", "ell": ell})


def Q_matrix(ell: int) -> LabeledMatrix:
    """Unimodular left factor that upper-triangularizes the quantum Cartan
    matrix: entry (i, j) is v^j [i] for j in {i, i+1}, v^i [j] for j < i."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    zero = LaurentPoly.const(0)
    a = []
    for i in range(1, ell + 1):
        row = []
        for j in range(1, ell + 1):
            if j == i or j == i + 1:
                row.append(qint(i).shift(j))
            elif j < i:
                row.append(qint(j).shift(i))
            else:
                row.append(zero)
        a.append(row)
    labels = tuple(range(1, ell + 1))
    return LabeledMatrix(labels, labels, a, {"built_by": "Q_matrix", "ell": ell})


# -- graded Cartan blocks ---------------------------------------------------


def _to_laurent(M: LabeledMatrix) -> LabeledMatrix:
    def conv(x):
        return x if isinstance(x, LaurentPoly) else LaurentPoly.const(x)

    return M.map_entries(conv)


def colored_conjugate(A: LabeledMatrix, d: int) -> LabeledMatrix:
    """M_colored^-1 . row-convention S_d(A) . M_colored, checked integral.

    sym_power uses the column convention pinned by its layout example; the
    substitution acting on monomials is its transpose at the transposed
    input, so the conjugated matrix integral for every integral A is
    transpose(S_d(transpose(A))) sandwiched this way.
    """
    ell = len(A.rows)
    S = S_d(A.transpose(), d).transpose()
    Mc = M_colored(ell, d)
    Mci = M_colored_inverse(ell, d)
    if S.rows != Mc.rows:
        raise AssertionError("index order mismatch between S_d and M_colored")
    X = matmul(matmul(_to_laurent(Mci), S), _to_laurent(Mc))
    for i, row in enumerate(X.a):
        for j, f in enumerate(row):
            if not f.is_integral():
                raise IntegralityViolation(
                    "non-integral colored conjugate entry at (%r, %r)" % (X.rows[i], X.cols[j])
                )
    return X


@lru_cache(maxsize=None)
def graded_cartan_lhs(ell: int, d: int) -> LabeledMatrix:
    """The graded Cartan block of weight d in quantum characteristic ell:
    conjugate of the symmetric-power sum of the (symmetric) quantum Cartan
    matrix by the colored count table.  Entries are checked integral."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    X = colored_conjugate(quantized_cartan_A(ell - 1), d)
    X.meta.update({"built_by": "graded_cartan_lhs", "ell": ell, "d": d})
    return X


def graded_cartan_rhs(ell: int, d: int) -> LabeledMatrix:
    """Block-diagonal reference form: for each s <= d the conjugated
    diagonal of weight s repeated |multipartitions(ell-2, d-s)| times."""
    if ell < 2:
        raise ValueError("ell must be >= 2")
    blocks = []
    for s in range(d + 1):
        copies = len(multipartitions(ell - 2, d - s))
        if not copies:
            continue
        base = conjugated_diag(s, ell)
        for c in range(copies):
            lab = tuple((s, c, lam) for lam in base.rows)
            blocks.append(LabeledMatrix(lab, lab, base.a, base.meta))
    out = block_diag(blocks, {"built_by": "graded_cartan_rhs", "ell": ell, "d": d})
    return out


def assembled_cartan(ell: int, n: int) -> LabeledMatrix:
    """Direct sum of graded Cartan blocks over all (core, weight) labels."""
    from .partitions import blocks as block_labels

    parts = []
    for bl in block_labels(ell, n):
        base = graded_cartan_lhs(ell, bl.weight)
        lab = tuple((bl, x) for x in base.rows)
        parts.append(LabeledMatrix(lab, lab, base.a, base.meta))
    return block_diag(parts, {"built_by": "assembled_cartan", "ell": ell, "n": n})


def s_d_det(ell: int, d: int) -> LaurentPoly:
    """det of S_d of the quantum Cartan matrix, via per-block determinants
    (conjugation does not change the determinant)."""
    A = quantized_cartan_A(ell - 1)
    out = ONE
    for lam in parts_all(d):
        ts = [t for t, _ in lam.mult_items()]
        if not ts:
            continue
        mats = [sym_power(_inflate_matrix(A, t), lam.m(t)) for t in ts]
        dets = [det_bareiss(m) for m in mats]
        dims = [len(m.rows) for m in mats]
        total = reduce(lambda x, y: x * y, dims, 1)
        for i, dv in enumerate(dets):
            out = out * dv ** (total // dims[i])
    return out
