"""Dense exact matrices with explicit ordered label sets.

Entries are either gmpy2 rationals or LaurentPoly; the helpers here stay
agnostic and only assume ring operations (+, *, exact division for the
fraction-free determinant).  Every public constructor records a
provenance tag in `meta` so a matrix knows which definition produced it.
"""

from __future__ import annotations

from .qlaurent import LaurentPoly, QQ


class LabeledMatrix:
    """A rectangular matrix plus row/column label tuples and metadata."""

    __slots__ = ("rows", "cols", "a", "meta")

    def __init__(self, rows, cols, a, meta=None):
        self.rows = tuple(rows)
        self.cols = tuple(cols)
        self.a = [list(r) for r in a]
        if len(self.a) != len(self.rows) or any(len(r) != len(self.cols) for r in self.a):
            raise ValueError("entry shape does not match labels")
        self.meta = dict(meta or {})

    @property
    def shape(self):
        return (len(self.rows), len(self.cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.a[i][j]

    def entry(self, row_label, col_label):
        return self.a[self.rows.index(row_label)][self.cols.index(col_label)]

    def map_entries(self, fn, meta=None) -> "LabeledMatrix":
        return LabeledMatrix(
            self.rows, self.cols, [[fn(x) for x in r] for r in self.a], meta or self.meta
        )

    def transpose(self) -> "LabeledMatrix":
        m, n = self.shape
        return LabeledMatrix(
            self.cols, self.rows, [[self.a[i][j] for i in range(m)] for j in range(n)], self.meta
        )

    def copy_rows(self):
        return [list(r) for r in self.a]

    def __repr__(self):
        return "LabeledMatrix(%dx%d, meta=%r)" % (*self.shape, self.meta)


def matmul(A: LabeledMatrix, B: LabeledMatrix, meta=None) -> LabeledMatrix:
    """Exact product; the inner label sets must agree exactly."""
    if A.cols != B.rows:
        raise ValueError("label mismatch in matrix product")
    m, k = A.shape
    _, n = B.shape
    out = []
    for i in range(m):
        Ai = A.a[i]
        row = []
        for j in range(n):
            acc = None
            for t in range(k):
                x = Ai[t]
                if _is_zero(x):
                    continue
                y = B.a[t][j]
                if _is_zero(y):
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else _zero_like(Ai[0] if k else QQ(0)))
        out.append(row)
    return LabeledMatrix(A.rows, B.cols, out, meta or {})


def _is_zero(x) -> bool:
    if isinstance(x, LaurentPoly):
        return x.is_zero()
    return not x


def _zero_like(x):
    return LaurentPoly.const(0) if isinstance(x, LaurentPoly) else QQ(0)


def identity(labels, one=None) -> LabeledMatrix:
    one = one if one is not None else QQ(1)
    zero = _zero_like(one)
    n = len(labels)
    return LabeledMatrix(
        labels, labels, [[one if i == j else zero for j in range(n)] for i in range(n)]
    )


def diagonal(labels, values, meta=None) -> LabeledMatrix:
    values = list(values)
    zero = _zero_like(values[0]) if values else QQ(0)
    n = len(labels)
    a = [[values[i] if i == j else zero for j in range(n)] for i in range(n)]
    return LabeledMatrix(labels, labels, a, meta or {})


def inverse_rational(A: LabeledMatrix) -> LabeledMatrix:
    """Exact inverse of a square rational matrix by Gaussian elimination."""
    n = len(A.rows)
    if len(A.cols) != n:
        raise ValueError("matrix is not square")
    M = [[QQ(x) for x in row] + [QQ(1) if i == j else QQ(0) for j in range(n)]
         for i, row in enumerate(A.a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                Mr, Mc = M[r], M[col]
                M[r] = [Mr[k] - f * Mc[k] for k in range(2 * n)]
    inv_rows = [row[n:] for row in M]
    return LabeledMatrix(A.cols, A.rows, inv_rows, {"inverse_of": A.meta.get("built_by")})


def kron(A: LabeledMatrix, B: LabeledMatrix) -> LabeledMatrix:
    """Kronecker product; first factor varies slowest in the label order."""
    rows = tuple((ra, rb) for ra in A.rows for rb in B.rows)
    cols = tuple((ca, cb) for ca in A.cols for cb in B.cols)
    a = []
    for i in range(len(A.rows)):
        for k in range(len(B.rows)):
            row = []
            for j in range(len(A.cols)):
                x = A.a[i][j]
                if _is_zero(x):
                    row.extend([_zero_like(x)] * len(B.cols))
                else:
                    row.extend([x * B.a[k][l] for l in range(len(B.cols))])
            a.append(row)
    return LabeledMatrix(rows, cols, a)


def block_diag(blocks, meta=None) -> LabeledMatrix:
    """Direct sum; labels are concatenated in block order."""
    rows = []
    cols = []
    for b in blocks:
        rows.extend(b.rows)
        cols.extend(b.cols)
    zero = _zero_like(blocks[0].a[0][0]) if blocks and blocks[0].a and blocks[0].a[0] else QQ(0)
    n = len(cols)
    a = []
    off = 0
    for b in blocks:
        bm, bn = b.shape
        for i in range(bm):
            row = [zero] * n
            row[off : off + bn] = b.a[i]
            a.append(row)
        off += bn
    return LabeledMatrix(rows, cols, a, meta or {})


def permuted(A: LabeledMatrix, new_rows, new_cols) -> LabeledMatrix:
    """Reindex rows and columns by label; the label sets must coincide."""
    ri = {lab: i for i, lab in enumerate(A.rows)}
    ci = {lab: i for i, lab in enumerate(A.cols)}
    if set(new_rows) != set(ri) or set(new_cols) != set(ci):
        raise ValueError("permutation labels do not match")
    a = [[A.a[ri[r]][ci[c]] for c in new_cols] for r in new_rows]
    return LabeledMatrix(new_rows, new_cols, a, A.meta)


def det_bareiss(A: LabeledMatrix):
    """Fraction-free determinant; exact over rationals and Laurent entries."""
    n = len(A.rows)
    if len(A.cols) != n:
        raise ValueError("matrix is not square")
    if n == 0:
        return QQ(1)
    M = A.copy_rows()
    laurent = isinstance(M[0][0], LaurentPoly)
    one = LaurentPoly.const(1) if laurent else QQ(1)
    sign = 1
    prev = one
    for k in range(n - 1):
        if _is_zero(M[k][k]):
            piv = next((r for r in range(k + 1, n) if not _is_zero(M[r][k])), None)
            if piv is None:
                return _zero_like(one)
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = num.exact_div(prev) if laurent else num / prev
            M[i][k] = _zero_like(one)
        prev = M[k][k]
    d = M[n - 1][n - 1]
    return -d if sign < 0 else d
