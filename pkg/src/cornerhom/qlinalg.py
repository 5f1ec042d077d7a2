"""Exact sparse linear algebra over Q and Q(i).

Rationals are ``gmpy2.mpq``; the Gaussian rationals are :class:`QI`.
Sparse vectors are plain ``dict[int, scalar]`` with no stored zeros, and
matrices are :class:`SparseMat`.  All elimination is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from gmpy2 import mpq

from .errors import InputError

__all__ = [
    "Q", "QI", "I", "SparseMat", "NOT_IN_IMAGE", "decompose", "solve", "rank",
    "rref", "reduce_low", "span_rank", "vec_add", "vec_scale", "axpy",
    "dense", "sparse",
]


def Q(x, d=None):
    """Coerce to an exact rational (``mpq``)."""
    if isinstance(x, QI):
        raise TypeError("Gaussian rational has no rational coercion")
    return mpq(x) if d is None else mpq(x, d)


class QI:
    """Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QI):
            re, im = re.re, re.im + im
        self.re = mpq(re)
        self.im = mpq(im)

    @staticmethod
    def _c(x):
        if isinstance(x, QI):
            return x
        return QI(x, 0)

    def __add__(self, o):
        o = self._c(o)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._c(o)
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        if not isinstance(o, QI):
            o = mpq(o)
            return QI(self.re * o, self.im * o)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def conjugate(self):
        return QI(self.re, -self.im)

    def __truediv__(self, o):
        o = self._c(o)
        n = o.re * o.re + o.im * o.im
        if not n:
            raise ZeroDivisionError("QI division by zero")
        num = self * o.conjugate()
        return QI(num.re / n, num.im / n)

    def __rtruediv__(self, o):
        return self._c(o) / self

    def __pow__(self, k: int):
        out, base = QI(1), self
        if k < 0:
            base, k = QI(1) / base, -k
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        try:
            o = self._c(o)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}*i"
        return f"({self.re}+{self.im}*i)"


I = QI(0, 1)

NOT_IN_IMAGE = None  # sentinel returned by solve()


# -- sparse vectors ---------------------------------------------------------

def axpy(y: dict, a, x: Mapping) -> dict:
    """In place ``y += a*x``; drops cancelled entries."""
    if not a:
        return y
    for k, v in x.items():
        s = y.get(k)
        s = a * v if s is None else s + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)
    return y


def vec_add(x: Mapping, y: Mapping, a=1) -> dict:
    return axpy(dict(x), a, y)


def vec_scale(x: Mapping, a) -> dict:
    if not a:
        return {}
    return {k: a * v for k, v in x.items()}


def dense(v: Mapping, n: int) -> list:
    out = [mpq(0)] * n
    for k, x in v.items():
        out[k] = x
    return out


def sparse(v: Iterable) -> dict:
    return {i: (x if isinstance(x, QI) else mpq(x)) for i, x in enumerate(v) if x}


# -- matrices ---------------------------------------------------------------

@dataclass
class SparseMat:
    """``rows x cols`` matrix; ``entries`` maps ``(i, j)`` to a nonzero scalar."""

    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise InputError(f"entry ({i},{j}) outside {self.rows}x{self.cols}")
            if v:
                clean[(i, j)] = v if isinstance(v, QI) else mpq(v)
        self.entries = clean

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def from_dense(cls, a):
        a = [list(r) for r in a]
        rows = len(a)
        cols = len(a[0]) if rows else 0
        return cls(rows, cols, {(i, j): v for i, r in enumerate(a) for j, v in enumerate(r) if v})

    @classmethod
    def from_columns(cls, rows, columns):
        e = {}
        for j, c in enumerate(columns):
            for i, v in c.items():
                e[(i, j)] = v
        return cls(rows, len(columns), e)

    @classmethod
    def from_rows(cls, cols, rowvecs):
        e = {}
        for i, r in enumerate(rowvecs):
            for j, v in r.items():
                e[(i, j)] = v
        return cls(len(rowvecs), cols, e)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def to_dense(self):
        out = [[mpq(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row_dicts(self):
        out = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def col_dicts(self):
        out = [dict() for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            out[j][i] = v
        return out

    def transpose(self):
        return SparseMat(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    T = property(transpose)

    def is_zero(self):
        return not self.entries

    def matvec(self, v: Mapping) -> dict:
        out: dict = {}
        cols = self._cols_cache()
        for j, x in v.items():
            c = cols.get(j)
            if c:
                axpy(out, x, c)
        return out

    def _cols_cache(self):
        cache = self.__dict__.get("_cc")
        if cache is None:
            cache = {}
            for (i, j), v in self.entries.items():
                cache.setdefault(j, {})[i] = v
            self.__dict__["_cc"] = cache
        return cache

    def __matmul__(self, other: "SparseMat") -> "SparseMat":
        if self.cols != other.rows:
            raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = [self.matvec(c) for c in other.col_dicts()]
        return SparseMat.from_columns(self.rows, cols)

    def __add__(self, other):
        if self.shape != other.shape:
            raise InputError("shape mismatch in addition")
        e = dict(self.entries)
        for k, v in other.entries.items():
            s = e.get(k, 0) + v
            if s:
                e[k] = s
            else:
                e.pop(k, None)
        return SparseMat(self.rows, self.cols, e)

    def __neg__(self):
        return SparseMat(self.rows, self.cols, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        return SparseMat(self.rows, self.cols, {k: a * v for k, v in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, SparseMat):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def submatrix(self, rows: list, cols: list) -> "SparseMat":
        ri = {r: a for a, r in enumerate(rows)}
        ci = {c: b for b, c in enumerate(cols)}
        e = {}
        for (i, j), v in self.entries.items():
            a, b = ri.get(i), ci.get(j)
            if a is not None and b is not None:
                e[(a, b)] = v
        return SparseMat(len(rows), len(cols), e)

    @staticmethod
    def block(blocks: list, row_sizes: list, col_sizes: list) -> "SparseMat":
        """Assemble from a grid of optional blocks (``None`` means zero)."""
        e = {}
        r0 = 0
        for bi, rs in enumerate(row_sizes):
            c0 = 0
            for bj, cs in enumerate(col_sizes):
                b = blocks[bi][bj]
                if b is not None:
                    if b.shape != (rs, cs):
                        raise InputError(f"block ({bi},{bj}) has shape {b.shape}, want {(rs, cs)}")
                    for (i, j), v in b.entries.items():
                        e[(r0 + i, c0 + j)] = v
                c0 += cs
            r0 += rs
        return SparseMat(sum(row_sizes), sum(col_sizes), e)


# -- elimination ------------------------------------------------------------

def rref(rowvecs: Iterable[Mapping], pivots: dict | None = None) -> dict:
    """Reduced row echelon form of the given rows.

    Returns ``{pivot_col: row}``; every row has a 1 at its pivot and zeros in
    all other pivot columns.  Passing an existing ``pivots`` dict extends it.
    """
    piv = {} if pivots is None else pivots
    for r in rowvecs:
        r = dict(r)
        for c in [c for c in r if c in piv]:
            f = r.get(c)
            if f:
                axpy(r, -f, piv[c])
        if not r:
            continue
        c = min(r)
        inv = 1 / r[c]
        r = {k: v * inv for k, v in r.items()}
        for pr in piv.values():
            f = pr.get(c)
            if f:
                axpy(pr, -f, r)
        piv[c] = r
    return piv


def _reduce_against(v: Mapping, piv: dict) -> dict:
    v = dict(v)
    for c in [c for c in v if c in piv]:
        f = v.get(c)
        if f:
            axpy(v, -f, piv[c])
    return v


def decompose(m: SparseMat) -> dict:
    """Rank, kernel basis and column-space basis of ``m``."""
    piv = rref(m.row_dicts())
    kernel = []
    pivcols = sorted(piv)
    free = [j for j in range(m.cols) if j not in piv]
    for f in free:
        v = {f: mpq(1)}
        for c in pivcols:
            x = piv[c].get(f)
            if x:
                v[c] = -x
        kernel.append(v)
    cols = m._cols_cache()
    image = [dict(cols.get(c, {})) for c in pivcols]
    return {"rank": len(piv), "kernel_basis": kernel, "image_basis": image}


def rank(m: SparseMat) -> int:
    if m.rows < m.cols:
        return len(reduce_low_pivots(m.row_dicts()))
    return len(reduce_low_pivots(m.col_dicts()))


def span_rank(vectors: Iterable[Mapping]) -> int:
    return len(reduce_low_pivots(vectors))


def solve(m: SparseMat, v):
    """Return ``x`` with ``m x = v`` (sparse dict), or ``NOT_IN_IMAGE``."""
    if not isinstance(v, Mapping):
        v = list(v)
        if len(v) != m.rows:
            raise InputError(f"right-hand side has length {len(v)}, matrix has {m.rows} rows")
        v = sparse(v)
    elif any(not (0 <= k < m.rows) for k in v):
        raise InputError("right-hand side index out of range")
    aug = m.cols
    rows = m.row_dicts()
    for i, x in v.items():
        rows[i][aug] = x
    piv = rref(rows)
    if aug in piv:
        return NOT_IN_IMAGE
    x = {}
    for c, r in piv.items():
        a = r.get(aug)
        if a:
            x[c] = a
    return x


class Solver:
    """Repeated ``m x = v`` solves against one matrix."""

    def __init__(self, m: SparseMat):
        self.m = m
        # row-reduce columns of m^T, tracking combinations
        n = m.cols
        tagged = []
        for j, c in enumerate(m.col_dicts()):
            row = dict(c)
            row[("t", j)] = mpq(1)
            tagged.append(row)
        self._piv = {}
        self._n = n
        for row in tagged:
            self._insert(row)

    @staticmethod
    def _key(k):
        return (0, k) if not isinstance(k, tuple) else (1, k[1])

    def _insert(self, row):
        piv = self._piv
        for c in [c for c in row if not isinstance(c, tuple) and c in piv]:
            f = row.get(c)
            if f:
                axpy(row, -f, piv[c])
        lead = [c for c in row if not isinstance(c, tuple)]
        if not lead:
            return
        c = min(lead)
        inv = 1 / row[c]
        row = {k: v * inv for k, v in row.items()}
        for pr in piv.values():
            f = pr.get(c)
            if f:
                axpy(pr, -f, row)
        piv[c] = row

    def __call__(self, v: Mapping):
        rest = dict(v)
        x: dict = {}
        for c in [c for c in rest if c in self._piv]:
            f = rest.get(c)
            if f:
                pr = self._piv[c]
                for k, val in pr.items():
                    if isinstance(k, tuple):
                        s = x.get(k[1], 0) + f * val
                        if s:
                            x[k[1]] = s
                        else:
                            x.pop(k[1], None)
                    else:
                        s = rest.get(k, 0) - f * val
                        if s:
                            rest[k] = s
                        else:
                            rest.pop(k, None)
        if rest:
            return NOT_IN_IMAGE
        return x


def reduce_low_pivots(columns: Iterable[Mapping]) -> dict:
    """Column reduction by lowest nonzero entry.

    Returns ``{low_row: column_index}`` for the pivots of the reduced matrix.
    By the pairing lemma the rank of any lower-left submatrix (rows ``>= a``,
    columns ``< b``) equals the number of pivots inside it.
    """
    owner: dict = {}
    pivots: dict = {}
    for j, col in enumerate(columns):
        col = dict(col)
        while col:
            low = max(col)
            other = owner.get(low)
            if other is None:
                break
            axpy(col, -col[low], other)
        if col:
            low = max(col)
            inv = 1 / col[low]
            owner[low] = {k: v * inv for k, v in col.items()}
            pivots[low] = j
    return pivots


def reduce_low(columns: Iterable[Mapping]) -> list:
    """Per-column low index after reduction (``None`` for zeroed columns)."""
    cols = list(columns)
    piv = reduce_low_pivots(cols)
    out = [None] * len(cols)
    for low, j in piv.items():
        out[j] = low
    return out
