"""Hochschild and cyclic chains of weight-graded truncated algebras.

An algebra is given by a finite basis of hashable keys and a product
returning ``{key: coefficient}``.  Every key has an additive ``weight`` and an
``order`` (the filtration degree).  Chain spaces are finite because they are
cut out per weight by a prefix-closed ``chain_ok`` predicate (a subcomplex
condition such as a bound on the total pole order) and by an order window
``[floor, ceiling]`` on the total order: terms of total order below the floor
are discarded, which is the quotient by a two-sided ideal.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable

from gmpy2 import mpq

from .complexes import ChainComplex, MixedComplex, homology_dims
from .errors import BudgetError, EngineDefect, InputError
from .qlinalg import QI, Solver, SparseMat, NOT_IN_IMAGE, axpy
from .spectral import FilteredComplex

__all__ = [
    "UNIT", "GradedAlgebra", "HochschildChain", "apply_operator", "hochschild_complex",
    "chain_basis", "mixed_complex", "hh_stabilized", "hkr_chi", "h_unital_check",
    "ground_field", "polynomial_algebra", "laurent_algebra", "circle_ring",
    "nilpotent_algebra", "algebra_from_table", "random_unital_algebra", "OPERATORS",
]

UNIT = "1"  # formal adjoined unit
OPERATORS = ("b", "b'", "s", "t", "B0", "B")


class GradedAlgebra:
    """Finite window of a weight-graded algebra given by structure constants.

    ``mul(a, b)`` returns a dict of basis keys.  ``unit`` is the key of the
    unit for unital algebras; otherwise ``formal_unit`` adjoins :data:`UNIT`
    for the operators ``s`` and ``B`` only.  ``to_form`` maps a key to a
    0-form (:class:`cornerhom.poisson.LaurentForm`) for commutative algebras.
    """

    def __init__(self, basis, mul: Callable, *, weight: Callable, order: Callable | None = None,
                 unit: Hashable | None = None, formal_unit: bool = False, commutative: bool = False,
                 chain_ok: Callable | None = None, floor: int | None = None, ceiling: int | None = None,
                 to_form: Callable | None = None, name: str = ""):
        self.basis = list(basis)
        if not self.basis:
            raise InputError("empty algebra window")
        self.index = {k: i for i, k in enumerate(self.basis)}
        self._mul = mul
        self._memo: dict = {}
        self.weight = weight
        self.order = order or (lambda k: 0)
        self.unit = unit
        self.formal_unit = formal_unit
        self.commutative = commutative
        self.chain_ok = chain_ok
        self.floor = floor
        self.ceiling = ceiling
        self.to_form = to_form
        self.name = name

    @property
    def unital(self):
        return self.unit is not None

    def unit_key(self):
        if self.unit is not None:
            return self.unit
        if self.formal_unit:
            return UNIT
        raise InputError(f"algebra {self.name!r} is not unital and has no formal unit")

    def w(self, k):
        return 0 if k == UNIT else self.weight(k)

    def o(self, k):
        return 0 if k == UNIT else self.order(k)

    def product(self, a, b) -> dict:
        if a == UNIT:
            return {b: mpq(1)}
        if b == UNIT:
            return {a: mpq(1)}
        key = (a, b)
        r = self._memo.get(key)
        if r is None:
            r = {k: v for k, v in self._mul(a, b).items() if v}
            self._memo[key] = r
        return r

    def with_window(self, **kw) -> "GradedAlgebra":
        """Copy with some of ``chain_ok``, ``floor``, ``ceiling`` replaced."""
        args = dict(weight=self.weight, order=self.order, unit=self.unit, formal_unit=self.formal_unit,
                    commutative=self.commutative, chain_ok=self.chain_ok, floor=self.floor,
                    ceiling=self.ceiling, to_form=self.to_form, name=self.name)
        args.update(kw)
        out = GradedAlgebra(self.basis, self._mul, **args)
        out._memo = self._memo
        return out

    def __repr__(self):
        return f"<GradedAlgebra {self.name} dim={len(self.basis)}>"


@dataclass
class HochschildChain:
    degree: int
    terms: dict = field(default_factory=dict)

    @classmethod
    def of(cls, *keys, coeff=1):
        return cls(len(keys) - 1, {tuple(keys): mpq(coeff) if not isinstance(coeff, QI) else coeff})

    def weights(self, A: GradedAlgebra) -> set:
        return {sum(A.w(k) for k in t) for t in self.terms}

    def __add__(self, other):
        if self.terms and other.terms and self.degree != other.degree:
            raise InputError("adding chains of different degree")
        out = dict(self.terms)
        axpy(out, 1, other.terms)
        return HochschildChain(self.degree if self.terms else other.degree, out)

    def scale(self, a):
        return HochschildChain(self.degree, {t: a * v for t, v in self.terms.items()} if a else {})

    def is_zero(self):
        return not self.terms


def _add(out, t, c):
    s = out.get(t)
    s = c if s is None else s + c
    if s:
        out[t] = s
    else:
        out.pop(t, None)


def _b_terms(A: GradedAlgebra, t: tuple, cyclic: bool):
    """Yield ``(tuple, coefficient)`` for ``b'`` (or ``b`` if ``cyclic``)."""
    n = len(t) - 1
    for i in range(n):
        sign = -1 if i % 2 else 1
        for k, v in A.product(t[i], t[i + 1]).items():
            yield t[:i] + (k,) + t[i + 2:], sign * v
    if cyclic and n >= 1:
        sign = -1 if n % 2 else 1
        for k, v in A.product(t[n], t[0]).items():
            yield (k,) + t[1:n], sign * v


def _t(t: tuple):
    n = len(t) - 1
    return (t[n],) + t[:n], (-1 if n % 2 else 1)


def apply_operator(op: str, A: GradedAlgebra, c: HochschildChain) -> HochschildChain:
    """Apply ``b``, ``b'``, ``s``, ``t``, ``B0`` or ``B`` to a chain."""
    out: dict = {}
    if op in ("b", "b'"):
        if c.degree == 0:
            return HochschildChain(-1, {})
        for t, v in c.terms.items():
            for u, x in _b_terms(A, t, op == "b"):
                _add(out, u, v * x)
        return HochschildChain(c.degree - 1, out)
    if op == "t":
        for t, v in c.terms.items():
            u, s = _t(t)
            _add(out, u, s * v)
        return HochschildChain(c.degree, out)
    if op == "s":
        one = A.unit_key()
        for t, v in c.terms.items():
            _add(out, (one,) + t, v)
        return HochschildChain(c.degree + 1, out)
    if op == "B0":
        one = A.unit_key()
        for t, v in c.terms.items():
            u, s = t, 1
            for _ in range(len(t)):
                _add(out, (one,) + u, s * v)
                u, s2 = _t(u)
                s *= s2
        return HochschildChain(c.degree + 1, out)
    if op == "B":
        b0 = apply_operator("B0", A, c)
        return b0 + apply_operator("t", A, b0).scale(-1)
    raise InputError(f"unknown operator {op!r}; expected one of {OPERATORS}")


# -- chain spaces -------------------------------------------------------------

def chain_basis(A: GradedAlgebra, w, q: int, normalized: bool = False) -> list:
    """Basis tensors of length ``q+1`` and total weight ``w`` inside the window."""
    keys = list(A.basis)
    ws = {k: A.w(k) for k in keys}
    os_ = {k: A.o(k) for k in keys}
    wmin, wmax = min(ws.values()), max(ws.values())
    omax = max(os_.values())
    omin = min(os_.values())
    L = q + 1
    ok = A.chain_ok
    floor, ceiling = A.floor, A.ceiling
    later = [k for k in keys if not (normalized and k == A.unit)]
    out = []

    def rec(prefix, wsum, osum):
        left = L - len(prefix)
        if left == 0:
            if wsum == w and (floor is None or osum >= floor) and (ceiling is None or osum <= ceiling):
                out.append(tuple(prefix))
            return
        for k in (keys if not prefix else later):
            nw, no = wsum + ws[k], osum + os_[k]
            rem = left - 1
            if not (nw + rem * wmin <= w <= nw + rem * wmax):
                continue
            if floor is not None and no + rem * omax < floor:
                continue
            if ceiling is not None and no + rem * omin > ceiling:
                continue
            prefix.append(k)
            if ok is None or ok(tuple(prefix)):
                rec(prefix, nw, no)
            prefix.pop()

    rec([], 0, 0)
    return out


def _matrix(A, src: list, tgt_index: dict, terms_fn, normalized: bool, what: str):
    floor = A.floor
    e = {}
    unit = A.unit
    for j, t in enumerate(src):
        col: dict = {}
        for u, x in terms_fn(t):
            if normalized and unit is not None and unit in u[1:]:
                continue
            if floor is not None and sum(A.o(k) for k in u) < floor:
                continue
            _add(col, u, x)
        for u, x in col.items():
            i = tgt_index.get(u)
            if i is None:
                raise EngineDefect(f"{what} leaves the chain window: {t} -> {u}")
            e[(i, j)] = x
    return SparseMat(len(tgt_index), len(src), e)


def hochschild_complex(A: GradedAlgebra, w, q_max: int, normalized: bool = False,
                       prime: bool = False) -> FilteredComplex:
    """Weight-``w`` Hochschild complex (``b'`` if ``prime``) in degrees ``0..q_max``.

    Filtration level of a tensor is the total order of its factors.  The
    normalized variant drops tensors with the unit in positions ``1..q``.
    """
    bases = {q: chain_basis(A, w, q, normalized) for q in range(q_max + 1)}
    index = {q: {t: i for i, t in enumerate(b)} for q, b in bases.items()}
    diff = {}
    for q in range(1, q_max + 1):
        diff[q] = _matrix(A, bases[q], index[q - 1], lambda t: _b_terms(A, t, not prime), normalized,
                          "b'" if prime else "b")
    c = ChainComplex({q: len(bases[q]) for q in bases}, diff, name=f"HH({A.name})_{w}")
    levels = {q: [sum(A.o(k) for k in t) for t in bases[q]] for q in bases}
    f = FilteredComplex(c, levels, flags={"empty": all(not b for b in bases.values())})
    f.bases = bases
    f.index = index
    return f


def mixed_complex(A: GradedAlgebra, w, q_max: int) -> MixedComplex:
    """Unnormalized ``(b, B)`` mixed complex of weight ``w`` in degrees ``0..q_max``."""
    if not A.unital:
        raise InputError("mixed complex needs a unital algebra")
    bases = {q: chain_basis(A, w, q) for q in range(q_max + 1)}
    index = {q: {t: i for i, t in enumerate(b)} for q, b in bases.items()}
    b, B = {}, {}
    for q in range(1, q_max + 1):
        b[q] = _matrix(A, bases[q], index[q - 1], lambda t: _b_terms(A, t, True), False, "b")
    for q in range(q_max):
        def bterms(t):
            return apply_operator("B", A, HochschildChain(q, {t: mpq(1)})).terms.items()
        B[q] = _matrix(A, bases[q], index[q + 1], bterms, False, "B")
    return MixedComplex({q: len(bases[q]) for q in bases}, b, B)


def hh_stabilized(family: Callable, w, q: int, windows, normalized: bool = False) -> dict:
    """Smallest window after which ``dim HH_q`` stops changing.

    ``family(window)`` returns a :class:`GradedAlgebra`; windows are tried in
    order and the answer is certified when two consecutive windows agree.
    """
    history = []
    prev = None
    for win in windows:
        A = family(win)
        d = homology_dims(hochschild_complex(A, w, q + 1, normalized).c)[q]
        history.append((win, d))
        if prev is not None and prev[1] == d:
            return {"dim": d, "window_used": prev[0], "history": history}
        prev = (win, d)
    raise BudgetError(f"HH_{q} in weight {w} did not stabilize: {history}")


def hkr_chi(A: GradedAlgebra, c: HochschildChain):
    """``a_0 (x) ... (x) a_l -> (1/l!) a_0 da_1 ^ ... ^ da_l``."""
    if not A.commutative or A.to_form is None:
        raise InputError("HKR map needs a commutative algebra with a coordinate presentation")
    from .poisson import LaurentForm
    out = None
    l = c.degree
    for t, v in c.terms.items():
        f = A.to_form(t[0])
        for k in t[1:]:
            f = f.wedge(A.to_form(k).d())
        f = f.scale(v * mpq(1, math.factorial(l)))
        out = f if out is None else out + f
    if out is None:
        return LaurentForm.zero()
    return out


def h_unital_check(A: GradedAlgebra, q_max: int, weights) -> dict:
    """``b'``-homology per weight in degrees ``0..q_max``."""
    per = {}
    failing = None
    for w in weights:
        f = hochschild_complex(A, w, q_max + 1, prime=True)
        h = homology_dims(f.c)
        per[w] = {q: h[q] for q in range(q_max + 1)}
        for q in range(q_max + 1):
            if h[q] and failing is None:
                failing = (w, q)
    return {"acyclic": failing is None, "failing": failing, "dims": per}


# -- example algebras ---------------------------------------------------------

def ground_field() -> GradedAlgebra:
    return GradedAlgebra([0], lambda a, b: {0: mpq(1)}, weight=lambda k: 0, unit=0,
                         commutative=True, name="Q")


def _xform(a):
    from .poisson import LaurentForm, Patch
    return LaurentForm.monomial(Patch(1, 1, (1,)), x=(a,))


def polynomial_algebra(max_degree: int) -> GradedAlgebra:
    """``Q[x]`` in degrees ``0..max_degree`` (weight = degree)."""
    def mul(a, b):
        if a + b > max_degree:
            raise EngineDefect("product outside the polynomial window")
        return {a + b: mpq(1)}
    return GradedAlgebra(range(max_degree + 1), mul, weight=lambda k: k, unit=0, commutative=True,
                         to_form=_xform, name=f"Q[x]<={max_degree}")


def laurent_algebra(pole_bound: int, weight: int = 0) -> GradedAlgebra:
    """``Q[x, 1/x]`` window for chains of the given weight.

    Chains are restricted to total pole order ``<= pole_bound + max(0, -weight)``,
    i.e. at most ``pole_bound`` poles beyond those the weight forces.  The
    total pole order never increases under ``b``, so this is a subcomplex.
    """
    budget = pole_bound + max(0, -weight)

    def ok(t):
        return sum(-a for a in t if a < 0) <= budget
    return GradedAlgebra(range(-budget, max(weight, 0) + budget + 1), lambda a, b: {a + b: mpq(1)},
                         weight=lambda k: k, unit=0, commutative=True, chain_ok=ok,
                         to_form=_xform, name=f"Q[x,1/x] poles<={pole_bound}")


class _CircleRing:
    """``Q(i)[u, v]/(u^2 + v^2 - 1)`` in the normal form ``p(u) + v q(u)``."""

    def __init__(self):
        self._z = {0: {(0, 0): QI(1)}}
        self._solvers = {}

    @staticmethod
    def mul(f, g):
        out = {}
        for (a, e), x in f.items():
            for (b, e2), y in g.items():
                c = x * y
                if e + e2 == 2:          # v^2 = 1 - u^2
                    _add(out, (a + b, 0), c)
                    _add(out, (a + b + 2, 0), -c)
                else:
                    _add(out, (a + b, e + e2), c)
        return out

    def z(self, m):
        """Normal form of ``(u + i v)^m`` (``(u - i v)^{-m}`` for ``m < 0``)."""
        if m not in self._z:
            step = {(1, 0): QI(1), (0, 1): QI(0, 1 if m > 0 else -1)}
            prev = self.z(m - 1 if m > 0 else m + 1)
            self._z[m] = self.mul(prev, step)
        return self._z[m]

    def coords(self, f, K):
        if K not in self._solvers:
            mons = [(a, 0) for a in range(K + 1)] + [(a, 1) for a in range(K)]
            row = {mn: i for i, mn in enumerate(mons)}
            cols = [{row[mn]: x for mn, x in self.z(m).items()} for m in range(-K, K + 1)]
            self._solvers[K] = (row, Solver(SparseMat.from_columns(len(mons), cols)))
        row, solver = self._solvers[K]
        x = solver({row[mn]: v for mn, v in f.items()})
        if x is NOT_IN_IMAGE:
            raise EngineDefect("product not expressible in the z-basis")
        return {j - K: v for j, v in x.items()}


def circle_ring(bound: int) -> GradedAlgebra:
    """Coordinate ring of the circle over ``Q(i)``, basis ``z^m = (u + i v)^m``.

    Structure constants are computed from the presentation; chains satisfy
    ``sum |m_i| <= bound``.
    """
    ring = _CircleRing()

    def mul(a, b):
        prod = ring.mul(ring.z(a), ring.z(b))
        return ring.coords(prod, abs(a) + abs(b))

    return GradedAlgebra(range(-bound, bound + 1), mul, weight=lambda k: k, unit=0,
                         commutative=True, chain_ok=lambda t: sum(abs(m) for m in t) <= bound,
                         name=f"circle ring |m|<={bound}")


def nilpotent_algebra() -> GradedAlgebra:
    """One generator ``x`` with ``x^2 = 0`` and no unit."""
    return GradedAlgebra(["x"], lambda a, b: {}, weight=lambda k: 0, formal_unit=True,
                         commutative=True, name="x^2=0")


def algebra_from_table(n: int, table: dict, unit=None, commutative=False, name="") -> GradedAlgebra:
    """Algebra on keys ``0..n-1`` with ``table[(i, j)] = {k: c}`` (weight 0)."""
    return GradedAlgebra(range(n), lambda a, b: dict(table.get((a, b), {})), weight=lambda k: 0,
                         unit=unit, formal_unit=unit is None, commutative=commutative, name=name)


_SEEDS = {
    # name: (dim, product on the standard basis e_0 = 1, ...)
    "Q^3": (3, lambda i, j: {i: 1} if i == j else {}),
    "Q[x]/x^3": (3, lambda i, j: {i + j: 1} if i + j < 3 else {}),
    "upper 2x2": (3, lambda i, j: {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 2): {1: 1}, (2, 2): {2: 1}}.get((i, j), {})),
    "Q[C3]": (3, lambda i, j: {(i + j) % 3: 1}),
    "Q[x,y]/(x,y)^2": (3, lambda i, j: {max(i, j): 1} if min(i, j) == 0 else {}),
    "Q[x]/x^2 x Q": (3, lambda i, j: {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (2, 2): {2: 1}}.get((i, j), {})),
}


def random_unital_algebra(rng: random.Random, seed_name: str | None = None) -> GradedAlgebra:
    """A 3-dimensional unital algebra in a random basis.

    One of a few associative seeds is rewritten in a random basis that keeps
    the unit as ``e_0``.
    """
    name = seed_name or rng.choice(sorted(_SEEDS))
    n, prod = _SEEDS[name]
    if name in ("upper 2x2", "Q^3", "Q[x]/x^2 x Q"):
        # express in a basis whose first vector is the unit
        unit = {i: mpq(1) for i in range(n)} if name == "Q^3" else (
            {0: mpq(1), 2: mpq(1)} if name == "upper 2x2" else {0: mpq(1), 2: mpq(1)})
    else:
        unit = {0: mpq(1)}
    cols = [unit]
    while len(cols) < n:
        v = {i: mpq(rng.randint(-3, 3)) for i in range(n)}
        v = {i: x for i, x in v.items() if x}
        if v and _rank(cols + [v], n) == len(cols) + 1:
            cols.append(v)
    P = SparseMat.from_columns(n, cols)
    inv = Solver(P)

    def std_mul(x, y):
        out = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in prod(i, j).items():
                    _add(out, k, a * b * c)
        return out

    table = {}
    for a in range(n):
        for b in range(n):
            table[(a, b)] = inv(std_mul(cols[a], cols[b]))
    return algebra_from_table(n, table, unit=0, commutative=name != "upper 2x2", name=name)


def _rank(vs, n):
    from .qlinalg import rank
    return rank(SparseMat.from_columns(n, vs))
