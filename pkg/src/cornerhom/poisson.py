"""Monomial Laurent forms on a corner chart and the Poisson calculus of the c-calculus.

A chart of the cotangent space over ``[0,1)^k x R^{n-k}`` has base
coordinates ``x_1..x_k`` (boundary defining functions, Laurent exponents
allowed) and ``y_{k+1}..y_n``, and fibre coordinates ``xi_1..xi_n``.  Variable
``j < n`` is the base coordinate, variable ``n + j`` its fibre partner.

The Poisson tensor is ``G = sum_j a_j d/dxi_j ^ d/dv_j`` with ``a_j = x_j^{c_j}``
on boundary directions and ``1`` otherwise.  Contraction by a bivector uses
``i_{X^Y} = i_Y o i_X``, so ``{f, g} = i_G(df ^ dg)`` gives ``{xi, y} = 1`` and
``{x, xi} = -x^c``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from gmpy2 import mpq

from .complexes import ChainComplex, homology_dims
from .errors import BudgetError, EngineDefect, InputError
from .qlinalg import QI, SparseMat

__all__ = [
    "Patch", "LaurentForm", "exterior_d", "delta", "hodge_star", "poisson_bracket",
    "verify_identities", "homogeneous_poisson_homology", "duality_check",
    "random_monomial_form", "sector_basis",
]


@dataclass(frozen=True)
class Patch:
    n: int
    k: int = 0
    c: tuple = ()

    def __post_init__(self):
        if not (0 <= self.k <= self.n):
            raise InputError(f"need 0 <= k <= n, got n={self.n}, k={self.k}")
        c = tuple(self.c) if self.c else (1,) * self.k
        if len(c) != self.k or any(int(x) < 1 for x in c):
            raise InputError(f"need k={self.k} exponents c_j >= 1, got {self.c}")
        object.__setattr__(self, "c", tuple(int(x) for x in c))

    @property
    def nvars(self):
        return 2 * self.n

    def is_x(self, v):
        return v < self.k

    def is_y(self, v):
        return self.k <= v < self.n

    def is_xi(self, v):
        return v >= self.n

    def name(self, v):
        if v < self.k:
            return f"x{v + 1}"
        if v < self.n:
            return f"y{v + 1}"
        return f"xi{v - self.n + 1}"


def _sorted_insert(v, W):
    """``dv ^ dv_W`` as ``(sign, W')`` or ``(0, None)`` if ``v`` in ``W``."""
    if v in W:
        return 0, None
    pos = sum(1 for u in W if u < v)
    return (-1 if pos % 2 else 1), tuple(sorted(W + (v,)))


def _merge(A, B):
    if set(A) & set(B):
        return 0, None
    inv = sum(1 for a in A for b in B if a > b)
    return (-1 if inv % 2 else 1), tuple(sorted(A + B))


def _add(out, key, c):
    s = out.get(key)
    s = c if s is None else s + c
    if s:
        out[key] = s
    else:
        out.pop(key, None)


class LaurentForm:
    """Finite sum of monomial forms.

    A term key is ``(exps, fourier, wedge)``: integer exponents of all ``2n``
    variables, Fourier exponents ``m`` of factors ``e^{i m y}`` (zero on
    non-``y`` slots) and the sorted tuple of variables in the wedge factor.
    """

    __slots__ = ("patch", "terms")

    def __init__(self, patch: Patch | None, terms: dict | None = None):
        self.patch = patch
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    # construction
    @classmethod
    def zero(cls, patch=None):
        return cls(patch, {})

    @classmethod
    def monomial(cls, patch: Patch, exps=None, fourier=None, wedge=(), coeff=1, *, x=(), y=(), xi=()):
        N = patch.nvars
        if exps is None:
            exps = [0] * N
            for j, a in enumerate(x):
                exps[j] = a
            for j, a in enumerate(y):
                exps[patch.k + j] = a
            for j, a in enumerate(xi):
                exps[patch.n + j] = a
        exps = tuple(int(a) for a in exps)
        fourier = tuple(fourier) if fourier is not None else (0,) * N
        if len(exps) != N or len(fourier) != N:
            raise InputError("exponent vectors must have length 2n")
        for v, m in enumerate(fourier):
            if m and not patch.is_y(v):
                raise InputError("Fourier factors only on y variables")
        for v, e in enumerate(exps):
            if e < 0 and patch.is_y(v):
                raise InputError("y exponents must be >= 0")
        s, W = _merge((), tuple(wedge)) if len(set(wedge)) == len(wedge) else (0, None)
        if not s:
            return cls(patch, {})
        # reorder the wedge to sorted order with its sign
        sign = 1
        w = list(wedge)
        for i in range(len(w)):
            for j in range(len(w) - 1 - i):
                if w[j] > w[j + 1]:
                    w[j], w[j + 1] = w[j + 1], w[j]
                    sign = -sign
        c = coeff if isinstance(coeff, QI) else mpq(coeff)
        return cls(patch, {(exps, fourier, tuple(w)): sign * c})

    @classmethod
    def coordinate(cls, patch: Patch, v: int):
        e = [0] * patch.nvars
        e[v] = 1
        return cls.monomial(patch, e)

    # algebra
    def _p(self, other):
        if self.patch is None:
            return other.patch
        if other.patch is not None and other.patch != self.patch:
            raise InputError("forms on different patches")
        return self.patch

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            _add(out, k, v)
        return LaurentForm(self._p(other), out)

    def __neg__(self):
        return LaurentForm(self.patch, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        if not a:
            return LaurentForm(self.patch, {})
        return LaurentForm(self.patch, {k: a * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, LaurentForm):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def wedge(self, other: "LaurentForm") -> "LaurentForm":
        out: dict = {}
        for (e1, f1, W1), a in self.terms.items():
            for (e2, f2, W2), b in other.terms.items():
                s, W = _merge(W1, W2)
                if not s:
                    continue
                key = (tuple(p + q for p, q in zip(e1, e2)), tuple(p + q for p, q in zip(f1, f2)), W)
                _add(out, key, s * a * b)
        return LaurentForm(self._p(other), out)

    __mul__ = wedge

    def partial(self, v: int) -> "LaurentForm":
        """Coefficientwise ``d/dv`` (the wedge factor is untouched)."""
        out: dict = {}
        for (e, f, W), c in self.terms.items():
            if e[v]:
                e2 = list(e)
                e2[v] -= 1
                _add(out, (tuple(e2), f, W), c * e[v])
            if f[v]:
                _add(out, (e, f, W), c * QI(0, f[v]))
        return LaurentForm(self.patch, out)

    def d(self) -> "LaurentForm":
        return exterior_d(self)

    def interior(self, v: int) -> "LaurentForm":
        """Contraction with the coordinate field ``d/dv``."""
        out: dict = {}
        for (e, f, W), c in self.terms.items():
            if v in W:
                pos = W.index(v)
                _add(out, (e, f, W[:pos] + W[pos + 1:]), -c if pos % 2 else c)
        return LaurentForm(self.patch, out)

    def times_x(self, j: int, power: int) -> "LaurentForm":
        out = {}
        for (e, f, W), c in self.terms.items():
            e2 = list(e)
            e2[j] += power
            out[(tuple(e2), f, W)] = c
        return LaurentForm(self.patch, out)

    # gradings
    def degrees(self) -> set:
        return {len(W) for (_, _, W) in self.terms}

    def homogeneities(self) -> set:
        n = self.patch.n if self.patch else 0
        return {sum(e[n:]) + sum(1 for v in W if v >= n) for (e, _, W) in self.terms}

    def __repr__(self):
        if not self.terms:
            return "0"
        p = self.patch
        parts = []
        for (e, f, W), c in sorted(self.terms.items(), key=lambda kv: repr(kv[0])):
            mon = "*".join(f"{p.name(v)}^{a}" if a != 1 else p.name(v) for v, a in enumerate(e) if a)
            four = "*".join(f"e^(i{m}{p.name(v)})" for v, m in enumerate(f) if m)
            wed = "^".join("d" + p.name(v) for v in W)
            parts.append(" ".join(x for x in (str(c), mon, four, wed) if x))
        return " + ".join(parts)


def exterior_d(f: LaurentForm) -> LaurentForm:
    p = f.patch
    out: dict = {}
    if p is None:
        return LaurentForm(None, {})
    for (e, fo, W), c in f.terms.items():
        for v in range(p.nvars):
            if v in W:
                continue
            s, W2 = _sorted_insert(v, W)
            if e[v]:
                e2 = list(e)
                e2[v] -= 1
                _add(out, (tuple(e2), fo, W2), s * c * e[v])
            if fo[v]:
                _add(out, (e, fo, W2), s * c * QI(0, fo[v]))
    return LaurentForm(p, out)


def _coef(p: Patch, j: int):
    """``a_j`` as a 0-form."""
    e = [0] * p.nvars
    if j < p.k:
        e[j] = p.c[j]
    return LaurentForm.monomial(p, e)


def contract_G(f: LaurentForm) -> LaurentForm:
    """``i_G f = sum_j a_j i_{d/dv_j} i_{d/dxi_j} f``."""
    p = f.patch
    if p is None:
        return f
    out = LaurentForm(p, {})
    for j in range(p.n):
        g = f.interior(p.n + j).interior(j)
        if j < p.k:
            g = g.times_x(j, p.c[j])
        out = out + g
    return out


def poisson_bracket(f: LaurentForm, g: LaurentForm) -> LaurentForm:
    """``{f, g} = sum_j a_j (f_xi g_v - g_xi f_v)`` for 0-forms."""
    p = f.patch or g.patch
    out = LaurentForm(p, {})
    for j in range(p.n):
        t = f.partial(p.n + j).wedge(g.partial(j)) - g.partial(p.n + j).wedge(f.partial(j))
        out = out + _coef(p, j).wedge(t)
    return out


def _delta_contraction(f):
    return contract_G(exterior_d(f)) - exterior_d(contract_G(f))


def _delta_local(f: LaurentForm) -> LaurentForm:
    p = f.patch
    out = LaurentForm(p, {})
    for (e, fo, W), c in f.terms.items():
        f0 = LaurentForm(p, {(e, fo, ()): c})
        fs = [LaurentForm.coordinate(p, v) for v in W]
        k = len(W)

        def dprod(skip):
            acc = LaurentForm.monomial(p)
            for i in range(k):
                if i not in skip:
                    acc = acc.wedge(LaurentForm.monomial(p, wedge=(W[i],)))
            return acc

        for j in range(k):
            sign = 1 if j % 2 == 0 else -1      # (-1)^{(j+1)+1} with 1-based j+1
            out = out + poisson_bracket(f0, fs[j]).wedge(dprod({j})).scale(sign)
        for i in range(k):
            for j in range(i + 1, k):
                sign = 1 if (i + j) % 2 == 0 else -1
                br = exterior_d(poisson_bracket(fs[i], fs[j]))
                out = out + f0.wedge(br).wedge(dprod({i, j})).scale(sign)
    return out


def delta(f: LaurentForm, route: str = "contraction", check: bool = False) -> LaurentForm:
    """Poisson differential ``i_G d - d i_G`` (or the explicit bracket expansion)."""
    if f.patch is None or not f.terms:
        return LaurentForm(f.patch, {})
    if route == "contraction":
        a = _delta_contraction(f)
    elif route == "local_formula":
        a = _delta_local(f)
    elif route == "both":
        a = _delta_contraction(f)
        b = _delta_local(f)
        if a != b:
            raise EngineDefect(f"delta routes disagree on {f}: {a} vs {b}")
        return a
    else:
        raise InputError(f"unknown route {route!r}")
    if check:
        b = _delta_local(f) if route == "contraction" else _delta_contraction(f)
        if a != b:
            raise EngineDefect(f"delta routes disagree on {f}")
    return a


# -- symplectic Hodge star ----------------------------------------------------

def _perm_sign(seq):
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def _vol(p: Patch):
    """``omega^n / n!`` as ``(sign, x-exponent shift)`` times ``dv_0 ^ ... ^ dv_{2n-1}``."""
    order = []
    for j in range(p.n):
        order += [j, p.n + j]
    shift = [0] * p.nvars
    for j in range(p.k):
        shift[j] = -p.c[j]
    return _perm_sign(order), shift


def _star_raw(f: LaurentForm) -> LaurentForm:
    """``beta ^ *alpha = Lambda^q G(beta, alpha) omega^n/n!`` solved for ``*alpha``."""
    p = f.patch
    n2 = p.nvars
    vsign, vshift = _vol(p)
    out: dict = {}
    for (e, fo, K), c in f.terms.items():
        def pair(v):
            return v + p.n if v < p.n else v - p.n
        I = tuple(sorted(pair(v) for v in K))
        # det[G(dv_i, dv_k)] with i in I, k in K: G(dxi_j, dv_j) = a_j, G(dv_j, dxi_j) = -a_j
        sigma = [K.index(pair(i)) for i in I]
        det = _perm_sign(sigma)
        e2 = list(e)
        for i in I:
            j = i - p.n if i >= p.n else i
            if i < p.n:
                det = -det
            if j < p.k:
                e2[j] += p.c[j]
        comp = tuple(v for v in range(n2) if v not in I)
        eps, _ = _merge(I, comp)
        e2 = [a + b for a, b in zip(e2, vshift)]
        _add(out, (tuple(e2), fo, comp), c * det * vsign * eps)
    return LaurentForm(p, out)


def hodge_star(f: LaurentForm, p: Patch | None = None) -> LaurentForm:
    """Symplectic Hodge star, normalized so that ``* delta * = (-1)^q d`` on q-forms.

    The raw solution of ``beta ^ *alpha = Lambda^q G(beta, alpha) omega^n/n!``
    is multiplied by ``(-1)^{q-n}`` on q-forms; this fixes the sign left open
    by the reference convention and keeps ``*^2 = 1``.
    """
    p = p or f.patch
    if p is None or not f.terms:
        return LaurentForm(p, {})
    raw = _star_raw(LaurentForm(p, f.terms))
    out: dict = {}
    for (e, fo, W), c in raw.terms.items():
        q = p.nvars - len(W)
        _add(out, (e, fo, W), -c if (q - p.n) % 2 else c)
    return LaurentForm(p, out)


# -- identity checks ----------------------------------------------------------

def random_monomial_form(rng: random.Random, p: Patch, max_terms: int = 3, degree=None,
                         homogeneity=None, xrange=(-3, 3), yrange=(0, 3), xirange=(0, 3)) -> LaurentForm:
    """Random sum of monomials with rational coefficients (optionally homogeneous)."""
    q = rng.randint(0, p.nvars) if degree is None else degree
    out = LaurentForm(p, {})
    for _ in range(rng.randint(1, max_terms)):
        W = tuple(sorted(rng.sample(range(p.nvars), q)))
        e = [0] * p.nvars
        for v in range(p.n):
            e[v] = rng.randint(*xrange) if v < p.k else rng.randint(*yrange)
        if homogeneity is None:
            for v in range(p.n, p.nvars):
                e[v] = rng.randint(*xirange)
        else:
            budget = homogeneity - sum(1 for v in W if v >= p.n)
            if budget < 0:
                continue
            for _ in range(budget):
                e[rng.randrange(p.n, p.nvars)] += 1
        c = mpq(rng.randint(-5, 5), rng.randint(1, 4)) or mpq(1)
        out = out + LaurentForm.monomial(p, e, wedge=W, coeff=c)
    return out


def verify_identities(p: Patch, sample) -> dict:
    """Check the Poisson and Hodge identities on each sampled form.

    ``delta^2 = 0``, both delta routes agree, ``*^2 = 1``,
    ``* delta * = (-1)^q d`` on q-forms, ``delta`` lowers homogeneity by one,
    and ``*`` sends ``(q, h)`` to ``(2n - q, h + n - q)``.  Raises
    :class:`EngineDefect` naming the first failing form.
    """
    checked = 0
    for f in sample:
        f = LaurentForm(p, f.terms)
        dl = delta(f, "contraction")
        if dl != delta(f, "local_formula"):
            raise EngineDefect(f"delta routes disagree on {f}")
        if not delta(dl).is_zero():
            raise EngineDefect(f"delta^2 != 0 on {f}")
        if not exterior_d(exterior_d(f)).is_zero():
            raise EngineDefect(f"d^2 != 0 on {f}")
        if hodge_star(hodge_star(f)) != f:
            raise EngineDefect(f"*^2 != 1 on {f}")
        for (e, fo, W), c in f.terms.items():
            t = LaurentForm(p, {(e, fo, W): c})
            q = len(W)
            lhs = hodge_star(delta(hodge_star(t)))
            rhs = exterior_d(t).scale(-1 if q % 2 else 1)
            if lhs != rhs:
                raise EngineDefect(f"*delta* != (-1)^q d on {t}: {lhs} vs {rhs}")
            h = next(iter(t.homogeneities()))
            dt = delta(t)
            if dt.terms and dt.homogeneities() != {h - 1}:
                raise EngineDefect(f"delta does not lower homogeneity by one on {t}")
            st = hodge_star(t)
            if st.degrees() != {p.nvars - q} or st.homogeneities() != {h + p.n - q}:
                raise EngineDefect(f"* bidegree rule fails on {t}")
        checked += 1
    return {"checked": checked, "ok": True}


# -- homogeneous Poisson homology ---------------------------------------------

def sector_basis(p: Patch, q: int, h: int, xw=(-2, 2), yw=2) -> list:
    """Monomial q-forms of homogeneity ``h`` with x-weight in ``xw`` and y-weight ``<= yw``.

    The x-weight of a monomial is its x-exponent plus its number of ``dx``
    factors (per boundary variable); the y-weight is the analogous total.
    ``delta`` never lowers x-weights and never raises the y-weight, so these
    bounds cut out a subquotient complex.
    """
    n = p.n
    out = []
    for W in itertools.combinations(range(p.nvars), q):
        nxi = sum(1 for v in W if v >= n)
        budget = h - nxi
        if budget < 0:
            continue
        for xis in _compositions(budget, n):
            base_choices = []
            for v in range(n):
                dv = 1 if v in W else 0
                if v < p.k:
                    base_choices.append(range(xw[0] - dv, xw[1] - dv + 1))
                else:
                    base_choices.append(None)
            ys = [v for v in range(p.k, n)]
            ydv = sum(1 for v in W if v in ys)
            for xe in itertools.product(*[base_choices[v] for v in range(p.k)]):
                for ye in _bounded(len(ys), yw - ydv):
                    e = list(xe) + list(ye) + list(xis)
                    out.append((tuple(e), (0,) * p.nvars, W))
    return out


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for a in range(total + 1):
        for rest in _compositions(total - a, parts - 1):
            yield (a,) + rest


def _bounded(parts, total):
    """Nonnegative vectors of length ``parts`` with sum ``<= total``."""
    if total < 0:
        return
    for s in range(total + 1):
        yield from _compositions(s, parts)


def _complex(p, p0, h, xw, yw, op, step):
    """Complex of sectors ``(q, h - p0 + q)`` for ``q = 0..2n`` with ``op``."""
    bases = {q: sector_basis(p, q, h - p0 + q if step < 0 else h, xw, yw) for q in range(p.nvars + 1)}
    index = {q: {t: i for i, t in enumerate(b)} for q, b in bases.items()}
    diff = {}
    for q, b in bases.items():
        t = q + step
        if t not in bases:
            continue
        e = {}
        for j, key in enumerate(b):
            img = op(LaurentForm(p, {key: mpq(1)}))
            for k2, c in img.terms.items():
                i = index[t].get(k2)
                if i is None:
                    continue  # outside the window: quotient direction
                e[(i, j)] = c
        diff[q] = SparseMat(len(bases[t]), len(b), e)
    return bases, diff


def homogeneous_poisson_homology(p: Patch, form_degree: int, homogeneity: int, xw=(-2, 2), yw=2,
                                 stabilize: int = 0) -> dict:
    """``dim ker delta / im delta`` on q-forms of fixed homogeneity inside a window.

    With ``stabilize > 0`` the windows are widened that many times and the
    dims must agree for the last two, else :class:`BudgetError`.
    """
    def one(xw_, yw_):
        bases, diff = _complex(p, form_degree, homogeneity, xw_, yw_, delta, -1)
        c = ChainComplex({q: len(b) for q, b in bases.items()}, diff)
        return homology_dims(c)[form_degree]

    if not stabilize:
        return {"dim": one(xw, yw), "window": (xw, yw)}
    hist = []
    for s in range(stabilize + 1):
        w = ((xw[0] - s, xw[1] + s), yw + s)
        hist.append((w, one(*w)))
        if len(hist) >= 2 and hist[-1][1] == hist[-2][1]:
            return {"dim": hist[-1][1], "window": hist[-2][0], "history": hist}
    raise BudgetError(f"Poisson homology did not stabilize: {hist}")


def duality_check(p: Patch, form_degree: int, homogeneity: int, xw=(-2, 2), yw=2) -> dict:
    """Compare delta-homology of a window with d-cohomology of its star image.

    The star image of the window is a set of monomials; the d-complex on it is
    built with :func:`exterior_d` directly (terms leaving the image are
    discarded, mirroring the window), and its cohomology at degree
    ``2n - form_degree`` is compared to the delta-homology.
    """
    bases, diff = _complex(p, form_degree, homogeneity, xw, yw, delta, -1)
    hd = homology_dims(ChainComplex({q: len(b) for q, b in bases.items()}, diff))[form_degree]
    img = {}
    for q, b in bases.items():
        keys = []
        for key in b:
            s = hodge_star(LaurentForm(p, {key: mpq(1)}))
            (k2,) = s.terms
            keys.append(k2)
        img[p.nvars - q] = keys
    index = {q: {t: i for i, t in enumerate(b)} for q, b in img.items()}
    ddiff = {}
    for q, b in img.items():
        if q + 1 not in img:
            continue
        e = {}
        for j, key in enumerate(b):
            for k2, c in exterior_d(LaurentForm(p, {key: mpq(1)})).terms.items():
                i = index[q + 1].get(k2)
                if i is not None:
                    e[(i, j)] = c
        ddiff[q] = SparseMat(len(img[q + 1]), len(b), e)
    dc = ChainComplex({q: len(b) for q, b in img.items()}, ddiff, cochain=True)
    hdr = homology_dims(dc)[p.nvars - form_degree]
    return {"delta_homology": hd, "d_cohomology": hdr, "agree": hd == hdr}
