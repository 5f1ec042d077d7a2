"""Independent oracles: nothing here imports the package's linear algebra.

Ranks use ``fractions.Fraction`` elimination, symbol calculus and Poisson
brackets use sympy on honest functions of ``x`` and ``xi``.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import sympy as sp


def frac_rank(rows) -> int:
    """Rank of a dense matrix by Fraction Gaussian elimination."""
    m = [[Fraction(int(x.numerator), int(x.denominator)) if hasattr(x, "denominator") else Fraction(x)
          for x in r] for r in rows]
    if not m:
        return 0
    r = 0
    ncols = len(m[0])
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def homology_from_dense(dims: dict, diffs: dict) -> dict:
    """Chain homology dims; ``diffs[q]`` is the dense matrix ``C_q -> C_{q-1}``."""
    rk = {q: frac_rank(d) if d and d[0] else 0 for q, d in diffs.items()}
    return {q: n - rk.get(q, 0) - rk.get(q + 1, 0) for q, n in dims.items()}


# -- Kahler forms -------------------------------------------------------------

def kahler_form_count(kind: str, w: int, q: int) -> int:
    """``dim Omega^q`` in weight ``w`` for a one-variable coordinate ring.

    ``poly``: ``Q[x]`` (weight = degree); ``laurent``: ``Q[x, x^-1]``;
    ``circle``: ``Q[u, v]/(u^2 + v^2 - 1)`` complexified, weight = Fourier mode.
    Forms are ``f`` and ``f dx``; ``dx`` has weight 1 for ``poly``/``laurent``
    and the circle has ``Omega^1`` free on ``dtheta`` (weight 0).
    """
    if q < 0 or q > 1:
        return 0
    if kind == "poly":
        return 1 if (w >= 0 if q == 0 else w >= 1) else 0
    if kind in ("laurent", "circle"):
        return 1
    raise ValueError(kind)


# -- cellular oracles ---------------------------------------------------------

def euler_of_betti(b) -> int:
    return sum((-1) ** i * x for i, x in enumerate(b))


def kunneth(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def laurent_face_formula(faces) -> list:
    """``H^k = sum_F b^{k - codim F}(F)`` from ``[(codim, betti)]`` by hand."""
    top = max(c + len(b) - 1 for c, b in faces)
    out = [0] * (top + 1)
    for c, b in faces:
        for i, x in enumerate(b):
            out[c + i] += x
    return out


# -- symbol calculus ----------------------------------------------------------

X, XI = sp.symbols("x xi", real=True)


def symbol_expr(m: int, j: int):
    return sp.exp(sp.I * m * X) * XI ** j


def compose_symbols(a, b, terms: int):
    """``sum_{k < terms} (-i)^k / k! d_xi^k a * d_x^k b`` with sympy."""
    out = 0
    for k in range(terms):
        out += (-sp.I) ** k / sp.factorial(k) * sp.diff(a, XI, k) * sp.diff(b, X, k)
    return sp.expand(out)


def expr_to_keys(e) -> dict:
    """``sum c e^{imx} xi^j`` -> ``{(m, j): c}`` (``c`` rational)."""
    e = sp.expand(sp.powsimp(sp.expand(e)))
    out = {}
    for t in sp.Add.make_args(e):
        if t == 0:
            continue
        coeff, m, j = sp.Integer(1), 0, 0
        for f in sp.Mul.make_args(t):
            if f.func == sp.exp:
                arg = sp.expand(f.args[0] / (sp.I * X))
                m += int(arg)
            elif f == XI:
                j += 1
            elif f.is_Pow and f.base == XI:
                j += int(f.exp)
            else:
                coeff *= f
        out[(m, j)] = out.get((m, j), 0) + coeff
    return {k: v for k, v in out.items() if v != 0}


def bracket(f, g):
    """``{f, g} = d_xi f d_x g - d_x f d_xi g``."""
    return sp.expand(sp.diff(f, XI) * sp.diff(g, X) - sp.diff(f, X) * sp.diff(g, XI))


# -- Poisson differential by the Koszul formula ---------------------------------

def koszul_delta_1d(fs, coef):
    """Koszul-Brylinski formula for ``f_0 df_1 ^ ... ^ df_m`` on a plane.

    ``coef`` is the Poisson coefficient ``a`` in ``{f, g} = a (d_xi f d_x g -
    d_x f d_xi g)``.  Returns ``{wedge-index-tuple: sympy coefficient}`` over
    the coordinates ``(x, xi)`` (index 0 = x, 1 = xi).
    """
    def br(f, g):
        return sp.expand(coef * (sp.diff(f, XI) * sp.diff(g, X) - sp.diff(f, X) * sp.diff(g, XI)))

    def d(f):
        return {(0,): sp.diff(f, X), (1,): sp.diff(f, XI)}

    def wedge(a, b):
        out = {}
        for ka, va in a.items():
            for kb, vb in b.items():
                if set(ka) & set(kb):
                    continue
                seq = ka + kb
                sign = 1
                for i in range(len(seq)):
                    for j in range(i + 1, len(seq)):
                        if seq[i] > seq[j]:
                            sign = -sign
                k = tuple(sorted(seq))
                out[k] = sp.expand(out.get(k, 0) + sign * va * vb)
        return out

    def product(forms):
        out = {(): sp.Integer(1)}
        for f in forms:
            out = wedge(out, f)
        return out

    m = len(fs) - 1
    f0, rest = fs[0], fs[1:]
    total = {}
    for i in range(1, m + 1):
        others = [d(f) for a, f in enumerate(rest, 1) if a != i]
        term = product(others)
        s = (-1) ** (i + 1)
        for k, v in term.items():
            total[k] = sp.expand(total.get(k, 0) + s * br(f0, rest[i - 1]) * v)
    for i, j in itertools.combinations(range(1, m + 1), 2):
        others = [d(f) for a, f in enumerate(rest, 1) if a not in (i, j)]
        term = product([d(br(rest[i - 1], rest[j - 1]))] + others)
        s = (-1) ** (i + j)
        for k, v in term.items():
            total[k] = sp.expand(total.get(k, 0) + s * f0 * v)
    return {k: v for k, v in total.items() if v != 0}


def ground_field_hc(n: int) -> int:
    """``HC_n(Q)``: 1 in even degrees, 0 in odd."""
    return 1 if n % 2 == 0 else 0


def binom(n, k):
    return math.comb(n, k)
