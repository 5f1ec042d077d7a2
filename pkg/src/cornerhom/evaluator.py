"""Theorem right-hand sides from manifests, the S^1 symbol model and its cross-checks.

Manifests are JSON documents describing a manifold with corners (see
``docs/manifest.md``).  The cosphere bundle is taken trivial, so ``S*M`` is
the product ``M x S^{n-1}`` with the face lattice of ``M``; homology of the
glued products is computed cellularly.

The symbol model is the algebra of complete symbols on the circle restricted
to one ray of the cotangent fibre: basis ``e^{imx} xi^j`` (``m, j`` integers)
with the standard composition
``a o b = sum_k (1/k!) d_xi^k a * (-i d_x)^k b``, which has rational structure
constants on this basis.  The other ray is isomorphic via
``(x, xi) -> (-x, -xi)``, so the full model is two copies.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from gmpy2 import mpq

from .complexes import ChainComplex, cyclic_total, homology_dims, les_of_ses
from .corners import (CornerManifold, Face, GluedSpace, build_L, cell_complex, cellular_cohomology,
                      check_closed, circle_product, minimal_faces, product_manifold,
                      validate, _sub_and_quotient)
from .errors import BudgetError, EngineDefect, InputError
from .hochschild import (GradedAlgebra, HochschildChain, apply_operator, chain_basis,
                         hochschild_complex, _matrix, _b_terms)
from .poisson import LaurentForm, Patch, delta
from .qlinalg import I, SparseMat, rank
from .spectral import FilteredComplex, converge, page_dims

__all__ = [
    "parse_manifest", "load_manifest", "manifest_to_dict", "CosphereModel", "cosphere_model",
    "eval_hp", "eval_hh_laurent", "eval_hc", "eval_quotient_and_traces",
    "build_symbol_model", "symbol_product", "ray_flip", "s1_hh", "s1_hh_stabilized", "d1_check", "ec1_check", "ray_poisson_homology", "e2_vs_poisson",
    "QUOTIENT_NOTE",
]

QUOTIENT_NOTE = ("quotient homology is computed in L(S*M) x S^1, not as H_c^{2n}(L(M)); "
                 "the two readings differ in general")


# -- manifests ----------------------------------------------------------------

def parse_manifest(doc) -> dict:
    """Validate a manifest (dict or JSON text) and return ``{M, X, c, budgets, assumptions}``."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise InputError(f"manifest is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise InputError("manifest: top level must be an object")

    def need(obj, key, typ, path):
        if key not in obj:
            raise InputError(f"manifest: missing {path}{key}")
        if not isinstance(obj[key], typ):
            raise InputError(f"manifest: {path}{key} has the wrong type")
        return obj[key]

    dim = need(doc, "dim", int, "")
    faces = {}
    for i, fd in enumerate(need(doc, "faces", list, "")):
        path = f"faces[{i}]."
        if not isinstance(fd, dict):
            raise InputError(f"manifest: faces[{i}] must be an object")
        fid = str(need(fd, "id", (str, int), path))
        codim = need(fd, "codim", int, path)
        cells = fd.get("cells")
        betti = fd.get("betti")
        if cells is None and betti is None:
            raise InputError(f"manifest: {path}cells or {path}betti required")
        if cells is not None:
            if not isinstance(cells, dict):
                raise InputError(f"manifest: {path}cells must be an object")
            for cid, cell in cells.items():
                if not isinstance(cell, dict) or not isinstance(cell.get("dim"), int):
                    raise InputError(f"manifest: {path}cells.{cid}.dim must be an integer")
                bd = cell.get("boundary", {})
                if not isinstance(bd, dict) or not all(isinstance(v, int) for v in bd.values()):
                    raise InputError(f"manifest: {path}cells.{cid}.boundary must map cell ids to integers")
        if betti is not None and (not isinstance(betti, list) or not all(isinstance(b, int) and b >= 0 for b in betti)):
            raise InputError(f"manifest: {path}betti must be a list of nonnegative integers")
        if fid in faces:
            raise InputError(f"manifest: duplicate face id {fid}")
        faces[fid] = Face(fid, codim, cells, betti, bool(fd.get("orientable", True)))
    covers = []
    for i, cv in enumerate(doc.get("covers", [])):
        if not (isinstance(cv, list) and len(cv) == 2):
            raise InputError(f"manifest: covers[{i}] must be [childId, parentId]")
        covers.append((str(cv[0]), str(cv[1])))
    M = CornerManifold(dim, faces, covers, name=str(doc.get("name", "")))
    X = [str(x) for x in doc.get("X", [])]
    validate(M)
    check_closed(M, X)
    c = {str(k): int(v) for k, v in doc.get("c", {}).items()}
    for h in c:
        if h not in M.hyperfaces:
            raise InputError(f"manifest: c names {h}, which is not a hyperface")
    assumptions = dict(doc.get("assumptions", {}))
    budgets = dict(doc.get("budgets", {}))
    M.meta = {"assumptions": assumptions, "budgets": budgets, "c": c}
    return {"M": M, "X": X, "c": c, "budgets": budgets, "assumptions": assumptions}


def load_manifest(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read manifest {path}: {e}") from None
    return parse_manifest(text)


def manifest_to_dict(M: CornerManifold, X=(), assumptions=None, budgets=None, c=None) -> dict:
    faces = []
    for fid, F in M.faces.items():
        d = {"id": fid, "codim": F.codim}
        if F.cells is not None:
            d["cells"] = F.cells
        if F.betti is not None:
            d["betti"] = F.betti
        d["orientable"] = F.orientable
        faces.append(d)
    return {"name": M.name, "dim": M.dim, "faces": faces,
            "covers": [list(cv) for cv in M.covers], "X": list(X),
            "c": dict(c or {}),
            "assumptions": assumptions or {"rational_iso": True, "trivial_cosphere": True},
            "budgets": budgets or {}}


# -- cosphere model -----------------------------------------------------------

def _sphere(k: int) -> CornerManifold:
    if k < 0:
        return CornerManifold(-1, {}, [], name="empty")
    if k == 0:
        cells = {"s+": {"dim": 0}, "s-": {"dim": 0}}
        betti = [2]
    else:
        cells = {"s0": {"dim": 0}, f"s{k}": {"dim": k, "boundary": {}}}
        betti = [1] + [0] * (k - 1) + [1]
    return CornerManifold(k, {"S": Face("S", 0, cells, betti)}, [], name=f"S^{k}")


@dataclass
class CosphereModel:
    base: CornerManifold
    n: int
    sphere: CornerManifold
    total: CornerManifold          # S*M with faces F*S
    assumptions: dict = field(default_factory=dict)

    @property
    def dim(self):
        return 2 * self.n - 1

    def lift(self, X) -> list:
        return [f"{f}*S" for f in X]


def cosphere_model(M: CornerManifold, assumptions: dict | None = None) -> CosphereModel:
    """``S*M = M x S^{n-1}`` with the face lattice of ``M`` (trivialized fibres)."""
    assumptions = dict(assumptions if assumptions is not None else M.meta.get("assumptions", {}))
    n = M.dim
    sph = _sphere(n - 1)
    if n == 0:
        total = CornerManifold(-1, {}, [], name=f"S*{M.name}")
        return CosphereModel(M, n, sph, total, assumptions)
    total = product_manifold(M, sph, name=f"S*{M.name}")
    total.open_cells = M.open_cells
    total.dim = 2 * n - 1
    return CosphereModel(M, n, sph, total, assumptions)


def _require(cm: CosphereModel, *flags):
    for f in flags:
        if not cm.assumptions.get(f, False):
            raise InputError(f"theorem out of hypothesis: manifest does not declare assumptions.{f}")


def _betti_total(cm: CosphereModel) -> list:
    top = next(f for f, F in cm.base.faces.items() if F.codim == 0)
    from .corners import face_betti
    b = face_betti(cm.base, top)
    s = [2] if cm.n == 1 else ([1] + [0] * (cm.n - 2) + [1] if cm.n >= 2 else [])
    out = [0] * (len(b) + len(s))
    for i, x in enumerate(b):
        for j, y in enumerate(s):
            out[i + j] += x * y
    return out


def _times_circle(b: list) -> list:
    out = [0] * (len(b) + 1)
    for i, x in enumerate(b):
        out[i] += x
        out[i + 1] += x
    return out


def _laurent_space(cm: CosphereModel):
    """``L(S*M) x S^1`` as a cell complex together with the glued space."""
    L = build_L(cm.total)
    Y = circle_product(L.complex)
    return L, Y


def _pre(L: GluedSpace, Y: ChainComplex, faces) -> set:
    base = L.preimage(faces)
    return {cell for cs in Y.cells.values() for cell in cs if cell[0] in base}


def eval_hp(cm: CosphereModel, variant: str = "full", X=()) -> dict:
    """Even/odd totals of ``H^*(S*M x S^1)``, ``H^*(S*M)`` or the Laurent pair."""
    if variant in ("full", "order0", "order_zero"):
        try:
            c = cell_complex(cm.total)
            if variant == "full":
                c = circle_product(c)
            h = homology_dims(c)
            dims = [h.get(q, 0) for q in range(c.lo, c.hi + 1)]
        except InputError:
            b = _betti_total(cm)
            dims = _times_circle(b) if variant == "full" else b
    elif variant == "laurent":
        _require(cm, "rational_iso")
        L, Y = _laurent_space(cm)
        h = cellular_cohomology(Y, _pre(L, Y, cm.lift(X))) if X else cellular_cohomology(Y)
        dims = [h.get(q, 0) for q in range(max(h) + 1)] if h else []
    else:
        raise InputError(f"unknown variant {variant!r}")
    return {"even": sum(dims[0::2]), "odd": sum(dims[1::2]), "dims": dims}


def _pair_dims(cm: CosphereModel, X) -> dict:
    L, Y = _laurent_space(cm)
    if X:
        return cellular_cohomology(Y, _pre(L, Y, cm.lift(X)))
    return cellular_cohomology(Y)


def eval_hh_laurent(cm: CosphereModel, X=()) -> dict:
    """``HH_q = dim H_c^{2n-q}`` of ``L(S*M) x S^1`` minus the preimage of ``X``."""
    _require(cm, "rational_iso")
    h = _pair_dims(cm, X)
    return {q: h.get(2 * cm.n - q, 0) for q in range(2 * cm.n + 1)}


def eval_hc(cm: CosphereModel, X=(), m: int = 0) -> dict:
    """``HC_m = sum_{k >= 0} HH_{m-2k}`` (``B = 0``), checked against the
    periodic formula ``sum_{j = m mod 2} H^j`` once ``m > dim S*M``."""
    if m < 0:
        return {"dim": 0, "checked": False}
    hh = eval_hh_laurent(cm, X)
    val = sum(hh.get(m - 2 * k, 0) for k in range(m // 2 + 1))
    checked = False
    if m > cm.dim:
        h = _pair_dims(cm, X)
        direct = sum(d for j, d in h.items() if (j - m) % 2 == 0)
        if direct != val:
            raise EngineDefect(f"HC_{m}: B=0 formula gives {val}, periodic formula gives {direct}")
        checked = True
    return {"dim": val, "checked": checked}


def eval_quotient_and_traces(cm: CosphereModel, X=()) -> dict:
    """Quotient HH dims, number of minimal faces and ``dim H^{2n}`` over the minimal faces."""
    L, Y = _laurent_space(cm)
    n = cm.n
    out = {"note": QUOTIENT_NOTE}
    if X:
        pre = _pre(L, Y, cm.lift(X))
        sub, quo, incl, proj = _sub_and_quotient(Y, pre)
        hs = homology_dims(sub.dual())
        out["quotient_hh_dims"] = {q: hs.get(2 * n - q, 0) for q in range(2 * n + 1)}
        rep = les_of_ses(incl, proj)
        out["pair_sequence_exact"] = rep.all_exact
    else:
        out["quotient_hh_dims"] = {q: 0 for q in range(2 * n + 1)}
        out["pair_sequence_exact"] = True
    mins = minimal_faces(cm.base)
    out["trace_count"] = mins["count"]
    ypre = _pre(L, Y, cm.lift(mins["faces"]))
    sub, _, _, _ = _sub_and_quotient(Y, ypre)
    out["h_top_dim"] = homology_dims(sub.dual()).get(2 * n, 0)
    out["asserted"] = False
    if n >= 2 and all(F.orientable for F in cm.base.faces.values()) and cm.assumptions.get("trivial_cosphere", True):
        if out["h_top_dim"] != out["trace_count"]:
            raise EngineDefect(f"trace count {out['trace_count']} != dim H^{2 * n} = {out['h_top_dim']}")
        out["asserted"] = True
    return out


# -- the symbol model ---------------------------------------------------------

def _falling(a: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= a - i
    return out


def symbol_product(a: tuple, b: tuple, min_order: int | None = None, top_only: bool = False) -> dict:
    """``e^{imx} xi^a o e^{inx} xi^b = sum_k falling(a, k) n^k / k! e^{i(m+n)x} xi^{a+b-k}``.

    ``(-i)^k (i n)^k = n^k`` makes every coefficient rational.  For ``a < 0``
    the series is infinite and is cut at ``min_order``.
    """
    (m, p), (n, q) = a, b
    out = {}
    k = 0
    while True:
        o = p + q - k
        if min_order is not None and o < min_order:
            break
        c = _falling(p, k) * n ** k
        if k and c == 0 and p >= 0 and k > p:
            break
        if c:
            out[(m + n, o)] = mpq(c, math.factorial(k))
        if top_only:
            break
        if min_order is None and p >= 0 and k >= p:
            break
        k += 1
    return out


def ray_flip(key: tuple) -> tuple:
    """``(x, xi) -> (-x, -xi)`` on ``e^{imx} xi^j``: returns ``(sign, key')``."""
    m, j = key
    return (-1 if j % 2 else 1), (-m, j)


def build_symbol_model(window=(-2, 2), J: int | None = None, W: int = 4, graded: bool = False,
                       order_zero: bool = False) -> GradedAlgebra:
    """One-ray symbol model with chains in the total-order window and truncations.

    ``window = (p', p)``: chains of total order in ``[p', p]`` (the quotient
    ``F_p / F_{p'-1}``).  ``J`` (default ``p``) bounds the sum of positive
    orders of the factors and ``W`` the sum of ``|m|``; both never increase
    under ``b``.  ``graded`` keeps only the leading term of each product (the
    associated graded algebra, commutative).  ``order_zero`` restricts to
    symbols of order ``<= 0``, a subalgebra, and then ``p`` must be ``<= 0``.

    Factors of a chain may have orders outside the window as long as the
    total lies inside, so the basis runs over ``[p' - J, J]``; the quotient
    algebra itself has ``p - p' + 1`` orders per Fourier slot
    (:func:`window_slot_dim`).
    """
    lo, hi = window
    if lo > hi:
        raise InputError("empty order window")
    J = max(hi, 0) if J is None else J
    if order_zero:
        if hi > 0:
            raise InputError("order-zero model needs a window inside orders <= 0")
        J = 0
    omin = lo - J
    keys = [(m, j) for m in range(-W, W + 1) for j in range(omin, J + 1)]

    def mul(a, b):
        return symbol_product(a, b, min_order=omin, top_only=graded)

    def ok(t):
        return sum(abs(m) for m, _ in t) <= W and sum(j for _, j in t if j > 0) <= J

    tag = " Gr" if graded else ""
    tag += " order<=0" if order_zero else ""
    return GradedAlgebra(keys, mul, weight=lambda k: k[0], order=lambda k: k[1], unit=(0, 0),
                         commutative=graded, chain_ok=ok, floor=lo, ceiling=hi,
                         to_form=_symbol_form, name=f"S1 symbols {window} J={J} W={W}{tag}")


def window_slot_dim(window) -> int:
    """Dimension of the order-window quotient in one Fourier slot."""
    lo, hi = window
    return max(hi - lo + 1, 0)


_S1 = Patch(1, 0)


def _symbol_form(key):
    m, j = key
    return LaurentForm(_S1, {((0, j), (m, 0), ()): mpq(1)})


def s1_hh(window=(-2, 2), J: int | None = None, W: int = 4, q_max: int = 2, rays: int = 2) -> dict:
    """HH of the S^1 symbol model at Fourier weight 0 via the spectral engine.

    Sums ``E^infinity_{k, q-k}`` over the interior filtration levels
    ``p' < k < p`` and multiplies by the number of rays.  The outermost
    levels carry truncation artefacts, and so does level ``J``; hence
    ``J >= p`` is required.  ``W = 4`` is the smallest Fourier budget with the
    correct ``HH_2`` of the graded algebra.
    """
    J = window[1] if J is None else J
    if J < window[1]:
        raise InputError(f"J = {J} must be at least the window top {window[1]}")
    A = build_symbol_model(window, J, W)
    f = hochschild_complex(A, 0, q_max + 1, normalized=True)
    rep = converge(f)
    lo, hi = window
    per_ray = {q: sum(d for (k, h), d in rep.einf.items() if k + h == q and lo < k < hi)
               for q in range(q_max + 1)}
    return {"dims": {q: rays * d for q, d in per_ray.items()}, "per_ray": per_ray,
            "degeneration_page": rep.degeneration_page, "report": rep, "filtered": f,
            "window": (window, J, W)}


S1_LADDER = (((-2, 2), 2, 4), ((-2, 2), 2, 6), ((-2, 2), 3, 4))


def s1_hh_stabilized(ladder=S1_LADDER, q_max: int = 2) -> dict:
    """Run :func:`s1_hh` over growing windows; certified when all runs agree.

    Raises :class:`BudgetError` if the last two windows disagree.
    """
    runs = [s1_hh(w, J, W, q_max) for w, J, W in ladder]
    dims = [r["dims"] for r in runs]
    if len(runs) >= 2 and dims[-1] != dims[-2]:
        raise BudgetError(f"S^1 symbol model HH not stable over windows: {dims}")
    return {"dims": dims[-1], "stable": all(d == dims[-1] for d in dims), "runs": runs}


def ray_poisson_homology(k: int, q: int) -> int:
    """``delta``-homology of Fourier-weight-0 ``q``-forms of homogeneity ``k`` on one ray.

    At Fourier weight 0 every monomial form is free of ``e^{imy}``, so the
    sector is spanned by ``xi^a`` times ``1, dy, dxi, dy dxi``.
    """
    def basis(q, k):
        out = []
        for W in ((), (0,), (1,), (0, 1)):
            if len(W) != q:
                continue
            a = k - (1 if 1 in W else 0)
            out.append(LaurentForm.monomial(_S1, exps=(0, a), wedge=W))
        return out

    src, mid, tgt = basis(q + 1, k + 1), basis(q, k), basis(q - 1, k - 1)

    def mat(forms, target):
        keys = [next(iter(t.terms)) for t in target]
        cols = []
        for f in forms:
            g = delta(f)
            cols.append({keys.index(t): v for t, v in g.terms.items()})
        return SparseMat.from_columns(len(target), cols)

    r_out = rank(mat(mid, tgt)) if tgt else 0
    r_in = rank(mat(src, mid)) if src and mid else 0
    return len(mid) - r_out - r_in


def e2_vs_poisson(result: dict) -> dict:
    """Compare page 2 of an :func:`s1_hh` run with :func:`ray_poisson_homology` on interior cells."""
    (lo, hi), J, W = result["window"]
    e2 = result["report"].pages[2]
    cells, bad = {}, []
    for k in range(lo + 1, hi):
        for q in range(0, 3):
            got = e2.get((k, q - k), 0)
            want = ray_poisson_homology(k, q)
            cells[(k, q - k)] = (got, want)
            if got != want:
                bad.append(((k, q - k), got, want))
    if bad:
        raise EngineDefect(f"E^2 differs from delta-homology (cell, E^2, delta): {bad}")
    return {"ok": True, "cells": cells}


# -- d1 check -----------------------------------------------------------------

def _antisymmetrize(f0, fs):
    import itertools
    terms = {}
    for perm in itertools.permutations(range(len(fs))):
        sign = 1
        for i in range(len(perm)):
            for j in range(i + 1, len(perm)):
                if perm[i] > perm[j]:
                    sign = -sign
        t = (f0,) + tuple(fs[i] for i in perm)
        terms[t] = terms.get(t, 0) + sign
    return HochschildChain(len(fs), {t: mpq(c) for t, c in terms.items() if c})


def _chi(chain: HochschildChain) -> LaurentForm:
    out = LaurentForm(_S1, {})
    l = chain.degree
    for t, v in chain.terms.items():
        f = _symbol_form(t[0])
        for k in t[1:]:
            f = f.wedge(_symbol_form(k).d())
        out = out + f.scale(v * mpq(1, math.factorial(l)))
    return out


def d1_check(samples: int = 100, seed: int = 0, max_order: int = 2, max_fourier: int = 2,
             lengths=(1, 2, 3), explicit=None) -> dict:
    """``chi(b(q eta)) = -i delta(chi(eta))`` up to terms two orders down.

    ``eta`` is ``f_0 (x) f_1 (x) ... (x) f_m`` antisymmetrized in the last
    ``m`` slots; ``q`` is the identity on the monomial basis.  Raises
    :class:`EngineDefect` with the failing sample.
    """
    rng = random.Random(seed)
    A = GradedAlgebra([(m, j) for m in range(-max_fourier * 4, max_fourier * 4 + 1) for j in range(0, 4 * max_order + 1)],
                      lambda a, b: symbol_product(a, b), weight=lambda k: k[0], order=lambda k: k[1],
                      unit=(0, 0), name="S1 symbols")
    todo = list(explicit or [])
    while len(todo) < samples:
        m = rng.choice(lengths)
        keys = [(rng.randint(-max_fourier, max_fourier), rng.randint(0, max_order)) for _ in range(m + 1)]
        if len(set(keys[1:])) < m:
            continue  # antisymmetrization would vanish
        todo.append((keys[0], keys[1:]))
    results = []
    for f0, fs in todo:
        eta = _antisymmetrize(tuple(f0), [tuple(x) for x in fs])
        total = sum(k[1] for k in (f0, *fs))
        lhs = _chi(apply_operator("b", A, eta)) if eta.terms else LaurentForm(_S1, {})
        rhs = delta(_chi(eta)).scale(-I) if eta.terms else LaurentForm(_S1, {})
        diff = lhs - rhs
        bad = {k: v for k, v in diff.terms.items() if k[0][1] + sum(1 for x in k[2] if x == 1) > total - 2}
        if bad:
            raise EngineDefect(f"d1 identity fails for eta = {f0} (x) {fs}: residue {LaurentForm(_S1, bad)}")
        results.append({"eta": (tuple(f0), [tuple(x) for x in fs]), "order": total,
                        "rhs_zero": rhs.is_zero()})
    return {"checked": len(results), "ok": True, "samples": results}


# -- EC^1 check ---------------------------------------------------------------

_T2 = {0: 1, 1: 2, 2: 1}   # Betti numbers of the cosphere ray times the circle
_S1B = {0: 1, 1: 1}


def ec1_expected(k: int, h: int, order_zero: bool = False) -> int:
    """Per-ray ``dim HC_{k+h}`` of the graded model in weight ``(0, k)``.

    The graded model is ``Q[z^+-1, r^+-1]`` (``Q[z^+-1, r^-1]`` for order
    ``<= 0``).  Off weight zero the de Rham complex is exact, leaving
    ``Omega^q / d Omega^{q-1}``; in weight zero ``d = 0`` and the cyclic
    tower adds the lower cohomology.
    """
    q = k + h
    if q < 0 or (order_zero and k > 0):
        return 0
    if k != 0:
        return 1 if q in (0, 1) else 0
    b = _S1B if order_zero else _T2
    return b.get(q, 0) + sum(b.get(q - 2 * j, 0) for j in range(1, q // 2 + 1))


def ec1_s_rank(k: int, h: int, order_zero: bool = False) -> int:
    """Expected rank of ``S: EC^1_{k,h} -> EC^1_{k,h-2}`` per ray."""
    if k != 0:
        return 0
    b = _S1B if order_zero else _T2
    return sum(b.get(h - 2 * j, 0) for j in range(1, h // 2 + 1))


def _graded_mixed(A: GradedAlgebra, q_max: int):
    """Normalized mixed complex of Fourier weight 0."""
    from .complexes import MixedComplex
    bases = {q: chain_basis(A, 0, q, normalized=True) for q in range(q_max + 1)}
    index = {q: {t: i for i, t in enumerate(b)} for q, b in bases.items()}
    b, B = {}, {}
    for q in range(1, q_max + 1):
        b[q] = _matrix(A, bases[q], index[q - 1], lambda t: _b_terms(A, t, True), True, "b")
    for q in range(q_max):
        def bterms(t, q=q):
            return apply_operator("B0", A, HochschildChain(q, {t: mpq(1)})).terms.items()
        B[q] = _matrix(A, bases[q], index[q + 1], bterms, True, "B")
    return MixedComplex({q: len(bases[q]) for q in bases}, b, B), bases


def ec1_check(window=(-2, 2), J: int | None = None, W: int = 4, q_max: int = 2,
              order_zero: bool = False) -> dict:
    """EC^1 of the cyclic spectral sequence of the symbol model against closed forms.

    The cyclic total complex of the normalized symbol model is filtered by
    total order; its E^1 cells from the spectral engine are compared with
    :func:`ec1_expected` on levels clear of truncation edges.  The rank of
    ``S`` on page 1 is computed on the graded pieces and compared with
    :func:`ec1_s_rank`.  Raises :class:`EngineDefect` on any mismatch.
    """
    A = build_symbol_model(window, J, W, order_zero=order_zero)
    mc, bases = _graded_mixed(A, q_max + 1)
    ct = cyclic_total(mc, q_max + 1, with_S=False)
    levels = {}
    for n, summ in ct.summands.items():
        lv = []
        for j in summ:
            lv += [sum(k[1] for k in t) for t in bases[j]]
        levels[n] = lv
    f = FilteredComplex(ct.complex, levels)
    e1 = page_dims(f, 1)
    lo, hi = window
    top = hi if order_zero else hi - 1     # order <= 0 has no truncation at the top
    band = range(lo + 1, top + 1)
    cells, mismatches = {}, []
    for (k, h), d in sorted(e1.items()):
        if k in band and k + h <= q_max:
            exp = ec1_expected(k, h, order_zero)
            cells[(k, h)] = (d, exp)
            if d != exp:
                mismatches.append(((k, h), d, exp))
    s_ranks = {}
    for k in band:
        G = build_symbol_model((k, k), J if J is None else max(J, k), W, graded=True, order_zero=order_zero)
        gm, _ = _graded_mixed(G, q_max + 1)
        gct = cyclic_total(gm, q_max + 1)
        for q in range(2, q_max + 1):
            r = rank(gct.S.on_homology(q))
            want = ec1_s_rank(k, q - k, order_zero)
            s_ranks[(k, q - k)] = (r, want)
            if r != want:
                mismatches.append((("S", k, q - k), r, want))
    if mismatches:
        raise EngineDefect(f"EC^1 mismatch (cell, engine, closed form): {mismatches}")
    return {"ok": True, "cells": cells, "s_ranks": s_ranks}
