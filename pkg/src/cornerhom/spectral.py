"""Spectral sequences of filtered complexes and inverse-limit towers.

Filtrations are split: each basis vector of the underlying complex carries
an integer level, and ``F_p`` is spanned by the vectors of level ``<= p``.
General flags are converted by :meth:`FilteredComplex.from_flag`.

Two routes compute pages.  :func:`page` builds explicit representatives and
the differential ``d^r``.  :func:`page_dims` uses one lowest-pivot column
reduction per degree (the pairing lemma of persistent homology): with rows
and columns sorted by level, the rank of every lower-left block equals the
number of pivots inside it, so all ``dim Z^r_p`` follow by counting.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .complexes import ChainComplex, ChainMap, ExactSequenceReport, homology_dims
from .errors import BudgetError, EngineDefect, InputError
from .qlinalg import NOT_IN_IMAGE, SparseMat, Solver, axpy, decompose, rank, reduce_low_pivots, rref

__all__ = [
    "FilteredComplex", "SpectralPage", "ConvergenceReport", "Tower", "PatternReport",
    "page", "page_dims", "converge", "tower_limits", "ml_pattern_check",
    "exact_limp_check", "random_filtered_complex",
]


class FilteredComplex:
    """Chain complex whose basis vectors carry filtration levels."""

    def __init__(self, underlying: ChainComplex, levels: dict, flags: dict | None = None):
        if underlying.cochain:
            raise InputError("filtered complexes use chain orientation")
        self.c = underlying
        self.levels = {q: list(levels.get(q, [])) for q in underlying.degrees()}
        for q in underlying.degrees():
            if len(self.levels[q]) != underlying.dim(q):
                raise InputError(f"degree {q}: {len(self.levels[q])} levels for dim {underlying.dim(q)}")
        self.flags = dict(flags or {})
        for q in underlying.degrees():
            lv = self.levels[q]
            for (i, j) in underlying.d(q).entries:
                if self.levels[q - 1][i] > lv[j]:
                    raise InputError(f"differential raises filtration level in degree {q}")
        allv = [p for q in self.levels for p in self.levels[q]]
        self.pmin = min(allv) if allv else 0
        self.pmax = max(allv) if allv else -1

    @property
    def underlying(self):
        return self.c

    @classmethod
    def from_flag(cls, c: ChainComplex, flag: dict) -> "FilteredComplex":
        """Filtration given as ``flag[p][q]`` = spanning vectors of ``F_p C_q``.

        Levels must be increasing and the top level must be everything.  The
        complex is rewritten in an adapted basis.
        """
        ps = sorted(flag)
        change = {}
        levels = {}
        for q in c.degrees():
            piv: dict = {}
            basis, lv = [], []
            for p in ps:
                for v in flag[p].get(q, []):
                    before = len(piv)
                    rref([v], piv)
                    if len(piv) > before:
                        basis.append(dict(v))
                        lv.append(p)
            if len(basis) != c.dim(q):
                raise InputError(f"filtration not exhaustive in degree {q}")
            change[q] = SparseMat.from_columns(c.dim(q), basis)
            levels[q] = lv
        diff = {}
        for q in c.degrees():
            if q - 1 < c.lo:
                continue
            inv = Solver(change[q - 1])
            cols = []
            for v in change[q].col_dicts():
                x = inv(c.d(q).matvec(v))
                if x is NOT_IN_IMAGE:
                    raise EngineDefect("adapted basis is not a basis")
                cols.append(x)
            diff[q] = SparseMat.from_columns(c.dim(q - 1), cols)
        return cls(ChainComplex(dict(c.dims), diff, name=c.name), levels)

    def subspace(self, p: int, q: int) -> list:
        """Basis of ``F_p C_q`` as sparse vectors."""
        return [{i: mpq(1)} for i, l in enumerate(self.levels.get(q, [])) if l <= p]

    def count(self, p: int, q: int) -> int:
        return sum(1 for l in self.levels.get(q, []) if l <= p)

    def truncate(self, lo: int, hi: int) -> "FilteredComplex":
        """Subquotient ``F_hi / F_{lo-1}``."""
        keep = {q: [i for i, l in enumerate(self.levels[q]) if lo <= l <= hi] for q in self.c.degrees()}
        diff = {q: self.c.d(q).submatrix(keep.get(q - 1, []), keep[q])
                for q in self.c.degrees() if q - 1 >= self.c.lo}
        sub = ChainComplex({q: len(keep[q]) for q in keep}, diff, check=False)
        return FilteredComplex(sub, {q: [self.levels[q][i] for i in keep[q]] for q in keep})

    def __repr__(self):
        return f"<FilteredComplex levels {self.pmin}..{self.pmax} {self.c!r}>"


# -- explicit pages -----------------------------------------------------------

@dataclass
class SpectralPage:
    r: int
    cells: dict
    differentials: dict

    def dims(self) -> dict:
        return {kh: cell["dim"] for kh, cell in self.cells.items()}

    def total(self, q: int) -> int:
        return sum(c["dim"] for (k, h), c in self.cells.items() if k + h == q)


class _PageBuilder:
    def __init__(self, f: FilteredComplex):
        self.f = f
        self._z = {}

    def _z_basis(self, r, p, q):
        key = (r, p, q)
        if key in self._z:
            return self._z[key]
        f = self.f
        lv = f.levels.get(q, [])
        cols = [i for i, l in enumerate(lv) if l <= p]
        if r < 0 or q - 1 < f.c.lo:
            out = [{i: mpq(1)} for i in cols]
        else:
            rows = [i for i, l in enumerate(f.levels.get(q - 1, [])) if l > p - r]
            sub = f.c.d(q).submatrix(rows, cols)
            out = [{cols[j]: v for j, v in k.items()} for k in decompose(sub)["kernel_basis"]]
        self._z[key] = out
        return out

    def _proj(self, v, p, q):
        lv = self.f.levels[q]
        return {i: x for i, x in v.items() if lv[i] == p}

    def cell(self, r, p, q):
        f = self.f
        zs = self._z_basis(r, p, q)
        bds = []
        if q + 1 <= f.c.hi:
            d = f.c.d(q + 1)
            for z in self._z_basis(r - 1, p + r - 1, q + 1):
                u = self._proj(d.matvec(z), p, q)
                if u:
                    bds.append(u)
        piv = rref(bds)
        bbasis = [dict(r_) for r_ in piv.values()]
        reps, projs = [], []
        for z in zs:
            u = self._proj(z, p, q)
            before = len(piv)
            rref([u], piv)
            if len(piv) > before:
                reps.append(z)
                projs.append(u)
        solver = Solver(SparseMat.from_columns(f.c.dim(q), bbasis + projs))
        return {"dim": len(reps), "basis": reps, "_solver": solver, "_nb": len(bbasis)}


def page(f: FilteredComplex, r: int) -> SpectralPage:
    """``E^r`` with representatives and the differentials ``d^r``."""
    if r < 0:
        raise InputError("page index must be >= 0")
    b = _PageBuilder(f)
    raw = {}
    for q in f.c.degrees():
        for p in sorted(set(f.levels[q])):
            raw[(p, q)] = b.cell(r, p, q)
    cells = {}
    diffs = {}
    for (p, q), cell in raw.items():
        cells[(p, q - p)] = {"dim": cell["dim"], "basis": cell["basis"]}
    for (p, q), cell in raw.items():
        tgt = raw.get((p - r, q - 1))
        if tgt is None:
            if cell["dim"] and q - 1 >= f.c.lo:
                # target cell empty: every image must vanish
                for z in cell["basis"]:
                    u = b._proj(f.c.d(q).matvec(z), p - r, q - 1)
                    if u:
                        raise EngineDefect("d^r lands in an empty cell")
            continue
        cols = []
        for z in cell["basis"]:
            u = b._proj(f.c.d(q).matvec(z), p - r, q - 1)
            x = tgt["_solver"](u)
            if x is NOT_IN_IMAGE:
                raise EngineDefect(f"d^{r} image not in Z^r at cell {(p - r, q - 1)}")
            nb = tgt["_nb"]
            cols.append({i - nb: v for i, v in x.items() if i >= nb})
        diffs[(p, q - p)] = SparseMat.from_columns(tgt["dim"], cols)
    return SpectralPage(r, cells, diffs)


# -- dimension route ----------------------------------------------------------

class _Pairing:
    """Pivot pairs of each differential with rows/cols sorted by level."""

    def __init__(self, f: FilteredComplex):
        self.f = f
        self.pairs = {}
        for q in f.c.degrees():
            if q - 1 < f.c.lo:
                self.pairs[q] = []
                continue
            rl = f.levels[q - 1]
            cl = f.levels[q]
            rorder = sorted(range(len(rl)), key=lambda i: rl[i])
            rpos = {i: a for a, i in enumerate(rorder)}
            corder = sorted(range(len(cl)), key=lambda j: cl[j])
            cols = f.c.d(q)._cols_cache()
            seq = [{rpos[i]: v for i, v in cols.get(j, {}).items()} for j in corder]
            piv = reduce_low_pivots(seq)
            self.pairs[q] = [(rl[rorder[low]], cl[corder[j]]) for low, j in piv.items()]

    def block_rank(self, q, above, upto):
        """rank of d_q restricted to rows of level > above, columns of level <= upto."""
        return sum(1 for a, b in self.pairs.get(q, []) if a > above and b <= upto)

    def z(self, r, p, q):
        n = self.f.count(p, q)
        if r < 0:
            return n
        return n - self.block_rank(q, p - r, p)


def page_dims(f: FilteredComplex, r: int, pairing: _Pairing | None = None) -> dict:
    """``{(k, h): dim E^r_{k,h}}`` over all cells with a nonzero ``E^0``."""
    pr = pairing or _Pairing(f)
    out = {}
    for q in f.c.degrees():
        for p in sorted(set(f.levels[q])):
            cyc = pr.z(r, p, q) - pr.z(r - 1, p - 1, q)
            bnd = pr.z(r - 1, p + r - 1, q + 1) - pr.z(r, p + r - 1, q + 1) if q + 1 <= f.c.hi else 0
            out[(p, q - p)] = cyc - bnd
    return out


@dataclass
class ConvergenceReport:
    einf: dict
    homology: dict
    totals: dict
    degeneration_page: int
    pages: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.totals[q] == self.homology[q] for q in self.homology)


def converge(f: FilteredComplex) -> ConvergenceReport:
    """``E^infinity``, the homology of the underlying complex, and the page of degeneration."""
    pr = _Pairing(f)
    span = max(f.pmax - f.pmin, 0)
    rmax = span + 1
    einf = page_dims(f, rmax, pr)
    pages = {r: page_dims(f, r, pr) for r in range(rmax + 1)}
    degen = next(r for r in range(rmax + 1) if pages[r] == einf)
    hom = homology_dims(f.c)
    totals = {q: sum(d for (k, h), d in einf.items() if k + h == q) for q in f.c.degrees()}
    rep = ConvergenceReport(einf, hom, totals, degen, pages)
    if not rep.ok:
        raise EngineDefect(f"E^infinity totals {totals} != homology {hom}")
    return rep


def random_filtered_complex(rng: random.Random, max_dim: int = 5, levels: int = 3,
                            degrees: int = 3) -> FilteredComplex:
    """Random split filtered complex with nontrivial pages.

    A direct sum of elementary pieces ``x -> y`` (``level(y) <= level(x)``) and
    single cells, conjugated by a random filtration-preserving unipotent change
    of basis so that the differential is dense.
    """
    dims = {q: 0 for q in range(degrees)}
    lv = {q: [] for q in range(degrees)}
    edges = []
    for q in range(degrees):
        while dims[q] < max_dim and rng.random() < 0.8:
            if q >= 1 and dims[q - 1] < max_dim and rng.random() < 0.5:
                lx = rng.randrange(levels)
                ly = rng.randrange(lx + 1)
                edges.append((q, dims[q], dims[q - 1]))
                lv[q].append(lx)
                lv[q - 1].append(ly)
                dims[q] += 1
                dims[q - 1] += 1
            else:
                lv[q].append(rng.randrange(levels))
                dims[q] += 1
    diff = {q: SparseMat(dims[q - 1], dims[q], {(y, x): rng.choice([1, -1, 2, mpq(1, 2)])
                                                for (qq, x, y) in edges if qq == q})
            for q in range(1, degrees)}
    # unipotent P_q with P[i][j] != 0 only if level(i) <= level(j)
    P = {}
    for q in range(degrees):
        n = dims[q]
        e = {(i, i): 1 for i in range(n)}
        for i in range(n):
            for j in range(n):
                if i != j and lv[q][i] <= lv[q][j] and (lv[q][i] < lv[q][j] or i < j) and rng.random() < 0.5:
                    e[(i, j)] = rng.randint(-2, 2)
        P[q] = SparseMat(n, n, e)
    newdiff = {}
    for q in range(1, degrees):
        inv = Solver(P[q - 1])
        cols = []
        for v in (diff[q] @ P[q]).col_dicts():
            x = inv(v)
            cols.append(x)
        newdiff[q] = SparseMat.from_columns(dims[q - 1], cols)
    return FilteredComplex(ChainComplex(dims, newdiff), lv)


# -- towers -------------------------------------------------------------------

class Tower:
    """``V_0 <- V_1 <- ... <- V_{N-1}`` with ``maps[n]: V_{n+1} -> V_n``.

    Stages are dimensions (ints) or chain complexes; for complexes the maps
    are :class:`ChainMap`.  ``tail`` optionally declares that the last stage
    and the map ``tail: V_{N-1} -> V_{N-1}`` repeat forever.
    """

    def __init__(self, stages: list, maps: list, tail=None):
        if len(maps) != max(len(stages) - 1, 0):
            raise InputError("a tower of N stages needs N-1 maps")
        self.stages = list(stages)
        self.maps = list(maps)
        self.tail = tail
        self.complexes = bool(stages) and isinstance(stages[0], ChainComplex)
        for n, m in enumerate(self.maps):
            if self.complexes:
                if not isinstance(m, ChainMap):
                    raise InputError("complex towers need ChainMap maps")
            else:
                if m.shape != (stages[n], stages[n + 1]):
                    raise InputError(f"map {n} has shape {m.shape}")

    def __len__(self):
        return len(self.stages)


def _limit_maps(dims: list, maps: list):
    """``F: prod V_n -> prod_{n<N-1} V_n``, ``F(v)_n = v_n - phi_n(v_{n+1})``."""
    off = [0]
    for d in dims:
        off.append(off[-1] + d)
    e = {}
    for n in range(len(dims) - 1):
        for i in range(dims[n]):
            e[(off[n] + i, off[n] + i)] = 1
        for (i, j), v in maps[n].entries.items():
            e[(off[n] + i, off[n + 1] + j)] = -v
    return SparseMat(off[len(dims) - 1], off[-1], e), off


def _eventual_image(psi: SparseMat, budget: int):
    basis = [{i: mpq(1)} for i in range(psi.cols)]
    for _ in range(budget):
        img = decompose(SparseMat.from_columns(psi.rows, [psi.matvec(v) for v in basis]))["image_basis"]
        if len(img) == len(basis):
            return basis
        basis = img
    raise BudgetError("images of the tail map did not stabilize within the budget")


def tower_limits(t: Tower, budget: int = 64) -> dict:
    """``lim`` and ``lim^1`` of a tower of vector spaces.

    For a materialized finite tower ``lim = ker F`` and ``lim^1 = coker F``.
    With a declared tail the limit is the eventual image of the tail map
    carried down the tower; finite dimensions make the tower Mittag-Leffler,
    so ``lim^1 = 0`` is certified.
    """
    if t.complexes:
        raise InputError("use exact_limp_check for towers of complexes")
    if not t.stages:
        return {"lim": 0, "lim1": 0, "lim_basis": [], "certificate": "empty"}
    F, off = _limit_maps(t.stages, t.maps)
    dec = decompose(F)
    lim_basis = dec["kernel_basis"]
    lim1 = F.rows - dec["rank"]
    cert = "finite tower: lim = ker F, lim1 = coker F"
    if t.tail is not None:
        last = t.stages[-1]
        ev = _eventual_image(t.tail, budget)
        restricted = [{i - off[-2]: x for i, x in v.items() if i >= off[-2]} for v in lim_basis]
        # kernel of [restricted | ev] picks the sequences whose last entry lies in ev
        combo = decompose(SparseMat.from_columns(last, restricted + ev))
        keep = []
        for k in combo["kernel_basis"]:
            v = {}
            for j, c in k.items():
                if j < len(lim_basis):
                    axpy(v, c, lim_basis[j])
            if v:
                keep.append(v)
        lim_basis = decompose(SparseMat.from_columns(off[-1], keep))["image_basis"] if keep else []
        cert = "tail declared: eventual image stabilized, Mittag-Leffler, lim1 = 0"
        lim1 = 0
    return {"lim": len(lim_basis), "lim1": lim1, "lim_basis": lim_basis, "certificate": cert}


@dataclass
class PatternReport:
    holds: bool
    failing_stage: int | None
    reason: str
    lim: int | None = None
    lim1: int | None = None


def ml_pattern_check(dims: list, subspaces: list, maps: list) -> PatternReport:
    """Check ``B_n`` preserved, ``C_{n+1} -> C_n`` iso and ``B_{n+1} -> B_n`` zero.

    ``subspaces[n]`` spans ``B_n`` inside ``A_n`` (``dims[n]``); ``maps[n]:
    A_{n+1} -> A_n``.  When the pattern holds, ``lim A = C_{n0}`` and
    ``lim^1 A = 0``.
    """
    N = len(dims)
    if len(subspaces) != N or len(maps) != N - 1:
        raise InputError("need one subspace per stage and N-1 maps")
    bdims = [rank(SparseMat.from_columns(dims[n], subspaces[n])) if subspaces[n] else 0 for n in range(N)]
    for n in range(N - 1):
        phi = maps[n]
        images = [phi.matvec(v) for v in subspaces[n + 1]]
        if any(images_nz for images_nz in images if images_nz):
            return PatternReport(False, n + 1, "B-level map is not zero")
        if dims[n + 1] - bdims[n + 1] != dims[n] - bdims[n]:
            return PatternReport(False, n + 1, "quotients C_{n+1}, C_n differ in dimension")
        # induced map on quotients: rank of [phi(A_{n+1}) | B_n] minus dim B_n
        cols = [phi.matvec({j: mpq(1)}) for j in range(dims[n + 1])]
        r = rank(SparseMat.from_columns(dims[n], cols + list(subspaces[n])))
        if r - bdims[n] != dims[n] - bdims[n]:
            return PatternReport(False, n + 1, "induced map C_{n+1} -> C_n is not an isomorphism")
    return PatternReport(True, None, "pattern holds", lim=dims[0] - bdims[0], lim1=0)


def exact_limp_check(t: Tower, degrees=None) -> ExactSequenceReport:
    """Verify ``0 -> lim^1 H_{q+1} -> H_q(lim) -> lim H_q -> 0`` dimensionwise.

    ``lim`` is the subcomplex ``ker F`` of the product complex; the homology
    tower is built from the induced maps in fixed homology bases.
    """
    if not t.complexes:
        raise InputError("exact_limp_check needs a tower of chain complexes")
    stages = t.stages
    for n, m in enumerate(t.maps):
        for q in stages[n].degrees():
            if rank(m[q]) != stages[n].dim(q):
                raise InputError(f"tower map {n} not surjective in degree {q}")
    c0 = stages[0]
    degs = list(degrees if degrees is not None else c0.degrees())
    # limit subcomplex
    lim_dims, lim_basis = {}, {}
    for q in c0.degrees():
        F, off = _limit_maps([s.dim(q) for s in stages], [m[q] for m in t.maps])
        lim_basis[q] = decompose(F)["kernel_basis"]
        lim_dims[q] = len(lim_basis[q])
    diff = {}
    for q in c0.degrees():
        if q - 1 < c0.lo:
            continue
        blocks = SparseMat.block([[s.d(q) if a == b else None for b, s in enumerate(stages)]
                                  for a, _ in enumerate(stages)],
                                 [s.dim(q - 1) for s in stages], [s.dim(q) for s in stages])
        inc = SparseMat.from_columns(blocks.rows, lim_basis[q - 1])
        solver = Solver(inc)
        cols = []
        for v in lim_basis[q]:
            x = solver(blocks.matvec(v))
            if x is NOT_IN_IMAGE:
                raise EngineDefect("limit is not a subcomplex")
            cols.append(x)
        diff[q] = SparseMat.from_columns(lim_dims[q - 1], cols)
    limc = ChainComplex(lim_dims, diff)
    h_lim = homology_dims(limc)
    lim_h, lim1_h = {}, {}
    for q in c0.degrees():
        hd = [homology_dims(s)[q] for s in stages]
        hm = [m.on_homology(q) for m in t.maps]
        res = tower_limits(Tower(hd, hm))
        lim_h[q], lim1_h[q] = res["lim"], res["lim1"]
    exact = {}
    for q in degs:
        exact[q] = h_lim[q] == lim_h[q] + lim1_h.get(q + 1, 0)
    dims = {"lim1": {q: lim1_h.get(q + 1, 0) for q in degs},
            "H(lim)": {q: h_lim[q] for q in degs},
            "limH": {q: lim_h[q] for q in degs}}
    return ExactSequenceReport(degs, dims, {}, exact)


def quotient_tower(f: FilteredComplex, cuts) -> Tower:
    """Tower of quotients ``F / F_{p'}`` for ``p'`` running through ``cuts`` (decreasing).

    Each stage keeps the basis vectors of level ``> p'``; the maps are the
    projections, so the tower is surjective.
    """
    cuts = list(cuts)
    if any(a <= b for a, b in zip(cuts, cuts[1:])):
        raise InputError("cuts must be strictly decreasing")
    keeps, stages = [], []
    for p in cuts:
        keep = {q: [i for i, l in enumerate(f.levels[q]) if l > p] for q in f.c.degrees()}
        diff = {q: f.c.d(q).submatrix(keep.get(q - 1, []), keep[q]) for q in f.c.degrees() if q - 1 >= f.c.lo}
        keeps.append(keep)
        stages.append(ChainComplex({q: len(keep[q]) for q in keep}, diff, check=False))
    maps = []
    for n in range(len(cuts) - 1):
        small, big = keeps[n], keeps[n + 1]
        comps = {}
        for q in f.c.degrees():
            pos = {i: a for a, i in enumerate(small[q])}
            comps[q] = SparseMat(len(small[q]), len(big[q]),
                                 {(pos[i], b): 1 for b, i in enumerate(big[q]) if i in pos})
        maps.append(ChainMap(stages[n + 1], stages[n], comps))
    return Tower(stages, maps)
