"""Finite chain complexes, chain maps, long exact sequences and mixed complexes."""

from __future__ import annotations

from dataclasses import dataclass, field


from .errors import EngineDefect, InputError
from .qlinalg import NOT_IN_IMAGE, SparseMat, Solver, decompose, rank, rref

__all__ = [
    "ChainComplex", "ChainMap", "MixedComplex", "ExactSequenceReport", "CyclicTotal",
    "homology", "homology_dims", "euler_characteristic", "les_of_ses",
    "cyclic_total", "sbi_report", "compose_check", "shift",
]


class ChainComplex:
    """Finite complex with spaces ``dims[q]`` for ``q`` in ``[lo, hi]``.

    ``diff[q]`` is the matrix leaving degree ``q``: into ``q-1`` for chain
    complexes, into ``q+1`` when ``cochain`` is set.  Missing entries are zero
    maps.  ``d o d = 0`` is verified unless ``check=False``.
    """

    def __init__(self, dims: dict, diff: dict | None = None, cochain: bool = False,
                 check: bool = True, name: str = ""):
        self.dims = {int(q): int(n) for q, n in dims.items()}
        if not self.dims:
            self.lo, self.hi = 0, -1
        else:
            self.lo, self.hi = min(self.dims), max(self.dims)
            for q in range(self.lo, self.hi + 1):
                self.dims.setdefault(q, 0)
        self.cochain = cochain
        self.step = 1 if cochain else -1
        self.name = name
        self.diff = {}
        for q in self.degrees():
            t = q + self.step
            m = (diff or {}).get(q)
            if m is None:
                m = SparseMat.zero(self.dim(t), self.dim(q))
            if m.shape != (self.dim(t), self.dim(q)):
                raise InputError(f"differential at degree {q} has shape {m.shape}, "
                                 f"expected {(self.dim(t), self.dim(q))}")
            self.diff[q] = m
        if check:
            self.check()

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def dim(self, q):
        return self.dims.get(q, 0)

    def d(self, q) -> SparseMat:
        """Differential leaving degree ``q`` (zero matrix outside the range)."""
        m = self.diff.get(q)
        if m is None:
            return SparseMat.zero(self.dim(q + self.step), self.dim(q))
        return m

    def incoming(self, q) -> SparseMat:
        return self.d(q - self.step)

    def check(self):
        for q in self.degrees():
            a = self.d(q + self.step) @ self.d(q)
            if not a.is_zero():
                raise InputError(f"d o d != 0 leaving degree {q}")

    def reversed(self) -> "ChainComplex":
        """Same data with degrees negated and orientation flipped."""
        return ChainComplex({-q: n for q, n in self.dims.items()},
                            {-q: m for q, m in self.diff.items()},
                            cochain=not self.cochain, check=False, name=self.name)

    def dual(self) -> "ChainComplex":
        """Transpose complex (cochains of a chain complex and vice versa)."""
        return ChainComplex(dict(self.dims),
                            {q + self.step: m.transpose() for q, m in self.diff.items()
                             if self.lo <= q + self.step <= self.hi},
                            cochain=not self.cochain, check=False, name=self.name)

    def __repr__(self):
        kind = "Cochain" if self.cochain else "Chain"
        return f"<{kind}Complex {self.name} dims={[self.dim(q) for q in self.degrees()]} from {self.lo}>"


def homology_dims(c: ChainComplex) -> dict:
    ranks = {q: rank(c.d(q)) for q in range(c.lo - 1, c.hi + 2)}
    return {q: c.dim(q) - ranks[q] - ranks.get(q - c.step, 0) for q in c.degrees()}


def euler_characteristic(c: ChainComplex) -> int:
    return sum((-1) ** (q % 2) * c.dim(q) for q in c.degrees())


def homology(c: ChainComplex, q: int) -> dict:
    """Dimension and cycle representatives of ``H_q`` (``H^q`` for cochains)."""
    if not (c.lo <= q <= c.hi):
        return {"dim": 0, "representatives": [], "out_of_range": True}
    z = decompose(c.d(q))["kernel_basis"]
    bd = decompose(c.incoming(q))["image_basis"]
    piv = rref(bd)
    reps = []
    for v in z:
        before = len(piv)
        rref([v], piv)
        if len(piv) > before:
            reps.append(v)
    return {"dim": len(reps), "representatives": reps, "out_of_range": False}


class _HomologyCoords:
    """Coordinates of cycles in a fixed homology basis."""

    def __init__(self, c: ChainComplex, q: int):
        h = homology(c, q)
        self.reps = h["representatives"]
        self.dim = h["dim"]
        bd = decompose(c.incoming(q))["image_basis"]
        self.solver = Solver(SparseMat.from_columns(c.dim(q), self.reps + bd))

    def __call__(self, z) -> dict:
        x = self.solver(z)
        if x is NOT_IN_IMAGE:
            raise EngineDefect("vector is not a cycle")
        return {i: v for i, v in x.items() if i < self.dim}


@dataclass
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    components: dict
    check: bool = True

    def __post_init__(self):
        if self.source.cochain != self.target.cochain:
            raise InputError("chain map between complexes of different orientation")
        for q in self.source.degrees():
            m = self.components.get(q)
            if m is None:
                m = SparseMat.zero(self.target.dim(q), self.source.dim(q))
                self.components[q] = m
            if m.shape != (self.target.dim(q), self.source.dim(q)):
                raise InputError(f"component at degree {q} has shape {m.shape}")
        if self.check:
            s = self.source.step
            for q in self.source.degrees():
                lhs = self.target.d(q) @ self[q]
                rhs = self[q + s] @ self.source.d(q)
                if lhs != rhs:
                    raise InputError(f"map does not commute with differentials at degree {q}")

    def __getitem__(self, q) -> SparseMat:
        m = self.components.get(q)
        if m is None:
            return SparseMat.zero(self.target.dim(q), self.source.dim(q))
        return m

    def on_homology(self, q) -> SparseMat:
        src = homology(self.source, q)
        coords = _HomologyCoords(self.target, q)
        cols = [coords(self[q].matvec(z)) for z in src["representatives"]]
        return SparseMat.from_columns(coords.dim, cols)


def compose_check(f: ChainMap, g: ChainMap) -> ChainMap:
    """``g o f``, re-verified to commute with the differentials."""
    if f.target is not g.source and (f.target.dims != g.source.dims):
        raise InputError("composition shape mismatch")
    comps = {}
    for q in f.source.degrees():
        comps[q] = g[q] @ f[q]
    return ChainMap(f.source, g.target, comps)


def identity_map(c: ChainComplex) -> ChainMap:
    return ChainMap(c, c, {q: SparseMat.identity(c.dim(q)) for q in c.degrees()})


@dataclass
class ExactSequenceReport:
    """Homology dims of ``A -> B -> C`` and the maps of the long sequence."""

    degrees: list
    dims: dict
    maps: dict = field(default_factory=dict)
    exact: dict = field(default_factory=dict)

    @property
    def all_exact(self) -> bool:
        return all(self.exact.values())

    def rows(self):
        for q in self.degrees:
            yield q, self.dims["A"][q], self.dims["B"][q], self.dims["C"][q]


def les_of_ses(incl: ChainMap, proj: ChainMap, degrees=None, strict: bool = True) -> ExactSequenceReport:
    """Long exact homology sequence of ``0 -> A -> B -> C -> 0``.

    The connecting map lifts a cycle of ``C`` through ``proj``, applies the
    differential of ``B`` and pulls back through ``incl``.  Exactness is
    checked at every node whose neighbours lie inside ``degrees``.
    """
    A, B, C = incl.source, incl.target, proj.target
    if proj.source is not B and proj.source.dims != B.dims:
        raise InputError("proj must start where incl ends")
    s = B.step
    degs = list(degrees if degrees is not None else B.degrees())
    for q in B.degrees():
        i, p = incl[q], proj[q]
        if rank(i) != A.dim(q):
            raise InputError(f"inclusion not injective in degree {q}")
        if rank(p) != C.dim(q):
            raise InputError(f"projection not surjective in degree {q}")
        if not (p @ i).is_zero():
            raise InputError(f"proj o incl != 0 in degree {q}")
        if rank(i) + rank(p) != B.dim(q):
            raise InputError(f"sequence not exact in the middle at degree {q}")

    hA = {q: homology(A, q) for q in degs}
    hC = {q: homology(C, q) for q in degs}
    cA = {q: _HomologyCoords(A, q) for q in degs}
    dims = {"A": {q: hA[q]["dim"] for q in degs},
            "B": {q: homology(B, q)["dim"] for q in degs},
            "C": {q: hC[q]["dim"] for q in degs}}
    maps = {}
    for q in degs:
        maps[("i", q)] = incl.on_homology(q)
        maps[("p", q)] = proj.on_homology(q)
        if q + s in degs:
            psolve = Solver(proj[q])
            isolve = Solver(incl[q + s])
            cols = []
            for z in hC[q]["representatives"]:
                lift = psolve(z)
                if lift is NOT_IN_IMAGE:
                    raise EngineDefect("projection failed to lift a cycle")
                a = isolve(B.d(q).matvec(lift))
                if a is NOT_IN_IMAGE:
                    raise EngineDefect("boundary of a lift is not in the subcomplex")
                cols.append(cA[q + s](a))
            maps[("delta", q)] = SparseMat.from_columns(dims["A"][q + s], cols)

    exact = {}
    for q in degs:
        # node H(A)_q: delta_{q-s} in, i_q out
        if ("delta", q - s) in maps:
            exact[("A", q)] = _exact_at(maps[("delta", q - s)], maps[("i", q)], dims["A"][q])
        exact[("B", q)] = _exact_at(maps[("i", q)], maps[("p", q)], dims["B"][q])
        if ("delta", q) in maps:
            exact[("C", q)] = _exact_at(maps[("p", q)], maps[("delta", q)], dims["C"][q])
    rep = ExactSequenceReport(degs, dims, maps, exact)
    if strict and not rep.all_exact:
        bad = [k for k, v in exact.items() if not v]
        raise EngineDefect(f"long sequence not exact at {bad}")
    return rep


def _exact_at(inc: SparseMat, out: SparseMat, n: int) -> bool:
    if not (out @ inc).is_zero():
        return False
    return rank(inc) + rank(out) == n


def shift(c: ChainComplex, k: int) -> ChainComplex:
    """Complex with ``shift(c, k)_q = c_{q+k}``."""
    return ChainComplex({q - k: n for q, n in c.dims.items()},
                        {q - k: m for q, m in c.diff.items()},
                        cochain=c.cochain, check=False, name=f"{c.name}[{k}]")


# -- mixed complexes ---------------------------------------------------------

class MixedComplex:
    """Spaces ``dims[0..N]`` with ``b[q]: q -> q-1`` and ``B[q]: q -> q+1``."""

    def __init__(self, dims: dict, b: dict, B: dict, check: bool = True):
        self.dims = dict(dims)
        self.top = max(self.dims) if self.dims else -1
        self.b = {q: b.get(q, SparseMat.zero(self.dim(q - 1), self.dim(q))) for q in range(self.top + 1)}
        self.B = {q: B.get(q, SparseMat.zero(self.dim(q + 1), self.dim(q))) for q in range(self.top)}
        if check:
            self.check()

    def dim(self, q):
        return self.dims.get(q, 0)

    def bmat(self, q):
        return self.b.get(q, SparseMat.zero(self.dim(q - 1), self.dim(q)))

    def Bmat(self, q):
        return self.B.get(q, SparseMat.zero(self.dim(q + 1), self.dim(q)))

    def check(self):
        for q in range(self.top + 1):
            if not (self.bmat(q - 1) @ self.bmat(q)).is_zero():
                raise InputError(f"b^2 != 0 at degree {q}")
            if q + 2 <= self.top and not (self.Bmat(q + 1) @ self.Bmat(q)).is_zero():
                raise InputError(f"B^2 != 0 at degree {q}")
            if q + 1 <= self.top:
                anti = self.bmat(q + 1) @ self.Bmat(q)
                if q >= 1:
                    anti = anti + self.Bmat(q - 1) @ self.bmat(q)
                if not anti.is_zero():
                    raise InputError(f"bB + Bb != 0 at degree {q}")

    def hochschild(self, top=None) -> ChainComplex:
        top = self.top if top is None else top
        return ChainComplex({q: self.dim(q) for q in range(top + 1)},
                            {q: self.bmat(q) for q in range(1, top + 1)}, name="hochschild")


@dataclass
class CyclicTotal:
    complex: ChainComplex
    S: ChainMap | None
    I: ChainMap
    summands: dict


def cyclic_total(m: MixedComplex, top_degree: int, with_S: bool = True) -> CyclicTotal:
    """Total complex ``C_n = (+)_{k>=0} M_{n-2k}`` with differential ``b + B``."""
    if top_degree > m.top:
        raise InputError(f"mixed complex only known up to degree {m.top}")
    summands = {n: [n - 2 * k for k in range(n // 2 + 1)] for n in range(top_degree + 1)}
    dims = {n: sum(m.dim(j) for j in summands[n]) for n in summands}
    diff = {}
    for n in range(1, top_degree + 1):
        src, tgt = summands[n], summands[n - 1]
        blocks = [[None] * len(src) for _ in tgt]
        for a, j in enumerate(src):
            for c, t in enumerate(tgt):
                if t == j - 1:
                    blocks[c][a] = m.bmat(j)
                elif t == j + 1:
                    blocks[c][a] = m.Bmat(j)
        diff[n] = SparseMat.block(blocks, [m.dim(t) for t in tgt], [m.dim(j) for j in src])
    total = ChainComplex(dims, diff, name="cyclic")
    hh = m.hochschild(top_degree)
    I = ChainMap(hh, total, {n: SparseMat.block([[SparseMat.identity(m.dim(n))]] +
                                                [[None] for _ in summands[n][1:]],
                                                [m.dim(j) for j in summands[n]], [m.dim(n)])
                             for n in summands})
    S = None
    if with_S:
        lowered = ChainComplex({n: dims.get(n - 2, 0) for n in summands},
                               {n: diff[n - 2] for n in summands if n - 2 >= 1}, name="cyclic[-2]")
        comps = {}
        for n in summands:
            if n < 2:
                comps[n] = SparseMat.zero(0, dims[n])
                continue
            src, tgt = summands[n], summands[n - 2]
            blocks = [[None] * len(src) for _ in tgt]
            for c, t in enumerate(tgt):
                blocks[c][src.index(t)] = SparseMat.identity(m.dim(t))
            comps[n] = SparseMat.block(blocks, [m.dim(t) for t in tgt], [m.dim(j) for j in src])
        S = ChainMap(total, lowered, comps)
    return CyclicTotal(total, S, I, summands)


def sbi_report(m: MixedComplex, up_to: int) -> ExactSequenceReport:
    """Connes' sequence ``HH_n -I-> HC_n -S-> HC_{n-2} -B-> HH_{n-1}``.

    Built as the homology sequence of ``0 -> (M, b) -> Tot -> Tot[-2] -> 0``;
    the connecting map is the B-map with the sign produced by the lift
    ``x -> (x, 0, ...)``.  Exactness failure raises :class:`EngineDefect`.
    """
    top = up_to + 1
    if top > m.top:
        raise InputError(f"need the mixed complex up to degree {top}")
    ct = cyclic_total(m, top)
    return les_of_ses(ct.I, ct.S, degrees=range(0, up_to + 1), strict=True)
