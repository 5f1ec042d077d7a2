"""Combinatorial manifolds with corners and the glued space L(M).

A manifold is a face lattice.  Each face may carry the cells of a CW
structure whose interiors lie in the open face; the closed face is the union
of its cells and the cells of the faces below it.  Faces given only by Betti
numbers support the face-decomposition formula but not the cellular route.

Cellular model of ``L(M)``: over an open face ``F`` lying in the hyperfaces
``H(F)`` sit the cells ``sigma x e^S`` with ``sigma`` a cell of ``F`` and
``S`` a subset of ``H(F)``; ``e^S`` is the cell of the minimal CW torus
``(S^1)^{H(F)}`` whose coordinates outside ``S`` sit at the basepoint 1.  The
torus cells have zero boundary, so ``d(sigma x e^S) = (d sigma) x e^S``, and a
boundary cell ``tau`` of ``sigma`` lies in a smaller face whose hyperfaces
contain ``S``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from gmpy2 import mpq

from .complexes import ChainComplex, ChainMap, homology_dims, les_of_ses
from .errors import InputError
from .qlinalg import SparseMat

__all__ = [
    "Face", "CornerManifold", "GluedSpace", "validate", "laurent_cohomology_formula",
    "build_L", "cellular_cohomology", "minimal_faces", "cell_complex", "pair_sequence",
    "product_manifold", "circle_product",
]


@dataclass
class Face:
    id: str
    codim: int
    cells: dict | None = None      # cellId -> {"dim": int, "boundary": {cellId: int}}
    betti: list | None = None
    orientable: bool = True


@dataclass
class CornerManifold:
    """Face lattice with optional cell data.

    ``covers`` holds pairs ``(child, parent)`` with ``codim(child) =
    codim(parent) + 1``.  ``open_cells`` marks a manifold obtained by deleting
    faces: boundary references to missing cells are dropped, so cellular
    cochains compute compactly supported cohomology.
    """

    dim: int
    faces: dict
    covers: list
    name: str = ""
    open_cells: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._below = None

    # lattice
    def below(self, fid) -> set:
        """Faces contained in the closure of ``fid`` (including itself)."""
        if self._below is None:
            children = {f: set() for f in self.faces}
            for c, p in self.covers:
                children.setdefault(p, set()).add(c)
            memo = {}

            def rec(f):
                if f not in memo:
                    out = {f}
                    for c in children.get(f, ()):
                        out |= rec(c)
                    memo[f] = out
                return memo[f]
            self._below = {f: rec(f) for f in self.faces}
        return self._below[fid]

    def above(self, fid) -> set:
        return {g for g in self.faces if fid in self.below(g)}

    @property
    def hyperfaces(self) -> list:
        return sorted(f for f, F in self.faces.items() if F.codim == 1)

    def hyperfaces_of(self, fid) -> list:
        return sorted(h for h in self.hyperfaces if fid in self.below(h))

    @property
    def has_cells(self):
        return all(F.cells is not None for F in self.faces.values())

    def cell_face(self) -> dict:
        out = {}
        for fid, F in self.faces.items():
            for cid in (F.cells or {}):
                if cid in out:
                    raise InputError(f"cell {cid!r} listed in faces {out[cid]!r} and {fid!r}")
                out[cid] = fid
        return out

    def complement(self, X) -> "CornerManifold":
        """The manifold minus the closed face union ``X``, as an open-cell manifest."""
        X = set(X)
        faces = {f: F for f, F in self.faces.items() if f not in X}
        covers = [(c, p) for c, p in self.covers if c not in X and p not in X]
        return CornerManifold(self.dim, faces, covers, name=f"{self.name} minus {sorted(X)}",
                              open_cells=True, meta=dict(self.meta))


def validate(M: CornerManifold, X=None) -> dict:
    """Check the lattice and cell invariants; raises :class:`InputError` naming the face."""
    tops = [f for f, F in M.faces.items() if F.codim == 0]
    if len(tops) != 1:
        raise InputError(f"need exactly one codim-0 face, found {tops}")
    for c, p in M.covers:
        if c not in M.faces or p not in M.faces:
            raise InputError(f"cover ({c}, {p}) names an unknown face")
        if M.faces[c].codim != M.faces[p].codim + 1:
            raise InputError(f"cover ({c}, {p}) does not raise codimension by one")
    for f, F in M.faces.items():
        if F.codim < 0 or F.codim > M.dim:
            raise InputError(f"face {f}: codim {F.codim} out of range")
        if F.codim and not any(c == f for c, _ in M.covers):
            raise InputError(f"face {f}: no cover relation to a larger face")
        hs = M.hyperfaces_of(f)
        if not M.open_cells and len(hs) != F.codim:
            raise InputError(f"face {f}: codim {F.codim} but lies in {len(hs)} hyperfaces {hs}")
        if len(hs) > F.codim:
            raise InputError(f"face {f}: lies in too many hyperfaces {hs}")
    if M.has_cells:
        where = M.cell_face()
        for f, F in M.faces.items():
            for cid, cell in F.cells.items():
                for b in cell.get("boundary", {}):
                    if b not in where:
                        if M.open_cells:
                            continue
                        raise InputError(f"face {f}: cell {cid} has unknown boundary cell {b}")
                    if where[b] not in M.below(f):
                        raise InputError(f"face {f}: boundary of cell {cid} leaves the closed face")
                    if M.faces[where[b]].cells[b]["dim"] != cell["dim"] - 1:
                        raise InputError(f"face {f}: boundary cell {b} has the wrong dimension")
        cell_complex(M)  # d o d = 0
    if X is not None:
        check_closed(M, X)
    return {"valid": True, "faces": len(M.faces), "hyperfaces": M.hyperfaces}


def check_closed(M: CornerManifold, X):
    X = set(X)
    for f in X:
        if f not in M.faces:
            raise InputError(f"X names unknown face {f}")
        missing = M.below(f) - X
        if missing:
            raise InputError(f"X is not closed: face {f} needs {sorted(missing)}")


def _cells_sorted(M: CornerManifold):
    where = M.cell_face()
    cells = {}
    for fid, F in M.faces.items():
        for cid, cell in F.cells.items():
            cells[cid] = (int(cell["dim"]), fid, cell.get("boundary", {}))
    return cells, where


def cell_complex(M: CornerManifold, faces=None) -> ChainComplex:
    """Cellular chain complex of ``M`` (or of the cells in ``faces``)."""
    if not M.has_cells:
        raise InputError(f"manifold {M.name!r} has faces without cell data")
    cells, _ = _cells_sorted(M)
    keep = {c for c, (_, f, _) in cells.items() if faces is None or f in faces}
    by_dim = {}
    for c in sorted(keep):
        by_dim.setdefault(cells[c][0], []).append(c)
    return _complex_from(by_dim, lambda c: cells[c][2], M.dim)


def _complex_from(by_dim: dict, boundary, top: int) -> ChainComplex:
    idx = {q: {c: i for i, c in enumerate(cs)} for q, cs in by_dim.items()}
    dims = {q: len(by_dim.get(q, [])) for q in range(top + 1)}
    diff = {}
    for q in range(1, top + 1):
        e = {}
        for j, c in enumerate(by_dim.get(q, [])):
            for b, s in boundary(c).items():
                i = idx.get(q - 1, {}).get(b)
                if i is not None and s:
                    e[(i, j)] = e.get((i, j), 0) + mpq(s)
        diff[q] = SparseMat(dims[q - 1], dims[q], e)
    c = ChainComplex(dims, diff)
    c.cells = by_dim
    return c


def face_betti(M: CornerManifold, fid) -> list:
    F = M.faces[fid]
    if F.betti is not None:
        return list(F.betti)
    if F.cells is None:
        raise InputError(f"face {fid}: neither betti numbers nor cells")
    h = homology_dims(cell_complex(M, M.below(fid)))
    top = max((q for q, d in h.items() if d), default=0)
    return [h[q] for q in range(top + 1)]


def laurent_cohomology_formula(M: CornerManifold) -> dict:
    """``H^k = sum_{j <= k} sum_{codim F = j} b^{k-j}(F)``."""
    out = {k: 0 for k in range(M.dim + 1)}
    for fid, F in M.faces.items():
        b = face_betti(M, fid)
        for i, x in enumerate(b):
            k = i + F.codim
            if k > M.dim:
                if x:
                    raise InputError(f"face {fid}: betti number in degree {i} exceeds the face dimension")
                continue
            out[k] += x
    return out


def minimal_faces(M: CornerManifold) -> dict:
    mins = sorted(f for f in M.faces if M.below(f) == {f})
    return {"faces": mins, "count": len(mins)}


# -- the glued space ----------------------------------------------------------

@dataclass
class GluedSpace:
    complex: ChainComplex
    cells: dict          # degree -> list of (sigma, S)
    provenance: dict     # (sigma, S) -> (face, S)
    projection: dict     # (sigma, S) -> sigma
    base: CornerManifold

    def preimage(self, X) -> set:
        X = set(X)
        return {c for c, (f, _) in self.provenance.items() if f in X}


def build_L(M: CornerManifold) -> GluedSpace:
    if not M.has_cells:
        raise InputError(f"manifold {M.name!r} needs cell data to build L(M)")
    cells, where = _cells_sorted(M)
    by_dim: dict = {}
    prov = {}
    for cid in sorted(cells):
        d, fid, _ = cells[cid]
        hs = M.hyperfaces_of(fid)
        for r in range(len(hs) + 1):
            for S in itertools.combinations(hs, r):
                key = (cid, S)
                by_dim.setdefault(d + r, []).append(key)
                prov[key] = (fid, S)

    def boundary(key):
        cid, S = key
        return {(b, S): s for b, s in cells[cid][2].items() if b in cells}

    top = max(by_dim) if by_dim else 0
    cx = _complex_from(by_dim, boundary, max(top, M.dim))
    return GluedSpace(cx, by_dim, prov, {k: k[0] for k in prov}, M)


def _sub_and_quotient(c: ChainComplex, keep_sub):
    """Inclusion of the subcomplex on ``keep_sub`` cells and projection to the quotient."""
    sub_cells = {q: [x for x in cs if x in keep_sub] for q, cs in c.cells.items()}
    quo_cells = {q: [x for x in cs if x not in keep_sub] for q, cs in c.cells.items()}
    top = c.hi
    pos = {q: {x: i for i, x in enumerate(cs)} for q, cs in c.cells.items()}

    def restrict(cellsets):
        idx = {q: [pos[q][x] for x in cs] for q, cs in cellsets.items()}
        diff = {}
        for q in range(1, top + 1):
            diff[q] = c.d(q).submatrix(idx.get(q - 1, []), idx.get(q, []))
        out = ChainComplex({q: len(idx.get(q, [])) for q in range(c.lo, top + 1)}, diff)
        out.cells = cellsets
        return out, idx

    sub, sidx = restrict(sub_cells)
    # the subcomplex must be closed under the boundary
    for q in range(1, top + 1):
        sset, src = set(sidx.get(q - 1, [])), set(sidx.get(q, []))
        for (i, j), _ in c.d(q).entries.items():
            if j in src and i not in sset:
                raise InputError("relative cells do not form a subcomplex")
    quo, qidx = restrict(quo_cells)
    incl = ChainMap(sub, c, {q: SparseMat(c.dim(q), sub.dim(q), {(r, a): 1 for a, r in enumerate(sidx.get(q, []))})
                             for q in range(c.lo, top + 1)})
    proj = ChainMap(c, quo, {q: SparseMat(quo.dim(q), c.dim(q), {(a, r): 1 for a, r in enumerate(qidx.get(q, []))})
                             for q in range(c.lo, top + 1)})
    return sub, quo, incl, proj


def cellular_cohomology(G, rel=None) -> dict:
    """Cohomology dims of ``G`` (a :class:`GluedSpace` or chain complex with cells).

    With ``rel`` (face ids, or a set of cells) the pair cohomology
    ``H^*(G, p^{-1}(rel))`` is returned, i.e. compactly supported cohomology of
    the complement.
    """
    c = G.complex if isinstance(G, GluedSpace) else G
    if rel is None:
        return homology_dims(c.dual())
    cells = G.preimage(rel) if isinstance(G, GluedSpace) and not _is_cellset(rel) else set(rel)
    _, quo, _, _ = _sub_and_quotient(c, cells)
    return homology_dims(quo.dual())


def _is_cellset(rel):
    return any(isinstance(x, tuple) for x in rel)


def pair_sequence(G, rel):
    """Long exact homology sequence of the pair (dims equal cohomology dims)."""
    c = G.complex if isinstance(G, GluedSpace) else G
    cells = G.preimage(rel) if isinstance(G, GluedSpace) and not _is_cellset(rel) else set(rel)
    sub, quo, incl, proj = _sub_and_quotient(c, cells)
    return les_of_ses(incl, proj)


def circle_product(c: ChainComplex) -> ChainComplex:
    """Cellular ``c x S^1`` with the minimal circle (cells ``x*0`` and ``x*1``)."""
    cells = {}
    for q in range(c.lo, c.hi + 2):
        cells[q] = [(x, 0) for x in c.cells.get(q, [])] + [(x, 1) for x in c.cells.get(q - 1, [])]
    pos = {q: {x: i for i, x in enumerate(cs)} for q, cs in c.cells.items()}
    deg = {x: q for q, cs in c.cells.items() for x in cs}
    cols = {q: c.d(q)._cols_cache() for q in c.cells}

    def boundary(key):
        x, e = key
        q = deg[x]
        if q - 1 < c.lo:
            return {}
        col = cols[q].get(pos[q][x], {})
        return {(c.cells[q - 1][i], e): v for i, v in col.items()}

    out = _complex_from({q: cs for q, cs in cells.items() if cs}, boundary, c.hi + 1)
    return out


def product_manifold(A: CornerManifold, B: CornerManifold, name: str = "") -> CornerManifold:
    """Product of two manifolds with corners with product cells."""
    faces = {}
    for fa, Fa in A.faces.items():
        for fb, Fb in B.faces.items():
            fid = f"{fa}*{fb}"
            cells = None
            if Fa.cells is not None and Fb.cells is not None:
                cells = {}
                for ca, xa in Fa.cells.items():
                    for cb, xb in Fb.cells.items():
                        bd = {}
                        for b, s in xa.get("boundary", {}).items():
                            bd[f"{b}*{cb}"] = s
                        sign = -1 if xa["dim"] % 2 else 1
                        for b, s in xb.get("boundary", {}).items():
                            bd[f"{ca}*{b}"] = sign * s
                        cells[f"{ca}*{cb}"] = {"dim": xa["dim"] + xb["dim"], "boundary": bd}
            betti = None
            if Fa.betti is not None and Fb.betti is not None:
                betti = [0] * (len(Fa.betti) + len(Fb.betti) - 1)
                for i, x in enumerate(Fa.betti):
                    for j, y in enumerate(Fb.betti):
                        betti[i + j] += x * y
            faces[fid] = Face(fid, Fa.codim + Fb.codim, cells, betti, Fa.orientable and Fb.orientable)
    covers = []
    for c, p in A.covers:
        for fb in B.faces:
            covers.append((f"{c}*{fb}", f"{p}*{fb}"))
    for c, p in B.covers:
        for fa in A.faces:
            covers.append((f"{fa}*{c}", f"{fa}*{p}"))
    return CornerManifold(A.dim + B.dim, faces, covers, name=name or f"{A.name}x{B.name}")
