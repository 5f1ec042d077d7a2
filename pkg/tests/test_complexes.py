import random

import pytest

from cornerhom.complexes import (ChainComplex, ChainMap, MixedComplex, compose_check, cyclic_total,
                                 homology, homology_dims, identity_map, les_of_ses, sbi_report)
from cornerhom.corners import _sub_and_quotient, build_L, cellular_cohomology
from cornerhom.errors import InputError
from cornerhom.golden import golden_manifolds
from cornerhom.hochschild import ground_field, mixed_complex, random_unital_algebra
from cornerhom.qlinalg import SparseMat, rank
from oracles import ground_field_hc


def test_zero_differentials():
    assert homology_dims(ChainComplex({0: 1, 1: 1})) == {0: 1, 1: 1}


def test_acyclic_cone():
    c = ChainComplex({0: 1, 1: 1}, {1: SparseMat.identity(1)})
    assert homology_dims(c) == {0: 0, 1: 0}


def test_d_squared_checked():
    with pytest.raises(InputError):
        ChainComplex({0: 1, 1: 1, 2: 1}, {1: SparseMat.identity(1), 2: SparseMat.identity(1)})


def test_polynomial_de_rham_truncated():
    # d: x^k -> k x^{k-1} dx on polynomials of degree <= 6, as a cochain complex
    e = {(k - 1, k): k for k in range(1, 7)}
    c = ChainComplex({0: 7, 1: 6}, {0: SparseMat(6, 7, e)}, cochain=True)
    assert homology_dims(c) == {0: 1, 1: 0}
    assert homology(c, 0)["representatives"] == [{0: 1}]


def _split(dA, dC):
    """``0 -> A -> A (+) C -> C -> 0`` with zero differentials."""
    A, C = ChainComplex(dA), ChainComplex(dC)
    B = ChainComplex({q: dA.get(q, 0) + dC.get(q, 0) for q in set(dA) | set(dC)})
    inc = {q: SparseMat(B.dim(q), A.dim(q), {(i, i): 1 for i in range(A.dim(q))}) for q in B.degrees()}
    pr = {q: SparseMat(C.dim(q), B.dim(q), {(i, A.dim(q) + i): 1 for i in range(C.dim(q))}) for q in B.degrees()}
    return ChainMap(A, B, inc), ChainMap(B, C, pr)


def test_split_sequence_connecting_zero():
    i, p = _split({0: 1, 1: 2}, {0: 2, 1: 1})
    rep = les_of_ses(i, p)
    assert rep.all_exact
    assert all(m.is_zero() for k, m in rep.maps.items() if k[0] == "delta")


def test_zero_sub_connecting_iso():
    i, p = _split({0: 0, 1: 0}, {0: 2, 1: 1})
    rep = les_of_ses(i, p)
    assert rep.dims["B"] == rep.dims["C"]
    assert all(rank(rep.maps[("p", q)]) == rep.dims["C"][q] for q in rep.degrees)


def test_pair_sequence_square_vertex():
    sq = golden_manifolds()["square"]
    G = build_L(sq)
    vertex = next(f for f in sq.faces if sq.below(f) == {f})
    pre = G.preimage([vertex])
    _, _, incl, proj = _sub_and_quotient(G.complex, pre)
    rep = les_of_ses(incl, proj)
    assert rep.all_exact
    rel = cellular_cohomology(G, [vertex])
    assert rep.dims["C"] == {q: rel[q] for q in rep.degrees}


def test_compose_identity():
    c = ChainComplex({0: 2, 1: 1}, {1: SparseMat(2, 1, {(0, 0): 1})})
    idm = identity_map(c)
    comp = compose_check(idm, idm)
    assert all(comp[q] == SparseMat.identity(c.dim(q)) for q in c.degrees())


def test_cyclic_with_zero_B():
    dims = {0: 2, 1: 3, 2: 1, 3: 2}
    m = MixedComplex(dims, {}, {})
    ct = cyclic_total(m, 3)
    h = homology_dims(ct.complex)
    assert h == {n: sum(dims[n - 2 * k] for k in range(n // 2 + 1)) for n in range(4)}


def test_ground_field_cyclic():
    m = mixed_complex(ground_field(), 0, 5)
    h = homology_dims(cyclic_total(m, 4).complex)
    assert [h[n] for n in range(4)] == [ground_field_hc(n) for n in range(4)]
    rep = sbi_report(m, 3)
    assert rep.all_exact
    ct = cyclic_total(m, 4)
    assert rank(ct.S.on_homology(2)) == 1


def test_zero_mixed_complex_sbi():
    m = MixedComplex({q: 0 for q in range(5)}, {}, {})
    assert sbi_report(m, 3).all_exact


@pytest.mark.parametrize("seed", range(6))
def test_sbi_random_algebras(seed):
    A = random_unital_algebra(random.Random(seed))
    m = mixed_complex(A, 0, 5)
    assert sbi_report(m, 4).all_exact
