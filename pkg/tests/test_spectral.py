import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from cornerhom.complexes import ChainComplex, ChainMap, homology_dims
from cornerhom.errors import InputError
from cornerhom.evaluator import build_symbol_model
from cornerhom.hochschild import hochschild_complex
from cornerhom.qlinalg import SparseMat, rank
from cornerhom.spectral import (FilteredComplex, Tower, converge, exact_limp_check, ml_pattern_check, page,
                                page_dims, quotient_tower, random_filtered_complex, tower_limits)


def _target(key, r):
    k, h = key
    return (k - r, h + r - 1)


def _check_pages(f, rmax):
    for r in range(rmax + 1):
        pg = page(f, r)
        assert pg.dims() == page_dims(f, r)
        nxt = page_dims(f, r + 1)
        for key, d in pg.differentials.items():
            tgt = pg.differentials.get(_target(key, r))
            if tgt is not None and d.cols and tgt.cols:
                assert (tgt @ d).is_zero()
        for key, dim in pg.dims().items():
            out = pg.differentials.get(key)
            r_out = rank(out) if out is not None else 0
            src = (key[0] + r, key[1] - r + 1)
            inc = pg.differentials.get(src)
            r_in = rank(inc) if inc is not None else 0
            assert nxt.get(key, 0) == dim - r_out - r_in


def test_single_level_page_one_is_homology():
    c = ChainComplex({0: 2, 1: 1}, {1: SparseMat(2, 1, {(0, 0): 1})})
    f = FilteredComplex(c, {0: [0, 0], 1: [0]})
    assert page_dims(f, 1) == {(0, 0): 1, (0, 1): 0}


def test_split_cone_dies_on_page_two():
    c = ChainComplex({0: 1, 1: 1}, {1: SparseMat.identity(1)})
    f = FilteredComplex(c, {0: [0], 1: [1]})
    p1 = page_dims(f, 1)
    assert p1[(0, 0)] == 1 and p1[(1, 0)] == 1
    assert not any(page_dims(f, 2).values())


def test_level_raising_rejected():
    c = ChainComplex({0: 1, 1: 1}, {1: SparseMat.identity(1)})
    with pytest.raises(InputError):
        FilteredComplex(c, {0: [2], 1: [1]})


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_convergence_random(seed):
    f = random_filtered_complex(random.Random(seed), max_dim=5, levels=3)
    rep = converge(f)
    assert rep.ok
    assert rep.totals == homology_dims(f.c)


@pytest.mark.parametrize("seed", range(8))
def test_page_routes_agree(seed):
    f = random_filtered_complex(random.Random(seed), max_dim=4, levels=4)
    _check_pages(f, 4)


def test_s1_page_one_is_hh_of_graded():
    lo, hi, J, W = -2, 2, 2, 2
    f = hochschild_complex(build_symbol_model((lo, hi), J, W), 0, 3, normalized=True)
    e1 = page_dims(f, 1)
    for k in range(lo, hi + 1):
        g = hochschild_complex(build_symbol_model((k, k), J, W, graded=True), 0, 3, normalized=True)
        h = homology_dims(g.c)
        for q in range(3):
            assert e1.get((k, q - k), 0) == h[q], (k, q)


def test_constant_and_zero_towers():
    I2 = SparseMat.identity(2)
    assert tower_limits(Tower([2, 2, 2], [I2, I2]))["lim"] == 2
    assert tower_limits(Tower([2, 2, 2], [I2, I2]))["lim1"] == 0
    Z = SparseMat.zero(2, 2)
    r = tower_limits(Tower([2, 2, 2], [Z, Z], tail=Z))
    assert (r["lim"], r["lim1"]) == (0, 0)
    r = tower_limits(Tower([2], [], tail=I2))
    assert r["lim"] == 2


def test_ml_pattern_examples():
    I2 = SparseMat.identity(2)
    r = ml_pattern_check([2, 2, 2], [[], [], []], [I2, I2])
    assert r.holds and r.lim == 2
    basis = [{0: mpq(1)}, {1: mpq(1)}]
    Z = SparseMat.zero(2, 2)
    r = ml_pattern_check([2, 2], [basis, basis], [Z])
    assert r.holds and r.lim == 0
    bad = ml_pattern_check([2, 2], [[], basis], [I2])
    assert not bad.holds


def test_quotient_tower_of_s1_model():
    f = hochschild_complex(build_symbol_model((-3, 1), 1, 2), 0, 2, normalized=True)
    cuts = [-1, -2, -3, -4]
    t = quotient_tower(f, cuts)
    lim = {q: tower_limits(Tower([s.dim(q) for s in t.stages], [m[q] for m in t.maps]))
           for q in f.c.degrees()}
    assert all(lim[q]["lim"] == f.c.dim(q) and lim[q]["lim1"] == 0 for q in f.c.degrees())
    rep = exact_limp_check(t)
    assert rep.all_exact
    assert rep.dims["H(lim)"] == {q: homology_dims(f.c)[q] for q in rep.degrees}


def test_exact_limp_constant_tower():
    c = ChainComplex({0: 2, 1: 1}, {1: SparseMat(2, 1, {(0, 0): 1})})
    idm = ChainMap(c, c, {q: SparseMat.identity(c.dim(q)) for q in c.degrees()})
    rep = exact_limp_check(Tower([c, c, c], [idm, idm]))
    assert rep.all_exact and rep.dims["lim1"] == {0: 0, 1: 0}
    assert rep.dims["H(lim)"] == homology_dims(c)


@pytest.mark.parametrize("seed", range(10))
def test_exact_limp_random_surjective(seed):
    rng = random.Random(seed)
    f = random_filtered_complex(rng, max_dim=4, levels=4)
    rep = exact_limp_check(quotient_tower(f, [2, 1, 0, -1]))
    assert rep.all_exact


def test_non_surjective_tower_rejected():
    c = ChainComplex({0: 1})
    z = ChainComplex({0: 1})
    m = ChainMap(c, z, {0: SparseMat.zero(1, 1)})
    with pytest.raises(InputError):
        exact_limp_check(Tower([z, c], [m]))
