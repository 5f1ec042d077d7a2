from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from cornerhom.qlinalg import (I, NOT_IN_IMAGE, QI, SparseMat, Solver, decompose, rank, reduce_low_pivots,
                               solve)
from oracles import frac_rank

small = st.integers(-3, 3)


def mat(rows):
    return SparseMat.from_dense(rows)


def test_gaussian_unit():
    assert I * I == -1
    assert (QI(1, 2) * QI(1, -2)) == 5
    assert QI(3, 4) / QI(3, 4) == 1
    assert mpq(1, 2) + I == QI(mpq(1, 2), 1)


def test_identity_decompose():
    d = decompose(SparseMat.identity(2))
    assert d["rank"] == 2 and d["kernel_basis"] == []


def test_proportional_rows():
    m = mat([[1, 2], [2, 4]])
    d = decompose(m)
    assert d["rank"] == 1
    (k,) = d["kernel_basis"]
    assert m.matvec(k) == {}
    assert k.get(0, 0) * 1 == -2 * k.get(1, 0) * 1 or k.get(0, 0) == -2 * k.get(1, 0)


def test_solve_examples():
    assert solve(SparseMat.identity(2), [3, 5]) == {0: 3, 1: 5}
    m = mat([[1, 2], [2, 4]])
    x = solve(m, [1, 2])
    assert x.get(0, 0) + 2 * x.get(1, 0) == 1
    assert solve(m, [1, 1]) is NOT_IN_IMAGE


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_rank_matches_fraction_oracle(r, c, data):
    rows = [[data.draw(small) for _ in range(c)] for _ in range(r)]
    m = mat(rows)
    assert rank(m) == frac_rank(rows) == decompose(m)["rank"]
    assert len(reduce_low_pivots(m.col_dicts())) == frac_rank(rows)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_solver_round_trip(r, c, data):
    rows = [[data.draw(small) for _ in range(c)] for _ in range(r)]
    m = mat(rows)
    x = {j: mpq(data.draw(small)) for j in range(c)}
    v = m.matvec(x)
    y = Solver(m)(v)
    assert y is not NOT_IN_IMAGE and m.matvec(y) == v
    assert m.matvec(solve(m, v)) == v
    for k in decompose(m)["kernel_basis"]:
        assert m.matvec(k) == {}


def test_matrix_algebra():
    a = mat([[1, 2], [0, 1]])
    b = mat([[0, 1], [1, 0]])
    assert (a @ b).to_dense() == [[2, 1], [1, 0]]
    assert (a - a).is_zero()
    assert a.T.to_dense() == [[1, 0], [2, 1]]
    blk = SparseMat.block([[a, None], [None, b]], [2, 2], [2, 2])
    assert rank(blk) == 4 and blk.shape == (4, 4)
