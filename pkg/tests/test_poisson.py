import random

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from cornerhom.errors import InputError
from cornerhom.poisson import (LaurentForm, Patch, delta, duality_check, exterior_d, homogeneous_poisson_homology,
                               hodge_star, poisson_bracket, random_monomial_form, verify_identities)
from oracles import X, XI, koszul_delta_1d

P10 = Patch(1, 0)


def mono(p, **kw):
    wedge = kw.pop("wedge", ())
    coeff = kw.pop("coeff", 1)
    return LaurentForm.monomial(p, wedge=wedge, coeff=coeff, **kw)


def to_sympy(f: LaurentForm) -> dict:
    out = {}
    for (e, _, W), c in f.terms.items():
        expr = sp.Rational(int(c.numerator), int(c.denominator)) * X ** e[0] * XI ** e[1]
        out[W] = sp.expand(out.get(W, 0) + expr)
    return {k: v for k, v in out.items() if v != 0}


def test_exterior_d_examples():
    p = Patch(1, 1)
    assert exterior_d(mono(p, x=(-1,))) == mono(p, x=(-2,), wedge=(0,), coeff=-1)
    assert exterior_d(mono(p, x=(-1,), wedge=(0,))).is_zero()
    q = Patch(1, 0)
    f = mono(q, y=(1,), xi=(1,))
    assert exterior_d(f) == mono(q, y=(1,), wedge=(1,)) + mono(q, xi=(1,), wedge=(0,))


def test_delta_examples():
    assert delta(mono(P10, xi=(1,), wedge=(0,))) == mono(P10)
    p1 = Patch(1, 1, (1,))
    assert delta(mono(p1, xi=(1,), wedge=(0,))) == mono(p1, x=(1,))
    p2 = Patch(1, 1, (2,))
    # Koszul expansion gives -d{x, xi} = +2x dx with this sign convention
    assert delta(mono(p2, wedge=(0, 1)), route="both") == mono(p2, x=(1,), wedge=(0,), coeff=2)


def test_bracket_convention():
    p2 = Patch(1, 1, (2,))
    assert poisson_bracket(mono(p2, x=(1,)), mono(p2, xi=(1,))) == mono(p2, x=(2,), coeff=-1)
    assert poisson_bracket(mono(P10, xi=(1,)), mono(P10, y=(1,))) == mono(P10)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 2), st.integers(1, 2),
       st.lists(st.tuples(st.integers(-2, 2), st.integers(0, 2)), min_size=2, max_size=3))
def test_delta_matches_koszul_oracle(c, _, exps):
    p = Patch(1, 1, (c,))
    fs = [mono(p, x=(a,), xi=(b,)) for a, b in exps]
    form = fs[0]
    for g in fs[1:]:
        form = form.wedge(exterior_d(g))
    got = to_sympy(delta(form))
    want = koszul_delta_1d([X ** a * XI ** b for a, b in exps], X ** c)
    assert {k: sp.simplify(v) for k, v in got.items()} == {k: sp.simplify(v) for k, v in want.items()}


@pytest.mark.parametrize("c", [1, 2])
def test_star_on_functions_and_top_forms(c):
    p = Patch(1, 1, (c,))
    f = mono(p, x=(3,))
    s = hodge_star(f)
    assert s in (mono(p, x=(3 - c,), wedge=(0, 1)), mono(p, x=(3 - c,), wedge=(0, 1), coeff=-1))
    t = hodge_star(mono(p, x=(3,), wedge=(0, 1)))
    assert t in (mono(p, x=(3 + c,)), mono(p, x=(3 + c,), coeff=-1))


def test_star_involution_example():
    f = mono(P10, xi=(1,), wedge=(0,))
    assert hodge_star(hodge_star(f)) == f


def test_zero_form_identities():
    assert verify_identities(Patch(2, 1), [LaurentForm.zero(Patch(2, 1))])["ok"]


def test_delta_squared_example():
    p = Patch(2, 1, (1,))
    f = LaurentForm.monomial(p, x=(-3,), xi=(0, 2), wedge=(1, 3))
    assert delta(delta(f)).is_zero()


@pytest.mark.parametrize("n,k,c", [(1, 0, 1), (1, 1, 1), (1, 1, 2), (2, 1, 2), (2, 2, 1), (3, 2, 2), (3, 0, 1)])
def test_random_identities(n, k, c):
    rng = random.Random(n * 100 + k * 10 + c)
    p = Patch(n, k, (c,) * k)
    sample = [random_monomial_form(rng, p) for _ in range(20)]
    assert verify_identities(p, sample)["checked"] == 20


def test_fourier_only_on_y():
    with pytest.raises(InputError):
        LaurentForm.monomial(Patch(1, 1), exps=(0, 0), fourier=(1, 0))


def test_empty_sector():
    r = homogeneous_poisson_homology(P10, 0, -1)
    assert r["dim"] == 0


@pytest.mark.parametrize("p,q,h", [(Patch(1, 0), 2, 2), (Patch(1, 0), 1, 1), (Patch(1, 1, (1,)), 1, 1),
                                   (Patch(1, 1, (1,)), 0, 0), (Patch(1, 1, (2,)), 2, 1)])
def test_duality(p, q, h):
    r = duality_check(p, q, h)
    assert r["agree"] and r["delta_homology"] == r["d_cohomology"]
