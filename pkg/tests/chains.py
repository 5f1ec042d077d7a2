"""Random chains and the algebra zoo shared by the operator tests."""

import random

from gmpy2 import mpq

from cornerhom.evaluator import build_symbol_model
from cornerhom.hochschild import (HochschildChain, apply_operator, circle_ring, ground_field, laurent_algebra,
                                  polynomial_algebra, random_unital_algebra)


def algebra_zoo(rng: random.Random) -> list:
    """Unital algebras whose stored product is exactly associative."""
    return [
        ("Q", ground_field(), 1),
        ("Q[x]", polynomial_algebra(12), 2),
        ("Q[x,1/x]", laurent_algebra(4), 2),
        ("circle ring", circle_ring(3), 1),
        ("random 3-dim", random_unital_algebra(rng), None),
        ("S1 symbols, order <= 0", build_symbol_model((-3, 0), W=2, order_zero=True), None),
    ]


def random_chain(A, rng: random.Random, q: int, key_bound=None, terms: int = 3) -> HochschildChain:
    keys = list(A.basis)
    if key_bound is not None:
        keys = [k for k in keys if abs(A.w(k)) <= key_bound]
    out = {}
    for _ in range(rng.randint(1, terms)):
        t = tuple(rng.choice(keys) for _ in range(q + 1))
        out[t] = out.get(t, 0) + mpq(rng.randint(-3, 3), rng.randint(1, 3))
    return HochschildChain(q, {t: v for t, v in out.items() if v})


def identity_failures(A, c: HochschildChain) -> list:
    """Names of the violated operator identities on ``c``."""
    def op(name, x):
        return apply_operator(name, A, x)

    bad = []
    if c.degree >= 2 and not op("b", op("b", c)).is_zero():
        bad.append("b^2")
    if c.degree >= 2 and not op("b'", op("b'", c)).is_zero():
        bad.append("b'^2")
    if A.unital:
        if not op("B", op("B", c)).is_zero():
            bad.append("B^2")
        anti = op("b", op("B", c))
        if c.degree >= 1:
            anti = anti + op("B", op("b", c))
        if not anti.is_zero():
            bad.append("bB+Bb")
    return bad
