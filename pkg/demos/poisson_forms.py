"""The Poisson differential and the symplectic star on a corner patch.

Run: python3 demos/poisson_forms.py
"""

import random

from cornerhom.poisson import LaurentForm, Patch, delta, exterior_d, hodge_star, random_monomial_form, verify_identities

p = Patch(1, 1, (2,))  # one boundary coordinate x with x^2 d/dx
f = LaurentForm.monomial(p, (1, 2), wedge=(0,))
print("f         =", f)
print("delta f   =", delta(f))
print("*f        =", hodge_star(f))
print("*delta* f =", hodge_star(delta(hodge_star(f))), " d f =", exterior_d(f))

rng = random.Random(0)
q = Patch(2, 1, (1,))
print(verify_identities(q, [random_monomial_form(rng, q) for _ in range(50)]))
