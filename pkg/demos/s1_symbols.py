"""Hochschild homology of the S^1 symbol algebra through its spectral sequence.

The order filtration gives E^1 = HH of the graded algebra, E^2 = Poisson
homology, and the sequence stops at E^2.  Takes a few seconds.

Run: python3 demos/s1_symbols.py
"""

from cornerhom.evaluator import d1_check, e2_vs_poisson, s1_hh, symbol_product

print("(e^{ix} xi) o e^{-ix} =", symbol_product((1, 1), (-1, 0)))
print("d1 against -i delta:", d1_check(20, seed=1)["ok"])

r = s1_hh((-2, 2), 2, 4)
print("HH_q, q = 0, 1, 2:", [r["dims"][q] for q in range(3)])
print("degenerates at page", r["degeneration_page"])
print("E^2 matches Poisson homology:", e2_vs_poisson(r)["ok"])
