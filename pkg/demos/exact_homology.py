"""Exact rational homology of a small complex and the Hochschild homology of Q[x, 1/x].

Run: python3 demos/exact_homology.py
"""

from cornerhom.complexes import ChainComplex, homology, homology_dims
from cornerhom.hochschild import hochschild_complex, laurent_algebra
from cornerhom.qlinalg import SparseMat, decompose

# boundary of a triangle: three edges, three vertices
d1 = SparseMat.from_dense([[-1, 0, 1], [1, -1, 0], [0, 1, -1]])
print("rank of the triangle boundary:", decompose(d1)["rank"])
c = ChainComplex({0: 3, 1: 3}, {1: d1})
print("H_0, H_1 of the triangle:", homology(c, 0)["dim"], homology(c, 1)["dim"])

# HKR at desk scale: one function and one 1-form in every weight
for w in (-3, 0, 2):
    h = homology_dims(hochschild_complex(laurent_algebra(4, w), w, 3).c)
    print(f"HH_q(Q[x,1/x]) in weight {w:2d}:", [h[q] for q in range(3)])
