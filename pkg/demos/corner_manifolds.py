"""Faces of a manifold with corners and the cohomology of its glued space.

Run: python3 demos/corner_manifolds.py
"""

from cornerhom.corners import build_L, cellular_cohomology, laurent_cohomology_formula, minimal_faces
from cornerhom.golden import golden_manifolds

for name, M in golden_manifolds().items():
    formula = laurent_cohomology_formula(M)
    cellular = cellular_cohomology(build_L(M))
    row = [formula.get(q, 0) for q in range(M.dim + 1)]
    assert row == [cellular.get(q, 0) for q in range(M.dim + 1)]
    print(f"{name:8s} faces={len(M.faces):2d} minimal={minimal_faces(M)['count']}  H^*(L(M)) = {row}")
