"""Right-hand sides of the homology theorems for the bundled manifolds.

Run: python3 demos/theorem_tables.py
"""

from cornerhom.evaluator import cosphere_model, eval_hc, eval_hh_laurent, eval_hp, eval_quotient_and_traces
from cornerhom.golden import golden_manifolds

for name, M in golden_manifolds().items():
    cm = cosphere_model(M, {"rational_iso": True})
    hp = eval_hp(cm, "full")
    hh = eval_hh_laurent(cm)
    hc = [eval_hc(cm, (), m)["dim"] for m in range(5)]
    tr = eval_quotient_and_traces(cm)
    print(f"{name:8s} HP=({hp['even']},{hp['odd']})  HH={[hh[q] for q in sorted(hh)]}  HC_0..4={hc}"
          f"  traces={tr['trace_count']}")
