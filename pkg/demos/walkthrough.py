"""
Behavioural distance and its logic on small systems
===================================================

Run from the repository root with ``python3 demos/walkthrough.py``.
"""
from fractions import Fraction
from pathlib import Path

from qkant import behavioural_distance, build_lifting
from qkant.behaviour import bisimilarity_oracle
from qkant.logic import (default_modalities, eval_formula, expressivity_report, logical_distance,
                         parse_formula)
from qkant.serialization import load_system_file

SPECS = Path(__file__).resolve().parent / "specs"

# A live state that can step into a deadlock. Over bool2 the distance is a
# preorder: "dead" is simulated by "live" but not the other way round.
spec = load_system_file(SPECS / "deadlock.json")
sim = build_lifting("kantorovich:dia", spec.functor, spec.quantale)
print("simulation preorder")
print(behavioural_distance(spec.coalgebra, sim).to_csv())

# The classic coffee machines. Symmetrising the lifting gives bisimilarity,
# and the fixpoint agrees with partition refinement.
spec = load_system_file(SPECS / "coffee.json")
c = spec.coalgebra
bisim = build_lifting(spec.lifting, spec.functor, spec.quantale, c.labels)
bd = behavioural_distance(c, bisim)
print("p0 ~ q0 ?", bd("p0", "q0"))
print("classes:", sorted(sorted(b) for b in bisimilarity_oracle(c)))

# A probabilistic chain over [0,1] with truncated subtraction. States s and t
# stop eventually but at different rates; their distance solves
# d = d/3 + 1/6, so it is 1/4.
spec = load_system_file(SPECS / "chain.json")
c = spec.coalgebra
L = build_lifting("sym∘kantorovich:E", spec.functor, spec.quantale)
bd = behavioural_distance(c, L, epsilon=Fraction(1, 10**6), record=True)
for k in (1, 2, 5, len(bd.history) - 1):
    print(f"iterate {k:>3}: d(s,t) = {float(bd.history[k][0][1]):.6f}")
print(bd.note, "after", bd.iterations, "iterations")

# Formulas are evaluated as distances too: E(stop) is the probability of not
# stopping in the next step.
reg = default_modalities(spec.functor, spec.quantale)
print({x: str(v) for x, v in eval_formula(parse_formula("E(stop)"), c, reg).as_dict().items()})

# Logical distance grows towards the behavioural distance as formulas get
# deeper. The gap column shrinks and never goes negative.
ld = logical_distance(c, reg, 2)
print("ld at depth 2:", ld("s", "t"), f"({ld.formulas} formulas)")
print(expressivity_report(c, L, reg, [0, 1, 2, 3], bd=bd).table())
