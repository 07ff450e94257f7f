"""
Certifying a contraction condition on a grid
============================================

The generalized F-contraction with F = ln and phi(t) = 0.9 t is checked on
every ordered pair of sample points: a uniform grid plus the breakpoints
and their immediate neighbours.
"""

from hybridfp import (
    ConditionSpec, FFunction, GridSpec, PhiFunction, certify, generalized_terms, kadelburg_comparison,
    parse_multi, parse_single,
)

f = parse_single("piecewise{ [0,2]: 3 - x ; (2,3]: 3 }")
T = parse_multi("piecewise{ [0,2]: [1, 2] ; (2,3]: [0, 1/2] }")
F, phi = FFunction.log(), PhiFunction.linear(0.9)

# First the axioms of F and phi themselves
for chk in F.check_axioms() + phi.check():
    print(f"{chk.name:28s} {chk.passed}  {chk.detail}")

# The seven terms at one pair of points
print("terms at (1, 3):", generalized_terms(1.0, 3.0, f, T))
print("Kadelburg quantities at (1, 3):", kadelburg_comparison(f, T, 1.0, 3.0))

# tau = 0.2 holds for every p tried; tau = 2 is far too strong
for tau, p in ((0.2, 1), (0.2, 2), (0.2, 3), (2.0, 1)):
    rep = certify(ConditionSpec.generalized(F, phi, tau, p), f, T, GridSpec(201))
    line = f"tau={tau} p={p}: {rep.verdict}, {rep.samples} samples, min margin {rep.min_margin:.6g}"
    if rep.violations:
        v = rep.violations[0]
        line += f", first witness ({v.x!r}, {v.y!r})"
    print(line)
