"""
A Volterra integral inclusion
=============================

x(t) in q(t) + int_0^sigma(t) k(t, s) F(s, x(s)) ds on [0, 1].  With a
singleton F = {x} and q = k = 1 the solution is e^t, which measures the
trapezoid error; with an interval F the selection rule picks a solution.
"""

import numpy as np

from hybridfp import InclusionInstance, check_bracket, kernel_tau, solve_inclusion

errs = []
for n in (250, 500, 1000, 2000):
    inst = InclusionInstance("1", "1", "t", "{x}", n=n)
    sol = solve_inclusion(inst)
    errs.append(np.max(np.abs(sol.x - np.exp(inst.t))))
    print(f"n={n:5d}  iterations {sol.iterations}  error {errs[-1]:.3g}")
print("refinement ratios:", np.round(np.array(errs[:-1]) / errs[1:], 3))

# Bracket check: a = 1 is a lower solution, b = 3 fails past t = 2/3
inst = InclusionInstance("1", "1", "t", "{x}", n=300)
rep = check_bracket(np.ones(301), np.full(301, 3.0), inst)
print("lower holds:", rep.lower_holds, " upper fails from t =", min(rep.upper_violations))

# Different selections from F = [x/2, x] give different solutions
inst = InclusionInstance("1", "1/2", "t", "[x/2, x]", n=1000)
print("kernel tau:", kernel_tau(inst))
for rule in ("lower-end", "midpoint", "upper-end", "nearest-to-current"):
    print(f"{rule:20s} x(1) = {solve_inclusion(inst, rule).x[-1]:.6f}")
