"""
A pair of Bellman equations
===========================

q_i(x) = sup_y { g(x, y) + G_i(x, y, q_i(tau(x, y))) } solved by successive
approximation on a 201 x 201 grid.  With g = xy, G = z/2 and tau = xy the
exact solution is q(x) = 2x.
"""

import numpy as np

from hybridfp import DPInstance, PhiFunction, check_solution, solve_successive, theta, verify_hypothesis1

inst = DPInstance((0, 1), (0, 1), "x*y", "z/2", "z/2", "x*y")
sol = solve_successive(inst, 1, tol=1e-8)
print(f"{sol.iterations} iterations, residual {sol.residual:.3g}")
print("error vs 2x:", np.max(np.abs(sol.h - 2 * inst.xs)))
print("largest contraction ratio:", sol.contraction_ratios().max())
print("snap error of tau:", inst.snap_error)
print("a-posteriori checks:", check_solution(inst, sol.h))

# Theta compares operator images; the bound on G1 - G2 is sampled
h, k = np.ones(inst.n_states), np.zeros(inst.n_states)
print("Theta(1, 0) =", theta(h, k, inst))
two = DPInstance((0, 1), (0, 1), "0", "z/2", "z/3", "x*y", n_W=51, n_D=51)
rep = verify_hypothesis1(two, np.log(2), PhiFunction.linear(0.9), n_samples=20)
print(f"G1 = z/2, G2 = z/3: {rep.verdict}, {len(rep.violations)} of 20 samples violate")
