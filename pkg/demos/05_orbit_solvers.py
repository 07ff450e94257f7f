"""
Following orbits to fixed and coincidence points
================================================

Picard iteration for a set-valued T moves to the nearest point of T(x);
the Jungck search for a hybrid pair solves f x_{n+1} in T x_n on a grid.
"""

import numpy as np

from hybridfp import HybridPair, jungck_hybrid, parse_multi, parse_single, picard_multivalued

T = parse_multi("piecewise{ [0,1]: [x/4, x/2] }")
tr = picard_multivalued(T, 1.0, tol=1e-12)
st = tr.steps
print(f"Picard: {len(tr.iterates)} steps to {tr.point:.3g}, residual {tr.residual:.3g}")
print("step ratios:", np.round(st[1:6] / st[:5], 6))

pair = HybridPair(parse_single("piecewise{ [0,2]: 3 - x ; (2,3]: 3 }"),
                  parse_multi("piecewise{ [0,2]: [1, 2] ; (2,3]: [0, 1/2] }"))
for x0 in (0.0, 0.5, 2.5):
    tr = jungck_hybrid(pair, x0)
    print(f"Jungck from {x0}: {tr.termination} at {tr.point:.6g}, defect {tr.residual:.3g}")
