"""
Piecewise maps from text
========================

Single-valued and set-valued maps are written as piecewise expressions
with open or closed interval conditions.
"""

from hybridfp import parse_multi, parse_single

f = parse_single("piecewise{ [0,2]: 3 - x ; (2,3]: 3 }")
T = parse_multi("piecewise{ [0,2]: [1, 2] ; (2,3]: [0, 1/2] }")

# Evaluation picks the piece whose condition holds
for x in (0.0, 1.5, 2.0, 2.5):
    print(f"f({x}) = {f(x)}   T({x}) = {T(x)}")

# One-sided limits matter at the breakpoint x = 2
lim = T.limits(2.0)
print("T near 2: left", lim.left, " at", lim.at, " right", lim.right)

# A gap between closed conditions gives a disconnected (here finite) domain
g = parse_single("piecewise{ [1,1]: 1 ; [2,2]: 3 ; [3,3]: 2 }")
print("finite domain:", g.domain)

# Bad input is reported with a position
try:
    parse_single("piecewise{ [0,1]: x + }")
except Exception as exc:
    print(type(exc).__name__, "-", exc)
