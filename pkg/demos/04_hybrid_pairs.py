"""
Properties of hybrid pairs
==========================

A hybrid pair couples a single-valued f with a set-valued T.  This script
locates coincidence and common fixed points and tests the commuting,
idempotency and limit properties for three small pairs.
"""

from hybridfp import HybridPair, pair_report, parse_multi, parse_single

pairs = [
    # three-point space
    HybridPair(parse_single("piecewise{ [1,1]: 1 ; [2,2]: 3 ; [3,3]: 2 }"),
               parse_multi("piecewise{ [1,1]: {1} ; [2,2]: {1,3} ; [3,3]: {1,3} }"), "triad"),
    # interval with a breakpoint at 2
    HybridPair(parse_single("piecewise{ [0,2]: 3 - x ; (2,3]: 3 }"),
               parse_multi("piecewise{ [0,2]: [1, 2] ; (2,3]: [0, 1/2] }"), "ramp"),
    # f jumps at 1, so its range (1, 2] is not closed
    HybridPair(parse_single("piecewise{ [0,1): 2 - x ; [1,2]: 9/5 }"),
               parse_multi("piecewise{ [0,1]: [1/2, 3/2] ; (1,2]: [1/4, 1/2] }"), "kink"),
]

for pair in pairs:
    rep = pair_report(pair)
    print(f"--- {pair.name} ({pair.space_kind})")
    print("coincidence points :", rep.coincidence)
    print("common fixed points:", rep.common_fixed)
    for name, flag in rep.flags().items():
        print(f"  {name:40s} {'not decided' if flag is None else flag}")
    if rep.ea.ea_witness is not None:
        print("  EA witness :", rep.ea.ea_witness)
    if rep.ea.clr_witness is not None:
        print("  CLR witness:", rep.ea.clr_witness)
