"""Independent reference computations used by the tests.

Nothing here imports the endpoint/gap-midpoint candidate logic; values come
from brute force over explicit point lists or dense discretizations.
"""

import itertools
import math

import numpy as np


def finite_hausdorff(a, b):
    """Exhaustive max-min over all point pairs of two finite sets."""
    ab = max(min(abs(x - y) for y in b) for x in a)
    ba = max(min(abs(x - y) for x in a) for y in b)
    return max(ab, ba)


def discretize(pieces, n=1_000_000):
    """Dense sample of a union of closed intervals, endpoints included."""
    total = sum(hi - lo for lo, hi in pieces) or 1.0
    out = []
    for lo, hi in pieces:
        k = max(2, int(n * (hi - lo) / total)) if hi > lo else 1
        out.append(np.linspace(lo, hi, k))
    return np.concatenate(out)


def dense_point_distance(x, pieces, n=1_000_000):
    return float(np.min(np.abs(discretize(pieces, n) - x)))


def dense_hausdorff(pa, pb, n=20_000):
    a, b = discretize(pa, n), discretize(pb, n)
    d_ab = np.max(np.min(np.abs(a[:, None] - b[None, :]), axis=1))
    d_ba = np.max(np.min(np.abs(b[:, None] - a[None, :]), axis=1))
    return float(max(d_ab, d_ba))


def dist(x, pieces):
    """Point-to-set distance straight from the piece list."""
    return min(0.0 if lo <= x <= hi else min(abs(x - lo), abs(x - hi)) for lo, hi in pieces)


def seven_terms(fx, fy, Tx, Ty, hp, p):
    """Generalized condition terms from raw piece lists (hand formulas);
    ``hp`` is H^p(Tx, Ty) supplied by the caller."""
    a, b = dist(fx, Tx) ** p, dist(fy, Ty) ** p
    c = abs(fx - fy) ** p
    u, v = dist(fx, Ty) ** p, dist(fy, Tx) ** p
    return [a, b, c, (u + v) / 2, a * b / (1 + c), u * v / (1 + c), u * v / (1 + hp)]


def pairs(xs):
    return itertools.product(xs, repeat=2)


def brute_bellman(xs, ys, g, G, tau, h):
    """Plain-loop Bellman image; tau snapped to the nearest state node
    (ties to the left node)."""
    out = []
    for x in xs:
        best = -math.inf
        for y in ys:
            t = tau(x, y)
            j = min(range(len(xs)), key=lambda i: (abs(xs[i] - t), i))
            best = max(best, g(x, y) + G(x, y, h[j]))
        out.append(best)
    return out


def brute_theta(T1, T2, h, k):
    d = lambda u, v: max(abs(a - b) for a, b in zip(u, v))
    T1h, T1k, T2h, T2k = T1(h), T1(k), T2(h), T2(k)
    a, b = d(T1h, T2k), d(T1k, T2h)
    terms = [d(T2h, T2k), d(T2h, T1h), d(T2k, T1k), (a + b) / 2,
             d(T1h, T2h) * d(T1k, T2k) / (1 + d(T2k, T2h)),
             a * b / (1 + d(T2k, T2h)), a * b / (1 + d(T1h, T1k))]
    return max(terms), terms
