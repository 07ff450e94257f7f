"""Closed bounded subsets of the real line and the Hausdorff-Pompeiu metric.

A :class:`ClosedSet` is a finite union of closed intervals, some of which may
be degenerate (single points).  Sets are canonicalized on construction so two
sets are equal exactly when their piece tuples are equal.
"""

from __future__ import annotations

import bisect
import math
from typing import Iterable, Sequence, Tuple

import numpy as np

Piece = Tuple[float, float]


class ClosedSet:
    """Nonempty closed bounded subset of R stored as sorted disjoint pieces.

    Parameters
    ----------
    pieces : iterable of (lo, hi)
        Closed intervals; ``lo == hi`` gives an isolated point.  Overlapping
        and touching pieces are merged.
    """

    __slots__ = ("_pieces", "_los")

    def __init__(self, pieces: Iterable[Sequence[float]]):
        raw = []
        for p in pieces:
            lo, hi = float(p[0]), float(p[1])
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"non-finite interval endpoint in [{lo}, {hi}]")
            if lo > hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")
            raw.append((lo, hi))
        if not raw:
            raise ValueError("a closed set must be nonempty")
        raw.sort()
        merged = [raw[0]]
        for lo, hi in raw[1:]:
            plo, phi = merged[-1]
            # zero gap threshold: touching pieces merge
            if lo <= phi:
                merged[-1] = (plo, max(phi, hi))
            else:
                merged.append((lo, hi))
        self._pieces = tuple(merged)
        self._los = [p[0] for p in merged]

    # -- constructors -----------------------------------------------------

    @classmethod
    def interval(cls, lo: float, hi: float) -> "ClosedSet":
        return cls([(lo, hi)])

    @classmethod
    def point(cls, x: float) -> "ClosedSet":
        return cls([(x, x)])

    @classmethod
    def points(cls, xs: Iterable[float]) -> "ClosedSet":
        return cls([(x, x) for x in xs])

    # -- basic structure --------------------------------------------------

    @property
    def pieces(self) -> Tuple[Piece, ...]:
        return self._pieces

    @property
    def min(self) -> float:
        return self._pieces[0][0]

    @property
    def max(self) -> float:
        return self._pieces[-1][1]

    @property
    def is_finite(self) -> bool:
        """True when every piece is a single point."""
        return all(lo == hi for lo, hi in self._pieces)

    @property
    def is_singleton(self) -> bool:
        return len(self._pieces) == 1 and self._pieces[0][0] == self._pieces[0][1]

    def endpoints(self) -> list[float]:
        """Sorted distinct piece endpoints."""
        out: list[float] = []
        for lo, hi in self._pieces:
            out.append(lo)
            if hi != lo:
                out.append(hi)
        return out

    def gap_midpoints(self) -> list[float]:
        return [
            (self._pieces[i][1] + self._pieces[i + 1][0]) / 2
            for i in range(len(self._pieces) - 1)
        ]

    def union(self, other: "ClosedSet") -> "ClosedSet":
        return ClosedSet(self._pieces + other._pieces)

    __or__ = union

    def map_points(self, func) -> "ClosedSet":
        """Image of a finite set under ``func``."""
        if not self.is_finite:
            raise ValueError("map_points needs a finite set")
        return ClosedSet.points(func(lo) for lo, _ in self._pieces)

    def issubset(self, other: "ClosedSet") -> bool:
        return all(
            other._covering(lo) is not None
            and other._covering(lo) == other._covering(hi)
            for lo, hi in self._pieces
        )

    # -- metric ------------------------------------------------------------

    def _covering(self, x: float):
        i = bisect.bisect_right(self._los, x) - 1
        if i >= 0 and x <= self._pieces[i][1]:
            return i
        return None

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.distance(x) <= tol

    def __contains__(self, x: float) -> bool:
        return self._covering(x) is not None

    def distance(self, x: float) -> float:
        """d(x, A) = inf over a in A of |x - a|, exact."""
        i = bisect.bisect_right(self._los, x) - 1
        best = math.inf
        if i >= 0:
            lo, hi = self._pieces[i]
            if x <= hi:
                return 0.0
            best = x - hi
        if i + 1 < len(self._pieces):
            best = min(best, self._pieces[i + 1][0] - x)
        return best

    def distances(self, xs) -> np.ndarray:
        """Vectorized :meth:`distance` over an array of points."""
        xs = np.asarray(xs, dtype=float)
        out = np.full(xs.shape, np.inf)
        for lo, hi in self._pieces:
            out = np.minimum(out, np.maximum(np.maximum(lo - xs, xs - hi), 0.0))
        return out

    def nearest(self, x: float) -> float:
        """Metric projection of ``x``; ties go to the smaller point."""
        i = bisect.bisect_right(self._los, x) - 1
        if i >= 0 and x <= self._pieces[i][1]:
            return float(x)
        left = self._pieces[i][1] if i >= 0 else None
        right = self._pieces[i + 1][0] if i + 1 < len(self._pieces) else None
        if left is None:
            return right
        if right is None:
            return left
        return left if x - left <= right - x else right

    def directed_hausdorff(self, other: "ClosedSet") -> float:
        """sup over a in self of d(a, other).

        d(., other) is piecewise linear with local maxima only at midpoints
        of gaps of ``other``, so the sup over each piece of ``self`` is
        attained at its endpoints or at gap midpoints lying inside it.
        """
        cands = self.endpoints()
        cands.extend(m for m in other.gap_midpoints() if self._covering(m) is not None)
        return max(other.distance(a) for a in cands)

    def hausdorff(self, other: "ClosedSet") -> float:
        if self._pieces == other._pieces:
            return 0.0
        return max(self.directed_hausdorff(other), other.directed_hausdorff(self))

    # -- dunder ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, ClosedSet) and self._pieces == other._pieces

    def __hash__(self) -> int:
        return hash(self._pieces)

    def __repr__(self) -> str:
        return f"ClosedSet({list(self._pieces)!r})"

    def __str__(self) -> str:
        parts = []
        for lo, hi in self._pieces:
            parts.append(f"{{{lo:g}}}" if lo == hi else f"[{lo:g}, {hi:g}]")
        return " | ".join(parts)


def point_set_distance(x: float, A: ClosedSet) -> float:
    """Distance from a point to a closed set."""
    return A.distance(float(x))


def hausdorff(A: ClosedSet, B: ClosedSet) -> float:
    """Hausdorff-Pompeiu distance between two closed bounded sets."""
    return A.hausdorff(B)


def hausdorff_pow(A: ClosedSet, B: ClosedSet, p: float) -> float:
    if not p >= 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    return A.hausdorff(B) ** p
