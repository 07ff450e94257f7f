"""Coincidence structure and pair properties of a hybrid pair (f, T).

Finite spaces are handled exactly.  On interval spaces everything is read
off a candidate grid: uniform nodes at the requested resolution, every
breakpoint of f and T with its 1e-9 neighbours, and the roots of f(x) - x
on each piece (so isolated fixed points of f are never missed).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import brentq

from .contraction import GridSpec, sample_points
from .dsl import Condition, PiecewiseMap, PiecewiseSetMap
from .sets import ClosedSet

TOL = 1e-9


class UnsupportedSpaceError(ValueError):
    pass


class HybridPair:
    """A single-valued f and a set-valued T on a common domain."""

    def __init__(self, f: PiecewiseMap, T: PiecewiseSetMap, name: str = ""):
        if f.domain != T.domain:
            raise ValueError(f"f and T have different domains: {f.domain} vs {T.domain}")
        self.f = f
        self.T = T
        self.name = name
        self.domain = f.domain
        self._validate()

    @property
    def space_kind(self) -> str:
        return "finite" if self.domain.is_finite else "interval"

    def _validate(self):
        for x in sample_points(self.domain, (self.f, self.T), GridSpec(101)):
            fx = self.f(x)
            if not self.domain.contains(fx, TOL):
                raise ValueError(f"f({x!r}) = {fx!r} leaves the domain {self.domain}")
            if not self.T(x).issubset(self.domain):
                raise ValueError(f"T({x!r}) = {self.T(x)} is not a subset of {self.domain}")

    def defect(self, x: float) -> float:
        """d(fx, Tx); zero exactly at coincidence points."""
        return self.T(x).distance(self.f(x))

    def candidates(self, resolution: float = 1e-3) -> np.ndarray:
        if self.space_kind == "finite":
            return np.array(self.domain.endpoints())
        if not resolution > 0:
            raise ValueError("resolution must be positive")
        n = int(math.ceil((self.domain.max - self.domain.min) / resolution)) + 1
        xs = sample_points(self.domain, (self.f, self.T), GridSpec(n))
        roots = []
        for c, e in self.f.pieces:
            inside = xs[c.mask(xs)]
            if inside.size < 2:
                continue
            g = e(x=inside) - inside
            for i in np.nonzero(g[:-1] * g[1:] < 0)[0]:
                roots.append(brentq(lambda t: e(x=t) - t, inside[i], inside[i + 1], xtol=1e-15))
        return np.unique(np.concatenate([xs, roots])) if roots else xs

    def __repr__(self):
        return f"HybridPair({self.name or ''!s}f={self.f.to_text()!r}, T={self.T.to_text()!r})"


# ---------------------------------------------------------------------------
# Coincidence and common fixed points

def _runs_to_set(xs, hit, resolution, refine=None) -> Optional[ClosedSet]:
    """Merge runs of consecutive hit candidates into closed intervals."""
    pieces = []
    i, n = 0, len(xs)
    while i < n:
        if not hit[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and hit[j + 1] and xs[j + 1] - xs[j] <= resolution * (1 + 1e-9):
            j += 1
        lo, hi = xs[i], xs[j]
        if refine is not None:
            if i > 0 and not hit[i - 1]:
                lo = refine(xs[i - 1], xs[i], lo)
            if j + 1 < n and not hit[j + 1]:
                hi = refine(xs[j + 1], xs[j], hi)
            # a sliver within the tolerance band is an isolated point
            if hi - lo <= 10 * TOL:
                lo, hi = xs[i], xs[j]
        pieces.append((lo, hi))
        i = j + 1
    return ClosedSet(pieces) if pieces else None


def _same_pieces(pair, a, b):
    return all(m.piece_at(a)[0] == m.piece_at(b)[0] for m in (pair.f, pair.T))


def _make_refiner(pair, pred):
    def refine(miss, hit, default):
        if not _same_pieces(pair, miss, hit):
            return default
        for _ in range(60):
            mid = (miss + hit) / 2
            if mid in (miss, hit):
                break
            if pred(mid):
                hit = mid
            else:
                miss = mid
        return hit
    return refine


def _scan(pair: HybridPair, resolution: float):
    xs = pair.candidates(resolution)
    tol = 0.0 if pair.space_kind == "finite" else TOL
    fx = pair.f.evaluate_many(xs)
    defect = np.array([pair.T(x).distance(v) for x, v in zip(xs, fx)])
    return xs, fx, defect <= tol, tol


def coincidence_points(pair: HybridPair, resolution: float = 1e-3) -> Optional[ClosedSet]:
    """The set C(f, T) = {x : fx in Tx}; ``None`` when empty."""
    xs, _, hit, tol = _scan(pair, resolution)
    if pair.space_kind == "finite":
        return ClosedSet.points(xs[hit]) if hit.any() else None
    return _runs_to_set(xs, hit, resolution, _make_refiner(pair, lambda x: pair.defect(x) <= tol))


def common_fixed_points(pair: HybridPair, resolution: float = 1e-3) -> Optional[ClosedSet]:
    """The set F(f, T) = {x : x = fx in Tx}; ``None`` when empty."""
    xs, fx, hit, tol = _scan(pair, resolution)
    hit = hit & (np.abs(fx - xs) <= tol)
    if pair.space_kind == "finite":
        return ClosedSet.points(xs[hit]) if hit.any() else None

    def pred(x):
        return pair.defect(x) <= tol and abs(pair.f(x) - x) <= tol

    return _runs_to_set(xs, hit, resolution, _make_refiner(pair, pred))


# ---------------------------------------------------------------------------
# Idempotency and commutativity

@dataclass
class IdempotencyResult:
    coincidentally: bool
    occasionally: bool
    counterexample: Optional[float] = None  # v in C(f,T) with ffv != fv
    witness: Optional[float] = None  # v in C(f,T) with ffv == fv


def check_idempotency(pair: HybridPair, resolution: float = 1e-3) -> IdempotencyResult:
    xs, fx, hit, tol = _scan(pair, resolution)
    counter = witness = None
    for v, fv in zip(xs[hit], fx[hit]):
        idem = abs(pair.f(fv) - fv) <= tol
        if idem and witness is None:
            witness = float(v)
        if not idem and counter is None:
            counter = float(v)
    any_hit = bool(hit.any())
    return IdempotencyResult(
        coincidentally=any_hit and counter is None,
        occasionally=witness is not None,
        counterexample=counter,
        witness=witness,
    )


@dataclass
class CommutingResult:
    commuting: bool
    weakly_commuting: bool
    weakly_compatible: bool
    counterexamples: dict = field(default_factory=dict)


def check_commuting(pair: HybridPair) -> CommutingResult:
    """Commuting, weakly commuting and weakly compatible, decided exactly.

    Needs a finite space: fTx is the image of the set Tx under f.
    """
    if pair.space_kind != "finite":
        raise UnsupportedSpaceError("commutativity checks need a finite space")
    ce = {}
    for x in pair.domain.endpoints():
        fx = pair.f(x)
        Tx = pair.T(x)
        fTx = Tx.map_points(pair.f)
        Tfx = pair.T(fx)
        if "commuting" not in ce and not fTx.issubset(Tfx):
            ce["commuting"] = x
        if "weakly_commuting" not in ce and fTx.hausdorff(Tfx) > Tx.distance(fx):
            ce["weakly_commuting"] = x
        if "weakly_compatible" not in ce and fx in Tx and fTx != Tfx:
            ce["weakly_compatible"] = x
    return CommutingResult(
        commuting="commuting" not in ce,
        weakly_commuting="weakly_commuting" not in ce,
        weakly_compatible="weakly_compatible" not in ce,
        counterexamples=ce,
    )


# ---------------------------------------------------------------------------
# Range of f, property (E.A) and common limit range

def _image_piece(c: Condition, e, n: int = 201) -> Condition:
    xs = np.linspace(c.lo, c.hi, n) if not c.is_point else np.array([c.lo])
    vals = np.asarray(e(x=xs), dtype=float)
    if np.all(vals == vals[0]):
        return Condition(float(vals[0]), float(vals[0]), True, True)
    d = np.diff(vals)
    if np.all(d >= 0):
        return Condition(float(vals[0]), float(vals[-1]), c.lo_closed, c.hi_closed)
    if np.all(d <= 0):
        return Condition(float(vals[-1]), float(vals[0]), c.hi_closed, c.lo_closed)
    warnings.warn(f"piece {c} is not monotone; its image is estimated from {n} samples")
    return Condition(float(vals.min()), float(vals.max()), True, True)


def range_pieces(f: PiecewiseMap) -> List[Condition]:
    """Image of f as a union of intervals with end ownership, merged."""
    items = sorted((_image_piece(c, e) for c, e in f.pieces), key=lambda c: (c.lo, not c.lo_closed))
    merged = [[items[0].lo, items[0].hi, items[0].lo_closed, items[0].hi_closed]]
    for c in items[1:]:
        m = merged[-1]
        if c.lo < m[1] or (c.lo == m[1] and (m[3] or c.lo_closed)):
            if c.lo == m[0]:
                m[2] = m[2] or c.lo_closed
            if c.hi > m[1]:
                m[1], m[3] = c.hi, c.hi_closed
            elif c.hi == m[1]:
                m[3] = m[3] or c.hi_closed
        else:
            merged.append([c.lo, c.hi, c.lo_closed, c.hi_closed])
    return [Condition(*m) for m in merged]


def in_range(t: float, pieces: List[Condition], tol: float = TOL) -> bool:
    """Membership honouring open ends exactly; closed ends get ``tol``."""
    for c in pieces:
        lo_ok = t >= c.lo - tol if c.lo_closed else t > c.lo
        hi_ok = t <= c.hi + tol if c.hi_closed else t < c.hi
        if lo_ok and hi_ok:
            return True
    return False


def range_is_closed(f: PiecewiseMap) -> bool:
    return all(c.lo_closed and c.hi_closed for c in range_pieces(f))


def _preimage(f: PiecewiseMap, t: float) -> Optional[float]:
    for c, e in f.pieces:
        img = _image_piece(c, e)
        if not in_range(t, [img]):
            continue
        if img.is_point:
            return c.lo if c.lo_closed else (c.hi if c.hi_closed else (c.lo + c.hi) / 2)
        g = lambda x: e(x=x) - t
        if abs(g(c.lo)) <= TOL and c.lo_closed:
            return c.lo
        if abs(g(c.hi)) <= TOL and c.hi_closed:
            return c.hi
        if g(c.lo) * g(c.hi) < 0:
            return brentq(g, c.lo, c.hi, xtol=1e-15)
    return None


@dataclass
class LimitWitness:
    x0: float
    side: str  # "left", "right" or "at" (constant sequence)
    t: float
    A: ClosedSet
    u: Optional[float] = None

    def describe(self) -> str:
        seq = {"left": f"{self.x0!r} - 1/n", "right": f"{self.x0!r} + 1/n", "at": f"{self.x0!r}"}
        s = f"x_n = {seq[self.side]}: f x_n -> {self.t!r} in {self.A}"
        if self.u is not None:
            s += f", t = f({self.u!r})"
        return s


@dataclass
class EAResult:
    ea: bool
    clr_f: bool
    f_range_closed: bool
    ea_witness: Optional[LimitWitness] = None
    clr_witness: Optional[LimitWitness] = None


def detect_ea_clr(pair: HybridPair, resolution: float = 1e-3) -> EAResult:
    """Property (E.A) and CLR_f via one-sided limits at candidate points.

    Breakpoints are scanned before grid nodes, so the reported witnesses
    prefer discontinuities.
    """
    if pair.space_kind == "finite":
        C = coincidence_points(pair)
        if C is None:
            return EAResult(False, False, True)
        u = C.min
        w = LimitWitness(u, "at", pair.f(u), pair.T(u), u)
        return EAResult(True, True, True, w, w)

    rng = range_pieces(pair.f)
    bps = [b for b in sorted(set(pair.f.breakpoints) | set(pair.T.breakpoints)) if b in pair.domain]
    seen = set(bps)
    order = bps + [x for x in pair.candidates(resolution) if x not in seen]
    ea_w = clr_w = None
    for x0 in order:
        lf, lT = pair.f.limits(x0), pair.T.limits(x0)
        for side in ("left", "at", "right"):
            t, A = getattr(lf, side), getattr(lT, side)
            if t is None or A is None or not A.contains(t, TOL):
                continue
            if ea_w is None:
                ea_w = LimitWitness(float(x0), side, float(t), A)
            if in_range(t, rng):
                u = float(x0) if side == "at" else _preimage(pair.f, t)
                if u is not None:
                    clr_w = LimitWitness(float(x0), side, float(t), A, u)
                    break
        if clr_w is not None:
            break
    return EAResult(
        ea=ea_w is not None,
        clr_f=clr_w is not None,
        f_range_closed=all(c.lo_closed and c.hi_closed for c in rng),
        ea_witness=ea_w,
        clr_witness=clr_w,
    )


# ---------------------------------------------------------------------------
# Full report

@dataclass
class PairPropertyReport:
    name: str
    space_kind: str
    coincidence: Optional[ClosedSet]
    common_fixed: Optional[ClosedSet]
    commuting: Optional[CommutingResult]
    idempotency: IdempotencyResult
    ea: EAResult
    not_decided: tuple = ("compatible", "non-compatible")

    def flags(self) -> dict:
        """Flat name -> bool (or None when not decided) mapping."""
        c = self.commuting
        out = {
            "commuting": c.commuting if c else None,
            "weakly_commuting": c.weakly_commuting if c else None,
            "weakly_compatible": c.weakly_compatible if c else None,
            "coincidentally_idempotent": self.idempotency.coincidentally,
            "occasionally_coincidentally_idempotent": self.idempotency.occasionally,
            "property_ea": self.ea.ea,
            "clr_f": self.ea.clr_f,
            "f_range_closed": self.ea.f_range_closed,
        }
        for k in self.not_decided:
            out[k] = None
        return out

    @property
    def remark_implication_holds(self) -> bool:
        """(E.A) together with a closed f(X) forces CLR_f."""
        return not (self.ea.ea and self.ea.f_range_closed) or self.ea.clr_f


def pair_report(pair: HybridPair, resolution: float = 1e-3) -> PairPropertyReport:
    commuting = check_commuting(pair) if pair.space_kind == "finite" else None
    return PairPropertyReport(
        name=pair.name,
        space_kind=pair.space_kind,
        coincidence=coincidence_points(pair, resolution),
        common_fixed=common_fixed_points(pair, resolution),
        commuting=commuting,
        idempotency=check_idempotency(pair, resolution),
        ea=detect_ea_clr(pair, resolution),
    )
