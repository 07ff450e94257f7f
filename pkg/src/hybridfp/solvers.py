"""Orbit-following searches for fixed points of T and coincidence points
of a hybrid pair (f, T)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .contraction import GridSpec, sample_points
from .dsl import PiecewiseSetMap
from .pairs import HybridPair


@dataclass(frozen=True)
class OrbitStep:
    x: float  # current iterate x_n
    y: float  # selected point of T(x_n)
    step: float  # |x_{n+1} - x_n|


@dataclass
class OrbitTrace:
    iterates: List[OrbitStep] = field(default_factory=list)
    termination: str = "max-iters"  # converged | max-iters | stuck
    point: Optional[float] = None
    residual: float = float("inf")

    @property
    def converged(self) -> bool:
        return self.termination == "converged"

    @property
    def steps(self) -> np.ndarray:
        return np.array([s.step for s in self.iterates])


class IterationStuck(RuntimeError):
    def __init__(self, message, trace: OrbitTrace):
        super().__init__(message)
        self.trace = trace


class DomainEscape(ValueError):
    pass


def picard_multivalued(T: PiecewiseSetMap, x0: float, tol: float = 1e-10,
                       max_iters: int = 1000) -> OrbitTrace:
    """Iterate x_{n+1} = nearest point of T(x_n) to x_n.

    Stops once a step is at most ``tol``.  ``residual`` is d(x*, T x*).
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    x = float(x0)
    if x not in T.domain:
        raise DomainEscape(f"start point {x!r} is outside {T.domain}")
    trace = OrbitTrace()
    for _ in range(max_iters):
        y = T(x).nearest(x)
        step = abs(y - x)
        trace.iterates.append(OrbitStep(x, y, step))
        if y not in T.domain:
            raise DomainEscape(f"iterate {y!r} left the domain {T.domain}")
        x = y
        if step <= tol:
            trace.termination = "converged"
            break
    trace.point = x
    trace.residual = T(x).distance(x)
    return trace


def jungck_hybrid(pair: HybridPair, x0: float, tol: float = 1e-3, max_iters: int = 100,
                  grid: int = 3001, patience: int = 5) -> OrbitTrace:
    """Search a coincidence point v (d(fv, Tv) <= tol) of a hybrid pair.

    Each step picks x_{n+1} on the grid minimizing d(f x, T x_n), i.e. an
    approximate solution of f x_{n+1} in T x_n; ties go to the grid point
    nearest x_n, then to the smaller one.  Raises :class:`IterationStuck`
    after ``patience`` steps without reducing the defect d(f x_n, T x_n).
    """
    if pair.space_kind == "finite":
        xs = np.array(pair.domain.endpoints())
    else:
        xs = sample_points(pair.domain, (pair.f, pair.T), GridSpec(grid))
    fxs = pair.f.evaluate_many(xs)
    x = float(x0)
    if x not in pair.domain:
        raise DomainEscape(f"start point {x!r} is outside {pair.domain}")
    defect = pair.defect(x)
    trace = OrbitTrace()
    stall = 0
    if defect <= tol:
        trace.termination = "converged"
    for _ in range(max_iters if defect > tol else 0):
        S = pair.T(x)
        d = S.distances(fxs)
        cands = np.nonzero(d == d.min())[0]
        order = np.lexsort((xs[cands], np.abs(xs[cands] - x)))
        x_new = float(xs[cands[order[0]]])
        trace.iterates.append(OrbitStep(x, S.nearest(pair.f(x_new)), abs(x_new - x)))
        new_defect = pair.defect(x_new)
        stall = stall + 1 if new_defect >= defect else 0
        x, defect = x_new, new_defect
        if defect <= tol:
            trace.termination = "converged"
            break
        if stall >= patience:
            trace.termination = "stuck"
            trace.point, trace.residual = x, defect
            raise IterationStuck(f"no grid point reduced the defect below {defect!r}", trace)
    trace.point = x
    trace.residual = defect
    return trace
