"""Successive approximation for the two-operator Bellman system

    q_i(x) = sup_{y in D} { g(x, y) + G_i(x, y, q_i(tau(x, y))) },  i = 1, 2,

on a state grid over W and a decision grid over D.  Grid functions are
plain 1-d numpy arrays indexed by state node; distances are sup-norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from .contraction import CertificateReport, PhiFunction, Violation, uniform_grid
from .dsl import Expression, parse_expr
from .sets import ClosedSet


def sup_dist(h: np.ndarray, k: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(h) - np.asarray(k))))


def _grid(S: ClosedSet, n: int) -> np.ndarray:
    g = uniform_grid(S.min, S.max, n)
    return g[[v in S for v in g]]


def _as_set(v) -> ClosedSet:
    if isinstance(v, ClosedSet):
        return v
    return ClosedSet.interval(*v)


def _as_expr(v, variables) -> Expression:
    return v if isinstance(v, Expression) else parse_expr(v, variables, kind="scalar")


class DPInstance:
    """State space W, decision space D and the data g, G1, G2, tau.

    ``tau(x, y)`` is snapped to the nearest state node; the largest snap
    distance is kept in ``snap_error``.
    """

    def __init__(self, W, D, g, G1, G2, tau, n_W: int = 201, n_D: int = 201):
        self.W, self.D = _as_set(W), _as_set(D)
        self.g = _as_expr(g, ("x", "y"))
        self.G = (_as_expr(G1, ("x", "y", "z")), _as_expr(G2, ("x", "y", "z")))
        self.tau = _as_expr(tau, ("x", "y"))
        self.xs = _grid(self.W, n_W)
        self.ys = _grid(self.D, n_D)
        self._X = self.xs[:, None]
        self._Y = self.ys[None, :]
        self.gmat = np.broadcast_to(self.g(x=self._X, y=self._Y), (self.xs.size, self.ys.size))
        t = np.broadcast_to(self.tau(x=self._X, y=self._Y), self.gmat.shape)
        right = np.clip(np.searchsorted(self.xs, t), 1, self.xs.size - 1) if self.xs.size > 1 else np.zeros(t.shape, int)
        left = np.maximum(right - 1, 0)
        pick_right = np.abs(self.xs[right] - t) < np.abs(t - self.xs[left])
        self.snap = np.where(pick_right, right, left)
        self.snap_error = float(np.max(np.abs(self.xs[self.snap] - t)))

    @property
    def n_states(self) -> int:
        return self.xs.size

    def G_values(self, i: int, z) -> np.ndarray:
        return np.broadcast_to(self.G[i - 1](x=self._X, y=self._Y, z=z), self.gmat.shape)

    def bounds(self, z_range: Tuple[float, float] = (-1.0, 1.0), n_z: int = 21) -> dict:
        """Grid maxima of |g| and |G_i| for z in ``z_range``."""
        out = {"g": float(np.max(np.abs(self.gmat)))}
        for i in (1, 2):
            out[f"G{i}"] = max(float(np.max(np.abs(self.G_values(i, z))))
                               for z in np.linspace(*z_range, n_z))
        return out


def bellman_apply(inst: DPInstance, i: int, h) -> np.ndarray:
    """(T_i h)(x) = max over the D-grid of g(x, y) + G_i(x, y, h(tau(x, y)))."""
    if i not in (1, 2):
        raise ValueError("operator index must be 1 or 2")
    h = np.asarray(h, dtype=float)
    if h.shape != inst.xs.shape:
        raise ValueError(f"grid function has shape {h.shape}, expected {inst.xs.shape}")
    return np.max(inst.gmat + inst.G_values(i, h[inst.snap]), axis=1)


@dataclass
class DPSolution:
    h: np.ndarray
    iterations: int
    residual: float
    steps: List[float] = field(default_factory=list)
    converged: bool = True

    def contraction_ratios(self, floor: float = 1e-12) -> np.ndarray:
        s = np.asarray(self.steps)
        ok = s[:-1] > floor
        return s[1:][ok] / s[:-1][ok]


class NotConverged(RuntimeError):
    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


def solve_successive(inst: DPInstance, i: int, h0=None, tol: float = 1e-8,
                     max_iters: int = 500) -> DPSolution:
    """Iterate h <- T_i h until ||T_i h - h|| <= tol.

    ``iterations`` counts operator applications needed to reach the returned
    h, whose residual ||T_i h - h|| is what stopped the loop.
    """
    h = np.zeros(inst.n_states) if h0 is None else np.array(h0, dtype=float)
    steps = []
    for k in range(max_iters + 1):
        Th = bellman_apply(inst, i, h)
        r = sup_dist(Th, h)
        steps.append(r)
        if r <= tol:
            return DPSolution(h, k, r, steps)
        h = Th
    res = DPSolution(h, max_iters, steps[-1], steps, converged=False)
    raise NotConverged(f"no convergence in {max_iters} iterations (residual {steps[-1]!r})", res)


def theta_terms(h, k, inst: DPInstance) -> tuple:
    T1h, T1k = bellman_apply(inst, 1, h), bellman_apply(inst, 1, k)
    T2h, T2k = bellman_apply(inst, 2, h), bellman_apply(inst, 2, k)
    d = sup_dist
    a, b = d(T1h, T2k), d(T1k, T2h)
    return (
        d(T2h, T2k),
        d(T2h, T1h),
        d(T2k, T1k),
        (a + b) / 2,
        d(T1h, T2h) * d(T1k, T2k) / (1 + d(T2k, T2h)),
        a * b / (1 + d(T2k, T2h)),
        a * b / (1 + d(T1h, T1k)),
    )


def theta(h, k, inst: DPInstance) -> float:
    return max(theta_terms(h, k, inst))


def random_grid_function(rng: np.random.Generator, n: int, value_range=(0.0, 1.0),
                         n_blocks: int = 8) -> np.ndarray:
    """Piecewise-constant grid function with uniform random block values."""
    n_blocks = max(1, min(n_blocks, n))
    cuts = np.sort(rng.choice(np.arange(1, n), size=n_blocks - 1, replace=False)) if n_blocks > 1 else []
    vals = rng.uniform(*value_range, size=n_blocks)
    return np.repeat(vals, np.diff(np.concatenate([[0], cuts, [n]])).astype(int))


def hypothesis1_sides(inst: DPInstance, h, k, tau: float, phi: PhiFunction):
    """Matrix |G1(x, y, h(x)) - G2(x, y, k(x))| over grid pairs, and the
    scalar bound e^-tau phi(Theta(h, k))."""
    h = np.asarray(h, dtype=float)[:, None]
    k = np.asarray(k, dtype=float)[:, None]
    lhs = np.abs(inst.G_values(1, h) - inst.G_values(2, k))
    rhs = math.exp(-tau) * float(phi(theta(h[:, 0], k[:, 0], inst)))
    return lhs, rhs


def verify_hypothesis1(inst: DPInstance, tau: float, phi: PhiFunction, n_samples: int = 50,
                       seed: int = 0, value_range=(0.0, 1.0)) -> CertificateReport:
    """Sample random grid-function pairs and check the G1/G2 bound at every
    (x, y) grid pair.  At most one violation (the worst pair) is recorded
    per sampled (h, k)."""
    rng = np.random.default_rng(seed)
    rep = CertificateReport(samples=0)
    for _ in range(n_samples):
        h = random_grid_function(rng, inst.n_states, value_range)
        k = random_grid_function(rng, inst.n_states, value_range)
        lhs, rhs = hypothesis1_sides(inst, h, k, tau, phi)
        rep.samples += lhs.size
        i, j = np.unravel_index(np.argmax(lhs), lhs.shape)
        worst = float(lhs[i, j])
        if worst > rhs:
            rep.violations.append(Violation(float(inst.xs[i]), float(inst.ys[j]), worst, rhs, worst - rhs))
        else:
            rep.min_margin = min(rep.min_margin, rhs - worst)
    return rep


def check_solution(inst: DPInstance, h, tol: float = 1e-8) -> dict:
    """A-posteriori checks at a computed solution: T1 h = T2 h (common
    limit) and T1 T1 h = T1 h (idempotency at the coincidence)."""
    T1h = bellman_apply(inst, 1, h)
    T2h = bellman_apply(inst, 2, h)
    gap12 = sup_dist(T1h, T2h)
    idem = sup_dist(bellman_apply(inst, 1, T1h), T1h)
    return {
        "t1_t2_gap": gap12,
        "common_limit": gap12 <= tol,
        "idempotency_gap": idem,
        "idempotent": idem <= tol,
    }
