"""Discretized Volterra integral inclusion on J = [0, 1] with real values:

    x(t) in q(t) + int_0^sigma(t) k(t, s) F(s, x(s)) ds.

Trajectories are arrays of node values at t_j = j / n.  A selection rule
picks v_j in F(t_j, x_j) at every node; the integral uses the composite
trapezoid rule with a partial last cell when sigma(t) falls between nodes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .contraction import CertificateReport, PhiFunction, Violation, uniform_grid
from .dsl import Expression, parse_expr
from .sets import ClosedSet

RULES = ("nearest-to-current", "midpoint", "lower-end", "upper-end")


class SelectionError(ValueError):
    pass


def _expr(v, variables, kind="scalar"):
    return v if isinstance(v, Expression) else parse_expr(v, variables, kind=kind)


class InclusionInstance:
    def __init__(self, q, k, sigma, F, n: int = 1000):
        if n < 1:
            raise ValueError("need at least one grid cell")
        self.q = _expr(q, ("t",))
        self.k = _expr(k, ("t", "s"))
        self.sigma = _expr(sigma, ("t",))
        self.F = _expr(F, ("s", "x"), kind="set")
        self.n = n
        self.t = uniform_grid(0.0, 1.0, n + 1)
        self.q_values = np.broadcast_to(self.q(t=self.t), self.t.shape).astype(float)
        self.K = np.broadcast_to(self.k(t=self.t[:, None], s=self.t[None, :]), (n + 1, n + 1))
        sig = np.broadcast_to(self.sigma(t=self.t), self.t.shape)
        if np.any(sig < 0) or np.any(sig > 1):
            raise ValueError("sigma(t) must stay in [0, 1]")
        self.sigma_values = sig
        self.A = self.K * _trapezoid_weights(sig, n)

    def set_at(self, j: int, xj: float) -> ClosedSet:
        return self.F(s=self.t[j], x=xj)


def _trapezoid_weights(sig: np.ndarray, n: int) -> np.ndarray:
    """Row j integrates a node function over [0, sig[j]]."""
    h = 1.0 / n
    W = np.zeros((sig.size, n + 1))
    for j, s in enumerate(sig):
        m = min(int(math.floor(s * n)), n)
        if m > 0:
            W[j, : m + 1] = h
            W[j, 0] = W[j, m] = h / 2
        L = s - m * h
        if m < n and L > 0:
            theta = L / h
            W[j, m] += L * (2 - theta) / 2
            W[j, m + 1] += L * theta / 2
    return W


def select(inst: InclusionInstance, x, rule: str = "nearest-to-current") -> np.ndarray:
    """v_j in F(t_j, x_j) chosen by ``rule``; ties go to the smaller value."""
    if rule not in RULES:
        raise ValueError(f"unknown selection rule {rule!r}; choose from {RULES}")
    x = np.asarray(x, dtype=float)
    try:
        pieces = inst.F.pieces(s=inst.t, x=x)
    except ValueError as exc:
        raise SelectionError(f"F(s, x) is not a well-formed set: {exc}") from None
    lo = np.stack([p[0] for p in pieces])
    hi = np.stack([p[1] for p in pieces])
    if rule == "lower-end":
        v = lo.min(axis=0)
    elif rule == "upper-end":
        v = hi.max(axis=0)
    else:
        target = x if rule == "nearest-to-current" else (lo.min(axis=0) + hi.max(axis=0)) / 2
        cand = np.clip(target, lo, hi)
        dist = np.abs(cand - target)
        v = np.where(dist == dist.min(axis=0), cand, np.inf).min(axis=0)
    if not np.all(np.any((lo <= v) & (v <= hi), axis=0)):
        raise SelectionError("selected value left F(t, x)")
    return v


def apply_inclusion_operator(inst: InclusionInstance, x, rule: str = "nearest-to-current") -> np.ndarray:
    v = select(inst, x, rule)
    return inst.q_values + inst.A @ v


@dataclass
class InclusionSolution:
    x: np.ndarray
    residual: float
    iterations: int
    steps: List[float] = field(default_factory=list)
    converged: bool = True


class NotConverged(RuntimeError):
    def __init__(self, message, result):
        super().__init__(message)
        self.result = result


def solve_inclusion(inst: InclusionInstance, rule: str = "nearest-to-current", tol: float = 1e-12,
                    max_iters: int = 500, x0=None) -> InclusionSolution:
    """Successive approximation x <- T x from ``x0`` (default 0) until
    ||T x - x|| <= tol; returns that x with its residual."""
    x = np.zeros(inst.t.size) if x0 is None else np.array(x0, dtype=float)
    steps = []
    for k in range(max_iters + 1):
        Tx = apply_inclusion_operator(inst, x, rule)
        r = float(np.max(np.abs(Tx - x)))
        steps.append(r)
        if r <= tol:
            return InclusionSolution(x, r, k, steps)
        x = Tx
    res = InclusionSolution(x, steps[-1], max_iters, steps, converged=False)
    raise NotConverged(f"no convergence in {max_iters} iterations (residual {steps[-1]!r})", res)


@dataclass
class BracketReport:
    lower_holds: bool
    upper_holds: bool
    lower_violations: List[float]  # t nodes where a > T a
    upper_violations: List[float]  # t nodes where b < T b
    between: Optional[bool] = None


def check_bracket(a, b, inst: InclusionInstance, solution=None, tol: float = 1e-9) -> BracketReport:
    """Lower/upper solution test using the lower-end selection at ``a`` and
    the upper-end selection at ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    low = a > apply_inclusion_operator(inst, a, "lower-end") + tol
    up = b < apply_inclusion_operator(inst, b, "upper-end") - tol
    between = None
    if solution is not None:
        s = np.asarray(solution, dtype=float)
        between = bool(np.all(a <= s + tol) and np.all(s <= b + tol))
    return BracketReport(
        lower_holds=not low.any(),
        upper_holds=not up.any(),
        lower_violations=inst.t[low].tolist(),
        upper_violations=inst.t[up].tolist(),
        between=between,
    )


def kernel_report(inst: InclusionInstance) -> dict:
    sup_k = float(inst.K.max())
    min_k = float(inst.K.min())
    tau = -math.log(sup_k) + 0.0 if sup_k > 0 else math.inf
    return {
        "sup_k": sup_k,
        "tau": tau,
        "nonnegative": min_k >= 0,
        "h0_holds": min_k >= 0 and tau > 0,
    }


def kernel_tau(inst: InclusionInstance) -> float:
    """tau with e^-tau = sup k over the grid.  Warns when the kernel bound
    needs tau > 0 (sup k < 1) or nonnegativity and does not get it."""
    rep = kernel_report(inst)
    if not rep["h0_holds"]:
        warnings.warn(f"kernel condition fails: sup k = {rep['sup_k']!r}, nonnegative = {rep['nonnegative']}")
    return rep["tau"]


def delta(x, y, Tx, Ty, alpha=0.0, beta=0.0, gamma=0.0, delta_=0.0) -> np.ndarray:
    """Nodewise rational Hardy-Rogers quantity with f the identity."""
    if min(alpha, beta, gamma, delta_) < 0 or alpha + beta + 2 * gamma + 2 * delta_ > 1:
        raise ValueError("need alpha, beta, gamma, delta >= 0 with alpha + beta + 2 gamma + 2 delta <= 1")
    x, y, Tx, Ty = (np.asarray(v, dtype=float) for v in (x, y, Tx, Ty))
    dxy = np.abs(x - y)
    dx = np.abs(x - Tx)
    dy = np.abs(y - Ty)
    return (alpha * dxy + beta * (1 + dx) * dy / (1 + dxy) + gamma * (dx + dy)
            + delta_ * (np.abs(x - Ty) + np.abs(y - Tx)))


def check_monotone(inst: InclusionInstance, x_values=None) -> dict:
    """F(t, .) increasing: both set ends nondecreasing in x at every node."""
    xv = np.linspace(0.0, 1.0, 11) if x_values is None else np.sort(np.asarray(x_values, dtype=float))
    lows, highs = [], []
    for xval in xv:
        pieces = inst.F.pieces(s=inst.t, x=np.full(inst.t.shape, xval))
        lows.append(np.min([p[0] for p in pieces], axis=0))
        highs.append(np.max([p[1] for p in pieces], axis=0))
    lows, highs = np.array(lows), np.array(highs)
    bad = (np.diff(lows, axis=0) < 0) | (np.diff(highs, axis=0) < 0)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        return {"holds": False, "t": float(inst.t[j]), "x": float(xv[i]), "x_next": float(xv[i + 1])}
    return {"holds": True}


def check_h3(inst: InclusionInstance, x, y, tau: float, phi: PhiFunction, alpha=0.0, beta=0.0,
             gamma=0.0, delta_=0.0, mode: str = "hausdorff",
             rule: str = "nearest-to-current") -> CertificateReport:
    """Nodewise check of |F(s, x(s)) - F(s, y(s))| <= e^-tau phi(Delta(x, y)).

    ``mode`` reads the left side as the Hausdorff distance of the value sets
    ("hausdorff") or as the gap between the selected points ("selected").
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if mode == "hausdorff":
        lhs = np.array([inst.set_at(j, x[j]).hausdorff(inst.set_at(j, y[j])) for j in range(inst.t.size)])
    elif mode == "selected":
        lhs = np.abs(select(inst, x, rule) - select(inst, y, rule))
    else:
        raise ValueError("mode must be 'hausdorff' or 'selected'")
    Tx = apply_inclusion_operator(inst, x, rule)
    Ty = apply_inclusion_operator(inst, y, rule)
    rhs = math.exp(-tau) * np.asarray(phi(delta(x, y, Tx, Ty, alpha, beta, gamma, delta_)), dtype=float)
    rhs = np.broadcast_to(rhs, lhs.shape)
    rep = CertificateReport(samples=int(lhs.size))
    ok = lhs <= rhs
    if ok.any():
        rep.min_margin = float(np.min((rhs - lhs)[ok]))
    for j in np.nonzero(~ok)[0]:
        rep.violations.append(Violation(float(inst.t[j]), float(inst.t[j]), float(lhs[j]), float(rhs[j]),
                                        float(lhs[j] - rhs[j])))
    return rep
