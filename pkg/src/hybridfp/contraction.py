"""F-functions, comparison functions and sampled certification of
contraction inequalities for hybrid pairs (f, T)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .dsl import Expression, PiecewiseMap, PiecewiseSetMap, parse_expr
from .sets import ClosedSet

KINDS = ("nadler", "wardowski", "sgroi", "generalized", "hardy-rogers")


# ---------------------------------------------------------------------------
# The families F and Phi

_BUILTIN_F = {
    # name: (callable, documented exponent k for the beta^k F(beta) -> 0 axiom)
    "log": (np.log, 0.5),
    "log-linear": (lambda t: t + np.log(t), 0.5),
    "neg-inv-sqrt": (lambda t: -1.0 / np.sqrt(t), 0.8),
}


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    detail: str


class FFunction:
    """A member of the family F: continuous, strictly increasing on (0, inf),
    tending to -inf exactly at 0, with beta^k F(beta) -> 0.

    F(0) is reported as -inf, the limit forced by the second axiom.
    """

    def __init__(self, name: str, k: float, func: Callable, expr: Optional[Expression] = None):
        if not 0 < k < 1:
            raise ValueError(f"claimed k must lie in (0, 1), got {k}")
        self.name = name
        self.k = float(k)
        self._func = func
        self.expr = expr

    @classmethod
    def builtin(cls, name: str) -> "FFunction":
        try:
            func, k = _BUILTIN_F[name]
        except KeyError:
            raise ValueError(f"unknown F variant {name!r}; choose from {sorted(_BUILTIN_F)}") from None
        return cls(name, k, func)

    @classmethod
    def custom(cls, text: str, k: float) -> "FFunction":
        expr = parse_expr(text, ("t",), kind="scalar")
        return cls("custom", k, lambda t: expr(t=t), expr)

    @classmethod
    def log(cls):
        return cls.builtin("log")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            out = np.where(t > 0, self._func(np.where(t > 0, t, 1.0)), -np.inf)
        return float(out) if out.ndim == 0 else out

    def check_axioms(self, n_pairs: int = 1000, seed: int = 0) -> List[AxiomCheck]:
        rng = np.random.default_rng(seed)
        s = 10 ** rng.uniform(-6, 6, n_pairs)
        t = s * (1 + 10 ** rng.uniform(-6, 0, n_pairs))
        fs, ft = self(s), self(t)
        bad = np.nonzero(~(fs < ft))[0]
        mono = AxiomCheck(
            "F1 strictly increasing", bad.size == 0,
            f"{n_pairs} pairs" if bad.size == 0 else f"F({s[bad[0]]!r}) >= F({t[bad[0]]!r})",
        )
        beta = 2.0 ** -40
        fb = self(beta)
        f2 = AxiomCheck("F2 F(2^-40) < -20", bool(fb < -20), f"F(2^-40) = {fb!r}")
        v = beta ** self.k * fb
        f3 = AxiomCheck("F3 |b^k F(b)| < 1e-3", bool(abs(v) < 1e-3), f"k = {self.k}, value {v!r}")
        return [mono, f2, f3]

    def __repr__(self):
        extra = f", {self.expr.text!r}" if self.expr is not None else ""
        return f"FFunction({self.name!r}, k={self.k}{extra})"


class PhiFunction:
    """Comparison function phi: [0, inf) -> [0, inf) with phi(t) < t."""

    def __init__(self, text: str):
        self.expr = parse_expr(text, ("t",), kind="scalar")
        self.text = text

    @classmethod
    def linear(cls, c: float) -> "PhiFunction":
        return cls(f"{c!r}*t")

    def __call__(self, t):
        return self.expr(t=t)

    def check(self, lo: float = 1e-9, hi: float = 1e9, n: int = 1001) -> List[AxiomCheck]:
        ts = np.logspace(math.log10(lo), math.log10(hi), n)
        vals = np.asarray(self(ts), dtype=float)
        below = np.nonzero(~(vals < ts))[0]
        neg = np.nonzero(vals < 0)[0]
        dec = np.nonzero(np.diff(vals) < 0)[0]
        return [
            AxiomCheck("phi(t) < t", below.size == 0,
                       "log grid" if below.size == 0 else f"fails at t = {ts[below[0]]!r}"),
            AxiomCheck("phi >= 0", neg.size == 0,
                       "log grid" if neg.size == 0 else f"negative at t = {ts[neg[0]]!r}"),
            AxiomCheck("phi nondecreasing", dec.size == 0,
                       "log grid" if dec.size == 0 else f"decreases after t = {ts[dec[0]]!r}"),
        ]

    def __repr__(self):
        return f"PhiFunction({self.text!r})"


# ---------------------------------------------------------------------------
# Conditions and reports

def _require(checks: List[AxiomCheck], what: str):
    failed = [c for c in checks if not c.passed]
    if failed:
        raise ValueError(f"{what} fails {failed[0].name}: {failed[0].detail}")


@dataclass(frozen=True)
class ConditionSpec:
    """A contraction condition; F and phi are validated on samples."""

    kind: str
    F: Optional[FFunction] = None
    phi: Optional[PhiFunction] = None
    tau: float = 0.0
    p: float = 1.0
    lam: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown condition kind {self.kind!r}")
        if self.kind == "nadler":
            if not 0 <= self.lam < 1:
                raise ValueError(f"Nadler factor must lie in [0, 1), got {self.lam}")
            return
        if self.F is None:
            raise ValueError(f"{self.kind} condition needs an F function")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        _require(self.F.check_axioms(), f"F {self.F!r}")
        if self.kind in ("generalized", "hardy-rogers"):
            if self.phi is None:
                raise ValueError(f"{self.kind} condition needs a phi function")
            _require(self.phi.check(), f"phi {self.phi!r}")
            if not self.p >= 1:
                raise ValueError(f"p must be >= 1, got {self.p}")
        if self.kind == "hardy-rogers":
            coeffs = (self.alpha, self.beta, self.gamma, self.delta)
            if min(coeffs) < 0:
                raise ValueError("Hardy-Rogers coefficients must be nonnegative")
            total = self.alpha + self.beta + 2 * self.gamma + 2 * self.delta
            if total > 1:
                raise ValueError(f"alpha + beta + 2 gamma + 2 delta = {total} exceeds 1")

    @classmethod
    def nadler(cls, lam):
        return cls("nadler", lam=lam)

    @classmethod
    def wardowski(cls, F, tau):
        return cls("wardowski", F=F, tau=tau)

    @classmethod
    def sgroi(cls, F, tau):
        return cls("sgroi", F=F, tau=tau)

    @classmethod
    def generalized(cls, F, phi, tau, p=1.0):
        return cls("generalized", F=F, phi=phi, tau=tau, p=p)

    @classmethod
    def hardy_rogers(cls, F, phi, tau, p=1.0, alpha=0.0, beta=0.0, gamma=0.0, delta=0.0):
        return cls("hardy-rogers", F=F, phi=phi, tau=tau, p=p,
                   alpha=alpha, beta=beta, gamma=gamma, delta=delta)


@dataclass(frozen=True)
class Violation:
    x: float
    y: float
    lhs: float
    rhs: float
    gap: float


@dataclass
class CertificateReport:
    """Outcome of checking an inequality on samples.

    ``min_margin`` is rhs - lhs minimized over holding samples (F-space for
    F-type conditions).  ``skipped`` counts vacuous samples.
    """

    samples: int
    violations: List[Violation] = field(default_factory=list)
    min_margin: float = math.inf
    skipped: int = 0

    @property
    def verdict(self) -> str:
        return "violated" if self.violations else "holds-on-samples"

    @property
    def holds(self) -> bool:
        return not self.violations


class EmptySampleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Pointwise evaluators

def generalized_terms(x, y, f: PiecewiseMap, T: PiecewiseSetMap, p: float = 1.0):
    """The seven quantities inside the max of the generalized condition."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    fx, fy = f(x), f(y)
    Tx, Ty = T(x), T(y)
    a = Tx.distance(fx) ** p
    b = Ty.distance(fy) ** p
    c = abs(fy - fx) ** p
    u = Ty.distance(fx) ** p
    v = Tx.distance(fy) ** p
    h = Tx.hausdorff(Ty) ** p
    return (a, b, c, (u + v) / 2, a * b / (1 + c), u * v / (1 + c), u * v / (1 + h))


def generalized_max_term(x, y, f, T, p=1.0) -> float:
    return max(generalized_terms(x, y, f, T, p))


def hardy_rogers_rhs_arg(x, y, f, T, p=1.0, alpha=0.0, beta=0.0, gamma=0.0, delta=0.0) -> float:
    if min(alpha, beta, gamma, delta) < 0 or alpha + beta + 2 * gamma + 2 * delta > 1:
        raise ValueError("need alpha, beta, gamma, delta >= 0 with alpha + beta + 2 gamma + 2 delta <= 1")
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    fx, fy = f(x), f(y)
    Tx, Ty = T(x), T(y)
    dxy = abs(fx - fy) ** p
    a = Tx.distance(fx) ** p
    b = Ty.distance(fy) ** p
    return (alpha * dxy + beta * (1 + a) * b / (1 + dxy) + gamma * (a + b)
            + delta * (Ty.distance(fx) ** p + Tx.distance(fy) ** p))


def sgroi_M(x, y, T) -> float:
    Tx, Ty = T(x), T(y)
    return max(abs(x - y), Tx.distance(x), Ty.distance(y), (Ty.distance(x) + Tx.distance(y)) / 2)


@dataclass(frozen=True)
class KadelburgRecord:
    hausdorff: float
    d_fx_fy: float
    half_self: float
    half_cross: float

    @property
    def rhs_max(self) -> float:
        return max(self.d_fx_fy, self.half_self, self.half_cross)

    @property
    def exceeds(self) -> bool:
        """H(Tx, Ty) is at least the max, so no factor below 1 can work."""
        return self.hausdorff >= self.rhs_max and self.hausdorff > 0


def kadelburg_comparison(f, T, x, y) -> KadelburgRecord:
    fx, fy = f(x), f(y)
    Tx, Ty = T(x), T(y)
    return KadelburgRecord(
        Tx.hausdorff(Ty),
        abs(fx - fy),
        (Tx.distance(fx) + Ty.distance(fy)) / 2,
        (Ty.distance(fx) + Tx.distance(fy)) / 2,
    )


# ---------------------------------------------------------------------------
# Sampling

@dataclass(frozen=True)
class GridSpec:
    """Uniform grid over the domain plus map breakpoints and their
    ``offset`` neighbours."""

    n: int = 201
    breakpoints: bool = True
    offset: float = 1e-9


def uniform_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """n points from lo to hi; exactly representable nodes come out exact."""
    if n < 2 or lo == hi:
        return np.array([float(lo)])
    i = np.arange(n, dtype=float)
    return lo + (hi - lo) * i / (n - 1)


def sample_points(domain: ClosedSet, maps=(), grid: GridSpec = GridSpec()) -> np.ndarray:
    pts = [np.asarray(domain.endpoints(), dtype=float)]
    g = uniform_grid(domain.min, domain.max, grid.n)
    pts.append(g[[domain._covering(v) is not None for v in g]])
    if grid.breakpoints:
        bps = sorted({b for m in maps if m is not None for b in m.breakpoints})
        for b in bps:
            for v in (b - grid.offset, b, b + grid.offset):
                if v in domain:
                    pts.append(np.array([v]))
    return np.unique(np.concatenate(pts))


def _pairwise(xs, f, T, p):
    """Matrices of every distance the conditions need, over all (x_i, y_j)."""
    fx = f.evaluate_many(xs) if f is not None else xs
    sets = [T(x) for x in xs]
    uniq: dict = {}
    idx = np.array([uniq.setdefault(s, len(uniq)) for s in sets])
    U = list(uniq)
    HU = np.array([[a.hausdorff(b) for b in U] for a in U])
    DU = np.array([[s.distance(v) for s in U] for v in fx])  # d(fx_i, U_u)
    H = HU[idx[:, None], idx[None, :]]
    d_fx_Ty = DU[:, idx]  # [i, j] = d(f x_i, T y_j)
    d_fx_Tx = d_fx_Ty.diagonal().copy()
    d_fx_fy = np.abs(fx[:, None] - fx[None, :])
    return {
        "fx": fx, "sets": sets, "uniq": U, "idx": idx,
        "H": H ** p,
        "a": np.broadcast_to((d_fx_Tx ** p)[:, None], H.shape),
        "b": np.broadcast_to((d_fx_Tx ** p)[None, :], H.shape),
        "c": d_fx_fy ** p,
        "u": d_fx_Ty ** p,
        "v": d_fx_Ty.T ** p,
    }


def _max_term(M):
    a, b, c, u, v, h = M["a"], M["b"], M["c"], M["u"], M["v"], M["H"]
    return np.maximum.reduce([a, b, c, (u + v) / 2, a * b / (1 + c), u * v / (1 + c), u * v / (1 + h)])


def _hr_arg(M, cond):
    a, b, c, u, v = M["a"], M["b"], M["c"], M["u"], M["v"]
    return (cond.alpha * c + cond.beta * (1 + a) * b / (1 + c)
            + cond.gamma * (a + b) + cond.delta * (u + v))


def _report(xs, ys, lhs, rhs, active) -> CertificateReport:
    """Collect violations in grid (row-major) order."""
    n_active = int(np.count_nonzero(active))
    if n_active == 0:
        raise EmptySampleError("no sample pair makes the condition non-vacuous")
    with np.errstate(invalid="ignore"):
        bad = active & ~(lhs <= rhs)
        good = active & (lhs <= rhs)
        margins = (rhs - lhs)[good]
    rep = CertificateReport(
        samples=n_active,
        skipped=int(active.size - n_active),
        min_margin=float(margins.min()) if margins.size else math.inf,
    )
    for i, j in zip(*np.nonzero(bad)):
        l, r = float(lhs[i, j]), float(rhs[i, j])
        rep.violations.append(Violation(float(xs[i]), float(ys[i, j]), l, r, l - r))
    return rep


def certify(cond: ConditionSpec, f: Optional[PiecewiseMap], T: PiecewiseSetMap,
            grid: GridSpec = GridSpec()) -> CertificateReport:
    """Check a contraction condition on every ordered pair of sample points.

    Pairs where the left-hand distance vanishes are vacuous and counted in
    ``skipped``.  When phi of the right-hand argument is 0 while the left
    side is positive the F-inequality cannot hold (F(0+) = -inf); such
    pairs are violations with rhs = -inf.
    """
    xs = sample_points(T.domain, (f, T), grid)
    if cond.kind == "sgroi":
        return _certify_sgroi(cond, T, xs)
    if cond.kind in ("generalized", "hardy-rogers") and f is None:
        raise ValueError(f"{cond.kind} condition needs the single-valued map f")
    p = cond.p if cond.kind in ("generalized", "hardy-rogers") else 1.0
    M = _pairwise(xs, f if cond.kind in ("generalized", "hardy-rogers") else None, T, p)
    H = M["H"]
    active = H > 0
    ys = np.broadcast_to(xs[None, :], H.shape)
    if cond.kind == "nadler":
        lhs = H
        rhs = cond.lam * np.abs(xs[:, None] - xs[None, :])
    elif cond.kind == "wardowski":
        if not all(s.is_singleton for s in M["uniq"]):
            raise ValueError("Wardowski condition needs a singleton-valued T")
        lhs = cond.tau + cond.F(H)
        rhs = cond.F(np.abs(xs[:, None] - xs[None, :]))
    else:
        arg = _max_term(M) if cond.kind == "generalized" else _hr_arg(M, cond)
        lhs = cond.tau + cond.F(H)
        rhs = cond.F(np.asarray(cond.phi(arg), dtype=float))
    return _report(xs, ys, lhs, rhs, active)


def certify_log_form(cond: ConditionSpec, f: PiecewiseMap, T: PiecewiseSetMap,
                     grid: GridSpec = GridSpec()) -> CertificateReport:
    """Check H^p <= e^-tau phi(arg) directly in the metric, the form the
    generalized and Hardy-Rogers conditions take when F = ln."""
    if cond.kind not in ("generalized", "hardy-rogers"):
        raise ValueError("log form exists only for generalized and hardy-rogers conditions")
    xs = sample_points(T.domain, (f, T), grid)
    M = _pairwise(xs, f, T, cond.p)
    arg = _max_term(M) if cond.kind == "generalized" else _hr_arg(M, cond)
    rhs = math.exp(-cond.tau) * np.asarray(cond.phi(arg), dtype=float)
    ys = np.broadcast_to(xs[None, :], arg.shape)
    return _report(xs, ys, M["H"], rhs, M["H"] > 0)


def _certify_sgroi(cond, T, xs) -> CertificateReport:
    lhs_l, rhs_l, xs_l, ys_l = [], [], [], []
    for x in xs:
        for y in T(x).endpoints():
            if y not in T.domain:
                continue
            Ty = T(y)
            dyz = abs(y - Ty.nearest(y))
            xs_l.append(x)
            ys_l.append(y)
            lhs_l.append(cond.tau + cond.F(dyz) if dyz > 0 else np.nan)
            rhs_l.append(cond.F(sgroi_M(x, y, T)))
    lhs = np.array(lhs_l)[:, None]
    rhs = np.array(rhs_l)[:, None]
    return _report(np.array(xs_l), np.array(ys_l)[:, None], lhs, rhs, ~np.isnan(lhs))
