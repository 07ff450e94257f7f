"""Command-line front end.

    hybridfp certify        --input section-3 [--tau T] [--p P] [--grid N]
    hybridfp pairs          --input example-1.4
    hybridfp solve-dp       --input dp-demo [--tol X] [--grid N]
    hybridfp solve-volterra --input volterra-exp [--tol X] [--grid N]
    hybridfp repro-paper    [--expect NAME=VALUE ...]

``--input`` takes a config path or the name of a bundled config.  Config
files hold ``key: value`` lines; a line starting with whitespace continues
the previous value and ``#`` starts a comment.  Unknown keys are rejected.

Exit codes: 0 holds / converged / all rows pass, 1 violated / not
converged / some row fails, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from importlib import resources
from pathlib import Path
from typing import Dict, List

import numpy as np

from . import contraction as cl
from .dp import DPInstance, NotConverged as DPNotConverged, check_solution, solve_successive
from .dsl import DSLError, parse_expr, parse_multi, parse_single
from .pairs import HybridPair, pair_report
from .sets import ClosedSet, hausdorff
from .volterra import RULES, InclusionInstance, NotConverged as VNotConverged, solve_inclusion

BUNDLED = ("section-3", "example-1.3", "example-1.4", "dp-demo", "volterra-exp")

MAP_KEYS = {
    "name", "f", "g", "T", "condition", "F", "F_k", "phi", "tau", "p", "lam",
    "alpha", "beta", "gamma", "delta", "grid", "form", "resolution",
}
DP_KEYS = {"name", "W", "D", "g", "G1", "G2", "tau", "n_W", "n_D", "tol", "max_iters", "operator", "exact"}
VOLTERRA_KEYS = {"name", "q", "k", "sigma", "F", "n", "rule", "tol", "max_iters", "exact"}


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Config files

_KEY = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*:(.*)")


def parse_config(text: str, allowed=None) -> Dict[str, str]:
    out: Dict[str, str] = {}
    key = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line[0].isspace():
            if key is None:
                raise ConfigError(f"line {lineno}: continuation before any key")
            out[key] += " " + line.strip()
            continue
        m = _KEY.fullmatch(line)
        if not m:
            raise ConfigError(f"line {lineno}: expected 'key: value'")
        key = m.group(1)
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if allowed is not None and key not in allowed:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = m.group(2).strip()
    return out


def bundled_text(name: str) -> str:
    return resources.files("hybridfp").joinpath("data", f"{name}.cfg").read_text()


def load_config(source: str, allowed=None) -> Dict[str, str]:
    if source in BUNDLED:
        text = bundled_text(source)
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {source}: {exc.strerror}") from None
    return parse_config(text, allowed)


def _num(cfg, key, default=None, kind=float):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing key {key!r}")
        return default
    try:
        return kind(cfg[key])
    except ValueError:
        raise ConfigError(f"{key}: cannot read {cfg[key]!r} as {kind.__name__}") from None


def _need(cfg, key):
    if key not in cfg:
        raise ConfigError(f"missing key {key!r}")
    return cfg[key]


def _closed_set(text: str) -> ClosedSet:
    return parse_expr(text, (), kind="set")()


# ---------------------------------------------------------------------------
# Output

def _clean(v):
    if isinstance(v, (bool, str)) or v is None:
        return v
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(v, ClosedSet):
        return str(v)
    return str(v)


class Emitter:
    """Writes records as JSON lines (full precision) or as aligned human
    text with 6 significant digits."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def record(self, kind: str, **fields):
        rec = {"record": kind}
        rec.update((k, _clean(v)) for k, v in fields.items())
        if self.fmt == "records":
            self.stream.write(json.dumps(rec) + "\n")
        else:
            body = "  ".join(f"{k}={_human(v)}" for k, v in rec.items() if k != "record")
            self.stream.write(f"{kind:<10} {body}\n")


def _human(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if v is None:
        return "-"
    return str(v)


# ---------------------------------------------------------------------------
# Commands

def _maps_config(args):
    return load_config(args.input, MAP_KEYS)


def _build_condition(cfg, args) -> cl.ConditionSpec:
    kind = cfg.get("condition", "generalized")
    if kind == "nadler":
        return cl.ConditionSpec.nadler(_num(cfg, "lam"))
    Fname = cfg.get("F", "log")
    F = (cl.FFunction.custom(Fname, _num(cfg, "F_k")) if "F_k" in cfg else cl.FFunction.builtin(Fname))
    tau = args.tau if args.tau is not None else _num(cfg, "tau")
    p = args.p if args.p is not None else _num(cfg, "p", 1.0)
    if kind in ("wardowski", "sgroi"):
        return cl.ConditionSpec(kind, F=F, tau=tau)
    phi = cl.PhiFunction(_need(cfg, "phi"))
    return cl.ConditionSpec(
        kind, F=F, phi=phi, tau=tau, p=p,
        alpha=_num(cfg, "alpha", 0.0), beta=_num(cfg, "beta", 0.0),
        gamma=_num(cfg, "gamma", 0.0), delta=_num(cfg, "delta", 0.0),
    )


def cmd_certify(args, out: Emitter) -> int:
    cfg = _maps_config(args)
    T = parse_multi(_need(cfg, "T"))
    f = parse_single(cfg["f"]) if "f" in cfg else None
    cond = _build_condition(cfg, args)
    n = args.grid or _num(cfg, "grid", 201, int)
    grid = cl.GridSpec(n)
    if cfg.get("form", "f-space") == "log":
        rep = cl.certify_log_form(cond, f, T, grid)
    else:
        rep = cl.certify(cond, f, T, grid)
    out.record(
        "certify", name=cfg.get("name", ""), condition=cond.kind,
        F=cond.F.name if cond.F else None, phi=cond.phi.text if cond.phi else None,
        tau=cond.tau, p=cond.p, grid=n, seed=args.seed, samples=rep.samples, skipped=rep.skipped,
        violations=len(rep.violations), min_margin=rep.min_margin, verdict=rep.verdict,
    )
    for v in rep.violations:
        out.record("witness", x=v.x, y=v.y, lhs=v.lhs, rhs=v.rhs, gap=v.gap)
    return 0 if rep.holds else 1


def _pair_records(pair: HybridPair, resolution: float, out: Emitter, label: str):
    rep = pair_report(pair, resolution)
    ea = rep.ea
    out.record(
        "pair", name=label, space=rep.space_kind,
        coincidence=rep.coincidence, common_fixed=rep.common_fixed,
        **rep.flags(),
        idempotency_counterexample=rep.idempotency.counterexample,
        idempotency_witness=rep.idempotency.witness,
        ea_witness=ea.ea_witness.describe() if ea.ea_witness else None,
        clr_witness=ea.clr_witness.describe() if ea.clr_witness else None,
        remark_implication=rep.remark_implication_holds,
    )
    return rep


def cmd_pairs(args, out: Emitter) -> int:
    cfg = _maps_config(args)
    T = parse_multi(_need(cfg, "T"))
    name = cfg.get("name", "pair")
    span = T.domain.max - T.domain.min
    resolution = span / (args.grid - 1) if args.grid and span > 0 else _num(cfg, "resolution", 1e-3)
    ok = True
    for key in ("f", "g"):
        if key in cfg:
            pair = HybridPair(parse_single(cfg[key]), T, f"{name}:({key},T)")
            ok &= _pair_records(pair, resolution, out, pair.name).remark_implication_holds
    if "f" not in cfg and "g" not in cfg:
        raise ConfigError("missing key 'f'")
    return 0 if ok else 1


def cmd_solve_dp(args, out: Emitter) -> int:
    cfg = load_config(args.input, DP_KEYS)
    n_W = args.grid or _num(cfg, "n_W", 201, int)
    n_D = args.grid or _num(cfg, "n_D", 201, int)
    inst = DPInstance(_closed_set(_need(cfg, "W")), _closed_set(_need(cfg, "D")), _need(cfg, "g"),
                      _need(cfg, "G1"), _need(cfg, "G2"), _need(cfg, "tau"), n_W, n_D)
    tol = args.tol if args.tol is not None else _num(cfg, "tol", 1e-8)
    op = _num(cfg, "operator", 1, int)
    try:
        sol = solve_successive(inst, op, tol=tol, max_iters=_num(cfg, "max_iters", 500, int))
    except DPNotConverged as exc:
        sol = exc.result
    ratios = sol.contraction_ratios()
    extra = {}
    if "exact" in cfg:
        exact = np.broadcast_to(parse_expr(cfg["exact"], ("x",))(x=inst.xs), inst.xs.shape)
        extra["error_vs_exact"] = float(np.max(np.abs(sol.h - exact)))
    chk = check_solution(inst, sol.h, max(tol, 1e-12) * 10)
    out.record(
        "dp", name=cfg.get("name", ""), operator=op, states=inst.n_states, decisions=inst.ys.size,
        iterations=sol.iterations, residual=sol.residual, converged=sol.converged,
        max_ratio=float(ratios.max()) if ratios.size else None, snap_error=inst.snap_error,
        t1_t2_gap=chk["t1_t2_gap"], **extra,
    )
    for x, h in zip(inst.xs, sol.h):
        out.record("node", x=x, h=h)
    return 0 if sol.converged else 1


def cmd_solve_volterra(args, out: Emitter) -> int:
    cfg = load_config(args.input, VOLTERRA_KEYS)
    n = args.grid or _num(cfg, "n", 1000, int)
    rule = cfg.get("rule", "nearest-to-current")
    if rule not in RULES:
        raise ConfigError(f"rule must be one of {RULES}")
    inst = InclusionInstance(_need(cfg, "q"), _need(cfg, "k"), _need(cfg, "sigma"), _need(cfg, "F"), n)
    tol = args.tol if args.tol is not None else _num(cfg, "tol", 1e-12)
    try:
        sol = solve_inclusion(inst, rule, tol=tol, max_iters=_num(cfg, "max_iters", 500, int))
    except VNotConverged as exc:
        sol = exc.result
    extra = {}
    if "exact" in cfg:
        exact = np.broadcast_to(parse_expr(cfg["exact"], ("t",))(t=inst.t), inst.t.shape)
        extra["error_vs_exact"] = float(np.max(np.abs(sol.x - exact)))
    out.record(
        "volterra", name=cfg.get("name", ""), n=n, rule=rule, iterations=sol.iterations,
        residual=sol.residual, converged=sol.converged, **extra,
    )
    for t, x in zip(inst.t, sol.x):
        out.record("node", t=t, x=x)
    return 0 if sol.converged else 1


# ---------------------------------------------------------------------------
# Reproduction table

def _bundle_pair(name: str, key: str = "f") -> HybridPair:
    cfg = parse_config(bundled_text(name), MAP_KEYS)
    return HybridPair(parse_single(cfg[key]), parse_multi(cfg["T"]), f"{name}:({key},T)")


def repro_rows() -> List[tuple]:
    """(quantity, expected, computed, tolerance) for every published example
    value; tolerance None means exact comparison."""
    rows = []
    add = lambda q, e, c, tol=None: rows.append((q, e, c, tol))

    add("H([1,2],[0,1/2])", 1.5, hausdorff(ClosedSet.interval(1, 2), ClosedSet.interval(0, 0.5)))
    add("d(3,[0,1/2])", 2.5, ClosedSet.interval(0, 0.5).distance(3.0))

    p13 = pair_report(_bundle_pair("example-1.3"))
    fl = p13.flags()
    add("example-1.3 coincidence", "{1} | {2}", str(p13.coincidence))
    add("example-1.3 common_fixed", "{1}", str(p13.common_fixed))
    for k in ("commuting", "weakly_commuting", "weakly_compatible", "coincidentally_idempotent"):
        add(f"example-1.3 {k}", False, fl[k])
    add("example-1.3 occasionally_coincidentally_idempotent", True, fl["occasionally_coincidentally_idempotent"])
    add("example-1.3 idempotent_at", 1.0, p13.idempotency.witness)

    cfg = parse_config(bundled_text("section-3"), MAP_KEYS)
    f, T = parse_single(cfg["f"]), parse_multi(cfg["T"])
    p3 = pair_report(HybridPair(f, T, "section-3"))
    fl = p3.flags()
    add("section-3 f_range_closed", True, fl["f_range_closed"])
    add("section-3 coincidence", "[1, 2]", str(p3.coincidence))
    add("section-3 clr_f", True, fl["clr_f"])
    add("section-3 coincidentally_idempotent", False, fl["coincidentally_idempotent"])
    add("section-3 occasionally_coincidentally_idempotent", True, fl["occasionally_coincidentally_idempotent"])
    add("section-3 idempotent_at", 1.5, p3.idempotency.witness, 1e-6)
    cfp = p3.common_fixed
    add("section-3 common_fixed_point", 1.5, cfp.min if cfp is not None and cfp.is_singleton else None, 1e-6)
    for p in (1, 2, 3):
        cond = cl.ConditionSpec.generalized(cl.FFunction.log(), cl.PhiFunction("0.9*t"), 0.2, p)
        add(f"section-3 certify tau=0.2 p={p}", "holds-on-samples", cl.certify(cond, f, T).verdict)
    kad = cl.kadelburg_comparison(f, T, 1.0, 3.0)
    add("section-3 H(T1,T3)", 1.5, kad.hausdorff)
    add("section-3 d(f1,f3)", 1.0, kad.d_fx_fy)
    add("section-3 half d(f1,T1)+d(f3,T3)", 1.25, kad.half_self)
    add("section-3 half d(f1,T3)+d(f3,T1)", 1.25, kad.half_cross)

    r_f = pair_report(_bundle_pair("example-1.4", "f"))
    r_g = pair_report(_bundle_pair("example-1.4", "g"))
    add("example-1.4 (f,T) property_ea", True, r_f.ea.ea)
    add("example-1.4 (f,T) clr_f", False, r_f.ea.clr_f)
    add("example-1.4 (g,T) clr_g", True, r_g.ea.clr_f)
    add("remark implication on bundled pairs", True,
        all(r.remark_implication_holds for r in (p13, p3, r_f, r_g)))
    return rows


def _parse_value(text: str):
    low = text.strip().lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return float(text)
    except ValueError:
        return text.strip()


def _matches(expected, computed, tol) -> bool:
    if isinstance(expected, bool) or isinstance(computed, bool) or computed is None:
        return expected == computed
    if isinstance(expected, float) and isinstance(computed, (int, float)):
        return abs(expected - computed) <= (tol or 0.0)
    return expected == computed


def cmd_repro_paper(args, out: Emitter) -> int:
    overrides = {}
    for item in args.expect or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--expect needs NAME=VALUE, got {item!r}")
        overrides[name.strip()] = _parse_value(val)
    rows = repro_rows()
    names = {r[0] for r in rows}
    unknown = set(overrides) - names
    if unknown:
        raise ConfigError(f"--expect names unknown rows: {sorted(unknown)}")
    failed = 0
    for q, e, c, tol in rows:
        e = overrides.get(q, e)
        ok = _matches(e, c, tol)
        failed += not ok
        out.record("repro", quantity=q, expected=e, computed=c, passed=ok)
    out.record("summary", rows=len(rows), failed=failed)
    return 0 if failed == 0 else 1


# ---------------------------------------------------------------------------

COMMANDS = {
    "certify": cmd_certify,
    "pairs": cmd_pairs,
    "solve-dp": cmd_solve_dp,
    "solve-volterra": cmd_solve_volterra,
    "repro-paper": cmd_repro_paper,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hybridfp", description="Hybrid-pair fixed point toolkit.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--input", help=f"config path or bundled name ({', '.join(BUNDLED)})")
    ap.add_argument("--grid", type=int, help="grid size override")
    ap.add_argument("--tol", type=float, help="tolerance override")
    ap.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")
    ap.add_argument("--format", choices=("human", "records"), default="human")
    ap.add_argument("--p", type=float, help="exponent p override for certify")
    ap.add_argument("--tau", type=float, help="tau override for certify")
    ap.add_argument("--expect", action="append", metavar="NAME=VALUE",
                    help="repro-paper: replace the expected value of a row")
    return ap


def main(argv=None, stream=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    out = Emitter(args.format, stream)
    if args.command != "repro-paper" and not args.input:
        sys.stderr.write(f"hybridfp {args.command}: --input is required\n")
        return 2
    if args.grid is not None and args.grid < 2:
        sys.stderr.write("hybridfp: --grid must be at least 2\n")
        return 2
    try:
        code = COMMANDS[args.command](args, out)
        out.stream.flush()
        return code
    except (ConfigError, DSLError, ValueError) as exc:
        sys.stderr.write(f"hybridfp {args.command}: {exc}\n")
        return 2
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error of ours
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
