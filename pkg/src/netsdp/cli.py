"""Command-line front end: single tests, visibility bisection and efficiency grids."""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from netsdp import qsim
from netsdp.distribution import DistributionError, DistributionTable, uniform
from netsdp.moment import assemble, instantiate, problem_stats
from netsdp.scenario import LevelSpec, Scenario, ScenarioError, build_generators
from netsdp.sdp import INFEASIBILITY_EPS, NUMERICAL_FAILURE, OPTIMAL, SdpProblem, solve
from netsdp.sdpa import write_sdpa

log = logging.getLogger("netsdp")

INCOMPATIBLE = "incompatible"
NOT_REFUTED = "not refuted at this level"
INCONCLUSIVE = "inconclusive"

SWAP_FIELDS = ("eta_a", "eta_c", "theta_ab", "theta_bc", "alpha0", "alpha1")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    scenario: Scenario
    level: LevelSpec
    distribution: dict = field(default_factory=lambda: {"family": "P22", "v": 1.0})
    gap_tol: float = None
    max_iter: int = 200
    eps: float = INFEASIBILITY_EPS
    output: str = None

    def echo(self) -> dict:
        return {"scenario": self.scenario.to_dict(), "level": self.level.to_dict(),
                "distribution": self.distribution, "gap_tol": self.gap_tol,
                "max_iter": self.max_iter, "eps": self.eps}


def _load_json(text_or_path):
    if isinstance(text_or_path, dict):
        return text_or_path
    s = str(text_or_path).strip()
    try:
        if s.startswith("{"):
            return json.loads(s)
        return json.loads(Path(s).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {s!r}: {exc}") from exc


def make_distribution(spec: dict) -> DistributionTable:
    """Distribution from a generator spec or an inline table."""
    try:
        if "inputs" in spec:
            return DistributionTable.from_dict(spec)
        family = spec.get("family")
        if family == "P22":
            return qsim.p22_family(float(spec.get("v", 1.0)))
        if family == "swap":
            cfg = qsim.SwapConfig(**{k: float(spec[k]) for k in SWAP_FIELDS if k in spec})
            return qsim.swap_distribution(cfg)
        if family == "file":
            return DistributionTable.load(spec["path"])
        if family == "mix":
            # v * target + (1 - v) * uniform noise
            target = make_distribution(spec["target"])
            noise = uniform(target.inputs, target.outputs)
            return target.mix(noise, float(spec["v"]))
    except (KeyError, TypeError, ValueError, OSError) as exc:
        raise ConfigError(f"bad distribution spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown distribution family in {spec!r}")


@lru_cache(maxsize=8)
def _symbolic(scenario_json: str, level_json: str):
    scenario = Scenario.from_dict(json.loads(scenario_json))
    level = LevelSpec.from_dict(json.loads(level_json))
    return assemble(build_generators(scenario, level), scenario)


def symbolic_for(config: RunConfig):
    return _symbolic(json.dumps(config.scenario.to_dict(), sort_keys=True),
                     json.dumps(config.level.to_dict(), sort_keys=True))


def verdict_of(status: str, t_star: float, eps: float) -> str:
    if t_star >= -eps:
        # t_star is always a certified lower bound on the optimum
        return NOT_REFUTED
    if status == OPTIMAL:
        return INCOMPATIBLE
    return INCONCLUSIVE


def run_solve(config: RunConfig, dist: DistributionTable = None) -> dict:
    """Build, instantiate and solve one program; JSON-ready report."""
    symbolic = symbolic_for(config)
    if dist is None:
        dist = make_distribution(config.distribution)
    try:
        inst = instantiate(symbolic, dist)
    except DistributionError as exc:
        raise ConfigError(str(exc)) from exc
    problem = SdpProblem.from_instantiated(inst)
    kwargs = {"max_iter": config.max_iter}
    if config.gap_tol is not None:
        kwargs["gap_tol"] = config.gap_tol
    report = solve(problem, **kwargs)
    return {
        "t_star": report.t_star,
        "gap": report.gap,
        "status": report.status,
        "verdict": verdict_of(report.status, report.t_star, config.eps),
        "dimension": problem.n,
        "variables": problem.m,
        "config_echo": config.echo(),
    }


def _visibility_config(config: RunConfig, v: float) -> RunConfig:
    base = config.distribution
    if base.get("family") == "P22":
        dist = {"family": "P22", "v": v}
    else:
        dist = {"family": "mix", "v": v, "target": base}
    return replace(config, distribution=dist)


def bisect_visibility(config: RunConfig, lo: float = 0.0, hi: float = 1.0,
                      tol: float = 1e-3) -> dict:
    """Bisect the visibility at which the program certifies incompatibility."""
    if not 0.0 <= lo < hi <= 1.0:
        raise ConfigError(f"bad bracket [{lo}, {hi}]")
    if tol <= 0:
        raise ConfigError("tolerance must be positive")

    def incompatible(v):
        rep = run_solve(_visibility_config(config, v))
        log.info("v=%.6f  t*=%.3e  %s", v, rep["t_star"], rep["verdict"])
        if rep["status"] == NUMERICAL_FAILURE:
            raise ConfigError(f"numerical failure at v={v}")
        rows.append({"v": v, "t_star": rep["t_star"], "status": rep["status"],
                     "verdict": rep["verdict"]})
        return rep["verdict"] == INCOMPATIBLE

    rows = []
    if incompatible(lo):
        raise ConfigError(f"lower end v={lo} is already incompatible")
    if not incompatible(hi):
        raise ConfigError(f"upper end v={hi} is not refuted")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if incompatible(mid):
            hi = mid
        else:
            lo = mid
    return {"threshold": (lo + hi) / 2, "bracket": [lo, hi], "tolerance": tol, "rows": rows,
            "config_echo": config.echo()}


# -- grids -----------------------------------------------------------------------

def parse_axis(text: str):
    """``0.61`` | ``0.5,0.6`` | ``start:stop:num`` (inclusive linspace) | ``=field`` (tie).

    ``pi`` may appear in numbers, e.g. ``pi/4``.
    """
    text = text.strip()
    if text.startswith("="):
        name = text[1:]
        if name not in SWAP_FIELDS:
            raise ConfigError(f"cannot tie to unknown field {name!r}")
        return name

    def num(s):
        if not re.fullmatch(r"[\d.eE+\-*/() ]*(pi)?[\d.eE+\-*/() ]*", s.strip()):
            raise ConfigError(f"bad number {s!r}")
        try:
            return float(eval(s, {"__builtins__": {}}, {"pi": math.pi}))  # noqa: S307
        except Exception as exc:
            raise ConfigError(f"bad number {s!r}") from exc

    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"bad range {text!r}")
        return [float(x) for x in np.linspace(num(parts[0]), num(parts[1]), int(parts[2]))]
    return [num(s) for s in text.split(",") if s.strip()]


def grid_points(axes: dict):
    """Axis-major Cartesian product in SWAP_FIELDS order, ties resolved."""
    free = [f for f in SWAP_FIELDS if isinstance(axes.get(f), list)]
    for combo in itertools.product(*(axes[f] for f in free)):
        point = dict(zip(free, combo))
        for f in SWAP_FIELDS:
            if isinstance(axes.get(f), str):
                point[f] = point[axes[f]]
        yield point


def _scan_point(args):
    config, point = args
    dist_spec = {"family": "swap", **point}
    try:
        rep = run_solve(replace(config, distribution=dist_spec))
        return {**point, "t_star": rep["t_star"], "status": rep["status"], "verdict": rep["verdict"]}
    except Exception as exc:  # recorded, not dropped
        return {**point, "t_star": float("nan"), "status": f"error: {exc}", "verdict": INCONCLUSIVE}


def threads() -> int:
    try:
        return max(1, int(os.environ.get("NETSDP_THREADS", "1")))
    except ValueError:
        return 1


def scan_grid(config: RunConfig, axes: dict) -> list:
    """One row per grid point, in deterministic axis-major order."""
    defaults = {"eta_a": [1.0], "eta_c": [1.0], "theta_ab": [math.pi / 4],
                "theta_bc": [math.pi / 4], "alpha0": [math.pi / 4], "alpha1": [math.pi / 4]}
    full = {**defaults, **axes}
    for f, a in full.items():
        if isinstance(a, str) and a not in SWAP_FIELDS:
            raise ConfigError(f"bad tie {f} -> {a}")
        if isinstance(a, str) and isinstance(full[a], str):
            raise ConfigError("ties must point at a free axis")
    points = list(grid_points(full))
    tasks = [(config, p) for p in points]
    workers = threads()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_point, tasks))
    return [_scan_point(t) for t in tasks]


CSV_FIELDS = ["eta_a", "eta_c", "theta_ab", "theta_bc", "alpha0", "alpha1", "t_star", "verdict"]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([repr(float(r[f])) if f != "verdict" else r[f] for f in CSV_FIELDS])
    return buf.getvalue()


# -- argument handling -------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_common(p, need_dist=True):
    p.add_argument("-c", "--scenario", required=True, help="scenario JSON file or inline JSON")
    p.add_argument("-l", "--level", required=True, help="level-spec JSON file or inline JSON")
    if need_dist:
        p.add_argument("-d", "--distribution", default='{"family": "P22", "v": 1.0}',
                       help="distribution spec (family or table) as file or inline JSON")
    p.add_argument("--mode", choices=["quantum", "classical"], help="override the scenario mode")
    p.add_argument("--gap-tol", type=float, default=None,
                   help="absolute duality-gap tolerance (default: $NETSDP_GAP_TOL or 1e-9)")
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--eps", type=float, default=INFEASIBILITY_EPS,
                   help="incompatibility threshold on t* (default 1e-6)")
    p.add_argument("-o", "--output", help="write the result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netsdp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("solve", help="test one distribution")
    _add_common(p)
    p.add_argument("--v", type=float, dest="visibility",
                   help="visibility (P22 family, or mixes the target with white noise)")

    p = sub.add_parser("scan-visibility", help="bisect the incompatibility threshold in v")
    _add_common(p)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-3)

    p = sub.add_parser("scan-efficiency", help="grid over swap parameters, CSV output")
    _add_common(p, need_dist=False)
    for f in SWAP_FIELDS:
        p.add_argument("--" + f.replace("_", "-"), dest=f,
                       help="value, list a,b,c, range start:stop:num, or =other_field")

    p = sub.add_parser("export-sdpa", help="write the program in SDPA sparse format")
    _add_common(p)
    p.add_argument("--v", type=float, dest="visibility")

    p = sub.add_parser("stats", help="matrix dimension, variable and structural-zero counts")
    _add_common(p, need_dist=False)
    return parser


def _config(args) -> RunConfig:
    try:
        scenario = Scenario.from_dict(_load_json(args.scenario))
        level = LevelSpec.from_dict(_load_json(args.level))
    except ScenarioError as exc:
        raise ConfigError(str(exc)) from exc
    if args.mode:
        scenario = scenario.with_mode(args.mode)
    dist = _load_json(args.distribution) if getattr(args, "distribution", None) else None
    cfg = RunConfig(scenario, level, dist or {"family": "P22", "v": 1.0},
                    args.gap_tol, args.max_iter, args.eps, args.output)
    if getattr(args, "visibility", None) is not None:
        cfg = _visibility_config(cfg, args.visibility)
    return cfg


def _emit(text: str, path):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.WARNING - 10 * args.verbose,
                            format="%(levelname)s %(name)s: %(message)s")
        if not args.command:
            parser.print_help()
            return 1
        cfg = _config(args)
        if args.command == "solve":
            rep = run_solve(cfg)
            _emit(json.dumps(rep, indent=2, sort_keys=True) + "\n", cfg.output)
            return 2 if rep["status"] == NUMERICAL_FAILURE else 0
        if args.command == "scan-visibility":
            res = bisect_visibility(cfg, args.lo, args.hi, args.tol)
            _emit(json.dumps(res, indent=2, sort_keys=True) + "\n", cfg.output)
            return 0
        if args.command == "scan-efficiency":
            axes = {f: parse_axis(getattr(args, f)) for f in SWAP_FIELDS
                    if getattr(args, f) is not None}
            rows = scan_grid(cfg, axes)
            _emit(rows_to_csv(rows), cfg.output)
            return 2 if any(r["status"] == NUMERICAL_FAILURE for r in rows) else 0
        if args.command == "export-sdpa":
            inst = instantiate(symbolic_for(cfg), make_distribution(cfg.distribution))
            _emit(write_sdpa(SdpProblem.from_instantiated(inst)), cfg.output)
            return 0
        if args.command == "stats":
            n, m, zeros = problem_stats(symbolic_for(cfg))
            _emit(json.dumps({"dimension": n, "variables": m, "structural_zeros": zeros},
                             sort_keys=True) + "\n", cfg.output)
            return 0
    except (ConfigError, ScenarioError, DistributionError) as exc:
        print(f"netsdp: error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
