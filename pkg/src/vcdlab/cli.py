"""Batch experiment runner.

    vcdlab tightness --example grid --n 3
    vcdlab vcd --family grid --p 1 --n-min 4 --n-max 12 --out results/
    vcdlab epsnet --n 40 --eps 1/4 --trials 200 --seed 1

Exit status: 0 ok, 1 tightness mismatch, 2 configuration error,
3 precondition failure (general position, generation retries, net size).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, ceil
from pathlib import Path

from . import arrangements as arr
from . import config
from .applications import (
    NetTooLargeError,
    PreconditionError,
    check_p_general_position,
    clustered_centers,
    epsilon_net_sample,
    fractional_helly_check,
    halfplane_triple,
    kernel_trace_counts,
    membership_matrix,
    scattered_centers,
)
from .cohomology import betti
from .exactq import q, qstr
from .serialize import dumps, instance_to_json
from .vcdensity import (
    fit_vcd_slope,
    higher_order_pattern_count,
    kernel_set,
    nu_p_sweep,
    quadrant_union_cuts,
    sweep_csv,
    sweep_rows,
)

log = logging.getLogger("vcdlab")

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_PRECONDITION = 0, 1, 2, 3

COMMANDS = {
    "gen": {"example", "n", "m"},
    "kernels": {"family", "n", "m", "p"},
    "vcd": {"family", "m", "p", "q", "n_min", "n_max", "jobs"},
    "patterns": {"m", "n"},
    "epsnet": {"n", "p", "eps", "c_const", "d", "trials"},
    "helly": {"n", "p", "k", "alpha"},
    "tightness": {"example", "m", "n"},
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = None
    out_path: Path = None
    timing: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        unknown = set(self.params) - COMMANDS[self.command]
        if unknown:
            raise ConfigError(f"unknown keys for {self.command}: {sorted(unknown)}")
        if self.randomized and self.seed is None:
            raise ConfigError(f"{self.command} is randomized: pass --seed or set {config.DEFAULT_SEED_ENV}")

    @property
    def randomized(self) -> bool:
        c, p = self.command, self.params
        if c in ("epsnet", "helly", "patterns"):
            return True
        if c in ("gen", "kernels", "vcd"):
            kind = p.get("example") or p.get("family")
            return kind in ("pencil", "hyperplanes", "circles")
        return False


# -- helpers ---------------------------------------------------------------


def _need(params, key):
    if params.get(key) is None:
        raise ConfigError(f"--{key.replace('_', '-')} is required")
    return params[key]


def _report(cfg: ExperimentConfig, instance_id: str, result: dict, runtime_ms, p=None) -> dict:
    return {
        "instance_id": instance_id,
        "p": cfg.params.get("p") if p is None else p,
        "params": {k: _jsonable(v) for k, v in sorted(cfg.params.items()) if v is not None},
        "result": result,
        "seed": cfg.seed,
        "runtime_ms": runtime_ms if cfg.timing else None,
    }


def _jsonable(v):
    if isinstance(v, Fraction):
        return qstr(v)
    return v


def _emit(cfg: ExperimentConfig, name: str, text: str):
    if cfg.out_path is None:
        sys.stdout.write(text)
        return
    cfg.out_path.mkdir(parents=True, exist_ok=True)
    (cfg.out_path / name).write_text(text)
    log.info("wrote %s", cfg.out_path / name)


def _kernel_family(params, seed):
    fam = _need(params, "family")
    n = _need(params, "n")
    if fam == "grid":
        g = arr.gen_grid(n)
        return f"grid-n{n}", g.complex, arr.grid_sweep_tests(g), 1
    if fam == "pencil":
        inst = arr.gen_pencil_instance(n, seed)
        return f"pencil-n{n}-s{seed}", inst.incidence_graph, inst.tests(), 1
    if fam == "hyperplanes":
        m = params.get("m") or 2
        k, tests = arr.hyperplane_point_model(arr.gen_generic_hyperplanes(m, n + 1, seed))
        return f"hyperplanes-m{m}-n{n}-s{seed}", k, tests, 0
    raise ConfigError(f"unknown family {fam!r}")


# -- commands --------------------------------------------------------------


def cmd_gen(cfg):
    p = cfg.params
    ex = _need(p, "example")
    n = _need(p, "n")
    if ex == "grid":
        inst = arr.gen_grid(n)
    elif ex == "pencil":
        inst = arr.gen_pencil_instance(n, cfg.seed)
    elif ex == "hyperplanes":
        inst = arr.gen_generic_hyperplanes(p.get("m") or 2, n + 1, cfg.seed)
    elif ex == "circles":
        inst = halfplane_triple(scattered_centers(n, cfg.seed))
    else:
        raise ConfigError(f"unknown example {ex!r}")
    _emit(cfg, f"gen_{ex}_n{n}.json", dumps(instance_to_json(inst)))
    return EXIT_OK


def cmd_kernels(cfg):
    p = dict(cfg.params)
    t0 = time.perf_counter()
    iid, k, tests, default_p = _kernel_family(p, cfg.seed)
    deg = p.get("p")
    if deg is None:
        deg = default_p
    ks = kernel_set(k, tests, deg)
    items = sorted(ks.kernels.items(), key=lambda kv: (kv[0].dim, str(kv[1])))
    result = {
        "ambient_hp_dim": ks.ambient_hp_dim,
        "distinct_kernels": len(ks),
        "tests": len(tests),
        "kernel_dims": [kk.dim for kk, _ in items],
        "witnesses": [str(w) for _, w in items],
    }
    ms = round(1000 * (time.perf_counter() - t0))
    _emit(cfg, f"kernels_{iid}.json", dumps(_report(cfg, iid, result, ms, deg)))
    return EXIT_OK


def _product_counts(n_values):
    out = []
    for n in n_values:
        z = list(range(n))
        out.append((n, higher_order_pattern_count(z, z, quadrant_union_cuts(z, z))))
    return out


def cmd_vcd(cfg):
    p = cfg.params
    fam = _need(p, "family")
    deg = p.get("p") if p.get("p") is not None else (0 if fam in ("hyperplanes", "product") else 1)
    order = p.get("q") or 1
    lo, hi = _need(p, "n_min"), _need(p, "n_max")
    if hi < lo:
        raise ConfigError("--n-max must be >= --n-min")
    ns = list(range(lo, hi + 1))
    jobs = p.get("jobs") or os.cpu_count() or 1
    m = p.get("m") or 2
    t0 = time.perf_counter()
    if fam == "product":
        if order != 2 or deg != 0:
            raise ConfigError("the product family is the q=2, p=0 case")
        points, dim_x = _product_counts(ns), 2
    else:
        if order != 1:
            raise ConfigError("q > 1 is only available for the product family")
        gens = {
            "grid": (arr.grid_family, 1),
            "pencil": (arr.PencilSweep(cfg.seed or 0), 1),
            "hyperplanes": (arr.HyperplaneSweep(m, cfg.seed or 0), m),
            "constant": (arr.constant_family, 1),
        }
        if fam not in gens:
            raise ConfigError(f"unknown family {fam!r}")
        gen, dim_x = gens[fam]
        points = nu_p_sweep(gen, deg, ns, jobs=min(jobs, len(ns)))
    tag = f"vcd_{fam}_p{deg}_q{order}"
    _emit(cfg, tag + ".csv", sweep_csv(sweep_rows(fam, deg, order, points)))
    fit = fit_vcd_slope(points) if len(points) >= 3 else None
    summary = {
        "points": [list(x) for x in points],
        "window": [lo, hi],
        "slope": None if fit is None else round(fit.slope, 12),
        "intercept": None if fit is None else round(fit.intercept, 12),
        "r_squared": None if fit is None else round(fit.r_squared, 12),
        "bound": (deg + order) * dim_x,
    }
    ms = round(1000 * (time.perf_counter() - t0))
    _emit(cfg, tag + "_summary.json", dumps(_report(cfg, tag, summary, ms, deg)))
    return EXIT_OK


def cmd_patterns(cfg):
    p = cfg.params
    m, n = p.get("m") or 2, _need(p, "n")
    t0 = time.perf_counter()
    f = arr.gen_generic_hyperplanes(m, n + 1, cfg.seed)
    pats = sorted(str(x) for x in arr.enumerate_realizable_patterns(f))
    expected = sum(comb(n + 1, i) for i in range(m + 1))
    result = {"count": len(pats), "expected": expected, "patterns": pats}
    ms = round(1000 * (time.perf_counter() - t0))
    _emit(cfg, f"patterns_m{m}_n{n}.json", dumps(_report(cfg, f"hyperplanes-m{m}-n{n}-s{cfg.seed}", result, ms, 0)))
    return EXIT_OK


def cmd_epsnet(cfg):
    p = cfg.params
    n = p.get("n") or config.EPSNET_CIRCLES
    deg = p.get("p") if p.get("p") is not None else 1
    eps = p.get("eps") or config.EPSNET_EPS
    c = p.get("c_const") or config.EPSNET_C_CONST
    d = p.get("d") or config.EPSNET_DENSITY_BOUND
    trials = p.get("trials") or config.EPSNET_TRIALS
    t0 = time.perf_counter()
    t = halfplane_triple(scattered_centers(n, cfg.seed))
    cert = check_p_general_position(t, deg)
    if not cert.valid:
        raise PreconditionError("general position", f"violated by members {cert.max_violation}")
    memb = membership_matrix(t, deg)
    res = epsilon_net_sample(t, deg, eps, c, trials, cfg.seed, d, memb=memb)
    sizes = sorted({max(1, n // 8), max(1, n // 4), max(1, n // 2), n})
    result = {
        "net": res.net,
        "net_size": res.net_size,
        "verified": res.verified,
        "success_rate": res.success_rate,
        "heavy_tests": res.heavy,
        "tests": len(t.x_family),
        "c_const": qstr(q(c)),
        "density_bound": d,
        "trace_counts": [list(x) for x in kernel_trace_counts(memb, sizes)],
    }
    ms = round(1000 * (time.perf_counter() - t0))
    _emit(cfg, f"epsnet_n{n}_s{cfg.seed}.json", dumps(_report(cfg, f"circles-n{n}-s{cfg.seed}", result, ms, deg)))
    return EXIT_OK


def cmd_helly(cfg):
    p = cfg.params
    n = _need(p, "n")
    deg = p.get("p") if p.get("p") is not None else 1
    k = p.get("k") or config.HELLY_K
    alpha = p.get("alpha") or config.HELLY_ALPHA
    t0 = time.perf_counter()
    members = n + 1
    t = halfplane_triple(clustered_centers(members, ceil(3 * members / 4), cfg.seed))
    cert = check_p_general_position(t, deg)
    if not cert.valid:
        raise PreconditionError("general position", f"violated by members {cert.max_violation}")
    res = fractional_helly_check(t, deg, k, alpha)
    result = {
        "hypothesis_holds": res.hypothesis_holds,
        "beta_achieved": qstr(res.beta_achieved),
        "covered_tuples": res.covered,
        "total_tuples": res.total,
        "best_test": t.x_labels[res.best_x] if res.best_x >= 0 else None,
    }
    ms = round(1000 * (time.perf_counter() - t0))
    _emit(cfg, f"helly_n{n}_s{cfg.seed}.json", dumps(_report(cfg, f"clustered-n{n}-s{cfg.seed}", result, ms, deg)))
    return EXIT_OK


def tightness_result(example: str, n: int, m: int = 2, seed: int = 0) -> dict:
    """Recompute one tightness claim and judge it against its closed form."""
    if example == "hyperplanes":
        got = len(arr.enumerate_realizable_patterns(arr.gen_generic_hyperplanes(m, n + 1, seed)))
        want = sum(comb(n + 1, i) for i in range(m + 1))
        return {"claim": f"patterns of {n + 1} generic hyperplanes in P^{m}", "value": got,
                "expected": want, "pass": got == want}
    if example == "grid":
        g = arr.gen_grid(n)
        h1 = betti(g.complex, 1)
        ks = kernel_set(g.complex, arr.grid_sweep_tests(g), 1)
        dims = sorted({kk.dim for kk in ks.kernels})
        top = (n - 1) ** 2
        ok = h1 == top and dims == list(range(top + 1)) and len(ks) >= top + 1
        return {"claim": f"grid n={n}: dim H^1 = (n-1)^2 and kernel dims fill 0..(n-1)^2",
                "value": {"h1": h1, "kernel_dims": dims, "distinct_kernels": len(ks)},
                "expected": {"h1": top, "kernel_dims": [0, top]}, "pass": ok}
    if example == "pencil":
        inst = arr.gen_pencil_instance(n, seed)
        ks = kernel_set(inst.incidence_graph, inst.tests(), 1)
        want = comb(n, 2) + 1
        return {"claim": f"pencil n={n}: pair kernels distinct and differ from the generic one",
                "value": len(ks), "expected": want, "pass": len(ks) >= want}
    raise ConfigError(f"unknown example {example!r}")


TIGHTNESS_DEGREE = {"hyperplanes": 0, "grid": 1, "pencil": 1}


def cmd_tightness(cfg):
    p = cfg.params
    ex, n = _need(p, "example"), _need(p, "n")
    seed = cfg.seed if cfg.seed is not None else 0
    t0 = time.perf_counter()
    res = tightness_result(ex, n, p.get("m") or 2, seed)
    ms = round(1000 * (time.perf_counter() - t0))
    verdict = "PASS" if res["pass"] else "FAIL"
    if cfg.out_path is not None:
        _emit(cfg, f"tightness_{ex}_n{n}.json", dumps(_report(cfg, f"{ex}-n{n}", res, ms, TIGHTNESS_DEGREE.get(ex))))
    print(f"{ex} n={n}: {res['value']} (expected {res['expected']}) {verdict}")
    return EXIT_OK if res["pass"] else EXIT_MISMATCH


HANDLERS = {
    "gen": cmd_gen,
    "kernels": cmd_kernels,
    "vcd": cmd_vcd,
    "patterns": cmd_patterns,
    "epsnet": cmd_epsnet,
    "helly": cmd_helly,
    "tightness": cmd_tightness,
}


def run(cfg: ExperimentConfig) -> int:
    try:
        cfg.validate()
        return HANDLERS[cfg.command](cfg)
    except ConfigError as e:
        log.error("config error: %s", e)
        return EXIT_CONFIG
    except (PreconditionError, NetTooLargeError, arr.GenerationError) as e:
        log.error("precondition failed: %s", e)
        return EXIT_PRECONDITION


# -- argument parsing ------------------------------------------------------


def _rational(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {s!r}") from None


FLAGS = {
    "example": dict(choices=["grid", "pencil", "hyperplanes", "circles"]),
    "family": dict(choices=["grid", "pencil", "hyperplanes", "constant", "product"]),
    "m": dict(type=int),
    "n": dict(type=int),
    "n_min": dict(type=int),
    "n_max": dict(type=int),
    "p": dict(type=int, choices=[0, 1, 2]),
    "q": dict(type=int, choices=[1, 2]),
    "eps": dict(type=_rational),
    "c_const": dict(type=_rational),
    "d": dict(type=int),
    "alpha": dict(type=_rational),
    "k": dict(type=int),
    "trials": dict(type=int),
    "jobs": dict(type=int),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vcdlab", description="VC-density experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, keys in COMMANDS.items():
        sp = sub.add_parser(name)
        for key in sorted(keys):
            sp.add_argument("--" + key.replace("_", "-"), dest=key, **FLAGS[key])
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", type=Path, help="output directory (stdout if omitted)")
        sp.add_argument("--timing", action="store_true", help="record runtime_ms in reports")
        sp.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    seed = ns.seed
    if seed is None and os.environ.get(config.DEFAULT_SEED_ENV):
        try:
            seed = int(os.environ[config.DEFAULT_SEED_ENV])
        except ValueError:
            raise ConfigError(f"{config.DEFAULT_SEED_ENV} must be an integer") from None
    params = {k: getattr(ns, k) for k in COMMANDS[ns.command] if getattr(ns, k) is not None}
    return ExperimentConfig(ns.command, params, seed, ns.out, ns.timing)


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage and 0 for --help
        return EXIT_CONFIG if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
    except ConfigError as e:
        log.error("config error: %s", e)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
