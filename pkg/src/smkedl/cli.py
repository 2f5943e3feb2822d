"""Command-line front end: ``smkedl {generate,run,sweep,verify}``.

Exit codes: 0 ok, 2 parse error, 3 vacuous instance, 4 invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .edl import EdlConfig, ExactEstimator, FixedEstimator, edl_solve
from .generators import KINDS, GeneratorConfig, generate_instance
from .instance_io import dumps_instance, instance_digest, load_instance
from .objectives import check_normalization, check_submodularity
from .oracle import (ContractViolation, InstanceFormatError, InvalidObjectiveError,
                     Solution, VacuousInstanceError, normalize_instance)
from .reference import (BRUTE_FORCE_MAX_N, CSV_COLUMNS, ReportRow, approximation_ratio,
                        brute_force, greedy_plus_singleton, random_instance_sweep)

EXIT_OK, EXIT_PARSE, EXIT_VACUOUS, EXIT_VIOLATION = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _budget_rule(text):
    rule, _, value = text.partition(":")
    if rule not in ("fraction", "max_cost_multiple") or not value:
        raise argparse.ArgumentTypeError(f"expected fraction:X or max_cost_multiple:X, got {text}")
    return rule, float(value)


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _generator_args(p):
    p.add_argument("--kind", choices=KINDS, default="cut")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--cost-dist", choices=("uniform", "correlated"), default="uniform")
    p.add_argument("--cost-range", type=lambda s: tuple(float(x) for x in s.split(",")),
                   default=(1.0, 10.0), help="LOW,HIGH")
    p.add_argument("--budget-rule", type=_budget_rule, default=("fraction", 0.3),
                   help="fraction:X (of total cost) or max_cost_multiple:X")


def _config_from_args(args, seed):
    lo, hi = args.cost_range
    rule, value = args.budget_rule
    return GeneratorConfig(kind=args.kind, n=args.n, seed=seed, cost_dist=args.cost_dist,
                           cost_low=lo, cost_high=hi, budget_rule=rule, budget_value=value)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="smkedl",
        description="Knapsack-constrained submodular maximization: generate, run, sweep, verify.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a generated instance as JSON")
    _generator_args(g)

    r = sub.add_parser("run", parents=[common], help="solve one instance")
    r.add_argument("instance", nargs="?", help="instance JSON; omit to generate one")
    _generator_args(r)
    r.add_argument("--solver", choices=("edl", "greedy_plus_singleton", "brute_force"),
                   default="edl")
    r.add_argument("--epsilon", type=float, default=0.1)
    r.add_argument("--tie-break", choices=("prefer-X", "prefer-lower-id-set"), default="prefer-X")
    r.add_argument("--estimator", choices=("singleton", "exact", "external"), default="singleton")
    r.add_argument("--estimate-M", type=float, help="M for --estimator external")
    r.add_argument("--estimate-multiplier", type=float, default=19.0,
                   help="multiplier for --estimator external")
    r.add_argument("--include-prefilter", action="store_true")
    r.add_argument("--trace", choices=("none", "summary", "full"), default="none")
    r.add_argument("--trace-out", help="trace destination (default stderr)")
    r.add_argument("--with-opt", action="store_true",
                   help=f"fill the opt/ratio columns by brute force (n <= {BRUTE_FORCE_MAX_N})")

    s = sub.add_parser("sweep", parents=[common], help="comparative sweep over generated instances")
    s.add_argument("--family", default="cut", help="cut|coverage|revenue|table|mixed")
    s.add_argument("--sizes", type=_int_list, default=[8, 10, 12], help="comma-separated n list")
    s.add_argument("--seeds", default="10", help="count (from --seed) or comma-separated list")
    s.add_argument("--epsilon", type=float, default=0.1)
    s.add_argument("--estimator", choices=("singleton", "exact"), default="exact")
    s.add_argument("--no-brute-force", action="store_true")
    s.add_argument("--budget-rules", default="fraction:0.3",
                   help="comma-separated budget rules, e.g. fraction:0.3,max_cost_multiple:1")
    s.add_argument("--cost-dists", default="uniform", help="comma-separated cost distributions")
    s.add_argument("--manifest", help="re-run the sweep recorded in this manifest")
    s.add_argument("--no-timing", action="store_true", help="omit the wall_ms column")

    v = sub.add_parser("verify", parents=[common], help="check an instance's invariants")
    v.add_argument("instance")
    v.add_argument("--trials", type=int, default=10_000)
    return parser


def _emit(args, text):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _rows_text(rows, fmt, timing=True):
    if fmt == "json":
        return "".join(json.dumps({c: getattr(r, c) for c in CSV_COLUMNS}) + "\n" for r in rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = CSV_COLUMNS if timing else CSV_COLUMNS[:-1]
    w.writerow(cols)
    for r in rows:
        vals = r.csv_fields()
        w.writerow(vals if timing else vals[:-1])
    return buf.getvalue()


def _load(path, validate=True):
    try:
        return load_instance(path, validate=validate)
    except InstanceFormatError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from exc
    except InvalidObjectiveError as exc:
        raise CliError(EXIT_VIOLATION, f"{path}: {exc}") from exc
    except OSError as exc:
        raise CliError(EXIT_PARSE, f"{path}: {exc}") from exc


def cmd_generate(args):
    try:
        inst = generate_instance(_config_from_args(args, args.seed))
    except ValueError as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    _emit(args, dumps_instance(inst) + "\n")
    return EXIT_OK


def cmd_run(args):
    if args.instance:
        raw = _load(args.instance)
    else:
        raw = generate_instance(_config_from_args(args, args.seed))
    try:
        inst = normalize_instance(raw)
    except VacuousInstanceError as exc:
        raise CliError(EXIT_VACUOUS, str(exc)) from exc

    opt = None
    if args.with_opt or args.estimator == "exact":
        if inst.n > BRUTE_FORCE_MAX_N:
            raise CliError(EXIT_PARSE, f"brute force refused for n={inst.n} > {BRUTE_FORCE_MAX_N}")
        opt = brute_force(inst).opt
    oracle = inst.oracle()
    t0 = time.perf_counter()
    trace = None
    if args.solver == "edl":
        if args.estimator == "external":
            if args.estimate_M is None:
                raise CliError(EXIT_PARSE, "--estimator external needs --estimate-M")
            est = FixedEstimator(args.estimate_M, args.estimate_multiplier)
        elif args.estimator == "exact":
            est = ExactEstimator(opt)
        else:
            est = "singleton"
        cfg = EdlConfig(args.epsilon, args.tie_break, est, args.include_prefilter, args.trace)
        sol, trace = edl_solve(inst, oracle, cfg)
    elif args.solver == "greedy_plus_singleton":
        sol = greedy_plus_singleton(inst, oracle)
    else:
        bf = brute_force(inst, oracle)
        sol = Solution.build(inst, bf.bits, bf.opt, oracle.query_count, "brute_force")
        opt = bf.opt
    ms = (time.perf_counter() - t0) * 1e3
    row = ReportRow(inst.label, inst.n, inst.budget, args.solver, sol.value, opt,
                    None if opt is None else approximation_ratio(opt, sol.value),
                    sol.queries_used, round(ms, 3), sol.cost <= inst.budget, tuple(sol.members))
    _emit(args, _rows_text([row], args.format))

    if trace is not None and args.trace != "none":
        text = trace.to_jsonl() if args.trace == "full" else json.dumps(trace.summary()) + "\n"
        if args.trace_out:
            Path(args.trace_out).write_text(text)
        else:
            sys.stderr.write(text)
    return EXIT_OK


def _sweep_config(args):
    seeds = args.seeds
    if "," in seeds:
        seed_list = _int_list(seeds)
    else:
        seed_list = list(range(args.seed, args.seed + int(seeds)))
    return {"family": args.family, "sizes": list(args.sizes), "seeds": seed_list,
            "epsilon": args.epsilon, "estimator": args.estimator,
            "brute": not args.no_brute_force,
            "budget_rules": [list(_budget_rule(x)) for x in args.budget_rules.split(",")],
            "cost_dists": args.cost_dists.split(",")}


def _instance_digests(config):
    from .generators import KINDS as _K
    kinds = _K if config["family"] == "mixed" else (config["family"],)
    out = []
    for kind in kinds:
        for n in config["sizes"]:
            for seed in config["seeds"]:
                for rule, value in config["budget_rules"]:
                    for dist in config["cost_dists"]:
                        inst = generate_instance(GeneratorConfig(
                            kind=kind, n=n, seed=seed, cost_dist=dist, budget_rule=rule,
                            budget_value=value))
                        out.append([inst.label, instance_digest(inst)])
    return out


def cmd_sweep(args):
    recorded = None
    if args.manifest:
        try:
            recorded = json.loads(Path(args.manifest).read_text())
            config = recorded["config"]
        except (OSError, ValueError, KeyError) as exc:
            raise CliError(EXIT_PARSE, f"bad manifest {args.manifest}: {exc}") from exc
    else:
        config = _sweep_config(args)
    if config["brute"] and max(config["sizes"]) > BRUTE_FORCE_MAX_N:
        raise CliError(EXIT_PARSE, f"brute force refused: sizes exceed n={BRUTE_FORCE_MAX_N}; "
                                   "pass --no-brute-force")
    if config["estimator"] == "exact" and not config["brute"]:
        raise CliError(EXIT_PARSE, "the exact estimator needs brute force")
    started = datetime.now(timezone.utc).isoformat()
    digests = _instance_digests(config)
    if recorded is not None and recorded.get("instances") != digests:
        raise CliError(EXIT_VIOLATION, "instance digests differ from the manifest (fixture drift)")
    try:
        report = random_instance_sweep(
            config["family"], config["sizes"], config["seeds"], config["epsilon"],
            config["estimator"], config["brute"],
            tuple((r, float(v)) for r, v in config["budget_rules"]), tuple(config["cost_dists"]))
    except (ValueError, ContractViolation) as exc:
        raise CliError(EXIT_PARSE, str(exc)) from exc
    _emit(args, _rows_text(report.rows, args.format, timing=not args.no_timing))
    sys.stderr.write(report.summary() + "\n")
    if args.out:
        manifest = {"tool_version": __version__, "config": config, "seed": args.seed,
                    "instances": digests, "started": started,
                    "finished": datetime.now(timezone.utc).isoformat()}
        Path(str(args.out) + ".manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return EXIT_OK


def cmd_verify(args):
    inst = _load(args.instance, validate=False)
    obj = inst.objective
    lines = [f"instance {inst.label!r}: n={inst.n} B={inst.budget}"]
    ok = True
    oversize = int((inst.costs > inst.budget).sum())
    lines.append(f"costs: positive; {oversize} element(s) exceed the budget and would be discarded")
    problems = check_normalization(obj, trials=min(args.trials, 10_000), seed=args.seed)
    for p in problems:
        ok = False
        lines.append(f"VIOLATION normalization: {p}")
    if not problems:
        lines.append("normalization: f(empty) = 0 and values nonnegative")
    rep = check_submodularity(obj, trials=args.trials, seed=args.seed)
    lines.append(f"submodularity ({rep.mode}): {rep.checked} checks, {rep.n_violations} violations")
    for w in rep.violations:
        ok = False
        lines.append(f"VIOLATION witness A={list(w.A)} B={list(w.B)} e={w.e}: "
                     f"gain_A={w.gain_A:.6g} < gain_B={w.gain_B:.6g}")
    lines.append("PASS" if ok else "FAIL")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


COMMANDS = {"generate": cmd_generate, "run": cmd_run, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        sys.stderr.write(f"smkedl {args.command}: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
