"""Reference solvers: exhaustive optimum, density greedy, and comparative sweeps."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .oracle import (ContractViolation, Instance, MeteredOracle, Solution, VacuousInstanceError,
                     all_masks, normalize_instance)

BRUTE_FORCE_MAX_N = 20


@dataclass
class BruteForceResult:
    bits: int
    members: tuple
    opt: float
    n_feasible: int


def brute_force(instance: Instance, oracle: MeteredOracle | None = None) -> BruteForceResult:
    """Exact optimum over all feasible subsets; ties go to the smallest bitset.

    Only feasible subsets are evaluated, so the query cost equals
    ``n_feasible``.
    """
    n = instance.n
    if n > BRUTE_FORCE_MAX_N:
        raise ContractViolation(f"brute force is capped at n <= {BRUTE_FORCE_MAX_N}, got {n}")
    oracle = oracle or instance.oracle()
    masks = all_masks(n)
    cost = np.where(masks, instance.costs, 0.0).sum(axis=1)
    feasible = np.flatnonzero(cost <= instance.budget)
    values = oracle.evaluate_batch(masks[feasible])
    k = int(np.argmax(values))
    bits = int(feasible[k])
    return BruteForceResult(bits, tuple(int(e) for e in np.flatnonzero(masks[bits])),
                            float(values[k]), int(feasible.size))


def density_greedy(instance: Instance, oracle: MeteredOracle | None = None,
                   first_round: list | None = None) -> tuple[int, float]:
    """Repeatedly add the affordable element of largest positive density.

    Returns ``(bits, value)``.  ``first_round``, if given a list, receives the
    singleton values seen in the opening round.
    """
    oracle = oracle or instance.oracle()
    costs = instance.costs.tolist()
    S, f_S, spent = 0, 0.0, 0.0
    while True:
        best_e, best_d, best_v = -1, 0.0, 0.0
        for e in range(instance.n):
            bit = 1 << e
            if S & bit or spent + costs[e] > instance.budget:
                continue
            v = oracle.evaluate(S | bit)
            if first_round is not None and S == 0:
                first_round.append((e, v))
            d = (v - f_S) / costs[e]
            if d > best_d:
                best_e, best_d, best_v = e, d, v
        if best_e < 0:
            return S, f_S
        S |= 1 << best_e
        f_S = best_v
        spent += costs[best_e]


def greedy_plus_singleton(instance: Instance, oracle: MeteredOracle | None = None) -> Solution:
    if instance.n == 0:
        raise VacuousInstanceError("empty ground set")
    oracle = oracle or instance.oracle()
    start = oracle.query_count
    singles = []
    S, f_S = density_greedy(instance, oracle, singles)
    # every singleton is affordable after normalization, so round one saw them all
    seen = {e for e, _ in singles}
    for e in range(instance.n):
        if e not in seen and instance.costs[e] <= instance.budget:
            singles.append((e, oracle.evaluate(1 << e)))
    bits, value, source = S, f_S, "greedy"
    if singles:
        e_best, v_best = max(singles, key=lambda t: (t[1], -t[0]))
        if v_best > value:
            bits, value, source = 1 << e_best, v_best, "singleton"
    return Solution.build(instance, bits, value, oracle.query_count - start,
                          "greedy_plus_singleton", source=source)


# ---------------------------------------------------------------------------
# sweeps

CSV_COLUMNS = ("instance_label", "n", "B", "solver", "value", "opt", "ratio", "queries",
               "wall_ms")


@dataclass
class ReportRow:
    instance_label: str
    n: int
    B: float
    solver: str
    value: float
    opt: float | None
    ratio: float | None
    queries: int
    wall_ms: float
    feasible: bool = True
    members: tuple = ()

    def csv_fields(self):
        d = asdict(self)
        return [("" if d[c] is None else d[c]) for c in CSV_COLUMNS]


def approximation_ratio(opt: float, value: float) -> float:
    if opt <= 0:
        return 1.0
    return math.inf if value <= 0 else opt / value


@dataclass
class SweepReport:
    rows: list[ReportRow] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def worst_ratio(self, solver: str = "edl") -> float | None:
        r = [row.ratio for row in self.rows if row.solver == solver and row.ratio is not None]
        return max(r) if r else None

    def query_fit(self, solver: str = "edl") -> float | None:
        """Slope of log(mean queries) against log(n); about 1 for linear growth."""
        by_n = {}
        for row in self.rows:
            if row.solver == solver:
                by_n.setdefault(row.n, []).append(row.queries)
        if len(by_n) < 2:
            return None
        ns = sorted(by_n)
        q = [max(1.0, float(np.mean(by_n[k]))) for k in ns]
        return float(np.polyfit(np.log(ns), np.log(q), 1)[0])

    def summary(self) -> str:
        worst = self.worst_ratio()
        fit = self.query_fit()
        parts = [f"rows={len(self.rows)}", f"skipped={len(self.skipped)}"]
        parts.append("worst_edl_ratio=" + ("n/a" if worst is None else f"{worst:.6g}"))
        parts.append("edl_query_loglog_slope=" + ("n/a" if fit is None else f"{fit:.4f}"))
        return " ".join(parts)

    def to_csv(self, timing: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = CSV_COLUMNS if timing else CSV_COLUMNS[:-1]
        w.writerow(cols)
        for row in self.rows:
            vals = row.csv_fields()
            w.writerow(vals if timing else vals[:-1])
        return buf.getvalue()


def _timed_row(instance, solver, fn, opt):
    t0 = time.perf_counter()
    sol = fn()
    ms = (time.perf_counter() - t0) * 1e3
    ratio = None if opt is None else approximation_ratio(opt, sol.value)
    return ReportRow(instance.label, instance.n, instance.budget, solver, sol.value, opt, ratio,
                     sol.queries_used, round(ms, 3), sol.cost <= instance.budget, sol.members)


def run_solvers(instance: Instance, epsilon: float = 0.1, estimator="exact",
                brute: bool = True, solvers=("edl", "greedy_plus_singleton"),
                tabulate_small: bool = True) -> list[ReportRow]:
    """One sweep row per solver on an already-normalized instance.

    For ``n <= 20`` the objective is first tabulated over all subsets so each
    query is a lookup; values are bit-identical to direct evaluation.
    """
    from .edl import EdlConfig, ExactEstimator, edl_solve
    from .objectives import tabulate

    if tabulate_small and instance.n <= BRUTE_FORCE_MAX_N:
        instance = Instance(tabulate(instance.objective), instance.costs, instance.budget,
                            instance.label, instance.metadata)
    rows = []
    opt = None
    if brute:
        oracle = instance.oracle()
        t0 = time.perf_counter()
        bf = brute_force(instance, oracle)
        ms = (time.perf_counter() - t0) * 1e3
        opt = bf.opt
        rows.append(ReportRow(instance.label, instance.n, instance.budget, "brute_force", bf.opt,
                              opt, 1.0, oracle.query_count, round(ms, 3),
                              instance.cost_of(bf.bits) <= instance.budget, bf.members))
    for solver in solvers:
        oracle = instance.oracle()
        if solver == "edl":
            est = estimator
            if estimator == "exact":
                est = ExactEstimator(opt)
            cfg = EdlConfig(epsilon=epsilon, estimator=est)
            rows.append(_timed_row(instance, "edl",
                                   lambda: edl_solve(instance, oracle, cfg)[0], opt))
        elif solver == "greedy_plus_singleton":
            rows.append(_timed_row(instance, solver,
                                   lambda: greedy_plus_singleton(instance, oracle), opt))
        else:
            raise ValueError(f"unknown solver {solver!r}")
    return rows


def random_instance_sweep(family, sizes, seeds, epsilon: float = 0.1, estimator="exact",
                          brute: bool = True, budget_rules=(("fraction", 0.3),),
                          cost_dists=("uniform",)) -> SweepReport:
    """Generate, normalize and solve every (family, size, seed, budget, cost) combination.

    ``family`` is a kind name, ``"mixed"`` (all four kinds), or a sequence of
    kinds.  Rows come out in deterministic generation order.
    """
    from .generators import KINDS, GeneratorConfig, generate_instance

    if family == "mixed":
        kinds = KINDS
    elif isinstance(family, str):
        kinds = (family,)
    else:
        kinds = tuple(family)
    if brute and max(sizes) > BRUTE_FORCE_MAX_N:
        raise ContractViolation(f"brute-force sweeps are capped at n <= {BRUTE_FORCE_MAX_N}")
    report = SweepReport()
    for kind in kinds:
        for n in sizes:
            for seed in seeds:
                for rule, value in budget_rules:
                    for dist in cost_dists:
                        cfg = GeneratorConfig(kind=kind, n=n, seed=seed, cost_dist=dist,
                                              budget_rule=rule, budget_value=value)
                        try:
                            inst = normalize_instance(generate_instance(cfg))
                        except VacuousInstanceError:
                            report.skipped.append(cfg.label)
                            continue
                        report.rows.extend(run_solvers(inst, epsilon, estimator, brute))
    return report


def rows_from_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


__all__ = ["BruteForceResult", "brute_force", "density_greedy", "greedy_plus_singleton",
           "ReportRow", "SweepReport", "run_solvers", "random_instance_sweep", "CSV_COLUMNS",
           "approximation_ratio", "rows_from_csv"]
