"""EDL: deterministic threshold greedy over two disjoint candidate sets.

The solver guesses OPT from an estimate ``M`` with ``M <= OPT <= c * M``
(``c`` is the estimator's multiplier), sweeps a geometric threshold
``theta_i = c * M * (1 - eps')**i / (5 * eps' * B)`` with ``eps' = eps / 14``,
and in each sweep offers every unplaced element to whichever of ``X`` and
``Y`` it has the larger qualifying density for.  The answer is the better of
the two sets.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Union

from .oracle import (ContractViolation, Instance, MeteredOracle, Solution, VacuousInstanceError,
                     ids_from_bits)

PAPER_MULTIPLIER = 19.0
TIE_BREAKS = ("prefer-X", "prefer-lower-id-set")
TRACE_LEVELS = ("none", "summary", "full")


# ---------------------------------------------------------------------------
# threshold schedule

@dataclass(frozen=True)
class ThresholdSchedule:
    M: float
    multiplier: float
    budget: float
    epsilon: float

    def __post_init__(self):
        if not self.M > 0:
            raise ContractViolation(f"schedule needs M > 0, got {self.M}")
        if not self.budget > 0:
            raise ContractViolation(f"schedule needs B > 0, got {self.budget}")
        if not 0 < self.epsilon < 1:
            raise ContractViolation(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not self.multiplier >= 1:
            raise ContractViolation(f"multiplier must be >= 1, got {self.multiplier}")

    @property
    def eps_prime(self) -> float:
        return self.epsilon / 14

    @property
    def last_index(self) -> int:
        """``ceil(log_{1/(1-eps')}(c / eps'^2))``: index of the final threshold."""
        ep = self.eps_prime
        return math.ceil(math.log(self.multiplier / ep ** 2) / -math.log1p(-ep))

    @property
    def iterations(self) -> int:
        return self.last_index + 1

    @property
    def theta0(self) -> float:
        return self.multiplier * self.M / (5 * self.eps_prime * self.budget)

    def theta(self, i: int) -> float:
        """Closed form; the solver itself uses :meth:`thetas`."""
        return self.theta0 * (1 - self.eps_prime) ** i

    def thetas(self) -> list[float]:
        """Thresholds by iterated multiplication, as the solver consumes them."""
        ratio = 1 - self.eps_prime
        out = [self.theta0]
        for _ in range(self.iterations - 1):
            out.append(out[-1] * ratio)
        return out


def build_schedule(M: float, multiplier: float, B: float, epsilon: float) -> ThresholdSchedule:
    return ThresholdSchedule(float(M), float(multiplier), float(B), float(epsilon))


# ---------------------------------------------------------------------------
# OPT estimators

@dataclass
class EstimatorResult:
    M: float
    guess_upper_multiplier: float
    queries: int = 0
    prefilter_solution: Solution | None = None
    rescale_to: float | None = None
    name: str = ""

    @property
    def zero(self) -> bool:
        """No positive singleton or optimum: the empty set is optimal."""
        return not self.M > 0

    def schedule_params(self) -> tuple[float, float]:
        """``(M, c)`` fed to the schedule; exact estimates are rescaled to ``c = 19``."""
        if self.rescale_to is None:
            return self.M, self.guess_upper_multiplier
        c = self.rescale_to
        return self.M * self.guess_upper_multiplier / c, c


class SingletonEstimator:
    """``M = max_e f({e})``; submodularity gives ``OPT <= n * M``."""

    name = "singleton"

    def __call__(self, instance: Instance, oracle: MeteredOracle) -> EstimatorResult:
        start = oracle.query_count
        best, best_e = -math.inf, -1
        for e in range(instance.n):
            v = oracle.evaluate(1 << e)
            if v > best:
                best, best_e = v, e
        pre = Solution.build(instance, 1 << best_e, best, oracle.query_count - start, "singleton")
        return EstimatorResult(best, float(instance.n), oracle.query_count - start, pre,
                               name=self.name)


class ExactEstimator:
    """``M = OPT`` by brute force (n <= 20), or from a supplied optimum value.

    Reported as multiplier 1 and rescaled to the ``[OPT/19, OPT]`` form so the
    solver runs the 19-multiplier schedule with ``theta_0 = OPT / (5 eps' B)``.
    """

    name = "exact"

    def __init__(self, opt: float | None = None):
        self.opt = opt

    def __call__(self, instance, oracle):
        if self.opt is not None:
            return EstimatorResult(float(self.opt), 1.0, 0, None, PAPER_MULTIPLIER, self.name)
        from .reference import brute_force
        start = oracle.query_count
        res = brute_force(instance, oracle)
        pre = Solution.build(instance, res.bits, res.opt, oracle.query_count - start,
                             "brute_force")
        return EstimatorResult(res.opt, 1.0, oracle.query_count - start, pre,
                               PAPER_MULTIPLIER, self.name)


class FixedEstimator:
    """A plugged-in estimate: the caller vouches for ``M <= OPT <= multiplier * M``."""

    name = "external"

    def __init__(self, M: float, multiplier: float, queries: int = 0):
        self.M, self.multiplier, self.queries = float(M), float(multiplier), int(queries)

    def __call__(self, instance, oracle):
        return EstimatorResult(self.M, self.multiplier, self.queries, name=self.name)


Estimator = Callable[[Instance, MeteredOracle], EstimatorResult]


def make_estimator(choice: Union[str, Estimator], **kwargs) -> Estimator:
    if callable(choice):
        return choice
    if choice == "singleton":
        return SingletonEstimator()
    if choice == "exact":
        return ExactEstimator(kwargs.get("opt"))
    if choice == "external":
        return FixedEstimator(kwargs["M"], kwargs["multiplier"])
    raise ValueError(f"unknown estimator {choice!r}")


def estimate_opt(instance: Instance, oracle: MeteredOracle,
                 choice: Union[str, Estimator] = "singleton", **kwargs) -> EstimatorResult:
    if instance.n == 0:
        raise VacuousInstanceError("empty ground set")
    return make_estimator(choice, **kwargs)(instance, oracle)


# ---------------------------------------------------------------------------
# trace

@dataclass(frozen=True)
class Insertion:
    iter: int
    theta: float
    element: int
    set: str
    density: float
    value_after: float


@dataclass
class RunTrace:
    insertions: list[Insertion] = field(default_factory=list)
    thetas: list[float] = field(default_factory=list)
    f_X: float = 0.0
    f_Y: float = 0.0

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.__dict__, sort_keys=True) + "\n" for r in self.insertions)

    def summary(self) -> dict:
        return {"iterations": len(self.thetas), "insertions": len(self.insertions),
                "f_X": self.f_X, "f_Y": self.f_Y,
                "theta_first": self.thetas[0] if self.thetas else None,
                "theta_last": self.thetas[-1] if self.thetas else None}

    @classmethod
    def from_jsonl(cls, text: str) -> "RunTrace":
        recs = [Insertion(**json.loads(line)) for line in text.splitlines() if line.strip()]
        trace = cls(recs)
        for r in recs:
            if r.set == "X":
                trace.f_X = r.value_after
            else:
                trace.f_Y = r.value_after
        return trace


@dataclass
class EdlConfig:
    epsilon: float = 0.1
    tie_break: str = "prefer-X"
    estimator: Union[str, Estimator] = "singleton"
    include_prefilter: bool = False
    trace: str = "none"

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ContractViolation(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {TIE_BREAKS}")
        if self.trace not in TRACE_LEVELS:
            raise ValueError(f"trace must be one of {TRACE_LEVELS}")


# ---------------------------------------------------------------------------
# solver

def _lowest_bit(bits):
    return (bits & -bits).bit_length() if bits else math.inf


def edl_solve(instance: Instance, oracle: MeteredOracle | None = None,
              config: EdlConfig | None = None) -> tuple[Solution, RunTrace]:
    """Run EDL; returns the solution and the insertion trace.

    Elements are scanned in ascending id order.  A set is a candidate for
    ``e`` only if ``e`` fits its remaining budget and ``f(e|T)/c(e) >= theta``;
    the denser candidate wins, ties resolved by ``config.tie_break``.
    """
    config = config or EdlConfig()
    oracle = oracle or instance.oracle()
    if instance.n == 0:
        raise VacuousInstanceError("empty ground set")
    start = oracle.query_count
    est = estimate_opt(instance, oracle, config.estimator)
    trace = RunTrace()
    if est.zero:
        sol = Solution((), 0.0, 0.0, oracle.query_count - start, "edl",
                       {"estimator": est.name, "M": est.M, "zero_signal": True})
        return sol, trace

    M, c = est.schedule_params()
    schedule = build_schedule(M, c, instance.budget, config.epsilon)
    B = instance.budget
    costs = instance.costs.tolist()
    n = instance.n
    prefer_x = config.tie_break == "prefer-X"
    bits = [0, 0]
    vals = [0.0, 0.0]
    spent = [0.0, 0.0]
    placed = 0
    thetas = schedule.thetas()
    trace.thetas = thetas

    for i, theta in enumerate(thetas):
        for e in range(n):
            bit = 1 << e
            if placed & bit:
                continue
            ce = costs[e]
            best = -1
            best_d = 0.0
            best_v = 0.0
            for k in (0, 1):
                if spent[k] + ce > B:
                    continue
                v = oracle.evaluate(bits[k] | bit)
                d = (v - vals[k]) / ce
                if d < theta:
                    continue
                if best < 0 or d > best_d or (d == best_d and not prefer_x
                                               and _lowest_bit(bits[1]) < _lowest_bit(bits[0])):
                    best, best_d, best_v = k, d, v
            if best >= 0:
                bits[best] |= bit
                vals[best] = best_v
                spent[best] += ce
                placed |= bit
                trace.insertions.append(Insertion(i, theta, e, "XY"[best], best_d, best_v))

    trace.f_X, trace.f_Y = vals
    k = 0 if vals[0] >= vals[1] else 1
    out_bits, out_val, source = bits[k], vals[k], "XY"[k]
    if config.include_prefilter and est.prefilter_solution is not None:
        if est.prefilter_solution.value > out_val:
            out_bits, out_val, source = est.prefilter_solution.bits, est.prefilter_solution.value, \
                "prefilter"
    sol = Solution.build(instance, out_bits, out_val, oracle.query_count - start, "edl",
                         estimator=est.name, M=est.M, multiplier=est.guess_upper_multiplier,
                         estimator_queries=est.queries, iterations=schedule.iterations,
                         source=source, X=ids_from_bits(bits[0]), Y=ids_from_bits(bits[1]))
    return sol, trace


# ---------------------------------------------------------------------------
# replay

class TraceMismatchError(ValueError):
    """A trace cannot have come from the given instance."""


@dataclass
class ReplayResult:
    X: int
    Y: int
    X_after: dict            # iteration -> bitset of X after that iteration
    Y_after: dict
    X_prefix_values: list    # f(X^1), f(X^2), ...
    Y_prefix_values: list

    @property
    def X_ids(self):
        return ids_from_bits(self.X)

    @property
    def Y_ids(self):
        return ids_from_bits(self.Y)


def replay_trace(trace: RunTrace, instance: Instance) -> ReplayResult:
    """Rebuild X and Y from a trace, recomputing every value and density.

    Raises :class:`TraceMismatchError` if an element repeats, a set overruns
    the budget, a recorded value differs from the objective, or a recorded
    density falls below its threshold.
    """
    f = instance.objective.evaluate
    sets = {"X": 0, "Y": 0}
    spent = {"X": 0.0, "Y": 0.0}
    vals = {"X": 0.0, "Y": 0.0}
    prefix = {"X": [], "Y": []}
    after = {"X": {}, "Y": {}}
    offset = f(0)
    last_iter = -1
    for r in trace.insertions:
        if r.set not in sets:
            raise TraceMismatchError(f"unknown set label {r.set!r}")
        if not 0 <= r.element < instance.n:
            raise TraceMismatchError(f"element {r.element} outside the ground set")
        if r.iter < last_iter:
            raise TraceMismatchError("insertions are not in iteration order")
        for it in range(last_iter + 1, r.iter):
            after["X"][it], after["Y"][it] = sets["X"], sets["Y"]
        last_iter = max(last_iter, r.iter)
        bit = 1 << r.element
        if (sets["X"] | sets["Y"]) & bit:
            raise TraceMismatchError(f"element {r.element} inserted twice")
        T = r.set
        ce = float(instance.costs[r.element])
        if spent[T] + ce > instance.budget:
            raise TraceMismatchError(f"insertion of {r.element} overruns the budget of {T}")
        v = f(sets[T] | bit) - offset
        if v != r.value_after:
            raise TraceMismatchError(
                f"recorded f = {r.value_after} for {T}+{r.element}, objective gives {v}")
        d = (v - vals[T]) / ce
        if d != r.density or d < r.theta:
            raise TraceMismatchError(
                f"density {d} of {r.element} vs recorded {r.density}, threshold {r.theta}")
        if trace.thetas and trace.thetas[r.iter] != r.theta:
            raise TraceMismatchError(f"threshold of iteration {r.iter} differs from the schedule")
        sets[T] |= bit
        spent[T] += ce
        vals[T] = v
        prefix[T].append(v)
        after["X"][r.iter], after["Y"][r.iter] = sets["X"], sets["Y"]
    for it in range(last_iter + 1, len(trace.thetas)):
        after["X"][it], after["Y"][it] = sets["X"], sets["Y"]
    return ReplayResult(sets["X"], sets["Y"], after["X"], after["Y"], prefix["X"], prefix["Y"])
