"""Deterministic instance generators.

All randomness comes from numpy's ``PCG64`` bit generator
(``np.random.default_rng(seed)``), drawn in a fixed order, so a config and
seed always produce the same instance.  Costs are quantized to a 1/16 grid
and graph/item weights to a 1/1024 grid: every cost sum and every cut or
coverage value is then exact in float64, which keeps budget checks and
rescaled runs free of rounding artifacts.

Defaults (edge density, universe size, cost range) are choices of this
library, not prescribed by the problem.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .objectives import CoverageObjective, CutObjective, RevenueObjective, TableObjective
from .oracle import Instance, all_masks

COST_GRID = 16
WEIGHT_GRID = 1024
KINDS = ("cut", "coverage", "revenue", "table")


@dataclass(frozen=True)
class GeneratorConfig:
    kind: str = "cut"
    n: int = 10
    seed: int = 0
    cost_dist: str = "uniform"          # "uniform" | "correlated"
    cost_low: float = 1.0
    cost_high: float = 10.0
    budget_rule: str = "fraction"       # "fraction" of total cost | "max_cost_multiple"
    budget_value: float = 0.3
    edge_prob: float | None = None
    alpha: float = 0.5

    def validate(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown objective kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.kind == "table" and self.n > TableObjective.MAX_N:
            raise ValueError(f"table instances are limited to n <= {TableObjective.MAX_N}")
        if not 0 < self.cost_low <= self.cost_high:
            raise ValueError("cost range must satisfy 0 < low <= high")
        if self.cost_dist not in ("uniform", "correlated"):
            raise ValueError(f"unknown cost distribution {self.cost_dist!r}")
        if self.budget_rule not in ("fraction", "max_cost_multiple") or self.budget_value <= 0:
            raise ValueError(f"bad budget rule {self.budget_rule}:{self.budget_value}")

    @property
    def label(self):
        return (f"{self.kind}-n{self.n}-s{self.seed}-{self.cost_dist}-"
                f"{self.budget_rule}{self.budget_value:g}")


def _grid(x, grid):
    return np.maximum(np.round(np.asarray(x) * grid), 1.0) / grid


def _edge_prob(cfg):
    if cfg.edge_prob is not None:
        return cfg.edge_prob
    return 0.5 if cfg.n <= 20 else min(1.0, 8.0 / cfg.n)


def _random_pairs(rng, n, p):
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return iu[keep], ju[keep]


def _make_objective(cfg, rng):
    n = cfg.n
    if cfg.kind == "cut":
        u, v = _random_pairs(rng, n, _edge_prob(cfg))
        w = _grid(rng.random(u.size), WEIGHT_GRID)
        return CutObjective(n, np.column_stack([u, v, w]) if u.size else [])
    if cfg.kind == "coverage":
        m = 2 * n
        p = min(1.0, max(0.15, 3.0 / m))
        inc = rng.random((n, m)) < p
        forced = rng.integers(0, m, size=n)
        inc[np.arange(n), forced] = True
        weights = _grid(rng.random(m), WEIGHT_GRID)
        return CoverageObjective(weights, [np.flatnonzero(row).tolist() for row in inc])
    if cfg.kind == "revenue":
        u, v = _random_pairs(rng, n, _edge_prob(cfg))
        W = np.zeros((n, n))
        W[u, v] = _grid(rng.random(u.size), WEIGHT_GRID)
        W = W + W.T
        return RevenueObjective(W, cfg.alpha)
    return _random_table(rng, n)


def _random_table(rng, n):
    """Integer-valued mix of cut, coverage and a capped additive term.

    Each part is submodular, so is the sum; the cut part makes it non-monotone.
    """
    masks = all_masks(n)
    u, v = _random_pairs(rng, n, 0.5)
    cut = CutObjective(n, np.column_stack([u, v, rng.integers(1, 6, u.size)]) if u.size else [])
    inc = rng.random((n, n)) < 0.3
    cov = CoverageObjective(rng.integers(0, 4, n).astype(float),
                            [np.flatnonzero(r).tolist() for r in inc])
    a = rng.integers(0, 6, n).astype(float)
    cap = float(rng.integers(1, max(2, int(a.sum()) + 1)))
    scale = rng.integers(1, 4, size=3).astype(float)
    vals = (scale[0] * cut.evaluate_batch(masks) + scale[1] * cov.evaluate_batch(masks)
            + scale[2] * np.minimum(masks.astype(float) @ a, cap))
    return TableObjective(vals, validate=False)


def generate_instance(cfg: GeneratorConfig) -> Instance:
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    objective = _make_objective(cfg, rng)
    n = cfg.n
    meta = {"generator": asdict(cfg)}
    if cfg.cost_dist == "uniform":
        costs = _grid(rng.uniform(cfg.cost_low, cfg.cost_high, n), COST_GRID)
    else:
        single = objective.evaluate_batch(np.eye(n, dtype=bool))
        top = float(single.max())
        rel = single / top if top > 0 else np.zeros(n)
        noise = rng.uniform(-0.1, 0.1, n) * (cfg.cost_high - cfg.cost_low)
        costs = _grid(np.clip(cfg.cost_low + rel * (cfg.cost_high - cfg.cost_low) + noise,
                              cfg.cost_low, cfg.cost_high), COST_GRID)
    if cfg.budget_rule == "fraction":
        budget = costs.sum() * cfg.budget_value
    else:
        budget = costs.max() * cfg.budget_value
    budget = float(np.floor(budget * COST_GRID) / COST_GRID) or 1.0 / COST_GRID
    if cfg.kind == "cut" and objective.w.sum() == 0:
        meta["warning"] = "zero-weight graph: every cut value is 0"
    return Instance(objective, costs, budget, cfg.label, meta)
