"""Concrete submodular objectives and a submodularity checker."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .oracle import (InvalidObjectiveError, Objective, all_masks, bits_to_mask, ids_from_bits,
                     mask_to_bits)

# rows per chunk when a batch evaluation materializes a (rows, n, n) array
_REVENUE_CHUNK_CELLS = 1 << 22


class CutObjective(Objective):
    """Weighted cut: total weight of edges with exactly one endpoint in S."""

    kind = "cut"

    def __init__(self, n: int, edges: Sequence[Sequence[float]]):
        super().__init__(n)
        e = np.asarray(edges, dtype=float).reshape(-1, 3)
        self.u = e[:, 0].astype(np.int64)
        self.v = e[:, 1].astype(np.int64)
        self.w = e[:, 2].copy()
        if e.shape[0]:
            if np.any(e[:, :2] != np.floor(e[:, :2])) or self.u.min() < 0 or \
                    max(self.u.max(), self.v.max()) >= n:
                raise InvalidObjectiveError("edge endpoints must be element ids in [0, n)")
            if np.any(self.w < 0) or not np.all(np.isfinite(self.w)):
                raise InvalidObjectiveError("edge weights must be finite and nonnegative")

    def evaluate_batch(self, masks):
        crossing = masks[:, self.u] != masks[:, self.v]
        return np.where(crossing, self.w, 0.0).sum(axis=1)

    def evaluate(self, bits):
        # 1-D twin of the batch path; same pairwise summation, same float result
        m = bits_to_mask(bits, self.n)
        return float(np.where(m[self.u] != m[self.v], self.w, 0.0).sum())

    def payload(self):
        return {"kind": "cut",
                "edges": [[int(a), int(b), float(c)] for a, b, c in zip(self.u, self.v, self.w)]}


class CoverageObjective(Objective):
    """Weighted coverage of universe items by the union of the chosen elements' covers."""

    kind = "coverage"

    def __init__(self, item_weights: Sequence[float], covers: Sequence[Sequence[int]]):
        super().__init__(len(covers))
        self.item_weights = np.asarray(item_weights, dtype=float)
        m = self.item_weights.shape[0]
        if np.any(self.item_weights < 0) or not np.all(np.isfinite(self.item_weights)):
            raise InvalidObjectiveError("item weights must be finite and nonnegative")
        self.covers = [sorted({int(i) for i in c}) for c in covers]
        self.incidence = np.zeros((self.n, m), dtype=np.int32)
        for e, items in enumerate(self.covers):
            if items and (items[0] < 0 or items[-1] >= m):
                raise InvalidObjectiveError(f"element {e} covers an item outside [0, {m})")
            self.incidence[e, items] = 1

    def evaluate_batch(self, masks):
        covered = masks.astype(np.int32) @ self.incidence > 0
        return np.where(covered, self.item_weights, 0.0).sum(axis=1)

    def payload(self):
        return {"kind": "coverage", "item_weights": [float(x) for x in self.item_weights],
                "covers": [list(c) for c in self.covers]}


def modular(weights: Sequence[float]) -> CoverageObjective:
    """Additive objective, encoded as coverage with one private item per element."""
    return CoverageObjective(weights, [[i] for i in range(len(weights))])


class RevenueObjective(Objective):
    """Revenue of influence: ``f(S) = sum_{v not in S} (sum_{u in S} w(u, v)) ** alpha``."""

    kind = "revenue"

    def __init__(self, weights, alpha: float = 0.5):
        w = np.array(weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise InvalidObjectiveError("revenue weights must be a square matrix")
        super().__init__(w.shape[0])
        if np.any(w < 0) or not np.all(np.isfinite(w)) or not np.array_equal(w, w.T):
            raise InvalidObjectiveError("revenue weights must be symmetric, finite, nonnegative")
        if not 0 < alpha <= 1:
            raise InvalidObjectiveError(f"alpha must lie in (0, 1], got {alpha}")
        np.fill_diagonal(w, 0.0)
        self.weights = w
        self.alpha = float(alpha)

    def evaluate_batch(self, masks):
        n = self.n
        out = np.empty(masks.shape[0])
        step = max(1, _REVENUE_CHUNK_CELLS // max(1, n * n))
        for lo in range(0, masks.shape[0], step):
            m = masks[lo:lo + step]
            inflow = np.where(m[:, :, None], self.weights[None, :, :], 0.0).sum(axis=1)
            out[lo:lo + step] = np.where(m, 0.0, inflow ** self.alpha).sum(axis=1)
        return out

    def payload(self):
        return {"kind": "revenue", "weights": self.weights.tolist(), "alpha": self.alpha}


class TableObjective(Objective):
    """Explicit value for every subset; index ``mask`` holds ``f`` of that bitset.

    With ``validate=True`` the table is checked for nonnegativity,
    normalization and (exhaustively) submodularity at construction.
    """

    kind = "table"
    MAX_N = 20

    def __init__(self, values: Sequence[float], validate: bool = True):
        vals = np.asarray(values, dtype=float)
        n = int(vals.shape[0]).bit_length() - 1
        if vals.ndim != 1 or vals.shape[0] != 1 << n:
            raise InvalidObjectiveError("table length must be a power of two")
        if n > self.MAX_N:
            raise InvalidObjectiveError(f"table objectives are limited to n <= {self.MAX_N}")
        super().__init__(n)
        self.values = vals
        self._list = vals.tolist()
        self._pow2 = 1 << np.arange(n, dtype=np.int64)
        if validate:
            if not np.all(np.isfinite(vals)) or np.any(vals < 0):
                raise InvalidObjectiveError("table values must be finite and nonnegative")
            if vals[0] != 0:
                raise InvalidObjectiveError(f"table must be normalized, f(empty) = {vals[0]}")
            report = check_submodularity(self, n, exhaustive=True)
            if not report.ok:
                raise InvalidObjectiveError(f"table is not submodular: {report.violations[0]}")

    def evaluate(self, bits):
        return self._list[bits]

    def evaluate_batch(self, masks):
        return self.values[masks.astype(np.int64) @ self._pow2]

    def payload(self):
        return {"kind": "table", "values": self._list}


class ScaledObjective(Objective):
    """``factor * f``."""

    kind = "scaled"

    def __init__(self, inner: Objective, factor: float):
        super().__init__(inner.n)
        self.inner = inner
        self.factor = float(factor)

    def evaluate(self, bits):
        return self.factor * self.inner.evaluate(bits)

    def evaluate_batch(self, masks):
        return self.factor * self.inner.evaluate_batch(masks)


def tabulate(objective: Objective) -> TableObjective:
    """Materialize ``objective`` over all subsets (n <= 20), without revalidation."""
    if objective.n > TableObjective.MAX_N:
        raise ValueError(f"cannot tabulate n={objective.n} > {TableObjective.MAX_N}")
    return TableObjective(objective.evaluate_batch(all_masks(objective.n)), validate=False)


# ---------------------------------------------------------------------------
# submodularity

@dataclass
class Violation:
    A: tuple[int, ...]
    B: tuple[int, ...]
    e: int
    gain_A: float
    gain_B: float

    def __str__(self):
        return (f"f({self.e}|A={list(self.A)}) = {self.gain_A:.6g} < "
                f"f({self.e}|B={list(self.B)}) = {self.gain_B:.6g}")


@dataclass
class SubmodularityReport:
    mode: str
    checked: int
    violations: list = field(default_factory=list)
    n_violations: int = 0

    @property
    def ok(self) -> bool:
        return self.n_violations == 0


def _tolerance(values: np.ndarray) -> float:
    # absorbs float rounding at exact equality; a real violation is far larger
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    return 1e-9 * max(1.0, scale)


def check_submodularity(objective: Objective, n: int | None = None, trials: int = 1000,
                        seed: int = 0, exhaustive: bool | None = None,
                        max_witnesses: int = 10) -> SubmodularityReport:
    """Test ``f(A+e) - f(A) >= f(B+e) - f(B)`` for ``A ⊆ B``, ``e ∉ B``.

    For ``n <= 12`` (or ``exhaustive=True``) every subset is tabulated and
    every pair ``(S+j, i)`` is checked, which covers all chains since the
    one-step condition implies the general one.  Otherwise ``trials`` random
    chains are sampled.
    """
    n = objective.n if n is None else n
    if exhaustive is None:
        exhaustive = n <= 12
    if exhaustive:
        return _check_exhaustive(objective, n, max_witnesses)
    return _check_sampled(objective, n, trials, seed, max_witnesses)


def _check_exhaustive(objective, n, max_witnesses):
    if isinstance(objective, TableObjective):
        table = objective.values
    else:
        table = objective.evaluate_batch(all_masks(n))
    tol = _tolerance(table)
    idx = np.arange(1 << n, dtype=np.int64)
    report = SubmodularityReport("exhaustive", 0)
    for i in range(n):
        for j in range(i + 1, n):
            bi, bj = 1 << i, 1 << j
            S = idx[(idx & (bi | bj)) == 0]
            lhs = table[S | bi] - table[S]
            rhs = table[S | bi | bj] - table[S | bj]
            report.checked += S.size
            bad = np.flatnonzero(lhs < rhs - tol)
            report.n_violations += bad.size
            for k in bad[:max(0, max_witnesses - len(report.violations))]:
                s = int(S[k])
                report.violations.append(Violation(
                    ids_from_bits(s), ids_from_bits(s | bj), i, float(lhs[k]), float(rhs[k])))
    return report


def _check_sampled(objective, n, trials, seed, max_witnesses):
    if n < 1:
        return SubmodularityReport("sampled", 0)
    rng = np.random.default_rng(seed)
    Bm = rng.random((trials, n)) < rng.random((trials, 1))
    e = rng.integers(0, n, size=trials)
    Bm[np.arange(trials), e] = False
    Am = Bm & (rng.random((trials, n)) < rng.random((trials, 1)))
    Ae, Be = Am.copy(), Bm.copy()
    Ae[np.arange(trials), e] = True
    Be[np.arange(trials), e] = True
    vals = objective.evaluate_batch(np.concatenate([Am, Ae, Bm, Be]))
    fA, fAe, fB, fBe = vals.reshape(4, trials)
    lhs, rhs = fAe - fA, fBe - fB
    bad = np.flatnonzero(lhs < rhs - _tolerance(vals))
    report = SubmodularityReport("sampled", trials, n_violations=int(bad.size))
    for k in bad[:max_witnesses]:
        report.violations.append(Violation(
            ids_from_bits(mask_to_bits(Am[k])), ids_from_bits(mask_to_bits(Bm[k])), int(e[k]),
            float(lhs[k]), float(rhs[k])))
    return report


def check_normalization(objective: Objective, trials: int = 1000, seed: int = 0) -> list[str]:
    """Problems with ``f(empty) = 0`` and nonnegativity on random (or all, n <= 12) sets."""
    problems = []
    f0 = objective.evaluate(0)
    if f0 != 0:
        problems.append(f"f(empty) = {f0}, expected 0")
    if objective.n <= 12:
        masks = all_masks(objective.n)
    else:
        rng = np.random.default_rng(seed)
        masks = rng.random((trials, objective.n)) < rng.random((trials, 1))
    vals = objective.evaluate_batch(masks)
    neg = np.flatnonzero(vals < 0)
    if neg.size:
        k = int(neg[0])
        problems.append(f"{neg.size} negative values, e.g. f({list(np.flatnonzero(masks[k]))}) "
                        f"= {vals[k]}")
    return problems
