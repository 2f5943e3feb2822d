"""Problem model: ground set, knapsack costs, value oracles with query metering.

Sets are dense bitsets stored as Python ints: bit ``e`` is set iff element
``e`` is a member.  Objectives accept either a single bitset
(:meth:`Objective.evaluate`) or a ``(k, n)`` boolean matrix of membership
rows (:meth:`Objective.evaluate_batch`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class ContractViolation(ValueError):
    """A caller broke an operation's precondition."""


class VacuousInstanceError(ValueError):
    """No element survives the oversize-element discard."""


class InstanceFormatError(ValueError):
    """An instance payload is malformed (bad shape, cost, or objective data)."""


class InvalidObjectiveError(ValueError):
    """Objective data violates nonnegativity, normalization or submodularity."""


# ---------------------------------------------------------------------------
# bitset helpers

def bits_from_ids(ids: Iterable[int]) -> int:
    bits = 0
    for e in ids:
        bits |= 1 << int(e)
    return bits


def ids_from_bits(bits: int) -> tuple[int, ...]:
    out = []
    e = 0
    while bits:
        if bits & 1:
            out.append(e)
        bits >>= 1
        e += 1
    return tuple(out)


def bits_to_mask(bits: int, n: int) -> np.ndarray:
    raw = np.frombuffer(bits.to_bytes((n + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, count=n, bitorder="little").astype(bool)


def mask_to_bits(mask: np.ndarray) -> int:
    packed = np.packbits(np.asarray(mask, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def all_masks(n: int) -> np.ndarray:
    """Boolean membership matrix of all ``2**n`` subsets; row index = bitset."""
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


# ---------------------------------------------------------------------------
# objectives

class Objective:
    """Value oracle ``f: 2^V -> R``.

    Subclasses implement :meth:`evaluate_batch`; the single-set path routes
    through it so both paths return bit-identical floats.
    """

    kind = "abstract"

    def __init__(self, n: int):
        self.n = int(n)

    def evaluate_batch(self, masks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, bits: int) -> float:
        return float(self.evaluate_batch(bits_to_mask(bits, self.n)[None, :])[0])

    def value_of(self, ids: Iterable[int]) -> float:
        return self.evaluate(bits_from_ids(ids))

    def payload(self) -> dict:
        """JSON payload for the instance file's ``objective`` field."""
        raise TypeError(f"{type(self).__name__} has no file representation")


class MeteredOracle:
    """Counts every evaluation of the wrapped objective.

    If the objective reports ``f(empty) != 0`` the offset is subtracted from
    every value and :attr:`shifted` is set; the probe of ``f(empty)`` made at
    construction is not counted.
    """

    def __init__(self, objective: Objective):
        self.inner = objective
        self.n = objective.n
        self.query_count = 0
        base = objective.evaluate(0)
        self.offset = base if base != 0.0 else 0.0
        self.shifted = base != 0.0

    def evaluate(self, bits: int) -> float:
        self.query_count += 1
        if self.shifted:
            return self.inner.evaluate(bits) - self.offset
        return self.inner.evaluate(bits)

    def evaluate_batch(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=bool)
        self.query_count += masks.shape[0]
        vals = self.inner.evaluate_batch(masks)
        return vals - self.offset if self.shifted else vals

    def peek(self, bits: int) -> float:
        """Unmetered evaluation, for verification only."""
        return self.inner.evaluate(bits) - self.offset

    def reset(self) -> None:
        self.query_count = 0


def marginal_gain(oracle: MeteredOracle, e: int, S: int, f_S: float | None = None) -> float:
    """``f(S + e) - f(S)``; pass the cached ``f_S`` to spend a single query."""
    bit = 1 << e
    if S & bit:
        raise ContractViolation(f"element {e} is already in the set")
    if f_S is None:
        f_S = oracle.evaluate(S)
    return oracle.evaluate(S | bit) - f_S


def density(oracle: MeteredOracle, e: int, S: int, cost: float, f_S: float | None = None) -> float:
    if not cost > 0:
        raise ContractViolation(f"element {e} has non-positive cost {cost}")
    return marginal_gain(oracle, e, S, f_S) / cost


# ---------------------------------------------------------------------------
# instances and solutions

@dataclass
class Instance:
    """An SMK instance ``(f, V, B)`` with per-element costs."""

    objective: Objective
    costs: np.ndarray
    budget: float
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=float)
        if self.costs.ndim != 1 or self.costs.shape[0] != self.objective.n:
            raise InstanceFormatError(
                f"cost array has shape {self.costs.shape}, objective expects n={self.objective.n}")
        if not np.all(np.isfinite(self.costs)) or np.any(self.costs <= 0):
            raise InstanceFormatError("every cost must be finite and strictly positive")
        if not (math.isfinite(self.budget) and self.budget > 0):
            raise InstanceFormatError(f"budget must be positive, got {self.budget}")
        self.budget = float(self.budget)

    @property
    def n(self) -> int:
        return self.objective.n

    def oracle(self) -> MeteredOracle:
        return MeteredOracle(self.objective)

    def cost_of(self, bits: int) -> float:
        return math.fsum(self.costs[list(ids_from_bits(bits))]) if bits else 0.0

    def is_feasible(self, bits: int) -> bool:
        return self.cost_of(bits) <= self.budget


@dataclass
class Solution:
    members: tuple[int, ...]
    value: float
    cost: float
    queries_used: int
    solver_name: str
    metadata: dict = field(default_factory=dict)

    @property
    def bits(self) -> int:
        return bits_from_ids(self.members)

    @classmethod
    def build(cls, instance: Instance, bits: int, value: float, queries: int, solver: str,
              **metadata) -> "Solution":
        return cls(ids_from_bits(bits), float(value), instance.cost_of(bits), int(queries),
                   solver, dict(metadata))


class RestrictedObjective(Objective):
    """``f`` seen through a subset of kept elements (the others never join a set)."""

    kind = "restricted"

    def __init__(self, inner: Objective, keep: Sequence[int]):
        super().__init__(len(keep))
        self.inner = inner
        self.keep = np.asarray(keep, dtype=np.int64)

    def evaluate_batch(self, masks: np.ndarray) -> np.ndarray:
        full = np.zeros((masks.shape[0], self.inner.n), dtype=bool)
        full[:, self.keep] = masks
        return self.inner.evaluate_batch(full)

    def evaluate(self, bits: int) -> float:
        full = 0
        for e in ids_from_bits(bits):
            full |= 1 << int(self.keep[e])
        return self.inner.evaluate(full)


def normalize_instance(raw: Instance) -> Instance:
    """Discard elements costing more than the budget and re-densify ids.

    The kept original ids are stored as ``metadata["original_ids"]``.
    """
    keep = np.flatnonzero(raw.costs <= raw.budget)
    if keep.size == 0:
        raise VacuousInstanceError(f"instance {raw.label!r}: every element exceeds the budget")
    meta = dict(raw.metadata)
    meta["original_ids"] = [int(k) for k in keep]
    if keep.size == raw.n:
        return Instance(raw.objective, raw.costs.copy(), raw.budget, raw.label, meta)
    meta["discarded"] = int(raw.n - keep.size)
    return Instance(RestrictedObjective(raw.objective, keep), raw.costs[keep], raw.budget,
                    raw.label, meta)
