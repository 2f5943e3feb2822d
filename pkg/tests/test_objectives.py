import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smkedl import (CoverageObjective, CutObjective, GeneratorConfig, InvalidObjectiveError,
                    RevenueObjective, TableObjective, check_normalization, check_submodularity,
                    generate_instance, tabulate)
from smkedl.generators import KINDS
from smkedl.oracle import all_masks, bits_to_mask


def test_cut_values(triangle):
    assert triangle.value_of([0]) == 2.0
    assert triangle.value_of([]) == 0.0
    assert triangle.value_of([0, 1, 2]) == 0.0


def test_coverage_values():
    f = CoverageObjective([1.0, 1.0, 1.0, 1.0], [[1, 2], [2, 3]])
    assert f.value_of([0, 1]) == 3.0
    assert f.value_of([]) == 0.0
    assert f.value_of([0]) == 2.0


def test_revenue_values():
    f = RevenueObjective([[0.0, 4.0], [4.0, 0.0]], alpha=0.5)
    assert f.value_of([]) == 0.0
    assert f.value_of([0, 1]) == 0.0
    assert f.value_of([0]) == 2.0


def test_revenue_by_direct_formula():
    rng = np.random.default_rng(5)
    W = rng.random((6, 6))
    W = W + W.T
    np.fill_diagonal(W, 0)
    f = RevenueObjective(W, 0.7)
    for S in [(0,), (1, 3), (0, 2, 5), (1, 2, 3, 4)]:
        expect = sum(sum(W[u, v] for u in S) ** 0.7 for v in range(6) if v not in S)
        assert f.value_of(S) == pytest.approx(expect, rel=1e-12)


@pytest.mark.parametrize("bad", [
    lambda: CutObjective(2, [[0, 1, -1.0]]),
    lambda: CutObjective(2, [[0, 5, 1.0]]),
    lambda: CoverageObjective([-1.0], [[0]]),
    lambda: RevenueObjective([[0.0, 1.0], [2.0, 0.0]]),
    lambda: RevenueObjective([[0.0, 1.0], [1.0, 0.0]], alpha=1.5),
    lambda: TableObjective([0.0, 1.0, 1.0]),
    lambda: TableObjective([1.0, 1.0]),
    lambda: TableObjective([0.0, -1.0]),
])
def test_invalid_objectives(bad):
    with pytest.raises(InvalidObjectiveError):
        bad()


def supermodular_table():
    # f(S) = |S|^2 on 3 elements
    return TableObjective([bin(m).count("1") ** 2 for m in range(8)], validate=False)


def test_table_validation_rejects_supermodular():
    with pytest.raises(InvalidObjectiveError, match="not submodular"):
        TableObjective(supermodular_table().values, validate=True)


def test_check_reports_supermodular_witness():
    rep = check_submodularity(supermodular_table(), trials=100)
    assert rep.mode == "exhaustive" and not rep.ok
    w = rep.violations[0]
    assert set(w.A) <= set(w.B) and w.e not in w.B and w.gain_A < w.gain_B


def test_cut_sampled_zero_violations():
    inst = generate_instance(GeneratorConfig("cut", 40, seed=3))
    rep = check_submodularity(inst.objective, trials=1000, exhaustive=False)
    assert rep.mode == "sampled" and rep.checked == 1000 and rep.ok


def test_coverage_exhaustive_n6():
    inst = generate_instance(GeneratorConfig("coverage", 6, seed=1))
    rep = check_submodularity(inst.objective)
    assert rep.mode == "exhaustive" and rep.ok and rep.checked == 15 * 16


def brute_triples(f, n):
    """All (A ⊆ B, e ∉ B) by direct enumeration; returns the violation count."""
    bad = 0
    for Bbits in range(1 << n):
        sub = Bbits
        while True:
            for e in range(n):
                if not Bbits >> e & 1:
                    ga = f.evaluate(sub | 1 << e) - f.evaluate(sub)
                    gb = f.evaluate(Bbits | 1 << e) - f.evaluate(Bbits)
                    bad += ga < gb - 1e-9
            if sub == 0:
                break
            sub = (sub - 1) & Bbits
    return bad


@pytest.mark.parametrize("kind", KINDS)
def test_one_step_check_agrees_with_all_triples(kind):
    f = generate_instance(GeneratorConfig(kind, 6, seed=2)).objective
    assert brute_triples(f, 6) == 0
    assert check_submodularity(f).ok
    sup = supermodular_table()
    assert brute_triples(sup, 3) > 0 and not check_submodularity(sup).ok


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("seed", range(3))
def test_shipped_kinds_valid(kind, seed):
    f = generate_instance(GeneratorConfig(kind, 9, seed=seed)).objective
    assert check_submodularity(f).ok
    assert check_normalization(f) == []
    if kind != "table":
        g = generate_instance(GeneratorConfig(kind, 30, seed=seed)).objective
        assert check_submodularity(g, trials=2000).ok
        assert check_normalization(g) == []


@pytest.mark.parametrize("kind", ["cut", "revenue"])
def test_non_monotone_test_beds(kind):
    f = generate_instance(GeneratorConfig(kind, 8, seed=0)).objective
    table = f.evaluate_batch(all_masks(8))
    idx = np.arange(256)
    gains = [table[idx[(idx >> e) & 1 == 0] | 1 << e] - table[idx[(idx >> e) & 1 == 0]]
             for e in range(8)]
    assert min(g.min() for g in gains) < 0


@settings(max_examples=40, deadline=None)
@given(kind=st.sampled_from(KINDS), seed=st.integers(0, 50),
       bits=st.integers(0, (1 << 12) - 1))
def test_single_and_batch_paths_identical(kind, seed, bits):
    f = generate_instance(GeneratorConfig(kind, 12, seed=seed)).objective
    batch = f.evaluate_batch(np.stack([bits_to_mask(b, 12) for b in (bits, 0, bits ^ 0xFFF)]))
    assert f.evaluate(bits) == batch[0]
    assert f.evaluate(bits ^ 0xFFF) == batch[2]
    assert tabulate(f).evaluate(bits) == f.evaluate(bits)
