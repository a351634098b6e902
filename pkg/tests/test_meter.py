from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from catalab import affine_sat, thermo
from catalab.meter import ADAPT, EXEC, CostMeter, merge, record, speedup

meters = st.builds(CostMeter, st.integers(0, 10**9), st.integers(0, 10**9), st.integers(0, 10**6))


def test_record_examples():
    m = record(CostMeter(), EXEC, 5)
    assert (m.exec_irrev_bits, m.adapt_erase_bits) == (5, 0)
    m = CostMeter().record(ADAPT, 3).record(EXEC, 2)
    assert (m.exec_irrev_bits, m.adapt_erase_bits) == (2, 3)
    with pytest.raises(ValueError):
        m.record(EXEC, 0)
    with pytest.raises(ValueError):
        m.record("heat", 1)


def test_baseline_solve_n4_charges_64():
    v = affine_sat.random_subspace(4, 2, 0)
    m = CostMeter()
    affine_sat.solve_baseline(affine_sat.make_instance(v, 0), m)
    assert m.exec_irrev_bits == 64


@given(meters, meters, meters)
def test_merge_laws(a, b, c):
    assert merge(a, CostMeter()) == a
    assert merge(a, b) == merge(b, a)
    assert merge(merge(a, b), c) == merge(a, merge(b, c))


def test_sharded_equals_single():
    v = affine_sat.random_subspace(16, 6, 1)
    inst = affine_sat.make_instance(v, 3)
    single = CostMeter()
    sols = affine_sat.solve_baseline(inst, single)
    sharded, m = affine_sat.solve_baseline_sharded(inst, 4)
    assert sharded == sols
    assert m.exec_irrev_bits == single.exec_irrev_bits == 2**16 * 16


def test_speedup_examples():
    r = speedup(2**16 * 16, 2**6 * 16)
    assert r.gamma == 1024 and r.log2_gamma == 10
    r = speedup(77, 77)
    assert r.gamma == 1 and r.log2_gamma == 0
    r = speedup(2**100 * 100, 2**10 * 100)
    assert r.log2_gamma == 90
    with pytest.raises(ValueError):
        speedup(0, 1)


@given(st.integers(1, 2**64), st.integers(1, 2**64))
def test_speedup_invariants(a, b):
    r = speedup(a, b)
    assert r.gamma == Fraction(a, b)
    assert r.barrier_baseline - r.barrier_catalytic == pytest.approx(r.log2_gamma)


def test_matched_overhead_wpi_ratio():
    cfg = thermo.PhysicalConfig(300, 7.0)
    n0, n1 = 2**16 * 16, 2**6 * 16
    i = thermo.IntelligenceScore()
    f0 = thermo.wpi(thermo.energy_floor(cfg, n0), 1, i, cfg, n0)[1]
    f1 = thermo.wpi(thermo.energy_floor(cfg, n1), 1, i, cfg, n1)[1]
    assert f1 / f0 == pytest.approx(1 / 1024, rel=1e-12)


def test_snapshot_fields():
    assert CostMeter(1, 2, 3).snapshot() == {"n_exec_bits": 1, "n_adapt_bits": 2, "cycles": 3}
