from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from catalab import thermo
from catalab.thermo import NO_HORIZON, EnergyReport, IntelligenceScore, PhysicalConfig

KB = 1.380649e-23


def c_at(t):
    return KB * t * math.log(2)


def test_landauer_examples():
    assert thermo.landauer_cost(PhysicalConfig(300)) == pytest.approx(2.871e-21, rel=5e-3)
    assert thermo.landauer_cost(PhysicalConfig(600)) == 2 * thermo.landauer_cost(PhysicalConfig(300))
    assert thermo.landauer_cost(PhysicalConfig(77)) == pytest.approx(7.37e-22, rel=1e-3)


@pytest.mark.parametrize("kw", [{"temperature_kelvin": 0}, {"temperature_kelvin": -1}, {"overhead_exec": 0.5}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        PhysicalConfig(**kw)


def test_energy_floor_examples():
    cfg = PhysicalConfig(300, 1e9, 1e9)
    assert thermo.energy_floor(cfg, 2**100) == pytest.approx(3.64e18, rel=2e-2)
    assert thermo.energy_floor(cfg, 0) == 0.0
    assert thermo.energy_floor(cfg, 700, "adapt") == pytest.approx(2.01e-9, rel=5e-3)
    with pytest.raises(ValueError):
        thermo.energy_floor(cfg, -1)


@given(st.integers(0, 10**6), st.integers(0, 10**6), st.floats(1, 1e9))
def test_energy_floor_linear(a, b, f):
    cfg = PhysicalConfig(300, f)
    lhs = thermo.energy_floor(cfg, a + b)
    assert lhs == pytest.approx(thermo.energy_floor(cfg, a) + thermo.energy_floor(cfg, b), rel=1e-12, abs=1e-300)
    assert thermo.energy_floor(PhysicalConfig(300, 2 * f), a) == pytest.approx(2 * thermo.energy_floor(cfg, a))


def test_wpi_examples():
    assert thermo.wpi(10, 2, IntelligenceScore(((5, 1),)))[0] == 1
    i = IntelligenceScore(((1, 0.5), (3, 1)))
    assert thermo.wpi(10, 2, i.scaled(2))[0] == pytest.approx(thermo.wpi(10, 2, i)[0] / 2)
    with pytest.raises(ValueError):
        thermo.wpi(1, 0, i)
    with pytest.raises(ValueError):
        thermo.wpi(1, 1, IntelligenceScore(((0, 1),)))


def test_wpi_desk_catalytic():
    cfg = PhysicalConfig(300)
    e = thermo.energy_floor(cfg, 2**6 * 16)
    phi, floor = thermo.wpi(e, 1, IntelligenceScore(), cfg, 2**6 * 16)
    assert phi == e and floor <= phi


@given(st.integers(0, 2**40), st.floats(1, 100), st.floats(1e-3, 1e3))
def test_wpi_floor_never_exceeds_wpi(n, slack, tau):
    cfg = PhysicalConfig(300)
    e = thermo.energy_floor(cfg, n) * slack
    phi, floor = thermo.wpi(e, tau, IntelligenceScore(), cfg, n)
    assert floor <= phi * (1 + 1e-12)


def test_wpi_rejects_energy_below_floor():
    cfg = PhysicalConfig(300)
    with pytest.raises(ValueError):
        thermo.wpi(thermo.energy_floor(cfg, 100) / 2, 1, IntelligenceScore(), cfg, 100)


def test_restoration_floor():
    cfg = PhysicalConfig(300)
    assert thermo.restoration_floor(cfg, 0) == 0
    assert thermo.restoration_floor(cfg, 1) == pytest.approx(2.871e-21, rel=5e-3)
    assert thermo.restoration_floor(cfg, 7) == pytest.approx(7 * c_at(300))
    with pytest.raises(ValueError):
        thermo.restoration_floor(cfg, -1)


def test_adaptation_floor_examples():
    cfg = PhysicalConfig(300, 1e9, 1e9)
    assert thermo.adaptation_floor(cfg, 700, 0, 0) == pytest.approx(2e-9, rel=5e-2)
    assert thermo.adaptation_floor(cfg, 10, 20, 0) == 0
    unit = PhysicalConfig(300)
    assert thermo.adaptation_floor(unit, 1100, 500, 0) == pytest.approx(600 * c_at(300))


@given(st.floats(0, 2000), st.floats(0, 2000), st.floats(0, 2000))
def test_adaptation_floor_monotone(mu, info, extra):
    cfg = PhysicalConfig(300)
    f = thermo.adaptation_floor(cfg, mu, info)
    assert thermo.adaptation_floor(cfg, mu, info + extra) <= f
    assert thermo.adaptation_floor(cfg, mu + extra, info) >= f


def test_coupling_adapt_floor():
    cfg = PhysicalConfig(300)
    assert thermo.coupling_adapt_floor(cfg, Fraction(2**90), 0, 0) == pytest.approx(90 * c_at(300))
    assert thermo.coupling_adapt_floor(cfg, 1024, 20, 0) == 0
    assert thermo.coupling_adapt_floor(cfg, 1, 0, 0) == 0


def test_breakeven_examples():
    # normalised units: c = 1 at this temperature
    unit = PhysicalConfig(1 / (KB * math.log(2)))
    num, den = thermo.breakeven_terms(unit, 1024, 0, 0, 100, 0)
    assert float(num) == pytest.approx(10)
    assert float(den) == pytest.approx(99.902, abs=1e-3)
    assert thermo.breakeven(unit, 1024, 0, 0, 100, 0) == 1
    cfg = PhysicalConfig(300, 1e9, 1e9)
    assert thermo.breakeven(cfg, 1, 0, 0, 1.0, 0.0) == NO_HORIZON
    assert thermo.breakeven(cfg, 1, 0, 0, 1.0, 1e-30) == NO_HORIZON
    assert thermo.breakeven(cfg, Fraction(2**90), 1116, 0, 3.64e18, 0.0) == 0


@given(
    st.integers(1, 60),
    st.floats(0, 40),
    st.floats(1e-3, 1e3),
    st.floats(0, 0.5),
)
def test_breakeven_consistency(k, info, e_base, restore_frac):
    cfg = PhysicalConfig(1 / (KB * math.log(2)))  # c = 1
    gamma = Fraction(2**k)
    restore = e_base * restore_frac * 0.5
    n = thermo.breakeven(cfg, gamma, info, 0, e_base, restore)
    assume(n != NO_HORIZON)
    num, _ = thermo.breakeven_terms(cfg, gamma, info, 0, e_base, restore)
    if n == 0:
        assert num == 0
        return
    amort = lambda q: thermo.amortized_query_energy(e_base, gamma, restore, num, q)  # noqa: E731
    assert amort(n) <= Fraction(e_base)
    if n > 1:
        assert amort(n - 1) > Fraction(e_base)


@given(st.integers(1, 40), st.integers(1, 20))
def test_breakeven_non_increasing_in_gamma(k, extra):
    cfg = PhysicalConfig(1 / (KB * math.log(2)))
    a = thermo.breakeven(cfg, 2**k, 0, 0, 100.0, 0.0)
    b = thermo.breakeven(cfg, 2 ** (k + extra), 0, 0, 100.0, 0.0)
    assert b <= a


def test_energy_report_json():
    rep = EnergyReport(1.0, 2.0, 3.0, 2.5, 0.0, 0.0, NO_HORIZON, 1.0)
    obj = rep.to_json()
    assert set(obj) == {
        "landauer_c_j", "floor_exec_j", "wpi_w", "wpi_floor_w",
        "restore_floor_j", "adapt_floor_j", "breakeven_count", "tau_s",
    }
    assert obj["breakeven_count"] == "no_horizon"
    assert EnergyReport.from_json(obj) == rep
