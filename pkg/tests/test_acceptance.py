"""Acceptance gate: one test per criterion, each printing a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the lines are also
repeated in the terminal summary of any pytest run that includes this file.
"""

from __future__ import annotations

import contextlib
import math
import random
import time
from dataclasses import replace
from fractions import Fraction

import pytest

from catalab import affine_sat, encoding, gf2, laws, thermo
from catalab.catalytic_vm import compile_formula, fuzz, parse_formula, random_formula, run
from catalab.encoding import Substrate
from catalab.laws import CATALYST, NOT_CATALYST, LawConfig
from catalab.meter import CostMeter
from catalab.scenario import bundled, load
from catalab.structures import SampleSet

from .conftest import ACCEPTANCE


@contextlib.contextmanager
def criterion(num: int, title: str, budget_s: float):
    notes: list = []
    t0 = time.perf_counter()
    try:
        yield notes
        elapsed = time.perf_counter() - t0
        assert elapsed < budget_s, f"runtime {elapsed:.1f}s over budget {budget_s}s"
    except BaseException as e:
        line = f"FAIL  criterion {num}: {title} :: {e}"
        ACCEPTANCE.append(line)
        print(line)
        raise
    line = f"PASS  criterion {num}: {title} ({time.perf_counter() - t0:.2f}s) {'; '.join(notes)}"
    ACCEPTANCE.append(line)
    print(line)


def flagship(**kw):
    return replace(load(bundled("paper_6_1.json")), **kw)


def test_criterion_1_landauer_constant():
    with criterion(1, "Landauer constant at 300 K", 1.0) as notes:
        c = thermo.landauer_cost(thermo.PhysicalConfig(300))
        assert c == pytest.approx(2.871e-21, rel=5e-3)
        notes.append(f"c={c:.4e} J")


def test_criterion_2_worked_example_energies():
    with criterion(2, "worked-example energy figures (n=100, d=10)", 5.0) as notes:
        cfg = thermo.PhysicalConfig(300, 1e9, 1e9)
        base = thermo.energy_floor(cfg, 2**100)
        cat = thermo.energy_floor(cfg, 2**10)
        assert base == pytest.approx(3.6e18, rel=2e-2)
        assert cat == pytest.approx(3e-9, rel=5e-2)
        res = laws.coupling_scenario(flagship(m=5, class_seed=3, adapt_seed=9))
        fig = res.reference_figures
        assert fig["baseline_query_j"] == base and fig["catalytic_query_j"] == cat
        assert fig["closed_form_residual_bits"] == 700
        assert fig["closed_form_adapt_floor_j"] == pytest.approx(2e-9, rel=5e-2)
        r = res.adaptation.hull_dim
        constructive = res.adaptation.residual_bits
        assert r == 4
        assert 100 * (10 - r) <= constructive <= 100 * (10 - r) + encoding.default_header_overhead(100)
        assert abs(constructive - 700) <= 100
        notes.append(f"E0={base:.3e} J, E1={cat:.3e} J, adapt={fig['closed_form_adapt_floor_j']:.3e} J")
        notes.append(f"residual constructive={constructive} vs 700 (band +-100)")


def test_criterion_3_breakeven():
    with criterion(3, "break-even count and no-horizon case", 5.0) as notes:
        res = laws.coupling_scenario(flagship())
        assert res.scenario.m >= res.scenario.d + 1
        assert res.energy.breakeven_count == 0
        cfg = thermo.PhysicalConfig(300, 1e9, 1e9)
        assert thermo.breakeven(cfg, 1, 0, 0, res.energy.floor_exec, 0.0) == thermo.NO_HORIZON
        notes.append("m=11 -> 0 queries; gamma=1 -> no_horizon")


def _random_triples(count, seed, max_n=16):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, max_n)
        out.append((n, rng.randint(0, n), rng.getrandbits(32)))
    return out


def test_criterion_4_desk_speedup():
    with criterion(4, "metered gamma = 2^(n-d) with matched solution sets, 100 scenarios", 120.0) as notes:
        for n, d, seed in _random_triples(100, 4):
            v = affine_sat.random_subspace(n, d, seed)
            inst = affine_sat.make_instance(v, seed + 1)
            mb, mc = CostMeter(), CostMeter()
            sb = affine_sat.solve_baseline(inst, mb)
            sc = affine_sat.solve_catalytic(inst, v, mc)
            assert sb == sc == frozenset(v.points()), (n, d, seed)
            assert Fraction(mb.exec_irrev_bits, mc.exec_irrev_bits) == 2 ** (n - d), (n, d, seed)
        notes.append("100/100 exact")


def test_criterion_5_selectivity():
    with criterion(5, "selectivity law on generated scenarios", 60.0) as notes:
        worst = math.inf
        for n, d, seed in _random_triples(100, 5):
            v = affine_sat.random_subspace(n, d, seed)
            inst = affine_sat.make_instance(v, seed + 1)
            mb, mc = CostMeter(), CostMeter()
            affine_sat.solve_baseline(inst, mb)
            affine_sat.solve_catalytic(inst, v, mc)
            gamma = Fraction(mb.exec_irrev_bits, mc.exec_irrev_bits)
            mu = encoding.mutual_info(v, Substrate((v,))).bits
            holds, slack = laws.check_selectivity(gamma, mu, LawConfig())
            assert holds and slack > 0, (n, d, seed, slack)
            worst = min(worst, slack)
        res = laws.coupling_scenario(flagship())
        slack = res.laws["selectivity"]["slack_bits"]
        assert res.laws["selectivity"]["log2_gamma"] == 90
        assert abs(slack - 1010) <= encoding.default_header_overhead(100)
        notes.append(f"100/100 hold, min slack {worst:.0f} bits; n=100 slack {slack:.0f} vs 1010")


def test_criterion_6_composition():
    with criterion(6, "composition of nested-subspace chains", 120.0) as notes:
        rng = random.Random(6)
        for _ in range(24):
            n = rng.randint(2, 16)
            d = rng.randint(0, n - 1)
            extra = rng.randint(1, n - d)
            st1, st2, v = laws.nested_chain(n, d, extra, rng.getrandbits(32), rng.getrandbits(32))
            rep = laws.compose(st1, st2, v, LawConfig())
            assert rep.gamma_composite == rep.gamma1 * rep.gamma2 == 2 ** (n - d)
            assert rep.refines and rep.monotone and rep.eta_max_holds
        notes.append("24/24 chains multiplicative and refining")


def test_criterion_7_cache_falsifier():
    with criterion(7, "cache rejected, subspace solver accepted on a 5-rung ladder", 60.0) as notes:
        res = laws.coupling_scenario(load(bundled("desk_16_6.json")))
        cache = [g.gamma_cache for g in res.ladder]
        assert len(cache) == 5
        assert all(a > b for a, b in zip(cache, cache[1:]))
        assert cache[-1] < 1 + Fraction(res.scenario.delta)
        assert all(g.gamma_catalytic == 1024 for g in res.ladder)
        assert res.cache_catalyst.verdict == NOT_CATALYST
        assert "selectivity" in res.cache_catalyst.failing
        assert res.catalyst.verdict == CATALYST
        notes.append("cache " + " > ".join(f"{float(g):.3f}" for g in cache))


def test_criterion_8_catalytic_vm():
    with criterion(8, "catalytic VM restoration and transparency", 60.0) as notes:
        p = compile_formula(parse_formula("(mul x0 x1)"))
        cases = 0
        for x in range(4):
            for aux in range(8):
                a = [(aux >> i) & 1 for i in range(3)]
                r = run(p, [x & 1, x >> 1], a)
                exp = [a[0] ^ ((x & 1) & (x >> 1)), a[1], a[2]]
                assert list(r.aux_final) == exp and r.delta_k_cycle == 0
                cases += 1
        assert cases == 32
        cfg = thermo.PhysicalConfig(300)
        for width in (1, 16):
            f = random_formula(3, 8, random.Random(width))
            s = fuzz(f, 10_000, seed=width, width=width, num_inputs=8)
            assert (s.restoration_failures, s.transparency_failures, s.nonzero_delta_k) == (0, 0, 0)
            notes.append(f"w={width}: 10000 cases, 0 failures")
        assert thermo.restoration_floor(cfg, 0) == 0.0


def test_criterion_9_adaptation_monotonicity():
    with criterion(9, "adaptation residual monotone in m, erasures above the floor", 60.0) as notes:
        rng = random.Random(9)
        reached = 0
        for _ in range(20):
            n = rng.randint(1, 16)
            d = rng.randint(0, n)
            v = affine_sat.random_subspace(n, d, rng.getrandbits(32))
            full = affine_sat.sample_points(v, d + 2, rng.getrandbits(32))
            ho = encoding.default_header_overhead(n)
            mu = encoding.mutual_info(v, Substrate((v,))).bits
            prev = math.inf
            for m in range(d + 3):
                meter = CostMeter()
                ad = affine_sat.adapt_from_samples(full.prefix(m), v, meter)
                assert ad.residual_bits <= prev
                prev = ad.residual_bits
                assert meter.adapt_erase_bits == ad.residual_bits
                assert laws.erasure_floor_holds(meter.adapt_erase_bits, mu, ad.info_data_bits, 0)[0]
                if ad.hull_dim == d:
                    assert ad.residual_bits <= ho
            dims = [len(gf2.affine_hull(list(full.points[:m]))[1]) for m in range(1, d + 3)]
            reached += d in dims
        assert isinstance(full, SampleSet)
        notes.append(f"20/20 monotone; {reached}/20 reached full hull within d+2 samples")
