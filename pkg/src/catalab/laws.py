"""Executable checks of the catalysis laws and the end-to-end coupling pipeline.

Every inequality is evaluated on constructive codec estimates and metered
counts, and reported together with its slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

from . import affine_sat, encoding, thermo
from .encoding import Substrate
from .meter import CostMeter, speedup
from .scenario import Scenario
from .structures import AffineSubspace, SampleSet

CATALYST = "CATALYST"
NOT_CATALYST = "NOT_CATALYST"


class IntelligenceMismatch(ValueError):
    pass


class RefinementFailure(ValueError):
    pass


@dataclass(frozen=True)
class LawConfig:
    c_u: float = 0.0
    eta: Optional[float] = None  # default: n bits
    delta: float = 0.5
    header_overhead: Optional[int] = None  # default: encoding.default_header_overhead(n)
    restore_bound: Optional[int] = None  # default: header_overhead

    def __post_init__(self) -> None:
        for v in (self.c_u, self.eta, self.delta, self.header_overhead, self.restore_bound):
            if v is not None and v < 0:
                raise ValueError("law thresholds must be non-negative")

    def for_n(self, n: int) -> "LawConfig":
        ho = self.header_overhead if self.header_overhead is not None else encoding.default_header_overhead(n)
        return LawConfig(
            self.c_u,
            self.eta if self.eta is not None else float(n),
            self.delta,
            ho,
            self.restore_bound if self.restore_bound is not None else ho,
        )


def _log2(g) -> float:
    g = Fraction(g)
    return math.log2(g.numerator) - math.log2(g.denominator)


# ---------------------------------------------------------------------------
# single laws


def check_selectivity(gamma, mu_bits: float, cfg: LawConfig) -> Tuple[bool, float]:
    """log2(gamma) <= mu + c_U, with slack mu + c_U - log2(gamma)."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    slack = mu_bits + cfg.c_u - _log2(gamma)
    return slack >= 0, slack


def check_refinement(desc_coarse: Any, desc_fine: Any, sigma: Any, cfg: LawConfig) -> Tuple[bool, bool]:
    """(fine reconstructs coarse within header overhead, monotone mutual information)."""
    ho = cfg.header_overhead if cfg.header_overhead is not None else 0
    refines = encoding.khat_cond(desc_coarse, desc_fine).bits <= ho
    monotone = (
        encoding.mutual_info(sigma, desc_fine).bits >= encoding.mutual_info(sigma, desc_coarse).bits - cfg.c_u
    )
    return refines, monotone


def erasure_floor_holds(charged_bits: int, mu_installed: float, info_data: float, c_u: float) -> Tuple[bool, float]:
    """Charged erasures >= installed information not supplied by the data, minus c_U."""
    slack = charged_bits - (mu_installed - info_data - c_u)
    return slack >= 0, slack


# ---------------------------------------------------------------------------
# catalyst audit


@dataclass(frozen=True)
class RunRecord:
    task: Any
    solutions: frozenset
    n_exec: int


@dataclass
class CatalystReport:
    pathway_opening: bool
    bounded_reconfiguration: bool
    delta_k_cycle: int
    selectivity: bool
    eta_bits: int
    eta_threshold: float
    transfer_ok: bool
    gamma: Fraction
    mu_bits: int
    slack_bits: float
    ladder: List[Tuple[int, Fraction]] = field(default_factory=list)
    tasks: int = 0

    @property
    def failing(self) -> List[str]:
        out = []
        if not self.pathway_opening:
            out.append("pathway_opening")
        if not self.bounded_reconfiguration:
            out.append("bounded_reconfiguration")
        if not self.selectivity:
            out.append("selectivity")
        return out

    @property
    def verdict(self) -> str:
        return CATALYST if not self.failing else NOT_CATALYST

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "failing": self.failing,
            "gamma": float(self.gamma),
            "mu_bits": self.mu_bits,
            "eta_bits": self.eta_bits,
            "eta_threshold_bits": self.eta_threshold,
            "delta_k_cycle": self.delta_k_cycle,
            "ladder": [{"size": s, "gamma": float(g)} for s, g in self.ladder],
            "slack_bits": self.slack_bits,
            "pathway_opening": self.pathway_opening,
            "bounded_reconfiguration": self.bounded_reconfiguration,
            "selectivity": self.selectivity,
            "transfer_ok": self.transfer_ok,
            "tasks_sampled": self.tasks,
        }


def audit_catalyst(
    baseline_runs: Sequence[RunRecord],
    catalytic_runs: Sequence[RunRecord],
    substrate_desc: Any,
    class_desc: Any,
    cfg: LawConfig,
    ladder: Sequence[Tuple[int, Any]] = (),
    delta_k_cycle: int = 0,
) -> CatalystReport:
    """Check the three catalyst conditions on a sampled task set.

    Transfer is evidenced by the smallest speed-up along the finite ladder;
    this records sampled evidence, not a limit.
    """
    if len(baseline_runs) != len(catalytic_runs) or not baseline_runs:
        raise IntelligenceMismatch("run lists must be non-empty and aligned")
    for b, c in zip(baseline_runs, catalytic_runs):
        if b.solutions != c.solutions:
            raise IntelligenceMismatch(f"solution sets differ on task {b.task!r}")
    n = getattr(class_desc, "n", 0)
    cfg = cfg.for_n(n)
    pathway = all(c.n_exec < b.n_exec for b, c in zip(baseline_runs, catalytic_runs))
    gamma = Fraction(sum(b.n_exec for b in baseline_runs), sum(c.n_exec for c in catalytic_runs))
    mu = encoding.mutual_info(class_desc, substrate_desc).bits
    ladder = [(int(s), Fraction(g)) for s, g in ladder]
    transfer = bool(ladder) and min(g for _, g in ladder) >= 1 + Fraction(cfg.delta)
    _, slack = check_selectivity(gamma, mu, cfg)
    return CatalystReport(
        pathway_opening=pathway,
        bounded_reconfiguration=delta_k_cycle <= cfg.restore_bound,
        delta_k_cycle=delta_k_cycle,
        selectivity=mu >= cfg.eta and transfer,
        eta_bits=mu,
        eta_threshold=cfg.eta,
        transfer_ok=transfer,
        gamma=gamma,
        mu_bits=mu,
        slack_bits=slack,
        ladder=ladder,
        tasks=len(baseline_runs),
    )


def substrate_delta(before: str, after: str) -> int:
    """Reconfiguration across a cycle: patch length between two substrate codewords."""
    if before == after:
        return 0
    return encoding.khat_cond(encoding.Bits(before), encoding.Bits(after)).bits


# ---------------------------------------------------------------------------
# composition


@dataclass(frozen=True)
class Stage:
    """One link Σ_prev -> Σ_next of a catalyst chain.

    ``substrate`` is the cumulative description after this stage, so a later
    stage's description contains every earlier one.
    """

    substrate: Substrate
    n_prev: int
    n_next: int

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.n_prev, self.n_next)


@dataclass
class CompositeReport:
    gamma1: Fraction
    gamma2: Fraction
    gamma_composite: Fraction
    eta1: int
    eta2: int
    eta_composite: int
    independent: bool
    refines: bool
    monotone: bool
    multiplicative_holds: bool
    eta_max_holds: bool
    eta_additive_holds: Optional[bool]
    adapt_floor_j: Optional[float] = None

    @property
    def holds(self) -> bool:
        return (
            self.multiplicative_holds
            and self.eta_max_holds
            and self.eta_additive_holds is not False
        )

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        for k in ("gamma1", "gamma2", "gamma_composite"):
            d[k] = float(d[k])
        d["holds"] = self.holds
        return d


def compose(
    stage1: Stage,
    stage2: Stage,
    sigma: AffineSubspace,
    cfg: LawConfig,
    phys: thermo.PhysicalConfig | None = None,
    data_total: SampleSet | None = None,
) -> CompositeReport:
    """Compose Σ0 -> Σ1 -> Σ2 where stage 2's description refines stage 1's."""
    cfg = cfg.for_n(sigma.n)
    if stage1.n_next != stage2.n_prev:
        raise ValueError("stages do not chain: stage1 output count != stage2 input count")
    fine = stage2.substrate
    refines, monotone = check_refinement(stage1.substrate, fine, sigma, cfg)
    if not refines:
        raise RefinementFailure("stage 2 substrate does not refine stage 1")
    g1, g2 = stage1.gamma, stage2.gamma
    gc = Fraction(stage1.n_prev, stage2.n_next)
    eta1 = encoding.mutual_info(sigma, stage1.substrate).bits
    eta2 = encoding.mutual_info(sigma, stage2.substrate).bits
    etac = encoding.mutual_info(sigma, fine).bits
    # independence probe: does stage 2 still tell us about stage 1 once sigma is known?
    given_sigma = encoding.khat_cond(stage1.substrate, Substrate((sigma,))).bits
    given_both = encoding.khat_cond(stage1.substrate, fine.extend(sigma)).bits
    independent = given_sigma - given_both <= cfg.header_overhead
    adapt = None
    if phys is not None and data_total is not None:
        info = encoding.mutual_info(sigma, data_total).bits
        adapt = thermo.adaptation_floor(phys, etac, info, cfg.c_u)
    return CompositeReport(
        gamma1=g1,
        gamma2=g2,
        gamma_composite=gc,
        eta1=eta1,
        eta2=eta2,
        eta_composite=etac,
        independent=independent,
        refines=refines,
        monotone=monotone,
        multiplicative_holds=gc >= g1 * g2,
        eta_max_holds=etac >= max(eta1, eta2) - cfg.c_u,
        eta_additive_holds=(etac >= eta1 + eta2 - cfg.c_u) if independent else None,
        adapt_floor_j=adapt,
    )


def nested_chain(n: int, d: int, extra: int, seed: int, instance_seed: int) -> Tuple[Stage, Stage, AffineSubspace]:
    """Metered three-solver chain: exhaustive -> superspace W -> class subspace V."""
    v = affine_sat.random_subspace(n, d, seed)
    w = affine_sat.random_superspace(v, extra, seed + 1)
    inst = affine_sat.make_instance(v, instance_seed)
    m0, m1, m2 = CostMeter(), CostMeter(), CostMeter()
    s0 = affine_sat.solve_baseline(inst, m0)
    s1 = affine_sat.solve_subspace(inst, w, m1)
    s2 = affine_sat.solve_catalytic(inst, v, m2)
    if not s0 == s1 == s2:
        raise IntelligenceMismatch("chain solvers disagree")
    st1 = Stage(Substrate((w,)), m0.exec_irrev_bits, m1.exec_irrev_bits)
    st2 = Stage(Substrate((w, v)), m1.exec_irrev_bits, m2.exec_irrev_bits)
    return st1, st2, v


# ---------------------------------------------------------------------------
# end-to-end coupling scenario


@dataclass
class ScenarioResult:
    scenario: Scenario
    energy: thermo.EnergyReport
    catalyst: CatalystReport
    cache_catalyst: Optional[CatalystReport]
    speedup: Any
    adaptation: affine_sat.AdaptationResult
    meters: dict
    laws: dict
    reference_figures: dict
    ladder: List[affine_sat.LadderRung]

    @property
    def law_violations(self) -> List[str]:
        return [k for k, v in self.laws.items() if not v["holds"]]

    def to_report(self) -> dict:
        from . import __version__

        return {
            "report_schema": "catalab.report/1",
            "versions": {"catalab": __version__},
            "scenario": self.scenario.to_json(),
            "seeds": {"class": self.scenario.class_seed, "adaptation": self.scenario.adapt_seed},
            "meters": self.meters,
            "speedup": self.speedup.to_json(),
            "energy": self.energy.to_json(),
            "catalyst": self.catalyst.to_json(),
            "cache_catalyst": self.cache_catalyst.to_json() if self.cache_catalyst else None,
            "adaptation": self.adaptation.to_json(),
            "laws": self.laws,
            "law_violations": self.law_violations,
            "reference_figures": self.reference_figures,
        }


def coupling_scenario(sc: Scenario) -> ScenarioResult:
    """generate -> adapt -> meter both solvers -> floors -> break-even, with law checks."""
    n, d = sc.n, sc.d
    cfg = LawConfig(sc.c_u, sc.eta_bits, sc.delta, sc.header_overhead).for_n(n)
    phys = thermo.PhysicalConfig(sc.temperature_k, sc.overhead_exec, sc.overhead_adapt)
    c = thermo.landauer_cost(phys)

    v = affine_sat.random_subspace(n, d, sc.class_seed)
    sigma = v.canonical()
    samples = affine_sat.sample_points(v, sc.m, sc.adapt_seed)
    adapt_meter = CostMeter()
    ad = affine_sat.adapt_from_samples(samples, v, adapt_meter)
    substrate = Substrate((v,))
    mu = encoding.mutual_info(sigma, substrate).bits
    info_data = ad.info_data_bits

    exec_base, exec_cat = CostMeter(), CostMeter()
    cache_report = None
    rungs: List[affine_sat.LadderRung] = []
    if sc.analytic:
        n0, n1 = (1 << n) * n, (1 << d) * n
        exec_base.exec_irrev_bits, exec_cat.exec_irrev_bits = n0, n1
        exec_base.cycles = exec_cat.cycles = 1
        gamma = Fraction(n0, n1)
        ladder = [(s, gamma) for s in sc.ladder]
        mu_ok = mu >= cfg.eta
        transfer = bool(ladder) and gamma >= 1 + Fraction(cfg.delta)
        _, slack = check_selectivity(gamma, mu, cfg)
        delta_k = 0
        catalyst = CatalystReport(
            pathway_opening=d < n,
            bounded_reconfiguration=delta_k <= cfg.restore_bound,
            delta_k_cycle=delta_k,
            selectivity=mu_ok and transfer,
            eta_bits=mu,
            eta_threshold=cfg.eta,
            transfer_ok=transfer,
            gamma=gamma,
            mu_bits=mu,
            slack_bits=slack,
            ladder=ladder,
            tasks=0,
        )
        per_query = (n0, n1)
    else:
        before = encoding.encode(substrate).bits
        count = max(sc.instances, max(sc.ladder, default=0))
        cache, runs = affine_sat.ladder_runs(v, count, sc.class_seed + 7919, sc.cache_size)
        rungs = affine_sat.ladder_rungs(runs, sc.ladder)
        # the solvers only read V; re-encode it after the runs to measure any drift
        delta_k = substrate_delta(before, encoding.encode(substrate).bits)
        head = runs[: sc.instances]
        for r in head:
            exec_base.record("exec", r.n_baseline).tick()
            exec_cat.record("exec", r.n_catalytic).tick()
        gamma = Fraction(exec_base.exec_irrev_bits, exec_cat.exec_irrev_bits)
        audit_tasks = runs[: max(sc.ladder, default=sc.instances)]
        b_runs = [RunRecord(r.instance.key(), r.solutions, r.n_baseline) for r in audit_tasks]
        c_runs = [RunRecord(r.instance.key(), r.solutions, r.n_catalytic) for r in audit_tasks]
        k_runs = [RunRecord(r.instance.key(), r.solutions, r.n_cache) for r in audit_tasks]
        catalyst = audit_catalyst(
            b_runs, c_runs, substrate, sigma, cfg, [(g.size, g.gamma_catalytic) for g in rungs], delta_k
        )
        cache_report = audit_catalyst(
            b_runs, k_runs, cache, sigma, cfg, [(g.size, g.gamma_cache) for g in rungs], 0
        )
        per_query = (exec_base.exec_irrev_bits // len(head), exec_cat.exec_irrev_bits // len(head))

    if sc.energy_convention == "candidates":
        q_base, q_cat = 1 << n, 1 << d
    else:
        q_base, q_cat = per_query
    e_base = thermo.energy_floor(phys, q_base, "exec")
    e_cat = thermo.energy_floor(phys, q_cat, "exec")
    score = thermo.IntelligenceScore(((1.0, 1.0),))
    phi, phi_floor = thermo.wpi(e_cat, sc.tau_s, score, phys, q_cat)
    restore = thermo.restoration_floor(phys, delta_k)
    adapt_floor = thermo.adaptation_floor(phys, mu, info_data, sc.c_u)
    coupling_floor = thermo.coupling_adapt_floor(phys, gamma, info_data, sc.c_u)
    charged_j = thermo.energy_floor(phys, adapt_meter.adapt_erase_bits, "adapt")
    be = thermo.breakeven(phys, gamma, info_data, sc.c_u, e_base, restore)

    energy = thermo.EnergyReport(c, e_base, phi, phi_floor, restore, adapt_floor, be, sc.tau_s)

    sel_ok, sel_slack = check_selectivity(gamma, mu, cfg)
    l2_ok, l2_slack = erasure_floor_holds(adapt_meter.adapt_erase_bits, mu, info_data, sc.c_u)
    coupling_ok = charged_j >= coupling_floor
    laws = {
        "selectivity": {"holds": sel_ok, "slack_bits": sel_slack, "log2_gamma": _log2(gamma), "mu_bits": mu},
        "erasure_floor": {
            "holds": l2_ok,
            "slack_bits": l2_slack,
            "charged_bits": adapt_meter.adapt_erase_bits,
        },
        "coupling_adapt": {
            "holds": coupling_ok,
            "charged_j": charged_j,
            "floor_j": coupling_floor,
        },
        "wpi_floor": {"holds": phi_floor is None or phi_floor <= phi, "wpi_w": phi, "wpi_floor_w": phi_floor},
    }
    closed_adapt = thermo.adaptation_floor(phys, ad.closed_form_residual_bits, 0.0, sc.c_u) if sc.m < d + 1 else 0.0
    reference_figures = {
        "baseline_query_j": thermo.energy_floor(phys, 1 << n, "exec"),
        "catalytic_query_j": thermo.energy_floor(phys, 1 << d, "exec"),
        "metered_baseline_query_j": thermo.energy_floor(phys, (1 << n) * n, "exec"),
        "metered_catalytic_query_j": thermo.energy_floor(phys, (1 << d) * n, "exec"),
        "closed_form_residual_bits": ad.closed_form_residual_bits,
        "constructive_residual_bits": ad.residual_bits,
        "closed_form_adapt_floor_j": closed_adapt,
        "selectivity_slack_closed_form_bits": n * d + n - (n - d),
    }
    meters = {
        "baseline": exec_base.snapshot(),
        "catalytic": exec_cat.snapshot(),
        "adaptation": adapt_meter.snapshot(),
    }
    return ScenarioResult(
        sc,
        energy,
        catalyst,
        cache_report,
        speedup(exec_base.exec_irrev_bits, exec_cat.exec_irrev_bits),
        ad,
        meters,
        laws,
        reference_figures,
        rungs,
    )
