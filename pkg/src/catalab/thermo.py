"""Energy-side formulas: Landauer cost, substrate floors, WPI, restoration,
adaptation and break-even."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

BOLTZMANN = 1.380649e-23  # J/K, exact SI value
NO_HORIZON = "no_horizon"

Role = str  # "exec" | "adapt"


@dataclass(frozen=True)
class PhysicalConfig:
    temperature_kelvin: float = 300.0
    overhead_exec: float = 1.0
    overhead_adapt: float = 1.0
    boltzmann: float = BOLTZMANN

    def __post_init__(self) -> None:
        if not self.temperature_kelvin > 0:
            raise ValueError("temperature must be positive")
        if self.overhead_exec < 1 or self.overhead_adapt < 1:
            raise ValueError("overhead factors must be >= 1")

    def overhead(self, role: Role) -> float:
        if role == "exec":
            return self.overhead_exec
        if role == "adapt":
            return self.overhead_adapt
        raise ValueError(f"unknown substrate role {role!r}")


@dataclass(frozen=True)
class IntelligenceScore:
    """Task-weighted score: sum of w_i * p_i with w_i >= 0 and p_i in [0, 1]."""

    items: Tuple[Tuple[float, float], ...] = ((1.0, 1.0),)

    def __post_init__(self) -> None:
        for w, p in self.items:
            if w < 0 or not 0 <= p <= 1:
                raise ValueError("weights must be >= 0 and proficiencies in [0, 1]")

    @property
    def value(self) -> float:
        return sum(w * p for w, p in self.items)

    def scaled(self, k: float) -> "IntelligenceScore":
        return IntelligenceScore(tuple((w * k, p) for w, p in self.items))


@dataclass
class EnergyReport:
    landauer_c: float = 0.0
    floor_exec: float = 0.0
    wpi: Optional[float] = None
    wpi_floor: Optional[float] = None
    restore_floor: float = 0.0
    adapt_floor: float = 0.0
    breakeven_count: Union[int, str] = NO_HORIZON
    horizon_tau: float = 1.0

    def to_json(self) -> dict:
        return {
            "landauer_c_j": self.landauer_c,
            "floor_exec_j": self.floor_exec,
            "wpi_w": self.wpi,
            "wpi_floor_w": self.wpi_floor,
            "restore_floor_j": self.restore_floor,
            "adapt_floor_j": self.adapt_floor,
            "breakeven_count": self.breakeven_count,
            "tau_s": self.horizon_tau,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "EnergyReport":
        return cls(
            obj["landauer_c_j"],
            obj["floor_exec_j"],
            obj["wpi_w"],
            obj["wpi_floor_w"],
            obj["restore_floor_j"],
            obj["adapt_floor_j"],
            obj["breakeven_count"],
            obj["tau_s"],
        )


def landauer_cost(cfg: PhysicalConfig) -> float:
    """k_B * T * ln 2, joules per erased bit."""
    return cfg.boltzmann * cfg.temperature_kelvin * math.log(2)


def energy_floor(cfg: PhysicalConfig, n_irrev: int, role: Role = "exec") -> float:
    if n_irrev < 0:
        raise ValueError("bit count must be non-negative")
    return cfg.overhead(role) * float(n_irrev) * landauer_cost(cfg)


def wpi(
    energy: float,
    tau: float,
    intelligence: IntelligenceScore,
    cfg: PhysicalConfig | None = None,
    n_irrev: int | None = None,
) -> Tuple[float, Optional[float]]:
    """Watts per intelligence unit, and its Landauer floor when the bit count is known."""
    if not tau > 0:
        raise ValueError("horizon must be positive")
    score = intelligence.value
    if not score > 0:
        raise ValueError("intelligence score must be positive")
    phi = (energy / tau) / score
    if cfg is None or n_irrev is None:
        return phi, None
    phi_floor = energy_floor(cfg, n_irrev, "exec") / (tau * score)
    if phi_floor > phi * (1 + 1e-12):
        raise ValueError("energy is below the substrate floor for this bit count")
    return phi, phi_floor


def restoration_floor(cfg: PhysicalConfig, delta_k_cycle: int) -> float:
    if delta_k_cycle < 0:
        raise ValueError("delta_k_cycle must be non-negative")
    return cfg.overhead_adapt * delta_k_cycle * landauer_cost(cfg)


def adaptation_floor(cfg: PhysicalConfig, mu: float, info_data: float, c_u: float = 0.0) -> float:
    return cfg.overhead_adapt * landauer_cost(cfg) * max(0.0, mu - info_data - c_u)


def _log2(x: Union[int, float, Fraction]) -> float:
    if isinstance(x, Fraction):
        return math.log2(x.numerator) - math.log2(x.denominator)
    return math.log2(x)


def coupling_bits(gamma: Union[int, float, Fraction], info_data: float, c_u: float) -> float:
    """[log2 gamma - I(D:sigma) - 2 c_U]_+"""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return max(0.0, _log2(gamma) - info_data - 2 * c_u)


def coupling_adapt_floor(cfg: PhysicalConfig, gamma, info_data: float, c_u: float = 0.0) -> float:
    return cfg.overhead_adapt * landauer_cost(cfg) * coupling_bits(gamma, info_data, c_u)


def breakeven_terms(
    cfg: PhysicalConfig,
    gamma,
    info_data: float,
    c_u: float,
    e_baseline_query: float,
    e_restore_cycle: float,
) -> Tuple[Fraction, Fraction]:
    """Exact (numerator, denominator) of the break-even bound over the float inputs."""
    num = (
        Fraction(cfg.overhead_adapt)
        * Fraction(landauer_cost(cfg))
        * Fraction(coupling_bits(gamma, info_data, c_u))
    )
    g = Fraction(gamma)
    den = Fraction(e_baseline_query) * (1 - 1 / g) - Fraction(e_restore_cycle)
    return num, den


def breakeven(
    cfg: PhysicalConfig,
    gamma,
    info_data: float,
    c_u: float,
    e_baseline_query: float,
    e_restore_cycle: float,
) -> Union[int, str]:
    """Least deployment count amortising the adaptation floor, or NO_HORIZON.

    0 means the catalyst is favourable from the first query.
    """
    num, den = breakeven_terms(cfg, gamma, info_data, c_u, e_baseline_query, e_restore_cycle)
    if den <= 0:
        return NO_HORIZON
    if num == 0:
        return 0
    return math.ceil(num / den)


def amortized_query_energy(
    e_baseline_query: float, gamma, e_restore_cycle: float, e_adapt, count: int
) -> Fraction:
    """Catalytic per-query energy once adaptation is spread over ``count`` queries."""
    return (
        Fraction(e_baseline_query) / Fraction(gamma)
        + Fraction(e_restore_cycle)
        + Fraction(e_adapt) / count
    )
