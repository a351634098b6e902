"""Irreversible bit-operation counters and the speed-up quantities built on them.

Cost model used by every solver in this package: testing one candidate
assignment overwrites the n-bit candidate register and is charged n bits;
constraint evaluation is treated as reversible (read, compute, uncompute) and
charged nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

EXEC = "exec"
ADAPT = "adapt"


@dataclass
class CostMeter:
    exec_irrev_bits: int = 0
    adapt_erase_bits: int = 0
    cycles: int = 0

    def record(self, role: str, bits: int) -> "CostMeter":
        if bits <= 0:
            raise ValueError("record() needs a positive bit count")
        if role == EXEC:
            self.exec_irrev_bits += bits
        elif role == ADAPT:
            self.adapt_erase_bits += bits
        else:
            raise ValueError(f"unknown role {role!r}")
        return self

    def tick(self, cycles: int = 1) -> "CostMeter":
        self.cycles += cycles
        return self

    def snapshot(self) -> dict:
        return {
            "n_exec_bits": self.exec_irrev_bits,
            "n_adapt_bits": self.adapt_erase_bits,
            "cycles": self.cycles,
        }


def record(meter: CostMeter, role: str, bits: int) -> CostMeter:
    return meter.record(role, bits)


def merge(a: CostMeter, b: CostMeter) -> CostMeter:
    return CostMeter(
        a.exec_irrev_bits + b.exec_irrev_bits,
        a.adapt_erase_bits + b.adapt_erase_bits,
        a.cycles + b.cycles,
    )


@dataclass(frozen=True)
class SpeedupReport:
    n_baseline: int
    n_catalytic: int

    @property
    def gamma(self) -> Fraction:
        return Fraction(self.n_baseline, self.n_catalytic)

    @property
    def barrier_baseline(self) -> float:
        return math.log2(self.n_baseline)

    @property
    def barrier_catalytic(self) -> float:
        return math.log2(self.n_catalytic)

    @property
    def log2_gamma(self) -> float:
        return self.barrier_baseline - self.barrier_catalytic

    def to_json(self) -> dict:
        return {
            "n_baseline": self.n_baseline,
            "n_catalytic": self.n_catalytic,
            "gamma": float(self.gamma),
            "barrier_baseline": self.barrier_baseline,
            "barrier_catalytic": self.barrier_catalytic,
            "barrier_reduction": self.log2_gamma,
        }


def speedup(n_baseline: int, n_catalytic: int) -> SpeedupReport:
    if n_baseline <= 0 or n_catalytic <= 0:
        raise ValueError("operation counts must be positive")
    return SpeedupReport(n_baseline, n_catalytic)
