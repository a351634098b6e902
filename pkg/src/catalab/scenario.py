"""Scenario files: a versioned JSON schema, loading and guard checks."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional

import jsonschema

SCHEMA_VERSION = "catalab.scenario/1"
SEED_ENV = "CATALAB_SEED"
METERED_MAX_N = 28


class ScenarioError(ValueError):
    pass


_NUM = {"type": "number"}
_INT = {"type": "integer"}


def _obj(props: dict, required: List[str] = ()) -> dict:
    return {"type": "object", "properties": props, "required": list(required), "additionalProperties": False}


SCHEMA = _obj(
    {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "class": _obj(
            {"n": {"type": "integer", "minimum": 1, "maximum": 4096}, "d": {"type": "integer", "minimum": 0}, "seed": _INT},
            ["n", "d", "seed"],
        ),
        "adaptation": _obj({"m": {"type": "integer", "minimum": 0}, "seed": _INT}, ["m", "seed"]),
        "physics": _obj(
            {
                "temperature_k": {"type": "number", "exclusiveMinimum": 0},
                "overhead_exec": {"type": "number", "minimum": 1},
                "overhead_adapt": {"type": "number", "minimum": 1},
                "tau_s": {"type": "number", "exclusiveMinimum": 0},
            },
            ["temperature_k"],
        ),
        "laws": _obj(
            {
                "c_u": {"type": "number", "minimum": 0},
                "eta_bits": {"type": ["number", "null"], "minimum": 0},
                "delta": {"type": "number", "minimum": 0},
                "header_overhead": {"type": ["integer", "null"], "minimum": 0},
            }
        ),
        "benchmark": _obj(
            {
                "instances": {"type": "integer", "minimum": 1},
                "ladder": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "cache_size": {"type": "integer", "minimum": 0},
            }
        ),
        "mode": _obj(
            {
                "analytic": {"type": "boolean"},
                "energy_convention": {"enum": ["metered", "candidates"]},
            }
        ),
    },
    ["schema", "name", "class", "adaptation", "physics"],
)


@dataclass(frozen=True)
class Scenario:
    name: str
    n: int
    d: int
    class_seed: int
    m: int
    adapt_seed: int
    temperature_k: float = 300.0
    overhead_exec: float = 1.0
    overhead_adapt: float = 1.0
    tau_s: float = 1.0
    c_u: float = 0.0
    eta_bits: Optional[float] = None
    delta: float = 0.5
    header_overhead: Optional[int] = None
    instances: int = 4
    ladder: List[int] = field(default_factory=lambda: [8, 16, 32, 64, 128])
    cache_size: int = 8
    analytic: bool = False
    energy_convention: str = "metered"

    def __post_init__(self) -> None:
        if not 0 <= self.d <= self.n:
            raise ScenarioError("need 0 <= d <= n")
        if self.n > METERED_MAX_N and not self.analytic:
            raise ScenarioError(f"n={self.n} exceeds the enumeration guard; set mode.analytic")
        if list(self.ladder) != sorted(self.ladder):
            raise ScenarioError("ladder sizes must be increasing")

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "name": self.name,
            "class": {"n": self.n, "d": self.d, "seed": self.class_seed},
            "adaptation": {"m": self.m, "seed": self.adapt_seed},
            "physics": {
                "temperature_k": self.temperature_k,
                "overhead_exec": self.overhead_exec,
                "overhead_adapt": self.overhead_adapt,
                "tau_s": self.tau_s,
            },
            "laws": {
                "c_u": self.c_u,
                "eta_bits": self.eta_bits,
                "delta": self.delta,
                "header_overhead": self.header_overhead,
            },
            "benchmark": {"instances": self.instances, "ladder": list(self.ladder), "cache_size": self.cache_size},
            "mode": {"analytic": self.analytic, "energy_convention": self.energy_convention},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Scenario":
        try:
            jsonschema.validate(obj, SCHEMA)
        except jsonschema.ValidationError as e:
            path = "/".join(map(str, e.absolute_path)) or "<root>"
            raise ScenarioError(f"{path}: {e.message}") from None
        c, a, p = obj["class"], obj["adaptation"], obj["physics"]
        laws, bench, mode = obj.get("laws", {}), obj.get("benchmark", {}), obj.get("mode", {})
        kw = dict(
            name=obj["name"],
            n=c["n"],
            d=c["d"],
            class_seed=c["seed"],
            m=a["m"],
            adapt_seed=a["seed"],
            temperature_k=float(p["temperature_k"]),
            overhead_exec=float(p.get("overhead_exec", 1.0)),
            overhead_adapt=float(p.get("overhead_adapt", 1.0)),
            tau_s=float(p.get("tau_s", 1.0)),
            c_u=float(laws.get("c_u", 0.0)),
            eta_bits=laws.get("eta_bits"),
            delta=float(laws.get("delta", 0.5)),
            header_overhead=laws.get("header_overhead"),
            instances=bench.get("instances", 4),
            ladder=list(bench.get("ladder", [8, 16, 32, 64, 128])),
            cache_size=bench.get("cache_size", 8),
            analytic=mode.get("analytic", False),
            energy_convention=mode.get("energy_convention", "metered"),
        )
        return cls(**kw)

    def with_env_seed(self) -> "Scenario":
        """Apply the ``CATALAB_SEED`` override to both seeds, if set."""
        raw = os.environ.get(SEED_ENV)
        if not raw:
            return self
        try:
            s = int(raw)
        except ValueError:
            raise ScenarioError(f"{SEED_ENV} must be an integer") from None
        return replace(self, class_seed=s, adapt_seed=s + 1)


def load(path: str | Path) -> Scenario:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ScenarioError(f"cannot read scenario {path}: {e}") from None
    if not isinstance(obj, dict):
        raise ScenarioError("scenario must be a JSON object")
    return Scenario.from_json(obj)


def bundled(name: str) -> Path:
    return Path(__file__).parent / "scenarios" / name
