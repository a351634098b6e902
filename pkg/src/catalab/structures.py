"""Plain data types for the affine class: subspaces, instances, samples, caches."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, Mapping, Tuple

from . import gf2


class InvalidSubspace(ValueError):
    pass


@dataclass(frozen=True)
class AffineSubspace:
    """``offset + span(basis)`` inside GF(2)^n, vectors stored as int bitsets."""

    n: int
    basis: Tuple[int, ...]
    offset: int = 0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvalidSubspace("n must be non-negative")
        limit = 1 << self.n
        for v in (*self.basis, self.offset):
            if not 0 <= v < limit:
                raise InvalidSubspace(f"vector {v:#x} does not fit in {self.n} bits")
        if not gf2.independent(self.basis):
            raise InvalidSubspace("basis rows are linearly dependent")

    @property
    def d(self) -> int:
        return len(self.basis)

    @property
    def size(self) -> int:
        return 1 << self.d

    def canonical(self) -> "AffineSubspace":
        """Reduced echelon basis and the coset representative with pivot bits cleared."""
        ech = gf2.echelon(self.basis)
        return AffineSubspace(self.n, tuple(ech), gf2.reduce(self.offset, ech))

    def contains(self, x: int) -> bool:
        return gf2.in_span(x ^ self.offset, gf2.echelon(self.basis))

    def contains_subspace(self, other: "AffineSubspace") -> bool:
        if other.n != self.n:
            return False
        ech = gf2.echelon(self.basis)
        return gf2.in_span(other.offset ^ self.offset, ech) and all(
            gf2.in_span(b, ech) for b in other.basis
        )

    def same_set(self, other: "AffineSubspace") -> bool:
        return self.canonical() == other.canonical()

    def points(self) -> Iterator[int]:
        return iter(gf2.span_points(self.offset, self.basis))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "basis": [gf2.to_hex(b, self.n) for b in self.basis],
            "offset": gf2.to_hex(self.offset, self.n),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "AffineSubspace":
        v = cls(int(obj["n"]), tuple(gf2.from_hex(h) for h in obj["basis"]), gf2.from_hex(obj["offset"]))
        if "d" in obj and int(obj["d"]) != v.d:
            raise InvalidSubspace("declared d does not match basis length")
        return v


@dataclass(frozen=True)
class Constraint:
    """Parity constraint: XOR of the listed variables equals ``target``."""

    vars: Tuple[int, ...]
    target: int

    def to_json(self) -> dict:
        return {"vars": list(self.vars), "target": self.target}


@dataclass(frozen=True)
class InstanceSpec:
    """Width-3 parity system on ``n`` class variables plus ``aux_count`` chain variables."""

    n: int
    constraints: Tuple[Constraint, ...]
    aux_count: int = 0
    seed: int = field(default=0, compare=False)

    @property
    def num_vars(self) -> int:
        return self.n + self.aux_count

    def key(self) -> Tuple:
        """Presentation identity used by lookup tables (seed excluded)."""
        return (self.n, self.aux_count, tuple((c.vars, c.target) for c in self.constraints))

    def satisfied_by(self, full: int) -> bool:
        return all(
            sum((full >> v) & 1 for v in c.vars) & 1 == c.target for c in self.constraints
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "constraints": [c.to_json() for c in self.constraints],
            "aux_count": self.aux_count,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "InstanceSpec":
        cons = tuple(Constraint(tuple(int(v) for v in c["vars"]), int(c["target"])) for c in obj["constraints"])
        return cls(int(obj["n"]), cons, int(obj.get("aux_count", 0)), int(obj.get("seed", 0)))


@dataclass(frozen=True)
class SampleSet:
    n: int
    points: Tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.points)

    def prefix(self, m: int) -> "SampleSet":
        return SampleSet(self.n, self.points[:m])

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "points": [gf2.to_hex(p, self.n) for p in self.points]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "SampleSet":
        return cls(int(obj["n"]), tuple(gf2.from_hex(h) for h in obj["points"]))


@dataclass(frozen=True)
class CacheTable:
    """Finite instance -> answer-set lookup table (the pseudo-catalyst)."""

    n: int
    entries: Tuple[Tuple[InstanceSpec, FrozenSet[int]], ...] = ()
    _index: Dict[Tuple, FrozenSet[int]] = field(default=None, compare=False, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {inst.key(): ans for inst, ans in self.entries})

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, instance: InstanceSpec) -> FrozenSet[int] | None:
        return self._index.get(instance.key())

    def stored_points(self) -> Tuple[int, ...]:
        seen: Dict[int, None] = {}
        for _, ans in self.entries:
            for p in sorted(ans):
                seen.setdefault(p)
        return tuple(seen)
