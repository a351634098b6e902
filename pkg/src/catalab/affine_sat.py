"""The affine class C_{n,d}: generation, metered solvers, the cache
pseudo-catalyst and adaptation from sampled assignments."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import encoding, gf2
from .meter import ADAPT, EXEC, CostMeter, merge
from .structures import AffineSubspace, CacheTable, Constraint, InstanceSpec, SampleSet

BASELINE_MAX_N = 28
SOUNDNESS_MAX_VARS = 24
_CHUNK = 1 << 20


class GuardExceeded(ValueError):
    pass


class ClassViolation(ValueError):
    """An enumerated point of the supplied subspace violates the instance."""


class InvalidSample(ValueError):
    pass


# ---------------------------------------------------------------------------
# generation


def random_subspace(n: int, d: int, seed: int) -> AffineSubspace:
    if not 0 <= d <= n:
        raise ValueError("need 0 <= d <= n")
    rng = random.Random(seed)
    rows: List[int] = []
    ech: List[int] = []
    while len(rows) < d:
        v = rng.getrandbits(n)
        if v and not gf2.in_span(v, ech):
            rows.append(v)
            ech = gf2.echelon(rows)
    return AffineSubspace(n, tuple(rows), rng.getrandbits(n) if n else 0).canonical()


def random_superspace(v: AffineSubspace, extra: int, seed: int) -> AffineSubspace:
    """A subspace W containing ``v`` with ``extra`` more dimensions."""
    if v.d + extra > v.n:
        raise ValueError("superspace dimension exceeds n")
    rng = random.Random(seed)
    rows = list(v.basis)
    ech = gf2.echelon(rows)
    while len(rows) < v.d + extra:
        x = rng.getrandbits(v.n)
        if not gf2.in_span(x, ech):
            rows.append(x)
            ech = gf2.echelon(rows)
    return AffineSubspace(v.n, tuple(rows), v.offset).canonical()


def parity_checks(v: AffineSubspace) -> List[Tuple[int, int]]:
    """(row, target) pairs whose common solutions are exactly ``v``."""
    ech = gf2.echelon(v.basis)
    return [(h, gf2.dot(h, v.offset)) for h in gf2.nullspace(ech, v.n)]


def _mix(checks: List[Tuple[int, int]], rng: random.Random) -> List[Tuple[int, int]]:
    rows = list(checks)
    k = len(rows)
    if k > 1:
        for _ in range(k):
            i, j = rng.sample(range(k), 2)
            rows[i] = (rows[i][0] ^ rows[j][0], rows[i][1] ^ rows[j][1])
    rng.shuffle(rows)
    return rows


def _support(row: int) -> List[int]:
    out = []
    i = 0
    while row:
        if row & 1:
            out.append(i)
        row >>= 1
        i += 1
    return out


def make_instance(v: AffineSubspace, seed: int) -> InstanceSpec:
    """Randomised width-3 parity presentation of ``v``.

    Parity checks are mixed by random invertible row operations; each check of
    width w > 3 becomes a chain of w-2 width-3 checks over w-3 fresh auxiliary
    variables (y1 = a XOR b, y2 = y1 XOR c, ..., y_last XOR p XOR q = target).
    """
    rng = random.Random(seed)
    rows = _mix(parity_checks(v), rng)
    cons: List[Constraint] = []
    nxt = v.n
    for row, target in rows:
        sup = _support(row)
        rng.shuffle(sup)
        if len(sup) <= 3:
            cons.append(Constraint(tuple(sup), target))
            continue
        prev = nxt
        cons.append(Constraint((sup[0], sup[1], prev), 0))
        nxt += 1
        for var in sup[2:-2]:
            cons.append(Constraint((prev, var, nxt), 0))
            prev = nxt
            nxt += 1
        cons.append(Constraint((prev, sup[-2], sup[-1]), target))
    return InstanceSpec(v.n, tuple(cons), nxt - v.n, seed)


def sample_points(v: AffineSubspace, m: int, seed: int) -> SampleSet:
    """``m`` points drawn uniformly (with replacement) from ``v``."""
    rng = random.Random(seed)
    pts = []
    for _ in range(m):
        coeff = rng.getrandbits(v.d) if v.d else 0
        x = v.offset
        for i, b in enumerate(v.basis):
            if (coeff >> i) & 1:
                x ^= b
        pts.append(x)
    return SampleSet(v.n, tuple(pts))


# ---------------------------------------------------------------------------
# vectorised evaluation


def _plan(inst: InstanceSpec) -> List[Tuple[str, Optional[int], Tuple[int, ...], int]]:
    """Order constraints so each one has at most one not-yet-known variable."""
    known = set(range(inst.n))
    pending = list(inst.constraints)
    plan = []
    while pending:
        progress = False
        rest = []
        for c in pending:
            unknown = [x for x in c.vars if x not in known]
            if len(unknown) > 1:
                rest.append(c)
                continue
            progress = True
            if unknown:
                u = unknown[0]
                plan.append(("assign", u, tuple(x for x in c.vars if x != u), c.target))
                known.add(u)
            else:
                plan.append(("check", None, c.vars, c.target))
        if not progress:
            raise ValueError("instance is not chain-propagatable from the class variables")
        pending = rest
    return plan


def _evaluate(inst: InstanceSpec, xs: np.ndarray, plan=None) -> np.ndarray:
    """Boolean mask of which n-bit candidates extend to a full solution."""
    plan = plan if plan is not None else _plan(inst)
    xs = xs.astype(np.int64, copy=False)
    vals: Dict[int, np.ndarray] = {}

    def bit(var: int) -> np.ndarray:
        if var not in vals:
            vals[var] = ((xs >> var) & 1).astype(np.uint8)
        return vals[var]

    ok = np.ones(xs.shape, dtype=bool)
    for kind, u, others, target in plan:
        acc = np.full(xs.shape, target, dtype=np.uint8)
        for o in others:
            acc ^= bit(o)
        if kind == "assign":
            vals[u] = acc
        else:
            ok &= acc == 0
    return ok


def _full_assignment(inst: InstanceSpec, x: int) -> int:
    """Unique extension of ``x`` to the auxiliaries (propagated, unchecked)."""
    full = x
    for kind, u, others, target in _plan(inst):
        if kind == "assign":
            b = target
            for o in others:
                b ^= (full >> o) & 1
            full |= b << u
    return full


# ---------------------------------------------------------------------------
# solvers


def solve_baseline(
    inst: InstanceSpec, meter: CostMeter, shard: int = 0, shards: int = 1
) -> FrozenSet[int]:
    """Exhaustive search over {0,1}^n (or one contiguous shard of it)."""
    if inst.n > BASELINE_MAX_N:
        raise GuardExceeded(f"baseline enumeration guard: n={inst.n} > {BASELINE_MAX_N}")
    total = 1 << inst.n
    lo = total * shard // shards
    hi = total * (shard + 1) // shards
    plan = _plan(inst)
    found: List[int] = []
    for start in range(lo, hi, _CHUNK):
        xs = np.arange(start, min(hi, start + _CHUNK), dtype=np.int64)
        found.extend(int(x) for x in xs[_evaluate(inst, xs, plan)])
    if hi > lo:
        meter.record(EXEC, (hi - lo) * inst.n)
    meter.tick()
    return frozenset(found)


def solve_baseline_sharded(inst: InstanceSpec, shards: int) -> Tuple[FrozenSet[int], CostMeter]:
    """Run every shard on its own meter and combine by union / merge."""
    out: FrozenSet[int] = frozenset()
    total = CostMeter()
    for k in range(shards):
        m = CostMeter()
        out |= solve_baseline(inst, m, k, shards)
        total = merge(total, m)
    total.cycles = 1
    return out, total


def solve_subspace(
    inst: InstanceSpec, w: AffineSubspace, meter: CostMeter, strict: bool = False
) -> FrozenSet[int]:
    """Search only the 2^dim points of a substrate subspace ``w``.

    With ``strict`` every point must satisfy the instance (``w`` is claimed to
    be the class subspace itself); otherwise the satisfying ones are kept,
    which is correct whenever the class subspace lies inside ``w``.
    """
    if w.n != inst.n:
        raise ClassViolation("subspace dimension does not match instance")
    if w.n > 62:
        raise GuardExceeded("subspace enumeration needs n <= 62")
    pts = np.array(gf2.span_points(w.offset, w.basis), dtype=np.int64)
    good = _evaluate(inst, pts)
    if inst.n:
        meter.record(EXEC, len(pts) * inst.n)
    meter.tick()
    if strict and not good.all():
        bad = int(pts[~good][0])
        raise ClassViolation(f"point {gf2.to_hex(bad, w.n)} of the substrate violates the instance")
    return frozenset(int(p) for p in pts[good])


def solve_catalytic(inst: InstanceSpec, v: AffineSubspace, meter: CostMeter) -> FrozenSet[int]:
    """Enumerate only the 2^d points of ``v``; any violating point is a class violation."""
    return solve_subspace(inst, v, meter, strict=True)


def solve_cached(inst: InstanceSpec, cache: CacheTable, meter: CostMeter) -> FrozenSet[int]:
    """Hit: write the stored answer (n bits). Miss: fall back to exhaustive search."""
    ans = cache.lookup(inst)
    if ans is None:
        return solve_baseline(inst, meter)
    if inst.n:
        meter.record(EXEC, inst.n)
    meter.tick()
    return ans


def build_cache(instances: Iterable[InstanceSpec], meter: CostMeter | None = None) -> CacheTable:
    """Precompute answers for ``instances`` (work charged to the adaptation side)."""
    meter = meter if meter is not None else CostMeter()
    entries = []
    n = None
    for inst in instances:
        n = inst.n
        scratch = CostMeter()
        ans = solve_baseline(inst, scratch)
        if scratch.exec_irrev_bits:
            meter.record(ADAPT, scratch.exec_irrev_bits)
        entries.append((inst, ans))
    return CacheTable(n or 0, tuple(entries))


def cached_gamma(h: Fraction | float, n: int) -> Fraction:
    """Closed-form speed-up of a cache with hit fraction ``h`` under the cost model."""
    h = Fraction(h)
    return 1 / (1 - h + h / Fraction(2**n))


# ---------------------------------------------------------------------------
# oracles


def enumerate_solutions(inst: InstanceSpec) -> np.ndarray:
    """All full assignments over n + aux variables (brute force, numpy)."""
    nv = inst.num_vars
    if nv > SOUNDNESS_MAX_VARS:
        raise GuardExceeded(f"soundness enumeration guard: {nv} > {SOUNDNESS_MAX_VARS} variables")
    sols = []
    for start in range(0, 1 << nv, _CHUNK):
        xs = np.arange(start, min(1 << nv, start + _CHUNK), dtype=np.int64)
        ok = np.ones(xs.shape, dtype=bool)
        for c in inst.constraints:
            acc = np.full(xs.shape, c.target, dtype=np.int64)
            for v in c.vars:
                acc ^= (xs >> v) & 1
            ok &= acc == 0
        sols.append(xs[ok])
    return np.concatenate(sols) if sols else np.zeros(0, dtype=np.int64)


def instance_sound(inst: InstanceSpec, v: AffineSubspace) -> bool:
    """Brute-force: the projection onto the class variables is a bijection onto ``v``."""
    full = enumerate_solutions(inst)
    proj = full & ((1 << inst.n) - 1)
    return len(full) == v.size and len(set(proj.tolist())) == len(full) and set(proj.tolist()) == set(v.points())


def matched_intelligence_check(inst: InstanceSpec, v: AffineSubspace) -> bool:
    try:
        return solve_baseline(inst, CostMeter()) == solve_catalytic(inst, v, CostMeter())
    except ClassViolation:
        return False


# ---------------------------------------------------------------------------
# adaptation


@dataclass(frozen=True)
class AdaptationResult:
    hull_dim: Optional[int]  # None when there are no samples
    recovered: Optional[AffineSubspace]  # None stands for INCOMPLETE
    residual_bits: int
    info_data_bits: int
    khat_sigma: int
    closed_form_residual_bits: int

    def to_json(self) -> dict:
        return {
            "hull_dim": self.hull_dim,
            "recovered": self.recovered.to_json() if self.recovered else "INCOMPLETE",
            "residual_bits": self.residual_bits,
            "info_data_bits": self.info_data_bits,
            "khat_sigma_bits": self.khat_sigma,
            "closed_form_residual_bits": self.closed_form_residual_bits,
        }


def closed_form_residual(n: int, d: int, m: int) -> int:
    """Closed-form residual n(d - m + 1) + n, reported beside the constructive one."""
    return n * (d - m + 1) + n


def adapt_from_samples(samples: SampleSet, v_truth: AffineSubspace, meter: CostMeter) -> AdaptationResult:
    """Install the structure the samples do not already supply.

    The residual is the conditional codeword of the class descriptor given the
    samples; the same number of bits is charged as erasures on the adaptation
    meter.
    """
    sigma = v_truth.canonical()
    for p in samples.points:
        if not sigma.contains(p):
            raise InvalidSample(f"sample {gf2.to_hex(p, samples.n)} is not in the class subspace")
    _, est = encoding.encode_cond(sigma, samples)
    k_sigma = encoding.khat(sigma).bits
    if samples.m:
        base, span = gf2.affine_hull(list(samples.points))
        r = len(span)
        recovered = AffineSubspace(sigma.n, tuple(span), gf2.reduce(base, span)) if r == sigma.d else None
    else:
        r = None
        recovered = None
    if est.bits:
        meter.record(ADAPT, est.bits)
    return AdaptationResult(
        r,
        recovered,
        est.bits,
        k_sigma - est.bits,
        k_sigma,
        closed_form_residual(sigma.n, sigma.d, samples.m),
    )


# ---------------------------------------------------------------------------
# transfer across growing task sets


@dataclass(frozen=True)
class LadderRung:
    size: int
    gamma_catalytic: Fraction
    gamma_cache: Fraction
    n_baseline: int
    n_catalytic: int
    n_cache: int

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "gamma": float(self.gamma_catalytic),
            "gamma_cache": float(self.gamma_cache),
        }


def fresh_instances(v: AffineSubspace, count: int, seed: int) -> List[InstanceSpec]:
    rng = random.Random(seed)
    return [make_instance(v, rng.getrandbits(32)) for _ in range(count)]


@dataclass(frozen=True)
class TaskRun:
    """One benchmark task metered under all three solvers."""

    instance: InstanceSpec
    solutions: FrozenSet[int]
    n_baseline: int
    n_catalytic: int
    n_cache: int


def ladder_runs(
    v: AffineSubspace, count: int, seed: int, cache_size: int = 8
) -> Tuple[CacheTable, List[TaskRun]]:
    """Meter ``count`` fresh tasks; the cache stores the first ``cache_size`` of them."""
    pool = fresh_instances(v, max(count, cache_size), seed)
    cache = build_cache(pool[:cache_size])
    runs = []
    for inst in pool[:count]:
        mb, mc, mk = CostMeter(), CostMeter(), CostMeter()
        base = solve_baseline(inst, mb)
        if solve_catalytic(inst, v, mc) != base or solve_cached(inst, cache, mk) != base:
            raise ClassViolation("matched intelligence failed on the ladder")
        runs.append(TaskRun(inst, base, mb.exec_irrev_bits, mc.exec_irrev_bits, mk.exec_irrev_bits))
    return cache, runs


def ladder_rungs(runs: Sequence[TaskRun], sizes: Sequence[int]) -> List[LadderRung]:
    rungs = []
    for size in sizes:
        head = runs[:size]
        nb = sum(r.n_baseline for r in head)
        nc = sum(r.n_catalytic for r in head)
        nk = sum(r.n_cache for r in head)
        rungs.append(LadderRung(size, Fraction(nb, nc), Fraction(nb, nk), nb, nc, nk))
    return rungs


def transfer_check(
    v: AffineSubspace, sizes: Sequence[int], seed: int, cache_size: int = 8
) -> List[LadderRung]:
    """Meter baseline, catalytic and cached solvers on task sets of growing size.

    Every rung's task set starts with the ``cache_size`` stored instances and
    is padded with fresh presentations of the class.
    """
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("ladder sizes must be increasing")
    if not sizes:
        return []
    _, runs = ladder_runs(v, max(sizes), seed, cache_size)
    return ladder_rungs(runs, sizes)


def solutions_csv(sols: Iterable[int], n: int) -> str:
    return "solution\n" + "".join(gf2.to_hex(s, n) + "\n" for s in sorted(sols))
