"""Command-line harness: ``catalab {run,energy,vm,report,gen}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import random
import re
import shutil
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

from . import affine_sat, catalytic_vm, laws, thermo
from .scenario import SEED_ENV, ScenarioError, load
from .structures import AffineSubspace

log = logging.getLogger("catalab")

EXIT_OK, EXIT_ERROR, EXIT_LAW = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _default_seed(explicit: Optional[int]) -> int:
    if explicit is not None:
        return explicit
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw else 0


def parse_count(text: str) -> int:
    """Bit counts: plain integers, ``2^k`` / ``2**k`` powers, or integral floats like ``1e6``."""
    t = text.strip().replace("**", "^")
    m = re.fullmatch(r"(\d+)\^(\d+)", t)
    if m:
        return int(m.group(1)) ** int(m.group(2))
    try:
        v = int(t)
    except ValueError:
        try:
            f = float(t)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a bit count: {text!r}") from None
        if f != int(f):
            raise argparse.ArgumentTypeError(f"bit count must be an integer: {text!r}") from None
        v = int(f)
    if v < 0:
        raise argparse.ArgumentTypeError(f"bit count must be non-negative: {text!r}")
    return v


# ---------------------------------------------------------------------------
# run


def _csv(rows: Sequence[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _ladder_csv(res: laws.ScenarioResult) -> str:
    if res.ladder:
        rows = [(r.size, float(r.gamma_catalytic), float(r.gamma_cache)) for r in res.ladder]
    else:
        rows = [(s, float(g), "") for s, g in res.catalyst.ladder]
    return _csv(rows, ["size", "gamma_catalytic", "gamma_cache"])


def _energy_csv(res: laws.ScenarioResult) -> str:
    rows = list(res.energy.to_json().items()) + sorted(res.reference_figures.items())
    return _csv(rows, ["quantity", "value"])


def run_scenario(path: str, outdir: str) -> int:
    """Run one scenario file into ``outdir/<name>``; nothing is left behind on error."""
    tmp = None
    try:
        sc = load(path).with_env_seed()
        res = laws.coupling_scenario(sc)
        root = Path(outdir)
        root.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=f".{sc.name}.", dir=root))
        (tmp / "report.json").write_text(_dump(res.to_report()), encoding="utf-8")
        (tmp / "gamma_ladder.csv").write_text(_ladder_csv(res), encoding="utf-8")
        (tmp / "energy.csv").write_text(_energy_csv(res), encoding="utf-8")
        final = root / sc.name
        if final.exists():
            shutil.rmtree(final)
        os.replace(tmp, final)
        tmp = None
    except (ScenarioError, ValueError, OSError) as e:
        print(f"error: {path}: {e}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        if tmp is not None:
            shutil.rmtree(tmp, ignore_errors=True)
    if res.law_violations:
        print(f"{sc.name}: law violation: {', '.join(res.law_violations)}", file=sys.stderr)
        return EXIT_LAW
    print(f"{sc.name}: gamma={float(res.speedup.gamma):.6g} verdict={res.catalyst.verdict} -> {final}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    if args.jobs > 1 and len(args.files) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(run_scenario, args.files, [args.output] * len(args.files)))
    else:
        codes = [run_scenario(f, args.output) for f in args.files]
    if EXIT_ERROR in codes:
        return EXIT_ERROR
    return EXIT_LAW if EXIT_LAW in codes else EXIT_OK


# ---------------------------------------------------------------------------
# energy


def cmd_energy(args: argparse.Namespace) -> int:
    cfg = thermo.PhysicalConfig(args.temp, args.overhead, args.overhead_adapt or args.overhead)
    floor = thermo.energy_floor(cfg, args.n_bits, "exec")
    score = thermo.IntelligenceScore(((args.intelligence, 1.0),))
    phi, phi_floor = thermo.wpi(floor, args.tau, score, cfg, args.n_bits)
    restore = thermo.restoration_floor(cfg, args.restore_bits)
    be = None
    if args.gamma is not None:
        be = thermo.breakeven(cfg, args.gamma, args.info_bits, args.c_u, floor, restore)
    adapt = thermo.adaptation_floor(cfg, args.mu_bits, args.info_bits, args.c_u)
    rep = thermo.EnergyReport(thermo.landauer_cost(cfg), floor, phi, phi_floor, restore, adapt, be, args.tau)
    sys.stdout.write(_dump(rep.to_json()))
    return EXIT_OK


# ---------------------------------------------------------------------------
# vm


def _read_arg(text: str) -> str:
    p = Path(text)
    return p.read_text(encoding="utf-8") if p.is_file() else text


def cmd_vm_compile(args: argparse.Namespace) -> int:
    f = catalytic_vm.parse_formula(_read_arg(args.formula))
    prog = catalytic_vm.compile_formula(f, args.inputs)
    _emit(prog.to_text(), args.output)
    return EXIT_OK


def _ints(text: Optional[str], width: int) -> List[int]:
    if not text:
        return []
    return [int(t, 16) & ((1 << width) - 1) for t in text.split(",") if t.strip()]


def cmd_vm_run(args: argparse.Namespace) -> int:
    prog = catalytic_vm.RegisterProgram.from_text(Path(args.program).read_text(encoding="utf-8"))
    if args.inverse:
        prog = prog.inverse()
    aux = _ints(args.aux, args.width) if args.aux else [0] * prog.num_registers
    res = catalytic_vm.run(prog, _ints(args.inputs, args.width), aux, width=args.width)
    final = catalytic_vm.MachineState(res.aux_final, args.width, prog.output)
    cfg = thermo.PhysicalConfig(args.temp)
    sys.stdout.write(
        _dump(
            {
                "aux_final": final.to_hex(),
                "output_register": prog.output,
                "output_delta": res.output_delta,
                "restoration_delta_bits": res.delta_k_cycle,
                "restore_floor_j": thermo.restoration_floor(cfg, res.delta_k_cycle),
                "clean_bits": res.clean_bits,
            }
        )
    )
    return EXIT_OK


def cmd_vm_fuzz(args: argparse.Namespace) -> int:
    seed = _default_seed(args.seed)
    if args.formula:
        f = catalytic_vm.parse_formula(_read_arg(args.formula))
        n_in = None
    else:
        f = catalytic_vm.random_formula(args.depth, args.vars, random.Random(seed))
        n_in = args.vars
    summary = catalytic_vm.fuzz(f, args.cases, seed, args.width, n_in)
    out = summary.to_json()
    out.update(formula=catalytic_vm.format_formula(f), width=args.width, seed=seed)
    sys.stdout.write(_dump(out))
    failed = summary.restoration_failures or summary.transparency_failures or summary.nonzero_delta_k
    return EXIT_LAW if failed else EXIT_OK


# ---------------------------------------------------------------------------
# report


SUMMARY_FIELDS = [
    "scenario",
    "n",
    "d",
    "m",
    "gamma",
    "log2_gamma",
    "mu_bits",
    "slack_bits",
    "verdict",
    "cache_verdict",
    "floor_exec_j",
    "restore_floor_j",
    "adapt_floor_j",
    "breakeven_count",
    "law_violations",
]


def _summary_row(rep: dict) -> dict:
    sc, cat, en = rep["scenario"], rep["catalyst"], rep["energy"]
    cache = rep.get("cache_catalyst") or {}
    return {
        "scenario": sc["name"],
        "n": sc["class"]["n"],
        "d": sc["class"]["d"],
        "m": sc["adaptation"]["m"],
        "gamma": cat["gamma"],
        "log2_gamma": rep["speedup"]["barrier_reduction"],
        "mu_bits": cat["mu_bits"],
        "slack_bits": cat["slack_bits"],
        "verdict": cat["verdict"],
        "cache_verdict": cache.get("verdict", ""),
        "floor_exec_j": en["floor_exec_j"],
        "restore_floor_j": en["restore_floor_j"],
        "adapt_floor_j": en["adapt_floor_j"],
        "breakeven_count": en["breakeven_count"],
        "law_violations": ";".join(rep.get("law_violations", [])),
    }


def cmd_report(args: argparse.Namespace) -> int:
    root = Path(args.directory)
    if not root.is_dir():
        print(f"error: {root} is not a directory", file=sys.stderr)
        return EXIT_ERROR
    summary, long_rows = [], []
    for path in sorted(root.rglob("report.json")):
        try:
            rep = json.loads(path.read_text(encoding="utf-8"))
            row = _summary_row(rep)
        except (OSError, ValueError, KeyError, TypeError) as e:
            log.warning("skipping %s: %s", path, e)
            continue
        summary.append(row)
        name = row["scenario"]
        for rung in rep["catalyst"]["ladder"]:
            long_rows.append((name, "catalytic", rung["size"], rung["gamma"]))
        for rung in (rep.get("cache_catalyst") or {}).get("ladder", []):
            long_rows.append((name, "cache", rung["size"], rung["gamma"]))
    if not summary:
        print(f"error: no readable reports under {root}", file=sys.stderr)
        return EXIT_ERROR
    out = Path(args.output) if args.output else root
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.DictWriter(buf, SUMMARY_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(summary)
    (out / "summary.csv").write_text(buf.getvalue(), encoding="utf-8")
    (out / "ladder_long.csv").write_text(_csv(long_rows, ["scenario", "solver", "size", "gamma"]), encoding="utf-8")
    print(f"{len(summary)} scenario(s) -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen


def _load_class(path: str) -> AffineSubspace:
    return AffineSubspace.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def cmd_gen_class(args: argparse.Namespace) -> int:
    v = affine_sat.random_subspace(args.n, args.d, _default_seed(args.seed))
    _emit(_dump(v.to_json()), args.output)
    return EXIT_OK


def cmd_gen_instance(args: argparse.Namespace) -> int:
    inst = affine_sat.make_instance(_load_class(args.class_file), _default_seed(args.seed))
    _emit(_dump(inst.to_json()), args.output)
    return EXIT_OK


def cmd_gen_samples(args: argparse.Namespace) -> int:
    s = affine_sat.sample_points(_load_class(args.class_file), args.m, _default_seed(args.seed))
    _emit(_dump(s.to_json()), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="catalab", description="Catalysis workbench: metered solvers, codecs, energy floors.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run scenario files and write reports")
    r.add_argument("files", nargs="+")
    r.add_argument("-o", "--output", default="out")
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("energy", help="Landauer floors and WPI for a bit count")
    e.add_argument("--n-bits", type=parse_count, required=True)
    e.add_argument("--temp", type=float, default=300.0)
    e.add_argument("--overhead", type=float, default=1.0)
    e.add_argument("--overhead-adapt", type=float, default=None)
    e.add_argument("--tau", type=float, default=1.0)
    e.add_argument("--intelligence", type=float, default=1.0)
    e.add_argument("--gamma", type=parse_count, default=None, help="speed-up, enables the break-even count")
    e.add_argument("--mu-bits", type=float, default=0.0)
    e.add_argument("--info-bits", type=float, default=0.0)
    e.add_argument("--restore-bits", type=parse_count, default=0)
    e.add_argument("--c-u", type=float, default=0.0)
    e.set_defaults(func=cmd_energy)

    vm = sub.add_parser("vm", help="catalytic register machine").add_subparsers(dest="vm_command", required=True)
    c = vm.add_parser("compile", help="compile an s-expression formula")
    c.add_argument("formula", help="formula text or a file containing it")
    c.add_argument("-n", "--inputs", type=int, default=None)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_vm_compile)
    rr = vm.add_parser("run", help="run a program on one input/aux state")
    rr.add_argument("program")
    rr.add_argument("--inputs", default="", help="comma-separated hex ring elements")
    rr.add_argument("--aux", default=None, help="comma-separated hex ring elements (default zeros)")
    rr.add_argument("--width", type=int, default=1)
    rr.add_argument("--inverse", action="store_true")
    rr.add_argument("--temp", type=float, default=300.0)
    rr.set_defaults(func=cmd_vm_run)
    fz = vm.add_parser("fuzz", help="random restoration and transparency checks")
    fz.add_argument("--formula", default=None)
    fz.add_argument("--depth", type=int, default=3)
    fz.add_argument("--vars", type=int, default=8)
    fz.add_argument("--cases", type=int, default=10_000)
    fz.add_argument("--width", type=int, default=1)
    fz.add_argument("--seed", type=int, default=None)
    fz.set_defaults(func=cmd_vm_fuzz)

    rp = sub.add_parser("report", help="merge report directories into CSV tables")
    rp.add_argument("directory")
    rp.add_argument("-o", "--output", default=None)
    rp.set_defaults(func=cmd_report)

    g = sub.add_parser("gen", help="generate classes, instances and samples").add_subparsers(dest="gen_command", required=True)
    gc = g.add_parser("class")
    gc.add_argument("--n", type=int, required=True)
    gc.add_argument("--d", type=int, required=True)
    gc.add_argument("--seed", type=int, default=None)
    gc.add_argument("-o", "--output")
    gc.set_defaults(func=cmd_gen_class)
    gi = g.add_parser("instance")
    gi.add_argument("class_file")
    gi.add_argument("--seed", type=int, default=None)
    gi.add_argument("-o", "--output")
    gi.set_defaults(func=cmd_gen_instance)
    gs = g.add_parser("samples")
    gs.add_argument("class_file")
    gs.add_argument("--m", type=int, required=True)
    gs.add_argument("--seed", type=int, default=None)
    gs.add_argument("-o", "--output")
    gs.set_defaults(func=cmd_gen_samples)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
