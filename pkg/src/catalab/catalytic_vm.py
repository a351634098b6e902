"""Catalytic register machine: transparent straight-line programs over a ring
whose auxiliary registers start with arbitrary contents and are handed back
unchanged except for the designated output register.

Register 0 is a read-only constant-one cell living in clean space; registers
1..k are the catalytic auxiliary registers. Every instruction has the form
``r_i <- r_i (+|-) term`` with ``i`` not appearing in ``term``, so each one is
invertible and nothing is erased.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from . import encoding
from .meter import CostMeter

ONE = 0


class UnsupportedGate(ValueError):
    pass


class ArityError(ValueError):
    pass


class ProgramParseError(ValueError):
    pass


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    value: int = 0


@dataclass(frozen=True)
class Gate:
    op: str  # "add" | "mul"
    left: "Formula"
    right: "Formula"


Formula = Union[Var, Const, Gate]


def depth(f: Formula) -> int:
    if isinstance(f, Gate):
        return 1 + max(depth(f.left), depth(f.right))
    return 0


def leaves(f: Formula) -> int:
    if isinstance(f, Gate):
        return leaves(f.left) + leaves(f.right)
    return 1


def variables(f: Formula) -> set:
    if isinstance(f, Var):
        return {f.index}
    if isinstance(f, Gate):
        return variables(f.left) | variables(f.right)
    return set()


def evaluate(f: Formula, inputs: Sequence[int], width: int = 1) -> int:
    """Direct tree-walk evaluation mod 2^width."""
    mask = (1 << width) - 1
    if isinstance(f, Var):
        return inputs[f.index] & mask
    if isinstance(f, Const):
        return f.value & mask
    a = evaluate(f.left, inputs, width)
    b = evaluate(f.right, inputs, width)
    if f.op == "add":
        return (a + b) & mask
    if f.op == "mul":
        return (a * b) & mask
    raise UnsupportedGate(f.op)


def random_formula(depth_: int, num_vars: int, rng: random.Random) -> Formula:
    """Full binary tree of the given depth with random gates and leaves."""
    if depth_ == 0:
        return Var(rng.randrange(num_vars))
    return Gate(
        rng.choice(("add", "mul")),
        random_formula(depth_ - 1, num_vars, rng),
        random_formula(depth_ - 1, num_vars, rng),
    )


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_formula(text: str) -> Formula:
    """Prefix s-expressions: ``(mul x0 (add x1 x2))``, ``x3``, ``0``."""
    toks = _TOKEN.findall(text)
    pos = 0

    def walk() -> Formula:
        nonlocal pos
        if pos >= len(toks):
            raise ProgramParseError("unexpected end of formula")
        t = toks[pos]
        pos += 1
        if t == "(":
            op = toks[pos]
            pos += 1
            if op not in ("add", "mul", "+", "*"):
                raise UnsupportedGate(op)
            left, right = walk(), walk()
            if pos >= len(toks) or toks[pos] != ")":
                raise ProgramParseError("gates take exactly two operands")
            pos += 1
            return Gate("add" if op in ("add", "+") else "mul", left, right)
        if t.startswith("x") and t[1:].isdigit():
            return Var(int(t[1:]))
        if t.isdigit():
            return Const(int(t))
        raise ProgramParseError(f"bad token {t!r}")

    f = walk()
    if pos != len(toks):
        raise ProgramParseError("trailing tokens after formula")
    return f


def format_formula(f: Formula) -> str:
    if isinstance(f, Var):
        return f"x{f.index}"
    if isinstance(f, Const):
        return str(f.value)
    return f"({f.op} {format_formula(f.left)} {format_formula(f.right)})"


# ---------------------------------------------------------------------------
# programs


@dataclass(frozen=True)
class Instr:
    """``op`` in ADD SUB MADD MSUB XADD XSUB; ``args`` as in the text format."""

    op: str
    args: Tuple[int, ...]

    @property
    def target(self) -> int:
        return self.args[0]

    def sources(self) -> Tuple[int, ...]:
        if self.op in ("XADD", "XSUB"):
            return (self.args[2],)
        return self.args[1:]

    def inverse(self) -> "Instr":
        flip = {"ADD": "SUB", "SUB": "ADD", "MADD": "MSUB", "MSUB": "MADD", "XADD": "XSUB", "XSUB": "XADD"}
        return Instr(flip[self.op], self.args)

    def __str__(self) -> str:
        return " ".join([self.op, *map(str, self.args)])


_ARITY = {"ADD": 2, "SUB": 2, "MADD": 3, "MSUB": 3, "XADD": 3, "XSUB": 3}


@dataclass(frozen=True)
class RegisterProgram:
    instrs: Tuple[Instr, ...]
    num_registers: int  # auxiliary registers, indexed 1..num_registers
    output: int = 1
    num_inputs: int = 0

    def __post_init__(self) -> None:
        for ins in self.instrs:
            if len(ins.args) != _ARITY[ins.op]:
                raise ProgramParseError(f"{ins.op} takes {_ARITY[ins.op]} operands")
            if ins.target == ONE:
                raise ProgramParseError("register 0 is read-only")
            if ins.target in ins.sources():
                raise ProgramParseError(f"non-invertible instruction: {ins}")
            for r in (ins.target, *ins.sources()):
                if not 0 <= r <= self.num_registers:
                    raise ProgramParseError(f"register {r} out of range")
            if ins.op in ("XADD", "XSUB") and not 0 <= ins.args[1] < self.num_inputs:
                raise ProgramParseError("bad input index")

    def __len__(self) -> int:
        return len(self.instrs)

    def inverse(self) -> "RegisterProgram":
        return RegisterProgram(
            tuple(i.inverse() for i in reversed(self.instrs)), self.num_registers, self.output, self.num_inputs
        )

    def to_text(self) -> str:
        head = f"# registers={self.num_registers} output={self.output} inputs={self.num_inputs}\n"
        return head + "".join(str(i) + "\n" for i in self.instrs)

    @classmethod
    def from_text(cls, text: str) -> "RegisterProgram":
        regs = out = inputs = None
        instrs = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for k, v in re.findall(r"(\w+)=(\d+)", line):
                    if k == "registers":
                        regs = int(v)
                    elif k == "output":
                        out = int(v)
                    elif k == "inputs":
                        inputs = int(v)
                continue
            parts = line.split()
            if parts[0] not in _ARITY:
                raise ProgramParseError(f"unknown opcode {parts[0]!r}")
            try:
                instrs.append(Instr(parts[0], tuple(int(p) for p in parts[1:])))
            except ValueError:
                raise ProgramParseError(f"bad operand in {line!r}") from None
        if regs is None:
            regs = max([max((i.target, *i.sources())) for i in instrs] + [1])
        if inputs is None:
            inputs = max([i.args[1] + 1 for i in instrs if i.op in ("XADD", "XSUB")] + [0])
        return cls(tuple(instrs), regs, out if out is not None else 1, inputs)


def compile_formula(f: Formula, num_inputs: int | None = None) -> RegisterProgram:
    """Transparent three-register program adding f(x) into register 1.

    Leaves use ``r_t += x_v * r_0``; sums run both children into the target;
    products use the four-call identity
    gh = (A+g)(B+h) - A(B+h) - (A+g)B + AB
    with the two other registers as scratch holding arbitrary A, B.
    """
    out: List[Instr] = []

    def emit(g: Formula, t: int, sign: int) -> None:
        if isinstance(g, Const):
            if g.value != 0:
                raise UnsupportedGate("non-zero constants have no transparent encoding")
            return
        if isinstance(g, Var):
            out.append(Instr("XADD" if sign > 0 else "XSUB", (t, g.index, ONE)))
            return
        if not isinstance(g, Gate) or g.op not in ("add", "mul"):
            raise UnsupportedGate(getattr(g, "op", type(g).__name__))
        if g.op == "add":
            emit(g.left, t, sign)
            emit(g.right, t, sign)
            return
        a, b = [r for r in (1, 2, 3) if r != t]
        plus, minus = ("MADD", "MSUB") if sign > 0 else ("MSUB", "MADD")
        out.append(Instr(plus, (t, a, b)))
        emit(g.left, a, +1)
        out.append(Instr(minus, (t, a, b)))
        emit(g.right, b, +1)
        out.append(Instr(plus, (t, a, b)))
        emit(g.left, a, -1)
        out.append(Instr(minus, (t, a, b)))
        emit(g.right, b, -1)

    emit(f, 1, +1)
    n_in = num_inputs if num_inputs is not None else (max(variables(f)) + 1 if variables(f) else 0)
    return RegisterProgram(tuple(out), 3, 1, n_in)


# ---------------------------------------------------------------------------
# machine


@dataclass(frozen=True)
class MachineState:
    aux: Tuple[int, ...]  # registers 1..k
    width: int = 1
    output: Optional[int] = None  # register excluded from restoration checks

    def to_bits(self, skip_output: bool = True) -> encoding.Bits:
        regs = [
            v for i, v in enumerate(self.aux, start=1) if not (skip_output and i == self.output)
        ]
        return encoding.Bits("".join(encoding.vec_to_bits(v, self.width) for v in regs))

    def to_hex(self) -> str:
        w = max(1, (self.width + 3) // 4)
        return ",".join(format(v, f"0{w}x") for v in self.aux)

    @classmethod
    def from_hex(cls, text: str, width: int = 1, output: Optional[int] = None) -> "MachineState":
        vals = tuple(int(t, 16) for t in text.split(",") if t.strip())
        mask = (1 << width) - 1
        if any(v & ~mask for v in vals):
            raise ArityError("register value wider than the ring")
        return cls(vals, width, output)


@dataclass(frozen=True)
class RunResult:
    aux_final: Tuple[int, ...]
    output_delta: int
    delta_k_cycle: int
    clean_bits: int


def _exec(p: RegisterProgram, regs: List[int], inputs: Sequence[int], mask: int) -> None:
    for ins in p.instrs:
        a = ins.args
        if ins.op in ("ADD", "SUB"):
            term = regs[a[1]]
        elif ins.op in ("MADD", "MSUB"):
            term = regs[a[1]] * regs[a[2]]
        else:
            term = (inputs[a[1]] & mask) * regs[a[2]]
        if ins.op in ("ADD", "MADD", "XADD"):
            regs[a[0]] = (regs[a[0]] + term) & mask
        else:
            regs[a[0]] = (regs[a[0]] - term) & mask


def clean_space_bits(p: RegisterProgram) -> int:
    """Program counter width; the only clean state besides the constant cell."""
    return max(1, len(p).bit_length())


def run(
    p: RegisterProgram,
    inputs: Sequence[int],
    aux_init: Sequence[int],
    meter: CostMeter | None = None,
    width: int = 1,
) -> RunResult:
    if len(aux_init) != p.num_registers:
        raise ArityError(f"program uses {p.num_registers} aux registers, got {len(aux_init)}")
    if len(inputs) < p.num_inputs:
        raise ArityError(f"program reads {p.num_inputs} inputs, got {len(inputs)}")
    if not 1 <= width <= 64:
        raise ValueError("ring width must be in 1..64")
    mask = (1 << width) - 1
    regs = [1] + [v & mask for v in aux_init]
    _exec(p, regs, inputs, mask)
    final = tuple(regs[1:])
    # every instruction is a bijection on register contents: no erasures to charge
    if meter is not None:
        meter.tick()
    before = MachineState(tuple(v & mask for v in aux_init), width, p.output)
    after = MachineState(final, width, p.output)
    return RunResult(
        final,
        (final[p.output - 1] - before.aux[p.output - 1]) & mask,
        restoration_delta(before, after),
        clean_space_bits(p),
    )


def restoration_delta(before: MachineState, after: MachineState) -> int:
    """Bits needed to rebuild the idle catalytic contents from the post-cycle ones.

    Positional-patch conditional codeword length; 0 when bit-identical. The
    designated output register is the answer channel and is not compared.
    """
    if len(before.aux) != len(after.aux) or before.width != after.width or before.output != after.output:
        raise ArityError("machine shape mismatch")
    b, a = before.to_bits(), after.to_bits()
    if b == a:
        return 0
    return encoding.khat_cond(b, a).bits


@dataclass(frozen=True)
class FuzzSummary:
    cases: int
    restoration_failures: int
    transparency_failures: int
    nonzero_delta_k: int
    program_length: int

    def to_json(self) -> dict:
        return self.__dict__.copy()


def fuzz(
    f: Formula,
    cases: int,
    seed: int,
    width: int = 1,
    num_inputs: int | None = None,
) -> FuzzSummary:
    """Random (input, aux) pairs checked against tree-walk evaluation."""
    n_in = num_inputs if num_inputs is not None else (max(variables(f)) + 1 if variables(f) else 0)
    p = compile_formula(f, n_in)
    rng = random.Random(seed)
    rest = trans = nz = 0
    for _ in range(cases):
        xs = [rng.getrandbits(width) for _ in range(n_in)]
        aux = [rng.getrandbits(width) for _ in range(p.num_registers)]
        res = run(p, xs, aux, width=width)
        if any(res.aux_final[i] != aux[i] for i in range(len(aux)) if i != p.output - 1):
            rest += 1
        if res.output_delta != evaluate(f, xs, width):
            trans += 1
        if res.delta_k_cycle:
            nz += 1
    return FuzzSummary(cases, rest, trans, nz, len(p))
