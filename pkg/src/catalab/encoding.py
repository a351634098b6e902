"""Self-delimiting codecs giving constructive upper bounds on description length.

Every estimate returned here is the exact length of a codeword that the codec
registry can emit and decode again, so each one upper-bounds prefix complexity
up to the (configurable) machine constant.

Unconditional codewords are ``payload`` only. Conditional codewords are
``selector || payload`` where the selector (an integer header) names which
registered conditional codec produced the payload (0 for the first one
registered, so the most specific codecs get the shortest selectors), and
the value one past the last candidate means "ignore the condition and use
the unconditional codec". When no conditional
codec is registered for a pair of types the unconditional codeword is used
unchanged and the estimate is flagged as a fallback.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import gf2
from .structures import AffineSubspace, CacheTable, Constraint, InstanceSpec, SampleSet


class NoCodecError(TypeError):
    pass


class DecodeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# bit plumbing


@dataclass(frozen=True)
class Codeword:
    bits: str
    scheme_id: int

    def __len__(self) -> int:
        return len(self.bits)

    def to_report(self) -> str:
        """``scheme_id:hex(bits):bitlen``; bits are right-padded to a nibble."""
        if not self.bits:
            return f"{self.scheme_id}::0"
        pad = self.bits + "0" * (-len(self.bits) % 4)
        hx = format(int(pad, 2), "0{}x".format(len(pad) // 4))
        return f"{self.scheme_id}:{hx}:{len(self.bits)}"

    @classmethod
    def from_report(cls, s: str) -> "Codeword":
        sid, hx, ln = s.split(":")
        n = int(ln)
        bits = format(int(hx, 16), "0{}b".format(len(hx) * 4))[:n] if n else ""
        return cls(bits, int(sid))


class BitReader:
    def __init__(self, bits: str, pos: int = 0):
        self.bits = bits
        self.pos = pos

    def read(self, k: int) -> str:
        if self.pos + k > len(self.bits):
            raise DecodeError("codeword truncated")
        out = self.bits[self.pos : self.pos + k]
        self.pos += k
        return out

    def read_vec(self, n: int) -> int:
        return bits_to_vec(self.read(n))

    def read_uint(self) -> int:
        zeros = 0
        while True:
            b = self.read(1)
            if b == "1":
                break
            zeros += 1
        rest = self.read(zeros)
        return int("1" + rest, 2) - 1


def vec_to_bits(v: int, n: int) -> str:
    """Coordinate order: bit 0 first."""
    return "".join("1" if (v >> i) & 1 else "0" for i in range(n))


def bits_to_vec(s: str) -> int:
    v = 0
    for i, ch in enumerate(s):
        if ch == "1":
            v |= 1 << i
    return v


def uint_bits(k: int) -> str:
    # Elias gamma of k+1: 2*floor(log2(k+1)) + 1 bits
    if k < 0:
        raise ValueError("encode_uint needs k >= 0")
    b = bin(k + 1)[2:]
    return "0" * (len(b) - 1) + b


def uint_len(k: int) -> int:
    return 2 * (k + 1).bit_length() - 1


def default_header_overhead(n: int) -> int:
    """Two integer headers at their worst-case length for values up to n."""
    return 2 * (2 * (n + 1).bit_length() + 1)


# ---------------------------------------------------------------------------
# generic objects


@dataclass(frozen=True)
class Bits:
    """A raw bitstring, e.g. a flattened register file or an idle description."""

    value: str = ""

    def __post_init__(self) -> None:
        if set(self.value) - {"0", "1"}:
            raise ValueError("Bits accepts only '0'/'1'")


EMPTY = Bits("")


@dataclass(frozen=True)
class Substrate:
    """A composite substrate description: an ordered tuple of encodable parts."""

    parts: Tuple[Any, ...] = ()

    def extend(self, *more: Any) -> "Substrate":
        return Substrate(self.parts + tuple(more))


@dataclass(frozen=True)
class ComplexityEstimate:
    bits: int
    kind: str  # "unconditional" | "conditional"
    method: str
    fallback: bool = False


@dataclass(frozen=True)
class MutualInfoEstimate:
    bits: int
    x_id: str
    y_id: str


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Codec:
    scheme_id: int
    name: str
    type: type
    encode: Callable[[Any], str]
    decode: Callable[[BitReader], Any]


@dataclass(frozen=True)
class ConditionalCodec:
    scheme_id: int
    name: str
    x_type: type  # ``object`` matches any x type
    y_type: type
    encode: Callable[[Any, Any], Optional[str]]  # None when not applicable
    decode: Callable[[BitReader, Any, type], Any]


_CODECS: Dict[type, Codec] = {}
_BY_SCHEME: Dict[int, Codec] = {}
_COND: List[ConditionalCodec] = []


def register(codec: Codec) -> Codec:
    _CODECS[codec.type] = codec
    _BY_SCHEME[codec.scheme_id] = codec
    return codec


def register_conditional(codec: ConditionalCodec) -> ConditionalCodec:
    _COND.append(codec)
    return codec


def codec_for(x: Any) -> Codec:
    try:
        return _CODECS[type(x)]
    except KeyError:
        raise NoCodecError(f"no codec registered for {type(x).__name__}") from None


def conditional_codecs(x_type: type, y_type: type) -> List[ConditionalCodec]:
    return [
        c
        for c in _COND
        if c.y_type is y_type and (c.x_type is x_type or c.x_type is object)
    ]


# ---------------------------------------------------------------------------
# public operations


def encode_uint(k: int) -> Codeword:
    return Codeword(uint_bits(k), UINT)


def decode_uint(cw: Codeword | str, pos: int = 0) -> Tuple[int, int]:
    """Return ``(value, bits consumed)``."""
    bits = cw.bits if isinstance(cw, Codeword) else cw
    r = BitReader(bits, pos)
    k = r.read_uint()
    return k, r.pos - pos


def encode(x: Any) -> Codeword:
    c = codec_for(x)
    return Codeword(c.encode(x), c.scheme_id)


def decode(cw: Codeword | str, scheme_id: int | None = None, pos: int = 0) -> Tuple[Any, int]:
    """Decode one codeword starting at ``pos``; returns ``(object, bits consumed)``."""
    if isinstance(cw, Codeword):
        bits, scheme_id = cw.bits, cw.scheme_id
    else:
        bits = cw
    if scheme_id not in _BY_SCHEME:
        raise NoCodecError(f"unknown scheme {scheme_id}")
    r = BitReader(bits, pos)
    obj = _BY_SCHEME[scheme_id].decode(r)
    return obj, r.pos - pos


def encode_class_descriptor(v: AffineSubspace) -> Codeword:
    """header(n) || header(d) || d*n basis bits || n offset bits, on the canonical form."""
    return encode(v.canonical())


def khat(x: Any) -> ComplexityEstimate:
    c = codec_for(x)
    return ComplexityEstimate(len(c.encode(x)), "unconditional", c.name)


def _normalize_given(y: Any) -> Any:
    if isinstance(y, Substrate) and not y.parts:
        return EMPTY
    if y is None:
        return EMPTY
    return y


def encode_cond(x: Any, given: Any) -> Tuple[Codeword, ComplexityEstimate]:
    """Shortest registered conditional codeword for ``x`` given ``given``."""
    given = _normalize_given(given)
    base = codec_for(x)
    cands = conditional_codecs(type(x), type(given))
    if not cands:
        bits = base.encode(x)
        return Codeword(bits, base.scheme_id), ComplexityEstimate(
            len(bits), "conditional", base.name, fallback=True
        )
    best_bits = uint_bits(len(cands)) + base.encode(x)
    best_name = base.name
    best_id = base.scheme_id
    for i, c in enumerate(cands):
        payload = c.encode(x, given)
        if payload is None:
            continue
        bits = uint_bits(i) + payload
        if len(bits) < len(best_bits):
            best_bits, best_name, best_id = bits, c.name, c.scheme_id
    return Codeword(best_bits, best_id), ComplexityEstimate(len(best_bits), "conditional", best_name)


def decode_cond(r: BitReader, given: Any, x_type: type) -> Any:
    given = _normalize_given(given)
    cands = conditional_codecs(x_type, type(given))
    if not cands:
        return _CODECS[x_type].decode(r)
    idx = r.read_uint()
    if idx == len(cands):
        return _CODECS[x_type].decode(r)
    if idx > len(cands):
        raise DecodeError("bad conditional selector")
    return cands[idx].decode(r, given, x_type)


def decode_conditional(cw: Codeword | str, given: Any, x_type: type) -> Any:
    bits = cw.bits if isinstance(cw, Codeword) else cw
    return decode_cond(BitReader(bits), given, x_type)


def khat_cond(x: Any, given: Any) -> ComplexityEstimate:
    return encode_cond(x, given)[1]


def object_id(x: Any) -> str:
    try:
        h = hashlib.sha1(encode(x).bits.encode()).hexdigest()[:10]
    except NoCodecError:
        h = "unencodable"
    return f"{type(x).__name__}#{h}"


def mutual_info(x: Any, y: Any) -> MutualInfoEstimate:
    """``max(0, khat(x) - khat_cond(x | y))``."""
    bits = max(0, khat(x).bits - khat_cond(x, y).bits)
    return MutualInfoEstimate(bits, object_id(x), object_id(y))


# ---------------------------------------------------------------------------
# scheme ids

UINT = 1
BITS = 2
SUBSPACE = 3
SAMPLES = 4
SUBSTRATE = 5
INSTANCE = 6
CACHE = 7

COND_IDENTITY = 10
COND_SUBSPACE_REL = 11
COND_SUBSPACE_SAMPLES = 12
COND_SUBSPACE_CACHE = 13
COND_IN_SUBSTRATE = 14
COND_SUBSTRATE_PARTS = 15
COND_BITS_PATCH = 16
COND_SUBSTRATE_PREFIX = 17


# ---------------------------------------------------------------------------
# unconditional codecs


register(Codec(UINT, "uint", int, lambda k: uint_bits(k), lambda r: r.read_uint()))

register(
    Codec(
        BITS,
        "bits",
        Bits,
        lambda b: uint_bits(len(b.value)) + b.value,
        lambda r: Bits(r.read(r.read_uint())),
    )
)


def _enc_subspace(v: AffineSubspace) -> str:
    out = [uint_bits(v.n), uint_bits(v.d)]
    out += [vec_to_bits(b, v.n) for b in v.basis]
    out.append(vec_to_bits(v.offset, v.n))
    return "".join(out)


def _dec_subspace(r: BitReader) -> AffineSubspace:
    n = r.read_uint()
    d = r.read_uint()
    basis = tuple(r.read_vec(n) for _ in range(d))
    return AffineSubspace(n, basis, r.read_vec(n))


register(Codec(SUBSPACE, "class-descriptor", AffineSubspace, _enc_subspace, _dec_subspace))


def _enc_samples(s: SampleSet) -> str:
    return uint_bits(s.n) + uint_bits(s.m) + "".join(vec_to_bits(p, s.n) for p in s.points)


def _dec_samples(r: BitReader) -> SampleSet:
    n = r.read_uint()
    m = r.read_uint()
    return SampleSet(n, tuple(r.read_vec(n) for _ in range(m)))


register(Codec(SAMPLES, "samples", SampleSet, _enc_samples, _dec_samples))


def _enc_instance_payload(inst: InstanceSpec) -> str:
    out = [uint_bits(inst.n), uint_bits(inst.aux_count), uint_bits(len(inst.constraints))]
    for c in inst.constraints:
        out.append(uint_bits(len(c.vars)))
        out += [uint_bits(v) for v in c.vars]
        out.append(str(c.target))
    return "".join(out)


def _dec_instance(r: BitReader) -> InstanceSpec:
    n = r.read_uint()
    aux = r.read_uint()
    k = r.read_uint()
    cons = []
    for _ in range(k):
        w = r.read_uint()
        vs = tuple(r.read_uint() for _ in range(w))
        cons.append(Constraint(vs, int(r.read(1))))
    return InstanceSpec(n, tuple(cons), aux)


# the presentation seed is generation metadata, not instance content
register(Codec(INSTANCE, "instance", InstanceSpec, _enc_instance_payload, _dec_instance))


def _enc_cache(t: CacheTable) -> str:
    out = [uint_bits(t.n), uint_bits(len(t.entries))]
    for inst, ans in t.entries:
        out.append(_enc_instance_payload(inst))
        out.append(uint_bits(len(ans)))
        out += [vec_to_bits(p, t.n) for p in sorted(ans)]
    return "".join(out)


def _dec_cache(r: BitReader) -> CacheTable:
    n = r.read_uint()
    k = r.read_uint()
    entries = []
    for _ in range(k):
        inst = _dec_instance(r)
        cnt = r.read_uint()
        entries.append((inst, frozenset(r.read_vec(n) for _ in range(cnt))))
    return CacheTable(n, tuple(entries))


register(Codec(CACHE, "cache-table", CacheTable, _enc_cache, _dec_cache))


def _enc_substrate(s: Substrate) -> str:
    out = [uint_bits(len(s.parts))]
    for p in s.parts:
        c = codec_for(p)
        out.append(uint_bits(c.scheme_id))
        out.append(c.encode(p))
    return "".join(out)


def _dec_substrate(r: BitReader) -> Substrate:
    k = r.read_uint()
    parts = []
    for _ in range(k):
        sid = r.read_uint()
        if sid not in _BY_SCHEME:
            raise DecodeError(f"unknown part scheme {sid}")
        parts.append(_BY_SCHEME[sid].decode(r))
    return Substrate(tuple(parts))


register(Codec(SUBSTRATE, "substrate", Substrate, _enc_substrate, _dec_substrate))


# ---------------------------------------------------------------------------
# conditional codecs


def _identity_codec(t: type) -> ConditionalCodec:
    return ConditionalCodec(
        COND_IDENTITY,
        "identity",
        t,
        t,
        lambda x, y: "" if x == y else None,
        lambda r, y, xt: y,
    )


for _t in (Bits, AffineSubspace, SampleSet, InstanceSpec, CacheTable, Substrate):
    register_conditional(_identity_codec(_t))


def _coords(vec: int, basis: Sequence[int]) -> Optional[int]:
    """Bitmask c with XOR of basis[i] for set bits i equal to vec, else None."""
    rows: Dict[int, Tuple[int, int]] = {}
    for i, b in enumerate(basis):
        tag = 1 << i
        for p, (rb, rt) in rows.items():
            if (b >> p) & 1:
                b ^= rb
                tag ^= rt
        if b:
            rows[gf2.low_bit(b)] = (b, tag)
    out = 0
    for p, (rb, rt) in sorted(rows.items()):
        if (vec >> p) & 1:
            vec ^= rb
            out ^= rt
    return out if vec == 0 else None


def _enc_rel(x: AffineSubspace, y: AffineSubspace) -> Optional[str]:
    if x.n != y.n or not y.contains_subspace(x):
        return None
    out = [uint_bits(x.d)]
    for b in x.basis:
        out.append(vec_to_bits(_coords(b, y.basis), y.d))
    out.append(vec_to_bits(_coords(x.offset ^ y.offset, y.basis), y.d))
    return "".join(out)


def _combine(mask: int, basis: Sequence[int]) -> int:
    v = 0
    for i, b in enumerate(basis):
        if (mask >> i) & 1:
            v ^= b
    return v


def _dec_rel(r: BitReader, y: AffineSubspace, xt: type) -> AffineSubspace:
    d = r.read_uint()
    rows = tuple(_combine(r.read_vec(y.d), y.basis) for _ in range(d))
    return AffineSubspace(y.n, rows, y.offset ^ _combine(r.read_vec(y.d), y.basis))


register_conditional(
    ConditionalCodec(COND_SUBSPACE_REL, "subspace-relative", AffineSubspace, AffineSubspace, _enc_rel, _dec_rel)
)


def hull_residual(x: AffineSubspace, n: int, points: Sequence[int]) -> Optional[str]:
    """Residual needed to rebuild canonical ``x`` from points lying in it.

    header(k) || k extra basis rows (n bits each) || offset (n bits, only when no points).
    """
    if x.n != n or x != x.canonical():
        return None
    if not points:
        return uint_bits(x.d) + "".join(vec_to_bits(b, n) for b in x.basis) + vec_to_bits(x.offset, n)
    if not all(x.contains(p) for p in points):
        return None
    _, span = gf2.affine_hull(list(points))
    extra = []
    for b in x.basis:
        if not gf2.in_span(b, span):
            extra.append(b)
            span = gf2.echelon(span + [b])
    return uint_bits(len(extra)) + "".join(vec_to_bits(b, n) for b in extra)


def rebuild_from_points(r: BitReader, n: int, points: Sequence[int]) -> AffineSubspace:
    k = r.read_uint()
    rows = [r.read_vec(n) for _ in range(k)]
    if not points:
        return AffineSubspace(n, tuple(rows), r.read_vec(n))
    base, span = gf2.affine_hull(list(points))
    ech = gf2.echelon(span + rows)
    return AffineSubspace(n, tuple(ech), gf2.reduce(base, ech))


register_conditional(
    ConditionalCodec(
        COND_SUBSPACE_SAMPLES,
        "hull-residual",
        AffineSubspace,
        SampleSet,
        lambda x, s: hull_residual(x, s.n, s.points),
        lambda r, s, xt: rebuild_from_points(r, s.n, s.points),
    )
)

register_conditional(
    ConditionalCodec(
        COND_SUBSPACE_CACHE,
        "cache-hull-residual",
        AffineSubspace,
        CacheTable,
        lambda x, t: hull_residual(x, t.n, t.stored_points()),
        lambda r, t, xt: rebuild_from_points(r, t.n, t.stored_points()),
    )
)


def _enc_in_substrate(x: Any, s: Substrate) -> Optional[str]:
    best = None
    for i, p in enumerate(s.parts):
        cw, _ = encode_cond(x, p)
        bits = uint_bits(i) + cw.bits
        if best is None or len(bits) < len(best):
            best = bits
    return best


def _dec_in_substrate(r: BitReader, s: Substrate, xt: type) -> Any:
    i = r.read_uint()
    if i >= len(s.parts):
        raise DecodeError("part index out of range")
    return decode_cond(r, s.parts[i], xt)


register_conditional(
    ConditionalCodec(COND_IN_SUBSTRATE, "substrate-part", object, Substrate, _enc_in_substrate, _dec_in_substrate)
)


def _enc_prefix(x: Substrate, y: Substrate) -> Optional[str]:
    # x is an initial segment of y: replay it by length alone
    k = len(x.parts)
    return uint_bits(k) if y.parts[:k] == x.parts else None


def _dec_prefix(r: BitReader, y: Substrate, xt: type) -> Substrate:
    k = r.read_uint()
    if k > len(y.parts):
        raise DecodeError("prefix longer than the condition")
    return Substrate(y.parts[:k])


register_conditional(
    ConditionalCodec(COND_SUBSTRATE_PREFIX, "substrate-prefix", Substrate, Substrate, _enc_prefix, _dec_prefix)
)


def _enc_parts(x: Substrate, y: Substrate) -> Optional[str]:
    out = [uint_bits(len(x.parts))]
    for p in x.parts:
        out.append(uint_bits(codec_for(p).scheme_id))
        out.append(encode_cond(p, y)[0].bits)
    return "".join(out)


def _dec_parts(r: BitReader, y: Substrate, xt: type) -> Substrate:
    k = r.read_uint()
    parts = []
    for _ in range(k):
        sid = r.read_uint()
        parts.append(decode_cond(r, y, _BY_SCHEME[sid].type))
    return Substrate(tuple(parts))


register_conditional(
    ConditionalCodec(COND_SUBSTRATE_PARTS, "substrate-parts", Substrate, Substrate, _enc_parts, _dec_parts)
)


def _enc_patch(x: Bits, y: Bits) -> Optional[str]:
    if len(x.value) != len(y.value):
        return None
    diffs = [i for i, (a, b) in enumerate(zip(x.value, y.value)) if a != b]
    return uint_bits(len(diffs)) + "".join(uint_bits(i) for i in diffs)


def _dec_patch(r: BitReader, y: Bits, xt: type) -> Bits:
    k = r.read_uint()
    out = list(y.value)
    for _ in range(k):
        i = r.read_uint()
        out[i] = "1" if out[i] == "0" else "0"
    return Bits("".join(out))


register_conditional(ConditionalCodec(COND_BITS_PATCH, "positional-patch", Bits, Bits, _enc_patch, _dec_patch))


def patch_length(before: Bits, after: Bits) -> int:
    """Length of the positional-patch payload rebuilding ``before`` from ``after``."""
    p = _enc_patch(before, after)
    if p is None:
        raise ValueError("shape mismatch")
    return len(p)
