"""Small GF(2) linear algebra helpers over int bitsets.

Bit ``i`` of an integer is coordinate ``i`` of the vector. Pivots are taken on
the lowest set bit, so echelon forms are deterministic and the reduced form of
a row space is unique.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence, Tuple


def low_bit(v: int) -> int:
    return (v & -v).bit_length() - 1


def echelon(rows: Iterable[int]) -> List[int]:
    """Reduced row echelon form of ``rows``, sorted by pivot, zero rows dropped."""
    pivots: dict[int, int] = {}
    for r in rows:
        for p, b in pivots.items():
            if (r >> p) & 1:
                r ^= b
        if not r:
            continue
        p = low_bit(r)
        for q in list(pivots):
            if (pivots[q] >> p) & 1:
                pivots[q] ^= r
        pivots[p] = r
    return [pivots[p] for p in sorted(pivots)]


def rank(rows: Iterable[int]) -> int:
    return len(echelon(rows))


def reduce(vec: int, ech: Sequence[int]) -> int:
    """Reduce ``vec`` modulo the span of an echelon basis (clears pivot bits)."""
    for b in ech:
        if (vec >> low_bit(b)) & 1:
            vec ^= b
    return vec


def in_span(vec: int, ech: Sequence[int]) -> bool:
    return reduce(vec, ech) == 0


def independent(rows: Sequence[int]) -> bool:
    return rank(rows) == len(rows)


def nullspace(ech: Sequence[int], n: int) -> List[int]:
    """Basis of {h : <h, b> = 0 for every b in span(ech)} inside GF(2)^n.

    ``ech`` must be in reduced echelon form (as returned by :func:`echelon`).
    """
    piv = {low_bit(b): b for b in ech}
    out = []
    for f in range(n):
        if f in piv:
            continue
        h = 1 << f
        for p, b in piv.items():
            if (b >> f) & 1:
                h |= 1 << p
        out.append(h)
    return out


def dot(a: int, b: int) -> int:
    return (a & b).bit_count() & 1


def affine_hull(points: Sequence[int]) -> Tuple[int | None, List[int]]:
    """Offset and echelon direction basis of the affine hull of ``points``."""
    if not points:
        return None, []
    base = points[0]
    return base, echelon(p ^ base for p in points[1:])


def span_points(offset: int, basis: Sequence[int]) -> List[int]:
    """All 2^len(basis) points of ``offset + span(basis)``."""
    pts = [offset]
    for b in basis:
        pts += [p ^ b for p in pts]
    return pts


def to_hex(v: int, n: int) -> str:
    return format(v, "0{}x".format(max(1, (n + 3) // 4)))


def from_hex(s: str) -> int:
    return int(s, 16)
