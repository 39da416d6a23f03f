"""Linear algebra over F_2 on integer bit rows.

Every vector is a Python int; bit ``j`` is coordinate ``j``.  Reduced row echelon
form uses the highest set bit of a row as its pivot, so the RREF of a list of rows is
a canonical key for the subspace they span.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

__all__ = [
    "rref",
    "rank",
    "reduce",
    "in_span",
    "nullspace",
    "symplectic_dual",
    "swap_halves",
    "span",
    "complement_basis",
]


def rref(rows: Iterable[int]) -> tuple[int, ...]:
    """Reduced row echelon basis, pivots strictly decreasing.  Zero rows are dropped."""
    basis: list[int] = []
    for r in rows:
        for b in basis:
            if r ^ b < r:
                r ^= b
        if r == 0:
            continue
        # clear the new pivot from the existing rows
        top = 1 << (r.bit_length() - 1)
        basis = [b ^ r if b & top else b for b in basis]
        basis.append(r)
    basis.sort(reverse=True)
    return tuple(basis)


def rank(rows: Iterable[int]) -> int:
    return len(rref(rows))


def reduce(v: int, echelon: Sequence[int]) -> int:
    """Canonical representative of ``v`` modulo the span of an RREF basis."""
    for b in echelon:
        if v & (1 << (b.bit_length() - 1)):
            v ^= b
    return v


def in_span(v: int, echelon: Sequence[int]) -> bool:
    return reduce(v, echelon) == 0


def nullspace(rows: Sequence[int], nbits: int) -> tuple[int, ...]:
    """Basis of ``{x : parity(x & r) = 0 for all r}`` in ``F_2^nbits``."""
    echelon = rref(rows)
    pivots = {b.bit_length() - 1: b for b in echelon}
    out = []
    for free in range(nbits):
        if free in pivots:
            continue
        x = 1 << free
        # each pivot coordinate equals the row's value on the free coordinate
        for p, row in pivots.items():
            if row >> free & 1:
                x |= 1 << p
        out.append(x)
    return rref(out)


def swap_halves(v: int, n: int) -> int:
    """``(a|b) -> (b|a)``; turns the symplectic form into the dot product."""
    mask = (1 << n) - 1
    return ((v & mask) << n) | (v >> n)


def symplectic_dual(basis: Sequence[int], n: int) -> tuple[int, ...]:
    """RREF basis of the symplectic complement of ``span(basis)`` in ``F_2^{2n}``."""
    return nullspace([swap_halves(g, n) for g in basis], 2 * n)


def span(basis: Sequence[int]) -> Iterator[int]:
    """All ``2^len(basis)`` elements of the span (Gray-code order, 0 first)."""
    v = 0
    yield v
    for i in range(1, 1 << len(basis)):
        v ^= basis[(i & -i).bit_length() - 1]
        yield v


def complement_basis(sub: Sequence[int], full: Sequence[int]) -> list[int]:
    """Vectors of ``full`` extending a basis of ``span(sub)`` to one of ``span(full)``."""
    current = list(rref(sub))
    out = []
    for v in full:
        if not in_span(v, current):
            out.append(v)
            current = list(rref(current + [v]))
    return out
