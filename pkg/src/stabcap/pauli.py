"""Binary symplectic vectors, GF(4) vectors and the signed Pauli group.

A Pauli word is kept in the ordered form ``±X^{a_1}Z^{b_1} ⊗ ... ⊗ X^{a_n}Z^{b_n}``.
The letter ``Y`` is used for ``XZ`` (the real matrix ``[[0, -1], [1, 0]]``), so the
group never produces factors of ``i``.

Bit layout: qubit ``i`` of an ``n``-qubit word is stored at bit ``n - 1 - i`` of the
``a`` (x-part) and ``b`` (z-part) integers.  With this layout the packed integer
``(a << n) | b`` orders words exactly like the bit-string ``a_1..a_n b_1..b_n`` and
``a`` doubles as the computational-basis index mask of ``X^a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from stabcap.errors import StabcapError

__all__ = [
    "Bitvec2n",
    "GF4Vector",
    "PauliOperator",
    "GF4_ADD",
    "GF4_MUL",
    "GF4_SQUARE",
    "OMEGA",
    "OMEGA2",
    "symplectic_form",
    "symplectic_packed",
    "trace_form_gf4",
    "hermitian_form",
    "pauli_mul",
    "g_map",
    "g_inverse",
    "omega_times",
    "iter_words",
    "weight_packed",
]

# F4 = {0, 1, w, w^2} encoded as 0, 1, 2, 3 with w^2 = w + 1.  Addition is XOR.
OMEGA = 2
OMEGA2 = 3
_LOG = {1: 0, 2: 1, 3: 2}
_EXP = (1, 2, 3)

GF4_ADD = tuple(tuple(x ^ y for y in range(4)) for x in range(4))
GF4_MUL = tuple(
    tuple(0 if x == 0 or y == 0 else _EXP[(_LOG[x] + _LOG[y]) % 3] for y in range(4))
    for x in range(4)
)
GF4_SQUARE = tuple(GF4_MUL[x][x] for x in range(4))

# (a_i, b_i) -> w*a_i + w^2*b_i
_G_OF_BITS = {(0, 0): 0, (1, 0): OMEGA, (0, 1): OMEGA2, (1, 1): 1}
_BITS_OF_G = {v: k for k, v in _G_OF_BITS.items()}

_LETTER_OF_BITS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS_OF_LETTER = {v: k for k, v in _LETTER_OF_BITS.items()}

_SIGMA = {
    (0, 0): np.eye(2),
    (1, 0): np.array([[0.0, 1.0], [1.0, 0.0]]),
    (0, 1): np.array([[1.0, 0.0], [0.0, -1.0]]),
    (1, 1): np.array([[0.0, -1.0], [1.0, 0.0]]),
}


def _parity(x: int) -> int:
    return x.bit_count() & 1


@dataclass(frozen=True)
class Bitvec2n:
    """The vector ``(a|b)`` of ``F_2^{2n}``, stored as two packed bit words."""

    a: int
    b: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise StabcapError(f"n must be positive, got {self.n}")
        limit = 1 << self.n
        if not (0 <= self.a < limit and 0 <= self.b < limit):
            raise StabcapError("x-part and z-part must both have length n")

    @classmethod
    def from_bits(cls, a: Sequence[int], b: Sequence[int]) -> Bitvec2n:
        if len(a) != len(b):
            raise StabcapError(f"length mismatch: {len(a)} != {len(b)}")
        ai = bi = 0
        for x, z in zip(a, b):
            ai = (ai << 1) | (int(x) & 1)
            bi = (bi << 1) | (int(z) & 1)
        return cls(ai, bi, len(a))

    @classmethod
    def from_packed(cls, v: int, n: int) -> Bitvec2n:
        mask = (1 << n) - 1
        return cls(v >> n, v & mask, n)

    @classmethod
    def zero(cls, n: int) -> Bitvec2n:
        return cls(0, 0, n)

    @property
    def packed(self) -> int:
        return (self.a << self.n) | self.b

    @property
    def weight(self) -> int:
        return (self.a | self.b).bit_count()

    def a_bits(self) -> tuple[int, ...]:
        return tuple((self.a >> (self.n - 1 - i)) & 1 for i in range(self.n))

    def b_bits(self) -> tuple[int, ...]:
        return tuple((self.b >> (self.n - 1 - i)) & 1 for i in range(self.n))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __add__(self, other: Bitvec2n) -> Bitvec2n:
        _check_n(self.n, other.n)
        return Bitvec2n(self.a ^ other.a, self.b ^ other.b, self.n)

    def __str__(self) -> str:
        a = "".join(map(str, self.a_bits()))
        b = "".join(map(str, self.b_bits()))
        return f"({a}|{b})"


def _check_n(n1: int, n2: int) -> None:
    if n1 != n2:
        raise StabcapError(f"dimension mismatch: n={n1} vs n={n2}")


def symplectic_form(u: Bitvec2n, v: Bitvec2n) -> int:
    """``<a, b'> - <a', b>`` over F_2 for ``u = (a|b)``, ``v = (a'|b')``."""
    _check_n(u.n, v.n)
    return _parity((u.a & v.b) ^ (v.a & u.b))


def symplectic_packed(u: int, v: int, n: int) -> int:
    """Symplectic form on packed ``(a << n) | b`` integers."""
    mask = (1 << n) - 1
    return _parity(((u >> n) & v & mask) ^ ((v >> n) & u & mask))


def weight_packed(v: int, n: int) -> int:
    return ((v >> n) | (v & ((1 << n) - 1))).bit_count()


def iter_words(n: int, max_weight: int | None = None, min_weight: int = 0) -> Iterator[int]:
    """Yield packed unsigned words by weight ascending, then lexicographic ``(a|b)``.

    This is the coset-leader enumeration order: the first word met in a coset is a
    minimal-weight one and, among those, the lexicographically smallest.
    """
    top = n if max_weight is None else min(max_weight, n)
    for w in range(min_weight, top + 1):
        batch = []
        for support in combinations(range(n), w):
            for letters in product(((1, 0), (0, 1), (1, 1)), repeat=w):
                a = b = 0
                for q, (x, z) in zip(support, letters):
                    a |= x << (n - 1 - q)
                    b |= z << (n - 1 - q)
                batch.append((a << n) | b)
        batch.sort()
        yield from batch


@dataclass(frozen=True)
class GF4Vector:
    """Vector over F_4 with entries in {0, 1, 2=w, 3=w^2}."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if any(x not in (0, 1, 2, 3) for x in self.entries):
            raise StabcapError("F_4 entries must lie in {0, 1, 2, 3}")

    @property
    def n(self) -> int:
        return len(self.entries)

    def __add__(self, other: GF4Vector) -> GF4Vector:
        _check_n(self.n, other.n)
        return GF4Vector(tuple(x ^ y for x, y in zip(self.entries, other.entries)))

    def scale(self, c: int) -> GF4Vector:
        return GF4Vector(tuple(GF4_MUL[c][x] for x in self.entries))

    def square(self) -> GF4Vector:
        return GF4Vector(tuple(GF4_SQUARE[x] for x in self.entries))


def _dot4(x: Sequence[int], y: Sequence[int]) -> int:
    s = 0
    for xi, yi in zip(x, y):
        s ^= GF4_MUL[xi][yi]
    return s


def trace_form_gf4(x: GF4Vector, y: GF4Vector) -> int:
    """``<x^2, y> - <x, y^2>``; the value always lies in F_2."""
    _check_n(x.n, y.n)
    val = _dot4(x.square().entries, y.entries) ^ _dot4(x.entries, y.square().entries)
    assert val in (0, 1), val
    return val


def hermitian_form(x: GF4Vector, y: GF4Vector) -> int:
    """``tau(x, y) = <x^2, y>`` as an element of F_4."""
    _check_n(x.n, y.n)
    return _dot4(x.square().entries, y.entries)


def g_map(v: Bitvec2n) -> GF4Vector:
    """``(a|b) -> w*a + w^2*b``."""
    return GF4Vector(tuple(_G_OF_BITS[ab] for ab in zip(v.a_bits(), v.b_bits())))


def g_inverse(x: GF4Vector) -> Bitvec2n:
    bits = [_BITS_OF_G[e] for e in x.entries]
    return Bitvec2n.from_bits([p[0] for p in bits], [p[1] for p in bits])


def omega_times(v: int, n: int) -> int:
    """Packed image of ``w * g(v)`` pulled back through ``g``.

    ``w(w a + w^2 b) = w b + w^2 (a + b)``, i.e. ``(a|b) -> (b|a+b)``.
    """
    mask = (1 << n) - 1
    a, b = v >> n, v & mask
    return (b << n) | (a ^ b)


@dataclass(frozen=True)
class PauliOperator:
    """Element ``sign * X^a Z^b`` of the signed Pauli group."""

    sign: int
    v: Bitvec2n

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise StabcapError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def n(self) -> int:
        return self.v.n

    @property
    def weight(self) -> int:
        return self.v.weight

    def f(self) -> Bitvec2n:
        return self.v

    def g(self) -> GF4Vector:
        return g_map(self.v)

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(1, Bitvec2n.zero(n))

    @classmethod
    def from_packed(cls, v: int, n: int, sign: int = 1) -> PauliOperator:
        return cls(sign, Bitvec2n.from_packed(v, n))

    @classmethod
    def from_string(cls, text: str) -> PauliOperator:
        s = text.strip()
        sign = 1
        if s[:1] in ("+", "-", "−"):
            sign = -1 if s[0] != "+" else 1
            s = s[1:]
        if not s:
            raise StabcapError(f"empty Pauli word: {text!r}")
        try:
            bits = [_BITS_OF_LETTER[c] for c in s.upper()]
        except KeyError as exc:
            raise StabcapError(f"bad Pauli letter {exc.args[0]!r} in {text!r}") from None
        v = Bitvec2n.from_bits([p[0] for p in bits], [p[1] for p in bits])
        return cls(sign, v)

    def letters(self) -> str:
        return "".join(
            _LETTER_OF_BITS[ab] for ab in zip(self.v.a_bits(), self.v.b_bits())
        )

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "") + self.letters()

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return pauli_mul(self, other)

    def inverse(self) -> PauliOperator:
        # (X^a Z^b)^{-1} = Z^b X^a = (-1)^{<a,b>} X^a Z^b
        return PauliOperator(self.sign * (-1) ** _parity(self.v.a & self.v.b), self.v)

    def matrix(self) -> np.ndarray:
        out = np.array([[float(self.sign)]])
        for ab in zip(self.v.a_bits(), self.v.b_bits()):
            out = np.kron(out, _SIGMA[ab])
        return out


def pauli_mul(m: PauliOperator, n: PauliOperator) -> PauliOperator:
    """Product in the signed group, renormalized to the ordered ``X^a Z^b`` form."""
    _check_n(m.n, n.n)
    # Z^{b1} X^{a2} = (-1)^{<b1,a2>} X^{a2} Z^{b1}
    flip = _parity(m.v.b & n.v.a)
    sign = m.sign * n.sign * (-1) ** flip
    return PauliOperator(sign, m.v + n.v)
