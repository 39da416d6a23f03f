"""Stabilizer codes from self-orthogonal subspaces, syndromes and minimal-weight decoding.

Decoding is done entirely on the F_2 side: two errors land in the same eigenspace
``MQ`` iff their syndromes agree (their sum lies in ``C^perp``), and the recovery
succeeds iff the error and the chosen leader differ by an element of ``±S`` (their
sum lies in ``C``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from stabcap import gf2
from stabcap.errors import BudgetExceeded, StabcapError
from stabcap.pauli import (
    Bitvec2n,
    PauliOperator,
    iter_words,
    pauli_mul,
    symplectic_packed,
)

__all__ = [
    "MAX_WORDS",
    "SymplecticSubspace",
    "StabilizerCode",
    "CosetLeaderTable",
    "make_code",
    "syndrome",
    "build_coset_leaders",
    "uncorrectable_set",
    "uncorrectable_words",
    "decoder_failures",
    "minimum_distance",
    "logical_operators",
    "word_array",
    "count_words",
    "load_code",
    "code_to_dict",
    "PRESET_CODES",
    "preset_code",
]

MAX_WORDS = 10**8


@dataclass(frozen=True)
class SymplecticSubspace:
    """A self-orthogonal subspace ``C ⊆ C^perp`` of ``F_2^{2n}``."""

    n: int
    basis: tuple[Bitvec2n, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", tuple(self.basis))
        for v in self.basis:
            if v.n != self.n:
                raise StabcapError(f"basis vector {v} does not have n={self.n}")
        packed = self.packed
        if gf2.rank(packed) != len(packed):
            raise StabcapError("basis vectors are linearly dependent")
        for i, u in enumerate(packed):
            for v in packed[i + 1 :]:
                if symplectic_packed(u, v, self.n):
                    raise StabcapError("subspace is not self-orthogonal")
        if self.dim > self.n:
            raise StabcapError(f"self-orthogonal subspace with dim {self.dim} > n")

    @classmethod
    def from_packed(cls, rows: Iterable[int], n: int) -> SymplecticSubspace:
        return cls(n, tuple(Bitvec2n.from_packed(r, n) for r in rows))

    @classmethod
    def from_paulis(cls, words: Sequence[str | PauliOperator]) -> SymplecticSubspace:
        ops = [PauliOperator.from_string(w) if isinstance(w, str) else w for w in words]
        if not ops:
            raise StabcapError("need at least one generator to fix n")
        return cls(ops[0].n, tuple(op.v for op in ops))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def packed(self) -> tuple[int, ...]:
        return tuple(v.packed for v in self.basis)

    @property
    def key(self) -> tuple[int, ...]:
        """RREF of the basis: equal keys iff equal subspaces."""
        return gf2.rref(self.packed)

    def dual(self) -> tuple[int, ...]:
        return gf2.symplectic_dual(self.packed, self.n)

    def __contains__(self, v: Bitvec2n) -> bool:
        return gf2.in_span(v.packed, self.key)


@dataclass(frozen=True)
class StabilizerCode:
    """An ``[[n, k]]`` stabilizer code.

    ``signs[j]`` is the eigenvalue the code space takes on generator ``j``; the
    syndrome of an error is the vector of its symplectic products with the generators.
    """

    space: SymplecticSubspace
    k: int
    signs: tuple[int, ...]
    dual_basis: tuple[int, ...] = field(repr=False)
    logical_basis: tuple[int, ...] = field(repr=False)

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def r(self) -> int:
        return self.space.dim

    @property
    def generators(self) -> tuple[int, ...]:
        return self.space.packed

    @property
    def stabilizer_echelon(self) -> tuple[int, ...]:
        return self.space.key

    def generator_paulis(self) -> list[PauliOperator]:
        return [PauliOperator(s, v) for s, v in zip(self.signs, self.space.basis)]

    def syndrome_int(self, v: int) -> int:
        s = 0
        for g in self.generators:
            s = (s << 1) | symplectic_packed(v, g, self.n)
        return s


def make_code(
    space: SymplecticSubspace, k: int, signs: Sequence[int] | None = None
) -> StabilizerCode:
    n = space.n
    if space.dim != n - k:
        raise StabcapError(f"dim C = {space.dim} but n - k = {n - k}")
    if signs is None:
        signs = (1,) * space.dim
    signs = tuple(int(s) for s in signs)
    if len(signs) != space.dim or any(s not in (1, -1) for s in signs):
        raise StabcapError("need one sign (+1/-1) per generator")
    dual = space.dual()
    if len(dual) != 2 * n - space.dim:
        raise AssertionError("dim C^perp != 2n - dim C")
    # kernel of the syndrome map must be exactly C^perp
    for u in dual:
        for g in space.packed:
            if symplectic_packed(u, g, n):
                raise AssertionError("dual basis vector has nonzero syndrome")
    logical = tuple(gf2.complement_basis(space.packed, dual))
    return StabilizerCode(space, k, signs, dual, logical)


def syndrome(code: StabilizerCode, m: PauliOperator | Bitvec2n) -> tuple[int, ...]:
    v = m.v if isinstance(m, PauliOperator) else m
    if v.n != code.n:
        raise StabcapError(f"dimension mismatch: n={v.n} vs code n={code.n}")
    return tuple(symplectic_packed(v.packed, g, code.n) for g in code.generators)


def count_words(n: int, max_weight: int) -> int:
    return sum(math.comb(n, w) * 3**w for w in range(min(max_weight, n) + 1))


def _check_budget(n: int, max_weight: int, budget: int) -> None:
    total = count_words(n, max_weight)
    if total > budget:
        raise BudgetExceeded(
            f"{total} Pauli words of weight <= {max_weight} at n={n} exceed budget {budget}"
        )


def word_array(n: int, max_weight: int | None = None, budget: int = MAX_WORDS) -> np.ndarray:
    """Packed words of weight <= max_weight, in coset-leader order, as ``uint64``."""
    if 2 * n > 64:
        raise StabcapError("vectorized word arrays need 2n <= 64")
    mw = n if max_weight is None else max_weight
    _check_budget(n, mw, budget)
    return np.fromiter(iter_words(n, mw), dtype=np.uint64, count=count_words(n, mw))


def _weights(words: np.ndarray, n: int) -> np.ndarray:
    mask = np.uint64((1 << n) - 1)
    return np.bitwise_count((words >> np.uint64(n)) | (words & mask)).astype(np.int64)


def _products(words: np.ndarray, vectors: Sequence[int], n: int) -> np.ndarray:
    """Integer labels whose bits are the symplectic products with ``vectors``."""
    out = np.zeros(words.shape, dtype=np.uint64)
    for u in vectors:
        ju = np.uint64(gf2.swap_halves(u, n))
        bit = (np.bitwise_count(words & ju) & 1).astype(np.uint64)
        out = (out << np.uint64(1)) | bit
    return out


@dataclass(frozen=True)
class CosetLeaderTable:
    """Syndrome (as an int, generator 0 in the top bit) -> minimal-weight packed word."""

    n: int
    max_weight: int
    leaders: dict[int, int]

    def leader(self, s: int | Sequence[int]) -> PauliOperator:
        if not isinstance(s, int):
            s = int("".join(map(str, s)) or "0", 2)
        return PauliOperator.from_packed(self.leaders[s], self.n)

    def __len__(self) -> int:
        return len(self.leaders)


def build_coset_leaders(
    code: StabilizerCode, max_weight: int | None = None, budget: int = MAX_WORDS
) -> CosetLeaderTable:
    n = code.n
    mw = n if max_weight is None else max_weight
    _check_budget(n, mw, budget)
    leaders: dict[int, int] = {}
    target = 1 << code.r
    for v in iter_words(n, mw):
        s = code.syndrome_int(v)
        if s not in leaders:
            leaders[s] = v
            if len(leaders) == target:
                break
    return CosetLeaderTable(n, mw, leaders)


def _classify(code: StabilizerCode, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(syndrome, coset-of-C label) for each word."""
    n = code.n
    syn = _products(words, code.generators, n)
    logical = _products(words, code.logical_basis, n)
    label = (syn << np.uint64(len(code.logical_basis))) | logical
    return syn, label


def uncorrectable_words(
    code: StabilizerCode, max_weight: int | None = None, budget: int = MAX_WORDS
) -> np.ndarray:
    """Packed words ``M`` with ``w(M) <= max_weight`` in the over-approximating set

    ``{M : exists M', w(M') <= w(M), M' S' = M S', M S != ±M' S}``.
    """
    n = code.n
    words = word_array(n, max_weight, budget)
    w = _weights(words, n)
    syn, label = _classify(code, words)

    classes, inv = np.unique(label, return_inverse=True)
    cmin = np.full(classes.shape, n + 1, dtype=np.int64)
    np.minimum.at(cmin, inv, w)
    csyn = classes >> np.uint64(len(code.logical_basis))

    order = np.lexsort((cmin, csyn))
    s_sorted, m_sorted, c_sorted = csyn[order], cmin[order], classes[order]
    syns, start, counts = np.unique(s_sorted, return_index=True, return_counts=True)
    best_cls = c_sorted[start]
    best_w = m_sorted[start]
    second_w = np.where(counts > 1, m_sorted[np.minimum(start + 1, len(order) - 1)], n + 1)

    idx = np.searchsorted(syns, syn)
    other = np.where(label == best_cls[idx], second_w[idx], best_w[idx])
    return words[other <= w]


def uncorrectable_set(
    code: StabilizerCode, max_weight: int | None = None, budget: int = MAX_WORDS
) -> frozenset[PauliOperator]:
    return frozenset(
        PauliOperator.from_packed(int(v), code.n)
        for v in uncorrectable_words(code, max_weight, budget)
    )


def decoder_failures(
    code: StabilizerCode, max_weight: int | None = None, budget: int = MAX_WORDS
) -> frozenset[PauliOperator]:
    """Errors the coset-leader decoder actually fails on.

    ``M`` fails iff ``leader(syndrome(M))^{-1} M`` is not in ``±S``.
    """
    n = code.n
    words = word_array(n, max_weight, budget)
    syn, label = _classify(code, words)
    # words are in leader order, so the first occurrence of a syndrome is its leader
    _, first = np.unique(syn, return_index=True)
    leader_of = dict(zip(syn[first].tolist(), words[first].tolist()))
    echelon = code.stabilizer_echelon
    out = set()
    for v, s in zip(words.tolist(), syn.tolist()):
        m = PauliOperator.from_packed(v, n)
        lead = PauliOperator.from_packed(leader_of[s], n)
        residual = pauli_mul(lead.inverse(), m)
        if not gf2.in_span(residual.v.packed, echelon):
            out.add(m)
    return frozenset(out)


def minimum_distance(code: StabilizerCode, budget: int = MAX_WORDS) -> int | None:
    """Smallest weight in ``C^perp \\ C``; ``None`` when ``C^perp = C`` (k = 0)."""
    if code.k == 0:
        return None
    n = code.n
    echelon = code.stabilizer_echelon
    for w in range(1, n + 1):
        _check_budget(n, w, budget)
        batch = np.fromiter(iter_words(n, w, min_weight=w), dtype=np.uint64)
        syn = _products(batch, code.generators, n)
        for v in batch[syn == 0].tolist():
            if not gf2.in_span(v, echelon):
                return w
    raise AssertionError("C^perp \\ C is nonempty for k > 0 but no word found")


def logical_operators(code: StabilizerCode) -> list[tuple[int, int]]:
    """Symplectic pairs ``(X_j, Z_j)`` spanning ``C^perp`` modulo ``C``."""
    n = code.n
    pool = list(code.logical_basis)
    pairs = []
    while pool:
        u = pool.pop(0)
        j = next((i for i, v in enumerate(pool) if symplectic_packed(u, v, n)), None)
        if j is None:
            raise AssertionError("logical space is degenerate")
        w = pool.pop(j)
        rest = []
        for x in pool:
            x ^= symplectic_packed(x, w, n) * u
            x ^= symplectic_packed(x, u, n) * w
            rest.append(x)
        pool = rest
        pairs.append((u, w))
    return pairs


PRESET_CODES: dict[str, dict[str, Any]] = {
    "five_qubit": {"n": 5, "k": 1, "stabilizers": ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]},
    "steane": {
        "n": 7,
        "k": 1,
        "stabilizers": ["IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"],
    },
    "single_z": {"n": 1, "k": 0, "stabilizers": ["Z"]},
}


def _code_from_dict(data: dict[str, Any]) -> StabilizerCode:
    try:
        n, k, stabs = int(data["n"]), int(data["k"]), list(data["stabilizers"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StabcapError(f"malformed code description: {exc}") from None
    ops = [PauliOperator.from_string(s) for s in stabs]
    if any(op.n != n for op in ops):
        raise StabcapError("stabilizer length does not match n")
    space = SymplecticSubspace(n, tuple(op.v for op in ops)) if ops else SymplecticSubspace(n, ())
    return make_code(space, k, [op.sign for op in ops])


def preset_code(name: str) -> StabilizerCode:
    if name not in PRESET_CODES:
        raise StabcapError(f"unknown code preset {name!r}; known: {sorted(PRESET_CODES)}")
    return _code_from_dict(PRESET_CODES[name])


def load_code(source: str | Path | dict[str, Any]) -> StabilizerCode:
    """Code from a JSON file, a JSON string, a dict, or a preset name."""
    if isinstance(source, dict):
        return _code_from_dict(source)
    text = str(source)
    if text in PRESET_CODES:
        return preset_code(text)
    path = Path(text)
    if path.exists():
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StabcapError(f"code description is neither a preset, a file nor JSON: {exc}") from None
    if not isinstance(data, dict):
        raise StabcapError("code description JSON must be an object")
    return _code_from_dict(data)


def code_to_dict(code: StabilizerCode) -> dict[str, Any]:
    return {
        "n": code.n,
        "k": code.k,
        "stabilizers": [str(p) for p in code.generator_paulis()],
    }
