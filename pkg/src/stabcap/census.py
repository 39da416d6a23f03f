"""Exhaustive censuses of self-orthogonal codes and the counting bounds built on them.

F_2 census: all ``C ⊆ F_2^{2n}`` with ``C ⊆ C^perp`` (symplectic form) of a given
dimension.  F_4 census: all F_4-linear ``C ⊆ F_4^n`` that are self-orthogonal under
the trace form; they are handled through their F_2 images under ``g^{-1}``, where
F_4-linearity means closure under ``v -> w v``.

All bound evaluations use exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from stabcap import gf2
from stabcap.code import (
    SymplecticSubspace,
    make_code,
    minimum_distance,
    uncorrectable_words,
)
from stabcap.errors import BudgetExceeded, StabcapError
from stabcap.pauli import (
    GF4_MUL,
    GF4_SQUARE,
    Bitvec2n,
    GF4Vector,
    g_map,
    omega_times,
    symplectic_packed,
    weight_packed,
)

__all__ = [
    "CensusResult",
    "F4CountReport",
    "GVResult",
    "MAX_SUBSPACES",
    "isotropic_subspace_count",
    "enumerate_self_orthogonal_f2",
    "enumerate_self_orthogonal_f4",
    "census_f2",
    "census_f4",
    "count_An_M",
    "uniform_vector_count",
    "isotropic_vector_count",
    "isotropic_vector_count_brute",
    "check_f4_vector_counts",
    "gv_bound_general",
    "gv_bound_linear",
    "gv_max_distance",
    "find_code_with_distance",
    "gv_sufficiency_search",
    "bn_chain",
    "sample_uniform_self_orthogonal",
    "f4_basis",
]

MAX_SUBSPACES = 200_000


def isotropic_subspace_count(n: int, dim: int) -> int:
    """Number of ``dim``-dimensional isotropic subspaces of the symplectic space F_2^{2n}."""
    if not 0 <= dim <= n:
        return 0
    num = den = 1
    for i in range(dim):
        num *= 4 ** (n - i) - 1
        den *= 2 ** (i + 1) - 1
    return num // den


def _span_array(basis: tuple[int, ...]) -> np.ndarray:
    out = np.zeros(1, dtype=np.int64)
    for b in basis:
        out = np.concatenate([out, out ^ b])
    return out


def _extend_levels(n: int, dim: int, step: int, budget: int) -> list[tuple[int, ...]]:
    """Breadth-first flag extension with RREF deduplication.

    ``step = 1`` grows F_2 subspaces one vector at a time; ``step = 2`` adds ``v`` and
    ``w v`` together and so grows F_4-linear subspaces.
    """
    level: set[tuple[int, ...]] = {()}
    for _ in range(dim):
        nxt: set[tuple[int, ...]] = set()
        for key in level:
            dual = gf2.symplectic_dual(key, n)
            for v in gf2.span(dual):
                # one candidate per coset of C, skipping C itself
                if v == 0 or gf2.reduce(v, key) != v:
                    continue
                if step == 1:
                    new = gf2.rref(key + (v,))
                else:
                    wv = omega_times(v, n)
                    if symplectic_packed(v, wv, n):
                        continue
                    new = gf2.rref(key + (v, wv))
                nxt.add(new)
            if len(nxt) > budget:
                raise BudgetExceeded(f"more than {budget} subspaces at n={n}")
        level = nxt
    return sorted(level)


def enumerate_self_orthogonal_f2(
    n: int, dim: int, budget: int = MAX_SUBSPACES
) -> list[SymplecticSubspace]:
    if n < 1 or not 0 <= dim:
        raise StabcapError(f"invalid (n, dim) = ({n}, {dim})")
    if dim > n:
        return []
    expected = isotropic_subspace_count(n, dim)
    if expected > budget:
        raise BudgetExceeded(f"{expected} subspaces at (n, dim) = ({n}, {dim}) exceed {budget}")
    keys = _extend_levels(n, dim, 1, budget)
    return [SymplecticSubspace.from_packed(k, n) for k in keys]


def enumerate_self_orthogonal_f4(
    n: int, dim_f4: int, budget: int = MAX_SUBSPACES
) -> list[SymplecticSubspace]:
    """F_4-linear self-orthogonal subspaces, returned as their F_2 images (dim 2*dim_f4)."""
    if n < 1 or dim_f4 < 0:
        raise StabcapError(f"invalid (n, dim_f4) = ({n}, {dim_f4})")
    if 2 * dim_f4 > n:
        return []
    keys = _extend_levels(n, dim_f4, 2, budget)
    return [SymplecticSubspace.from_packed(k, n) for k in keys]


def f4_basis(space: SymplecticSubspace) -> list[GF4Vector]:
    """An F_4 basis of an F_4-linear subspace given by its F_2 image."""
    n = space.n
    chosen: list[int] = []
    span: list[int] = []
    for v in space.key:
        if not gf2.in_span(v, gf2.rref(span)):
            chosen.append(v)
            span += [v, omega_times(v, n)]
    return [_g_packed(v, n) for v in chosen]


def _g_packed(v: int, n: int) -> GF4Vector:
    return g_map(Bitvec2n.from_packed(v, n))


@dataclass(frozen=True)
class CensusResult:
    """Census of one family at fixed ``(n, dim)``.

    ``per_vector_counts[v]`` is ``#{C : v in C^perp \\ C}`` for every nonzero packed
    ``v``; ``dim`` is the F_2 dimension (twice the F_4 dimension for ``field='f4'``).
    """

    n: int
    dim: int
    total: int
    field: str
    subspaces: tuple[tuple[int, ...], ...] = field(repr=False)
    per_vector_counts: dict[int, int] = field(repr=False)

    @property
    def k(self) -> int:
        return self.n - self.dim

    def count_range(self) -> tuple[int, int]:
        vals = self.per_vector_counts.values()
        return min(vals), max(vals)


def _census(n: int, subspaces: list[SymplecticSubspace], dim: int, fld: str) -> CensusResult:
    counts = np.zeros(4**n, dtype=np.int64)
    for s in subspaces:
        key = s.key
        counts += np.bincount(_span_array(gf2.symplectic_dual(key, n)), minlength=4**n)
        counts -= np.bincount(_span_array(key), minlength=4**n)
    per_vector = {v: int(counts[v]) for v in range(1, 4**n)}
    return CensusResult(n, dim, len(subspaces), fld, tuple(s.key for s in subspaces), per_vector)


def census_f2(n: int, dim: int, budget: int = MAX_SUBSPACES) -> CensusResult:
    return _census(n, enumerate_self_orthogonal_f2(n, dim, budget), dim, "f2")


def census_f4(n: int, dim_f4: int, budget: int = MAX_SUBSPACES) -> CensusResult:
    return _census(n, enumerate_self_orthogonal_f4(n, dim_f4, budget), 2 * dim_f4, "f4")


def count_An_M(census: CensusResult, v: Bitvec2n) -> int:
    """``#{C in census : v in C^perp \\ C}``."""
    if v.n != census.n:
        raise StabcapError(f"dimension mismatch: n={v.n} vs census n={census.n}")
    if v.is_zero():
        raise StabcapError("count is only defined for nonzero vectors")
    return census.per_vector_counts[v.packed]


def uniform_vector_count(n: int, k: int, total: int) -> Fraction:
    """Per-vector count ``#{C : v in C^perp \\ C}`` when every nonzero ``v`` is hit equally.

    ``(1/2^{n-k}) (1 - 2^{-2k}) / (1 - 2^{-2n}) * total``.
    """
    return (
        Fraction(1, 2 ** (n - k))
        * (1 - Fraction(1, 4**k))
        / (1 - Fraction(1, 4**n))
        * total
    )


def isotropic_vector_count(n: int) -> int:
    """Nonzero ``x in F_4^n`` with ``tau(x, x) = 0``: ``2^{2n-1} + (-1)^n 2^{n-1} - 1``."""
    if n < 1:
        raise StabcapError("n must be >= 1")
    return 2 ** (2 * n - 1) + (-1) ** n * 2 ** (n - 1) - 1


_MUL = np.array(GF4_MUL, dtype=np.int8)
_SQ = np.array(GF4_SQUARE, dtype=np.int8)


def _all_f4_vectors(n: int) -> np.ndarray:
    idx = np.arange(4**n, dtype=np.int64)
    digits = [(idx >> (2 * (n - 1 - i))) & 3 for i in range(n)]
    return np.stack(digits, axis=1).astype(np.int8)


def _tau_self(vectors: np.ndarray) -> np.ndarray:
    prods = _MUL[_SQ[vectors], vectors]
    return np.bitwise_xor.reduce(prods, axis=1)


def isotropic_vector_count_brute(n: int, max_n: int = 10) -> int:
    """Brute-force count over all nonzero vectors using the F_4 tables."""
    if n > max_n:
        raise BudgetExceeded(f"brute force over 4^{n} vectors disabled above n={max_n}")
    vecs = _all_f4_vectors(n)[1:]
    return int(np.count_nonzero(_tau_self(vecs) == 0))


@dataclass(frozen=True)
class F4CountReport:
    """Per-vector counts of an F_4 census against the general bound and the bounds
    split by whether ``tau(v, v)`` vanishes (isotropic) or not."""

    n: int
    u: int
    total: int
    general_bound: Fraction
    isotropic_bound: Fraction
    anisotropic_bound: Fraction
    counts: dict[int, int] = field(repr=False)
    isotropic: dict[int, bool] = field(repr=False)

    @property
    def max_count(self) -> int:
        return max(self.counts.values())

    def violations(self) -> list[int]:
        bad = []
        for v, c in self.counts.items():
            case = self.isotropic_bound if self.isotropic[v] else self.anisotropic_bound
            if c > case or c > self.general_bound:
                bad.append(v)
        return bad

    @property
    def ok(self) -> bool:
        return not self.violations()


def check_f4_vector_counts(n: int, u: int, budget: int = MAX_SUBSPACES) -> F4CountReport:
    census = census_f4(n, u, budget)
    total = census.total
    num = 4 ** (n - u) - 4**u
    sgn = (-1) ** n
    iso_den = 2 ** (2 * n - 1) + sgn * 2 ** (n - 1) - 1
    aniso_den = 2 ** (2 * n - 1) - sgn * 2 ** (n - 1)
    gen_den = 2 ** (2 * n - 1) - 2 ** (n - 1) - 1
    tau = _tau_self(_all_f4_vectors(n))
    iso = {}
    for v in census.per_vector_counts:
        gv = _g_packed(v, n)
        digit_index = 0
        for e in gv.entries:
            digit_index = digit_index * 4 + e
        iso[v] = bool(tau[digit_index] == 0)
    return F4CountReport(
        n,
        u,
        total,
        Fraction(num * total, gen_den),
        Fraction(num * total, iso_den),
        Fraction(num * total, aniso_den),
        dict(census.per_vector_counts),
        iso,
    )


@dataclass(frozen=True)
class GVResult:
    holds: bool
    lhs: Fraction

    def __float__(self) -> float:
        return float(self.lhs)


def _ball(n: int, d: int) -> int:
    return sum(3**i * math.comb(n, i) for i in range(1, d))


def gv_bound_general(n: int, k: int, d: int) -> GVResult:
    """Improved quantum GV condition for general stabilizer codes."""
    if not (1 <= k <= n) or d < 1:
        raise StabcapError(f"need 1 <= k <= n and d >= 1, got n={n} k={k} d={d}")
    lhs = (1 - Fraction(1, 4**k)) / (1 - Fraction(1, 4**n)) * Fraction(_ball(n, d), 2 ** (n - k))
    return GVResult(lhs < 1, lhs)


def gv_bound_linear(n: int, k: int, d: int) -> GVResult:
    """GV-type condition for F_4-linear stabilizer codes (k even)."""
    if k % 2:
        raise StabcapError(f"linear GV condition needs even k, got {k}")
    if not (0 <= k <= n) or d < 1:
        raise StabcapError(f"need 0 <= k <= n and d >= 1, got n={n} k={k} d={d}")
    lhs = (
        2
        * (1 - Fraction(1, 4**k))
        / (1 - Fraction(1, 2**n) - Fraction(2, 4**n))
        * Fraction(_ball(n, d), 2 ** (n - k))
    )
    return GVResult(lhs < 1, lhs)


def gv_max_distance(n: int, k: int, linear: bool = False) -> int:
    """Largest ``d`` for which the (general or linear) GV condition holds."""
    check = gv_bound_linear if linear else gv_bound_general
    d = 1
    while d <= n and check(n, k, d + 1).holds:
        d += 1
    return d


def sample_uniform_self_orthogonal(
    n: int,
    dim: int,
    seed: int | np.random.Generator | None = None,
    steps: int | None = None,
) -> SymplecticSubspace:
    """Random ``dim``-dimensional self-orthogonal subspace via symplectic transvections.

    Starts from ``span{Z_1, ..., Z_dim}`` and applies ``steps`` (default ``max(4 n^2, 16)``)
    transvections ``x -> x + <x, h> h`` with ``h`` uniform on F_2^{2n}; ``h = 0`` is
    allowed so the walk on the symplectic group is aperiodic.
    """
    if not 0 <= dim <= n:
        raise StabcapError(f"need 0 <= dim <= n, got dim={dim}, n={n}")
    if 2 * n > 62:
        raise StabcapError("sampler supports n <= 31")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    steps = max(4 * n * n, 16) if steps is None else steps
    basis = [1 << (n - 1 - i) for i in range(dim)]
    hs = rng.integers(0, 1 << (2 * n), size=steps, dtype=np.int64).tolist()
    for h in hs:
        basis = [x ^ h if symplectic_packed(x, h, n) else x for x in basis]
    return SymplecticSubspace.from_packed(gf2.rref(basis), n)


def find_code_with_distance(
    n: int,
    k: int,
    d: int,
    seed: int = 0,
    max_tries: int = 20_000,
    full_census_max_n: int = 4,
) -> SymplecticSubspace | None:
    """A self-orthogonal ``(n-k)``-dim subspace whose code has distance ``>= d``.

    Scans the full census when ``n <= full_census_max_n``; otherwise draws uniform
    samples from the same family.  Returns ``None`` if nothing is found.
    """

    def good(space: SymplecticSubspace) -> bool:
        dist = minimum_distance(make_code(space, k))
        return dist is None or dist >= d

    if n <= full_census_max_n:
        for space in enumerate_self_orthogonal_f2(n, n - k):
            if good(space):
                return space
        return None
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        space = sample_uniform_self_orthogonal(n, n - k, rng)
        if good(space):
            return space
    return None


@dataclass(frozen=True)
class GVSearchRecord:
    n: int
    k: int
    d: int
    lhs: Fraction
    found: bool
    distance: int | None


def gv_sufficiency_search(n_max: int = 5, seed: int = 0) -> list[GVSearchRecord]:
    """For every ``(n, k, d)`` with ``n <= n_max`` where the general GV condition holds,
    search for a code of distance ``>= d``."""
    out = []
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            for d in range(1, n + 2):
                res = gv_bound_general(n, k, d)
                if not res.holds:
                    break
                space = find_code_with_distance(n, k, d, seed=seed)
                dist = minimum_distance(make_code(space, k)) if space is not None else None
                out.append(GVSearchRecord(n, k, d, res.lhs, space is not None, dist))
    return out


@dataclass(frozen=True)
class BnRow:
    v: int
    weight: int
    bn: int
    rhs: int


def bn_chain(n: int, k: int, budget: int = MAX_SUBSPACES) -> list[BnRow]:
    """Exact ``#B_n(M)`` against ``sum_{w(M') <= w(M)} #A_n(M^{-1} M')`` for every M != I."""
    census = census_f2(n, n - k, budget)
    bn = np.zeros(4**n, dtype=np.int64)
    for key in census.subspaces:
        code = make_code(SymplecticSubspace.from_packed(key, n), k)
        bn[uncorrectable_words(code).astype(np.int64)] += 1
    an = np.zeros(4**n, dtype=np.int64)
    for v, c in census.per_vector_counts.items():
        an[v] = c
    weights = np.array([weight_packed(v, n) for v in range(4**n)])
    rows = []
    for v in range(1, 4**n):
        w = weights[v]
        partners = np.nonzero(weights <= w)[0]
        rhs = int(an[partners ^ v].sum())
        rows.append(BnRow(v, int(w), int(bn[v]), rhs))
    return rows


def iter_census_codes(census: CensusResult) -> Iterator[SymplecticSubspace]:
    for key in census.subspaces:
        yield SymplecticSubspace.from_packed(key, census.n)
