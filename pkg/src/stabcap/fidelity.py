"""Dense simulation of encode / noise / syndrome measurement / recovery.

Generators are stored as real ordered words ``±X^a Z^b``.  A word with an odd number
of ``XZ`` letters is anti-Hermitian, so measurements use the Hermitian observable
``i^(|a & b| mod 2) X^a Z^b`` with the stored sign; the code space is the joint ``+1``
eigenspace of these observables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.stats

from stabcap.census import sample_uniform_self_orthogonal
from stabcap.channel import QuantumChannel, apply_channel_all, decompose_pauli
from stabcap.code import (
    CosetLeaderTable,
    StabilizerCode,
    build_coset_leaders,
    logical_operators,
    make_code,
    uncorrectable_words,
    _weights,
)
from stabcap.errors import BudgetExceeded, StabcapError
from stabcap.parallel import pmap

__all__ = [
    "MAX_DENSE_QUBITS",
    "EncodedState",
    "FidelityResult",
    "TrialStats",
    "PauliAction",
    "code_projector",
    "code_space_basis",
    "logical_basis_state",
    "random_code_state",
    "project_and_recover",
    "uncorrectable_mass",
    "joint_vector_bound",
    "exact_fidelity",
    "best_half_subcode",
    "truncated_mass",
    "random_coding_trial",
    "bootstrap_mean_ci",
    "bootstrap_difference_ci",
    "sample_uniform_self_orthogonal",
]

MAX_DENSE_QUBITS = 10
_TOL = 1e-10


class PauliAction:
    """``c * X^a Z^b`` as a signed permutation: ``(P psi)[y] = d[y] psi[perm[y]]``."""

    def __init__(self, v: int, n: int, coeff: complex = 1.0):
        idx = np.arange(1 << n, dtype=np.int64)
        a, b = v >> n, v & ((1 << n) - 1)
        self.perm = idx ^ a
        parity = np.bitwise_count(self.perm & b) & 1
        self.diag = coeff * (1.0 - 2.0 * parity)

    @classmethod
    def hermitian(cls, v: int, n: int, sign: int = 1) -> PauliAction:
        a, b = v >> n, v & ((1 << n) - 1)
        return cls(v, n, sign * (1j if (a & b).bit_count() & 1 else 1.0))

    def vec(self, psi: np.ndarray) -> np.ndarray:
        return self.diag * psi[self.perm]

    def left(self, rho: np.ndarray) -> np.ndarray:
        return self.diag[:, None] * rho[self.perm, :]

    def right(self, rho: np.ndarray) -> np.ndarray:
        # (rho P)[x, y] = rho[x, perm[y]] d[perm[y]]; perm is an involution
        return rho[:, self.perm] * self.diag[self.perm][None, :]

    def conj(self, rho: np.ndarray) -> np.ndarray:
        """``P rho P^dagger``."""
        # (X P^dagger)[:, y] = X[:, perm[y]] conj(d[y])
        return self.left(rho)[:, self.perm] * self.diag.conj()[None, :]

    def matrix(self) -> np.ndarray:
        dim = len(self.perm)
        out = np.zeros((dim, dim), dtype=complex)
        out[np.arange(dim), self.perm] = self.diag
        return out


def _check_dense(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise BudgetExceeded(f"dense simulation supports n <= {MAX_DENSE_QUBITS}, got {n}")


def _observables(code: StabilizerCode) -> list[PauliAction]:
    return [PauliAction.hermitian(g, code.n, s) for g, s in zip(code.generators, code.signs)]


def code_projector(code: StabilizerCode) -> np.ndarray:
    _check_dense(code.n)
    dim = 1 << code.n
    proj = np.eye(dim, dtype=complex)
    for h in _observables(code):
        proj = (proj + h.left(proj)) / 2
    return proj


def code_space_basis(code: StabilizerCode) -> np.ndarray:
    """Orthonormal basis of the code space as columns, shape ``(2^n, 2^k)``."""
    basis = scipy.linalg.orth(code_projector(code))
    if basis.shape[1] != 1 << code.k:
        raise AssertionError(f"code space has dim {basis.shape[1]}, expected {1 << code.k}")
    return basis


@dataclass(frozen=True, eq=False)
class EncodedState:
    code: StabilizerCode
    state: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        psi = np.asarray(self.state, dtype=complex)
        if psi.shape != (1 << self.code.n,):
            raise StabcapError(f"state has shape {psi.shape}, expected ({1 << self.code.n},)")
        if abs(np.linalg.norm(psi) - 1) > 1e-12:
            raise StabcapError("encoded state must have unit norm")
        for h in _observables(self.code):
            if np.max(np.abs(h.vec(psi) - psi)) > _TOL:
                raise StabcapError("state is not in the code space")
        object.__setattr__(self, "state", psi)

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k


def logical_basis_state(code: StabilizerCode, x: int) -> EncodedState:
    """Joint eigenstate of the logical Z operators with eigenvalues ``(-1)^(x_j)``.

    ``Z_j`` is the second element of the j-th symplectic pair from
    :func:`logical_operators`; the global phase is fixed by making the largest
    amplitude real and positive.
    """
    if not 0 <= x < 1 << code.k:
        raise StabcapError(f"logical basis index {x} out of range for k={code.k}")
    proj = code_projector(code)
    for j, (_, z) in enumerate(logical_operators(code)):
        bit = (x >> (code.k - 1 - j)) & 1
        zbar = PauliAction.hermitian(z, code.n, -1 if bit else 1)
        proj = (proj + zbar.left(proj)) / 2
    col = proj[:, int(np.argmax(np.linalg.norm(proj, axis=0)))]
    psi = col / np.linalg.norm(col)
    top = psi[np.argmax(np.abs(psi))]
    psi = psi * (abs(top) / top)
    return EncodedState(code, psi, f"logical {x:0{max(code.k, 1)}b}")


def random_code_state(code: StabilizerCode, rng: np.random.Generator, basis: np.ndarray | None = None) -> EncodedState:
    """Haar-random unit vector of the code space."""
    basis = code_space_basis(code) if basis is None else basis
    z = rng.standard_normal(basis.shape[1]) + 1j * rng.standard_normal(basis.shape[1])
    psi = basis @ z
    return EncodedState(code, psi / np.linalg.norm(psi), "random")


def _check_density(rho: np.ndarray, n: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    dim = 1 << n
    if rho.shape != (dim, dim):
        raise StabcapError(f"density matrix has shape {rho.shape}, expected ({dim}, {dim})")
    if np.max(np.abs(rho - rho.conj().T)) > _TOL or abs(np.trace(rho) - 1) > _TOL:
        raise StabcapError("input is not a unit-trace Hermitian matrix")
    return rho


def project_and_recover(
    code: StabilizerCode, rho: np.ndarray, leaders: CosetLeaderTable | None = None
) -> np.ndarray:
    """``sum_s L_s P_s rho P_s L_s^dagger`` over syndromes ``s``.

    ``P_s`` projects onto the joint eigenspace where the j-th observable has
    eigenvalue ``sign_j (-1)^(s_j)``, ``L_s`` is the coset leader of ``s``.
    """
    n = code.n
    _check_dense(n)
    rho = _check_density(rho, n)
    leaders = build_coset_leaders(code) if leaders is None else leaders
    obs = _observables(code)
    out = np.zeros_like(rho)

    def branch(r: np.ndarray, j: int, s: int) -> None:
        if j == len(obs):
            out[...] += PauliAction(leaders.leaders[s], n).conj(r)
            return
        h = obs[j]
        hr = h.left(r)
        rh = h.right(r)
        hrh = h.right(hr)
        for bit, c in ((0, 1.0), (1, -1.0)):
            # (I + cH) r (I + cH) / 4, H Hermitian
            piece = (r + c * hr + c * rh + hrh) / 4
            if np.any(np.abs(piece) > 1e-15):
                branch(piece, j + 1, (s << 1) | bit)

    branch(rho, 0, 0)
    return out


def _letters(words: np.ndarray, n: int) -> np.ndarray:
    """Per-qubit letter index (0=I, 1=X, 2=Z, 3=XZ), qubit 0 first; shape ``(len, n)``."""
    w = words.astype(np.int64)
    shifts = np.arange(n - 1, -1, -1)
    a = (w[:, None] >> (n + shifts)) & 1
    b = (w[:, None] >> shifts) & 1
    return a + 2 * b


def uncorrectable_mass(words: np.ndarray, n: int, channel: QuantumChannel) -> float:
    """``sum_M ||L_M |0_env>||^2`` over the given packed words."""
    if len(words) == 0:
        return 0.0
    m = decompose_pauli(channel).masses()
    return float(np.prod(m[_letters(words, n)], axis=1).sum())


def joint_vector_bound(
    words: np.ndarray, psi: np.ndarray, n: int, channel: QuantumChannel, chunk: int = 256
) -> float:
    """``1 - || sum_M M|psi> ⊗ L_M|0_env> ||^2`` over the given words.

    The environment is the product of one ``rank``-dimensional space per qubit.
    """
    if len(words) == 0:
        return 1.0
    comps = decompose_pauli(channel).coeffs.T  # (4, rank)
    r = comps.shape[1]
    joint = np.zeros((1 << n, r**n), dtype=complex)
    letters = _letters(words, n)
    idx = np.arange(1 << n, dtype=np.int64)
    for start in range(0, len(words), chunk):
        w = words[start : start + chunk].astype(np.int64)
        a = w >> n
        b = w & ((1 << n) - 1)
        perm = idx[None, :] ^ a[:, None]
        sign = 1.0 - 2.0 * (np.bitwise_count(perm & b[:, None]) & 1)
        mpsi = sign * psi[perm]  # rows M|psi>
        env = np.ones((len(w), 1), dtype=complex)
        for q in range(n):
            env = (env[:, :, None] * comps[letters[start : start + chunk, q]][:, None, :]).reshape(len(w), -1)
        joint += mpsi.T @ env
    return float(1.0 - np.vdot(joint, joint).real)


@dataclass(frozen=True)
class FidelityResult:
    """``vector_bound`` is :func:`joint_vector_bound` for the input state, ``mass_bound``
    is ``1 - 2 * uncorrectable_mass`` (state independent)."""

    exact_fidelity: float
    vector_bound: float
    mass_bound: float
    uncorrectable_mass: float
    label: str = ""


def exact_fidelity(
    code: StabilizerCode,
    channel: QuantumChannel,
    phi: EncodedState,
    unc_words: np.ndarray | None = None,
    leaders: CosetLeaderTable | None = None,
) -> FidelityResult:
    """Fidelity of ``phi`` after noise and recovery, with the two uncorrectable-set bounds."""
    if phi.code is not code and phi.n != code.n:
        raise StabcapError("state and code disagree on n")
    n = code.n
    _check_dense(n)
    unc = uncorrectable_words(code) if unc_words is None else unc_words
    psi = phi.state
    rho = np.outer(psi, psi.conj())
    noisy = apply_channel_all(channel, rho)
    out = project_and_recover(code, noisy, leaders)
    f = float(np.vdot(psi, out @ psi).real)
    mass = uncorrectable_mass(unc, n, channel)
    return FidelityResult(
        exact_fidelity=f,
        vector_bound=joint_vector_bound(unc, psi, n, channel),
        mass_bound=1.0 - 2.0 * mass,
        uncorrectable_mass=mass,
        label=phi.label,
    )


@dataclass(frozen=True)
class SubcodeReport:
    """Half-dimensional subcode spanned by the logical basis states with the best bounds."""

    kept: tuple[int, ...]
    basis: np.ndarray = field(repr=False)
    per_state_bound: dict[int, float]


def best_half_subcode(
    code: StabilizerCode, channel: QuantumChannel, unc_words: np.ndarray | None = None
) -> SubcodeReport:
    """Greedy heuristic: rank logical basis states by their per-state bound, keep the top half."""
    if code.k < 1:
        raise StabcapError("a half-dimensional subcode needs k >= 1")
    unc = uncorrectable_words(code) if unc_words is None else unc_words
    states = {x: logical_basis_state(code, x) for x in range(1 << code.k)}
    bounds = {x: joint_vector_bound(unc, s.state, code.n, channel) for x, s in states.items()}
    ranked = sorted(bounds, key=lambda x: (-bounds[x], x))
    kept = tuple(sorted(ranked[: 1 << (code.k - 1)]))
    basis = np.stack([states[x].state for x in kept], axis=1)
    return SubcodeReport(kept, basis, bounds)


def truncated_mass(code: StabilizerCode, channel: QuantumChannel, max_weight: int) -> float:
    """Uncorrectable mass restricted to ``1 <= w(M) <= max_weight``."""
    words = uncorrectable_words(code, max_weight=max_weight)
    words = words[_weights(words, code.n) >= 1]
    return uncorrectable_mass(words, code.n, channel)


@dataclass(frozen=True)
class TrialStats:
    n: int
    k: int
    max_weight: int
    masses: np.ndarray = field(repr=False)

    @property
    def mean(self) -> float:
        return float(np.mean(self.masses))

    @property
    def worst(self) -> float:
        return float(np.max(self.masses))

    def quantiles(self, qs: Sequence[float] = (0.05, 0.5, 0.95)) -> dict[float, float]:
        return {q: float(np.quantile(self.masses, q)) for q in qs}


def _trial(args: tuple[int, int, QuantumChannel, int, np.random.SeedSequence]) -> float:
    n, k, channel, max_weight, ss = args
    space = sample_uniform_self_orthogonal(n, n - k, np.random.default_rng(ss))
    return truncated_mass(make_code(space, k), channel, max_weight)


def random_coding_trial(
    n: int, k: int, channel: QuantumChannel, trials: int, delta: float, seed: int = 0
) -> TrialStats:
    """Truncated uncorrectable mass of ``trials`` uniformly random ``[[n, k]]`` codes.

    Truncation keeps weights ``1..floor(delta n)``.  Trial ``i`` uses the ``i``-th child
    of ``SeedSequence(seed)``, so results do not depend on the worker count.
    """
    if not 0 <= k < n:
        raise StabcapError(f"need 0 <= k < n, got n={n}, k={k}")
    if trials < 1:
        raise StabcapError("need at least one trial")
    if not 0 < delta < 1:
        raise StabcapError(f"delta must lie in (0, 1), got {delta}")
    max_weight = math.floor(delta * n + 1e-9)
    children = np.random.SeedSequence(seed).spawn(trials)
    masses = pmap(_trial, [(n, k, channel, max_weight, ss) for ss in children])
    return TrialStats(n, k, max_weight, np.array(masses))


def bootstrap_mean_ci(
    x: np.ndarray, level: float = 0.95, seed: int = 0, resamples: int = 9999
) -> tuple[float, float]:
    res = scipy.stats.bootstrap(
        (np.asarray(x),), np.mean, confidence_level=level, n_resamples=resamples,
        method="percentile", random_state=np.random.default_rng(seed),
    )
    return float(res.confidence_interval.low), float(res.confidence_interval.high)


def bootstrap_difference_ci(
    x: np.ndarray, y: np.ndarray, level: float = 0.95, seed: int = 0, resamples: int = 9999
) -> tuple[float, float]:
    """Percentile interval for ``mean(x) - mean(y)`` from independent resamples."""

    def diff(a: np.ndarray, b: np.ndarray, axis: int = -1) -> np.ndarray:
        return np.mean(a, axis=axis) - np.mean(b, axis=axis)

    res = scipy.stats.bootstrap(
        (np.asarray(x), np.asarray(y)), diff, confidence_level=level, n_resamples=resamples,
        method="percentile", random_state=np.random.default_rng(seed), vectorized=True,
    )
    return float(res.confidence_interval.low), float(res.confidence_interval.high)
