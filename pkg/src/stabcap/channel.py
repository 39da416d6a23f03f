"""Single-qubit channels in Kraus form and their distance from the identity channel.

Each Kraus operator is expanded in the basis ``(I, X, Z, XZ)``; ``q`` is the total
squared weight on ``I`` and ``p`` the total on the three non-identity elements.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import scipy.linalg

from stabcap.errors import StabcapError

__all__ = [
    "PAULI_LABELS",
    "PAULI_BASIS",
    "TP_TOL",
    "DERIVED_TOL",
    "QuantumChannel",
    "PauliDecomposition",
    "ChannelDistance",
    "decompose_pauli",
    "channel_distance",
    "remix_kraus",
    "apply_channel",
    "apply_channel_all",
    "dilation_unitary",
    "kraus_from_dilation",
    "environment_operators",
    "pauli_component_vectors",
    "weight_class_masses",
    "random_channel",
    "random_unitary",
    "depolarizing",
    "dephasing",
    "amplitude_damping",
    "bitflip",
    "identity_channel",
    "PRESETS",
    "parse_preset",
    "load_channel",
    "channel_to_dict",
]

TP_TOL = 1e-12
DERIVED_TOL = 1e-10

PAULI_LABELS = ("I", "x", "z", "xz")
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_BASIS = np.stack([np.eye(2, dtype=complex), _X, _Z, _X @ _Z])
# column j holds conj(B_j) flattened, so (A flattened) @ this = Tr(B_j^dagger A)
_BASIS_ROWS_H = PAULI_BASIS.reshape(4, 4).conj().T


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    kraus: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[1:] != (2, 2) or k.shape[0] < 1:
            raise StabcapError(f"Kraus operators must be a nonempty list of 2x2 matrices, got shape {k.shape}")
        k.setflags(write=False)
        object.__setattr__(self, "kraus", k)

    @property
    def rank(self) -> int:
        return self.kraus.shape[0]

    def tp_error(self) -> float:
        stacked = self.kraus.reshape(-1, 2)
        s = stacked.conj().T @ stacked
        return float(np.max(np.abs(s - np.eye(2))))

    def is_trace_preserving(self, tol: float = TP_TOL) -> bool:
        return self.tp_error() <= tol

    def padded(self, size: int = 4) -> QuantumChannel:
        if size < self.rank:
            raise StabcapError(f"cannot pad {self.rank} Kraus operators down to {size}")
        pad = np.zeros((size - self.rank, 2, 2), dtype=complex)
        return QuantumChannel(np.concatenate([self.kraus, pad]), self.name)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return np.einsum("iab,bc,idc->ad", self.kraus, rho, self.kraus.conj())


@dataclass(frozen=True, eq=False)
class PauliDecomposition:
    """``coeffs[i, j]`` is the coefficient of ``PAULI_BASIS[j]`` in Kraus operator ``i``."""

    coeffs: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum("ij,jab->iab", self.coeffs, PAULI_BASIS)

    def masses(self) -> np.ndarray:
        """Total squared magnitude per basis element, summed over Kraus operators."""
        return np.sum(np.abs(self.coeffs) ** 2, axis=0)


@dataclass(frozen=True)
class ChannelDistance:
    p: float
    q: float


def decompose_pauli(channel: QuantumChannel) -> PauliDecomposition:
    # basis is orthogonal with Tr(B^dag B) = 2
    coeffs = channel.kraus.reshape(-1, 4) @ _BASIS_ROWS_H / 2
    return PauliDecomposition(coeffs)


def channel_distance(channel: QuantumChannel, tol: float = TP_TOL) -> ChannelDistance:
    err = channel.tp_error()
    if err > tol:
        raise StabcapError(f"channel is not trace preserving (error {err:.3e} > {tol:.0e})")
    m = decompose_pauli(channel).masses()
    q = float(m[0])
    p = float(m[1] + m[2] + m[3])
    if abs(p + q - 1) > tol:
        raise AssertionError(f"p + q = {p + q!r} deviates from 1")
    return ChannelDistance(p, q)


def _is_unitary(v: np.ndarray, tol: float = DERIVED_TOL) -> bool:
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        return False
    return float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[0])))) <= tol


def remix_kraus(channel: QuantumChannel, v: np.ndarray) -> QuantumChannel:
    """Kraus list ``B = V A`` after zero-padding ``A`` to the size of ``V``."""
    v = np.asarray(v, dtype=complex)
    if not _is_unitary(v):
        raise StabcapError("remixing matrix must be unitary")
    a = channel.padded(v.shape[0]).kraus
    return QuantumChannel((v @ a.reshape(-1, 4)).reshape(-1, 2, 2), channel.name)


def apply_channel(channel: QuantumChannel, rho: np.ndarray, qubit: int) -> np.ndarray:
    """Apply the channel to one qubit of an n-qubit density matrix (qubit 0 leftmost)."""
    rho = np.asarray(rho)
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if rho.shape != (dim, dim) or dim != 1 << n or n < 1:
        raise StabcapError(f"density matrix shape {rho.shape} is not 2^n x 2^n")
    if not 0 <= qubit < n:
        raise StabcapError(f"qubit {qubit} out of range for n={n}")
    left, right = 1 << qubit, 1 << (n - qubit - 1)
    t = rho.reshape(left, 2, right, left, 2, right)
    out = np.einsum("iab,xbyzcw,idc->xayzdw", channel.kraus, t, channel.kraus.conj())
    return out.reshape(dim, dim)


def apply_channel_all(channel: QuantumChannel, rho: np.ndarray) -> np.ndarray:
    """``Gamma^{⊗n}(rho)``."""
    n = np.asarray(rho).shape[0].bit_length() - 1
    for q in range(n):
        rho = apply_channel(channel, rho, q)
    return rho


def dilation_unitary(channel: QuantumChannel, env_dim: int = 4, seed: int = 0) -> np.ndarray:
    """A unitary ``U`` on ``H_2 ⊗ H_E`` with ``<e_i|U|e_0> = A_i``.

    Index of ``|s> ⊗ |e>`` is ``s * env_dim + e``.  Columns other than ``|s>|e_0>``
    are an arbitrary orthonormal completion.
    """
    a = channel.padded(env_dim).kraus
    r = env_dim
    u = np.zeros((2 * r, 2 * r), dtype=complex)
    for s in range(2):
        for i in range(r):
            u[np.arange(2) * r + i, s * r] = a[i][:, s]
    fixed = [s * r for s in range(2)]
    rest = [c for c in range(2 * r) if c not in fixed]
    comp = scipy.linalg.null_space(u[:, fixed].conj().T)
    rng = np.random.default_rng(seed)
    mix = random_unitary(comp.shape[1], rng)
    u[:, rest] = comp @ mix
    return u


def kraus_from_dilation(u: np.ndarray, env_dim: int) -> QuantumChannel:
    r = env_dim
    kraus = np.array([[[u[sp * r + i, s * r] for s in range(2)] for sp in range(2)] for i in range(r)])
    return QuantumChannel(kraus)


def environment_operators(u: np.ndarray, env_dim: int) -> np.ndarray:
    """``L_P`` with ``U = sum_P P ⊗ L_P``; shape ``(4, env_dim, env_dim)``."""
    t = u.reshape(2, env_dim, 2, env_dim)
    return np.einsum("jab,aebf->jef", PAULI_BASIS.conj(), t) / 2


def pauli_component_vectors(channel: QuantumChannel) -> np.ndarray:
    """Environment vectors ``L_P|e_0>`` for ``P = I, X, Z, XZ``; shape ``(4, rank)``."""
    return decompose_pauli(channel).coeffs.T.copy()


def weight_class_masses(channel: QuantumChannel, n: int) -> np.ndarray:
    """``sum_{w(M) = i} ||L_M|0_env>||^2`` for ``i = 0..n`` by full ``4^n`` enumeration.

    ``||L_M|0>||^2`` is the product of per-qubit masses of ``M``'s letters.
    """
    m = decompose_pauli(channel).masses()
    letters = np.arange(4**n)
    out = np.zeros(n + 1)
    norms = np.ones(4**n)
    weights = np.zeros(4**n, dtype=np.int64)
    for q in range(n):
        digit = (letters >> (2 * q)) & 3
        norms *= m[digit]
        weights += digit != 0
    np.add.at(out, weights, norms)
    return out


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_channel(rng: np.random.Generator, kraus_count: int = 4) -> QuantumChannel:
    """Random channel from a Haar-like isometry ``C^2 -> C^{2 kraus_count}``."""
    dim = 2 * kraus_count
    z = (rng.standard_normal((dim, 2)) + 1j * rng.standard_normal((dim, 2))) / np.sqrt(2)
    q, _ = np.linalg.qr(z)
    return QuantumChannel(q.reshape(kraus_count, 2, 2), "random")


def _check_prob(x: float, what: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise StabcapError(f"{what} must lie in [0, 1], got {x}")
    return x


def depolarizing(f: float) -> QuantumChannel:
    """Identity with probability ``f``, each of X, Z, XZ with probability ``(1-f)/3``."""
    f = _check_prob(f, "fidelity parameter")
    e = np.sqrt((1 - f) / 3)
    return QuantumChannel(
        np.stack([np.sqrt(f) * PAULI_BASIS[0], e * PAULI_BASIS[1], e * PAULI_BASIS[2], e * PAULI_BASIS[3]]),
        f"depolarizing:{f!r}",
    )


def dephasing(lam: float) -> QuantumChannel:
    lam = _check_prob(lam, "dephasing probability")
    return QuantumChannel(
        np.stack([np.sqrt(1 - lam) * PAULI_BASIS[0], np.sqrt(lam) * PAULI_BASIS[2]]),
        f"dephasing:{lam!r}",
    )


def bitflip(p: float) -> QuantumChannel:
    p = _check_prob(p, "flip probability")
    return QuantumChannel(
        np.stack([np.sqrt(1 - p) * PAULI_BASIS[0], np.sqrt(p) * PAULI_BASIS[1]]),
        f"bitflip:{p!r}",
    )


def amplitude_damping(gamma: float) -> QuantumChannel:
    gamma = _check_prob(gamma, "damping parameter")
    a0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    a1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return QuantumChannel(np.stack([a0, a1]), f"amplitude_damping:{gamma!r}")


def identity_channel() -> QuantumChannel:
    return QuantumChannel(PAULI_BASIS[:1].copy(), "identity")


PRESETS = {
    "depolarizing": depolarizing,
    "dephasing": dephasing,
    "amplitude_damping": amplitude_damping,
    "bitflip": bitflip,
}

_PRESET_RE = re.compile(r"^\s*([a-z_]+)\s*(?:[:(]\s*([^)\s]+)\s*\)?)?\s*$")


def parse_preset(text: str) -> QuantumChannel:
    """``name:param`` or ``name(param)``; ``identity`` takes no parameter."""
    m = _PRESET_RE.match(text)
    if not m:
        raise StabcapError(f"cannot parse channel preset {text!r}")
    name, arg = m.group(1), m.group(2)
    if name == "identity" and arg is None:
        return identity_channel()
    if name not in PRESETS:
        raise StabcapError(f"unknown channel preset {name!r}; known: {sorted(PRESETS) + ['identity']}")
    if arg is None:
        raise StabcapError(f"preset {name!r} needs a parameter")
    try:
        value = float(arg)
    except ValueError:
        raise StabcapError(f"bad parameter {arg!r} for preset {name!r}") from None
    return PRESETS[name](value)


def _entry(x: Any) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise StabcapError(f"complex entries are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)):
        return complex(x)
    raise StabcapError(f"bad matrix entry {x!r}")


def _channel_from_dict(data: dict[str, Any]) -> QuantumChannel:
    if "preset" in data:
        return parse_preset(str(data["preset"]))
    if "kraus" not in data:
        raise StabcapError("channel JSON needs a 'kraus' or 'preset' key")
    mats = []
    kraus = data["kraus"]
    if not isinstance(kraus, list) or not kraus:
        raise StabcapError("'kraus' must be a nonempty list of 2x2 matrices")
    for k in kraus:
        if not (
            isinstance(k, list) and len(k) == 2 and all(isinstance(row, list) and len(row) == 2 for row in k)
        ):
            raise StabcapError("each Kraus operator must be a 2x2 row-major matrix")
        mats.append([[_entry(x) for x in row] for row in k])
    return QuantumChannel(np.array(mats, dtype=complex), str(data.get("name", "custom")))


def load_channel(source: str | Path | dict[str, Any] | Sequence[Any]) -> QuantumChannel:
    """Channel from a preset string, a JSON file, a JSON string or a dict."""
    if isinstance(source, dict):
        return _channel_from_dict(source)
    text = str(source)
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and not path.exists():
        return parse_preset(text)
    if path.exists():
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StabcapError(f"malformed channel JSON: {exc}") from None
    if not isinstance(data, dict):
        raise StabcapError("channel JSON must be an object")
    return _channel_from_dict(data)


def channel_to_dict(channel: QuantumChannel) -> dict[str, Any]:
    return {
        "name": channel.name,
        "kraus": [
            [[[float(x.real), float(x.imag)] for x in row] for row in k] for k in channel.kraus
        ],
    }
