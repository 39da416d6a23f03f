import math

import numpy as np
import pytest

from stabcap.channel import (
    PAULI_BASIS,
    amplitude_damping,
    dephasing,
    depolarizing,
    identity_channel,
    random_channel,
)
from stabcap.code import (
    build_coset_leaders,
    logical_operators,
    load_code,
    make_code,
    preset_code,
    uncorrectable_words,
    word_array,
)
from stabcap.errors import BudgetExceeded, StabcapError
from stabcap.fidelity import (
    EncodedState,
    PauliAction,
    best_half_subcode,
    bootstrap_difference_ci,
    code_space_basis,
    exact_fidelity,
    logical_basis_state,
    joint_vector_bound,
    project_and_recover,
    random_code_state,
    random_coding_trial,
    uncorrectable_mass,
)
from stabcap.census import sample_uniform_self_orthogonal
from stabcap.pauli import PauliOperator, iter_words, symplectic_packed


@pytest.fixture(scope="module")
def five():
    return preset_code("five_qubit")


def pure(psi):
    return np.outer(psi, psi.conj())


def test_code_space_dimension(five):
    assert code_space_basis(five).shape == (32, 2)
    assert code_space_basis(preset_code("steane")).shape == (128, 2)


def test_logical_states_orthogonal(five):
    a, b = logical_basis_state(five, 0), logical_basis_state(five, 1)
    assert abs(np.vdot(a.state, b.state)) < 1e-12


def test_encoded_state_validation(five):
    with pytest.raises(StabcapError):
        EncodedState(five, np.eye(32)[0])
    with pytest.raises(StabcapError):
        EncodedState(five, np.ones(8) / math.sqrt(8))
    with pytest.raises(StabcapError):
        logical_basis_state(five, 2)


def test_noiseless_recovery_is_identity(five):
    psi = random_code_state(five, np.random.default_rng(0)).state
    assert np.allclose(project_and_recover(five, pure(psi)), pure(psi), atol=1e-12)


def test_single_error_corrected(five):
    psi = logical_basis_state(five, 0).state
    err = PauliAction(PauliOperator.from_string("XIIII").v.packed, 5)
    rho = pure(err.vec(psi))
    out = project_and_recover(five, rho)
    assert abs(np.vdot(psi, out @ psi).real - 1) < 1e-12


def test_weight_three_logical_error_not_corrected(five):
    # must anticommute with the logical Z that fixes |0>, otherwise it only adds a phase
    _, zbar = logical_operators(five)[0]
    logical = next(
        v for v in iter_words(5, 3, min_weight=3)
        if five.syndrome_int(v) == 0 and symplectic_packed(v, zbar, 5)
    )
    psi = logical_basis_state(five, 0).state
    out = project_and_recover(five, pure(PauliAction(logical, 5).vec(psi)))
    assert np.vdot(psi, out @ psi).real < 1 - 1e-6


def test_recovery_trace_preserving_and_positive(five):
    rng = np.random.default_rng(1)
    for _ in range(3):
        g = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
        rho = g @ g.conj().T
        rho /= np.trace(rho)
        out = project_and_recover(five, rho)
        assert abs(np.trace(out) - 1) < 1e-10
        assert np.min(np.linalg.eigvalsh(out)) > -1e-10


def test_recovery_input_validation(five):
    with pytest.raises(StabcapError):
        project_and_recover(five, np.eye(16) / 16)
    with pytest.raises(StabcapError):
        project_and_recover(five, np.eye(32))


def test_identity_channel(five):
    r = exact_fidelity(five, identity_channel(), logical_basis_state(five, 0))
    assert r.exact_fidelity == pytest.approx(1, abs=1e-12)
    assert r.vector_bound == 1 and r.mass_bound == 1 and r.uncorrectable_mass == 0


def test_single_qubit_dephasing_code():
    code = preset_code("single_z")
    phi = logical_basis_state(code, 0)
    r = exact_fidelity(code, dephasing(0.3), phi)
    assert r.exact_fidelity == pytest.approx(1, abs=1e-14)


def test_odd_y_generator_uses_hermitian_observable():
    code = load_code({"n": 1, "k": 0, "stabilizers": ["Y"]})
    psi = logical_basis_state(code, 0).state
    sigma_y = np.array([[0, -1j], [1j, 0]])
    assert np.allclose(sigma_y @ psi, psi)
    # a Z flip anticommutes with Y and is undone by the leader of syndrome 1
    r = exact_fidelity(code, dephasing(0.4), logical_basis_state(code, 0))
    assert r.exact_fidelity == pytest.approx(1, abs=1e-12)


def test_bounds_and_mass_five_qubit(five):
    p = 0.01
    r = exact_fidelity(five, depolarizing(1 - p), logical_basis_state(five, 0))
    assert r.exact_fidelity >= r.vector_bound - 1e-9
    assert r.exact_fidelity >= r.mass_bound - 1e-9
    cap = sum(math.comb(5, i) * p**i * (1 - p) ** (5 - i) for i in range(2, 6))
    # the code is perfect: every weight >= 2 word is in the set, so this is equality
    assert r.uncorrectable_mass <= cap + 1e-15


@pytest.mark.parametrize("channel", [amplitude_damping(0.1), depolarizing(0.95)], ids=["damping", "depolarizing"])
def test_bound_on_steane(channel):
    code = preset_code("steane")
    unc = uncorrectable_words(code)
    r = exact_fidelity(code, channel, logical_basis_state(code, 1), unc)
    assert r.exact_fidelity >= r.vector_bound - 1e-9


def test_joint_vector_bound_matches_dense_sum(five):
    """Compare against an explicit sum of ``M|psi> ⊗ L_M|0>`` vectors."""
    ch = random_channel(np.random.default_rng(4))
    psi = random_code_state(five, np.random.default_rng(5)).state
    words = uncorrectable_words(five)[:60]
    coeffs = np.array([[np.trace(P.conj().T @ a) / 2 for P in PAULI_BASIS] for a in ch.kraus])
    total = 0
    for v in words.tolist():
        env = np.array([1.0 + 0j])
        for q in range(5):
            x = (v >> (5 + 4 - q)) & 1
            z = (v >> (4 - q)) & 1
            env = np.kron(env, coeffs[:, x + 2 * z])
        total = total + np.kron(PauliOperator.from_packed(v, 5).matrix() @ psi, env)
    assert joint_vector_bound(words, psi, 5, ch) == pytest.approx(1 - np.vdot(total, total).real, abs=1e-12)


def test_mass_over_all_words_is_one():
    ch = random_channel(np.random.default_rng(9))
    assert uncorrectable_mass(word_array(3), 3, ch) == pytest.approx(1, abs=1e-12)


def test_infidelity_quadratic(five):
    ps = [1e-2, 1e-3, 1e-4]
    phi = logical_basis_state(five, 0)
    unc = uncorrectable_words(five)
    leaders = build_coset_leaders(five)
    infid = [1 - exact_fidelity(five, depolarizing(1 - p), phi, unc, leaders).exact_fidelity for p in ps]
    slope = np.polyfit(np.log(ps), np.log(infid), 1)[0]
    assert slope >= 1.9


def test_best_half_subcode(five):
    ch = depolarizing(0.99)
    sub = best_half_subcode(five, ch)
    assert len(sub.kept) == 1
    for j in range(sub.basis.shape[1]):
        r = exact_fidelity(five, ch, EncodedState(five, sub.basis[:, j]))
        assert r.exact_fidelity >= r.mass_bound - 1e-9


def test_dense_budget():
    code = make_code(sample_uniform_self_orthogonal(11, 10, 0), 1)
    with pytest.raises(BudgetExceeded):
        code_space_basis(code)


def test_random_coding_zero_noise():
    st = random_coding_trial(6, 1, identity_channel(), 5, 0.5, seed=1)
    assert np.all(st.masses == 0)


def test_random_coding_seeded_and_worker_independent(monkeypatch):
    ch = depolarizing(0.9)
    a = random_coding_trial(6, 1, ch, 6, 0.4, seed=3)
    monkeypatch.setenv("STABCAP_THREADS", "2")
    b = random_coding_trial(6, 1, ch, 6, 0.4, seed=3)
    assert np.array_equal(a.masses, b.masses)
    assert a.worst >= a.mean
    assert set(a.quantiles()) == {0.05, 0.5, 0.95}


def test_bootstrap_difference_sign():
    rng = np.random.default_rng(0)
    x = rng.normal(1.0, 0.1, 200)
    y = rng.normal(0.5, 0.1, 200)
    lo, hi = bootstrap_difference_ci(x, y)
    assert 0.4 < lo < hi < 0.6
