import numpy as np
import pytest
from hypothesis import given, strategies as st

from stabcap import gf2
from stabcap.errors import StabcapError
from stabcap.pauli import (
    GF4_MUL,
    Bitvec2n,
    GF4Vector,
    PauliOperator,
    g_inverse,
    g_map,
    hermitian_form,
    iter_words,
    omega_times,
    pauli_mul,
    symplectic_form,
    symplectic_packed,
    trace_form_gf4,
)


def vectors(n):
    return st.builds(Bitvec2n, st.integers(0, 2**n - 1), st.integers(0, 2**n - 1), st.just(n))


def paulis(n):
    return st.builds(PauliOperator, st.sampled_from([1, -1]), vectors(n))


def test_symplectic_form_basic():
    x1 = Bitvec2n.from_bits([1, 0], [0, 0])
    z1 = Bitvec2n.from_bits([0, 0], [1, 0])
    z2 = Bitvec2n.from_bits([0, 0], [0, 1])
    assert symplectic_form(x1, z1) == 1
    assert symplectic_form(x1, z2) == 0
    assert str(x1) == "(10|00)"


def test_dimension_mismatch_raises():
    with pytest.raises(StabcapError):
        symplectic_form(Bitvec2n(1, 0, 1), Bitvec2n(1, 0, 2))
    with pytest.raises(StabcapError):
        Bitvec2n.from_bits([1, 0], [1])


@given(vectors(3), vectors(3))
def test_symplectic_alternating(u, v):
    assert symplectic_form(u, u) == 0
    assert symplectic_form(u, v) == symplectic_form(v, u)
    assert symplectic_packed(u.packed, v.packed, 3) == symplectic_form(u, v)


@given(paulis(3), paulis(3))
def test_commutation_matches_symplectic_form(m, n):
    a, b = m.matrix(), n.matrix()
    sign = -1 if symplectic_form(m.v, n.v) else 1
    assert np.allclose(a @ b, sign * b @ a)


@given(paulis(3), paulis(3))
def test_product_matches_matrices(m, n):
    assert np.allclose(pauli_mul(m, n).matrix(), m.matrix() @ n.matrix())


@given(paulis(3), paulis(3), paulis(3))
def test_product_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(paulis(3))
def test_inverse(m):
    assert m * m.inverse() == PauliOperator.identity(3)
    assert np.allclose(m.inverse().matrix(), np.linalg.inv(m.matrix()))


@given(vectors(4))
def test_g_roundtrip_and_weight(v):
    x = g_map(v)
    assert g_inverse(x) == v
    assert sum(e != 0 for e in x.entries) == v.weight


@given(vectors(3), vectors(3))
def test_trace_form_matches_symplectic(u, v):
    assert trace_form_gf4(g_map(u), g_map(v)) == symplectic_form(u, v)


@given(vectors(3))
def test_omega_times_is_field_scaling(v):
    assert g_map(Bitvec2n.from_packed(omega_times(v.packed, 3), 3)) == g_map(v).scale(2)


def test_gf4_field_axioms():
    for x in range(1, 4):
        assert any(GF4_MUL[x][y] == 1 for y in range(1, 4))
    assert GF4_MUL[2][2] == 3 and GF4_MUL[2][3] == 1


def test_hermitian_form_conjugate_linear():
    x = GF4Vector((1, 2, 3))
    y = GF4Vector((2, 2, 0))
    # tau(w x, y) = w^2 tau(x, y)
    assert hermitian_form(x.scale(2), y) == GF4_MUL[3][hermitian_form(x, y)]


def test_string_roundtrip():
    for s in ["XZZXI", "-YIZ", "I"]:
        assert str(PauliOperator.from_string(s)) == s
    assert PauliOperator.from_string("−X").sign == -1
    with pytest.raises(StabcapError):
        PauliOperator.from_string("XQ")


def test_iter_words_order_and_count():
    words = list(iter_words(2))
    assert len(words) == 16 and words[0] == 0
    weights = [((w >> 2) | (w & 3)).bit_count() for w in words]
    assert weights == sorted(weights)
    assert len(list(iter_words(3, max_weight=1))) == 10


def test_gf2_rref_canonical():
    a = gf2.rref([0b1100, 0b0110])
    b = gf2.rref([0b1010, 0b0110])
    assert a == b
    assert gf2.rank([1, 2, 3]) == 2
    ns = gf2.nullspace([0b11], 3)
    assert len(ns) == 2 and all((v & 0b11).bit_count() % 2 == 0 for v in ns)


@given(st.lists(st.integers(1, 2**6 - 1), min_size=1, max_size=3))
def test_symplectic_dual_dimension(rows):
    basis = gf2.rref(rows)
    dual = gf2.symplectic_dual(basis, 3)
    assert len(dual) == 6 - len(basis)
    assert all(symplectic_packed(u, g, 3) == 0 for u in dual for g in basis)
