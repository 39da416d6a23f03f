from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from stabcap.census import (
    bn_chain,
    census_f2,
    census_f4,
    enumerate_self_orthogonal_f2,
    gv_bound_general,
    gv_bound_linear,
    gv_max_distance,
    isotropic_subspace_count,
    isotropic_vector_count,
    isotropic_vector_count_brute,
    uniform_vector_count,
    sample_uniform_self_orthogonal,
    check_f4_vector_counts,
)
from stabcap.errors import BudgetExceeded, StabcapError
from stabcap.pauli import symplectic_packed


@pytest.mark.parametrize("n,dim", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3), (4, 2)])
def test_census_total_matches_closed_form(n, dim):
    assert census_f2(n, dim).total == isotropic_subspace_count(n, dim)


def test_closed_form_small_values():
    # lines of F_2^{2n}: every nonzero vector is isotropic
    assert isotropic_subspace_count(2, 1) == 15
    assert isotropic_subspace_count(2, 2) == 15
    assert isotropic_subspace_count(1, 1) == 3


def test_enumerated_subspaces_are_self_orthogonal_and_distinct():
    subs = enumerate_self_orthogonal_f2(3, 2)
    assert len({s.key for s in subs}) == len(subs)
    for s in subs:
        assert all(symplectic_packed(u, v, 3) == 0 for u in s.packed for v in s.packed)


def test_census_budget():
    with pytest.raises(BudgetExceeded):
        census_f2(4, 3, budget=100)


def test_uniform_count_equality_n3():
    res = census_f2(3, 2)
    lo, hi = res.count_range()
    assert lo == hi == uniform_vector_count(3, 1, res.total)


def test_isotropic_counts():
    assert [isotropic_vector_count(n) for n in range(1, 5)] == [0, 9, 27, 135]
    assert all(isotropic_vector_count_brute(n) == isotropic_vector_count(n) for n in range(1, 6))
    with pytest.raises(BudgetExceeded):
        isotropic_vector_count_brute(11)


def test_f4_census_closed_under_omega():
    res = census_f4(3, 1)
    assert res.total == 9
    assert census_f4(1, 1).total == 0


def test_f4_vector_count_reports():
    r = check_f4_vector_counts(2, 1)
    assert r.total == 3 and r.max_count == 0 and r.ok
    r = check_f4_vector_counts(3, 1)
    assert r.general_bound == 4 and r.isotropic_bound == 4 and r.anisotropic_bound == 3
    assert r.ok and r.max_count == 3


def test_gv_conditions():
    r = gv_bound_general(5, 1, 2)
    assert r.holds and r.lhs == Fraction(240, 341)
    assert not gv_bound_general(5, 1, 3).holds
    assert gv_max_distance(5, 1) == 2
    with pytest.raises(StabcapError):
        gv_bound_linear(5, 1, 2)


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1)])
def test_uncorrectable_counts_below_chain(n, k):
    assert all(row.bn <= row.rhs for row in bn_chain(n, k))


def test_sampler_self_orthogonal_and_seeded():
    for seed in range(20):
        s = sample_uniform_self_orthogonal(4, 3, seed)
        assert s.dim == 3
        assert all(symplectic_packed(u, v, 4) == 0 for u in s.packed for v in s.packed)
    assert sample_uniform_self_orthogonal(5, 2, 7).key == sample_uniform_self_orthogonal(5, 2, 7).key


def test_sampler_uniform_n2_dim2():
    rng = np.random.default_rng(3)
    lagrangians = [s.key for s in enumerate_self_orthogonal_f2(2, 2)]
    counts = dict.fromkeys(lagrangians, 0)
    for _ in range(3000):
        counts[sample_uniform_self_orthogonal(2, 2, rng).key] += 1
    assert chisquare(list(counts.values())).pvalue > 0.001
