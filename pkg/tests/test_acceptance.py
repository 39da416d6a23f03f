"""Acceptance checks, one test per criterion.

Each test prints a single ``PASS`` / ``FAIL`` line (outside pytest's capture) with the
measured quantity and runtime, then asserts.
"""

import itertools
import math
import time

import numpy as np
import pytest
from scipy.stats import chisquare, unitary_group

from stabcap import gf2
from stabcap.bounds import asymptotic_bound, asymptotic_zero, finite_n_rate, random_coding_majorant
from stabcap.census import (
    census_f2,
    census_f4,
    count_An_M,
    gv_sufficiency_search,
    isotropic_vector_count_brute,
    uniform_vector_count,
    sample_uniform_self_orthogonal,
    check_f4_vector_counts,
)
from stabcap.channel import (
    channel_distance,
    dephasing,
    depolarizing,
    dilation_unitary,
    environment_operators,
    random_channel,
    remix_kraus,
    weight_class_masses,
)
from stabcap.code import build_coset_leaders, preset_code, uncorrectable_words
from stabcap.fidelity import (
    bootstrap_difference_ci,
    bootstrap_mean_ci,
    code_space_basis,
    exact_fidelity,
    logical_basis_state,
    random_code_state,
    random_coding_trial,
)
from stabcap.pauli import Bitvec2n


@pytest.fixture
def verdict(capsys):
    def emit(num, title, ok, detail, elapsed, limit):
        in_time = elapsed < limit
        status = "PASS" if ok and in_time else "FAIL"
        timing = f"{elapsed:.3g}s (limit {limit:g}s)"
        with capsys.disabled():
            print(f"\n[criterion {num:2d}] {status}  {title}: {detail}; {timing}", flush=True)
        assert ok, detail
        assert in_time, f"runtime {elapsed:.3g}s exceeds {limit}s"

    return emit


def test_c01_depolarizing_parameters(verdict):
    worst = 0.0
    calls = 0
    elapsed = 0.0
    for f in (0.0, 0.25, 0.9, 1.0):
        ch = depolarizing(f)
        t = time.perf_counter()
        d = channel_distance(ch)
        elapsed = max(elapsed, time.perf_counter() - t)
        calls += 1
        worst = max(worst, abs(d.p - (1 - f)), abs(d.q - f))
    verdict(1, "depolarizing p = 1-f, q = f", worst <= 1e-12,
            f"max deviation {worst:.2e} over f in {{0, 0.25, 0.9, 1}}", elapsed, 1e-3)


def test_c02_normalization_and_uniqueness(verdict):
    rng = np.random.default_rng(20240601)
    t = time.perf_counter()
    worst_sum = 0.0
    worst_remix = 0.0
    for _ in range(1000):
        ch = random_channel(rng)
        d = channel_distance(ch)
        worst_sum = max(worst_sum, abs(d.p + d.q - 1))
        for u in unitary_group.rvs(4, size=100, random_state=rng):
            worst_remix = max(worst_remix, abs(channel_distance(remix_kraus(ch, u)).p - d.p))
    elapsed = time.perf_counter() - t
    ok = worst_sum <= 1e-12 and worst_remix <= 1e-10
    verdict(2, "p + q = 1 and p invariant under remixing", ok,
            f"max |p+q-1| = {worst_sum:.2e}, max remix drift = {worst_remix:.2e} "
            "(1000 channels x 100 unitaries)", elapsed, 5)


def test_c03_capacity_curve(verdict):
    t = time.perf_counter()
    worst = 0.0
    for f in np.linspace(0.5, 1.0, 201):
        p = channel_distance(depolarizing(f)).p
        e = 1 - f
        h = 0.0 if e in (0.0, 1.0) else -e * math.log2(e) - (1 - e) * math.log2(1 - e)
        worst = max(worst, abs(asymptotic_bound(p) - (1 - h - e * math.log2(3))))
    root = asymptotic_zero()
    elapsed = time.perf_counter() - t
    ok = worst < 1e-12 and abs(root - 0.18929) <= 1e-4
    verdict(3, "hashing-type bound for depolarizing", ok,
            f"max formula deviation {worst:.2e}, zero crossing p* = {root:.6f}", elapsed, 1)


def test_c04_finite_n_convergence(verdict):
    t = time.perf_counter()
    gaps = {}
    for p in (0.01, 0.05, 0.1):
        pt = finite_n_rate(10**4, p + 1e-3, p)
        gaps[p] = abs(pt.rate - asymptotic_bound(p))
    elapsed = time.perf_counter() - t
    detail = ", ".join(f"p={p}: {g:.4f}" for p, g in gaps.items())
    verdict(4, "finite-n rate at n=10^4 near the asymptote", max(gaps.values()) < 0.01,
            f"|finite - asymptotic| = {detail}", elapsed, 60)


def test_c05_uniform_vector_counts(verdict):
    t = time.perf_counter()
    res = census_f2(2, 1)
    counts = [count_An_M(res, Bitvec2n.from_packed(v, 2)) for v in range(1, 16)]
    middle = uniform_vector_count(2, 1, res.total)
    elapsed = time.perf_counter() - t
    ok = res.total == 15 and len(counts) == 15 and set(counts) == {6} and middle == 6
    verdict(5, "per-vector code counts at n=2, k=1", ok,
            f"#A = {res.total}, counts over 15 vectors = {sorted(set(counts))}, middle = {middle}",
            elapsed, 1)


def test_c06_isotropic_counts(verdict):
    t = time.perf_counter()
    got = [isotropic_vector_count_brute(n) for n in range(1, 9)]
    elapsed = time.perf_counter() - t
    expected = [2 ** (2 * n - 1) + (-1) ** n * 2 ** (n - 1) - 1 for n in range(1, 9)]
    verdict(6, "brute-force isotropic vector counts n=1..8", got == expected and got[:4] == [0, 9, 27, 135],
            f"counts {got}", elapsed, 30)


def test_c07_f4_vector_counts(verdict):
    t = time.perf_counter()
    r2 = check_f4_vector_counts(2, 1)
    subs = census_f4(2, 1).subspaces
    self_dual = all(gf2.symplectic_dual(key, 2) == key for key in subs)
    r3 = check_f4_vector_counts(3, 1)
    elapsed = time.perf_counter() - t
    ok = (
        r2.general_bound < 1 and r2.max_count == 0 and len(subs) == 3 and self_dual
        and r3.ok and not r3.violations()
    )
    verdict(7, "F_4 per-vector count bounds", ok,
            f"(2,1): bound {r2.general_bound}, max count {r2.max_count}, {len(subs)} self-dual; "
            f"(3,1): max count {r3.max_count} vs iso {r3.isotropic_bound} / aniso {r3.anisotropic_bound}",
            elapsed, 10)


def test_c08_gv_sufficiency(verdict):
    t = time.perf_counter()
    records = gv_sufficiency_search(5)
    elapsed = time.perf_counter() - t
    bad = [r for r in records if not r.found or (r.distance is not None and r.distance < r.d)]
    verdict(8, "GV condition implies a code exists (n <= 5)", not bad and len(records) > 0,
            f"{len(records)} (n,k,d) triples satisfy the condition, {len(bad)} counterexamples",
            elapsed, 300)


def test_c09_fidelity_bound(verdict):
    t = time.perf_counter()
    code = preset_code("five_qubit")
    unc = uncorrectable_words(code)
    leaders = build_coset_leaders(code)
    basis = code_space_basis(code)
    rng = np.random.default_rng(9)
    worst = math.inf
    checked = 0
    for ch in (depolarizing(0.99), depolarizing(0.999), dephasing(0.01)):
        states = [logical_basis_state(code, x) for x in range(2)]
        states += [random_code_state(code, rng, basis) for _ in range(20)]
        for s in states:
            r = exact_fidelity(code, ch, s, unc, leaders)
            worst = min(worst, r.exact_fidelity - r.vector_bound)
            checked += 1
    elapsed = time.perf_counter() - t
    verdict(9, "exact fidelity >= joint-vector bound on [[5,1,3]]", worst >= -1e-9,
            f"min(F - bound) = {worst:.3e} over {checked} (channel, state) pairs", elapsed, 120)


def test_c10_weight_mass_identity(verdict):
    t = time.perf_counter()
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(5):
        ch = random_channel(rng)
        p = channel_distance(ch).p
        # per-qubit environment vectors L_P|0_env> read off a dilation unitary
        env = environment_operators(dilation_unitary(ch), 4)[:, :, 0]
        for n in range(1, 6):
            by_weight = np.zeros(n + 1)
            for letters in itertools.product(range(4), repeat=n):
                vec = np.ones(1)
                for P in letters:
                    vec = np.kron(vec, env[P])
                by_weight[sum(P != 0 for P in letters)] += np.vdot(vec, vec).real
            fast = weight_class_masses(ch, n)
            for i in range(n + 1):
                law = math.comb(n, i) * p**i * (1 - p) ** (n - i)
                worst = max(worst, abs(by_weight[i] - law), abs(fast[i] - law))
    elapsed = time.perf_counter() - t
    verdict(10, "weight-class mass = binomial law", worst <= 1e-12,
            f"max deviation {worst:.2e} over 5 random channels, n <= 5", elapsed, 30)


def test_c11_random_coding_trend(verdict):
    t = time.perf_counter()
    ch = depolarizing(0.99)
    p = 0.01
    rate, delta, trials = 0.1, 0.2, 200
    stats = {}
    for n in (8, 16):
        k = math.ceil(rate * n)
        stats[n] = random_coding_trial(n, k, ch, trials, delta, seed=1100 + n)
    lo, _ = bootstrap_difference_ci(stats[8].masses, stats[16].masses, seed=11)
    below = {}
    parts = []
    for n, s in stats.items():
        _, hi = bootstrap_mean_ci(s.masses, seed=n)
        maj = random_coding_majorant(n, s.k, delta, p)
        below[n] = hi < maj and s.mean <= s.worst
        parts.append(f"n={n} k={s.k}: mean {s.mean:.5f} (95% upper {hi:.5f}) < majorant {maj:.5f}")
    elapsed = time.perf_counter() - t
    ok = lo > 0 and all(below.values())
    verdict(11, "random-code truncated mass decreases and stays under the majorant", ok,
            "; ".join(parts) + f"; 95% lower bound on mean(8) - mean(16) = {lo:.5f}", elapsed, 600)


def test_c12_sampler_uniformity(verdict):
    t = time.perf_counter()
    lines = census_f2(2, 1).subspaces
    counts = dict.fromkeys(lines, 0)
    rng = np.random.default_rng(12)
    for _ in range(15000):
        counts[sample_uniform_self_orthogonal(2, 1, rng).key] += 1
    pvalue = chisquare(list(counts.values())).pvalue
    elapsed = time.perf_counter() - t
    verdict(12, "transvection sampler uniform over the 15 lines", len(lines) == 15 and pvalue > 0.01,
            f"chi-square p = {pvalue:.3f}, counts {min(counts.values())}..{max(counts.values())}",
            elapsed, 10)
