import math

import numpy as np
import pytest

from operlab.rational import RationalFunction, rf_var
from operlab.shift import ShiftOperator
from operlab.trs import (TRSFrame, charpoly_hamiltonians, duality_solve,
                         elementary_symmetric, mirror_check,
                         product_hamiltonians, specialize_coupling,
                         trs_hamiltonian, trs_lax)


def test_hamiltonian_small_cases():
    fr = TRSFrame.create("magnetic", 1)
    H1 = trs_hamiltonian(fr, 1)
    assert H1 == ShiftOperator.momentum(fr.registry, fr.coords, "q", 0)

    fr = TRSFrame.create("magnetic", 2)
    reg = fr.registry
    t = rf_var(reg, "t")
    x1, x2 = rf_var(reg, "xi1"), rf_var(reg, "xi2")
    H1 = trs_hamiltonian(fr, 1)
    expected = ShiftOperator(reg, fr.coords, "q", {
        (1, 0): (t * x1 - x2) / (x1 - x2),
        (0, 1): (t * x2 - x1) / (x2 - x1),
    })
    assert H1 == expected
    # top Hamiltonian is the pure total shift
    H2 = trs_hamiltonian(fr, 2)
    assert H2 == ShiftOperator(reg, fr.coords, "q", {
        (1, 1): RationalFunction(reg.one())})


def test_k_out_of_range():
    fr = TRSFrame.create("magnetic", 2)
    with pytest.raises(ValueError):
        trs_hamiltonian(fr, 3)
    with pytest.raises(ValueError):
        trs_hamiltonian(fr, 0)


@pytest.mark.parametrize("n", [2, 3])
def test_commutativity_generic_coupling(n):
    fr = TRSFrame.create("generic", n)
    Hs = [trs_hamiltonian(fr, k) for k in range(1, n + 1)]
    for i in range(n):
        for j in range(i + 1, n):
            assert Hs[i].commutator(Hs[j]).is_zero()


def test_specialize_coupling():
    fr = TRSFrame.create("magnetic", 2)
    reg = fr.registry
    q = rf_var(reg, "q")
    x1, x2 = rf_var(reg, "xi1"), rf_var(reg, "xi2")
    H1 = specialize_coupling(trs_hamiltonian(fr, 1), fr, -1)
    expected = ShiftOperator(reg, fr.coords, "q", {
        (1, 0): (x1 / q - x2) / (x1 - x2),
        (0, 1): (x2 / q - x1) / (x2 - x1),
    })
    assert H1 == expected


def test_lax_n1():
    T = trs_lax([1.5], [2.5], 1.3)
    assert T.shape == (1, 1) and abs(T[0, 0] - 2.5) < 1e-14


def test_lax_coincident_coordinates_rejected():
    with pytest.raises(ValueError):
        trs_lax([1.0, 1.0], [1.0, 2.0], 1.3)


def test_charpoly_matches_product_formula():
    # coefficients of det(z-T) reproduce the subset-product integrals
    # after removing a q^{k(k-1)/2} normalization
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        xi = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
        p = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
        q = 1.4 + 0.3j
        Hcp = charpoly_hamiltonians(xi, p, q)
        Hm = product_hamiltonians(xi, p, q)
        for k in range(1, n + 1):
            lhs = Hcp[k - 1]
            rhs = q ** (-k * (k - 1) / 2) * Hm[k - 1]
            assert abs(lhs - rhs) / abs(rhs) < 1e-12


def test_charpoly_equals_eigenvalue_symmetrics():
    rng = np.random.default_rng(3)
    n = 3
    xi = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
    p = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
    q = 1.2 + 0.4j
    T = trs_lax(xi, p, q)
    eig = np.linalg.eigvals(T)
    H = charpoly_hamiltonians(xi, p, q)
    e = elementary_symmetric(eig)
    assert np.max(np.abs(H - e)) < 1e-10


def test_q_one_free_limit():
    # at q=1 all Lax coefficients collapse so H_1 = sum of momenta
    rng = np.random.default_rng(5)
    n = 3
    xi = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
    p = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
    H = charpoly_hamiltonians(xi, p, 1.0)
    assert abs(H[0] - np.sum(p)) < 1e-10


def test_duality_n1():
    sols = duality_solve([1.5], [2.5 + 1j], 1.3)
    assert len(sols) == 1
    assert abs(sols[0].momenta[0] - (2.5 + 1j)) < 1e-10


@pytest.mark.parametrize("n", [2, 3])
def test_duality_solution_count(n):
    rng = np.random.default_rng(11)
    xi = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
    a = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
    sols = duality_solve(xi, a, 1.3 + 0.2j)
    assert len(sols) == math.factorial(n)
    assert all(s.residual < 1e-10 for s in sols)


def test_duality_scaling_covariance():
    # scaling a by s maps solutions p -> s p
    rng = np.random.default_rng(13)
    n = 2
    xi = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
    a = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
    q = 1.3 + 0.2j
    s = 1.7 - 0.4j
    sols = duality_solve(xi, a, q)
    scaled = duality_solve(xi, s * a, q)
    got = sorted(scaled, key=lambda c: (c.momenta[0].real, c.momenta[0].imag))
    want = sorted([s * c.momenta for c in sols], key=lambda m: (m[0].real, m[0].imag))
    for g, w in zip(got, want):
        assert np.max(np.abs(g.momenta - w)) < 1e-8


def test_mirror_counts_match():
    rng = np.random.default_rng(17)
    for n in (2, 3):
        xi = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
        a = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
        r = mirror_check(xi, a, 1.3 + 0.2j)
        assert r["match"]
        assert r["magnetic_count"] == math.factorial(n)
        assert r["magnetic_max_residual"] < 1e-10
        assert r["electric_max_residual"] < 1e-10
