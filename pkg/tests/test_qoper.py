import math

import numpy as np
import pytest

from operlab.qoper import (QOperData, bethe_configuration, bethe_residual,
                           flag_determinant, oper_report, parg, pdet, peval,
                           pfromroots, pmul, q_polynomials, qq_residual,
                           wronskian_factorization_check)
from operlab.trs import duality_solve


def random_data(n, seed, q=1.3 + 0.2j):
    rng = np.random.default_rng(seed)
    xi = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
    a = rng.uniform(1, 2, n) + 1j * rng.uniform(0.1, 1, n)
    return xi, a, q


def oper_from_first_solution(n, seed):
    xi, a, q = random_data(n, seed)
    sols = duality_solve(xi, a, q)
    return QOperData.from_momenta(xi, sols[0].momenta, a, q), sols


def test_flag_determinant_rank1_formula():
    data, _ = oper_from_first_solution(2, 0)
    xi, q = data.xi, data.q
    s1, s2 = data.sections
    d2 = flag_determinant(data, 2)
    expected = xi[1] * pmul(s1, parg(s2, q)) - xi[0] * pmul(s2, parg(s1, q))
    assert np.max(np.abs(d2 - expected)) < 1e-12


def test_flag_determinant_equal_sections_factor():
    # equal sections leave the twist Vandermonde times s(z)s(qz)
    q = 1.2 + 0.1j
    s = np.array([-1.5, 1.0], dtype=complex)
    data = QOperData(1, [s, s.copy()], [1.1, 2.3], [1.0, 2.0], q)
    d2 = flag_determinant(data, 2)
    expected = (2.3 - 1.1) * pmul(s, parg(s, q))
    assert np.max(np.abs(d2 - expected)) < 1e-12


def test_flag_determinant_q_one_vandermonde():
    # at q=1 the determinant factors through the plain Vandermonde
    xi = np.array([1.3, 2.1, 3.4], dtype=complex)
    p = np.array([0.5, 1.5, 2.5], dtype=complex)
    data = QOperData.from_momenta(xi, p, [1.0, 2.0, 3.0], 1.0)
    d3 = flag_determinant(data, 3)
    vand = np.prod([xi[j] - xi[i] for i in range(3) for j in range(i + 1, 3)])
    expected = vand * pfromroots(p)
    assert np.max(np.abs(d3 - expected)) < 1e-10


def test_k_out_of_range():
    data, _ = oper_from_first_solution(2, 1)
    with pytest.raises(ValueError):
        flag_determinant(data, 3)
    with pytest.raises(ValueError):
        q_polynomials(data, 2)


def test_coincident_twists_rejected():
    with pytest.raises(ValueError):
        QOperData.from_momenta([1.0, 1.0], [1.0, 2.0], [1.0, 2.0], 1.3)


def test_q1_is_last_section():
    data, _ = oper_from_first_solution(3, 2)
    qp, qm = q_polynomials(data, 1)
    assert np.allclose(qp / qp[-1], data.sections[2])
    assert np.allclose(qm / qm[-1], data.sections[1])


def test_row_swap_invariance_up_to_scale():
    # swapping two paired (twist, section) rows inside a minor only rescales it
    data, _ = oper_from_first_solution(3, 3)
    swapped = QOperData(2, [data.sections[0], data.sections[2], data.sections[1]],
                        [data.xi[0], data.xi[2], data.xi[1]], data.lam_roots, data.q)
    qp, _ = q_polynomials(data, 2)
    qp2, _ = q_polynomials(swapped, 2)
    assert np.allclose(qp / qp[-1], qp2 / qp2[-1])


@pytest.mark.parametrize("n", [2, 3])
def test_pipeline_residuals(n):
    xi, a, q = random_data(n, 7)
    sols = duality_solve(xi, a, q)
    assert len(sols) == math.factorial(n)
    for s in sols:
        rep = oper_report(QOperData.from_momenta(xi, s.momenta, a, q))
        assert rep["d_rel_error"] < 1e-9
        assert rep["qq_max_residual"] < 1e-10
        assert rep["bethe_max_residual"] < 1e-9


def test_random_sections_fail_pipeline():
    rng = np.random.default_rng(13)
    xi, a, q = random_data(3, 5)
    secs = [np.array([rng.standard_normal() + 1j * rng.standard_normal(), 1.0])
            for _ in range(3)]
    rep = oper_report(QOperData(2, secs, xi, a, q))
    assert rep["qq_max_residual"] > 1e-4
    assert rep["d_rel_error"] > 1e-4


def test_perturbed_bethe_root_fails():
    data, _ = oper_from_first_solution(2, 11)
    config = bethe_configuration(data)
    base = bethe_residual(config, data.q)
    assert max(np.max(np.abs(v)) for v in base.values()) < 1e-9
    config.roots[1] = config.roots[1] * 1.01
    config.aux = None  # force reconstruction from the perturbed roots
    worse = bethe_residual(config, data.q)
    assert max(np.max(np.abs(v)) for v in worse.values()) > 1e-4


def test_wronskian_factorization():
    data, _ = oper_from_first_solution(3, 17)
    for k in (1, 2):
        rep = wronskian_factorization_check(data, k)
        assert rep["divisible"] and rep["matches_q_plus"]
    top = wronskian_factorization_check(data, 3)
    # top level: quotient by the singularity polynomial is the constant beta
    assert top["divisible"]
    assert len(top["v"]) == 1 and abs(top["v"][0] - 1.0) < 1e-9


def test_gauge_covariance():
    # s -> f*s multiplies D_k by f(z)f(qz)...f(q^{k-1}z); monic part keeps shape
    data, _ = oper_from_first_solution(2, 19)
    f = np.array([0.7 + 0.2j, 1.0], dtype=complex)
    scaled = QOperData(1, [pmul(f, s) for s in data.sections],
                       data.xi, data.lam_roots, data.q)
    d2 = flag_determinant(data, 2)
    d2s = flag_determinant(scaled, 2)
    expected = pmul(d2, pmul(f, parg(f, data.q)))
    assert np.max(np.abs(d2s - expected)) < 1e-10


def test_collided_roots_rejected():
    from operlab.qoper import BetheConfiguration
    config = BetheConfiguration(
        r=1,
        roots={1: np.array([1.5 + 0j, 1.5 + 1e-12j])},
        xi=np.array([1.1, 2.2], dtype=complex),
        node_polys={1: np.array([-1.0, 1.0], dtype=complex)},
    )
    with pytest.raises(ValueError):
        bethe_residual(config, 1.3)
