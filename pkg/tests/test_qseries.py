import random

import pytest

from operlab.laurent import VariableRegistry
from operlab.rational import RationalFunction, rf_const, rf_var
from operlab.qseries import q_pochhammer, theta_expand


def test_pochhammer_small():
    reg = VariableRegistry("q x")
    x = reg.var("x")
    one = rf_const(reg, 1)
    q = rf_var(reg, "q")
    xr = RationalFunction(x)
    assert q_pochhammer(x, reg, "q", 0) == one
    assert q_pochhammer(x, reg, "q", 2) == (one - xr) * (one - q * xr)
    assert q_pochhammer(x, reg, "q", -1) == (one - xr * q ** -1).inverse()


def test_pochhammer_recursion():
    rng = random.Random(5150)
    reg = VariableRegistry("q u v")
    for _ in range(10):
        x = reg.monomial(rng.randint(1, 4), {
            "u": rng.randint(-2, 2), "v": rng.randint(-2, 2)})
        q = rf_var(reg, "q")
        for d in range(-5, 6):
            lhs = q_pochhammer(x, reg, "q", d)
            rhs = (rf_const(reg, 1) - RationalFunction(x) * q ** (d - 1)) \
                * q_pochhammer(x, reg, "q", d - 1)
            assert lhs == rhs, (x, d)


def test_pochhammer_zero_factor_rejected():
    reg = VariableRegistry("q")
    with pytest.raises(ZeroDivisionError):
        q_pochhammer(reg.var("q"), reg, "q", -1)


def test_theta_low_orders():
    reg = VariableRegistry("p x")
    x = reg.var("x")
    one = rf_const(reg, 1)
    xr = RationalFunction(x)
    t0 = theta_expand(x, reg, "p", 0)
    assert t0.coefficient((0,)) == one - xr
    t1 = theta_expand(x, reg, "p", 1)
    assert t1.coefficient((0,)) == one - xr
    assert t1.coefficient((1,)) == -(one - xr) * (xr + xr ** -1)
    assert theta_expand(reg.one(), reg, "p", 4).is_zero()


def test_theta_quasi_periodicity():
    reg = VariableRegistry("p x")
    xr = rf_var(reg, "x")
    for order in range(5):
        lhs = theta_expand(reg.monomial(1, {"p": 1, "x": 1}), reg, "p", order)
        rhs = theta_expand(reg.var("x"), reg, "p", order) * (-(xr ** -1))
        assert lhs == rhs, order


def test_theta_inversion_symmetry():
    reg = VariableRegistry("p x")
    xr = rf_var(reg, "x")
    for order in range(4):
        lhs = theta_expand(reg.var("x", -1), reg, "p", order)
        rhs = theta_expand(reg.var("x"), reg, "p", order) * (-(xr ** -1))
        assert lhs == rhs, order


def test_theta_rejects_nonseries_argument():
    reg = VariableRegistry("p x")
    with pytest.raises(ValueError):
        theta_expand(reg.monomial(1, {"p": -1, "x": 1}), reg, "p", 2)
