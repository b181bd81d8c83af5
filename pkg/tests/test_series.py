import random
from fractions import Fraction

import pytest

from operlab.laurent import VariableRegistry
from operlab.rational import RationalFunction, rf_const, rf_var
from operlab.series import TruncatedSeries

from test_laurent import random_poly


def random_series(rng, reg, svars, caps, invertible=False):
    coeffs = {}
    for _ in range(rng.randrange(1, 6)):
        e = tuple(rng.randint(0, c) for c in caps)
        p = random_poly(rng, reg, nterms=3, deg=2)
        if not p.is_zero():
            coeffs[e] = RationalFunction(p)
    if invertible:
        coeffs[(0,) * len(svars)] = rf_const(reg, rng.randint(1, 5))
    return TruncatedSeries(reg, svars, caps, coeffs)


def test_caps_enforced():
    reg = VariableRegistry("x")
    s = TruncatedSeries(reg, ("w",), (2,), {(3,): rf_const(reg, 1), (1,): rf_const(reg, 2)})
    assert (3,) not in s.coeffs and s.coefficient((1,)) == rf_const(reg, 2)


def test_mul_caps_take_min():
    reg = VariableRegistry("x")
    a = TruncatedSeries.from_scalar(reg, ("w",), (4,), 1)
    b = TruncatedSeries.from_scalar(reg, ("w",), (2,), 1)
    assert (a * b).caps == (2,)
    assert (a + b).caps == (2,)


def test_geometric_inverse():
    reg = VariableRegistry("x")
    one = rf_const(reg, 1)
    s = TruncatedSeries(reg, ("w",), (2,), {(0,): one, (1,): -one})
    inv = s.invert()
    for k in range(3):
        assert inv.coefficient((k,)) == one


def test_neumann_one_term():
    reg = VariableRegistry("x")
    c = rf_var(reg, "x") + 2
    d = rf_var(reg, "x") - 1
    s = TruncatedSeries(reg, ("w",), (1,), {(0,): c, (1,): d})
    inv = s.invert()
    assert inv.coefficient((0,)) == c.inverse()
    assert inv.coefficient((1,)) == -(c ** -2) * d


def test_invert_round_trip_random():
    rng = random.Random(31337)
    reg = VariableRegistry("x y")
    one = TruncatedSeries.from_scalar(reg, ("p", "w"), (2, 2), 1)
    for _ in range(50):
        s = random_series(rng, reg, ("p", "w"), (2, 2), invertible=True)
        assert s * s.invert() == one


def test_invert_requires_unit():
    reg = VariableRegistry("x")
    s = TruncatedSeries(reg, ("w",), (2,), {(1,): rf_const(reg, 1)})
    with pytest.raises(ZeroDivisionError):
        s.invert()


def test_mismatched_svars_rejected():
    reg = VariableRegistry("x")
    a = TruncatedSeries.from_scalar(reg, ("w",), (1,), 1)
    b = TruncatedSeries.from_scalar(reg, ("p",), (1,), 1)
    with pytest.raises(ValueError):
        a + b


def test_evaluate():
    reg = VariableRegistry("x")
    s = TruncatedSeries(reg, ("w",), (2,), {
        (0,): rf_var(reg, "x"), (2,): rf_const(reg, 3)})
    v = s.evaluate({"x": 2.0}, {"w": 0.5})
    assert abs(v - (2.0 + 3 * 0.25)) < 1e-12
