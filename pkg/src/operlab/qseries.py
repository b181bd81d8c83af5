"""q-Pochhammer symbols and multiplicative theta expansions.

These are the two special-function primitives everything downstream leans
on: vertex coefficients are ratios of Pochhammer symbols, and the elliptic
Hamiltonians are built from theta factors expanded as truncated series in
the elliptic parameter.
"""

from __future__ import annotations

from fractions import Fraction

from .laurent import LaurentPolynomial, VariableRegistry
from .rational import RationalFunction
from .series import TruncatedSeries


def _as_rf(x, registry: VariableRegistry) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, LaurentPolynomial):
        return RationalFunction(x)
    if isinstance(x, (int, Fraction)):
        return RationalFunction(registry.const(x))
    raise TypeError(f"unsupported argument {type(x).__name__}")


def q_pochhammer(x, registry: VariableRegistry, q_name: str, d: int) -> RationalFunction:
    """(x; q)_d for any integer d.

    d >= 0 gives the product Π_{k=0}^{d-1} (1 - x q^k); negative d is fixed
    by the recursion (x;q)_d = (1 - x q^{d-1}) (x;q)_{d-1}, i.e. the
    reciprocal product 1 / Π_{j=1}^{-d} (1 - x q^{-j}).
    """
    x = _as_rf(x, registry)
    one = RationalFunction(registry.one())
    q = RationalFunction(registry.var(q_name))
    out = one
    if d >= 0:
        qk = one
        for _ in range(d):
            out = out * (one - x * qk)
            qk = qk * q
        return out
    qinv = RationalFunction(registry.var(q_name, -1))
    qk = one
    for _ in range(-d):
        qk = qk * qinv
        factor = one - x * qk
        if factor.is_zero():
            raise ZeroDivisionError("Pochhammer factor vanishes identically at negative index")
        out = out * factor
    return out.inverse()


def _split_p(x: LaurentPolynomial, p_index: int) -> tuple[LaurentPolynomial, int]:
    """Factor a monomial as (p-free monomial, p exponent)."""
    if not x.is_monomial():
        raise ValueError("theta argument must be a monomial")
    (e, c), = x.padded_terms().items()
    a = e[p_index]
    rest = e[:p_index] + (0,) + e[p_index + 1:]
    return LaurentPolynomial(x.registry, {rest: c}), a


def theta_expand(x: LaurentPolynomial, registry: VariableRegistry, p_name: str,
                 order: int, svars=None, caps=None) -> TruncatedSeries:
    """θ_p(x) = Π_{k>=0} (1 - x p^k)(1 - p^{k+1}/x), truncated at p^order.

    The argument may carry p powers (needed for the quasi-periodicity check
    θ(px) = -x^{-1} θ(x)); every factor must still start at a nonnegative
    p power or the product is not a power series and a ValueError is raised.
    Pass svars to embed the result in a larger series variable set.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    p_index = registry.index(p_name)
    m, a = _split_p(x, p_index)
    m_inv = m ** -1
    if svars is None:
        svars = (p_name,)
    svars = tuple(svars)
    sidx = svars.index(p_name)
    if caps is None:
        caps = tuple(order if i == sidx else 0 for i in range(len(svars)))
    caps = tuple(caps)

    def unit(deg: int, coeff: LaurentPolynomial) -> TruncatedSeries:
        # 1 - coeff * p^deg as a series factor
        if deg == 0:
            return TruncatedSeries(registry, svars, caps, {
                (0,) * len(svars): RationalFunction(registry.one() - coeff),
            })
        e = tuple(deg if i == sidx else 0 for i in range(len(svars)))
        return TruncatedSeries(registry, svars, caps, {
            (0,) * len(svars): RationalFunction(registry.one()),
            e: RationalFunction(-coeff),
        })

    out = TruncatedSeries.from_scalar(registry, svars, caps, 1)
    k = 0
    while k + a <= order:
        if k + a < 0:
            raise ValueError("theta factor with negative p power cannot be expanded")
        out = out * unit(k + a, m)
        k += 1
    k = 0
    while k + 1 - a <= order:
        if k + 1 - a < 0:
            raise ValueError("theta factor with negative p power cannot be expanded")
        out = out * unit(k + 1 - a, m_inv)
        k += 1
    return out
