"""Normalized ratios of Laurent polynomials.

Denominators are kept as multisets of irreducible-in-practice factors (the
binomials arising from difference-operator coefficients), which makes
repeated addition cheap: common denominators are factor-multiset unions
instead of blind products, and cancellation is an exact-division trial per
factor.  Monomial denominators never appear; they fold into the numerator
as negative Laurent exponents.

Canonical form: every stored factor is content-free with leading
coefficient +1 (graded lex); the scalar slack lives in the numerator.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .laurent import LaurentPolynomial, VariableRegistry, as_fraction


def _normalize_factor(p: LaurentPolynomial) -> tuple[LaurentPolynomial, Fraction, tuple[int, ...]]:
    """Strip content and scale to leading coefficient 1.

    Returns (factor, scale, content) with  p = scale * x^content * factor.
    """
    stripped, content = p.strip_content()
    _, lc = stripped.leading()
    if lc != 1:
        stripped = stripped * (1 / lc)
    return stripped, lc, content


class RationalFunction:
    __slots__ = ("num", "den_factors", "_den_cache")

    def __init__(self, num: LaurentPolynomial, den_factors: dict | None = None):
        self.num = num
        # key -> (factor polynomial, multiplicity)
        self.den_factors: dict = {} if den_factors is None else den_factors
        self._den_cache = None
        if num.is_zero():
            self.den_factors = {}

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_poly(cls, p: LaurentPolynomial) -> "RationalFunction":
        return cls(p)

    @classmethod
    def from_ratio(cls, num: LaurentPolynomial, den: LaurentPolynomial) -> "RationalFunction":
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        return cls(num)._div_poly(den)

    @property
    def registry(self) -> VariableRegistry:
        return self.num.registry

    def den(self) -> LaurentPolynomial:
        """Expanded denominator (cached)."""
        if self._den_cache is None:
            d = self.registry.one()
            for f, m in self.den_factors.values():
                for _ in range(m):
                    d = d * f
            self._den_cache = d
        return self._den_cache

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.den_factors

    def as_polynomial(self) -> LaurentPolynomial:
        if self.den_factors:
            raise ValueError("rational function has a nontrivial denominator")
        return self.num

    # -- internal helpers ------------------------------------------------

    def _reduced(self) -> "RationalFunction":
        """Cancel denominator factors that exactly divide the numerator."""
        if not self.den_factors or self.num.is_zero():
            return RationalFunction(self.num)
        num = self.num
        factors = dict(self.den_factors)
        changed = True
        while changed:
            changed = False
            for k, (f, m) in list(factors.items()):
                while m > 0:
                    q = num.divide_exact(f)
                    if q is None:
                        break
                    num = q
                    m -= 1
                    changed = True
                if m == 0:
                    del factors[k]
                else:
                    factors[k] = (f, m)
        return RationalFunction(num, factors)

    def _div_poly(self, den: LaurentPolynomial) -> "RationalFunction":
        factor, scale, content = _normalize_factor(den)
        num = self.num.mul_monomial(1 / scale, tuple(-v for v in content))
        factors = dict(self.den_factors)
        if not factor.is_one():
            k = factor.key()
            f, m = factors.get(k, (factor, 0))
            factors[k] = (f, m + 1)
        return RationalFunction(num, factors)._reduced()

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "RationalFunction | None":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, LaurentPolynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction(self.registry.const(other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        # lcm of factor multisets
        merged: dict = {}
        for k, (f, m) in self.den_factors.items():
            merged[k] = (f, m)
        for k, (f, m) in other.den_factors.items():
            if k in merged:
                merged[k] = (f, max(merged[k][1], m))
            else:
                merged[k] = (f, m)
        a = self.num
        for k, (f, m) in merged.items():
            need = m - (self.den_factors.get(k, (f, 0))[1])
            for _ in range(need):
                a = a * f
        b = other.num
        for k, (f, m) in merged.items():
            need = m - (other.den_factors.get(k, (f, 0))[1])
            for _ in range(need):
                b = b * f
        return RationalFunction(a + b, merged)._reduced()

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, dict(self.den_factors))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalFunction(self.num * other, dict(self.den_factors) if other else None)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return RationalFunction(self.registry.zero())
        merged: dict = dict(self.den_factors)
        for k, (f, m) in other.den_factors.items():
            if k in merged:
                merged[k] = (f, merged[k][1] + m)
            else:
                merged[k] = (f, m)
        return RationalFunction(self.num * other.num, merged)._reduced()

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise ZeroDivisionError("inverting zero")
        num = self.den()
        return RationalFunction(num)._div_poly(self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = RationalFunction(self.registry.one())
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        # cross multiplication avoids any need for gcd normalization
        return self.num * other.den() == other.num * self.den()

    def __hash__(self):
        raise TypeError("RationalFunction is not hashable")

    # -- substitution / shifts ------------------------------------------

    def q_shift(self, coord_indices, shift, q_index) -> "RationalFunction":
        if not any(shift):
            return self
        num = self.num.q_shift(coord_indices, shift, q_index)
        out = RationalFunction(num)
        for f, m in self.den_factors.values():
            g = f.q_shift(coord_indices, shift, q_index)
            for _ in range(m):
                out = out._div_poly(g)
        return out

    def subs_monomial(self, var_index: int, coeff, exp) -> "RationalFunction":
        num = self.num.subs_monomial(var_index, coeff, exp)
        out = RationalFunction(num)
        for f, m in self.den_factors.values():
            g = f.subs_monomial(var_index, coeff, exp)
            if g.is_zero():
                raise ZeroDivisionError("substitution annihilates a denominator factor")
            for _ in range(m):
                out = out._div_poly(g)
        return out

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        v = self.num.evaluate(values)
        for f, m in self.den_factors.values():
            v /= f.evaluate(values) ** m
        return v

    def __repr__(self):
        if self.is_polynomial():
            return repr(self.num)
        return f"({self.num!r}) / ({self.den()!r})"


def rf_sum(parts) -> RationalFunction:
    """Sum many rational functions over one merged denominator.

    Equivalent to repeated addition but merges the factor multisets once
    and reduces once, which matters in long accumulation loops.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("rf_sum needs at least one part")
    parts = [p for p in parts if not p.is_zero()] or parts[:1]
    if len(parts) == 1:
        return parts[0]
    merged: dict = {}
    for p in parts:
        for k, (f, m) in p.den_factors.items():
            if k in merged:
                merged[k] = (f, max(merged[k][1], m))
            else:
                merged[k] = (f, m)
    total = None
    for p in parts:
        a = p.num
        for k, (f, m) in merged.items():
            need = m - p.den_factors.get(k, (f, 0))[1]
            for _ in range(need):
                a = a * f
        total = a if total is None else total + a
    return RationalFunction(total, merged)._reduced()


def rf_const(registry: VariableRegistry, c) -> RationalFunction:
    return RationalFunction(registry.const(as_fraction(c)))


def rf_var(registry: VariableRegistry, name: str, power: int = 1) -> RationalFunction:
    return RationalFunction(registry.var(name, power))
