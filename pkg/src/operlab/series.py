"""Truncated power series in a few designated small variables.

Coefficients are :class:`RationalFunction` values in the remaining
variables.  A series carries its own order caps; binary operations take the
componentwise minimum of the caps, so precision never silently exceeds what
either operand can support.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .laurent import LaurentPolynomial, VariableRegistry
from .rational import RationalFunction, rf_sum


class TruncatedSeries:
    __slots__ = ("registry", "svars", "caps", "coeffs")

    def __init__(self, registry: VariableRegistry, svars: tuple[str, ...],
                 caps: tuple[int, ...], coeffs: dict[tuple[int, ...], RationalFunction]):
        self.registry = registry
        self.svars = svars
        self.caps = caps
        self.coeffs = {}
        for e, c in coeffs.items():
            if any(v < 0 for v in e):
                raise ValueError("series exponents must be nonnegative")
            if all(v <= m for v, m in zip(e, caps)) and not c.is_zero():
                self.coeffs[e] = c

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_scalar(cls, registry: VariableRegistry, svars, caps, value) -> "TruncatedSeries":
        if isinstance(value, LaurentPolynomial):
            value = RationalFunction(value)
        elif isinstance(value, (int, Fraction)):
            value = RationalFunction(registry.const(value))
        return cls(registry, tuple(svars), tuple(caps), {(0,) * len(tuple(svars)): value})

    @classmethod
    def variable(cls, registry: VariableRegistry, svars, caps, name: str) -> "TruncatedSeries":
        svars = tuple(svars)
        e = tuple(1 if s == name else 0 for s in svars)
        if sum(e) != 1:
            raise ValueError(f"{name!r} is not one of the series variables {svars}")
        return cls(registry, svars, tuple(caps), {e: RationalFunction(registry.one())})

    def _like(self, coeffs, caps=None) -> "TruncatedSeries":
        return TruncatedSeries(self.registry, self.svars, self.caps if caps is None else caps, coeffs)

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, exp: tuple[int, ...]) -> RationalFunction:
        return self.coeffs.get(tuple(exp), RationalFunction(self.registry.zero()))

    def constant_term(self) -> RationalFunction:
        return self.coefficient((0,) * len(self.svars))

    def max_order(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "TruncatedSeries | None":
        if isinstance(other, TruncatedSeries):
            if other.svars != self.svars:
                raise ValueError("mismatched series variables")
            return other
        if isinstance(other, (int, Fraction, LaurentPolynomial, RationalFunction)):
            return TruncatedSeries.from_scalar(self.registry, self.svars, self.caps, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        caps = tuple(min(a, b) for a, b in zip(self.caps, other.caps))
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            if e in out:
                out[e] = out[e] + c
            else:
                out[e] = c
        return self._like(out, caps)

    __radd__ = __add__

    @classmethod
    def sum_list(cls, parts) -> "TruncatedSeries":
        """Sum many series, merging coefficient sums once per exponent."""
        parts = list(parts)
        if not parts:
            raise ValueError("sum_list needs at least one part")
        first = parts[0]
        if len(parts) == 1:
            return first
        caps = first.caps
        for p in parts[1:]:
            if p.svars != first.svars:
                raise ValueError("mismatched series variables")
            caps = tuple(min(a, b) for a, b in zip(caps, p.caps))
        bucket: dict[tuple[int, ...], list[RationalFunction]] = {}
        for p in parts:
            for e, c in p.coeffs.items():
                bucket.setdefault(e, []).append(c)
        out = {e: rf_sum(cs) for e, cs in bucket.items()}
        return cls(first.registry, first.svars, caps, out)

    def __neg__(self):
        return self._like({e: -c for e, c in self.coeffs.items()})

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
        if isinstance(other, (int, Fraction, LaurentPolynomial, RationalFunction)):
            return self._like({e: c * other for e, c in self.coeffs.items()})
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if other.svars != self.svars:
            raise ValueError("mismatched series variables")
        caps = tuple(min(a, b) for a, b in zip(self.caps, other.caps))
        bucket: dict[tuple[int, ...], list[RationalFunction]] = {}
        for ea, ca in self.coeffs.items():
            for eb, cb in other.coeffs.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if any(v > m for v, m in zip(e, caps)):
                    continue
                bucket.setdefault(e, []).append(ca * cb)
        out = {e: rf_sum(parts) for e, parts in bucket.items()}
        return self._like(out, caps)

    __rmul__ = __mul__

    def mul_svar_monomial(self, exp: tuple[int, ...], scale=1) -> "TruncatedSeries":
        """Multiply by scale * (series variables)^exp."""
        out = {}
        for e, c in self.coeffs.items():
            ne = tuple(x + y for x, y in zip(e, exp))
            out[ne] = c * scale
        return self._like(out)

    def invert(self) -> "TruncatedSeries":
        """Multiplicative inverse up to the caps via a Neumann series."""
        c0 = self.constant_term()
        if c0.is_zero():
            raise ZeroDivisionError("series constant term is zero")
        c0_inv = c0.inverse()
        # s = c0 (1 - R) with R of positive total degree
        r = -(self * c0_inv - 1)
        total_cap = sum(self.caps)
        acc = TruncatedSeries.from_scalar(self.registry, self.svars, self.caps, 1)
        power = acc
        for _ in range(total_cap):
            power = power * r
            if power.is_zero():
                break
            acc = acc + power
        return acc * c0_inv

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.invert() ** (-n)
        out = TruncatedSeries.from_scalar(self.registry, self.svars, self.caps, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            if n > 1:
                base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        caps = tuple(min(a, b) for a, b in zip(self.caps, other.caps))
        keys = set(self.coeffs) | set(other.coeffs)
        for e in keys:
            if any(v > m for v, m in zip(e, caps)):
                continue
            if not (self.coefficient(e) - other.coefficient(e)).is_zero():
                return False
        return True

    def __hash__(self):
        raise TypeError("TruncatedSeries is not hashable")

    # -- coefficient maps ------------------------------------------------

    def map_coefficients(self, fn) -> "TruncatedSeries":
        return self._like({e: fn(c) for e, c in self.coeffs.items()})

    def q_shift(self, coord_indices, shift, q_index) -> "TruncatedSeries":
        return self.map_coefficients(lambda c: c.q_shift(coord_indices, shift, q_index))

    def subs_monomial(self, var_index: int, coeff, exp) -> "TruncatedSeries":
        return self.map_coefficients(lambda c: c.subs_monomial(var_index, coeff, exp))

    def evaluate(self, values: Mapping[str, complex], svalues: Mapping[str, complex]) -> complex:
        total = 0j
        for e, c in self.coeffs.items():
            term = c.evaluate(values)
            for name, p in zip(self.svars, e):
                if p:
                    term *= svalues[name] ** p
            total += term
        return total

    def __repr__(self):
        if not self.coeffs:
            return "O(caps)"
        parts = []
        for e in sorted(self.coeffs, key=lambda v: (sum(v), v)):
            mon = "*".join(
                (s if p == 1 else f"{s}^{p}") for s, p in zip(self.svars, e) if p
            ) or "1"
            parts.append(f"({self.coeffs[e]!r})*{mon}")
        return " + ".join(parts)
