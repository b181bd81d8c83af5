"""Difference operators on a multiplicative quantum torus.

An operator is a finite sum of terms coeff(x) * P^n, where P_i shifts the
i-th coordinate x_i to q * x_i and the coefficients are rational functions
or truncated series.  The torus relation P_i x_j = q^{δ_ij} x_j P_i is
realized by shifting the right coefficient during composition.
"""

from __future__ import annotations

from fractions import Fraction

from .laurent import LaurentPolynomial, VariableRegistry
from .rational import RationalFunction, rf_sum
from .series import TruncatedSeries


def _coeff_is_zero(c) -> bool:
    return c.is_zero()


class ShiftOperator:
    __slots__ = ("registry", "coords", "q_name", "terms", "_coord_indices", "_q_index")

    def __init__(self, registry: VariableRegistry, coords: tuple[str, ...], q_name: str,
                 terms: dict[tuple[int, ...], object]):
        self.registry = registry
        self.coords = tuple(coords)
        self.q_name = q_name
        self.terms = {n: c for n, c in terms.items() if not _coeff_is_zero(c)}
        self._coord_indices = tuple(registry.index(c) for c in self.coords)
        self._q_index = registry.index(q_name)

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, registry, coords, q_name) -> "ShiftOperator":
        return cls(registry, coords, q_name, {})

    @classmethod
    def identity(cls, registry, coords, q_name) -> "ShiftOperator":
        n = (0,) * len(tuple(coords))
        return cls(registry, coords, q_name, {n: RationalFunction(registry.one())})

    @classmethod
    def momentum(cls, registry, coords, q_name, i: int) -> "ShiftOperator":
        """The elementary shift P_i (0-based coordinate index)."""
        coords = tuple(coords)
        n = tuple(1 if j == i else 0 for j in range(len(coords)))
        return cls(registry, coords, q_name, {n: RationalFunction(registry.one())})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "ShiftOperator"):
        if (self.coords, self.q_name) != (other.coords, other.q_name):
            raise ValueError("mismatched coordinate systems")

    def _shift_coeff(self, c, n: tuple[int, ...]):
        return c.q_shift(self._coord_indices, n, self._q_index)

    # -- linear structure ------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ShiftOperator):
            return NotImplemented
        self._check(other)
        out = dict(self.terms)
        for n, c in other.terms.items():
            if n in out:
                out[n] = out[n] + c
            else:
                out[n] = c
        return ShiftOperator(self.registry, self.coords, self.q_name, out)

    def __neg__(self):
        return ShiftOperator(self.registry, self.coords, self.q_name,
                             {n: -c for n, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, ShiftOperator):
            return NotImplemented
        return self + (-other)

    def scale(self, factor) -> "ShiftOperator":
        return ShiftOperator(self.registry, self.coords, self.q_name,
                             {n: c * factor for n, c in self.terms.items()})

    def __mul__(self, other):
        """Composition; scalars act as coefficient scaling."""
        if isinstance(other, (int, Fraction, LaurentPolynomial, RationalFunction)):
            return self.scale(other)
        if not isinstance(other, ShiftOperator):
            return NotImplemented
        return self.compose(other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, LaurentPolynomial, RationalFunction)):
            return self.scale(other)
        return NotImplemented

    # -- algebra ---------------------------------------------------------

    def compose(self, other: "ShiftOperator") -> "ShiftOperator":
        self._check(other)
        bucket: dict[tuple[int, ...], list] = {}
        for m, a in self.terms.items():
            for n, b in other.terms.items():
                k = tuple(x + y for x, y in zip(m, n))
                bucket.setdefault(k, []).append(a * self._shift_coeff(b, m))
        out: dict[tuple[int, ...], object] = {}
        for k, parts in bucket.items():
            if len(parts) == 1:
                out[k] = parts[0]
            elif all(isinstance(c, TruncatedSeries) for c in parts):
                out[k] = TruncatedSeries.sum_list(parts)
            elif all(isinstance(c, RationalFunction) for c in parts):
                out[k] = rf_sum(parts)
            else:
                total = parts[0]
                for c in parts[1:]:
                    total = total + c
                out[k] = total
        return ShiftOperator(self.registry, self.coords, self.q_name, out)

    def commutator(self, other: "ShiftOperator") -> "ShiftOperator":
        return self.compose(other) - other.compose(self)

    def apply(self, f):
        """Act on a polynomial, rational function, or series."""
        if isinstance(f, LaurentPolynomial):
            f = RationalFunction(f)
        out = None
        for n, c in self.terms.items():
            term = c * f.q_shift(self._coord_indices, n, self._q_index)
            out = term if out is None else out + term
        if out is None:
            if isinstance(f, TruncatedSeries):
                return f * 0
            return RationalFunction(self.registry.zero())
        return out

    def rescale_momenta(self, factors) -> "ShiftOperator":
        """Conjugate-free momentum gauge P_i -> factors[i] * P_i.

        Each factor must be an invertible (monomial) rational function; a
        term with shift vector n picks up Π_i factors[i]^{n_i}.
        """
        out = {}
        for n, c in self.terms.items():
            for i, k in enumerate(n):
                if k:
                    c = c * (factors[i] ** k)
            out[n] = c
        return ShiftOperator(self.registry, self.coords, self.q_name, out)

    def map_coefficients(self, fn) -> "ShiftOperator":
        return ShiftOperator(self.registry, self.coords, self.q_name,
                             {n: fn(c) for n, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, ShiftOperator):
            return NotImplemented
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        for n in keys:
            a = self.terms.get(n)
            b = other.terms.get(n)
            if a is None:
                a = -b + b
            if b is None:
                b = -a + a
            if not (a - b).is_zero():
                return False
        return True

    def __hash__(self):
        raise TypeError("ShiftOperator is not hashable")

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for n in sorted(self.terms):
            mon = "*".join(
                (f"P[{self.coords[i]}]" if k == 1 else f"P[{self.coords[i]}]^{k}")
                for i, k in enumerate(n) if k
            ) or "1"
            parts.append(f"({self.terms[n]!r})*{mon}")
        return " + ".join(parts)
