"""Sparse multivariate Laurent polynomials over exact rationals.

All symbolic computation in the package bottoms out here: coefficients are
`fractions.Fraction`, exponent vectors are plain int tuples indexed by a
shared :class:`VariableRegistry`.  Values are immutable after construction
and safe to share between threads.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

Scalar = Fraction
ExpVec = tuple[int, ...]


def as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot coerce {type(c).__name__} to an exact rational")


class VariableRegistry:
    """Ordered, append-only list of variable names.

    Exponent positions are stable: adding a variable never re-indexes the
    existing ones, so polynomials created earlier stay valid and are padded
    with zero exponents on demand.
    """

    def __init__(self, names: Iterable[str] | str = ()):
        if isinstance(names, str):
            names = names.split()
        self._names: list[str] = []
        self._index: dict[str, int] = {}
        for n in names:
            self.add(n)

    def add(self, name: str) -> int:
        if name in self._index:
            return self._index[name]
        self._index[name] = len(self._names)
        self._names.append(name)
        return self._index[name]

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def __len__(self) -> int:
        return len(self._names)

    # -- element constructors -------------------------------------------

    def zero(self) -> "LaurentPolynomial":
        return LaurentPolynomial(self, {})

    def const(self, c) -> "LaurentPolynomial":
        c = as_fraction(c)
        if c == 0:
            return self.zero()
        return LaurentPolynomial(self, {(0,) * len(self): c})

    def one(self) -> "LaurentPolynomial":
        return self.const(1)

    def var(self, name: str, power: int = 1) -> "LaurentPolynomial":
        return self.monomial(1, {name: power})

    def monomial(self, coeff, powers: Mapping[str, int]) -> "LaurentPolynomial":
        coeff = as_fraction(coeff)
        if coeff == 0:
            return self.zero()
        e = [0] * len(self)
        for name, p in powers.items():
            e[self.index(name)] += p
        return LaurentPolynomial(self, {tuple(e): coeff})


def _pad(exp: ExpVec, width: int) -> ExpVec:
    if len(exp) == width:
        return exp
    return exp + (0,) * (width - len(exp))


class LaurentPolynomial:
    """Map from integer exponent vectors (possibly negative) to rationals."""

    __slots__ = ("registry", "terms", "_key", "_img")

    def __init__(self, registry: VariableRegistry, terms: dict[ExpVec, Fraction]):
        self.registry = registry
        self.terms = {e: c for e, c in terms.items() if c != 0}
        self._key = None
        self._img = None

    # -- basic predicates ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_one(self) -> bool:
        return self.is_constant() and self.constant() == 1

    def constant(self) -> Fraction:
        """Value if constant; the coefficient of the zero exponent otherwise."""
        w = len(self.registry)
        return self.terms.get((0,) * w, Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- structural helpers ---------------------------------------------

    def _width(self) -> int:
        return len(next(iter(self.terms))) if self.terms else len(self.registry)

    def padded_terms(self) -> dict[ExpVec, Fraction]:
        w = len(self.registry)
        if all(len(e) == w for e in self.terms):
            return self.terms
        return {_pad(e, w): c for e, c in self.terms.items()}

    def key(self):
        """Hashable identity used for denominator-factor bookkeeping."""
        if self._key is None:
            self._key = frozenset(self.padded_terms().items())
        return self._key

    def leading(self) -> tuple[ExpVec, Fraction]:
        """Leading term under graded lexicographic order on the registry."""
        e = max(self.padded_terms(), key=lambda v: (sum(v), v))
        return e, self.padded_terms()[e]

    def monomial_content(self) -> ExpVec:
        """Componentwise minimum exponent over all terms."""
        it = iter(self.padded_terms())
        first = next(it)
        lo = list(first)
        for e in it:
            for i, v in enumerate(e):
                if v < lo[i]:
                    lo[i] = v
        return tuple(lo)

    def variables(self) -> set[int]:
        used = set()
        for e in self.terms:
            for i, v in enumerate(e):
                if v:
                    used.add(i)
        return used

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "LaurentPolynomial | None":
        if isinstance(other, LaurentPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return self.registry.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.padded_terms(), other.padded_terms()
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for e, c in b.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPolynomial(self.registry, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(self.registry, {e: -c for e, c in self.terms.items()})

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
            c = as_fraction(other)
            if c == 0:
                return self.registry.zero()
            return LaurentPolynomial(self.registry, {e: c * v for e, v in self.terms.items()})
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        a, b = self.padded_terms(), other.padded_terms()
        if not a or not b:
            return self.registry.zero()
        if len(a) < len(b):
            a, b = b, a
        out: dict[ExpVec, Fraction] = {}
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(e, Fraction(0)) + ca * cb
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return LaurentPolynomial(self.registry, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if self.is_monomial():
                (e, c), = self.padded_terms().items()
                return LaurentPolynomial(self.registry, {tuple(n * v for v in e): c ** n})
            raise ValueError("negative powers only for monomials")
        result = self.registry.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.padded_terms() == other.padded_terms()

    def __hash__(self):
        return hash(self.key())

    # -- monomial shifts and substitution --------------------------------

    def mul_monomial(self, coeff: Fraction, exp: ExpVec) -> "LaurentPolynomial":
        w = len(self.registry)
        exp = _pad(exp, w)
        return LaurentPolynomial(
            self.registry,
            {tuple(a + b for a, b in zip(_pad(e, w), exp)): c * coeff for e, c in self.terms.items()},
        )

    def q_shift(self, coord_indices: tuple[int, ...], shift: tuple[int, ...], q_index: int) -> "LaurentPolynomial":
        """Substitute x_i -> q^{shift_i} x_i for each coordinate index."""
        if not any(shift):
            return self
        out: dict[ExpVec, Fraction] = {}
        w = len(self.registry)
        for e, c in self.padded_terms().items():
            dq = sum(m * e[i] for i, m in zip(coord_indices, shift))
            if dq:
                e = e[:q_index] + (e[q_index] + dq,) + e[q_index + 1:]
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPolynomial(self.registry, out)

    def subs_monomial(self, var_index: int, coeff, exp: Mapping[int, int] | ExpVec) -> "LaurentPolynomial":
        """Substitute one variable by coeff times a monomial in the others."""
        coeff = as_fraction(coeff)
        w = len(self.registry)
        if isinstance(exp, Mapping):
            ev = [0] * w
            for i, p in exp.items():
                ev[i] += p
            exp = tuple(ev)
        else:
            exp = _pad(tuple(exp), w)
        if exp[var_index] != 0:
            raise ValueError("substitution monomial must not contain the substituted variable")
        out: dict[ExpVec, Fraction] = {}
        for e, c in self.padded_terms().items():
            k = e[var_index]
            if k:
                if coeff == 0:
                    if k > 0:
                        continue
                    raise ZeroDivisionError("substituting 0 into a negative power")
                c = c * coeff ** k
                e = tuple((0 if i == var_index else v) + k * exp[i] for i, v in enumerate(e))
            ne = out.get(e, Fraction(0)) + c
            if ne:
                out[e] = ne
            else:
                out.pop(e, None)
        return LaurentPolynomial(self.registry, out)

    # -- division --------------------------------------------------------

    def strip_content(self) -> tuple["LaurentPolynomial", ExpVec]:
        """Factor out the monomial content; returns (stripped, content)."""
        if self.is_zero():
            return self, (0,) * len(self.registry)
        content = self.monomial_content()
        if not any(content):
            return self, content
        stripped = LaurentPolynomial(
            self.registry,
            {tuple(a - b for a, b in zip(e, content)): c for e, c in self.padded_terms().items()},
        )
        return stripped, content

    def divide_exact(self, divisor: "LaurentPolynomial") -> "LaurentPolynomial | None":
        """Exact division; None if the divisor does not divide evenly.

        Both operands are reduced to honest polynomials by content stripping
        first, so Laurent inputs are fine.
        """
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero():
            return self
        # the image pre-filter only pays off once full division gets costly
        if (len(self.terms) > 48 and not divisor.is_monomial()
                and not _image_divides(self, divisor)):
            return None
        a, ca = self.strip_content()
        b, cb = divisor.strip_content()
        if divisor.is_monomial():
            (e, c), = b.padded_terms().items()  # e == 0 after stripping
            q = a * (1 / c)
        else:
            q = _poly_divide(a, b)
            if q is None:
                return None
        shift = tuple(x - y for x, y in zip(_pad(ca, len(self.registry)), _pad(cb, len(self.registry))))
        if any(shift):
            q = q.mul_monomial(Fraction(1), shift)
        return q

    # -- evaluation and display ------------------------------------------

    def evaluate(self, values: Mapping[str, complex]) -> complex:
        reg = self.registry
        idx_vals = {reg.index(k): v for k, v in values.items()}
        total = 0j
        for e, c in self.padded_terms().items():
            term = complex(c)
            for i, p in enumerate(e):
                if p:
                    term *= idx_vals[i] ** p
            total += term
        return total

    def __repr__(self):
        if self.is_zero():
            return "0"
        names = self.registry.names
        parts = []
        for e, c in sorted(self.padded_terms().items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0]))):
            mon = "*".join(
                (names[i] if p == 1 else f"{names[i]}^{p}") for i, p in enumerate(e) if p
            )
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append(f"-{mon}")
            else:
                parts.append(f"{c}*{mon}")
        s = " + ".join(parts).replace("+ -", "- ")
        return s


_SIDON_CACHE: dict[int, tuple[int, ...]] = {}


def _sidon_weights(k: int) -> tuple[int, ...]:
    """First k terms of the greedy sequence with all pairwise sums distinct."""
    if k in _SIDON_CACHE:
        return _SIDON_CACHE[k]
    seq: list[int] = []
    sums: set[int] = set()
    c = 1
    while len(seq) < k:
        trial = {c + s for s in seq} | {2 * c}
        if not (trial & sums):
            sums |= trial
            seq.append(c)
        c += 1
    _SIDON_CACHE[k] = tuple(seq)
    return _SIDON_CACHE[k]


def _uni_image(p: LaurentPolynomial, weights: tuple[int, ...]) -> dict[int, Fraction]:
    """Image under x_i -> t^{w_i}, normalized to lowest degree 0; cached."""
    if p._img is None:
        p._img = {}
    cached = p._img.get(weights)
    if cached is not None:
        return cached
    out: dict[int, Fraction] = {}
    for e, c in p.terms.items():
        d = sum(w * v for w, v in zip(weights, e))
        s = out.get(d, 0) + c
        if s:
            out[d] = s
        else:
            out.pop(d, None)
    if out:
        lo = min(out)
        if lo:
            out = {d - lo: c for d, c in out.items()}
    p._img[weights] = out
    return out


def _uni_divides(num: dict[int, Fraction], den: dict[int, Fraction]) -> bool:
    n = dict(num)
    dd = max(den)
    dc = den[dd]
    while n:
        nd = max(n)
        if nd < dd:
            return False
        q = n[nd] / dc
        for e, c in den.items():
            t = nd - dd + e
            s = n.get(t, 0) - q * c
            if s:
                n[t] = s
            else:
                n.pop(t, None)
    return True


def _image_divides(num: LaurentPolynomial, den: LaurentPolynomial) -> bool:
    """Necessary divisibility test on univariate images x_i -> t^{w_i}.

    Substitution is a ring homomorphism, so Laurent divisibility implies
    divisibility of the (degree-normalized) images; univariate division is
    far cheaper and rejects most failing candidates before the full
    division runs.  Weights form a Sidon set so distinct variable-ratio
    binomials keep distinct image degrees, and two independent weight
    assignments are checked to suppress coincidental image divisibility.
    """
    w1 = _sidon_weights(len(num.registry))
    for weights in (w1, tuple(reversed(w1))):
        d = _uni_image(den, weights)
        if not d:
            continue  # image collapsed; inconclusive
        if not _uni_divides(_uni_image(num, weights), d):
            return False
    return True


def _poly_divide(num: LaurentPolynomial, den: LaurentPolynomial) -> LaurentPolynomial | None:
    """Exact division of content-free polynomials under graded lex order."""
    reg = num.registry
    rem = dict(num.padded_terms())
    de, dc = den.leading()
    dterms = den.padded_terms()
    q: dict[ExpVec, Fraction] = {}
    # bound the number of steps by the remainder's term count growth
    while rem:
        le = max(rem, key=lambda v: (sum(v), v))
        lc = rem[le]
        qe = tuple(a - b for a, b in zip(le, de))
        if any(v < 0 for v in qe):
            return None
        qc = lc / dc
        q[qe] = q.get(qe, Fraction(0)) + qc
        for e, c in dterms.items():
            t = tuple(a + b for a, b in zip(qe, e))
            s = rem.get(t, Fraction(0)) - qc * c
            if s:
                rem[t] = s
            else:
                rem.pop(t, None)
    return LaurentPolynomial(reg, q)
