"""Two-parameter symmetric polynomial oracles and eigenvalue checks.

P_lam(xi; q, h) is produced two independent ways: as the dominance-
triangular eigenvector of the k=1 difference operator at coupling h
(the workhorse oracle), and by Gram-Schmidt against the power-sum
inner product with weight prod (1-q^m)/(1-h^m) (cross-check, small
degrees).  At h = q both collapse to Schur polynomials, for which a
bialternant determinant oracle is also provided.

Eigenvalue bookkeeping: our H_k omits the customary h^{k(k-1)/2}
prefactor, so the locus eigenvalue identity reads
h^{k(k-1)/2} * eps_k = e_k(a).  The locus itself is traversed with the
inverse deformation parameter relative to the documented ratio
direction; eigencheck performs that inversion internally and records
the fitted overall scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .laurent import LaurentPolynomial, VariableRegistry
from .rational import RationalFunction, rf_const, rf_var
from .shift import ShiftOperator
from .trs import TRSFrame, trs_hamiltonian


# -- partitions ----------------------------------------------------------

def is_partition(lam) -> bool:
    lam = tuple(lam)
    return all(isinstance(x, int) and x >= 0 for x in lam) and \
        all(lam[i] >= lam[i + 1] for i in range(len(lam) - 1))


def trim(lam) -> tuple[int, ...]:
    """Canonical key: drop trailing zeros."""
    lam = tuple(lam)
    while lam and lam[-1] == 0:
        lam = lam[:-1]
    return lam


def pad(lam, n: int) -> tuple[int, ...]:
    lam = tuple(lam)
    if len(lam) > n:
        raise ValueError("partition longer than the variable count")
    return lam + (0,) * (n - len(lam))


def partitions_of(k: int, max_len: int | None = None):
    """All partitions of k with at most max_len parts, as trimmed tuples."""
    if max_len is None:
        max_len = k
    out = []

    def rec(rest, bound, prefix):
        if rest == 0:
            out.append(tuple(prefix))
            return
        if len(prefix) == max_len:
            return
        for part in range(min(rest, bound), 0, -1):
            rec(rest - part, part, prefix + [part])

    rec(k, k, [])
    return out


def dominates(lam, mu) -> bool:
    """lam >= mu in dominance order (equal sizes required)."""
    lam, mu = trim(lam), trim(mu)
    if sum(lam) != sum(mu):
        raise ValueError("dominance compares partitions of equal size")
    w = max(len(lam), len(mu))
    lam, mu = pad(lam, w), pad(mu, w)
    a = b = 0
    for x, y in zip(lam, mu):
        a += x
        b += y
        if a < b:
            return False
    return True


def _dominance_key(mu, k: int):
    # lex order on cumulative sums refines dominance
    return tuple(itertools.accumulate(pad(trim(mu), max(k, 1))))


# -- ambient data --------------------------------------------------------

@dataclass
class MacdonaldContext:
    """Shared registry, coordinates, and cached difference operators."""

    n: int
    frame: TRSFrame = field(init=False)
    _hams: dict = field(default_factory=dict, init=False)
    _actions: dict = field(default_factory=dict, init=False)

    def __post_init__(self):
        self.frame = TRSFrame.create("generic", self.n, prefix="xi", t_name="h")

    @property
    def registry(self) -> VariableRegistry:
        return self.frame.registry

    @property
    def xi_indices(self) -> tuple[int, ...]:
        return tuple(self.registry.index(c) for c in self.frame.coords)

    def hamiltonian(self, k: int) -> ShiftOperator:
        if k not in self._hams:
            self._hams[k] = trs_hamiltonian(self.frame, k)
        return self._hams[k]

    def expand_m(self, mu) -> LaurentPolynomial:
        """Monomial symmetric polynomial m_mu in the xi coordinates."""
        e = pad(trim(mu), self.n)
        total = self.registry.zero()
        for perm in set(itertools.permutations(e)):
            total = total + self.registry.monomial(
                1, dict(zip(self.frame.coords, perm)))
        return total

    def action_on_m(self, k: int, mu) -> dict:
        """m-basis column of H_k applied to m_mu."""
        key = (k, trim(mu))
        if key not in self._actions:
            result = self.hamiltonian(k).apply(self.expand_m(mu))
            self._actions[key] = self.to_mbasis(result)
        return self._actions[key]

    def to_mbasis(self, rf: RationalFunction) -> dict:
        """Collect a symmetric polynomial result into m-basis coefficients.

        The denominator must be free of the coordinates; the grouping is
        verified by re-expanding, so a non-symmetric input raises.
        """
        xi_idx = self.xi_indices
        xi_set = set(xi_idx)
        for f, _ in rf.den_factors.values():
            if f.variables() & xi_set:
                raise ValueError("result did not reduce to a polynomial in the coordinates")
        groups: dict[tuple[int, ...], dict] = {}
        w = len(self.registry)
        for e, c in rf.num.padded_terms().items():
            xi_part = tuple(e[i] for i in xi_idx)
            if any(v < 0 for v in xi_part):
                raise ValueError("negative coordinate exponent in a symmetric result")
            rest = tuple(0 if i in xi_set else v for i, v in enumerate(e))
            groups.setdefault(xi_part, {})[rest] = c
        coeffs: dict[tuple[int, ...], RationalFunction] = {}
        for xi_part, terms in groups.items():
            if tuple(sorted(xi_part, reverse=True)) != xi_part:
                continue
            poly = LaurentPolynomial(self.registry, terms)
            coeffs[trim(xi_part)] = RationalFunction(poly, dict(rf.den_factors))._reduced()
        rebuilt = None
        for mu, c in coeffs.items():
            t = c * self.expand_m(mu)
            rebuilt = t if rebuilt is None else rebuilt + t
        if rebuilt is None:
            rebuilt = RationalFunction(self.registry.zero())
        if not (rebuilt - rf).is_zero():
            raise ValueError("input is not symmetric in the coordinates")
        return coeffs


# -- symmetric polynomials in the monomial basis -------------------------

@dataclass
class SymmetricPolynomial:
    """Finite m-basis expansion with rational-function coefficients."""

    n: int
    coeffs: dict                  # trimmed partition -> RationalFunction

    def __post_init__(self):
        self.coeffs = {trim(mu): c for mu, c in self.coeffs.items() if not c.is_zero()}
        sizes = {sum(mu) for mu in self.coeffs}
        if len(sizes) > 1:
            raise ValueError("mixed homogeneous degrees")
        for mu in self.coeffs:
            if len(mu) > self.n:
                raise ValueError("partition longer than the variable count")

    def degree(self) -> int:
        return sum(next(iter(self.coeffs))) if self.coeffs else 0

    def expand(self, ctx: MacdonaldContext) -> RationalFunction:
        if ctx.n != self.n:
            raise ValueError("variable count mismatch")
        out = RationalFunction(ctx.registry.zero())
        for mu, c in self.coeffs.items():
            out = out + c * ctx.expand_m(mu)
        return out

    def map_coefficients(self, fn) -> "SymmetricPolynomial":
        return SymmetricPolynomial(self.n, {mu: fn(c) for mu, c in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, SymmetricPolynomial):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        for mu in keys:
            a = self.coeffs.get(mu)
            b = other.coeffs.get(mu)
            if a is None or b is None:
                return False
            if not (a - b).is_zero():
                return False
        return True


# -- oracle 1: triangular eigen-solve ------------------------------------

def macdonald_oracle(lam, n: int, ctx: MacdonaldContext | None = None) -> SymmetricPolynomial:
    """P_lam normalized with m_lam coefficient 1.

    Unique dominance-triangular eigenvector of the k=1 operator at
    coupling h; solved by back-substitution down the dominance order,
    exactly in (q, h).
    """
    lam = trim(lam)
    if not is_partition(lam):
        raise ValueError("not a partition")
    if len(lam) > n:
        raise ValueError("partition longer than the variable count")
    if ctx is None:
        ctx = MacdonaldContext(n)
    k = sum(lam)
    supp = [mu for mu in partitions_of(k, max_len=n) if dominates(lam, mu)]
    supp.sort(key=lambda mu: _dominance_key(mu, k), reverse=True)
    assert supp and supp[0] == lam
    cols = {mu: ctx.action_on_m(1, mu) for mu in supp}
    eps = cols[lam][lam]
    one = rf_const(ctx.registry, 1)
    c = {lam: one}
    for mu in supp[1:]:
        rhs = RationalFunction(ctx.registry.zero())
        for nu, cv in c.items():
            a = cols[nu].get(mu)
            if a is not None:
                rhs = rhs + a * cv
        c[mu] = rhs / (eps - cols[mu][mu])
    return SymmetricPolynomial(n, c)


# -- oracle 2: Gram-Schmidt against the power-sum pairing ----------------

def _zmu(mu) -> int:
    z = 1
    for part, group in itertools.groupby(mu):
        a = len(list(group))
        z *= part ** a
        for i in range(1, a + 1):
            z *= i
    return z


def _power_sum_transition(k: int):
    """(partition list, matrix T with p_mu = sum_nu T[nu][mu] m_nu, inverse)."""
    parts = partitions_of(k)
    reg = VariableRegistry([f"y{i + 1}" for i in range(k)])
    names = reg.names

    def expand_p(mu):
        prod = reg.one()
        for part in mu:
            prod = prod * sum(
                (reg.var(nm, part) for nm in names), reg.zero())
        return prod

    T = {}
    for mu in parts:
        poly = expand_p(mu)
        col = {}
        for nu in parts:
            col[nu] = poly.padded_terms().get(pad(nu, k), Fraction(0))
        T[mu] = col          # T[mu][nu]: coefficient of m_nu in p_mu
    # invert over exact rationals by Gaussian elimination
    order = parts
    m = len(order)
    A = [[T[order[j]][order[i]] for j in range(m)] for i in range(m)]
    inv = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    for col in range(m):
        piv = next(r for r in range(col, m) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        d = A[col][col]
        A[col] = [x / d for x in A[col]]
        inv[col] = [x / d for x in inv[col]]
        for r in range(m):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    # inv[i][j]: p-coordinate mu_i of m_{mu_j}
    m_to_p = {order[j]: {order[i]: inv[i][j] for i in range(m)} for j in range(m)}
    return parts, m_to_p


def gram_schmidt_oracle(lam, ctx: MacdonaldContext | None = None) -> SymmetricPolynomial:
    """P_lam from orthogonalization in the full ring of |lam| variables.

    Pairing: power sums are orthogonal with norm
    z_mu * prod_i (1-q^{mu_i})/(1-h^{mu_i}).  Intended for small degrees
    as an independent cross-check of the eigen-solve oracle.
    """
    lam = trim(lam)
    k = sum(lam)
    if ctx is None:
        ctx = MacdonaldContext(max(k, 1))
    reg = ctx.registry
    q = rf_var(reg, "q")
    h = rf_var(reg, "h")
    parts, m_to_p = _power_sum_transition(k)
    norms = {}
    for mu in parts:
        w = rf_const(reg, _zmu(mu))
        for part in mu:
            w = w * (1 - q ** part) / (1 - h ** part)
        norms[mu] = w

    def pair(f: dict, g: dict) -> RationalFunction:
        zero = RationalFunction(reg.zero())
        fp = {mu: zero for mu in parts}
        gp = {mu: zero for mu in parts}
        for nu, c in f.items():
            for mu, frac in m_to_p[nu].items():
                if frac:
                    fp[mu] = fp[mu] + frac * c
        for nu, c in g.items():
            for mu, frac in m_to_p[nu].items():
                if frac:
                    gp[mu] = gp[mu] + frac * c
        out = zero
        for mu in parts:
            out = out + fp[mu] * gp[mu] * norms[mu]
        return out

    order = sorted(parts, key=lambda mu: _dominance_key(mu, k))
    one = rf_const(reg, 1)
    basis: list[dict] = []
    target = None
    for mu in order:
        f = {mu: one}
        for g in basis:
            coeff = pair(f, g) / pair(g, g)
            for nu, c in g.items():
                f[nu] = f.get(nu, RationalFunction(reg.zero())) - coeff * c
        basis.append(f)
        if mu == lam:
            target = f
            break
    return SymmetricPolynomial(k if k else 1, target)


# -- oracle 3: bialternant determinant at h = q --------------------------

def schur_oracle(lam, n: int, ctx: MacdonaldContext | None = None) -> SymmetricPolynomial:
    """s_lam as a ratio of alternants, collected in the m basis."""
    lam = trim(lam)
    if len(lam) > n:
        raise ValueError("partition longer than the variable count")
    if ctx is None:
        ctx = MacdonaldContext(n)
    reg = ctx.registry
    full = pad(lam, n)

    def alternant(exps):
        total = reg.zero()
        for perm in itertools.permutations(range(n)):
            sign = 1
            for i in range(n):
                for j in range(i + 1, n):
                    if perm[i] > perm[j]:
                        sign = -sign
            mono = reg.monomial(sign, {
                ctx.frame.coords[i]: exps[perm[i]] for i in range(n)})
            total = total + mono
        return total

    num = alternant([full[j] + n - 1 - j for j in range(n)])
    den = alternant([n - 1 - j for j in range(n)])
    quotient = num.divide_exact(den)
    if quotient is None:
        raise ArithmeticError("alternant ratio failed to divide exactly")
    return SymmetricPolynomial(n, ctx.to_mbasis(RationalFunction(quotient)))


# -- truncation locus and eigenvalue checks ------------------------------

def truncation_locus(lam, ctx: MacdonaldContext | None = None) -> list[RationalFunction]:
    """Consecutive ratios a_{i+1}/a_i = q^{lam_{i+1}-lam_i} * h."""
    lam = tuple(lam)
    if not is_partition(lam):
        raise ValueError("not a partition")
    n = len(lam)
    if ctx is None:
        ctx = MacdonaldContext(max(n, 1))
    reg = ctx.registry
    qi, hi = reg.index("q"), reg.index("h")
    out = []
    for i in range(n - 1):
        mono = LaurentPolynomial(reg, {
            tuple((lam[i + 1] - lam[i]) if j == qi else (1 if j == hi else 0)
                  for j in range(len(reg))): Fraction(1)})
        out.append(RationalFunction(mono))
    return out


def _subset_esym(values: list[RationalFunction], k: int, reg) -> RationalFunction:
    out = RationalFunction(reg.zero())
    for I in itertools.combinations(range(len(values)), k):
        prod = rf_const(reg, 1)
        for i in I:
            prod = prod * values[i]
        out = out + prod
    return out


def _monomial_rf(rf: RationalFunction) -> bool:
    return rf.is_polynomial() and rf.num.is_monomial()


def eigencheck(lam, n: int, k: int, ctx: MacdonaldContext | None = None) -> dict:
    """Exact eigenvector test of H_k at coupling h plus the locus identity.

    Verifies H_k P_lam = eps_k P_lam coefficientwise, then matches
    h^{k(k-1)/2} * eps_k against s^k * e_k(a) where the a_i follow the
    truncation ratios with h inverted and s is the single monomial scale
    fitted from k = 1.
    """
    lam = trim(lam)
    if ctx is None:
        ctx = MacdonaldContext(n)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    reg = ctx.registry
    P = macdonald_oracle(lam, n, ctx)
    action = ctx.to_mbasis(ctx.hamiltonian(k).apply(P.expand(ctx)))
    eps = action.get(lam)
    if eps is None:
        eps = RationalFunction(reg.zero())
    residual = {}
    for mu in set(action) | set(P.coeffs):
        zero = RationalFunction(reg.zero())
        r = action.get(mu, zero) - eps * P.coeffs.get(mu, zero)
        if not r.is_zero():
            residual[mu] = r
    # locus values a_i, h direction inverted, overall scale free
    hi = reg.index("h")
    ratios = truncation_locus(pad(lam, n), ctx)
    # ratio monomials are q^{l_i} h; invert just the h exponent
    flipped = []
    for r in ratios:
        (e, c), = r.num.padded_terms().items()
        e = tuple(-v if j == hi else v for j, v in enumerate(e))
        flipped.append(RationalFunction(LaurentPolynomial(reg, {e: c})))
    a = [rf_const(reg, 1)]
    for r in flipped:
        a.append(a[-1] * r)
    if k == 1:
        eps1 = eps
    else:
        act1 = ctx.to_mbasis(ctx.hamiltonian(1).apply(P.expand(ctx)))
        eps1 = act1[lam]
    scale = eps1 / _subset_esym(a, 1, reg)
    scale_is_monomial = _monomial_rf(scale)
    hpow = rf_var(reg, "h", k * (k - 1) // 2)
    lhs = hpow * eps
    rhs = (scale ** k) * _subset_esym(a, k, reg)
    return {
        "eigenvalue": eps,
        "exact_eigenvector": not residual,
        "residual": residual,
        "scale": scale,
        "scale_is_monomial": scale_is_monomial,
        "locus_match": (lhs - rhs).is_zero(),
    }
