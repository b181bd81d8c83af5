"""Multi-degree instanton series at flag fixed points.

Coefficients are exact rational functions of (q, h, a_1..a_n); the series
variables z_i = xi_i/xi_{i+1} stay formal.  On a partition-determined
lattice of a-values the series collapses to a symmetric polynomial that
must match the triangular-oracle construction; the same series, suitably
dressed, is annihilated by the electric difference operator order by
order.

Lattice direction: the a-ratios used for truncation are the documented
consecutive ratios with the deformation parameter inverted, the same
global choice as the eigenvalue checks; it is fixed once by the smallest
nontrivial partition and the enumeration that fixes it is kept in
resolve_conventions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .laurent import LaurentPolynomial, VariableRegistry
from .macdonald import MacdonaldContext, macdonald_oracle, pad, trim
from .qseries import q_pochhammer
from .rational import RationalFunction, rf_const, rf_var
from .series import TruncatedSeries


@dataclass(frozen=True)
class FlagFixedPoint:
    """Strictly nested subset chain S_1 c S_2 c ... c S_n = {1..n}."""

    chain: tuple

    def __post_init__(self):
        chain = tuple(tuple(sorted(s)) for s in self.chain)
        object.__setattr__(self, "chain", chain)
        n = len(chain)
        for i, s in enumerate(chain):
            if len(s) != i + 1:
                raise ValueError("level i must contain exactly i elements")
            if len(set(s)) != len(s):
                raise ValueError("duplicate elements in a level")
            if i and not set(chain[i - 1]) <= set(s):
                raise ValueError("levels must be nested")
        if set(chain[-1]) != set(range(1, n + 1)):
            raise ValueError("top level must be {1..n}")

    @property
    def n(self) -> int:
        return len(self.chain)

    @classmethod
    def identity(cls, n: int) -> "FlagFixedPoint":
        return cls(tuple(tuple(range(1, i + 1)) for i in range(1, n + 1)))

    @classmethod
    def from_permutation(cls, perm) -> "FlagFixedPoint":
        perm = tuple(perm)
        return cls(tuple(perm[:i] for i in range(1, len(perm) + 1)))

    def label(self, i: int, j: int) -> int:
        """The a-index assigned to x_{i,j} (both arguments 1-based)."""
        return self.chain[i - 1][j - 1]


@dataclass
class VertexContext:
    """Registry shared with the symmetric-polynomial oracle plus a-variables."""

    n: int
    mac: MacdonaldContext = field(init=False)
    a_names: tuple = field(init=False)
    svars: tuple = field(init=False)
    term_cache: dict = field(default_factory=dict, init=False)

    def __post_init__(self):
        self.mac = MacdonaldContext(self.n)
        self.a_names = tuple(f"a{i + 1}" for i in range(self.n))
        for name in self.a_names:
            self.mac.registry.add(name)
        self.svars = tuple(f"z{i + 1}" for i in range(self.n - 1))

    @property
    def registry(self) -> VariableRegistry:
        return self.mac.registry


def _poch_ratio(ctx: VertexContext, num_arg, den_arg, sub: int) -> RationalFunction | None:
    """(num_arg;q)_sub / (den_arg;q)_sub; None when the denominator blows up.

    A denominator symbol at negative index is an inverse product; when one
    of its factors vanishes identically the whole term contributes zero.
    """
    reg = ctx.registry
    if sub == 0:
        return rf_const(reg, 1)
    num = q_pochhammer(num_arg, reg, "q", sub)
    try:
        den = q_pochhammer(den_arg, reg, "q", sub)
    except ZeroDivisionError:
        return None
    if den.is_zero():
        raise ZeroDivisionError("denominator Pochhammer vanishes at generic parameters")
    return num / den


def _term_coefficient(ctx: VertexContext, fp: FlagFixedPoint, d: dict) -> RationalFunction | None:
    """Coefficient of one degree assignment d[(i,j)]; None if it vanishes."""
    reg = ctx.registry
    n = ctx.n
    q = reg.var("q")
    h = reg.var("h")

    def x(i, j):
        return reg.var(f"a{fp.label(i, j)}")

    def deg(i, j):
        return d[(i, j)] if i < n else 0

    coeff = rf_const(reg, 1)
    for i in range(1, n):
        for j in range(1, i + 1):
            for k in range(1, i + 1):
                sub = deg(i, j) - deg(i, k)
                if sub == 0:
                    continue
                # intra-node ratio oriented k over j; the opposite choice
                # breaks the truncation identity in three variables
                ratio = x(i, k) * x(i, j) ** -1
                r = _poch_ratio(ctx, q * ratio, h * ratio, sub)
                if r is None:
                    return None
                coeff = coeff * r
        for j in range(1, i + 1):
            for k in range(1, i + 2):
                sub = deg(i, j) - deg(i + 1, k)
                if sub == 0:
                    continue
                ratio = x(i + 1, k) * x(i, j) ** -1
                r = _poch_ratio(ctx, h * ratio, q * ratio, sub)
                if r is None:
                    return None
                coeff = coeff * r
        if coeff.is_zero():
            return None
    return coeff


def _node_degrees(i: int, cap: int):
    """All tuples (d_{i,1}..d_{i,i}) with nonnegative entries summing <= cap."""
    for total in range(cap + 1):
        for cuts in itertools.combinations(range(total + i - 1), i - 1):
            parts = []
            prev = -1
            for c in cuts:
                parts.append(c - prev - 1)
                prev = c
            parts.append(total + i - 2 - prev)
            yield tuple(parts)


def _cone_terms(fp: FlagFixedPoint, caps, ctx: VertexContext):
    """Per-assignment list of (z exponent, coefficient), cached per assignment.

    Coefficients are kept one assignment at a time: merging their factored
    denominators early makes the generic sum explode, while consumers that
    specialize first stay cheap.
    """
    n = fp.n
    reg = ctx.registry
    qi, hi = reg.index("q"), reg.index("h")
    terms = []
    per_node = [list(_node_degrees(i, caps[i - 1])) for i in range(1, n)]
    for combo in itertools.product(*per_node):
        key = (fp.chain, combo)
        if key not in ctx.term_cache:
            d = {}
            for i, parts in enumerate(combo, start=1):
                for j, v in enumerate(parts, start=1):
                    d[(i, j)] = v
            c = _term_coefficient(ctx, fp, d)
            if c is not None:
                total = sum(sum(parts) for parts in combo)
                # kinetic weight (q/h)^{d_i} per node
                mono = LaurentPolynomial(reg, {
                    tuple(total if v == qi else (-total if v == hi else 0)
                          for v in range(len(reg))): 1})
                c = c * mono
            ctx.term_cache[key] = c
        c = ctx.term_cache[key]
        if c is None:
            continue
        # the node carrying m of the a-variables couples to z_{n-m}
        terms.append((tuple(sum(parts) for parts in reversed(combo)), c))
    return terms


def vertex_coefficients(fp: FlagFixedPoint, caps, ctx: VertexContext | None = None) -> TruncatedSeries:
    """The degree-graded sum over the nonnegative cone, one z per node."""
    n = fp.n
    if ctx is None:
        ctx = VertexContext(n)
    caps = tuple(caps)
    if len(caps) != n - 1 or any(c < 0 for c in caps):
        raise ValueError("need one nonnegative cap per node")
    reg = ctx.registry
    coeffs: dict[tuple[int, ...], RationalFunction] = {}
    for e, c in _cone_terms(fp, caps, ctx):
        if e in coeffs:
            coeffs[e] = coeffs[e] + c
        else:
            coeffs[e] = c
    return TruncatedSeries(reg, ctx.svars, caps, coeffs)


# -- truncation to the symmetric-polynomial oracle -----------------------

def _locus_sub(c: RationalFunction, lam, ctx: VertexContext) -> RationalFunction:
    """a_i -> q^{lam_i} h^{-(i-1)} u^{(i-1)^2}; u is a regularizer.

    Individual cone terms can have poles exactly on the lattice that
    cancel only in the sum; the auxiliary direction u keeps every term
    finite so the cancellation happens in exact arithmetic, and u -> 1 is
    taken afterwards by the caller.
    """
    reg = ctx.registry
    lam = pad(trim(lam), ctx.n)
    qi, hi = reg.index("q"), reg.index("h")
    ui = reg.add("u")
    for i, name in enumerate(ctx.a_names):
        c = c.subs_monomial(reg.index(name), 1, {qi: lam[i], hi: -i, ui: i * i})
    return c


def _unregularize(c: RationalFunction, ctx: VertexContext) -> RationalFunction:
    """u -> 1; a survivor pole here is genuine and propagates as an error."""
    return c.subs_monomial(ctx.registry.index("u"), 1, {})


def _locus_term_value(fp: FlagFixedPoint, d: dict, n: int, aval, Q: Fraction,
                      H: Fraction, intra_inv: bool = True) -> Fraction:
    """One cone term evaluated at exact rational (q, h, a) on the lattice.

    Pochhammer factors that vanish are counted on each side instead of
    multiplied in: a numerator zero in excess of denominator zeros kills
    the term, the reverse is a pole, and a tie cannot be resolved by
    evaluation alone.
    """
    numv, denv = Fraction(1), Fraction(1)
    num_z = den_z = 0

    def x(i, j):
        return aval[fp.label(i, j) - 1]

    def deg(i, j):
        return d[(i, j)] if i < n else 0

    def mul(xv, m, top):
        nonlocal numv, denv, num_z, den_z
        v, z = Fraction(1), 0
        if m >= 0:
            for s in range(m):
                t = 1 - xv * Q ** s
                if t == 0:
                    z += 1
                else:
                    v *= t
        else:
            top = not top      # negative index is a reciprocal product
            for s in range(1, -m + 1):
                t = 1 - xv * Q ** (-s)
                if t == 0:
                    z += 1
                else:
                    v *= t
        if top:
            numv *= v
            num_z += z
        else:
            denv *= v
            den_z += z

    for i in range(1, n):
        for j in range(1, i + 1):
            for k in range(1, i + 1):
                m = deg(i, j) - deg(i, k)
                if m == 0:
                    continue
                r = x(i, k) / x(i, j) if intra_inv else x(i, j) / x(i, k)
                mul(Q * r, m, True)
                mul(H * r, m, False)
        for j in range(1, i + 1):
            for k in range(1, i + 2):
                m = deg(i, j) - deg(i + 1, k)
                if m == 0:
                    continue
                r = x(i + 1, k) / x(i, j)
                mul(H * r, m, True)
                mul(Q * r, m, False)
    if num_z > den_z:
        return Fraction(0)
    if den_z > num_z:
        raise ZeroDivisionError("unmatched pole on the truncation lattice")
    if num_z:
        raise ArithmeticError("ambiguous 0/0 on the truncation lattice")
    return numv / denv


def locus_substitution(series: TruncatedSeries, lam, ctx: VertexContext) -> TruncatedSeries:
    return series.map_coefficients(
        lambda c: _unregularize(_locus_sub(c, lam, ctx), ctx))


def _series_to_xi(series: TruncatedSeries, ctx: VertexContext) -> dict:
    """Rewrite z^d monomials as xi exponent vectors: z_i = xi_i/xi_{i+1}."""
    n = ctx.n
    out: dict[tuple[int, ...], RationalFunction] = {}
    for e, c in series.coeffs.items():
        xi_exp = [0] * n
        for i, di in enumerate(e):
            xi_exp[i] += di
            xi_exp[i + 1] -= di
        out[tuple(xi_exp)] = c
    return out


def _fit_monomial_factor(F: dict, P_terms: dict, n: int):
    """One overall (constant, xi-monomial) factor mapping F onto P_terms."""
    base = F.get((0,) * n)
    if base is None or not _nonzero(base):
        return False, None, None
    for cand in P_terms:
        fac = P_terms[cand] / base
        if len(F) != len(P_terms):
            break
        ok = True
        for k, c in F.items():
            target = tuple(a + b for a, b in zip(k, cand))
            pc = P_terms.get(target)
            if pc is None or not _iszero(c * fac - pc):
                ok = False
                break
        if ok:
            return True, fac, cand
    return False, None, None


def _nonzero(c) -> bool:
    return not _iszero(c)


def _iszero(c) -> bool:
    return c.is_zero() if isinstance(c, RationalFunction) else c == 0


DEFAULT_SAMPLES = ((Fraction(3, 7), Fraction(5, 11)), (Fraction(7, 5), Fraction(11, 3)))


def _sampled_values(fp: FlagFixedPoint, lam_full, n: int, cap: int, Q: Fraction,
                    H: Fraction, intra_inv: bool = True,
                    reverse_nodes: bool = True) -> dict:
    """z-coefficients of the vertex on the lattice at one rational sample."""
    aval = [Q ** lam_full[i] * H ** (-i) for i in range(n)]
    per_node = [list(_node_degrees(i, cap)) for i in range(1, n)]
    values: dict[tuple[int, ...], Fraction] = {}
    for combo in itertools.product(*per_node):
        d = {}
        for i, parts in enumerate(combo, start=1):
            for j, v in enumerate(parts, start=1):
                d[(i, j)] = v
        val = _locus_term_value(fp, d, n, aval, Q, H, intra_inv)
        if val == 0:
            continue
        nodes = reversed(combo) if reverse_nodes else combo
        e = tuple(sum(parts) for parts in nodes)
        values[e] = values.get(e, Fraction(0)) + val * (Q / H) ** sum(e)
    return {e: v for e, v in values.items() if v != 0}


def truncation_check(lam, n: int, cap: int, ctx: VertexContext | None = None,
                     samples=DEFAULT_SAMPLES) -> dict:
    """Terminate at the lattice point and compare with the oracle polynomial.

    The fixed point is the identity chain; the cap must leave headroom so
    termination is witnessed, not imposed.  Two variables are handled fully
    symbolically; beyond that (q, h) are pinned to exact rational sample
    points, which keeps the arithmetic exact while the per-degree sums stay
    univariate in the regularizer.
    """
    lam = trim(lam)
    if lam and cap < lam[0] + 1:
        raise ValueError("cap too small to witness termination")
    if ctx is None:
        ctx = VertexContext(n)
    reg = ctx.registry
    fp = FlagFixedPoint.identity(n)
    P = macdonald_oracle(lam, n, ctx.mac)

    if n <= 2:
        coeffs: dict[tuple[int, ...], RationalFunction] = {}
        for e, c in _cone_terms(fp, (cap,) * (n - 1), ctx):
            c = _unregularize(_locus_sub(c, lam, ctx), ctx)
            if c.is_zero():
                continue
            coeffs[e] = coeffs[e] + c if e in coeffs else c
        bound = max((max(e) for e, c in coeffs.items() if not c.is_zero()), default=0)
        F = _series_to_xi(TruncatedSeries(reg, ctx.svars, (cap,) * (n - 1), coeffs), ctx)
        P_terms: dict[tuple[int, ...], RationalFunction] = {}
        for mu, c in P.coeffs.items():
            for perm in set(itertools.permutations(pad(mu, n))):
                P_terms[perm] = c
        match, factor, shift = _fit_monomial_factor(F, P_terms, n)
        return {"terminates": bound < cap, "bound": bound, "matches_oracle": match,
                "factor": factor, "shift": shift, "mode": "symbolic"}

    # sampled exact-rational mode: per-term evaluation on the lattice
    lam_full = pad(lam, n)
    qi, hi = reg.index("q"), reg.index("h")
    bound, match, factors, shift = 0, True, [], None
    for Q, H in samples:
        values = _sampled_values(fp, lam_full, n, cap, Q, H)
        bound = max([bound] + [max(e) for e in values])
        F = {}
        for e, val in values.items():
            xi_exp = [0] * n
            for i, di in enumerate(e):
                xi_exp[i] += di
                xi_exp[i + 1] -= di
            F[tuple(xi_exp)] = val
        P_terms = {}
        for mu, c in P.coeffs.items():
            cv = c.subs_monomial(qi, Q, {}).subs_monomial(hi, H, {})
            if not cv.is_polynomial():
                raise AssertionError("oracle coefficient did not specialize")
            for perm in set(itertools.permutations(pad(mu, n))):
                P_terms[perm] = cv.num.constant()
        ok, fac, sh = _fit_monomial_factor(F, P_terms, n)
        match = match and ok
        factors.append(fac)
        shift = sh if sh is not None else shift
    return {"terminates": bound < cap, "bound": bound, "matches_oracle": match,
            "factor": factors, "shift": shift, "mode": "sampled"}


def resolve_conventions(cap: int = 4) -> dict:
    """Enumerate fixed points and both ratio directions for the first
    nontrivial partition in two variables; exactly one combination should
    terminate and match the oracle."""
    lam = (1, 0)
    outcomes = {}
    for perm in itertools.permutations((1, 2)):
        for direction in (+1, -1):
            ctx = VertexContext(2)
            reg = ctx.registry
            qi, hi = reg.index("q"), reg.index("h")
            fp = FlagFixedPoint.from_permutation(perm)
            series = vertex_coefficients(fp, (cap,), ctx)
            try:
                # a2/a1 = q^{lam2-lam1} h^{direction}
                sub = series.subs_monomial(
                    reg.index("a2"), 1,
                    {qi: lam[1] - lam[0], hi: direction, reg.index("a1"): 1})
                nonzero = [e for e in sub.coeffs]
                bound = max((sum(e) for e in nonzero), default=0)
                terminates = bound < cap
            except ZeroDivisionError:
                terminates, bound = False, None
            outcomes[(perm, direction)] = {"terminates": terminates, "bound": bound}
    return outcomes


def resolve_intra_conventions(cap: int = 3) -> dict:
    """Orientation choices invisible in two variables, pinned in three.

    Enumerates the intra-node ratio direction and the node-to-z labeling
    for the smallest nontrivial partition; exactly one combination should
    terminate and reproduce the degree-one symmetric polynomial.
    """
    n, lam = 3, (1, 0, 0)
    fp = FlagFixedPoint.identity(n)
    Q, H = DEFAULT_SAMPLES[0]
    # m_(1) has unit coefficients at the three unit exponent vectors
    target = {e: Fraction(1) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))}
    outcomes = {}
    for intra_inv in (True, False):
        for reverse_nodes in (True, False):
            try:
                values = _sampled_values(fp, lam, n, cap, Q, H,
                                         intra_inv, reverse_nodes)
            except (ZeroDivisionError, ArithmeticError):
                outcomes[(intra_inv, reverse_nodes)] = {
                    "terminates": False, "matches_oracle": False}
                continue
            bound = max((max(e) for e in values), default=0)
            F = {}
            for e, val in values.items():
                xi_exp = [0] * n
                for i, di in enumerate(e):
                    xi_exp[i] += di
                    xi_exp[i + 1] -= di
                F[tuple(xi_exp)] = val
            ok, _, _ = _fit_monomial_factor(F, target, n)
            outcomes[(intra_inv, reverse_nodes)] = {
                "terminates": bound < cap, "matches_oracle": ok}
    return outcomes


# -- order-by-order eigen residual (two particles) -----------------------

def _vertex_modes(ctx: VertexContext, cap: int) -> list:
    fp = FlagFixedPoint.identity(2)
    series = vertex_coefficients(fp, (cap,), ctx)
    return [series.coefficient((d,)) for d in range(cap + 1)]


def eigen_residual(frame: str, n: int, cap: int, ctx: VertexContext | None = None) -> dict:
    """Fit a per-momentum dressing at the two lowest orders, verify the rest.

    Electric frame: shifts act on the a-variables inside the coefficients.
    Magnetic frame: shifts act on the series variable itself and the
    operator coefficients are expanded as z-series.  Both return the
    residual orders 0..cap together with the fitted dressing.
    """
    if n != 2:
        raise ValueError("only the two-particle case is supported")
    if cap < 2:
        raise ValueError("cap must be at least 2 to verify anything beyond the fit")
    if ctx is None:
        ctx = VertexContext(2)
    reg = ctx.registry
    qi = reg.index("q")
    a1, a2 = (reg.index(name) for name in ctx.a_names)
    v = _vertex_modes(ctx, cap)
    zero = RationalFunction(reg.zero())
    q, h = rf_var(reg, "q"), rf_var(reg, "h")
    av1, av2 = rf_var(reg, "a1"), rf_var(reg, "a2")

    if frame == "electric":
        def s1(c):
            return c.q_shift((a1,), (1,), qi)

        def s2(c):
            return c.q_shift((a2,), (1,), qi)

        # the a2-shift branch carries the z weight:
        # g1*s1(v_d) + g2*s2(v_{d-1}) = v_d + v_{d-1}
        g1 = rf_const(reg, 1)                      # order 0 with v_0 = 1
        g2 = 1 + v[1] - s1(v[1])                   # order 1
        residuals = [zero, zero]
        for d in range(2, cap + 1):
            r = g1 * s1(v[d]) + g2 * s2(v[d - 1]) - v[d] - v[d - 1]
            residuals.append(r)
        # coupling-q subset coefficients of the a-frame operator
        c1 = (q * av1 - av2) / (av1 - av2)
        c2 = (q * av2 - av1) / (av2 - av1)
        simple = _is_monomial_rf(g1 / c1) and _is_monomial_rf(g2 / c2)
        dressing = {"g1": g1, "g2": g2}
    elif frame == "magnetic":
        # operator coefficients as z-series; shifts scale z by q^{+-1}
        qrf = rf_var(reg, "q")

        def shifted(sign):
            return [v[d] * qrf ** (sign * d) for d in range(cap + 1)]

        vp, vm = shifted(+1), shifted(-1)
        # C1 = (h z - 1)/(z - 1),  C2 = (h - z)/(1 - z) as series
        C1 = [rf_const(reg, 1)] + [(1 - h)] * cap
        C2 = [h] + [(h - 1)] * cap

        def conv(a, b, d):
            return sum((a[k] * b[d - k] for k in range(d + 1)), zero)

        # orders 0,1 determine (G1, G2) by a 2x2 linear solve
        A = [[conv(C1, vp, d), conv(C2, vm, d)] for d in range(cap + 1)]
        rhs = [(av1 + av2) * v[d] for d in range(cap + 1)]
        det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        G1 = (rhs[0] * A[1][1] - rhs[1] * A[0][1]) / det
        G2 = (A[0][0] * rhs[1] - A[1][0] * rhs[0]) / det
        residuals = [zero, zero]
        for d in range(2, cap + 1):
            residuals.append(G1 * A[d][0] + G2 * A[d][1] - rhs[d])
        simple = _is_monomial_rf(G1) and _is_monomial_rf(G2)
        dressing = {"g1": G1, "g2": G2}
    else:
        raise ValueError("frame must be 'electric' or 'magnetic'")

    series = TruncatedSeries(reg, ("z1",), (cap,),
                             {(d,): r for d, r in enumerate(residuals)})
    first_bad = next((d for d, r in enumerate(residuals) if not r.is_zero()), None)
    return {
        "residual": series,
        "dressing": dressing,
        "pass": first_bad is None,
        "first_nonzero_order": first_bad,
        "simple_prefactor_sufficient": simple,
    }


def _is_monomial_rf(rf: RationalFunction) -> bool:
    return rf.is_polynomial() and rf.num.is_monomial()
