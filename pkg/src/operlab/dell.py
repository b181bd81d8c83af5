"""Doubly elliptic Hamiltonians and their degeneration chain.

The current is a sum over integer shift vectors weighted by theta factors;
its Fourier modes O_a in an auxiliary grading variable give Hamiltonians
H_a = O_0^{-1} O_a as shift operators whose coefficients are truncated
series in the two elliptic parameters (p, w).  Setting w = 0 recovers the
elliptic relativistic model, and p = 0 on top of that the trigonometric
one, each up to a reported per-Hamiltonian normalization.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .laurent import LaurentPolynomial, VariableRegistry
from .qseries import theta_expand
from .rational import RationalFunction, rf_const, rf_var
from .series import TruncatedSeries
from .shift import ShiftOperator
from .trs import TRSFrame, trs_hamiltonian


def _weight(k: int) -> int:
    return k * (k - 1) // 2


def _shift_window(w_cap: int) -> tuple[int, int]:
    """Integer range [lo, hi] with k(k-1)/2 <= w_cap."""
    hi = 1
    while _weight(hi + 1) <= w_cap:
        hi += 1
    lo = 0
    while _weight(lo - 1) <= w_cap:
        lo -= 1
    return lo, hi


@dataclass
class DELLModel:
    """N particles with per-variable elliptic caps and a mode window."""

    n: int
    p_cap: int
    w_cap: int
    zmode_range: int
    coords: tuple[str, ...]
    registry: VariableRegistry = field(compare=False)
    _term_cache: dict = field(default_factory=dict, compare=False)

    @classmethod
    def create(cls, n: int, p_cap: int, w_cap: int, zmode_range: int | None = None,
               registry: VariableRegistry | None = None) -> "DELLModel":
        if n < 2:
            raise ValueError("need at least two particles")
        if p_cap < 0 or w_cap < 0:
            raise ValueError("caps must be nonnegative")
        coords = tuple(f"x{i + 1}" for i in range(n))
        names = ("q", "h") + coords + ("p",)
        if registry is None:
            registry = VariableRegistry(names)
        else:
            for name in names:
                registry.add(name)
        if zmode_range is None:
            # every admissible shift vector sums to at most n * (largest
            # single-particle shift the w cap admits)
            zmode_range = n * _shift_window(w_cap)[1]
        return cls(n, p_cap, w_cap, zmode_range, coords, registry)

    @property
    def svars(self) -> tuple[str, str]:
        return ("p", "w")

    @property
    def caps(self) -> tuple[int, int]:
        return (self.p_cap, self.w_cap)


def _corrupt_theta(x: LaurentPolynomial, registry: VariableRegistry, order: int,
                   svars, caps) -> TruncatedSeries:
    """Ascending half of the theta product only; negative control."""
    out = TruncatedSeries.from_scalar(registry, svars, caps, 1)
    sidx = tuple(svars).index("p")
    one = TruncatedSeries.from_scalar(registry, svars, caps, 1)
    for k in range(order + 1):
        e = tuple(k if i == sidx else 0 for i in range(len(svars)))
        mono = TruncatedSeries(registry, svars, caps, {e: RationalFunction(x)})
        out = out * (one - mono)
    return out


def _term_series(model: DELLModel, shifts: tuple[int, ...],
                 corrupt_theta: bool = False) -> TruncatedSeries:
    """(p, w)-series coefficient of one shift vector, theta product included."""
    key = (shifts, corrupt_theta)
    if key in model._term_cache:
        return model._term_cache[key]
    reg = model.registry
    out = TruncatedSeries.from_scalar(reg, model.svars, model.caps, 1)
    for i in range(model.n):
        for j in range(i + 1, model.n):
            arg = reg.var(model.coords[i]) * reg.var(model.coords[j], -1)
            arg = arg * reg.var("h", shifts[i] - shifts[j])
            if corrupt_theta:
                out = out * _corrupt_theta(arg, reg, model.p_cap, model.svars, model.caps)
            else:
                out = out * theta_expand(arg, reg, "p", model.p_cap,
                                         svars=model.svars, caps=model.caps)
    wexp = sum(_weight(k) for k in shifts)
    sign = -1 if sum(shifts) % 2 else 1
    out = out.mul_svar_monomial((0, wexp), sign)
    model._term_cache[key] = out
    return out


def dell_current(model: DELLModel, corrupt_theta: bool = False) -> dict[int, ShiftOperator]:
    """Fourier modes O_a, keyed by a, over the admissible shift vectors."""
    lo, hi = _shift_window(model.w_cap)
    modes: dict[int, ShiftOperator] = {}
    clipped = False
    for shifts in itertools.product(range(lo, hi + 1), repeat=model.n):
        if sum(_weight(k) for k in shifts) > model.w_cap:
            continue
        a = sum(shifts)
        if abs(a) > model.zmode_range:
            clipped = True
            continue
        coeff = _term_series(model, shifts, corrupt_theta)
        term = ShiftOperator(model.registry, model.coords, "q", {shifts: coeff})
        modes[a] = modes[a] + term if a in modes else term
    if clipped:
        warnings.warn("mode window clips admissible shift vectors", stacklevel=2)
    return modes


def _const_op(model: DELLModel, value) -> ShiftOperator:
    coeff = TruncatedSeries.from_scalar(model.registry, model.svars, model.caps, value)
    return ShiftOperator(model.registry, model.coords, "q",
                         {(0,) * model.n: coeff})


def _o0_inverse(model: DELLModel, o0: ShiftOperator, comp=None) -> ShiftOperator:
    """Neumann inverse: the (p, w)-leading part of O_0 is an invertible scalar."""
    if comp is None:
        comp = ShiftOperator.compose
    reg = model.registry
    # kept binomial by binomial so shifted copies share denominator factors
    s0_inv = RationalFunction(reg.one())
    for i in range(model.n):
        for j in range(i + 1, model.n):
            binom = reg.one() - reg.var(model.coords[i]) * reg.var(model.coords[j], -1)
            s0_inv = s0_inv / RationalFunction(binom)
    k_op = _const_op(model, 1) - o0.scale(s0_inv)
    acc = _const_op(model, 1)
    power = acc
    for _ in range(model.p_cap + model.w_cap):
        power = comp(power, k_op)
        if power.is_zero():
            break
        acc = acc + power
    return comp(acc, _const_op(model, s0_inv))


def dell_hamiltonian(model: DELLModel, a: int,
                     modes: dict[int, ShiftOperator] | None = None,
                     ordering: str = "left") -> ShiftOperator:
    """H_a from the current modes; ordering picks O_0^{-1} O_a or O_a O_0^{-1}."""
    if not 1 <= a <= model.n - 1:
        raise ValueError(f"a must be in 1..{model.n - 1}")
    if modes is None:
        modes = dell_current(model)
    inv = _o0_inverse(model, modes[0])
    if ordering == "left":
        return inv.compose(modes[a])
    if ordering == "right":
        return modes[a].compose(inv)
    raise ValueError("ordering must be 'left' or 'right'")


def _vanishing_orders(op: ShiftOperator, caps: tuple[int, int]):
    zero, bad = [], []
    for dp in range(caps[0] + 1):
        for dw in range(caps[1] + 1):
            ok = all(c.coefficient((dp, dw)).is_zero() for c in op.terms.values())
            (zero if ok else bad).append((dp, dw))
    return zero, bad


# generic multiplicatively independent parameter pairs for the sampled mode
DEFAULT_QH_SAMPLES = ((Fraction(3, 7), Fraction(5, 11)),
                      (Fraction(7, 5), Fraction(11, 3)))


def _subs_qh(op: ShiftOperator, qval, hval) -> ShiftOperator:
    qi = op.registry.index("q")
    hi = op.registry.index("h")
    return op.map_coefficients(lambda c: c.map_coefficients(
        lambda rf: rf.subs_monomial(qi, qval, {}).subs_monomial(hi, hval, {})))


def _pair_report(hams: dict[int, ShiftOperator], caps, comp) -> dict:
    pairs = {}
    for a, b in itertools.combinations(sorted(hams), 2):
        comm = comp(hams[a], hams[b]) - comp(hams[b], hams[a])
        zero, bad = _vanishing_orders(comm, caps)
        bad.sort(key=lambda e: (sum(e), e))
        pairs[(a, b)] = {
            "zero_orders": zero,
            "first_failure": bad[0] if bad else None,
            "passes": not bad,
        }
    return pairs


def dell_commutativity_certificate(model: DELLModel, corrupt_theta: bool = False,
                                   ordering: str = "left",
                                   samples=DEFAULT_QH_SAMPLES) -> dict:
    """Pairwise commutators order by order through the caps.

    Two particles are checked fully symbolically.  Beyond that the
    coefficient sizes explode, so the commutators are evaluated at exact
    rational (q, h) sample pairs with the coordinates kept symbolic; the
    torus relation is preserved because composition still shifts
    coordinates, and the numeric coupling is folded back in after every
    composition.  All arithmetic stays exact.
    """
    modes = dell_current(model, corrupt_theta)
    if model.n == 2 or model.p_cap + model.w_cap == 0:
        hams = {a: dell_hamiltonian(model, a, modes, ordering)
                for a in range(1, model.n)}
        pairs = _pair_report(hams, model.caps, ShiftOperator.compose)
        passes = all(v["passes"] for v in pairs.values())
        return {"pairs": pairs, "passes": passes, "ordering": ordering,
                "caps": model.caps, "mode": "symbolic"}

    per_sample = []
    for qval, hval in samples:
        def comp(x, y, _q=qval, _h=hval):
            return _subs_qh(x.compose(y), _q, _h)
        num_modes = {a: _subs_qh(op, qval, hval) for a, op in modes.items()}
        inv = _o0_inverse(model, num_modes[0], comp)
        if ordering == "left":
            hams = {a: comp(inv, num_modes[a]) for a in range(1, model.n)}
        elif ordering == "right":
            hams = {a: comp(num_modes[a], inv) for a in range(1, model.n)}
        else:
            raise ValueError("ordering must be 'left' or 'right'")
        per_sample.append(_pair_report(hams, model.caps, comp))
    # an order counts as zero only when it vanishes at every sample
    all_orders = [(dp, dw) for dp in range(model.p_cap + 1)
                  for dw in range(model.w_cap + 1)]
    pairs = {}
    for key in per_sample[0]:
        zero = [e for e in all_orders
                if all(e in rep[key]["zero_orders"] for rep in per_sample)]
        bad = sorted((e for e in all_orders if e not in zero),
                     key=lambda e: (sum(e), e))
        pairs[key] = {"zero_orders": zero,
                      "first_failure": bad[0] if bad else None,
                      "passes": not bad}
    passes = all(v["passes"] for v in pairs.values())
    return {"pairs": pairs, "passes": passes, "ordering": ordering,
            "caps": model.caps, "mode": "sampled", "samples": tuple(samples)}


# -- degenerations -------------------------------------------------------

def ers_hamiltonian(n: int, r: int, p_cap: int,
                    registry: VariableRegistry | None = None,
                    coords: tuple[str, ...] | None = None) -> ShiftOperator:
    """Subset sum with theta-ratio coefficients expanded through p_cap.

    The coefficient ratio is theta(h x_i/x_j) / theta(x_i/x_j); at p^0 it
    reduces to the trigonometric coefficient with coupling h.
    """
    if not 1 <= r <= n:
        raise ValueError(f"r must be in 1..{n}")
    if coords is None:
        coords = tuple(f"x{i + 1}" for i in range(n))
    names = ("q", "h") + coords + ("p",)
    if registry is None:
        registry = VariableRegistry(names)
    else:
        for name in names:
            registry.add(name)
    svars, caps = ("p",), (p_cap,)
    terms = {}
    for subset in itertools.combinations(range(n), r):
        inside = set(subset)
        coeff = TruncatedSeries.from_scalar(registry, svars, caps, 1)
        for i in subset:
            for j in range(n):
                if j in inside:
                    continue
                ratio = registry.var(coords[i]) * registry.var(coords[j], -1)
                num = theta_expand(registry.var("h") * ratio, registry, "p",
                                   p_cap, svars=svars, caps=caps)
                den = theta_expand(ratio, registry, "p", p_cap,
                                   svars=svars, caps=caps)
                coeff = coeff * num * den.invert()
        shifts = tuple(1 if i in inside else 0 for i in range(n))
        terms[shifts] = coeff
    return ShiftOperator(registry, coords, "q", terms)


def _w0_slice(op: ShiftOperator) -> ShiftOperator:
    """Restrict (p, w)-series coefficients to w^0, leaving p-series."""
    def slice_coeff(c: TruncatedSeries) -> TruncatedSeries:
        coeffs = {(e[0],): v for e, v in c.coeffs.items() if e[1] == 0}
        return TruncatedSeries(c.registry, ("p",), (c.caps[0],), coeffs)
    return op.map_coefficients(slice_coeff)


def _p0_slice(op: ShiftOperator) -> ShiftOperator:
    """Restrict p-series coefficients to their constant term."""
    return op.map_coefficients(lambda c: c.coefficient((0,)))


def _proportionality(a: ShiftOperator, b: ShiftOperator):
    """One overall factor with a = factor * b, or None."""
    if set(a.terms) != set(b.terms):
        return None
    if not a.terms:
        return rf_const(a.registry, 1)
    shifts = min(a.terms)
    ca, cb = a.terms[shifts], b.terms[shifts]
    if isinstance(ca, TruncatedSeries):
        e = min(cb.coeffs, key=lambda v: (sum(v), v))
        factor = ca.coefficient(e) / cb.coeffs[e]
    else:
        factor = ca / cb
    if a == b.map_coefficients(lambda c: c * factor):
        return factor
    return None


def degeneration_check(n: int, p_cap: int, w_cap: int) -> dict:
    """Chain of limits: w -> 0 onto the elliptic model, then p -> 0.

    The elliptic comparison needs the momentum gauge P_k -> h^{k-1} P_k;
    the per-Hamiltonian factor left over is reported, never absorbed.
    """
    model = DELLModel.create(n, p_cap, w_cap)
    reg = model.registry
    modes = dell_current(model)
    report = {"n": n, "caps": (p_cap, w_cap), "hamiltonians": {}, "passes": True}
    gauge = [rf_var(reg, "h", k) for k in range(n)]
    frame = TRSFrame.create("generic", n, registry=reg, t_name="h")
    for a in range(1, n):
        dell_w0 = _w0_slice(dell_hamiltonian(model, a, modes))
        dell_w0 = dell_w0.rescale_momenta(gauge)
        ers = ers_hamiltonian(n, a, p_cap, registry=reg, coords=model.coords)
        factor = _proportionality(dell_w0, ers)
        trs = trs_hamiltonian(frame, a)
        trs_factor = _proportionality(_p0_slice(ers), trs)
        entry = {
            "dell_to_ers_factor": factor,
            "ers_to_trs_factor": trs_factor,
            "passes": factor is not None and trs_factor is not None
            and (trs_factor - 1).is_zero(),
        }
        report["hamiltonians"][a] = entry
        report["passes"] = report["passes"] and entry["passes"]
    return report
