"""Trigonometric many-body difference operators and the duality solver.

The quantum Hamiltonians are built once with a generic formal coupling t;
the magnetic frame (coordinates xi, coupling 1/q) and the electric frame
(coordinates a, coupling q) are specializations.  Classically the same
integrals appear as characteristic-polynomial coefficients of a Lax
matrix; the duality solver finds the momenta matching prescribed
elementary-symmetric targets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .laurent import VariableRegistry
from .rational import RationalFunction, rf_const, rf_var
from .shift import ShiftOperator


@dataclass(frozen=True)
class TRSFrame:
    tag: str                      # "magnetic" | "electric" | "generic"
    n: int
    coords: tuple[str, ...]
    q_name: str
    t_name: str
    registry: VariableRegistry = field(compare=False)

    @classmethod
    def create(cls, tag: str, n: int, prefix: str | None = None,
               registry: VariableRegistry | None = None,
               t_name: str = "t") -> "TRSFrame":
        if n < 1:
            raise ValueError("need at least one particle")
        if prefix is None:
            prefix = {"magnetic": "xi", "electric": "a"}.get(tag, "x")
        coords = tuple(f"{prefix}{i + 1}" for i in range(n))
        if registry is None:
            registry = VariableRegistry(("q", t_name) + coords)
        else:
            for name in ("q", t_name) + coords:
                registry.add(name)
        return cls(tag, n, coords, "q", t_name, registry)


def trs_hamiltonian(frame: TRSFrame, k: int) -> ShiftOperator:
    """Sum over k-subsets I of Π_{i∈I,j∉I} (t c_i - c_j)/(c_i - c_j) · P_I."""
    n = frame.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    reg = frame.registry
    t = reg.var(frame.t_name)
    c = [reg.var(name) for name in frame.coords]
    terms = {}
    for subset in itertools.combinations(range(n), k):
        inside = set(subset)
        coeff = RationalFunction(reg.one())
        for i in subset:
            for j in range(n):
                if j not in inside:
                    coeff = coeff * RationalFunction.from_ratio(t * c[i] - c[j], c[i] - c[j])
        shift = tuple(1 if i in inside else 0 for i in range(n))
        terms[shift] = coeff
    return ShiftOperator(reg, frame.coords, frame.q_name, terms)


def specialize_coupling(op: ShiftOperator, frame: TRSFrame, power: int) -> ShiftOperator:
    """Substitute t -> q^power in every coefficient."""
    reg = frame.registry
    ti = reg.index(frame.t_name)
    qi = reg.index(frame.q_name)
    return op.map_coefficients(lambda c: c.subs_monomial(ti, 1, {qi: power}))


# -- classical layer (machine precision) ---------------------------------

def _coefficient_matrix(xi, q):
    """A with T = diag(p)·A: A_ij = Π_{m≠j}(q^{-1}ξ_i - ξ_m) / Π_{l≠j}(ξ_j - ξ_l)."""
    n = len(xi)
    xi = np.asarray(xi, dtype=complex)
    A = np.empty((n, n), dtype=complex)
    for j in range(n):
        den = np.prod([xi[j] - xi[l] for l in range(n) if l != j])
        if den == 0:
            raise ValueError("coordinates must be pairwise distinct")
        for i in range(n):
            num = np.prod([xi[i] / q - xi[m] for m in range(n) if m != j])
            A[i, j] = num / den
    return A


def trs_lax(xi, p, q) -> np.ndarray:
    """Lax matrix T_ij = [Π_{m≠j}(q^{-1}ξ_i - ξ_m)/Π_{l≠j}(ξ_j - ξ_l)]·p_i."""
    A = _coefficient_matrix(xi, q)
    return np.diag(np.asarray(p, dtype=complex)) @ A


def _principal_minors(A):
    """det(A[I,I]) for every index subset I, keyed by the subset."""
    n = A.shape[0]
    out = {}
    for k in range(1, n + 1):
        for I in itertools.combinations(range(n), k):
            sub = A[np.ix_(I, I)]
            out[I] = np.linalg.det(sub)
    return out


def charpoly_hamiltonians(xi, p, q) -> np.ndarray:
    """H_k = e_k(spec T): the coefficients of det(z - T) up to sign.

    Each H_k is multilinear in the momenta: H_k = Σ_{|I|=k} det(A_II)·p^I.
    """
    n = len(xi)
    minors = _principal_minors(_coefficient_matrix(xi, q))
    p = np.asarray(p, dtype=complex)
    H = np.zeros(n, dtype=complex)
    for I, m in minors.items():
        H[len(I) - 1] += m * np.prod(p[list(I)])
    return H


def product_hamiltonians(xi, p, q, t=None) -> np.ndarray:
    """The classical subset-product integrals at coupling t (default 1/q)."""
    n = len(xi)
    if t is None:
        t = 1.0 / q
    xi = np.asarray(xi, dtype=complex)
    p = np.asarray(p, dtype=complex)
    H = np.zeros(n, dtype=complex)
    for k in range(1, n + 1):
        total = 0j
        for I in itertools.combinations(range(n), k):
            inside = set(I)
            coeff = np.prod([
                (t * xi[i] - xi[j]) / (xi[i] - xi[j])
                for i in I for j in range(n) if j not in inside
            ])
            total += coeff * np.prod(p[list(I)])
        H[k - 1] = total
    return H


def elementary_symmetric(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    n = len(a)
    e = np.zeros(n, dtype=complex)
    for k in range(1, n + 1):
        e[k - 1] = sum(np.prod(a[list(I)]) for I in itertools.combinations(range(n), k))
    return e


@dataclass
class ClassicalPoint:
    coordinates: np.ndarray
    momenta: np.ndarray
    residual: float


def duality_solve(xi, a, q, tolerance: float = 1e-10, max_solutions: int | None = None,
                  seed: int = 0, dedup: float = 1e-6, newton_steps: int = 80,
                  extra_starts: int = 300) -> list[ClassicalPoint]:
    """Momenta p with e_k(spec T(ξ,p)) = e_k(a) for all k.

    Multi-start damped Newton on the multilinear system; generic data has
    exactly N! solutions.  Deterministic for a fixed seed.
    """
    n = len(xi)
    if len(a) != n:
        raise ValueError("coordinate and singularity counts differ")
    minors = _principal_minors(_coefficient_matrix(xi, q))
    target = elementary_symmetric(a)

    def residual_vec(p):
        H = np.zeros(n, dtype=complex)
        for I, m in minors.items():
            H[len(I) - 1] += m * np.prod(p[list(I)])
        return H - target

    def jacobian(p):
        J = np.zeros((n, n), dtype=complex)
        for I, m in minors.items():
            k = len(I) - 1
            for j in I:
                rest = [i for i in I if i != j]
                J[k, j] += m * np.prod(p[rest]) if rest else m
        return J

    rng = np.random.default_rng(seed)
    a_arr = np.asarray(a, dtype=complex)
    starts = [a_arr[list(perm)].copy() for perm in itertools.permutations(range(n))]
    scale = np.mean(np.abs(a_arr))
    nperm = len(starts)
    for k in range(extra_starts):
        if k % 2 == 0:
            base = starts[int(rng.integers(nperm))]
            radius = 0.3 * (1 + k / max(1, extra_starts)) * scale
            starts.append(base + radius * (rng.standard_normal(n) + 1j * rng.standard_normal(n)))
        else:
            # wide cloud catches solutions far from any coordinate permutation
            starts.append(3.0 * scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)))

    solutions: list[ClassicalPoint] = []
    xi_arr = np.asarray(xi, dtype=complex)
    want = math.factorial(n) if max_solutions is None else max_solutions

    # converge well past the acceptance threshold; downstream residual
    # checks (oper pipeline) compound several polynomial products
    polish = min(tolerance, 1e-13)

    def newton(p0):
        p = p0.astype(complex)
        best = None
        for _ in range(newton_steps):
            r = residual_vec(p)
            err = np.max(np.abs(r))
            if err < tolerance and (best is None or err < best[1]):
                best = (p.copy(), err)
            if err < polish:
                return p
            try:
                step = np.linalg.solve(jacobian(p), r)
            except np.linalg.LinAlgError:
                return best[0] if best else None
            # damped update keeps runaway starts in check
            damp = 1.0
            for _ in range(20):
                trial = p - damp * step
                if np.max(np.abs(residual_vec(trial))) < np.max(np.abs(r)) or damp < 1e-4:
                    break
                damp *= 0.5
            p = p - damp * step
        return best[0] if best else None

    def absorb(batch):
        for p0 in batch:
            p = newton(p0)
            if p is None:
                continue
            if any(np.max(np.abs(p - s.momenta)) < dedup * max(1.0, scale) for s in solutions):
                continue
            solutions.append(ClassicalPoint(xi_arr, p, float(np.max(np.abs(residual_vec(p))))))
            if len(solutions) >= want:
                return

    absorb(starts)
    # top-up batches with ever wider clouds until the Bezout count is reached
    for batch_no in range(10):
        if len(solutions) >= want:
            break
        radius = scale * (2.0 + batch_no)
        batch = [radius * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
                 for _ in range(200)]
        absorb(batch)
    return solutions


def mirror_check(xi, a, q, tolerance: float = 1e-10, seed: int = 0) -> dict:
    """Swap coordinates and singularities with q -> 1/q; counts must agree."""
    magnetic = duality_solve(xi, a, q, tolerance=tolerance, seed=seed)
    electric = duality_solve(a, xi, 1.0 / q, tolerance=tolerance, seed=seed)
    return {
        "magnetic_count": len(magnetic),
        "electric_count": len(electric),
        "magnetic_max_residual": max((s.residual for s in magnetic), default=0.0),
        "electric_max_residual": max((s.residual for s in electric), default=0.0),
        "match": len(magnetic) == len(electric),
        "magnetic": magnetic,
        "electric": electric,
    }
