"""Local q-difference connection data: Wronskian minors, Q-polynomials,
QQ-system and Bethe-equation residuals.

Sections are univariate polynomials stored as ascending complex
coefficient arrays.  All identities hold up to one multiplicative
constant per equation; constants are fitted by largest-coefficient
comparison and reported, never assumed.

Convention (validated against the duality solver for ranks 1 and 2):
Q_j^+ is the minor over the last j rows (so Q_1^+ = s_{r+1}), Q_j^-
swaps the deepest of those rows for the next one up, and the bilinear
relation pairs the twists in reversed order: node i carries
(xi_{r+1-i}, xi_{r+2-i}).  The inhomogeneity sits on the last node:
Lambda_i = 1 for i < r and Lambda_r(z) = prod (z - a_k).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


# -- dense univariate polynomial helpers (ascending coefficients) --------

def pmul(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.zeros(len(a) + len(b) - 1, dtype=complex)
    for i, x in enumerate(a):
        out[i:i + len(b)] += x * b
    return out


def padd(a, b) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=complex)
    out[:len(a)] += a
    out[:len(b)] += b
    return out


def parg(a, c) -> np.ndarray:
    """Coefficients of z -> s(c*z)."""
    return np.array([x * c ** k for k, x in enumerate(a)], dtype=complex)


def peval(a, z) -> complex:
    out = 0j
    for c in reversed(np.asarray(a, dtype=complex)):
        out = out * z + c
    return out


def pfromroots(roots) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for r in roots:
        out = pmul(out, np.array([-r, 1.0]))
    return out


def proots(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    return np.roots(a[::-1])


def pdet(M) -> np.ndarray:
    """Determinant of a small matrix of polynomials by Leibniz expansion."""
    k = len(M)
    out = np.zeros(1, dtype=complex)
    for perm in itertools.permutations(range(k)):
        sign = 1
        for i in range(k):
            for j in range(i + 1, k):
                if perm[i] > perm[j]:
                    sign = -sign
        term = np.ones(1, dtype=complex)
        for i in range(k):
            term = pmul(term, M[i][perm[i]])
        out = padd(out, sign * term)
    return out


@dataclass
class QOperData:
    r: int                      # group rank, r+1 sections
    sections: list              # s_1..s_{r+1}, ascending coefficient arrays
    xi: np.ndarray              # twist diagonal, pairwise distinct
    lam_roots: np.ndarray       # singularity polynomial roots a_1..a_{r+1}
    q: complex

    def __post_init__(self):
        self.xi = np.asarray(self.xi, dtype=complex)
        self.lam_roots = np.asarray(self.lam_roots, dtype=complex)
        if len(self.sections) != self.r + 1 or len(self.xi) != self.r + 1:
            raise ValueError("need r+1 sections and twists")
        n = self.r + 1
        for i in range(n):
            for j in range(i + 1, n):
                if abs(self.xi[i] - self.xi[j]) < 1e-12 * max(1.0, abs(self.xi[i])):
                    raise ValueError("twists must be pairwise distinct")

    @classmethod
    def from_momenta(cls, xi, momenta, a, q) -> "QOperData":
        """Degree-one sections s_i(z) = z - p_i from a duality solution."""
        sections = [np.array([-p, 1.0], dtype=complex) for p in momenta]
        return cls(len(xi) - 1, sections, xi, a, q)

    def lam_poly(self) -> np.ndarray:
        return pfromroots(self.lam_roots)

    def node_poly(self, i: int) -> np.ndarray:
        """Lambda_i: trivial below the top node."""
        if i == self.r:
            return self.lam_poly()
        return np.ones(1, dtype=complex)

    def _wronskian_matrix(self, rows, ncols: int):
        return [
            [parg(self.sections[u], self.q ** v) * self.xi[u] ** v for v in range(ncols)]
            for u in rows
        ]

    def _vandermonde_det(self, rows, ncols: int) -> complex:
        V = np.array([[self.q ** v * self.xi[u] ** v for v in range(ncols)] for u in rows])
        return np.linalg.det(V)


def flag_determinant(data: QOperData, k: int) -> np.ndarray:
    """D_k: the k x k minor over the last k rows of [xi_i^{j-1} s_i(q^{j-1}z)]."""
    if not 2 <= k <= data.r + 1:
        raise ValueError(f"k must be in 2..{data.r + 1}")
    rows = list(range(data.r + 1 - k, data.r + 1))
    return pdet(data._wronskian_matrix(rows, k))


def q_polynomials(data: QOperData, j: int):
    """(Q_j^+, Q_j^-) as Vandermonde-normalized bottom-row minors."""
    if not 1 <= j <= data.r:
        raise ValueError(f"j must be in 1..{data.r}")
    r = data.r
    rows_plus = [r - m for m in range(j)]
    rows_minus = [r - m for m in range(j - 1)] + [r - j]
    qp = pdet(data._wronskian_matrix(rows_plus, j)) / data._vandermonde_det(rows_plus, j)
    qm = pdet(data._wronskian_matrix(rows_minus, j)) / data._vandermonde_det(rows_minus, j)
    return qp, qm


def _all_q_polynomials(data: QOperData) -> dict:
    qp = {0: np.ones(1, dtype=complex), data.r + 1: np.ones(1, dtype=complex)}
    qm = {}
    for j in range(1, data.r + 1):
        qp[j], qm[j] = q_polynomials(data, j)
    return {"plus": qp, "minus": qm}


def qq_residual(data: QOperData):
    """Per-node residual polynomials of the bilinear QQ relation.

    Each residual is lhs - c*rhs with c fitted at the largest rhs
    coefficient; returns (residuals, constants).
    """
    Q = _all_q_polynomials(data)
    qp, qm = Q["plus"], Q["minus"]
    xi, q = data.xi, data.q
    r = data.r
    residuals, constants = [], []
    for i in range(1, r + 1):
        lhs = padd(xi[r - i] * pmul(qp[i], parg(qm[i], q)),
                   -xi[r + 1 - i] * pmul(parg(qp[i], q), qm[i]))
        rhs = pmul(data.node_poly(i), pmul(parg(qp[i - 1], q), qp[i + 1]))
        n = max(len(lhs), len(rhs))
        lhs = np.pad(lhs, (0, n - len(lhs)))
        rhs = np.pad(rhs, (0, n - len(rhs)))
        idx = int(np.argmax(np.abs(rhs)))
        c = lhs[idx] / rhs[idx] if abs(rhs[idx]) > 0 else 0.0
        scale = max(1.0, float(np.max(np.abs(lhs))))
        residuals.append((lhs - c * rhs) / scale)
        constants.append(c)
    return residuals, constants


@dataclass
class BetheConfiguration:
    r: int
    roots: dict                 # node i (1-based) -> array of roots of Q_i^+
    xi: np.ndarray
    node_polys: dict            # node i -> Lambda_i coefficient array
    aux: dict | None = None     # node i -> Q_i^+ coefficient array, optional

    def q_plus(self, i: int) -> np.ndarray:
        if self.aux and i in self.aux:
            return self.aux[i]
        if i in self.roots:
            return pfromroots(self.roots[i])
        return np.ones(1, dtype=complex)


def bethe_configuration(data: QOperData) -> BetheConfiguration:
    Q = _all_q_polynomials(data)
    roots = {i: proots(Q["plus"][i]) for i in range(1, data.r + 1)}
    node_polys = {i: data.node_poly(i) for i in range(1, data.r + 1)}
    aux = {i: Q["plus"][i] for i in range(0, data.r + 2)}
    return BetheConfiguration(data.r, roots, data.xi, node_polys, aux)


def bethe_residual(config: BetheConfiguration, q) -> dict:
    """Pole-cleared equation residual at every root, scaled by term size."""
    xi = config.xi
    out = {}
    for i, roots in config.roots.items():
        lam = config.node_polys[i]
        qp_i = config.q_plus(i)
        qp_lo = config.q_plus(i - 1)
        qp_hi = config.q_plus(i + 1)
        vals = []
        for a_idx, t in enumerate(roots):
            for b_idx, other in enumerate(roots):
                if a_idx != b_idx and abs(t - other) < 1e-9 * max(1.0, abs(t)):
                    raise ValueError("degenerate Bethe roots")
            term1 = xi[config.r + 1 - i] * peval(qp_i, q * t) * peval(lam, t / q) \
                * peval(qp_lo, t) * peval(qp_hi, t / q)
            term2 = xi[config.r - i] * peval(qp_i, t / q) * peval(lam, t) \
                * peval(qp_lo, q * t) * peval(qp_hi, t)
            scale = max(1.0, abs(term1), abs(term2))
            vals.append((term1 + term2) / scale)
        out[i] = np.array(vals)
    return out


def wronskian_factorization_check(data: QOperData, k: int) -> dict:
    """Split D_k into singularity part W_k, monic part V_k, and constant.

    W_k = 1 below the top and W_{r+1} is the singularity polynomial; the
    quotient's monic part must reproduce Q_k^+ for k <= r.
    """
    det = flag_determinant(data, k) if k >= 2 else np.asarray(data.sections[-1], dtype=complex)
    w = data.lam_poly() if k == data.r + 1 else np.ones(1, dtype=complex)
    quotient, remainder = np.polydiv(det[::-1], w[::-1])
    quotient = quotient[::-1]
    rem_rel = float(np.max(np.abs(remainder)) / max(1.0, np.max(np.abs(det)))) if len(remainder) else 0.0
    beta = quotient[-1]
    v = quotient / beta
    report = {"k": k, "beta": beta, "v": v, "remainder_rel": rem_rel,
              "divisible": rem_rel < 1e-8}
    if 1 <= k <= data.r:
        qp, _ = q_polynomials(data, k)
        qp_monic = qp / qp[-1]
        report["matches_q_plus"] = bool(np.max(np.abs(v - qp_monic)) < 1e-8)
    return report


def oper_report(data: QOperData) -> dict:
    """End-to-end residual summary for one oper datum."""
    n = data.r + 1
    d_top = flag_determinant(data, n)
    lam = data.lam_poly()
    ratio = d_top[-1] / lam[-1]
    d_err = float(np.max(np.abs(d_top - ratio * lam)) / np.max(np.abs(d_top)))
    residuals, constants = qq_residual(data)
    qq_max = float(max(np.max(np.abs(r)) for r in residuals))
    bethe = bethe_residual(bethe_configuration(data), data.q)
    bethe_max = float(max(np.max(np.abs(v)) for v in bethe.values()))
    return {
        "d_rel_error": d_err,
        "qq_max_residual": qq_max,
        "qq_constants": constants,
        "bethe_max_residual": bethe_max,
    }
