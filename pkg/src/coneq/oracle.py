"""Independent ground-truth machinery: exact rational LP feasibility, dense
eigendecomposition, generalized eigencomponents, a Krylov estimate of the
local spectral radius, and exact characteristic-polynomial root counting.

The LP solver is a plain two-phase tableau simplex over ``Fraction`` with
Bland's rule, so feasibility verdicts are exact and termination is
guaranteed.  All variables are nonnegative; >= rows get slack variables
internally.  The float-lane helpers (eig_all, decompose_generalized,
krylov_local_rho) are deliberately independent of the combinatorial modules
so the two routes can disagree loudly in tests if one of them is wrong.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (
    DEFAULT_TOL,
    FLOAT,
    RATIONAL,
    InvalidInput,
    NonnegMatrix,
    NumericFailure,
    Scalar,
    Tolerance,
    exact_fraction,
)

RANK_REL = 1e-8  # relative singular-value threshold for rank decisions


# ---------------------------------------------------------------------------
# exact linear programming


@dataclass(frozen=True)
class LPProblem:
    """min/max c.x (optional) with Ax = b rows, Gx >= h rows, x >= 0.

    All data must be Fractions (ints are accepted and coerced).
    """

    n: int
    eq_rows: tuple = ()
    ge_rows: tuple = ()
    objective: Optional[tuple] = None
    maximize: bool = False

    @staticmethod
    def build(n, eq_rows=(), ge_rows=(), objective=None, maximize=False) -> "LPProblem":
        def row(r):
            coeffs, rhs = r
            coeffs = tuple(exact_fraction(c) for c in coeffs)
            if len(coeffs) != n:
                raise InvalidInput("LP row length mismatch")
            return (coeffs, exact_fraction(rhs))

        obj = None
        if objective is not None:
            obj = tuple(exact_fraction(c) for c in objective)
            if len(obj) != n:
                raise InvalidInput("LP objective length mismatch")
        return LPProblem(
            n,
            tuple(row(r) for r in eq_rows),
            tuple(row(r) for r in ge_rows),
            obj,
            maximize,
        )


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    witness: Optional[tuple]  # values of the n original variables
    objective: Optional[Fraction]

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _pivot(tableau, basis, row, col):
    piv = tableau[row][col]
    inv = Fraction(1) / piv
    tableau[row] = [e * inv for e in tableau[row]]
    prow = tableau[row]
    for r in range(len(tableau)):
        if r != row and tableau[r][col] != 0:
            f = tableau[r][col]
            tableau[r] = [e - f * p for e, p in zip(tableau[r], prow)]
    basis[row] = col


def _simplex_min(tableau, basis, cost):
    """Minimize cost.x over the tableau rows (Bland's rule).  Returns
    ("optimal", value) or ("unbounded", None); mutates tableau/basis."""
    m = len(tableau)
    width = len(cost) + 1  # cost has no rhs entry; tableau rows do
    # reduced cost row: cost minus basic contributions
    z = list(cost) + [Fraction(0)]
    for r in range(m):
        c = basis[r]
        if z[c] != 0:
            f = z[c]
            z = [e - f * t for e, t in zip(z, tableau[r])]
    while True:
        enter = next((j for j in range(width - 1) if z[j] < 0), None)
        if enter is None:
            return "optimal", -z[-1], z
        best_row, best_ratio = None, None
        for r in range(m):
            a = tableau[r][enter]
            if a > 0:
                ratio = tableau[r][-1] / a
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[r] < basis[best_row])
                ):
                    best_row, best_ratio = r, ratio
        if best_row is None:
            return "unbounded", None, z
        f = z[enter]
        _pivot(tableau, basis, best_row, enter)
        if f != 0:
            z = [e - f * p for e, p in zip(z, tableau[best_row])]


def solve_lp(problem: LPProblem) -> LPResult:
    """Two-phase exact simplex.  Feasibility and optima are exact."""
    n = problem.n
    rows = []
    n_slack = len(problem.ge_rows)
    total = n + n_slack
    for coeffs, rhs in problem.eq_rows:
        rows.append(([*coeffs] + [Fraction(0)] * n_slack, rhs))
    for k, (coeffs, rhs) in enumerate(problem.ge_rows):
        slack = [Fraction(0)] * n_slack
        slack[k] = Fraction(-1)
        rows.append(([*coeffs] + slack, rhs))
    m = len(rows)
    # nonnegative right-hand sides
    tableau = []
    for coeffs, rhs in rows:
        if rhs < 0:
            coeffs = [-c for c in coeffs]
            rhs = -rhs
        tableau.append(list(coeffs) + [Fraction(0)] * m + [rhs])
    for r in range(m):
        tableau[r][total + r] = Fraction(1)  # artificial
    basis = [total + r for r in range(m)]
    phase1_cost = [Fraction(0)] * total + [Fraction(1)] * m
    status, value, _ = _simplex_min(tableau, basis, phase1_cost)
    if status != "optimal" or value != 0:
        return LPResult("infeasible", None, None)
    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= total:
            col = next((j for j in range(total) if tableau[r][j] != 0), None)
            if col is None:
                continue  # redundant zero row
            _pivot(tableau, basis, r, col)
        keep.append(r)
    tableau = [tableau[r] for r in keep]
    basis = [basis[r] for r in keep]
    # freeze artificial columns at zero
    for r in range(len(tableau)):
        row = tableau[r]
        tableau[r] = row[:total] + [row[-1]]

    def extract():
        x = [Fraction(0)] * total
        for r, c in enumerate(basis):
            x[c] = tableau[r][-1]
        return tuple(x[:n])

    if problem.objective is None:
        return LPResult("optimal", extract(), None)
    sign = Fraction(-1) if problem.maximize else Fraction(1)
    cost = [sign * c for c in problem.objective] + [Fraction(0)] * n_slack
    status, value, _ = _simplex_min(tableau, basis, cost)
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    return LPResult("optimal", extract(), sign * value)


def lp_feasible(problem: LPProblem) -> LPResult:
    """Feasibility-only entry point (phase one)."""
    return solve_lp(
        LPProblem(problem.n, problem.eq_rows, problem.ge_rows, None, False)
    )


# convenience builders used across the package ------------------------------


def _rational_rows(P: NonnegMatrix):
    return [[exact_fraction(e) for e in row] for row in P.rows]


def feasible_nonneg_solution(
    mat_rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
    support_within: Optional[Iterable[int]] = None,
) -> LPResult:
    """Is there x >= 0 with M x = rhs (optionally supp(x) inside a 1-based set)?"""
    n = len(mat_rows[0]) if mat_rows else 0
    if support_within is not None:
        allowed = set(support_within)
        cols = [j for j in range(n) if j + 1 in allowed]
        rows = [([row[j] for j in cols], r) for row, r in zip(mat_rows, rhs)]
        res = lp_feasible(LPProblem.build(len(cols), eq_rows=rows))
        if not res.feasible:
            return res
        x = [Fraction(0)] * n
        for k, j in enumerate(cols):
            x[j] = res.witness[k]
        return LPResult("optimal", tuple(x), None)
    rows = [(row, r) for row, r in zip(mat_rows, rhs)]
    return lp_feasible(LPProblem.build(n, eq_rows=rows))


def shifted_image_rows(P: NonnegMatrix, lam: Scalar, sign: int = 1):
    """Rows of sign*(P - lam*I) as exact Fractions."""
    lam = exact_fraction(lam)
    rows = _rational_rows(P)
    n = P.n
    return [
        [sign * (rows[i][j] - (lam if i == j else 0)) for j in range(n)]
        for i in range(n)
    ]


# ---------------------------------------------------------------------------
# exact dense helpers


def solve_signed(mat_rows, rhs) -> Optional[list]:
    """One sign-unrestricted solution of M x = rhs over the rationals, or None
    if the system is inconsistent.  Gauss-Jordan with free variables at 0."""
    m = len(mat_rows)
    n = len(mat_rows[0]) if m else 0
    a = [[exact_fraction(e) for e in row] + [exact_fraction(rhs[i])] for i, row in enumerate(mat_rows)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((k for k in range(r, m) if a[k][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = Fraction(1) / a[r][col]
        a[r] = [e * inv for e in a[r]]
        for k in range(m):
            if k != r and a[k][col] != 0:
                f = a[k][col]
                a[k] = [e - f * p for e, p in zip(a[k], a[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for k in range(r, m):
        if a[k][n] != 0:
            return None
    x = [Fraction(0)] * n
    for row_i, col in enumerate(pivots):
        x[col] = a[row_i][n]
    return x


def nullspace_exact(mat_rows) -> list:
    """Rational basis of the nullspace of M (list of column vectors)."""
    m = len(mat_rows)
    n = len(mat_rows[0]) if m else 0
    a = [[exact_fraction(e) for e in row] for row in mat_rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((k for k in range(r, m) if a[k][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = Fraction(1) / a[r][col]
        a[r] = [e * inv for e in a[r]]
        for k in range(m):
            if k != r and a[k][col] != 0:
                f = a[k][col]
                a[k] = [e - f * p for e, p in zip(a[k], a[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    basis = []
    free = [c for c in range(n) if c not in pivots]
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for row_i, col in enumerate(pivots):
            v[col] = -a[row_i][fc]
        basis.append(v)
    return basis


def matrix_power_exact(rows, k: int):
    """Integer power of a square rational matrix."""
    n = len(rows)
    result = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    base = [[exact_fraction(e) for e in row] for row in rows]
    while k:
        if k & 1:
            result = [
                [sum(result[i][t] * base[t][j] for t in range(n)) for j in range(n)]
                for i in range(n)
            ]
        k >>= 1
        if k:
            base = [
                [sum(base[i][t] * base[t][j] for t in range(n)) for j in range(n)]
                for i in range(n)
            ]
    return result


def generalized_nullspace_exact(mat_rows, mu: Fraction) -> list:
    """Rational basis of N((M - mu*I)^n)."""
    n = len(mat_rows)
    shifted = [
        [exact_fraction(mat_rows[i][j]) - (mu if i == j else 0) for j in range(n)]
        for i in range(n)
    ]
    return nullspace_exact(matrix_power_exact(shifted, n))


# characteristic polynomial + Sturm root counting ---------------------------


def charpoly_exact(P: NonnegMatrix) -> list:
    """Coefficients of det(t*I - P), highest power first, exact rationals
    (Faddeev-LeVerrier)."""
    n = P.n
    a = _rational_rows(P)
    coeffs = [Fraction(1)]
    m = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    am = a
    c = Fraction(1)
    for k in range(1, n + 1):
        if k > 1:
            m = [[am[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
            am = [
                [sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)]
                for i in range(n)
            ]
        else:
            am = a
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(c)
    return coeffs


def _poly_divmod(num, den):
    num = list(num)
    out = []
    while len(num) >= len(den):
        f = num[0] / den[0]
        out.append(f)
        for i in range(len(den)):
            num[i] -= f * den[i]
        num.pop(0)
    while num and num[0] == 0:
        num.pop(0)
    return out, num


def _poly_gcd(a, b):
    a, b = list(a), list(b)
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    lead = a[0]
    return [c / lead for c in a]


def _poly_eval(coeffs, t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * t + c
    return acc


def _poly_derivative(coeffs):
    n = len(coeffs) - 1
    return [c * (n - i) for i, c in enumerate(coeffs[:-1])]


def count_real_roots_in(coeffs, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots of the polynomial in the half-open
    interval (a, b], via an exact Sturm chain."""
    if not coeffs or len(coeffs) == 1:
        return 0
    g = _poly_gcd(coeffs, _poly_derivative(coeffs))
    sqfree, _ = _poly_divmod(coeffs, g)
    chain = [sqfree, _poly_derivative(sqfree)]
    while len(chain[-1]) > 0:
        _, rem = _poly_divmod(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])

    def variations(t):
        signs = []
        for p in chain:
            v = _poly_eval(p, t)
            if v != 0:
                signs.append(1 if v > 0 else -1)
        return sum(1 for s, u in zip(signs, signs[1:]) if s != u)

    return variations(a) - variations(b)


# ---------------------------------------------------------------------------
# float eigen machinery


def eig_all(P: NonnegMatrix, tol: Tolerance = DEFAULT_TOL) -> list:
    """All eigenvalues (complex), with near-real values snapped to the real
    axis; sorted by (real, imag) for determinism."""
    if P.n == 0:
        return []
    vals = np.linalg.eigvals(P.to_numpy())
    scale = max(1.0, float(np.max(np.abs(vals))) if len(vals) else 1.0)
    out = []
    for v in vals:
        if abs(v.imag) <= tol.eig_tol * scale:
            v = complex(v.real, 0.0)
        out.append(v)
    out.sort(key=lambda z: (z.real, z.imag))
    return out


@dataclass(frozen=True)
class EigComponent:
    eigenvalue: complex
    multiplicity: int
    component: tuple  # complex entries
    order: int  # 0 when the component vanishes
    norm: float


@dataclass(frozen=True)
class GeneralizedDecomposition:
    components: tuple
    merged: bool  # True when distinct eigenvalues fell into one cluster
    ambiguous: bool  # True when a rank decision was borderline

    def present(self, rel_tol: float = 1e-8) -> list:
        scale = max([c.norm for c in self.components] + [0.0])
        return [c for c in self.components if c.norm > rel_tol * max(1.0, scale)]


def _cluster_eigenvalues(vals, tol: Tolerance, matrix=None):
    """Greedy chaining of eigenvalues closer than eig_tol*scale, then (when
    the matrix is given) a rank-confirmed merge pass.

    A defective eigenvalue of multiplicity m comes out of the dense solver
    spread over a disk of radius ~ (eps*scale)^(1/m), far wider than eig_tol,
    so distance alone under-merges.  Candidate cluster pairs inside a coarse
    (eps^(1/n)-sized) gate are merged only when the nullity of the jointly
    powered shift at their common mean actually reaches the joint size.
    """
    scale = max([1.0] + [abs(v) for v in vals])
    thresh = tol.eig_tol * scale
    order = sorted(range(len(vals)), key=lambda i: (vals[i].real, vals[i].imag))
    clusters = []
    for i in order:
        placed = False
        for cl in clusters:
            if any(abs(vals[i] - vals[j]) <= thresh for j in cl):
                cl.append(i)
                placed = True
                break
        if not placed:
            clusters.append([i])
    if matrix is None or len(clusters) < 2:
        return clusters
    n = len(vals)
    eps = float(np.finfo(float).eps)
    gate = scale * max(10.0 * tol.eig_tol, (64.0 * eps) ** (1.0 / n))
    a = np.asarray(matrix, dtype=complex)
    changed = True
    while changed and len(clusters) > 1:
        changed = False
        for p in range(len(clusters)):
            for q in range(p + 1, len(clusters)):
                mean_p = np.mean([vals[i] for i in clusters[p]])
                mean_q = np.mean([vals[i] for i in clusters[q]])
                if abs(mean_p - mean_q) > gate:
                    continue
                joint = clusters[p] + clusters[q]
                m = len(joint)
                mu = complex(np.mean([vals[i] for i in joint]))
                shifted = a - mu * np.eye(n)
                s = max(1.0, float(np.linalg.norm(shifted, np.inf)))
                sig = np.linalg.svd(
                    np.linalg.matrix_power(shifted / s, m), compute_uv=False
                )
                smax = sig[0] if len(sig) else 0.0
                cutoff = max(RANK_REL * smax, 1e-13)
                null_dim = int(np.sum(sig <= cutoff)) if smax > 0 else n
                if null_dim >= m:
                    clusters[p] = joint
                    del clusters[q]
                    changed = True
                    break
            if changed:
                break
    return clusters


def decompose_generalized(
    P: NonnegMatrix, x, tol: Tolerance = DEFAULT_TOL
) -> GeneralizedDecomposition:
    """Split x along the generalized eigenspaces of P (float lane).

    Eigenvalues are clustered within eig_tol; each cluster's space is the SVD
    nullspace of the scaled, powered shift.  The stacked bases must span C^n;
    a failed rank count flags the result as ambiguous.
    """
    n = P.n
    a = P.to_numpy()
    xv = np.array([float(e) for e in x.entries], dtype=float)
    if n == 0:
        return GeneralizedDecomposition((), False, False)
    vals = np.linalg.eigvals(a)
    clusters = _cluster_eigenvalues(list(vals), tol, a)
    merged = False
    ambiguous = False
    bases = []
    infos = []
    for cl in clusters:
        mu = complex(np.mean([vals[i] for i in cl]))
        mult = len(cl)
        spread = max(abs(vals[i] - mu) for i in cl)
        if mult > 1 and spread > 10 * tol.eig_tol * max(1.0, abs(mu)):
            merged = True
        if abs(mu.imag) <= tol.eig_tol * max(1.0, abs(mu)):
            mu = complex(mu.real, 0.0)
        shifted = a.astype(complex) - mu * np.eye(n)
        s = max(1.0, float(np.linalg.norm(shifted, np.inf)))
        powered = np.linalg.matrix_power(shifted / s, mult)
        u, sig, vh = np.linalg.svd(powered)
        smax = sig[0] if len(sig) else 0.0
        cutoff = max(RANK_REL * smax, 1e-13)
        null_dim = int(np.sum(sig <= cutoff)) if smax > 0 else n
        if null_dim != mult:
            ambiguous = True
            null_dim = mult  # trust algebraic multiplicity for the basis size
        basis = vh.conj().T[:, n - null_dim:]
        bases.append(basis)
        infos.append((mu, mult, shifted / s))
    v = np.hstack(bases)
    try:
        coef = np.linalg.solve(v, xv.astype(complex))
    except np.linalg.LinAlgError:
        raise NumericFailure("generalized eigenbasis is numerically singular")
    comps = []
    col = 0
    xnorm = max(1.0, float(np.linalg.norm(xv, np.inf)))
    for (mu, mult, shifted_scaled), basis in zip(infos, bases):
        kdim = basis.shape[1]
        comp = basis @ coef[col:col + kdim]
        col += kdim
        cnorm = float(np.linalg.norm(comp, np.inf))
        order = 0
        if cnorm > 1e-9 * xnorm:
            w = comp
            order = mult
            for t in range(1, mult + 1):
                w = shifted_scaled @ w
                if np.linalg.norm(w, np.inf) <= 1e-8 * cnorm:
                    order = t
                    break
        comps.append(EigComponent(mu, mult, tuple(comp), order, cnorm))
    return GeneralizedDecomposition(tuple(comps), merged, ambiguous)


def krylov_local_rho(P: NonnegMatrix, x, tol: Tolerance = DEFAULT_TOL) -> float:
    """Largest eigenvalue modulus of P restricted to the cyclic subspace
    generated by x (Arnoldi with full reorthogonalization)."""
    a = P.to_numpy()
    v = np.array([float(e) for e in x.entries], dtype=float)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        return 0.0
    n = P.n
    anorm = max(1.0, float(np.linalg.norm(a, np.inf)))
    basis = [v / nrm]
    h = np.zeros((n + 1, n), dtype=float)
    dim = 0
    for k in range(n):
        w = a @ basis[k]
        for _ in range(2):  # two Gram-Schmidt passes
            for j, q in enumerate(basis):
                c = float(q @ w)
                h[j, k] += c
                w = w - c * q
        hn = float(np.linalg.norm(w))
        dim = k + 1
        if hn <= 1e-10 * anorm:
            break
        h[k + 1, k] = hn
        basis.append(w / hn)
    hm = h[:dim, :dim]
    vals = np.linalg.eigvals(hm)
    return float(np.max(np.abs(vals))) if len(vals) else 0.0
