"""Nonnegative solutions of (lambda*I - P)x = b.

For lambda > 0 and b >= 0 the equation has a nonnegative solution exactly
when every class with access to supp(b) has radius strictly below lambda
(equivalently, the local spectral radius of b is below lambda).  The minimal
solution is supported on the union of classes with access to supp(b) and is
obtained by a direct solve of the principal subsystem there; it is unique
unless lambda is a distinguished eigenvalue, in which case the extra freedom
is exactly the nonnegative eigenvectors at lambda.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import oracle
from .classes import condense, smallest_initial_superset
from .core import (
    DEFAULT_TOL,
    FLOAT,
    RATIONAL,
    ConeVector,
    InvalidInput,
    NonnegMatrix,
    NumericFailure,
    RealVector,
    Scalar,
    Tolerance,
    as_scalar,
    require_same_mode,
    require_same_size,
    scalar_le,
    scalar_lt,
    scalars_equal,
    support,
    vec_sub,
    zero,
)
from .spectral import (
    class_radii,
    distinguished_eigenvalues,
    local_spectral_radius,
    taxonomy,
)


def _check_inputs(P: NonnegMatrix, lam: Scalar, b: ConeVector):
    require_same_mode(P, b)
    require_same_size(P, b)
    if lam <= 0:
        raise InvalidInput("the shift must be strictly positive")


def solvable1(P: NonnegMatrix, lam: Scalar, b: ConeVector, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Does (lambda*I - P)x = b admit x >= 0?  Purely combinatorial."""
    _check_inputs(P, lam, b)
    return scalar_lt(local_spectral_radius(P, b, tol), lam, tol)


def _unsolvable_witness(P, lam, b, tol):
    """A distinguished class with radius >= lambda from which supp(b) is
    reachable; exists whenever the equation is unsolvable."""
    analysis = condense(P)
    radii = class_radii(P, tol)
    tax = taxonomy(P, tol)
    bmask = analysis.classes_meeting(support(b))
    for c in range(analysis.class_count):
        if (
            tax.distinguished[c]
            and scalar_le(lam, radii[c], tol)
            and analysis.reach[c] & bmask
        ):
            return c
    return None


def minimal_solution(
    P: NonnegMatrix, lam: Scalar, b: ConeVector, tol: Tolerance = DEFAULT_TOL
) -> ConeVector:
    """The minimal nonnegative solution: restricted solve on the smallest
    initial superset of supp(b).  Requires solvability."""
    _check_inputs(P, lam, b)
    if b.is_zero():
        return ConeVector.zero_vector(P.n, P.mode)
    if not solvable1(P, lam, b, tol):
        raise InvalidInput("no nonnegative solution exists at this shift")
    analysis = condense(P)
    idx = sorted(smallest_initial_superset(analysis, support(b)))
    sub = P.submatrix(idx)
    lam_s = as_scalar(lam, P.mode)
    mrows = [
        [(lam_s if i == j else zero(P.mode)) - sub.rows[i][j] for j in range(sub.n)]
        for i in range(sub.n)
    ]
    rhs = [b.entries[i - 1] for i in idx]
    sol = oracle_solve(mrows, rhs, P.mode)
    entries = [zero(P.mode)] * P.n
    for k, i in enumerate(idx):
        entries[i - 1] = sol[k]
    if P.mode == FLOAT:
        entries = [max(0.0, e) if abs(e) <= tol.eq_tol else e for e in entries]
    return ConeVector(tuple(entries), P.mode)


def oracle_solve(mrows, rhs, mode):
    from .core import solve_linear

    sol = solve_linear(mrows, rhs, mode)
    if sol is None:
        raise NumericFailure("principal subsystem unexpectedly singular")
    return sol


@dataclass(frozen=True)
class SolveReport1:
    solvable: bool
    rho_b: Scalar
    x0: Optional[ConeVector]
    unique: Optional[bool]
    eigen_freedom: tuple  # class indices of distinguished classes at lambda
    fired_condition: str  # "g" when solvable, "h" with a witness otherwise
    residual_norm: Optional[Scalar]
    witness_class: Optional[int] = None

    def to_json_dict(self) -> dict:
        from .core import format_scalar

        return {
            "solvable": self.solvable,
            "rho_b": format_scalar(self.rho_b),
            "x0": [format_scalar(e) for e in self.x0.entries] if self.x0 else None,
            "unique": self.unique,
            "eigen_freedom": list(self.eigen_freedom),
            "fired_condition": self.fired_condition,
            "residual_norm": format_scalar(self.residual_norm)
            if self.residual_norm is not None
            else None,
            "witness_class": self.witness_class,
        }


def solve1(P: NonnegMatrix, lam: Scalar, b: ConeVector, tol: Tolerance = DEFAULT_TOL) -> SolveReport1:
    """Decide and, if possible, construct the minimal nonnegative solution."""
    _check_inputs(P, lam, b)
    rho_b = local_spectral_radius(P, b, tol)
    analysis = condense(P)
    radii = class_radii(P, tol)
    tax = taxonomy(P, tol)
    freedom = tuple(
        c
        for c in range(analysis.class_count)
        if tax.distinguished[c] and scalars_equal(radii[c], lam, tol)
    )
    if not scalar_lt(rho_b, lam, tol):
        witness = _unsolvable_witness(P, lam, b, tol)
        return SolveReport1(
            False, rho_b, None, None, freedom, "h", None, witness
        )
    x0 = minimal_solution(P, lam, b, tol)
    residual = _residual_norm(P, lam, x0, b)
    unique = len(freedom) == 0
    return SolveReport1(True, rho_b, x0, unique, freedom, "g", residual)


def _residual_norm(P, lam, x, b) -> Scalar:
    lam_s = as_scalar(lam, P.mode)
    lhs = vec_sub(tuple(lam_s * e for e in x.entries), P.apply(x.entries))
    return RealVector(vec_sub(lhs, b.entries), P.mode).inf_norm()


def neumann_partial(
    P: NonnegMatrix, lam: Scalar, b: ConeVector, m: int, tol: Tolerance = DEFAULT_TOL
) -> ConeVector:
    """Partial sum of the resolvent series through the m-th power of P."""
    _check_inputs(P, lam, b)
    if m < 0:
        raise InvalidInput("partial sum index must be nonnegative")
    lam_s = as_scalar(lam, P.mode)
    inv = (Fraction(1) / lam_s) if P.mode == RATIONAL else 1.0 / lam_s
    term = tuple(inv * e for e in b.entries)
    acc = term
    for _ in range(m):
        term = tuple(inv * e for e in P.apply(term))
        acc = tuple(a + t for a, t in zip(acc, term))
        if P.mode == FLOAT and any(not np.isfinite(e) for e in acc):
            raise NumericFailure("resolvent partial sums overflowed")
    return ConeVector(acc, P.mode)


def solvable_set(P: NonnegMatrix, lam: Scalar, tol: Tolerance = DEFAULT_TOL) -> frozenset:
    """Vertices i such that every class with access to i has radius < lambda.

    This is the initial subset carrying the face of right-hand sides solvable
    at lambda; it is all of {1..n} iff lambda > spectral_radius(P) and empty
    iff lambda is at most the least distinguished eigenvalue.
    """
    if lam <= 0:
        raise InvalidInput("the shift must be strictly positive")
    analysis = condense(P)
    radii = class_radii(P, tol)
    k = analysis.class_count
    verts = []
    for c in range(k):
        if all(
            scalar_lt(radii[d], lam, tol)
            for d in range(k)
            if analysis.has_access(d, c)
        ):
            verts.extend(analysis.classes[c])
    return frozenset(verts)


@dataclass(frozen=True)
class ConditionReport:
    """Nine equivalent solvability tests for (lambda*I - P)x = b, b != 0.

    b, g, h are exact combinatorial facts; c, d are iterative float checks
    and may be None (indeterminate); e, i use float generalized eigenbases;
    f, j are exact whenever every needed eigenvalue is an exact rational.
    All decided verdicts must agree -- `consistent` records that.
    """

    b: bool
    c: Optional[bool]
    d: Optional[bool]
    e: bool
    f: bool
    g: bool
    h: bool
    i: bool
    j: bool
    consistent: bool

    def to_json_dict(self) -> dict:
        return {
            "b": self.b, "c": self.c, "d": self.d, "e": self.e, "f": self.f,
            "g": self.g, "h": self.h, "i": self.i, "j": self.j,
            "consistent": self.consistent,
        }


def _condition_g(P, lam, b, tol) -> bool:
    return scalar_lt(local_spectral_radius(P, b, tol), lam, tol)


def _condition_h(P, lam, b, tol) -> bool:
    analysis = condense(P)
    radii = class_radii(P, tol)
    tax = taxonomy(P, tol)
    bmask = analysis.classes_meeting(support(b))
    for c in range(analysis.class_count):
        if tax.distinguished[c] and scalar_le(lam, radii[c], tol):
            if analysis.reach[c] & bmask:
                return False
    return True


def _condition_c(P, lam, b, tol):
    """Does the resolvent series converge?  Three-valued."""
    a = P.to_numpy() / float(lam)
    bv = b.to_numpy()
    scale = max(1.0, float(np.max(bv)))
    term = bv / float(lam)
    acc = term.copy()
    stable = 0
    for _ in range(tol.power_iters):
        term = a @ term
        acc = acc + term
        if float(np.max(np.abs(acc))) > 1e12 * scale:
            return False
        if float(np.max(np.abs(term))) <= tol.eq_tol * max(1.0, float(np.max(np.abs(acc)))):
            stable += 1
            if stable >= 3:
                return True
        else:
            stable = 0
    return None


def _condition_d(P, lam, b, tol):
    """Does (P/lambda)^m b tend to zero?  Three-valued."""
    a = P.to_numpy() / float(lam)
    v = b.to_numpy()
    scale = max(1.0, float(np.max(v)))
    for _ in range(tol.power_iters):
        v = a @ v
        nrm = float(np.max(np.abs(v)))
        if nrm <= tol.eq_tol * scale:
            return True
        if nrm > 1e12 * scale:
            return False
    return None


def _peripheral_components(P, b, lam, tol, modulus: bool):
    """Float check that b has no generalized eigencomponent at eigenvalues
    with |mu| >= lam (modulus=True) against P itself."""
    dec = oracle.decompose_generalized(P, b, tol)
    lam_f = float(lam)
    for comp in dec.components:
        mag = abs(comp.eigenvalue)
        if mag > lam_f - tol.eig_tol * max(1.0, lam_f):
            if comp.norm > 1e-7 * max(1.0, float(b.inf_norm())):
                return False
    return True


def _support_overlap_float(P, b, lam, tol, distinguished_only: bool, dvals=()):
    """Float check of the |z|-form conditions: generalized eigenvectors z of
    the transpose at the relevant eigenvalues must have supports disjoint
    from supp(b)."""
    a_t = P.to_numpy().T
    n = P.n
    vals = np.linalg.eigvals(a_t)
    scale = max(1.0, float(np.max(np.abs(vals))) if n else 1.0)
    lam_f = float(lam)
    bv = b.to_numpy()
    clusters = oracle._cluster_eigenvalues(list(vals), tol, a_t)
    for cl in clusters:
        mu = complex(np.mean([vals[i] for i in cl]))
        if distinguished_only:
            if abs(mu.imag) > tol.eig_tol * scale:
                continue
            if not any(scalars_equal(float(mu.real), float(v), tol) for v in dvals):
                continue
            if mu.real < lam_f - tol.eig_tol * max(1.0, lam_f):
                continue
        else:
            if abs(mu) < lam_f - tol.eig_tol * max(1.0, lam_f):
                continue
        mult = len(cl)
        shifted = a_t.astype(complex) - mu * np.eye(n)
        s = max(1.0, float(np.linalg.norm(shifted, np.inf)))
        powered = np.linalg.matrix_power(shifted / s, mult)
        _, sig, vh = np.linalg.svd(powered)
        smax = sig[0] if len(sig) else 0.0
        cutoff = max(oracle.RANK_REL * smax, 1e-13)
        null_dim = int(np.sum(sig <= cutoff)) if smax > 0 else n
        basis = vh.conj().T[:, n - null_dim:]
        for col in range(basis.shape[1]):
            z = basis[:, col]
            if float(np.abs(z) @ bv) > 1e-7 * max(1.0, float(b.inf_norm())):
                return False
    return True


def _orthogonal_exact(P, b, lam, tol, dvals) -> Optional[bool]:
    """Exact form of the distinguished-orthogonality condition, when every
    distinguished eigenvalue >= lambda is an exact rational; None otherwise.
    Returns (f_verdict, j_verdict)."""
    relevant = [v for v in dvals if scalar_le(lam, v, tol)]
    if not all(isinstance(v, Fraction) for v in relevant) or P.mode != RATIONAL:
        return None
    t_rows = [list(r) for r in P.transpose().rows]
    f_ok = True
    j_ok = True
    for mu in relevant:
        basis = oracle.generalized_nullspace_exact(t_rows, mu)
        for z in basis:
            dot = sum(zi * bi for zi, bi in zip(z, b.entries))
            if dot != 0:
                f_ok = False
            if any(zi != 0 and bi != 0 for zi, bi in zip(z, b.entries)):
                j_ok = False
    return f_ok, j_ok


def solvability_conditions(
    P: NonnegMatrix, lam: Scalar, b: ConeVector, tol: Tolerance = DEFAULT_TOL
) -> ConditionReport:
    """Evaluate the full battery of equivalent solvability conditions."""
    _check_inputs(P, lam, b)
    if b.is_zero():
        raise InvalidInput("the condition battery requires b != 0")
    cond_g = _condition_g(P, lam, b, tol)
    cond_h = _condition_h(P, lam, b, tol)
    cond_b = scalar_lt(local_spectral_radius(P, b, tol), lam, tol)
    cond_c = _condition_c(P, lam, b, tol)
    cond_d = _condition_d(P, lam, b, tol)
    cond_e = _peripheral_components(P, b, lam, tol, modulus=True)
    dvals = distinguished_eigenvalues(P, tol)
    exact_fj = _orthogonal_exact(P, b, lam, tol, dvals)
    if exact_fj is not None:
        cond_f, cond_j = exact_fj
    else:
        cond_f = _peripheral_distinguished_float(P, b, lam, tol, dvals)
        cond_j = _support_overlap_float(P, b, lam, tol, True, dvals)
    cond_i = _support_overlap_float(P, b, lam, tol, False)
    decided = [cond_b, cond_e, cond_f, cond_g, cond_h, cond_i, cond_j]
    decided += [c for c in (cond_c, cond_d) if c is not None]
    consistent = len(set(decided)) == 1
    return ConditionReport(
        cond_b, cond_c, cond_d, cond_e, cond_f, cond_g, cond_h, cond_i, cond_j,
        consistent,
    )


def _peripheral_distinguished_float(P, b, lam, tol, dvals) -> bool:
    """Float fallback for the distinguished-orthogonality condition: the
    components of b at distinguished eigenvalues >= lambda must vanish."""
    dec = oracle.decompose_generalized(P, b, tol)
    lam_f = float(lam)
    for comp in dec.components:
        mu = comp.eigenvalue
        if abs(mu.imag) > tol.eig_tol * max(1.0, abs(mu)):
            continue
        if not any(scalars_equal(mu.real, float(v), tol) for v in dvals):
            continue
        if mu.real > lam_f - tol.eig_tol * max(1.0, lam_f):
            if comp.norm > 1e-7 * max(1.0, float(b.inf_norm())):
                return False
    return True
