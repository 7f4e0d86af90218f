"""Collatz-Wielandt numbers and sets over the nonnegative orthant.

For a nonzero x >= 0 the lower number r is the smallest ratio (Px)_i / x_i
over supp(x), and the upper number R is the largest such ratio when Px stays
on the face of x (supp(Px) subset of supp(x)), infinity otherwise.  Always
r <= rho_x <= R.

The four set extrema: sup over nonzero x >= 0 of r equals the spectral
radius; inf of R over the same range is the least distinguished eigenvalue;
over interior x the roles dualize (sup of r becomes the transpose's least
distinguished eigenvalue, inf of R is the spectral radius, attained exactly
when every basic class is final).

The decomposition helpers split a vector with one-sided image comparison
into an eigenvector part plus a strictly subcritical remainder, and the
zero-intersection battery checks the three equivalent no-nontrivial-image
conditions (equivalent over the orthant because it is polyhedral).
"""

from __future__ import annotations

import math
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
    Scalar,
    Tolerance,
    require_same_mode,
    require_same_size,
    scalar_lt,
    scalars_equal,
    snap_cone,
    support,
    zero,
)
from .eq_type1 import minimal_solution
from .eq_type2 import solvable_face_probe
from .spectral import (
    class_radii,
    distinguished_eigenvalues,
    local_spectral_radius,
    spectral_pair,
    spectral_radius,
    taxonomy,
)


@dataclass(frozen=True)
class CWReport:
    r_lower: Scalar
    R_upper: Scalar  # math.inf when the image leaves the face of x
    rho_x: Scalar

    def to_json_dict(self) -> dict:
        from .core import format_scalar

        return {
            "r_lower": format_scalar(self.r_lower),
            "R_upper": format_scalar(self.R_upper),
            "rho_x": format_scalar(self.rho_x),
        }


def cw_numbers(P: NonnegMatrix, x: ConeVector, tol: Tolerance = DEFAULT_TOL) -> CWReport:
    """Lower and upper Collatz-Wielandt numbers of x, with its local radius."""
    require_same_mode(P, x)
    require_same_size(P, x)
    if x.is_zero():
        raise InvalidInput("Collatz-Wielandt numbers need a nonzero vector")
    img = P.apply(x.entries)
    ratios = [img[i] / x.entries[i] for i in range(P.n) if x.entries[i] != 0]
    r = min(ratios)
    if support(ConeVector(img, P.mode)) <= support(x):
        R = max(ratios)
    else:
        R = math.inf
    return CWReport(r, R, local_spectral_radius(P, x, tol))


@dataclass(frozen=True)
class CWSets:
    sup_omega: Scalar
    inf_sigma: Scalar
    sup_omega1: Scalar
    inf_sigma1: Scalar
    inf_sigma1_attained: bool

    def to_json_dict(self) -> dict:
        from .core import format_scalar

        return {
            "sup_omega": format_scalar(self.sup_omega),
            "inf_sigma": format_scalar(self.inf_sigma),
            "sup_omega1": format_scalar(self.sup_omega1),
            "inf_sigma1": format_scalar(self.inf_sigma1),
            "inf_sigma1_attained": self.inf_sigma1_attained,
        }


def cw_sets(P: NonnegMatrix, tol: Tolerance = DEFAULT_TOL) -> CWSets:
    """Extrema of the four Collatz-Wielandt sets.

    sup over the cone of the lower number is the spectral radius (attained);
    inf of the upper number is the least distinguished eigenvalue (attained);
    over the interior, sup of the lower number is the transpose's least
    distinguished eigenvalue (attained -- the orthant is polyhedral) and inf
    of the upper number is the spectral radius, attained iff rho_in_sigma1.
    """
    rho = spectral_radius(P, tol)
    dvals = distinguished_eigenvalues(P, tol)
    dvals_t = distinguished_eigenvalues(P.transpose(), tol)
    inf_sigma = dvals[0] if dvals else zero(P.mode)
    sup_omega1 = dvals_t[0] if dvals_t else zero(P.mode)
    return CWSets(rho, inf_sigma, sup_omega1, rho, rho_in_sigma1(P, tol))


def rho_in_sigma1(P: NonnegMatrix, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Is there a strictly positive x with Px <= rho*x?  True iff every basic
    class is final.  Cross-checked against the face formulation: classes with
    access to a distinguished basic class, together with classes receiving no
    access from any basic class, must exhaust all classes."""
    analysis = condense(P)
    tax = taxonomy(P, tol)
    k = analysis.class_count
    primary = all(tax.final[c] for c in range(k) if tax.basic[c])
    dist_basic_mask = 0
    basic_reach = 0
    for c in range(k):
        if tax.basic[c]:
            basic_reach |= analysis.reach[c]
            if tax.distinguished[c]:
                dist_basic_mask |= 1 << c
    i1 = analysis.accessors_mask(dist_basic_mask)
    i2 = ~basic_reach & ((1 << k) - 1)
    full = (1 << k) - 1
    if primary != ((i1 | i2) == full):
        raise NumericFailure("final-class and face routes disagree on attainment")
    return primary


def _work_pair(P, x, rho_x):
    """Degrade to floats when the local radius is not an exact rational."""
    if P.mode == RATIONAL and not isinstance(rho_x, Fraction):
        return P.to_float(), ConeVector(tuple(float(e) for e in x.entries), FLOAT), float(rho_x)
    return P, x, rho_x


def decompose_subinvariant(
    P: NonnegMatrix, x: ConeVector, tol: Tolerance = DEFAULT_TOL
) -> tuple:
    """Split x with Px <= rho_x*x as x = x1 + x2, where x1 is a nonnegative
    eigenvector at rho_x (or zero) and x2 has local radius strictly below
    rho_x with Px2 <= rho_x*x2."""
    require_same_mode(P, x)
    require_same_size(P, x)
    if x.is_zero():
        raise InvalidInput("decomposition needs a nonzero vector")
    rho_x = local_spectral_radius(P, x, tol)
    P, x, rho_x = _work_pair(P, x, rho_x)
    img = P.apply(x.entries)
    try:
        b = snap_cone([rho_x * e - i for e, i in zip(x.entries, img)], P.mode, tol)
    except InvalidInput:
        raise InvalidInput(
            "the upper Collatz-Wielandt number exceeds the local spectral radius"
        )
    if b.is_zero():
        return x, ConeVector.zero_vector(P.n, P.mode)
    x2 = minimal_solution(P, rho_x, b, tol)
    x1 = snap_cone([e - f for e, f in zip(x.entries, x2.entries)], P.mode, tol)
    return x1, x2


def decompose_superinvariant(
    P: NonnegMatrix, x: ConeVector, tol: Tolerance = DEFAULT_TOL
) -> tuple:
    """Split x of order one with Px >= rho_x*x as x = x1 - x2, where x1 is a
    nonnegative eigenvector at rho_x and x2 has local radius strictly below
    rho_x with Px2 <= rho_x*x2."""
    require_same_mode(P, x)
    require_same_size(P, x)
    if x.is_zero():
        raise InvalidInput("decomposition needs a nonzero vector")
    pair = spectral_pair(P, x, tol)
    if pair.order != 1:
        raise InvalidInput("decomposition requires a vector of order one")
    rho_x = pair.rho
    P, x, rho_x = _work_pair(P, x, rho_x)
    img = P.apply(x.entries)
    try:
        b = snap_cone([i - rho_x * e for e, i in zip(x.entries, img)], P.mode, tol)
    except InvalidInput:
        raise InvalidInput(
            "the image must dominate the local-radius multiple of the vector"
        )
    if b.is_zero():
        return x, ConeVector.zero_vector(P.n, P.mode)
    x2 = minimal_solution(P, rho_x, b, tol)
    x1 = ConeVector(tuple(e + f for e, f in zip(x.entries, x2.entries)), P.mode)
    return x1, x2


@dataclass(frozen=True)
class ZeroIntersectionReport:
    """Three equivalent ways of saying the shifted image cone meets the
    orthant only at zero (equivalent here because the orthant is polyhedral).

    a   the transpose admits a positive vector with image below rho times it
    b   nonnegative generalized null vectors at rho are plain eigenvectors,
        and the access-closure of the basic classes carries no distinguished
        eigenvalue below rho
    c   no x >= 0 has (P - rho*I)x nonnegative and nonzero
    """

    a: bool
    b: bool
    c: bool

    def to_json_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c}


def zero_intersection_conditions(
    P: NonnegMatrix, tol: Tolerance = DEFAULT_TOL
) -> ZeroIntersectionReport:
    """Evaluate all three conditions (exact; needs a rational spectral radius)."""
    if P.mode != RATIONAL:
        raise InvalidInput("zero-intersection conditions run in rational mode only")
    rho = spectral_radius(P, tol)
    if not isinstance(rho, Fraction):
        raise InvalidInput(
            "zero-intersection conditions need an exact rational spectral radius"
        )
    cond_a = rho_in_sigma1(P.transpose(), tol)
    cond_b = _generalized_null_is_eigen(P, rho) and _basic_closure_no_lower_dval(P, rho, tol)
    cond_c = len(solvable_face_probe(P, rho, tol)) == 0
    return ZeroIntersectionReport(cond_a, cond_b, cond_c)


def _generalized_null_is_eigen(P: NonnegMatrix, rho: Fraction) -> bool:
    """No x >= 0 with (rho*I - P)^n x = 0 but (rho*I - P)x != 0, via one
    sign-probing LP per coordinate and sign."""
    n = P.n
    shift = oracle.shifted_image_rows(P, rho, sign=-1)  # rho*I - P
    powered = oracle.matrix_power_exact(shift, n)
    eq_rows = [(row, Fraction(0)) for row in powered]
    for i in range(n):
        for sgn in (1, -1):
            probe = [sgn * e for e in shift[i]]
            prob = oracle.LPProblem.build(
                n, eq_rows=eq_rows, ge_rows=[(probe, Fraction(1))]
            )
            if oracle.lp_feasible(prob).feasible:
                return False
    return True


def _basic_closure_no_lower_dval(P: NonnegMatrix, rho: Fraction, tol: Tolerance) -> bool:
    """The principal submatrix on classes with access to a basic class must
    have no distinguished eigenvalue other than rho."""
    analysis = condense(P)
    tax = taxonomy(P, tol)
    basic_mask = 0
    for c in range(analysis.class_count):
        if tax.basic[c]:
            basic_mask |= 1 << c
    j_verts = sorted(analysis.vertices_of_mask(analysis.accessors_mask(basic_mask)))
    if not j_verts:
        return True
    sub = P.submatrix(j_verts)
    dvals = distinguished_eigenvalues(sub, tol)
    return all(scalars_equal(v, rho, tol) for v in dvals)


@dataclass(frozen=True)
class BoundaryReport:
    """The image of x under (R*I - P) for finite upper number R lands on the
    relative boundary of the face of x; it generates the whole face exactly
    when the local radius sits strictly below R."""

    b: ConeVector
    on_boundary: bool
    strict_iff: bool

    def to_json_dict(self) -> dict:
        from .core import format_scalar

        return {
            "b": [format_scalar(e) for e in self.b.entries],
            "on_boundary": self.on_boundary,
            "strict_iff": self.strict_iff,
        }


def boundary_report(P: NonnegMatrix, x: ConeVector, tol: Tolerance = DEFAULT_TOL) -> BoundaryReport:
    require_same_mode(P, x)
    require_same_size(P, x)
    if x.is_zero():
        raise InvalidInput("boundary analysis needs a nonzero vector")
    cw = cw_numbers(P, x, tol)
    if cw.R_upper == math.inf:
        raise InvalidInput("the image leaves the face of x (upper number infinite)")
    img = P.apply(x.entries)
    b = snap_cone([cw.R_upper * e - i for e, i in zip(x.entries, img)], P.mode, tol)
    on_boundary = support(b) < support(x)
    analysis = condense(P)
    closure_is_face = (
        not b.is_zero()
        and smallest_initial_superset(analysis, support(b)) == support(x)
    )
    strict = scalar_lt(cw.rho_x, cw.R_upper, tol)
    return BoundaryReport(b, on_boundary, strict == closure_is_face)


@dataclass(frozen=True)
class PowerLimitReport:
    exists: bool  # ground truth from the eigencomponent decomposition
    orbit_evidence: Optional[bool]  # advisory: did the scaled orbit settle?

    def to_json_dict(self) -> dict:
        return {"exists": self.exists, "orbit_evidence": self.orbit_evidence}


def power_limit_exists(
    P: NonnegMatrix, x: ConeVector, tol: Tolerance = DEFAULT_TOL
) -> PowerLimitReport:
    """Does (P/rho_x)^k x converge?  True iff the only present component of x
    on the modulus-rho_x circle is an honest eigenvector at rho_x itself."""
    require_same_mode(P, x)
    require_same_size(P, x)
    if x.is_zero():
        raise InvalidInput("power limit needs a nonzero vector")
    rho_x = local_spectral_radius(P, x, tol)
    if rho_x <= 0:
        raise InvalidInput("power limit needs a positive local spectral radius")
    dec = oracle.decompose_generalized(P, x, tol)
    rho_f = float(rho_x)
    exists = True
    for comp in dec.present():
        if abs(comp.eigenvalue) < rho_f - tol.eig_tol * max(1.0, rho_f):
            continue
        is_rho = (
            abs(comp.eigenvalue.imag) <= tol.eig_tol * max(1.0, rho_f)
            and abs(comp.eigenvalue.real - rho_f) <= tol.eig_tol * max(1.0, rho_f)
        )
        if not is_rho or comp.order > 1:
            exists = False
    return PowerLimitReport(exists, _orbit_evidence(P, x, rho_f, tol))


def _orbit_evidence(P, x, rho_f: float, tol: Tolerance) -> Optional[bool]:
    a = P.to_numpy() / rho_f
    v = x.to_numpy()
    scale = max(1.0, float(np.max(np.abs(v))))
    stable = 0
    for _ in range(min(tol.power_iters, 2000)):
        w = a @ v
        nrm = float(np.max(np.abs(w)))
        if not np.isfinite(nrm) or nrm > 1e12 * scale:
            return False
        if float(np.max(np.abs(w - v))) <= 1e-9 * max(1.0, nrm):
            stable += 1
            if stable >= 3:
                return True
        else:
            stable = 0
        v = w
    return None
