"""Nonnegative solutions of (P - lambda*I)x = b with b >= 0.

Three regimes, split by the local spectral radius of b:

* lambda > rho_b:  solvable iff lambda is a distinguished eigenvalue and
  every class meeting supp(b) has access to a lambda-distinguished class.
  The solution is alpha*u - x0 for an eigenvector u and the minimal solution
  x0 of the mirrored type-1 system, and every solution has spectral pair
  (lambda, 1).
* lambda = rho_b:  decided by the exact LP oracle, after the necessary
  support conditions (lambda distinguished, supp(b) inside the strict-access
  face of the semi-distinguished lambda-classes) prune the obvious failures.
* lambda < rho_b:  decided by the exact LP oracle.

The module also exposes the face probes and witnesses describing the cone
(P - lambda*I)K intersected with K: which coordinates of a nonnegative image
can be strictly positive, an explicit certificate pair at lambda = rho, the
sign structure of the resolvent for irreducible matrices near rho, and the
largest real eigenvalue below rho bounding that window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import oracle
from .classes import condense
from .core import (
    DEFAULT_TOL,
    FLOAT,
    RATIONAL,
    ConeVector,
    InvalidInput,
    NonnegMatrix,
    NumericFailure,
    Scalar,
    SpectralPair,
    Tolerance,
    as_scalar,
    exact_fraction,
    require_same_mode,
    require_same_size,
    scalar_le,
    scalar_lt,
    scalars_equal,
    snap_cone,
    support,
    zero,
)
from .eq_type1 import minimal_solution
from .spectral import (
    class_radii,
    distinguished_eigenvalues,
    fv_eigenvector,
    local_spectral_radius,
    spectral_pair,
    spectral_radius,
    taxonomy,
)


def _check_inputs(P, lam, b):
    require_same_mode(P, b)
    require_same_size(P, b)
    if lam <= 0:
        raise InvalidInput("the shift must be strictly positive")


def _distinguished_at(P, lam, tol):
    """Class indices of distinguished classes whose radius equals lam."""
    analysis = condense(P)
    radii = class_radii(P, tol)
    tax = taxonomy(P, tol)
    return [
        c
        for c in range(analysis.class_count)
        if tax.distinguished[c] and scalars_equal(radii[c], lam, tol)
    ]


def combinatorial_solvable_above(P, lam, b, tol=DEFAULT_TOL) -> bool:
    """The access test for the regime lambda > rho_b: lambda distinguished and
    every class meeting supp(b) reaches a lambda-distinguished class."""
    dist = _distinguished_at(P, lam, tol)
    if not dist:
        return False
    analysis = condense(P)
    dist_mask = 0
    for c in dist:
        dist_mask |= 1 << c
    bmask = analysis.classes_meeting(support(b))
    for c in range(analysis.class_count):
        if bmask >> c & 1 and not (analysis.reach[c] & dist_mask):
            return False
    return True


def solve2_above(
    P: NonnegMatrix, lam: Scalar, b: ConeVector, tol: Tolerance = DEFAULT_TOL
) -> ConeVector:
    """Construct a nonnegative solution in the regime lambda > rho_b.

    x = alpha*u - x0 where u sums the eigenvectors of the lambda-distinguished
    classes reachable from supp(b), x0 solves (lambda*I - P)x0 = b minimally,
    and alpha is the smallest multiple keeping the difference nonnegative.
    """
    _check_inputs(P, lam, b)
    if b.is_zero():
        return ConeVector.zero_vector(P.n, P.mode)
    rho_b = local_spectral_radius(P, b, tol)
    if not scalar_lt(rho_b, lam, tol):
        raise InvalidInput("construction requires the shift to exceed the local radius of b")
    if not combinatorial_solvable_above(P, lam, b, tol):
        raise InvalidInput("no nonnegative solution exists at this shift")
    analysis = condense(P)
    bmask = analysis.classes_meeting(support(b))
    relevant = [
        c
        for c in _distinguished_at(P, lam, tol)
        if any(
            analysis.reach[d] >> c & 1
            for d in range(analysis.class_count)
            if bmask >> d & 1
        )
    ]
    vecs = [fv_eigenvector(P, c, tol) for c in relevant]
    x0 = minimal_solution(P, lam, b, tol)
    if any(v.mode != x0.mode for v in vecs):
        vecs = [ConeVector(tuple(float(e) for e in v.entries), FLOAT) for v in vecs]
        x0 = ConeVector(tuple(float(e) for e in x0.entries), FLOAT)
    mode = x0.mode
    u = [zero(mode)] * P.n
    for v in vecs:
        u = [a + e for a, e in zip(u, v.entries)]
    alpha = zero(mode)
    for ui, xi in zip(u, x0.entries):
        if xi != 0:
            ratio = xi / ui  # u is positive wherever x0 is
            if ratio > alpha:
                alpha = ratio
    entries = [alpha * ui - xi for ui, xi in zip(u, x0.entries)]
    return snap_cone(entries, mode, tol)


@dataclass(frozen=True)
class SolveReport2:
    regime: str  # "above" | "at" | "below"
    solvable: bool
    rho_b: Scalar
    x: Optional[ConeVector]
    certificate: str  # "cor4_2" | "lp" | "necessary_violated"
    spectral_pair_of_x: Optional[SpectralPair]

    def to_json_dict(self) -> dict:
        from .core import format_scalar

        pair = self.spectral_pair_of_x
        return {
            "regime": self.regime,
            "solvable": self.solvable,
            "rho_b": format_scalar(self.rho_b),
            "x": [format_scalar(e) for e in self.x.entries] if self.x else None,
            "certificate": self.certificate,
            "spectral_pair_of_x": None
            if pair is None
            else {"rho": format_scalar(pair.rho), "order": pair.order},
        }


def solvable2(
    P: NonnegMatrix, lam: Scalar, b: ConeVector, tol: Tolerance = DEFAULT_TOL
) -> SolveReport2:
    """Decide (P - lambda*I)x = b over the orthant and construct a solution."""
    _check_inputs(P, lam, b)
    if b.is_zero():
        x = ConeVector.zero_vector(P.n, P.mode)
        return SolveReport2("above", True, zero(P.mode), x, "cor4_2", SpectralPair(zero(P.mode), 0))
    rho_b = local_spectral_radius(P, b, tol)
    if scalar_lt(rho_b, lam, tol):
        if combinatorial_solvable_above(P, lam, b, tol):
            x = solve2_above(P, lam, b, tol)
            pair = spectral_pair(P, x, tol)
            _assert_above_pair(pair, lam, tol)
            return SolveReport2("above", True, rho_b, x, "cor4_2", pair)
        return SolveReport2("above", False, rho_b, None, "cor4_2", None)
    regime = "at" if scalars_equal(rho_b, lam, tol) else "below"
    if regime == "at":
        dist_vals = distinguished_eigenvalues(P, tol)
        lam_distinguished = any(scalars_equal(lam, v, tol) for v in dist_vals)
        if not lam_distinguished or not support(b) <= necessary_face(P, lam, tol):
            return SolveReport2("at", False, rho_b, None, "necessary_violated", None)
    res = _lp_solve(P, lam, b)
    if not res.feasible:
        return SolveReport2(regime, False, rho_b, None, "lp", None)
    x = ConeVector.make(res.witness, RATIONAL)
    if P.mode == FLOAT:
        x = ConeVector(tuple(float(e) for e in x.entries), FLOAT)
    pair = spectral_pair(P, x, tol)
    _assert_regime_pair(regime, pair, rho_b, lam, tol)
    return SolveReport2(regime, True, rho_b, x, "lp", pair)


def _lp_solve(P, lam, b):
    rows = oracle.shifted_image_rows(P, exact_fraction(lam))
    rhs = [exact_fraction(e) for e in b.entries]
    return oracle.feasible_nonneg_solution(rows, rhs)


def _assert_above_pair(pair, lam, tol):
    if not (scalars_equal(pair.rho, lam, tol) and pair.order == 1):
        raise NumericFailure("constructed solution has the wrong spectral pair")


def _assert_regime_pair(regime, pair, rho_b, lam, tol):
    # solutions at or below the shift keep the local radius of b
    if regime in ("at", "below") and not scalars_equal(pair.rho, rho_b, tol):
        raise NumericFailure("solution violates the local-radius dichotomy")


def necessary_face(P: NonnegMatrix, lam: Scalar, tol: Tolerance = DEFAULT_TOL) -> frozenset:
    """Vertices of classes strictly above some semi-distinguished lambda-class.

    Any b >= 0 with rho_b = lambda solvable in the type-2 equation must be
    supported here.  Requires lambda to be a distinguished eigenvalue; at
    lambda = rho the semi-distinguished lambda-classes are the basic classes.
    """
    dvals = distinguished_eigenvalues(P, tol)
    if not any(scalars_equal(lam, v, tol) for v in dvals):
        raise InvalidInput("the necessary face is defined at distinguished eigenvalues")
    analysis = condense(P)
    tax = taxonomy(P, tol)
    semi = tax.semi_distinguished_at(lam, tol)
    verts = []
    for c in range(analysis.class_count):
        if any(analysis.has_access(c, s) for s in semi if s != c):
            verts.extend(analysis.classes[c])
    return frozenset(verts)


def solvable_face_probe(P: NonnegMatrix, lam: Scalar, tol: Tolerance = DEFAULT_TOL) -> frozenset:
    """Coordinates that can be strictly positive in a nonnegative image:
    {i : exists x >= 0 with (P - lambda*I)x >= 0 and [(P - lambda*I)x]_i > 0}.

    One exact LP per coordinate (rational mode only): maximize the probed
    image coordinate over the normalized slice sum(x) = 1.
    """
    if P.mode != RATIONAL:
        raise InvalidInput("face probes run in rational mode only")
    lam = exact_fraction(lam)
    n = P.n
    img = oracle.shifted_image_rows(P, lam)
    out = []
    ge_rows = [(row, Fraction(0)) for row in img]
    norm_row = ([Fraction(1)] * n, Fraction(1))
    for i in range(n):
        prob = oracle.LPProblem.build(
            n,
            eq_rows=[norm_row],
            ge_rows=ge_rows,
            objective=img[i],
            maximize=True,
        )
        res = oracle.solve_lp(prob)
        if res.status == "optimal" and res.objective > 0:
            out.append(i + 1)
        elif res.status == "unbounded":  # cannot happen on the simplex slice
            raise NumericFailure("probe LP unbounded on a compact slice")
    return frozenset(out)


def tracedown_witness(P: NonnegMatrix, class_index: int, tol: Tolerance = DEFAULT_TOL):
    """An explicit pair (x, b), both nonnegative, with (P - rho*I)x = b and
    b supported exactly on the classes strictly above the given class.

    The class must be basic and distinguished for the transposed access
    relation (no other basic class reachable from it).  Nonbasic classes on
    the way up get half their inflow as image, basic ones contribute their
    Perron vectors.
    """
    analysis = condense(P)
    radii = class_radii(P, tol)
    tax = taxonomy(P, tol)
    k = analysis.class_count
    if not 0 <= class_index < k:
        raise InvalidInput(f"class index {class_index} outside 0..{k - 1}")
    if not (tax.basic[class_index] and tax.distinguished_transpose[class_index]):
        raise InvalidInput(
            "witness construction requires a basic class that is final among basic classes"
        )
    rho = tax.rho

    def block_of(c):
        cls = analysis.classes[c]
        return [[P.rows[i - 1][j - 1] for j in cls] for i in cls]

    from .spectral import _block_exact_row_sum

    # only the Perron-vector blocks (radius rho) constrain exactness; the
    # subcritical blocks are solved by exact elimination in either case
    exact = P.mode == RATIONAL and isinstance(rho, Fraction) and all(
        _block_exact_row_sum(block_of(c)) is not None or len(analysis.classes[c]) == 1
        for c in range(k)
        if analysis.has_access(c, class_index) and scalars_equal(radii[c], rho, tol)
    )
    mode = RATIONAL if exact else FLOAT
    work = P if mode == P.mode else P.to_float()
    rho_s = rho if mode == RATIONAL else float(rho)
    from .core import solve_linear
    from .spectral import perron_vector_block

    x_by_class = {}
    b_by_class = {}
    half = Fraction(1, 2) if mode == RATIONAL else 0.5
    for c in reversed(range(k)):
        if not analysis.has_access(c, class_index):
            continue
        cls = analysis.classes[c]
        if c == class_index:
            _, vec = perron_vector_block(
                [[work.rows[i - 1][j - 1] for j in cls] for i in cls], tol
            )
            x_by_class[c] = list(vec)
            b_by_class[c] = [zero(mode)] * len(cls)
            continue
        inflow = [zero(mode) for _ in cls]
        for d, xd in x_by_class.items():
            dcls = analysis.classes[d]
            for bi, i in enumerate(cls):
                inflow[bi] += sum(
                    work.rows[i - 1][j - 1] * xd[dj]
                    for dj, j in enumerate(dcls)
                    if work.rows[i - 1][j - 1] != 0
                )
        if scalars_equal(radii[c], rho, tol):
            _, vec = perron_vector_block(
                [[work.rows[i - 1][j - 1] for j in cls] for i in cls], tol
            )
            x_by_class[c] = list(vec)
            b_by_class[c] = inflow
        else:
            bb = [half * e for e in inflow]
            mrows = [
                [
                    (rho_s if bi == bj else zero(mode)) - work.rows[i - 1][j - 1]
                    for bj, j in enumerate(cls)
                ]
                for bi, i in enumerate(cls)
            ]
            sol = solve_linear(mrows, bb, mode)
            if sol is None:
                raise NumericFailure("singular block in witness construction")
            x_by_class[c] = sol
            b_by_class[c] = bb
    x_entries = [zero(mode)] * P.n
    b_entries = [zero(mode)] * P.n
    for c, xs in x_by_class.items():
        for bi, v in enumerate(analysis.classes[c]):
            x_entries[v - 1] = xs[bi]
            b_entries[v - 1] = b_by_class[c][bi]
    return ConeVector(tuple(x_entries), mode), ConeVector(tuple(b_entries), mode)


@dataclass(frozen=True)
class ResolventSign:
    inverse_positive: Optional[bool]  # None when P - lambda*I is singular
    adjugate_positive: bool

    def to_json_dict(self):
        return {
            "inverse_positive": self.inverse_positive,
            "adjugate_positive": self.adjugate_positive,
        }


def resolvent_sign(P: NonnegMatrix, lam: Scalar, tol: Tolerance = DEFAULT_TOL) -> ResolventSign:
    """Entrywise strict positivity of (P - lambda*I)^(-1) and adj(lambda*I - P)
    for an irreducible matrix.  Exact in rational mode; the float path uses a
    1e-7 positivity margin."""
    analysis = condense(P)
    if analysis.class_count != 1 or P.n == 0:
        raise InvalidInput("resolvent sign analysis requires an irreducible matrix")
    n = P.n
    if P.mode == RATIONAL:
        lam_r = exact_fraction(lam)
        shifted = [
            [P.rows[i][j] - (lam_r if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
        det, inv = _det_and_inverse_exact(shifted)
        if det == 0:
            inverse_positive = None
        else:
            inverse_positive = all(e > 0 for row in inv for e in row)
        adj = _adjugate_exact(
            [[-e for e in row] for row in shifted]  # lambda*I - P
        )
        adjugate_positive = all(e > 0 for row in adj for e in row)
        return ResolventSign(inverse_positive, adjugate_positive)
    a = P.to_numpy() - float(lam) * np.eye(n)
    margin = 1e-7
    try:
        inv = np.linalg.inv(a)
        inverse_positive = bool(np.all(inv > margin))
    except np.linalg.LinAlgError:
        inverse_positive = None
    madj = _adjugate_float(-a)
    adjugate_positive = bool(np.all(madj > margin))
    return ResolventSign(inverse_positive, adjugate_positive)


def _det_and_inverse_exact(rows):
    n = len(rows)
    a = [list(r) + [Fraction(1) if i == j else Fraction(0) for j in range(n)] for i, r in enumerate(rows)]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0), None
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = Fraction(1) / a[col][col]
        a[col] = [e * inv for e in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [e - f * p for e, p in zip(a[r], a[col])]
    return det, [row[n:] for row in a]


def _adjugate_exact(rows):
    n = len(rows)
    det, inv = _det_and_inverse_exact(rows)
    if det != 0:
        return [[det * inv[i][j] for j in range(n)] for i in range(n)]
    # singular: adj[j][i] = (-1)^(i+j) * minor_ij
    adj = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [rows[r][c] for c in range(n) if c != j]
                for r in range(n)
                if r != i
            ]
            d = _det_exact(minor)
            adj[j][i] = d if (i + j) % 2 == 0 else -d
    return adj


def _det_exact(rows):
    n = len(rows)
    if n == 0:
        return Fraction(1)
    a = [list(r) for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = Fraction(1) / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [e - f * p for e, p in zip(a[r], a[col])]
    return det


def _adjugate_float(a):
    n = a.shape[0]
    adj = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(a, i, axis=0), j, axis=1)
            sign = 1.0 if (i + j) % 2 == 0 else -1.0
            adj[j, i] = sign * (np.linalg.det(minor) if n > 1 else 1.0)
    return adj


def subcritical_window(P: NonnegMatrix, tol: Tolerance = DEFAULT_TOL) -> float:
    """Largest real eigenvalue strictly below the spectral radius (float),
    -inf when there is none.  Eigenvalues within 1e-5*max(1,rho) of rho are
    treated as part of the rho cluster (defective splits)."""
    rho = float(spectral_radius(P, tol))
    vals = oracle.eig_all(P, tol)
    cluster = 1e-5 * max(1.0, rho)
    best = -math.inf
    for v in vals:
        if v.imag != 0:
            continue
        if v.real < rho - cluster and v.real > best:
            best = v.real
    return best


@dataclass(frozen=True)
class MembershipReport:
    in_s1: bool  # b is a nonnegative image with rho_b <= lambda
    in_s2: bool  # ... with preimage supported on the generalized eigenface
    in_s3: bool  # support + spectral-pair upper bound

    def to_json_dict(self):
        return {"in_s1": self.in_s1, "in_s2": self.in_s2, "in_s3": self.in_s3}


def image_membership(
    P: NonnegMatrix, lam: Scalar, b: ConeVector, tol: Tolerance = DEFAULT_TOL
) -> MembershipReport:
    """Membership of b in the three nested image sets at a distinguished
    eigenvalue lambda (rational mode)."""
    _check_inputs(P, lam, b)
    if P.mode != RATIONAL:
        raise InvalidInput("image membership runs in rational mode only")
    dvals = distinguished_eigenvalues(P, tol)
    if not any(scalars_equal(lam, v, tol) for v in dvals):
        raise InvalidInput("membership is defined at distinguished eigenvalues")
    if b.is_zero():
        return MembershipReport(True, True, True)
    analysis = condense(P)
    tax = taxonomy(P, tol)
    semi = tax.semi_distinguished_at(lam, tol)
    semi_mask = 0
    for s in semi:
        semi_mask |= 1 << s
    j_verts = analysis.vertices_of_mask(analysis.accessors_mask(semi_mask))
    rows = oracle.shifted_image_rows(P, exact_fraction(lam))
    rhs = [exact_fraction(e) for e in b.entries]
    rho_b = local_spectral_radius(P, b, tol)
    in_s1 = scalar_le(rho_b, lam, tol) and oracle.feasible_nonneg_solution(rows, rhs).feasible
    in_s2 = oracle.feasible_nonneg_solution(rows, rhs, support_within=j_verts).feasible
    m_lam = _max_order(P, lam, tol)
    pair_b = spectral_pair(P, b, tol)
    from .core import lex_leq

    in_s3 = support(b) <= j_verts and lex_leq(
        pair_b, SpectralPair(as_scalar(lam, P.mode), m_lam - 1), tol
    )
    return MembershipReport(in_s1, in_s2, in_s3)


def _max_order(P, lam, tol):
    from .spectral import max_distinguished_order

    return max_distinguished_order(P, lam, tol)
