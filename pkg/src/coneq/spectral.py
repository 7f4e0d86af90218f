"""Spectral quantities tied to the class structure.

Per-class radii come out exactly whenever a diagonal block has constant row
sums (the radius is that sum); otherwise the block's Perron root is found by
power iteration on (block + I), which is primitive for an irreducible block,
and the scalar silently degrades to a float.  Comparisons downstream then
switch to tolerance-based automatically (see core.scalars_equal).

The local spectral radius of x is the largest class radius over classes with
access to supp(x); the order of x is the longest access chain of classes at
that radius inside the smallest initial superset of supp(x).  Both facts are
cross-checked against dense eigendecompositions in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import exp, log
from typing import Optional, Sequence

import numpy as np

from .classes import ClassAnalysis, ClassTaxonomy, classify, condense, smallest_initial_superset
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
    require_same_mode,
    require_same_size,
    scalar_le,
    scalars_equal,
    solve_linear,
    support,
    zero,
)


def _power_iteration_radius(block_rows, tol: Tolerance):
    """Perron root and positive eigenvector of an irreducible nonneg block,
    via power iteration on (block + I); returns (radius, vector) as floats.

    Iterates stay strictly positive, so min_i (Av)_i/v_i <= rho <= max_i
    (Av)_i/v_i sandwiches the root; the gap certifies the error, unlike a
    Cauchy test on successive estimates.
    """
    m = len(block_rows)
    a = np.array([[float(e) for e in row] for row in block_rows], dtype=float) + np.eye(m)
    v = np.ones(m) / m
    for _ in range(tol.power_iters):
        w = a @ v
        ratios = w / v
        lo = float(np.min(ratios))
        hi = float(np.max(ratios))
        if hi - lo <= tol.eig_tol * max(1.0, abs(hi)):
            mid = (lo + hi) / 2.0
            return mid - 1.0, tuple(float(e) for e in w / float(np.max(w)))
        v = w / float(np.max(w))
    raise NumericFailure("power iteration did not converge within the iteration cap")


def _block_exact_row_sum(block_rows):
    """The common row sum if the block has constant row sums, else None."""
    sums = [sum(row, zero_like(row)) for row in block_rows]
    first = sums[0]
    return first if all(s == first for s in sums) else None


def zero_like(row):
    return Fraction(0) if row and isinstance(row[0], Fraction) else 0.0


def perron_vector_block(block_rows, tol: Tolerance = DEFAULT_TOL):
    """(radius, positive eigenvector) for an irreducible block; exact with the
    all-ones vector when row sums are constant."""
    s = _block_exact_row_sum(block_rows)
    if s is not None:
        one_entry = Fraction(1) if isinstance(s, Fraction) else 1.0
        return s, tuple(one_entry for _ in block_rows)
    return _power_iteration_radius(block_rows, tol)


@lru_cache(maxsize=512)
def class_radii(P: NonnegMatrix, tol: Tolerance = DEFAULT_TOL) -> tuple:
    """Spectral radius of each diagonal block, in class order.

    Exact scalars where possible (1x1 blocks, constant row sums); float from
    power iteration otherwise, even in rational mode.
    """
    analysis = condense(P)
    out = []
    for cls in analysis.classes:
        block = [[P.rows[i - 1][j - 1] for j in cls] for i in cls]
        if len(block) == 1:
            out.append(block[0][0])
            continue
        s = _block_exact_row_sum(block)
        if s is not None:
            out.append(s)
        else:
            radius, _ = _power_iteration_radius(block, tol)
            out.append(radius)
    return tuple(out)


def spectral_radius(P: NonnegMatrix, tol: Tolerance = DEFAULT_TOL) -> Scalar:
    radii = class_radii(P, tol)
    return max(radii) if radii else zero(P.mode)


def taxonomy(P: NonnegMatrix, tol: Tolerance = DEFAULT_TOL) -> ClassTaxonomy:
    return classify(condense(P), class_radii(P, tol), tol)


def local_spectral_radius(
    P: NonnegMatrix,
    x: ConeVector,
    tol: Tolerance = DEFAULT_TOL,
    analysis: Optional[ClassAnalysis] = None,
    radii: Optional[tuple] = None,
) -> Scalar:
    """max class radius over classes with access to supp(x); zero for x = 0."""
    require_same_mode(P, x)
    require_same_size(P, x)
    if x.is_zero():
        return zero(P.mode)
    analysis = analysis or condense(P)
    radii = radii or class_radii(P, tol)
    target = analysis.classes_meeting(support(x))
    mask = analysis.accessors_mask(target)
    return max(radii[c] for c in range(analysis.class_count) if mask >> c & 1)


def local_radius_estimate(
    P: NonnegMatrix, x: ConeVector, m: int, tol: Tolerance = DEFAULT_TOL
) -> float:
    """||P^m x||^(1/m) with per-step renormalization (float lane).

    Returns 0.0 when the orbit hits zero exactly (the restriction of P to the
    cyclic subspace of x is then nilpotent).
    """
    if m < 1:
        raise InvalidInput("estimate needs at least one step")
    require_same_size(P, x)
    if x.is_zero():
        return 0.0
    a = P.to_numpy()
    v = x.to_numpy()
    nrm = float(np.max(np.abs(v)))
    v = v / nrm
    log_total = 0.0
    for _ in range(m):
        v = a @ v
        nrm = float(np.max(np.abs(v)))
        if nrm == 0.0:
            return 0.0
        if not np.isfinite(nrm):
            raise NumericFailure("orbit overflow despite renormalization")
        v = v / nrm
        log_total += log(nrm)
    return exp(log_total / m)


def distinguished_eigenvalues(P: NonnegMatrix, tol: Tolerance = DEFAULT_TOL) -> tuple:
    """Radii of distinguished classes, deduplicated, ascending.

    These are exactly the eigenvalues admitting a nonnegative eigenvector.
    """
    analysis = condense(P)
    radii = class_radii(P, tol)
    tax = classify(analysis, radii, tol)
    vals = [radii[c] for c in range(analysis.class_count) if tax.distinguished[c]]
    vals.sort()
    out = []
    for v in vals:
        if not out or not scalars_equal(out[-1], v, tol):
            out.append(v)
    return tuple(out)


def fv_eigenvector(
    P: NonnegMatrix, class_index: int, tol: Tolerance = DEFAULT_TOL
) -> ConeVector:
    """Nonnegative eigenvector attached to a distinguished class.

    The class's own block contributes its Perron vector; each class strictly
    above it gets the unique back-substituted block solution.  The support is
    exactly the set of vertices with access to the class.  Exact in rational
    mode whenever every involved block has constant row sums; otherwise the
    whole vector degrades to floats.
    """
    analysis = condense(P)
    radii = class_radii(P, tol)
    tax = classify(analysis, radii, tol)
    k = analysis.class_count
    if not 0 <= class_index < k:
        raise InvalidInput(f"class index {class_index} outside 0..{k - 1}")
    if not tax.distinguished[class_index]:
        raise InvalidInput("eigenvector construction requires a distinguished class")
    lam = radii[class_index]
    involved = [c for c in range(k) if analysis.has_access(c, class_index)]

    def block_of(c):
        cls = analysis.classes[c]
        return [[P.rows[i - 1][j - 1] for j in cls] for i in cls]

    exact = P.mode == RATIONAL and isinstance(lam, Fraction) and all(
        _block_exact_row_sum(block_of(c)) is not None or len(analysis.classes[c]) == 1
        for c in involved
    )
    mode = RATIONAL if exact else FLOAT
    work = P if mode == P.mode else P.to_float()
    lam_s = lam if mode == RATIONAL else float(lam)
    x_by_class = {}
    for c in reversed(range(k)):
        if not analysis.has_access(c, class_index):
            continue
        cls = analysis.classes[c]
        if c == class_index:
            _, vec = perron_vector_block(
                [[work.rows[i - 1][j - 1] for j in cls] for i in cls], tol
            )
            x_by_class[c] = list(vec)
            continue
        # rhs_beta = sum over known downstream classes of P_{beta,gamma} x_gamma
        rhs = [zero(mode) for _ in cls]
        for d, xd in x_by_class.items():
            dcls = analysis.classes[d]
            for bi, i in enumerate(cls):
                rhs[bi] += sum(
                    work.rows[i - 1][j - 1] * xd[dj]
                    for dj, j in enumerate(dcls)
                    if work.rows[i - 1][j - 1] != 0
                )
        mrows = [
            [
                (lam_s if bi == bj else zero(mode)) - work.rows[i - 1][j - 1]
                for bj, j in enumerate(cls)
            ]
            for bi, i in enumerate(cls)
        ]
        sol = solve_linear(mrows, rhs, mode)
        if sol is None:
            raise NumericFailure("singular block during eigenvector back-substitution")
        x_by_class[c] = sol
    entries = [zero(mode)] * P.n
    for c, xs in x_by_class.items():
        for bi, v in enumerate(analysis.classes[c]):
            entries[v - 1] = xs[bi]
    return ConeVector(tuple(entries), mode)


def _longest_chain(analysis: ClassAnalysis, members: Sequence[int]) -> int:
    """Longest access chain within the given class indices."""
    if not members:
        return 0
    member_set = set(members)
    best = {}
    for c in sorted(member_set, reverse=True):  # downstream first
        best[c] = 1 + max(
            (best[d] for d in member_set if d != c and analysis.has_access(c, d)),
            default=0,
        )
    return max(best.values())


def spectral_pair(
    P: NonnegMatrix, x: ConeVector, tol: Tolerance = DEFAULT_TOL
) -> SpectralPair:
    """(local spectral radius of x, order of x); (0, 0) for x = 0.

    The order is the longest access chain of classes at the local radius
    inside the smallest initial superset of supp(x).
    """
    require_same_mode(P, x)
    require_same_size(P, x)
    if x.is_zero():
        return SpectralPair(zero(P.mode), 0)
    analysis = condense(P)
    radii = class_radii(P, tol)
    mask = analysis.accessors_mask(analysis.classes_meeting(support(x)))
    members = [c for c in range(analysis.class_count) if mask >> c & 1]
    rho_x = max(radii[c] for c in members)
    at_radius = [c for c in members if scalars_equal(radii[c], rho_x, tol)]
    return SpectralPair(rho_x, _longest_chain(analysis, at_radius))


def eigenvalue_index(P: NonnegMatrix, lam: Scalar, tol: Tolerance = DEFAULT_TOL) -> int:
    """Longest access chain of classes whose radius equals lam (0 when none).

    At lam = spectral_radius(P) this is the true index of the eigenvalue (the
    longest chain of basic classes); below the spectral radius it measures
    only the class-level structure visible to the nonnegative orthant, not
    Jordan data hidden inside individual blocks.
    """
    analysis = condense(P)
    radii = class_radii(P, tol)
    members = [
        c for c in range(analysis.class_count) if scalars_equal(radii[c], lam, tol)
    ]
    return _longest_chain(analysis, members)


def max_distinguished_order(
    P: NonnegMatrix, lam: Scalar, tol: Tolerance = DEFAULT_TOL
) -> int:
    """Largest order among nonnegative generalized eigenvectors at lam.

    Computed on the largest initial subset whose classes all have radius at
    most lam: the longest access chain of radius-lam classes inside it.
    Requires lam to be a distinguished eigenvalue.
    """
    analysis = condense(P)
    radii = class_radii(P, tol)
    dvals = distinguished_eigenvalues(P, tol)
    if not any(scalars_equal(lam, v, tol) for v in dvals):
        raise InvalidInput("order bound requires a distinguished eigenvalue")
    k = analysis.class_count
    inside = [
        c
        for c in range(k)
        if all(
            scalar_le(radii[d], lam, tol)
            for d in range(k)
            if analysis.has_access(d, c)
        )
    ]
    members = [c for c in inside if scalars_equal(radii[c], lam, tol)]
    return _longest_chain(analysis, members)


@dataclass(frozen=True)
class SpectralReport:
    rho: Scalar
    radii: tuple
    distinguished: tuple
    index_at: tuple  # (eigenvalue, chain index) pairs
    max_order_at: tuple  # (eigenvalue, distinguished order bound) pairs

    def to_json_dict(self) -> dict:
        from .core import format_scalar

        return {
            "rho": format_scalar(self.rho),
            "class_radii": [format_scalar(r) for r in self.radii],
            "distinguished_eigenvalues": [format_scalar(v) for v in self.distinguished],
            "index": {str(format_scalar(v)): k for v, k in self.index_at},
            "max_distinguished_order": {
                str(format_scalar(v)): k for v, k in self.max_order_at
            },
        }


def spectral_report(P: NonnegMatrix, tol: Tolerance = DEFAULT_TOL) -> SpectralReport:
    radii = class_radii(P, tol)
    rho = max(radii) if radii else zero(P.mode)
    dvals = distinguished_eigenvalues(P, tol)
    probe_vals = list(dvals)
    if not any(scalars_equal(rho, v, tol) for v in probe_vals):
        probe_vals.append(rho)
    index_at = tuple((v, eigenvalue_index(P, v, tol)) for v in probe_vals)
    max_order_at = tuple((v, max_distinguished_order(P, v, tol)) for v in dvals)
    return SpectralReport(rho, radii, dvals, index_at, max_order_at)
