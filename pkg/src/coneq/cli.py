"""Command-line front door: JSON files in, one JSON document on stdout.

Verbs: analyze, solve1, solve2, cw, alt, check.  Exit codes: 0 = command
completed (an "unsolvable" verdict is a completed command), 2 = bad input,
3 = numeric failure.
"""

import argparse
import json
import sys
from fractions import Fraction

from . import alternating, collatz_wielandt, eq_type1, eq_type2, oracle, spectral
from .classes import condense, smallest_initial_superset
from .core import (
    DEFAULT_TOL,
    FLOAT,
    RATIONAL,
    ConeVector,
    InvalidInput,
    NonnegMatrix,
    NumericFailure,
    as_scalar,
    exact_fraction,
    format_scalar,
    one,
    scalar_lt,
    scalars_equal,
)

PROPERTY_IDS = (
    "thm3.1",
    "cor4.2",
    "thm4.13",
    "cor4.20",
    "thm5.10",
    "thm5.11",
    "cor6.4",
    "cor4.8-gap",
)


# ---------------------------------------------------------------------------
# input readers


def _read_scalar(raw, mode):
    if isinstance(raw, bool):
        raise InvalidInput("booleans are not scalars")
    try:
        return as_scalar(raw, mode)
    except InvalidInput:
        raise
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise InvalidInput(f"cannot read scalar {raw!r}") from exc


def _load_doc(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    try:
        # parse_float/parse_constant keep decimal literals intact so rational
        # mode can read "0.1" as 1/10 rather than the nearest double
        return json.loads(text, parse_float=str, parse_constant=str)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"bad JSON in {path}: {exc}") from exc


def _matrix_from_path(path: str, mode: str) -> NonnegMatrix:
    doc = _load_doc(path)
    if not isinstance(doc, dict):
        raise InvalidInput(f"{path}: matrix document must be a JSON object")
    extra = set(doc) - {"n", "entries"}
    if extra:
        raise InvalidInput(f"{path}: unknown matrix keys {sorted(extra)}")
    entries = doc.get("entries")
    if not isinstance(entries, list) or not all(isinstance(r, list) for r in entries):
        raise InvalidInput(f"{path}: 'entries' must be a list of rows")
    rows = [[_read_scalar(v, mode) for v in row] for row in entries]
    n = doc.get("n")
    if n is not None and (isinstance(n, bool) or n != len(rows)):
        raise InvalidInput(f"{path}: 'n' disagrees with the entry rows")
    return NonnegMatrix.make(rows, mode)


def _vector_from_path(path: str, mode: str, n: int) -> ConeVector:
    doc = _load_doc(path)
    if not isinstance(doc, dict):
        raise InvalidInput(f"{path}: vector document must be a JSON object")
    extra = set(doc) - {"n", "entries"}
    if extra:
        raise InvalidInput(f"{path}: unknown vector keys {sorted(extra)}")
    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise InvalidInput(f"{path}: 'entries' must be a list")
    vec = ConeVector.make([_read_scalar(v, mode) for v in entries], mode)
    if vec.n != n:
        raise InvalidInput(f"{path}: vector length {vec.n} != matrix size {n}")
    return vec


def _flag_scalar(text: str, mode: str):
    return _read_scalar(text, mode)


# ---------------------------------------------------------------------------
# verbs


def _cmd_analyze(P: NonnegMatrix, tol) -> dict:
    analysis = condense(P)
    tax = spectral.taxonomy(P, tol)
    out = analysis.to_json_dict()
    out["taxonomy"] = tax.to_json_dict()
    out["spectral"] = spectral.spectral_report(P, tol).to_json_dict()
    faces = []
    for lam in spectral.distinguished_eigenvalues(P, tol):
        mask = 0
        for c in range(analysis.class_count):
            if tax.distinguished[c] and scalars_equal(tax.radii[c], lam, tol):
                mask |= 1 << c
        carriers = analysis.vertices_of_mask(analysis.accessors_mask(mask))
        faces.append(
            {
                "eigenvalue": format_scalar(lam),
                "eigenvector_face": sorted(carriers),
                "necessary_face": sorted(eq_type2.necessary_face(P, lam, tol)),
            }
        )
    out["faces"] = faces
    return out


# ---------------------------------------------------------------------------
# check property suites; each runs on the given matrix alone, with test
# vectors and shifts derived deterministically from it


def _sample_vectors(P: NonnegMatrix) -> list:
    vecs = [ConeVector.unit(P.n, i, P.mode) for i in range(1, P.n + 1)]
    vecs.append(ConeVector.make([one(P.mode)] * P.n, P.mode))
    return vecs


def _shift_sweep(P: NonnegMatrix, tol, offsets) -> list:
    """Per-class radius +- 1/3 (positive shifts only), deduplicated."""
    radii = spectral.class_radii(P, tol)
    out = []
    for r in radii:
        for d in offsets:
            lam = r + (d if isinstance(r, Fraction) else float(d))
            if lam <= 0:
                continue
            if not any(scalars_equal(lam, seen, tol) for seen in out):
                out.append(lam)
    return out


def _type1_rows(P: NonnegMatrix, lam) -> list:
    return oracle.shifted_image_rows(P, lam, sign=-1)  # lambda*I - P


def _type2_rows(P: NonnegMatrix, lam) -> list:
    return oracle.shifted_image_rows(P, lam, sign=1)  # P - lambda*I


def _rhs(b: ConeVector) -> list:
    return [exact_fraction(e) for e in b.entries]


def _is_zero(v, tol) -> bool:
    # exact in the rational lane, tolerance-based for floats
    return v == 0 if isinstance(v, Fraction) else scalars_equal(v, 0.0, tol)


def _check_type1_battery(P: NonnegMatrix, tol) -> dict:
    offsets = (Fraction(-1, 3), Fraction(1, 3))
    cases = 0
    bad = None
    for lam in _shift_sweep(P, tol, offsets):
        for b in _sample_vectors(P):
            rep = eq_type1.solvability_conditions(P, lam, b, tol)
            lp = oracle.feasible_nonneg_solution(_type1_rows(P, lam), _rhs(b)).feasible
            cases += 1
            votes = (rep.b, rep.g, rep.h, rep.j)
            if not rep.consistent or any(v != lp for v in votes):
                bad = bad or {
                    "lambda": format_scalar(lam),
                    "b": [format_scalar(e) for e in b.entries],
                    "battery": rep.to_json_dict(),
                    "lp": lp,
                }
    return {"pass": bad is None, "cases": cases, "counterexample": bad}


def _check_above_regime(P: NonnegMatrix, tol) -> dict:
    cases = 0
    bad = None
    sweep = _shift_sweep(P, tol, (Fraction(1, 3),))
    rho = spectral.spectral_radius(P, tol)
    sweep.append(rho + (Fraction(1) if isinstance(rho, Fraction) else 1.0))
    for lam in sweep:
        for b in _sample_vectors(P):
            if not scalar_lt(spectral.local_spectral_radius(P, b, tol), lam, tol):
                continue
            comb = eq_type2.combinatorial_solvable_above(P, lam, b, tol)
            lp = oracle.feasible_nonneg_solution(_type2_rows(P, lam), _rhs(b)).feasible
            cases += 1
            issue = None
            if comb != lp:
                issue = "combinatorial test disagrees with the LP"
            elif comb:
                x = eq_type2.solve2_above(P, lam, b, tol)
                img = P.apply(x.entries)
                resid = [img[i] - lam * x.entries[i] - b.entries[i] for i in range(P.n)]
                pair = spectral.spectral_pair(P, x, tol)
                if not all(_is_zero(r, tol) for r in resid):
                    issue = "constructed solution has a nonzero residual"
                elif not (scalars_equal(pair.rho, lam, tol) and pair.order == 1):
                    issue = "constructed solution has the wrong spectral pair"
            if issue is not None:
                bad = bad or {
                    "lambda": format_scalar(lam),
                    "b": [format_scalar(e) for e in b.entries],
                    "issue": issue,
                }
    return {"pass": bad is None, "cases": cases, "counterexample": bad}


def _verify_tracedown(P: NonnegMatrix, analysis, rho, c: int, tol):
    """Residual and support pattern of one trace-down witness; None if good."""
    x, b = eq_type2.tracedown_witness(P, c, tol)
    img = P.apply(x.entries)
    resid = [img[i] - rho * x.entries[i] - b.entries[i] for i in range(P.n)]
    if not all(_is_zero(r, tol) for r in resid):
        return "residual"
    for d in range(analysis.class_count):
        verts = analysis.classes[d]
        has_b = any(b.entries[v - 1] != 0 for v in verts)
        pos_x = all(x.entries[v - 1] > 0 for v in verts)
        zero_x = all(x.entries[v - 1] == 0 for v in verts)
        if analysis.has_access(d, c):
            if not pos_x:
                return "x not positive on an accessor class"
            if has_b != (d != c):
                return "b support breaks the strict-access pattern"
        elif not zero_x or has_b:
            return "support leaks outside the accessors"
    return None


def _check_face_at_rho(P: NonnegMatrix, tol) -> dict:
    if P.mode != RATIONAL:
        raise InvalidInput("this check runs in rational mode only")
    rho = spectral.spectral_radius(P, tol)
    if not isinstance(rho, Fraction):
        raise InvalidInput("this check needs an exact rational spectral radius")
    probe = eq_type2.solvable_face_probe(P, rho, tol)
    analysis = condense(P)
    closure = smallest_initial_superset(analysis, probe)
    necessary = eq_type2.necessary_face(P, rho, tol)
    issues = []
    if closure != necessary:
        issues.append("probe closure differs from the necessary face")
    tax = spectral.taxonomy(P, tol)
    witnesses = 0
    for c in range(analysis.class_count):
        if tax.basic[c] and tax.distinguished_transpose[c]:
            witnesses += 1
            problem = _verify_tracedown(P, analysis, rho, c, tol)
            if problem is not None:
                issues.append(f"trace-down witness for class {c}: {problem}")
    return {
        "pass": not issues,
        "probe": sorted(probe),
        "necessary_face": sorted(necessary),
        "tracedown_witnesses": witnesses,
        "issues": issues,
    }


def _poly_at(coeffs, v: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * v + c
    return acc


def _certified_window_shift(coeffs, lo: float, rho: Fraction, k: int):
    """A rational shift in (lo, rho), Sturm-certified: not an eigenvalue, and
    no other real eigenvalue between it and rho.  None if six nudges toward
    rho all fail."""
    rho_f = float(rho)
    t = lo + (rho_f - lo) * k / 4.0
    for _ in range(6):
        lam = Fraction(t).limit_denominator(10**6)
        if float(lam) > lo and lam < rho:
            if (
                _poly_at(coeffs, lam) != 0
                and oracle.count_real_roots_in(coeffs, lam, rho) == 1
            ):
                return lam
        t = (t + rho_f) / 2.0
    return None


def _check_window_below_rho(P: NonnegMatrix, tol) -> dict:
    if P.mode != RATIONAL:
        raise InvalidInput("this check runs in rational mode only")
    rho = spectral.spectral_radius(P, tol)
    if not isinstance(rho, Fraction):
        raise InvalidInput("this check needs an exact rational spectral radius")
    analysis = condense(P)
    tax = spectral.taxonomy(P, tol)
    basic_mask = 0
    for c in range(analysis.class_count):
        if tax.basic[c]:
            basic_mask |= 1 << c
    expected = analysis.vertices_of_mask(analysis.accessors_mask(basic_mask))
    rho_f = float(rho)
    reals = [v.real for v in oracle.eig_all(P, tol) if v.imag == 0]
    below = [v for v in reals if v < rho_f - 1e-9 * max(1.0, rho_f)]
    lo = max(below) if below else rho_f - 1.0
    coeffs = oracle.charpoly_exact(P)
    samples = []
    bad = None
    for k in (1, 2, 3):
        lam = _certified_window_shift(coeffs, lo, rho, k)
        if lam is None:
            continue
        # count_real_roots_in certified (lam, rho] holds no eigenvalue but rho
        probe = eq_type2.solvable_face_probe(P, lam, tol)
        samples.append(format_scalar(lam))
        if probe != expected:
            bad = bad or {
                "lambda": format_scalar(lam),
                "probe": sorted(probe),
                "expected": sorted(expected),
            }
    ok = bad is None and bool(samples)
    out = {"pass": ok, "samples": samples, "counterexample": bad}
    if not samples:
        out["issues"] = ["no certified shift window below the spectral radius"]
    return out


def _check_rho_attained(P: NonnegMatrix, tol) -> dict:
    rho = spectral.spectral_radius(P, tol)
    if not isinstance(rho, Fraction):
        raise InvalidInput("this check needs an exact rational spectral radius")
    flag = collatz_wielandt.rho_in_sigma1(P, tol)
    n = P.n
    rows = []
    for i in range(n):
        unit_row = [Fraction(1) if j == i else Fraction(0) for j in range(n)]
        rows.append((unit_row, Fraction(1)))  # x_i >= 1, i.e. x > 0 after scaling
    for i in range(n):
        slack = [(rho if j == i else 0) - P.rows[i][j] for j in range(n)]
        rows.append((slack, Fraction(0)))  # (rho*I - P)x >= 0
    lp = oracle.lp_feasible(oracle.LPProblem.build(n, ge_rows=rows)).feasible
    return {"pass": flag == lp, "rho_in_sigma1": flag, "lp_agrees": flag == lp}


def _check_zero_intersection(P: NonnegMatrix, tol) -> dict:
    rep = collatz_wielandt.zero_intersection_conditions(P, tol)
    ok = rep.a == rep.b == rep.c
    out = rep.to_json_dict()
    out["pass"] = ok
    return out


def _check_alternating_bounds(P: NonnegMatrix, tol) -> dict:
    cases = 0
    bad = None
    for x in _sample_vectors(P):
        rep = alternating.alternating_bound_report(P, x, tol)
        cases += 1
        ok = (
            rep.m_observed <= rep.ord <= rep.nu
            and rep.gamma_deduction is not False
        )
        if not ok:
            bad = bad or {
                "x": [format_scalar(e) for e in x.entries],
                "report": rep.to_json_dict(),
            }
    return {"pass": bad is None, "cases": cases, "counterexample": bad}


def _check_membership_gap(P: NonnegMatrix, tol) -> dict:
    if P.mode != RATIONAL:
        raise InvalidInput("this check runs in rational mode only")
    cases = 0
    gap = 0
    bad = None
    for lam in spectral.distinguished_eigenvalues(P, tol):
        if not isinstance(lam, Fraction) or lam <= 0:
            continue
        for b in _sample_vectors(P):
            rep = eq_type2.image_membership(P, lam, b, tol)
            cases += 1
            if rep.in_s2 and not rep.in_s3:
                bad = bad or {
                    "lambda": format_scalar(lam),
                    "b": [format_scalar(e) for e in b.entries],
                }
            if rep.in_s3 and not rep.in_s2:
                gap += 1
    return {"pass": bad is None, "cases": cases, "gap_examples": gap, "counterexample": bad}


PROPERTY_SUITES = {
    "thm3.1": _check_type1_battery,
    "cor4.2": _check_above_regime,
    "thm4.13": _check_face_at_rho,
    "cor4.20": _check_window_below_rho,
    "thm5.10": _check_rho_attained,
    "thm5.11": _check_zero_intersection,
    "cor6.4": _check_alternating_bounds,
    "cor4.8-gap": _check_membership_gap,
}


# ---------------------------------------------------------------------------
# argument plumbing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coneq",
        description="Nonnegative solutions of (lambda*I-P)x=b and (P-lambda*I)x=b.",
    )
    parser.add_argument(
        "--mode",
        choices=(RATIONAL, FLOAT),
        default=RATIONAL,
        help="arithmetic mode for all data (default: rational)",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("analyze", help="classes, taxonomy, spectrum and faces")
    p.add_argument("matrix")

    p = sub.add_parser("solve1", help="decide/construct x >= 0 with (lambda*I-P)x = b")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--b", dest="b", required=True)
    p.add_argument("matrix")

    p = sub.add_parser("solve2", help="decide/construct x >= 0 with (P-lambda*I)x = b")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--b", dest="b", required=True)
    p.add_argument("matrix")

    p = sub.add_parser("cw", help="Collatz-Wielandt numbers (with --x) or set extrema")
    p.add_argument("--x", dest="x")
    p.add_argument("matrix")

    p = sub.add_parser("alt", help="alternating sequence length at a shift")
    p.add_argument("--shift", required=True)
    p.add_argument("--x", dest="x", required=True)
    p.add_argument("--max-steps", dest="max_steps", type=int)
    p.add_argument("matrix")

    p = sub.add_parser("check", help="run a named property suite on the matrix")
    p.add_argument("--property", dest="prop", required=True, choices=PROPERTY_IDS)
    p.add_argument("matrix")

    return parser


def _dispatch(args) -> dict:
    mode = args.mode
    tol = DEFAULT_TOL
    P = _matrix_from_path(args.matrix, mode)
    if args.verb == "analyze":
        return _cmd_analyze(P, tol)
    if args.verb == "solve1":
        lam = _flag_scalar(args.lam, mode)
        b = _vector_from_path(args.b, mode, P.n)
        return eq_type1.solve1(P, lam, b, tol).to_json_dict()
    if args.verb == "solve2":
        lam = _flag_scalar(args.lam, mode)
        b = _vector_from_path(args.b, mode, P.n)
        return eq_type2.solvable2(P, lam, b, tol).to_json_dict()
    if args.verb == "cw":
        if args.x is not None:
            x = _vector_from_path(args.x, mode, P.n)
            return collatz_wielandt.cw_numbers(P, x, tol).to_json_dict()
        return collatz_wielandt.cw_sets(P, tol).to_json_dict()
    if args.verb == "alt":
        s = _flag_scalar(args.shift, mode)
        x = _vector_from_path(args.x, mode, P.n)
        Z = alternating.ZMatrix.make(s, P)
        return alternating.alt_length(Z, x, args.max_steps, tol).to_json_dict()
    if args.verb == "check":
        return PROPERTY_SUITES[args.prop](P, tol)
    raise InvalidInput(f"unknown verb {args.verb!r}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        payload = _dispatch(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    print(json.dumps(payload, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
