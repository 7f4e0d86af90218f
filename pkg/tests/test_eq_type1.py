from fractions import Fraction

import pytest
from pytest import raises as assert_raises

from coneq.core import (
    DEFAULT_TOL,
    FLOAT,
    RATIONAL,
    ConeVector,
    InvalidInput,
    NonnegMatrix,
    support,
)
from coneq.classes import condense, smallest_initial_superset
from coneq.spectral import local_spectral_radius
from coneq.eq_type1 import (
    minimal_solution,
    neumann_partial,
    solvability_conditions,
    solvable1,
    solvable_set,
    solve1,
)
from coneq import oracle

from fuzz import fuzz_matrix, fuzz_vector, lambda_sweep, rng


def mat(rows, mode=RATIONAL):
    return NonnegMatrix.make(rows, mode)


F = Fraction
D = mat([[0, 0, 0], [0, 1, 0], [0, 0, 2]])
T = mat([[2, 0], [1, 1]])
U = mat([[1, 1], [0, 1]])


def vec(*entries):
    return ConeVector.make(list(entries))


class TestDecision:
    def test_blocked_by_the_local_radius(self):
        assert not solvable1(D, F(1), ConeVector.unit(3, 3))
        assert solvable1(D, F(3), ConeVector.unit(3, 3))
        assert solvable1(D, F(1), ConeVector.unit(3, 1))
        assert solvable1(T, F(3), vec(1, 1))
        assert not solvable1(T, F(2), vec(1, 1))

    def test_shift_must_be_positive(self):
        with assert_raises(InvalidInput):
            solvable1(T, F(0), vec(1, 1))
        with assert_raises(InvalidInput):
            solvable1(T, F(-1), vec(1, 1))
        with assert_raises(InvalidInput):
            solve1(T, 0, vec(1, 1))

    def test_dimension_and_mode_guards(self):
        with assert_raises(InvalidInput):
            solvable1(T, F(1), ConeVector.unit(3, 1))
        with assert_raises(InvalidInput):
            solvable1(T, F(1), ConeVector.unit(2, 1, FLOAT))

    def test_report_fields_when_unsolvable(self):
        rep = solve1(D, F(1), ConeVector.unit(3, 3))
        assert not rep.solvable
        assert rep.rho_b == F(2)
        assert rep.x0 is None and rep.unique is None
        assert rep.fired_condition == "h"
        assert rep.witness_class == condense(D).class_of_vertex(3)
        assert rep.eigen_freedom == (condense(D).class_of_vertex(2),)

    def test_decision_agrees_with_feasibility(self):
        rnd = rng(61)
        cases = 0
        for _ in range(60):
            P = fuzz_matrix(rnd)
            b = fuzz_vector(rnd, P.n)
            for lam in lambda_sweep(P, DEFAULT_TOL):
                if not isinstance(lam, Fraction):
                    continue
                rows = oracle.shifted_image_rows(P, lam, sign=-1)
                lp = oracle.feasible_nonneg_solution(rows, [Fraction(e) for e in b.entries])
                assert solvable1(P, lam, b) == lp.feasible
                cases += 1
        assert cases >= 150


class TestMinimalSolution:
    def test_examples(self):
        rep = solve1(T, F(3), vec(1, 1))
        assert rep.solvable and rep.x0.entries == (F(1), F(1))
        assert rep.unique is True and rep.residual_norm == 0
        assert solve1(U, F(2), vec(1, 0)).x0.entries == (F(1), F(0))
        rep = solve1(D, F(1), ConeVector.unit(3, 1))
        assert rep.x0.entries == (F(1), F(0), F(0))
        assert rep.unique is False and rep.eigen_freedom != ()

    def test_requires_solvability(self):
        with assert_raises(InvalidInput):
            minimal_solution(D, F(1), ConeVector.unit(3, 3))

    def test_zero_rhs(self):
        assert minimal_solution(T, F(1), ConeVector.zero_vector(2)).is_zero()

    def test_structure_on_fuzz(self):
        rnd = rng(62)
        for _ in range(50):
            P = fuzz_matrix(rnd)
            b = fuzz_vector(rnd, P.n)
            for lam in lambda_sweep(P, DEFAULT_TOL):
                if not isinstance(lam, Fraction) or not solvable1(P, lam, b):
                    continue
                x0 = minimal_solution(P, lam, b)
                # exact residual
                img = P.apply(x0.entries)
                assert tuple(lam * e - i for e, i in zip(x0.entries, img)) == b.entries
                # support fills the smallest invariant face around b
                assert support(x0) == smallest_initial_superset(condense(P), support(b))
                # the solution inherits the local radius of b
                assert local_spectral_radius(P, x0) == local_spectral_radius(P, b)

    def test_minimality_against_lp_witnesses(self):
        rnd = rng(63)
        checked = 0
        for _ in range(40):
            P = fuzz_matrix(rnd)
            b = fuzz_vector(rnd, P.n)
            for lam in lambda_sweep(P, DEFAULT_TOL):
                if not isinstance(lam, Fraction) or not solvable1(P, lam, b):
                    continue
                x0 = minimal_solution(P, lam, b)
                rows = oracle.shifted_image_rows(P, lam, sign=-1)
                w = oracle.feasible_nonneg_solution(rows, [Fraction(e) for e in b.entries]).witness
                assert all(a <= c for a, c in zip(x0.entries, w))
                checked += 1
        assert checked >= 40

    def test_uniqueness_flag_matches_the_kernel(self):
        rnd = rng(64)
        checked = 0
        for _ in range(40):
            P = fuzz_matrix(rnd)
            b = fuzz_vector(rnd, P.n)
            for lam in lambda_sweep(P, DEFAULT_TOL):
                if not isinstance(lam, Fraction) or not solvable1(P, lam, b):
                    continue
                rep = solve1(P, lam, b)
                rows = oracle.shifted_image_rows(P, lam, sign=-1)
                eqs = [(row, Fraction(0)) for row in rows]
                eqs.append(([Fraction(1)] * P.n, Fraction(1)))
                kernel = oracle.lp_feasible(oracle.LPProblem.build(P.n, eq_rows=eqs))
                assert rep.unique == (not kernel.feasible)
                checked += 1
        assert checked >= 40


class TestNeumann:
    def test_partial_sums(self):
        assert neumann_partial(U, F(2), vec(1, 0), 0).entries == (F(1, 2), F(0))
        assert neumann_partial(U, F(2), vec(1, 0), 5).entries == (F(63, 64), F(0))
        with assert_raises(InvalidInput):
            neumann_partial(U, F(2), vec(1, 0), -1)

    def test_monotone_convergence_to_the_minimal_solution(self):
        rnd = rng(65)
        for _ in range(25):
            P = fuzz_matrix(rnd)
            b = fuzz_vector(rnd, P.n)
            for lam in lambda_sweep(P, DEFAULT_TOL):
                if not isinstance(lam, Fraction) or not solvable1(P, lam, b):
                    continue
                x0 = minimal_solution(P, lam, b)
                prev = neumann_partial(P, lam, b, 0)
                for m in (1, 3, 8):
                    cur = neumann_partial(P, lam, b, m)
                    assert all(p <= c for p, c in zip(prev.entries, cur.entries))
                    assert all(c <= e for c, e in zip(cur.entries, x0.entries))
                    prev = cur
                break  # one shift per matrix keeps this quick


class TestSolvableSet:
    def test_examples(self):
        assert solvable_set(D, F(1)) == {1}
        assert solvable_set(D, F(3)) == {1, 2, 3}
        assert solvable_set(U, F(1)) == frozenset()
        assert solvable_set(T, F(2)) == {2}
        with assert_raises(InvalidInput):
            solvable_set(T, F(0))

    def test_describes_exactly_the_solvable_supports(self):
        rnd = rng(66)
        for _ in range(30):
            P = fuzz_matrix(rnd)
            for lam in lambda_sweep(P, DEFAULT_TOL):
                if not isinstance(lam, Fraction) or lam <= 0:
                    continue
                good = solvable_set(P, lam)
                for i in range(1, P.n + 1):
                    assert solvable1(P, lam, ConeVector.unit(P.n, i)) == (i in good)


class TestConditionBattery:
    def test_all_false(self):
        rep = solvability_conditions(D, F(1), ConeVector.unit(3, 3))
        assert rep.to_json_dict() == {
            "b": False, "c": False, "d": False, "e": False, "f": False,
            "g": False, "h": False, "i": False, "j": False, "consistent": True,
        }

    def test_all_true(self):
        rep = solvability_conditions(NonnegMatrix.zero_matrix(2, RATIONAL), F(1), vec(1, 0))
        d = rep.to_json_dict()
        assert d["consistent"] and all(d[k] for k in "bcdefghij")
        rep = solvability_conditions(T, F(3), vec(1, 1))
        assert rep.consistent and rep.b and rep.g and rep.j

    def test_iterative_checks_may_abstain(self):
        rep = solvability_conditions(U, F(1), vec(1, 0))
        assert rep.c is None and rep.d is None
        assert rep.consistent and not rep.b

    def test_rejects_zero_rhs(self):
        with assert_raises(InvalidInput):
            solvability_conditions(T, F(1), ConeVector.zero_vector(2))

    def test_battery_agrees_with_feasibility(self):
        rnd = rng(67)
        cases = 0
        for _ in range(25):
            P = fuzz_matrix(rnd, n_max=5)
            b = fuzz_vector(rnd, P.n)
            for lam in lambda_sweep(P, DEFAULT_TOL):
                if not isinstance(lam, Fraction):
                    continue
                rep = solvability_conditions(P, lam, b)
                rows = oracle.shifted_image_rows(P, lam, sign=-1)
                want = oracle.feasible_nonneg_solution(rows, [Fraction(e) for e in b.entries]).feasible
                assert rep.consistent
                for got in (rep.b, rep.e, rep.f, rep.g, rep.h, rep.i, rep.j, rep.c, rep.d):
                    assert got is None or got == want
                cases += 1
        assert cases >= 60


def test_never_solvable_on_both_sides_of_the_shift():
    # (lam*I - P)x = b and (P^T - lam*I)y = b cannot both have nonnegative
    # solutions for the same nonzero b
    rnd = rng(68)
    cases = 0
    for _ in range(50):
        P = fuzz_matrix(rnd)
        b = fuzz_vector(rnd, P.n)
        rhs = [Fraction(e) for e in b.entries]
        for lam in lambda_sweep(P, DEFAULT_TOL):
            if not isinstance(lam, Fraction) or lam <= 0:
                continue
            one = oracle.feasible_nonneg_solution(
                oracle.shifted_image_rows(P, lam, sign=-1), rhs
            ).feasible
            other = oracle.feasible_nonneg_solution(
                oracle.shifted_image_rows(P.transpose(), lam), rhs
            ).feasible
            assert not (one and other)
            cases += 1
    assert cases >= 150
