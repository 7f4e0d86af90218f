import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from coneq.core import (
    FLOAT,
    RATIONAL,
    ConeVector,
    InvalidInput,
    NonnegMatrix,
    SpectralPair,
    saturate,
    support,
)
from coneq.classes import condense
from coneq.spectral import (
    class_radii,
    distinguished_eigenvalues,
    eigenvalue_index,
    fv_eigenvector,
    local_radius_estimate,
    local_spectral_radius,
    max_distinguished_order,
    perron_vector_block,
    spectral_pair,
    spectral_radius,
    spectral_report,
)
from coneq import oracle

from fuzz import fuzz_matrix, fuzz_vector, rng


def mat(rows, mode=RATIONAL):
    return NonnegMatrix.make(rows, mode)


A = mat([[2, 1, 0], [0, 1, 0], [0, 0, 1]])  # classes {3}, {1}, {2}
T = mat([[2, 0], [1, 1]])                   # classes {2}, {1}
U = mat([[1, 1], [0, 1]])                   # classes {1}, {2}
S = mat([[0, 1], [1, 0]])
D = mat([[0, 0, 0], [0, 1, 0], [0, 0, 2]])


class TestRadii:
    def test_class_radii_follow_class_order(self):
        assert class_radii(A) == (Fraction(1), Fraction(2), Fraction(1))
        assert class_radii(T) == (Fraction(1), Fraction(2))
        assert class_radii(S) == (Fraction(1),)
        assert class_radii(NonnegMatrix.zero_matrix(2, RATIONAL)) == (Fraction(0), Fraction(0))

    def test_spectral_radius(self):
        assert spectral_radius(A) == Fraction(2)
        assert spectral_radius(S) == Fraction(1)
        assert spectral_radius(mat([[0, 1], [0, 0]])) == 0

    def test_constant_row_sums_stay_exact(self):
        r, v = perron_vector_block([[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]])
        assert r == Fraction(1) and v == (Fraction(1), Fraction(1))

    def test_uneven_block_degrades_to_float(self):
        (r,) = class_radii(mat([[1, 2], [3, 1]]))
        assert isinstance(r, float)
        assert abs(r - (1 + math.sqrt(6))) < 1e-6


class TestLocalRadius:
    def test_depends_on_who_reaches_the_support(self):
        assert local_spectral_radius(D, ConeVector.unit(3, 3)) == Fraction(2)
        assert local_spectral_radius(D, ConeVector.unit(3, 1)) == Fraction(0)
        assert local_spectral_radius(A, ConeVector.unit(3, 3)) == Fraction(1)
        assert local_spectral_radius(T, ConeVector.unit(2, 2)) == Fraction(1)
        assert local_spectral_radius(T, ConeVector.unit(2, 1)) == Fraction(2)
        assert local_spectral_radius(T, ConeVector.zero_vector(2)) == 0

    def test_saturation_invariance(self):
        rnd = rng(41)
        for _ in range(40):
            P = fuzz_matrix(rnd)
            x = fuzz_vector(rnd, P.n)
            assert local_spectral_radius(P, x) == local_spectral_radius(P, saturate(P, x))

    def test_growth_estimate(self):
        assert local_radius_estimate(mat([[0, 1], [1, 0]], FLOAT), ConeVector.unit(2, 1, FLOAT), 7) == 1.0
        est = local_radius_estimate(mat([[2, 0], [0, 3]], FLOAT), ConeVector.make([1, 1], FLOAT), 100)
        assert_allclose(est, 3.0, rtol=1e-9)
        est2 = local_radius_estimate(mat([[1, 1], [0, 1]], FLOAT), ConeVector.unit(2, 2, FLOAT), 5000)
        assert abs(est2 - 1.0) < 0.05
        assert local_radius_estimate(mat([[0, 1], [0, 0]], FLOAT), ConeVector.unit(2, 2, FLOAT), 3) == 0.0
        with pytest.raises(InvalidInput):
            local_radius_estimate(mat([[1]], FLOAT), ConeVector.unit(1, 1, FLOAT), 0)

    def test_growth_estimate_tracks_the_combinatorial_value(self):
        rnd = rng(42)
        for _ in range(15):
            P = fuzz_matrix(rnd, n_max=5)
            x = fuzz_vector(rnd, P.n)
            want = float(local_spectral_radius(P, x))
            got = local_radius_estimate(P.to_float(), ConeVector.make([float(e) for e in x.entries], FLOAT), 4000)
            assert abs(got - want) <= 0.05 * max(1.0, want)


class TestDistinguished:
    def test_values(self):
        assert distinguished_eigenvalues(A) == (Fraction(1), Fraction(2))
        assert distinguished_eigenvalues(T) == (Fraction(1), Fraction(2))
        assert distinguished_eigenvalues(U) == (Fraction(1),)
        assert distinguished_eigenvalues(NonnegMatrix.zero_matrix(2, RATIONAL)) == (Fraction(0),)

    def test_largest_is_the_spectral_radius(self):
        rnd = rng(43)
        for _ in range(50):
            P = fuzz_matrix(rnd)
            assert distinguished_eigenvalues(P)[-1] == spectral_radius(P)

    def test_each_value_admits_a_nonnegative_eigenvector(self):
        rnd = rng(44)
        checked = 0
        for _ in range(40):
            P = fuzz_matrix(rnd)
            for lam in distinguished_eigenvalues(P):
                if not isinstance(lam, Fraction):
                    continue
                rows = oracle.shifted_image_rows(P, lam)
                # x >= 0, (P - lam I)x = 0, sum x = 1
                n = P.n
                eqs = [(row, Fraction(0)) for row in rows]
                eqs.append(([Fraction(1)] * n, Fraction(1)))
                assert oracle.lp_feasible(oracle.LPProblem.build(n, eq_rows=eqs)).feasible
                checked += 1
        assert checked >= 40


class TestEigenvectors:
    def test_distinguished_class_vector(self):
        an = condense(T)
        v = fv_eigenvector(T, an.class_of_vertex(1))
        assert v.entries == (Fraction(1), Fraction(1))
        assert fv_eigenvector(A, condense(A).class_of_vertex(3)).entries == (0, 0, Fraction(1))
        assert fv_eigenvector(A, condense(A).class_of_vertex(1)).entries == (Fraction(1), 0, 0)

    def test_eigen_equation_holds_exactly(self):
        an = condense(T)
        c = an.class_of_vertex(1)
        lam = class_radii(T)[c]
        v = fv_eigenvector(T, c)
        assert T.apply(v.entries) == tuple(lam * e for e in v.entries)

    def test_support_is_the_accessor_face(self):
        rnd = rng(45)
        for _ in range(30):
            P = fuzz_matrix(rnd)
            an = condense(P)
            radii = class_radii(P)
            from coneq.classes import classify
            tax = classify(an, radii)
            for c in range(an.class_count):
                if not tax.distinguished[c] or not isinstance(radii[c], Fraction):
                    continue
                v = fv_eigenvector(P, c)
                accessors = an.vertices_of_mask(an.accessors_mask(1 << c))
                assert support(v) == accessors

    def test_rejects_non_distinguished_class(self):
        an = condense(U)
        with pytest.raises(InvalidInput):
            fv_eigenvector(U, an.class_of_vertex(2))
        with pytest.raises(InvalidInput):
            fv_eigenvector(U, 5)


class TestPairsAndOrders:
    def test_pair_examples(self):
        assert spectral_pair(U, ConeVector.unit(2, 2)) == SpectralPair(Fraction(1), 2)
        assert spectral_pair(U, ConeVector.unit(2, 1)) == SpectralPair(Fraction(1), 1)
        assert spectral_pair(U, ConeVector.zero_vector(2)) == SpectralPair(Fraction(0), 0)

    def test_pair_depends_only_on_the_support(self):
        rnd = rng(46)
        for _ in range(30):
            P = fuzz_matrix(rnd)
            x = fuzz_vector(rnd, P.n)
            y_entries = [Fraction(rnd.randint(1, 9)) if e != 0 else Fraction(0) for e in x.entries]
            y = ConeVector.make(y_entries, RATIONAL)
            assert spectral_pair(P, x) == spectral_pair(P, y)

    def test_order_agrees_with_dense_decomposition(self):
        rnd = rng(47)
        checked = 0
        for _ in range(60):
            P = fuzz_matrix(rnd, n_max=5)
            x = fuzz_vector(rnd, P.n)
            pair = spectral_pair(P, x)
            d = oracle.decompose_generalized(P.to_float(), ConeVector.make([float(e) for e in x.entries], FLOAT))
            if d.merged or d.ambiguous:
                continue
            target = [c for c in d.present()
                      if abs(c.eigenvalue.imag) < 1e-8
                      and abs(c.eigenvalue.real - float(pair.rho)) <= 1e-6 * max(1.0, float(pair.rho))]
            if len(target) != 1:
                continue
            assert target[0].order == pair.order
            checked += 1
        assert checked >= 25

    def test_chain_index(self):
        assert eigenvalue_index(U, Fraction(1)) == 2
        assert eigenvalue_index(A, Fraction(1)) == 1
        assert eigenvalue_index(A, Fraction(2)) == 1
        assert eigenvalue_index(A, Fraction(5)) == 0

    def test_order_bound_among_nonnegative_eigenvectors(self):
        assert max_distinguished_order(U, Fraction(1)) == 2
        assert max_distinguished_order(A, Fraction(1)) == 1
        assert max_distinguished_order(mat([[1, 0], [0, 1]]), Fraction(1)) == 1
        with pytest.raises(InvalidInput):
            max_distinguished_order(U, Fraction(1, 2))


def test_report_serialization():
    assert spectral_report(T).to_json_dict() == {
        "rho": 2,
        "class_radii": [1, 2],
        "distinguished_eigenvalues": [1, 2],
        "index": {"1": 1, "2": 1},
        "max_distinguished_order": {"1": 1, "2": 1},
    }


def test_local_radius_matches_krylov_restriction():
    rnd = rng(48)
    for _ in range(25):
        P = fuzz_matrix(rnd, n_max=5)
        x = fuzz_vector(rnd, P.n)
        want = float(local_spectral_radius(P, x))
        got = oracle.krylov_local_rho(P, x)
        assert abs(got - want) <= 1e-6 * max(1.0, want)
