import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spectratope.circulants import circulant, dft, walsh
from spectratope.exceptions import (
    DimensionMismatch,
    InvalidScaling,
    NotAnEigenvector,
    NotPerronSimilarity,
    NotStochastic,
)
from spectratope.karpelevic import classify_arc, type1_similarity
from spectratope.numerics import DEFAULT_TOL, IllConditionedWarning, Tolerance, is_stochastic
from spectratope.perron import (
    EquivalenceTransform,
    PerronSimilarity,
    SpectrumVector,
    angle,
    blended_spectrum,
    brauer_perturb,
    check_necessary_conditions,
    equivalence_transform,
    halfspace_description,
    in_row_cone,
    in_row_polytope,
    in_spectracone,
    in_spectratope,
    is_ideal,
    is_normalized,
    is_perron_similarity,
    normalize,
    realizing_matrix,
    row_cone_coefficients,
    stochastic_blend,
)

from conftest import random_stochastic

H2 = np.array([[1.0, 1.0], [1.0, -1.0]])


def sim(S):
    return PerronSimilarity(S)


def random_cone_point(rng, S, size=None):
    """A point of the row cone (hence of the spectracone for ideal S)."""
    y = rng.random(len(S)) * (rng.random(len(S)) < 0.7)
    return y @ S


# ---------------------------------------------------------------------------
# spectrum vectors and similarities


class TestSpectrumVector:
    def test_perron_index_smallest_tie(self):
        assert SpectrumVector.from_values([0.5, -1, 1]).perron_index == 1

    def test_canonical_and_normalized(self):
        v = SpectrumVector.from_values([0.5, 2, -1])
        np.testing.assert_array_equal(v.canonical().x, [2, 0.5, -1])
        np.testing.assert_array_equal(v.normalized().x, [1, 0.25, -0.5])
        assert np.asarray(v).shape == (3,)


class TestPerronSimilarity:
    def test_inverse_cached_and_readonly(self):
        S = sim(dft(4))
        np.testing.assert_allclose(S.S @ S.S_inv, np.eye(4), atol=1e-14)
        with pytest.raises(ValueError):
            S.S[0, 0] = 2

    def test_normalized_flag(self):
        # DFT conjugate columns k and n-k are not adjacent, so F_n (n >= 3) is not in normal form
        assert not sim(dft(5)).normalized
        assert sim(dft(2)).normalized
        assert sim(walsh(2)).normalized
        assert sim(dft(4)[:, [0, 2, 1, 3]]).normalized
        assert not sim(dft(3) * np.array([2, 1, 1])).normalized

    def test_ill_conditioned_warns(self):
        S = np.array([[1, 1], [1, 1 + 1e-9]])
        with pytest.warns(IllConditionedWarning):
            PerronSimilarity(S, tol=Tolerance(eps_eq=1e-12))

    def test_non_square(self):
        with pytest.raises(DimensionMismatch):
            PerronSimilarity(np.ones((2, 3)))


# ---------------------------------------------------------------------------
# membership


class TestRealizingMatrix:
    def test_identity_for_ones(self):
        for S in (dft(5), walsh(2), H2):
            np.testing.assert_allclose(realizing_matrix(S, np.ones(len(S))), np.eye(len(S)), atol=1e-14)

    def test_circulant_from_dft(self):
        F4 = dft(4)
        x = F4 @ np.array([0, 1, 0, 0])
        np.testing.assert_allclose(realizing_matrix(F4, x), circulant([0, 1, 0, 0]), atol=1e-14)

    def test_h2_swap(self):
        np.testing.assert_allclose(realizing_matrix(H2, [1, -1]), [[0, 1], [1, 0]])

    def test_entry_formula(self, rng):
        S = sim(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        x = rng.normal(size=4) + 1j * rng.normal(size=4)
        M = realizing_matrix(S, x)
        for i in range(4):
            for j in range(4):
                assert abs(M[i, j] - (S.S[i] * S.S_inv[:, j]) @ x) <= 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            realizing_matrix(dft(3), [1, 2])


class TestMembership:
    def test_ones(self):
        assert in_spectracone(dft(3), np.ones(3))
        assert in_spectratope(dft(3), np.ones(3))

    def test_dft2_examples(self):
        np.testing.assert_allclose(realizing_matrix(dft(2), [1, 2]), [[1.5, -0.5], [-0.5, 1.5]])
        assert not in_spectracone(dft(2), [1, 2])
        np.testing.assert_allclose(realizing_matrix(dft(2), [1, 0.5]), [[0.75, 0.25], [0.25, 0.75]])
        assert in_spectracone(dft(2), [1, 0.5])
        assert not in_spectratope(dft(2), [1, 1.5])

    def test_dft3_row_is_cyclic(self):
        F3 = dft(3)
        assert in_spectratope(F3, F3[1])
        np.testing.assert_allclose(realizing_matrix(F3, F3[1]), circulant([0, 1, 0]), atol=1e-14)

    def test_row_cone_coefficients(self, rng):
        S = sim(rng.normal(size=(4, 4)))
        for k in range(4):
            np.testing.assert_allclose(row_cone_coefficients(S, S.S[k]), np.eye(4)[k], atol=1e-12)
        y = np.full(4, 0.25)
        np.testing.assert_allclose(row_cone_coefficients(dft(4), y @ dft(4)), y, atol=1e-15)
        np.testing.assert_allclose(row_cone_coefficients(H2, [1, -1]), [0, 1])
        assert in_row_polytope(H2, [1, -1]) and in_row_cone(H2, [2, -2]) and not in_row_polytope(H2, [2, -2])


# ---------------------------------------------------------------------------
# Perron recognition and normal form


class TestRecognition:
    def test_examples(self):
        assert is_perron_similarity(dft(2)) == 0
        assert is_perron_similarity(np.eye(2)) is None
        assert is_perron_similarity(dft(4)) == 0

    def test_phase_rotated_column(self):
        S = dft(3) * np.array([1j, 1, 1])
        assert is_perron_similarity(S) == 0

    def test_permuted_columns(self):
        S = dft(4)[:, [1, 0, 2, 3]]
        assert is_perron_similarity(S) == 1


class TestNormalize:
    def test_already_normalized(self):
        res = normalize(dft(4)[:, [0, 2, 1, 3]])
        assert res.transform.is_identity()
        assert res.similarity is not None and res.perron_index == 0

    def test_scaled_dft3(self):
        F3 = dft(3)
        S = F3 * np.array([2, 3j, -1])
        res = normalize(S)
        T = res.similarity.S
        assert res.similarity.normalized
        np.testing.assert_allclose(T[:, 0], np.ones(3))
        np.testing.assert_allclose(np.abs(T).max(axis=0), np.ones(3))
        np.testing.assert_allclose(res.transform.apply(T), S, atol=1e-12)

    def test_permuted_dft4(self):
        S = dft(4)[:, [1, 0, 2, 3]]
        res = normalize(S)
        assert res.perron_index == 1
        np.testing.assert_allclose(res.similarity.S[:, 0], np.ones(4))
        assert is_normalized(res.similarity.S)
        np.testing.assert_allclose(res.transform.apply(res.similarity.S), S, atol=1e-12)

    def test_row_scaling_is_undone(self, rng):
        S = dft(5)[:, [2, 0, 1, 4, 3]] * np.exp(2j * np.pi * rng.random(5))
        S = np.diag(rng.random(5) + 0.5) @ S
        res = normalize(S)
        assert res.similarity.normalized
        np.testing.assert_allclose(res.transform.apply(res.similarity.S), S, atol=1e-12)

    def test_vandermonde_normal_form(self):
        _, S = type1_similarity(classify_arc(5, "1/5", "1/4"), 0.7)
        res = normalize(S.S * np.array([1, 2, 1j, -1, 3]))
        assert res.similarity.normalized

    def test_not_perron(self):
        with pytest.raises(NotPerronSimilarity):
            normalize(np.eye(3))


class TestEquivalence:
    def test_identity(self, rng):
        S = rng.normal(size=(3, 3))
        np.testing.assert_array_equal(equivalence_transform(S), S)

    def test_cyclic_rows_keep_membership(self, rng):
        F3 = dft(3)
        P = np.roll(np.eye(3), 1, axis=0)
        PF = equivalence_transform(F3, P_sigma=P)
        np.testing.assert_allclose(PF, P @ F3)
        for _ in range(50):
            x = rng.normal(size=3) + 1j * rng.normal(size=3)
            assert in_spectracone(F3, x) == in_spectracone(PF, x)

    def test_row_scaling_keeps_membership(self, rng):
        S = dft(3)
        T = equivalence_transform(S, v=[2, 1, 1])
        for _ in range(50):
            x = random_cone_point(rng, S) + 0.3 * (rng.normal(size=3) + 1j * rng.normal(size=3))
            assert in_spectracone(S, x) == in_spectracone(T, x)

    def test_invalid_scalings(self):
        with pytest.raises(InvalidScaling):
            equivalence_transform(np.eye(2), v=[1, 0])
        with pytest.raises(InvalidScaling):
            equivalence_transform(np.eye(2), w=[1, 0])
        with pytest.raises(InvalidScaling):
            equivalence_transform(np.eye(2), P_sigma=np.ones((2, 2)))

    def test_compose_and_inverse(self, rng):
        S = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        for _ in range(20):
            t1 = EquivalenceTransform(rng.permutation(4), rng.random(4) + 0.1,
                                      rng.normal(size=4) + 1j * rng.normal(size=4), rng.permutation(4))
            t2 = EquivalenceTransform(rng.permutation(4), rng.random(4) + 0.1,
                                      rng.normal(size=4) + 1j, rng.permutation(4))
            np.testing.assert_allclose(t1.apply(t2.apply(S)), t1.compose(t2).apply(S), atol=1e-10)
            np.testing.assert_allclose(t1.inverse().apply(t1.apply(S)), S, atol=1e-10)


# ---------------------------------------------------------------------------
# transform invariance and closure properties


def complex_vectors(n):
    parts = arrays(np.float64, (2, n), elements=st.floats(-2, 2, allow_nan=False))
    return parts.map(lambda a: a[0] + 1j * a[1])


class TestConeProperties:
    @given(st.integers(2, 6), st.data())
    def test_hadamard_closure(self, n, data):
        F = dft(n)
        ys = data.draw(arrays(np.float64, (2, n), elements=st.floats(0, 1)))
        x, y = ys[0] @ F, ys[1] @ F
        assert in_spectracone(F, x) and in_spectracone(F, y)
        Mxy = realizing_matrix(F, x * y)
        np.testing.assert_allclose(Mxy, realizing_matrix(F, x) @ realizing_matrix(F, y), atol=10 * DEFAULT_TOL.eps_eq)
        assert in_spectracone(F, x * y)

    @given(st.integers(2, 6), st.data())
    def test_conic_closure(self, n, data):
        F = dft(n)
        ys = data.draw(arrays(np.float64, (2, n), elements=st.floats(0, 1)))
        a, b = data.draw(st.floats(0, 3)), data.draw(st.floats(0, 3))
        assert in_spectracone(F, a * (ys[0] @ F) + b * (ys[1] @ F))

    @given(st.integers(2, 5), st.data())
    def test_transform_invariance(self, n, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 32 - 1)))
        S = dft(n)
        x = random_cone_point(rng, S) + data.draw(st.sampled_from([0, 0.05, 0.5])) * (
            rng.normal(size=n) + 1j * rng.normal(size=n))
        verdict = in_spectracone(S, x)
        P = np.eye(n)[rng.permutation(n)]
        v = rng.random(n) + 0.1
        w = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert in_spectracone(P @ S, x) == verdict
        assert in_spectracone(np.diag(v) @ S, x) == verdict
        assert in_spectracone(S @ np.diag(w), x) == verdict
        assert in_spectracone((2 - 1j) * S, x) == verdict
        assert in_spectracone(np.conj(S), np.conj(x)) == verdict
        Sp = PerronSimilarity(S)
        assert in_spectracone(PerronSimilarity(Sp.S_inv, Sp.S), x) == in_spectracone(S.T, x)

    @given(st.integers(1, 8), st.data())
    def test_angle_bound(self, n, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 32 - 1)))
        F = dft(n)
        x, y = random_cone_point(rng, F), random_cone_point(rng, F)
        assert angle(x, y) <= math.pi / 2 + 1e-9


def ideal_similarities():
    yield from (dft(n) for n in range(1, 9))
    yield from (walsh(k) for k in range(4))


class TestIdeal:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_dft_ideal(self, n):
        assert is_ideal(dft(n))

    @pytest.mark.parametrize("k", range(4))
    def test_walsh_ideal(self, k):
        assert is_ideal(walsh(k))

    def test_vandermonde_ideal(self):
        _, S = type1_similarity(classify_arc(4, "1/4", "1/3"), 0.5)
        assert is_ideal(S)

    def test_not_ideal(self):
        S = np.array([[1, 1, 1], [1, -1, 0.9], [1, 0.3, -1]])
        assert not is_ideal(S)

    def test_three_routes_agree(self, rng):
        for S in ideal_similarities():
            n = len(S)
            H = halfspace_description(S)
            for _ in range(1000 if n <= 4 else 200):
                x = random_cone_point(rng, S) + rng.choice([0, 1e-3, 0.3]) * (
                    rng.normal(size=n) + 1j * rng.normal(size=n))
                direct = in_spectracone(S, x)
                assert in_row_cone(S, x) == direct
                assert H.cone_contains(x) == direct

    def test_polytope_equals_row_polytope(self, rng):
        for S in ideal_similarities():
            n = len(S)
            for _ in range(100):
                x = rng.dirichlet(np.ones(n)) @ S
                assert in_spectratope(S, x)
                z = x + 0.1 * (rng.normal(size=n) + 1j * rng.normal(size=n))
                if in_spectratope(S, z):
                    assert abs(row_cone_coefficients(S, z).sum() - 1) <= DEFAULT_TOL.eps_eq


class TestHalfSpaces:
    def test_counts(self):
        H = halfspace_description(dft(4))
        assert len(H.cone) == 3 * 16 and len(H.tope) == 4 * 4

    def test_scalar_case(self):
        H = halfspace_description([[1.0]])
        assert len(H.cone) == 3
        assert H.cone_contains([2.0]) and not H.cone_contains([-1.0]) and not H.cone_contains([1j])
        assert H.tope_contains([1.0]) and not H.tope_contains([2.0])

    def test_dft_matches_fourier_rows(self, rng):
        n = 5
        F = dft(n)
        H = halfspace_description(F)
        for _ in range(300):
            x = random_cone_point(rng, F) + 0.2 * (rng.normal(size=n) + 1j * rng.normal(size=n))
            Fx = F @ x
            by_rows = bool(np.all(Fx.real >= -1e-9) and np.all(np.abs(Fx.imag) <= 1e-9))
            assert H.cone_contains(x) == by_rows

    def test_walsh_tope_matches_direct(self, rng):
        S = walsh(2)
        H = halfspace_description(S)
        agree = 0
        for _ in range(500):
            x = rng.dirichlet(np.ones(4)) @ S + rng.choice([0, 0.05]) * rng.normal(size=4)
            x[0] = 1 + rng.choice([0, 0.0, 0.1]) * rng.normal()
            assert H.tope_contains(x) == in_spectratope(S, x)
            agree += 1
        assert agree == 500


# ---------------------------------------------------------------------------
# necessary conditions


class TestConditions:
    def test_all_ones(self):
        assert check_necessary_conditions(np.ones(5)).ok

    def test_negative_trace(self):
        r = check_necessary_conditions([1, -1, -1])
        assert not r.moments_ok
        assert r.first_violation["condition"] == "moments" and r.first_violation["k"] == 1

    def test_broken_conjugacy(self):
        r = check_necessary_conditions([1, 0.5j, 0.2])
        assert not r.self_conjugate_ok
        assert r.first_violation == {"condition": "self_conjugate", "index": 1}
        assert not r.newton_ok

    def test_spectral_radius(self):
        r = check_necessary_conditions([1, -2])
        assert r.first_violation["condition"] == "spectral_radius"

    def test_jll_violation(self):
        # s1 = 1.9, s2 = 0.9632, and s1**2 = 3.61 > 3 * s2 = 2.8896
        r = check_necessary_conditions([1, 0.45 + 0.47j, 0.45 - 0.47j])
        assert r.moments_ok and r.self_conjugate_ok
        assert not r.jll_ok
        assert r.first_violation == {"condition": "jll", "k": 1, "l": 2}

    def test_horizon(self):
        with pytest.raises(ValueError):
            check_necessary_conditions([1], horizon=0)
        assert check_necessary_conditions([1, 0.5], horizon=1).horizon == 1

    def test_constructed_spectra_pass(self, rng):
        for n in (2, 3, 4, 5, 6):
            for _ in range(40):
                F = dft(n)
                x = rng.dirichlet(np.ones(n)) @ F
                assert check_necessary_conditions(x).ok, x
                A = random_stochastic(rng, n, 0.6)
                assert check_necessary_conditions(np.linalg.eigvals(A)).ok


# ---------------------------------------------------------------------------
# star-shape constructions


class TestBrauer:
    def test_zero_update(self, rng):
        A = random_stochastic(rng, 3)
        B, lam = brauer_perturb(A, np.ones(3), np.zeros(3), 1.0)
        np.testing.assert_array_equal(B, A)
        assert lam == 1

    def test_uniform_blend_shift(self, rng):
        n, alpha = 4, 0.3
        A = random_stochastic(rng, n)
        B, lam = brauer_perturb(alpha * A, np.ones(n), (1 - alpha) / n * np.ones(n), alpha)
        assert abs(lam - 1) <= 1e-12
        np.testing.assert_allclose(B, stochastic_blend(A, alpha, "uniform"), atol=1e-14)

    def test_random_char_poly_root(self, rng):
        for _ in range(10):
            V = rng.normal(size=(3, 3))
            lam = rng.normal(size=3)
            A = V @ np.diag(lam) @ np.linalg.inv(V)
            y = rng.normal(size=3) + 1j * rng.normal(size=3)
            B, new = brauer_perturb(A, V[:, 0], y, lam[0])
            assert abs(np.linalg.det(new * np.eye(3) - B)) <= 1e-8 * max(1, abs(new) ** 3)

    def test_not_eigenvector(self):
        with pytest.raises(NotAnEigenvector):
            brauer_perturb(np.diag([1.0, 2.0]), [1, 1], [0, 0], 1.0)


class TestBlend:
    def test_endpoints(self, rng):
        A = random_stochastic(rng, 4)
        np.testing.assert_allclose(stochastic_blend(A, 1.0), A)
        np.testing.assert_allclose(stochastic_blend(A, 0.0), np.eye(4))

    def test_uniform_cycle_spectrum(self):
        C = circulant([0, 1, 0])
        B = stochastic_blend(C, 0.5, "uniform")
        F = dft(3)
        diag = F @ B @ np.conj(F) / 3
        assert np.abs(diag - np.diag(np.diag(diag))).max() <= 1e-14
        w = np.exp(2j * np.pi / 3)
        expected = [1, 0.5 * w, 0.5 * np.conj(w)]
        np.testing.assert_allclose(np.sort_complex(np.diag(diag)), np.sort_complex(expected), atol=1e-14)
        np.testing.assert_allclose(blended_spectrum([1, w, np.conj(w)], 0.5, "uniform"), [1, 0.5 * w, 0.5 * np.conj(w)])

    def test_not_stochastic(self):
        with pytest.raises(NotStochastic):
            stochastic_blend(2 * np.eye(2), 0.5)


class TestAngle:
    def test_examples(self):
        assert angle([1, 2j], [1, 2j]) == pytest.approx(0, abs=1e-7)
        assert angle([0, 0], [1, 0]) == math.pi / 2
        assert angle([1, 0], [0, 1]) == pytest.approx(math.pi / 2)
        assert 0 <= angle([1, 1j], [-1, 2]) <= math.pi
