"""Tests for vector/matrix primitives and the seeded RNG tree."""

import numpy as np
import pytest

from quditmse.core import (
    RngStream,
    closest_unitary,
    gram_schmidt,
    haar_random_state,
    haar_random_unitary,
    hs_distance,
    is_unitary,
    normalize,
    squared_error,
    unitarity_defect,
)
from quditmse.errors import (
    DegenerateVector,
    DimensionError,
    RankDeficient,
    SingularMatrix,
)


class TestNormalize:
    def test_real_vector(self):
        out = normalize(np.array([3.0, 4.0], dtype=complex))
        assert np.allclose(out, [0.6, 0.8])

    def test_unit_vector_unchanged(self):
        z = np.array([1.0, 0.0], dtype=complex)
        assert np.allclose(normalize(z), z)

    def test_phase_preserved(self):
        z = np.array([2j, 0.0])
        out = normalize(z)
        assert np.allclose(out, [1j, 0.0])

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateVector):
            normalize(np.zeros(3, dtype=complex))

    def test_result_has_unit_norm(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            assert abs(np.linalg.norm(normalize(z)) - 1.0) < 1e-12


class TestSquaredError:
    def test_identical_vectors(self):
        z = np.array([1.0, 0.0], dtype=complex)
        assert squared_error(z, z) == 0.0

    def test_known_value(self):
        # |1 - 1/sqrt(2)|^2 + |0 - 1/sqrt(2)|^2 = 2 - sqrt(2)
        z = np.array([1.0, 0.0], dtype=complex)
        w = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
        assert abs(squared_error(z, w) - (2.0 - np.sqrt(2.0))) < 1e-14

    def test_sensitive_to_global_phase(self):
        # This distance is on raw vectors, not rays.
        z = np.array([1.0, 0.0], dtype=complex)
        assert abs(squared_error(z, -z) - 4.0) < 1e-14

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            z = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            w = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            assert abs(squared_error(z, w) - squared_error(w, z)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            squared_error(np.zeros(2, dtype=complex), np.zeros(3, dtype=complex))


class TestHaarState:
    def test_unit_norm(self):
        rng = np.random.default_rng(0)
        for d in (2, 4, 8):
            for _ in range(20):
                psi = haar_random_state(d, rng)
                assert abs(np.linalg.norm(psi) - 1.0) < 1e-12

    def test_first_component_moment(self):
        # For a Haar state the mean of |psi_0|^2 is 1/d.
        rng = np.random.default_rng(11)
        for d in (2, 4):
            samples = np.array(
                [abs(haar_random_state(d, rng)[0]) ** 2 for _ in range(100_000)]
            )
            assert abs(samples.mean() - 1.0 / d) < 0.01

    def test_accepts_rng_stream(self):
        a = haar_random_state(3, RngStream(5))
        b = haar_random_state(3, RngStream(5))
        assert np.array_equal(a, b)


class TestHaarUnitary:
    def test_is_unitary(self):
        rng = np.random.default_rng(2)
        for d in (2, 4, 8):
            u = haar_random_unitary(d, rng)
            assert unitarity_defect(u) < 1e-10
            assert is_unitary(u)

    def test_entry_moment(self):
        # Haar measure gives E|U_00|^2 = 1/d.
        rng = np.random.default_rng(13)
        d = 3
        samples = np.array(
            [abs(haar_random_unitary(d, rng)[0, 0]) ** 2 for _ in range(20_000)]
        )
        assert abs(samples.mean() - 1.0 / d) < 0.01

    def test_deterministic_under_seed(self):
        a = haar_random_unitary(4, np.random.default_rng(9))
        b = haar_random_unitary(4, np.random.default_rng(9))
        assert np.array_equal(a, b)


class TestGramSchmidt:
    def test_shear_matrix(self):
        # Columns (1,0) and (1,1): the second orthogonalizes to (0,1).
        a = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
        q = gram_schmidt(a)
        assert np.allclose(q, np.eye(2))

    def test_output_is_unitary(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            q = gram_schmidt(a)
            assert unitarity_defect(q) < 1e-10

    def test_first_column_direction_kept(self):
        rng = np.random.default_rng(22)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        q = gram_schmidt(a)
        assert np.allclose(q[:, 0], normalize(a[:, 0]))

    def test_rank_deficient_rejected(self):
        a = np.array([[1.0, 2.0], [1.0, 2.0]], dtype=complex)
        with pytest.raises(RankDeficient):
            gram_schmidt(a)


class TestClosestUnitary:
    def test_positive_diagonal(self):
        # Polar factor of a positive diagonal matrix is the identity.
        a = np.diag([2.0, 0.5]).astype(complex)
        assert np.allclose(closest_unitary(a), np.eye(2))

    def test_matches_inverse_sqrt_route(self):
        # Independent construction: U = A (A^dag A)^{-1/2} via eigendecomposition.
        rng = np.random.default_rng(31)
        for _ in range(20):
            a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            vals, vecs = np.linalg.eigh(a.conj().T @ a)
            inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
            expected = a @ inv_sqrt
            assert np.allclose(closest_unitary(a), expected, atol=1e-10)

    def test_minimizes_distance_over_unitaries(self):
        rng = np.random.default_rng(32)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        u_star = closest_unitary(a)
        best = hs_distance(a, u_star)
        for _ in range(1000):
            v = haar_random_unitary(3, rng)
            assert hs_distance(a, v) >= best - 1e-9

    def test_unitary_input_is_fixed_point(self):
        u = haar_random_unitary(4, np.random.default_rng(33))
        assert np.allclose(closest_unitary(u), u, atol=1e-10)

    def test_singular_input_rejected(self):
        a = np.zeros((2, 2), dtype=complex)
        a[0, 0] = 1.0
        with pytest.raises(SingularMatrix):
            closest_unitary(a)


class TestHsDistance:
    def test_identity_vs_minus_identity(self):
        eye = np.eye(2, dtype=complex)
        assert abs(hs_distance(eye, -eye) - 8.0) < 1e-14

    def test_identity_vs_phase(self):
        eye = np.eye(2, dtype=complex)
        assert abs(hs_distance(eye, 1j * eye) - 4.0) < 1e-14

    def test_decomposes_over_columns(self):
        rng = np.random.default_rng(41)
        a = haar_random_unitary(3, rng)
        b = haar_random_unitary(3, rng)
        total = sum(squared_error(a[:, j], b[:, j]) for j in range(3))
        assert abs(hs_distance(a, b) - total) < 1e-12


class TestRngStream:
    def test_same_path_same_draws(self):
        a = RngStream(4).child(1, 2).generator().random(5)
        b = RngStream(4).child(1, 2).generator().random(5)
        assert np.array_equal(a, b)

    def test_sibling_streams_differ(self):
        root = RngStream(4)
        a = root.child(0).generator().random(5)
        b = root.child(1).generator().random(5)
        assert not np.array_equal(a, b)

    def test_child_extends_path(self):
        direct = RngStream(8, stream=(3, 7)).generator().random(4)
        nested = RngStream(8).child(3).child(7).generator().random(4)
        assert np.array_equal(direct, nested)

    def test_seed_changes_draws(self):
        a = RngStream(1).generator().random(3)
        b = RngStream(2).generator().random(3)
        assert not np.array_equal(a, b)
