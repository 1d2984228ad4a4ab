import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tlrefl.errors import DegenerateTraceError, NotHadamardError, ZeroEntryError
from tlrefl.hadamard import (build_P, fourier_matrix, hadamard_inverse, is_generalized_hadamard,
                             is_vw_hadamard)

from conftest import crandn


class TestHadamardInverse:
    def test_all_ones(self):
        assert np.array_equal(hadamard_inverse(np.ones((2, 2))), np.ones((2, 2)))

    def test_signs(self):
        u = np.array([[1, -1], [-1, 1]])
        assert np.array_equal(hadamard_inverse(u), u)

    def test_unimodular_is_conjugate(self):
        f3 = fourier_matrix(3)
        np.testing.assert_allclose(hadamard_inverse(f3), f3.conj(), atol=1e-15)

    def test_zero_entry(self):
        with pytest.raises(ZeroEntryError):
            hadamard_inverse([[1, 0], [1, 1]])

    @given(st.integers(0, 2**32 - 1))
    def test_involutive(self, seed):
        u = crandn(np.random.default_rng(seed), (3, 4))
        np.testing.assert_allclose(hadamard_inverse(hadamard_inverse(u)), u, rtol=1e-12)


class TestGeneralizedHadamard:
    def test_f2(self):
        v = is_generalized_hadamard([[1, 1], [1, -1]])
        assert v.passes and v.property == "Plain"

    def test_f4_entries_and_verdict(self):
        f4 = fourier_matrix(4)
        assert np.allclose(np.min(np.abs(f4.ravel()[:, None] - np.array([1, 1j, -1, -1j])), axis=1), 0)
        assert is_generalized_hadamard(f4).passes

    def test_fails(self):
        v = is_generalized_hadamard([[1, 2], [3, 4]])
        assert not v.passes and v.residual > 1e-2

    @pytest.mark.parametrize("n", range(1, 9))
    def test_fourier_family(self, n):
        assert is_generalized_hadamard(fourier_matrix(n)).residual <= 1e-10

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 7), st.integers(0, 2**32 - 1))
    def test_equivalences_preserve(self, n, seed):
        rng = np.random.default_rng(seed)
        u = fourier_matrix(n)
        u = u[rng.permutation(n)][:, rng.permutation(n)]
        u = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, n))) @ u @ np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, n)))
        assert is_generalized_hadamard(u).residual <= 1e-10

    def test_nonunimodular_generalized(self):
        # row/column scalings by arbitrary nonzero numbers preserve the generalized property
        f3 = fourier_matrix(3)
        u = np.diag([2.0, 0.5j, -3.0]) @ f3 @ np.diag([1.5, -0.25, 4j])
        assert is_generalized_hadamard(u).passes


class TestVWHadamard:
    def test_reduces_to_plain(self):
        v = is_vw_hadamard(fourier_matrix(2), np.ones(2), np.ones(2))
        assert v.passes and v.property == "VW"

    def test_reciprocal_weights(self, rng):
        v = crandn(rng, 3)
        assert is_vw_hadamard(fourier_matrix(3), v, 1 / v).passes

    def test_fails(self):
        assert not is_vw_hadamard(fourier_matrix(2), [1, 2], [1, 1]).passes

    def test_degenerate_trace(self):
        with pytest.raises(DegenerateTraceError):
            is_vw_hadamard(fourier_matrix(2), [1, -1], [1, 1])

    @pytest.mark.parametrize("u", [fourier_matrix(3), [[1, 2], [3, 4]], fourier_matrix(5)])
    def test_agrees_with_plain(self, u):
        n = np.asarray(u).shape[0]
        plain = is_generalized_hadamard(u)
        vw = is_vw_hadamard(u, np.ones(n), np.ones(n))
        assert plain.passes == vw.passes
        # both residuals vanish or both are large; compare where both are meaningful
        if plain.passes:
            assert abs(plain.residual - vw.residual) <= 1e-12


class TestBuildP:
    def test_self(self):
        np.testing.assert_allclose(build_P(fourier_matrix(3), fourier_matrix(3)), np.eye(3), atol=1e-14)

    def test_sign_flip(self):
        f2 = fourier_matrix(2)
        np.testing.assert_allclose(build_P(f2, f2 @ np.diag([1, -1])), np.diag([1, -1]), atol=1e-14)

    def test_permuted_columns(self):
        f3 = fourier_matrix(3)
        perm = [2, 0, 1]
        np.testing.assert_allclose(build_P(f3, f3[:, perm]), np.eye(3)[:, perm], atol=1e-14)

    def test_rejects_non_hadamard(self):
        with pytest.raises(NotHadamardError):
            build_P(fourier_matrix(2), [[1, 2], [3, 4]])
