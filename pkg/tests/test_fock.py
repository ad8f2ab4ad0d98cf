import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussbench.fock import (
    FockOperator,
    GaussianParams,
    TruncationWarning,
    displaced_squeezed_amplitude,
    displaced_squeezed_state,
    displacement_matrix,
    displacement_matrix_element,
    gaussian_amplitudes,
    hermitian_eigen,
    squeezed_vacuum,
    vacuum_overlap_sq,
)

from oracles import displacement_expm, gaussian_state_expm, squeeze_expm

# Interior of a large expm truncation that is trusted as an oracle.
ORACLE_DIM, INTERIOR = 160, 30


class TestParams:
    def test_theta_reduced(self):
        p = GaussianParams(1 + 1j, 0.3, 7.0)
        assert p.theta == pytest.approx(7.0 - 2 * math.pi)
        assert p.xi == pytest.approx(0.3 * np.exp(1j * p.theta))

    def test_negative_squeezing(self):
        with pytest.raises(ValueError):
            GaussianParams(0, -0.1, 0)


class TestSqueezedVacuum:
    @pytest.mark.parametrize("s, theta", [(0.0, 0.0), (0.3, 0.0), (0.8, 1.3), (1.5, 4.0)])
    def test_against_expm(self, s, theta):
        ref = squeeze_expm(s, theta, ORACLE_DIM)[:, 0]
        amp = squeezed_vacuum(s, theta, 120, warn=False).amplitudes
        np.testing.assert_allclose(amp[:INTERIOR], ref[:INTERIOR], atol=1e-10)

    def test_odd_photon_numbers_empty(self):
        amp = squeezed_vacuum(1.0, 0.5, 40, warn=False).amplitudes
        assert np.all(amp[1::2] == 0)

    def test_truncated_norm(self):
        vec = squeezed_vacuum(0.5, 0.0, 120)
        assert vec.norm_sq == pytest.approx(1.0, abs=1e-13)
        assert vec.tail_mass < 1e-13

    def test_tail_warning(self):
        with pytest.warns(TruncationWarning):
            squeezed_vacuum(2.0, 0.0, 20)

    def test_silent_when_converged(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            squeezed_vacuum(1.0, 0.0, 120)

    @pytest.mark.parametrize("cutoff", [1, 7])
    def test_bad_cutoff(self, cutoff):
        with pytest.raises(ValueError):
            squeezed_vacuum(0.5, 0.0, cutoff)


class TestDisplacement:
    @pytest.mark.parametrize("alpha", [0.0, 0.4, 1.2 - 0.7j, -2.0j, 3.0 + 1.0j])
    def test_against_expm(self, alpha):
        ref = displacement_expm(alpha, ORACLE_DIM)
        got = displacement_matrix(alpha, INTERIOR)
        np.testing.assert_allclose(got, ref[:INTERIOR, :INTERIOR], atol=1e-10)

    def test_single_element_matches_matrix(self):
        alpha = 0.9 - 0.4j
        mat = displacement_matrix(alpha, 12)
        for m in range(12):
            for n in range(12):
                assert displacement_matrix_element(m, n, alpha) == pytest.approx(mat[m, n], abs=1e-14)

    def test_unitary_rows(self):
        # rows are exact, so enough columns make D D^+ the identity on the leading block
        d = displacement_matrix(1.5 + 0.5j, 40, 200)
        np.testing.assert_allclose(d @ d.conj().T, np.eye(40), atol=1e-12)

    def test_square_truncation_not_unitary(self):
        # truncating both indices leaks norm near the edge; documented behaviour
        d = displacement_matrix(2.0, 60)
        leak = np.abs(d @ d.conj().T - np.eye(60)).max()
        assert leak > 1e-6

    @pytest.mark.parametrize("alpha", [0.7, 2.0, -1.4 + 1.4j])
    def test_square_truncation_unitary_on_interior(self, alpha):
        # the leading 20 x 20 block of D D^+ is the identity once the cutoff is 80
        d = displacement_matrix(alpha, 80)
        np.testing.assert_allclose((d @ d.conj().T)[:20, :20], np.eye(20), atol=1e-6)

    @given(st.complex_numbers(max_magnitude=3.0))
    @settings(max_examples=30, deadline=None)
    def test_inverse_is_minus_alpha(self, alpha):
        a = displacement_matrix(alpha, 20, 120)
        b = displacement_matrix(-alpha, 120, 20)
        np.testing.assert_allclose(a @ b, np.eye(20), atol=1e-10)

    def test_negative_index(self):
        with pytest.raises(ValueError):
            displacement_matrix_element(-1, 0, 0.5)


class TestGaussianState:
    @pytest.mark.parametrize("alpha, s, theta", [
        (0.5, 0.8, 0.0), (1.0 - 0.5j, 0.4, 2.0), (-1.5j, 1.2, 5.0), (0.0, 0.0, 0.0), (2.0, 0.0, 1.0),
    ])
    def test_composition_against_expm(self, alpha, s, theta):
        ref = gaussian_state_expm(alpha, s, theta, ORACLE_DIM)
        got = displaced_squeezed_state(GaussianParams(alpha, s, theta), INTERIOR, cutoff=140, warn=False)
        np.testing.assert_allclose(got, ref[:INTERIOR], atol=1e-9)

    @given(st.complex_numbers(max_magnitude=2.5), st.floats(0.0, 1.5), st.floats(0.0, 2 * math.pi))
    @settings(max_examples=40, deadline=None)
    def test_recurrence_matches_composition(self, alpha, s, theta):
        p = GaussianParams(alpha, s, theta)
        comp = displaced_squeezed_state(p, 25, cutoff=200, warn=False)
        rec = gaussian_amplitudes(alpha, s, theta, 24)
        np.testing.assert_allclose(rec, comp, atol=1e-11)

    @given(st.complex_numbers(max_magnitude=3.0), st.floats(0.0, 3.0), st.floats(0.0, 2 * math.pi))
    @settings(max_examples=40, deadline=None)
    def test_vacuum_overlap(self, alpha, s, theta):
        c0 = gaussian_amplitudes(alpha, s, theta, 0)[0]
        assert abs(c0) ** 2 == pytest.approx(vacuum_overlap_sq(GaussianParams(alpha, s, theta)), rel=1e-12)

    @pytest.mark.parametrize("alpha, s", [(0.5, 0.8), (1.5 + 1j, 0.3), (0.0, 1.5)])
    def test_completeness_and_photon_number(self, alpha, s):
        c = gaussian_amplitudes(alpha, s, 0.7, 400)
        p = np.abs(c) ** 2
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        # <n> = |alpha|^2 + sinh^2 s
        assert np.dot(np.arange(401), p) == pytest.approx(abs(alpha) ** 2 + math.sinh(s) ** 2, rel=1e-10)

    def test_broadcasting(self):
        alpha = np.array([0.1, 0.5 + 0.2j])
        s = np.array([[0.2], [0.9]])
        out = gaussian_amplitudes(alpha, s, 0.3, 6)
        assert out.shape == (7, 2, 2)
        np.testing.assert_allclose(out[:, 1, 0], gaussian_amplitudes(0.1, 0.9, 0.3, 6), rtol=1e-15)

    def test_single_amplitude(self):
        p = GaussianParams(0.3, 0.2, 0.1)
        full = displaced_squeezed_state(p, 10, cutoff=80)
        assert displaced_squeezed_amplitude(7, p, cutoff=80) == pytest.approx(full[7])
        with pytest.raises(ValueError):
            displaced_squeezed_amplitude(90, p, cutoff=80)


class TestOperators:
    def test_shape_check(self):
        with pytest.raises(ValueError):
            FockOperator(np.eye(3), 3)

    def test_hermitian_flag_checked(self):
        with pytest.raises(ValueError):
            FockOperator(np.array([[0, 1], [0, 0]]), 1, hermitian=True)

    def test_eigen_descending(self):
        rng = np.random.default_rng(0)
        m = rng.normal(size=(6, 6))
        op = FockOperator(m + m.T, 5, hermitian=True)
        vals, vecs = hermitian_eigen(op)
        assert np.all(np.diff(vals) <= 0)
        np.testing.assert_allclose(op.matrix @ vecs, vecs * vals, atol=1e-12)

    def test_eigen_rejects_nonhermitian(self):
        with pytest.raises(ValueError):
            hermitian_eigen(FockOperator(np.triu(np.ones((3, 3))), 2))
        with pytest.raises(ValueError):
            hermitian_eigen(np.triu(np.ones((3, 3))))

    def test_trace(self):
        assert FockOperator(np.diag([0.5, 0.25, 0.125]), 2).trace() == pytest.approx(0.875)
