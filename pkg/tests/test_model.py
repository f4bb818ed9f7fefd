import math

import numpy as np
import pytest
from scipy.linalg import expm

from fluxwalk import (
    Gap,
    ModelParams,
    NonUnitaryInput,
    NumericalInconsistency,
    TimeFrame,
    WrongParameters,
    angles,
    bloch_unitaries,
    bloch_unitary,
    critical_expansion_error,
    frame_unitaries,
    frame_unitary,
    frame_vector,
    gap_closings,
    model_params,
    pauli_decompose,
    quasienergies,
)
from fluxwalk.model import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    _clamped_arccos,
    frame_vector_components,
)

from conftest import random_params

DEFAULTS = ModelParams(M=0.0, phi=0.0)
C0 = model_params("C0")
CPI = model_params("Cpi")


def su2_oracle(theta1, theta2):
    """Independent route to U(k): scaling-and-squaring matrix exponentials."""
    return expm(-1j * theta2 * SIGMA_X) @ expm(-1j * theta1 * SIGMA_Z)


class TestModelParams:
    def test_defaults(self):
        assert (DEFAULTS.t1, DEFAULTS.t2, DEFAULTS.T) == (1.0, 1.0, 2.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            ModelParams(M=np.nan, phi=0.0)

    def test_rejects_nonpositive_period(self):
        with pytest.raises(ValueError):
            ModelParams(M=0.0, phi=0.0, T=0.0)


class TestAngles:
    def test_defaults_at_k0(self):
        # theta1 = T t1 sin(-0) = 0, theta2 = (T/2)(0 + 2 cos 0) = 2
        assert angles(DEFAULTS, 0.0) == (0.0, 2.0)

    def test_c0_closing_point(self):
        # both angles vanish at the C0 closing momentum k* = pi/2
        th1, th2 = angles(C0, math.pi / 2)
        assert abs(th1) < 1e-15 and abs(th2) < 1e-15

    def test_cpi_closing_point(self):
        # theta2 = pi at the Cpi closing momentum k* = 0
        th1, th2 = angles(CPI, 0.0)
        assert abs(th1) < 1e-15 and abs(th2 - math.pi) < 1e-15

    def test_vectorized(self):
        ks = np.linspace(-np.pi, np.pi, 7)
        th1, th2 = angles(DEFAULTS, ks)
        assert th1.shape == ks.shape and th2.shape == ks.shape


class TestBlochUnitary:
    def test_identity_when_all_couplings_vanish(self):
        p = ModelParams(M=0.0, phi=0.0, t1=0.0, t2=0.0)
        assert np.abs(bloch_unitary(p, 0.3) - IDENTITY_2).max() < 1e-15

    def test_pure_drift_phase(self):
        # theta2 = 0 identically, theta1 = pi/2 at sin(k) = pi/4
        p = ModelParams(M=0.0, phi=0.0, t2=0.0)
        k = math.asin(math.pi / 4)
        expected = np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)])
        assert np.abs(bloch_unitary(p, k) - expected).max() < 1e-14

    def test_matches_expm_oracle(self):
        p = ModelParams(M=-1.5, phi=0.0)
        th1, th2 = angles(p, 0.7)
        assert np.abs(bloch_unitary(p, 0.7) - su2_oracle(th1, th2)).max() < 1e-10

    def test_unitarity_sweep(self, rng):
        ks = -np.pi + 2 * np.pi * np.arange(1024) / 1024
        worst = 0.0
        for p in random_params(rng, 10):
            u = bloch_unitaries(p, ks)
            worst = max(worst, np.abs(u.conj().transpose(0, 2, 1) @ u - IDENTITY_2).max())
        assert worst < 1e-12

    def test_trace_matches_band_formula(self, rng):
        ks = np.linspace(-np.pi, np.pi, 257)
        for p in random_params(rng, 5):
            th1, th2 = angles(p, ks)
            u = bloch_unitaries(p, ks)
            traces = np.real(np.trace(u, axis1=1, axis2=2)) / 2.0
            assert np.abs(traces - np.cos(th1) * np.cos(th2)).max() < 1e-12


class TestPauliDecompose:
    def test_identity(self):
        d = pauli_decompose(IDENTITY_2)
        assert d == pytest.approx((1.0, 0.0, 0.0, 0.0), abs=1e-15)

    def test_pure_x_rotation(self):
        u = expm(-1j * (np.pi / 2) * SIGMA_X)
        d = pauli_decompose(u)
        assert d == pytest.approx((0.0, 1.0, 0.0, 0.0), abs=1e-12)

    def test_expanded_form(self):
        # d-vector of the two-substep product in closed form
        p = ModelParams(M=-1.5, phi=0.0)
        th1, th2 = angles(p, 0.7)
        d = pauli_decompose(bloch_unitary(p, 0.7))
        expected = (
            math.cos(th2) * math.cos(th1),
            math.sin(th2) * math.cos(th1),
            -math.sin(th2) * math.sin(th1),
            math.cos(th2) * math.sin(th1),
        )
        assert d == pytest.approx(expected, abs=1e-12)

    def test_normalization_invariant(self, rng):
        for p in random_params(rng, 5):
            d = pauli_decompose(bloch_unitary(p, float(rng.uniform(-np.pi, np.pi))))
            assert abs(d.d0**2 + d.dx**2 + d.dy**2 + d.dz**2 - 1.0) < 1e-12

    def test_rejects_nonunitary(self):
        with pytest.raises(NonUnitaryInput):
            pauli_decompose(1.01 * IDENTITY_2)

    def test_rejects_global_phase(self):
        # unitary but det != 1: real Pauli coefficients cannot reproduce it
        with pytest.raises(NumericalInconsistency):
            pauli_decompose(np.exp(0.3j) * IDENTITY_2)


class TestQuasienergies:
    def test_pure_mixing(self):
        # theta1 = 0, theta2 = pi/3, T = 2 -> eps = -?+ pi/6
        p = ModelParams(M=math.pi / 3, phi=0.0, t1=0.0, t2=0.0)
        lo, hi = quasienergies(p, 0.0)
        assert (lo, hi) == pytest.approx((-math.pi / 6, math.pi / 6), abs=1e-14)

    def test_closed_at_c0(self):
        assert quasienergies(C0, math.pi / 2) == pytest.approx((0.0, 0.0), abs=1e-14)

    def test_closed_at_cpi(self):
        lo, hi = quasienergies(CPI, 0.0)
        assert (lo, hi) == pytest.approx((-math.pi / 2, math.pi / 2), abs=1e-14)

    def test_matches_direct_diagonalization(self, rng):
        ks = -np.pi + 2 * np.pi * np.arange(256) / 256
        for p in random_params(rng, 5):
            lam = np.linalg.eigvals(bloch_unitaries(p, ks))
            lo, hi = quasienergies(p, ks)
            formula = np.stack([np.exp(-1j * p.T * lo), np.exp(-1j * p.T * hi)], axis=1)
            d_same = np.maximum(np.abs(lam[:, 0] - formula[:, 0]), np.abs(lam[:, 1] - formula[:, 1]))
            d_swap = np.maximum(np.abs(lam[:, 0] - formula[:, 1]), np.abs(lam[:, 1] - formula[:, 0]))
            assert np.minimum(d_same, d_swap).max() < 2e-10

    def test_clamp_accepts_roundoff(self):
        assert _clamped_arccos(1.0 + 5e-13) == 0.0

    def test_clamp_rejects_real_excursions(self):
        with pytest.raises(NumericalInconsistency):
            _clamped_arccos(1.0 + 1e-9)


class TestGapClosings:
    def test_c0_contains_zero_closing(self):
        found = gap_closings(C0)
        assert any(
            abs(c.kstar - math.pi / 2) < 1e-9 and (c.m_index, c.n_index, c.gap) == (0, 0, Gap.ZERO)
            for c in found
        )

    def test_cpi_contains_pi_closing(self):
        found = gap_closings(CPI)
        assert any(
            abs(c.kstar) < 1e-9 and (c.m_index, c.n_index, c.gap) == (0, 1, Gap.PI)
            for c in found
        )

    def test_parity_convention(self):
        for c in gap_closings(C0) + gap_closings(CPI):
            expected = Gap.ZERO if (c.m_index + c.n_index) % 2 == 0 else Gap.PI
            assert c.gap is expected

    def test_p4_gapped(self):
        # independent oracle: both band gaps stay open on a dense grid
        p = model_params("P4")
        ks = np.linspace(-np.pi, np.pi, 20001)
        _, eps_plus = quasienergies(p, ks)
        assert eps_plus.min() > 1e-3
        assert (np.pi / p.T - eps_plus.max()) > 1e-3
        assert gap_closings(p) == []

    def test_drift_free_walk(self):
        # t1 = 0 makes theta1 identically zero; closings come from theta2 alone
        p = ModelParams(M=0.0, phi=0.0, t1=0.0)
        found = gap_closings(p)
        # theta2 = 2 cos k = 0 at k = +-pi/2, n = 0 -> zero-gap closings
        assert len(found) == 2
        assert all(c.gap is Gap.ZERO for c in found)
        ks = sorted(c.kstar for c in found)
        assert ks == pytest.approx([-math.pi / 2, math.pi / 2], abs=1e-9)


class TestFrames:
    def test_identity_when_all_couplings_vanish(self):
        p = ModelParams(M=0.0, phi=0.0, t1=0.0, t2=0.0)
        for f in (1, 2):
            assert np.abs(frame_unitary(p, 0.4, f) - IDENTITY_2).max() < 1e-15

    def test_frame1_collapses_without_drift(self):
        # theta1 = 0: the outer factors disappear and U1 = exp(-i theta2 sx)
        p = ModelParams(M=-0.7, phi=0.0, t1=0.0)
        _, th2 = angles(p, 0.9)
        expected = expm(-1j * th2 * SIGMA_X)
        assert np.abs(frame_unitary(p, 0.9, TimeFrame.FRAME1) - expected).max() < 1e-12

    def test_spectra_match_walk_operator(self):
        p = model_params("Q4")
        lam_walk = sorted(np.linalg.eigvals(bloch_unitary(p, 1.1)), key=np.angle)
        for f in (1, 2):
            lam_frame = sorted(np.linalg.eigvals(frame_unitary(p, 1.1, f)), key=np.angle)
            assert np.abs(np.array(lam_walk) - np.array(lam_frame)).max() < 1e-12

    def test_frame_equivalence_sweep(self, rng):
        ks = np.linspace(-np.pi, np.pi, 65)
        for p in random_params(rng, 4):
            walk = np.linalg.eigvals(bloch_unitaries(p, ks))
            for f in (1, 2):
                frame = np.linalg.eigvals(frame_unitaries(p, ks, f))
                d_same = np.maximum(
                    np.abs(walk[:, 0] - frame[:, 0]), np.abs(walk[:, 1] - frame[:, 1])
                )
                d_swap = np.maximum(
                    np.abs(walk[:, 0] - frame[:, 1]), np.abs(walk[:, 1] - frame[:, 0])
                )
                assert np.minimum(d_same, d_swap).max() < 1e-11

    def test_chiral_identity_in_frames(self, rng):
        ks = -np.pi + 2 * np.pi * np.arange(1024) / 1024
        worst = 0.0
        for p in random_params(rng, 10):
            for f in (1, 2):
                u = frame_unitaries(p, ks, f)
                worst = max(worst, np.abs(SIGMA_Y @ u @ SIGMA_Y @ u - IDENTITY_2).max())
        assert worst < 1e-12


class TestFrameVector:
    def test_frame1_without_mixing(self):
        # theta2 = 0 -> (nx, nz) = (0, sin theta1)
        p = ModelParams(M=0.0, phi=0.0, t2=0.0)
        th1, _ = angles(p, 0.8)
        v = frame_vector(p, 0.8, 1)
        assert (v.nx, v.nz) == pytest.approx((0.0, math.sin(th1)), abs=1e-14)

    def test_frame2_without_drift(self):
        # theta1 = 0 -> (nx, nz) = (sin theta2, 0)
        p = ModelParams(M=-0.9, phi=0.0, t1=0.0)
        _, th2 = angles(p, 0.8)
        v = frame_vector(p, 0.8, 2)
        assert (v.nx, v.nz) == pytest.approx((math.sin(th2), 0.0), abs=1e-14)

    def test_q3_vector_never_vanishes(self):
        p = model_params("Q3")
        ks = -np.pi + 2 * np.pi * np.arange(4096) / 4096
        for f in (1, 2):
            nx, nz = frame_vector_components(p, ks, f)
            assert np.hypot(nx, nz).min() > 0.1

    def test_closure_with_pauli_decomposition(self, rng):
        for p in random_params(rng, 5):
            k = float(rng.uniform(-np.pi, np.pi))
            for f in (1, 2):
                d = pauli_decompose(frame_unitary(p, k, f))
                v = frame_vector(p, k, f)
                assert abs(d.dy) < 1e-12
                assert (d.d0, d.dx, d.dz) == pytest.approx((v.n0, v.nx, v.nz), abs=1e-12)

    def test_normalization(self, rng):
        for p in random_params(rng, 5):
            v = frame_vector(p, float(rng.uniform(-np.pi, np.pi)), 1)
            assert abs(v.n0**2 + v.nx**2 + v.nz**2 - 1.0) < 1e-12


class TestCriticalExpansion:
    def test_exact_at_the_closing(self):
        assert critical_expansion_error(C0, "C0", 0.0) < 1e-12
        assert critical_expansion_error(CPI, "Cpi", 0.0) < 1e-12

    @pytest.mark.parametrize("benchmark", ["C0", "Cpi"])
    def test_quadratic_scaling(self, benchmark):
        p = C0 if benchmark == "C0" else CPI
        ratios = [critical_expansion_error(p, benchmark, q) / q**2 for q in (1e-2, 5e-3, 2.5e-3)]
        spread = (max(ratios) - min(ratios)) / min(ratios)
        assert spread < 0.10

    def test_wrong_parameters(self):
        with pytest.raises(WrongParameters):
            critical_expansion_error(model_params("Q4"), "C0", 1e-3)

    def test_rejects_large_q(self):
        with pytest.raises(ValueError):
            critical_expansion_error(C0, "C0", 0.5)

    def test_rejects_unknown_benchmark(self):
        with pytest.raises(ValueError):
            critical_expansion_error(C0, "Cmid", 1e-3)
