import math

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from fluxwalk import (
    BoundaryCondition,
    LatticeOperator,
    LatticeSpec,
    ModelParams,
    NonUnitary,
    NoPiMode,
    NoZeroMode,
    OperatorKind,
    ZeroOverlap,
    bloch_momenta,
    cell_projector,
    edge_mode_presence,
    find_edge_pair,
    floquet_operator,
    frame_floquet_operator,
    logical_projection,
    model_params,
    optimized_superposition,
    quasienergies,
    quasienergy_spectrum,
)
from fluxwalk.spectra import EdgeModePair

OPEN = BoundaryCondition.OPEN
PERIODIC = BoundaryCondition.PERIODIC
PI_OVER_T = math.pi / 2.0  # T = 2 throughout the catalog


class TestQuasienergySpectrum:
    def test_identity_walk_has_flat_spectrum(self):
        p = ModelParams(M=0.0, phi=0.0, t1=0.0, t2=0.0)
        s = quasienergy_spectrum(floquet_operator(p, LatticeSpec(6, ne=3)))
        assert np.abs(s.eps).max() < 1e-14

    def test_requires_period_operator(self):
        op = frame_floquet_operator(model_params("Q1"), LatticeSpec(6, PERIODIC, ne=3), 1)
        with pytest.raises(ValueError):
            quasienergy_spectrum(op)

    def test_rejects_nonunitary_matrix(self):
        good = floquet_operator(model_params("Q1"), LatticeSpec(6, ne=3))
        bad = LatticeOperator(1.001 * good.matrix, good.spec, OperatorKind.PERIOD, good.params)
        with pytest.raises(NonUnitary):
            quasienergy_spectrum(bad)

    def test_periodic_matches_band_formula(self):
        p = model_params("Q1")
        L = 12
        s = quasienergy_spectrum(floquet_operator(p, LatticeSpec(L, PERIODIC)))
        lo, hi = quasienergies(p, bloch_momenta(L))
        lam_lattice = np.exp(-1j * p.T * s.eps)
        lam_formula = np.exp(-1j * p.T * np.concatenate([lo, hi]))
        cost = np.abs(lam_lattice[:, None] - lam_formula[None, :])
        rows, cols = linear_sum_assignment(cost)
        assert cost[rows, cols].max() < 1e-9

    def test_orthonormal_and_complete(self, p4_spectrum_60, p4_op_60):
        s = p4_spectrum_60
        gram = s.states.conj().T @ s.states
        assert np.abs(gram - np.eye(120)).max() < 1e-9
        recon = (s.states * np.exp(-1j * s.params.T * s.eps)) @ s.states.conj().T
        assert np.abs(recon - p4_op_60.matrix).max() < 1e-9

    def test_chiral_pairing(self, p4_spectrum_60):
        # every eps is matched by -eps on the quasienergy circle
        lam = np.exp(-1j * 2.0 * p4_spectrum_60.eps)
        cost = np.abs(lam[:, None] - np.conj(lam)[None, :])
        rows, cols = linear_sum_assignment(cost)
        assert cost[rows, cols].max() < 1e-9

    def test_level_count_and_sorting(self, p4_spectrum_60):
        assert len(p4_spectrum_60.eps) == 120
        assert np.all(np.diff(p4_spectrum_60.eps) >= 0)


class TestEdgePair:
    def test_p4_hosts_both_modes(self, p4_spectrum_60):
        pair = find_edge_pair(p4_spectrum_60)
        assert abs(pair.eps0) < 1e-3
        assert abs(abs(pair.epspi) - PI_OVER_T) < 1e-3
        assert pair.weight0 > 0.6 and pair.weightpi > 0.6

    def test_p1_hosts_neither(self):
        s = quasienergy_spectrum(floquet_operator(model_params("P1"), LatticeSpec(60, OPEN)))
        with pytest.raises(NoZeroMode):
            find_edge_pair(s)
        assert edge_mode_presence(s) == (False, False)

    def test_p2_hosts_only_pi(self):
        s = quasienergy_spectrum(floquet_operator(model_params("P2"), LatticeSpec(60, OPEN)))
        assert edge_mode_presence(s) == (False, True)

    def test_p3_hosts_only_zero(self):
        s = quasienergy_spectrum(floquet_operator(model_params("P3"), LatticeSpec(60, OPEN)))
        assert edge_mode_presence(s) == (True, False)
        with pytest.raises(NoPiMode):
            find_edge_pair(s)

    def test_modes_live_on_the_left_edge(self, p4_spectrum_60):
        pair = find_edge_pair(p4_spectrum_60)
        for state in (pair.zero_mode, pair.pi_mode):
            right_tail = (np.abs(state[-10:]) ** 2).sum()
            assert right_tail < 1e-6

    def test_modes_are_orthonormal(self, p4_spectrum_60):
        pair = find_edge_pair(p4_spectrum_60)
        assert abs(np.linalg.norm(pair.zero_mode) - 1) < 1e-12
        assert abs(np.linalg.norm(pair.pi_mode) - 1) < 1e-12
        assert abs(np.vdot(pair.zero_mode, pair.pi_mode)) < 1e-9


class TestLogicalProjection:
    def test_tau_z_at_l60(self, p4_op_60, p4_spectrum_60):
        gate = logical_projection(p4_op_60, find_edge_pair(p4_spectrum_60))
        dev = np.abs(gate - np.diag([1.0, -1.0])).max()
        assert dev < 1e-3
        assert abs(gate[0, 1]) < 1e-3 and abs(gate[1, 0]) < 1e-3

    def test_deviation_shrinks_with_size(self, p4_op_60, p4_spectrum_60):
        dev60 = np.abs(
            logical_projection(p4_op_60, find_edge_pair(p4_spectrum_60)) - np.diag([1.0, -1.0])
        ).max()
        op120 = floquet_operator(model_params("P4"), LatticeSpec(120, OPEN))
        pair120 = find_edge_pair(quasienergy_spectrum(op120))
        dev120 = np.abs(logical_projection(op120, pair120) - np.diag([1.0, -1.0])).max()
        assert dev120 < dev60


class TestOptimizedSuperposition:
    def test_real_positive_overlap_gives_plain_sum(self):
        e = np.eye(8, dtype=complex)
        zero = (e[0] + e[2]) / np.sqrt(2)
        pi = (e[0] - e[2]) / np.sqrt(2)
        pair = EdgeModePair(zero, pi, 0.0, PI_OVER_T, 0.9, 0.9)
        pi1 = cell_projector(LatticeSpec(4, ne=2), 1)
        psi = optimized_superposition(pair, pi1)
        assert np.abs(psi - (zero + pi) / np.sqrt(2)).max() < 1e-12

    def test_zero_overlap_raises(self):
        e = np.eye(8, dtype=complex)
        pair = EdgeModePair(e[0], e[4], 0.0, PI_OVER_T, 0.9, 0.9)
        with pytest.raises(ZeroOverlap):
            optimized_superposition(pair, cell_projector(LatticeSpec(4, ne=2), 1))

    def test_unit_norm(self, p4_spectrum_60):
        pair = find_edge_pair(p4_spectrum_60)
        psi = optimized_superposition(pair, cell_projector(p4_spectrum_60.spec, 1))
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-12

    def test_beats_phase_sweep(self, p4_op_60, p4_spectrum_60):
        # 64-point sweep over the relative phase cannot beat the matched phase
        pair = find_edge_pair(p4_spectrum_60)
        pi1 = cell_projector(p4_spectrum_60.spec, 1).matrix
        u = p4_op_60.matrix

        def alternation(state):
            v0 = np.real(np.vdot(state, pi1 @ state))
            s1 = u @ state
            v1 = np.real(np.vdot(s1, pi1 @ s1))
            return abs(v0 - v1) / 2.0

        best = max(
            alternation((pair.zero_mode + np.exp(1j * t) * pair.pi_mode) / np.sqrt(2))
            for t in np.linspace(0, 2 * np.pi, 64, endpoint=False)
        )
        optimized = alternation(optimized_superposition(pair, pi1))
        assert optimized >= best - 1e-9
