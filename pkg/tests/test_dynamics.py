"""Ladder propagation tests.

Two independent oracles appear here: a closed-form phase sum over the
quadratic lam=0 spectrum (no diagonalization), and scipy's integer-order
Mathieu characteristic values for the deep-well level structure.
"""

import math

import numpy as np
import pytest
from scipy.special import mathieu_a, mathieu_b

from qrevival import (
    LadderPropagator,
    ResonanceParams,
    WavePacketSpec,
    build_hamiltonian_matrix,
    evolve,
    level_spacing_report,
    resonance_center_mode,
)
from qrevival.errors import BasisSizeError


def phase_sum_oracle(params, sigma_m, times, half_bandwidth=40):
    """|C(t)|^2 for lam = 0 from the analytic quadratic spectrum."""
    m = np.arange(-half_bandwidth, half_bandwidth + 1)
    energies = (params.H0 + params.hbar * params.omega * params.N * m
                + params.zeta * (params.hbar * params.N * m) ** 2 / 2.0)
    amp = np.exp(-(m**2) / (4.0 * sigma_m**2))
    weights = amp**2 / np.sum(amp**2)
    c = np.exp(-1j * np.outer(times, energies) / params.hbar) @ weights
    return np.abs(c) ** 2


def deep_well_params():
    # q = 4*lam*V/(N^2 zeta hbar^2) = 400, packet at the well center
    return ResonanceParams(omega=0.0, zeta=1.0, lam=1.0, V=100.0)


def center_packet():
    # ground-state width sigma_m = q^(1/4)/2, small momentum displacement
    # so the autocorrelation oscillates visibly
    return WavePacketSpec(mean_m=1.7, sigma_m=400.0**0.25 / 2.0,
                          phase_gradient=math.pi / 2.0)


class TestHamiltonianMatrix:
    def test_lambda0_diagonal_quadratic(self):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.0, V=1.0, H0=0.5)
        diag, off = build_hamiltonian_matrix(p, 6)
        assert np.all(off == 0.0)
        m = np.arange(-6, 7)
        assert np.allclose(diag, 0.25 * m**2 + m + 0.5, atol=1e-15)

    def test_pure_kinetic_eigenvalues(self):
        from scipy.linalg import eigh_tridiagonal
        p = ResonanceParams(omega=0.0, zeta=2.0, lam=0.0, V=1.0)
        diag, off = build_hamiltonian_matrix(p, 8)
        vals = eigh_tridiagonal(diag, off, eigvals_only=True)
        assert np.allclose(vals[:5], [0, 1, 1, 4, 4], atol=1e-13)

    def test_off_diagonal_is_half_lambda_v(self):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.05, V=2.0)
        _, off = build_hamiltonian_matrix(p, 5)
        assert np.all(off == 0.05)

    def test_rejects_small_bandwidth(self):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.0, V=1.0)
        with pytest.raises(ValueError):
            build_hamiltonian_matrix(p, 3)


class TestEvolve:
    def test_starts_at_unity(self):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.05, V=1.0)
        trace = evolve(p, WavePacketSpec(sigma_m=2.0), dt=0.05, steps=100,
                       half_bandwidth=32)
        assert abs(trace.values[0] - 1.0) <= 1e-12
        assert np.all(trace.values <= 1.0 + 1e-12)
        assert np.all(trace.values >= 0.0)
        assert trace.t_max == pytest.approx(5.0)

    def test_unitarity(self):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.05, V=1.0)
        trace = evolve(p, WavePacketSpec(sigma_m=2.0), dt=0.05, steps=1000,
                       half_bandwidth=32)
        assert trace.metadata["norm_drift"] <= 1e-12

    def test_deterministic_bit_identical(self):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.02, V=1.0)
        packet = WavePacketSpec(sigma_m=2.0)
        t1 = evolve(p, packet, dt=0.1, steps=300, half_bandwidth=24)
        t2 = evolve(p, packet, dt=0.1, steps=300, half_bandwidth=24)
        assert np.array_equal(t1.values, t2.values)

    def test_time_reversal(self):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.05, V=1.0)
        prop = LadderPropagator(p, 32)
        c0 = prop.packet_coefficients(WavePacketSpec(sigma_m=2.0))
        c_back = prop.propagate(prop.propagate(c0, 23.7), -23.7)
        assert abs(abs(np.vdot(c0, c_back)) - 1.0) <= 1e-10

    def test_lambda0_matches_phase_sum_oracle(self):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.0, V=1.0)
        trace = evolve(p, WavePacketSpec(sigma_m=2.0), dt=0.05, steps=400,
                       half_bandwidth=40)
        ref = phase_sum_oracle(p, 2.0, trace.times())
        assert np.max(np.abs(trace.values - ref)) <= 1e-10

    def test_lambda0_first_peak_and_revival(self):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.0, V=1.0)
        dt = 0.02
        trace = evolve(p, WavePacketSpec(sigma_m=2.0), dt=dt, steps=1600,
                       half_bandwidth=32)
        t = trace.times()
        # first recurrence peak within one dt of 2*pi
        window = (t > 5.0) & (t < 7.5)
        t_peak = t[window][np.argmax(trace.values[window])]
        assert abs(t_peak - 2 * math.pi) <= dt
        # revival envelope maximum near T0_Q = 8*pi
        t_q = 8 * math.pi
        rev = (t >= 0.9 * t_q) & (t <= 1.1 * t_q)
        assert trace.values[rev].max() >= 0.95

    def test_truncation_safety(self):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.0, V=1.0)
        with pytest.raises(BasisSizeError) as excinfo:
            evolve(p, WavePacketSpec(sigma_m=4.0), dt=0.1, steps=10,
                   half_bandwidth=16)
        assert excinfo.value.suggested > 16
        # the suggestion satisfies the bound
        evolve(p, WavePacketSpec(sigma_m=4.0), dt=0.1, steps=10,
               half_bandwidth=excinfo.value.suggested)

    def test_trace_csv(self, tmp_path):
        p = ResonanceParams(omega=1.0, zeta=0.5, lam=0.0, V=1.0)
        trace = evolve(p, WavePacketSpec(sigma_m=2.0), dt=0.1, steps=5,
                       half_bandwidth=24)
        path = tmp_path / "trace.csv"
        trace.to_csv(path)
        lines = path.read_text().splitlines()
        data = [line for line in lines if not line.startswith("#")]
        assert data[0] == "t,C2"
        assert len(data) == 7
        assert float(data[1].split(",")[1]) == pytest.approx(1.0, abs=1e-12)


class TestResonanceCenter:
    def test_unit_parameters(self):
        mode = resonance_center_mode(
            ResonanceParams(omega=0.0, zeta=1.0, lam=1.0, V=1.0))
        assert mode.stable
        assert mode.frequency == pytest.approx(1.0)
        assert mode.period == pytest.approx(2 * math.pi)
        assert math.isinf(mode.quantum_recurrence_time)

    def test_direct_evaluation(self):
        mode = resonance_center_mode(
            ResonanceParams(omega=0.0, zeta=0.25, lam=0.3, V=1.2, N=2))
        assert mode.frequency == pytest.approx(0.6)

    def test_unstable_without_coupling(self):
        mode = resonance_center_mode(
            ResonanceParams(omega=1.0, zeta=1.0, lam=0.0, V=1.0))
        assert not mode.stable and math.isnan(mode.frequency)

    def test_unstable_inverted_well(self):
        mode = resonance_center_mode(
            ResonanceParams(omega=0.0, zeta=-1.0, lam=1.0, V=1.0))
        assert not mode.stable

    def test_center_recurrences_each_period(self):
        # Deep well: the packet recurs at every multiple of the predicted
        # period 2*pi/(N*sqrt(zeta*lam*V)) with |C|^2 >= 0.9 for 5 periods.
        params = deep_well_params()
        mode = resonance_center_mode(params)
        assert mode.frequency == pytest.approx(10.0)
        dt = mode.period / 200.0
        trace = evolve(params, center_packet(), dt=dt, steps=1100,
                       half_bandwidth=64)
        for j in range(1, 6):
            at = trace.values[round(j * mode.period / dt)]
            assert at >= 0.9, f"|C|^2 = {at:.4f} at period {j}"


class TestLevelSpacing:
    def test_deep_well_gaps_against_scipy_oracle(self):
        # pi-periodic ladder eigenvalues at q=400 are B*a with
        # a in {a_0, b_2, a_2, b_4, ...}; B = N^2 zeta hbar^2/8 = 1/8
        params = deep_well_params()
        report = level_spacing_report(params, count=3)
        q = params.mathieu_q
        ref = np.diff([mathieu_a(0, q), mathieu_b(2, q),
                       mathieu_a(2, q), mathieu_b(4, q)]) / 8.0
        assert report.gaps == pytest.approx(ref, rel=1e-8)
        assert not report.shortfall
        # harmonic prediction hbar*N*sqrt(zeta lam V) = 10, anharmonic
        # corrections stay below 2/sqrt(q) relative on the first 3 gaps
        assert np.all(np.abs(report.gaps / 10.0 - 1.0) <= 2.0 / math.sqrt(q))
        # the measured inequality of adjacent gaps is ~1.3% at q=400
        adj = np.abs(np.diff(report.gaps) / report.gaps[:-1])
        assert np.all(adj <= 0.014)
        assert np.all(adj >= 0.012)

    def test_shallow_well_shortfall(self):
        # q = 1 binds a single state (a_0(1) = -0.455 is the only value
        # below the barrier top 2q), so no gaps can be reported
        params = ResonanceParams(omega=0.0, zeta=1.0, lam=1.0, V=0.25)
        assert params.mathieu_q == pytest.approx(1.0)
        report = level_spacing_report(params, count=3)
        assert report.shortfall
        assert report.bound_count == 1
        assert report.gaps.size == 0

    def test_mid_depth_gaps_unequal(self):
        # q = 25: several bound states, visibly anharmonic spacing
        params = ResonanceParams(omega=0.0, zeta=1.0, lam=1.0, V=6.25)
        report = level_spacing_report(params, count=3)
        assert not report.shortfall
        assert np.all(np.diff(report.gaps) < 0)  # gaps shrink monotonically
        assert np.max(np.abs(np.diff(report.gaps) / report.gaps[:-1])) > 0.01

    def test_count_contract(self):
        report = level_spacing_report(deep_well_params(), count=2)
        assert report.gaps.size == 2
        with pytest.raises(ValueError):
            level_spacing_report(deep_well_params(), count=1)
