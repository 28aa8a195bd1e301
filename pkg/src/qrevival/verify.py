"""Self-check battery behind the ``verify`` subcommand.

Each check exercises one module invariant at a default tolerance; passing
``tol`` overrides every check's tolerance (tightening it far enough makes
the affected checks fail by name, which is itself part of the contract).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analysis, dynamics, mathieu, model, spectrum, timescales

__all__ = ["run_checks", "CheckResult"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_mathieu_q0(tol):
    worst = 0.0
    for nu in (0.0, 0.5, 1.0, 2.7, 10.25):
        value = mathieu.characteristic_value(nu, 0.0, tol=1e-12)
        worst = max(worst, abs(value.a - nu * nu))
    return worst <= tol, f"max |a_nu(0) - nu^2| = {worst:.3e} (tol {tol:.1e})"


def _check_mathieu_dense(tol):
    value = mathieu.characteristic_value(0.0, 1.0, tol=1e-12)
    vals, vecs, _ = mathieu.characteristic_value_oracle(0.0, 1.0, 200)
    ref = vals[int(np.argmax(np.abs(vecs[200, :]) ** 2))]
    diff = abs(value.a - ref)
    return diff <= tol, f"|a_0(1) - dense oracle| = {diff:.3e} (tol {tol:.1e})"


def _check_mathieu_symmetries(tol):
    worst = 0.0
    for nu, q in ((0.7, 2.0), (2.3, 5.0), (5.2, -3.0)):
        a_plus = mathieu.characteristic_value(nu, q, 1e-12).a
        a_minus = mathieu.characteristic_value(-nu, q, 1e-12).a
        a_negq = mathieu.characteristic_value(nu, -q, 1e-12).a
        worst = max(worst, abs(a_plus - a_minus), abs(a_plus - a_negq))
    return worst <= tol, f"max order/q-symmetry defect = {worst:.3e} (tol {tol:.1e})"


def _check_model_parseval(tol):
    g = 32
    t1 = 2 * np.pi * np.arange(g) / g
    t2 = 2 * np.pi * np.arange(g) / g
    h = (2.0 * np.cos(2 * t1[:, None] - t2[None, :])
         + 0.3 * np.cos(t1)[:, None] + 0.7)
    band = (g - 1) // 2
    total = 0.0
    for n1 in range(-band, band + 1):
        for n2 in range(-band, band + 1):
            total += abs(model.coupling_fourier_amplitude(h, (n1, n2))) ** 2
    diff = abs(total - np.mean(np.abs(h) ** 2))
    return diff <= tol, f"Parseval defect = {diff:.3e} (tol {tol:.1e})"


def _check_model_reduce(tol):
    acts = np.linspace(0.0, 2.0, 81)
    curve = model.FrequencyCurve(acts, acts**2 / 2.0, kind="h0")
    params = model.reduce_to_resonance(curve, 1.0, (0.0, 1.0, 1, None), 1.0)
    worst = max(abs(params.omega - 1.0), abs(params.zeta - 1.0))
    return worst <= tol, f"quadratic (omega,zeta) defect = {worst:.3e} (tol {tol:.1e})"


def _check_spectrum_lambda0(tol):
    params = model.ResonanceParams(omega=1.0, zeta=0.5, lam=0.0, V=1.0,
                                   hbar=1.0, H0=2.0)
    spec = spectrum.build_spectrum(params, m_range=20)
    worst = 0.0
    for entry in spec.entries.values():
        k = entry.k
        ref = params.H0 + params.hbar * params.omega * k \
            + params.zeta * (params.hbar * k) ** 2 / 2.0
        worst = max(worst, abs(entry.energy - ref) / max(1.0, abs(ref)))
    return worst <= tol, f"lambda=0 reduction defect = {worst:.3e} (tol {tol:.1e})"


def _check_spectrum_matrix(tol):
    params = model.ResonanceParams(omega=1.0, zeta=0.5, lam=0.05, V=1.0)
    spec = spectrum.build_spectrum(params, m_range=6)
    diag, off = dynamics.build_hamiltonian_matrix(params, 48)
    from scipy.linalg import eigh_tridiagonal
    vals, vecs = eigh_tridiagonal(diag, off)
    worst = 0.0
    for m, entry in spec.entries.items():
        site = 48 + m
        j = int(np.argmax(np.abs(vecs[site, :]) ** 2))
        worst = max(worst, abs(entry.energy - vals[j]) / max(1.0, abs(entry.energy)))
    return worst <= tol, (
        f"spectrum/matrix defect = {worst:.3e} over {len(spec.entries)} "
        f"entries, {len(spec.failures)} degenerate (tol {tol:.1e})"
    )


def _check_times_identities(tol):
    base = timescales.closed_form_times(
        model.ResonanceParams(omega=1.0, zeta=0.1, lam=0.0, V=1.0))
    # synthesize times obeying the mu<<1 and mu>>1 factor relations
    m_cl = -2.3e-4
    from dataclasses import replace
    ts_b = replace(base, M_cl=m_cl, M_Q=-3 * m_cl,
                   Tl_cl=(1 - m_cl) * base.T0_cl, Tl_Q=(1 + 3 * m_cl) * base.T0_Q)
    ts_c = replace(base, M_cl=-7e-5, M_Q=-7e-5,
                   Tl_cl=(1 + 7e-5) * base.T0_cl, Tl_Q=(1 + 7e-5) * base.T0_Q)
    r_b = timescales.case_relations(ts_b)[0]
    r_c = timescales.case_relations(ts_c)[1]
    worst = max(abs(r_b), abs(r_c))
    return worst <= tol, f"max case-identity residual = {worst:.3e} (tol {tol:.1e})"


def _check_times_hbar4(tol):
    p1 = model.ResonanceParams(omega=1.0, zeta=10.0, lam=0.01, V=1.0, hbar=1.0)
    p2 = p1.with_(hbar=2.0)
    ratio = timescales.closed_form_times(p1).beta / timescales.closed_form_times(p2).beta
    diff = abs(ratio - 16.0)
    return diff <= tol, f"|beta ratio - 16| = {diff:.3e} (tol {tol:.1e})"


def _check_times_agreement(tol):
    params = model.ResonanceParams(omega=1.0, zeta=0.1, lam=1e-3, V=1.0)
    cf = timescales.closed_form_times(params)
    num = timescales.numeric_times(params, step=0.2)
    worst = max(abs(num.M_cl / cf.M_cl - 1.0), abs(num.M_Q / cf.M_Q - 1.0))
    return worst <= tol, f"closed/numeric M defect = {worst:.3e} (tol {tol:.1e})"


def _deep_well_params():
    return model.ResonanceParams(omega=0.0, zeta=1.0, lam=1.0, V=100.0)


def _check_dynamics_unitarity(tol):
    params = model.ResonanceParams(omega=1.0, zeta=0.5, lam=0.05, V=1.0)
    trace = dynamics.evolve(params, dynamics.WavePacketSpec(sigma_m=2.0),
                            dt=0.05, steps=800, half_bandwidth=32)
    drift = trace.metadata["norm_drift"]
    ok = drift <= tol and abs(trace.values[0] - 1.0) <= 1e-12
    return ok, f"norm drift = {drift:.3e} (tol {tol:.1e})"


def _check_dynamics_reversal(tol):
    params = model.ResonanceParams(omega=1.0, zeta=0.5, lam=0.05, V=1.0)
    prop = dynamics.LadderPropagator(params, 32)
    c0 = prop.packet_coefficients(dynamics.WavePacketSpec(sigma_m=2.0))
    c2 = prop.propagate(prop.propagate(c0, 17.3), -17.3)
    defect = abs(abs(np.vdot(c0, c2)) - 1.0)
    return defect <= tol, f"time-reversal defect = {defect:.3e} (tol {tol:.1e})"


def _check_dynamics_determinism(tol):
    params = model.ResonanceParams(omega=1.0, zeta=0.5, lam=0.02, V=1.0)
    packet = dynamics.WavePacketSpec(sigma_m=2.0)
    t1 = dynamics.evolve(params, packet, dt=0.1, steps=200, half_bandwidth=24)
    t2 = dynamics.evolve(params, packet, dt=0.1, steps=200, half_bandwidth=24)
    same = bool(np.array_equal(t1.values, t2.values))
    return same, "bit-identical traces" if same else "traces differ"


def _check_dynamics_center(tol):
    params = _deep_well_params()
    mode = dynamics.resonance_center_mode(params)
    packet = dynamics.WavePacketSpec(mean_m=1.7, sigma_m=2.2360679775,
                                     phase_gradient=np.pi / 2)
    dt = mode.period / 200.0
    trace = dynamics.evolve(params, packet, dt=dt, steps=1250, half_bandwidth=64)
    lows = [trace.values[round(j * mode.period / dt)] for j in range(1, 6)]
    worst = min(lows)
    return worst >= tol, f"min |C|^2 at 5 center periods = {worst:.4f} (floor {tol})"


def _check_dynamics_revival(tol):
    params = model.ResonanceParams(omega=1.0, zeta=0.5, lam=0.0, V=1.0)
    trace = dynamics.evolve(params, dynamics.WavePacketSpec(sigma_m=2.0),
                            dt=0.02, steps=1500, half_bandwidth=32)
    t_q = 4 * np.pi / (params.hbar * params.zeta)
    t = trace.times()
    window = trace.values[(t >= 0.9 * t_q) & (t <= 1.1 * t_q)]
    peak = float(window.max())
    return peak >= tol, f"revival max = {peak:.4f} (floor {tol})"


def _check_analysis_parabolic(tol):
    dt = 0.1
    t_true, h_true = 1.2345, 0.87
    ts = dt * np.arange(40)
    vals = h_true - 0.3 * (ts - t_true) ** 2
    trace = dynamics.AutocorrTrace(dt=dt, values=np.clip(vals, 0, None),
                                   t_max=ts[-1])
    peaks = analysis.detect_peaks(trace, 0.5)
    worst = min(abs(t - t_true) for t, _ in peaks)
    return worst <= tol, f"parabolic refinement error = {worst:.3e} (tol {tol:.1e})"


def _check_analysis_monotone(tol):
    params = model.ResonanceParams(omega=1.0, zeta=0.5, lam=0.0, V=1.0)
    trace = dynamics.evolve(params, dynamics.WavePacketSpec(sigma_m=2.0),
                            dt=0.05, steps=600, half_bandwidth=32)
    counts = [len(analysis.detect_peaks(trace, th))
              for th in (0.1, 0.2, 0.4, 0.6, 0.8)]
    monotone = all(a >= b for a, b in zip(counts, counts[1:]))
    return monotone, f"peak counts over rising thresholds: {counts}"


# (name, function, default tolerance, tol-overridable)
# floor-type checks (larger is better) keep their own threshold
_CHECKS = (
    ("mathieu.q0_identity", _check_mathieu_q0, 1e-12, True),
    ("mathieu.dense_oracle", _check_mathieu_dense, 1e-10, True),
    ("mathieu.symmetries", _check_mathieu_symmetries, 1e-10, True),
    ("model.parseval", _check_model_parseval, 1e-10, True),
    ("model.quadratic_reduction", _check_model_reduce, 1e-10, True),
    ("spectrum.lambda0_reduction", _check_spectrum_lambda0, 1e-12, True),
    ("spectrum.matrix_agreement", _check_spectrum_matrix, 1e-7, True),
    ("timescales.case_identities", _check_times_identities, 1e-12, True),
    ("timescales.hbar4_law", _check_times_hbar4, 1e-9, True),
    ("timescales.closed_vs_numeric", _check_times_agreement, 1e-3, True),
    ("dynamics.unitarity", _check_dynamics_unitarity, 1e-12, True),
    ("dynamics.time_reversal", _check_dynamics_reversal, 1e-10, True),
    ("dynamics.determinism", _check_dynamics_determinism, 0.0, False),
    ("dynamics.center_recurrence", _check_dynamics_center, 0.9, False),
    ("dynamics.lambda0_revival", _check_dynamics_revival, 0.95, False),
    ("analysis.parabolic_refinement", _check_analysis_parabolic, 1e-9, True),
    ("analysis.threshold_monotone", _check_analysis_monotone, 0.0, False),
)


def run_checks(selector: str | None = None, tol: float | None = None):
    """Run the battery; ``selector`` filters by name prefix (module name)."""
    results = []
    for name, fn, default, overridable in _CHECKS:
        if selector and not name.startswith(selector):
            continue
        effective = tol if (tol is not None and overridable) else default
        try:
            ok, detail = fn(effective)
        except Exception as err:  # a crash is a failed invariant, not a crash
            ok, detail = False, f"raised {type(err).__name__}: {err}"
        results.append(CheckResult(name=name, passed=bool(ok), detail=detail))
    return results
