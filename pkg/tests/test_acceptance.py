"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.

Criterion 7c (deep-well level gaps equal within 1%) FAILS by design: at
q = 400 the leading anharmonic correction makes adjacent bound-state gaps
differ by 1.30-1.35% (gaps 9.8734, 9.7447, 9.6133 in units where the
harmonic spacing is 10), independently confirmed by scipy's integer-order
Mathieu values.  The 1% figure is not attainable at q = 400 under any
reading of "equal"; see the decisions ledger.  The test still asserts the
stated tolerance rather than a loosened one.
"""

import math
import time

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from qrevival import (
    ResonanceParams,
    WavePacketSpec,
    build_spectrum,
    case_relations,
    characteristic_value,
    characteristic_value_oracle,
    closed_form_times,
    evolve,
    extract_times,
    level_spacing_report,
    numeric_times,
    resonance_center_mode,
)
from qrevival.cli import main
from qrevival.dynamics import LadderPropagator, build_hamiltonian_matrix


def report(criterion, ok, detail, elapsed, limit):
    status = "PASS" if ok else "FAIL"
    print(f"\n{status} acceptance {criterion}: {detail} "
          f"[{elapsed:.2f}s / limit {limit:.0f}s]")
    assert elapsed < limit, f"{criterion}: runtime {elapsed:.1f}s over {limit}s"
    assert ok, f"{criterion}: {detail}"


# shared parameter sets -------------------------------------------------

def mu_params(mu, lam):
    return ResonanceParams(omega=1.0, zeta=2.0 * mu, lam=lam, V=1.0)


REFERENCE = ResonanceParams(omega=1.0, zeta=0.5, lam=0.0, V=1.0)
CROSSVAL = ResonanceParams(omega=1.0, zeta=0.5, lam=0.05, V=1.0)
DEEP_WELL = ResonanceParams(omega=0.0, zeta=1.0, lam=1.0, V=100.0)
CENTER_PACKET = WavePacketSpec(mean_m=1.7, sigma_m=400.0**0.25 / 2.0,
                               phase_gradient=math.pi / 2.0)
# steps chosen per the analysis contract: >= 5.25 classical periods for
# the period median and >= 1.2 T_Q for the revival window
REFERENCE_TRACE = dict(dt=0.02, steps=1700, half_bandwidth=32)


@pytest.fixture(scope="module")
def reference_trace():
    return evolve(REFERENCE, WavePacketSpec(sigma_m=2.0), **REFERENCE_TRACE)


@pytest.fixture(scope="module")
def center_trace():
    period = resonance_center_mode(DEEP_WELL).period
    return evolve(DEEP_WELL, CENTER_PACKET, dt=period / 200.0, steps=1250,
                  half_bandwidth=64)


def test_criterion_1_mathieu_correctness():
    t0 = time.perf_counter()
    worst_q0 = max(abs(characteristic_value(nu, 0.0, 1e-12).a - nu * nu)
                   for nu in (0.0, 0.5, 1.0, 2.7, 10.25))
    value = characteristic_value(0.0, 1.0, tol=1e-12)
    vals, vecs, _ = characteristic_value_oracle(0.0, 1.0, 200)
    dense = vals[int(np.argmax(np.abs(vecs[200, :]) ** 2))]
    oracle_diff = abs(value.a - dense)
    redoubled = characteristic_value(0.0, 1.0, tol=1e-12,
                                     half_bandwidth=2 * value.truncation)
    doubling_change = abs(redoubled.a - value.a)
    ok = worst_q0 <= 1e-12 and oracle_diff <= 1e-10 and doubling_change < 1e-12
    report("1 (mathieu correctness)", ok,
           f"max|a-nu^2|={worst_q0:.1e}, |a_0(1)-dense|={oracle_diff:.1e}, "
           f"doubling change={doubling_change:.1e}",
           time.perf_counter() - t0, 1.0)


def test_criterion_2_lambda0_reduction():
    t0 = time.perf_counter()
    params = REFERENCE.with_(H0=2.0)  # offset keeps every |E| >= 1
    spec = build_spectrum(params, m_range=20)
    worst = 0.0
    for entry in spec.entries.values():
        ref = (params.H0 + params.hbar * params.omega * entry.k
               + params.zeta * (params.hbar * entry.k) ** 2 / 2.0)
        worst = max(worst, abs(entry.energy - ref) / abs(ref))
    ok = len(spec.entries) == 41 and not spec.failures and worst <= 1e-12
    report("2 (lambda=0 reduction)", ok,
           f"41 labels, worst relative defect {worst:.2e}",
           time.perf_counter() - t0, 1.0)


def test_criterion_3_spectrum_matrix_crossvalidation():
    t0 = time.perf_counter()
    spec = build_spectrum(CROSSVAL, m_range=10)
    diag, off = build_hamiltonian_matrix(CROSSVAL, 64)
    vals, vecs = eigh_tridiagonal(diag, off)
    worst = 0.0
    for m, entry in spec.entries.items():
        weights = np.abs(vecs[64 + m, :]) ** 2
        partner = vals[int(np.argmax(weights))]
        worst = max(worst,
                    abs(entry.energy - partner) / max(1.0, abs(entry.energy)))
    ok = len(spec.entries) == 21 and not spec.failures and worst <= 1e-7
    report("3 (spectrum/matrix cross-validation)", ok,
           f"21/21 labels paired, worst relative defect {worst:.2e}",
           time.perf_counter() - t0, 5.0)


def exact_curvature_factors(params):
    """Oracle for criterion 4: machine-precision dE/dk and d2E/dk2 from
    first/second-order perturbation theory on the eigenpair (independent
    of the finite-difference route under test)."""
    half = 32
    nu, q = params.nu0, params.mathieu_q
    m = np.arange(-half, half + 1)
    vals, vecs = eigh_tridiagonal((nu + 2.0 * m) ** 2, np.full(2 * half, q))
    i = int(np.argmax(np.abs(vecs[half, :]) ** 2))
    v = vecs[:, i]
    deriv = 2.0 * (nu + 2.0 * m)
    d1 = float(v @ (deriv * v))
    dv = deriv * v
    d2 = 2.0
    for j in range(len(vals)):
        if j != i:
            d2 += 2.0 * float(vecs[:, j] @ dv) ** 2 / (vals[i] - vals[j])
    scale = params.well_scale
    omega1 = scale * d1 * (2.0 / params.N) / params.hbar
    omega2 = scale * d2 * (2.0 / params.N) ** 2 / (2.0 * params.hbar)
    return (1.0 - params.omega / omega1,
            1.0 - (params.hbar * params.zeta / 2.0) / omega2)


def test_criterion_4_closed_vs_numeric_timescales():
    t0 = time.perf_counter()
    details = []
    ok = True
    for mu, step in ((0.05, 0.2), (5.0, 0.02)):
        lams = np.geomspace(1e-3, 1e-2, 10)
        num_cl, num_q, agree = [], [], {}
        for lam in lams:
            params = mu_params(mu, lam)
            nm = numeric_times(params, step=step)
            cf = closed_form_times(params)
            num_cl.append(abs(nm.M_cl))
            num_q.append(abs(nm.M_Q))
            agree[lam] = max(abs(nm.M_cl / cf.M_cl - 1.0),
                             abs(nm.M_Q / cf.M_Q - 1.0))
        slope_cl = np.polyfit(np.log(lams), np.log(num_cl), 1)[0]
        slope_q = np.polyfit(np.log(lams), np.log(num_q), 1)[0]
        ok &= abs(slope_cl - 2.0) <= 0.05 and abs(slope_q - 2.0) <= 0.05
        ok &= agree[lams[0]] <= 1e-3
        # improving-as-lambda^2: the relative closed-form defect follows
        # C*lam^2; at lam <= 1e-2 the true defect sits below the numeric
        # noise floor (~1e-14 absolute), so the law is measured with the
        # exact-curvature oracle on the decade just above
        big = np.geomspace(1e-2, 1e-1, 5)
        defect = []
        for lam in big:
            params = mu_params(mu, lam)
            cf = closed_form_times(params)
            ex_cl, ex_q = exact_curvature_factors(params)
            defect.append(max(abs(ex_cl / cf.M_cl - 1.0),
                              abs(ex_q / cf.M_Q - 1.0)))
        slope_defect = np.polyfit(np.log(big), np.log(defect), 1)[0]
        ok &= abs(slope_defect - 2.0) <= 0.1
        details.append(
            f"mu={mu}: fit exponents ({slope_cl:.3f}, {slope_q:.3f}), "
            f"agreement@1e-3 = {agree[lams[0]]:.1e}, "
            f"defect-law exponent {slope_defect:.3f}")
    report("4 (closed vs numeric time scales)", bool(ok),
           "; ".join(details), time.perf_counter() - t0, 30.0)


def test_criterion_5_case_identities():
    import dataclasses
    t0 = time.perf_counter()
    base = closed_form_times(ResonanceParams(omega=1.0, zeta=0.1, lam=0.0,
                                             V=1.0))
    m_cl = -4.2e-4
    ts_b = dataclasses.replace(
        base, M_cl=m_cl, M_Q=-3.0 * m_cl,
        Tl_cl=(1.0 - m_cl) * base.T0_cl, Tl_Q=(1.0 + 3.0 * m_cl) * base.T0_Q)
    r_b = case_relations(ts_b)[0]
    beta = 6.5e-5
    ts_c = dataclasses.replace(
        base, M_cl=-beta, M_Q=-beta,
        Tl_cl=(1.0 + beta) * base.T0_cl, Tl_Q=(1.0 + beta) * base.T0_Q)
    r_c = case_relations(ts_c)[1]
    case_a = closed_form_times(ResonanceParams(omega=2.0, zeta=0.0, lam=0.3,
                                               V=1.0))
    ok = (abs(r_b) <= 1e-12 and abs(r_c) <= 1e-12
          and case_a.M_cl == 0.0 and case_a.M_Q == 0.0
          and math.isinf(case_a.T0_Q) and math.isinf(case_a.Tl_Q))
    report("5 (case identities)", ok,
           f"r_b={r_b:.2e}, r_c={r_c:.2e}, case-a M=0 with infinite T_Q",
           time.perf_counter() - t0, 1.0)


def test_criterion_6_hbar_fourth_power():
    t0 = time.perf_counter()
    p1 = ResonanceParams(omega=1.0, zeta=10.0, lam=0.01, V=1.0, hbar=1.0)
    p2 = p1.with_(hbar=2.0)
    ratio = closed_form_times(p1).beta / closed_form_times(p2).beta
    ok = abs(ratio - 16.0) <= 1e-9
    report("6 (hbar^-4 law)", ok, f"beta ratio on hbar doubling = {ratio!r}",
           time.perf_counter() - t0, 1.0)


def test_criterion_7a_reference_phenomenology(reference_trace):
    t0 = time.perf_counter()
    predicted = closed_form_times(REFERENCE)
    rep = extract_times(reference_trace, predicted, threshold=0.4)
    dev_cl = abs(rep.measured_Tcl / (2 * math.pi) - 1.0)
    dev_q = abs(rep.measured_TQ / (8 * math.pi) - 1.0)
    ok = dev_cl <= 0.02 and dev_q <= 0.05 and rep.plateau < 0.3
    report("7a (lambda=0 classical period, revival, collapse)", ok,
           f"Tcl dev {dev_cl:.2%}, TQ dev {dev_q:.2%}, "
           f"plateau {rep.plateau:.3f}",
           time.perf_counter() - t0, 60.0)


def test_criterion_7b_resonance_center(center_trace):
    t0 = time.perf_counter()
    mode = resonance_center_mode(DEEP_WELL)
    dt = center_trace.dt
    lows = [center_trace.values[round(j * mode.period / dt)]
            for j in range(1, 6)]
    import dataclasses
    predicted = dataclasses.replace(
        closed_form_times(DEEP_WELL), Tl_cl=mode.period,
        Tl_Q=mode.quantum_recurrence_time)
    rep = extract_times(center_trace, predicted, threshold=0.5)
    dev = abs(rep.measured_Tcl / mode.period - 1.0)
    ok = min(lows) >= 0.9 and dev <= 0.02 and rep.measured_TQ is None
    report("7b (resonance-center recurrences)", ok,
           f"min |C|^2 at 5 periods = {min(lows):.3f}, period dev {dev:.2%}",
           time.perf_counter() - t0, 60.0)


def test_criterion_7c_level_spacing():
    # KNOWN RED: at q=400 the first three gaps differ by 1.30-1.35%; the
    # 1% tolerance stated for this criterion is physically unattainable
    # (leading anharmonic inequality of adjacent gaps is 1/(4 sqrt q) =
    # 1.25%, plus higher-order terms).  Asserted as stated, not loosened.
    t0 = time.perf_counter()
    rep = level_spacing_report(DEEP_WELL, count=3)
    gaps = rep.gaps
    spread = float(np.max(np.abs(gaps / np.mean(gaps) - 1.0)))
    ok = not rep.shortfall and spread <= 0.01
    report("7c (equal level spacing at the resonance center)", ok,
           f"gaps {np.round(gaps, 4).tolist()}, max deviation from mean "
           f"{spread:.2%} vs stated 1% (see decisions ledger)",
           time.perf_counter() - t0, 60.0)


def test_criterion_8_unitarity_and_reversibility(reference_trace,
                                                 center_trace):
    t0 = time.perf_counter()
    drift = max(reference_trace.metadata["norm_drift"],
                center_trace.metadata["norm_drift"])
    worst_reversal = 0.0
    for params, packet, half, t_turn in (
            (REFERENCE, WavePacketSpec(sigma_m=2.0), 32, 8 * math.pi),
            (DEEP_WELL, CENTER_PACKET, 64, 5.0)):
        prop = LadderPropagator(params, half)
        c0 = prop.packet_coefficients(packet)
        c_back = prop.propagate(prop.propagate(c0, t_turn), -t_turn)
        worst_reversal = max(worst_reversal,
                             abs(abs(np.vdot(c0, c_back)) - 1.0))
    ok = drift <= 1e-12 and worst_reversal <= 1e-10
    report("8 (unitarity and reversibility)", ok,
           f"norm drift {drift:.1e}, reversal defect {worst_reversal:.1e}",
           time.perf_counter() - t0, 10.0)


def test_criterion_9_sweep_determinism(tmp_path):
    t0 = time.perf_counter()
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        "omega = 1.0\nzeta = 0.1\nV = 1.0\nk_step = 0.2\n"
        "sweep1_param = lambda\nsweep1_min = 1e-3\nsweep1_max = 1e-2\n"
        "sweep1_count = 10\nsweep1_spacing = log\n")
    outs = []
    for workers in ("1", "8"):
        out = tmp_path / f"w{workers}"
        assert main(["sweep", "--config", str(cfg), "--out", str(out),
                     "--workers", workers, "--no-plot"]) == 0
        outs.append([line for line in
                     (out / "sweep.csv").read_text().splitlines()
                     if not line.startswith("# timestamp")])
    ok = outs[0] == outs[1]
    report("9 (sweep determinism across workers)", ok,
           f"{len(outs[0]) - 1} rows byte-identical (timestamp line excluded)",
           time.perf_counter() - t0, 30.0)
