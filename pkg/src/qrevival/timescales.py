"""Classical period and quantum recurrence time with coupling corrections.

Uncoupled time scales:

    T0_cl = 2 pi / omega,          T0_Q = 4 pi / (hbar zeta),

and with coupling both are rescaled, T = (1 - M) T0, with modification
factors (valid to second order in the coupling)

    M_cl = -1/2 (lam V zeta / omega^2)^2 / (1 - mu^2)^2,
    M_Q  = +1/2 (lam V zeta / omega^2)^2 (3 + mu^2) / (1 - mu^2)^3,
    mu   = N hbar zeta / (2 omega).

The limiting magnitudes are alpha = (lam V zeta / omega^2)^2 / 2 for
mu << 1 (where M_Q = -3 M_cl = 3 alpha) and beta = q^2/2 for mu >> 1
(where M_Q = M_cl = -beta).

``numeric_times`` instead differentiates the full Mathieu quasi-energy:
omega1 = dE/dk / hbar and omega2 = d2E/dk2 / (2 hbar) at k = 0, via
five-point central differences, and is the reference against which the
closed forms are validated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BranchDegeneracyError, StencilError
from .mathieu import characteristic_value
from .model import ResonanceParams
from .spectrum import quasienergy

__all__ = ["TimeScales", "closed_form_times", "numeric_times", "case_relations"]

NEAR_SINGULAR_BAND = 1e-6


@dataclass(frozen=True)
class TimeScales:
    T0_cl: float
    T0_Q: float
    M_cl: float
    M_Q: float
    Tl_cl: float
    Tl_Q: float
    mu: float
    alpha: float
    beta: float
    regime: str          # case_a | case_b | case_c | near_singular
    source: str          # closed_form | numeric_derivative
    flags: tuple = ()

    FIELDS = ("T0_cl", "T0_Q", "M_cl", "M_Q", "Tl_cl", "Tl_Q",
              "mu", "alpha", "beta", "regime", "source")


def _alpha(params: ResonanceParams) -> float:
    if params.omega == 0:
        return math.inf if params.lam * params.V * params.zeta != 0 else 0.0
    return 0.5 * (params.lam * params.V * params.zeta / params.omega**2) ** 2


def _beta(params: ResonanceParams) -> float:
    if params.zeta == 0:
        return math.inf if params.lam * params.V != 0 else 0.0
    return 0.5 * params.mathieu_q**2


def _regime(mu: float) -> str:
    if abs(1.0 - mu * mu) < NEAR_SINGULAR_BAND:
        return "near_singular"
    return "case_b" if abs(mu) < 1.0 else "case_c"


def closed_form_times(params: ResonanceParams) -> TimeScales:
    """Time scales from the closed-form modification factors.

    zeta = 0 short-circuits to case a: both modification factors vanish
    and the quantum recurrence time is infinite (only classical periods
    exist in a linear system).  omega = 0 is reported as an open system
    (infinite classical period) with the mu -> inf limits M = -beta,
    rather than as an exception.
    """
    flags = []
    if params.zeta < 0:
        # the paper never treats inverted nonlinearity; values are reported
        # but not backed by the perturbative derivation
        flags.append("unvalidated_negative_zeta")

    if params.zeta == 0:
        t0_cl = math.inf if params.omega == 0 else 2.0 * math.pi / params.omega
        if params.omega == 0:
            flags.append("open_system")
        return TimeScales(
            T0_cl=t0_cl, T0_Q=math.inf, M_cl=0.0, M_Q=0.0,
            Tl_cl=t0_cl, Tl_Q=math.inf, mu=0.0,
            alpha=_alpha(params) if params.omega != 0 else 0.0,
            beta=_beta(params), regime="case_a", source="closed_form",
            flags=tuple(flags),
        )

    t0_q = 4.0 * math.pi / (params.hbar * params.zeta)
    beta = _beta(params)
    if params.omega == 0:
        flags.append("open_system")
        m_cl = m_q = -beta
        return TimeScales(
            T0_cl=math.inf, T0_Q=t0_q, M_cl=m_cl, M_Q=m_q,
            Tl_cl=math.inf, Tl_Q=(1.0 - m_q) * t0_q,
            mu=math.copysign(math.inf, params.zeta),
            alpha=_alpha(params), beta=beta, regime="case_c",
            source="closed_form", flags=tuple(flags),
        )

    mu = params.mu
    t0_cl = 2.0 * math.pi / params.omega
    x = (params.lam * params.V * params.zeta / params.omega**2) ** 2
    one_minus = 1.0 - mu * mu
    m_cl = -0.5 * x / one_minus**2
    m_q = 0.5 * x * (3.0 + mu * mu) / one_minus**3
    return TimeScales(
        T0_cl=t0_cl, T0_Q=t0_q, M_cl=m_cl, M_Q=m_q,
        Tl_cl=(1.0 - m_cl) * t0_cl, Tl_Q=(1.0 - m_q) * t0_q,
        mu=mu, alpha=_alpha(params), beta=beta,
        regime=_regime(mu), source="closed_form", flags=tuple(flags),
    )


def numeric_times(params: ResonanceParams, step: float = 1e-3,
                  tol: float = 1e-10) -> TimeScales:
    """Time scales from derivatives of the full quasi-energy at k = 0.

    Five-point central differences with label increment ``step``; the
    stencil spans nu0 +/- 4*step/N, which must stay on a single Mathieu
    branch.  A branch degeneracy inside the stencil raises StencilError.
    """
    if params.zeta == 0:
        raise StencilError("numeric derivatives need zeta != 0; use case a")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")

    h = step
    try:
        # one shared truncation across the stencil: eigensolver noise is
        # then strongly correlated point to point and cancels in the
        # differences (probing the center first also sizes the ladder)
        probe = characteristic_value(params.nu0, params.mathieu_q, tol)
        shared = probe.truncation + int(math.ceil(4.0 * h / params.N)) + 1
        e = [quasienergy(params, k, tol, half_bandwidth=shared)
             for k in (-2 * h, -h, 0.0, h, 2 * h)]
    except BranchDegeneracyError as err:
        raise StencilError(
            f"branch degeneracy inside the k-stencil (step={step}): {err}; "
            "try a smaller step or treat the point as unresolvable"
        ) from err

    d1 = (e[0] - 8.0 * e[1] + 8.0 * e[3] - e[4]) / (12.0 * h)
    d2 = (-e[0] + 16.0 * e[1] - 30.0 * e[2] + 16.0 * e[3] - e[4]) / (12.0 * h * h)
    omega1 = d1 / params.hbar
    omega2 = d2 / (2.0 * params.hbar)

    flags = []
    if omega1 <= 0:
        flags.append("nonpositive_first_order_frequency")
    if params.zeta < 0:
        flags.append("unvalidated_negative_zeta")

    t0_cl = math.inf if params.omega == 0 else 2.0 * math.pi / params.omega
    t0_q = 4.0 * math.pi / (params.hbar * params.zeta)
    tl_cl = math.inf if omega1 == 0 else 2.0 * math.pi / omega1
    tl_q = math.inf if omega2 == 0 else 2.0 * math.pi / omega2
    m_cl = 1.0 - params.omega / omega1 if omega1 != 0 else math.nan
    m_q = 1.0 - (params.hbar * params.zeta / 2.0) / omega2 if omega2 != 0 else math.nan
    if params.omega == 0:
        flags.append("open_system")
        mu = math.copysign(math.inf, params.zeta)
        regime = "case_c"
    else:
        mu = params.mu
        regime = _regime(mu)
    return TimeScales(
        T0_cl=t0_cl, T0_Q=t0_q, M_cl=m_cl, M_Q=m_q,
        Tl_cl=tl_cl, Tl_Q=tl_q, mu=mu,
        alpha=_alpha(params), beta=_beta(params),
        regime=regime, source="numeric_derivative", flags=tuple(flags),
    )


def case_relations(ts: TimeScales) -> tuple:
    """Residuals of the case-b and case-c identities.

    r_b = 3*Tl_cl/(4*T0_cl) + Tl_Q/(4*T0_Q) - 1  vanishes when the factors
    obey M_Q = -3*M_cl (mu << 1); r_c = Tl_cl/T0_cl - Tl_Q/T0_Q vanishes
    when M_Q = M_cl (mu >> 1).  The caller interprets the residual that
    matches the regime tag.
    """
    if not math.isfinite(ts.T0_Q):
        raise ValueError("case relations need a finite T0_Q (zeta != 0)")
    r_b = 3.0 * ts.Tl_cl / (4.0 * ts.T0_cl) + ts.Tl_Q / (4.0 * ts.T0_Q) - 1.0
    r_c = ts.Tl_cl / ts.T0_cl - ts.Tl_Q / ts.T0_Q
    return r_b, r_c
