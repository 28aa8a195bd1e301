"""Quasi-energy spectrum of the quantized resonance.

The quasi-energy at ladder label k is

    E_k = (N^2 zeta hbar^2 / 8) * a_nu(k)(q) - omega^2/(2 zeta) + H0,
    nu(k) = 2k/N + 2 omega/(N zeta hbar),
    q     = 4 lam V / (N^2 zeta hbar^2).

At lam = 0 this reduces exactly to the quadratic form
H0 + hbar*omega*k + zeta*(hbar*k)^2/2.  ``quasienergy`` accepts real
(not just integer) k so that time scales can be obtained by numerically
differentiating it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BranchDegeneracyError, UnsupportedRegimeError
from .mathieu import characteristic_value
from .model import ResonanceParams

__all__ = ["SpectrumEntry", "Spectrum", "quasienergy", "build_spectrum"]


@dataclass(frozen=True)
class SpectrumEntry:
    m: int          # Fourier ladder index
    k: int          # quantum label, k = N*m
    nu: float       # Floquet index of the entry
    energy: float


@dataclass(frozen=True)
class Spectrum:
    """Quasi-energies over a symmetric ladder window.

    ``entries`` maps m to a SpectrumEntry for every label that produced a
    clean branch; ``failures`` maps m to the degeneracy message for the
    labels that did not.
    """

    params: ResonanceParams
    q: float
    nu0: float
    entries: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    def energies(self) -> np.ndarray:
        return np.array([e.energy for e in self.entries.values()])

    def to_csv(self, path, header_lines=()) -> None:
        """Write columns m,k,nu,E[,degenerate] with '#' metadata lines."""
        with open(path, "w", encoding="utf-8") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write("m,k,nu,E,degenerate\n")
            for m in sorted(set(self.entries) | set(self.failures)):
                if m in self.entries:
                    e = self.entries[m]
                    fh.write(f"{e.m},{e.k},{e.nu:.17g},{e.energy:.17g},0\n")
                else:
                    k = self.params.N * m
                    nu = 2.0 * k / self.params.N + self.nu0
                    fh.write(f"{m},{k},{nu:.17g},nan,1\n")


def quasienergy(params: ResonanceParams, k: float, tol: float = 1e-10,
                half_bandwidth: int | None = None) -> float:
    """Quasi-energy E_k; accepts real k for derivative probes.

    ``half_bandwidth`` pins the Mathieu ladder truncation (see
    characteristic_value); derivative stencils rely on it so that all
    their points share one truncation.  Raises UnsupportedRegimeError for
    zeta = 0 (the Mathieu mapping does not exist there; see the zeta=0
    short-circuit in the timescales module) and propagates
    BranchDegeneracyError from the Mathieu solver.
    """
    if params.zeta == 0:
        raise UnsupportedRegimeError(
            "zeta = 0 has no Mathieu form; use the linear-system (case a) "
            "handling in the timescales module"
        )
    nu = 2.0 * k / params.N + params.nu0
    value = characteristic_value(nu, params.mathieu_q, tol, half_bandwidth)
    return params.well_scale * value.a - params.omega**2 / (2.0 * params.zeta) + params.H0


def build_spectrum(params: ResonanceParams, m_range: int, tol: float = 1e-10) -> Spectrum:
    """Spectrum entries for m in [-m_range, m_range], k = N*m.

    Per-entry branch degeneracies do not abort the build; they are
    collected in ``failures`` alongside the successful entries.
    """
    if m_range < 1:
        raise ValueError(f"m_range must be >= 1, got {m_range}")
    if params.zeta == 0:
        raise UnsupportedRegimeError("zeta = 0 has no Mathieu spectrum")
    entries, failures = {}, {}
    for m in range(-m_range, m_range + 1):
        k = params.N * m
        try:
            e = quasienergy(params, float(k), tol)
        except BranchDegeneracyError as err:
            failures[m] = str(err)
            continue
        nu = 2.0 * k / params.N + params.nu0
        entries[m] = SpectrumEntry(m=m, k=k, nu=nu, energy=e)
    return Spectrum(
        params=params, q=params.mathieu_q, nu0=params.nu0,
        entries=entries, failures=failures,
    )
