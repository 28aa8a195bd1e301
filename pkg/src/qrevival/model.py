"""Parameter records and the classical reduction to a single resonance.

The central record is :class:`ResonanceParams`: the coefficients of the
one-resonance Hamiltonian

    H = H0 + omega*(I - I0) + (zeta/2)*(I - I0)**2 + lam*V*cos(N*phi),

either supplied directly or derived from sampled data with the helpers in
this module (Fourier amplitude of a coupling term, resonant actions of a
frequency pair, local derivatives of a sampled energy curve).

All operations here are pure functions of their inputs; the records are
frozen dataclasses and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    InputRangeError,
    InputShapeError,
    NumericalQualityError,
)

__all__ = [
    "ResonanceParams",
    "FrequencyCurve",
    "ResonanceRoots",
    "coupling_fourier_amplitude",
    "find_resonances",
    "reduce_to_resonance",
    "load_frequency_curve",
]


@dataclass(frozen=True)
class ResonanceParams:
    """The reduced one-resonance system.

    Attributes
    ----------
    omega : float
        Classical frequency dH0/dI at the mean action I0.
    zeta : float
        Nonlinearity d2H0/dI2 at I0.
    lam : float
        Coupling strength (dimensionless, >= 0).
    V : float
        Fourier amplitude of the resonant coupling term.
    N : int
        Resonance order (positive integer).
    M : int or None
        Co-prime partner integer of the resonance vector; informational.
    hbar : float
        Quantum of action (> 0).
    H0 : float
        Reference energy of the uncoupled system at I0.
    I0 : float
        Mean action of the excitation.
    """

    omega: float
    zeta: float
    lam: float
    V: float
    N: int = 1
    M: int | None = None
    hbar: float = 1.0
    H0: float = 0.0
    I0: float = 0.0

    def __post_init__(self):
        if self.hbar <= 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if self.M is not None and math.gcd(abs(int(self.M)), int(self.N)) != 1:
            raise ValueError(f"M={self.M} and N={self.N} must be co-prime")
        object.__setattr__(self, "N", int(self.N))
        if self.M is not None:
            object.__setattr__(self, "M", int(self.M))

    @property
    def mathieu_q(self) -> float:
        """Mathieu parameter q = 4*lam*V / (N^2 * zeta * hbar^2)."""
        if self.zeta == 0:
            raise ZeroDivisionError("q is undefined for zeta = 0")
        return 4.0 * self.lam * self.V / (self.N**2 * self.zeta * self.hbar**2)

    @property
    def nu0(self) -> float:
        """Floquet index at the ladder center, 2*omega / (N * zeta * hbar)."""
        if self.zeta == 0:
            raise ZeroDivisionError("nu0 is undefined for zeta = 0")
        return 2.0 * self.omega / (self.N * self.zeta * self.hbar)

    @property
    def mu(self) -> float:
        """Regime parameter N * hbar * zeta / (2 * omega)."""
        if self.omega == 0:
            raise ZeroDivisionError("mu is undefined for omega = 0")
        return self.N * self.hbar * self.zeta / (2.0 * self.omega)

    @property
    def well_scale(self) -> float:
        """Kinetic prefactor N^2 * zeta * hbar^2 / 8 of the ladder Hamiltonian."""
        return self.N**2 * self.zeta * self.hbar**2 / 8.0

    def with_(self, **kwargs) -> "ResonanceParams":
        """Copy with some fields replaced."""
        return replace(self, **kwargs)


@dataclass(frozen=True)
class FrequencyCurve:
    """A sampled curve over action: Omega1(I), Omega2(I) or H0bar(I).

    ``actions`` must be strictly increasing with at least 4 samples.
    """

    actions: np.ndarray
    values: np.ndarray
    kind: str = "h0"  # one of "omega1", "omega2", "h0"

    def __post_init__(self):
        a = np.asarray(self.actions, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if a.ndim != 1 or v.ndim != 1 or a.size != v.size:
            raise InputShapeError("actions and values must be 1-D of equal length")
        if a.size < 4:
            raise InputShapeError(f"need at least 4 samples, got {a.size}")
        if not np.all(np.diff(a) > 0):
            raise InputShapeError("actions must be strictly increasing")
        if self.kind not in ("omega1", "omega2", "h0"):
            raise ValueError(f"unknown curve kind {self.kind!r}")
        object.__setattr__(self, "actions", a)
        object.__setattr__(self, "values", v)

    def spline(self) -> CubicSpline:
        return CubicSpline(self.actions, self.values)

    def __len__(self) -> int:
        return self.actions.size


@dataclass(frozen=True)
class ResonanceRoots:
    """Result of a resonance search: root actions plus a degeneracy flag."""

    roots: tuple
    degenerate: bool = False


def load_frequency_curve(path, kind: str = "h0") -> FrequencyCurve:
    """Read a two-column (action, value) text file.

    Lines starting with '#' are comments; columns are whitespace-delimited.
    """
    data = np.loadtxt(path, comments="#", ndmin=2)
    if data.ndim != 2 or data.shape[1] < 2:
        raise InputShapeError(f"{path}: expected two whitespace-delimited columns")
    return FrequencyCurve(actions=data[:, 0], values=data[:, 1], kind=kind)


def coupling_fourier_amplitude(h_c_samples, n) -> complex:
    """Fourier amplitude H_n of a coupling Hamiltonian sampled on an angle grid.

    Parameters
    ----------
    h_c_samples : (G1, G2) array
        Values of H_c on the uniform grid theta_i = 2*pi*j/G_i over [0, 2pi)^2.
    n : (int, int)
        Harmonic index pair (n1, n2).

    Returns
    -------
    complex
        (1/(2pi)^2) * integral of H_c * exp(-i n.theta), evaluated by the
        discrete transform, which is exact for band-limited input.
    """
    h = np.asarray(h_c_samples)
    if h.ndim != 2:
        raise InputShapeError(f"expected a 2-D grid of samples, got ndim={h.ndim}")
    g1, g2 = h.shape
    if g1 < 4 or g2 < 4:
        raise InputShapeError(f"grid must be at least 4x4, got {g1}x{g2}")
    n1, n2 = int(n[0]), int(n[1])
    if abs(n1) > (g1 - 1) // 2 or abs(n2) > (g2 - 1) // 2:
        raise InputRangeError(
            f"harmonic ({n1},{n2}) is beyond the Nyquist range of a {g1}x{g2} grid"
        )
    t1 = 2.0 * np.pi * np.arange(g1) / g1
    t2 = 2.0 * np.pi * np.arange(g2) / g2
    phase = np.exp(-1j * (n1 * t1[:, None] + n2 * t2[None, :]))
    return complex(np.mean(h * phase))


def find_resonances(omega1: FrequencyCurve, omega2, n, i2: float | None = None,
                    rel_tol: float = 1e-10) -> ResonanceRoots:
    """Actions I where n1*Omega1(I) + n2*Omega2 = 0.

    ``omega2`` is either the pinned value of the second frequency (a float)
    or a FrequencyCurve together with the pin action ``i2``.  Sign-change
    roots of the interpolated residual are refined by bisection to relative
    tolerance ``rel_tol``.  A residual identically below 1e-12 is reported
    through the ``degenerate`` flag instead of an infinite root list.
    """
    n1, n2 = int(n[0]), int(n[1])
    if n1 == 0 and n2 == 0:
        raise ValueError("resonance vector (0, 0) is not allowed")
    if isinstance(omega2, FrequencyCurve):
        if i2 is None:
            raise ValueError("pin action i2 is required when omega2 is a curve")
        w2 = float(omega2.spline()(i2))
    else:
        w2 = float(omega2)

    spline = omega1.spline()
    acts = omega1.actions
    resid_samples = n1 * omega1.values + n2 * w2
    if np.all(np.abs(resid_samples) < 1e-12):
        return ResonanceRoots(roots=(), degenerate=True)

    def resid(x):
        return n1 * float(spline(x)) + n2 * w2

    roots = []
    for lo, hi, rlo, rhi in zip(acts[:-1], acts[1:], resid_samples[:-1],
                                resid_samples[1:]):
        if rlo == 0.0:
            roots.append(float(lo))
            continue
        if rlo * rhi > 0:
            continue
        a, b, ra = float(lo), float(hi), float(rlo)
        scale = max(abs(a), abs(b), 1.0)
        while (b - a) > rel_tol * scale:
            mid = 0.5 * (a + b)
            rm = resid(mid)
            if rm == 0.0:
                a = b = mid
                break
            if ra * rm < 0:
                b = mid
            else:
                a, ra = mid, rm
        roots.append(0.5 * (a + b))
    if resid_samples[-1] == 0.0:
        roots.append(float(acts[-1]))
    # adjacent intervals can both report a root sitting on their shared sample
    scale = max(abs(acts[0]), abs(acts[-1]), 1.0)
    deduped = []
    for r in sorted(roots):
        if not deduped or r - deduped[-1] > 10 * rel_tol * scale:
            deduped.append(r)
    return ResonanceRoots(roots=tuple(deduped), degenerate=False)


# Local least-squares fit degree; degree 4 keeps the second derivative of
# smooth curves unbiased through the Richardson levels below.
_FIT_DEGREE = 4
_WINDOW = 11


def _local_poly(curve: FrequencyCurve, i0: float):
    """Least-squares polynomial of degree 4 on a centered sample window."""
    acts, vals = curve.actions, curve.values
    center = int(np.argmin(np.abs(acts - i0)))
    half = _WINDOW // 2
    lo = max(0, min(center - half, acts.size - _WINDOW))
    window = slice(lo, lo + min(_WINDOW, acts.size))
    # shift to the expansion point for conditioning
    x = acts[window] - i0
    degree = min(_FIT_DEGREE, x.size - 1)
    coeffs = np.polynomial.polynomial.polyfit(x, vals[window], degree)
    return np.polynomial.polynomial.Polynomial(coeffs), x


def reduce_to_resonance(h0: FrequencyCurve, i0: float, coupling, hbar: float,
                        rel_tol: float = 1e-6) -> ResonanceParams:
    """Build ResonanceParams from a sampled unperturbed energy curve.

    omega and zeta are the first and second derivatives of the curve at
    ``i0``: central differences on a local degree-4 least-squares fit,
    Richardson-extrapolated over halving steps.  ``coupling`` is the tuple
    (lam, V, N, M).

    Raises
    ------
    InputRangeError
        If ``i0`` has fewer than 2 samples of margin on each side.
    NumericalQualityError
        If successive Richardson levels fail to agree to ``rel_tol``
        relative; the error carries the best (omega, zeta) estimate.
    """
    if h0.kind != "h0":
        raise ValueError(f"expected an energy curve, got kind={h0.kind!r}")
    acts = h0.actions
    if not (acts[2] <= i0 <= acts[-3]):
        raise InputRangeError(
            f"I0={i0} needs at least 2 samples of margin inside "
            f"[{acts[0]}, {acts[-1]}]"
        )
    poly, x_local = _local_poly(h0, i0)
    lam, V, N, M = coupling

    span = x_local.max() - x_local.min()
    h = span / 4.0

    def d1(step):
        return (poly(step) - poly(-step)) / (2.0 * step)

    def d2(step):
        return (poly(step) - 2.0 * poly(0.0) + poly(-step)) / step**2

    omega, zeta = _richardson(d1, h, rel_tol), _richardson(d2, h, rel_tol)
    return ResonanceParams(
        omega=omega, zeta=zeta, lam=lam, V=V, N=N, M=M, hbar=hbar,
        H0=float(poly(0.0)), I0=float(i0),
    )


def _richardson(f, h0: float, rel_tol: float, levels: int = 6) -> float:
    """Richardson extrapolation of a second-order difference quotient."""
    tableau = [f(h0)]
    best = tableau[0]
    for k in range(1, levels):
        h = h0 / 2.0**k
        row = [f(h)]
        for j in range(1, k + 1):
            fac = 4.0**j
            row.append((fac * row[j - 1] - tableau[j - 1]) / (fac - 1.0))
        converged = abs(row[-1] - tableau[-1]) <= rel_tol * max(1.0, abs(row[-1]))
        tableau = row
        best = row[-1]
        if converged and k >= 2:
            return best
    raise NumericalQualityError(
        f"derivative did not converge to rel_tol={rel_tol}", best=best
    )
