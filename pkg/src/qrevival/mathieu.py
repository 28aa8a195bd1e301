"""Mathieu characteristic values a_nu(q) for real, generally fractional order.

The pi-periodic Floquet ansatz phi(theta) = exp(i*nu*theta) * sum_m c_m
exp(2*i*m*theta) turns the Mathieu equation

    phi'' + (a - 2 q cos 2 theta) phi = 0

into a symmetric tridiagonal eigenproblem with diagonal (nu + 2m)^2 and
off-diagonal q.  The characteristic value is the eigenvalue whose
eigenvector carries the largest weight on m = 0: the branch continuously
connected to a = nu^2 at q = 0.

Near integer nu two branches can carry (numerically) equal m=0 weight.
When their eigenvalues also differ materially there is no defensible
smooth-branch answer and ``characteristic_value`` raises
:class:`~qrevival.errors.BranchDegeneracyError` naming both candidates;
when the tied candidates agree in value the lower one is returned with the
tie recorded, since the distinction cannot affect any downstream result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import BranchDegeneracyError, ResourceLimitError

__all__ = ["MathieuValue", "characteristic_value", "characteristic_value_oracle"]

# |c0|^2 gap below which two branches count as weight-tied.
WEIGHT_TIE = 1e-6
# Hard cap on the half-bandwidth of the truncated ladder.
MAX_HALF_BANDWIDTH = 2**14
# Tied branches whose values differ by more than this (relative to
# max(1, |a|), scaled by the requested tolerance) are a real degeneracy.
_VALUE_SPLIT_FACTOR = 100.0


@dataclass(frozen=True)
class MathieuValue:
    """A characteristic value with its branch certificate.

    ``dominant_index`` is the ladder index m* of the largest Fourier
    coefficient of the eigenvector (0 for a clean branch), ``truncation``
    the half-bandwidth used, and ``residual`` the change |a(M) - a(M/2)|
    at the final doubling.
    """

    nu: float
    q: float
    a: float
    dominant_index: int
    truncation: int
    residual: float


def _ladder(nu: float, q: float, half_bandwidth: int):
    m = np.arange(-half_bandwidth, half_bandwidth + 1)
    diag = (nu + 2.0 * m) ** 2
    off = np.full(2 * half_bandwidth, q, dtype=float)
    return diag, off


def _solve_branch(nu: float, q: float, half_bandwidth: int):
    """Eigenvalue with maximal m=0 weight, plus tie diagnostics."""
    diag, off = _ladder(nu, q, half_bandwidth)
    vals, vecs = eigh_tridiagonal(diag, off)
    center = half_bandwidth
    w0 = np.abs(vecs[center, :]) ** 2
    order = np.argsort(w0)[::-1]
    best, second = int(order[0]), int(order[1])
    dominant = int(np.argmax(np.abs(vecs[:, best]))) - half_bandwidth
    return (
        float(vals[best]),
        dominant,
        float(w0[best] - w0[second]),
        float(vals[second]),
    )


def characteristic_value(nu: float, q: float, tol: float = 1e-10,
                         half_bandwidth: int | None = None) -> MathieuValue:
    """Mathieu characteristic value a_nu(q) on the m=0-dominant branch.

    The ladder half-bandwidth starts at max(8, ceil(|nu|/2) + ceil(2*sqrt|q|))
    and doubles until |a(M) - a(M/2)| <= tol.  Passing ``half_bandwidth``
    pins the truncation instead (the residual certificate is then taken
    against half that bandwidth); derivative stencils use this to keep one
    consistent truncation across all their evaluation points.

    Raises
    ------
    BranchDegeneracyError
        If the two leading branches tie in m=0 weight (within 1e-6) while
        their values differ materially.
    ResourceLimitError
        If the half-bandwidth would exceed 2**14 before converging.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if not (np.isfinite(nu) and np.isfinite(q)):
        raise ValueError(f"nu and q must be finite, got nu={nu}, q={q}")

    if half_bandwidth is not None:
        if half_bandwidth > MAX_HALF_BANDWIDTH:
            raise ResourceLimitError(
                f"requested half-bandwidth {half_bandwidth} exceeds the cap "
                f"{MAX_HALF_BANDWIDTH}"
            )
        a_prev, _, _, _ = _solve_branch(nu, q, max(4, half_bandwidth // 2))
        a_cur, dominant, tie_gap, a_second = _solve_branch(nu, q, half_bandwidth)
        residual = abs(a_cur - a_prev)
        half = half_bandwidth
    else:
        m0 = max(8, int(np.ceil(abs(nu) / 2.0))
                 + int(np.ceil(2.0 * np.sqrt(abs(q)))))
        if m0 > MAX_HALF_BANDWIDTH:
            raise ResourceLimitError(
                f"initial half-bandwidth {m0} exceeds the cap {MAX_HALF_BANDWIDTH}"
            )
        a_prev, dominant, tie_gap, a_second = _solve_branch(nu, q, m0)
        half = m0
        while True:
            half *= 2
            if half > MAX_HALF_BANDWIDTH:
                raise ResourceLimitError(
                    f"a_nu(q) did not converge to tol={tol} below "
                    f"half-bandwidth {MAX_HALF_BANDWIDTH} (nu={nu}, q={q})"
                )
            a_cur, dominant, tie_gap, a_second = _solve_branch(nu, q, half)
            residual = abs(a_cur - a_prev)
            if residual <= tol:
                break
            a_prev = a_cur

    if tie_gap < WEIGHT_TIE:
        floor = _VALUE_SPLIT_FACTOR * tol * max(1.0, abs(a_cur))
        if abs(a_cur - a_second) > floor:
            raise BranchDegeneracyError(
                f"branch ambiguity at nu={nu}, q={q}: m=0 weights differ by "
                f"{tie_gap:.3e} while candidate values {a_cur:.12g} and "
                f"{a_second:.12g} are distinct",
                candidates=(a_cur, a_second),
            )
        # tied and value-degenerate: the candidates bracket the (numerically
        # double) eigenvalue, so their mean is the least-biased answer
        a_cur = 0.5 * (a_cur + a_second)

    return MathieuValue(
        nu=float(nu), q=float(q), a=a_cur, dominant_index=dominant,
        truncation=half, residual=residual,
    )


def characteristic_value_oracle(nu: float, q: float, half_bandwidth: int):
    """Dense eigendecomposition of the truncated ladder (brute-force verifier).

    Returns (eigenvalues ascending, eigenvectors as columns, ladder indices).
    """
    if half_bandwidth < 4:
        raise ValueError(f"half_bandwidth must be >= 4, got {half_bandwidth}")
    diag, off = _ladder(nu, q, half_bandwidth)
    vals, vecs = eigh_tridiagonal(diag, off)
    m = np.arange(-half_bandwidth, half_bandwidth + 1)
    return vals, vecs, m
