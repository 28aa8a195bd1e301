"""Extraction of recurrence times from autocorrelation traces.

The classical period is operationalized as the median spacing of the high
peaks inside the first five predicted periods; the quantum recurrence time
as the position of the trace maximum on the window [0.8, 1.2] times the
predicted revival time, accepted only if it rises at least a factor 2
above the collapse plateau (the trace median over the middle third of the
stretch between the first period and the revival window).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import AutocorrTrace
from .errors import UnresolvedPeriodError
from .timescales import TimeScales

__all__ = ["RecurrenceReport", "detect_peaks", "extract_times"]

# peaks at exactly five periods still count as "early"
_EARLY_WINDOW_PERIODS = 5.25
_REVIVAL_CONTRAST = 2.0


@dataclass(frozen=True)
class RecurrenceReport:
    measured_Tcl: float
    measured_TQ: float | None
    predicted: TimeScales
    deviations: dict
    peak_list: tuple
    plateau: float | None = None

    def to_json(self, indent: int = 2) -> str:
        def _num(x):
            if x is None:
                return None
            if isinstance(x, float) and not math.isfinite(x):
                return repr(x)  # 'inf' / 'nan' stay readable in JSON
            return x

        payload = {
            "measured_Tcl": _num(self.measured_Tcl),
            "measured_TQ": _num(self.measured_TQ),
            "plateau": _num(self.plateau),
            "deviations": {k: _num(v) for k, v in self.deviations.items()},
            "predicted": {
                f: _num(getattr(self.predicted, f)) for f in TimeScales.FIELDS
            },
            "peaks": [{"t": t, "height": h} for t, h in self.peak_list],
        }
        return json.dumps(payload, indent=indent)

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")


def _refine(t0: float, dt: float, y_minus: float, y0: float, y_plus: float):
    """Three-point parabolic interpolation around a sampled maximum."""
    denom = y_minus - 2.0 * y0 + y_plus
    if denom == 0.0:
        return t0, y0
    delta = 0.5 * (y_minus - y_plus) / denom
    height = y0 - 0.25 * (y_minus - y_plus) * delta
    return t0 + delta * dt, height


def detect_peaks(trace: AutocorrTrace, threshold: float):
    """Local maxima strictly above both neighbors and above threshold.

    Each peak is refined by three-point parabolic interpolation (exact for
    a sampled parabola); t = 0 is never a peak.  Returns a list of
    (time, height) pairs with strictly increasing times.
    """
    if not (0.0 < threshold < 1.0):
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    v = np.asarray(trace.values)
    if v.size == 0:
        raise ValueError("empty trace")
    peaks = []
    inner = np.nonzero(
        (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:]) & (v[1:-1] > threshold)
    )[0] + 1
    for i in inner:
        t, h = _refine(i * trace.dt, trace.dt, v[i - 1], v[i], v[i + 1])
        if t > 0.0:
            peaks.append((float(t), float(h)))
    return peaks


def _collapse_plateau(trace: AutocorrTrace, t_lo: float, t_hi: float):
    """Trace median over the middle third of (t_lo, t_hi)."""
    span = t_hi - t_lo
    if span <= 0:
        return None
    sel_lo, sel_hi = t_lo + span / 3.0, t_lo + 2.0 * span / 3.0
    t = trace.times()
    window = trace.values[(t >= sel_lo) & (t <= sel_hi)]
    if window.size == 0:
        return None
    return float(np.median(window))


def extract_times(trace: AutocorrTrace, predicted: TimeScales,
                  threshold: float) -> RecurrenceReport:
    """Measure the classical period and (when covered) the revival time.

    Raises UnresolvedPeriodError when the trace is shorter than three
    predicted classical periods or fewer than two early peaks rise above
    the threshold.
    """
    t_cl = predicted.Tl_cl
    if not math.isfinite(t_cl) or t_cl <= 0:
        raise UnresolvedPeriodError(
            f"predicted classical period {t_cl} cannot anchor the extraction"
        )
    if trace.t_max < 3.0 * t_cl:
        raise UnresolvedPeriodError(
            f"trace covers {trace.t_max:.4g} < 3 predicted periods "
            f"({3.0 * t_cl:.4g})"
        )
    peaks = detect_peaks(trace, threshold)
    early = [(t, h) for t, h in peaks if t <= _EARLY_WINDOW_PERIODS * t_cl]
    if len(early) < 2:
        raise UnresolvedPeriodError(
            f"only {len(early)} peak(s) above threshold {threshold} within "
            f"the first {_EARLY_WINDOW_PERIODS:g} predicted periods"
        )
    spacings = np.diff([t for t, _ in early])
    measured_tcl = float(np.median(spacings))

    measured_tq = None
    plateau = None
    t_q = predicted.Tl_Q
    if math.isfinite(t_q) and t_q > 0 and trace.t_max >= 1.2 * t_q:
        t = trace.times()
        window = (t >= 0.8 * t_q) & (t <= 1.2 * t_q)
        idx = np.nonzero(window)[0]
        j = idx[int(np.argmax(trace.values[idx]))]
        if 0 < j < trace.values.size - 1:
            peak_t, peak_h = _refine(
                j * trace.dt, trace.dt,
                trace.values[j - 1], trace.values[j], trace.values[j + 1],
            )
        else:
            peak_t, peak_h = float(t[j]), float(trace.values[j])
        plateau = _collapse_plateau(trace, t_cl, 0.8 * t_q)
        if plateau is None or peak_h >= _REVIVAL_CONTRAST * plateau:
            measured_tq = float(peak_t)

    deviations = {"Tcl_rel": measured_tcl / t_cl - 1.0}
    if measured_tq is not None and math.isfinite(t_q):
        deviations["TQ_rel"] = measured_tq / t_q - 1.0
    return RecurrenceReport(
        measured_Tcl=measured_tcl,
        measured_TQ=measured_tq,
        predicted=predicted,
        deviations=deviations,
        peak_list=tuple(peaks),
        plateau=plateau,
    )
