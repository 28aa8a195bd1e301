"""Quantum recurrences near a nonlinear resonance of a coupled system.

A numerical laboratory around the one-resonance reduction of a coupled
two-degree-of-freedom Hamiltonian: fractional-order Mathieu characteristic
values, the quasi-energy ladder they generate, classical/quantum
recurrence times with coupling corrections, exact-phase wave-packet
propagation, and autocorrelation analysis that closes the loop between
prediction and simulation.
"""

from .analysis import RecurrenceReport, detect_peaks, extract_times
from .dynamics import (
    AutocorrTrace,
    CenterMode,
    LadderPropagator,
    LevelSpacingReport,
    WavePacketSpec,
    build_hamiltonian_matrix,
    evolve,
    level_spacing_report,
    resonance_center_mode,
)
from .mathieu import MathieuValue, characteristic_value, characteristic_value_oracle
from .model import (
    FrequencyCurve,
    ResonanceParams,
    ResonanceRoots,
    coupling_fourier_amplitude,
    find_resonances,
    load_frequency_curve,
    reduce_to_resonance,
)
from .spectrum import Spectrum, SpectrumEntry, build_spectrum, quasienergy
from .timescales import TimeScales, case_relations, closed_form_times, numeric_times

__version__ = "0.1.0"

__all__ = [
    "AutocorrTrace",
    "CenterMode",
    "FrequencyCurve",
    "LadderPropagator",
    "LevelSpacingReport",
    "MathieuValue",
    "RecurrenceReport",
    "ResonanceParams",
    "ResonanceRoots",
    "Spectrum",
    "SpectrumEntry",
    "TimeScales",
    "WavePacketSpec",
    "build_hamiltonian_matrix",
    "build_spectrum",
    "case_relations",
    "characteristic_value",
    "characteristic_value_oracle",
    "closed_form_times",
    "coupling_fourier_amplitude",
    "detect_peaks",
    "evolve",
    "extract_times",
    "find_resonances",
    "level_spacing_report",
    "load_frequency_curve",
    "numeric_times",
    "quasienergy",
    "reduce_to_resonance",
    "resonance_center_mode",
]
