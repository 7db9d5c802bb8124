"""Analytic-signal transform and the two angle maps used on correlations.

The elliptic map arccos(rho) lives on [-1, 1]; the hyperbolic map arccosh(rho)
is only real for rho >= 1, so for correlation input it returns the principal
complex value (purely imaginary on [-1, 1]) instead of clamping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from .errors import DataError

__all__ = ["AnalyticSignal", "analytic_signal", "elliptic_angle", "hyperbolic_angle"]

_SLACK = 1e-12


@dataclass(frozen=True)
class AnalyticSignal:
    """Amplitude/phase/frequency view of a real series.

    frequency is the forward difference of the unwrapped phase, radians per
    sample, one element shorter than the input.  degenerate marks inputs with
    no usable oscillation (all zero or constant).
    """

    amplitude: np.ndarray
    phase: np.ndarray
    frequency: np.ndarray
    degenerate: bool = False


def analytic_signal(x: np.ndarray) -> AnalyticSignal:
    """Build the discrete analytic signal by one-sided spectrum doubling.

    Requires length >= 8 and finite input.  All-zero and constant inputs are
    returned with zero phase and the degenerate flag set rather than raising.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DataError(f"analytic_signal expects a 1-d series, got ndim={arr.ndim}")
    if arr.size < 8:
        raise DataError(f"analytic_signal needs at least 8 samples, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DataError("analytic_signal input must be finite")

    if np.all(arr == arr[0]):
        # No oscillation to measure; constant nonzero still has an amplitude.
        amp = np.full(arr.size, abs(arr[0]))
        phase = np.zeros(arr.size)
        return AnalyticSignal(amp, phase, np.zeros(arr.size - 1), degenerate=True)

    z = hilbert(arr)
    amp = np.abs(z)
    phase = np.unwrap(np.angle(z))
    freq = np.diff(phase)
    return AnalyticSignal(amp, phase, freq)


def elliptic_angle(rho: float) -> float:
    """Principal arccos of a correlation, in [0, pi]."""
    if not np.isfinite(rho):
        raise DataError("elliptic_angle requires a finite correlation")
    if abs(rho) > 1.0 + _SLACK:
        raise DataError(f"correlation {rho} outside [-1, 1]")
    return float(np.arccos(np.clip(rho, -1.0, 1.0)))


def hyperbolic_angle(rho: float) -> complex:
    """Principal complex arccosh of a correlation.

    Purely imaginary i*arccos(rho) on [-1, 1], real for rho >= 1; values
    below -1 pick up the branch with imaginary part pi.
    """
    if not np.isfinite(rho):
        raise DataError("hyperbolic_angle requires a finite correlation")
    return complex(np.arccosh(complex(rho)))
