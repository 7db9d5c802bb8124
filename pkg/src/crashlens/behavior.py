"""Trader-behavior algebra: Pauli matrices, the basis-swap loop map, and the
eight-state market classifier on phase-angle pairs.

The two angles (theta, gamma) locate the coupled supply/demand phases on the
unit circle; only eight of the sixteen quadrant pairings name a market state,
everything else (including quadrant boundaries) is Unclassified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import DataError

__all__ = [
    "BehaviorMatrix",
    "MarketState",
    "STATE_BOXES",
    "pauli",
    "wilson_loop",
    "commutator",
    "classify_state",
]

_SIGMA = {
    "x": np.array([[0.0 + 0.0j, 1.0], [1.0, 0.0]]),
    "y": np.array([[0.0 + 0.0j, -1.0j], [1.0j, 0.0]]),
    "z": np.array([[1.0 + 0.0j, 0.0], [0.0, -1.0]]),
}

# Only sigma_y has a named trader role; the roles "fundamentalist" and
# "bias" are reserved for user-built matrices.
_ROLE = {"x": "generic", "y": "noise", "z": "generic"}


@dataclass(frozen=True)
class BehaviorMatrix:
    """A 2x2 complex matrix acting on the (peak, trough) basis states."""

    values: np.ndarray
    role: str = "generic"

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=complex)
        if arr.shape != (2, 2):
            raise DataError(f"behavior matrix must be 2x2, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DataError("behavior matrix entries must be finite")
        object.__setattr__(self, "values", arr)


def pauli(axis: str) -> BehaviorMatrix:
    """Return the Pauli matrix for ``axis`` in {'x', 'y', 'z'}."""
    try:
        values = _SIGMA[axis]
    except KeyError:
        raise DataError(f"unknown Pauli axis {axis!r}, expected 'x', 'y' or 'z'") from None
    return BehaviorMatrix(values.copy(), role=_ROLE[axis])


def _coerce(m: BehaviorMatrix | np.ndarray) -> np.ndarray:
    if isinstance(m, BehaviorMatrix):
        return m.values
    return BehaviorMatrix(np.asarray(m)).values


def wilson_loop(m: BehaviorMatrix | np.ndarray) -> BehaviorMatrix:
    """Swap the two basis states on both sides: sigma_x @ M @ sigma_x.

    This is the unique linear involution exchanging the peak state with the
    conjugate trough state; applying it twice is the identity and the
    determinant is preserved.
    """
    sx = _SIGMA["x"]
    return BehaviorMatrix(sx @ _coerce(m) @ sx)


def commutator(a: BehaviorMatrix | np.ndarray, b: BehaviorMatrix | np.ndarray) -> BehaviorMatrix:
    """AB - BA."""
    av, bv = _coerce(a), _coerce(b)
    return BehaviorMatrix(av @ bv - bv @ av)


class MarketState(IntEnum):
    Unclassified = 0
    State1 = 1
    State2 = 2
    State3 = 3
    State4 = 4
    State5 = 5
    State6 = 6
    State7 = 7
    State8 = 8

    @property
    def box(self) -> tuple[tuple[float, float], tuple[float, float]] | None:
        """Open (theta-range, gamma-range) in radians, None for Unclassified."""
        return STATE_BOXES.get(self)


_HALF_PI = math.pi / 2.0

# Open quadrant intervals: quadrant q covers ((q-1)*pi/2, q*pi/2).
_QUADRANT_PAIRS = {
    (1, 1): MarketState.State1,
    (1, 4): MarketState.State2,
    (3, 3): MarketState.State3,
    (3, 2): MarketState.State4,
    (4, 1): MarketState.State5,
    (4, 4): MarketState.State6,
    (2, 3): MarketState.State7,
    (2, 2): MarketState.State8,
}

STATE_BOXES: dict[MarketState, tuple[tuple[float, float], tuple[float, float]]] = {
    state: (
        ((tq - 1) * _HALF_PI, tq * _HALF_PI),
        ((gq - 1) * _HALF_PI, gq * _HALF_PI),
    )
    for (tq, gq), state in _QUADRANT_PAIRS.items()
}


def _quadrant(angle: float) -> int:
    """Open quadrant index 1..4, or 0 when the angle sits on a boundary."""
    for q in range(1, 5):
        if (q - 1) * _HALF_PI < angle < q * _HALF_PI:
            return q
    return 0


def classify_state(theta: float, gamma: float) -> MarketState:
    """Classify a (theta, gamma) phase pair into one of the eight market states.

    Angles are reduced mod 2*pi first.  Pairs on a quadrant boundary, and the
    eight quadrant pairings that carry no state, return Unclassified.
    """
    if not (math.isfinite(theta) and math.isfinite(gamma)):
        raise DataError("classify_state requires finite angles")
    theta = theta % (2.0 * math.pi)
    gamma = gamma % (2.0 * math.pi)
    key = (_quadrant(theta), _quadrant(gamma))
    return _QUADRANT_PAIRS.get(key, MarketState.Unclassified)
