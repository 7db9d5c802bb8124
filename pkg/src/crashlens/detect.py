"""Crash detection on per-window scalar series.

A window is flagged when its value sits far above a rolling robust baseline:
z = (value - median of previous b) / (1.4826 * MAD of previous b).  Runs of
consecutive flags collapse into one event located at the run's largest value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, UsageError

__all__ = [
    "CentralitySeries",
    "CrashEvent",
    "summarize_centrality",
    "detect_crashes",
    "events_to_json",
]

MAD_SCALE = 1.4826  # makes MAD consistent with sigma under normality


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class CentralitySeries:
    """One scalar per analysis window, tagged with its origin.

    dates are optional labels aligned with indices; detectors fall back to
    the numeric index when they are absent.
    """

    indices: np.ndarray
    values: np.ndarray
    source: str
    dates: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices, dtype=np.int64)
        vals = np.asarray(self.values, dtype=float)
        if idx.ndim != 1 or vals.shape != idx.shape:
            raise DataError("indices and values must be aligned 1-d arrays")
        if idx.size == 0:
            raise DataError("empty centrality series")
        if np.any(np.diff(idx) <= 0):
            raise DataError("window indices must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise DataError("centrality values must be finite")
        if self.dates is not None and len(self.dates) != idx.size:
            raise DataError(
                f"{len(self.dates)} dates for {idx.size} windows"
            )
        object.__setattr__(self, "indices", _frozen(idx))
        object.__setattr__(self, "values", _frozen(vals))

    def __len__(self) -> int:
        return int(self.indices.size)


@dataclass(frozen=True)
class CrashEvent:
    window_index: int
    date: str
    peak: float
    z: float
    width: int

    def __post_init__(self) -> None:
        if self.width < 1:
            raise DataError(f"event width {self.width} < 1")
        if not math.isfinite(self.peak):
            raise DataError("event peak must be finite")

    def to_dict(self) -> dict:
        # infinite z (spike over a flat baseline) serializes as "inf" so the
        # JSON stays strict
        z = self.z if math.isfinite(self.z) else "inf"
        return {
            "window_index": self.window_index,
            "date": self.date,
            "peak": self.peak,
            "z": z,
            "width": self.width,
        }


def summarize_centrality(
    closeness_maps,
    reducer: str = "mean",
    *,
    indices=None,
    dates=None,
    source: str = "",
) -> CentralitySeries:
    """Reduce per-vertex closeness maps to one value per window.

    reducer is "mean", "max", or "vertex:<label>".  All windows must share
    the same vertex set.
    """
    maps = list(closeness_maps)
    if not maps:
        raise UsageError("no windows to summarize")
    vertices = sorted(maps[0])
    for i, m in enumerate(maps):
        if sorted(m) != vertices:
            raise DataError(f"window {i} has a different vertex set")

    if reducer == "mean":
        vals = [sum(m.values()) / len(m) for m in maps]
    elif reducer == "max":
        vals = [max(m.values()) for m in maps]
    elif reducer.startswith("vertex:"):
        label = reducer[len("vertex:") :]
        if label not in maps[0]:
            raise UsageError(f"vertex {label!r} not in graph (have {vertices})")
        vals = [m[label] for m in maps]
    else:
        raise UsageError(
            f"unknown reducer {reducer!r}: expected mean, max, or vertex:<label>"
        )

    if indices is None:
        indices = np.arange(len(maps))
    return CentralitySeries(
        indices=np.asarray(indices),
        values=np.asarray(vals, dtype=float),
        source=source or f"closeness/{reducer}",
        dates=tuple(dates) if dates is not None else None,
    )


def detect_crashes(
    s: CentralitySeries,
    baseline: int = 60,
    z_threshold: float = 4.0,
    notes: list[str] | None = None,
) -> list[CrashEvent]:
    """Flag windows whose robust z-score against the trailing baseline is
    >= the threshold, merging consecutive flags into single events.

    A zero-MAD baseline is degenerate: the window is noted, and flagged only
    when the value strictly exceeds the flat median (z reported as inf).
    Nothing in the first `baseline` windows can be flagged.
    """
    if baseline < 5:
        raise UsageError(f"baseline window {baseline} < 5")
    if z_threshold <= 0:
        raise UsageError(f"z threshold must be positive, got {z_threshold}")
    n = len(s)
    if n < baseline + 1:
        raise DataError(f"series length {n} < baseline + 1 = {baseline + 1}")

    vals = s.values
    flagged: list[tuple[int, float]] = []  # (position, z)
    for t in range(baseline, n):
        window = vals[t - baseline : t]
        med = float(np.median(window))
        mad = float(np.median(np.abs(window - med)))
        if mad == 0.0:
            if notes is not None:
                notes.append(
                    f"window {int(s.indices[t])}: constant baseline (zero MAD)"
                )
            if vals[t] > med:
                flagged.append((t, math.inf))
            continue
        z = (vals[t] - med) / (MAD_SCALE * mad)
        if z >= z_threshold:
            flagged.append((t, z))

    events: list[CrashEvent] = []
    run: list[tuple[int, float]] = []
    for item in flagged:
        if run and item[0] != run[-1][0] + 1:
            events.append(_merge_run(s, run))
            run = []
        run.append(item)
    if run:
        events.append(_merge_run(s, run))
    return events


def _merge_run(s: CentralitySeries, run: list[tuple[int, float]]) -> CrashEvent:
    peak_pos, peak_z = max(run, key=lambda tz: s.values[tz[0]])
    idx = int(s.indices[peak_pos])
    date = s.dates[peak_pos] if s.dates is not None else str(idx)
    return CrashEvent(
        window_index=idx,
        date=date,
        peak=float(s.values[peak_pos]),
        z=float(peak_z),
        width=len(run),
    )


def events_to_json(events: list[CrashEvent]) -> str:
    return json.dumps([e.to_dict() for e in events], sort_keys=True)
