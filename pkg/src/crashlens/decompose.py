"""Empirical mode decomposition, intrinsic time-scale decomposition, and the
composite chain extractor.

EMD sifts with natural cubic-spline envelopes through mirrored extrema and a
Cauchy stopping rule.  ITD builds piecewise-linear baselines through knots
placed at extrema with mixing 0.5; end knots take the mean of the first and
last two samples.  Both reconstruct exactly by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DataError, UsageError

__all__ = [
    "SiftConfig",
    "ModeDecomposition",
    "emd",
    "itd",
    "itd_imf_chain",
    "reconstruct",
]


@dataclass(frozen=True)
class SiftConfig:
    max_modes: int = 10
    max_sifts: int = 100
    sd_threshold: float = 0.2
    mirror_depth: int = 2

    def __post_init__(self) -> None:
        if self.max_modes < 1 or self.max_sifts < 1 or self.mirror_depth < 1:
            raise UsageError("sift config counts must be positive")
        if not 0.0 < self.sd_threshold < 1.0:
            raise UsageError(f"SD threshold {self.sd_threshold} outside (0, 1)")


@dataclass(frozen=True)
class ModeDecomposition:
    """Ordered modes (highest frequency first) plus the residual."""

    modes: tuple[np.ndarray, ...]
    residual: np.ndarray
    method: str

    def __post_init__(self) -> None:
        if self.method not in ("EMD", "ITD"):
            raise DataError(f"unknown decomposition method {self.method!r}")
        n = self.residual.shape[0]
        for k, mode in enumerate(self.modes):
            if mode.shape != (n,):
                raise DataError(f"mode {k} length {mode.shape} != {n}")

    def to_csv(self) -> str:
        header = ",".join([f"mode{k + 1}" for k in range(len(self.modes))] + ["residual"])
        cols = list(self.modes) + [self.residual]
        lines = [header]
        for row in zip(*cols):
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _check_series(x, min_len: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DataError(f"expected a 1-d series, got ndim={arr.ndim}")
    if arr.size < min_len:
        raise DataError(f"series too short: {arr.size} < {min_len}")
    if not np.all(np.isfinite(arr)):
        raise DataError("series must be finite")
    return arr


def _extrema(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Interior maxima and minima indices; plateaus count once at the center."""
    d = np.diff(x)
    nz = np.nonzero(d)[0]
    if nz.size < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    s = np.sign(d[nz]).astype(np.int8)
    chg = np.nonzero(s[:-1] != s[1:])[0]
    pos = (nz[chg] + 1 + nz[chg + 1]) // 2
    rising = s[chg] > 0
    return pos[rising], pos[~rising]


def _mirror(x: np.ndarray, maxp: np.ndarray, minp: np.ndarray, depth: int):
    """Extend extrema past both ends by reflection (anti-symmetric boundary).

    The symmetry point is the outermost extremum unless the boundary sample
    sticks out beyond it, in which case the boundary itself anchors the
    reflection and joins the knot set.
    """
    n = x.size
    d = depth

    if maxp[0] < minp[0]:
        if x[0] > x[minp[0]]:
            lmax, lmin, lsym = maxp[1 : d + 1][::-1], minp[:d][::-1], maxp[0]
        else:
            lmax, lmin, lsym = maxp[:d][::-1], np.append(minp[: d - 1][::-1], 0), 0
    else:
        if x[0] < x[maxp[0]]:
            lmin, lmax, lsym = minp[1 : d + 1][::-1], maxp[:d][::-1], minp[0]
        else:
            lmin, lmax, lsym = minp[:d][::-1], np.append(maxp[: d - 1][::-1], 0), 0
    if lsym != 0 and (
        (lmax.size and 2 * lsym - lmax[0] > 0) or (lmin.size and 2 * lsym - lmin[0] > 0)
    ):
        # reflected knots fail to clear the boundary: re-anchor at it
        if lsym == maxp[0]:
            lmax = maxp[:d][::-1]
        else:
            lmin = minp[:d][::-1]
        lsym = 0

    last = n - 1
    if maxp[-1] > minp[-1]:
        if x[-1] > x[minp[-1]]:
            rmin, rmax, rsym = minp[-d:][::-1], maxp[-d - 1 : -1][::-1], maxp[-1]
        else:
            rmin, rmax, rsym = (
                np.append(np.full(1, last), minp[-(d - 1) :][::-1] if d > 1 else []),
                maxp[-d:][::-1],
                last,
            )
    else:
        if x[-1] < x[maxp[-1]]:
            rmax, rmin, rsym = maxp[-d:][::-1], minp[-d - 1 : -1][::-1], minp[-1]
        else:
            rmax, rmin, rsym = (
                np.append(np.full(1, last), maxp[-(d - 1) :][::-1] if d > 1 else []),
                minp[-d:][::-1],
                last,
            )
    if rsym != last and (
        (rmax.size and 2 * rsym - rmax[-1] < last)
        or (rmin.size and 2 * rsym - rmin[-1] < last)
    ):
        if rsym == maxp[-1]:
            rmax = maxp[-d:][::-1]
        else:
            rmin = minp[-d:][::-1]
        rsym = last

    def assemble(left, mid, right, ls, rs):
        pos = np.concatenate(
            [2 * ls - np.asarray(left, dtype=np.int64),
             mid,
             2 * rs - np.asarray(right, dtype=np.int64)]
        )
        pos, first = np.unique(pos, return_index=True)
        vals = np.concatenate(
            [x[np.asarray(left, dtype=np.int64)], x[mid], x[np.asarray(right, dtype=np.int64)]]
        )[first]
        if pos[0] > 0:  # degenerate reflection: pin the envelope to the boundary
            pos = np.concatenate([[0], pos])
            vals = np.concatenate([[x[0]], vals])
        if pos[-1] < last:
            pos = np.concatenate([pos, [last]])
            vals = np.concatenate([vals, [x[last]]])
        return pos, vals

    upper = assemble(lmax, maxp, rmax, lsym, rsym)
    lower = assemble(lmin, minp, rmin, lsym, rsym)
    return upper, lower


def _envelope_mean(x: np.ndarray, maxp, minp, depth: int) -> np.ndarray:
    (up, uv), (lp, lv) = _mirror(x, maxp, minp, depth)
    t = np.arange(x.size)
    upper = CubicSpline(up, uv, bc_type="natural")(t)
    lower = CubicSpline(lp, lv, bc_type="natural")(t)
    return 0.5 * (upper + lower)


def _imf_defect(h: np.ndarray, n_extrema: int) -> int:
    """|#extrema - #zero crossings|, exact zeros collapsed to one crossing."""
    s = np.sign(h)
    s = s[s != 0]
    zc = int(np.count_nonzero(s[:-1] != s[1:]))
    return abs(n_extrema - zc)


def emd(x, cfg: SiftConfig | None = None) -> ModeDecomposition:
    """Peel intrinsic mode functions off a series by sifting.

    Stops a sift when the Cauchy criterion drops below the threshold; stops
    extraction when the residual has fewer than 3 extrema or the mode budget
    is spent.  A series with no oscillation yields zero modes.
    """
    arr = _check_series(x, 8)
    cfg = cfg or SiftConfig()
    residual = arr.copy()
    modes: list[np.ndarray] = []
    while len(modes) < cfg.max_modes:
        maxp, minp = _extrema(residual)
        if maxp.size + minp.size < 3:
            break
        h = residual.copy()
        for _ in range(cfg.max_sifts):
            mp, lp = _extrema(h)
            if mp.size < 2 or lp.size < 2:
                break
            mean = _envelope_mean(h, mp, lp, cfg.mirror_depth)
            h_new = h - mean
            denom = float(np.dot(h, h))
            if denom == 0.0:
                h = h_new
                break
            sd = float(np.dot(mean, mean)) / denom
            h = h_new
            if sd < cfg.sd_threshold:
                # the SD rule alone can leave riding waves, so also demand
                # the IMF count property before accepting the candidate
                nmp, nlp = _extrema(h)
                if _imf_defect(h, nmp.size + nlp.size) <= 1:
                    break
        modes.append(h)
        residual = residual - h
    return ModeDecomposition(tuple(modes), residual, "EMD")


def _itd_baseline(x: np.ndarray, ext: np.ndarray) -> np.ndarray:
    """Piecewise-linear baseline through mixed knots at the extrema.

    Interior knot k averages the signal value with the straight line joining
    the neighboring knot positions; end knots take the mean of the two
    boundary samples.
    """
    n = x.size
    tau = np.concatenate([[0], ext, [n - 1]])
    knots = np.empty(tau.size)
    knots[0] = 0.5 * (x[0] + x[1])
    knots[-1] = 0.5 * (x[-2] + x[-1])
    prev_t, cur_t, next_t = tau[:-2], tau[1:-1], tau[2:]
    interp = x[prev_t] + (cur_t - prev_t) / (next_t - prev_t) * (x[next_t] - x[prev_t])
    knots[1:-1] = 0.5 * interp + 0.5 * x[cur_t]
    return np.interp(np.arange(n), tau, knots)


def itd(x, max_levels: int = 10) -> ModeDecomposition:
    """Intrinsic time-scale decomposition into proper rotations + baseline."""
    arr = _check_series(x, 5)
    if max_levels < 1:
        raise UsageError("max_levels must be positive")
    baseline = arr.copy()
    rotations: list[np.ndarray] = []
    while len(rotations) < max_levels:
        maxp, minp = _extrema(baseline)
        ext = np.sort(np.concatenate([maxp, minp]))
        if ext.size < 2:
            break
        new_baseline = _itd_baseline(baseline, ext)
        rotations.append(baseline - new_baseline)
        baseline = new_baseline
    return ModeDecomposition(tuple(rotations), baseline, "ITD")


def itd_imf_chain(x, n: int, cfg: SiftConfig | None = None) -> np.ndarray:
    """Sum of the first n EMD modes of the first ITD proper rotation.

    Inputs with no proper rotation (monotone) give an all-zero series.
    """
    if n < 1:
        raise UsageError(f"chain mode count must be >= 1, got {n}")
    arr = _check_series(x, 8)
    first = itd(arr, max_levels=1)
    if not first.modes:
        return np.zeros_like(arr)
    pr1 = first.modes[0]
    sifted = emd(pr1, cfg)
    if not sifted.modes:
        return np.zeros_like(arr)
    return np.sum(sifted.modes[: min(n, len(sifted.modes))], axis=0)


def reconstruct(d: ModeDecomposition) -> np.ndarray:
    """Elementwise sum of all modes and the residual."""
    total = d.residual.copy()
    for mode in d.modes:
        total += mode
    return total
