"""Frequency extraction from oscillatory time series.

Two fixed-amplitude models are fitted by bounded damped least squares:

* ``fit_product_cos``:  y(t) = (hbar/2) cos(w_a t) cos(w_b t)
* ``fit_cos_squared``:  y(t) = cos^2(w_a t)

The objective is multimodal in frequency, so callers seed the fit from
their model predictions; a deterministic coarse grid around the seed is
used as a fallback when the local fit stalls.  Flat series (the models
degenerate to constants, e.g. at vanishing ellipticity) are reported as
degenerate instead of fitted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

__all__ = ["FitResult", "fit_product_cos", "fit_cos_squared"]

#: Fraction of the model amplitude below which a series counts as flat.
FLAT_FRACTION = 1e-4


@dataclass(frozen=True)
class FitResult:
    """Fitted frequencies with convergence diagnostics.

    ``params`` is (w_a, w_b) for the product model (sorted w_a >= w_b)
    or (w_a,) for the single-frequency model; ``residual`` is the RMS
    misfit.  ``degenerate`` flags flat input where the frequency is
    unconstrained and the seed is passed through.
    """

    params: tuple
    residual: float
    converged: bool
    iterations: int
    degenerate: bool = False


def _rms(x) -> float:
    return float(np.sqrt(np.mean(np.square(x))))


def _refine(model, times, values, x0, bounds):
    x0 = np.clip(x0, bounds[0], bounds[1])
    res = least_squares(
        lambda p: model(times, p) - values,
        x0=x0,
        bounds=bounds,
        method="trf",
        xtol=1e-15,
        ftol=1e-15,
        gtol=1e-15,
        max_nfev=2000,
    )
    return res.x, _rms(res.fun), bool(res.success), int(res.nfev)


def _grid_seed(model, times, values, seed, factors):
    best = None
    for fa in factors:
        for fb in factors if len(seed) == 2 else [1.0]:
            cand = np.array([seed[0] * fa] + ([seed[1] * fb] if len(seed) == 2 else []))
            r = _rms(model(times, cand) - values)
            if best is None or r < best[1]:
                best = (cand, r)
    return best[0]


def _spectral_peaks(times, values, count):
    """Dominant angular frequencies of a uniformly sampled series.

    Zero-padded rfft with parabolic peak interpolation; used to reseed
    the local fit when the prediction lands in a neighbouring basin.
    """
    dt = times[1] - times[0]
    if np.max(np.abs(np.diff(times) - dt)) > 1e-9 * dt:
        return None
    y = values - np.mean(values)
    n = len(y) * 8
    spec = np.abs(np.fft.rfft(y * np.hanning(len(y)), n=n))
    freqs = 2.0 * np.pi * np.fft.rfftfreq(n, d=dt)
    peaks = []
    for i in range(1, len(spec) - 1):
        if spec[i] > spec[i - 1] and spec[i] >= spec[i + 1]:
            peaks.append((spec[i], i))
    peaks.sort(reverse=True)
    out = []
    for _, i in peaks[:count]:
        denom = spec[i - 1] - 2 * spec[i] + spec[i + 1]
        shift = 0.5 * (spec[i - 1] - spec[i + 1]) / denom if denom != 0 else 0.0
        out.append(freqs[i] + shift * (freqs[1] - freqs[0]))
    return sorted(out, reverse=True) if len(out) == count else None


def _fit(model, times, values, seed, amplitude):
    """Shared driver; returns FitResult for degenerate input, else raw fit."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    seed = np.asarray(seed, dtype=float)
    if np.ptp(values) < FLAT_FRACTION * amplitude:
        params = tuple(float(s) for s in seed) if len(seed) == 1 else (float(seed[0]), 0.0)
        return FitResult(
            params=params,
            residual=_rms(model(times, np.array(params)) - values),
            converged=True,
            iterations=0,
            degenerate=True,
        )
    if np.any(seed <= 0.0):
        raise ValueError(f"frequency seeds must be positive for a non-flat series, got {seed}")
    lo = seed / 3.0
    hi = seed * 3.0
    x, resid, ok, nfev = _refine(model, times, values, seed, (lo, hi))
    data_scale = _rms(values - values.mean())
    if not ok or resid > 0.02 * data_scale:
        # reseed from the spectrum: the models are one- and two-tone sums,
        # cos(wa t)cos(wb t) has tones at wa +- wb, cos^2(wa t) at 2 wa
        if len(seed) == 2:
            tones = _spectral_peaks(times, values, 2)
            reseeds = []
            if tones is not None:
                f1, f2 = tones
                reseeds.append(np.array([(f1 + f2) / 2.0, (f1 - f2) / 2.0]))
        else:
            tones = _spectral_peaks(times, values, 1)
            reseeds = [np.array([tones[0] / 2.0])] if tones is not None else []
        factors = np.geomspace(1.0 / 2.5, 2.5, 41)
        reseeds.append(_grid_seed(model, times, values, seed, factors))
        nfev += len(factors) ** len(seed)
        for x0 in reseeds:
            if np.any(~np.isfinite(x0)) or np.any(x0 <= 0):
                continue
            x2, resid2, ok2, nfev2 = _refine(model, times, values, x0, (lo, hi))
            nfev += nfev2
            if resid2 < resid:
                x, resid, ok = x2, resid2, ok2
    return x, resid, ok, nfev


def fit_product_cos(times, values, seed, hbar: float = 1.0) -> FitResult:
    """Fit (hbar/2) cos(w_a t) cos(w_b t); seed = (w_a, w_b) predictions.

    The series should span at least two periods of the slower frequency.
    Returned frequencies are sorted w_a >= w_b.
    """

    def model(t, p):
        return 0.5 * hbar * np.cos(p[0] * t) * np.cos(p[1] * t)

    out = _fit(model, times, values, seed, amplitude=0.5 * hbar)
    if isinstance(out, FitResult):
        return out
    x, resid, ok, nfev = out
    wa, wb = sorted(map(float, x), reverse=True)
    return FitResult(params=(wa, wb), residual=resid, converged=ok, iterations=nfev)


def fit_cos_squared(times, values, seed) -> FitResult:
    """Fit cos^2(w_a t); seed is the predicted w_a."""

    def model(t, p):
        return np.cos(p[0] * t) ** 2

    out = _fit(model, times, values, np.atleast_1d(seed), amplitude=1.0)
    if isinstance(out, FitResult):
        return out
    x, resid, ok, nfev = out
    return FitResult(params=(float(x[0]),), residual=resid, converged=ok, iterations=nfev)
