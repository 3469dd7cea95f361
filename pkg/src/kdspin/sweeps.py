"""Experiment drivers: solver comparison and ellipticity sweeps.

``compare`` runs the Dirac solver and the effective mode model on one
configuration and reports per-observable deviations.  The effective
model is evaluated at the gauge time tau(t) = integral w(s)^2 ds of each
Dirac sample: the effective couplings scale with the squared field
envelope, so this maps out the turn-on/turn-off phase deficit that a
plain lab-time comparison would misattribute to model error.

``sweep_eta`` scans the ellipticity, fits the configured observable of
the chosen solver, and tabulates fitted against predicted frequencies.
Points run on a bounded process pool and are merged in eta order; a
failing point is recorded and the sweep continues.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import dirac, effective
from .effective import OCCUPATION_FLOOR
from .fields import LaserConfig, Setup
from .fitting import FitResult, fit_cos_squared, fit_product_cos
from .timeseries import TimeSeries

__all__ = [
    "ComparisonReport",
    "compare",
    "effective_series",
    "SweepPoint",
    "sweep_eta",
    "DEFAULT_ETAS",
]

DEFAULT_ETAS = tuple(i * math.pi / 12.0 for i in range(7))

#: Conditioned-spin deviations are evaluated only where the conditioning
#: occupation exceeds this on both sides: the ratio passes through 0/0 at
#: occupation zeros and amplifies probability-scale error by 1/occupation.
SPIN_MASK_OCCUPATION = 0.05

_COLUMNS = ("p_m1_up", "p_m1_dn", "p_p1_up", "p_p1_dn", "s_total", "s_m1", "s_p1")


def _effective_columns(cfg: LaserConfig, ts, initial_mode, initial_spin, variant):
    """Standard observable columns of the effective model at times ts."""
    freqs = effective.frequencies(cfg)
    ts = np.asarray(ts, dtype=float)
    if variant == "analytic":
        if (initial_mode, initial_spin) != (-1, "up"):
            raise ValueError("closed-form series are defined for the c_-1^up start")
        if cfg.setup is Setup.COROTATING:
            p = effective.analytic_probabilities_corotating(freqs, ts)
            s_total, s_m1, s_p1 = effective.analytic_spin_corotating(freqs, ts)
            cols = {
                "p_m1_up": p[..., 0],
                "p_m1_dn": p[..., 1],
                "p_p1_up": p[..., 2],
                "p_p1_dn": p[..., 3],
                "s_total": s_total,
                "s_m1": s_m1,
                "s_p1": s_p1,
                "norm": np.ones_like(ts),
            }
        else:
            p = effective.analytic_probabilities_antirotating(freqs, ts)
            half = 0.5 * np.ones_like(ts)
            cols = {
                "p_m1_up": p[..., 0],
                "p_m1_dn": np.zeros_like(ts),
                "p_p1_up": p[..., 1],
                "p_p1_dn": np.zeros_like(ts),
                "s_total": half,
                "s_m1": half,
                "s_p1": half,
                "norm": np.ones_like(ts),
            }
        return cols
    if variant != "exact":
        raise ValueError(f"unknown effective variant {variant!r}")
    if cfg.setup is Setup.COROTATING:
        matrix = effective.build_corotating_matrix(freqs)
        modes = effective.corotating_modes()
    else:
        matrix = effective.build_antirotating_matrix(freqs)
        modes = effective.antirotating_modes()
    initial = effective.ModeAmplitudes.single(modes, initial_mode, initial_spin)
    ct = effective.evolve_modes(matrix, initial, ts)
    p = np.abs(ct) ** 2
    i_m1 = modes.index(-1)
    i_p1 = modes.index(1)
    den_m1 = p[:, i_m1, 0] + p[:, i_m1, 1]
    den_p1 = p[:, i_p1, 0] + p[:, i_p1, 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        s_m1 = np.where(
            den_m1 < OCCUPATION_FLOOR, np.nan, 0.5 * (p[:, i_m1, 0] - p[:, i_m1, 1]) / den_m1
        )
        s_p1 = np.where(
            den_p1 < OCCUPATION_FLOOR, np.nan, 0.5 * (p[:, i_p1, 0] - p[:, i_p1, 1]) / den_p1
        )
    return {
        "p_m1_up": p[:, i_m1, 0],
        "p_m1_dn": p[:, i_m1, 1],
        "p_p1_up": p[:, i_p1, 0],
        "p_p1_dn": p[:, i_p1, 1],
        "s_total": 0.5 * (p[:, i_m1, 0] - p[:, i_m1, 1] + p[:, i_p1, 0] - p[:, i_p1, 1]),
        "s_m1": s_m1,
        "s_p1": s_p1,
        "norm": np.sum(p, axis=(1, 2)),
    }


def effective_series(
    cfg: LaserConfig,
    times,
    initial_mode: int = -1,
    initial_spin: str = "up",
    variant: str = "exact",
) -> TimeSeries:
    """Effective-model observables as a TimeSeries on the given times."""
    cols = _effective_columns(cfg, times, initial_mode, initial_spin, variant)
    meta = {
        "solver": "effective",
        "variant": variant,
        "e_hat_au": cfg.e_hat,
        "lambda_au": cfg.lam,
        "eta_rad": cfg.eta,
        "setup": cfg.setup.value,
        "initial_mode": initial_mode,
        "initial_spin": initial_spin,
    }
    return TimeSeries(times=np.asarray(times, float), columns=cols, metadata=meta)


@dataclass
class ComparisonReport:
    """Joint Dirac/effective sampling plus per-observable deviations."""

    dirac: TimeSeries
    effective: TimeSeries
    deviations: dict
    spin_mask_occupation: float

    def max_deviation(self, names=None) -> float:
        names = names or list(self.deviations)
        return max(self.deviations[n][0] for n in names)


def compare(
    cfg: LaserConfig,
    numerics: dirac.Numerics = dirac.Numerics(),
    initial_mode: int = -1,
    initial_spin: str = "up",
    spin_mask_occupation: float = SPIN_MASK_OCCUPATION,
) -> ComparisonReport:
    """Run both solvers on one configuration and report deviations.

    Conditioned spins are compared only where both solvers' conditioning
    occupations exceed ``spin_mask_occupation``; probabilities and the
    total spin are compared everywhere.
    """
    dirac_series = dirac.run(cfg, numerics, initial_mode=initial_mode, initial_spin=initial_spin)
    taus = dirac_series.column("tau")
    cols = _effective_columns(cfg, taus, initial_mode, initial_spin, "exact")
    eff_series = TimeSeries(
        times=dirac_series.times,
        columns=cols,
        metadata={
            "solver": "effective",
            "variant": "exact",
            "time_axis": "gauge",
            "eta_rad": cfg.eta,
            "setup": cfg.setup.value,
        },
    )
    deviations = {}
    for name in _COLUMNS:
        a = dirac_series.column(name)
        b = eff_series.column(name)
        if name in ("s_m1", "s_p1"):
            den_d = dirac_series.column(f"p_{name[2:]}_up") + dirac_series.column(
                f"p_{name[2:]}_dn"
            )
            den_e = eff_series.column(f"p_{name[2:]}_up") + eff_series.column(f"p_{name[2:]}_dn")
            mask = (
                (den_d >= spin_mask_occupation)
                & (den_e >= spin_mask_occupation)
                & np.isfinite(a)
                & np.isfinite(b)
            )
        else:
            mask = np.ones_like(a, dtype=bool)
        if not np.any(mask):
            deviations[name] = (float("nan"), float("nan"))
            continue
        diff = np.abs(a[mask] - b[mask])
        deviations[name] = (float(diff.max()), float(np.sqrt(np.mean(diff**2))))
    return ComparisonReport(
        dirac=dirac_series,
        effective=eff_series,
        deviations=deviations,
        spin_mask_occupation=spin_mask_occupation,
    )


@dataclass(frozen=True)
class SweepPoint:
    """One ellipticity point: fit outcome against model predictions."""

    eta: float
    fitted: tuple
    predicted: tuple
    residual: float
    converged: bool
    degenerate: bool
    error: str | None = None


def _round_cycles(t_target: float, cfg: LaserConfig, stride_cycles: int) -> float:
    cycles = max(stride_cycles, int(math.ceil(t_target / cfg.cycle)))
    cycles += (-cycles) % stride_cycles
    return cycles * cfg.cycle


def _sweep_point(args) -> SweepPoint:
    (cfg_template, eta, solver, protocol, numerics, spans, stride_cycles) = args
    try:
        freqs = effective.frequencies(replace(cfg_template, eta=eta, total_t=math.inf, delta_t=0.0))
        if protocol == "corotating_spin":
            setup = Setup.COROTATING
            wa = 2.0 * freqs.omega3 * abs(math.sin(eta))
            wb = freqs.omega2 * freqs.omega3 * abs(math.sin(eta)) / (2.0 * freqs.omega1)
            predicted = (wa, wb)
            slow_scale = wb if wb > freqs.omega2 * 1e-9 else freqs.omega2
            t_span = spans * 2.0 * math.pi / slow_scale
        elif protocol == "antirotating_rabi":
            setup = Setup.ANTIROTATING
            wa = freqs.omega2 * abs(math.cos(eta))
            predicted = (wa,)
            scale = wa if wa > freqs.omega2 * 1e-9 else freqs.omega2
            t_span = spans * 2.0 * math.pi / scale
        else:
            raise ValueError(f"unknown sweep protocol {protocol!r}")

        if solver == "effective":
            ts = np.linspace(0.0, t_span, 4096)
            cfg = replace(cfg_template, eta=eta, setup=setup, total_t=t_span, delta_t=0.0)
            cols = _effective_columns(cfg, ts, -1, "up", "analytic")
        elif solver == "dirac":
            numerics = numerics or dirac.Numerics()
            total_t = _round_cycles(t_span, replace(cfg_template, eta=eta, setup=setup), stride_cycles)
            cfg = replace(cfg_template, eta=eta, setup=setup, total_t=total_t)
            stride = stride_cycles * numerics.steps_per_cycle
            series = dirac.run(cfg, replace(numerics, sample_stride=stride))
            ts = series.times
            cols = series.columns
        else:
            raise ValueError(f"unknown solver {solver!r}")

        if protocol == "corotating_spin":
            fit = fit_product_cos(ts, cols["s_total"], seed=predicted)
        else:
            fit = fit_cos_squared(ts, cols["p_m1_up"], seed=predicted[0])
        return SweepPoint(
            eta=eta,
            fitted=fit.params,
            predicted=predicted,
            residual=fit.residual,
            converged=fit.converged,
            degenerate=fit.degenerate,
        )
    except Exception as exc:  # per-point failures recorded, sweep continues
        return SweepPoint(
            eta=eta,
            fitted=(),
            predicted=(),
            residual=float("nan"),
            converged=False,
            degenerate=False,
            error=f"{type(exc).__name__}: {exc}",
        )


def sweep_eta(
    cfg_template: LaserConfig,
    etas=DEFAULT_ETAS,
    solver: str = "effective",
    protocol: str = "corotating_spin",
    numerics: dirac.Numerics | None = None,
    spans: float = 2.0,
    stride_cycles: int = 50,
    workers: int | None = None,
) -> list[SweepPoint]:
    """Fit the protocol observable at each eta; merged in eta order.

    ``spans`` is the number of periods of the slower predicted frequency
    each series covers (the fits need at least two).
    """
    etas = list(etas)
    for eta in etas:
        if not (-math.pi < eta <= math.pi):
            raise ValueError(f"eta {eta} outside (-pi, pi]")
    jobs = [
        (cfg_template, eta, solver, protocol, numerics, spans, stride_cycles) for eta in etas
    ]
    if workers is None:
        workers = int(os.environ.get("KDSPIN_WORKERS", "0")) or (os.cpu_count() or 1)
    workers = max(1, min(workers, len(jobs)))
    if workers == 1 or solver == "effective":
        points = [_sweep_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_sweep_point, jobs))
    return sorted(points, key=lambda p: p.eta)
