"""Command line interface.

Subcommands: ``simulate`` (one run, one solver), ``compare`` (Dirac vs
effective), ``sweep-eta``, ``classical-check`` and ``bounds``.  Exit
codes: 0 success, 1 physics-parameter rejection, 2 I/O error.

Configuration comes from a flat key=value text file (``--config``) with
keys e_hat_au, lambda_au, eta_rad, setup, delta_t_cycles, total_time_au,
n_grid, steps_per_cycle, sample_stride, initial_mode, initial_spin,
solver, protocol; command line flags override file values.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import classical, dirac, effective, sweeps
from .fields import CONSTANTS, LaserConfig, Setup
from .timeseries import export

_INT_KEYS = {"n_grid", "steps_per_cycle", "sample_stride", "initial_mode"}
_FLOAT_KEYS = {"e_hat_au", "lambda_au", "eta_rad", "delta_t_cycles", "total_time_au"}
_STR_KEYS = {"setup", "initial_spin", "solver", "protocol"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS

_DEFAULTS = {
    "eta_rad": 0.0,
    "setup": "corotating",
    "delta_t_cycles": 5.0,
    "n_grid": 256,
    "steps_per_cycle": 2000,
    "sample_stride": None,
    "initial_mode": -1,
    "initial_spin": "up",
    "solver": "dirac",
    "protocol": "instantaneous",
}


def load_config_file(path: str) -> dict:
    """Parse the flat key=value configuration format."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _ALL_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            else:
                out[key] = value
    return out


def _merged_settings(args) -> dict:
    settings = dict(_DEFAULTS)
    if getattr(args, "config", None):
        settings.update(load_config_file(args.config))
    for key in _ALL_KEYS:
        flag = key if key not in ("lambda_au",) else "lambda_au"
        val = getattr(args, flag, None)
        if val is not None:
            settings[key] = val
    for required in ("e_hat_au", "lambda_au", "total_time_au"):
        if required not in settings:
            raise ValueError(f"missing required parameter {required}")
    return settings


def _laser_config(settings) -> LaserConfig:
    setup = Setup(settings["setup"])
    lam = settings["lambda_au"]
    cycle = lam / CONSTANTS.c
    return LaserConfig(
        e_hat=settings["e_hat_au"],
        lam=lam,
        eta=settings["eta_rad"],
        setup=setup,
        delta_t=settings["delta_t_cycles"] * cycle,
        total_t=settings["total_time_au"],
    )


def _numerics(settings) -> dirac.Numerics:
    return dirac.Numerics(
        n_grid=settings["n_grid"],
        steps_per_cycle=settings["steps_per_cycle"],
        sample_stride=settings["sample_stride"],
        protocol=settings["protocol"],
    )


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value configuration file")
    p.add_argument("--e-hat-au", dest="e_hat_au", type=float, help="field amplitude (a.u.)")
    p.add_argument("--lambda-au", dest="lambda_au", type=float, help="wavelength (a.u.)")
    p.add_argument("--eta-rad", dest="eta_rad", type=float, help="ellipticity (rad)")
    p.add_argument("--setup", choices=["corotating", "antirotating"])
    p.add_argument("--delta-t-cycles", dest="delta_t_cycles", type=float)
    p.add_argument("--total-time-au", dest="total_time_au", type=float)
    p.add_argument("--n-grid", dest="n_grid", type=int)
    p.add_argument("--steps-per-cycle", dest="steps_per_cycle", type=int)
    p.add_argument("--sample-stride", dest="sample_stride", type=int)
    p.add_argument("--initial-mode", dest="initial_mode", type=int)
    p.add_argument("--initial-spin", dest="initial_spin", choices=["up", "dn"])
    p.add_argument("--solver", choices=["dirac", "effective"])
    p.add_argument("--protocol")


def _cmd_simulate(args) -> int:
    settings = _merged_settings(args)
    cfg = _laser_config(settings)
    numerics = _numerics(settings)
    if settings["solver"] == "dirac":
        series = dirac.run(
            cfg,
            numerics,
            initial_mode=settings["initial_mode"],
            initial_spin=settings["initial_spin"],
        )
    else:
        stride = settings["sample_stride"] or settings["steps_per_cycle"]
        dt = cfg.cycle / settings["steps_per_cycle"]
        n_steps = int(round(cfg.total_t / dt))
        times = np.arange(0, n_steps + 1, stride) * dt
        series = sweeps.effective_series(
            cfg,
            times,
            initial_mode=settings["initial_mode"],
            initial_spin=settings["initial_spin"],
        )
    export(series, args.out)
    print(f"wrote {len(series)} samples to {args.out}")
    return 0


def _cmd_compare(args) -> int:
    settings = _merged_settings(args)
    cfg = _laser_config(settings)
    report = sweeps.compare(
        cfg,
        _numerics(settings),
        initial_mode=settings["initial_mode"],
        initial_spin=settings["initial_spin"],
    )
    export(report.dirac, args.out + ".dirac.csv")
    export(report.effective, args.out + ".effective.csv")
    print(f"{'observable':<10} {'max dev':>12} {'rms dev':>12}")
    for name, (mx, rms) in report.deviations.items():
        print(f"{name:<10} {mx:>12.3e} {rms:>12.3e}")
    return 0


def _cmd_sweep_eta(args) -> int:
    settings = dict(_DEFAULTS)
    if args.config:
        settings.update(load_config_file(args.config))
    for key in _ALL_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    settings.setdefault("total_time_au", math.inf)
    for required in ("e_hat_au", "lambda_au"):
        if required not in settings:
            raise ValueError(f"missing required parameter {required}")
    lam = settings["lambda_au"]
    cycle = lam / CONSTANTS.c
    template = LaserConfig(
        e_hat=settings["e_hat_au"],
        lam=lam,
        eta=0.0,
        setup=Setup(settings["setup"]),
        delta_t=settings["delta_t_cycles"] * cycle,
        total_t=math.inf,
    )
    etas = (
        [float(s) for s in args.etas.split(",")] if args.etas else list(sweeps.DEFAULT_ETAS)
    )
    numerics = _numerics(settings) if settings["solver"] == "dirac" else None
    points = sweeps.sweep_eta(
        template,
        etas,
        solver=settings["solver"],
        protocol=args.sweep_protocol,
        numerics=numerics,
        workers=args.workers,
    )
    header = "eta_rad,fitted_a,fitted_b,predicted_a,predicted_b,residual,converged,degenerate,error"
    lines = [header]
    for p in points:
        fa = p.fitted[0] if len(p.fitted) > 0 else ""
        fb = p.fitted[1] if len(p.fitted) > 1 else ""
        pa = p.predicted[0] if len(p.predicted) > 0 else ""
        pb = p.predicted[1] if len(p.predicted) > 1 else ""
        lines.append(
            f"{p.eta!r},{fa!r},{fb!r},{pa!r},{pb!r},{p.residual!r},"
            f"{int(p.converged)},{int(p.degenerate)},{p.error or ''}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write sweep table to {args.out}: {exc}") from exc
    print(text, end="")
    return 0


def _cmd_classical_check(args) -> int:
    lam = args.lambda_au
    cycle = lam / CONSTANTS.c
    etas = [float(s) for s in args.etas.split(",")]
    xs = np.arange(args.x_count) * lam / (2 * args.x_count)
    print("eta_rad,amplitude_fit,amplitude_theory,ratio")
    for eta in etas:
        cfg = LaserConfig(
            e_hat=args.e_hat_au,
            lam=lam,
            eta=eta,
            setup=Setup.ANTIROTATING,
            delta_t=0.0,
            total_t=math.inf,
        )
        forces = [
            classical.averaged_longitudinal_force(cfg, float(x), args.cycles) for x in xs
        ]
        a_fit = classical.fit_sine_amplitude(xs, forces, cfg.k, eta)
        c = cfg.constants
        a_theory = (
            2.0 * c.q**2 * cfg.e_hat**2 / (c.m * c.c * cfg.omega) * math.cos(eta)
        )
        ratio = a_fit / a_theory if a_theory != 0 else float("nan")
        print(f"{eta!r},{a_fit!r},{a_theory!r},{ratio!r}")
    return 0


def _cmd_bounds(args) -> int:
    if args.omega_au is not None:
        omega = args.omega_au
    elif args.lambda_au is not None:
        omega = 2.0 * math.pi * CONSTANTS.c / args.lambda_au
    else:
        raise ValueError("bounds needs --omega-au or --lambda-au")
    win = effective.field_strength_window(omega, args.cycles)
    print(f"lower_e_hat_au = {win.lower!r}")
    print(f"upper_e_hat_au = {win.upper!r}")
    print(f"window_empty = {win.empty}")
    if args.e_hat_au is not None:
        print(f"contains_e_hat = {win.contains(args.e_hat_au)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdspin",
        description="Spin-resolved Kapitza-Dirac scattering simulations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one run with one solver, CSV output")
    _add_config_flags(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("compare", help="Dirac vs effective on one configuration")
    _add_config_flags(p)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("sweep-eta", help="ellipticity sweep with frequency fits")
    _add_config_flags(p)
    p.add_argument("--etas", help="comma separated eta values (rad)")
    p.add_argument(
        "--sweep-protocol",
        choices=["corotating_spin", "antirotating_rabi"],
        default="corotating_spin",
    )
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=_cmd_sweep_eta)

    p = sub.add_parser("classical-check", help="cycle-averaged force law check")
    p.add_argument("--e-hat-au", dest="e_hat_au", type=float, required=True)
    p.add_argument("--lambda-au", dest="lambda_au", type=float, required=True)
    p.add_argument("--etas", default="0,0.5235987755982988,1.0471975511965976,1.5707963267948966")
    p.add_argument("--cycles", type=int, default=20)
    p.add_argument("--x-count", dest="x_count", type=int, default=8)
    p.set_defaults(func=_cmd_classical_check)

    p = sub.add_parser("bounds", help="field-strength window for a full spin flip")
    p.add_argument("--omega-au", dest="omega_au", type=float)
    p.add_argument("--lambda-au", dest="lambda_au", type=float)
    p.add_argument("--cycles", type=float, required=True)
    p.add_argument("--e-hat-au", dest="e_hat_au", type=float)
    p.set_defaults(func=_cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
