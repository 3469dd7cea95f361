"""Classical charged-particle motion in the standing-wave fields.

Verifies the cycle-averaged longitudinal force law of the antirotating
setup: the transverse quiver velocity stays in phase with the magnetic
field, so the v x B force does not average out and the particle feels

    F_x = m * (2 q^2 Ehat^2 / (m^2 c omega)) * cos(eta) * sin(2 k x + eta)

equivalent to the potential (2 q^2 Ehat^2 / (m omega^2)) cos(eta)
cos^2(kx + eta/2).  No window function is applied here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fields import LaserConfig, total_fields

__all__ = [
    "ClassicalState",
    "lorentz_step",
    "averaged_longitudinal_force",
    "longitudinal_force_theory",
    "ponderomotive_potential",
    "fit_sine_amplitude",
]


@dataclass(frozen=True)
class ClassicalState:
    """Position, velocity (3-vectors, a.u.) and time of one particle."""

    r: np.ndarray
    v: np.ndarray
    t: float = 0.0

    @classmethod
    def at_rest(cls, x: float) -> "ClassicalState":
        return cls(r=np.array([x, 0.0, 0.0]), v=np.zeros(3), t=0.0)


def _acceleration(cfg: LaserConfig, r, v, t, include_b=True):
    sample = total_fields(cfg, r[0], t)
    qm = cfg.constants.q / cfg.constants.m
    a = qm * sample.e
    if include_b:
        a = a + qm * np.cross(v, sample.b)
    return a


def lorentz_step(
    s: ClassicalState, cfg: LaserConfig, dt: float, include_b: bool = True
) -> ClassicalState:
    """One classical RK4 step of r'' = (q/m)(E + v x B)."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    r, v, t = s.r, s.v, s.t

    def deriv(rr, vv, tt):
        return vv, _acceleration(cfg, rr, vv, tt, include_b)

    k1r, k1v = deriv(r, v, t)
    k2r, k2v = deriv(r + 0.5 * dt * k1r, v + 0.5 * dt * k1v, t + 0.5 * dt)
    k3r, k3v = deriv(r + 0.5 * dt * k2r, v + 0.5 * dt * k2v, t + 0.5 * dt)
    k4r, k4v = deriv(r + dt * k3r, v + dt * k3v, t + dt)
    r_new = r + dt / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r)
    v_new = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
    speed = float(np.linalg.norm(v_new))
    if speed > 0.1 * cfg.constants.c:
        warnings.warn(
            f"classical speed {speed:.1f} a.u. above 0.1c; nonrelativistic "
            "equations of motion are getting marginal",
            stacklevel=2,
        )
    return ClassicalState(r=r_new, v=v_new, t=t + dt)


def averaged_longitudinal_force(
    cfg: LaserConfig, x: float, n_cycles: int, steps_per_cycle: int = 256
) -> float:
    """Cycle-averaged force m<x''> on a particle held near x (a.u.).

    The particle starts at rest; each laser cycle its longitudinal
    coordinate and longitudinal velocity are reset (suppressing secular
    drift) while the transverse quiver keeps evolving freely.  The mean
    longitudinal acceleration per cycle is the exact velocity gain
    v_x(cycle end)/T_cycle.
    """
    if n_cycles < 10:
        raise ValueError("n_cycles must be >= 10 for a stable average")
    cycle = cfg.cycle
    dt = cycle / steps_per_cycle
    s = ClassicalState.at_rest(x)
    gains = []
    for _ in range(n_cycles):
        for _ in range(steps_per_cycle):
            s = lorentz_step(s, cfg, dt)
        gains.append(s.v[0] / cycle)
        r = s.r.copy()
        v = s.v.copy()
        r[0] = x
        v[0] = 0.0
        s = ClassicalState(r=r, v=v, t=s.t)
    return cfg.constants.m * float(np.mean(gains))


def longitudinal_force_theory(cfg: LaserConfig, x: float) -> float:
    """Closed-form cycle-averaged force of the antirotating setup."""
    c = cfg.constants
    amp = 2.0 * c.q**2 * cfg.e_hat**2 / (c.m * c.c * cfg.omega)
    return amp * math.cos(cfg.eta) * math.sin(2.0 * cfg.k * x + cfg.eta)


def ponderomotive_potential(cfg: LaserConfig, x) -> np.ndarray:
    """Time-averaged potential of the antirotating setup."""
    c = cfg.constants
    amp = 2.0 * c.q**2 * cfg.e_hat**2 / (c.m * cfg.omega**2)
    return amp * math.cos(cfg.eta) * np.cos(cfg.k * np.asarray(x) + cfg.eta / 2.0) ** 2


def fit_sine_amplitude(xs, forces, k: float, eta: float) -> float:
    """Least-squares amplitude A of forces ~ A sin(2 k x + eta)."""
    basis = np.sin(2.0 * k * np.asarray(xs) + eta)
    denom = float(basis @ basis)
    if denom == 0.0:
        raise ValueError("degenerate abscissa set for the sine fit")
    return float(basis @ np.asarray(forces)) / denom
