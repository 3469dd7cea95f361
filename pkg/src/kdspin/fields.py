"""Electromagnetic fields of two counterpropagating elliptically polarized waves.

Everything is expressed in Hartree atomic units (hbar = m = |q| = 1,
c = 137.036, electron charge q = -1).  Two standing-wave setups are
supported, distinguished by the relative sense of rotation of the two
waves' electric-field vectors:

* corotating:    E = 2*Ehat*cos(kx) * (0, cos(wt), cos(wt - eta))
* antirotating:  E = 2*Ehat*cos(wt) * (0, cos(kx), cos(kx + eta))

with the matching magnetic fields and vector potentials (E = -dA/dt,
B = curl A).  Fields are evaluated lazily per (x, t); there is no
tabulation and no mutable state, so every function here is safe to call
from any number of workers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Setup",
    "PhysicalConstants",
    "CONSTANTS",
    "LaserConfig",
    "FieldSample",
    "total_fields",
    "window",
    "derived_wave_numbers",
]


class Setup(enum.Enum):
    """Relative sense of rotation of the two counterpropagating waves."""

    COROTATING = "corotating"
    ANTIROTATING = "antirotating"


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants of the Hartree atomic unit system.

    q is the signed electron charge; analytic results depend only on q**2
    but the Dirac solver uses the signed value.
    """

    c: float = 137.035999084
    hbar: float = 1.0
    m: float = 1.0
    q: float = -1.0

    def __post_init__(self):
        if self.q >= 0:
            raise ValueError("electron charge must be negative")

    @property
    def mc2(self) -> float:
        return self.m * self.c**2

    @property
    def compton_wavelength(self) -> float:
        """Reduced Compton wavelength hbar/(m c)."""
        return self.hbar / (self.m * self.c)


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class LaserConfig:
    """Single source of physical parameters for one standing-wave run.

    Parameters
    ----------
    e_hat : float
        Electric field amplitude of each wave (a.u.).
    lam : float
        Wavelength of both waves (a.u.).
    eta : float
        Ellipticity phase in (-pi, pi]; 0 is linear, +-pi/2 circular.
    setup : Setup
        Corotating or antirotating combination of the two waves.
    delta_t : float
        Turn-on/turn-off ramp duration (a.u.).
    total_t : float
        Total interaction time (a.u.).
    """

    e_hat: float
    lam: float
    eta: float
    setup: Setup = Setup.COROTATING
    delta_t: float = 0.0
    total_t: float = math.inf
    constants: PhysicalConstants = field(default=CONSTANTS)

    def __post_init__(self):
        if self.e_hat < 0:
            raise ValueError(f"e_hat must be >= 0, got {self.e_hat}")
        if self.lam <= 0:
            raise ValueError(f"lambda must be > 0, got {self.lam}")
        if not (-math.pi < self.eta <= math.pi):
            raise ValueError(f"eta must lie in (-pi, pi], got {self.eta}")
        if self.delta_t < 0 or self.delta_t > self.total_t / 2:
            raise ValueError(
                f"need 0 <= delta_t <= total_t/2, got delta_t={self.delta_t}, total_t={self.total_t}"
            )

    @property
    def k(self) -> float:
        """Wave number 2*pi/lambda."""
        return 2.0 * math.pi / self.lam

    @property
    def omega(self) -> float:
        """Angular frequency c*k."""
        return self.constants.c * self.k

    @property
    def cycle(self) -> float:
        """Duration of one laser cycle 2*pi/omega."""
        return 2.0 * math.pi / self.omega


@dataclass(frozen=True)
class FieldSample:
    """E, B and A three-vectors at one (x, t); x-components are always zero."""

    e: np.ndarray
    b: np.ndarray
    a: np.ndarray


def derived_wave_numbers(cfg: LaserConfig) -> tuple[float, float]:
    """Return (k, omega) = (2*pi/lambda, c*k)."""
    return cfg.k, cfg.omega


def window(t: float, delta_t: float, total_t: float) -> float:
    """Smooth turn-on/turn-off envelope.

    sin^2 ramp on [0, delta_t], unity plateau, sin^2 ramp down on
    [total_t - delta_t, total_t].  Continuous and C^1 at the junctions.
    Raises ValueError for t outside [0, total_t].
    """
    if t < 0.0 or t > total_t:
        raise ValueError(f"t={t} outside [0, {total_t}]")
    if delta_t == 0.0:
        return 1.0
    if t < delta_t:
        return math.sin(math.pi * t / (2.0 * delta_t)) ** 2
    if t > total_t - delta_t:
        return math.sin(math.pi * (total_t - t) / (2.0 * delta_t)) ** 2
    return 1.0


def vector_potential(cfg: LaserConfig, x, t: float):
    """(A_y, A_z) of the selected setup; supports array-valued x."""
    pref = -2.0 * cfg.e_hat / cfg.omega
    k, w, eta = cfg.k, cfg.omega, cfg.eta
    if cfg.setup is Setup.COROTATING:
        ay = pref * np.cos(k * x) * math.sin(w * t)
        az = pref * np.cos(k * x) * math.sin(w * t - eta)
    else:
        ay = pref * np.cos(k * x) * math.sin(w * t)
        az = pref * np.cos(k * x + eta) * math.sin(w * t)
    return ay, az


def total_fields(cfg: LaserConfig, x: float, t: float) -> FieldSample:
    """Evaluate the summed E, B, A of both waves at one point.

    The returned sample satisfies E = -dA/dt and B = curl A analytically.
    """
    e_hat, k, w, eta, c = cfg.e_hat, cfg.k, cfg.omega, cfg.eta, cfg.constants.c
    if cfg.setup is Setup.COROTATING:
        e = 2.0 * e_hat * math.cos(k * x) * np.array(
            [0.0, math.cos(w * t), math.cos(w * t - eta)]
        )
        b = (2.0 * e_hat / c) * math.sin(k * x) * np.array(
            [0.0, -math.sin(w * t - eta), math.sin(w * t)]
        )
        a = -(2.0 * e_hat / w) * math.cos(k * x) * np.array(
            [0.0, math.sin(w * t), math.sin(w * t - eta)]
        )
    else:
        e = 2.0 * e_hat * math.cos(w * t) * np.array(
            [0.0, math.cos(k * x), math.cos(k * x + eta)]
        )
        b = (2.0 * e_hat / c) * math.sin(w * t) * np.array(
            [0.0, -math.sin(k * x + eta), math.sin(k * x)]
        )
        a = -(2.0 * e_hat / w) * math.sin(w * t) * np.array(
            [0.0, math.cos(k * x), math.cos(k * x + eta)]
        )
    return FieldSample(e=e, b=b, a=a)
