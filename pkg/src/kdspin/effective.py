"""Time-independent ponderomotive mode models and their closed-form solutions.

The fast laser oscillation is averaged into effective time-independent
Hamiltonians acting on plane-wave momentum modes n (momentum n*k*hbar)
with two spin components each.  Three truncated systems are provided:

* corotating, odd modes {-3,-1,1,3}:  8x8, couplings Omega2 (spin
  preserving) and Omega3' = Omega3*sin(eta) (spin flipping),
* antirotating, odd modes {-1,1}:     4x4, coupling Omega2' = Omega2*cos(eta),
* corotating, even modes {-2,0,2}:    6x6 (nonresonant scattering).

State ordering is (c_{n}^up, c_{n}^dn) for modes in ascending order,
e.g. (-3u, -3d, -1u, -1d, 1u, 1d, 3u, 3d).  A global diagonal constant
2*Omega2 (respectively 2*Omega2') is omitted everywhere; it is a pure
phase for the reported moduli.

All functions are pure; matrices and amplitude sets are plain immutable
values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import LaserConfig, Setup

__all__ = [
    "FrequencySet",
    "ModeAmplitudes",
    "EigenSystem",
    "frequencies",
    "build_corotating_matrix",
    "build_antirotating_matrix",
    "build_nonresonant_matrix",
    "corotating_eigenvalues",
    "antirotating_eigenvalues",
    "nonresonant_eigenvalues",
    "evolve_modes",
    "analytic_amplitudes_corotating",
    "analytic_probabilities_corotating",
    "analytic_spin_corotating",
    "analytic_probabilities_antirotating",
    "analytic_spin_nonresonant",
    "field_strength_window",
    "OCCUPATION_FLOOR",
    "BRAGG_RATIO_LIMIT",
]

#: Conditioned spins are reported as NaN below this mode occupation.
OCCUPATION_FLOOR = 1e-12

#: Diagnostic threshold: Omega2/Omega1 above this value leaves the deep
#: Bragg regime and the perturbative hierarchy degrades.
BRAGG_RATIO_LIMIT = 0.1


@dataclass(frozen=True)
class FrequencySet:
    """Derived angular frequencies of one laser configuration (a.u.).

    omega1 = k^2 hbar / (2 m)            recoil scale
    omega2 = q^2 Ehat^2 / (2 hbar k^2 m c^2)   spin-preserving coupling
    omega3 = q^2 Ehat^2 / (2 k m^2 c^3)        spin-flip coupling scale
    omega2p = omega2 * cos(eta), omega3p = omega3 * sin(eta)
    """

    omega1: float
    omega2: float
    omega3: float
    omega2p: float
    omega3p: float
    k: float
    omega: float

    @property
    def slow(self) -> float:
        """Slow modulation frequency omega2*omega3p/(2*omega1)."""
        return self.omega2 * self.omega3p / (2.0 * self.omega1)

    @property
    def bragg_violated(self) -> bool:
        """True when omega2 >= omega1 * BRAGG_RATIO_LIMIT (diagnostic only)."""
        return self.omega2 >= self.omega1 * BRAGG_RATIO_LIMIT


@dataclass(frozen=True)
class ModeAmplitudes:
    """Complex coefficients c_n^gamma on a mode window, at one time.

    ``entries[i, 0]`` is spin-up and ``entries[i, 1]`` spin-down of
    ``modes[i]``.
    """

    modes: tuple[int, ...]
    entries: np.ndarray  # (n_modes, 2) complex
    t: float = 0.0

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def probability(self, n: int, spin: str) -> float:
        i = self.modes.index(n)
        j = {"up": 0, "dn": 1}[spin]
        return float(np.abs(self.entries[i, j]) ** 2)

    def as_vector(self) -> np.ndarray:
        return self.entries.reshape(-1)

    @classmethod
    def from_vector(cls, modes, vec, t=0.0) -> "ModeAmplitudes":
        vec = np.asarray(vec, dtype=complex)
        return cls(tuple(modes), vec.reshape(len(modes), 2), t)

    @classmethod
    def single(cls, modes, n: int, spin: str = "up", t: float = 0.0) -> "ModeAmplitudes":
        """Unit amplitude in mode n with the given spin, zero elsewhere."""
        modes = tuple(modes)
        entries = np.zeros((len(modes), 2), dtype=complex)
        entries[modes.index(n), {"up": 0, "dn": 1}[spin]] = 1.0
        return cls(modes, entries, t)


@dataclass(frozen=True)
class EigenSystem:
    """Real eigenvalues and orthonormal eigenvectors of a coefficient matrix."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def frequencies(cfg: LaserConfig) -> FrequencySet:
    """Evaluate the derived frequencies of ``cfg``."""
    c = cfg.constants
    k = cfg.k
    q2 = c.q**2
    omega1 = k**2 * c.hbar / (2.0 * c.m)
    omega2 = q2 * cfg.e_hat**2 / (2.0 * c.hbar * k**2 * c.m * c.c**2)
    omega3 = q2 * cfg.e_hat**2 / (2.0 * k * c.m**2 * c.c**3)
    return FrequencySet(
        omega1=omega1,
        omega2=omega2,
        omega3=omega3,
        omega2p=omega2 * math.cos(cfg.eta),
        omega3p=omega3 * math.sin(cfg.eta),
        k=k,
        omega=cfg.omega,
    )


def _coupled_matrix(diag_modes, omega1, same, flip):
    """Symmetric mode-space matrix: n^2*omega1 diagonal, (same, flip)
    2x2 blocks between neighbouring modes (n, n+2)."""
    modes = tuple(diag_modes)
    dim = 2 * len(modes)
    m = np.zeros((dim, dim))
    for i, n in enumerate(modes):
        m[2 * i, 2 * i] = m[2 * i + 1, 2 * i + 1] = n * n * omega1
    block = np.array([[same, flip], [flip, same]])
    for i in range(len(modes) - 1):
        m[2 * i : 2 * i + 2, 2 * i + 2 : 2 * i + 4] = block
        m[2 * i + 2 : 2 * i + 4, 2 * i : 2 * i + 2] = block
    return m


def corotating_modes(n_max: int = 3) -> tuple[int, ...]:
    return tuple(range(-n_max, n_max + 1, 2))


def antirotating_modes(n_max: int = 1) -> tuple[int, ...]:
    return tuple(range(-n_max, n_max + 1, 2))


def even_modes(n_max: int = 2) -> tuple[int, ...]:
    return tuple(range(-n_max, n_max + 1, 2))


def build_corotating_matrix(f: FrequencySet, n_max: int = 3) -> np.ndarray:
    """Odd-mode corotating coefficient matrix (8x8 for the default window).

    A wider window (larger odd n_max) is available for convergence checks.
    """
    if n_max < 1 or n_max % 2 == 0:
        raise ValueError("n_max must be a positive odd integer")
    return _coupled_matrix(corotating_modes(n_max), f.omega1, f.omega2, f.omega3p)


def build_antirotating_matrix(f: FrequencySet, n_max: int = 1) -> np.ndarray:
    """Odd-mode antirotating matrix (4x4 default): spin sectors decoupled."""
    if n_max < 1 or n_max % 2 == 0:
        raise ValueError("n_max must be a positive odd integer")
    return _coupled_matrix(antirotating_modes(n_max), f.omega1, f.omega2p, 0.0)


def build_nonresonant_matrix(f: FrequencySet, n_max: int = 2) -> np.ndarray:
    """Even-mode corotating matrix (6x6 default) for nonresonant scattering."""
    if n_max < 2 or n_max % 2 == 1:
        raise ValueError("n_max must be a positive even integer")
    return _coupled_matrix(even_modes(n_max), f.omega1, f.omega2, f.omega3p)


def corotating_eigenvalues(f: FrequencySet) -> np.ndarray:
    """The eight exact eigenvalues of the default corotating matrix.

    Returned as [e1..e4, e5..e8]: for each coupling combination
    w in (O2+O3', -O2+O3', O2-O3', -O2-O3') the pair
    5*O1 + w/2 -+ sqrt((8*O1 - w)^2/4 + w^2).
    """
    o1 = f.omega1
    out = np.empty(8)
    for i, w in enumerate(
        (f.omega2 + f.omega3p, -f.omega2 + f.omega3p, f.omega2 - f.omega3p, -f.omega2 - f.omega3p)
    ):
        mid = 5.0 * o1 + 0.5 * w
        root = math.sqrt((8.0 * o1 - w) ** 2 / 4.0 + w**2)
        out[i] = mid - root
        out[i + 4] = mid + root
    return out


def antirotating_eigenvalues(f: FrequencySet) -> np.ndarray:
    """Eigenvalues of the 4x4 antirotating matrix: O1 -+ O2', each twice."""
    o1, o2p = f.omega1, f.omega2p
    return np.array([o1 - o2p, o1 - o2p, o1 + o2p, o1 + o2p])


def nonresonant_eigenvalues(f: FrequencySet) -> np.ndarray:
    """The six exact eigenvalues of the default even-mode matrix.

    [e1, e2, e3, e4, e5, e6] with e_{1,2} = 2*O1 - sqrt(4*O1^2 + 2*(O2 +- O3')^2),
    e_{3,4} = 4*O1 and e_{5,6} = 2*O1 + sqrt(...).
    """
    o1 = f.omega1
    rp = math.sqrt(4.0 * o1**2 + 2.0 * (f.omega2 + f.omega3p) ** 2)
    rm = math.sqrt(4.0 * o1**2 + 2.0 * (f.omega2 - f.omega3p) ** 2)
    return np.array([2 * o1 - rp, 2 * o1 - rm, 4 * o1, 4 * o1, 2 * o1 + rp, 2 * o1 + rm])


def diagonalize(matrix: np.ndarray) -> EigenSystem:
    if not np.allclose(matrix, matrix.T.conj(), atol=1e-12):
        raise ValueError("coefficient matrix must be Hermitian")
    values, vectors = np.linalg.eigh(matrix)
    return EigenSystem(values=values, vectors=vectors)


def evolve_modes(
    matrix: np.ndarray,
    initial: ModeAmplitudes,
    t,
    eigensystem: EigenSystem | None = None,
):
    """Exact propagation c(t) = exp(-i M t) c(0) via spectral decomposition.

    ``t`` may be a scalar (returns ModeAmplitudes) or an array (returns the
    (n_t, n_modes, 2) complex array of amplitudes).  Non-Hermitian matrices
    are rejected; the evolution is unitary to roundoff.
    """
    es = eigensystem if eigensystem is not None else diagonalize(matrix)
    c0 = es.vectors.T @ initial.as_vector()
    tarr = np.atleast_1d(np.asarray(t, dtype=float))
    phases = np.exp(-1j * np.outer(tarr, es.values))
    ct = (phases * c0) @ es.vectors.T
    ct = ct.reshape(len(tarr), len(initial.modes), 2)
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return ModeAmplitudes(initial.modes, ct[0], float(t))
    return ct


def analytic_amplitudes_corotating(f: FrequencySet, t) -> np.ndarray:
    """Closed-form corotating amplitudes for the initial state c_{-1}^up = 1.

    Quarter sums of the four lower-branch eigenphases (exact eigenvalues,
    constant approximate eigenvectors); the n = +-3 amplitudes vanish in
    this approximation.  Returns (..., 4, 2) amplitudes on modes
    (-3, -1, 1, 3); supports array t.
    """
    e = corotating_eigenvalues(f)[:4]
    tarr = np.asarray(t, dtype=float)
    ph = np.exp(-1j * np.multiply.outer(tarr, e))  # (..., 4)
    quarter = 0.25
    shape = tarr.shape + (4, 2)
    out = np.zeros(shape, dtype=complex)
    out[..., 1, 0] = quarter * (ph[..., 0] + ph[..., 1] + ph[..., 2] + ph[..., 3])
    out[..., 1, 1] = quarter * (ph[..., 0] - ph[..., 1] - ph[..., 2] + ph[..., 3])
    out[..., 2, 0] = quarter * (ph[..., 0] - ph[..., 1] + ph[..., 2] - ph[..., 3])
    out[..., 2, 1] = quarter * (ph[..., 0] + ph[..., 1] - ph[..., 2] - ph[..., 3])
    return out


def analytic_probabilities_corotating(f: FrequencySet, t) -> np.ndarray:
    """Triple-frequency occupation probabilities (p_m1_up, p_m1_dn, p_p1_up, p_p1_dn).

    Fast scale omega2, intermediate omega3p, slow omega2*omega3p/(2*omega1);
    the four expressions sum to one identically.  Valid while the neglected
    higher-order frequency corrections stay small; see
    ``analytic_amplitudes_corotating`` for the longer-horizon form.
    """
    tarr = np.asarray(t, dtype=float)
    s2 = np.sin(f.omega2 * tarr) ** 2
    c2 = np.cos(f.omega2 * tarr) ** 2
    s3 = np.sin(f.omega3p * tarr) ** 2
    c3 = np.cos(f.omega3p * tarr) ** 2
    slow_half = np.sin(f.omega2 * f.omega3p * tarr / (4.0 * f.omega1)) ** 2
    return np.stack(
        [
            c2 * c3 + (s2 - c3) * slow_half,
            s2 * s3 + (-s2 + c3) * slow_half,
            s2 * c3 + (-s2 + s3) * slow_half,
            c2 * s3 + (s2 - s3) * slow_half,
        ],
        axis=-1,
    )


def analytic_spin_corotating(f: FrequencySet, t) -> tuple:
    """Closed-form spin expectations (s_total, s_m1, s_p1) in units of hbar.

    s_total = (1/2) cos(2*omega3p*t) cos(slow*t); the conditioned spins are
    ratios over the per-mode occupations and are NaN where the occupation
    falls below OCCUPATION_FLOOR (they oscillate through 0/0 there).
    """
    tarr = np.asarray(t, dtype=float)
    ca = np.cos(2.0 * f.omega2 * tarr)
    cb = np.cos(2.0 * f.omega3p * tarr)
    cslow = np.cos(f.omega2 * f.omega3p * tarr / (2.0 * f.omega1))
    s_total = 0.5 * cb * cslow
    den_m1 = ca * cb + 1.0
    den_p1 = ca * cb - 1.0
    with np.errstate(invalid="ignore", divide="ignore"):
        s_m1 = np.where(
            np.abs(den_m1) < 2.0 * OCCUPATION_FLOOR,
            np.nan,
            0.5 * cslow * (ca + cb) / den_m1,
        )
        s_p1 = np.where(
            np.abs(den_p1) < 2.0 * OCCUPATION_FLOOR,
            np.nan,
            0.5 * cslow * (ca - cb) / den_p1,
        )
    return s_total, s_m1, s_p1


def analytic_probabilities_antirotating(f: FrequencySet, t) -> np.ndarray:
    """Rabi oscillation (p_m1_up, p_p1_up) = (cos^2, sin^2)(omega2p * t).

    Spin-down channels are identically zero: the antirotating standing wave
    is linearly polarized and does not couple spin states.
    """
    tarr = np.asarray(t, dtype=float)
    return np.stack(
        [np.cos(f.omega2p * tarr) ** 2, np.sin(f.omega2p * tarr) ** 2], axis=-1
    )


def analytic_spin_nonresonant(f: FrequencySet, t) -> np.ndarray:
    """Nonresonant spin Rabi oscillation (p_0_up, p_0_dn) from c_0^up = 1.

    Oscillates at half the exact eigenvalue splitting e2 - e1 of the
    even-mode matrix, approximately 2*omega2*omega3p/omega1.
    """
    e = nonresonant_eigenvalues(f)
    half = 0.5 * (e[1] - e[0])
    tarr = np.asarray(t, dtype=float)
    return np.stack([np.cos(half * tarr) ** 2, np.sin(half * tarr) ** 2], axis=-1)


def nonresonant_splitting(f: FrequencySet) -> tuple[float, float]:
    """(exact, approximate) spin Rabi angular frequency of the even system."""
    e = nonresonant_eigenvalues(f)
    return float(e[1] - e[0]), 2.0 * f.omega2 * f.omega3p / f.omega1


@dataclass(frozen=True)
class FieldStrengthWindow:
    """Electric-field interval for a full spin flip within n laser cycles."""

    lower: float
    upper: float

    @property
    def empty(self) -> bool:
        return self.lower >= self.upper

    def contains(self, e_hat: float) -> bool:
        return self.lower < e_hat < self.upper


def field_strength_window(
    omega: float, n_cycles: float, constants=None
) -> FieldStrengthWindow:
    """Field-strength bounds for observing a full spin flip in n_cycles.

    lower = sqrt(omega^3 hbar m / (2 q^2 n_cycles)) keeps the spin flip
    faster than the interaction time; upper = omega^2 hbar / (|q| c) keeps
    the dynamics in the Bragg regime.  The window may be empty (reported,
    not raised).
    """
    from .fields import CONSTANTS

    c = constants if constants is not None else CONSTANTS
    if n_cycles < 1:
        raise ValueError("n_cycles must be >= 1")
    if omega <= 0:
        raise ValueError("omega must be > 0")
    lower = math.sqrt(omega**3 * c.hbar * c.m / (2.0 * c.q**2 * n_cycles))
    upper = omega**2 * c.hbar / (abs(c.q) * c.c)
    return FieldStrengthWindow(lower=lower, upper=upper)
