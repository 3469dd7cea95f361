"""Inner propagation loops of the spectral Dirac solver.

Two interchangeable implementations of the same Strang-split step
sequence: a numba-compiled kernel carrying its own radix-2 FFT (np.fft
cannot be called from nopython code) and a vectorized numpy fallback.
Grids are power-of-two, which the solver enforces.

One step advances t -> t + dt via

    Kp(dt/2) . L(t + dt/2, dt) . Kp(dt/2)

where Kp = exp(-i c k n alpha_x dt/2) is the exact per-mode momentum
rotation and L = exp(-i (beta m c^2 - c q w(t) alpha.A(x,t)) dt) the
exact position-local exponential, evaluated in closed form through
(beta*a + alpha.b)^2 = (a^2 + b^2) * identity.  Half steps of adjacent
steps are fused inside a chunk; chunk boundaries land on exact step
boundaries.

The window modes are 0 (standard turn-on/plateau/turn-off envelope) and
1 (a turn-off branch: scale * sin^2 ramp from the branch start to zero
over ``off_len``).  Both kernels also accumulate the gauge time
tau = integral of w(t)^2 dt used by the model comparisons.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def deco(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return deco


__all__ = ["HAS_NUMBA", "fft_tables", "propagate_numba", "propagate_numpy"]


def fft_tables(n: int):
    """Bit-reversal permutation and per-stage twiddle factors for size n."""
    if n & (n - 1) or n < 2:
        raise ValueError(f"FFT size must be a power of two >= 2, got {n}")
    levels = n.bit_length() - 1
    rev = np.zeros(n, np.int64)
    for i in range(n):
        r = 0
        x = i
        for _ in range(levels):
            r = (r << 1) | (x & 1)
            x >>= 1
        rev[i] = r
    fwd, inv = [], []
    size = 2
    while size <= n:
        half = size // 2
        ang = 2.0 * np.pi * np.arange(half) / size
        fwd.append(np.exp(-1j * ang))
        inv.append(np.exp(+1j * ang))
        size *= 2
    return rev, np.concatenate(fwd), np.concatenate(inv)


@njit(cache=True)
def _fft_inplace(a, rev, tw):
    n = a.shape[0]
    for i in range(n):
        j = rev[i]
        if j > i:
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp
    size = 2
    toff = 0
    while size <= n:
        half = size // 2
        for i in range(0, n, size):
            for j in range(half):
                w = tw[toff + j]
                u = a[i + j]
                v = a[i + j + half] * w
                a[i + j] = u + v
                a[i + j + half] = u - v
        toff += half
        size *= 2


@njit(cache=True)
def _window(tm, delta_t, total_t, mode, w_scale, off_start, off_len):
    if mode == 1:
        arg = np.pi * (off_start + off_len - tm) / (2.0 * off_len)
        s = np.sin(arg)
        return w_scale * s * s
    if delta_t == 0.0:
        return 1.0
    if tm < delta_t:
        s = np.sin(np.pi * tm / (2.0 * delta_t))
        return s * s
    if tm > total_t - delta_t:
        s = np.sin(np.pi * (total_t - tm) / (2.0 * delta_t))
        return s * s
    return 1.0


@njit(cache=True)
def _kinetic(psi, cth, sth, rev, twf, twb):
    # exp(-i c k n alpha_x tau) in momentum space; 1/n fft normalization
    # is folded into (cth, sth).
    n = psi.shape[1]
    for r in range(4):
        _fft_inplace(psi[r], rev, twf)
    for i in range(n):
        f0 = psi[0, i]
        f1 = psi[1, i]
        f2 = psi[2, i]
        f3 = psi[3, i]
        psi[0, i] = cth[i] * f0 - 1j * (sth[i] * f3)
        psi[1, i] = cth[i] * f1 - 1j * (sth[i] * f2)
        psi[2, i] = cth[i] * f2 - 1j * (sth[i] * f1)
        psi[3, i] = cth[i] * f3 - 1j * (sth[i] * f0)
    for r in range(4):
        _fft_inplace(psi[r], rev, twb)


@njit(cache=True)
def _local(psi, tm, dt, wv, corotating, e2w, omega, eta, cos_kx, cos_kxe, aoy, aoz, mc2, cq):
    n = psi.shape[1]
    if corotating:
        say = math.sin(omega * tm)
        saz = math.sin(omega * tm - eta)
    else:
        say = math.sin(omega * tm)
        saz = say
    pref = -e2w
    for i in range(n):
        if corotating:
            ay = pref * cos_kx[i] * say + aoy
            az = pref * cos_kx[i] * saz + aoz
        else:
            ay = pref * cos_kx[i] * say + aoy
            az = pref * cos_kxe[i] * saz + aoz
        by = -cq * wv * ay
        bz = -cq * wv * az
        om = math.sqrt(mc2 * mc2 + by * by + bz * bz)
        cph = math.cos(om * dt)
        snc = math.sin(om * dt) / om
        p0 = psi[0, i]
        p1 = psi[1, i]
        p2 = psi[2, i]
        p3 = psi[3, i]
        h0 = mc2 * p0 + (bz * p2 - 1j * (by * p3))
        h1 = mc2 * p1 + (1j * (by * p2) - bz * p3)
        h2 = -mc2 * p2 + (bz * p0 - 1j * (by * p1))
        h3 = -mc2 * p3 + (1j * (by * p0) - bz * p1)
        psi[0, i] = cph * p0 - 1j * (snc * h0)
        psi[1, i] = cph * p1 - 1j * (snc * h1)
        psi[2, i] = cph * p2 - 1j * (snc * h2)
        psi[3, i] = cph * p3 - 1j * (snc * h3)


@njit(cache=True)
def propagate_numba(
    psi,
    nsteps,
    t0,
    dt,
    cth_h,
    sth_h,
    cth_f,
    sth_f,
    rev,
    twf,
    twb,
    corotating,
    e2w,
    omega,
    eta,
    cos_kx,
    cos_kxe,
    aoy,
    aoz,
    mc2,
    cq,
    delta_t,
    total_t,
    wmode,
    w_scale,
    off_start,
    off_len,
):
    """Advance psi (4, n) in place by nsteps Strang steps; returns gauge-time increment."""
    tau = 0.0
    t = t0
    _kinetic(psi, cth_h, sth_h, rev, twf, twb)
    for s in range(nsteps):
        tm = t + 0.5 * dt
        wv = _window(tm, delta_t, total_t, wmode, w_scale, off_start, off_len)
        _local(psi, tm, dt, wv, corotating, e2w, omega, eta, cos_kx, cos_kxe, aoy, aoz, mc2, cq)
        tau += wv * wv * dt
        t += dt
        if s < nsteps - 1:
            _kinetic(psi, cth_f, sth_f, rev, twf, twb)
    _kinetic(psi, cth_h, sth_h, rev, twf, twb)
    return tau


def propagate_numpy(
    psi,
    nsteps,
    t0,
    dt,
    kin_half,
    kin_full,
    corotating,
    e2w,
    omega,
    eta,
    cos_kx,
    cos_kxe,
    aoy,
    aoz,
    mc2,
    cq,
    delta_t,
    total_t,
    wmode,
    w_scale,
    off_start,
    off_len,
):
    """Vectorized reference path; identical math to propagate_numba.

    kin_half/kin_full are (cos, sin) rotation tables without fft
    normalization folding (np.fft handles it).
    """

    def kinetic(p, tab):
        cth, sth = tab
        f = np.fft.fft(p, axis=1)
        out = np.empty_like(f)
        out[0] = cth * f[0] - 1j * sth * f[3]
        out[1] = cth * f[1] - 1j * sth * f[2]
        out[2] = cth * f[2] - 1j * sth * f[1]
        out[3] = cth * f[3] - 1j * sth * f[0]
        return np.fft.ifft(out, axis=1)

    def wval(tm):
        if wmode == 1:
            return w_scale * math.sin(math.pi * (off_start + off_len - tm) / (2.0 * off_len)) ** 2
        if delta_t == 0.0:
            return 1.0
        if tm < delta_t:
            return math.sin(math.pi * tm / (2.0 * delta_t)) ** 2
        if tm > total_t - delta_t:
            return math.sin(math.pi * (total_t - tm) / (2.0 * delta_t)) ** 2
        return 1.0

    tau = 0.0
    t = t0
    psi = kinetic(psi, kin_half)
    for s in range(nsteps):
        tm = t + 0.5 * dt
        wv = wval(tm)
        say = math.sin(omega * tm)
        saz = math.sin(omega * tm - eta) if corotating else say
        gz = cos_kx if corotating else cos_kxe
        ay = -e2w * cos_kx * say + aoy
        az = -e2w * gz * saz + aoz
        by = -cq * wv * ay
        bz = -cq * wv * az
        om = np.sqrt(mc2 * mc2 + by * by + bz * bz)
        cph = np.cos(om * dt)
        snc = np.sin(om * dt) / om
        p0, p1, p2, p3 = psi
        h0 = mc2 * p0 + (bz * p2 - 1j * by * p3)
        h1 = mc2 * p1 + (1j * by * p2 - bz * p3)
        h2 = -mc2 * p2 + (bz * p0 - 1j * by * p1)
        h3 = -mc2 * p3 + (1j * by * p0 - bz * p1)
        psi = np.stack(
            [
                cph * p0 - 1j * snc * h0,
                cph * p1 - 1j * snc * h1,
                cph * p2 - 1j * snc * h2,
                cph * p3 - 1j * snc * h3,
            ]
        )
        tau += wv * wv * dt
        t += dt
        psi = kinetic(psi, kin_full if s < nsteps - 1 else kin_half)
    return psi, tau
