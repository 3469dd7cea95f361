import math

import numpy as np
import pytest

from kdspin import LaserConfig, Setup
from kdspin.classical import (
    ClassicalState,
    averaged_longitudinal_force,
    fit_sine_amplitude,
    longitudinal_force_theory,
    lorentz_step,
    ponderomotive_potential,
)
from kdspin.fields import total_fields

LAM = 3.0


def anti_cfg(eta, e_hat=400.0):
    return LaserConfig(
        e_hat=e_hat, lam=LAM, eta=eta, setup=Setup.ANTIROTATING, delta_t=0.0, total_t=math.inf
    )


class TestLorentzStep:
    def test_free_motion(self):
        cfg = anti_cfg(0.3, e_hat=0.0)
        s = ClassicalState(r=np.array([0.1, 0.2, 0.3]), v=np.array([1.0, -2.0, 0.5]))
        for _ in range(100):
            s = lorentz_step(s, cfg, 1e-3)
        assert np.allclose(s.r, [0.1 + 0.1, 0.2 - 0.2, 0.3 + 0.05], atol=1e-12)
        assert np.allclose(s.v, [1.0, -2.0, 0.5], atol=1e-12)

    def test_electric_only_velocity(self):
        # with B zeroed and v(0)=0 the transverse velocity integrates to
        # (2qE/(m w)) sin(wt) (0, cos kx, cos(kx+eta)) at fixed x
        cfg = anti_cfg(0.8)
        x0 = 0.37
        s = ClassicalState.at_rest(x0)
        dt = cfg.cycle / 256
        for _ in range(700):
            s = lorentz_step(s, cfg, dt, include_b=False)
        c = cfg.constants
        pref = 2.0 * c.q * cfg.e_hat / (c.m * cfg.omega)
        expect = pref * math.sin(cfg.omega * s.t) * np.array(
            [0.0, math.cos(cfg.k * x0), math.cos(cfg.k * x0 + cfg.eta)]
        )
        assert np.allclose(s.v, expect, atol=1e-8)

    def test_magnetic_force_does_no_work(self):
        cfg = anti_cfg(0.5)
        s = ClassicalState.at_rest(0.61)
        dt = cfg.cycle / 512
        energy = 0.0
        for _ in range(512):
            mid = lorentz_step(s, cfg, dt / 2)
            sample = total_fields(cfg, mid.r[0], mid.t)
            energy += cfg.constants.q * float(sample.e @ mid.v) * dt
            s = lorentz_step(s, cfg, dt)
        kinetic = 0.5 * cfg.constants.m * float(s.v @ s.v)
        assert kinetic == pytest.approx(energy, rel=5e-3)

    def test_warns_when_relativistic(self):
        cfg = anti_cfg(0.0, e_hat=8000.0)
        s = ClassicalState(r=np.zeros(3), v=np.array([0.0, 20.0, 0.0]))
        with pytest.warns(UserWarning):
            for _ in range(200):
                s = lorentz_step(s, cfg, cfg.cycle / 256)

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            lorentz_step(ClassicalState.at_rest(0.0), anti_cfg(0.0), 0.0)


class TestAveragedForce:
    def test_matches_closed_form_at_linear_polarization(self):
        cfg = anti_cfg(0.0)
        x = LAM / 8
        force = averaged_longitudinal_force(cfg, x, 15)
        assert force == pytest.approx(longitudinal_force_theory(cfg, x), rel=0.05)

    def test_requires_enough_cycles(self):
        with pytest.raises(ValueError):
            averaged_longitudinal_force(anti_cfg(0.0), 0.1, 5)

    def test_spatial_period_and_quarter_wave_flip(self):
        cfg = anti_cfg(0.0)
        f0 = averaged_longitudinal_force(cfg, LAM / 8, 12)
        same = averaged_longitudinal_force(cfg, LAM / 8 + LAM / 2, 12)
        flipped = averaged_longitudinal_force(cfg, LAM / 8 + LAM / 4, 12)
        assert same == pytest.approx(f0, rel=1e-10)
        assert flipped == pytest.approx(-f0, rel=1e-10)

    def test_circular_polarization_suppression(self):
        amp0 = abs(longitudinal_force_theory(anti_cfg(0.0), LAM / 8))
        force = averaged_longitudinal_force(anti_cfg(math.pi / 2), LAM / 8, 12)
        assert abs(force) < 0.01 * amp0

    def test_amplitude_proportional_to_cos_eta(self):
        xs = np.arange(6) * LAM / 12
        scale = None
        for eta in (0.0, math.pi / 6, math.pi / 3):
            cfg = anti_cfg(eta)
            forces = [averaged_longitudinal_force(cfg, float(x), 12) for x in xs]
            a_fit = fit_sine_amplitude(xs, forces, cfg.k, eta)
            if scale is None:
                scale = a_fit
            assert a_fit / scale == pytest.approx(math.cos(eta), rel=0.05)

    def test_force_is_minus_potential_gradient(self):
        cfg = anti_cfg(0.0)
        x0, h = 0.4, 1e-5
        dv = (ponderomotive_potential(cfg, x0 + h) - ponderomotive_potential(cfg, x0 - h)) / (
            2 * h
        )
        force = averaged_longitudinal_force(cfg, x0, 15)
        assert force == pytest.approx(-dv, rel=0.05)
