import math

import pytest

from kdspin import LaserConfig, Setup


@pytest.fixture
def flagship_cfg():
    """Corotating circular-polarization working point used across tests:
    e_hat=400, lambda=3, eta=pi/2, five-cycle ramps."""
    cfg = LaserConfig(e_hat=400.0, lam=3.0, eta=math.pi / 2)
    cycle = cfg.cycle
    return LaserConfig(
        e_hat=400.0,
        lam=3.0,
        eta=math.pi / 2,
        setup=Setup.COROTATING,
        delta_t=5.0 * cycle,
        total_t=math.inf,
    )


@pytest.fixture
def antirotating_cfg():
    cfg = LaserConfig(e_hat=400.0, lam=3.0, eta=0.0)
    cycle = cfg.cycle
    return LaserConfig(
        e_hat=400.0,
        lam=3.0,
        eta=0.0,
        setup=Setup.ANTIROTATING,
        delta_t=5.0 * cycle,
        total_t=math.inf,
    )
