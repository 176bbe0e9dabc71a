import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracle_bptt importable

from lsnn import build_network


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def tiny_network(rng, *, n_in=3, n_regular=4, n_adaptive=3, n_out=2, T=None,
                 delay_range=(0, 3), refractory=2.0, noise_sigma=0.1,
                 b0=0.05, drive=20.0):
    """Small spiking network with strong enough drive that spikes occur."""
    params = build_network(rng, n_in=n_in, n_regular=n_regular, n_adaptive=n_adaptive,
                           n_out=n_out, tau_m=(15.0, 30.0), tau_a=(10.0, 80.0),
                           beta_adaptive=1.0, b0=b0, refractory=refractory,
                           delay_range=delay_range, noise_sigma=noise_sigma)
    params.w_in *= drive
    params.w_rec *= drive * 0.4
    return params
