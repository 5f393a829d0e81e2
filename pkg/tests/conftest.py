import math

import numpy as np
import pytest

from fdbf import kernels
from fdbf.channel import ChannelRealization


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # pay the one-time JIT cost before any timed or asserted work
    kernels.warmup()


def canonical_realization(epsilon=0.1):
    """The worked 2-antenna instance used across the suite.

    v = (1), H = [[1, 0]], h_d = (1, 1)/sqrt(2): the leakage direction is
    the first axis, the downlink channel sits at 45 degrees, and with
    epsilon = 0.1 the known optimum is alpha = 2/3, w = (1, 3)/sqrt(10),
    si = 0.1, dl_gain = 0.8 (MRT 1.0, ZF 0.5).
    """
    v = np.array([1.0 + 0j])
    H = np.array([[1.0 + 0j, 0.0 + 0j]])
    h_d = np.array([1.0 + 0j, 1.0 + 0j]) / math.sqrt(2.0)
    return ChannelRealization(h_u=v.copy(), h_d=h_d, H=H, v=v, epsilon=epsilon)


@pytest.fixture
def canonical():
    return canonical_realization()


def random_instance(rng, n_t=None, n_r=None, eps=None):
    """One random problem instance (h_d, H, v, eps) with unit-norm v."""
    n_t = n_t or int(rng.integers(1, 9))
    n_r = n_r or int(rng.integers(1, 5))
    h_d = rng.standard_normal(n_t) + 1j * rng.standard_normal(n_t)
    H = (rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t))) * 0.03
    v = rng.standard_normal(n_r) + 1j * rng.standard_normal(n_r)
    v = v / np.linalg.norm(v)
    if eps is None:
        eps = 10.0 ** rng.uniform(-6.0, -1.0)
    return h_d, H, v, eps
