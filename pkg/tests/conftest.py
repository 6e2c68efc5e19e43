# tests/conftest.py
import json

import numpy as np
import pytest
from scipy import linalg

from gaussian_petz.core.channels import loss
from gaussian_petz.core.symplectic_core import GaussianState, symplectic_form


def random_symplectic(rng, n, scale=0.5):
    """exp(Omega A) with A symmetric is symplectic."""
    A = rng.normal(scale=scale, size=(2 * n, 2 * n))
    return linalg.expm(symplectic_form(n) @ (0.5 * (A + A.T)))


def random_cov(rng, n, nu_range=(1.05, 3.0)):
    S = random_symplectic(rng, n)
    nu = rng.uniform(*nu_range, size=n)
    cov = (S * np.concatenate([nu, nu])) @ S.T
    return 0.5 * (cov + cov.T)


def random_gaussian(rng, n, nu_range=(1.05, 3.0), mean_scale=1.0):
    return GaussianState(rng.uniform(-mean_scale, mean_scale, size=2 * n), random_cov(rng, n, nu_range))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def thermal3():
    return GaussianState.thermal(3.0)


@pytest.fixture
def loss_half():
    return loss(0.5)


@pytest.fixture
def write_instance(tmp_path):
    """Write JSON payloads into tmp_path and return their paths."""
    def _write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return str(path)
    return _write
