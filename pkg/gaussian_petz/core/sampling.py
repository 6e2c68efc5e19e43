# gaussian_petz/core/sampling.py
"""
Random instances for the counterexample search.

States: per mode nu ~ U[1.05, 4], squeezing r ~ U[0, 1], angle theta ~ U[0, 2pi);
two modes are mixed by a beam splitter with angle ~ U[0, 2pi); means ~ U[-2, 2]^2n.
Channels: loss eta ~ U[0.1, 0.95], amplifier G ~ U[1.05, 3] or classical noise
y ~ U[0.1, 2] (chosen uniformly), applied to every mode, plus delta ~ U[-1, 1]^2n.
Draw order is fixed (rho, sigma, channel) so a generator seeded by
(seed, sample index) always reproduces the same instance.
"""
import numpy as np

from gaussian_petz.core.channels import GaussianChannel, amplifier, classical_noise, loss
from gaussian_petz.core.symplectic_core import GaussianState
from gaussian_petz.utils.errors import StructuralError

NU_RANGE = (1.05, 4.0)
SQUEEZE_RANGE = (0.0, 1.0)
MEAN_RANGE = (-2.0, 2.0)
LOSS_RANGE = (0.1, 0.95)
GAIN_RANGE = (1.05, 3.0)
NOISE_RANGE = (0.1, 2.0)
DELTA_RANGE = (-1.0, 1.0)
CHANNEL_KINDS = ("loss", "amplifier", "noise")


def _check_modes(modes):
    if modes not in (1, 2):
        raise StructuralError(f"random instances support 1 or 2 modes, got {modes}")


def instance_rng(seed, index):
    """Independent stream for one sample."""
    return np.random.default_rng([int(seed), int(index)])


def _single_mode_cov(rng):
    nu = rng.uniform(*NU_RANGE)
    r = rng.uniform(*SQUEEZE_RANGE)
    theta = rng.uniform(0.0, 2.0 * np.pi)
    return GaussianState.squeezed(r, theta, nu).cov


def _beam_splitter(phi):
    # same rotation on (x1, x2) and (p1, p2)
    c, s = np.cos(phi), np.sin(phi)
    return np.kron(np.eye(2), np.array([[c, s], [-s, c]]))


def random_state(rng, modes=1):
    _check_modes(modes)
    blocks = [_single_mode_cov(rng) for _ in range(modes)]
    if modes == 1:
        cov = blocks[0]
    else:
        cov = np.zeros((4, 4))
        for j, block in enumerate(blocks):
            idx = [j, modes + j]
            cov[np.ix_(idx, idx)] = block
        bs = _beam_splitter(rng.uniform(0.0, 2.0 * np.pi))
        cov = bs @ cov @ bs.T
    mean = rng.uniform(*MEAN_RANGE, size=2 * modes)
    return GaussianState(mean, 0.5 * (cov + cov.T))


def random_channel(rng, modes=1):
    """Returns (channel, description) with description {"kind": ..., "param": ...}."""
    _check_modes(modes)
    kind = CHANNEL_KINDS[int(rng.integers(len(CHANNEL_KINDS)))]
    if kind == "loss":
        param = rng.uniform(*LOSS_RANGE)
        base = loss(param, modes)
    elif kind == "amplifier":
        param = rng.uniform(*GAIN_RANGE)
        base = amplifier(param, modes)
    else:
        param = rng.uniform(*NOISE_RANGE)
        base = classical_noise(param, modes)
    delta = rng.uniform(*DELTA_RANGE, size=2 * modes)
    # displacement leaves complete positivity unchanged
    channel = GaussianChannel(base.X, base.Y, delta, validate=False)
    return channel, {"kind": kind, "param": float(param)}


def random_faithful_instance(rng, modes=1):
    """(rho, sigma, channel, description) drawn in that order."""
    rho = random_state(rng, modes)
    sigma = random_state(rng, modes)
    channel, description = random_channel(rng, modes)
    return rho, sigma, channel, description
