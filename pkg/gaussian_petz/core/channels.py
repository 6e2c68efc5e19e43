# gaussian_petz/core/channels.py
"""
Gaussian channels (X, Y, delta): V -> X V X^T + Y, s -> X s + delta.

A channel is checked once, at construction, for symmetry of Y and for the
complete-positivity condition Y + i Omega_out - i X Omega_in X^T >= 0.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import linalg

from gaussian_petz.core.symplectic_core import GaussianState, symplectic_form
from gaussian_petz.utils import config
from gaussian_petz.utils.errors import DomainError, NotCompletelyPositiveError, StructuralError
from gaussian_petz.utils.io import as_matrix, as_vector, matrix_to_json, require_keys, vector_to_json


class CpReport(NamedTuple):
    min_eigenvalue: float
    is_cp: bool


class DisplacementAdjoint(NamedTuple):
    """N^dag(D_{Omega z}) = D_{Omega X^T z} exp(log_weight + i phase)."""
    vector: np.ndarray
    log_weight: float
    phase: float


def _frozen(arr):
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    X: np.ndarray
    Y: np.ndarray
    delta: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        delta = np.asarray(self.delta, dtype=float)
        if X.ndim != 2 or X.shape[0] % 2 or X.shape[1] % 2 or 0 in X.shape:
            raise StructuralError(f"X must be 2n_out x 2n_in, got shape {X.shape}")
        dim_out = X.shape[0]
        if Y.shape != (dim_out, dim_out):
            raise StructuralError(f"Y must be {dim_out}x{dim_out}, got shape {Y.shape}")
        if delta.shape != (dim_out,):
            raise StructuralError(f"delta must have length {dim_out}, got shape {delta.shape}")
        object.__setattr__(self, 'X', _frozen(X))
        object.__setattr__(self, 'Y', _frozen(Y))
        object.__setattr__(self, 'delta', _frozen(delta))
        if self.validate:
            scale = max(1.0, float(np.max(np.abs(Y))))
            if np.max(np.abs(Y - Y.T)) > config.SYMMETRY_TOL * scale:
                raise DomainError("noise matrix Y is not symmetric")
            report = check_cp(self)
            if not report.is_cp:
                raise NotCompletelyPositiveError(
                    f"channel violates Y + i Omega >= i X Omega X^T (min eigenvalue {report.min_eigenvalue:.3e})",
                    min_eigenvalue=report.min_eigenvalue)

    @property
    def n_in(self):
        return self.X.shape[1] // 2

    @property
    def n_out(self):
        return self.X.shape[0] // 2

    @classmethod
    def from_json(cls, obj):
        require_keys(obj, ("X", "Y", "delta"), "GaussianChannel")
        X = as_matrix(obj["X"], "GaussianChannel.X")
        Y = as_matrix(obj["Y"], "GaussianChannel.Y")
        delta = as_vector(obj["delta"], "GaussianChannel.delta")
        return cls(X, Y, delta)

    def to_json(self):
        return {"X": matrix_to_json(self.X), "Y": matrix_to_json(self.Y), "delta": vector_to_json(self.delta)}


def check_cp(channel, tol=config.CP_TOL):
    """Min Hermitian eigenvalue of Y + i Omega_out - i X Omega_in X^T."""
    omega_in = symplectic_form(channel.n_in)
    omega_out = symplectic_form(channel.n_out)
    X, Y = channel.X, channel.Y
    herm = 0.5 * (Y + Y.T) + 1j * omega_out - 1j * X @ omega_in @ X.T
    min_eig = float(linalg.eigvalsh(herm)[0])
    return CpReport(min_eig, bool(min_eig >= -tol))


def apply(channel, state):
    if state.n_modes != channel.n_in:
        raise StructuralError(f"channel expects {channel.n_in} input modes, state has {state.n_modes}")
    X = channel.X
    cov = X @ state.cov @ X.T + channel.Y
    return GaussianState(X @ state.mean + channel.delta, 0.5 * (cov + cov.T))


def adjoint_transform(channel, cov, mean):
    """
    Heisenberg-picture action on moments: V -> X^-1 (V + Y) X^-T, s -> X^-1 (s - delta).
    Only defined for square, invertible X.
    """
    X = channel.X
    if channel.n_in != channel.n_out:
        raise DomainError(
            f"adjoint covariance rule needs square X (invertible transformation), got {X.shape}")
    cov = np.asarray(cov, dtype=float)
    mean = np.asarray(mean, dtype=float)
    if cov.shape != (X.shape[0], X.shape[0]) or mean.shape != (X.shape[0],):
        raise StructuralError(f"moments do not match channel output dimension {X.shape[0]}")
    try:
        lu = linalg.lu_factor(X, check_finite=True)
    except (linalg.LinAlgError, ValueError) as e:
        raise DomainError("adjoint covariance rule needs invertible X") from e
    if np.min(np.abs(np.diag(lu[0]))) <= np.finfo(float).eps * max(1.0, float(np.max(np.abs(X)))) * X.shape[0]:
        raise DomainError("adjoint covariance rule needs invertible X; X is singular")
    left = linalg.lu_solve(lu, cov + channel.Y)
    new_cov = linalg.lu_solve(lu, left.T).T
    new_mean = linalg.lu_solve(lu, mean - channel.delta)
    return 0.5 * (new_cov + new_cov.T), new_mean


def adjoint_on_displacement(channel, z):
    z = as_vector(z, "z", 2 * channel.n_out)
    return DisplacementAdjoint(channel.X.T @ z, float(-0.25 * z @ channel.Y @ z), float(z @ channel.delta))


def compose(after, before):
    """after o before. The result is CP whenever both factors are, so it is not re-validated."""
    if after.n_in != before.n_out:
        raise StructuralError(
            f"cannot compose: outer channel takes {after.n_in} modes, inner produces {before.n_out}")
    Xa = after.X
    Y = Xa @ before.Y @ Xa.T + after.Y
    return GaussianChannel(Xa @ before.X, 0.5 * (Y + Y.T), Xa @ before.delta + after.delta, validate=False)


def identity_channel(n_modes=1):
    dim = 2 * n_modes
    return GaussianChannel(np.eye(dim), np.zeros((dim, dim)), np.zeros(dim))


def loss(eta, n_modes=1):
    """Pure loss with transmissivity eta in [0, 1]."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"loss transmissivity must lie in [0, 1], got {eta}")
    dim = 2 * n_modes
    return GaussianChannel(np.sqrt(eta) * np.eye(dim), (1.0 - eta) * np.eye(dim), np.zeros(dim))


def thermal_loss(eta, nbar, n_modes=1):
    if not 0.0 <= eta <= 1.0 or nbar < 0.0:
        raise DomainError(f"thermal loss needs eta in [0, 1] and nbar >= 0, got eta={eta}, nbar={nbar}")
    dim = 2 * n_modes
    return GaussianChannel(np.sqrt(eta) * np.eye(dim), (1.0 - eta) * (2.0 * nbar + 1.0) * np.eye(dim),
                           np.zeros(dim))


def amplifier(gain, n_modes=1):
    """Quantum-limited phase-insensitive amplifier, gain >= 1."""
    if gain < 1.0:
        raise DomainError(f"amplifier gain must be >= 1, got {gain}")
    dim = 2 * n_modes
    return GaussianChannel(np.sqrt(gain) * np.eye(dim), (gain - 1.0) * np.eye(dim), np.zeros(dim))


def classical_noise(y, n_modes=1):
    """Additive Gaussian noise; y is a scalar (y * I) or a full PSD matrix."""
    dim = 2 * n_modes
    Y = y * np.eye(dim) if np.ndim(y) == 0 else np.asarray(y, dtype=float)
    if Y.shape != (dim, dim):
        raise StructuralError(f"noise matrix must be {dim}x{dim}, got shape {Y.shape}")
    return GaussianChannel(np.eye(dim), Y, np.zeros(dim))


def displacement(delta):
    delta = as_vector(delta, "delta")
    dim = delta.shape[0]
    return GaussianChannel(np.eye(dim), np.zeros((dim, dim)), delta)


def phase_rotation(theta, n_modes=1):
    """Rotation cos(theta) I + sin(theta) Omega in every mode plane."""
    dim = 2 * n_modes
    X = np.cos(theta) * np.eye(dim) + np.sin(theta) * symplectic_form(n_modes)
    return GaussianChannel(X, np.zeros((dim, dim)), np.zeros(dim))
