# gaussian_petz/core/info_measures.py
"""
Entropy, relative entropy and fidelity of Gaussian states (natural logs),
the recovery deficit D(rho||sigma) - D(N rho||N sigma) - D(rho||P N rho), and
the fidelity-of-recovery lower bound averaged over rotated Petz maps with
weight p(t) = (pi/2) / (cosh(pi t) + 1).
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from gaussian_petz.core.channels import apply
from gaussian_petz.core.petz import petz_channel, rotated_petz_family
from gaussian_petz.core.symplectic_core import (
    hamiltonian_from_covariance,
    require_valid_state,
    symplectic_eigenvalues,
    symplectic_form,
    williamson,
)
from gaussian_petz.utils import config
from gaussian_petz.utils.errors import ConfigurationError, DomainError, NonFaithfulError, StructuralError


@dataclass(frozen=True)
class QuadratureConfig:
    half_range: float = config.DEFAULT_QUAD_RANGE
    points: int = config.DEFAULT_QUAD_POINTS

    def validate(self, tail_limit=config.QUAD_TAIL_LIMIT):
        if self.points < 2:
            raise ConfigurationError(f"quadrature needs at least 2 points, got {self.points}")
        if self.half_range <= 0:
            raise ConfigurationError(f"quadrature half range must be positive, got {self.half_range}")
        tail = tail_mass(self.half_range)
        if tail > tail_limit:
            raise ConfigurationError(
                f"p(t) mass outside [-{self.half_range:g}, {self.half_range:g}] is {tail:.3e} > {tail_limit:g}")
        return self


@dataclass(frozen=True)
class DeficitReport:
    d_in: float
    d_out: float
    d_recovery: float
    deficit: float
    instance: dict = None

    def to_json(self):
        out = {"d_in": self.d_in, "d_out": self.d_out, "d_recovery": self.d_recovery, "deficit": self.deficit}
        if self.instance is not None:
            out["instance"] = self.instance
        return out


class BoundReport(NamedTuple):
    lhs: float
    rhs: float
    slack: float


def p_density(t):
    return 0.5 * np.pi / (np.cosh(np.pi * np.asarray(t, dtype=float)) + 1.0)


def tail_mass(half_range):
    """Mass of p(t) outside [-R, R]; the antiderivative of p is tanh(pi t / 2) / 2."""
    return float(1.0 - np.tanh(0.5 * np.pi * half_range))


def quadrature_nodes(quad):
    """Composite trapezoid nodes and weights on [-R, R] (weights exclude p)."""
    quad.validate()
    nodes = np.linspace(-quad.half_range, quad.half_range, quad.points)
    step = nodes[1] - nodes[0]
    weights = np.full(quad.points, step)
    weights[0] = weights[-1] = 0.5 * step
    return nodes, weights


def _entropy_terms(nu):
    nu = np.asarray(nu, dtype=float)
    if np.any(nu < 1.0 - config.UNCERTAINTY_TOL):
        raise DomainError(f"symplectic eigenvalue {float(np.min(nu)):.12g} < 1: not a physical state")
    # round-off below 1 only
    nu = np.maximum(nu, 1.0)
    plus = 0.5 * (nu + 1.0)
    minus = 0.5 * (nu - 1.0)
    with np.errstate(divide='ignore', invalid='ignore'):
        minus_term = np.where(minus > 0.0, minus * np.log(np.where(minus > 0.0, minus, 1.0)), 0.0)
    return plus * np.log(plus) - minus_term


def entropy(state):
    return float(np.sum(_entropy_terms(symplectic_eigenvalues(state.cov))))


def relative_entropy(rho, sigma, term="sigma", decomposition=None, rho_entropy=None):
    """
    D(rho||sigma) = -S(rho) + 1/4 Tr[H V_rho] + 1/2 d^T H d + log Z, d = s_rho - s_sigma.
    decomposition (Williamson of sigma) and rho_entropy may be passed in when already known.
    Raises:
        NonFaithfulError: sigma is not faithful (the divergence is infinite there).
    """
    if rho.n_modes != sigma.n_modes:
        raise StructuralError(f"mode mismatch: {rho.n_modes} vs {sigma.n_modes}")
    try:
        ham = hamiltonian_from_covariance(sigma, decomposition=decomposition)
    except NonFaithfulError as e:
        raise NonFaithfulError(f"relative entropy needs a faithful second argument: {e}", term=term,
                               min_symplectic_eigenvalue=e.min_symplectic_eigenvalue) from e
    s_rho = entropy(rho) if rho_entropy is None else rho_entropy
    d = rho.mean - sigma.mean
    return float(-s_rho + 0.25 * np.trace(ham.H @ rho.cov) + 0.5 * d @ ham.H @ d + ham.log_Z)


def fidelity(rho, sigma):
    """
    Squared Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1^2 of two Gaussian states,
    from the general n-mode closed form on half-normalized covariances.
    """
    if rho.n_modes != sigma.n_modes:
        raise StructuralError(f"mode mismatch: {rho.n_modes} vs {sigma.n_modes}")
    n = rho.n_modes
    omega = symplectic_form(n)
    eye = np.eye(2 * n)
    cov1 = 0.5 * rho.cov
    cov2 = 0.5 * sigma.cov
    si12 = linalg.inv(cov1 + cov2)
    vaux = omega.T @ si12 @ (0.25 * omega + cov2 @ omega @ cov1)
    p1 = vaux @ omega
    p1 = p1 @ p1
    p1 = eye + 0.25 * linalg.inv(p1)
    if np.allclose(p1, 0.0, rtol=1e-10, atol=1e-10):
        p1 = np.zeros_like(p1)
    else:
        p1 = linalg.sqrtm(p1)
    p1 = 2.0 * (p1 + eye) @ vaux
    d = rho.mean - sigma.mean
    value = np.sqrt(linalg.det(si12) * linalg.det(p1) + 0j) * np.exp(-d @ linalg.solve(rho.cov + sigma.cov, d))
    return float(np.clip(np.real(value), 0.0, 1.0))


def _decompose(state, term):
    try:
        return williamson(state.cov)
    except DomainError as e:
        raise NonFaithfulError(f"{term} has a covariance that is not positive definite", term=term) from e


def recovery_deficit(rho, sigma, n, with_instance=False, validate=True):
    """
    Deficit of the strengthened data-processing inequality with the Petz map.
    Each Williamson decomposition and the entropy of rho are computed once.
    validate=False skips the state checks for inputs that are valid by construction.
    Raises:
        DomainError: rho or sigma is not a valid Gaussian state.
        NonFaithfulError: term is "sigma", "N(sigma)" or "recovery" for the failing divergence.
    """
    if validate:
        require_valid_state(rho, "rho")
        require_valid_state(sigma, "sigma")
    s_rho = entropy(rho)
    w_sigma = _decompose(sigma, "sigma")
    d_in = relative_entropy(rho, sigma, term="sigma", decomposition=w_sigma, rho_entropy=s_rho)
    out_rho = apply(n, rho)
    out_sigma = apply(n, sigma)
    w_out = _decompose(out_sigma, "N(sigma)")
    d_out = relative_entropy(out_rho, out_sigma, term="N(sigma)", decomposition=w_out)
    construction = petz_channel(sigma, n, certify=False, validate=False,
                                sigma_decomposition=w_sigma, output_decomposition=w_out)
    recovered = apply(construction.channel, out_rho)
    d_rec = relative_entropy(rho, recovered, term="recovery", rho_entropy=s_rho)
    instance = None
    if with_instance:
        instance = {"rho": rho.to_json(), "sigma": sigma.to_json(), "channel": n.to_json()}
    return DeficitReport(d_in, d_out, d_rec, d_in - d_out - d_rec, instance)


def fidelity_recovery_bound(rho, sigma, n, quad=None):
    """
    lhs = D(rho||sigma), rhs = D(N rho||N sigma) - sum_k w_k p(t_k) ln F(rho, P^{t_k/2}(N rho)).
    slack = lhs - rhs is non-negative up to quadrature error.
    Raises:
        DomainError: rho or sigma is not a valid Gaussian state.
    """
    require_valid_state(rho, "rho")
    require_valid_state(sigma, "sigma")
    quad = quad or QuadratureConfig()
    nodes, weights = quadrature_nodes(quad)
    lhs = relative_entropy(rho, sigma, term="sigma")
    out_rho = apply(n, rho)
    d_out = relative_entropy(out_rho, apply(n, sigma), term="N(sigma)")
    family = rotated_petz_family(sigma, n, 0.5 * nodes)
    penalty = 0.0
    for weight, t, construction in zip(weights, nodes, family):
        fid = max(fidelity(rho, apply(construction.channel, out_rho)), np.finfo(float).tiny)
        penalty += weight * float(p_density(t)) * np.log(fid)
    rhs = d_out - penalty
    return BoundReport(float(lhs), float(rhs), float(lhs - rhs))
