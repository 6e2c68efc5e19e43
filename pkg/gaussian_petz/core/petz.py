# gaussian_petz/core/petz.py
"""
Gaussian Petz recovery channel and its rotated versions.

For sigma with moments (s, V_s) and a channel N = (X, Y, delta) with N(sigma)
faithful, the Petz map is the Gaussian channel

    X_P = sqrt(I + (V_s Om)^-2) V_s X^T [sqrt(I + (Om V_N)^-2)]^-1 V_N^-1
    Y_P = V_s - X_P V_N X_P^T
    d_P = s - X_P (X s + delta)

where V_N is the covariance of N(sigma). The rotated map P^t conjugates with
the modular flows S_{sigma,t} = exp(Om H_sigma t) and S_{N(sigma),-t}.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from gaussian_petz.core.channels import (
    GaussianChannel,
    adjoint_on_displacement,
    apply,
    check_cp,
    compose,
    displacement,
)
from gaussian_petz.core.symplectic_core import (
    GaussianState,
    hamiltonian_flow,
    inverse_sqrt_filter_transpose,
    is_symplectic,
    require_valid_state,
    sandwich_char,
    sqrt_filter,
    symplectic_form,
    symplectic_inverse,
    williamson,
)
from gaussian_petz.utils import config
from gaussian_petz.utils.errors import DomainError, NonFaithfulError, StructuralError
from gaussian_petz.utils.io import as_vector


@dataclass(frozen=True, eq=False)
class PetzConstruction:
    channel: GaussianChannel
    cp_min_eigenvalue: float
    sigma_out: GaussianState
    sigma: GaussianState
    source: GaussianChannel
    t: float = 0.0

    @property
    def X_P(self):
        return self.channel.X

    @property
    def Y_P(self):
        return self.channel.Y

    @property
    def delta_P(self):
        return self.channel.delta

    def reversal_defect(self):
        """(cov defect, mean defect) of P(N(sigma)) against sigma, in the max norm."""
        back = apply(self.channel, self.sigma_out)
        return (float(np.max(np.abs(back.cov - self.sigma.cov))),
                float(np.max(np.abs(back.mean - self.sigma.mean))))


@dataclass(frozen=True, eq=False)
class SymplecticFlow:
    matrix: np.ndarray
    t: float

    def is_symplectic(self, tol=1e-12):
        return is_symplectic(self.matrix, tol)


class PetzIdentity(NamedTuple):
    lhs: complex
    rhs: complex


def _output_state(sigma, n):
    if sigma.n_modes != n.n_in:
        raise StructuralError(f"channel expects {n.n_in} input modes, sigma has {sigma.n_modes}")
    return apply(n, sigma)


def _output_decomposition(sigma_out):
    try:
        return williamson(sigma_out.cov)
    except DomainError as e:
        raise NonFaithfulError(
            "Petz construction requires N(sigma) to be faithful; its covariance is not even positive definite",
            term="N(sigma)") from e


def _inverse_covariance(decomposition):
    s_inv = symplectic_inverse(decomposition.S)
    return (s_inv.T / decomposition.diagonal()) @ s_inv


def _finish(X_P, sigma, sigma_out, n, t=0.0, Y_P=None, certify=True):
    if Y_P is None:
        Y_P = sigma.cov - X_P @ sigma_out.cov @ X_P.T
    Y_P = 0.5 * (Y_P + Y_P.T)
    delta_P = sigma.mean - X_P @ sigma_out.mean
    channel = GaussianChannel(X_P, Y_P, delta_P, validate=False)
    cp_min = check_cp(channel).min_eigenvalue if certify else None
    return PetzConstruction(channel, cp_min, sigma_out, sigma, n, t)


def petz_channel(sigma, n, tol=config.FAITHFUL_TOL, certify=True, validate=True,
                 sigma_decomposition=None, output_decomposition=None):
    """
    Build the Petz recovery channel of (sigma, N).
    Args:
        sigma (GaussianState): reference state; may be pure in some directions.
        n (GaussianChannel): forward channel, any (possibly non-square) X.
        certify (bool): compute cp_min_eigenvalue (None otherwise).
        validate (bool): check that sigma is a physical state first.
        sigma_decomposition, output_decomposition: Williamson forms of sigma and
            N(sigma) when the caller already has them.
    Returns:
        PetzConstruction
    Raises:
        DomainError: sigma is not a valid Gaussian state.
        NonFaithfulError: N(sigma) has a symplectic eigenvalue <= 1 + tol.
        StructuralError: dimensions do not chain.
    """
    if validate:
        require_valid_state(sigma, "sigma")
    sigma_out = _output_state(sigma, n)
    w_out = output_decomposition or _output_decomposition(sigma_out)
    inv_filter_t = inverse_sqrt_filter_transpose(sigma_out.cov, tol=tol, decomposition=w_out, term="N(sigma)")
    F_sigma = sqrt_filter(sigma.cov, sigma_decomposition)
    X_P = F_sigma @ sigma.cov @ n.X.T @ inv_filter_t @ _inverse_covariance(w_out)
    return _finish(X_P, sigma, sigma_out, n, certify=certify)


def _require_faithful_sigma(decomposition):
    if decomposition.nu[-1] <= 1.0 + config.FAITHFUL_TOL:
        raise NonFaithfulError("modular flow needs a faithful state", term="sigma",
                               min_symplectic_eigenvalue=float(decomposition.nu[-1]))


def symplectic_flow(sigma, t):
    """S_{sigma,t} = exp(Omega H_sigma t); needs sigma faithful. Exactly the identity at t = 0."""
    if t == 0:
        _require_faithful_sigma(williamson(sigma.cov))
        return SymplecticFlow(np.eye(2 * sigma.n_modes), 0.0)
    try:
        return SymplecticFlow(hamiltonian_flow(sigma.cov, t), float(t))
    except NonFaithfulError as e:
        e.term = "sigma"
        raise


def _rotate(base, flow_sigma, flow_out, t):
    X_t = flow_sigma @ base.X_P @ flow_out
    Y_t = flow_sigma @ base.Y_P @ flow_sigma.T
    return _finish(X_t, base.sigma, base.sigma_out, base.source, t=float(t), Y_P=Y_t)


def rotated_petz(sigma, n, t, tol=config.FAITHFUL_TOL):
    """
    Rotated Petz channel P^t: X_P^t = S_{sigma,t} X_P S_{N(sigma),-t},
    Y_P^t = S_{sigma,t} Y_P S_{sigma,t}^T, d_P^t = s - X_P^t (X s + delta).
    sigma must be faithful for every t, t = 0 included; there the plain
    construction is returned unchanged.
    """
    base = petz_channel(sigma, n, tol=tol)
    flow_sigma = symplectic_flow(sigma, t).matrix
    if t == 0:
        return base
    flow_out = symplectic_flow(base.sigma_out, -t).matrix
    return _rotate(base, flow_sigma, flow_out, t)


def rotated_petz_family(sigma, n, ts, tol=config.FAITHFUL_TOL):
    """Rotated constructions for many t sharing one Williamson decomposition per state."""
    base = petz_channel(sigma, n, tol=tol)
    w_sigma = williamson(sigma.cov)
    w_out = williamson(base.sigma_out.cov)
    _require_faithful_sigma(w_sigma)
    out = []
    for t in ts:
        if t == 0:
            out.append(base)
            continue
        flow_sigma = hamiltonian_flow(sigma.cov, t, decomposition=w_sigma)
        flow_out = hamiltonian_flow(base.sigma_out.cov, -t, decomposition=w_out)
        out.append(_rotate(base, flow_sigma, flow_out, t))
    return out


def cp_certificate(construction):
    return check_cp(construction.channel)


def verify_petz_identity(sigma, n, w1, w2, construction=None):
    """
    Both sides of Tr[sigma^1/2 D_{-w2} sigma^1/2 N^dag(D_{w1})]
               = Tr[P^dag(D_{-w2}) N(sigma)^1/2 D_{w1} N(sigma)^1/2].

    lhs is the closed form that never touches X_P; rhs goes through the
    recovery channel (construction, defaulting to petz_channel(sigma, n)).
    Both carry the common mean phase exp(-i (X s + delta)^T Om w1 + i s^T Om w2).
    """
    construction = construction or petz_channel(sigma, n)
    w1 = as_vector(w1, "w1", 2 * n.n_out)
    w2 = as_vector(w2, "w2", 2 * n.n_in)
    om_in = symplectic_form(n.n_in)
    om_out = symplectic_form(n.n_out)
    V_s = sigma.cov
    V_N = construction.sigma_out.cov

    a = om_out.T @ w1
    b = om_in @ w2
    F_sigma = sqrt_filter(V_s)
    lhs_exponent = -0.25 * a @ V_N @ a - 0.25 * b @ V_s @ b - 0.5 * a @ n.X @ F_sigma @ V_s @ b

    c = om_in.T @ w2
    y = om_out @ construction.X_P.T @ c
    rhs = sandwich_char(V_N, w1, y) * np.exp(-0.25 * c @ construction.Y_P @ c)

    phase = np.exp(-1j * construction.sigma_out.mean @ om_out @ w1 + 1j * sigma.mean @ om_in @ w2)
    return PetzIdentity(complex(np.exp(lhs_exponent) * phase), complex(rhs * phase))


def zero_mean_petz(sigma, n):
    """Petz construction for sigma and N with first moments and displacement removed."""
    sigma0 = sigma.with_mean(np.zeros_like(sigma.mean))
    n0 = GaussianChannel(n.X, n.Y, np.zeros_like(n.delta), validate=False)
    return petz_channel(sigma0, n0)


def petz_from_zero_mean(sigma, n):
    """Rebuild the full recovery map as D(s_sigma) o P_0 o D(-(X s_sigma + delta))."""
    p0 = zero_mean_petz(sigma, n)
    shift_in = displacement(-(n.X @ sigma.mean + n.delta))
    return compose(displacement(sigma.mean), compose(p0.channel, shift_in))


def modular_channel(state, t):
    """Gaussian unitary omega -> state^{it} omega state^{-it}."""
    flow = symplectic_flow(state, t).matrix
    dim = 2 * state.n_modes
    return GaussianChannel(flow, np.zeros((dim, dim)), state.mean - flow @ state.mean, validate=False)


def rotated_petz_by_definition(sigma, n, t):
    """sigma^{it} P(N(sigma)^{-it} . N(sigma)^{it}) sigma^{-it}, assembled by composing channels."""
    base = petz_channel(sigma, n)
    inner = modular_channel(base.sigma_out, -t)
    outer = modular_channel(sigma, t)
    return compose(outer, compose(base.channel, inner))


def petz_adjoint_on_displacement(construction, z):
    return adjoint_on_displacement(construction.channel, z)
