# gaussian_petz/core/fock_oracle.py
"""
Dense truncated-Fock brute force used to cross-check the Gaussian closed forms.

Operators that are functions of the quadratures (densities, displacements,
quadratic unitaries) are built in a padded space of cutoff + pad levels per
mode and then truncated back, so truncation artefacts of the ladder
operators stay outside the retained block. Scope is one mode (cutoff <= 60)
or two modes (cutoff <= 12 per mode).
"""
import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import linalg, special

from gaussian_petz.core.symplectic_core import GaussianState, hamiltonian_from_covariance, symplectic_form
from gaussian_petz.utils import config
from gaussian_petz.utils.errors import (
    ConfigurationError,
    DomainError,
    InvalidOperatorError,
    OraclePrecisionError,
    StructuralError,
)
from gaussian_petz.utils.logging_utils import log_manager


@dataclass(eq=False)
class FockOperator:
    matrix: np.ndarray
    n_modes: int
    cutoff: int
    metadata: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def trace(self):
        return complex(np.trace(self.matrix))

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def normalized(self):
        tr = np.real(self.trace())
        meta = dict(self.metadata, raw_trace=float(tr))
        return FockOperator(self.matrix / tr, self.n_modes, self.cutoff, meta)


@dataclass(eq=False)
class KrausChannel:
    """Kraus sets applied one after another (first stage first)."""
    stages: list
    cutoff: int
    n_modes: int = 1

    def kraus_count(self):
        return sum(len(stage) for stage in self.stages)


class DenseMeasures(NamedTuple):
    fidelity: float
    rel_entropy: float
    entropy_rho: float
    ill_conditioned: bool


def _check_scope(n_modes, cutoff):
    if isinstance(cutoff, bool) or int(cutoff) != cutoff or cutoff < 2:
        raise ConfigurationError(f"cutoff must be an integer >= 2, got {cutoff!r}")
    if n_modes not in (1, 2):
        raise ConfigurationError(f"dense oracle supports 1 or 2 modes, got {n_modes}")
    limit = config.MAX_ORACLE_CUTOFF if n_modes == 1 else config.MAX_ORACLE_CUTOFF_TWO_MODE
    if cutoff > limit:
        raise ConfigurationError(f"cutoff {cutoff} exceeds the {n_modes}-mode oracle limit {limit}")
    return int(cutoff)


def _padded(cutoff, pad):
    return cutoff + (cutoff if pad is None else int(pad))


def annihilation(cutoff):
    if cutoff < 2:
        raise ConfigurationError(f"cutoff must be >= 2, got {cutoff}")
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(complex)


def _embed_mode(op, j, n_modes, levels):
    eye = np.eye(levels, dtype=complex)
    factors = [op if k == j else eye for k in range(n_modes)]
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def _quadrature_arrays(n_modes, levels):
    """[x_1..x_n, p_1..p_n] as dense arrays with `levels` levels per mode."""
    a = annihilation(levels)
    x = (a + a.conj().T) / np.sqrt(2.0)
    p = -1j * (a - a.conj().T) / np.sqrt(2.0)
    xs = [_embed_mode(x, j, n_modes, levels) for j in range(n_modes)]
    ps = [_embed_mode(p, j, n_modes, levels) for j in range(n_modes)]
    return xs + ps


def quadratures(n_modes, cutoff):
    """Truncated x_j and p_j; [x, p] = i away from the top level."""
    cutoff = _check_scope(n_modes, cutoff)
    ops = [FockOperator(m, n_modes, cutoff) for m in _quadrature_arrays(n_modes, cutoff)]
    return ops[:n_modes], ops[n_modes:]


def _kept_indices(n_modes, levels, cutoff):
    grid = np.indices((cutoff,) * n_modes).reshape(n_modes, -1)
    return np.ravel_multi_index(grid, (levels,) * n_modes)


def _truncate(matrix, n_modes, levels, cutoff):
    idx = _kept_indices(n_modes, levels, cutoff)
    return matrix[np.ix_(idx, idx)]


def _hermitian(matrix):
    return 0.5 * (matrix + matrix.conj().T)


def _hermitian_function(matrix, func):
    evals, evecs = linalg.eigh(_hermitian(matrix))
    return (evecs * func(evals)) @ evecs.conj().T


def _linear_generator(coeffs, ops):
    out = np.zeros_like(ops[0])
    for c, op in zip(coeffs, ops):
        out = out + c * op
    return out


def gaussian_density(state, cutoff, pad=None):
    """
    Normalized exp(-1/2 (r-s)^T H (r-s)) on the lowest `cutoff` levels per mode.
    metadata['tail'] is the population of the padded density outside the kept block.
    Raises:
        NonFaithfulError: state is not faithful.
    """
    n = state.n_modes
    cutoff = _check_scope(n, cutoff)
    H = hamiltonian_from_covariance(state).H
    levels = _padded(cutoff, pad)
    eye = np.eye(levels ** n, dtype=complex)
    shifted = [r - s * eye for r, s in zip(_quadrature_arrays(n, levels), state.mean)]
    gen = np.zeros_like(eye)
    for j in range(2 * n):
        for k in range(2 * n):
            if H[j, k] != 0.0:
                gen = gen + 0.5 * H[j, k] * (shifted[j] @ shifted[k])
    evals, evecs = linalg.eigh(_hermitian(gen))
    weights = np.exp(-(evals - evals[0]))
    padded = (evecs * weights) @ evecs.conj().T
    kept = _truncate(padded, n, levels, cutoff)
    total = float(np.real(np.trace(padded)))
    kept_trace = float(np.real(np.trace(kept)))
    tail = max(0.0, 1.0 - kept_trace / total)
    if tail > config.FOCK_TAIL_WARNING:
        log_manager(f"Fock truncation at cutoff {cutoff} drops population {tail:.3e}",
                    level="WARNING", prefix="[ORACLE] ")
    meta = {"tail": tail, "tail_warning": bool(tail > config.FOCK_TAIL_WARNING), "padded_levels": levels}
    return FockOperator(_hermitian(kept) / kept_trace, n, cutoff, meta)


def fock_projector(n_modes, cutoff, occupation=None):
    """|n><n| for an occupation tuple (default all zeros, the vacuum)."""
    cutoff = _check_scope(n_modes, cutoff)
    occupation = (0,) * n_modes if occupation is None else tuple(occupation)
    if len(occupation) != n_modes or any(o < 0 or o >= cutoff for o in occupation):
        raise StructuralError(f"occupation {occupation} outside the {n_modes}-mode cutoff {cutoff}")
    idx = np.ravel_multi_index(occupation, (cutoff,) * n_modes)
    mat = np.zeros((cutoff ** n_modes,) * 2, dtype=complex)
    mat[idx, idx] = 1.0
    return FockOperator(mat, n_modes, cutoff)


def displacement_op(z, cutoff, pad=None):
    """D_z = exp(i z^T Om r), truncated from the padded space."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.shape[0] % 2 or z.shape[0] == 0:
        raise StructuralError(f"z must be a vector of even length, got shape {z.shape}")
    n = z.shape[0] // 2
    cutoff = _check_scope(n, cutoff)
    levels = _padded(cutoff, pad)
    coeffs = symplectic_form(n).T @ z
    gen = _linear_generator(coeffs, _quadrature_arrays(n, levels))
    full = _hermitian_function(gen, lambda lam: np.exp(1j * lam))
    return FockOperator(_truncate(full, n, levels, cutoff), n, cutoff, {"z": z.tolist()})


def quadratic_unitary(h, cutoff, pad=None):
    """exp(i (1/2 r^T Om X r + s^T Om r + a/2)) for a real quadratic Hamiltonian triple."""
    if any(np.iscomplexobj(v) for v in (h.X, h.s, np.asarray(h.a))):
        raise DomainError("quadratic_unitary needs a real (Hermitian) generator")
    n = h.n_modes
    cutoff = _check_scope(n, cutoff)
    levels = _padded(cutoff, pad)
    omega = symplectic_form(n)
    A = omega @ h.X
    A = 0.5 * (A + A.T)
    ops = _quadrature_arrays(n, levels)
    gen = _linear_generator(omega.T @ h.s, ops) + 0.5 * float(h.a) * np.eye(levels ** n)
    for j in range(2 * n):
        for k in range(2 * n):
            if A[j, k] != 0.0:
                gen = gen + 0.5 * A[j, k] * (ops[j] @ ops[k])
    full = _hermitian_function(gen, lambda lam: np.exp(1j * lam))
    return FockOperator(_truncate(full, n, levels, cutoff), n, cutoff)


def _single_mode(cutoff):
    return _check_scope(1, cutoff)


def loss_kraus(eta, cutoff):
    """A_k = sum_n sqrt(C(n,k)) eta^{(n-k)/2} (1-eta)^{k/2} |n-k><n|."""
    cutoff = _single_mode(cutoff)
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"loss transmissivity must lie in (0, 1], got {eta}")
    if eta == 1.0:
        return [FockOperator(np.eye(cutoff, dtype=complex), 1, cutoff)]
    ops = []
    for k in range(cutoff):
        mat = np.zeros((cutoff, cutoff), dtype=complex)
        for n in range(k, cutoff):
            log_c = (special.gammaln(n + 1) - special.gammaln(k + 1) - special.gammaln(n - k + 1)
                     + (n - k) * np.log(eta) + k * np.log1p(-eta))
            mat[n - k, n] = np.exp(0.5 * log_c)
        ops.append(FockOperator(mat, 1, cutoff, {"k": k}))
    return ops


def amplifier_kraus(gain, cutoff):
    """B_k = sum_n sqrt(C(n+k,k)) G^{-(n+1)/2} (1-1/G)^{k/2} |n+k><n|."""
    cutoff = _single_mode(cutoff)
    if gain < 1.0:
        raise DomainError(f"amplifier gain must be >= 1, got {gain}")
    if gain == 1.0:
        return [FockOperator(np.eye(cutoff, dtype=complex), 1, cutoff)]
    ops = []
    for k in range(cutoff):
        mat = np.zeros((cutoff, cutoff), dtype=complex)
        for n in range(cutoff - k):
            log_c = (special.gammaln(n + k + 1) - special.gammaln(k + 1) - special.gammaln(n + 1)
                     - (n + 1) * np.log(gain) + k * np.log1p(-1.0 / gain))
            mat[n + k, n] = np.exp(0.5 * log_c)
        ops.append(FockOperator(mat, 1, cutoff, {"k": k}))
    return ops


def noise_kraus(y, cutoff, points=config.NOISE_QUADRATURE_POINTS, pad=None):
    """
    Classical noise V -> V + y I as a Gaussian mixture of displacements,
    discretized with a points x points Gauss-Hermite grid (second moments are exact).
    """
    cutoff = _single_mode(cutoff)
    if y < 0.0:
        raise DomainError(f"noise variance must be non-negative, got {y}")
    if y == 0.0:
        return [FockOperator(np.eye(cutoff, dtype=complex), 1, cutoff)]
    nodes, weights = special.roots_hermitenorm(points)
    scale = np.sqrt(0.5 * y)
    ops = []
    for (u1, w1), (u2, w2) in itertools.product(zip(nodes, weights), repeat=2):
        d = displacement_op(scale * np.array([u1, u2]), cutoff, pad)
        d.matrix *= np.sqrt(w1 * w2 / (2.0 * np.pi))
        ops.append(d)
    return ops


def displacement_kraus(delta, cutoff, pad=None):
    """Single Kraus operator shifting the mean by +delta."""
    return [displacement_op(-np.asarray(delta, dtype=float), cutoff, pad)]


def rotation_kraus(theta, cutoff):
    """exp(-i theta a^dag a), the Fock image of X = cos(theta) I + sin(theta) Om."""
    cutoff = _single_mode(cutoff)
    return [FockOperator(np.diag(np.exp(-1j * theta * np.arange(cutoff))), 1, cutoff)]


def channel_kraus(channel, cutoff, tol=1e-9, pad=None):
    """
    Staged Kraus realization of a one-mode phase-insensitive channel
    X = sqrt(tau) R(theta), Y = y I: rotation, loss or amplification,
    residual classical noise y - |1 - tau|, then displacement.
    """
    if channel.n_in != 1 or channel.n_out != 1:
        raise ConfigurationError("channel_kraus supports one-mode channels only")
    X, Y = channel.X, channel.Y
    if abs(X[0, 0] - X[1, 1]) > tol or abs(X[0, 1] + X[1, 0]) > tol:
        raise ConfigurationError("channel_kraus needs X proportional to a rotation")
    if abs(Y[0, 0] - Y[1, 1]) > tol or abs(Y[0, 1]) > tol:
        raise ConfigurationError("channel_kraus needs isotropic noise Y = y I")
    tau = float(linalg.det(X))
    if tau <= 0.0:
        raise DomainError(f"channel_kraus needs det X > 0, got {tau}")
    theta = float(np.arctan2(X[0, 1], X[0, 0]))
    residual = float(Y[0, 0]) - abs(1.0 - tau)
    if residual < -tol:
        raise DomainError(f"noise {Y[0, 0]} below the quantum limit |1 - tau| = {abs(1.0 - tau)}")

    stages = []
    if abs(theta) > tol:
        stages.append(rotation_kraus(theta, cutoff))
    if tau < 1.0 - tol:
        stages.append(loss_kraus(tau, cutoff))
    elif tau > 1.0 + tol:
        stages.append(amplifier_kraus(tau, cutoff))
    if residual > tol:
        stages.append(noise_kraus(residual, cutoff, pad=pad))
    if np.max(np.abs(channel.delta)) > 0.0:
        stages.append(displacement_kraus(channel.delta, cutoff, pad))
    if not stages:
        stages.append([FockOperator(np.eye(cutoff, dtype=complex), 1, cutoff)])
    return KrausChannel(stages, cutoff)


def _as_stages(kraus):
    if isinstance(kraus, KrausChannel):
        return kraus.stages
    return [list(kraus)]


def _matrix(op):
    return op.matrix if isinstance(op, FockOperator) else np.asarray(op)


def apply_kraus(kraus, rho):
    """sum_k K_k rho K_k^dag, stage by stage."""
    mat = rho.matrix
    for stage in _as_stages(kraus):
        out = np.zeros_like(mat)
        for op in stage:
            K = _matrix(op)
            out += K @ mat @ K.conj().T
        mat = out
    return FockOperator(mat, rho.n_modes, rho.cutoff, dict(rho.metadata))


def adjoint_kraus(kraus, op):
    """Heisenberg picture sum_k K_k^dag A K_k, stages in reverse order."""
    mat = op.matrix
    for stage in reversed(_as_stages(kraus)):
        out = np.zeros_like(mat)
        for k_op in stage:
            K = _matrix(k_op)
            out += K.conj().T @ mat @ K
        mat = out
    return FockOperator(mat, op.n_modes, op.cutoff, dict(op.metadata))


def sqrt_density(rho):
    """Principal square root of a PSD operator (negative rounding clipped)."""
    mat = _hermitian_function(rho.matrix, lambda lam: np.sqrt(np.clip(lam, 0.0, None)))
    return FockOperator(mat, rho.n_modes, rho.cutoff, dict(rho.metadata))


def petz_oracle(sigma, kraus, omega, cutoff, pad=None):
    """
    sigma^1/2 N^dag(N(sigma)^-1/2 omega N(sigma)^-1/2) sigma^1/2, densely.

    Eigenvalues of N(sigma) below DENSE_FLOOR are dropped (generalized inverse)
    and flagged in metadata; the output is normalized and the raw trace kept.
    Raises:
        OraclePrecisionError: omega puts more than DENSE_FLOOR_WEIGHT_TOL weight
            on the dropped subspace, so the truncated inverse is meaningless.
    """
    if sigma.n_modes != 1 or omega.n_modes != 1:
        raise ConfigurationError("petz_oracle supports one mode")
    sig = gaussian_density(sigma, cutoff, pad)
    om = gaussian_density(omega, cutoff, pad)
    n_sig = apply_kraus(kraus, sig)

    evals, evecs = linalg.eigh(_hermitian(n_sig.matrix))
    kept = evals >= config.DENSE_FLOOR
    inv_sqrt = np.where(kept, 1.0 / np.sqrt(np.where(kept, evals, 1.0)), 0.0)
    dropped_weight = float(np.real(np.sum(
        np.einsum('ij,jk,ki->i', evecs.conj().T, om.matrix, evecs)[~kept])))
    if dropped_weight > config.DENSE_FLOOR_WEIGHT_TOL:
        raise OraclePrecisionError(
            f"omega has weight {dropped_weight:.3e} where N(sigma) is below {config.DENSE_FLOOR:g}; "
            "raise the cutoff or shrink the instance")
    n_inv_sqrt = (evecs * inv_sqrt) @ evecs.conj().T
    inner = FockOperator(n_inv_sqrt @ om.matrix @ n_inv_sqrt, 1, sig.cutoff)
    pulled = adjoint_kraus(kraus, inner).matrix
    root = sqrt_density(sig).matrix
    out = _hermitian(root @ pulled @ root)
    raw_trace = float(np.real(np.trace(out)))
    meta = {
        "raw_trace": raw_trace,
        "ill_conditioned": bool(not np.all(kept)),
        "dropped_levels": int(np.sum(~kept)),
        "dropped_weight": dropped_weight,
        "min_eigenvalue": float(evals[0]),
        "tail": max(sig.metadata["tail"], om.metadata["tail"]),
    }
    return FockOperator(out / raw_trace, 1, sig.cutoff, meta)


def extract_moments(rho):
    """
    (mean, cov) of a dense state with the anticommutator convention:
    s_j = Tr[rho r_j], V_jk = 2 Re Tr[rho r_j r_k] - 2 s_j s_k.
    Returns a GaussianState holding the moments.
    """
    n = rho.n_modes
    mat = rho.matrix / np.real(np.trace(rho.matrix))
    ops = _quadrature_arrays(n, rho.cutoff)
    mean = np.array([np.real(np.trace(mat @ r)) for r in ops])
    cov = np.empty((2 * n, 2 * n))
    for j in range(2 * n):
        for k in range(2 * n):
            cov[j, k] = 2.0 * np.real(np.trace(mat @ ops[j] @ ops[k])) - 2.0 * mean[j] * mean[k]
    return GaussianState(mean, 0.5 * (cov + cov.T))


def dense_char(rho, w, pad=None):
    """Tr[rho D_{-w}]."""
    d = displacement_op(-np.asarray(w, dtype=float), rho.cutoff, pad)
    return complex(np.trace(rho.matrix @ d.matrix))


def dense_sandwich_char(sigma, x, y, pad=None):
    """Tr[D_{-y} sqrt(sigma) D_x sqrt(sigma)]."""
    root = sqrt_density(sigma).matrix
    d_x = displacement_op(np.asarray(x, dtype=float), sigma.cutoff, pad).matrix
    d_my = displacement_op(-np.asarray(y, dtype=float), sigma.cutoff, pad).matrix
    return complex(np.trace(d_my @ root @ d_x @ root))


def _spectrum(op, what):
    evals, evecs = linalg.eigh(_hermitian(op.matrix))
    if evals[0] < -config.DENSE_NEGATIVE_TOL:
        raise InvalidOperatorError(f"{what} has eigenvalue {evals[0]:.3e} < -{config.DENSE_NEGATIVE_TOL:g}")
    return np.clip(evals, 0.0, None), evecs


def dense_measures(rho, sigma):
    """
    Fidelity ||sqrt(rho) sqrt(sigma)||_1^2, D(rho||sigma) and S(rho) by spectral
    evaluation. Eigenvalues of sigma under DENSE_FLOOR are floored and flagged.
    Raises:
        InvalidOperatorError: an eigenvalue below -DENSE_NEGATIVE_TOL.
    """
    if rho.matrix.shape != sigma.matrix.shape:
        raise StructuralError(f"operator dimensions differ: {rho.matrix.shape} vs {sigma.matrix.shape}")
    p, u = _spectrum(rho, "rho")
    q, v = _spectrum(sigma, "sigma")
    root_rho = (u * np.sqrt(p)) @ u.conj().T
    root_sigma = (v * np.sqrt(q)) @ v.conj().T
    fid = float(np.sum(linalg.svdvals(root_rho @ root_sigma)) ** 2)

    positive = p > config.DENSE_FLOOR
    entropy_rho = float(-np.sum(p[positive] * np.log(p[positive])))
    ill = bool(np.any(q < config.DENSE_FLOOR))
    log_q = np.log(np.maximum(q, config.DENSE_FLOOR))
    rho_in_sigma_basis = np.real(np.einsum('ij,jk,ki->i', v.conj().T, rho.matrix, v))
    cross = float(np.sum(rho_in_sigma_basis * log_q))
    rel = -entropy_rho - cross
    return DenseMeasures(min(fid, 1.0), float(rel), entropy_rho, ill)
