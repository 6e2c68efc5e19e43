# gaussian_petz/core/symplectic_core.py
"""
Gaussian states and the symplectic calculus they need.

Conventions used throughout the package:
    * quadratures are ordered r = (x_1, ..., x_n, p_1, ..., p_n) with hbar = 1,
      so [r, r^T] = i * Omega with Omega = [[0, I], [-I, 0]];
    * the covariance matrix is the anticommutator V = <{r - s, (r - s)^T}>,
      which makes the vacuum V = I (no factor 1/2).

Functions of V*Omega are evaluated in the Williamson frame V = S (D + D) S^T,
where V*Omega = S (D~ Omega) S^-1 splits into 2x2 rotation generators with
frequency nu_j and can be handled one scalar at a time.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from gaussian_petz.utils import config
from gaussian_petz.utils.errors import DomainError, NonFaithfulError, StructuralError
from gaussian_petz.utils.io import as_matrix, as_vector, matrix_to_json, require_keys, vector_to_json
from gaussian_petz.utils.logging_utils import log_manager


def symplectic_form(n):
    """
    Omega for n modes in xxpp ordering.
    Args:
        n (int): number of modes, n >= 1.
    Returns:
        ndarray: the 2n x 2n matrix [[0, I], [-I, 0]].
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise StructuralError(f"number of modes must be a positive integer, got {n!r}")
    n = int(n)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _frozen(arr):
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def _check_even_square(matrix, what):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0 or matrix.shape[0] % 2:
        raise StructuralError(f"{what}: expected an even-dimensional square matrix, got shape {matrix.shape}")
    return matrix.shape[0] // 2


def _symmetrize(matrix):
    return 0.5 * (matrix + matrix.T)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """First and second moments of an n-mode Gaussian state. Arrays are read-only."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1 or mean.shape[0] == 0 or mean.shape[0] % 2:
            raise StructuralError(f"mean must be a vector of even length 2n, got shape {mean.shape}")
        dim = mean.shape[0]
        if cov.shape != (dim, dim):
            raise StructuralError(f"cov must be {dim}x{dim} to match the mean, got shape {cov.shape}")
        object.__setattr__(self, 'mean', _frozen(mean))
        object.__setattr__(self, 'cov', _frozen(cov))

    @property
    def n_modes(self):
        return self.mean.shape[0] // 2

    @classmethod
    def vacuum(cls, n_modes=1):
        return cls(np.zeros(2 * n_modes), np.eye(2 * n_modes))

    @classmethod
    def thermal(cls, nu, n_modes=1, mean=None):
        """Isotropic thermal state with symplectic eigenvalue nu = 2*nbar + 1."""
        mean = np.zeros(2 * n_modes) if mean is None else mean
        return cls(mean, nu * np.eye(2 * n_modes))

    @classmethod
    def coherent(cls, mean):
        mean = np.asarray(mean, dtype=float)
        return cls(mean, np.eye(mean.shape[0]))

    @classmethod
    def squeezed(cls, r, theta=0.0, nu=1.0, mean=None):
        """One-mode state nu * R(theta) diag(e^{2r}, e^{-2r}) R(theta)^T."""
        rot = np.cos(theta) * np.eye(2) + np.sin(theta) * symplectic_form(1)
        cov = nu * rot @ np.diag([np.exp(2 * r), np.exp(-2 * r)]) @ rot.T
        return cls(np.zeros(2) if mean is None else mean, _symmetrize(cov))

    def with_mean(self, mean):
        return GaussianState(mean, self.cov)

    @classmethod
    def from_json(cls, obj):
        require_keys(obj, ("mean", "cov"), "GaussianState")
        mean = as_vector(obj["mean"], "GaussianState.mean")
        cov = as_matrix(obj["cov"], "GaussianState.cov")
        state = cls(mean, cov)
        modes = obj.get("modes")
        if modes is not None and modes != state.n_modes:
            raise StructuralError(f"GaussianState: 'modes'={modes} but mean has length {mean.shape[0]}")
        require_valid_state(state, "GaussianState")
        return state

    def to_json(self):
        return {"modes": self.n_modes, "mean": vector_to_json(self.mean), "cov": matrix_to_json(self.cov)}


class ValidityReport(NamedTuple):
    symmetric_defect: float
    min_uncertainty_eigenvalue: float
    is_valid: bool
    is_faithful: bool


@dataclass(frozen=True, eq=False)
class WilliamsonDecomposition:
    """cov = S (diag(nu) + diag(nu)) S^T with S symplectic and nu sorted descending."""

    S: np.ndarray
    nu: np.ndarray

    @property
    def n_modes(self):
        return self.nu.shape[0]

    def diagonal(self):
        return np.concatenate([self.nu, self.nu])

    def reconstruct(self):
        return (self.S * self.diagonal()) @ self.S.T


@dataclass(frozen=True, eq=False)
class HamiltonianForm:
    """rho = exp(-1/2 (r-s)^T H (r-s)) / Z; log_Z is the log of the partition function."""

    H: np.ndarray
    log_Z: float


def validate_state(state, symmetry_tol=config.SYMMETRY_TOL, uncertainty_tol=config.UNCERTAINTY_TOL,
                   faithful_tol=config.FAITHFUL_TOL):
    """
    Check symmetry and the uncertainty relation V + i Omega >= 0.
    Args:
        state (GaussianState): state to check.
    Returns:
        ValidityReport: faithful means min eigenvalue of V + i Omega above faithful_tol.
    """
    if not isinstance(state, GaussianState):
        raise StructuralError(f"expected a GaussianState, got {type(state).__name__}")
    cov = state.cov
    defect = float(np.max(np.abs(cov - cov.T)))
    omega = symplectic_form(state.n_modes)
    min_eig = float(linalg.eigvalsh(_symmetrize(cov) + 1j * omega)[0])
    is_valid = defect <= symmetry_tol and min_eig >= -uncertainty_tol
    return ValidityReport(defect, min_eig, bool(is_valid), bool(is_valid and min_eig > faithful_tol))


def require_valid_state(state, what="state"):
    """
    Raise unless state is symmetric and satisfies V + i Omega >= 0.
    Raises:
        DomainError: the moments do not describe a physical state.
    """
    report = validate_state(state)
    if not report.is_valid:
        raise DomainError(
            f"{what} is not a valid Gaussian state: symmetry defect {report.symmetric_defect:.3e}, "
            f"min eigenvalue of V + i Omega {report.min_uncertainty_eigenvalue:.3e}")
    return report


def symplectic_inverse(S):
    n = _check_even_square(S, "symplectic matrix")
    omega = symplectic_form(n)
    return -omega @ S.T @ omega


def is_symplectic(matrix, tol=1e-10):
    n = _check_even_square(matrix, "matrix")
    omega = symplectic_form(n)
    return bool(np.max(np.abs(matrix @ omega @ matrix.T - omega)) <= tol)


def _williamson_one_mode(cov):
    # nu = sqrt(det V); A = V / nu has det 1, so its square root (A + I) / sqrt(tr A + 2) is symplectic
    det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
    if det <= 0.0 or cov[0, 0] <= 0.0:
        raise DomainError(f"covariance is not positive definite (det {det:.3e}, V_xx {cov[0, 0]:.3e})")
    nu = np.sqrt(det)
    a = cov / nu
    S = (a + np.eye(2)) / np.sqrt(a[0, 0] + a[1, 1] + 2.0)
    return WilliamsonDecomposition(_frozen(S), _frozen([nu]))


def williamson(cov):
    """
    Williamson decomposition of a positive-definite covariance matrix.

    The real Schur form of the skew-symmetric V^{1/2} Omega V^{1/2} is block
    diagonal with 2x2 blocks nu_j [[0, 1], [-1, 0]] once each block's sign is
    fixed; S = V^{1/2} O (D + D)^{-1/2} after reordering O to xxpp.

    Args:
        cov (ndarray): real symmetric positive-definite 2n x 2n matrix.
    Returns:
        WilliamsonDecomposition: S symplectic, nu descending.
    Raises:
        DomainError: cov is not positive definite.
    """
    cov = np.asarray(cov, dtype=float)
    n = _check_even_square(cov, "covariance")
    cov = _symmetrize(cov)
    if n == 1:
        return _williamson_one_mode(cov)
    evals, evecs = linalg.eigh(cov)
    if evals[0] <= 0.0:
        raise DomainError(f"covariance is not positive definite (min eigenvalue {evals[0]:.3e})")
    sqrt_cov = (evecs * np.sqrt(evals)) @ evecs.T
    skew = sqrt_cov @ symplectic_form(n) @ sqrt_cov
    skew = 0.5 * (skew - skew.T)
    block, orth = linalg.schur(skew, output='real')

    nu = np.empty(n)
    for k in range(n):
        i, j = 2 * k, 2 * k + 1
        if block[i, j] < 0.0:
            orth[:, [i, j]] = orth[:, [j, i]]
        nu[k] = 0.5 * abs(block[i, j] - block[j, i])

    # xpxp -> xxpp
    perm = np.concatenate([np.arange(0, 2 * n, 2), np.arange(1, 2 * n, 2)])
    orth = orth[:, perm]
    S = (sqrt_cov @ orth) / np.sqrt(np.concatenate([nu, nu]))

    order = np.argsort(-nu, kind='stable')
    S = S[:, np.concatenate([order, order + n])]
    return WilliamsonDecomposition(_frozen(S), _frozen(nu[order]))


def symplectic_eigenvalues(cov):
    """Descending symplectic eigenvalues from the spectrum of i Omega V (values come in +-nu pairs)."""
    cov = np.asarray(cov, dtype=float)
    n = _check_even_square(cov, "covariance")
    if n == 1:
        return np.array([np.sqrt(abs(cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]))])
    vals = np.sort(np.abs(linalg.eigvals(1j * symplectic_form(n) @ cov)))[::-1]
    return vals[::2].copy()


def _filter_values(nu, tol=config.UNCERTAINTY_TOL):
    if np.any(nu < 1.0 - tol):
        raise DomainError(f"symplectic eigenvalue {float(np.min(nu)):.12g} < 1 violates the uncertainty relation")
    clipped = np.maximum(nu, 1.0)
    return np.sqrt(1.0 - 1.0 / clipped ** 2)


def _require_faithful(decomposition, tol, term):
    nu_min = float(decomposition.nu[-1])
    if nu_min <= 1.0 + tol:
        raise NonFaithfulError(
            f"state is not faithful: min symplectic eigenvalue {nu_min:.12g} <= 1 + {tol:g}",
            term=term, min_symplectic_eigenvalue=nu_min)


def sqrt_filter(cov, decomposition=None):
    """
    sqrt(I + (V Omega)^-2), block by block: each mode scales by sqrt(1 - 1/nu_j^2).
    A block with nu_j = 1 (pure direction) becomes zero.
    Raises:
        DomainError: a symplectic eigenvalue is below 1.
    """
    w = decomposition or williamson(cov)
    f = _filter_values(w.nu)
    return (w.S * np.concatenate([f, f])) @ symplectic_inverse(w.S)


def inverse_sqrt_filter_transpose(cov, tol=config.FAITHFUL_TOL, decomposition=None, term="state"):
    """
    [sqrt(I + (Omega V)^-2)]^-1 = S^-T diag(1/f) S^T.
    Raises:
        NonFaithfulError: some nu_j <= 1 + tol, where the inverse does not exist.
    """
    w = decomposition or williamson(cov)
    _require_faithful(w, tol, term)
    f = _filter_values(w.nu)
    s_inv_t = symplectic_inverse(w.S).T
    return (s_inv_t / np.concatenate([f, f])) @ w.S.T


def sqrt_state_covariance(cov, decomposition=None):
    """Covariance of the normalized square root of a Gaussian state, (sqrt_filter(V) + I) V."""
    w = decomposition or williamson(cov)
    f = _filter_values(w.nu)
    scaled = np.concatenate([(1.0 + f) * w.nu, (1.0 + f) * w.nu])
    return _symmetrize((w.S * scaled) @ w.S.T)


def hamiltonian_from_covariance(state, tol=config.FAITHFUL_TOL, decomposition=None):
    """
    Invert V = coth(i Omega H / 2) i Omega.
    Args:
        state (GaussianState | ndarray): faithful state (or its covariance).
    Returns:
        HamiltonianForm: H = S^-T diag(h + h) S^-1 with h_j = 2 arcoth(nu_j), and
        log_Z = sum_j log(1 / (2 sinh(h_j / 2))).
    Raises:
        NonFaithfulError: some nu_j <= 1 + tol; H diverges there.
    """
    cov = state.cov if isinstance(state, GaussianState) else np.asarray(state, dtype=float)
    w = decomposition or williamson(cov)
    _require_faithful(w, tol, "state")
    nu = w.nu
    h = np.log1p(2.0 / (nu - 1.0))
    s_inv = symplectic_inverse(w.S)
    H = _symmetrize((s_inv.T * np.concatenate([h, h])) @ s_inv)
    log_Z = float(np.sum(0.5 * np.log((nu - 1.0) * (nu + 1.0)) - np.log(2.0)))
    return HamiltonianForm(_frozen(H), log_Z)


def covariance_from_hamiltonian(hamiltonian):
    """V = coth(i Omega H / 2) i Omega, via the Williamson form of H itself."""
    H = hamiltonian.H if isinstance(hamiltonian, HamiltonianForm) else np.asarray(hamiltonian, dtype=float)
    _check_even_square(H, "Hamiltonian matrix")
    if np.max(np.abs(H - H.T)) > config.SYMMETRY_TOL * max(1.0, float(np.max(np.abs(H)))):
        raise DomainError("Hamiltonian matrix is not symmetric")
    if linalg.eigvalsh(_symmetrize(H))[0] <= 0.0:
        raise DomainError("Hamiltonian matrix is not positive definite")
    w = williamson(H)
    coth = 1.0 / np.tanh(0.5 * w.nu)
    t_inv = symplectic_inverse(w.S)
    return _symmetrize((t_inv.T * np.concatenate([coth, coth])) @ t_inv)


def hamiltonian_flow(cov, t, decomposition=None, tol=config.FAITHFUL_TOL):
    """
    exp(Omega H t) for the Hamiltonian of a faithful covariance.

    In the Williamson frame Omega H becomes per-mode [[0, h], [-h, 0]], so the
    flow is S [[cos(ht), sin(ht)], [-sin(ht), cos(ht)]] S^-1.
    """
    w = decomposition or williamson(cov)
    _require_faithful(w, tol, "state")
    h = np.log1p(2.0 / (w.nu - 1.0))
    c = np.diag(np.cos(h * t))
    s = np.diag(np.sin(h * t))
    rot = np.block([[c, s], [-s, c]])
    return w.S @ rot @ symplectic_inverse(w.S)


def modular_conjugate(sigma, state, t):
    """Moments of sigma^{it} state sigma^{-it}: V -> S V S^T, s -> S (s - s_sigma) + s_sigma."""
    if sigma.n_modes != state.n_modes:
        raise StructuralError(f"mode mismatch: sigma has {sigma.n_modes}, state has {state.n_modes}")
    flow = hamiltonian_flow(sigma.cov, t)
    cov = _symmetrize(flow @ state.cov @ flow.T)
    return GaussianState(flow @ (state.mean - sigma.mean) + sigma.mean, cov)


def sinh_half_hamiltonian(cov, tol=config.FAITHFUL_TOL):
    """sinh(i Omega H / 2) = (i V Omega)^-1 / sqrt(I + (V Omega)^-2) as a complex matrix."""
    w = williamson(cov)
    _require_faithful(w, tol, "state")
    f = _filter_values(w.nu)
    scale = 1.0 / np.concatenate([w.nu * f, w.nu * f])
    omega = symplectic_form(w.n_modes)
    return 1j * ((w.S @ omega) * scale) @ symplectic_inverse(w.S)


def char_function(state, w):
    """Tr[rho D_{-w}] = exp(-1/4 (Omega w)^T V (Omega w) + i (Omega w)^T s)."""
    w = as_vector(w, "w", 2 * state.n_modes)
    ow = symplectic_form(state.n_modes) @ w
    return complex(np.exp(-0.25 * ow @ state.cov @ ow + 1j * ow @ state.mean))


def sandwich_char(cov_sigma, x, y, decomposition=None):
    """
    Tr[D_{-y} sqrt(sigma_0) D_x sqrt(sigma_0)] for a zero-mean Gaussian sigma_0:
    exp(-1/4 x^T Om^T V Om x - 1/4 y^T Om^T V Om y + 1/2 x^T Om^T F V Om y),
    F = sqrt_filter(V).
    """
    cov = np.asarray(cov_sigma, dtype=float)
    n = _check_even_square(cov, "covariance")
    omega = symplectic_form(n)
    ox = omega @ as_vector(x, "x", 2 * n)
    oy = omega @ as_vector(y, "y", 2 * n)
    F = sqrt_filter(cov, decomposition)
    exponent = -0.25 * ox @ cov @ ox - 0.25 * oy @ cov @ oy + 0.5 * ox @ F @ cov @ oy
    return complex(np.exp(exponent))


def sqrt_sandwich_covariance(cov_sigma, cov_omega):
    """
    Covariance of sqrt(sigma) omega sqrt(sigma) after normalization:
    V_s - F V_s (V_w + V_s)^-1 V_s F^T.
    """
    vs = np.asarray(cov_sigma, dtype=float)
    vw = np.asarray(cov_omega, dtype=float)
    _check_even_square(vs, "sigma covariance")
    if vw.shape != vs.shape:
        raise StructuralError(f"covariance shapes differ: {vs.shape} vs {vw.shape}")
    F = sqrt_filter(vs)
    total = _symmetrize(vs + vw)
    if np.linalg.cond(total) > 1.0 / np.finfo(float).eps:
        log_manager("V_omega + V_sigma is singular; falling back to the pseudo-inverse",
                    level="WARNING", prefix="[CORE] ")
        middle = linalg.pinv(total) @ vs
    else:
        middle = linalg.solve(total, vs, assume_a='sym')
    return _symmetrize(vs - F @ vs @ middle @ F.T)
