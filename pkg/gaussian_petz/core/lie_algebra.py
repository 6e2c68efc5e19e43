# gaussian_petz/core/lie_algebra.py
"""
Inhomogeneous quadratic Hamiltonians (i/2) r^T Om X r + i s^T Om r + (i/2) a
as a matrix Lie algebra:

    (X, s, a)  <->  [[0, s^T Om^T, a],
                     [0, X,        s],
                     [0, 0,        0]]      with Om X symmetric.

Products of exponentials are multiplied as (2n+2)-dimensional matrices and
taken back to a single generator with a matrix logarithm. X may be complex.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import linalg

from gaussian_petz.core.symplectic_core import hamiltonian_from_covariance, symplectic_form
from gaussian_petz.utils import config
from gaussian_petz.utils.errors import DomainError, StructuralError

_SERIES_RADIUS = 0.25
_SERIES_TERMS = 30
_SOLVE_MIN_SINGULAR = 0.1


def _symmetry_defect(X):
    sym = symplectic_form(X.shape[0] // 2) @ X
    return float(np.max(np.abs(sym - sym.T)))


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    X: np.ndarray
    s: np.ndarray
    a: complex = 0.0
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        X = np.asarray(self.X)
        s = np.asarray(self.s)
        if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] == 0 or X.shape[0] % 2:
            raise StructuralError(f"X must be 2n x 2n, got shape {X.shape}")
        if s.shape != (X.shape[0],):
            raise StructuralError(f"s must have length {X.shape[0]}, got shape {s.shape}")
        object.__setattr__(self, 'X', X)
        object.__setattr__(self, 's', s)
        if self.validate:
            defect = _symmetry_defect(X)
            if defect > config.SYMMETRY_TOL * max(1.0, float(np.max(np.abs(X)))):
                raise DomainError(f"Omega X must be symmetric (defect {defect:.3e})")

    @property
    def n_modes(self):
        return self.X.shape[0] // 2

    @classmethod
    def displacement(cls, z):
        """Generator of D_z = exp(i z^T Om r)."""
        z = np.asarray(z)
        return cls(np.zeros((z.shape[0], z.shape[0])), z, 0.0)

    @classmethod
    def rotation(cls, theta, n_modes=1):
        return cls(theta * symplectic_form(n_modes), np.zeros(2 * n_modes), 0.0)


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray

    @property
    def central(self):
        return self.matrix[1:-1, 1:-1]

    def __matmul__(self, other):
        return GroupElement(self.matrix @ other.matrix)

    def structure_defect(self):
        """Deviation from first column e_0, last row e_last and a symplectic central block."""
        M = self.matrix
        dim = M.shape[0]
        first = M[:, 0].copy()
        first[0] -= 1.0
        last = M[-1, :].copy()
        last[-1] -= 1.0
        omega = symplectic_form((dim - 2) // 2)
        sympl = self.central @ omega @ self.central.T - omega
        return float(max(np.max(np.abs(first)), np.max(np.abs(last)), np.max(np.abs(sympl))))


class GoldenRuleSandwich(NamedTuple):
    """sqrt(sigma) D_x sqrt(sigma) = exp(log_weight) D_d sigma D_{-d} with complex d."""
    log_weight: float
    displacement: np.ndarray


def _check_algebra(h):
    defect = _symmetry_defect(h.X)
    if defect > config.SYMMETRY_TOL * max(1.0, float(np.max(np.abs(h.X)))):
        raise DomainError(f"Omega X must be symmetric (defect {defect:.3e})")


def embed(h):
    _check_algebra(h)
    d = h.X.shape[0]
    omega = symplectic_form(h.n_modes)
    dtype = np.result_type(h.X, h.s, np.asarray(h.a), float)
    M = np.zeros((d + 2, d + 2), dtype=dtype)
    M[0, 1:-1] = h.s @ omega.T
    M[0, -1] = h.a
    M[1:-1, 1:-1] = h.X
    M[1:-1, -1] = h.s
    return M


def from_matrix(M, tol=config.LIE_PROJECTION_TOL):
    """Inverse of embed for matrices of the algebra."""
    M = np.asarray(M)
    dim = M.shape[0]
    if M.ndim != 2 or M.shape[1] != dim or dim < 4 or dim % 2:
        raise StructuralError(f"expected a (2n+2)-square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M))))
    s = M[1:-1, -1]
    omega = symplectic_form((dim - 2) // 2)
    border = max(np.max(np.abs(M[:, 0])), np.max(np.abs(M[-1, :])),
                 np.max(np.abs(M[0, 1:-1] - s @ omega.T)))
    if border > tol * scale:
        raise DomainError(f"matrix is not in the quadratic-Hamiltonian algebra (border defect {border:.3e})")
    return QuadraticHamiltonian(M[1:-1, 1:-1], s, M[0, -1])


def commutator(h1, h2):
    """[h1, h2] = ([X1, X2], X1 s2 - X2 s1, -2 s1^T Om s2)."""
    if h1.n_modes != h2.n_modes:
        raise StructuralError(f"mode mismatch: {h1.n_modes} vs {h2.n_modes}")
    omega = symplectic_form(h1.n_modes)
    X3 = h1.X @ h2.X - h2.X @ h1.X
    s3 = h1.X @ h2.s - h2.X @ h1.s
    return QuadraticHamiltonian(X3, s3, -2.0 * h1.s @ omega @ h2.s, validate=False)


def _phi_series(X):
    eye = np.eye(X.shape[0], dtype=X.dtype)
    phi_plus = np.zeros_like(eye)
    phi_minus = np.zeros_like(eye)
    psi = np.zeros_like(eye)
    power = eye.copy()
    fact = 1.0
    for k in range(_SERIES_TERMS):
        fact *= (k + 1)  # (k+1)!
        phi_plus = phi_plus + power / fact
        phi_minus = phi_minus + ((-1) ** k) * power / fact
        if k % 2 == 1:
            psi = psi - power / (fact * (k + 2))  # X^k / (k+2)!
        power = power @ X
    return phi_plus, phi_minus, psi


def _phi_solve(X):
    eye = np.eye(X.shape[0], dtype=X.dtype)
    e_plus = linalg.expm(X)
    e_minus = linalg.expm(-X)
    phi_plus = linalg.solve(X, e_plus - eye)
    phi_minus = linalg.solve(X, eye - e_minus)
    psi = linalg.solve(X @ X, X - 0.5 * (e_plus - e_minus))
    return phi_plus, phi_minus, psi


def _phi_augmented(X):
    d = X.shape[0]
    eye = np.eye(d, dtype=X.dtype)

    def phi12(A):
        big = np.zeros((3 * d, 3 * d), dtype=A.dtype)
        big[:d, :d] = A
        big[:d, d:2 * d] = eye
        big[d:2 * d, 2 * d:] = eye
        E = linalg.expm(big)
        return E[:d, d:2 * d], E[:d, 2 * d:]

    phi1_plus, phi2_plus = phi12(X)
    phi1_minus, phi2_minus = phi12(-X)
    return phi1_plus, phi1_minus, -0.5 * (phi2_plus - phi2_minus)


def phi_functions(X):
    """
    (e^X - I)/X, (I - e^-X)/X and (X - sinh X)/X^2.
    Series near zero, a linear solve when X is well conditioned, and the
    augmented block exponential otherwise.
    """
    X = np.asarray(X)
    if not np.iscomplexobj(X):
        X = X.astype(float)
    if linalg.norm(X, 1) < _SERIES_RADIUS:
        return _phi_series(X)
    if np.linalg.svd(X, compute_uv=False)[-1] >= _SOLVE_MIN_SINGULAR:
        return _phi_solve(X)
    return _phi_augmented(X)


def lie_exp(h):
    """Closed-form exponential of embed(h)."""
    _check_algebra(h)
    d = h.X.shape[0]
    omega = symplectic_form(h.n_modes)
    phi_plus, phi_minus, psi = phi_functions(h.X)
    dtype = np.result_type(phi_plus, h.s, np.asarray(h.a), float)
    M = np.zeros((d + 2, d + 2), dtype=dtype)
    M[0, 0] = 1.0
    M[-1, -1] = 1.0
    M[0, 1:-1] = (phi_minus @ h.s) @ omega.T
    M[0, -1] = h.a + h.s @ omega @ psi @ h.s
    M[1:-1, 1:-1] = linalg.expm(h.X)
    M[1:-1, -1] = phi_plus @ h.s
    return GroupElement(M)


def _branch_obstruction(central):
    eig = linalg.eigvals(central)
    on_cut = (np.abs(eig.imag) <= 1e-9 * np.maximum(1.0, np.abs(eig))) & (eig.real < 0.0)
    return eig[on_cut]


def product_to_single(h1, h2, tol=config.LIE_PROJECTION_TOL):
    """
    h3 with exp(h3) = exp(h1) exp(h2).
    Raises:
        DomainError: the central block of the product has an eigenvalue on the
            negative real axis (no principal logarithm), or the logarithm leaves
            the algebra.
    """
    if h1.n_modes != h2.n_modes:
        raise StructuralError(f"mode mismatch: {h1.n_modes} vs {h2.n_modes}")
    product = (lie_exp(h1) @ lie_exp(h2)).matrix
    bad = _branch_obstruction(product[1:-1, 1:-1])
    if bad.size:
        raise DomainError(
            f"product has eigenvalue(s) {np.round(bad, 12).tolist()} on the negative real axis; "
            "no principal logarithm inside the algebra")
    log = linalg.logm(product)
    real_input = not any(np.iscomplexobj(v) for v in (h1.X, h1.s, h2.X, h2.s, np.asarray(h1.a), np.asarray(h2.a)))
    if real_input:
        if np.max(np.abs(np.imag(log))) > tol * max(1.0, float(np.max(np.abs(log)))):
            raise DomainError("matrix logarithm of a real product came out complex")
        log = np.real(log)

    X = log[1:-1, 1:-1]
    omega = symplectic_form(h1.n_modes)
    sym = omega @ X
    defect = float(np.max(np.abs(sym - sym.T)))
    if defect > tol * max(1.0, float(np.max(np.abs(X)))):
        raise DomainError(f"logarithm left the algebra (Omega X asymmetry {defect:.3e})")
    X = omega.T @ (0.5 * (sym + sym.T))
    a = log[0, -1]
    return QuadraticHamiltonian(X, log[1:-1, -1], float(a) if real_input else a)


def sandwich_via_golden_rule(cov_sigma, x):
    """
    sqrt(sigma_0) D_x sqrt(sigma_0) by block-matrix algebra.

    With K = -i Om H / 2, e^K e^{D_x} e^K = L(d) C L(-d), where L(d) is the
    displacement element and C = exp of (2K, 0, c); then (I - E) d = v and
    c = M[0,-1] + d^T Om^T E d for the product M with central block E and
    border v. The weight exp((i/2) c) is real.
    """
    cov = np.asarray(cov_sigma, dtype=float)
    ham = hamiltonian_from_covariance(cov)
    n = cov.shape[0] // 2
    omega = symplectic_form(n)
    x = np.asarray(x, dtype=float)
    if x.shape != (2 * n,):
        raise StructuralError(f"x must have length {2 * n}, got shape {x.shape}")
    K = QuadraticHamiltonian(-0.5j * omega @ ham.H, np.zeros(2 * n, dtype=complex), 0.0)
    e_k = lie_exp(K)
    M = (e_k @ lie_exp(QuadraticHamiltonian.displacement(x)) @ e_k).matrix
    E = M[1:-1, 1:-1]
    v = M[1:-1, -1]
    d = linalg.solve(np.eye(2 * n) - E, v)
    c = M[0, -1] + d @ omega.T @ E @ d
    return GoldenRuleSandwich(float(np.real(0.5j * c)), d)


def golden_rule_char(cov_sigma, x, y):
    """Characteristic function at y of sqrt(sigma_0) D_x sqrt(sigma_0), from the golden-rule factors."""
    cov = np.asarray(cov_sigma, dtype=float)
    omega = symplectic_form(cov.shape[0] // 2)
    res = sandwich_via_golden_rule(cov, x)
    y = np.asarray(y, dtype=float)
    oy = omega @ y
    return complex(np.exp(res.log_weight - 1j * res.displacement @ omega @ y - 0.25 * oy @ cov @ oy))
