# gaussian_petz/services/oracle_service.py
import itertools
from typing import NamedTuple

import numpy as np

from gaussian_petz.core import fock_oracle as fo
from gaussian_petz.core.channels import amplifier, apply, classical_noise, compose, displacement, loss
from gaussian_petz.core.info_measures import entropy, fidelity, relative_entropy
from gaussian_petz.core.lie_algebra import QuadraticHamiltonian, golden_rule_char, product_to_single
from gaussian_petz.core.petz import petz_channel
from gaussian_petz.core.symplectic_core import (
    GaussianState,
    char_function,
    sandwich_char,
    sqrt_state_covariance,
    symplectic_form,
)
from gaussian_petz.utils import config
from gaussian_petz.utils.errors import GaussianPetzError
from gaussian_petz.utils.logging_utils import log_manager


class OracleCheck(NamedTuple):
    check: str
    error: float
    tol: float
    passed: bool
    tail: float
    message: str = ""

    def to_json(self):
        out = {"check": self.check, "error": self.error, "tol": self.tol, "passed": self.passed, "tail": self.tail}
        if self.message:
            out["message"] = self.message
        return out


def _moment_error(state, expected):
    return float(max(np.max(np.abs(state.mean - expected.mean)), np.max(np.abs(state.cov - expected.cov))))


class OracleService:
    """Compares the Gaussian closed forms against dense Fock-space evaluations."""

    SQRT_NUS = (1.5, 2.0, 3.0)
    SANDWICH_VALUES = (-2.0, 0.0, 2.0)

    def __init__(self, cutoff=config.DEFAULT_CUTOFF, tol=config.DEFAULT_ORACLE_TOL, colors=None):
        self.cutoff = cutoff
        self.tol = tol
        self.colors = colors

    def checks(self):
        return [
            ("sqrt_density", self.check_sqrt_density),
            ("char_function", self.check_char_function),
            ("sandwich_char", self.check_sandwich_char),
            ("golden_rule_char", self.check_golden_rule),
            ("displacement_composition", self.check_displacement_composition),
            ("quadratic_unitary_product", self.check_quadratic_product),
            ("petz_thermal_loss", self.check_petz_thermal_loss),
            ("petz_reversal", self.check_petz_reversal),
            ("petz_amplifier", self.check_petz_amplifier),
            ("petz_noise", self.check_petz_noise),
            ("dense_measures", self.check_dense_measures),
        ]

    def run(self):
        results = []
        for name, fn in self.checks():
            try:
                error, tail = fn()
                if np.isfinite(error):
                    results.append(OracleCheck(name, float(error), self.tol, bool(error <= self.tol), float(tail)))
                else:
                    results.append(OracleCheck(name, None, self.tol, False, float(tail), "non-finite error"))
            except GaussianPetzError as e:
                results.append(OracleCheck(name, None, self.tol, False, None, str(e)))
            check = results[-1]
            level = "SUCCESS" if check.passed else "ERROR"
            log_manager(f"{name}: error={check.error} tail={check.tail} {'PASS' if check.passed else 'FAIL'}",
                        colors=self.colors, level=level, prefix="[ORACLE] ")
        return results

    def _low_block(self):
        return max(1, min(10, self.cutoff // 4))

    def check_sqrt_density(self):
        error, tail = 0.0, 0.0
        for nu in self.SQRT_NUS:
            state = GaussianState.thermal(nu)
            rho = fo.gaussian_density(state, self.cutoff)
            root = fo.sqrt_density(rho)
            square_defect = float(np.linalg.norm(root.matrix @ root.matrix - rho.matrix))
            moments = fo.extract_moments(root.normalized())
            cov_error = float(np.max(np.abs(moments.cov - sqrt_state_covariance(state.cov))))
            error = max(error, square_defect, cov_error)
            tail = max(tail, rho.metadata["tail"])
        return error, tail

    def check_char_function(self):
        state = GaussianState.thermal(1.5, mean=[1.0, 0.0])
        rho = fo.gaussian_density(state, self.cutoff)
        error = 0.0
        for w in ([0.0, 0.0], [0.0, 1.0], [0.7, -0.4], [-1.2, 0.5]):
            error = max(error, abs(fo.dense_char(rho, w) - char_function(state, w)))
        return error, rho.metadata["tail"]

    def _sandwich_points(self):
        return [np.array(v) for v in itertools.product(self.SANDWICH_VALUES, repeat=2)]

    def check_sandwich_char(self):
        state = GaussianState.thermal(2.0)
        sigma = fo.gaussian_density(state, self.cutoff)
        error = 0.0
        for x in self._sandwich_points():
            for y in self._sandwich_points():
                dense = fo.dense_sandwich_char(sigma, x, y)
                error = max(error, abs(dense - sandwich_char(state.cov, x, y)))
        return error, sigma.metadata["tail"]

    def check_golden_rule(self):
        state = GaussianState.squeezed(0.3, 0.5, 1.8)
        sigma = fo.gaussian_density(state, self.cutoff)
        error = 0.0
        for x, y in [([1.0, 0.0], [0.0, 1.0]), ([0.5, -0.5], [1.0, 1.0]), ([-1.0, 0.3], [0.2, -0.8])]:
            dense = fo.dense_sandwich_char(sigma, x, y)
            error = max(error, abs(dense - golden_rule_char(state.cov, x, y)))
        return error, sigma.metadata["tail"]

    def check_displacement_composition(self):
        a = np.array([1.0, 0.0])
        b = np.array([0.0, 1.0])
        k = self._low_block()
        lhs = fo.displacement_op(a, self.cutoff).matrix @ fo.displacement_op(b, self.cutoff).matrix
        rhs = fo.displacement_op(a + b, self.cutoff).matrix * np.exp(-0.5j * a @ symplectic_form(1) @ b)
        vacuum_error = abs(fo.displacement_op(a + b, self.cutoff).matrix[0, 0] - np.exp(-0.25 * (a + b) @ (a + b)))
        return max(float(np.max(np.abs(lhs[:k, :k] - rhs[:k, :k]))), vacuum_error), 0.0

    def check_quadratic_product(self):
        h1 = QuadraticHamiltonian.rotation(0.7)
        h2 = QuadraticHamiltonian.displacement([0.4, -0.3])
        h3 = product_to_single(h1, h2)
        k = self._low_block()
        lhs = fo.quadratic_unitary(h1, self.cutoff).matrix @ fo.quadratic_unitary(h2, self.cutoff).matrix
        rhs = fo.quadratic_unitary(h3, self.cutoff).matrix
        return float(np.max(np.abs(lhs[:k, :k] - rhs[:k, :k]))), 0.0

    def _petz_against_gaussian(self, sigma, channel, omega):
        construction = petz_channel(sigma, channel)
        kraus = fo.channel_kraus(channel, self.cutoff)
        dense = fo.petz_oracle(sigma, kraus, omega, self.cutoff)
        expected = apply(construction.channel, omega)
        return _moment_error(fo.extract_moments(dense), expected), dense.metadata["tail"]

    def check_petz_thermal_loss(self):
        return self._petz_against_gaussian(GaussianState.thermal(3.0), loss(0.5), GaussianState.thermal(2.5))

    def check_petz_reversal(self):
        sigma = GaussianState.squeezed(0.2, 0.4, 2.0, mean=[0.5, -0.3])
        channel = compose(displacement([0.2, 0.1]), loss(0.7))
        construction = petz_channel(sigma, channel)
        kraus = fo.channel_kraus(channel, self.cutoff)
        dense = fo.petz_oracle(sigma, kraus, construction.sigma_out, self.cutoff)
        return _moment_error(fo.extract_moments(dense), sigma), dense.metadata["tail"]

    def check_petz_amplifier(self):
        sigma = GaussianState.thermal(2.0, mean=[0.3, 0.2])
        omega = GaussianState.thermal(2.5, mean=[0.5, 0.0])
        return self._petz_against_gaussian(sigma, amplifier(1.5), omega)

    def check_petz_noise(self):
        return self._petz_against_gaussian(GaussianState.thermal(2.0), classical_noise(0.5),
                                           GaussianState.thermal(2.0))

    def check_dense_measures(self):
        vacuum = GaussianState.vacuum()
        thermal = GaussianState.thermal(3.0)
        rho = GaussianState.thermal(1.5, mean=[0.5, 0.0])
        sigma = GaussianState.squeezed(0.2, 0.3, 2.0)
        dense_vac = fo.fock_projector(1, self.cutoff)
        dense_thermal = fo.gaussian_density(thermal, self.cutoff)
        dense_rho = fo.gaussian_density(rho, self.cutoff)
        dense_sigma = fo.gaussian_density(sigma, self.cutoff)

        m1 = fo.dense_measures(dense_vac, dense_thermal)
        m2 = fo.dense_measures(dense_rho, dense_sigma)
        errors = [
            abs(m1.fidelity - fidelity(vacuum, thermal)),
            abs(m1.rel_entropy - relative_entropy(vacuum, thermal)),
            abs(m2.fidelity - fidelity(rho, sigma)),
            abs(m2.rel_entropy - relative_entropy(rho, sigma)),
            abs(m2.entropy_rho - entropy(rho)),
        ]
        tail = max(dense_thermal.metadata["tail"], dense_rho.metadata["tail"], dense_sigma.metadata["tail"])
        return float(max(errors)), tail
