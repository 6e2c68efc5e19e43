import numpy as np
import pytest
from scipy.integrate import trapezoid

from conftest import random_gaussian
from gaussian_petz.core.channels import apply, identity_channel, thermal_loss
from gaussian_petz.core.info_measures import (
    QuadratureConfig,
    entropy,
    fidelity,
    fidelity_recovery_bound,
    p_density,
    quadrature_nodes,
    recovery_deficit,
    relative_entropy,
    tail_mass,
)
from gaussian_petz.core.sampling import random_faithful_instance
from gaussian_petz.core.symplectic_core import GaussianState
from gaussian_petz.utils.errors import ConfigurationError, DomainError, NonFaithfulError, StructuralError


def test_entropy_examples(thermal3):
    assert entropy(GaussianState.vacuum()) == pytest.approx(0.0, abs=1e-12)
    assert entropy(GaussianState.squeezed(0.8, 1.1)) == pytest.approx(0.0, abs=1e-9)
    assert entropy(thermal3) == pytest.approx(2.0 * np.log(2.0))
    assert entropy(GaussianState.thermal(3.0, n_modes=2)) == pytest.approx(4.0 * np.log(2.0))


def test_entropy_ignores_mean():
    assert entropy(GaussianState.thermal(2.0, mean=[3.0, -1.0])) == pytest.approx(entropy(GaussianState.thermal(2.0)))


def test_entropy_rejects_sub_vacuum_state():
    with pytest.raises(DomainError):
        entropy(GaussianState(np.zeros(2), 0.5 * np.eye(2)))


def test_relative_entropy_examples(thermal3):
    assert relative_entropy(GaussianState.vacuum(), thermal3) == pytest.approx(np.log(2.0))
    assert relative_entropy(thermal3, thermal3) == pytest.approx(0.0, abs=1e-12)


def test_relative_entropy_of_shifted_thermal(thermal3):
    # mean offset d contributes d^T H d / 2 with H = ln 2 I
    shifted = GaussianState.thermal(3.0, mean=[1.0, 0.0])
    assert relative_entropy(shifted, thermal3) == pytest.approx(0.5 * np.log(2.0))


def test_relative_entropy_is_non_negative(rng):
    for _ in range(50):
        modes = int(rng.integers(1, 3))
        assert relative_entropy(random_gaussian(rng, modes), random_gaussian(rng, modes)) >= -1e-12


def test_relative_entropy_needs_faithful_sigma(thermal3):
    with pytest.raises(NonFaithfulError) as info:
        relative_entropy(thermal3, GaussianState.vacuum())
    assert info.value.term == "sigma"


def test_relative_entropy_mode_mismatch(thermal3):
    with pytest.raises(StructuralError):
        relative_entropy(thermal3, GaussianState.thermal(3.0, n_modes=2))


def test_fidelity_examples(thermal3):
    assert fidelity(GaussianState.vacuum(), thermal3) == pytest.approx(0.5)
    assert fidelity(GaussianState.coherent([1.0, 0.0]), GaussianState.vacuum()) == pytest.approx(np.exp(-0.5))
    assert fidelity(thermal3, thermal3) == pytest.approx(1.0)


def test_fidelity_is_symmetric_and_bounded(rng):
    for _ in range(30):
        modes = int(rng.integers(1, 3))
        rho, sigma = random_gaussian(rng, modes), random_gaussian(rng, modes)
        f = fidelity(rho, sigma)
        assert 0.0 <= f <= 1.0
        assert f == pytest.approx(fidelity(sigma, rho), abs=1e-9)


def test_fidelity_mode_mismatch(thermal3):
    with pytest.raises(StructuralError):
        fidelity(thermal3, GaussianState.vacuum(2))


def test_data_processing_holds(rng):
    for _ in range(100):
        rho, sigma, channel, _ = random_faithful_instance(rng, int(rng.integers(1, 3)))
        report = recovery_deficit(rho, sigma, channel)
        assert report.d_out <= report.d_in + 1e-9
        assert report.d_recovery >= -1e-9
        assert report.deficit == pytest.approx(report.d_in - report.d_out - report.d_recovery)


def test_deficit_vanishes_for_identity(rng):
    rho, sigma = random_gaussian(rng, 1), random_gaussian(rng, 1)
    report = recovery_deficit(rho, sigma, identity_channel())
    assert report.d_recovery == pytest.approx(0.0, abs=1e-9)
    assert report.deficit == pytest.approx(0.0, abs=1e-9)


def test_deficit_vanishes_when_rho_is_sigma(rng, loss_half):
    sigma = random_gaussian(rng, 1)
    report = recovery_deficit(sigma, sigma, loss_half)
    assert report.d_in == pytest.approx(0.0, abs=1e-10)
    assert report.deficit == pytest.approx(0.0, abs=1e-9)


def test_deficit_instance_payload(thermal3, loss_half):
    report = recovery_deficit(GaussianState.thermal(2.0), thermal3, loss_half, with_instance=True)
    assert set(report.to_json()["instance"]) == {"rho", "sigma", "channel"}
    assert "instance" not in recovery_deficit(GaussianState.thermal(2.0), thermal3, loss_half).to_json()


def test_deficit_flags_non_faithful_sigma(loss_half):
    with pytest.raises(NonFaithfulError) as info:
        recovery_deficit(GaussianState.thermal(2.0), GaussianState.vacuum(), loss_half)
    assert info.value.term == "sigma"


@pytest.mark.parametrize("cov", [0.5 * np.eye(2), np.array([[2.0, 0.6], [0.0, 2.0]])])
def test_unphysical_rho_is_rejected(cov):
    rho = GaussianState(np.zeros(2), cov)
    sigma = GaussianState.thermal(2.0)
    channel = thermal_loss(0.5, 1.0)
    with pytest.raises(DomainError):
        recovery_deficit(rho, sigma, channel)
    with pytest.raises(DomainError):
        recovery_deficit(sigma, rho, channel)
    with pytest.raises(DomainError):
        fidelity_recovery_bound(rho, sigma, channel, QuadratureConfig(5.0, 21))
    with pytest.raises(DomainError):
        fidelity_recovery_bound(sigma, rho, channel, QuadratureConfig(5.0, 21))


def test_p_density_properties():
    assert p_density(0.0) == pytest.approx(np.pi / 4.0)
    ts = np.linspace(-20.0, 20.0, 40001)
    assert trapezoid(p_density(ts), ts) == pytest.approx(1.0, abs=1e-6)
    assert p_density(1.3) == pytest.approx(p_density(-1.3))


def test_tail_mass():
    assert tail_mass(0.0) == pytest.approx(1.0)
    assert tail_mass(5.0) < 1e-6


def test_quadrature_nodes():
    nodes, weights = quadrature_nodes(QuadratureConfig(2.0, 5))
    np.testing.assert_allclose(nodes, [-2.0, -1.0, 0.0, 1.0, 2.0])
    np.testing.assert_allclose(weights, [0.5, 1.0, 1.0, 1.0, 0.5])


@pytest.mark.parametrize("half_range, points", [(5.0, 1), (0.0, 201), (0.5, 201)])
def test_quadrature_config_rejects(half_range, points):
    with pytest.raises(ConfigurationError):
        QuadratureConfig(half_range, points).validate()


def test_bound_when_rho_is_sigma(rng, loss_half):
    sigma = random_gaussian(rng, 1)
    report = fidelity_recovery_bound(sigma, sigma, loss_half)
    assert report.lhs == pytest.approx(0.0, abs=1e-10)
    assert abs(report.slack) < 1e-6


def test_bound_holds_on_random_instances(rng):
    for _ in range(3):
        rho, sigma, channel, _ = random_faithful_instance(rng, 1)
        report = fidelity_recovery_bound(rho, sigma, channel, QuadratureConfig(5.0, 101))
        assert report.slack >= -1e-6
        assert report.slack == pytest.approx(report.lhs - report.rhs)


def test_bound_two_modes(rng):
    rho, sigma = random_gaussian(rng, 2), random_gaussian(rng, 2)
    channel = thermal_loss(0.6, 0.2, 2)
    report = fidelity_recovery_bound(rho, sigma, channel, QuadratureConfig(5.0, 61))
    assert report.slack >= -1e-6
    assert report.rhs >= relative_entropy(apply(channel, rho), apply(channel, sigma)) - 1e-12


@pytest.mark.slow
def test_data_processing_sweep():
    rng = np.random.default_rng(6001)
    for i in range(1000):
        rho, sigma, channel, _ = random_faithful_instance(rng, 1 + i % 2)
        report = recovery_deficit(rho, sigma, channel)
        scale = max(1.0, report.d_in)
        assert report.d_in - report.d_out >= -1e-8 * scale
        assert report.d_recovery >= -1e-8 * scale


@pytest.mark.slow
def test_bound_sweep():
    rng = np.random.default_rng(6002)
    quad = QuadratureConfig()
    for i in range(200):
        rho, sigma, channel, _ = random_faithful_instance(rng, 1 + i % 2)
        report = fidelity_recovery_bound(rho, sigma, channel, quad)
        assert report.slack >= -1e-6 * max(1.0, report.lhs)
