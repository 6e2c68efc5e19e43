from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_gaussian
from gaussian_petz.core.channels import (
    GaussianChannel,
    apply,
    identity_channel,
    loss,
    thermal_loss,
)
from gaussian_petz.core.info_measures import QuadratureConfig, quadrature_nodes
from gaussian_petz.core.petz import (
    cp_certificate,
    modular_channel,
    petz_adjoint_on_displacement,
    petz_channel,
    petz_from_zero_mean,
    rotated_petz,
    rotated_petz_by_definition,
    rotated_petz_family,
    symplectic_flow,
    verify_petz_identity,
)
from gaussian_petz.core.sampling import random_channel, random_state
from gaussian_petz.core.symplectic_core import GaussianState, hamiltonian_flow, symplectic_form
from gaussian_petz.utils.errors import DomainError, NonFaithfulError

SQRT3 = np.sqrt(3.0)


def rotation(angle):
    return np.cos(angle) * np.eye(2) + np.sin(angle) * symplectic_form(1)


def random_instance(rng, modes):
    return random_state(rng, modes), random_channel(rng, modes)[0]


def test_identity_channel_gives_identity(rng):
    sigma = random_gaussian(rng, 2)
    p = petz_channel(sigma, identity_channel(2))
    np.testing.assert_allclose(p.X_P, np.eye(4), atol=1e-10)
    np.testing.assert_allclose(p.Y_P, np.zeros((4, 4)), atol=1e-10)
    np.testing.assert_allclose(p.delta_P, np.zeros(4), atol=1e-12)


def test_thermal_through_loss(thermal3, loss_half):
    p = petz_channel(thermal3, loss_half)
    np.testing.assert_allclose(p.X_P, (2.0 / SQRT3) * np.eye(2), atol=1e-12)
    np.testing.assert_allclose(p.Y_P, np.eye(2) / 3.0, atol=1e-12)
    np.testing.assert_allclose(p.delta_P, np.zeros(2), atol=1e-12)
    assert p.cp_min_eigenvalue == pytest.approx(0.0, abs=1e-9)


def test_thermal_through_displaced_loss(thermal3, loss_half):
    shifted = GaussianChannel(loss_half.X, loss_half.Y, np.array([1.0, 0.0]))
    p = petz_channel(thermal3, shifted)
    np.testing.assert_allclose(p.delta_P, [-2.0 / SQRT3, 0.0], atol=1e-12)


def test_reversal_on_random_instances(rng):
    for modes in (1, 2, 3):
        for _ in range(5):
            sigma = random_gaussian(rng, modes)
            channel = thermal_loss(float(rng.uniform(0.2, 0.9)), float(rng.uniform(0.0, 1.0)), modes)
            cov_defect, mean_defect = petz_channel(sigma, channel).reversal_defect()
            assert cov_defect < 1e-10
            assert mean_defect < 1e-10


@settings(max_examples=40, deadline=None)
@given(eta=st.floats(0.05, 0.95), nu=st.floats(1.5, 6.0))
def test_thermal_loss_reversal_property(eta, nu):
    p = petz_channel(GaussianState.thermal(nu), loss(eta))
    cov_defect, mean_defect = p.reversal_defect()
    assert cov_defect < 1e-10
    assert mean_defect < 1e-12
    assert p.cp_min_eigenvalue >= -1e-9


def test_non_faithful_output_is_rejected():
    with pytest.raises(NonFaithfulError) as info:
        petz_channel(GaussianState.vacuum(), identity_channel())
    assert info.value.term == "N(sigma)"


def test_pure_sigma_is_allowed():
    sigma = GaussianState.squeezed(0.4, 0.3)
    p = petz_channel(sigma, thermal_loss(0.5, 1.0))
    cov_defect, mean_defect = p.reversal_defect()
    assert cov_defect < 1e-10 and mean_defect < 1e-10
    assert p.cp_min_eigenvalue >= -1e-9


def test_unphysical_sigma_is_rejected(loss_half):
    with pytest.raises(DomainError) as info:
        petz_channel(GaussianState(np.zeros(2), 0.5 * np.eye(2)), loss_half)
    assert not isinstance(info.value, NonFaithfulError)
    with pytest.raises(DomainError):
        petz_channel(GaussianState(np.zeros(2), np.array([[2.0, 0.4], [0.0, 2.0]])), loss_half)


def test_uncertified_construction_skips_cp(thermal3, loss_half):
    fast = petz_channel(thermal3, loss_half, certify=False)
    assert fast.cp_min_eigenvalue is None
    np.testing.assert_array_equal(fast.X_P, petz_channel(thermal3, loss_half).X_P)


def test_non_square_channel(rng):
    sigma = random_gaussian(rng, 2)
    keep_first = GaussianChannel(np.array([[1.0, 0, 0, 0], [0, 0, 1.0, 0]]), np.zeros((2, 2)), np.zeros(2))
    p = petz_channel(sigma, keep_first)
    assert p.X_P.shape == (4, 2)
    assert max(p.reversal_defect()) < 1e-10
    assert p.cp_min_eigenvalue >= -1e-9
    identity = verify_petz_identity(sigma, keep_first, [0.3, -0.5], [0.1, 0.7, -0.4, 0.2], construction=p)
    assert abs(identity.lhs - identity.rhs) < 1e-10


def test_cp_certificate_examples(thermal3, loss_half, rng):
    assert cp_certificate(petz_channel(thermal3, identity_channel())).min_eigenvalue == pytest.approx(0.0, abs=1e-12)
    assert cp_certificate(petz_channel(thermal3, loss_half)).min_eigenvalue == pytest.approx(0.0, abs=1e-9)


def test_cp_certificate_sweep(rng):
    worst = np.inf
    for _ in range(200):
        sigma, channel = random_instance(rng, int(rng.integers(1, 3)))
        worst = min(worst, cp_certificate(petz_channel(sigma, channel)).min_eigenvalue)
    assert worst >= -1e-9


def test_symplectic_flow_at_zero(thermal3):
    flow = symplectic_flow(thermal3, 0.0)
    np.testing.assert_array_equal(flow.matrix, np.eye(2))


def test_symplectic_flow_thermal(thermal3):
    flow = symplectic_flow(thermal3, 1.0)
    np.testing.assert_allclose(flow.matrix, rotation(np.log(2.0)), atol=1e-12)


def test_symplectic_flow_is_symplectic(rng):
    for _ in range(20):
        sigma = random_gaussian(rng, int(rng.integers(1, 3)))
        flow = symplectic_flow(sigma, float(rng.uniform(-2.0, 2.0)))
        assert flow.is_symplectic(tol=1e-10 * max(1.0, float(np.max(np.abs(flow.matrix))) ** 2))


def test_symplectic_flow_needs_faithful_state():
    with pytest.raises(NonFaithfulError) as info:
        symplectic_flow(GaussianState.vacuum(), 0.5)
    assert info.value.term == "sigma"


def test_rotated_petz_at_zero_is_plain(thermal3, loss_half):
    base = petz_channel(thermal3, loss_half)
    rotated = rotated_petz(thermal3, loss_half, 0.0)
    np.testing.assert_array_equal(rotated.X_P, base.X_P)
    np.testing.assert_array_equal(rotated.Y_P, base.Y_P)


def test_rotated_petz_needs_faithful_sigma_at_zero():
    sigma = GaussianState.squeezed(0.4, 0.3)
    channel = thermal_loss(0.5, 1.0)
    for t in (0.0, 0.7):
        with pytest.raises(NonFaithfulError) as info:
            rotated_petz(sigma, channel, t)
        assert info.value.term == "sigma"
    with pytest.raises(NonFaithfulError):
        rotated_petz_family(sigma, channel, [0.0])


def test_rotated_petz_thermal_loss(thermal3, loss_half):
    p = rotated_petz(thermal3, loss_half, 1.0)
    # N(sigma) = 2 I has modular frequency ln 3
    expected = (2.0 / SQRT3) * rotation(np.log(2.0) - np.log(3.0))
    np.testing.assert_allclose(p.X_P, expected, atol=1e-12)
    np.testing.assert_allclose(p.Y_P, np.eye(2) / 3.0, atol=1e-12)
    assert p.cp_min_eigenvalue >= -1e-9


@pytest.mark.parametrize("t", [-1.0, 0.5, 2.0])
def test_rotated_petz_reverses_anchor(rng, t):
    sigma, channel = random_instance(rng, 2)
    p = rotated_petz(sigma, channel, t)
    assert max(p.reversal_defect()) < 1e-10


def test_rotated_petz_flows_undo_rotation(rng):
    sigma, channel = random_instance(rng, 1)
    t = 0.8
    base = petz_channel(sigma, channel)
    rotated = rotated_petz(sigma, channel, t)
    undone = hamiltonian_flow(sigma.cov, -t) @ rotated.X_P @ hamiltonian_flow(base.sigma_out.cov, t)
    np.testing.assert_allclose(undone, base.X_P, atol=1e-10)


def test_rotated_petz_family_matches_single_calls(rng):
    sigma, channel = random_instance(rng, 1)
    ts = [-0.7, 0.0, 1.3]
    for t, member in zip(ts, rotated_petz_family(sigma, channel, ts)):
        single = rotated_petz(sigma, channel, t)
        np.testing.assert_allclose(member.X_P, single.X_P, atol=1e-12)
        np.testing.assert_allclose(member.delta_P, single.delta_P, atol=1e-12)


def test_rotated_petz_by_definition(rng):
    sigma, channel = random_instance(rng, 2)
    direct = rotated_petz(sigma, channel, 0.6)
    composed = rotated_petz_by_definition(sigma, channel, 0.6)
    np.testing.assert_allclose(composed.X, direct.X_P, atol=1e-10)
    np.testing.assert_allclose(composed.Y, direct.Y_P, atol=1e-10)
    np.testing.assert_allclose(composed.delta, direct.delta_P, atol=1e-10)


def test_modular_channel_fixes_state(rng):
    sigma = random_gaussian(rng, 1)
    out = apply(modular_channel(sigma, 1.1), sigma)
    np.testing.assert_allclose(out.cov, sigma.cov, atol=1e-10)
    np.testing.assert_allclose(out.mean, sigma.mean, atol=1e-10)


def test_petz_from_zero_mean(rng):
    for modes in (1, 2):
        sigma, channel = random_instance(rng, modes)
        full = petz_channel(sigma, channel).channel
        rebuilt = petz_from_zero_mean(sigma, channel)
        np.testing.assert_allclose(rebuilt.X, full.X, atol=1e-12)
        np.testing.assert_allclose(rebuilt.Y, full.Y, atol=1e-12)
        np.testing.assert_allclose(rebuilt.delta, full.delta, atol=1e-12)


def test_verify_identity_at_origin(thermal3, loss_half):
    identity = verify_petz_identity(thermal3, loss_half, [0.0, 0.0], [0.0, 0.0])
    assert identity.lhs == pytest.approx(1.0)
    assert identity.rhs == pytest.approx(1.0)


def test_verify_identity_thermal_loss(thermal3, loss_half):
    identity = verify_petz_identity(thermal3, loss_half, [1.0, 0.0], [0.0, 1.0])
    assert abs(identity.lhs - identity.rhs) < 1e-12


def test_verify_identity_random(rng):
    worst = 0.0
    for _ in range(200):
        modes = int(rng.integers(1, 3))
        sigma, channel = random_instance(rng, modes)
        w1 = rng.uniform(-2.0, 2.0, size=2 * modes)
        w2 = rng.uniform(-2.0, 2.0, size=2 * modes)
        identity = verify_petz_identity(sigma, channel, w1, w2)
        worst = max(worst, abs(identity.lhs - identity.rhs))
    assert worst < 1e-10


def test_verify_identity_detects_corrupted_noise(thermal3, loss_half):
    p = petz_channel(thermal3, loss_half)
    bad = GaussianChannel(p.X_P, p.Y_P + 0.5 * np.eye(2), p.delta_P, validate=False)
    identity = verify_petz_identity(thermal3, loss_half, [1.0, 0.0], [0.5, 1.0], construction=replace(p, channel=bad))
    assert abs(identity.lhs - identity.rhs) > 1e-3


def test_petz_adjoint_is_unital(thermal3, loss_half):
    res = petz_adjoint_on_displacement(petz_channel(thermal3, loss_half), [0.0, 0.0])
    np.testing.assert_allclose(res.vector, [0.0, 0.0])
    assert res.log_weight == 0.0


def _sweep_instance(rng, modes):
    if modes == 3:
        channel = thermal_loss(float(rng.uniform(0.1, 0.95)), float(rng.uniform(0.0, 1.0)), 3)
        return random_gaussian(rng, 3), channel
    return random_instance(rng, modes)


@pytest.mark.slow
def test_reversal_sweep():
    rng = np.random.default_rng(5001)
    for i in range(500):
        sigma, channel = _sweep_instance(rng, 1 + i % 3)
        scale = max(1.0, float(np.max(np.abs(sigma.cov))), float(np.max(np.abs(sigma.mean))))
        cov_defect, mean_defect = petz_channel(sigma, channel).reversal_defect()
        assert max(cov_defect, mean_defect) < 1e-10 * scale


@pytest.mark.slow
def test_cp_sweep_with_rotations():
    rng = np.random.default_rng(5002)
    nodes, _ = quadrature_nodes(QuadratureConfig())
    for i in range(500):
        sigma, channel = random_instance(rng, 1 + i % 2)
        for p in [petz_channel(sigma, channel)] + rotated_petz_family(sigma, channel, 0.5 * nodes):
            scale = max(1.0, float(np.max(np.abs(p.X_P))) ** 2, float(np.max(np.abs(p.Y_P))))
            assert p.cp_min_eigenvalue >= -1e-9 * scale
