import numpy as np
import pytest

from conftest import random_gaussian
from gaussian_petz.core.channels import (
    GaussianChannel,
    adjoint_on_displacement,
    adjoint_transform,
    amplifier,
    apply,
    check_cp,
    classical_noise,
    compose,
    displacement,
    identity_channel,
    loss,
    phase_rotation,
    thermal_loss,
)
from gaussian_petz.core.sampling import random_channel, random_state
from gaussian_petz.core.symplectic_core import GaussianState, validate_state
from gaussian_petz.utils.errors import DomainError, NotCompletelyPositiveError, StructuralError


def assert_same_channel(a, b, atol=1e-12):
    np.testing.assert_allclose(a.X, b.X, atol=atol)
    np.testing.assert_allclose(a.Y, b.Y, atol=atol)
    np.testing.assert_allclose(a.delta, b.delta, atol=atol)


def test_identity_channel_keeps_state(rng):
    state = random_gaussian(rng, 2)
    out = apply(identity_channel(2), state)
    np.testing.assert_allclose(out.cov, state.cov)
    np.testing.assert_allclose(out.mean, state.mean)


def test_loss_on_thermal(thermal3, loss_half):
    out = apply(loss_half, thermal3)
    np.testing.assert_allclose(out.cov, 2.0 * np.eye(2))
    np.testing.assert_allclose(out.mean, np.zeros(2))


def test_displacement_on_vacuum():
    out = apply(displacement([1.0, 0.0]), GaussianState.vacuum())
    np.testing.assert_allclose(out.cov, np.eye(2))
    np.testing.assert_allclose(out.mean, [1.0, 0.0])


def test_apply_mode_mismatch(loss_half):
    with pytest.raises(StructuralError):
        apply(loss_half, GaussianState.vacuum(2))


def test_adjoint_transform_examples():
    cov, mean = adjoint_transform(identity_channel(), 2.0 * np.eye(2), np.array([0.3, -0.1]))
    np.testing.assert_allclose(cov, 2.0 * np.eye(2))
    np.testing.assert_allclose(mean, [0.3, -0.1])

    cov, _ = adjoint_transform(loss(0.5), 2.0 * np.eye(2), np.zeros(2))
    np.testing.assert_allclose(cov, 5.0 * np.eye(2))

    amp = GaussianChannel(np.sqrt(2.0) * np.eye(2), np.eye(2), np.array([1.0, 1.0]))
    cov, mean = adjoint_transform(amp, 3.0 * np.eye(2), np.array([1.0, 1.0]))
    np.testing.assert_allclose(cov, 2.0 * np.eye(2))
    np.testing.assert_allclose(mean, np.zeros(2), atol=1e-15)


def test_adjoint_transform_inverts_unitary_channel(rng):
    state = random_gaussian(rng, 1)
    channel = compose(displacement([0.4, -1.2]), phase_rotation(0.9))
    out = apply(channel, state)
    cov, mean = adjoint_transform(channel, out.cov, out.mean)
    np.testing.assert_allclose(cov, state.cov, atol=1e-12)
    np.testing.assert_allclose(mean, state.mean, atol=1e-12)


def test_adjoint_transform_rejects_non_square():
    trace_out = GaussianChannel(np.array([[1.0, 0, 0, 0], [0, 0, 1.0, 0]]), np.zeros((2, 2)), np.zeros(2))
    with pytest.raises(DomainError):
        adjoint_transform(trace_out, np.eye(2), np.zeros(2))


def test_adjoint_transform_rejects_singular():
    replace = GaussianChannel(np.zeros((2, 2)), np.eye(2), np.zeros(2))
    with pytest.raises(DomainError):
        adjoint_transform(replace, np.eye(2), np.zeros(2))


def test_adjoint_on_displacement_examples():
    unit = adjoint_on_displacement(loss(0.3), [0.0, 0.0])
    np.testing.assert_allclose(unit.vector, [0.0, 0.0])
    assert unit.log_weight == 0.0 and unit.phase == 0.0

    res = adjoint_on_displacement(loss(0.5), [2.0, 0.0])
    np.testing.assert_allclose(res.vector, [np.sqrt(2.0), 0.0])
    assert res.log_weight == pytest.approx(-0.5)
    assert res.phase == 0.0

    shift = displacement([1.0, 0.0])
    assert adjoint_on_displacement(shift, [0.0, 2.0]).phase == 0.0
    assert adjoint_on_displacement(shift, [2.0, 0.0]).phase == pytest.approx(2.0)


def test_check_cp_examples():
    assert check_cp(identity_channel()).min_eigenvalue == pytest.approx(0.0, abs=1e-12)
    report = check_cp(loss(0.5))
    assert report.is_cp
    assert report.min_eigenvalue == pytest.approx(0.0, abs=1e-12)
    assert check_cp(classical_noise(0.1)).min_eigenvalue == pytest.approx(0.1)


def test_construction_rejects_non_cp():
    with pytest.raises(NotCompletelyPositiveError) as info:
        GaussianChannel(np.sqrt(2.0) * np.eye(2), 0.1 * np.eye(2), np.zeros(2))
    assert info.value.min_eigenvalue == pytest.approx(-0.9)


def test_construction_rejects_asymmetric_noise():
    with pytest.raises(DomainError):
        GaussianChannel(np.eye(2), np.array([[1.0, 0.3], [0.0, 1.0]]), np.zeros(2))


def test_construction_rejects_bad_shapes():
    with pytest.raises(StructuralError):
        GaussianChannel(np.eye(3), np.eye(3), np.zeros(3))
    with pytest.raises(StructuralError):
        GaussianChannel(np.eye(2), np.eye(4), np.zeros(2))
    with pytest.raises(StructuralError):
        GaussianChannel(np.eye(2), np.eye(2), np.zeros(4))


@pytest.mark.parametrize("bad", [lambda: loss(1.5), lambda: amplifier(0.5), lambda: thermal_loss(0.5, -1.0)])
def test_named_constructors_check_parameters(bad):
    with pytest.raises(DomainError):
        bad()


def test_compose_with_identity(rng):
    c = amplifier(1.7)
    assert_same_channel(compose(identity_channel(), c), c)
    assert_same_channel(compose(c, identity_channel()), c)


def test_compose_two_losses(rng):
    combined = compose(loss(0.6), loss(0.3))
    assert_same_channel(combined, loss(0.18))
    for _ in range(10):
        state = random_gaussian(rng, 1)
        direct = apply(combined, state)
        staged = apply(loss(0.6), apply(loss(0.3), state))
        np.testing.assert_allclose(direct.cov, staged.cov, atol=1e-12)


def test_compose_associative(rng):
    a, _ = random_channel(rng, 2)
    b, _ = random_channel(rng, 2)
    c, _ = random_channel(rng, 2)
    assert_same_channel(compose(compose(a, b), c), compose(a, compose(b, c)))


def test_compose_dimension_mismatch():
    with pytest.raises(StructuralError):
        compose(loss(0.5, 2), loss(0.5, 1))


def test_apply_preserves_validity(rng):
    for _ in range(200):
        modes = int(rng.integers(1, 3))
        channel, _ = random_channel(rng, modes)
        state = random_state(rng, modes)
        report = validate_state(apply(channel, state))
        assert report.min_uncertainty_eigenvalue >= -1e-9


def test_channel_json_round_trip():
    c = compose(displacement([0.1, 0.2]), thermal_loss(0.4, 0.5))
    back = GaussianChannel.from_json(c.to_json())
    assert_same_channel(back, c, atol=0.0)


def test_channel_json_missing_key():
    with pytest.raises(StructuralError):
        GaussianChannel.from_json({"X": [[1, 0], [0, 1]], "Y": [[0, 0], [0, 0]]})


def test_phase_rotation_is_symplectic_orthogonal():
    X = phase_rotation(0.3).X
    np.testing.assert_allclose(X @ X.T, np.eye(2), atol=1e-15)
