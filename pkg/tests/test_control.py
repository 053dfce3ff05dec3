"""Controller tests: nominal wrench arithmetic, rejection, perch wrench."""

import math

import numpy as np
import pytest

from perchsim import estimation
from perchsim.control import (AttitudeIntegral, Gains, Setpoint,
                              nominal_wrench, perch_wrench, rejection_force)
from perchsim.geometry import rot_y
from perchsim.vehicle import VehicleParams, VehicleState

PARAMS = VehicleParams()
GAINS = Gains()
MG = PARAMS.m * PARAMS.g


def at_setpoint(R=None):
    R = np.eye(3) if R is None else R
    state = VehicleState.at_rest([0.0, 0.0, 1.2], R)
    sp = Setpoint.hold(state.p, R)
    return state, sp


def test_hover_gravity_feedforward():
    state, sp = at_setpoint()
    w, _ = nominal_wrench(state, sp, GAINS, AttitudeIntegral(), PARAMS, 0.001)
    assert np.allclose(w.f, [0.0, 0.0, MG], atol=1e-9)
    assert np.allclose(w.tau, 0.0, atol=1e-12)


def test_gravity_feedforward_rotated_frame():
    state, sp = at_setpoint(rot_y(math.pi / 2))
    w, _ = nominal_wrench(state, sp, GAINS, AttitudeIntegral(), PARAMS, 0.001)
    assert np.allclose(w.f, [-MG, 0.0, 0.0], atol=1e-9)
    assert np.allclose(w.tau, 0.0, atol=1e-12)


def test_position_error_gain_arithmetic():
    state, sp = at_setpoint()
    sp.p = state.p + np.array([0.1, 0.0, 0.0])
    w, _ = nominal_wrench(state, sp, GAINS, AttitudeIntegral(), PARAMS, 0.001)
    assert np.allclose(w.f, [1.65, 0.0, MG], atol=1e-9)


def test_translational_superposition():
    # For fixed R the force is affine in (e_p, e_v, a_d).
    rng = np.random.default_rng(15)
    state = VehicleState.at_rest([0.0, 0.0, 1.2])
    integ = AttitudeIntegral()

    def force(ep, ev, ad):
        sp = Setpoint(state.p + ep, ev, ad, np.eye(3), np.zeros(3))
        w, _ = nominal_wrench(state, sp, GAINS, integ, PARAMS, 0.001)
        return w.f

    base = force(np.zeros(3), np.zeros(3), np.zeros(3))
    for _ in range(20):
        a, b = rng.normal(size=(2, 3))
        lhs = force(a + b, a - b, 2.0 * a)
        rhs = (force(a, np.zeros(3), np.zeros(3)) - base) \
            + (force(b, np.zeros(3), np.zeros(3)) - base) \
            + (force(np.zeros(3), a, np.zeros(3)) - base) \
            + (force(np.zeros(3), -b, np.zeros(3)) - base) \
            + (force(np.zeros(3), np.zeros(3), 2.0 * a) - base) + base
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_attitude_integral_clamp():
    state = VehicleState.at_rest([0.0, 0.0, 1.2])
    sp = Setpoint.hold(state.p, rot_y(1.0))
    integ = AttitudeIntegral(clamp=0.5)
    for _ in range(2000):
        _, integ = nominal_wrench(state, sp, GAINS, integ, PARAMS, 0.001)
        assert np.all(np.abs(integ.value) <= 0.5 + 1e-12)
    assert integ.value[1] == 0.5


def test_integral_reset():
    integ = AttitudeIntegral(np.array([0.1, 0.2, 0.3]), 0.5)
    out = integ.reset()
    assert np.array_equal(out.value, np.zeros(3))
    assert out.clamp == 0.5


def test_rejection_force_zero():
    est = estimation.EstimatorState.fresh(
        VehicleState.at_rest([0.0, 0.0, 1.2]), PARAMS, 20.0)
    assert np.array_equal(rejection_force(est, np.eye(3)), np.zeros(3))


def test_rejection_force_sign_flip():
    est = estimation.EstimatorState.fresh(
        VehicleState.at_rest([0.0, 0.0, 1.2]), PARAMS, 20.0)
    est.delta_hat = np.array([0.0, 0.0, -5.0])
    assert np.allclose(rejection_force(est, np.eye(3)), [0.0, 0.0, 5.0])


def test_rejection_force_rotated_frame():
    est = estimation.EstimatorState.fresh(
        VehicleState.at_rest([0.0, 0.0, 1.2]), PARAMS, 20.0)
    est.delta_hat = np.array([1.0, 0.0, 0.0])
    assert np.allclose(rejection_force(est, rot_y(math.pi / 2)),
                       [0.0, 0.0, -1.0], atol=1e-12)


def test_perch_wrench_zero_rho():
    state = VehicleState.at_rest([1.0, 0.0, 1.2])
    w = perch_wrench(0.0, state, PARAMS)
    assert np.array_equal(w.f, np.zeros(3))
    assert np.array_equal(w.tau, np.zeros(3))


def test_perch_wrench_half_gravity():
    state = VehicleState.at_rest([1.0, 0.0, 1.2])
    w = perch_wrench(0.5, state, PARAMS)
    assert np.allclose(w.f, [0.0, 0.0, 0.5 * MG], atol=1e-9)
    assert np.allclose(w.f[2], 8.09, atol=0.01)
    assert np.array_equal(w.tau, np.zeros(3))


def test_perch_wrench_rotated_frame():
    state = VehicleState.at_rest([1.0, 0.0, 1.2], rot_y(math.pi / 2))
    w = perch_wrench(0.5, state, PARAMS)
    assert np.allclose(w.f, [-0.5 * MG, 0.0, 0.0], atol=1e-9)
    # World-frame force is still half of gravity compensation.
    assert np.allclose(state.R @ w.f, [0.0, 0.0, 0.5 * MG], atol=1e-9)


def test_perch_wrench_rejects_bad_rho():
    state = VehicleState.at_rest([1.0, 0.0, 1.2])
    with pytest.raises(ValueError):
        perch_wrench(1.0, state, PARAMS)
    with pytest.raises(ValueError):
        perch_wrench(-0.1, state, PARAMS)
