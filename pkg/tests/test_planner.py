"""Planner tests: setpoint geometry, quintic/cubic primitives, sampling."""

import math

import numpy as np
import pytest

from perchsim.geometry import exp_so3, pitch_of, rot_y
from perchsim.planner import (PerchPlanConfig, Plan, connect, hold_segment,
                              min_accel_rotation, min_jerk_segment,
                              perch_orientation, perch_setpoints)
from perchsim.vehicle import WallModel

WALL = WallModel(point=np.array([1.0, 0.0, 1.2]),
                 normal=np.array([-1.0, 0.0, 0.0]))


def interface_x(sp):
    return float((sp.p + sp.R @ WALL.c_m)[0])


def test_setpoint_standoff_interface():
    cfg = PerchPlanConfig(d_off=0.5, delta_in=0.1)
    sp1, sp2, sp3 = perch_setpoints(WALL, cfg)
    assert abs(interface_x(sp2) - 0.5) < 1e-12
    assert abs(interface_x(sp3) - 1.1) < 1e-12
    assert np.allclose(sp1.p, cfg.hover_p)


def test_setpoint_zero_penetration_on_surface():
    cfg = PerchPlanConfig(d_off=0.5, delta_in=0.0)
    _, _, sp3 = perch_setpoints(WALL, cfg)
    assert abs(interface_x(sp3) - 1.0) < 1e-12


def test_perch_orientation_faces_wall():
    R = perch_orientation(WALL)
    # Bottom (-b3) aligned with -n: magnet face toward the wall.
    assert np.allclose(R @ np.array([0.0, 0.0, -1.0]), -WALL.normal,
                       atol=1e-12)
    assert np.linalg.norm(R.T @ R - np.eye(3)) < 1e-12
    assert abs(abs(pitch_of(R)) - math.pi / 2) < 1e-9


def test_perch_orientation_rejects_horizontal_wall():
    wall = WallModel(point=np.zeros(3), normal=np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        perch_orientation(wall)


def test_min_jerk_rest_to_rest_profile():
    seg = min_jerk_segment([0.0, 0.0, 0.0], np.zeros(3), np.zeros(3),
                           [1.0, 0.0, 0.0], np.zeros(3), np.zeros(3), 2.0)
    p, v, _ = seg.eval(1.0)
    assert abs(p[0] - 0.5) < 1e-12
    assert abs(v[0] - 0.9375) < 1e-12  # peak speed 15/(8 T)


def test_min_jerk_constant_trajectory():
    p0 = np.array([1.0, -2.0, 3.0])
    seg = min_jerk_segment(p0, np.zeros(3), np.zeros(3),
                           p0, np.zeros(3), np.zeros(3), 1.5)
    for t in (0.0, 0.6, 1.5):
        p, v, a = seg.eval(t)
        assert np.allclose(p, p0, atol=1e-12)
        assert np.allclose(v, 0.0, atol=1e-12)
        assert np.allclose(a, 0.0, atol=1e-12)


def test_min_jerk_boundary_exactness():
    rng = np.random.default_rng(16)
    for _ in range(50):
        b = rng.normal(size=(6, 3))
        T = rng.uniform(0.5, 5.0)
        seg = min_jerk_segment(*b, T)
        for t, trio in ((0.0, b[:3]), (T, b[3:])):
            out = seg.eval(t)
            for got, want in zip(out, trio):
                assert np.max(np.abs(got - want)) < 1e-9


def test_min_jerk_rejects_bad_duration():
    z = np.zeros(3)
    with pytest.raises(ValueError):
        min_jerk_segment(z, z, z, z, z, z, 0.0)


def test_jerk_cost_matches_quadrature():
    rng = np.random.default_rng(17)
    for _ in range(10):
        b = rng.normal(size=(6, 3))
        T = rng.uniform(0.5, 3.0)
        seg = min_jerk_segment(*b, T)
        ts = np.linspace(0.0, T, 20001)
        c = seg.coeffs
        jerk = (6.0 * c[:, 3:4] + 24.0 * c[:, 4:5] * ts
                + 60.0 * c[:, 5:6] * ts ** 2)
        quad = np.trapezoid(np.sum(jerk ** 2, axis=0), ts)
        assert abs(seg.jerk_cost() - quad) < 1e-6 * max(1.0, quad)


def test_min_accel_constant_rotation():
    R = rot_y(0.4)
    seg = min_accel_rotation(R, R, np.zeros(3), np.zeros(3), 2.0)
    for t in (0.0, 1.0, 2.0):
        Rt, omega = seg.eval(t)
        assert np.allclose(Rt, R, atol=1e-12)
        assert np.allclose(omega, 0.0, atol=1e-12)


def test_min_accel_cubic_midpoint_pitch():
    seg = min_accel_rotation(np.eye(3), rot_y(math.pi / 2),
                             np.zeros(3), np.zeros(3), 2.0)
    Rt, _ = seg.eval(1.0)
    assert abs(pitch_of(Rt) - math.pi / 4) < 1e-9


def test_min_accel_endpoint_exactness():
    rng = np.random.default_rng(18)
    for _ in range(100):
        a0, a1 = rng.normal(size=(2, 3))
        R0 = exp_so3(a0 / np.linalg.norm(a0) * rng.uniform(0, 2.0))
        Rf = R0 @ exp_so3(a1 / np.linalg.norm(a1) * rng.uniform(0, 2.5))
        w0, wf = 0.3 * rng.normal(size=(2, 3))
        T = rng.uniform(0.5, 4.0)
        seg = min_accel_rotation(R0, Rf, w0, wf, T)
        Rt0, om0 = seg.eval(0.0)
        RtT, omT = seg.eval(T)
        assert np.linalg.norm(Rt0 - R0) < 1e-9
        assert np.linalg.norm(RtT - Rf) < 1e-9
        assert np.max(np.abs(om0 - w0)) < 1e-9
        assert np.max(np.abs(omT - wf)) < 1e-9


def test_min_accel_rejects_antipodal():
    with pytest.raises(ValueError):
        min_accel_rotation(np.eye(3), np.diag([1.0, -1.0, -1.0]),
                           np.zeros(3), np.zeros(3), 1.0)


def _two_segment_plan():
    cfg = PerchPlanConfig()
    sp1, sp2, _ = perch_setpoints(WALL, cfg)
    return Plan([hold_segment(sp1.p, sp1.R, 1.0),
                 connect(sp1, sp2, 4.0, start=1.0)]), sp1, sp2


def test_plan_sample_start_exact():
    plan, sp1, _ = _two_segment_plan()
    out = plan.sample(0.0)
    assert np.array_equal(out.p, sp1.p)
    assert np.array_equal(out.v, np.zeros(3))


def test_plan_terminal_hold():
    plan, _, sp2 = _two_segment_plan()
    out = plan.sample(plan.duration + 10.0)
    assert np.allclose(out.p, sp2.p, atol=1e-9)
    assert np.array_equal(out.v, np.zeros(3))
    assert np.array_equal(out.omega, np.zeros(3))
    assert np.linalg.norm(out.R - sp2.R) < 1e-9


def test_plan_derivative_consistency():
    plan, _, _ = _two_segment_plan()
    dt = 1e-4
    for t in np.linspace(1.1, 4.9, 25):
        a = plan.sample(t - dt)
        b = plan.sample(t + dt)
        mid = plan.sample(t)
        fd_v = (b.p - a.p) / (2 * dt)
        assert np.max(np.abs(fd_v - mid.v)) < 1e-5
        # Body rate: R^T dR/dt is the hat of omega.
        dR = (b.R - a.R) / (2 * dt)
        W = mid.R.T @ dR
        omega_fd = np.array([W[2, 1], W[0, 2], W[1, 0]])
        assert np.max(np.abs(omega_fd - mid.omega)) < 1e-5


def test_plan_c1_continuity_at_joint():
    plan, _, _ = _two_segment_plan()
    eps = 1e-9
    a = plan.sample(1.0 - eps)
    b = plan.sample(1.0 + eps)
    assert np.max(np.abs(a.p - b.p)) < 1e-6
    assert np.max(np.abs(a.v - b.v)) < 1e-6
    assert np.max(np.abs(a.omega - b.omega)) < 1e-6


def test_plan_config_validation():
    with pytest.raises(ValueError):
        PerchPlanConfig(d_off=0.0)
    with pytest.raises(ValueError):
        PerchPlanConfig(T12=0.0)


def test_press_force_sizing_rule():
    # delta_in must press harder than lambda_f2p at the locked plant.
    cfg = PerchPlanConfig()
    press = 1.65 * 10.0 * cfg.delta_in
    assert press > 1.0
