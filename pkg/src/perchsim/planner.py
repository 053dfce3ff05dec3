"""Closed-form trajectory primitives and perch setpoint generation.

Translation segments are per-axis quintics (minimum integrated squared jerk
for the given boundary states); rotation segments are cubic polynomials in
exponential coordinates anchored at the initial rotation, which makes the
boundary rotations and body rates exact and keeps the sampled body rate the
analytic derivative of the parameterization.
"""

import math
from dataclasses import dataclass

import numpy as np

from .control import Setpoint
from .geometry import B3, exp_so3, log_so3, right_jacobian, right_jacobian_inv


@dataclass
class PerchPlanConfig:
    d_off: float = 0.5               # standoff of setpoint (2) from surface, m
    delta_in: float = 0.1            # penetration of setpoint (3), m
    T12: float = 4.0                 # hover -> standoff duration, s
    T23: float = 3.0                 # standoff -> contact duration, s
    hover_p: np.ndarray = None
    hover_R: np.ndarray = None

    def __post_init__(self):
        if self.d_off <= 0 or self.delta_in < 0:
            raise ValueError("d_off must be positive, delta_in nonnegative")
        if self.T12 <= 0 or self.T23 <= 0:
            raise ValueError("segment durations must be positive")
        if self.hover_p is None:
            self.hover_p = np.array([0.0, 0.0, 1.2])
        if self.hover_R is None:
            self.hover_R = np.eye(3)
        self.hover_p = np.asarray(self.hover_p, dtype=float)
        self.hover_R = np.asarray(self.hover_R, dtype=float)


@dataclass
class TranslationSegment:
    coeffs: np.ndarray               # (3, 6) ascending quintic coefficients
    duration: float

    def eval(self, t):
        c = self.coeffs
        t2, t3, t4, t5 = t * t, t ** 3, t ** 4, t ** 5
        p = c @ np.array([1.0, t, t2, t3, t4, t5])
        v = c @ np.array([0.0, 1.0, 2 * t, 3 * t2, 4 * t3, 5 * t4])
        a = c @ np.array([0.0, 0.0, 2.0, 6 * t, 12 * t2, 20 * t3])
        return p, v, a

    def jerk_cost(self):
        """Exact integral of squared jerk over the segment."""
        T = self.duration
        total = 0.0
        for ax in range(3):
            c3, c4, c5 = self.coeffs[ax, 3:6]
            # jerk = 6 c3 + 24 c4 t + 60 c5 t^2
            j0, j1, j2 = 6.0 * c3, 24.0 * c4, 60.0 * c5
            total += (j0 * j0 * T + j0 * j1 * T ** 2
                      + (j1 * j1 / 3.0 + 2.0 * j0 * j2 / 3.0) * T ** 3
                      + j1 * j2 / 2.0 * T ** 4 + j2 * j2 / 5.0 * T ** 5)
        return total


def min_jerk_segment(p0, v0, a0, pf, vf, af, T):
    """Unique quintic matching both full boundary states."""
    if T <= 0:
        raise ValueError("segment duration must be positive")
    p0, v0, a0 = (np.asarray(x, float) for x in (p0, v0, a0))
    pf, vf, af = (np.asarray(x, float) for x in (pf, vf, af))
    coeffs = np.zeros((3, 6))
    M = np.array([
        [T ** 3, T ** 4, T ** 5],
        [3 * T ** 2, 4 * T ** 3, 5 * T ** 4],
        [6 * T, 12 * T ** 2, 20 * T ** 3],
    ])
    for ax in range(3):
        c0, c1, c2 = p0[ax], v0[ax], 0.5 * a0[ax]
        rhs = np.array([
            pf[ax] - (c0 + c1 * T + c2 * T ** 2),
            vf[ax] - (c1 + 2 * c2 * T),
            af[ax] - 2 * c2,
        ])
        c345 = np.linalg.solve(M, rhs)
        coeffs[ax] = [c0, c1, c2, *c345]
    return TranslationSegment(coeffs, float(T))


@dataclass
class RotationSegment:
    R0: np.ndarray
    coeffs: np.ndarray               # (3, 4) ascending cubic for phi(t)
    duration: float

    def eval(self, t):
        c = self.coeffs
        phi = c[:, 1] * t + c[:, 2] * t ** 2 + c[:, 3] * t ** 3
        dphi = c[:, 1] + 2 * c[:, 2] * t + 3 * c[:, 3] * t ** 2
        R = self.R0 @ exp_so3(phi)
        omega = right_jacobian(phi) @ dphi
        return R, omega


def min_accel_rotation(R0, Rf, w0, wf, T):
    """Cubic in exponential coordinates from R0, exact at both endpoints."""
    if T <= 0:
        raise ValueError("segment duration must be positive")
    phi_f = log_so3(np.asarray(R0, float).T @ np.asarray(Rf, float))
    if np.linalg.norm(phi_f) >= math.pi - 1e-6:
        raise ValueError("rotation endpoints are antipodal or nearly so")
    dphi0 = np.asarray(w0, dtype=float)              # J_r(0) = I
    dphif = right_jacobian_inv(phi_f) @ np.asarray(wf, dtype=float)
    coeffs = np.zeros((3, 4))
    coeffs[:, 1] = dphi0
    # Solve a T^2 + b T^3 = phi_f - dphi0 T ; 2 a T + 3 b T^2 = dphif - dphi0
    for ax in range(3):
        rhs = np.array([phi_f[ax] - dphi0[ax] * T, dphif[ax] - dphi0[ax]])
        M = np.array([[T ** 2, T ** 3], [2 * T, 3 * T ** 2]])
        coeffs[ax, 2:] = np.linalg.solve(M, rhs)
    return RotationSegment(np.asarray(R0, float).copy(), coeffs, float(T))


@dataclass
class PlanSegment:
    translation: TranslationSegment
    rotation: RotationSegment
    start: float                     # plan-relative start time, s


class Plan:
    """Piecewise trajectory; holds the terminal pose beyond the last segment."""

    def __init__(self, segments):
        self.segments = segments
        self.duration = segments[-1].start + segments[-1].translation.duration

    def sample(self, t):
        if t < 0:
            t = 0.0
        if t >= self.duration:
            seg = self.segments[-1]
            T = seg.translation.duration
            p, _, _ = seg.translation.eval(T)
            R, _ = seg.rotation.eval(T)
            return Setpoint(p, np.zeros(3), np.zeros(3), R, np.zeros(3))
        for seg in reversed(self.segments):
            if t >= seg.start:
                tau = t - seg.start
                p, v, a = seg.translation.eval(tau)
                R, omega = seg.rotation.eval(tau)
                return Setpoint(p, v, a, R, omega)
        raise AssertionError("unreachable")


def hold_segment(p, R, T, start=0.0):
    """Constant-pose segment used for hovers and terminal waits."""
    tr = min_jerk_segment(p, np.zeros(3), np.zeros(3),
                          p, np.zeros(3), np.zeros(3), T)
    rot = min_accel_rotation(R, R, np.zeros(3), np.zeros(3), T)
    return PlanSegment(tr, rot, start)


def perch_orientation(wall):
    """Body attitude at the wall: bottom (-b3) facing the wall, x axis up."""
    n = wall.normal
    up = B3 - (B3 @ n) * n
    nu = np.linalg.norm(up)
    if nu < 1e-9:
        raise ValueError("wall normal may not be vertical")
    up = up / nu
    return np.column_stack([up, np.cross(n, up), n])


def perch_setpoints(wall, cfg):
    """Hover (1), standoff (2), and behind-surface (3) pose setpoints."""
    R = perch_orientation(wall)
    offset = R @ wall.c_m
    n = wall.normal
    p2 = wall.point + cfg.d_off * n - offset
    p3 = wall.point - cfg.delta_in * n - offset
    return [
        Setpoint.hold(cfg.hover_p, cfg.hover_R),
        Setpoint.hold(p2, R),
        Setpoint.hold(p3, R),
    ]


def connect(sp_from, sp_to, T, start=0.0):
    """Min-jerk translation + min-accel rotation between two setpoints."""
    tr = min_jerk_segment(sp_from.p, sp_from.v, sp_from.a,
                          sp_to.p, sp_to.v, sp_to.a, T)
    rot = min_accel_rotation(sp_from.R, sp_to.R, sp_from.omega, sp_to.omega, T)
    return PlanSegment(tr, rot, start)
