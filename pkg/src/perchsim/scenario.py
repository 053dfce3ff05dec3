"""Scenario configuration: declarative experiment description and file format.

Scenario files are flat ``key = value`` text with ``#`` comments.  Vector
values are whitespace-separated numbers; ``event`` and ``disturbance`` keys
may repeat.  The first non-comment line must set ``schema_version = 1``.
"""

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .allocation import RotorGeometry
from .control import Gains
from .geometry import rot_y
from .planner import PerchPlanConfig
from .supervisor import SwitchConfig
from .vehicle import VehicleParams, WallModel

SCHEMA_VERSION = 1

VARIANTS = ("proposed", "no-transitions-rho0", "no-transitions-rho0.5",
            "no-freeze")

MISSIONS = ("perch", "hover")


class ScenarioError(ValueError):
    """Malformed scenario file or invalid configuration value."""


@dataclass
class ScenarioConfig:
    name: str = "default"
    variant: str = "proposed"
    mission: str = "perch"
    dt: float = 0.001
    duration: float = 30.0
    seed: int = 0
    # vehicle
    mass: float = 1.65
    inertia_diag: tuple = (0.008, 0.008, 0.014)
    gravity: float = 9.81
    arm_length: float = 0.13
    k_tau: float = 0.016
    thrust_max: float = 8.0
    rotor_tau: float = 0.05
    tilt_rate_max: float = 8.0
    perch_servo_time: float = 0.05
    # wall
    wall_point: tuple = (1.0, 0.0, 1.2)
    wall_normal: tuple = (-1.0, 0.0, 0.0)
    magnet_force: float = 40.0
    magnet_range: float = 0.05
    attach_tol: float = 0.001
    magnet_offset: tuple = (0.0, 0.0, -0.05)
    # gains
    k_tp: float = 10.0
    k_td: float = 6.0
    k_rp: float = 60.0
    k_rd: float = 15.0
    k_ri: float = 3.0
    integral_clamp: float = 0.5
    estimator_gain: float = 20.0
    # switching
    lambda_f2p: float = 1.0
    lambda_p2f: float = -1.0
    rho: float = 0.5
    # planning
    hover_position: tuple = (0.0, 0.0, 1.2)
    hover_pitch: float = 0.0
    standoff: float = 0.5
    penetration: float = 0.1
    t_approach: float = 4.0
    t_contact: float = 3.0
    hold_time: float = 1.0
    initial_offset: tuple = (0.0, 0.0, 0.0)
    # metrics
    clearance_arm: float = 0.05
    settle_tol: float = 0.02
    # noise (off by default; acceptance runs are noise-free)
    noise_std_pos: float = 0.0
    noise_std_vel: float = 0.0
    # schedules
    events: list = field(default_factory=list)        # (time, "s_f2p"|"s_p2f")
    disturbances: list = field(default_factory=list)  # (t0, t1, fx..rz)

    def validate(self):
        if not 0.0 < self.dt <= 0.01:
            raise ScenarioError("dt must lie in (0, 0.01]")
        if self.duration <= 0:
            raise ScenarioError("duration must be positive")
        if self.variant not in VARIANTS:
            raise ScenarioError(f"unknown variant {self.variant!r}")
        if self.mission not in MISSIONS:
            raise ScenarioError(f"unknown mission {self.mission!r}")
        if sorted(t for t, _ in self.events) != [t for t, _ in self.events]:
            raise ScenarioError("events must be time-sorted")
        for t, kind in self.events:
            if kind not in ("s_f2p", "s_p2f"):
                raise ScenarioError(f"unknown event kind {kind!r}")
        return self

    def build(self):
        """Instantiate the module-level parameter objects."""
        self.validate()
        rotors = RotorGeometry.x_config(self.arm_length, self.k_tau)
        params = VehicleParams(
            m=self.mass, Jb=np.diag(self.inertia_diag), g=self.gravity,
            rotors=rotors, T_max=self.thrust_max, tau_rotor=self.rotor_tau,
            tilt_rate_max=self.tilt_rate_max, t_ps=self.perch_servo_time)
        wall = WallModel(
            point=np.asarray(self.wall_point), normal=np.asarray(self.wall_normal),
            F_mag=self.magnet_force, d_mag=self.magnet_range,
            eps_attach=self.attach_tol, c_m=np.asarray(self.magnet_offset))
        gains = Gains(self.k_tp, self.k_td, self.k_rp, self.k_rd, self.k_ri)
        rho = self.rho
        if self.variant == "no-transitions-rho0":
            rho = 0.0
        elif self.variant == "no-transitions-rho0.5":
            rho = 0.5
        switch = SwitchConfig(self.lambda_f2p, self.lambda_p2f, rho)
        plan = PerchPlanConfig(
            d_off=self.standoff, delta_in=self.penetration,
            T12=self.t_approach, T23=self.t_contact,
            hover_p=np.asarray(self.hover_position),
            hover_R=rot_y(self.hover_pitch))
        return params, wall, gains, switch, plan


_VEC3_KEYS = {"wall_point", "wall_normal", "magnet_offset", "hover_position",
              "initial_offset", "inertia_diag"}
_STR_KEYS = {"name", "variant", "mission"}
_INT_KEYS = {"seed", "schema_version"}


def _parse_value(key, raw):
    parts = raw.split()
    try:
        if key in _STR_KEYS:
            return raw.strip()
        if key in _INT_KEYS:
            return int(raw)
        if key in _VEC3_KEYS:
            vals = tuple(float(x) for x in parts)
            if len(vals) != 3:
                raise ScenarioError(f"{key} expects 3 numbers")
            return vals
        if len(parts) != 1:
            raise ScenarioError(f"{key} expects a single number")
        return float(raw)
    except ValueError as exc:
        raise ScenarioError(f"bad value for {key}: {raw!r}") from exc


def parse_scenario(text):
    """Parse scenario text into a ScenarioConfig; raises ScenarioError."""
    cfg = ScenarioConfig()
    known = set(asdict(cfg)) - {"events", "disturbances"}
    saw_version = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if not saw_version:
            if key != "schema_version":
                raise ScenarioError("first entry must be schema_version")
            if _parse_value(key, raw) != SCHEMA_VERSION:
                raise ScenarioError(f"unsupported schema_version {raw}")
            saw_version = True
            continue
        if key == "event":
            parts = raw.split()
            if len(parts) != 2:
                raise ScenarioError(f"line {lineno}: event expects 'time kind'")
            cfg.events.append((float(parts[0]), parts[1].lower()))
        elif key == "disturbance":
            parts = [float(x) for x in raw.split()]
            if len(parts) != 8:
                raise ScenarioError(
                    f"line {lineno}: disturbance expects 8 numbers "
                    "(start end fx fy fz rx ry rz)")
            cfg.disturbances.append(tuple(parts))
        elif key in known:
            setattr(cfg, key, _parse_value(key, raw))
        else:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
    if not saw_version:
        raise ScenarioError("missing schema_version header")
    cfg.validate()
    return cfg


def load_scenario(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def default_scenario():
    """Built-in perch/unperch mission mirroring the reference experiment."""
    cfg = ScenarioConfig()
    cfg.events = [(6.0, "s_f2p"), (15.0, "s_p2f")]
    # Near-wall attraction/aero bias, active once the approach begins.
    cfg.disturbances = [(4.0, 30.0, 1.5, 0.0, 0.0, 0.0, 0.0, 0.0)]
    return cfg.validate()


SCHEMA_DOC = """\
Scenario file schema (version 1)
================================
Flat text, one `key = value` per line, `#` starts a comment.
The first entry must be `schema_version = 1`.

Scalars (floats unless noted):
  name, variant, mission           strings; variant in {proposed,
                                   no-transitions-rho0, no-transitions-rho0.5,
                                   no-freeze}; mission in {perch, hover}
  dt (s, in (0, 0.01]), duration (s), seed (int)
  mass (kg), gravity (m/s^2), arm_length (m), k_tau (m), thrust_max (N),
  rotor_tau (s), tilt_rate_max (rad/s), perch_servo_time (s)
  magnet_force (N), magnet_range (m), attach_tol (m)
  k_tp, k_td, k_rp, k_rd, k_ri     diagonal controller gains
  integral_clamp (rad s), estimator_gain (1/s)
  lambda_f2p (N), lambda_p2f (N), rho
  hover_pitch (rad), standoff (m), penetration (m),
  t_approach (s), t_contact (s), hold_time (s)
  clearance_arm (m), settle_tol (m)
  noise_std_pos (m), noise_std_vel (m/s)

Vectors (three numbers):
  inertia_diag (kg m^2), wall_point (m), wall_normal,
  magnet_offset (m, body frame), hover_position (m), initial_offset (m)

Repeatable:
  event = <time_s> <s_f2p|s_p2f>
  disturbance = <start_s> <end_s> <fx> <fy> <fz> <rx> <ry> <rz>
                (world-frame force N, body-frame angular accel rad/s^2)

Exit codes of the CLI: 0 ok, 2 scenario/schema error, 3 numerical abort.
"""
