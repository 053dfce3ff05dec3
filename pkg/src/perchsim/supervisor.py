"""Four-mode switching supervisor (F, F2P, P, P2F) and its two-mode ablation.

Operator signals are latched until their edge consumes them.  The perch-servo
target eta_d toggles only on the F->F2P edge (engage) and the P2F->F edge
(disengage).  The two-mode machine used by the no-transition ablations skips
both transition modes and collapses the eta_d edges onto its single switches.
"""

import enum
from dataclasses import dataclass, replace


class Mode(enum.Enum):
    F = "F"
    F2P = "F2P"
    P = "P"
    P2F = "P2F"


@dataclass
class SwitchConfig:
    lambda_f2p: float = 1.0          # N, compression threshold into P
    lambda_p2f: float = -1.0         # N, tension threshold back to F
    rho: float = 0.5                 # perch wrench gravity fraction

    def __post_init__(self):
        if not self.lambda_f2p > self.lambda_p2f:
            raise ValueError("lambda_f2p must exceed lambda_p2f")


@dataclass
class SupervisorState:
    mode: Mode = Mode.F
    eta_d: float = 0.0
    pending_f2p: bool = False
    pending_p2f: bool = False
    entered_at: float = 0.0

    def copy(self):
        return replace(self)


@dataclass
class PolicyDescriptor:
    """Per-mode wiring of controller, estimators, and planner target."""
    wrench: str                      # "full" | "nominal" | "perch"
    rejection_frozen: bool
    contact_active: bool
    planner_phase: str               # "free-flight" | "approach" | "hold" | "depart"


def transition(sup, lam_c, s_f2p, s_p2f, cfg, t=0.0):
    """One supervisor tick of the proposed four-mode machine."""
    pending_f2p = sup.pending_f2p or s_f2p
    pending_p2f = sup.pending_p2f or s_p2f
    mode, eta_d = sup.mode, sup.eta_d
    entered = sup.entered_at

    if mode is Mode.F and pending_f2p:
        mode, eta_d, pending_f2p, entered = Mode.F2P, 1.0, False, t
    elif mode is Mode.F2P and lam_c > cfg.lambda_f2p:
        mode, entered = Mode.P, t
    elif mode is Mode.P and pending_p2f:
        mode, pending_p2f, entered = Mode.P2F, False, t
    elif mode is Mode.P2F and lam_c < cfg.lambda_p2f:
        mode, eta_d, entered = Mode.F, 0.0, t

    return SupervisorState(mode, eta_d, pending_f2p, pending_p2f, entered)


_POLICIES = {
    Mode.F: PolicyDescriptor("full", False, False, "free-flight"),
    Mode.F2P: PolicyDescriptor("nominal", True, True, "approach"),
    Mode.P: PolicyDescriptor("perch", True, True, "hold"),
    Mode.P2F: PolicyDescriptor("nominal", True, True, "depart"),
}


def mode_policy(mode):
    return _POLICIES[mode]


def transition_two_mode(sup, lam_c, s_f2p, s_p2f, cfg, t=0.0):
    """Ablation machine without transition modes: F <-> P directly.

    The perch signal arms the servo immediately (eta_d <- 1); the switch to P
    fires once armed and the contact force confirms attachment.  The unperch
    signal drops straight back to F in one step.
    """
    pending_f2p = sup.pending_f2p or s_f2p
    pending_p2f = sup.pending_p2f or s_p2f
    mode, eta_d = sup.mode, sup.eta_d
    entered = sup.entered_at

    if mode is Mode.F:
        if pending_f2p and eta_d < 1.0:
            eta_d = 1.0
        if pending_f2p and lam_c > cfg.lambda_f2p:
            mode, pending_f2p, entered = Mode.P, False, t
    elif mode is Mode.P and pending_p2f:
        mode, eta_d, pending_p2f, entered = Mode.F, 0.0, False, t

    return SupervisorState(mode, eta_d, pending_f2p, pending_p2f, entered)


_TWO_MODE_POLICIES = {
    Mode.F: PolicyDescriptor("full", False, True, "free-flight"),
    Mode.P: PolicyDescriptor("perch", False, True, "hold"),
}


def no_transition_policy(mode):
    return _TWO_MODE_POLICIES[mode]


_NO_FREEZE_POLICIES = {
    Mode.F: PolicyDescriptor("full", False, False, "free-flight"),
    Mode.F2P: PolicyDescriptor("full", False, True, "approach"),
    Mode.P: PolicyDescriptor("full", False, True, "hold"),
    Mode.P2F: PolicyDescriptor("full", False, True, "depart"),
}


def no_freeze_policy(mode):
    """Four-mode wiring that never freezes estimation and keeps motion
    control active while perched (saturation ablation)."""
    return _NO_FREEZE_POLICIES[mode]
