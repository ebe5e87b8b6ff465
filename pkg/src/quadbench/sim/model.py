"""Robot description: masses, geometry, drive gains, contact parameters.

The model is exactly left-right mirror symmetric by construction: a single
parameter set describes both sides, and per-leg quantities are derived from
it with side signs at use time.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import cos, sin

import numpy as np

# leg order used everywhere: front-left, front-right, rear-left, rear-right
LEG_NAMES = ("FL", "FR", "RL", "RR")
LEG_X_SIGN = np.array([1.0, 1.0, -1.0, -1.0])
LEG_Y_SIGN = np.array([1.0, -1.0, 1.0, -1.0])
# joint order within a leg: hip abduction, hip flexion, knee
JOINTS_PER_LEG = 3
NUM_JOINTS = 12

# index pairs swapped by a left-right reflection (FL<->FR, RL<->RR)
MIRROR_LEG_PAIRS = ((0, 1), (2, 3))


def default_joint_pose() -> np.ndarray:
    """Standing pose: zero abduction, thigh pitched forward, knee folded."""
    return np.tile(np.array([0.0, 0.8, -1.6]), 4)


@dataclass
class RobotModel:
    """Parameters of the simulated quadruped.

    Legs are modeled as massless linkages carrying small point masses; the
    per-joint effective inertias are derived from those masses at the
    default pose and held constant.
    """

    body_mass: float = 13.5                       # total robot mass, kg
    body_inertia: tuple = (0.15, 0.35, 0.40)      # diagonal, body frame, kg m^2
    effective_body_length: float = 0.36           # front-to-rear hip distance, m
    hip_half_spacing: float = 0.095               # hip lateral offset, m
    abduction_offset: float = 0.08                # hip roll link length, m
    thigh_length: float = 0.2
    shank_length: float = 0.2
    thigh_mass: float = 0.2                       # point mass at mid-thigh, kg
    shank_mass: float = 0.1                       # point mass at mid-shank, kg
    foot_mass: float = 0.05                       # point mass at the foot, kg
    theta0: np.ndarray = field(default_factory=default_joint_pose)
    kp: float = 20.0                              # drive stiffness, N m / rad
    kd: float = 0.5                               # drive damping, N m s / rad
    tau_rated: float = 6.7                        # rated joint torque, N m
    tau_max: float = 33.5                         # hard torque clamp, N m
    foot_friction: float = 0.8
    foot_radius: float = 0.02
    knee_radius: float = 0.03
    body_half_extents: tuple = (0.22, 0.12, 0.06)
    contact_stiffness: float = 5000.0             # penalty spring, N / m
    contact_damping: float = 50.0                 # normal damping, N s / m
    tangent_damping: float = 30.0                 # pre-cap friction damping, N s / m
    substeps: int = 2                             # micro-steps per step() call
    gravity: float = 9.81
    joint_inertia: tuple | None = None            # (abduction, hip, knee); derived if None

    def __post_init__(self):
        self.theta0 = np.asarray(self.theta0, dtype=np.float64)
        if self.theta0.shape != (NUM_JOINTS,):
            raise ValueError("theta0 must have 12 entries")
        if not (self.tau_max >= self.tau_rated > 0.0):
            raise ValueError("need tau_max >= tau_rated > 0")
        for name in ("body_mass", "thigh_mass", "shank_mass", "foot_mass",
                     "thigh_length", "shank_length", "effective_body_length"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.joint_inertia is None:
            self.joint_inertia = self._derive_joint_inertia()

    def _derive_joint_inertia(self) -> tuple:
        """Effective 1-DOF inertias from the point masses at the default pose."""
        phi, knee = self.theta0[1], self.theta0[2]
        lt, ls = self.thigh_length, self.shank_length
        psi = phi + knee
        # positions relative to the hip flexion axis, sagittal plane
        thigh_mid = np.array([-0.5 * lt * sin(phi), -0.5 * lt * cos(phi)])
        knee_pt = 2.0 * thigh_mid
        shank_mid = knee_pt + np.array([-0.5 * ls * sin(psi), -0.5 * ls * cos(psi)])
        foot_pt = knee_pt + np.array([-ls * sin(psi), -ls * cos(psi)])
        i_knee = self.shank_mass * (0.5 * ls) ** 2 + self.foot_mass * ls ** 2
        i_hip = (self.thigh_mass * float(thigh_mid @ thigh_mid)
                 + self.shank_mass * float(shank_mid @ shank_mid)
                 + self.foot_mass * float(foot_pt @ foot_pt))
        leg_mass = self.thigh_mass + self.shank_mass + self.foot_mass
        i_abd = i_hip + leg_mass * self.abduction_offset ** 2
        return (i_abd, i_hip, i_knee)

    @property
    def hip_x(self) -> float:
        return 0.5 * self.effective_body_length

    def joint_inertia_vector(self) -> np.ndarray:
        """12-entry inertia vector in canonical joint order."""
        return np.tile(np.asarray(self.joint_inertia, dtype=np.float64), 4)

    def with_scales(self, friction_scale=1.0, mass_scale=1.0,
                    kp_scale=1.0, kd_scale=1.0) -> "RobotModel":
        """Scaled copy used by domain randomization; inertias re-derived."""
        return replace(
            self,
            foot_friction=self.foot_friction * friction_scale,
            body_mass=self.body_mass * mass_scale,
            thigh_mass=self.thigh_mass * mass_scale,
            shank_mass=self.shank_mass * mass_scale,
            foot_mass=self.foot_mass * mass_scale,
            body_inertia=tuple(i * mass_scale for i in self.body_inertia),
            kp=self.kp * kp_scale,
            kd=self.kd * kd_scale,
            joint_inertia=None,
        )
