//! Quadruped geometry, gait descriptors and the kinematic helpers the
//! foothold criteria are built on.

mod gait;
mod kinematics;
mod swing;

pub use gait::{BodyTwist, GaitError, GaitParams};
pub use kinematics::{
    hip_height, hip_world, nominal_foothold, nominal_liftoff, workspace_contains, Pose,
};
pub use swing::{swing_trajectory, SwingError, SwingTrajectory};

use thiserror::Error;

use crate::{Scalar, Vec3};

/// Legs in the fixed order used by every per-leg array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leg {
    LF,
    RF,
    LH,
    RH,
}

impl Leg {
    pub const ALL: [Leg; 4] = [Leg::LF, Leg::RF, Leg::LH, Leg::RH];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Leg::LF => "LF",
            Leg::RF => "RF",
            Leg::LH => "LH",
            Leg::RH => "RH",
        }
    }

    pub fn is_front(self) -> bool {
        matches!(self, Leg::LF | Leg::RF)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RobotError {
    #[error("workspace shell needs 0 < r_min < r_max (got {r_min}, {r_max})")]
    BadShell { r_min: f64, r_max: f64 },
    #[error("foot radius must be positive")]
    BadFootRadius,
    #[error("leg clearance must be non-negative")]
    BadClearance,
    #[error("hip offsets of {0} and its mirror are not left/right symmetric")]
    Asymmetric(&'static str),
    #[error("unknown robot preset `{0}`")]
    UnknownPreset(String),
}

/// Rigid quadruped description.
///
/// Each leg's workspace is a spherical shell `[r_min, r_max]` about its hip.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotModel<T> {
    /// Hip positions in the base frame, indexed by [`Leg::index`].
    pub hip_offsets: [Vec3<T>; 4],
    pub r_min: T,
    pub r_max: T,
    pub foot_radius: T,
    pub leg_clearance: T,
    pub default_step_height: T,
}

impl<T: Scalar> RobotModel<T> {
    /// HyQ-scale stand-in. Not measured values.
    pub fn hyq_like() -> Self {
        Self::symmetric(0.37, 0.20, 0.0, 0.30, 0.75, 0.02, 0.02, 0.12)
    }

    /// HyQReal-scale stand-in: longer trunk and legs.
    pub fn hyqreal_like() -> Self {
        Self::symmetric(0.44, 0.24, 0.0, 0.34, 0.82, 0.025, 0.02, 0.14)
    }

    pub fn preset(name: &str) -> Result<Self, RobotError> {
        match name {
            "hyq-like" => Ok(Self::hyq_like()),
            "hyqreal-like" => Ok(Self::hyqreal_like()),
            other => Err(RobotError::UnknownPreset(other.to_string())),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn symmetric(
        half_length: f64,
        half_width: f64,
        hip_z: f64,
        r_min: f64,
        r_max: f64,
        foot_radius: f64,
        leg_clearance: f64,
        step_height: f64,
    ) -> Self {
        let hip = |sx: f64, sy: f64| Vec3::new(T::lit(sx * half_length), T::lit(sy * half_width), T::lit(hip_z));
        Self {
            hip_offsets: [hip(1.0, 1.0), hip(1.0, -1.0), hip(-1.0, 1.0), hip(-1.0, -1.0)],
            r_min: T::lit(r_min),
            r_max: T::lit(r_max),
            foot_radius: T::lit(foot_radius),
            leg_clearance: T::lit(leg_clearance),
            default_step_height: T::lit(step_height),
        }
    }

    pub fn hip_offset(&self, leg: Leg) -> Vec3<T> {
        self.hip_offsets[leg.index()]
    }

    pub fn validate(&self) -> Result<(), RobotError> {
        if !(self.r_min > T::zero() && self.r_min < self.r_max) {
            return Err(RobotError::BadShell { r_min: self.r_min.to_f64_lossy(), r_max: self.r_max.to_f64_lossy() });
        }
        if !(self.foot_radius > T::zero()) {
            return Err(RobotError::BadFootRadius);
        }
        if !(self.leg_clearance >= T::zero()) {
            return Err(RobotError::BadClearance);
        }
        let tol = T::lit(1e-9);
        for (a, b) in [(Leg::LF, Leg::RF), (Leg::LH, Leg::RH)] {
            let (pa, pb) = (self.hip_offset(a), self.hip_offset(b));
            if (pa.y.abs() - pb.y.abs()).abs() > tol {
                return Err(RobotError::Asymmetric(a.name()));
            }
        }
        Ok(())
    }
}
