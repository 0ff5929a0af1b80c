//! Pose adaptation.
//!
//! For every leg the safe-foothold count is sampled over a finite set of
//! hip heights ([`pose_evaluation`]), a Gaussian RBF is fitted to the
//! samples ([`fit_rbf`]), and the body pose `u = (z_b, roll, pitch)` is
//! chosen to maximise a cost of the four fitted functions evaluated at
//! the hip heights the pose induces ([`optimize_pose_single`],
//! [`optimize_pose_receding`]).

mod cost;
mod evaluation;
mod optimize;
mod rbf;

use thiserror::Error;

pub use cost::{cost_int, cost_prod, cost_smooth, cost_sum, envelope_error, CostKind, CostParams};
pub use evaluation::{assumed_liftoff, horizon_center, pose_evaluation, pose_evaluation_from, SafeFootholdSamples};
pub use optimize::{
    hip_heights, optimize_pose_receding, optimize_pose_single, pose_objective, receding_objective, Bounds, PoseOptProblem,
    PoseSolution,
};
pub use rbf::{fit_rbf, HipHeightSet, SafeFootholdFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VpaError {
    #[error("hip height set needs z_min < z_max and at least two samples")]
    HipHeights,
    #[error("at least one basis function is required")]
    BasisCount,
    #[error("least-squares solve failed")]
    Fit,
    #[error("unknown cost kind `{0}`")]
    UnknownCost(String),
    #[error("invalid cost parameters: {0}")]
    Cost(&'static str),
    #[error("invalid pose problem: {0}")]
    Problem(&'static str),
}
