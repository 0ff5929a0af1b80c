//! Terrain-aware locomotion planning for quadrupeds.
//!
//! The crate is organised bottom-up:
//!
//! * [`terrain`]: continuous synthetic terrains and heightmap extraction,
//! * [`robot`]: geometry, gait descriptors, hip kinematics, swing arcs,
//! * [`fec`]: per-cell foothold evaluation criteria and the safe count,
//! * [`vfa`]: foothold adaptation (pick the safe cell closest to nominal),
//! * [`vpa`]: pose adaptation (fit safe-count curves over hip height and
//!   optimise the body pose against them),
//! * [`tbr`]: the plane-fit baseline pose reference.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below name the `f64` instantiations used by the simulator.

// `!(x > 0)` is deliberate: it rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fec;
mod geometry;
pub mod robot;
mod scalar;
pub mod tbr;
pub mod terrain;
pub mod vfa;
pub mod vpa;

pub use geometry::{cardan_rotation, rotate, Vec3};
pub use scalar::Scalar;

pub type Vec3f64 = Vec3<f64>;
pub type TerrainMap64 = terrain::TerrainMap<f64>;
pub type Heightmap64 = terrain::Heightmap<f64>;
pub type RobotModel64 = robot::RobotModel<f64>;
pub type GaitParams64 = robot::GaitParams<f64>;
pub type BodyTwist64 = robot::BodyTwist<f64>;
pub type Pose64 = robot::Pose<f64>;
pub type FecConfig64 = fec::FecConfig<f64>;
pub type SafeFootholdFunction64 = vpa::SafeFootholdFunction<f64>;
pub type PoseOptProblem64 = vpa::PoseOptProblem<f64>;

pub type Vec3f32 = Vec3<f32>;
pub type Heightmap32 = terrain::Heightmap<f32>;
pub type SafeFootholdFunction32 = vpa::SafeFootholdFunction<f32>;
