use crate::fec::{FecConfig, FecError, FecEvaluator};
use crate::robot::{nominal_liftoff, BodyTwist, GaitParams, RobotModel};
use crate::terrain::Heightmap;
use crate::{Scalar, Vec3};

use super::{fit_rbf, HipHeightSet, SafeFootholdFunction, VpaError};

/// Safe-foothold counts per leg at every hip height of a [`HipHeightSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct SafeFootholdSamples<T> {
    pub heights: Vec<T>,
    /// `counts[leg][i]` is n_sf at `heights[i]`.
    pub counts: Vec<Vec<usize>>,
}

impl<T: Scalar> SafeFootholdSamples<T> {
    pub fn leg_count(&self) -> usize {
        self.counts.len()
    }

    /// `(z_h, n_sf)` pairs of one leg.
    pub fn pairs(&self, leg: usize) -> Vec<(T, T)> {
        self.heights.iter().zip(&self.counts[leg]).map(|(&z, &n)| (z, T::from_count(n))).collect()
    }

    /// One fitted function per leg.
    pub fn fit(&self, e: usize, heights: &HipHeightSet<T>) -> Result<Vec<SafeFootholdFunction<T>>, VpaError> {
        (0..self.leg_count()).map(|l| fit_rbf(&self.pairs(l), e, heights.z_min, heights.z_max)).collect()
    }
}

/// Lift-off point assumed when a hip is evaluated on its own patch: one
/// stride behind the nominal touchdown, on the patch's upper envelope.
pub fn assumed_liftoff<T: Scalar>(heightmap: &Heightmap<T>, twist: &BodyTwist<T>, gait: &GaitParams<T>) -> Vec3<T> {
    let (cx, cy) = heightmap.center();
    let (x, y) = nominal_liftoff(Vec3::new(cx, cy, T::zero()), twist, gait);
    Vec3::new(x, y, heightmap.envelope_height(x, y))
}

/// Counts safe footholds for every leg and every hip height, with each
/// leg lifting off from [`assumed_liftoff`].
///
/// Each heightmap must be centred on its hip's ground projection.
pub fn pose_evaluation<T: Scalar>(
    heightmaps: &[&Heightmap<T>],
    twist: BodyTwist<T>,
    gait: GaitParams<T>,
    heights: &HipHeightSet<T>,
    model: &RobotModel<T>,
    config: &FecConfig<T>,
) -> Result<SafeFootholdSamples<T>, FecError> {
    let feet: Vec<Vec3<T>> = heightmaps.iter().map(|hm| assumed_liftoff(hm, &twist, &gait)).collect();
    pose_evaluation_from(heightmaps, &feet, twist, gait, heights, model, config)
}

/// [`pose_evaluation`] with explicit lift-off positions, one per heightmap.
pub fn pose_evaluation_from<T: Scalar>(
    heightmaps: &[&Heightmap<T>],
    liftoff: &[Vec3<T>],
    twist: BodyTwist<T>,
    gait: GaitParams<T>,
    heights: &HipHeightSet<T>,
    model: &RobotModel<T>,
    config: &FecConfig<T>,
) -> Result<SafeFootholdSamples<T>, FecError> {
    assert_eq!(heightmaps.len(), liftoff.len(), "one lift-off position per heightmap");
    let zs = heights.values();
    let counts = heightmaps
        .iter()
        .zip(liftoff)
        .map(|(&hm, &foot)| {
            let ev = FecEvaluator::new(hm, hm.center(), twist, gait, model, config, foot)?;
            zs.iter().map(|&z| ev.count_safe_at(z)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SafeFootholdSamples { heights: zs, counts })
}

/// Centre of the look-ahead patch for horizon `j` (0-based): shifted by
/// `j·delta_h` along the planar velocity direction.
pub fn horizon_center<T: Scalar>(hip_xy: (T, T), twist: &BodyTwist<T>, delta_h: T, j: usize) -> (T, T) {
    let (vx, vy) = (twist.linear.x, twist.linear.y);
    let speed = (vx * vx + vy * vy).sqrt();
    if j == 0 || speed <= T::zero() {
        return hip_xy;
    }
    let s = delta_h * T::from_count(j) / speed;
    (hip_xy.0 + vx * s, hip_xy.1 + vy * s)
}
