//! Foothold adaptation: evaluate the heightmap around the predicted
//! touchdown and move the foot to the closest safe cell.

use thiserror::Error;

use crate::fec::{eval_fec, BoolGrid, FecConfig, FecError, FecInput, SafetyGrid};
use crate::robot::{swing_trajectory, BodyTwist, GaitParams, RobotModel, SwingError, SwingTrajectory};
use crate::terrain::Heightmap;
use crate::{Scalar, Vec3};

#[derive(Debug, Error, PartialEq)]
pub enum VfaError {
    #[error("nominal not in heightmap")]
    NominalOutside,
    #[error(transparent)]
    Fec(#[from] FecError),
}

#[derive(Debug, Clone, Copy)]
pub struct VfaInput<'a, T> {
    /// Patch centred on the nominal foothold.
    pub heightmap: &'a Heightmap<T>,
    pub hip_height: T,
    /// Hip ground projection now.
    pub hip_world_xy: (T, T),
    pub twist: BodyTwist<T>,
    pub gait: GaitParams<T>,
    pub nominal: Vec3<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    Selected,
    /// Set by callers that step onto the nominal although it is unsafe.
    KeptNominalUnsafe,
    NoSafeCell,
}

impl Fallback {
    pub fn as_str(self) -> &'static str {
        match self {
            Fallback::Selected => "selected",
            Fallback::KeptNominalUnsafe => "kept_nominal_unsafe",
            Fallback::NoSafeCell => "no_safe_cell",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootholdDecision<T> {
    pub optimal: Vec3<T>,
    /// Grid cell of `optimal`, when one was selected.
    pub cell: Option<(usize, usize)>,
    pub safe_count: usize,
    pub fallback: Fallback,
}

/// Closest true cell of `safe` to `nominal`, by planar distance.
///
/// Ties go to the smaller |Δ| along the grid's first axis, then its second,
/// then the lower row-major index, so the result never depends on float
/// noise in the world-frame transform.
pub fn select_foothold<T: Scalar>(
    heightmap: &Heightmap<T>,
    safe: &BoolGrid,
    nominal: Vec3<T>,
) -> Result<FootholdDecision<T>, VfaError> {
    if heightmap.nearest_cell(nominal.x, nominal.y).is_none() {
        return Err(VfaError::NominalOutside);
    }
    let (u, v) = heightmap.to_grid(nominal.x, nominal.y);
    type Key<T> = (T, T, T);
    let mut best: Option<(Key<T>, (usize, usize))> = None;
    for i in 0..safe.h_x() {
        for j in 0..safe.h_y() {
            if !safe.get(i, j) {
                continue;
            }
            let du = (T::from_count(i) - u).abs();
            let dv = (T::from_count(j) - v).abs();
            let key = (du * du + dv * dv, du, dv);
            // row-major scan order already prefers the lower index on equal keys
            if best.is_none_or(|(b, _)| key < b) {
                best = Some((key, (i, j)));
            }
        }
    }
    let safe_count = safe.count();
    Ok(match best {
        Some((_, (i, j))) => FootholdDecision {
            optimal: heightmap.candidate(i, j),
            cell: Some((i, j)),
            safe_count,
            fallback: Fallback::Selected,
        },
        None => FootholdDecision { optimal: nominal, cell: None, safe_count, fallback: Fallback::NoSafeCell },
    })
}

/// Evaluates the criteria on the VFA tuple and selects the foothold.
pub fn foothold_evaluation<T: Scalar>(
    input: &VfaInput<'_, T>,
    model: &RobotModel<T>,
    config: &FecConfig<T>,
    current_foot: Vec3<T>,
) -> Result<FootholdDecision<T>, VfaError> {
    foothold_evaluation_with_grid(input, model, config, current_foot).map(|(d, _)| d)
}

/// As [`foothold_evaluation`], also returning the criteria grids.
pub fn foothold_evaluation_with_grid<T: Scalar>(
    input: &VfaInput<'_, T>,
    model: &RobotModel<T>,
    config: &FecConfig<T>,
    current_foot: Vec3<T>,
) -> Result<(FootholdDecision<T>, SafetyGrid), VfaError> {
    if input.heightmap.nearest_cell(input.nominal.x, input.nominal.y).is_none() {
        return Err(VfaError::NominalOutside);
    }
    let fec_input = FecInput {
        heightmap: input.heightmap,
        hip_height: input.hip_height,
        hip_world_xy: input.hip_world_xy,
        twist: input.twist,
        gait: input.gait,
    };
    let grid = eval_fec(&fec_input, model, config, current_foot)?;
    let decision = select_foothold(input.heightmap, &grid.safe, input.nominal)?;
    Ok((decision, grid))
}

/// Swing from the current foot to the selected foothold.
pub fn adjust_trajectory<T: Scalar>(
    decision: &FootholdDecision<T>,
    current_foot: Vec3<T>,
    apex_height: T,
) -> Result<SwingTrajectory<T>, SwingError> {
    swing_trajectory(current_foot, decision.optimal, apex_height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{extract_heightmap, TerrainMap};

    fn flat(center: (f64, f64), yaw: f64) -> Heightmap<f64> {
        extract_heightmap(&TerrainMap::Flat, center, yaw, 33, 33, 0.02).unwrap()
    }

    #[test]
    fn flat_selects_nominal_cell() {
        let hm = flat((1.0, 0.2), 0.0);
        let safe = BoolGrid::filled(33, 33, true);
        let d = select_foothold(&hm, &safe, Vec3::new(1.0, 0.2, 0.0)).unwrap();
        assert_eq!(d.cell, Some((16, 16)));
        assert_eq!(d.fallback, Fallback::Selected);
        assert_eq!(d.safe_count, 1089);
        assert!(d.optimal.planar_distance(Vec3::new(1.0, 0.2, 0.0)) < 1e-12);
    }

    #[test]
    fn single_column_to_the_left() {
        let hm = flat((0.0, 0.0), 0.0);
        let safe = BoolGrid::from_fn(33, 33, |i, _| i == 15);
        let nominal = Vec3::new(0.0, 0.0, 0.0);
        let d = select_foothold(&hm, &safe, nominal).unwrap();
        assert_eq!(d.cell, Some((15, 16)));
        assert!((d.optimal.planar_distance(nominal) - 0.02).abs() < 1e-12);
        // exhaustive oracle
        let best = (0..33)
            .flat_map(|i| (0..33).map(move |j| (i, j)))
            .filter(|&(i, j)| safe.get(i, j))
            .map(|(i, j)| hm.candidate(i, j).planar_distance(nominal))
            .fold(f64::INFINITY, f64::min);
        assert!((best - 0.02).abs() < 1e-12);
    }

    #[test]
    fn no_safe_cell_keeps_nominal() {
        let hm = flat((0.0, 0.0), 0.0);
        let nominal = Vec3::new(0.013, -0.004, 0.0);
        let d = select_foothold(&hm, &BoolGrid::filled(33, 33, false), nominal).unwrap();
        assert_eq!(d.fallback, Fallback::NoSafeCell);
        assert_eq!(d.optimal, nominal);
        assert_eq!(d.cell, None);
        assert_eq!(d.safe_count, 0);
    }

    #[test]
    fn ties_are_deterministic() {
        let hm = flat((0.0, 0.0), 0.3);
        // four cells equidistant from the centre
        let safe = BoolGrid::from_fn(33, 33, |i, j| matches!((i, j), (15, 16) | (17, 16) | (16, 15) | (16, 17)));
        let d = select_foothold(&hm, &safe, Vec3::zero()).unwrap();
        assert_eq!(d.cell, Some((16, 15)));
        let d2 = select_foothold(&hm, &safe, Vec3::zero()).unwrap();
        assert_eq!(d, d2);
        let safe = BoolGrid::from_fn(33, 33, |i, j| matches!((i, j), (15, 16) | (17, 16)));
        assert_eq!(select_foothold(&hm, &safe, Vec3::zero()).unwrap().cell, Some((15, 16)));
    }

    #[test]
    fn nominal_outside_errors() {
        let hm = flat((0.0, 0.0), 0.0);
        let err = select_foothold(&hm, &BoolGrid::filled(33, 33, true), Vec3::new(0.5, 0.0, 0.0)).unwrap_err();
        assert_eq!(err.to_string(), "nominal not in heightmap");
    }

    #[test]
    fn evaluation_on_flat_ground_needs_no_adaptation() {
        let nominal = Vec3::new(0.5, 0.2, 0.0);
        let hm = flat((0.5, 0.2), 0.0);
        let gait = GaitParams::new(0.16, 1.25, 0.5, 0.2).unwrap();
        let twist = BodyTwist::planar(0.2, 0.0, 0.0);
        let hip = (0.5 - 0.2 * 0.4, 0.2);
        let input = VfaInput { heightmap: &hm, hip_height: 0.55, hip_world_xy: hip, twist, gait, nominal };
        let foot = Vec3::new(0.5 - 0.2 * 0.8, 0.2, 0.0);
        let d = foothold_evaluation(&input, &RobotModel::hyq_like(), &FecConfig::default(), foot).unwrap();
        assert_eq!(d.fallback, Fallback::Selected);
        assert!(d.optimal.planar_distance(nominal) < 1e-12);
    }

    #[test]
    fn adjusted_trajectory_endpoints() {
        let foot = Vec3::<f64>::new(-0.1, 0.0, 0.0);
        let mut d = FootholdDecision { optimal: Vec3::new(0.1, 0.0, 0.0), cell: None, safe_count: 0, fallback: Fallback::NoSafeCell };
        let t0 = adjust_trajectory(&d, foot, 0.12).unwrap();
        assert_eq!(t0, swing_trajectory(foot, d.optimal, 0.12).unwrap());
        d.optimal.x += 0.02;
        let t1 = adjust_trajectory(&d, foot, 0.12).unwrap();
        assert_eq!(t1.point(1.0), d.optimal);
        assert_eq!(t1.point(0.0), foot);
        assert!((t1.point(0.5).z - t0.point(0.5).z).abs() < 1e-15);
    }
}
