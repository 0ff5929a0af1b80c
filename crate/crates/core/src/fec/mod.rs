//! Foothold evaluation criteria.
//!
//! Every heightmap cell is a candidate foothold. Four boolean tests are run
//! per cell:
//!
//! * terrain roughness (TR): slope statistics against the 8-neighbourhood,
//! * leg collision (LC): the hip-to-foot segment keeps `lc_clearance` above
//!   the heightmap over the whole cycle (swing, touchdown, stance, next
//!   lift-off),
//! * kinematic feasibility (KF): the foot stays inside the leg workspace at
//!   touchdown, at the next lift-off and along the swing,
//! * foot trajectory collision (FC): the swing arc clears the heightmap.
//!
//! Their conjunction is eroded by a square structuring element to leave a
//! margin against tracking and prediction errors. The number of surviving
//! cells is the safe-foothold count `n_sf`.
//!
//! Terrain queries along segments and arcs use the heightmap's upper
//! envelope ([`Heightmap::envelope_at_grid`]), so an edge between two cells
//! always reads as the higher side.

mod grid;
mod range_max;

pub use grid::BoolGrid;
use range_max::RangeMax;

use thiserror::Error;

use crate::robot::{BodyTwist, GaitError, GaitParams, RobotModel, SwingTrajectory};
use crate::terrain::Heightmap;
use crate::{Scalar, Vec3};

#[derive(Debug, Error, PartialEq)]
pub enum FecError {
    #[error("candidate outside heightmap: ({i}, {j})")]
    CandidateOutside { i: usize, j: usize },
    #[error("hip height {0} outside the (0, 2] m sanity bound")]
    HipHeight(f64),
    #[error("heightmap is empty")]
    EmptyHeightmap,
    #[error("invalid criteria configuration: {0}")]
    Config(&'static str),
    #[error("non-finite body twist")]
    Twist,
    #[error(transparent)]
    Gait(#[from] GaitError),
}

/// Thresholds and sampling densities of the criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct FecConfig<T> {
    /// Largest admissible mean |slope| to the neighbours.
    pub tr_mean_max: T,
    /// Largest admissible standard deviation of those slopes.
    pub tr_std_max: T,
    pub lc_clearance: T,
    /// Stance instants sampled between touchdown and next lift-off.
    pub lc_time_samples: usize,
    pub fc_clearance: T,
    /// Points on the swing arc, endpoints included.
    pub fc_arc_samples: usize,
    /// Chebyshev radius of the erosion, in cells.
    pub erosion_radius: usize,
}

impl<T: Scalar> Default for FecConfig<T> {
    fn default() -> Self {
        Self {
            tr_mean_max: T::lit(0.45),
            tr_std_max: T::lit(0.30),
            lc_clearance: T::lit(0.02),
            lc_time_samples: 10,
            fc_clearance: T::lit(0.01),
            fc_arc_samples: 12,
            erosion_radius: 1,
        }
    }
}

impl<T: Scalar> FecConfig<T> {
    pub fn validate(&self) -> Result<(), FecError> {
        let non_neg = |v: T| v >= T::zero();
        if !(non_neg(self.tr_mean_max) && non_neg(self.tr_std_max)) {
            return Err(FecError::Config("roughness thresholds must be >= 0"));
        }
        if !(non_neg(self.lc_clearance) && non_neg(self.fc_clearance)) {
            return Err(FecError::Config("clearances must be >= 0"));
        }
        if self.lc_time_samples < 2 || self.fc_arc_samples < 2 {
            return Err(FecError::Config("sample counts must be >= 2"));
        }
        Ok(())
    }
}

/// The per-leg tuple the criteria are evaluated on.
#[derive(Debug, Clone, Copy)]
pub struct FecInput<'a, T> {
    pub heightmap: &'a Heightmap<T>,
    /// World-frame hip height.
    pub hip_height: T,
    /// Hip ground projection at evaluation time.
    pub hip_world_xy: (T, T),
    pub twist: BodyTwist<T>,
    pub gait: GaitParams<T>,
}

impl<'a, T: Scalar> FecInput<'a, T> {
    pub fn validate(&self) -> Result<(), FecError> {
        if self.heightmap.is_empty() {
            return Err(FecError::EmptyHeightmap);
        }
        check_hip_height(self.hip_height)?;
        if !self.twist.is_finite() {
            return Err(FecError::Twist);
        }
        self.gait.validate()?;
        Ok(())
    }
}

fn check_hip_height<T: Scalar>(z: T) -> Result<(), FecError> {
    if z > T::zero() && z <= T::lit(2.0) {
        Ok(())
    } else {
        Err(FecError::HipHeight(z.to_f64_lossy()))
    }
}

/// Output of [`eval_fec`]: the eroded safe set plus every intermediate grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SafetyGrid {
    /// Eroded conjunction (μ).
    pub safe: BoolGrid,
    /// Conjunction before erosion.
    pub raw: BoolGrid,
    pub tr: BoolGrid,
    pub lc: BoolGrid,
    pub kf: BoolGrid,
    pub fc: BoolGrid,
}

impl SafetyGrid {
    pub fn count_safe(&self) -> usize {
        self.safe.count()
    }
}

pub fn count_safe(grid: &SafetyGrid) -> usize {
    grid.count_safe()
}

/// Hip motion over one step cycle, anchored at touchdown.
#[derive(Debug, Clone, Copy)]
struct Cycle<T> {
    hip_td: Vec3<T>,
    stance_shift: Vec3<T>,
    swing_shift: Vec3<T>,
}

impl<T: Scalar> Cycle<T> {
    fn new(hip_xy: (T, T), hip_height: T, twist: &BodyTwist<T>, gait: &GaitParams<T>) -> Self {
        let to_td = twist.planar_displacement(gait.t_remaining);
        Self {
            hip_td: Vec3::new(hip_xy.0 + to_td.x, hip_xy.1 + to_td.y, hip_height),
            stance_shift: twist.planar_displacement(gait.stance_duration()),
            swing_shift: twist.planar_displacement(gait.swing_duration()),
        }
    }

    #[inline]
    fn stance_hip(&self, f: T) -> Vec3<T> {
        self.hip_td + self.stance_shift * f
    }

    #[inline]
    fn swing_hip(&self, s: T) -> Vec3<T> {
        self.hip_td - self.swing_shift * (T::one() - s)
    }
}

#[inline]
fn phase<T: Scalar>(k: usize, n: usize) -> T {
    T::from_count(k) / T::from_count(n - 1)
}

fn arc_for<T: Scalar>(current_foot: Vec3<T>, candidate: Vec3<T>, apex: T) -> SwingTrajectory<T> {
    SwingTrajectory { p_lo: current_foot, p_td: candidate, apex_height: apex }
}

/// Mean and population standard deviation of |slope| to the in-grid
/// 8-neighbours of every cell.
pub fn eval_tr<T: Scalar>(heightmap: &Heightmap<T>, config: &FecConfig<T>) -> BoolGrid {
    let (hx, hy) = (heightmap.h_x(), heightmap.h_y());
    let res = heightmap.resolution();
    let diag = res * T::SQRT_2();
    let mut slopes: Vec<T> = Vec::with_capacity(8);
    BoolGrid::from_fn(hx, hy, |i, j| {
        let hc = heightmap.height(i, j);
        slopes.clear();
        for di in -1i64..=1 {
            for dj in -1i64..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                if ni < 0 || nj < 0 || ni >= hx as i64 || nj >= hy as i64 {
                    continue;
                }
                let dist = if di != 0 && dj != 0 { diag } else { res };
                slopes.push((heightmap.height(ni as usize, nj as usize) - hc).abs() / dist);
            }
        }
        if slopes.is_empty() {
            return true;
        }
        let n = T::from_count(slopes.len());
        let mean = slopes.iter().copied().sum::<T>() / n;
        let var = slopes.iter().map(|&s| (s - mean) * (s - mean)).sum::<T>() / n;
        mean <= config.tr_mean_max && var.sqrt() <= config.tr_std_max
    })
}

/// Hip-to-foot segment clearance at one instant. The foot is a sphere of
/// `foot_radius` resting on `contact`; points inside it are exempt.
fn segment_clear<T: Scalar>(
    heightmap: &Heightmap<T>,
    range: &RangeMax<T>,
    hip: Vec3<T>,
    contact: Vec3<T>,
    foot_radius: T,
    clearance: T,
) -> bool {
    let center = contact.with_z(contact.z + foot_radius);
    let d = hip - center;
    let len = d.norm();
    let n = ((len / heightmap.resolution()).to_f64_lossy().ceil() as usize + 1).max(2);
    // A sample higher than this clears every cell under the segment.
    let (uc, vc) = heightmap.to_grid(center.x, center.y);
    let (uh, vh) = heightmap.to_grid(hip.x, hip.y);
    let (uc, vc, uh, vh) = (uc.to_f64_lossy(), vc.to_f64_lossy(), uh.to_f64_lossy(), vh.to_f64_lossy());
    let roof = range.envelope_bound(uc.min(uh), uc.max(uh), vc.min(vh), vc.max(vh));
    let skip_above = roof + clearance + slack(roof);
    let rising = d.z >= T::zero();
    for k in 0..n {
        let t = phase::<T>(k, n);
        if t * len <= foot_radius {
            continue;
        }
        let p = center + d * t;
        if p.z > skip_above {
            if rising {
                break;
            }
            continue;
        }
        let (u, v) = heightmap.to_grid(p.x, p.y);
        if p.z - heightmap.envelope_at_grid(u, v) < clearance {
            return false;
        }
    }
    true
}

#[inline]
fn slack<T: Scalar>(h: T) -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(64.0) * (T::one() + h.abs()))
}

struct CellContext<'a, T> {
    heightmap: &'a Heightmap<T>,
    model: &'a RobotModel<T>,
    config: &'a FecConfig<T>,
    range: RangeMax<T>,
}

impl<'a, T: Scalar> CellContext<'a, T> {
    fn new(heightmap: &'a Heightmap<T>, model: &'a RobotModel<T>, config: &'a FecConfig<T>) -> Self {
        Self { heightmap, model, config, range: RangeMax::new(heightmap) }
    }

    fn kf(&self, cycle: &Cycle<T>, candidate: Vec3<T>, arc: &[Vec3<T>]) -> bool {
        let m = self.model;
        if cycle.hip_td.z - candidate.z > m.r_max {
            return false;
        }
        if !crate::robot::workspace_contains(cycle.hip_td, candidate, m) {
            return false;
        }
        if !crate::robot::workspace_contains(cycle.stance_hip(T::one()), candidate, m) {
            return false;
        }
        let n = arc.len();
        arc.iter()
            .enumerate()
            .all(|(k, &p)| crate::robot::workspace_contains(cycle.swing_hip(phase(k, n)), p, m))
    }

    fn lc(&self, cycle: &Cycle<T>, candidate: Vec3<T>, arc: &[Vec3<T>]) -> bool {
        let (r, d) = (self.model.foot_radius, self.config.lc_clearance);
        let n_st = self.config.lc_time_samples;
        for k in 0..n_st {
            let hip = cycle.stance_hip(phase(k, n_st));
            if !segment_clear(self.heightmap, &self.range, hip, candidate, r, d) {
                return false;
            }
        }
        // the lift-off sample is shared by every candidate
        let n = arc.len();
        arc.iter().enumerate().skip(1).all(|(k, &p)| {
            segment_clear(self.heightmap, &self.range, cycle.swing_hip(phase(k, n)), p, r, d)
        })
    }

    fn fc(&self, arc: &[Vec3<T>]) -> bool {
        let n = arc.len();
        arc[1..n - 1].iter().all(|p| {
            let (u, v) = self.heightmap.to_grid(p.x, p.y);
            p.z - self.heightmap.envelope_at_grid(u, v) >= self.config.fc_clearance
        })
    }
}

fn checked_candidate<T: Scalar>(hm: &Heightmap<T>, cell: (usize, usize)) -> Result<Vec3<T>, FecError> {
    if cell.0 >= hm.h_x() || cell.1 >= hm.h_y() {
        return Err(FecError::CandidateOutside { i: cell.0, j: cell.1 });
    }
    Ok(hm.candidate(cell.0, cell.1))
}

fn single_cell<T: Scalar, R>(
    input: &FecInput<'_, T>,
    cell: (usize, usize),
    model: &RobotModel<T>,
    config: &FecConfig<T>,
    current_foot: Vec3<T>,
    f: impl FnOnce(&CellContext<'_, T>, &Cycle<T>, Vec3<T>, &[Vec3<T>]) -> R,
) -> Result<R, FecError> {
    let candidate = checked_candidate(input.heightmap, cell)?;
    input.validate()?;
    config.validate()?;
    let ctx = CellContext::new(input.heightmap, model, config);
    let cycle = Cycle::new(input.hip_world_xy, input.hip_height, &input.twist, &input.gait);
    let arc = arc_for(current_foot, candidate, model.default_step_height).samples(config.fc_arc_samples);
    Ok(f(&ctx, &cycle, candidate, &arc))
}

/// Leg-collision test for one candidate cell.
pub fn eval_lc<T: Scalar>(
    input: &FecInput<'_, T>,
    cell: (usize, usize),
    model: &RobotModel<T>,
    config: &FecConfig<T>,
    current_foot: Vec3<T>,
) -> Result<bool, FecError> {
    single_cell(input, cell, model, config, current_foot, |ctx, cy, c, arc| ctx.lc(cy, c, arc))
}

/// Kinematic-feasibility test for one candidate cell.
pub fn eval_kf<T: Scalar>(
    input: &FecInput<'_, T>,
    cell: (usize, usize),
    model: &RobotModel<T>,
    config: &FecConfig<T>,
    current_foot: Vec3<T>,
) -> Result<bool, FecError> {
    single_cell(input, cell, model, config, current_foot, |ctx, cy, c, arc| ctx.kf(cy, c, arc))
}

/// Swing-arc collision test for one candidate cell.
pub fn eval_fc<T: Scalar>(
    input: &FecInput<'_, T>,
    cell: (usize, usize),
    current_foot: Vec3<T>,
    model: &RobotModel<T>,
    config: &FecConfig<T>,
) -> Result<bool, FecError> {
    single_cell(input, cell, model, config, current_foot, |ctx, _, _, arc| ctx.fc(arc))
}

/// Runs all four criteria, conjoins and erodes.
pub fn eval_fec<T: Scalar>(
    input: &FecInput<'_, T>,
    model: &RobotModel<T>,
    config: &FecConfig<T>,
    current_foot: Vec3<T>,
) -> Result<SafetyGrid, FecError> {
    input.validate()?;
    FecEvaluator::new(input.heightmap, input.hip_world_xy, input.twist, input.gait, model, config, current_foot)?
        .evaluate(input.hip_height)
}

/// Criteria evaluation for one heightmap and lift-off point, reusable across
/// hip heights. TR and FC do not depend on the hip and are computed once.
pub struct FecEvaluator<'a, T> {
    ctx: CellContext<'a, T>,
    hip_world_xy: (T, T),
    twist: BodyTwist<T>,
    gait: GaitParams<T>,
    /// Swing arcs, `fc_arc_samples` points per cell.
    arcs: Vec<Vec3<T>>,
    tr: BoolGrid,
    fc: BoolGrid,
}

impl<'a, T: Scalar> FecEvaluator<'a, T> {
    pub fn new(
        heightmap: &'a Heightmap<T>,
        hip_world_xy: (T, T),
        twist: BodyTwist<T>,
        gait: GaitParams<T>,
        model: &'a RobotModel<T>,
        config: &'a FecConfig<T>,
        current_foot: Vec3<T>,
    ) -> Result<Self, FecError> {
        if heightmap.is_empty() {
            return Err(FecError::EmptyHeightmap);
        }
        config.validate()?;
        gait.validate()?;
        if !twist.is_finite() {
            return Err(FecError::Twist);
        }
        let ctx = CellContext::new(heightmap, model, config);
        let n = config.fc_arc_samples;
        let (hx, hy) = (heightmap.h_x(), heightmap.h_y());
        let mut arcs = Vec::with_capacity(hx * hy * n);
        for i in 0..hx {
            for j in 0..hy {
                let traj = arc_for(current_foot, heightmap.candidate(i, j), model.default_step_height);
                arcs.extend(traj.samples(n));
            }
        }
        let tr = eval_tr(heightmap, config);
        let fc = BoolGrid::from_fn(hx, hy, |i, j| {
            let c = heightmap.index(i, j);
            ctx.fc(&arcs[c * n..(c + 1) * n])
        });
        Ok(Self { ctx, hip_world_xy, twist, gait, arcs, tr, fc })
    }

    fn arc(&self, i: usize, j: usize) -> &[Vec3<T>] {
        let n = self.ctx.config.fc_arc_samples;
        let c = self.ctx.heightmap.index(i, j);
        &self.arcs[c * n..(c + 1) * n]
    }

    pub fn tr(&self) -> &BoolGrid {
        &self.tr
    }

    pub fn fc(&self) -> &BoolGrid {
        &self.fc
    }

    /// Every criterion on every cell.
    pub fn evaluate(&self, hip_height: T) -> Result<SafetyGrid, FecError> {
        check_hip_height(hip_height)?;
        let hm = self.ctx.heightmap;
        let cycle = Cycle::new(self.hip_world_xy, hip_height, &self.twist, &self.gait);
        let (hx, hy) = (hm.h_x(), hm.h_y());
        let kf = BoolGrid::from_fn(hx, hy, |i, j| self.ctx.kf(&cycle, hm.candidate(i, j), self.arc(i, j)));
        let lc = BoolGrid::from_fn(hx, hy, |i, j| self.ctx.lc(&cycle, hm.candidate(i, j), self.arc(i, j)));
        let raw = self.tr.and(&lc).and(&kf).and(&self.fc);
        let safe = raw.erode(self.ctx.config.erosion_radius);
        Ok(SafetyGrid { safe, raw, tr: self.tr.clone(), lc, kf, fc: self.fc.clone() })
    }

    /// The eroded conjunction only, skipping work on cells already rejected.
    /// Identical to `evaluate(..).safe`.
    pub fn safe_grid(&self, hip_height: T) -> Result<BoolGrid, FecError> {
        check_hip_height(hip_height)?;
        let hm = self.ctx.heightmap;
        let cycle = Cycle::new(self.hip_world_xy, hip_height, &self.twist, &self.gait);
        let raw = BoolGrid::from_fn(hm.h_x(), hm.h_y(), |i, j| {
            if !(self.tr.get(i, j) && self.fc.get(i, j)) {
                return false;
            }
            let c = hm.candidate(i, j);
            let arc = self.arc(i, j);
            self.ctx.kf(&cycle, c, arc) && self.ctx.lc(&cycle, c, arc)
        });
        Ok(raw.erode(self.ctx.config.erosion_radius))
    }

    pub fn count_safe_at(&self, hip_height: T) -> Result<usize, FecError> {
        Ok(self.safe_grid(hip_height)?.count())
    }
}
