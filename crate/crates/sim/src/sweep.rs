//! Static station sweep along the terrain: at each base position the pose
//! optimiser runs on fresh safe-count functions without rate limits.

use vital_core::fec::FecEvaluator;
use vital_core::robot::{hip_height, hip_world, BodyTwist, Leg, Pose};
use vital_core::tbr::tbr_pose;
use vital_core::vpa::{
    assumed_liftoff, envelope_error, hip_heights, optimize_pose_single, pose_evaluation_from, Bounds, CostKind,
    CostParams, PoseOptProblem,
};
use vital_core::Vec3;

use crate::harness::World;
use crate::scenario::{Scenario, ScenarioError};

/// Optimum of one cost at one station.
#[derive(Debug, Clone, PartialEq)]
pub struct CostOutcome {
    pub kind: CostKind,
    pub pose: Pose<f64>,
    pub envelope_error: f64,
    /// Exact counts at the pose's hip heights.
    pub n_sf: [usize; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Station {
    pub x: f64,
    pub outcomes: Vec<CostOutcome>,
    /// Exact counts at the plane-fit pose through the feet.
    pub tbr_n_sf: [usize; 4],
    /// Per-leg maxima over the sampled hip heights; no pose does better.
    pub best_n_sf: [usize; 4],
}

/// Stations every `step` metres from `from` to `to`.
pub fn station_sweep(
    sc: &Scenario,
    kinds: &[CostKind],
    from: f64,
    to: f64,
    step: f64,
) -> Result<Vec<Station>, ScenarioError> {
    let w = World::new(sc)?;
    let n = ((to - from) / step).round() as usize + 1;
    let twist = BodyTwist::planar(sc.vx, sc.vy, 0.0);
    let t_sw = (1.0 - sc.duty_factor) / sc.step_frequency;
    let gait = w.gait.with_remaining(0.5 * t_sw);
    let offsets = w.model.hip_offsets.to_vec();
    let invalid = |e: &dyn std::fmt::Display| ScenarioError::Invalid(e.to_string());
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let x = from + step * k as f64;
        let feet: Vec<Vec3<f64>> = Leg::ALL
            .iter()
            .map(|&l| {
                let o = w.model.hip_offset(l);
                Vec3::new(x + o.x, o.y, w.terrain.sample_height(x + o.x, o.y))
            })
            .collect();
        let support = feet.iter().map(|f| f.z).sum::<f64>() / 4.0;
        let level = Pose::new(support + sc.d_ref, 0.0, 0.0);
        let hips: Vec<Vec3<f64>> = offsets.iter().map(|&o| hip_world((x, 0.0), level, 0.0, o)).collect();
        let hms: Vec<_> = hips.iter().map(|h| w.patch((h.x, h.y), 0.0, support)).collect();
        let refs: Vec<_> = hms.iter().collect();
        let lifts: Vec<Vec3<f64>> = hms.iter().map(|hm| assumed_liftoff(hm, &twist, &gait)).collect();
        let evals = hms
            .iter()
            .zip(&hips)
            .zip(&lifts)
            .map(|((hm, h), &f)| FecEvaluator::new(hm, (h.x, h.y), twist, gait, &w.model, &w.fec, f))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(&e))?;
        let counts = |z: [f64; 4]| -> [usize; 4] {
            [0, 1, 2, 3].map(|l| evals[l].count_safe_at(z[l]).unwrap_or(0))
        };
        let samples = pose_evaluation_from(&refs, &lifts, twist, gait, &sc.heights, &w.model, &w.fec)
            .map_err(|e| invalid(&e))?;
        let best_n_sf = [0, 1, 2, 3].map(|l| samples.counts[l].iter().copied().max().unwrap_or(0));
        let fs = samples.fit(sc.basis, &sc.heights).map_err(|e| invalid(&e))?;
        let tbr = tbr_pose(&feet, sc.d_ref).map_err(|e| invalid(&e))?.pose();
        let rel = |u: Pose<f64>| Pose::new(u.z_b - support, u.roll, u.pitch);
        let tbr_z = [0, 1, 2, 3].map(|l| hip_height(rel(tbr), offsets[l]));
        let mut outcomes = Vec::with_capacity(kinds.len());
        for &kind in kinds {
            let problem = PoseOptProblem {
                functions: vec![fs.clone()],
                hip_offsets: offsets.clone(),
                u_prev: rel(level),
                bounds: Bounds::new(sc.pose_min, sc.pose_max),
                du_min: Pose::splat(-1.0),
                du_max: Pose::splat(1.0),
                cost: CostParams { kind, ..sc.cost_params() },
                lambda_s: sc.lambda_s,
            };
            let u = optimize_pose_single(&problem).map_err(|e| invalid(&e))?.pose();
            let z = hip_heights(u, &offsets);
            let zs = [z[0], z[1], z[2], z[3]];
            outcomes.push(CostOutcome {
                kind,
                pose: Pose::new(u.z_b + support, u.roll, u.pitch),
                envelope_error: envelope_error(&fs, &z, sc.margin),
                n_sf: counts(zs),
            });
        }
        out.push(Station { x, outcomes, tbr_n_sf: counts(tbr_z), best_n_sf });
    }
    Ok(out)
}

/// Stations covering the stairs with half a body length either side.
pub fn stairs_range(sc: &Scenario) -> Option<(f64, f64)> {
    let e = sc.edges();
    let (lo, hi) = (e.first()?, e.last()?);
    Some((lo - 0.6, hi + 0.6))
}
