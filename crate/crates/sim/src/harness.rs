//! The fixed-step simulation loop.
//!
//! The base is kinematic: its planar position advances at the commanded
//! twist, its height and attitude follow the planner reference through a
//! first-order lag. Stance feet are world-fixed. Planners see heightmaps
//! expressed relative to the mean height of the support feet, so the
//! hip-height set and pose bounds are the same on every tread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vital_core::fec::{FecConfig, FecEvaluator};
use vital_core::robot::{hip_world, nominal_foothold, BodyTwist, GaitParams, Leg, Pose, RobotModel, SwingTrajectory};
use vital_core::tbr::tbr_pose_with_yaw;
use vital_core::terrain::{extract_heightmap, Heightmap, TerrainMap};
use vital_core::vfa::{adjust_trajectory, foothold_evaluation_with_grid, Fallback, VfaInput};
use vital_core::vpa::{
    assumed_liftoff, envelope_error, hip_heights, horizon_center, optimize_pose_receding, optimize_pose_single,
    pose_evaluation_from, Bounds, PoseOptProblem,
};
use vital_core::Vec3;

use crate::log::{
    CriteriaDump, EventKind, EventLog, FootholdLog, PlannerLog, RbfDump, RunMetrics, RunOutput, StepLog,
};
use crate::scenario::{PlannerKind, Scenario, ScenarioError};
use crate::schedule::GaitSchedule;

/// Half-width of the stair-edge window the critical-window metrics use.
pub const CRITICAL_WINDOW: f64 = 0.3;

/// Spacing of the collision samples along a leg.
const LEG_SAMPLE: f64 = 0.01;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub dump_criteria: bool,
    pub dump_rbf: bool,
}

#[derive(Debug, Clone)]
struct Swing {
    traj: SwingTrajectory<f64>,
    start: u64,
}

#[derive(Debug, Clone)]
struct LegState {
    foot: Vec3<f64>,
    /// Last stance position; the support height averages these.
    contact: Vec3<f64>,
    /// Most recent selected foothold (the TBR plane goes through these).
    selected: Vec3<f64>,
    swing: Option<Swing>,
    decision: Fallback,
    /// Stepping in place until a safe foothold turns up.
    holding: bool,
}

/// Shared read-only context of a run.
pub(crate) struct World<'a> {
    pub(crate) sc: &'a Scenario,
    pub(crate) terrain: TerrainMap<f64>,
    pub(crate) model: RobotModel<f64>,
    pub(crate) gait: GaitParams<f64>,
    pub(crate) fec: FecConfig<f64>,
}

impl<'a> World<'a> {
    pub(crate) fn new(sc: &'a Scenario) -> Result<Self, ScenarioError> {
        sc.validate()?;
        let model = sc.model()?;
        let gait = sc.gait_params().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        Ok(World { sc, terrain: sc.terrain_map(), model, gait, fec: sc.fec.clone() })
    }

    /// Patch around `center`, heights relative to `support_z`.
    pub(crate) fn patch(&self, center: (f64, f64), yaw: f64, support_z: f64) -> Heightmap<f64> {
        let hm = extract_heightmap(&self.terrain, center, yaw, self.sc.hm_size, self.sc.hm_size, self.sc.hm_resolution)
            .expect("validated heightmap size");
        let cells = hm.cells().iter().map(|h| h - support_z).collect();
        Heightmap::from_cells(hm.h_x(), hm.h_y(), hm.resolution(), hm.center(), hm.yaw(), cells).expect("same shape")
    }

    fn swing_duration(&self, sched: &GaitSchedule) -> f64 {
        sched.swing_ticks() as f64 * self.sc.dt
    }
}

struct Sim<'a> {
    w: World<'a>,
    opts: RunOptions,
    sched: GaitSchedule,
    gait_start: u64,
    tick: u64,
    x: f64,
    y: f64,
    yaw: f64,
    actual: Pose<f64>,
    /// Reference in world height.
    reference: Pose<f64>,
    legs: Vec<LegState>,
    out: RunOutput,
    pending_collisions: u32,
    pending_violations: u32,
    mae_sum: [f64; 3],
}

fn empty_metrics() -> RunMetrics {
    RunMetrics {
        ticks: 0,
        final_x: 0.0,
        mean_nsf_total: 0.0,
        min_nsf_leg: 0,
        min_nsf_leg_window: None,
        mean_nsf_total_window: None,
        mean_dz_dx: 0.0,
        mean_dpitch_dx: 0.0,
        mean_droll_dx: 0.0,
        mean_du: 0.0,
        tracking_mae: Pose::splat(0.0),
        mean_envelope_error: None,
        planner_ticks: 0,
        collisions: 0,
        violations: 0,
        unsafe_steps: 0,
        anomalies: 0,
        success: false,
    }
}

impl<'a> Sim<'a> {
    fn new(sc: &'a Scenario, opts: RunOptions) -> Result<Self, ScenarioError> {
        let w = World::new(sc)?;
        let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
        let dx = if sc.x_jitter > 0.0 { rng.gen_range(-sc.x_jitter..=sc.x_jitter) } else { 0.0 };
        let shift = if sc.phase_jitter > 0.0 { rng.gen_range(0.0..1.0) * sc.phase_jitter } else { 0.0 };
        let sched = GaitSchedule::new(sc.gait, sc.step_frequency, sc.duty_factor, sc.dt, shift);
        let (x, y, yaw) = (dx, 0.0, 0.0);
        let legs: Vec<LegState> = Leg::ALL
            .iter()
            .map(|&l| {
                let o = w.model.hip_offset(l);
                let (fx, fy) = (x + o.x, y + o.y);
                let foot = Vec3::new(fx, fy, w.terrain.sample_height(fx, fy));
                LegState { foot, contact: foot, selected: foot, swing: None, decision: Fallback::Selected, holding: false }
            })
            .collect();
        let support = legs.iter().map(|l| l.contact.z).sum::<f64>() / 4.0;
        let start = Pose::new(support + sc.d_ref, 0.0, 0.0);
        Ok(Self {
            w,
            opts,
            sched,
            gait_start: (sc.start_delay / sc.dt).round() as u64,
            tick: 0,
            x,
            y,
            yaw,
            actual: start,
            reference: start,
            legs,
            out: RunOutput {
                steps: Vec::new(),
                footholds: Vec::new(),
                planner: Vec::new(),
                events: Vec::new(),
                criteria: Vec::new(),
                rbf: Vec::new(),
                metrics: empty_metrics(),
            },
            pending_collisions: 0,
            pending_violations: 0,
            mae_sum: [0.0; 3],
        })
    }

    fn time(&self) -> f64 {
        self.tick as f64 * self.w.sc.dt
    }

    fn support_z(&self) -> f64 {
        self.legs.iter().map(|l| l.contact.z).sum::<f64>() / 4.0
    }

    /// Where `leg` lifts off next: the stance foot, or the target of the
    /// swing in progress.
    fn next_liftoff(&self, leg: Leg) -> Vec3<f64> {
        let st = &self.legs[leg.index()];
        st.swing.as_ref().map_or(st.foot, |sw| sw.traj.p_td)
    }

    fn hip(&self, leg: Leg) -> Vec3<f64> {
        hip_world((self.x, self.y), self.actual, self.yaw, self.w.model.hip_offset(leg))
    }

    /// Velocity ramp factor, zero while any leg steps in place.
    fn drive(&self) -> f64 {
        let sc = self.w.sc;
        if self.legs.iter().any(|l| l.holding) {
            return 0.0;
        }
        let t = self.time() - sc.start_delay;
        if t < 0.0 {
            0.0
        } else if sc.ramp <= 0.0 {
            1.0
        } else {
            (t / sc.ramp).min(1.0)
        }
    }

    /// Effective world-frame twist.
    fn twist(&self) -> BodyTwist<f64> {
        let sc = self.w.sc;
        let k = self.drive();
        let (s, c) = self.yaw.sin_cos();
        let (vx, vy) = (sc.vx * k, sc.vy * k);
        BodyTwist::planar(c * vx - s * vy, s * vx + c * vy, sc.yaw_rate * k)
    }

    fn event(&mut self, leg: &'static str, kind: EventKind, value: f64, note: String) {
        self.out.events.push(EventLog { tick: self.tick, leg, kind, value, note });
    }

    fn step_gait(&mut self) {
        if self.tick < self.gait_start {
            return;
        }
        let g = self.tick - self.gait_start;
        for leg in Leg::ALL {
            let li = leg.index();
            let done = match &self.legs[li].swing {
                Some(sw) => self.tick - sw.start >= self.sched.swing_ticks(),
                None => false,
            };
            if done {
                let st = &mut self.legs[li];
                let td = st.swing.take().expect("swing").traj.p_td;
                st.foot = td;
                st.contact = td;
            }
        }
        for leg in Leg::ALL {
            if self.legs[leg.index()].swing.is_none() && self.sched.lifts_off(leg, g) {
                self.lift_off(leg);
            }
        }
    }

    fn lift_off(&mut self, leg: Leg) {
        let li = leg.index();
        let support = self.support_z();
        let hip = self.hip(leg);
        let twist = self.twist();
        let gait = self.w.gait.with_remaining(self.w.swing_duration(&self.sched));
        let nominal = nominal_foothold(hip, &twist, &gait, &self.w.terrain);
        let hm = self.w.patch((nominal.x, nominal.y), self.yaw, support);
        let foot = self.legs[li].foot;
        let rel = |p: Vec3<f64>| p.with_z(p.z - support);
        let input = VfaInput {
            heightmap: &hm,
            hip_height: hip.z - support,
            hip_world_xy: (hip.x, hip.y),
            twist,
            gait,
            nominal: rel(nominal),
        };
        let (target, n_sf, fallback) = match foothold_evaluation_with_grid(&input, &self.w.model, &self.w.fec, rel(foot)) {
            Ok((d, grid)) => {
                if self.opts.dump_criteria {
                    self.out.criteria.push(CriteriaDump { tick: self.tick, leg: leg.name(), grid });
                }
                match d.fallback {
                    Fallback::Selected => (d.optimal.with_z(d.optimal.z + support), d.safe_count, d.fallback),
                    _ => (foot, d.safe_count, d.fallback),
                }
            }
            Err(e) => {
                self.event(leg.name(), EventKind::Anomaly, 0.0, format!("foothold evaluation: {e}"));
                (foot, 0, Fallback::NoSafeCell)
            }
        };
        let traj = adjust_trajectory(
            &vital_core::vfa::FootholdDecision { optimal: target, cell: None, safe_count: n_sf, fallback },
            foot,
            self.w.model.default_step_height,
        )
        .expect("finite endpoints");
        let st = &mut self.legs[li];
        st.holding = fallback != Fallback::Selected;
        st.decision = fallback;
        if fallback == Fallback::Selected {
            st.selected = target;
        }
        st.swing = Some(Swing { traj, start: self.tick });
        self.out.footholds.push(FootholdLog {
            tick: self.tick,
            time: self.time(),
            leg: leg.name(),
            liftoff: foot,
            nominal,
            target,
            n_sf,
            fallback,
        });
    }

    fn plan(&mut self) {
        let sc = self.w.sc;
        let support = self.support_z();
        let (pose, objective, f_at, env, clamped) = match sc.planner {
            PlannerKind::None => (Pose::new(support + sc.d_ref, 0.0, 0.0), None, None, None, false),
            PlannerKind::Tbr => {
                let feet: Vec<Vec3<f64>> = self.legs.iter().map(|l| l.selected).collect();
                match tbr_pose_with_yaw(&feet, sc.d_ref, self.yaw) {
                    Ok(r) => (r.pose(), None, None, None, false),
                    Err(e) => {
                        self.event("", EventKind::Anomaly, 0.0, format!("tbr: {e}"));
                        return;
                    }
                }
            }
            PlannerKind::Vpa => match self.vpa(support) {
                Ok(r) => r,
                Err(msg) => {
                    self.event("", EventKind::Anomaly, 0.0, msg);
                    return;
                }
            },
        };
        self.reference = pose;
        self.out.planner.push(PlannerLog {
            tick: self.tick,
            time: self.time(),
            base_x: self.x,
            pose,
            planner: sc.planner.as_str(),
            cost: if sc.planner == PlannerKind::Vpa { sc.cost.as_str() } else { "" },
            horizon: if sc.planner == PlannerKind::Vpa { sc.horizon } else { 0 },
            objective,
            f_at_pose: f_at,
            envelope_error: env,
            box_clamped: clamped,
        });
    }

    #[allow(clippy::type_complexity)]
    fn vpa(&mut self, support: f64) -> Result<(Pose<f64>, Option<f64>, Option<[f64; 4]>, Option<f64>, bool), String> {
        let sc = self.w.sc;
        let twist = self.twist();
        let gait = self.w.gait.with_remaining(0.5 * self.w.swing_duration(&self.sched));
        let hips: Vec<Vec3<f64>> = Leg::ALL.iter().map(|&l| self.hip(l)).collect();
        let mut functions = Vec::with_capacity(sc.horizon);
        for j in 0..sc.horizon {
            let hms: Vec<Heightmap<f64>> = hips
                .iter()
                .map(|h| self.w.patch(horizon_center((h.x, h.y), &twist, sc.delta_h, j), self.yaw, support))
                .collect();
            let refs: Vec<&Heightmap<f64>> = hms.iter().collect();
            // later horizons lift off from footholds not chosen yet
            let feet: Vec<Vec3<f64>> = if j == 0 {
                Leg::ALL.iter().map(|&l| self.next_liftoff(l).with_z(self.next_liftoff(l).z - support)).collect()
            } else {
                hms.iter().map(|hm| assumed_liftoff(hm, &twist, &gait)).collect()
            };
            let samples = pose_evaluation_from(&refs, &feet, twist, gait, &sc.heights, &self.w.model, &self.w.fec)
                .map_err(|e| format!("pose evaluation: {e}"))?;
            let fs = samples.fit(sc.basis, &sc.heights).map_err(|e| format!("fit: {e}"))?;
            if self.opts.dump_rbf {
                for (leg, f) in Leg::ALL.iter().zip(&fs) {
                    self.out.rbf.push(RbfDump {
                        tick: self.tick,
                        horizon: j,
                        leg: leg.name(),
                        samples: samples.heights.iter().copied().zip(samples.counts[leg.index()].iter().copied()).collect(),
                        centers: f.centers().to_vec(),
                        width: f.width(),
                        weights: f.weights().to_vec(),
                    });
                }
            }
            functions.push(fs);
        }
        let prev = Pose::new(self.reference.z_b - support, self.reference.roll, self.reference.pitch);
        let problem = PoseOptProblem {
            functions,
            hip_offsets: self.w.model.hip_offsets.to_vec(),
            u_prev: prev,
            bounds: Bounds::new(sc.pose_min, sc.pose_max),
            du_min: Pose::new(-sc.rate.z_b, -sc.rate.roll, -sc.rate.pitch),
            du_max: sc.rate,
            cost: sc.cost_params(),
            lambda_s: sc.lambda_s,
        };
        let sol = if sc.horizon == 1 { optimize_pose_single(&problem) } else { optimize_pose_receding(&problem) }
            .map_err(|e| format!("pose optimisation: {e}"))?;
        let u = sol.pose();
        let z = hip_heights(u, &problem.hip_offsets);
        let fs = &problem.functions[0];
        let f_at = [fs[0].eval(z[0]), fs[1].eval(z[1]), fs[2].eval(z[2]), fs[3].eval(z[3])];
        let env = envelope_error(fs, &z, sc.margin);
        Ok((Pose::new(u.z_b + support, u.roll, u.pitch), Some(sol.objective), Some(f_at), Some(env), sol.box_clamped))
    }

    fn track(&mut self) {
        self.actual = track_step(self.actual, self.reference, self.w.sc.dt, self.w.sc.tau_track);
    }

    fn advance_base(&mut self) {
        let tw = self.twist();
        let dt = self.w.sc.dt;
        self.x += tw.linear.x * dt;
        self.y += tw.linear.y * dt;
        self.yaw += tw.angular.z * dt;
    }

    fn move_swing_feet(&mut self) {
        let n = self.sched.swing_ticks() as f64;
        let t = self.tick + 1;
        for st in &mut self.legs {
            if let Some(sw) = &st.swing {
                let s = ((t - sw.start) as f64 / n).min(1.0);
                st.foot = sw.traj.point(s);
            }
        }
    }

    fn detect(&mut self) {
        let (r_min, r_max, r) = (self.w.model.r_min, self.w.model.r_max, self.w.model.foot_radius);
        for leg in Leg::ALL {
            let li = leg.index();
            let hip = self.hip(leg);
            let foot = self.legs[li].foot;
            let swinging = self.legs[li].swing.is_some();
            if swinging {
                let depth = self.w.terrain.sample_height(foot.x, foot.y) - foot.z;
                if depth > 1e-9 {
                    self.pending_collisions += 1;
                    self.event(leg.name(), EventKind::FootCollision, depth, String::new());
                }
            } else {
                let d = hip.distance(foot);
                if d < r_min - 1e-9 || d > r_max + 1e-9 {
                    self.pending_violations += 1;
                    self.event(leg.name(), EventKind::Workspace, d, String::new());
                }
            }
            let center = foot.with_z(foot.z + r);
            let seg = hip - center;
            let len = seg.norm();
            let n = (len / LEG_SAMPLE).ceil() as usize + 1;
            let mut worst: f64 = 0.0;
            for k in 0..n {
                let t = k as f64 / (n - 1).max(1) as f64;
                if t * len <= r {
                    continue;
                }
                let p = center + seg * t;
                worst = worst.max(self.w.terrain.sample_height(p.x, p.y) - p.z);
            }
            if worst > 1e-9 {
                self.pending_collisions += 1;
                self.event(leg.name(), EventKind::LegCollision, worst, String::new());
            }
        }
    }

    /// Safe-foothold count of every leg at the current pose, on a patch
    /// under each hip.
    fn safe_counts(&mut self) -> [usize; 4] {
        let support = self.support_z();
        let twist = self.twist();
        let gait = self.w.gait.with_remaining(0.5 * self.w.swing_duration(&self.sched));
        let mut n = [0; 4];
        for leg in Leg::ALL {
            let hip = self.hip(leg);
            let hm = self.w.patch((hip.x, hip.y), self.yaw, support);
            let next = self.next_liftoff(leg);
            let foot = next.with_z(next.z - support);
            let count = FecEvaluator::new(&hm, (hip.x, hip.y), twist, gait, &self.w.model, &self.w.fec, foot)
                .and_then(|ev| ev.count_safe_at(hip.z - support));
            match count {
                Ok(c) => n[leg.index()] = c,
                Err(e) => self.event(leg.name(), EventKind::Anomaly, 0.0, format!("safe count: {e}")),
            }
        }
        n
    }

    fn log_row(&mut self) {
        let n_sf = self.safe_counts();
        let row = StepLog {
            tick: self.tick,
            time: self.time(),
            base_x: self.x,
            base_y: self.y,
            yaw: self.yaw,
            commanded: self.reference,
            actual: self.actual,
            support_z: self.support_z(),
            n_sf,
            swing: [0, 1, 2, 3].map(|i| self.legs[i].swing.is_some()),
            decision: [0, 1, 2, 3].map(|i| self.legs[i].decision),
            collisions: std::mem::take(&mut self.pending_collisions),
            violations: std::mem::take(&mut self.pending_violations),
        };
        self.out.steps.push(row);
    }

    fn run(mut self) -> RunOutput {
        let sc = self.w.sc;
        let ticks = (sc.duration / sc.dt).round() as u64;
        let planner_every = ((1.0 / sc.planner_rate) / sc.dt).round().max(1.0) as u64;
        let log_every = ((1.0 / sc.metrics_rate) / sc.dt).round().max(1.0) as u64;
        let tracked = |s: &Sim<'_>| {
            let (r, u) = (s.reference.to_array(), s.actual.to_array());
            [(r[0] - u[0]).abs(), (r[1] - u[1]).abs(), (r[2] - u[2]).abs()]
        };
        for tick in 0..ticks {
            self.tick = tick;
            self.step_gait();
            if tick % planner_every == 0 {
                self.plan();
            }
            self.track();
            self.advance_base();
            self.move_swing_feet();
            self.detect();
            let e = tracked(&self);
            for (m, e) in self.mae_sum.iter_mut().zip(e) {
                *m += e;
            }
            if tick % log_every == 0 || tick + 1 == ticks {
                self.log_row();
            }
        }
        self.out.metrics = summarize(sc, &self.out, ticks, self.x, self.mae_sum);
        self.out
    }
}

/// One step of the first-order tracking lag, exact for a reference held
/// constant over `dt`.
pub fn track_step(actual: Pose<f64>, reference: Pose<f64>, dt: f64, tau: f64) -> Pose<f64> {
    let a = 1.0 - (-dt / tau).exp();
    let (r, u) = (reference.to_array(), actual.to_array());
    Pose::from_array([0, 1, 2].map(|k| u[k] + (r[k] - u[k]) * a))
}

fn summarize(sc: &Scenario, out: &RunOutput, ticks: u64, final_x: f64, mae_sum: [f64; 3]) -> RunMetrics {
    let edges = sc.edges();
    let rows = &out.steps;
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let totals: Vec<f64> = rows.iter().map(|r| r.n_sf_total() as f64).collect();
    let min_leg = rows.iter().flat_map(|r| r.n_sf.iter().copied()).min().unwrap_or(0);
    let in_window: Vec<&StepLog> =
        rows.iter().filter(|r| edges.iter().any(|e| (r.base_x - e).abs() <= CRITICAL_WINDOW)).collect();
    let (min_window, mean_window) = if edges.is_empty() || in_window.is_empty() {
        (None, None)
    } else {
        let totals: Vec<f64> = in_window.iter().map(|r| r.n_sf_total() as f64).collect();
        (in_window.iter().flat_map(|r| r.n_sf.iter().copied()).min(), Some(mean(&totals)))
    };
    let (mut dz, mut dp, mut dr, mut du) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for w in out.planner.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        du.push(a.pose.distance(b.pose));
        let dx = (b.base_x - a.base_x).abs();
        if dx > 1e-9 {
            dz.push((b.pose.z_b - a.pose.z_b).abs() / dx);
            dp.push((b.pose.pitch - a.pose.pitch).abs() / dx);
            dr.push((b.pose.roll - a.pose.roll).abs() / dx);
        }
    }
    let env: Vec<f64> = out.planner.iter().filter_map(|p| p.envelope_error).collect();
    let collisions = rows.iter().map(|r| r.collisions).sum::<u32>();
    let violations = rows.iter().map(|r| r.violations).sum::<u32>();
    let n = ticks.max(1) as f64;
    RunMetrics {
        ticks,
        final_x,
        mean_nsf_total: mean(&totals),
        min_nsf_leg: min_leg,
        min_nsf_leg_window: min_window,
        mean_nsf_total_window: mean_window,
        mean_dz_dx: mean(&dz),
        mean_dpitch_dx: mean(&dp),
        mean_droll_dx: mean(&dr),
        mean_du: mean(&du),
        tracking_mae: Pose::new(mae_sum[0] / n, mae_sum[1] / n, mae_sum[2] / n),
        mean_envelope_error: if env.is_empty() { None } else { Some(mean(&env)) },
        planner_ticks: out.planner.len(),
        collisions,
        violations,
        unsafe_steps: out.footholds.iter().filter(|f| f.fallback != Fallback::Selected).count() as u32,
        anomalies: out.events.iter().filter(|e| e.kind == EventKind::Anomaly).count() as u32,
        success: collisions == 0 && violations == 0,
    }
}

/// Runs a scenario to completion. Only configuration errors fail; runtime
/// anomalies are logged as events.
pub fn run_scenario(sc: &Scenario) -> Result<RunOutput, ScenarioError> {
    run_scenario_with(sc, RunOptions::default())
}

pub fn run_scenario_with(sc: &Scenario, opts: RunOptions) -> Result<RunOutput, ScenarioError> {
    Ok(Sim::new(sc, opts)?.run())
}
