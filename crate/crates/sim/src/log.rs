//! Per-tick records, run aggregates and their CSV forms.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use vital_core::fec::SafetyGrid;
use vital_core::robot::Pose;
use vital_core::vfa::Fallback;
use vital_core::Vec3;

/// Logged at the metrics rate. Event counts cover the ticks since the
/// previous row.
#[derive(Debug, Clone, PartialEq)]
pub struct StepLog {
    pub tick: u64,
    pub time: f64,
    pub base_x: f64,
    pub base_y: f64,
    pub yaw: f64,
    pub commanded: Pose<f64>,
    pub actual: Pose<f64>,
    /// Mean height of the support feet the planners work relative to.
    pub support_z: f64,
    pub n_sf: [usize; 4],
    pub swing: [bool; 4],
    pub decision: [Fallback; 4],
    pub collisions: u32,
    pub violations: u32,
}

impl StepLog {
    pub const HEADER: [&'static str; 26] = [
        "tick", "time", "base_x", "base_y", "yaw", "cmd_z", "cmd_roll", "cmd_pitch", "z", "roll", "pitch",
        "support_z", "nsf_lf", "nsf_rf", "nsf_lh", "nsf_rh", "swing_lf", "swing_rf", "swing_lh", "swing_rh",
        "decision_lf", "decision_rf", "decision_lh", "decision_rh", "collisions", "violations",
    ];

    pub fn n_sf_total(&self) -> usize {
        self.n_sf.iter().sum()
    }

    fn record(&self) -> Vec<String> {
        let mut r = vec![
            self.tick.to_string(),
            self.time.to_string(),
            self.base_x.to_string(),
            self.base_y.to_string(),
            self.yaw.to_string(),
        ];
        for u in [self.commanded, self.actual] {
            r.extend(u.to_array().iter().map(|v| v.to_string()));
        }
        r.push(self.support_z.to_string());
        r.extend(self.n_sf.iter().map(|n| n.to_string()));
        r.extend(self.swing.iter().map(|&s| if s { "1" } else { "0" }.to_string()));
        r.extend(self.decision.iter().map(|d| d.as_str().to_string()));
        r.push(self.collisions.to_string());
        r.push(self.violations.to_string());
        r
    }
}

/// One VFA decision, taken at lift-off.
#[derive(Debug, Clone, PartialEq)]
pub struct FootholdLog {
    pub tick: u64,
    pub time: f64,
    pub leg: &'static str,
    /// Foot position the swing starts from.
    pub liftoff: Vec3<f64>,
    pub nominal: Vec3<f64>,
    pub target: Vec3<f64>,
    pub n_sf: usize,
    pub fallback: Fallback,
}

impl FootholdLog {
    pub const HEADER: [&'static str; 14] = [
        "tick", "time", "leg", "liftoff_x", "liftoff_y", "liftoff_z", "nominal_x", "nominal_y", "nominal_z", "target_x",
        "target_y", "target_z", "n_sf", "fallback",
    ];

    fn record(&self) -> Vec<String> {
        let mut r = vec![self.tick.to_string(), self.time.to_string(), self.leg.to_string()];
        for p in [self.liftoff, self.nominal, self.target] {
            r.extend([p.x, p.y, p.z].iter().map(|v| v.to_string()));
        }
        r.push(self.n_sf.to_string());
        r.push(self.fallback.as_str().to_string());
        r
    }
}

/// One planner output.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerLog {
    pub tick: u64,
    pub time: f64,
    pub base_x: f64,
    /// Emitted reference, world frame.
    pub pose: Pose<f64>,
    pub planner: &'static str,
    pub cost: &'static str,
    pub horizon: usize,
    pub objective: Option<f64>,
    /// Fitted safe-foothold value of each leg at the emitted pose.
    pub f_at_pose: Option<[f64; 4]>,
    pub envelope_error: Option<f64>,
    pub box_clamped: bool,
}

impl PlannerLog {
    pub const HEADER: [&'static str; 16] = [
        "tick", "time", "base_x", "z", "roll", "pitch", "planner", "cost", "horizon", "objective", "f_lf", "f_rf",
        "f_lh", "f_rh", "envelope_error", "box_clamped",
    ];

    fn record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        let mut r = vec![self.tick.to_string(), self.time.to_string(), self.base_x.to_string()];
        r.extend(self.pose.to_array().iter().map(|v| v.to_string()));
        r.push(self.planner.to_string());
        r.push(self.cost.to_string());
        r.push(self.horizon.to_string());
        r.push(opt(self.objective));
        match self.f_at_pose {
            Some(f) => r.extend(f.iter().map(|v| v.to_string())),
            None => r.extend(std::iter::repeat_n(String::new(), 4)),
        }
        r.push(opt(self.envelope_error));
        r.push(if self.box_clamped { "1" } else { "0" }.to_string());
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    LegCollision,
    FootCollision,
    Workspace,
    /// Planner or evaluator refused its input; the run continued.
    Anomaly,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::LegCollision => "leg_collision",
            EventKind::FootCollision => "foot_collision",
            EventKind::Workspace => "workspace",
            EventKind::Anomaly => "anomaly",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub tick: u64,
    pub leg: &'static str,
    pub kind: EventKind,
    /// Penetration depth, hip-foot distance, or zero.
    pub value: f64,
    pub note: String,
}

/// Criteria grids behind one foothold decision.
#[derive(Debug, Clone)]
pub struct CriteriaDump {
    pub tick: u64,
    pub leg: &'static str,
    pub grid: SafetyGrid,
}

/// Samples and fitted weights behind one planner tick.
#[derive(Debug, Clone)]
pub struct RbfDump {
    pub tick: u64,
    pub horizon: usize,
    pub leg: &'static str,
    pub samples: Vec<(f64, usize)>,
    pub centers: Vec<f64>,
    pub width: f64,
    pub weights: Vec<f64>,
}

/// Aggregates of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub ticks: u64,
    pub final_x: f64,
    pub mean_nsf_total: f64,
    /// Smallest per-leg count over all rows.
    pub min_nsf_leg: usize,
    /// Smallest per-leg count over rows with the base within the critical
    /// window of a stair edge; `None` off the stairs.
    pub min_nsf_leg_window: Option<usize>,
    pub mean_nsf_total_window: Option<f64>,
    /// Means over consecutive planner outputs.
    pub mean_dz_dx: f64,
    pub mean_dpitch_dx: f64,
    pub mean_droll_dx: f64,
    pub mean_du: f64,
    pub tracking_mae: Pose<f64>,
    pub mean_envelope_error: Option<f64>,
    pub planner_ticks: usize,
    pub collisions: u32,
    pub violations: u32,
    pub unsafe_steps: u32,
    pub anomalies: u32,
    pub success: bool,
}

impl RunMetrics {
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        vec![
            ("ticks", self.ticks.to_string()),
            ("final_x", self.final_x.to_string()),
            ("mean_nsf_total", self.mean_nsf_total.to_string()),
            ("min_nsf_leg", self.min_nsf_leg.to_string()),
            ("min_nsf_leg_window", self.min_nsf_leg_window.map_or(String::new(), |v| v.to_string())),
            ("mean_nsf_total_window", opt(self.mean_nsf_total_window)),
            ("mean_dz_dx", self.mean_dz_dx.to_string()),
            ("mean_dpitch_dx", self.mean_dpitch_dx.to_string()),
            ("mean_droll_dx", self.mean_droll_dx.to_string()),
            ("mean_du", self.mean_du.to_string()),
            ("tracking_mae_z", self.tracking_mae.z_b.to_string()),
            ("tracking_mae_roll", self.tracking_mae.roll.to_string()),
            ("tracking_mae_pitch", self.tracking_mae.pitch.to_string()),
            ("mean_envelope_error", opt(self.mean_envelope_error)),
            ("planner_ticks", self.planner_ticks.to_string()),
            ("collisions", self.collisions.to_string()),
            ("violations", self.violations.to_string()),
            ("unsafe_steps", self.unsafe_steps.to_string()),
            ("anomalies", self.anomalies.to_string()),
            ("success", self.success.to_string()),
        ]
    }
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub steps: Vec<StepLog>,
    pub footholds: Vec<FootholdLog>,
    pub planner: Vec<PlannerLog>,
    pub events: Vec<EventLog>,
    pub criteria: Vec<CriteriaDump>,
    pub rbf: Vec<RbfDump>,
    pub metrics: RunMetrics,
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

impl RunOutput {
    /// Writes the CSV files into `dir`, which must exist.
    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        write_rows(&dir.join("steplog.csv"), &StepLog::HEADER, self.steps.iter().map(StepLog::record))?;
        write_rows(&dir.join("footholds.csv"), &FootholdLog::HEADER, self.footholds.iter().map(FootholdLog::record))?;
        write_rows(&dir.join("planner.csv"), &PlannerLog::HEADER, self.planner.iter().map(PlannerLog::record))?;
        write_rows(
            &dir.join("events.csv"),
            &["tick", "leg", "kind", "value", "note"],
            self.events.iter().map(|e| {
                vec![e.tick.to_string(), e.leg.to_string(), e.kind.as_str().to_string(), e.value.to_string(), e.note.clone()]
            }),
        )?;
        write_rows(
            &dir.join("metrics.csv"),
            &["metric", "value"],
            self.metrics.rows().into_iter().map(|(k, v)| vec![k.to_string(), v]),
        )?;
        if !self.criteria.is_empty() {
            let sub = dir.join("criteria");
            std::fs::create_dir_all(&sub)?;
            for d in &self.criteria {
                write_criteria(&sub.join(format!("t{:06}_{}.csv", d.tick, d.leg.to_lowercase())), &d.grid)?;
            }
        }
        if !self.rbf.is_empty() {
            let mut rows = Vec::new();
            for d in &self.rbf {
                let head = |kind: &str, i: usize, a: String, b: String| {
                    vec![d.tick.to_string(), d.horizon.to_string(), d.leg.to_string(), kind.to_string(), i.to_string(), a, b]
                };
                for (i, (z, n)) in d.samples.iter().enumerate() {
                    rows.push(head("sample", i, z.to_string(), n.to_string()));
                }
                for (i, (c, w)) in d.centers.iter().zip(&d.weights).enumerate() {
                    rows.push(head("weight", i, c.to_string(), w.to_string()));
                }
                rows.push(head("width", 0, d.width.to_string(), String::new()));
            }
            write_rows(&dir.join("rbf.csv"), &["tick", "horizon", "leg", "kind", "index", "a", "b"], rows.into_iter())?;
        }
        Ok(())
    }
}

fn write_criteria(path: &Path, g: &SafetyGrid) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(File::create(path)?);
    writeln!(f, "i,j,tr,lc,kf,fc,raw,safe")?;
    let b = |v: bool| if v { 1 } else { 0 };
    for i in 0..g.safe.h_x() {
        for j in 0..g.safe.h_y() {
            writeln!(
                f,
                "{i},{j},{},{},{},{},{},{}",
                b(g.tr.get(i, j)),
                b(g.lc.get(i, j)),
                b(g.kf.get(i, j)),
                b(g.fc.get(i, j)),
                b(g.raw.get(i, j)),
                b(g.safe.get(i, j))
            )?;
        }
    }
    f.flush()
}
