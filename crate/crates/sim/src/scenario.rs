//! Scenario description and its flat `key = value` text form.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;
use vital_core::fec::FecConfig;
use vital_core::robot::{GaitParams, Pose, RobotModel};
use vital_core::terrain::{GappedStairSpec, RoughSpec, StairSpec, TerrainMap};
use vital_core::vpa::{CostKind, CostParams, HipHeightSet};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    Value { key: String, value: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaitKind {
    Trot,
    Crawl,
}

impl GaitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GaitKind::Trot => "trot",
            GaitKind::Crawl => "crawl",
        }
    }

    pub fn default_duty(self) -> f64 {
        match self {
            GaitKind::Trot => 0.5,
            GaitKind::Crawl => 0.8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlannerKind {
    Vpa,
    Tbr,
    None,
}

impl PlannerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::Vpa => "vpa",
            PlannerKind::Tbr => "tbr",
            PlannerKind::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerrainKindCfg {
    Flat,
    Stairs,
    Gapped,
    Rough,
    /// Stairs with a rough layer added on top.
    RoughStairs,
}

impl TerrainKindCfg {
    pub fn as_str(self) -> &'static str {
        match self {
            TerrainKindCfg::Flat => "flat",
            TerrainKindCfg::Stairs => "stairs",
            TerrainKindCfg::Gapped => "gapped",
            TerrainKindCfg::Rough => "rough",
            TerrainKindCfg::RoughStairs => "rough-stairs",
        }
    }
}

/// Everything a run depends on. Two runs of the same scenario are
/// bit-identical.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub terrain: TerrainKindCfg,
    pub stairs_rise: f64,
    pub stairs_going: f64,
    pub stairs_steps: u32,
    pub stairs_start_x: f64,
    /// Length of the top landing; `None` leaves a single ascending flight.
    pub stairs_platform: Option<f64>,
    pub gap_width: f64,
    pub gap_depth: f64,
    pub rough_cell: f64,
    pub rough_amplitude: f64,
    pub rough_seed: u64,

    pub robot: String,
    pub gait: GaitKind,
    pub step_frequency: f64,
    pub duty_factor: f64,
    pub step_length: f64,

    /// Commanded twist in the body frame: `(vx, vy, yaw_rate)`.
    pub vx: f64,
    pub vy: f64,
    pub yaw_rate: f64,
    /// Standing time before the gait starts.
    pub start_delay: f64,
    /// Linear velocity ramp after the start delay.
    pub ramp: f64,

    pub planner: PlannerKind,
    pub planner_rate: f64,
    pub cost: CostKind,
    pub margin: f64,
    pub smooth_eps: usize,
    pub q: f64,
    pub horizon: usize,
    pub delta_h: f64,
    pub lambda_s: f64,
    pub basis: usize,
    pub heights: HipHeightSet<f64>,
    pub pose_min: Pose<f64>,
    pub pose_max: Pose<f64>,
    pub rate: Pose<f64>,
    /// Nominal standing height above the support feet (TBR offset, `none`
    /// planner height, initial pose).
    pub d_ref: f64,

    pub hm_size: usize,
    pub hm_resolution: f64,
    pub fec: FecConfig<f64>,

    pub tau_track: f64,
    pub dt: f64,
    pub duration: f64,
    pub metrics_rate: f64,
    pub seed: u64,
    /// Half-width of the seeded start-position jitter along x.
    pub x_jitter: f64,
    /// Seeded shift of the gait phase, as a fraction of the cycle.
    pub phase_jitter: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        let fec = FecConfig::default();
        Self {
            name: "default".into(),
            terrain: TerrainKindCfg::Flat,
            stairs_rise: 0.10,
            stairs_going: 0.25,
            stairs_steps: 5,
            stairs_start_x: 1.0,
            stairs_platform: Some(1.0),
            gap_width: 0.05,
            gap_depth: 1.0,
            rough_cell: 0.08,
            rough_amplitude: 0.04,
            rough_seed: 1,
            robot: "hyq-like".into(),
            gait: GaitKind::Trot,
            step_frequency: 1.25,
            duty_factor: GaitKind::Trot.default_duty(),
            step_length: 0.16,
            vx: 0.2,
            vy: 0.0,
            yaw_rate: 0.0,
            start_delay: 0.5,
            ramp: 1.0,
            planner: PlannerKind::None,
            planner_rate: 5.0,
            cost: CostKind::Int,
            margin: 0.025,
            smooth_eps: 2,
            q: 1.0,
            horizon: 2,
            delta_h: 0.33,
            lambda_s: 10.0,
            basis: 30,
            heights: HipHeightSet::default(),
            pose_min: Pose::new(0.20, -0.35, -0.35),
            pose_max: Pose::new(0.80, 0.35, 0.35),
            rate: Pose::splat(0.02),
            d_ref: 0.55,
            hm_size: 33,
            hm_resolution: 0.02,
            fec,
            tau_track: 0.15,
            dt: 0.01,
            duration: 10.0,
            metrics_rate: 20.0,
            seed: 0,
            x_jitter: 0.05,
            phase_jitter: 1.0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ScenarioError> {
    value.parse().map_err(|_| ScenarioError::Value { key: key.into(), value: value.into() })
}

impl Scenario {
    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse_str(text: &str) -> Result<Self, ScenarioError> {
        let mut s = Scenario::default();
        let mut duty_set = false;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ScenarioError::Syntax { line: n + 1 })?;
            let (k, v) = (k.trim(), v.trim());
            if k == "gait.duty" {
                duty_set = true;
            }
            s.set(k, v)?;
        }
        if !duty_set {
            s.duty_factor = s.gait.default_duty();
        }
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
        Self::parse_str(&text)
    }

    /// Sets one key. Unknown keys are an error.
    pub fn set(&mut self, k: &str, v: &str) -> Result<(), ScenarioError> {
        match k {
            "name" => self.name = v.to_string(),
            "terrain" => {
                self.terrain = match v {
                    "flat" => TerrainKindCfg::Flat,
                    "stairs" => TerrainKindCfg::Stairs,
                    "gapped" => TerrainKindCfg::Gapped,
                    "rough" => TerrainKindCfg::Rough,
                    "rough-stairs" => TerrainKindCfg::RoughStairs,
                    _ => return Err(ScenarioError::Value { key: k.into(), value: v.into() }),
                }
            }
            "stairs.rise" => self.stairs_rise = parse(k, v)?,
            "stairs.going" => self.stairs_going = parse(k, v)?,
            "stairs.steps" => self.stairs_steps = parse(k, v)?,
            "stairs.start_x" => self.stairs_start_x = parse(k, v)?,
            "stairs.platform" => self.stairs_platform = if v == "none" { None } else { Some(parse(k, v)?) },
            "gap.width" => self.gap_width = parse(k, v)?,
            "gap.depth" => self.gap_depth = parse(k, v)?,
            "rough.cell" => self.rough_cell = parse(k, v)?,
            "rough.amplitude" => self.rough_amplitude = parse(k, v)?,
            "rough.seed" => self.rough_seed = parse(k, v)?,
            "robot" => self.robot = v.to_string(),
            "gait" => {
                self.gait = match v {
                    "trot" => GaitKind::Trot,
                    "crawl" => GaitKind::Crawl,
                    _ => return Err(ScenarioError::Value { key: k.into(), value: v.into() }),
                }
            }
            "gait.frequency" => self.step_frequency = parse(k, v)?,
            "gait.duty" => self.duty_factor = parse(k, v)?,
            "gait.step_length" => self.step_length = parse(k, v)?,
            "twist.vx" => self.vx = parse(k, v)?,
            "twist.vy" => self.vy = parse(k, v)?,
            "twist.yaw_rate" => self.yaw_rate = parse(k, v)?,
            "twist.start" => self.start_delay = parse(k, v)?,
            "twist.ramp" => self.ramp = parse(k, v)?,
            "planner" => {
                self.planner = match v {
                    "vpa" => PlannerKind::Vpa,
                    "tbr" => PlannerKind::Tbr,
                    "none" => PlannerKind::None,
                    _ => return Err(ScenarioError::Value { key: k.into(), value: v.into() }),
                }
            }
            "planner.rate" => self.planner_rate = parse(k, v)?,
            "vpa.cost" => self.cost = v.parse().map_err(|_| ScenarioError::Value { key: k.into(), value: v.into() })?,
            "vpa.margin" => self.margin = parse(k, v)?,
            "vpa.smooth_eps" => self.smooth_eps = parse(k, v)?,
            "vpa.q" => self.q = parse(k, v)?,
            "vpa.horizon" => self.horizon = parse(k, v)?,
            "vpa.delta_h" => self.delta_h = parse(k, v)?,
            "vpa.lambda_s" => self.lambda_s = parse(k, v)?,
            "vpa.basis" => self.basis = parse(k, v)?,
            "vpa.z_min" => self.heights.z_min = parse(k, v)?,
            "vpa.z_max" => self.heights.z_max = parse(k, v)?,
            "vpa.heights" => self.heights.count = parse(k, v)?,
            "bounds.z_min" => self.pose_min.z_b = parse(k, v)?,
            "bounds.z_max" => self.pose_max.z_b = parse(k, v)?,
            "bounds.roll" => {
                let r: f64 = parse(k, v)?;
                self.pose_min.roll = -r;
                self.pose_max.roll = r;
            }
            "bounds.pitch" => {
                let p: f64 = parse(k, v)?;
                self.pose_min.pitch = -p;
                self.pose_max.pitch = p;
            }
            "rate.z" => self.rate.z_b = parse(k, v)?,
            "rate.roll" => self.rate.roll = parse(k, v)?,
            "rate.pitch" => self.rate.pitch = parse(k, v)?,
            "d_ref" => self.d_ref = parse(k, v)?,
            "heightmap.size" => self.hm_size = parse(k, v)?,
            "heightmap.resolution" => self.hm_resolution = parse(k, v)?,
            "fec.tr_mean" => self.fec.tr_mean_max = parse(k, v)?,
            "fec.tr_std" => self.fec.tr_std_max = parse(k, v)?,
            "fec.lc_clearance" => self.fec.lc_clearance = parse(k, v)?,
            "fec.lc_samples" => self.fec.lc_time_samples = parse(k, v)?,
            "fec.fc_clearance" => self.fec.fc_clearance = parse(k, v)?,
            "fec.fc_samples" => self.fec.fc_arc_samples = parse(k, v)?,
            "fec.erosion" => self.fec.erosion_radius = parse(k, v)?,
            "tau_track" => self.tau_track = parse(k, v)?,
            "dt" => self.dt = parse(k, v)?,
            "duration" => self.duration = parse(k, v)?,
            "metrics.rate" => self.metrics_rate = parse(k, v)?,
            "seed" => self.seed = parse(k, v)?,
            "jitter.x" => self.x_jitter = parse(k, v)?,
            "jitter.phase" => self.phase_jitter = parse(k, v)?,
            _ => return Err(ScenarioError::UnknownKey(k.into())),
        }
        Ok(())
    }

    /// Canonical `key = value` map of every field; [`Scenario::parse_str`]
    /// of its text form reproduces the scenario.
    pub fn to_map(&self) -> BTreeMap<&'static str, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &'static str, v: String| {
            m.insert(k, v);
        };
        put("name", self.name.clone());
        put("terrain", self.terrain.as_str().into());
        put("stairs.rise", self.stairs_rise.to_string());
        put("stairs.going", self.stairs_going.to_string());
        put("stairs.steps", self.stairs_steps.to_string());
        put("stairs.start_x", self.stairs_start_x.to_string());
        put("stairs.platform", self.stairs_platform.map_or("none".into(), |p| p.to_string()));
        put("gap.width", self.gap_width.to_string());
        put("gap.depth", self.gap_depth.to_string());
        put("rough.cell", self.rough_cell.to_string());
        put("rough.amplitude", self.rough_amplitude.to_string());
        put("rough.seed", self.rough_seed.to_string());
        put("robot", self.robot.clone());
        put("gait", self.gait.as_str().into());
        put("gait.frequency", self.step_frequency.to_string());
        put("gait.duty", self.duty_factor.to_string());
        put("gait.step_length", self.step_length.to_string());
        put("twist.vx", self.vx.to_string());
        put("twist.vy", self.vy.to_string());
        put("twist.yaw_rate", self.yaw_rate.to_string());
        put("twist.start", self.start_delay.to_string());
        put("twist.ramp", self.ramp.to_string());
        put("planner", self.planner.as_str().into());
        put("planner.rate", self.planner_rate.to_string());
        put("vpa.cost", self.cost.as_str().into());
        put("vpa.margin", self.margin.to_string());
        put("vpa.smooth_eps", self.smooth_eps.to_string());
        put("vpa.q", self.q.to_string());
        put("vpa.horizon", self.horizon.to_string());
        put("vpa.delta_h", self.delta_h.to_string());
        put("vpa.lambda_s", self.lambda_s.to_string());
        put("vpa.basis", self.basis.to_string());
        put("vpa.z_min", self.heights.z_min.to_string());
        put("vpa.z_max", self.heights.z_max.to_string());
        put("vpa.heights", self.heights.count.to_string());
        put("bounds.z_min", self.pose_min.z_b.to_string());
        put("bounds.z_max", self.pose_max.z_b.to_string());
        put("bounds.roll", self.pose_max.roll.to_string());
        put("bounds.pitch", self.pose_max.pitch.to_string());
        put("rate.z", self.rate.z_b.to_string());
        put("rate.roll", self.rate.roll.to_string());
        put("rate.pitch", self.rate.pitch.to_string());
        put("d_ref", self.d_ref.to_string());
        put("heightmap.size", self.hm_size.to_string());
        put("heightmap.resolution", self.hm_resolution.to_string());
        put("fec.tr_mean", self.fec.tr_mean_max.to_string());
        put("fec.tr_std", self.fec.tr_std_max.to_string());
        put("fec.lc_clearance", self.fec.lc_clearance.to_string());
        put("fec.lc_samples", self.fec.lc_time_samples.to_string());
        put("fec.fc_clearance", self.fec.fc_clearance.to_string());
        put("fec.fc_samples", self.fec.fc_arc_samples.to_string());
        put("fec.erosion", self.fec.erosion_radius.to_string());
        put("tau_track", self.tau_track.to_string());
        put("dt", self.dt.to_string());
        put("duration", self.duration.to_string());
        put("metrics.rate", self.metrics_rate.to_string());
        put("seed", self.seed.to_string());
        put("jitter.x", self.x_jitter.to_string());
        put("jitter.phase", self.phase_jitter.to_string());
        m
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_map() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: &str| Err(ScenarioError::Invalid(m.into()));
        if !(self.planner_rate > 0.0) {
            return bad("planner rate must be positive");
        }
        if !(self.duration > 0.0) {
            return bad("duration must be positive");
        }
        if !(self.dt > 0.0 && self.dt <= 0.1) {
            return bad("dt must lie in (0, 0.1]");
        }
        if !(self.metrics_rate > 0.0) {
            return bad("metrics rate must be positive");
        }
        if !(self.tau_track > 0.0) {
            return bad("tracking time constant must be positive");
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1");
        }
        if self.hm_size.is_multiple_of(2) || self.hm_size < 3 {
            return bad("heightmap size must be odd and at least 3");
        }
        if !(self.hm_resolution > 0.0) {
            return bad("heightmap resolution must be positive");
        }
        if !(self.start_delay >= 0.0 && self.ramp >= 0.0) {
            return bad("start delay and ramp must be non-negative");
        }
        if !(self.x_jitter >= 0.0 && self.phase_jitter >= 0.0) {
            return bad("jitter amplitudes must be non-negative");
        }
        let (lo, hi) = (self.pose_min.to_array(), self.pose_max.to_array());
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return bad("pose bounds must satisfy min <= max");
        }
        if self.rate.to_array().iter().any(|r| !(*r >= 0.0)) {
            return bad("rate bounds must be non-negative");
        }
        self.heights.validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        self.cost_params().validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        self.fec.validate().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        self.gait_params().map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        self.model()?;
        if self.basis == 0 {
            return bad("at least one basis function is required");
        }
        let positive = [self.stairs_rise, self.stairs_going, self.rough_cell];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return bad("stair rise, going and rough cell size must be positive");
        }
        Ok(())
    }

    pub fn model(&self) -> Result<RobotModel<f64>, ScenarioError> {
        RobotModel::preset(&self.robot).map_err(|e| ScenarioError::Invalid(e.to_string()))
    }

    /// Gait descriptor with `t_remaining` zero; callers set it per use.
    pub fn gait_params(&self) -> Result<GaitParams<f64>, vital_core::robot::GaitError> {
        GaitParams::new(self.step_length, self.step_frequency, self.duty_factor, 0.0)
    }

    pub fn cost_params(&self) -> CostParams<f64> {
        CostParams { kind: self.cost, q: self.q, margin: self.margin, smooth_eps: self.smooth_eps }
    }

    pub fn stair_spec(&self) -> StairSpec<f64> {
        let s = StairSpec::new(self.stairs_rise, self.stairs_going, self.stairs_steps, self.stairs_start_x);
        match self.stairs_platform {
            Some(l) => s.with_platform(l),
            None => s,
        }
    }

    pub fn terrain_map(&self) -> TerrainMap<f64> {
        let rough = RoughSpec { cell_size: self.rough_cell, amplitude: self.rough_amplitude, seed: self.rough_seed };
        match self.terrain {
            TerrainKindCfg::Flat => TerrainMap::Flat,
            TerrainKindCfg::Stairs => TerrainMap::Stairs(self.stair_spec()),
            TerrainKindCfg::Gapped => TerrainMap::GappedStairs(GappedStairSpec {
                stairs: self.stair_spec(),
                gap_width: self.gap_width,
                gap_depth: self.gap_depth,
            }),
            TerrainKindCfg::Rough => TerrainMap::Rough(rough),
            TerrainKindCfg::RoughStairs => {
                TerrainMap::Composite(vec![TerrainMap::Stairs(self.stair_spec()), TerrainMap::Rough(rough)])
            }
        }
    }

    /// World x of every riser and drop, empty off the stairs.
    pub fn edges(&self) -> Vec<f64> {
        match self.terrain {
            TerrainKindCfg::Stairs | TerrainKindCfg::Gapped | TerrainKindCfg::RoughStairs => self.stair_spec().edge_positions(),
            _ => Vec::new(),
        }
    }
}
