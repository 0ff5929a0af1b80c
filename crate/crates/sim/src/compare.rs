//! Paired runs that differ in a single configuration factor.

use std::io::Write;

use thiserror::Error;

use crate::harness::run_scenario;
use crate::log::RunMetrics;
use crate::scenario::{Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("unknown pairing factor `{0}`")]
    UnknownFactor(String),
    #[error("scenarios differ in `{0}`, not only in the paired factor")]
    Mismatch(String),
    #[error("scenarios agree on the paired factor `{0}`")]
    SameFactor(String),
}

/// One compared aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub metric: &'static str,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

impl ComparisonRow {
    /// `b - a`.
    pub fn delta(&self) -> Option<f64> {
        Some(self.b? - self.a?)
    }
}

/// Checks that `a` and `b` differ in `factor` and in nothing else but the
/// name.
pub fn check_pairing(a: &Scenario, b: &Scenario, factor: &str) -> Result<(), CompareError> {
    let (ma, mb) = (a.to_map(), b.to_map());
    if !ma.contains_key(factor) {
        return Err(CompareError::UnknownFactor(factor.into()));
    }
    for (k, va) in &ma {
        if *k == "name" || *k == factor {
            continue;
        }
        if mb.get(k) != Some(va) {
            return Err(CompareError::Mismatch((*k).into()));
        }
    }
    if ma[factor] == mb[factor] {
        return Err(CompareError::SameFactor(factor.into()));
    }
    Ok(())
}

pub fn comparison_rows(a: &RunMetrics, b: &RunMetrics) -> Vec<ComparisonRow> {
    let pick = |m: &RunMetrics| -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("mean_nsf_total", Some(m.mean_nsf_total)),
            ("mean_nsf_total_window", m.mean_nsf_total_window),
            ("min_nsf_leg_window", m.min_nsf_leg_window.map(|v| v as f64)),
            ("mean_envelope_error", m.mean_envelope_error),
            ("mean_dz_dx", Some(m.mean_dz_dx)),
            ("mean_dpitch_dx", Some(m.mean_dpitch_dx)),
            ("mean_droll_dx", Some(m.mean_droll_dx)),
            ("mean_du", Some(m.mean_du)),
            ("tracking_mae_z", Some(m.tracking_mae.z_b)),
            ("tracking_mae_roll", Some(m.tracking_mae.roll)),
            ("tracking_mae_pitch", Some(m.tracking_mae.pitch)),
            ("collisions", Some(m.collisions as f64)),
            ("violations", Some(m.violations as f64)),
            ("success", Some(if m.success { 1.0 } else { 0.0 })),
        ]
    };
    pick(a).into_iter().zip(pick(b)).map(|((metric, a), (_, b))| ComparisonRow { metric, a, b }).collect()
}

/// Runs both scenarios after checking the pairing.
pub fn compare(a: &Scenario, b: &Scenario, factor: &str) -> Result<Vec<ComparisonRow>, CompareError> {
    check_pairing(a, b, factor)?;
    let ra = run_scenario(a)?;
    let rb = run_scenario(b)?;
    Ok(comparison_rows(&ra.metrics, &rb.metrics))
}

pub fn write_csv(rows: &[ComparisonRow], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "a", "b", "delta"])?;
    let s = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    for r in rows {
        w.write_record([r.metric.to_string(), s(r.a), s(r.b), s(r.delta())])?;
    }
    w.flush()?;
    Ok(())
}
