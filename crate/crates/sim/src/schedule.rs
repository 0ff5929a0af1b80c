//! Integer-tick gait scheduler.

use vital_core::robot::Leg;

use crate::scenario::GaitKind;

/// Lift-off phase of each leg as a fraction of the cycle, in [`Leg::ALL`]
/// order. Trot pairs the diagonals; crawl lifts LH, LF, RH, RF in turn.
pub fn liftoff_phases(kind: GaitKind) -> [f64; 4] {
    match kind {
        GaitKind::Trot => [0.0, 0.5, 0.5, 0.0],
        GaitKind::Crawl => [0.25, 0.75, 0.0, 0.5],
    }
}

/// Which leg lifts off or touches down on a given tick, counted from the
/// gait start.
#[derive(Debug, Clone)]
pub struct GaitSchedule {
    cycle_ticks: u64,
    swing_ticks: u64,
    liftoff_tick: [u64; 4],
}

impl GaitSchedule {
    /// `phase_shift` (cycle fraction) moves every lift-off by the same amount.
    pub fn new(kind: GaitKind, step_frequency: f64, duty_factor: f64, dt: f64, phase_shift: f64) -> Self {
        let cycle_ticks = ((1.0 / step_frequency) / dt).round().max(2.0) as u64;
        let swing_ticks = (((1.0 - duty_factor) * cycle_ticks as f64).round() as u64).clamp(1, cycle_ticks - 1);
        let phases = liftoff_phases(kind);
        let mut liftoff_tick = [0; 4];
        for (l, p) in phases.iter().enumerate() {
            let f = (p + phase_shift).rem_euclid(1.0);
            liftoff_tick[l] = ((f * cycle_ticks as f64).round() as u64) % cycle_ticks;
        }
        Self { cycle_ticks, swing_ticks, liftoff_tick }
    }

    pub fn cycle_ticks(&self) -> u64 {
        self.cycle_ticks
    }

    pub fn swing_ticks(&self) -> u64 {
        self.swing_ticks
    }

    /// Whether `leg` starts a swing on gait tick `g`.
    pub fn lifts_off(&self, leg: Leg, g: u64) -> bool {
        g % self.cycle_ticks == self.liftoff_tick[leg.index()]
    }
}
