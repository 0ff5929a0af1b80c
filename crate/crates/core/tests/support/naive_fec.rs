//! Brute-force reference for the foothold criteria, written directly from
//! their definitions on plain `f64` arrays: every segment and arc point is
//! checked, nothing is cached or skipped.

#![allow(dead_code)]

use vital_core::fec::FecConfig;
use vital_core::robot::{BodyTwist, GaitParams, RobotModel};
use vital_core::terrain::Heightmap;
use vital_core::Vec3;

pub struct NaiveGrids {
    pub tr: Vec<bool>,
    pub lc: Vec<bool>,
    pub kf: Vec<bool>,
    pub fc: Vec<bool>,
    pub raw: Vec<bool>,
    pub safe: Vec<bool>,
}

type P = [f64; 3];

fn dist(a: P, b: P) -> f64 {
    let (dx, dy, dz) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

struct Grid<'a> {
    hm: &'a Heightmap<f64>,
    sin: f64,
    cos: f64,
}

impl Grid<'_> {
    fn h(&self, i: usize, j: usize) -> f64 {
        self.hm.cells()[i * self.hm.h_y() + j]
    }

    fn cell_xy(&self, i: usize, j: usize) -> (f64, f64) {
        let res = self.hm.resolution();
        let ox = (i as f64 - (self.hm.h_x() / 2) as f64) * res;
        let oy = (j as f64 - (self.hm.h_y() / 2) as f64) * res;
        let (cx, cy) = self.hm.center();
        (cx + self.cos * ox - self.sin * oy, cy + self.sin * ox + self.cos * oy)
    }

    /// Highest of the (up to four) cells whose centres bracket the point.
    fn terrain_under(&self, x: f64, y: f64) -> f64 {
        let (cx, cy) = self.hm.center();
        let res = self.hm.resolution();
        let (dx, dy) = (x - cx, y - cy);
        let u = (self.cos * dx + self.sin * dy) / res + (self.hm.h_x() / 2) as f64;
        let v = (-self.sin * dx + self.cos * dy) / res + (self.hm.h_y() / 2) as f64;
        let clamp_i = |t: f64| t.max(0.0).min((self.hm.h_x() - 1) as f64) as usize;
        let clamp_j = |t: f64| t.max(0.0).min((self.hm.h_y() - 1) as f64) as usize;
        let mut best = f64::NEG_INFINITY;
        for i in [clamp_i(u.floor()), clamp_i(u.ceil())] {
            for j in [clamp_j(v.floor()), clamp_j(v.ceil())] {
                best = best.max(self.h(i, j));
            }
        }
        best
    }
}

fn arc_point(lo: P, td: P, apex: f64, s: f64) -> P {
    let r = 1.0 - s;
    let mut p = [lo[0] * r + td[0] * s, lo[1] * r + td[1] * s, lo[2] * r + td[2] * s];
    if s > 0.0 && s < 1.0 {
        p[2] += apex * (std::f64::consts::PI * s).sin();
    }
    p
}

fn leg_segment_clear(g: &Grid<'_>, hip: P, contact: P, r: f64, clearance: f64) -> bool {
    let c = [contact[0], contact[1], contact[2] + r];
    let d = [hip[0] - c[0], hip[1] - c[1], hip[2] - c[2]];
    let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let n = ((len / g.hm.resolution()).ceil() as usize + 1).max(2);
    for k in 0..n {
        let t = k as f64 / (n - 1) as f64;
        if t * len <= r {
            continue;
        }
        let p = [c[0] + d[0] * t, c[1] + d[1] * t, c[2] + d[2] * t];
        if p[2] - g.terrain_under(p[0], p[1]) < clearance {
            return false;
        }
    }
    true
}

#[allow(clippy::too_many_arguments)]
pub fn naive_fec(
    hm: &Heightmap<f64>,
    hip_height: f64,
    hip_xy: (f64, f64),
    twist: &BodyTwist<f64>,
    gait: &GaitParams<f64>,
    model: &RobotModel<f64>,
    cfg: &FecConfig<f64>,
    liftoff: Vec3<f64>,
) -> NaiveGrids {
    let (sin, cos) = hm.yaw().sin_cos();
    let g = Grid { hm, sin, cos };
    let (hx, hy) = (hm.h_x(), hm.h_y());
    let (vx, vy) = (twist.linear.x, twist.linear.y);
    let t_st = gait.duty_factor / gait.step_frequency;
    let t_sw = (1.0 - gait.duty_factor) / gait.step_frequency;
    let td_hip = [hip_xy.0 + vx * gait.t_remaining, hip_xy.1 + vy * gait.t_remaining, hip_height];
    let stance = |f: f64| [td_hip[0] + (vx * t_st) * f, td_hip[1] + (vy * t_st) * f, td_hip[2]];
    let swing = |s: f64| [td_hip[0] - (vx * t_sw) * (1.0 - s), td_hip[1] - (vy * t_sw) * (1.0 - s), td_hip[2]];
    let lo = [liftoff.x, liftoff.y, liftoff.z];
    let in_shell = |hip: P, foot: P| {
        let d = dist(hip, foot);
        d >= model.r_min && d <= model.r_max
    };

    let mut out = NaiveGrids {
        tr: vec![false; hx * hy],
        lc: vec![false; hx * hy],
        kf: vec![false; hx * hy],
        fc: vec![false; hx * hy],
        raw: vec![false; hx * hy],
        safe: vec![false; hx * hy],
    };
    for i in 0..hx {
        for j in 0..hy {
            let idx = i * hy + j;
            let (x, y) = g.cell_xy(i, j);
            let c = [x, y, g.h(i, j)];

            // slopes to the in-grid 8-neighbours
            let mut slopes = Vec::new();
            for ni in i.saturating_sub(1)..=(i + 1).min(hx - 1) {
                for nj in j.saturating_sub(1)..=(j + 1).min(hy - 1) {
                    if (ni, nj) == (i, j) {
                        continue;
                    }
                    let run = if ni != i && nj != j { hm.resolution() * std::f64::consts::SQRT_2 } else { hm.resolution() };
                    slopes.push((g.h(ni, nj) - c[2]).abs() / run);
                }
            }
            let mut sum = 0.0;
            for s in &slopes {
                sum += s;
            }
            let mean = sum / slopes.len() as f64;
            let mut var = 0.0;
            for s in &slopes {
                var += (s - mean) * (s - mean);
            }
            let std = (var / slopes.len() as f64).sqrt();
            out.tr[idx] = mean <= cfg.tr_mean_max && std <= cfg.tr_std_max;

            let n_arc = cfg.fc_arc_samples;
            let arc: Vec<(f64, P)> = (0..n_arc)
                .map(|k| {
                    let s = k as f64 / (n_arc - 1) as f64;
                    (s, arc_point(lo, c, model.default_step_height, s))
                })
                .collect();

            out.fc[idx] = arc[1..n_arc - 1].iter().all(|&(_, p)| p[2] - g.terrain_under(p[0], p[1]) >= cfg.fc_clearance);

            out.kf[idx] = in_shell(td_hip, c) && in_shell(stance(1.0), c) && arc.iter().all(|&(s, p)| in_shell(swing(s), p));

            let n_st = cfg.lc_time_samples;
            let stance_ok = (0..n_st).all(|k| {
                let f = k as f64 / (n_st - 1) as f64;
                leg_segment_clear(&g, stance(f), c, model.foot_radius, cfg.lc_clearance)
            });
            // the lift-off configuration is not the candidate's to answer for
            let swing_ok = arc[1..].iter().all(|&(s, p)| leg_segment_clear(&g, swing(s), p, model.foot_radius, cfg.lc_clearance));
            out.lc[idx] = stance_ok && swing_ok;

            out.raw[idx] = out.tr[idx] && out.lc[idx] && out.kf[idx] && out.fc[idx];
        }
    }
    let r = cfg.erosion_radius as i64;
    for i in 0..hx as i64 {
        for j in 0..hy as i64 {
            let mut ok = true;
            for di in -r..=r {
                for dj in -r..=r {
                    let (a, b) = (i + di, j + dj);
                    if a >= 0 && b >= 0 && a < hx as i64 && b < hy as i64 && !out.raw[(a * hy as i64 + b) as usize] {
                        ok = false;
                    }
                }
            }
            out.safe[(i * hy as i64 + j) as usize] = ok;
        }
    }
    out
}
