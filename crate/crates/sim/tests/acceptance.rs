//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

#[path = "../../core/tests/support/naive_fec.rs"]
mod naive_fec;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vital_core::fec::{eval_fec, FecConfig, FecEvaluator, FecInput};
use vital_core::robot::{hip_height, hip_world, BodyTwist, GaitParams, Leg, Pose, RobotModel};
use vital_core::terrain::{extract_heightmap, RoughSpec, StairSpec, TerrainMap};
use vital_core::vpa::{
    assumed_liftoff, fit_rbf, optimize_pose_single, pose_evaluation, pose_objective, Bounds, CostKind, CostParams,
    HipHeightSet, PoseOptProblem, SafeFootholdFunction,
};
use vital_core::{cardan_rotation, Vec3};
use vital_sim::log::RunOutput;
use vital_sim::sweep::{stairs_range, station_sweep};
use vital_sim::{run_scenario, Scenario};

const GRID_CELLS: usize = 33 * 33;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn stairs(extra: &str) -> Scenario {
    let base = "terrain = stairs\nstairs.rise = 0.10\nstairs.going = 0.25\nstairs.steps = 5\n\
                gait = trot\ntwist.vx = 0.2\nplanner = vpa\nvpa.cost = int\nvpa.horizon = 2\nduration = 30\n";
    Scenario::parse_str(&format!("{base}{extra}")).expect("valid scenario")
}

fn a1(run: &RunOutput, sc: &Scenario, wall: Duration) -> Outcome {
    let edges = sc.edges();
    let n = sc.stairs_steps as usize;
    let (first, top, down) = (edges[0], edges[n - 1], edges[n]);
    let up = run.planner.iter().any(|p| p.base_x < first && p.pose.pitch < -0.02);
    let dn = run.planner.iter().any(|p| p.base_x > top && p.base_x < down && p.pose.pitch > 0.02);
    let m = &run.metrics;
    let pass = m.success && up && dn && wall < Duration::from_secs(60);
    Outcome {
        id: "A1",
        pass,
        detail: format!(
            "success={} collisions={} violations={} pitch_up_before_riser={up} pitch_down_before_descent={dn} wall={:.1}s",
            m.success,
            m.collisions,
            m.violations,
            wall.as_secs_f64()
        ),
    }
}

fn a2(seed0: &RunOutput) -> Outcome {
    let limit = GRID_CELLS as f64 * 0.1;
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in 0..3u64 {
        let vpa = if seed == 0 {
            seed0.metrics.clone()
        } else {
            run_scenario(&stairs(&format!("seed = {seed}\n"))).unwrap().metrics
        };
        let tbr = run_scenario(&stairs(&format!("seed = {seed}\nplanner = tbr\n"))).unwrap().metrics;
        let v_min = vpa.min_nsf_leg_window.unwrap_or(0) as f64;
        let t_min = tbr.min_nsf_leg_window.unwrap_or(0) as f64;
        let ratio = vpa.mean_nsf_total / tbr.mean_nsf_total;
        let ok = ratio >= 1.2 && t_min < limit && v_min > limit;
        pass &= ok;
        parts.push(format!("seed {seed}: ratio={ratio:.3} tbr_win_min={t_min} vpa_win_min={v_min}"));
    }
    Outcome { id: "A2", pass, detail: parts.join("; ") }
}

/// Plateau-shaped safe-count samples like those the FEC produces.
fn random_functions(rng: &mut ChaCha8Rng, heights: &HipHeightSet<f64>) -> Vec<SafeFootholdFunction<f64>> {
    (0..4)
        .map(|_| {
            let lo = rng.gen_range(0.25..0.55);
            let hi = lo + rng.gen_range(0.05..0.3);
            let top = rng.gen_range(200.0..1089.0);
            let bump = rng.gen_range(0.0..300.0);
            let c = rng.gen_range(0.3..0.7);
            let samples: Vec<(f64, f64)> = heights
                .values()
                .into_iter()
                .map(|z| {
                    let win = if z >= lo && z <= hi { top } else { 0.0 };
                    let b = bump * (-0.5 * ((z - c) / 0.04f64).powi(2)).exp();
                    (z, (win + b).round().min(1089.0))
                })
                .collect();
            fit_rbf(&samples, 30, heights.z_min, heights.z_max).unwrap()
        })
        .collect()
}

fn dense_best(p: &PoseOptProblem<f64>, b: &Bounds<f64>) -> f64 {
    let step = 0.005;
    let n = |lo: f64, hi: f64| ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let (lo, hi) = (b.lo.to_array(), b.hi.to_array());
    let mut best = f64::NEG_INFINITY;
    for i in 0..n(lo[0], hi[0]) {
        for j in 0..n(lo[1], hi[1]) {
            for k in 0..n(lo[2], hi[2]) {
                let u = Pose::new(lo[0] + step * i as f64, lo[1] + step * j as f64, lo[2] + step * k as f64);
                best = best.max(pose_objective(&p.functions[0], &p.hip_offsets, &p.cost, u));
            }
        }
    }
    best
}

fn a3() -> Outcome {
    let model = RobotModel::<f64>::hyq_like();
    let heights = HipHeightSet::default();
    let kinds = [CostKind::Sum, CostKind::Int, CostKind::Prod, CostKind::Smooth];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let global = Bounds::new(Pose::new(0.2, -0.35, -0.35), Pose::new(0.8, 0.35, 0.35));
    let (mut worst, mut slowest) = (f64::INFINITY, Duration::ZERO);
    for k in 0..20 {
        let functions = random_functions(&mut rng, &heights);
        // a quarter of the instances search the whole box, the rest a rate box
        let half = if k % 4 == 0 { 1.0 } else { rng.gen_range(0.03..0.12) };
        let u_prev = Pose::new(rng.gen_range(0.3..0.7), rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
        let p = PoseOptProblem {
            functions: vec![functions],
            hip_offsets: model.hip_offsets.to_vec(),
            u_prev,
            bounds: global,
            du_min: Pose::splat(-half),
            du_max: Pose::splat(half),
            cost: CostParams::new(kinds[k % kinds.len()]),
            lambda_s: 10.0,
        };
        let t = Instant::now();
        let s = optimize_pose_single(&p).unwrap();
        slowest = slowest.max(t.elapsed());
        let (b, _) = p.first_box();
        let best = dense_best(&p, &b);
        let r = if best > 0.0 { s.objective / best } else { 1.0 };
        worst = worst.min(r);
    }

    // one exact tick on a stairs riser: 33x33 x 31 heights x 4 legs
    let terrain = TerrainMap::Stairs(StairSpec::new(0.10, 0.25, 5, 1.0));
    let (twist, gait) = (BodyTwist::planar(0.2, 0.0, 0.0), GaitParams::new(0.16, 1.25, 0.5, 0.2).unwrap());
    let cfg = FecConfig::default();
    let t = Instant::now();
    let pose = Pose::new(0.55, 0.0, 0.0);
    let hms: Vec<_> = model
        .hip_offsets
        .iter()
        .map(|&o| {
            let h = hip_world((1.0, 0.0), pose, 0.0, o);
            extract_heightmap(&terrain, (h.x, h.y), 0.0, 33, 33, 0.02).unwrap()
        })
        .collect();
    let refs: Vec<_> = hms.iter().collect();
    let samples = pose_evaluation(&refs, twist, gait, &heights, &model, &cfg).unwrap();
    let fs = samples.fit(30, &heights).unwrap();
    let p = PoseOptProblem {
        functions: vec![fs],
        hip_offsets: model.hip_offsets.to_vec(),
        u_prev: pose,
        bounds: global,
        du_min: Pose::splat(-0.02),
        du_max: Pose::splat(0.02),
        cost: CostParams::new(CostKind::Int),
        lambda_s: 10.0,
    };
    optimize_pose_single(&p).unwrap();
    let tick = t.elapsed();
    let pass = worst >= 0.99 && slowest < Duration::from_millis(100) && tick < Duration::from_secs(2);
    Outcome {
        id: "A3",
        pass,
        detail: format!(
            "worst objective/dense={worst:.5} slowest solve={:.1}ms exact tick={:.0}ms",
            slowest.as_secs_f64() * 1e3,
            tick.as_secs_f64() * 1e3
        ),
    }
}

fn a4() -> Outcome {
    let sc = stairs("");
    let (a, b) = stairs_range(&sc).unwrap();
    let st = station_sweep(&sc, &[CostKind::Int, CostKind::Sum], a, b, 0.05).unwrap();
    let n = st.len() as f64;
    let e = |k: usize| st.iter().map(|s| s.outcomes[k].envelope_error).sum::<f64>() / n;
    let (e_int, e_sum) = (e(0), e(1));
    let wins = st.iter().filter(|s| s.outcomes[0].envelope_error <= s.outcomes[1].envelope_error).count() as f64 / n;
    Outcome {
        id: "A4",
        pass: e_int <= e_sum && wins >= 0.8,
        detail: format!("stations={} mean e_int={e_int:.1} mean e_sum={e_sum:.1} int<=sum at {:.1}%", st.len(), wins * 100.0),
    }
}

fn a5() -> Outcome {
    // Q normalises counts to grid fractions so that λ_s weighs against the cost
    let run = |h: usize| {
        let sc = stairs(&format!("twist.vx = 0.4\nvpa.horizon = {h}\nvpa.q = {}\nduration = 20\n", 1.0 / (GRID_CELLS * GRID_CELLS) as f64));
        run_scenario(&sc).unwrap().metrics
    };
    let (one, two) = (run(1), run(2));
    Outcome {
        id: "A5",
        pass: two.mean_dz_dx <= one.mean_dz_dx && two.mean_dpitch_dx <= one.mean_dpitch_dx,
        detail: format!(
            "|dz/dx| N1={:.4} N2={:.4}; |dpitch/dx| N1={:.4} N2={:.4}",
            one.mean_dz_dx, two.mean_dz_dx, one.mean_dpitch_dx, two.mean_dpitch_dx
        ),
    }
}

fn a6() -> Outcome {
    let model = RobotModel::<f64>::hyq_like();
    let cfg = FecConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut mismatches = 0;
    let mut safe = 0;
    for k in 0..50 {
        let terrain = if k % 2 == 0 {
            TerrainMap::Stairs(StairSpec::new(rng.gen_range(0.05..0.18), rng.gen_range(0.15..0.35), 4, 0.0))
        } else {
            TerrainMap::Rough(RoughSpec { cell_size: 0.05, amplitude: rng.gen_range(0.0..0.08), seed: rng.gen() })
        };
        let (cx, cy) = (rng.gen_range(-0.1..0.9), rng.gen_range(-0.5..0.5));
        let hm = extract_heightmap(&terrain, (cx, cy), rng.gen_range(-0.5..0.5), 9, 9, 0.02).unwrap();
        let twist = BodyTwist::planar(rng.gen_range(-0.3..0.3), rng.gen_range(-0.2..0.2), 0.0);
        let gait = GaitParams::new(0.16, 1.25, 0.5, rng.gen_range(0.0..0.3)).unwrap();
        let (lx, ly) = (cx + rng.gen_range(-0.2..0.2), cy + rng.gen_range(-0.1..0.1));
        let lift = Vec3::new(lx, ly, terrain.sample_height(lx, ly));
        let z = terrain.sample_height(cx, cy) + rng.gen_range(0.3..0.8);
        let input = FecInput { heightmap: &hm, hip_height: z, hip_world_xy: (cx, cy), twist, gait };
        let fast = eval_fec(&input, &model, &cfg, lift).unwrap();
        let slow = naive_fec::naive_fec(&hm, z, (cx, cy), &twist, &gait, &model, &cfg, lift);
        let same = fast.tr.cells() == &slow.tr[..]
            && fast.lc.cells() == &slow.lc[..]
            && fast.kf.cells() == &slow.kf[..]
            && fast.fc.cells() == &slow.fc[..]
            && fast.safe.cells() == &slow.safe[..]
            && fast.count_safe() == slow.safe.iter().filter(|&&b| b).count();
        mismatches += usize::from(!same);
        safe += fast.count_safe();
    }
    Outcome { id: "A6", pass: mismatches == 0, detail: format!("patches=50 mismatches={mismatches} safe cells={safe}") }
}

fn a7() -> Outcome {
    let heights = HipHeightSet::default();
    let truth = SafeFootholdFunction::with_weights(0.2, 0.8, vec![120.0, 800.0, 1089.0, 300.0, 40.0]).unwrap();
    let samples: Vec<(f64, f64)> = heights.values().into_iter().map(|z| (z, truth.eval(z))).collect();
    let fit = fit_rbf(&samples, 5, 0.2, 0.8).unwrap();
    let rmse = fit.rmse(&samples);
    let width: f64 = SafeFootholdFunction::<f64>::zeros(0.2, 0.8, 3).unwrap().width();
    let rel = (width - 0.13).abs() / 0.13;
    Outcome {
        id: "A7",
        pass: rmse < 1e-8 && rel <= 0.02,
        detail: format!("recovery rmse={rmse:.2e}; E=3 width={width:.6} ({:.3}% from 0.13)", rel * 100.0),
    }
}

fn a8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let u: Pose<f64> = Pose::new(rng.gen_range(0.0..1.0), rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
        let o = Vec3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.3..0.3), rng.gen_range(-0.2..0.2));
        let r = cardan_rotation(u.roll, u.pitch, 0.0);
        let third: f64 = u.z_b + r[2][0] * o.x + r[2][1] * o.y + r[2][2] * o.z;
        worst = worst.max((hip_height(u, o) - third).abs());
    }
    Outcome { id: "A8", pass: worst <= 1e-12, detail: format!("samples=1000 max |error|={worst:.2e}") }
}

fn a9() -> Outcome {
    let sc = Scenario::default();
    let model = sc.model().unwrap();
    let terrain = sc.terrain_map();
    let twist = BodyTwist::planar(sc.vx, sc.vy, 0.0);
    let gait = sc.gait_params().unwrap().with_remaining(0.5 * (1.0 - sc.duty_factor) / sc.step_frequency);
    let mut counts = Vec::new();
    for leg in Leg::ALL {
        let h = hip_world((0.0, 0.0), Pose::new(sc.d_ref, 0.0, 0.0), 0.0, model.hip_offset(leg));
        let hm = extract_heightmap(&terrain, (h.x, h.y), 0.0, sc.hm_size, sc.hm_size, sc.hm_resolution).unwrap();
        let foot = assumed_liftoff(&hm, &twist, &gait);
        let ev = FecEvaluator::new(&hm, (h.x, h.y), twist, gait, &model, &sc.fec, foot).unwrap();
        for z in [0.05, 1.9] {
            counts.push(ev.count_safe_at(z).unwrap());
        }
    }
    Outcome { id: "A9", pass: counts.iter().all(|&c| c == 0), detail: format!("n_sf at (0.05, 1.9) per leg = {counts:?}") }
}

fn main() {
    let sc = stairs("");
    let t = Instant::now();
    let run = run_scenario(&sc).expect("stairs scenario runs");
    let wall = t.elapsed();
    let outcomes = [a1(&run, &sc, wall), a2(&run), a3(), a4(), a5(), a6(), a7(), a8(), a9()];
    let mut failed = 0;
    for o in &outcomes {
        println!("{} {}: {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
