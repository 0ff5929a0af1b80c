use super::{CostParams, SafeFootholdFunction, VpaError};
use crate::robot::{hip_height, Pose};
use crate::{Scalar, Vec3};

/// Axis-aligned box over `(z_b, roll, pitch)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<T> {
    pub lo: Pose<T>,
    pub hi: Pose<T>,
}

impl<T: Scalar> Bounds<T> {
    pub fn new(lo: Pose<T>, hi: Pose<T>) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, u: Pose<T>) -> bool {
        let (u, lo, hi) = (u.to_array(), self.lo.to_array(), self.hi.to_array());
        (0..3).all(|k| lo[k] <= u[k] && u[k] <= hi[k])
    }

    pub fn clamp(&self, u: Pose<T>) -> Pose<T> {
        let (mut u, lo, hi) = (u.to_array(), self.lo.to_array(), self.hi.to_array());
        for k in 0..3 {
            u[k] = u[k].max(lo[k]).min(hi[k]);
        }
        Pose::from_array(u)
    }

    /// Global box intersected with the rate box around `u_prev`. When they
    /// are disjoint along an axis the rate box is clamped into the global
    /// box and the flag is set.
    pub fn feasible(global: &Bounds<T>, u_prev: Pose<T>, du_min: Pose<T>, du_max: Pose<T>) -> (Bounds<T>, bool) {
        let (g_lo, g_hi) = (global.lo.to_array(), global.hi.to_array());
        let (p, dlo, dhi) = (u_prev.to_array(), du_min.to_array(), du_max.to_array());
        let (mut lo, mut hi) = ([T::zero(); 3], [T::zero(); 3]);
        let mut clamped = false;
        for k in 0..3 {
            let (r_lo, r_hi) = (p[k] + dlo[k], p[k] + dhi[k]);
            lo[k] = r_lo.max(g_lo[k]);
            hi[k] = r_hi.min(g_hi[k]);
            if lo[k] > hi[k] {
                clamped = true;
                lo[k] = r_lo.max(g_lo[k]).min(g_hi[k]);
                hi[k] = r_hi.max(g_lo[k]).min(g_hi[k]);
            }
        }
        (Bounds::new(Pose::from_array(lo), Pose::from_array(hi)), clamped)
    }
}

/// Pose optimisation problem for one or more horizons.
#[derive(Debug, Clone)]
pub struct PoseOptProblem<T> {
    /// `functions[j][l]`: fitted function of leg `l` at horizon `j`.
    pub functions: Vec<Vec<SafeFootholdFunction<T>>>,
    /// Base-frame hip offsets, one per leg.
    pub hip_offsets: Vec<Vec3<T>>,
    pub u_prev: Pose<T>,
    pub bounds: Bounds<T>,
    pub du_min: Pose<T>,
    pub du_max: Pose<T>,
    pub cost: CostParams<T>,
    /// Weight of the consecutive-pose deviation penalty.
    pub lambda_s: T,
}

impl<T: Scalar> PoseOptProblem<T> {
    pub fn horizon(&self) -> usize {
        self.functions.len()
    }

    pub fn validate(&self) -> Result<(), VpaError> {
        self.cost.validate()?;
        if self.functions.is_empty() {
            return Err(VpaError::Problem("no horizon"));
        }
        if self.functions.iter().any(|f| f.len() != self.hip_offsets.len()) || self.hip_offsets.is_empty() {
            return Err(VpaError::Problem("one function per leg and horizon is required"));
        }
        if self.hip_offsets.len() > 8 {
            return Err(VpaError::Problem("at most eight legs"));
        }
        let (lo, hi) = (self.bounds.lo.to_array(), self.bounds.hi.to_array());
        let (dlo, dhi) = (self.du_min.to_array(), self.du_max.to_array());
        if (0..3).any(|k| !(lo[k] <= hi[k]) || !(dlo[k] <= dhi[k])) {
            return Err(VpaError::Problem("lower bounds must not exceed upper bounds"));
        }
        if !(self.lambda_s >= T::zero()) {
            return Err(VpaError::Problem("lambda_s must be non-negative"));
        }
        Ok(())
    }

    /// Box of the first horizon (global ∩ rate) and the clamp flag.
    pub fn first_box(&self) -> (Bounds<T>, bool) {
        Bounds::feasible(&self.bounds, self.u_prev, self.du_min, self.du_max)
    }

    fn boxes(&self) -> (Vec<Bounds<T>>, bool) {
        let (first, clamped) = self.first_box();
        let mut b = vec![first];
        b.extend(std::iter::repeat_n(self.bounds, self.horizon() - 1));
        (b, clamped)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoseSolution<T> {
    /// One pose per horizon; the first is the one to execute.
    pub poses: Vec<Pose<T>>,
    pub objective: T,
    /// The rate box was disjoint from the global box and got clamped.
    pub box_clamped: bool,
}

impl<T: Scalar> PoseSolution<T> {
    pub fn pose(&self) -> Pose<T> {
        self.poses[0]
    }
}

/// Hip heights of every leg for pose `u`.
pub fn hip_heights<T: Scalar>(u: Pose<T>, offsets: &[Vec3<T>]) -> Vec<T> {
    offsets.iter().map(|&o| hip_height(u, o)).collect()
}

/// Single-horizon cost at pose `u`.
pub fn pose_objective<T: Scalar>(fs: &[SafeFootholdFunction<T>], offsets: &[Vec3<T>], cost: &CostParams<T>, u: Pose<T>) -> T {
    cost.value(fs, &hip_heights(u, offsets))
}

/// Receding-horizon objective `Σ_j C_j(u_j) − λ_s Σ_j ‖u_j − u_{j+1}‖²`.
pub fn receding_objective<T: Scalar>(problem: &PoseOptProblem<T>, poses: &[Pose<T>]) -> T {
    let mut v = T::zero();
    for (fs, &u) in problem.functions.iter().zip(poses) {
        v = v + pose_objective(fs, &problem.hip_offsets, &problem.cost, u);
    }
    for w in poses.windows(2) {
        let d = w[0].distance(w[1]);
        v = v - problem.lambda_s * d * d;
    }
    v
}

/// Cost and gradient in `(z_b, roll, pitch)`.
fn objective_with_gradient<T: Scalar>(
    fs: &[SafeFootholdFunction<T>],
    offsets: &[Vec3<T>],
    cost: &CostParams<T>,
    u: [T; 3],
    grad: &mut [T],
) -> T {
    let (sb, cb) = u[1].sin_cos();
    let (sg, cg) = u[2].sin_cos();
    let mut z = [T::zero(); 8];
    let mut dz = [T::zero(); 8];
    let n = offsets.len();
    for (l, o) in offsets.iter().enumerate() {
        z[l] = u[0] - o.x * sg + o.y * cg * sb + o.z * cg * cb;
    }
    let v = cost.value_and_gradient(fs, &z[..n], Some(&mut dz[..n]));
    grad[..3].fill(T::zero());
    for (l, o) in offsets.iter().enumerate() {
        grad[0] = grad[0] + dz[l];
        grad[1] = grad[1] + dz[l] * (o.y * cg * cb - o.z * cg * sb);
        grad[2] = grad[2] + dz[l] * (-o.x * cg - o.y * sg * sb - o.z * sg * cb);
    }
    v
}

fn value_only<T: Scalar>(fs: &[SafeFootholdFunction<T>], offsets: &[Vec3<T>], cost: &CostParams<T>, u: [T; 3]) -> T {
    let (sb, cb) = u[1].sin_cos();
    let (sg, cg) = u[2].sin_cos();
    let mut z = [T::zero(); 8];
    for (l, o) in offsets.iter().enumerate() {
        z[l] = u[0] - o.x * sg + o.y * cg * sb + o.z * cg * cb;
    }
    cost.value(fs, &z[..offsets.len()])
}

const COARSE_STEP: [f64; 3] = [0.01, 0.025, 0.025];
const COARSE_CAP: [usize; 3] = [61, 29, 29];
const SEEDS: usize = 10;

fn axis_points<T: Scalar>(lo: T, hi: T, step: f64, cap: usize) -> Vec<T> {
    let w = (hi - lo).to_f64_lossy();
    if w <= 0.0 {
        return vec![lo];
    }
    let n = ((w / step).ceil() as usize + 1).clamp(2, cap);
    (0..n)
        .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * T::from_count(k) / T::from_count(n - 1) })
        .collect()
}

/// Best `SEEDS` points of a coarse grid over `b`, best first.
fn coarse_seeds<T: Scalar>(b: &Bounds<T>, mut f: impl FnMut([T; 3]) -> T) -> Vec<([T; 3], T)> {
    let (lo, hi) = (b.lo.to_array(), b.hi.to_array());
    let axes: Vec<Vec<T>> = (0..3).map(|k| axis_points(lo[k], hi[k], COARSE_STEP[k], COARSE_CAP[k])).collect();
    let mut all = Vec::with_capacity(axes[0].len() * axes[1].len() * axes[2].len());
    for &r in &axes[1] {
        for &p in &axes[2] {
            for &z in &axes[0] {
                let u = [z, r, p];
                all.push((u, f(u)));
            }
        }
    }
    // stable sort keeps grid order among equal values
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    all.truncate(SEEDS);
    all
}

fn project<T: Scalar>(x: &mut [T], lo: &[T], hi: &[T]) {
    for k in 0..x.len() {
        x[k] = x[k].max(lo[k]).min(hi[k]);
    }
}

/// Projected gradient ascent with Armijo backtracking.
fn ascend<T: Scalar>(
    x0: &[T],
    lo: &[T],
    hi: &[T],
    f: &mut impl FnMut(&[T], &mut [T]) -> T,
) -> (Vec<T>, T) {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let mut g = vec![T::zero(); n];
    let mut g_new = vec![T::zero(); n];
    let mut fx = f(&x, &mut g);
    let g_inf = |g: &[T]| g.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tiny = T::lit(1e-300).max(T::min_positive_value());
    let mut alpha = T::lit(0.01) / g_inf(&g).max(tiny);
    let mut xn = vec![T::zero(); n];
    for _ in 0..200 {
        let mut accepted = false;
        for _ in 0..60 {
            for k in 0..n {
                xn[k] = x[k] + alpha * g[k];
            }
            project(&mut xn, lo, hi);
            let step_inf = (0..n).fold(T::zero(), |m, k| m.max((xn[k] - x[k]).abs()));
            if step_inf < T::lit(1e-11) {
                break;
            }
            let fn_ = f(&xn, &mut g_new);
            let pred: T = (0..n).map(|k| g[k] * (xn[k] - x[k])).sum();
            if fn_ >= fx + T::lit(1e-4) * pred && fn_ > fx {
                accepted = true;
                break;
            }
            alpha = alpha * T::lit(0.5);
        }
        if !accepted {
            break;
        }
        x.copy_from_slice(&xn);
        g.copy_from_slice(&g_new);
        fx = f(&x, &mut g);
        alpha = alpha * T::lit(2.0);
    }
    (x, fx)
}

/// Coordinate-wise pattern search to finish off kinks and bound corners.
fn polish<T: Scalar>(x0: Vec<T>, f0: T, lo: &[T], hi: &[T], f: &mut impl FnMut(&[T]) -> T) -> (Vec<T>, T) {
    let n = x0.len();
    let (mut x, mut fx) = (x0, f0);
    let mut h = T::lit(0.004);
    let mut trial = x.clone();
    let mut evals = 0;
    while h > T::lit(1e-7) && evals < 2000 {
        let mut improved = false;
        for k in 0..n {
            for sign in [T::one(), -T::one()] {
                trial.copy_from_slice(&x);
                trial[k] = (x[k] + sign * h).max(lo[k]).min(hi[k]);
                if trial[k] == x[k] {
                    continue;
                }
                let ft = f(&trial);
                evals += 1;
                if ft > fx {
                    x.copy_from_slice(&trial);
                    fx = ft;
                    improved = true;
                }
            }
        }
        if !improved {
            h = h * T::lit(0.5);
        }
    }
    (x, fx)
}

/// Multi-start maximisation of one horizon's cost plus an optional
/// quadratic pull `−λ Σ ‖u − a‖²` towards anchor poses.
fn maximize_block<T: Scalar>(
    fs: &[SafeFootholdFunction<T>],
    offsets: &[Vec3<T>],
    cost: &CostParams<T>,
    b: &Bounds<T>,
    extra_seeds: &[Pose<T>],
) -> (Pose<T>, T) {
    let (lo, hi) = (b.lo.to_array(), b.hi.to_array());
    let mut seeds: Vec<[T; 3]> = coarse_seeds(b, |u| value_only(fs, offsets, cost, u)).into_iter().map(|s| s.0).collect();
    seeds.extend(extra_seeds.iter().map(|&p| b.clamp(p).to_array()));
    let mut fg = |x: &[T], g: &mut [T]| objective_with_gradient(fs, offsets, cost, [x[0], x[1], x[2]], g);
    let mut best: Option<(Vec<T>, T)> = None;
    for s in &seeds {
        let (x, fx) = ascend(s, &lo, &hi, &mut fg);
        if best.as_ref().is_none_or(|(_, bf)| fx > *bf) {
            best = Some((x, fx));
        }
    }
    let (x, fx) = best.expect("at least one seed");
    let (x, fx) = polish(x, fx, &lo, &hi, &mut |x: &[T]| value_only(fs, offsets, cost, [x[0], x[1], x[2]]));
    (Pose::new(x[0], x[1], x[2]), fx)
}

/// Maximises the cost of the first horizon over global ∩ rate bounds.
pub fn optimize_pose_single<T: Scalar>(problem: &PoseOptProblem<T>) -> Result<PoseSolution<T>, VpaError> {
    problem.validate()?;
    let (b, box_clamped) = problem.first_box();
    let (u, v) = maximize_block(&problem.functions[0], &problem.hip_offsets, &problem.cost, &b, &[problem.u_prev]);
    Ok(PoseSolution { poses: vec![u], objective: v, box_clamped })
}

/// Maximises `Σ_j C_j(u_j) − λ_s Σ_j ‖u_j − u_{j+1}‖²`. The first pose is
/// bounded by global ∩ rate bounds, later ones by the global bounds.
pub fn optimize_pose_receding<T: Scalar>(problem: &PoseOptProblem<T>) -> Result<PoseSolution<T>, VpaError> {
    problem.validate()?;
    let nh = problem.horizon();
    if nh == 1 {
        return optimize_pose_single(problem);
    }
    let (boxes, box_clamped) = problem.boxes();
    let offsets = &problem.hip_offsets;
    let cost = &problem.cost;

    // per-horizon optima, then the first optimum replicated
    let own: Vec<Pose<T>> = problem
        .functions
        .iter()
        .zip(&boxes)
        .map(|(fs, b)| maximize_block(fs, offsets, cost, b, &[problem.u_prev]).0)
        .collect();
    let starts = [own.clone(), boxes.iter().map(|b| b.clamp(own[0])).collect::<Vec<_>>()];

    let lo: Vec<T> = boxes.iter().flat_map(|b| b.lo.to_array()).collect();
    let hi: Vec<T> = boxes.iter().flat_map(|b| b.hi.to_array()).collect();
    let unpack = |x: &[T]| -> Vec<Pose<T>> { x.chunks(3).map(|c| Pose::new(c[0], c[1], c[2])).collect() };
    let lambda = problem.lambda_s;
    let two = T::lit(2.0);
    let mut fg = |x: &[T], g: &mut [T]| {
        let mut v = T::zero();
        for j in 0..nh {
            let u = [x[3 * j], x[3 * j + 1], x[3 * j + 2]];
            v = v + objective_with_gradient(&problem.functions[j], offsets, cost, u, &mut g[3 * j..3 * j + 3]);
        }
        for j in 0..nh - 1 {
            for k in 0..3 {
                let d = x[3 * j + k] - x[3 * (j + 1) + k];
                v = v - lambda * d * d;
                g[3 * j + k] = g[3 * j + k] - two * lambda * d;
                g[3 * (j + 1) + k] = g[3 * (j + 1) + k] + two * lambda * d;
            }
        }
        v
    };
    let mut best: Option<(Vec<T>, T)> = None;
    for s in &starts {
        let x0: Vec<T> = s.iter().flat_map(|p| p.to_array()).collect();
        let (x, fx) = ascend(&x0, &lo, &hi, &mut fg);
        if best.as_ref().is_none_or(|(_, bf)| fx > *bf) {
            best = Some((x, fx));
        }
    }
    let (x, fx) = best.expect("two starts");
    let (x, fx) = polish(x, fx, &lo, &hi, &mut |x: &[T]| receding_objective(problem, &unpack(x)));
    Ok(PoseSolution { poses: unpack(&x), objective: fx, box_clamped })
}

#[cfg(test)]
mod tests;
