use nalgebra::{DMatrix, DVector};

use super::VpaError;
use crate::Scalar;

/// Finite, equally spaced set of hip heights the criteria are sampled at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HipHeightSet<T> {
    pub z_min: T,
    pub z_max: T,
    pub count: usize,
}

impl<T: Scalar> Default for HipHeightSet<T> {
    fn default() -> Self {
        Self { z_min: T::lit(0.2), z_max: T::lit(0.8), count: 31 }
    }
}

impl<T: Scalar> HipHeightSet<T> {
    pub fn new(z_min: T, z_max: T, count: usize) -> Result<Self, VpaError> {
        let s = Self { z_min, z_max, count };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), VpaError> {
        if !(self.z_min < self.z_max) || self.count < 2 {
            return Err(VpaError::HipHeights);
        }
        Ok(())
    }

    pub fn step(&self) -> T {
        (self.z_max - self.z_min) / T::from_count(self.count - 1)
    }

    pub fn value(&self, i: usize) -> T {
        if i + 1 == self.count {
            return self.z_max;
        }
        self.z_min + self.step() * T::from_count(i)
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

/// Gaussian RBF model of the safe-foothold count as a function of hip
/// height: `F(z) = Σ_e w_e·exp(−½((z − c_e)/Σ)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SafeFootholdFunction<T> {
    z_min: T,
    spacing: T,
    width: T,
    centers: Vec<T>,
    weights: Vec<T>,
}

/// Basis terms further than this many widths from `z` are below 1e-14 and
/// are skipped.
const SUPPORT: f64 = 8.0;

impl<T: Scalar> SafeFootholdFunction<T> {
    /// Centres spaced equidistantly over `[z_min, z_max]`; adjacent
    /// Gaussians cross at one half. A single basis sits at the midpoint
    /// and crosses one half at the interval ends.
    pub fn with_weights(z_min: T, z_max: T, weights: Vec<T>) -> Result<Self, VpaError> {
        let e = weights.len();
        if e == 0 {
            return Err(VpaError::BasisCount);
        }
        if !(z_min < z_max) {
            return Err(VpaError::HipHeights);
        }
        let half_max = T::lit((2.0 * std::f64::consts::LN_2).sqrt());
        let (centers, spacing, width) = if e == 1 {
            let span = z_max - z_min;
            (vec![(z_min + z_max) * T::lit(0.5)], span, span * T::lit(0.5) / half_max)
        } else {
            let dc = (z_max - z_min) / T::from_count(e - 1);
            let c = (0..e).map(|k| if k + 1 == e { z_max } else { z_min + dc * T::from_count(k) }).collect();
            (c, dc, dc * T::lit(0.5) / half_max)
        };
        Ok(Self { z_min, spacing, width, centers, weights })
    }

    pub fn zeros(z_min: T, z_max: T, e: usize) -> Result<Self, VpaError> {
        Self::with_weights(z_min, z_max, vec![T::zero(); e])
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Common standard deviation Σ of the basis.
    pub fn width(&self) -> T {
        self.width
    }

    pub fn basis_count(&self) -> usize {
        self.centers.len()
    }

    fn support(&self, z: T) -> std::ops::Range<usize> {
        let e = self.centers.len();
        if e == 1 {
            return 0..1;
        }
        let reach = (T::lit(SUPPORT) * self.width / self.spacing).to_f64_lossy();
        let k = ((z - self.z_min) / self.spacing).to_f64_lossy();
        if !k.is_finite() {
            return 0..0;
        }
        let lo = (k - reach).ceil().max(0.0);
        let hi = (k + reach).floor().min((e - 1) as f64);
        if lo > hi {
            return 0..0;
        }
        lo as usize..hi as usize + 1
    }

    pub fn eval(&self, z: T) -> T {
        let half = T::lit(0.5);
        self.support(z)
            .map(|k| {
                let r = (z - self.centers[k]) / self.width;
                self.weights[k] * (-half * r * r).exp()
            })
            .sum()
    }

    /// `(F(z), dF/dz)`.
    pub fn eval_with_derivative(&self, z: T) -> (T, T) {
        let half = T::lit(0.5);
        let mut f = T::zero();
        let mut df = T::zero();
        for k in self.support(z) {
            let r = (z - self.centers[k]) / self.width;
            let g = self.weights[k] * (-half * r * r).exp();
            f = f + g;
            df = df - g * r / self.width;
        }
        (f, df)
    }

    /// Root-mean-square residual against `(z, n)` samples.
    pub fn rmse(&self, samples: &[(T, T)]) -> T {
        if samples.is_empty() {
            return T::zero();
        }
        let ss: T = samples.iter().map(|&(z, n)| (self.eval(z) - n).powi(2)).sum();
        (ss / T::from_count(samples.len())).sqrt()
    }
}

/// Linear least-squares fit of the weights to `(z_h, n_sf)` samples.
///
/// Solved by SVD; a rank-deficient design yields the minimum-norm solution.
pub fn fit_rbf<T: Scalar>(samples: &[(T, T)], e: usize, z_min: T, z_max: T) -> Result<SafeFootholdFunction<T>, VpaError> {
    let mut f = SafeFootholdFunction::zeros(z_min, z_max, e)?;
    if samples.is_empty() || samples.iter().all(|&(_, n)| n == T::zero()) {
        return Ok(f);
    }
    let half = T::lit(0.5);
    let design = DMatrix::<f64>::from_fn(samples.len(), e, |i, k| {
        let r = (samples[i].0 - f.centers[k]) / f.width;
        (-half * r * r).exp().to_f64_lossy()
    });
    let rhs = DVector::<f64>::from_iterator(samples.len(), samples.iter().map(|s| s.1.to_f64_lossy()));
    let svd = design.svd(true, true);
    let tol = svd.singular_values.max() * 1e-13 * samples.len().max(e) as f64;
    let w = svd.solve(&rhs, tol).map_err(|_| VpaError::Fit)?;
    f.weights = w.iter().map(|&v| T::lit(v)).collect();
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_set_defaults() {
        let h = HipHeightSet::<f64>::default();
        let v = h.values();
        assert_eq!(v.len(), 31);
        assert_eq!((v[0], v[30]), (0.2, 0.8));
        assert!((h.step() - 0.02).abs() < 1e-15);
        assert!(HipHeightSet::new(0.5, 0.5, 10).is_err());
        assert!(HipHeightSet::new(0.2, 0.8, 1).is_err());
    }

    #[test]
    fn three_basis_layout() {
        let f = SafeFootholdFunction::<f64>::zeros(0.2, 0.8, 3).unwrap();
        assert!((f.centers()[1] - 0.5).abs() < 1e-15);
        assert_eq!((f.centers()[0], f.centers()[2]), (0.2, 0.8));
        assert!((f.width() - 0.15 / (2.0 * 2f64.ln()).sqrt()).abs() < 1e-15);
        assert!((f.width() - 0.1274).abs() < 1e-4);
    }

    #[test]
    fn neighbours_cross_at_one_half() {
        let f = SafeFootholdFunction::<f64>::with_weights(0.2, 0.8, vec![0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let mid = (f.centers()[1] + f.centers()[2]) / 2.0;
        assert!((f.eval(mid) - 0.5).abs() < 1e-12);
        assert!((f.eval(f.centers()[1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = SafeFootholdFunction::<f64>::with_weights(0.2, 0.8, vec![3.0, -1.0, 7.0, 2.0, 0.5, 4.0]).unwrap();
        for k in 0..40 {
            let z = 0.15 + 0.0175 * k as f64;
            let h = 1e-6;
            let fd = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
            let (v, d) = f.eval_with_derivative(z);
            assert!((v - f.eval(z)).abs() < 1e-14);
            assert!((d - fd).abs() < 1e-5 * (1.0 + d.abs()), "{z}: {d} vs {fd}");
        }
    }

    #[test]
    fn truncated_support_matches_full_sum() {
        let w: Vec<f64> = (0..30).map(|k| ((k * 37) % 11) as f64 * 100.0).collect();
        let f = SafeFootholdFunction::with_weights(0.2, 0.8, w.clone()).unwrap();
        for k in 0..200 {
            let z = 0.1 + 0.004 * k as f64;
            let full: f64 = (0..30)
                .map(|e| w[e] * (-0.5 * ((z - f.centers()[e]) / f.width()).powi(2)).exp())
                .sum();
            assert!((f.eval(z) - full).abs() < 1e-9, "{z}");
        }
    }

    #[test]
    fn recovers_model_class_weights() {
        let truth = SafeFootholdFunction::<f64>::with_weights(0.2, 0.8, vec![120.0, 900.0, 400.0, 1089.0, 30.0]).unwrap();
        let samples: Vec<_> = HipHeightSet::default().values().into_iter().map(|z| (z, truth.eval(z))).collect();
        let fit = fit_rbf(&samples, 5, 0.2, 0.8).unwrap();
        for (a, b) in fit.weights().iter().zip(truth.weights()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!(fit.rmse(&samples) < 1e-8);
    }

    #[test]
    fn zero_samples_give_zero_function() {
        let samples: Vec<_> = HipHeightSet::<f64>::default().values().into_iter().map(|z| (z, 0.0)).collect();
        let fit = fit_rbf(&samples, 30, 0.2, 0.8).unwrap();
        assert!(fit.weights().iter().all(|&w| w == 0.0));
        assert_eq!(fit.eval(0.47), 0.0);
    }

    #[test]
    fn underdetermined_fit_is_minimum_norm_and_exact() {
        let samples: Vec<(f64, f64)> = vec![(0.3, 10.0), (0.5, 20.0), (0.7, 5.0)];
        let fit = fit_rbf(&samples, 30, 0.2, 0.8).unwrap();
        assert!(fit.rmse(&samples) < 1e-8);
        assert!(fit.weights().iter().all(|w| w.is_finite()));
    }

    #[test]
    fn fit_in_f32() {
        let samples: Vec<(f32, f32)> = (0..31).map(|i| (0.2 + 0.02 * i as f32, if i > 5 && i < 25 { 1089.0 } else { 0.0 })).collect();
        let fit = fit_rbf(&samples, 30, 0.2f32, 0.8).unwrap();
        let zero = SafeFootholdFunction::zeros(0.2f32, 0.8, 30).unwrap();
        assert!(fit.rmse(&samples) <= zero.rmse(&samples));
    }

    #[test]
    fn config_errors() {
        assert_eq!(fit_rbf::<f64>(&[], 0, 0.2, 0.8).unwrap_err(), VpaError::BasisCount);
        assert_eq!(fit_rbf::<f64>(&[], 3, 0.8, 0.2).unwrap_err(), VpaError::HipHeights);
    }
}
