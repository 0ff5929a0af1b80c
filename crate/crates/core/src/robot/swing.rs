use thiserror::Error;

use crate::{Scalar, Vec3};

#[derive(Debug, Error, PartialEq)]
#[error("swing apex height must be finite and non-negative")]
pub struct SwingError;

/// Semi-elliptic swing: straight-line interpolation between lift-off and
/// touchdown with a `apex·sin(πs)` vertical bump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwingTrajectory<T> {
    pub p_lo: Vec3<T>,
    pub p_td: Vec3<T>,
    pub apex_height: T,
}

impl<T: Scalar> SwingTrajectory<T> {
    /// Foot position at phase `s ∈ [0, 1]`; endpoints are reproduced exactly.
    #[inline]
    pub fn point(&self, s: T) -> Vec3<T> {
        let s = s.max(T::zero()).min(T::one());
        let r = T::one() - s;
        let base = Vec3::new(
            self.p_lo.x * r + self.p_td.x * s,
            self.p_lo.y * r + self.p_td.y * s,
            self.p_lo.z * r + self.p_td.z * s,
        );
        if s <= T::zero() || s >= T::one() {
            return base;
        }
        base.with_z(base.z + self.apex_height * (T::PI() * s).sin())
    }

    /// `n` points at evenly spaced phases, first = lift-off, last = touchdown.
    pub fn samples(&self, n: usize) -> Vec<Vec3<T>> {
        match n {
            0 => Vec::new(),
            1 => vec![self.p_lo],
            _ => {
                let last = T::from_count(n - 1);
                (0..n).map(|k| self.point(T::from_count(k) / last)).collect()
            }
        }
    }
}

pub fn swing_trajectory<T: Scalar>(p_lo: Vec3<T>, p_td: Vec3<T>, apex_height: T) -> Result<SwingTrajectory<T>, SwingError> {
    if !(apex_height >= T::zero() && apex_height.is_finite()) {
        return Err(SwingError);
    }
    Ok(SwingTrajectory { p_lo, p_td, apex_height })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apex_in_place() {
        let o = Vec3::<f64>::zero();
        let t = swing_trajectory(o, o, 0.12).unwrap();
        assert!((t.point(0.5).z - 0.12).abs() < 1e-15);
    }

    #[test]
    fn endpoints_exact() {
        let a = Vec3::<f64>::new(0.1, -0.3, 0.07);
        let b = Vec3::<f64>::new(0.33, 0.21, 0.3);
        let s = swing_trajectory(a, b, 0.12).unwrap().samples(12);
        assert_eq!(s.len(), 12);
        assert_eq!(s[0], a);
        assert_eq!(s[11], b);
    }

    #[test]
    fn midpoint_of_climbing_swing() {
        let t = swing_trajectory(Vec3::<f64>::zero(), Vec3::<f64>::new(0.2, 0.0, 0.1), 0.12).unwrap();
        assert!((t.point(0.5).z - 0.17).abs() < 1e-12);
        assert!((t.point(0.5).x - 0.1).abs() < 1e-12);
    }

    #[test]
    fn apex_above_endpoints_and_symmetric() {
        let t = swing_trajectory(Vec3::<f64>::new(0.0, 0.0, 0.2), Vec3::<f64>::new(0.3, 0.1, 0.2), 0.1).unwrap();
        let s = t.samples(21);
        let top = s.iter().map(|p| p.z).fold(f64::MIN, f64::max);
        assert!(top >= 0.2);
        for k in 0..21 {
            assert!((s[k].z - s[20 - k].z).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_apex_rejected() {
        assert_eq!(swing_trajectory(Vec3::<f64>::zero(), Vec3::<f64>::zero(), -0.01), Err(SwingError));
    }
}
