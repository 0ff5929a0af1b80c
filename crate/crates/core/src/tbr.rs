//! Terrain-based reference: a plane through the selected footholds gives
//! roll and pitch, the base height is a constant offset above the plane's
//! centroid.

use thiserror::Error;

use crate::robot::Pose;
use crate::{Scalar, Vec3};

#[derive(Debug, Error, PartialEq)]
pub enum TbrError {
    #[error("degenerate support polygon")]
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane<T> {
    /// Unit normal, pointing up.
    pub normal: Vec3<T>,
    pub centroid: Vec3<T>,
    /// Height-field coefficients of `z = a·x + b·y + c`.
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> Plane<T> {
    pub fn height(&self, x: T, y: T) -> T {
        self.a * x + self.b * y + self.c
    }

    /// Largest |z − plane(x, y)| over `points`.
    pub fn max_residual(&self, points: &[Vec3<T>]) -> T {
        points.iter().map(|p| (p.z - self.height(p.x, p.y)).abs()).fold(T::zero(), T::max)
    }

    /// Angle between the normal and gravity.
    pub fn tilt(&self) -> T {
        self.normal.z.min(T::one()).acos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TbrReference<T> {
    pub roll: T,
    pub pitch: T,
    pub z_b: T,
    pub plane: Plane<T>,
}

impl<T: Scalar> TbrReference<T> {
    pub fn pose(&self) -> Pose<T> {
        Pose::new(self.z_b, self.roll, self.pitch)
    }
}

/// Least-squares fit of `z = a·x + b·y + c`.
pub fn fit_plane<T: Scalar>(points: &[Vec3<T>]) -> Result<Plane<T>, TbrError> {
    if points.len() < 3 {
        return Err(TbrError::Degenerate);
    }
    let n = T::from_count(points.len());
    let mut centroid = Vec3::zero();
    for &p in points {
        centroid += p;
    }
    let centroid = centroid * (T::one() / n);
    let (mut sxx, mut sxy, mut syy, mut sxz, mut syz) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for &p in points {
        let d = p - centroid;
        sxx = sxx + d.x * d.x;
        sxy = sxy + d.x * d.y;
        syy = syy + d.y * d.y;
        sxz = sxz + d.x * d.z;
        syz = syz + d.y * d.z;
    }
    let det = sxx * syy - sxy * sxy;
    let scale = sxx + syy;
    if !(scale > T::zero()) || det <= T::lit(1e-10) * scale * scale {
        return Err(TbrError::Degenerate);
    }
    let a = (syy * sxz - sxy * syz) / det;
    let b = (sxx * syz - sxy * sxz) / det;
    let c = centroid.z - a * centroid.x - b * centroid.y;
    let norm = (T::one() + a * a + b * b).sqrt();
    let normal = Vec3::new(-a / norm, -b / norm, T::one() / norm);
    Ok(Plane { normal, centroid, a, b, c })
}

/// Reference pose in the frame the footholds are expressed in.
pub fn tbr_pose<T: Scalar>(footholds: &[Vec3<T>], d_ref: T) -> Result<TbrReference<T>, TbrError> {
    let plane = fit_plane(footholds)?;
    // body z axis of Ry(γ)·Rx(β) is (sin γ cos β, −sin β, cos γ cos β)
    let roll = (-plane.normal.y).asin();
    let pitch = (-plane.a).atan();
    Ok(TbrReference { roll, pitch, z_b: plane.centroid.z + d_ref, plane })
}

/// Reference pose for a base heading `yaw`: world footholds are first
/// expressed in the yaw-aligned horizontal frame.
pub fn tbr_pose_with_yaw<T: Scalar>(footholds: &[Vec3<T>], d_ref: T, yaw: T) -> Result<TbrReference<T>, TbrError> {
    let local: Vec<_> = footholds.iter().map(|p| p.rotate_z(-yaw)).collect();
    tbr_pose(&local, d_ref)
}
