use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::Scalar;

/// A point or direction in R³.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn planar_distance(self, o: Self) -> T {
        let dx = self.x - o.x;
        let dy = self.y - o.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn lerp(self, o: Self, s: T) -> Self {
        self + (o - self) * s
    }

    pub fn with_z(self, z: T) -> Self {
        Self::new(self.x, self.y, z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Rotates about the world z axis.
    pub fn rotate_z(self, yaw: T) -> Self {
        let (s, c) = yaw.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Row-major 3×3 rotation for roll `β`, pitch `γ`, yaw `ψ` applied as
/// `Rz(ψ)·Ry(γ)·Rx(β)` (Cardan sequence).
pub fn cardan_rotation<T: Scalar>(roll: T, pitch: T, yaw: T) -> [[T; 3]; 3] {
    let (sb, cb) = roll.sin_cos();
    let (sg, cg) = pitch.sin_cos();
    let (sp, cp) = yaw.sin_cos();
    [
        [cp * cg, cp * sg * sb - sp * cb, cp * sg * cb + sp * sb],
        [sp * cg, sp * sg * sb + cp * cb, sp * sg * cb - cp * sb],
        [-sg, cg * sb, cg * cb],
    ]
}

pub fn rotate<T: Scalar>(r: &[[T; 3]; 3], v: Vec3<T>) -> Vec3<T> {
    Vec3::new(
        r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
        r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
        r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z,
    )
}
