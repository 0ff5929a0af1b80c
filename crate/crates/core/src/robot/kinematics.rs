use crate::geometry::{cardan_rotation, rotate};
use crate::robot::{BodyTwist, GaitParams, RobotModel};
use crate::terrain::TerrainMap;
use crate::{Scalar, Vec3};

/// Body pose decision variables: base height, roll and pitch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose<T> {
    pub z_b: T,
    pub roll: T,
    pub pitch: T,
}

impl<T: Scalar> Pose<T> {
    pub const fn new(z_b: T, roll: T, pitch: T) -> Self {
        Self { z_b, roll, pitch }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.z_b, self.roll, self.pitch]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn splat(v: T) -> Self {
        Self::new(v, v, v)
    }

    pub fn distance(self, o: Self) -> T {
        let d = [self.z_b - o.z_b, self.roll - o.roll, self.pitch - o.pitch];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

/// World-frame height of a hip for a body pose. Yaw does not enter.
#[inline]
pub fn hip_height<T: Scalar>(pose: Pose<T>, hip_offset: Vec3<T>) -> T {
    let (sb, cb) = pose.roll.sin_cos();
    let (sg, cg) = pose.pitch.sin_cos();
    pose.z_b - hip_offset.x * sg + hip_offset.y * cg * sb + hip_offset.z * cg * cb
}

/// Full hip position for a base at `base_xy`, pose and heading `yaw`.
pub fn hip_world<T: Scalar>(base_xy: (T, T), pose: Pose<T>, yaw: T, hip_offset: Vec3<T>) -> Vec3<T> {
    let r = cardan_rotation(pose.roll, pose.pitch, yaw);
    Vec3::new(base_xy.0, base_xy.1, pose.z_b) + rotate(&r, hip_offset)
}

/// Spherical-shell leg workspace test.
#[inline]
pub fn workspace_contains<T: Scalar>(hip: Vec3<T>, foot: Vec3<T>, model: &RobotModel<T>) -> bool {
    let d = hip.distance(foot);
    d >= model.r_min && d <= model.r_max
}

/// Predicted touchdown: hip ground projection advanced by the planar base
/// velocity over the remaining swing plus half a stance.
pub fn nominal_foothold<T: Scalar>(
    hip: Vec3<T>,
    twist: &BodyTwist<T>,
    gait: &GaitParams<T>,
    terrain: &TerrainMap<T>,
) -> Vec3<T> {
    let lookahead = gait.t_remaining + T::lit(0.5) * gait.stance_duration();
    let p = hip + twist.planar_displacement(lookahead);
    let xy = (p.x, p.y);
    Vec3::new(xy.0, xy.1, terrain.sample_height(xy.0, xy.1))
}

/// Planar position where the foot that is about to land at the nominal
/// foothold lifted off, one full stride (`v·T`) behind it. The height is
/// left to the caller.
pub fn nominal_liftoff<T: Scalar>(hip: Vec3<T>, twist: &BodyTwist<T>, gait: &GaitParams<T>) -> (T, T) {
    let lookahead = gait.t_remaining - gait.swing_duration() - T::lit(0.5) * gait.stance_duration();
    let p = hip + twist.planar_displacement(lookahead);
    (p.x, p.y)
}
