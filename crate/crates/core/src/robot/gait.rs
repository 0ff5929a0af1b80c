use thiserror::Error;

use crate::{Scalar, Vec3};

#[derive(Debug, Error, PartialEq)]
pub enum GaitError {
    #[error("step frequency must be positive")]
    Frequency,
    #[error("duty factor must lie strictly between 0 and 1")]
    DutyFactor,
    #[error("time remaining till touchdown must be non-negative")]
    Remaining,
}

/// Gait descriptors: step length, frequency, duty factor and time left until
/// the swinging foot touches down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaitParams<T> {
    pub step_length: T,
    pub step_frequency: T,
    pub duty_factor: T,
    pub t_remaining: T,
}

impl<T: Scalar> GaitParams<T> {
    pub fn new(step_length: T, step_frequency: T, duty_factor: T, t_remaining: T) -> Result<Self, GaitError> {
        let g = Self { step_length, step_frequency, duty_factor, t_remaining };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GaitError> {
        if !(self.step_frequency > T::zero()) {
            return Err(GaitError::Frequency);
        }
        if !(self.duty_factor > T::zero() && self.duty_factor < T::one()) {
            return Err(GaitError::DutyFactor);
        }
        if !(self.t_remaining >= T::zero()) {
            return Err(GaitError::Remaining);
        }
        Ok(())
    }

    pub fn cycle_duration(&self) -> T {
        T::one() / self.step_frequency
    }

    pub fn stance_duration(&self) -> T {
        self.duty_factor / self.step_frequency
    }

    pub fn swing_duration(&self) -> T {
        (T::one() - self.duty_factor) / self.step_frequency
    }

    pub fn with_remaining(mut self, t_remaining: T) -> Self {
        self.t_remaining = t_remaining;
        self
    }
}

/// Base twist. `linear` is read as the world-frame velocity of the base.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyTwist<T> {
    pub linear: Vec3<T>,
    pub angular: Vec3<T>,
}

impl<T: Scalar> BodyTwist<T> {
    pub fn planar(vx: T, vy: T, yaw_rate: T) -> Self {
        Self { linear: Vec3::new(vx, vy, T::zero()), angular: Vec3::new(T::zero(), T::zero(), yaw_rate) }
    }

    pub fn zero() -> Self {
        Self::planar(T::zero(), T::zero(), T::zero())
    }

    /// Horizontal displacement after `dt` seconds.
    pub fn planar_displacement(&self, dt: T) -> Vec3<T> {
        Vec3::new(self.linear.x * dt, self.linear.y * dt, T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.linear.is_finite() && self.angular.is_finite()
    }
}
