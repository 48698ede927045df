use crate::error::{Error, Result};
use crate::sensing::BoundingBox;
use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

pub type StateVector = SVector<f64, 7>;
pub type StateMatrix = SMatrix<f64, 7, 7>;
pub type MeasVector = SVector<f64, 4>;
type MeasMatrix = SMatrix<f64, 4, 4>;
type ObsMatrix = SMatrix<f64, 4, 7>;

/// Noise levels for the box filter, in normalized image units per frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KalmanNoise {
    pub measurement_position: f64,
    pub measurement_scale: f64,
    pub measurement_ratio: f64,
    pub process_position: f64,
    pub process_scale: f64,
    pub process_velocity: f64,
    pub process_scale_velocity: f64,
    pub initial_position: f64,
    pub initial_velocity: f64,
}

impl Default for KalmanNoise {
    fn default() -> Self {
        Self {
            measurement_position: 0.01,
            measurement_scale: 0.005,
            measurement_ratio: 0.05,
            process_position: 0.005,
            process_scale: 0.002,
            process_velocity: 0.005,
            process_scale_velocity: 0.001,
            initial_position: 0.02,
            initial_velocity: 0.1,
        }
    }
}

impl KalmanNoise {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.measurement_position,
            self.measurement_scale,
            self.measurement_ratio,
            self.process_position,
            self.process_scale,
            self.process_velocity,
            self.process_scale_velocity,
            self.initial_position,
            self.initial_velocity,
        ];
        if all.iter().all(|x| x.is_finite() && *x > 0.0) {
            Ok(())
        } else {
            Err(Error::Config("kalman noise levels must be positive".into()))
        }
    }

    /// Process covariance for one frame.
    pub fn process(&self) -> StateMatrix {
        let p = self.process_position.powi(2);
        let s = self.process_scale.powi(2);
        let v = self.process_velocity.powi(2);
        StateMatrix::from_diagonal(&StateVector::from([p, p, s, 1e-6 * s, v, v, self.process_scale_velocity.powi(2)]))
    }

    pub fn measurement(&self) -> MeasMatrix {
        let p = self.measurement_position.powi(2);
        MeasMatrix::from_diagonal(&MeasVector::new(p, p, self.measurement_scale.powi(2), self.measurement_ratio.powi(2)))
    }

    fn initial(&self) -> StateMatrix {
        let p = self.initial_position.powi(2);
        let v = self.initial_velocity.powi(2);
        let r = self.measurement_ratio.powi(2);
        StateMatrix::from_diagonal(&StateVector::from([p, p, p, r, v, v, v]))
    }
}

/// Box state `[u, v, s, r, u̇, v̇, ṡ]`: center, area, aspect ratio and the
/// velocities of the first three. Aspect ratio is held constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanState {
    pub mean: StateVector,
    pub covariance: StateMatrix,
}

/// `[u, v, w·h, w/h]` of a box.
pub fn box_to_measurement(b: &BoundingBox) -> MeasVector {
    MeasVector::new(b.center_u, b.center_v, b.width * b.height, b.width / b.height)
}

pub fn measurement_to_box(z: &[f64]) -> BoundingBox {
    let (s, r) = (z[2].max(0.0), z[3].max(1e-12));
    BoundingBox::new(z[0], z[1], (s * r).sqrt(), (s / r).sqrt())
}

pub fn transition(dt: f64) -> StateMatrix {
    let mut f = StateMatrix::identity();
    f[(0, 4)] = dt;
    f[(1, 5)] = dt;
    f[(2, 6)] = dt;
    f
}

pub fn observation() -> ObsMatrix {
    let mut h = ObsMatrix::zeros();
    for i in 0..4 {
        h[(i, i)] = 1.0;
    }
    h
}

fn symmetrize(m: &StateMatrix) -> StateMatrix {
    (m + m.transpose()) * 0.5
}

impl KalmanState {
    /// State initialized from a first measurement with zero velocity.
    pub fn from_box(b: &BoundingBox, noise: &KalmanNoise) -> Result<Self> {
        if !b.is_valid() {
            return Err(Error::Measurement(format!("cannot start a track from {b:?}")));
        }
        let z = box_to_measurement(b);
        let mut mean = StateVector::zeros();
        mean.fixed_rows_mut::<4>(0).copy_from(&z);
        Ok(Self { mean, covariance: noise.initial() })
    }

    pub fn bbox(&self) -> BoundingBox {
        measurement_to_box(self.mean.as_slice())
    }

    /// Constant-velocity prediction over `dt` frames with process noise `q·dt`.
    pub fn predict(&self, dt: f64, q: &StateMatrix) -> Self {
        let mut mean = self.mean;
        if mean[2] + dt * mean[6] <= 0.0 {
            mean[6] = 0.0;
        }
        let f = transition(dt);
        let mean = f * mean;
        let covariance = symmetrize(&(f * self.covariance * f.transpose() + q * dt));
        Self { mean, covariance }
    }

    /// Kalman update on the box measurement using the Joseph form.
    pub fn update(&self, measurement: &BoundingBox, r: &MeasMatrix) -> Result<Self> {
        if !measurement.is_valid() {
            return Err(Error::Measurement(format!("rejected measurement {measurement:?}")));
        }
        let z = box_to_measurement(measurement);
        let h = observation();
        let innovation = z - h * self.mean;
        let s = h * self.covariance * h.transpose() + r;
        let s_inv = s
            .try_inverse()
            .ok_or_else(|| Error::Measurement("singular innovation covariance".into()))?;
        let k = self.covariance * h.transpose() * s_inv;
        let mean = self.mean + k * innovation;
        let i_kh = StateMatrix::identity() - k * h;
        let covariance = symmetrize(&(i_kh * self.covariance * i_kh.transpose() + k * r * k.transpose()));
        Ok(Self { mean, covariance })
    }
}

/// One prediction step of the box filter.
pub fn kf_predict(state: &KalmanState, dt: f64, noise: &KalmanNoise) -> KalmanState {
    state.predict(dt, &noise.process())
}

/// One measurement update; a non-finite measurement leaves the state untouched
/// and is reported as an error.
pub fn kf_update(state: &KalmanState, measurement: &BoundingBox, noise: &KalmanNoise) -> Result<KalmanState> {
    state.update(measurement, &noise.measurement())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state() -> KalmanState {
        KalmanState::from_box(&BoundingBox::new(0.1, 0.0, 0.1, 0.5), &KalmanNoise::default()).unwrap()
    }

    #[test]
    fn constant_velocity() {
        let mut s = state();
        s.mean[4] = 0.1;
        let p = kf_predict(&s, 1.0, &KalmanNoise::default());
        assert_relative_eq!(p.mean[0], 0.2, epsilon = 1e-15);
        assert!(p.covariance.trace() >= s.covariance.trace());
    }

    #[test]
    fn zero_velocity_keeps_mean() {
        let s = state();
        let p = kf_predict(&s, 1.0, &KalmanNoise::default());
        assert_eq!(p.mean, s.mean);
    }

    #[test]
    fn zero_innovation() {
        let s = state();
        let u = kf_update(&s, &s.bbox(), &KalmanNoise::default()).unwrap();
        for i in 0..7 {
            assert_relative_eq!(u.mean[i], s.mean[i], epsilon = 1e-12);
        }
        assert!(u.covariance.trace() < s.covariance.trace());
    }

    #[test]
    fn non_finite_measurement_rejected() {
        let s = state();
        let bad = BoundingBox::new(f64::NAN, 0.0, 0.1, 0.5);
        assert!(matches!(kf_update(&s, &bad, &KalmanNoise::default()), Err(Error::Measurement(_))));
    }

    #[test]
    fn box_roundtrip() {
        let b = BoundingBox::new(-0.3, 0.1, 0.12, 0.4);
        let back = measurement_to_box(box_to_measurement(&b).as_slice());
        assert_relative_eq!(back.width, b.width, epsilon = 1e-12);
        assert_relative_eq!(back.height, b.height, epsilon = 1e-12);
    }

    #[test]
    fn small_measurement_noise_tracks_measurement() {
        let noise = KalmanNoise {
            measurement_position: 1e-9,
            measurement_scale: 1e-9,
            measurement_ratio: 1e-9,
            ..Default::default()
        };
        let s = state();
        let m = BoundingBox::new(0.2, 0.05, 0.12, 0.45);
        let u = kf_update(&s, &m, &noise).unwrap();
        let z = box_to_measurement(&m);
        for i in 0..4 {
            assert_relative_eq!(u.mean[i], z[i], epsilon = 1e-9);
        }
    }
}
