//! Points of ℝ³ and of the unit sphere, plus directional sampling.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Norms at or below this value cannot be normalized.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Allowed deviation from unit norm for [`UnitVec3`].
pub const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate vector of norm {0:e} cannot be normalized")]
    DegenerateVector(f64),
    #[error("vector has norm {0} and is not on the unit sphere")]
    NotUnit(f64),
    #[error("vector has non-finite coordinates")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Vec3([x1, x2, x3])
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        inner(self, other)
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [p, q, r] = o.0;
        Vec3([b * r - c * q, c * p - a * r, a * q - b * p])
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3([self * v.0[0], self * v.0[1], self * v.0[2]])
    }
}

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    pub const E1: UnitVec3 = UnitVec3(Vec3::new(1.0, 0.0, 0.0));
    pub const E2: UnitVec3 = UnitVec3(Vec3::new(0.0, 1.0, 0.0));
    pub const E3: UnitVec3 = UnitVec3(Vec3::new(0.0, 0.0, 1.0));

    /// Accepts `v` as is if its norm is within [`UNIT_TOLERANCE`] of one.
    pub fn try_new(v: Vec3) -> Result<Self, GeometryError> {
        if !v.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        let n = v.norm();
        if (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(GeometryError::NotUnit(n));
        }
        Ok(UnitVec3(v))
    }

    pub fn vec(&self) -> Vec3 {
        self.0
    }

    pub fn coords(&self) -> [f64; 3] {
        self.0 .0
    }

    pub fn dot(&self, other: &UnitVec3) -> f64 {
        self.0.dot(&other.0)
    }
}

impl From<UnitVec3> for Vec3 {
    fn from(u: UnitVec3) -> Vec3 {
        u.0
    }
}

impl<'de> Deserialize<'de> for UnitVec3 {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let v = Vec3::deserialize(de)?;
        UnitVec3::try_new(v).map_err(serde::de::Error::custom)
    }
}

pub fn normalize(v: Vec3) -> Result<UnitVec3, GeometryError> {
    if !v.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    let n = v.norm();
    if n <= DEGENERATE_NORM {
        return Err(GeometryError::DegenerateVector(n));
    }
    Ok(UnitVec3((1.0 / n) * v))
}

pub fn inner(x: &Vec3, y: &Vec3) -> f64 {
    x.0[0] * y.0[0] + x.0[1] * y.0[1] + x.0[2] * y.0[2]
}

/// Great-circle angle between two unit vectors, in `[0, π]`.
///
/// Evaluated as `atan2(‖x×y‖, x·y)`, which equals `acos(x·y)` on the sphere
/// but keeps full precision near 0 and π.
pub fn angular_distance(x: &UnitVec3, y: &UnitVec3) -> f64 {
    x.vec().cross(&y.vec()).norm().atan2(x.dot(y))
}

/// Parameters of a von Mises–Fisher distribution on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VmfParams {
    pub mu: UnitVec3,
    pub kappa: f64,
}

impl VmfParams {
    pub fn new(mu: UnitVec3, kappa: f64) -> Option<Self> {
        (kappa >= 0.0 && kappa.is_finite()).then_some(VmfParams { mu, kappa })
    }
}

/// Maps the local frame whose pole is (0,0,1) onto `mu` with the Householder
/// reflection across the plane orthogonal to `e3 - mu`. The reflection is
/// undefined at `mu = e3`, where the identity is used.
fn frame_to(mu: &UnitVec3, local: Vec3) -> Vec3 {
    let v = Vec3::new(0.0, 0.0, 1.0) - mu.vec();
    let vv = v.norm_squared();
    if vv == 0.0 {
        return local;
    }
    local - (2.0 * v.dot(&local) / vv) * v
}

/// One draw from the vMF density ∝ exp(κ μ·x), by inversion of the
/// closed-form 3-D CDF of cos θ.
pub fn sample_vmf<R: Rng + ?Sized>(params: &VmfParams, rng: &mut R) -> UnitVec3 {
    let u: f64 = rng.gen();
    let phi: f64 = rng.gen::<f64>() * 2.0 * PI;
    let kappa = params.kappa;
    let cos_theta = if kappa == 0.0 {
        2.0 * u - 1.0
    } else {
        // 1 + ln(u + (1-u)e^{-2κ})/κ, evaluated without cancellation for large κ.
        let t = (u + (1.0 - u) * (-2.0 * kappa).exp()).ln();
        (1.0 + t / kappa).clamp(-1.0, 1.0)
    };
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    let local = Vec3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta);
    let v = frame_to(&params.mu, local);
    // Reflection and rounding keep the norm within a few ulps of one.
    UnitVec3((1.0 / v.norm()) * v)
}

/// A 3×3 rotation matrix, row-major.
pub type Mat3 = [[f64; 3]; 3];

/// Uniformly distributed rotation, from a uniform unit quaternion.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Mat3 {
    let (u1, u2, u3): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
    let a = (1.0 - u1).sqrt();
    let b = u1.sqrt();
    let (w, x, y, z) = (
        a * (2.0 * PI * u2).sin(),
        a * (2.0 * PI * u2).cos(),
        b * (2.0 * PI * u3).sin(),
        b * (2.0 * PI * u3).cos(),
    );
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

pub fn rotate(r: &Mat3, v: &Vec3) -> Vec3 {
    Vec3(std::array::from_fn(|i| inner(&Vec3(r[i]), v)))
}

/// Rotation of a unit vector, renormalized so the result stays on the sphere.
pub fn rotate_unit(r: &Mat3, v: &UnitVec3) -> UnitVec3 {
    let w = rotate(r, &v.vec());
    UnitVec3((1.0 / w.norm()) * w)
}

/// Spherical linear interpolation; falls back to normalized lerp when the
/// endpoints are (nearly) parallel or antipodal.
pub fn slerp(a: &UnitVec3, b: &UnitVec3, t: f64) -> UnitVec3 {
    let omega = angular_distance(a, b);
    let so = omega.sin();
    if so < 1e-9 {
        let v = (1.0 - t) * a.vec() + t * b.vec();
        return normalize(v).unwrap_or(*a);
    }
    let v = ((1.0 - t) * omega).sin() / so * a.vec() + (t * omega).sin() / so * b.vec();
    UnitVec3((1.0 / v.norm()) * v)
}
