//! Spherical geometry kernel.
//!
//! Node positions live on the unit sphere. Everything here is a pure
//! function of its inputs; no fast-math reassociation is used, so results
//! are bit-reproducible for identical inputs.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angles below this are treated as coincident points.
pub const ANGLE_EPS: f64 = 1e-12;

/// Tolerance for the unit-length invariant.
pub const UNIT_TOL: f64 = 1e-9;

/// Points with `1 + x3` below this are clamped onto the outer ring by the
/// Lambert projection.
pub const LAMBERT_EPS: f64 = 1e-12;

/// A plain 3-vector, used for un-normalized weighted sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    #[inline]
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = o.0;
        Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Normalizes to unit length, or `None` for a (near) zero vector.
    #[inline]
    pub fn normalize(self) -> Option<UnitVec3> {
        let n = self.norm();
        if n > 1e-300 && n.is_finite() {
            Some(UnitVec3(self * (1.0 / n)))
        } else {
            None
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        self.0[0] += o.0[0];
        self.0[1] += o.0[1];
        self.0[2] += o.0[2];
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// A point on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    pub const NORTH: UnitVec3 = UnitVec3(Vec3([0.0, 0.0, 1.0]));
    pub const SOUTH: UnitVec3 = UnitVec3(Vec3([0.0, 0.0, -1.0]));

    /// Normalizes the given components. Panics on the zero vector.
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3::new(x, y, z)
            .normalize()
            .expect("UnitVec3::new called with a zero vector")
    }

    /// Wraps a vector the caller guarantees is already unit length.
    #[inline]
    pub fn new_unchecked(v: Vec3) -> Self {
        UnitVec3(v)
    }

    #[inline]
    pub fn vec(self) -> Vec3 {
        self.0
    }

    #[inline]
    pub fn coords(self) -> [f64; 3] {
        self.0 .0
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.0 .0[0]
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.0 .0[1]
    }

    #[inline]
    pub fn z(self) -> f64 {
        self.0 .0[2]
    }

    #[inline]
    pub fn dot(self, o: UnitVec3) -> f64 {
        self.0.dot(o.0)
    }

    #[inline]
    pub fn antipode(self) -> UnitVec3 {
        UnitVec3(-self.0)
    }

    pub fn is_unit(self) -> bool {
        (self.0.norm() - 1.0).abs() <= UNIT_TOL
    }
}

impl From<UnitVec3> for Vec3 {
    fn from(u: UnitVec3) -> Vec3 {
        u.0
    }
}

/// Great-circle angle between two unit vectors, in `[0, π]`.
#[inline]
pub fn spherical_distance(a: UnitVec3, b: UnitVec3) -> f64 {
    a.0.cross(b.0).norm().atan2(a.dot(b))
}

/// Spherical linear interpolation from `a` towards `b`.
///
/// `t` may lie outside `[0, 1]`, which extrapolates along the great circle.
/// Coincident inputs return `a`; antipodal inputs have no unique great
/// circle and fail unless `t` is exactly 0 or 1.
pub fn slerp(a: UnitVec3, b: UnitVec3, t: f64) -> Result<UnitVec3> {
    if t == 0.0 {
        return Ok(a);
    }
    if t == 1.0 {
        return Ok(b);
    }
    let theta = spherical_distance(a, b);
    if theta < ANGLE_EPS {
        return Ok(a);
    }
    if PI - theta < ANGLE_EPS {
        return Err(Error::IllConditioned);
    }
    Ok(slerp_with_angle(a, b, theta, t))
}

/// Slerp with a precomputed angle `theta = spherical_distance(a, b)`.
/// The caller guarantees `sin(theta)` is not vanishing.
#[inline]
pub(crate) fn slerp_with_angle(a: UnitVec3, b: UnitVec3, theta: f64, t: f64) -> UnitVec3 {
    let s = theta.sin();
    let wa = ((1.0 - t) * theta).sin() / s;
    let wb = (t * theta).sin() / s;
    renormalize(a.0 * wa + b.0 * wb, a)
}

/// Normalizes `v`, falling back to `fallback` for a degenerate vector.
#[inline]
pub(crate) fn renormalize(v: Vec3, fallback: UnitVec3) -> UnitVec3 {
    v.normalize().unwrap_or(fallback)
}

/// Unit tangent at `from` pointing along the great circle towards `to`.
/// `None` when the two points are coincident or antipodal.
#[inline]
pub fn tangent_towards(from: UnitVec3, to: UnitVec3) -> Option<Vec3> {
    let t = to.0 - from.0 * from.dot(to);
    let n = t.norm();
    if n > 1e-15 {
        Some(t * (1.0 / n))
    } else {
        None
    }
}

/// Moves `from` by `angle` radians along the unit tangent `dir`.
#[inline]
pub fn move_along(from: UnitVec3, dir: Vec3, angle: f64) -> UnitVec3 {
    renormalize(from.0 * angle.cos() + dir * angle.sin(), from)
}

/// SplitMix64 finalizer; used to derive reproducible per-node randomness
/// from `(seed, step, node)` keys independent of thread scheduling.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic pseudo-random unit tangent at `at`, derived from `key`.
pub fn seeded_tangent(at: UnitVec3, key: u64) -> Vec3 {
    let mut k = key;
    loop {
        let mut comp = [0.0; 3];
        for c in comp.iter_mut() {
            k = mix64(k);
            *c = (k >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
        }
        let v = Vec3(comp);
        let t = v - at.0 * at.0.dot(v);
        let n = t.norm();
        if n > 1e-3 {
            return t * (1.0 / n);
        }
    }
}

/// Uniform random point on the sphere: a normalized vector of three
/// independent standard normal draws.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> UnitVec3 {
    loop {
        let v = Vec3([
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ]);
        if let Some(u) = v.normalize() {
            return u;
        }
    }
}

/// A rotation of 3-space stored as a row-major matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation([[f64; 3]; 3]);

impl Rotation {
    pub const IDENTITY: Rotation = Rotation([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// 180° about the x1 axis; maps the south pole onto the north pole.
    pub const FLIP_X: Rotation = Rotation([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]);

    /// Rodrigues rotation taking `focal` onto the projection center (0,0,1).
    pub fn to_pole(focal: UnitVec3) -> Rotation {
        let pole = UnitVec3::NORTH;
        let axis = focal.vec().cross(pole.vec());
        let s = axis.norm();
        let c = focal.dot(pole);
        if s < 1e-15 {
            return if c > 0.0 {
                Rotation::IDENTITY
            } else {
                Rotation::FLIP_X
            };
        }
        let e = axis * (1.0 / s);
        let [e1, e2, e3] = e.0;
        let k = 1.0 - c;
        // R = c I + s [e]x + (1 - c) e e^T
        Rotation([
            [c + k * e1 * e1, -s * e3 + k * e1 * e2, s * e2 + k * e1 * e3],
            [s * e3 + k * e2 * e1, c + k * e2 * e2, -s * e1 + k * e2 * e3],
            [-s * e2 + k * e3 * e1, s * e1 + k * e3 * e2, c + k * e3 * e3],
        ])
    }

    pub fn inverse(&self) -> Rotation {
        let m = &self.0;
        Rotation([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    #[inline]
    pub fn apply(&self, p: UnitVec3) -> UnitVec3 {
        let v = p.vec().0;
        let m = &self.0;
        let r = Vec3([
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]);
        renormalize(r, p)
    }
}

/// Rotates every point so that `focal` lands on (0,0,1).
pub fn rotate_to_pole(points: &[UnitVec3], focal: UnitVec3) -> Vec<UnitVec3> {
    let rot = Rotation::to_pole(focal);
    points.iter().map(|&p| rot.apply(p)).collect()
}

/// A point in the projection plane, nominally within the unit disk.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub u: f64,
    pub v: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { u: 0.0, v: 0.0 };

    pub fn new(u: f64, v: f64) -> Self {
        PlanePoint { u, v }
    }

    pub fn radius(self) -> f64 {
        self.u.hypot(self.v)
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotated(self, angle: f64) -> PlanePoint {
        let (s, c) = angle.sin_cos();
        PlanePoint {
            u: c * self.u - s * self.v,
            v: s * self.u + c * self.v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projected {
    pub point: PlanePoint,
    /// The input sat at (or numerically next to) the antipode of the
    /// projection center and was placed on the outer ring.
    pub antipode_clamped: bool,
}

/// Lambert azimuthal equal-area projection centered at (0,0,1), scaled so
/// the whole sphere maps into the unit disk. Planar radius equals
/// `sin(θ/2)` where θ is the angle to the center.
pub fn lambert_project(p: UnitVec3) -> Projected {
    let [x1, x2, x3] = p.coords();
    let denom = 1.0 + x3;
    if denom <= LAMBERT_EPS {
        let r = x1.hypot(x2);
        let point = if r > 0.0 {
            PlanePoint::new(x1 / r, x2 / r)
        } else {
            PlanePoint::new(1.0, 0.0)
        };
        return Projected {
            point,
            antipode_clamped: true,
        };
    }
    let z = 0.5 * (2.0 / denom).sqrt();
    Projected {
        point: PlanePoint::new(z * x1, z * x2),
        antipode_clamped: false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alignment {
    pub angle: f64,
    /// No shared point carried direction information; `angle` is 0.
    pub degenerate: bool,
}

/// Rotation angle φ about the origin minimizing `Σ ‖R(φ)·curr_i − prev_i‖²`
/// over the shared indices (planar Procrustes).
pub fn align_rotation(prev: &[PlanePoint], curr: &[PlanePoint], shared: &[usize]) -> Alignment {
    let mut dot = 0.0;
    let mut crs = 0.0;
    let mut informative = false;
    for &i in shared {
        let (p, c) = (prev[i], curr[i]);
        if p.radius() == 0.0 || c.radius() == 0.0 {
            continue;
        }
        informative = true;
        dot += p.u * c.u + p.v * c.v;
        crs += p.v * c.u - p.u * c.v;
    }
    if !informative || (dot == 0.0 && crs == 0.0) {
        return Alignment {
            angle: 0.0,
            degenerate: true,
        };
    }
    Alignment {
        angle: crs.atan2(dot),
        degenerate: false,
    }
}
