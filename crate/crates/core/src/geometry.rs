//! Planar vectors, poses, wall segments and the exact predicates the
//! velocity-obstacle construction is built on.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// Directions shorter than this are treated as zero.
pub const DEGENERATE_EPS: f64 = 1e-9;

/// A 2D vector. Used for positions (m) and planar velocities (m/s) alike.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(angle: f64) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or `None` for near-zero vectors.
    pub fn normalize(self) -> Option<Vec2> {
        let n = self.norm();
        (n > DEGENERATE_EPS).then(|| self / n)
    }

    /// Rescales the vector so its norm does not exceed `max_norm`.
    pub fn clamp_norm(self, max_norm: f64) -> Vec2 {
        let n = self.norm();
        if n > max_norm && n > 0.0 {
            self * (max_norm / n)
        } else {
            self
        }
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotates counter-clockwise by `angle` radians.
    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        rhs * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x / rhs, self.y / rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wraps an angle into (−π, π]. Angles already in range are returned unchanged,
/// which makes the wrap exactly idempotent.
pub fn wrap_angle(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let two_pi = 2.0 * PI;
    let mut a = theta.rem_euclid(two_pi);
    if a > PI {
        a -= two_pi;
    }
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if a <= -PI {
        a += two_pi;
    }
    a
}

/// Position plus heading; the heading is kept in (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub position: Vec2,
    pub heading: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            position: Vec2::new(x, y),
            heading: wrap_angle(heading),
        }
    }

    pub fn direction(&self) -> Vec2 {
        Vec2::from_angle(self.heading)
    }
}

/// A wall or table edge. Endpoints must differ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment2 {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment2 {
    /// Returns `None` for a degenerate (zero-length) segment.
    pub fn new(a: Vec2, b: Vec2) -> Option<Self> {
        (a != b).then_some(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    /// Closest point of the segment to `p`.
    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        let ab = self.b - self.a;
        let len2 = ab.norm_squared();
        if len2 == 0.0 {
            return self.a;
        }
        let t = ((p - self.a).dot(ab) / len2).clamp(0.0, 1.0);
        self.a + ab * t
    }
}

/// Decomposes an axis-aligned rectangle into its four edges.
pub fn rectangle_segments(min: Vec2, max: Vec2) -> Vec<Segment2> {
    let corners = [
        min,
        Vec2::new(max.x, min.y),
        max,
        Vec2::new(min.x, max.y),
    ];
    (0..4)
        .filter_map(|i| Segment2::new(corners[i], corners[(i + 1) % 4]))
        .collect()
}

/// Euclidean distance from `center` to the closest point of `seg`.
pub fn disc_segment_distance(center: Vec2, seg: &Segment2) -> f64 {
    center.distance(seg.closest_point(center))
}

/// Coefficients of ‖origin + t·direction − center‖² − radius² = a·t² + b·t + c.
fn ray_disc_quadratic(origin: Vec2, direction: Vec2, center: Vec2, radius: f64) -> (f64, f64, f64) {
    let w = origin - center;
    let a = direction.norm_squared();
    let b = 2.0 * w.dot(direction);
    let c = w.norm_squared() - radius * radius;
    (a, b, c)
}

/// True iff the open ray `origin + t·direction`, t > 0, touches the closed disc.
/// A zero direction degenerates to a point-in-disc test. Tangency counts.
pub fn ray_disc_intersects(origin: Vec2, direction: Vec2, center: Vec2, radius: f64) -> bool {
    let (a, b, c) = ray_disc_quadratic(origin, direction, center, radius);
    if c <= 0.0 {
        // Origin already inside the disc: small t > 0 stays inside (or on it).
        return true;
    }
    if direction.norm() <= DEGENERATE_EPS {
        return false;
    }
    // Outside the disc: both roots share the sign of −b.
    b < 0.0 && b * b - 4.0 * a * c >= 0.0
}

/// First time t ≥ 0 at which the ray enters the disc: 0 when the origin is
/// already inside, `f64::INFINITY` when the ray never touches it.
pub fn ray_disc_first_hit(origin: Vec2, direction: Vec2, center: Vec2, radius: f64) -> f64 {
    let (a, b, c) = ray_disc_quadratic(origin, direction, center, radius);
    if c <= 0.0 {
        return 0.0;
    }
    if direction.norm() <= DEGENERATE_EPS || b >= 0.0 {
        return f64::INFINITY;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    // Stable form of the smaller root (b < 0, c > 0).
    (2.0 * c) / (-b + disc.sqrt())
}
