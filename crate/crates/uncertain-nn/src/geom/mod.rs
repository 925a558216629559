//! Planar primitives: points, disks, extremal distances, and disk-overlap area.
//!
//! Everything downstream reduces to distances between a query and a disk.
//! For a disk `D` with center `c` and radius `r`, the closest a point of `D`
//! can be to `q` is `max(|qc| - r, 0)` and the farthest is `|qc| + r`. The
//! overlap area of two disks feeds the distance distribution of a uniform
//! disk point.

pub mod halfplane;
pub mod tangency;

use serde::{Deserialize, Serialize};

/// A location in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        dist(self, other)
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;

    fn sub(self, other: Point2) -> Point2 {
        Point2::new(self.x - other.x, self.y - other.y)
    }
}

/// Euclidean distance between two points.
pub fn dist(a: Point2, b: Point2) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

/// A closed disk. Zero radius is allowed and denotes a single point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

impl Disk {
    /// Panics if `radius` is negative or any coordinate is non-finite.
    pub fn new(center: Point2, radius: f64) -> Self {
        assert!(
            center.x.is_finite() && center.y.is_finite() && radius.is_finite(),
            "disk parameters must be finite"
        );
        assert!(radius >= 0.0, "disk radius must be nonnegative");
        Disk { center, radius }
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }

    pub fn contains(&self, q: Point2) -> bool {
        dist(q, self.center) <= self.radius
    }
}

/// Smallest distance from `q` to any point of the disk; zero inside.
pub fn disk_min_dist(q: Point2, d: &Disk) -> f64 {
    (dist(q, d.center) - d.radius).max(0.0)
}

/// Largest distance from `q` to any point of the disk.
pub fn disk_max_dist(q: Point2, d: &Disk) -> f64 {
    dist(q, d.center) + d.radius
}

/// Area of the intersection of two disks.
///
/// Splits into the three classic cases: disjoint, nested, and partial
/// overlap. The partial case sums two circular segments; the `acos`
/// arguments are clamped against roundoff at the case boundaries.
pub fn lens_area(a: &Disk, b: &Disk) -> f64 {
    let d = dist(a.center, b.center);
    let (r1, r2) = (a.radius, b.radius);
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return std::f64::consts::PI * r * r;
    }
    let alpha = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let beta = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let part1 = r1 * r1 * alpha.acos();
    let part2 = r2 * r2 * beta.acos();
    let under = (r1 + r2 - d) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    let part3 = 0.5 * under.max(0.0).sqrt();
    // Near a tangency the formula is sqrt(ulp)-conditioned and can stray a
    // few 1e-9 past the true value; the lens can never exceed the smaller
    // disk, so pin it there.
    let r = r1.min(r2);
    (part1 + part2 - part3).clamp(0.0, std::f64::consts::PI * r * r)
}
