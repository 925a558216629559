//! Uncertain points: distributions over locations in the plane.
//!
//! A point is either a uniform density on a disk or a finite set of weighted
//! candidate locations. Both expose the same distance summaries relative to
//! a query `q`:
//!
//! * `point_min_dist` / `point_max_dist`: the extreme distances any
//!   realization can attain,
//! * `distance_cdf(r)`: the probability the realized location lies within
//!   distance `r` of `q` (closed inequality), and, for the disk variant,
//!   its density `distance_pdf`,
//! * `instantiate`: one random realization,
//! * `discretize`: a weighted-sample surrogate of a disk point whose
//!   cumulative distance weights track the continuous ones to within a
//!   requested deviation, with the requested confidence.

use crate::geom::{disk_max_dist, disk_min_dist, dist, lens_area, Disk, Point2};
use rand::Rng;
use thiserror::Error;

/// Sampling-constant default for [`discretize`]: the sample count is
/// `ceil(c / alpha^2 * ln(1 / delta'))` and `c` scales the whole budget.
pub const DEFAULT_SAMPLING_CONSTANT: f64 = 1.0;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid uncertain point: {0}")]
    InvalidPoint(String),
    #[error("operation requires the continuous (disk) variant")]
    DiscreteVariant,
    #[error("a set must contain at least one point")]
    EmptySet,
    #[error("all points in a set must share one variant")]
    MixedVariants,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// Continuous densities supported on a disk region. Only the uniform one is
/// built in; the cdf/pdf/instantiate interfaces leave room for others.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskDensity {
    UniformOnDisk,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskUncertainPoint {
    pub region: Disk,
    pub density: DiskDensity,
}

impl DiskUncertainPoint {
    pub fn new(region: Disk) -> Result<Self, ModelError> {
        if region.radius <= 0.0 {
            return Err(ModelError::InvalidPoint(
                "disk uncertain point needs positive radius".into(),
            ));
        }
        Ok(DiskUncertainPoint { region, density: DiskDensity::UniformOnDisk })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteUncertainPoint {
    locations: Vec<Point2>,
    weights: Vec<f64>,
}

impl DiscreteUncertainPoint {
    /// Locations with matching positive weights that sum to one (within
    /// 1e-12 accumulated roundoff).
    pub fn new(locations: Vec<Point2>, weights: Vec<f64>) -> Result<Self, ModelError> {
        if locations.is_empty() {
            return Err(ModelError::InvalidPoint("need at least one location".into()));
        }
        if locations.len() != weights.len() {
            return Err(ModelError::InvalidPoint(
                "location and weight counts differ".into(),
            ));
        }
        for p in &locations {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(ModelError::InvalidPoint("non-finite location".into()));
            }
        }
        let mut sum = 0.0;
        for &w in &weights {
            if !(w > 0.0 && w <= 1.0) {
                return Err(ModelError::InvalidPoint(format!(
                    "weight {w} outside (0, 1]"
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(ModelError::InvalidPoint(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(DiscreteUncertainPoint { locations, weights })
    }

    pub fn uniform(locations: Vec<Point2>) -> Result<Self, ModelError> {
        let k = locations.len();
        if k == 0 {
            return Err(ModelError::InvalidPoint("need at least one location".into()));
        }
        let w = 1.0 / k as f64;
        DiscreteUncertainPoint::new(locations, vec![w; k])
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty location lists
    }

    pub fn locations(&self) -> &[Point2] {
        &self.locations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UncertainPoint {
    Disk(DiskUncertainPoint),
    Discrete(DiscreteUncertainPoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Disk,
    Discrete,
}

impl UncertainPoint {
    pub fn disk(center: Point2, radius: f64) -> Result<Self, ModelError> {
        Ok(UncertainPoint::Disk(DiskUncertainPoint::new(Disk::new(center, radius))?))
    }

    pub fn discrete(locations: Vec<Point2>, weights: Vec<f64>) -> Result<Self, ModelError> {
        Ok(UncertainPoint::Discrete(DiscreteUncertainPoint::new(locations, weights)?))
    }

    pub fn variant(&self) -> Variant {
        match self {
            UncertainPoint::Disk(_) => Variant::Disk,
            UncertainPoint::Discrete(_) => Variant::Discrete,
        }
    }

    /// Number of candidate locations; 1 for the continuous variant's
    /// purposes of counting stored data.
    pub fn location_count(&self) -> usize {
        match self {
            UncertainPoint::Disk(_) => 1,
            UncertainPoint::Discrete(d) => d.len(),
        }
    }
}

/// Smallest distance from `q` any realization of the point can attain.
pub fn point_min_dist(q: Point2, p: &UncertainPoint) -> f64 {
    match p {
        UncertainPoint::Disk(d) => disk_min_dist(q, &d.region),
        UncertainPoint::Discrete(d) => d
            .locations
            .iter()
            .map(|&loc| dist(q, loc))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Largest distance from `q` any realization of the point can attain.
pub fn point_max_dist(q: Point2, p: &UncertainPoint) -> f64 {
    match p {
        UncertainPoint::Disk(d) => disk_max_dist(q, &d.region),
        UncertainPoint::Discrete(d) => d
            .locations
            .iter()
            .map(|&loc| dist(q, loc))
            .fold(0.0, f64::max),
    }
}

/// Probability that the realized location lies within distance `r` of `q`
/// (closed inequality).
pub fn distance_cdf(q: Point2, p: &UncertainPoint, r: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    match p {
        UncertainPoint::Disk(d) => {
            // Clamp at the support endpoints computed the same way as
            // disk_min_dist / disk_max_dist; the lens formula is ill
            // conditioned at the tangency and can miss them by ~1e-8.
            if r >= disk_max_dist(q, &d.region) {
                return 1.0;
            }
            if r <= disk_min_dist(q, &d.region) {
                return 0.0;
            }
            let ball = Disk::new(q, r);
            lens_area(&ball, &d.region) / d.region.area()
        }
        UncertainPoint::Discrete(d) => d
            .locations
            .iter()
            .zip(d.weights.iter())
            .filter(|(loc, _)| dist(q, **loc) <= r)
            .map(|(_, w)| *w)
            .sum(),
    }
}

/// Density of the distance distribution for a uniform disk point: the length
/// of the circle of radius `r` about `q` that runs inside the region,
/// divided by the region area.
pub fn distance_pdf(q: Point2, p: &UncertainPoint, r: f64) -> Result<f64, ModelError> {
    let d = match p {
        UncertainPoint::Disk(d) => d,
        UncertainPoint::Discrete(_) => return Err(ModelError::DiscreteVariant),
    };
    let c = dist(q, d.region.center);
    let rr = d.region.radius;
    if r <= 0.0 || r <= c - rr || r >= c + rr {
        return Ok(0.0);
    }
    if r <= rr - c {
        // the whole circle lies inside the region
        return Ok(2.0 * r / (rr * rr));
    }
    let cosang = ((c * c + r * r - rr * rr) / (2.0 * c * r)).clamp(-1.0, 1.0);
    let half_angle = cosang.acos();
    Ok(2.0 * r * half_angle / (std::f64::consts::PI * rr * rr))
}

/// One random realization of the point.
pub fn instantiate<R: Rng + ?Sized>(p: &UncertainPoint, rng: &mut R) -> Point2 {
    match p {
        UncertainPoint::Disk(d) => {
            let radius = d.region.radius * rng.gen::<f64>().sqrt();
            let angle = rng.gen::<f64>() * std::f64::consts::TAU;
            Point2::new(
                d.region.center.x + radius * angle.cos(),
                d.region.center.y + radius * angle.sin(),
            )
        }
        UncertainPoint::Discrete(d) => {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (loc, w) in d.locations.iter().zip(d.weights.iter()) {
                acc += w;
                if u < acc {
                    return *loc;
                }
            }
            *d.locations.last().unwrap()
        }
    }
}

/// Number of samples needed so the empirical distance weights stay within
/// `alpha` of the true ones with probability at least `1 - delta_prime`,
/// scaled by the calibration constant `c`.
pub fn discretize_sample_count(alpha: f64, delta_prime: f64, c: f64) -> usize {
    ((c / (alpha * alpha)) * (1.0 / delta_prime).ln()).ceil() as usize
}

/// Replaces a disk point by uniform-weight samples drawn from it.
pub fn discretize<R: Rng + ?Sized>(
    p: &UncertainPoint,
    alpha: f64,
    delta_prime: f64,
    rng: &mut R,
) -> Result<DiscreteUncertainPoint, ModelError> {
    discretize_with_constant(p, alpha, delta_prime, DEFAULT_SAMPLING_CONSTANT, rng)
}

pub fn discretize_with_constant<R: Rng + ?Sized>(
    p: &UncertainPoint,
    alpha: f64,
    delta_prime: f64,
    c: f64,
    rng: &mut R,
) -> Result<DiscreteUncertainPoint, ModelError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ModelError::BadParameter(format!("alpha {alpha} outside (0, 1)")));
    }
    if !(delta_prime > 0.0 && delta_prime < 1.0) {
        return Err(ModelError::BadParameter(format!(
            "delta' {delta_prime} outside (0, 1)"
        )));
    }
    if c <= 0.0 {
        return Err(ModelError::BadParameter(format!("constant {c} must be positive")));
    }
    if p.variant() != Variant::Disk {
        return Err(ModelError::DiscreteVariant);
    }
    let k = discretize_sample_count(alpha, delta_prime, c).max(1);
    let locations: Vec<Point2> = (0..k).map(|_| instantiate(p, rng)).collect();
    DiscreteUncertainPoint::uniform(locations)
}

/// A homogeneous collection of uncertain points.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainSet {
    points: Vec<UncertainPoint>,
}

impl UncertainSet {
    pub fn new(points: Vec<UncertainPoint>) -> Result<Self, ModelError> {
        let first = points.first().ok_or(ModelError::EmptySet)?.variant();
        if points.iter().any(|p| p.variant() != first) {
            return Err(ModelError::MixedVariants);
        }
        Ok(UncertainSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty sets
    }

    pub fn variant(&self) -> Variant {
        self.points[0].variant()
    }

    pub fn points(&self) -> &[UncertainPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &UncertainPoint {
        &self.points[i]
    }

    /// Total number of stored candidate locations over all points.
    pub fn total_locations(&self) -> usize {
        self.points.iter().map(|p| p.location_count()).sum()
    }

    pub fn max_locations_per_point(&self) -> usize {
        self.points.iter().map(|p| p.location_count()).max().unwrap_or(0)
    }

    /// The disks of a disk-variant set.
    pub fn disks(&self) -> Option<Vec<Disk>> {
        self.points
            .iter()
            .map(|p| match p {
                UncertainPoint::Disk(d) => Some(d.region),
                UncertainPoint::Discrete(_) => None,
            })
            .collect()
    }

    /// Axis-aligned bounding box over all stored locations and disk extents.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut take = |x: f64, y: f64| {
            lo.x = lo.x.min(x);
            lo.y = lo.y.min(y);
            hi.x = hi.x.max(x);
            hi.y = hi.y.max(y);
        };
        for p in &self.points {
            match p {
                UncertainPoint::Disk(d) => {
                    take(d.region.center.x - d.region.radius, d.region.center.y - d.region.radius);
                    take(d.region.center.x + d.region.radius, d.region.center.y + d.region.radius);
                }
                UncertainPoint::Discrete(d) => {
                    for loc in d.locations() {
                        take(loc.x, loc.y);
                    }
                }
            }
        }
        (lo, hi)
    }

    /// Diagonal of the bounding box; a cheap instance scale.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        dist(lo, hi)
    }
}

/// Discretizes every point of a disk-variant set.
pub fn discretize_set<R: Rng + ?Sized>(
    set: &UncertainSet,
    alpha: f64,
    delta_prime: f64,
    c: f64,
    rng: &mut R,
) -> Result<UncertainSet, ModelError> {
    let points = set
        .points()
        .iter()
        .map(|p| {
            discretize_with_constant(p, alpha, delta_prime, c, rng)
                .map(UncertainPoint::Discrete)
        })
        .collect::<Result<Vec<_>, _>>()?;
    UncertainSet::new(points)
}

/// The distance distribution of one point of a set relative to a query,
/// with its support precomputed.
#[derive(Debug, Clone, Copy)]
pub struct DistanceCdf<'a> {
    pub query: Point2,
    pub point_index: usize,
    pub support: (f64, f64),
    point: &'a UncertainPoint,
}

impl<'a> DistanceCdf<'a> {
    pub fn new(query: Point2, set: &'a UncertainSet, point_index: usize) -> Self {
        let point = set.point(point_index);
        let support = (point_min_dist(query, point), point_max_dist(query, point));
        DistanceCdf { query, point_index, support, point }
    }

    pub fn cdf(&self, r: f64) -> f64 {
        distance_cdf(self.query, self.point, r)
    }

    pub fn pdf(&self, r: f64) -> Result<f64, ModelError> {
        distance_pdf(self.query, self.point, r)
    }
}
