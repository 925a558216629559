//! Deterministic instance generators: hard configurations with many diagram
//! features, a discrete fixture with hand-computable probabilities, and
//! seeded random workloads.
//!
//! The hard fixtures are parameterized by `m` and indexed in blocks:
//!
//! * [`gen_lb_cubic`]: two flanks of huge disks plus a column of unit disks;
//!   every (left, right, column) triple contributes two diagram vertices.
//! * [`gen_lb_cubic_equal_radius`]: the same idea with all radii equal to 1,
//!   flank spacing `omega`, and the column bent along a quarter circle.
//! * [`gen_lb_quadratic`]: equally spaced collinear unit disks whose vertex
//!   locations have closed forms ([`predicted_quadratic_vertices`]).
//! * [`gen_pvd_quartic`]: two-location points, one location near the origin
//!   and one shared far away, so winning probabilities are powers of 1/2.

use crate::geom::halfplane::{line_intersection, Halfplane};
use crate::geom::{dist, Point2};
use crate::model::{DiscreteUncertainPoint, UncertainPoint, UncertainSet, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("generation failed: {0}")]
    GenerationFailure(String),
}

/// Shape summary of an instance, for reporting alongside serialized sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceStats {
    pub n: usize,
    pub total_locations: usize,
    pub k_max: usize,
    /// Largest/smallest disk radius (disk variant only).
    pub lambda: Option<f64>,
    /// Largest/smallest location weight (discrete variant only).
    pub rho: Option<f64>,
    /// No two uncertainty regions share a point.
    pub pairwise_disjoint: bool,
}

pub fn instance_stats(set: &UncertainSet) -> InstanceStats {
    let (lambda, rho, pairwise_disjoint) = match set.variant() {
        Variant::Disk => {
            let disks = set.disks().expect("disk variant");
            let r_min = disks.iter().map(|d| d.radius).fold(f64::INFINITY, f64::min);
            let r_max = disks.iter().map(|d| d.radius).fold(0.0f64, f64::max);
            let mut disjoint = true;
            'outer: for i in 0..disks.len() {
                for j in (i + 1)..disks.len() {
                    if dist(disks[i].center, disks[j].center)
                        <= disks[i].radius + disks[j].radius
                    {
                        disjoint = false;
                        break 'outer;
                    }
                }
            }
            (Some(r_max / r_min), None, disjoint)
        }
        Variant::Discrete => {
            let rho = crate::quantify::spiral::spread(set).expect("discrete variant");
            let mut seen: Vec<(usize, Point2)> = Vec::new();
            let mut disjoint = true;
            for (i, p) in set.points().iter().enumerate() {
                if let UncertainPoint::Discrete(d) = p {
                    for &loc in d.locations() {
                        if seen.iter().any(|&(o, s)| o != i && s == loc) {
                            disjoint = false;
                        }
                        seen.push((i, loc));
                    }
                }
            }
            (None, Some(rho), disjoint)
        }
    };
    InstanceStats {
        n: set.len(),
        total_locations: set.total_locations(),
        k_max: set.max_locations_per_point(),
        lambda,
        rho,
        pairwise_disjoint,
    }
}

fn disk(x: f64, y: f64, r: f64) -> UncertainPoint {
    UncertainPoint::disk(Point2::new(x, y), r).expect("generator radii are positive")
}

/// Flanked-column instance: `m` huge disks per flank (radius `R = 8n^2`,
/// staggered by `omega = 1/n^2`) and `2m` unit disks in a vertical column.
/// Indices: left flank `0..m`, right flank `m..2m`, column `2m..4m`.
pub fn gen_lb_cubic(m: usize) -> Result<UncertainSet, InstanceError> {
    if m == 0 {
        return Err(InstanceError::BadParameter("m must be at least 1".into()));
    }
    let n = 4 * m;
    let r = 8.0 * (n * n) as f64;
    let omega = 1.0 / (n * n) as f64;
    let mut points = Vec::with_capacity(n);
    for i in 1..=m {
        points.push(disk(-r - 1.5 - (i - 1) as f64 * omega, 0.0, r));
    }
    for j in 1..=m {
        points.push(disk(r + 1.5 + (j - 1) as f64 * omega, 0.0, r));
    }
    for k in 1..=(2 * m) {
        points.push(disk(0.0, (4 * k) as f64 - (4 * m) as f64 - 2.0, 1.0));
    }
    Ok(UncertainSet::new(points).expect("construction is valid"))
}

pub fn default_equal_radius_omega(m: usize) -> f64 {
    1e-4 / ((m + 1) * (m + 1)) as f64
}

/// Equal-radius variant: `m` unit disks per flank spaced by `omega` and `m`
/// unit disks along a quarter circle. Indices: left flank `0..m`, right
/// flank `m..2m`, arc `2m..3m`.
pub fn gen_lb_cubic_equal_radius(m: usize, omega: f64) -> Result<UncertainSet, InstanceError> {
    if m == 0 {
        return Err(InstanceError::BadParameter("m must be at least 1".into()));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(InstanceError::BadParameter(format!(
            "omega must be positive and finite, got {omega}"
        )));
    }
    let theta = std::f64::consts::FRAC_PI_2 / (m + 1) as f64;
    let mut points = Vec::with_capacity(3 * m);
    for i in 1..=m {
        points.push(disk(-2.0 - (i - 1) as f64 * omega, 0.0, 1.0));
    }
    for j in 1..=m {
        points.push(disk(2.0 + (j - 1) as f64 * omega, 0.0, 1.0));
    }
    for k in 1..=m {
        let a = k as f64 * theta;
        points.push(disk(2.0 - 2.0 * a.cos(), 2.0 * a.sin(), 1.0));
    }
    Ok(UncertainSet::new(points).expect("construction is valid"))
}

/// `2m` unit disks at `(4(i-m)-2, 0)` for `i = 1..=2m`; pairwise disjoint
/// with gap 2.
pub fn gen_lb_quadratic(m: usize) -> Result<UncertainSet, InstanceError> {
    if m == 0 {
        return Err(InstanceError::BadParameter("m must be at least 1".into()));
    }
    let points = (1..=2 * m)
        .map(|i| disk((4 * i) as f64 - (4 * m) as f64 - 2.0, 0.0, 1.0))
        .collect();
    Ok(UncertainSet::new(points).expect("construction is valid"))
}

/// A closed-form diagram vertex of [`gen_lb_quadratic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedVertex {
    pub location: Point2,
    /// Envelope value at the vertex.
    pub value: f64,
    /// Defining pair, 0-based, `pair.0 < pair.1`.
    pub pair: (usize, usize),
    /// Valid enclosed-disk indices (two candidates when the pair gap is odd).
    pub witnesses: (usize, Option<usize>),
}

/// Both mirror-image vertices for every pair of disks at least two slots
/// apart: in 1-based terms, pair (i, j) meets disk (i+j)/2 at
/// `(2(i+j-2m-1), +-((j-i)^2-1))` when j-i is even, and disk
/// `(i+j-1)/2` or `(i+j+1)/2` at `(2(i+j-2m-1), +-(j-i)sqrt((j-i)^2-4))`
/// when odd.
pub fn predicted_quadratic_vertices(m: usize) -> Vec<PredictedVertex> {
    let n = 2 * m;
    let mut out = Vec::new();
    for i in 1..=n {
        for j in (i + 2)..=n {
            let u = (j - i) as f64;
            let x = 2.0 * (i + j) as f64 - 4.0 * m as f64 - 2.0;
            let (y, value, witnesses) = if (j - i) % 2 == 0 {
                (u * u - 1.0, u * u, ((i + j) / 2 - 1, None))
            } else {
                (
                    u * (u * u - 4.0).sqrt(),
                    u * u - 1.0,
                    ((i + j - 1) / 2 - 1, Some((i + j).div_ceil(2) - 1)),
                )
            };
            for sign in [1.0, -1.0] {
                out.push(PredictedVertex {
                    location: Point2::new(x, sign * y),
                    value,
                    pair: (i - 1, j - 1),
                    witnesses,
                });
            }
        }
    }
    out
}

const PVD_ATTEMPTS: usize = 1000;

/// `n` two-location points: a near location on a jittered circle of radius
/// 1/2 about the origin and one far location shared by everyone at
/// `(100, 0)`, both with weight 1/2. Near locations are re-drawn until all
/// pairwise bisectors cross pairwise inside the unit disk, so the induced
/// rank arrangement is non-degenerate there.
pub fn gen_pvd_quartic(n: usize, seed: u64) -> Result<UncertainSet, InstanceError> {
    if n < 2 {
        return Err(InstanceError::BadParameter("need at least 2 points".into()));
    }
    let far = Point2::new(100.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..PVD_ATTEMPTS {
        let near: Vec<Point2> = (0..n)
            .map(|i| {
                let angle = std::f64::consts::TAU
                    * ((i as f64) + rng.gen_range(-0.2..0.2))
                    / n as f64;
                let radius = 0.5 + rng.gen_range(-1e-3..1e-3);
                Point2::new(radius * angle.cos(), radius * angle.sin())
            })
            .collect();

        // bisectors as lines 2(a-b).x = |a|^2 - |b|^2
        let mut bisectors = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (near[i], near[j]);
                bisectors.push(Halfplane::new(
                    Point2::new(2.0 * (a.x - b.x), 2.0 * (a.y - b.y)),
                    a.norm_sq() - b.norm_sq(),
                ));
            }
        }
        for i in 0..bisectors.len() {
            for j in (i + 1)..bisectors.len() {
                match line_intersection(&bisectors[i], &bisectors[j]) {
                    Some(p) if p.norm_sq() <= 1.0 => {}
                    _ => continue 'attempt, // parallel or crossing outside
                }
            }
        }

        let points = near
            .into_iter()
            .map(|p| UncertainPoint::discrete(vec![p, far], vec![0.5, 0.5]).unwrap())
            .collect();
        return Ok(UncertainSet::new(points).expect("construction is valid"));
    }
    Err(InstanceError::GenerationFailure(format!(
        "no valid bisector arrangement in {PVD_ATTEMPTS} attempts"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    /// All locations of a point weigh the same.
    Uniform,
    /// Weights drawn from a flat Dirichlet (normalized unit exponentials).
    Dirichlet,
}

#[derive(Debug, Clone, Copy)]
pub struct RandomParams {
    pub variant: Variant,
    pub n: usize,
    /// Locations per point (discrete variant).
    pub k: usize,
    pub seed: u64,
    /// Centers and locations are drawn from `[-box_half, box_half]^2`.
    pub box_half: f64,
    /// Radius range (disk variant).
    pub r_min: f64,
    pub r_max: f64,
    pub weights: WeightScheme,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            variant: Variant::Discrete,
            n: 4,
            k: 3,
            seed: 0,
            box_half: 10.0,
            r_min: 0.5,
            r_max: 2.0,
            weights: WeightScheme::Uniform,
        }
    }
}

/// Seed-reproducible random instance of either variant.
pub fn gen_random(params: &RandomParams) -> Result<UncertainSet, InstanceError> {
    if params.n == 0 {
        return Err(InstanceError::BadParameter("need at least 1 point".into()));
    }
    if !(params.box_half > 0.0 && params.box_half.is_finite()) {
        return Err(InstanceError::BadParameter("box half-width must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let draw = |rng: &mut ChaCha8Rng| {
        Point2::new(
            rng.gen_range(-params.box_half..params.box_half),
            rng.gen_range(-params.box_half..params.box_half),
        )
    };
    let points = match params.variant {
        Variant::Disk => {
            if !(params.r_min > 0.0 && params.r_max >= params.r_min) {
                return Err(InstanceError::BadParameter(format!(
                    "need 0 < r_min <= r_max, got [{}, {}]",
                    params.r_min, params.r_max
                )));
            }
            (0..params.n)
                .map(|_| {
                    let c = draw(&mut rng);
                    let r = if params.r_max > params.r_min {
                        rng.gen_range(params.r_min..=params.r_max)
                    } else {
                        params.r_min
                    };
                    UncertainPoint::disk(c, r).expect("radius validated")
                })
                .collect::<Vec<_>>()
        }
        Variant::Discrete => {
            if params.k == 0 {
                return Err(InstanceError::BadParameter("need at least 1 location".into()));
            }
            (0..params.n)
                .map(|_| {
                    let locs: Vec<Point2> = (0..params.k).map(|_| draw(&mut rng)).collect();
                    let point = match params.weights {
                        WeightScheme::Uniform => DiscreteUncertainPoint::uniform(locs),
                        WeightScheme::Dirichlet => {
                            let raw: Vec<f64> = (0..params.k)
                                .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                                .collect();
                            let total: f64 = raw.iter().sum();
                            DiscreteUncertainPoint::new(
                                locs,
                                raw.iter().map(|e| e / total).collect(),
                            )
                        }
                    };
                    UncertainPoint::Discrete(point.expect("weights normalized"))
                })
                .collect::<Vec<_>>()
        }
    };
    Ok(UncertainSet::new(points).expect("nonempty and homogeneous"))
}
