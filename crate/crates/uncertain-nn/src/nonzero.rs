//! Which points can be the nearest neighbor at all.
//!
//! A point has nonzero winning probability iff its closest possible
//! distance beats every rival's farthest possible distance:
//!
//! ```text
//! i qualifies  <=>  delta_i(q) < Delta_j(q) for every j != i
//! ```
//!
//! On top of that test this module enumerates the isolated features of the
//! planar subdivision induced by the qualification sets: for disk inputs,
//! the candidate vertices where two lower boundaries and one upper boundary
//! meet ([`enumerate_diagram_features`]); for discrete inputs, the convex
//! exclusion regions `{x : Delta_j(x) <= delta_i(x)}` as halfplane
//! intersections ([`exclusion_polygon`]).

use crate::geom::halfplane::{box_polygon, clip, line_intersection, Halfplane};
use crate::geom::tangency::{solve_tangency, TangencyConstraint, TangencyError, DEFAULT_TOLERANCE};
use crate::geom::{dist, Point2};
use crate::model::{point_max_dist, point_min_dist, UncertainPoint, UncertainSet, Variant};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NonzeroError {
    #[error("operation requires the {0} variant")]
    VariantMismatch(&'static str),
    #[error(transparent)]
    Tangency(#[from] TangencyError),
    #[error("need two distinct point indices, got {0} twice")]
    SamePoint(usize),
}

/// Sorted indices of the points that win some realization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonzeroResult {
    pub indices: Vec<usize>,
}

impl NonzeroResult {
    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Smallest maximum distance over the set and one index attaining it.
pub fn max_dist_envelope(q: Point2, set: &UncertainSet) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for (i, p) in set.points().iter().enumerate() {
        let v = point_max_dist(q, p);
        if v < best {
            best = v;
            arg = i;
        }
    }
    (best, arg)
}

/// All indices whose minimum distance strictly beats every rival's maximum
/// distance. Computed against the two smallest maxima so the scan stays
/// O(n); never empty.
pub fn nn_nonzero(q: Point2, set: &UncertainSet) -> NonzeroResult {
    // min1 is the smallest rival bound for everyone except its own holder,
    // who competes against min2 instead.
    let mut min1 = f64::INFINITY;
    let mut arg1 = usize::MAX;
    let mut min2 = f64::INFINITY;
    for (i, p) in set.points().iter().enumerate() {
        let v = point_max_dist(q, p);
        if v < min1 {
            min2 = min1;
            min1 = v;
            arg1 = i;
        } else if v < min2 {
            min2 = v;
        }
    }
    let indices = set
        .points()
        .iter()
        .enumerate()
        .filter(|&(i, p)| {
            let rival = if i == arg1 { min2 } else { min1 };
            point_min_dist(q, p) < rival
        })
        .map(|(i, _)| i)
        .collect();
    NonzeroResult { indices }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    /// Two lower envelopes meet an upper one: `delta_i = delta_j = Delta_k`.
    Crossing,
    /// One lower envelope meets two upper ones: `delta_i = Delta_j = Delta_k`.
    Breakpoint,
}

/// A validated isolated feature of the qualification diagram.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DiagramVertex {
    pub location: Point2,
    /// Common clearance value; equals the max-distance envelope there.
    pub value: f64,
    pub kind: VertexKind,
    /// Defining indices: (i, j, k) with i < j for crossings (k the enclosed
    /// disk) and j < k for breakpoints (i the touched-from-outside disk).
    pub triple: (usize, usize, usize),
    /// Largest constraint violation reported by the solver.
    pub residual: f64,
}

/// Every candidate vertex and breakpoint of the diagram for a disk set,
/// validated against the envelope and deduplicated by location. The length
/// of the returned sequence is the diagram's feature count.
///
/// All index triples are solved, so runtime is Theta(n^4) with the O(n)
/// validity scan; intended for instance sizes where that is cheap.
pub fn enumerate_diagram_features(
    set: &UncertainSet,
) -> Result<Vec<DiagramVertex>, NonzeroError> {
    if set.variant() != Variant::Disk {
        return Err(NonzeroError::VariantMismatch("disk"));
    }
    let disks = set.disks().expect("variant checked");
    let n = disks.len();
    let tol = DEFAULT_TOLERANCE;

    let mut accepted: Vec<DiagramVertex> = Vec::new();
    let push_valid = |kind: VertexKind,
                          triple: (usize, usize, usize),
                          sols: Vec<crate::geom::tangency::TangencySolution>,
                          accepted: &mut Vec<DiagramVertex>| {
        for s in sols {
            // on-envelope check: no disk may see the witness strictly closer
            let env = disks
                .iter()
                .map(|d| dist(s.point, d.center) + d.radius)
                .fold(f64::INFINITY, f64::min);
            if env >= s.value - tol * (1.0 + s.value.abs()) {
                accepted.push(DiagramVertex {
                    location: s.point,
                    value: s.value,
                    kind,
                    triple,
                    residual: s.residual,
                });
            }
        }
    };

    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let sols = solve_tangency(
                    TangencyConstraint::min_dist(i),
                    TangencyConstraint::min_dist(j),
                    TangencyConstraint::max_dist(k),
                    &disks,
                )?;
                push_valid(VertexKind::Crossing, (i, j, k), sols, &mut accepted);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in (j + 1)..n {
                if k == i {
                    continue;
                }
                let sols = solve_tangency(
                    TangencyConstraint::min_dist(i),
                    TangencyConstraint::max_dist(j),
                    TangencyConstraint::max_dist(k),
                    &disks,
                )?;
                push_valid(VertexKind::Breakpoint, (i, j, k), sols, &mut accepted);
            }
        }
    }

    accepted.sort_by(|a, b| {
        a.triple
            .cmp(&b.triple)
            .then(a.kind.cmp(&b.kind))
            .then(a.location.x.total_cmp(&b.location.x))
            .then(a.location.y.total_cmp(&b.location.y))
    });
    let mut kept: Vec<DiagramVertex> = Vec::new();
    for v in accepted {
        let scale = 1.0 + v.location.x.abs().max(v.location.y.abs());
        let dup = kept.iter().any(|u| {
            u.kind == v.kind && dist(u.location, v.location) <= 1e-7 * scale
        });
        if !dup {
            kept.push(v);
        }
    }
    Ok(kept)
}

/// The convex region where point `excluded` can never win because point
/// `excluder` is always at least as close, as an intersection of bisector
/// halfplanes clipped to a large box.
#[derive(Debug, Clone)]
pub struct ExclusionPolygon {
    pub excluded: usize,
    pub excluder: usize,
    pub halfplanes: Vec<Halfplane>,
    /// Boundary corners that are genuine region vertices (box corners from
    /// the clipping stage are dropped), each the intersection of its two
    /// tightest bisector lines.
    pub vertices: Vec<Point2>,
    /// The region leaves the clip box (or is the whole plane).
    pub unbounded: bool,
    /// The clipped polygon is empty. The region itself may still be a
    /// nonempty sliver beyond the box; membership tests use the halfplanes
    /// directly and do not depend on the box.
    pub empty: bool,
}

impl ExclusionPolygon {
    /// Closed membership: true also on the boundary.
    pub fn contains(&self, q: Point2) -> bool {
        self.halfplanes.iter().all(|h| h.contains(q))
    }

    /// Signed distance to the region: positive inside, negative outside,
    /// near zero on the boundary. Infinite when no halfplane constrains.
    pub fn margin(&self, q: Point2) -> f64 {
        self.halfplanes.iter().map(|h| h.margin(q)).fold(f64::INFINITY, f64::min)
    }
}

fn discrete_locations(set: &UncertainSet, i: usize) -> &[Point2] {
    match set.point(i) {
        UncertainPoint::Discrete(d) => d.locations(),
        UncertainPoint::Disk(_) => unreachable!("caller checks the variant"),
    }
}

/// Builds `{x : Delta_j(x) <= delta_i(x)}` for a discrete set: one bisector
/// halfplane per location pair, keeping the side at least as close to the
/// excluder's location.
pub fn exclusion_polygon(
    excluded: usize,
    excluder: usize,
    set: &UncertainSet,
) -> Result<ExclusionPolygon, NonzeroError> {
    if set.variant() != Variant::Discrete {
        return Err(NonzeroError::VariantMismatch("discrete"));
    }
    if excluded == excluder {
        return Err(NonzeroError::SamePoint(excluded));
    }
    let ours = discrete_locations(set, excluder);
    let theirs = discrete_locations(set, excluded);

    // lifted distance comparison: d(x,a) <= d(x,b) is linear in x
    let mut halfplanes: Vec<Halfplane> = Vec::with_capacity(ours.len() * theirs.len());
    for &a in ours {
        for &b in theirs {
            if a == b {
                continue; // equality holds everywhere
            }
            let normal = Point2::new(2.0 * (a.x - b.x), 2.0 * (a.y - b.y));
            let offset = a.norm_sq() - b.norm_sq();
            halfplanes.push(Halfplane::new(normal, offset));
        }
    }
    halfplanes.sort_by(|p, q| {
        p.normal
            .x
            .total_cmp(&q.normal.x)
            .then(p.normal.y.total_cmp(&q.normal.y))
            .then(p.offset.total_cmp(&q.offset))
    });
    halfplanes.dedup_by(|p, q| p.normal == q.normal && p.offset == q.offset);

    let (lo, hi) = set.bounding_box();
    let center = Point2::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
    let half_side = 0.5 * 1e6 * set.diameter().max(1e-9);
    let mut poly = box_polygon(center, half_side);
    for h in &halfplanes {
        poly = clip(&poly, h);
        if poly.is_empty() {
            break;
        }
    }

    let on_box = |p: Point2| {
        let tol = 1e-6 * half_side;
        (p.x - (center.x - half_side)).abs() <= tol
            || (p.x - (center.x + half_side)).abs() <= tol
            || (p.y - (center.y - half_side)).abs() <= tol
            || (p.y - (center.y + half_side)).abs() <= tol
    };
    let empty = poly.is_empty();
    let unbounded = poly.iter().any(|&p| on_box(p));

    // region corners, re-derived from their two tightest bisector lines so
    // clipping roundoff does not accumulate
    let mut vertices = Vec::new();
    for &p in poly.iter().filter(|&&p| !on_box(p)) {
        let mut hs: Vec<(f64, &Halfplane)> =
            halfplanes.iter().map(|h| (h.margin(p).abs(), h)).collect();
        hs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let refined = match hs.as_slice() {
            [(_, h1), (_, h2), ..] => line_intersection(h1, h2).unwrap_or(p),
            _ => p,
        };
        vertices.push(refined);
    }

    Ok(ExclusionPolygon { excluded, excluder, halfplanes, vertices, unbounded, empty })
}

/// All ordered pairs' exclusion polygons, indexable by (excluded, excluder).
pub struct ExclusionTable {
    n: usize,
    polys: Vec<ExclusionPolygon>,
}

impl ExclusionTable {
    pub fn build(set: &UncertainSet) -> Result<Self, NonzeroError> {
        let n = set.len();
        let mut polys = Vec::with_capacity(n * n.saturating_sub(1));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    polys.push(exclusion_polygon(i, j, set)?);
                }
            }
        }
        Ok(ExclusionTable { n, polys })
    }

    pub fn get(&self, excluded: usize, excluder: usize) -> &ExclusionPolygon {
        assert_ne!(excluded, excluder, "no self-exclusion polygon");
        let col = if excluder < excluded { excluder } else { excluder - 1 };
        &self.polys[excluded * (self.n - 1) + col]
    }
}

/// Qualification test driven by the precomputed polygons: `i` is out iff
/// the query lies in some closed exclusion region of `i`.
///
/// On region boundaries this closed test and the strict inequality of
/// [`nn_nonzero`] legitimately disagree; [`ExclusionPolygon::margin`] near
/// zero identifies such queries.
pub fn nn_nonzero_discrete_via_polygons(
    q: Point2,
    set: &UncertainSet,
    table: &ExclusionTable,
) -> NonzeroResult {
    let n = set.len();
    let indices = (0..n)
        .filter(|&i| (0..n).all(|j| j == i || !table.get(i, j).contains(q)))
        .collect();
    NonzeroResult { indices }
}
