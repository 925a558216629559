//! Approximate nearest-neighbor probabilities from a truncated sweep.
//!
//! Only the `m` locations nearest the query enter the exact sweep. Any
//! location outside that prefix wins only if all `m` nearer ones lose, an
//! event whose probability drops geometrically every `k_max` locations, so
//!
//! ```text
//! m = ceil(rho * k_max * ln(1 / eps)) + k_max - 1
//! ```
//!
//! (`rho` = largest/smallest location weight, `k_max` = most locations on
//! one point) guarantees `hat_pi_i <= pi_i <= hat_pi_i + eps` for every i.
//! The underestimate is deterministic: the truncated sweep performs a prefix
//! of the exact sweep's float operations, all of whose terms are
//! nonnegative. With `m` covering the whole set the result is bit-identical
//! to the exact engine's.

use crate::geom::Point2;
use crate::knn::{GridIndex, IndexedPoint};
use crate::model::{UncertainPoint, UncertainSet, Variant};
use crate::quantify::exact::{sweep, Event};
use crate::quantify::{Method, QuantificationVector, QuantifyError};
use crate::tie::TieRule;

/// Ratio of the largest to the smallest location weight of a discrete set.
pub fn spread(set: &UncertainSet) -> Result<f64, QuantifyError> {
    if set.variant() != Variant::Discrete {
        return Err(QuantifyError::VariantMismatch("discrete"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for p in set.points() {
        if let UncertainPoint::Discrete(d) = p {
            for &w in d.weights() {
                lo = lo.min(w);
                hi = hi.max(w);
            }
        }
    }
    Ok(hi / lo)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralParams {
    pub rho: f64,
    pub k_max: usize,
    pub epsilon: f64,
    /// Locations inspected per query, clamped to the set size.
    pub m: usize,
}

impl SpiralParams {
    pub fn new(
        rho: f64,
        k_max: usize,
        epsilon: f64,
        total_locations: usize,
    ) -> Result<Self, QuantifyError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(QuantifyError::BadParameter(format!(
                "epsilon {epsilon} outside (0, 1)"
            )));
        }
        if !(rho >= 1.0 && rho.is_finite()) {
            return Err(QuantifyError::BadParameter(format!("weight spread {rho} below 1")));
        }
        if k_max == 0 || total_locations == 0 {
            return Err(QuantifyError::BadParameter("empty set".into()));
        }
        let lead = (rho * k_max as f64 * (1.0 / epsilon).ln()).ceil() as usize;
        let m = lead.saturating_add(k_max - 1).clamp(1, total_locations);
        Ok(SpiralParams { rho, k_max, epsilon, m })
    }
}

/// Reusable query structure: a grid over all locations plus the set
/// constants the truncation bound needs.
pub struct SpiralEngine<'a> {
    set: &'a UncertainSet,
    grid: GridIndex,
    counts: Vec<usize>,
    rho: f64,
    k_max: usize,
}

impl<'a> SpiralEngine<'a> {
    pub fn new(set: &'a UncertainSet) -> Result<Self, QuantifyError> {
        let rho = spread(set)?;
        let mut pts = Vec::with_capacity(set.total_locations());
        for (i, p) in set.points().iter().enumerate() {
            if let UncertainPoint::Discrete(d) = p {
                for (l, &loc) in d.locations().iter().enumerate() {
                    pts.push(IndexedPoint { pos: loc, owner: i as u32, loc: l as u32 });
                }
            }
        }
        let counts = set.points().iter().map(|p| p.location_count()).collect();
        Ok(SpiralEngine {
            set,
            grid: GridIndex::build(pts),
            counts,
            rho,
            k_max: set.max_locations_per_point(),
        })
    }

    pub fn params(&self, epsilon: f64) -> Result<SpiralParams, QuantifyError> {
        SpiralParams::new(self.rho, self.k_max, epsilon, self.grid.len())
    }

    pub fn query(&self, q: Point2, epsilon: f64) -> Result<QuantificationVector, QuantifyError> {
        let params = self.params(epsilon)?;
        let events: Vec<Event> = self
            .grid
            .k_nearest(q, params.m)
            .into_iter()
            .map(|id| {
                let p = self.grid.point(id as usize);
                let w = match self.set.point(p.owner as usize) {
                    UncertainPoint::Discrete(d) => d.weights()[p.loc as usize],
                    UncertainPoint::Disk(_) => unreachable!("engine is discrete-only"),
                };
                Event { d: crate::geom::dist(q, p.pos), owner: p.owner, loc: p.loc, w }
            })
            .collect();
        let pi = sweep(&events, &self.counts, TieRule::TotalOrder);
        Ok(QuantificationVector::from_dense(&pi, Method::Spiral, Some(epsilon)))
    }
}

/// One-shot convenience wrapper around [`SpiralEngine`].
pub fn spiral_query(
    q: Point2,
    set: &UncertainSet,
    epsilon: f64,
) -> Result<QuantificationVector, QuantifyError> {
    SpiralEngine::new(set)?.query(q, epsilon)
}
