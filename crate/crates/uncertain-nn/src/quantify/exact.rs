//! Exact nearest-neighbor probabilities for the discrete variant.
//!
//! All candidate locations are sorted by distance from the query and swept
//! once. While sweeping, `surv[j]` holds the probability that point j
//! realizes a location strictly later in the order, so the location at the
//! cursor wins with probability `w * prod_{j != owner} surv[j]`.
//!
//! Once every location of a point has passed the cursor its survival mass is
//! set to exactly zero rather than left to subtractive roundoff. Because of
//! this the support of the result is exact: an index appears iff it wins
//! some realization.

use crate::geom::{dist, Point2};
use crate::model::{UncertainPoint, UncertainSet, Variant};
use crate::quantify::{Method, QuantificationVector, QuantifyError};
use crate::tie::TieRule;

/// One candidate location as seen from a query.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Event {
    pub d: f64,
    pub owner: u32,
    pub loc: u32,
    pub w: f64,
}

/// All locations of a discrete set, sorted by (distance, owner, location).
pub(crate) fn build_events(q: Point2, set: &UncertainSet) -> Vec<Event> {
    let mut events = Vec::with_capacity(set.total_locations());
    for (i, p) in set.points().iter().enumerate() {
        let d = match p {
            UncertainPoint::Discrete(d) => d,
            UncertainPoint::Disk(_) => unreachable!("caller checks the variant"),
        };
        for (l, (&loc, &w)) in d.locations().iter().zip(d.weights()).enumerate() {
            events.push(Event { d: dist(q, loc), owner: i as u32, loc: l as u32, w });
        }
    }
    events.sort_by(|a, b| {
        a.d.total_cmp(&b.d).then(a.owner.cmp(&b.owner)).then(a.loc.cmp(&b.loc))
    });
    events
}

/// Sweeps sorted events and accumulates each owner's winning probability.
///
/// `counts[j]` is the total location count of point j in the *full* set, so
/// survival mass is zeroed exactly when all of j's locations have passed.
/// Under [`TieRule::TotalOrder`] equal distances are resolved by (owner,
/// location) index and the result sums to one; under [`TieRule::ClosedCdf`]
/// every member of a distance tie sees the others as already realized, which
/// can leave total mass below one.
pub(crate) fn sweep(events: &[Event], counts: &[usize], tie: TieRule) -> Vec<f64> {
    let n = counts.len();
    let mut surv = vec![1.0f64; n];
    let mut passed = vec![0usize; n];
    let mut pi = vec![0.0f64; n];

    let advance = |e: &Event, surv: &mut [f64], passed: &mut [usize]| {
        let i = e.owner as usize;
        passed[i] += 1;
        surv[i] = if passed[i] == counts[i] { 0.0 } else { surv[i] - e.w };
    };
    let credit = |e: &Event, surv: &[f64], pi: &mut [f64]| {
        let i = e.owner as usize;
        let mut prod = e.w;
        for (j, &s) in surv.iter().enumerate() {
            if j != i {
                prod *= s;
            }
        }
        pi[i] += prod;
    };

    match tie {
        TieRule::TotalOrder => {
            for e in events {
                credit(e, &surv, &mut pi);
                advance(e, &mut surv, &mut passed);
            }
        }
        TieRule::ClosedCdf => {
            let mut start = 0;
            while start < events.len() {
                let mut end = start + 1;
                while end < events.len() && events[end].d == events[start].d {
                    end += 1;
                }
                // whole tie group passes the cursor before anyone is credited
                for e in &events[start..end] {
                    advance(e, &mut surv, &mut passed);
                }
                for e in &events[start..end] {
                    credit(e, &surv, &mut pi);
                }
                start = end;
            }
        }
    }
    pi
}

/// Exact probability vector for a discrete set under the default
/// distance-then-index total order.
pub fn exact_discrete(q: Point2, set: &UncertainSet) -> Result<QuantificationVector, QuantifyError> {
    exact_discrete_with(q, set, TieRule::TotalOrder)
}

pub fn exact_discrete_with(
    q: Point2,
    set: &UncertainSet,
    tie: TieRule,
) -> Result<QuantificationVector, QuantifyError> {
    if set.variant() != Variant::Discrete {
        return Err(QuantifyError::VariantMismatch("discrete"));
    }
    let events = build_events(q, set);
    let counts: Vec<usize> = set.points().iter().map(|p| p.location_count()).collect();
    let pi = sweep(&events, &counts, tie);
    Ok(QuantificationVector::from_dense(&pi, Method::ExactDiscrete, None))
}
