//! Brute-force references the engines are tested against. Deliberately
//! naive: full joint enumeration, a literal double loop, and a straight-line
//! sampler, each written without the engines' shortcuts.

use crate::geom::{dist, Point2};
use crate::model::{instantiate, point_max_dist, point_min_dist, UncertainPoint, UncertainSet, Variant};
use crate::nonzero::NonzeroResult;
use crate::tie::TieRule;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Joint instantiations the enumeration oracle is willing to walk.
pub const ENUMERATION_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{count} joint instantiations exceed the oracle budget {budget}")]
    TooLarge { count: u128, budget: u64 },
    #[error("oracle requires the {0} variant")]
    VariantMismatch(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationResult {
    /// Dense winning probability per point.
    pub probabilities: Vec<f64>,
    /// Product of the location counts.
    pub instantiation_count: u64,
}

/// Walks every joint instantiation of a discrete set and accumulates each
/// winner's joint probability, under the default total order.
pub fn enumerate_exact(q: Point2, set: &UncertainSet) -> Result<EnumerationResult, OracleError> {
    enumerate_exact_with(q, set, TieRule::TotalOrder)
}

pub fn enumerate_exact_with(
    q: Point2,
    set: &UncertainSet,
    tie: TieRule,
) -> Result<EnumerationResult, OracleError> {
    if set.variant() != Variant::Discrete {
        return Err(OracleError::VariantMismatch("discrete"));
    }
    let n = set.len();
    let mut count: u128 = 1;
    for p in set.points() {
        count *= p.location_count() as u128;
    }
    if count > ENUMERATION_BUDGET as u128 {
        return Err(OracleError::TooLarge { count, budget: ENUMERATION_BUDGET });
    }

    // per-point distance and weight tables
    let mut dists: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut weights: Vec<&[f64]> = Vec::with_capacity(n);
    for p in set.points() {
        match p {
            UncertainPoint::Discrete(d) => {
                dists.push(d.locations().iter().map(|&l| dist(q, l)).collect());
                weights.push(d.weights());
            }
            UncertainPoint::Disk(_) => unreachable!("variant checked"),
        }
    }

    let mut pi = vec![0.0f64; n];
    let mut digit = vec![0usize; n];
    loop {
        let mut weight = 1.0;
        for i in 0..n {
            weight *= weights[i][digit[i]];
        }
        match tie {
            TieRule::TotalOrder => {
                // lowest index wins equal distances
                let mut best = 0usize;
                for i in 1..n {
                    if dists[i][digit[i]] < dists[best][digit[best]] {
                        best = i;
                    }
                }
                pi[best] += weight;
            }
            TieRule::ClosedCdf => {
                // a winner must be strictly nearest; ties waste the round
                let min = (0..n).map(|i| dists[i][digit[i]]).fold(f64::INFINITY, f64::min);
                let attained: Vec<usize> =
                    (0..n).filter(|&i| dists[i][digit[i]] == min).collect();
                if let [only] = attained.as_slice() {
                    pi[*only] += weight;
                }
            }
        }

        // mixed-radix increment
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(EnumerationResult {
                    probabilities: pi,
                    instantiation_count: count as u64,
                });
            }
            digit[pos] += 1;
            if digit[pos] < dists[pos].len() {
                break;
            }
            digit[pos] = 0;
            pos += 1;
        }
    }
}

/// The qualification test written as the definition reads: point i stays
/// iff its minimum distance beats every other point's maximum distance.
pub fn nn_nonzero_definition(q: Point2, set: &UncertainSet) -> NonzeroResult {
    let n = set.len();
    let indices = (0..n)
        .filter(|&i| {
            let di = point_min_dist(q, set.point(i));
            (0..n).all(|j| j == i || di < point_max_dist(q, set.point(j)))
        })
        .collect();
    NonzeroResult { indices }
}

/// Plain frequency estimate over `s` fresh joint instantiations; the
/// statistical reference for the continuous engine.
pub fn mc_reference(q: Point2, set: &UncertainSet, s: usize, seed: u64) -> Vec<f64> {
    let n = set.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = vec![0u64; n];
    for _ in 0..s {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, p) in set.points().iter().enumerate() {
            let d = dist(q, instantiate(p, &mut rng));
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        wins[best] += 1;
    }
    wins.iter().map(|&c| c as f64 / s as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiscreteUncertainPoint;
    use crate::nonzero::nn_nonzero;
    use crate::quantify::exact::exact_discrete_with;
    use crate::quantify::mc::{mc_build, mc_query};
    use rand::Rng;

    fn pt(locs: &[(f64, f64)], ws: &[f64]) -> UncertainPoint {
        UncertainPoint::discrete(
            locs.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
            ws.to_vec(),
        )
        .unwrap()
    }

    fn random_discrete(rng: &mut ChaCha8Rng, n: usize, k_hi: usize) -> UncertainSet {
        let points = (0..n)
            .map(|_| {
                let k = rng.gen_range(1..=k_hi);
                let locs = (0..k)
                    .map(|_| Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
                    .collect();
                UncertainPoint::Discrete(DiscreteUncertainPoint::uniform(locs).unwrap())
            })
            .collect();
        UncertainSet::new(points).unwrap()
    }

    fn random_disks(rng: &mut ChaCha8Rng, n: usize) -> UncertainSet {
        let points = (0..n)
            .map(|_| {
                UncertainPoint::disk(
                    Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
                    rng.gen_range(0.2..2.0),
                )
                .unwrap()
            })
            .collect();
        UncertainSet::new(points).unwrap()
    }

    #[test]
    fn two_instantiation_hand_check() {
        let set = UncertainSet::new(vec![
            pt(&[(1.0, 0.0), (4.0, 0.0)], &[0.5, 0.5]),
            pt(&[(2.0, 0.0)], &[1.0]),
        ])
        .unwrap();
        let r = enumerate_exact(Point2::new(0.0, 0.0), &set).unwrap();
        assert_eq!(r.probabilities, vec![0.5, 0.5]);
        assert_eq!(r.instantiation_count, 2);
    }

    #[test]
    fn singleton_and_certain_chain() {
        let single = UncertainSet::new(vec![pt(&[(3.0, 1.0)], &[1.0])]).unwrap();
        let r = enumerate_exact(Point2::new(0.0, 0.0), &single).unwrap();
        assert_eq!(r.probabilities, vec![1.0]);
        assert_eq!(r.instantiation_count, 1);

        let chain = UncertainSet::new(vec![
            pt(&[(2.0, 0.0)], &[1.0]),
            pt(&[(1.0, 0.0)], &[1.0]),
            pt(&[(3.0, 0.0)], &[1.0]),
        ])
        .unwrap();
        let r = enumerate_exact(Point2::new(0.0, 0.0), &chain).unwrap();
        assert_eq!(r.probabilities, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn budget_guard_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let big: Vec<Point2> = (0..100)
            .map(|_| Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let points: Vec<UncertainPoint> = (0..4)
            .map(|_| UncertainPoint::Discrete(DiscreteUncertainPoint::uniform(big.clone()).unwrap()))
            .collect();
        let set = UncertainSet::new(points).unwrap();
        match enumerate_exact(Point2::new(0.0, 0.0), &set) {
            Err(OracleError::TooLarge { count, budget }) => {
                assert_eq!(count, 100_000_000);
                assert_eq!(budget, ENUMERATION_BUDGET);
            }
            other => panic!("expected TooLarge, got {other:?}"),
        }
    }

    #[test]
    fn tie_conventions_differ_on_equidistant_pair() {
        let set = UncertainSet::new(vec![
            pt(&[(5.0, 0.0)], &[1.0]),
            pt(&[(0.0, 5.0)], &[1.0]),
        ])
        .unwrap();
        let q = Point2::new(0.0, 0.0);
        let total = enumerate_exact_with(q, &set, TieRule::TotalOrder).unwrap();
        assert_eq!(total.probabilities, vec![1.0, 0.0]);
        let closed = enumerate_exact_with(q, &set, TieRule::ClosedCdf).unwrap();
        assert_eq!(closed.probabilities, vec![0.0, 0.0]);
    }

    #[test]
    fn sweep_engine_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trial in 0..30 {
            let n = rng.gen_range(1..=5);
            let set = random_discrete(&mut rng, n, 3);
            let q = Point2::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
            for tie in [TieRule::TotalOrder, TieRule::ClosedCdf] {
                let oracle = enumerate_exact_with(q, &set, tie).unwrap();
                let engine = exact_discrete_with(q, &set, tie).unwrap();
                for i in 0..n {
                    assert!(
                        (oracle.probabilities[i] - engine.get(i)).abs() <= 1e-9,
                        "trial {trial} {tie:?} index {i}: {} vs {}",
                        oracle.probabilities[i],
                        engine.get(i)
                    );
                }
            }
        }
    }

    #[test]
    fn definition_matches_fast_path_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..300 {
            let n = rng.gen_range(1..=6);
            let set = if trial % 2 == 0 {
                random_discrete(&mut rng, n, 3)
            } else {
                random_disks(&mut rng, n)
            };
            let q = Point2::new(rng.gen_range(-9.0..9.0), rng.gen_range(-9.0..9.0));
            assert_eq!(
                nn_nonzero_definition(q, &set).indices,
                nn_nonzero(q, &set).indices,
                "trial {trial}"
            );
        }
    }

    #[test]
    fn nested_disks_share_the_query() {
        let set = UncertainSet::new(vec![
            UncertainPoint::disk(Point2::new(0.0, 0.0), 1.0).unwrap(),
            UncertainPoint::disk(Point2::new(0.0, 0.0), 3.0).unwrap(),
        ])
        .unwrap();
        let r = nn_nonzero_definition(Point2::new(0.0, 0.0), &set);
        // delta = 0 on both sides, Delta = 1 and 3: both strict
        assert_eq!(r.indices, vec![0, 1]);
    }

    #[test]
    fn reference_sampler_tracks_enumeration() {
        let set = UncertainSet::new(vec![
            pt(&[(1.0, 0.0), (3.0, 0.0)], &[0.5, 0.5]),
            pt(&[(2.0, 0.0), (4.0, 0.0)], &[0.5, 0.5]),
        ])
        .unwrap();
        let q = Point2::new(0.0, 0.0);
        let s = 20_000;
        let freq = mc_reference(q, &set, s, 77);
        let truth = enumerate_exact(q, &set).unwrap().probabilities;
        for i in 0..2 {
            let sigma = (truth[i] * (1.0 - truth[i]) / s as f64).sqrt();
            assert!(
                (freq[i] - truth[i]).abs() <= 3.0 * sigma,
                "index {i}: {} vs {}",
                freq[i],
                truth[i]
            );
        }
    }

    #[test]
    fn reference_sampler_agrees_with_indexed_sampler() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let set = random_discrete(&mut rng, 4, 3);
        let q = Point2::new(0.5, -0.5);
        let s = 20_000;
        let a = mc_reference(q, &set, s, 100);
        let b = mc_query(q, &mc_build(&set, s, 200).unwrap());
        for (i, &ai) in a.iter().enumerate() {
            let p = ai.max(b.get(i)).min(1.0);
            let sigma = (p * (1.0 - p) / s as f64).sqrt() * 2.0f64.sqrt();
            assert!(
                (ai - b.get(i)).abs() <= 3.0 * sigma + 1e-12,
                "index {i}: {ai} vs {}",
                b.get(i)
            );
        }
    }

    #[test]
    fn rejects_disk_variant() {
        let set = UncertainSet::new(vec![UncertainPoint::disk(Point2::new(0.0, 0.0), 1.0)
            .unwrap()])
        .unwrap();
        assert_eq!(
            enumerate_exact(Point2::new(0.0, 0.0), &set).unwrap_err(),
            OracleError::VariantMismatch("discrete")
        );
    }
}
