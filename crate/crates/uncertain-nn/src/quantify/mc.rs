//! Monte Carlo estimation of nearest-neighbor probabilities.
//!
//! The index fixes `s` joint instantiations of the whole set up front; a
//! query then counts, per point, the fraction of rounds it wins. With
//! `s = mc_sample_size(eps, delta, n, q_count)` every estimate over
//! `q_count` queries is within `eps` of the truth with probability at least
//! `1 - delta` (Hoeffding plus a union bound over points and queries).

use crate::geom::{dist, Point2};
use crate::model::{instantiate, UncertainSet};
use crate::quantify::{Method, QuantificationVector, QuantifyError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Rounds needed for additive error `epsilon` on every point and every one
/// of `q_count` queries, jointly with probability `1 - delta`.
pub fn mc_sample_size(
    epsilon: f64,
    delta: f64,
    n: usize,
    q_count: u64,
) -> Result<usize, QuantifyError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(QuantifyError::BadParameter(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(QuantifyError::BadParameter(format!("delta {delta} outside (0, 1)")));
    }
    if n == 0 || q_count == 0 {
        return Err(QuantifyError::BadParameter("need n >= 1 and q_count >= 1".into()));
    }
    // ln(2 n q_count / delta), in log space so huge budgets cannot overflow
    let log_union = (2.0 * n as f64 / delta).ln() + (q_count as f64).ln();
    Ok((log_union / (2.0 * epsilon * epsilon)).ceil() as usize)
}

/// Default query budget to size the union bound against: the fourth power
/// of the stored location count, saturating.
pub fn default_query_budget(total_locations: usize) -> u64 {
    (total_locations as u64).checked_pow(4).unwrap_or(u64::MAX)
}

/// `s` pre-drawn joint instantiations of a set.
#[derive(Debug, Clone)]
pub struct McIndex {
    seed: u64,
    /// Round-major: `rounds[t][i]` is point i's location in round t.
    rounds: Vec<Vec<Point2>>,
    epsilon: Option<f64>,
}

impl McIndex {
    pub fn rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Draws `s` rounds with a seeded generator; equal seeds give equal indexes.
pub fn mc_build(set: &UncertainSet, s: usize, seed: u64) -> Result<McIndex, QuantifyError> {
    if s == 0 {
        return Err(QuantifyError::BadParameter("need at least one round".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rounds = (0..s)
        .map(|_| set.points().iter().map(|p| instantiate(p, &mut rng)).collect())
        .collect();
    Ok(McIndex { seed, rounds, epsilon: None })
}

/// [`mc_build`] with `s` chosen from the accuracy target, which the index
/// then reports as its error bound.
pub fn mc_build_with_guarantee(
    set: &UncertainSet,
    epsilon: f64,
    delta: f64,
    q_count: u64,
    seed: u64,
) -> Result<McIndex, QuantifyError> {
    let s = mc_sample_size(epsilon, delta, set.len(), q_count)?;
    let mut index = mc_build(set, s, seed)?;
    index.epsilon = Some(epsilon);
    Ok(index)
}

/// Winning frequency of every point over the pre-drawn rounds. Distance ties
/// within a round go to the lower point index.
pub fn mc_query(q: Point2, index: &McIndex) -> QuantificationVector {
    let n = index.rounds[0].len();
    let mut wins = vec![0u64; n];
    for round in &index.rounds {
        let mut best = 0usize;
        let mut best_d = dist(q, round[0]);
        for (i, &loc) in round.iter().enumerate().skip(1) {
            let d = dist(q, loc);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        wins[best] += 1;
    }
    let s = index.rounds.len() as f64;
    let pi: Vec<f64> = wins.iter().map(|&c| c as f64 / s).collect();
    QuantificationVector::from_dense(&pi, Method::MonteCarlo, index.epsilon)
}
