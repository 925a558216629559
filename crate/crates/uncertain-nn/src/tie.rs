//! Tie handling for distance comparisons.
//!
//! Exact probability computations compare candidate locations by distance to
//! the query. Equal distances must be resolved the same way everywhere or
//! probability mass is double-counted or lost. The default resolves ties by
//! the lexicographic key `(distance, owner index, location index)`, which
//! makes "nearest" a total order: every joint instantiation has exactly one
//! winner and the per-point probabilities sum to one even on degenerate
//! inputs.
//!
//! The alternative rule scores a candidate location against the closed
//! cumulative weight of every other point at its distance, counting
//! equal-distance locations as blockers. On tie-free inputs the two rules
//! agree; with ties the closed rule awards the mass to nobody, so the sum
//! can drop below one. It exists so the engines and the brute-force oracles
//! can be cross-checked under both conventions.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// Lexicographic `(distance, owner, location)` total order.
    #[default]
    TotalOrder,
    /// Closed-cdf scoring: an equal-distance rival blocks the candidate.
    ClosedCdf,
}
