//! Engines that quantify, per uncertain point, the probability of being the
//! query's nearest neighbor.
//!
//! Four engines share one sparse result type:
//!
//! * [`exact::exact_discrete`]: exact weighted sweep for the discrete variant,
//! * [`quadrature::continuous_quadrature`]: adaptive integration for disks,
//! * [`mc::mc_query`]: frequency estimates over random instantiations,
//! * [`spiral::spiral_query`]: a truncated sweep over the nearest few
//!   candidate locations with a one-sided error guarantee.

pub mod exact;
pub mod mc;
pub mod quadrature;
pub mod spiral;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactDiscrete,
    Quadrature,
    MonteCarlo,
    Spiral,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ExactDiscrete => "exact",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "mc",
            Method::Spiral => "spiral",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum QuantifyError {
    #[error("method requires the {0} variant")]
    VariantMismatch(&'static str),
    #[error("quadrature failed to converge within the evaluation budget")]
    QuadratureNonconvergence,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// Sparse probability vector: entries sorted by point index, omitted
/// indices are exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantificationVector {
    entries: Vec<(usize, f64)>,
    pub method: Method,
    /// Method-specific error guarantee, when one exists.
    pub error_bound: Option<f64>,
}

impl QuantificationVector {
    /// Collects positive entries of a dense vector.
    pub(crate) fn from_dense(pi: &[f64], method: Method, error_bound: Option<f64>) -> Self {
        let entries = pi
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v > 0.0)
            .map(|(i, &v)| (i, v.min(1.0)))
            .collect();
        QuantificationVector { entries, method, error_bound }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|&(i, _)| i).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_lookup_and_total() {
        let v = QuantificationVector::from_dense(
            &[0.25, 0.0, 0.75],
            Method::ExactDiscrete,
            None,
        );
        assert_eq!(v.get(0), 0.25);
        assert_eq!(v.get(1), 0.0);
        assert_eq!(v.get(2), 0.75);
        assert_eq!(v.get(9), 0.0);
        assert_eq!(v.support(), vec![0, 2]);
        assert!((v.total() - 1.0).abs() < 1e-15);
    }
}
