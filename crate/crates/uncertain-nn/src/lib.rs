//! Nearest-neighbor searching when every data point's location is uncertain.
//!
//! A data set holds `n` uncertain points in the plane. Each point is either a
//! uniform distribution over a disk or a finite weighted set of candidate
//! locations. For a query `q` this crate answers two kinds of questions:
//!
//! * which points have nonzero probability of being the nearest neighbor of
//!   `q` (and how that set decomposes the plane), and
//! * with what probability each point is the nearest neighbor, computed
//!   exactly, by quadrature, by Monte Carlo instantiation, or by a truncated
//!   expansion that inspects only the nearest few candidate locations.
//!
//! Modules are layered bottom-up: [`geom`] has the planar primitives and the
//! equal-clearance tangency solver, [`model`] the uncertain-point types,
//! [`nonzero`] the candidate-set and diagram-feature machinery, [`quantify`]
//! the probability engines, [`oracles`] slow reference implementations used
//! by the test suite, [`instances`] generators for structured and random data
//! sets, and [`io`] the file formats spoken by the `unn` binary.

pub mod geom;
pub mod instances;
pub mod io;
pub mod knn;
pub mod model;
pub mod nonzero;
pub mod oracles;
pub mod quantify;
pub mod tie;
