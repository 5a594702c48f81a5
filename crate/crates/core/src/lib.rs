//! Edge slicing of the hypercube `Q_n = {-1, 1}^n` by hyperplanes.
//!
//! The crate provides exact crossing predicates, a parallel verifier for
//! slicing configurations, the dyadic decomposition and random bias used to
//! draw evasive edges, exact oracles for the Levy concentration of biased
//! Rademacher sums, and Monte Carlo estimators built on top of them.
//!
//! ```
//! use slicer::cube::{construction, ConstructionKind};
//! use slicer::{verify_slicing, Arithmetic};
//!
//! let c = construction(ConstructionKind::MiddleLayers, 4, Arithmetic::Exact).unwrap();
//! let report = verify_slicing(&c).unwrap();
//! assert_eq!(report.unsliced_count, 0);
//! assert_eq!(report.per_plane_crossings, vec![4, 12, 12, 4]);
//! ```

pub mod anticonc;
pub mod cube;
pub mod decomp;
pub mod error;
pub mod lab;
pub mod par;
pub mod rng;
pub mod sampler;
pub mod scalar;
pub mod verifier;

pub use cube::{Configuration, CrossingMode, Edge, Hyperplane, Vertex};
pub use error::{Error, Result};
pub use rng::RngSpec;
pub use scalar::Arithmetic;
pub use verifier::{verify_slicing, SlicingReport};
