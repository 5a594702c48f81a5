//! Monte Carlo estimators, parameter sweeps and a small-dimension search
//! for slicing configurations.

mod estimate;
mod search;
mod sweep;

pub use estimate::{
    estimate_evasion, estimate_evasion_with, estimate_glue_sum, estimate_linf_tail, evasion_shape, glue_shape,
    random_unit_configuration, EstimateReport, EvasionReport, Z95,
};
pub use search::{local_search_slicing, local_search_slicing_with, SearchOptions, SearchOutcome, SEARCH_MAX_DIM};
pub use sweep::{cell_configuration, diagonal_m, grid, run_cell, sweep, CellKind, SweepCell, SweepRow};
