//! Biased linear forms, the exact Levy concentration oracle, and the
//! anti-concentration bound checkers.

mod atoms;
mod bounds;
mod mixture;
mod tail;

pub use atoms::{levy_q, linear_form_atoms, AtomDistribution, LinearFormSpec, ORACLE_MAX_DIM};
pub use bounds::{
    binomial, group_bound_check, group_bound_r, levy_scaling_check, littlewood_check, qualifying_scales, r_from_count,
    sperner_bound, sperner_bound_f64, GroupBoundReport, LittlewoodReport, ScalingCheck, SpernerComparison,
    SCALING_TOLERANCE,
};
pub use mixture::{mixture_atoms, mixture_levy_bound, MIXTURE_MAX_BIASED};
pub use tail::{hoeffding_bound, hoeffding_check, HoeffdingReport};
