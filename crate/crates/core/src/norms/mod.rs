//! `p → p` norms of finite sections, limit-operator lower bounds, norm sandwiches and
//! compactness probes.

mod compact;
mod pnorm;
mod sandwich;

pub use compact::{hartman_probe, hartman_profile, HankelProbeRow};
pub use pnorm::{lp_norm, matrix_pnorm, PNormRequest};
pub use sandwich::{
    limit_lower_bound, limit_lower_bound_with, sandwich_check_sequence, sandwich_check_with, SandwichConstants,
    SandwichReport, SANDWICH_TOL,
};
