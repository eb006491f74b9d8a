//! Exact rational certificates for the rate constants and numeric checks of
//! the continuous envelope.

mod chain;
mod exact;
mod numeric;
mod series;
mod suite;

pub use chain::{CertificateReport, Chain, Relation, Status, StepRecord, Witness};
pub use exact::{
    a_envelope_max, verify_a_envelope, verify_bsup, verify_f300, verify_f300_alpha751,
    verify_f300_with_target, verify_k_requirement, verify_lower_bound_chain,
    verify_one_point_alpha34, verify_one_point_alpha751, Variant,
};
pub use numeric::{
    b_discrete_vs_envelope, envelope_sweep, find_t1, gamma_lower_eval, gamma_monotone_check,
    ode_residual, EnvelopeComparison, EnvelopeSweep, GammaMonotoneReport, OdeResidual, T1Search,
};
pub use series::{
    l_series_bounds, l_series_lower, l_series_upper, one_point_check, theta_ell, SeriesBound,
    ONE_POINT_ORDERS,
};
pub use suite::{certificate_names, run_suite, SuiteOptions, SuiteReport};
