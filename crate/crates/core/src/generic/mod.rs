//! Protocols that work for any bounded `f`.

pub mod debias;
pub mod ip_sketch;
pub mod sampling;
pub mod signed;
pub mod spectral;
pub mod svd;

pub use debias::{
    debias_statistic, debiasing_protocol, estimate_g_two_round, g_value, DebiasPlan,
};
pub use ip_sketch::{real_ip_sketch, real_ip_sketch_from};
pub use sampling::random_sampling_protocol;
pub use signed::signed_extension;
pub use spectral::{spectral_hybrid_protocol, spectral_protocol, SpectralPlan};
pub use svd::svd_protocol;

/// Failure probability each randomized protocol is calibrated to before
/// median amplification.
pub const BASE_FAILURE: f64 = 0.1;
