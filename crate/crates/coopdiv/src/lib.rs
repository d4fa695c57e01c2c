//! Link-level toolkit for half-duplex cooperative fading channels.
//!
//! The crate covers three cooperative scenarios over quasi-static Rayleigh
//! fading — relay (uplink helpers), cooperative broadcast (downlink), and
//! cooperative multiple-access — and provides:
//!
//! * per-realization mutual information and outage indicators for the
//!   direct, genie-aided MISO, LTW-AF, NAF (single and multi relay),
//!   DDF (single and multi relay), CB-DDF, and CMA-NAF protocols
//!   ([`protocols`]),
//! * an exact log-det mutual-information engine for linear Gaussian
//!   channels with colored noise, including conditional subset MI for
//!   multiple-access models ([`mi`], [`linalg`]),
//! * outage-probability estimation by Monte Carlo with deterministic
//!   counter-based per-trial random substreams ([`montecarlo`]),
//! * closed-form diversity-multiplexing tradeoff curves and a grid-search
//!   outage-region exponent optimizer that verifies them numerically
//!   ([`dmt`], [`regions`]).
//!
//! All mutual information is in bits (base-2 logarithms), matching rates in
//! bits per channel use (BPCU). The destination noise variance is normalized
//! to one, so the symbol energy equals the linear SNR `rho`; per-link SNR
//! offsets and noiseless-link flags live in [`fading::LinkSnrProfile`].

pub mod dmt;
pub mod fading;
pub mod linalg;
pub mod mi;
pub mod montecarlo;
pub mod protocols;
pub mod regions;

pub use num_complex::Complex64;

pub use dmt::{dmt_closed_form, emit_curve, TradeoffPoint};
pub use fading::{
    exponential_order, sample_realization, snr_db, snr_linear, trial_rng, ChannelRealization,
    LinkId, LinkSnrProfile, Role, Topology,
};
pub use linalg::{logdet_ipm, CMatrix, HermitianMatrix};
pub use mi::{subset_mi, LinearChannelModel};
pub use montecarlo::{estimate_outage, estimate_exponent, sweep, ExponentFit, OutageEstimate, SweepResult};
pub use protocols::{outage_indicator, Protocol, ProtocolConfig, RelayGainPolicy};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian within tolerance (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite (pivot {pivot:.3e} below tolerance {tol:.3e})")]
    NotPositiveDefinite { pivot: f64, tol: f64 },
    #[error("subset of sources must be nonempty")]
    EmptySubset,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("relay energy constraint violated on row {row}: used {used:.6e} > budget {budget:.6e}")]
    EnergyConstraint { row: usize, used: f64, budget: f64 },
    #[error("fixed-point calibration did not converge after {0} iterations")]
    NonConvergence(usize),
    #[error("protocol {0} has no finite-SNR outage model")]
    UnsupportedProtocol(String),
    #[error("fewer than two sweep points qualify for exponent regression")]
    InsufficientPoints,
}

pub type Result<T> = std::result::Result<T, Error>;
