//! Outage-probability estimation over fading ensembles: SNR sweeps,
//! confidence intervals, and empirical diversity-exponent regression.
//!
//! Trials are embarrassingly parallel: trial `t` of a run draws its
//! realization from the counter-based substream `(seed, t)`, and the outage
//! counts reduce by integer summation, so estimates are bit-identical for
//! any worker count (rayon's pool size, `RAYON_NUM_THREADS`).

use rayon::prelude::*;

use crate::fading::{sample_realization, trial_rng, LinkSnrProfile};
use crate::protocols::{cma_build_model, cma_calibrate_gains, outage_cma, outage_indicator, Protocol, ProtocolConfig};
use crate::{Error, Result};

/// 97.5 percent standard-normal quantile (two-sided 95 percent intervals).
const Z95: f64 = 1.959963984540054;

/// Below this many observed outages the normal approximation is replaced by
/// the Wilson interval.
const WILSON_THRESHOLD: u64 = 30;

/// Below this many observed outages the estimate is flagged low-confidence.
const LOW_CONFIDENCE_THRESHOLD: u64 = 20;

/// Sweeps separate their per-point substreams by this stride, so a run can
/// hold up to 2^40 trials per grid point.
const POINT_STREAM_STRIDE: u64 = 1 << 40;

/// Outage-probability estimate at one operating point.
#[derive(Clone, Debug, PartialEq)]
pub struct OutageEstimate {
    pub trials: u64,
    pub outages: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub snr_db: f64,
    pub rate_bpcu: f64,
    /// Fewer than 20 outages observed: the point estimate is kept but the
    /// interval should not be trusted for curve comparisons.
    pub low_confidence: bool,
}

/// One protocol's estimates over an increasing SNR grid.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub protocol: Protocol,
    pub estimates: Vec<OutageEstimate>,
}

/// Least-squares fit of the finite-SNR diversity exponent.
#[derive(Clone, Debug)]
pub struct ExponentFit {
    /// Slope of `-log10 p_hat` against `log10 rho`.
    pub slope: f64,
    pub intercept: f64,
    /// Number of grid points that met the outage-count floor.
    pub points_used: usize,
    /// Per-used-point vertical residuals, in sweep order.
    pub residuals: Vec<f64>,
}

fn wilson_interval(outages: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = outages as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn normal_interval(outages: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = outages as f64 / n;
    let half = Z95 * (p * (1.0 - p) / n).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

fn estimate_with_stream_base(
    config: &ProtocolConfig,
    profile: &LinkSnrProfile,
    trials: u64,
    seed: u64,
    stream_base: u64,
) -> Result<OutageEstimate> {
    config.validate()?;
    if trials == 0 {
        return Err(Error::InvalidConfig("at least one trial is required".into()));
    }
    let topology = config.topology()?;
    // CMA gains depend only on (config, profile); calibrate once per run.
    let cma_gains = if config.protocol == Protocol::CmaNaf {
        Some(cma_calibrate_gains(config, profile)?)
    } else {
        None
    };
    let rho = profile.rho();
    let outages: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, stream_base + t);
            let realization = sample_realization(&topology, profile, &mut rng);
            let out = match &cma_gains {
                Some(gains) => {
                    let model = cma_build_model(&realization, config, gains, profile)
                        .expect("validated config builds a model");
                    outage_cma(&model, config, rho).expect("validated config evaluates")
                }
                None => outage_indicator(&realization, config, profile)
                    .expect("validated config evaluates"),
            };
            out as u64
        })
        .sum();
    let p_hat = outages as f64 / trials as f64;
    let (ci_low, ci_high) = if outages < WILSON_THRESHOLD {
        wilson_interval(outages, trials)
    } else {
        normal_interval(outages, trials)
    };
    Ok(OutageEstimate {
        trials,
        outages,
        p_hat,
        ci_low,
        ci_high,
        seed,
        snr_db: profile.base_snr_db(),
        rate_bpcu: config.rate_bpcu,
        low_confidence: outages < LOW_CONFIDENCE_THRESHOLD,
    })
}

/// Estimates the outage probability of `config` at the profile's reference
/// SNR with `trials` independent trials on substreams of `seed`.
pub fn estimate_outage(
    config: &ProtocolConfig,
    profile: &LinkSnrProfile,
    trials: u64,
    seed: u64,
) -> Result<OutageEstimate> {
    estimate_with_stream_base(config, profile, trials, seed, 0)
}

/// One estimate per SNR grid point, each on its own substream range; the
/// first point reproduces [`estimate_outage`] exactly.
pub fn sweep(
    config: &ProtocolConfig,
    profile_base: &LinkSnrProfile,
    snr_grid_db: &[f64],
    trials: u64,
    seed: u64,
) -> Result<SweepResult> {
    if snr_grid_db.is_empty() {
        return Err(Error::InvalidConfig("SNR grid must be nonempty".into()));
    }
    if snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("SNR grid must be strictly increasing".into()));
    }
    let mut estimates = Vec::with_capacity(snr_grid_db.len());
    for (i, &db) in snr_grid_db.iter().enumerate() {
        let profile = profile_base.at_base_snr_db(db);
        estimates.push(estimate_with_stream_base(
            config,
            &profile,
            trials,
            seed,
            i as u64 * POINT_STREAM_STRIDE,
        )?);
    }
    Ok(SweepResult { protocol: config.protocol, estimates })
}

/// Least-squares slope of `-log10 p_hat` versus `log10 rho` over the sweep
/// points with at least `min_outages` observed outages.
pub fn estimate_exponent(result: &SweepResult, min_outages: u64) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = result
        .estimates
        .iter()
        .filter(|e| e.outages >= min_outages.max(1))
        .map(|e| (e.snr_db / 10.0, -e.p_hat.log10()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientPoints);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = pts.iter().map(|p| p.1 - (intercept + slope * p.0)).collect();
    Ok(ExponentFit { slope, intercept, points_used: pts.len(), residuals })
}
