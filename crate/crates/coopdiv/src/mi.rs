//! Linear Gaussian channel models and exact mutual information.
//!
//! A [`LinearChannelModel`] is the exact linear map from source symbols and
//! injected noise terms to the destination observations of one coherence
//! interval: one tagged complex column per independent source symbol and one
//! per noise term. [`subset_mi`] evaluates the conditional mutual information
//! carried by a subset of sources, with every other source's symbols known at
//! the receiver (their columns contribute to neither signal nor noise).

use num_complex::Complex64;

use crate::linalg::{logdet_ipm, HermitianMatrix};
use crate::{Error, Result};

/// Column of observation coefficients for one source symbol.
#[derive(Clone, Debug)]
pub struct SignalColumn {
    /// Index of the originating source.
    pub source: usize,
    /// Symbol index within that source's stream.
    pub symbol: usize,
    pub coeffs: Vec<Complex64>,
}

/// Column of observation coefficients for one injected noise term.
#[derive(Clone, Debug)]
pub struct NoiseColumn {
    pub variance: f64,
    pub coeffs: Vec<Complex64>,
}

/// Exact linear destination model for one coherence interval.
#[derive(Clone, Debug)]
pub struct LinearChannelModel {
    n_obs: usize,
    signal_columns: Vec<SignalColumn>,
    noise_columns: Vec<NoiseColumn>,
}

impl LinearChannelModel {
    /// Creates a model with `n_obs` observations, each carrying one
    /// identity-weight destination-noise column of variance `dest_noise_var`.
    pub fn new(n_obs: usize, dest_noise_var: f64) -> Self {
        let mut noise_columns = Vec::with_capacity(n_obs);
        for i in 0..n_obs {
            let mut coeffs = vec![Complex64::ZERO; n_obs];
            coeffs[i] = Complex64::ONE;
            noise_columns.push(NoiseColumn { variance: dest_noise_var, coeffs });
        }
        Self { n_obs, signal_columns: Vec::new(), noise_columns }
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn signal_columns(&self) -> &[SignalColumn] {
        &self.signal_columns
    }

    pub fn noise_columns(&self) -> &[NoiseColumn] {
        &self.noise_columns
    }

    pub fn push_signal_column(&mut self, source: usize, symbol: usize, coeffs: Vec<Complex64>) {
        assert_eq!(coeffs.len(), self.n_obs, "signal column length must equal n_obs");
        self.signal_columns.push(SignalColumn { source, symbol, coeffs });
    }

    /// Adds a non-destination noise column (e.g. relayed receiver noise).
    /// Columns with zero variance are dropped.
    pub fn push_noise_column(&mut self, variance: f64, coeffs: Vec<Complex64>) {
        assert_eq!(coeffs.len(), self.n_obs, "noise column length must equal n_obs");
        if variance > 0.0 {
            self.noise_columns.push(NoiseColumn { variance, coeffs });
        }
    }

    /// Number of distinct sources appearing in the signal columns.
    pub fn n_sources(&self) -> usize {
        self.signal_columns.iter().map(|c| c.source + 1).max().unwrap_or(0)
    }

    /// Checks the structural invariant: every observation has exactly one
    /// identity-weight destination-noise column.
    pub fn validate(&self) -> Result<()> {
        let mut unit_hits = vec![0usize; self.n_obs];
        for col in &self.noise_columns {
            for (i, &v) in col.coeffs.iter().enumerate() {
                if v == Complex64::ONE && col.coeffs.iter().enumerate().all(|(j, &w)| j == i || w == Complex64::ZERO) {
                    unit_hits[i] += 1;
                }
            }
        }
        if unit_hits.contains(&0) {
            return Err(Error::InvalidConfig(
                "every observation needs one identity-weight destination-noise column".into(),
            ));
        }
        Ok(())
    }
}

/// Conditional mutual information, in bits over the whole coherence interval,
/// carried by the symbols of the sources in `subset`, with all other sources'
/// symbols known. Each symbol has energy `symbol_energy`.
pub fn subset_mi(model: &LinearChannelModel, subset: &[usize], symbol_energy: f64) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let n = model.n_obs;
    let mut signal = HermitianMatrix::zeros(n);
    for col in &model.signal_columns {
        if subset.contains(&col.source) {
            signal.add_outer_product(symbol_energy, &col.coeffs);
        }
    }
    let mut noise = HermitianMatrix::zeros(n);
    for col in &model.noise_columns {
        noise.add_outer_product(col.variance, &col.coeffs);
    }
    logdet_ipm(&signal, &noise)
}
