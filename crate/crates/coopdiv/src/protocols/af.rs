//! Amplify-and-forward evaluators: direct and genie baselines, the general
//! linear AF block model, and the NAF / LTW-AF frame forms.

use num_complex::Complex64;

use crate::fading::{ChannelRealization, LinkId, LinkSnrProfile};
use crate::linalg::{logdet_ipm, CMatrix, HermitianMatrix};
use crate::mi::{subset_mi, LinearChannelModel};
use crate::protocols::{ProtocolConfig, RelayGainPolicy};
use crate::{Error, Result};

/// Relative slack when checking the relay average energy constraint.
const ENERGY_TOL: f64 = 1e-9;

/// Direct transmission: `log2(1 + |g1|^2 rho)` bits per use.
#[inline]
pub fn mi_direct(g1: Complex64, rho: f64) -> f64 {
    (1.0 + g1.norm_sqr() * rho).log2()
}

/// Genie-aided MISO bound: all partners know the message a priori and
/// power-combine, `log2(1 + rho * sum |g_j|^2)` bits per use.
pub fn mi_genie_miso(g: &[Complex64], rho: f64) -> f64 {
    let total: f64 = g.iter().map(|z| z.norm_sqr()).sum();
    (1.0 + rho * total).log2()
}

/// Largest repetition gain meeting the relay average energy constraint:
/// `sqrt(budget / (|h|^2 E_rx + sigma_w^2))`, where `E_rx` is the energy of
/// the symbol the relay observed. Returns zero when the relay observes
/// nothing at all.
pub fn relay_gain(budget: f64, received_symbol_energy: f64, h: Complex64, sigma_w2: f64) -> f64 {
    let denom = h.norm_sqr() * received_symbol_energy + sigma_w2;
    if denom <= 0.0 {
        0.0
    } else {
        (budget / denom).sqrt()
    }
}

/// Repetition gain at equality in the energy constraint with a common
/// per-node energy `energy`.
pub fn naf_relay_gain(h: Complex64, energy: f64, sigma_w2: f64) -> f64 {
    relay_gain(energy, energy, h, sigma_w2)
}

fn policy_scale(policy: RelayGainPolicy) -> f64 {
    match policy {
        RelayGainPolicy::Eq54Equality => 1.0,
        RelayGainPolicy::FixedScale(s) => s,
    }
}

/// Per-cooperation-frame NAF mutual information in bits per channel use.
///
/// The frame observations are `y1 = g1 x1 + v1` and
/// `y2 = g1 x2 + g2 b (h x1 + w1) + v2`; the 2x2 signal and noise
/// covariances are formed directly and fed to the log-det kernel. Under the
/// fair power split the second-slot source symbol carries `E/2`, applied
/// only when the relay actually transmits (`b != 0`).
pub fn mi_naf_frame(
    g1: Complex64,
    g2: Complex64,
    h: Complex64,
    b: f64,
    sigma_w2: f64,
    rho: f64,
    fair_power_split: bool,
) -> f64 {
    let e1 = rho;
    let e2 = if fair_power_split && b != 0.0 { rho / 2.0 } else { rho };
    let relay_coeff = g2 * b * h;
    let mut s = HermitianMatrix::zeros(2);
    s.add_outer_product(e1, &[g1, relay_coeff]);
    s.add_outer_product(e2, &[Complex64::ZERO, g1]);
    let mut n = HermitianMatrix::zeros(2);
    n.add_outer_product(1.0, &[Complex64::ONE, Complex64::ZERO]);
    n.add_outer_product(1.0, &[Complex64::ZERO, Complex64::ONE]);
    n.add_outer_product(sigma_w2, &[Complex64::ZERO, g2 * b]);
    0.5 * logdet_ipm(&s, &n).expect("NAF frame covariances are well formed")
}

/// Per-frame LTW-AF mutual information in bits per channel use: the source
/// is silent in the repetition slot, so one symbol spans two uses. The fair
/// power split never applies (the two nodes never transmit together).
pub fn mi_ltw_af_frame(g1: Complex64, g2: Complex64, h: Complex64, b: f64, sigma_w2: f64, rho: f64) -> f64 {
    let relay_coeff = g2 * b * h;
    let mut s = HermitianMatrix::zeros(2);
    s.add_outer_product(rho, &[g1, relay_coeff]);
    let mut n = HermitianMatrix::zeros(2);
    n.add_outer_product(1.0, &[Complex64::ONE, Complex64::ZERO]);
    n.add_outer_product(1.0, &[Complex64::ZERO, Complex64::ONE]);
    n.add_outer_product(sigma_w2, &[Complex64::ZERO, g2 * b]);
    0.5 * logdet_ipm(&s, &n).expect("LTW-AF frame covariances are well formed")
}

/// LTW-AF on a single-relay realization with link parameters resolved from
/// the profile.
pub(crate) fn mi_ltw_af(
    realization: &ChannelRealization,
    config: &ProtocolConfig,
    profile: &LinkSnrProfile,
) -> f64 {
    let rho = profile.rho();
    let h = realization.h(1, 0);
    let sigma_w2 = profile.noise_var(LinkId::Inter { to: 1, from: 0 });
    let b = policy_scale(config.relay_gain_policy) * relay_gain(rho, rho, h, sigma_w2);
    mi_ltw_af_frame(realization.g(0), realization.g(1), h, b, sigma_w2, rho)
}

/// Multi-relay NAF: a super-frame of `N-1` cooperation frames, relay `i`
/// active in frame `i`; returns the per-use average over frames. With a
/// single relay this is exactly the single-frame value.
pub fn mi_naf_multi(
    realization: &ChannelRealization,
    config: &ProtocolConfig,
    profile: &LinkSnrProfile,
) -> f64 {
    let rho = profile.rho();
    let n = config.n_nodes;
    let scale = policy_scale(config.relay_gain_policy);
    let budget = if config.fair_power_split { rho / 2.0 } else { rho };
    let g1 = realization.g(0);
    let mut total = 0.0;
    for relay in 1..n {
        let h = realization.h(relay, 0);
        let sigma_w2 = profile.noise_var(LinkId::Inter { to: relay, from: 0 });
        let b = scale * relay_gain(budget, rho, h, sigma_w2);
        total += mi_naf_frame(g1, realization.g(relay), h, b, sigma_w2, rho, config.fair_power_split);
    }
    total / (n - 1) as f64
}

/// Mutual information per channel use of the general single-relay linear AF
/// model: the relay listens to the first `l' = a1.len()` symbols and
/// transmits `B`-combinations of its noisy observations while the source
/// keeps transmitting through `a2`. Inputs are independent with per-symbol
/// energy `rho`; `b_mat` must satisfy the relay average energy constraint
/// row by row.
#[allow(clippy::too_many_arguments)]
pub fn af_general_mi(
    a1: &[Complex64],
    a2: &[Complex64],
    b_mat: &CMatrix,
    g1: Complex64,
    g2: Complex64,
    h: Complex64,
    sigma_w2: f64,
    rho: f64,
) -> Result<f64> {
    let l1 = a1.len();
    let l2 = a2.len();
    let l = l1 + l2;
    if b_mat.n_rows() != l2 || b_mat.n_cols() != l1 {
        return Err(Error::DimensionMismatch(format!(
            "B must be {}x{}, got {}x{}",
            l2,
            l1,
            b_mat.n_rows(),
            b_mat.n_cols()
        )));
    }
    // Average energy constraint on each relay transmission.
    let h2 = h.norm_sqr();
    for j in 0..l2 {
        let mut signal_part = 0.0;
        let mut noise_part = 0.0;
        for i in 0..l1 {
            let b2 = b_mat.get(j, i).norm_sqr();
            signal_part += b2 * a1[i].norm_sqr();
            noise_part += b2;
        }
        let used = h2 * rho * signal_part + sigma_w2 * noise_part;
        if used > rho * (1.0 + ENERGY_TOL) {
            return Err(Error::EnergyConstraint { row: j, used, budget: rho });
        }
    }

    let mut model = LinearChannelModel::new(l, 1.0);
    for i in 0..l1 {
        let mut col = vec![Complex64::ZERO; l];
        col[i] = g1 * a1[i];
        for j in 0..l2 {
            col[l1 + j] = g2 * h * b_mat.get(j, i) * a1[i];
        }
        model.push_signal_column(0, i, col);
    }
    for j in 0..l2 {
        let mut col = vec![Complex64::ZERO; l];
        col[l1 + j] = g1 * a2[j];
        model.push_signal_column(0, l1 + j, col);
    }
    for i in 0..l1 {
        let mut col = vec![Complex64::ZERO; l];
        for j in 0..l2 {
            col[l1 + j] = g2 * b_mat.get(j, i);
        }
        model.push_noise_column(sigma_w2, col);
    }
    Ok(subset_mi(&model, &[0], rho)? / l as f64)
}
