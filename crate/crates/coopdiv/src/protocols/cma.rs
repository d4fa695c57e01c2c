//! CMA-NAF: the artificial-ISI amplify-and-forward protocol for the
//! cooperative multiple-access channel.
//!
//! Each of the `N` sources transmits once per cooperation frame (`N`
//! symbol-intervals), sending a linear combination of its own fresh symbol
//! and the noisy signal it last received from the source it currently helps.
//! Helper assignments rotate circularly across super-frames of `L` frames so
//! that over the `N-1` super-frames of a coherence interval every source is
//! helped by every other source exactly once.

use num_complex::Complex64;

use crate::fading::{ChannelRealization, LinkId, LinkSnrProfile, Role};
use crate::mi::{subset_mi, LinearChannelModel};
use crate::protocols::ProtocolConfig;
use crate::{Error, Result};

/// Calibrated broadcast (`a`) and repetition (`b`) gains, one pair per
/// source.
#[derive(Clone, Debug)]
pub struct CmaGains {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Helper assignment for a super-frame: `schedule[s]` is the (zero-based)
/// index of the source assigned to help source `s`. Super-frame indices
/// start at 1. The assignment is the `j`-th right circular shift of the
/// identity with `j = ((i-1) mod (N-1)) + 1`, hence always a derangement.
pub fn cma_schedule(n: usize, superframe_index: usize) -> Vec<usize> {
    assert!(n >= 2, "CMA scheduling needs at least two sources");
    assert!(superframe_index >= 1, "super-frame indices start at 1");
    let shift = (superframe_index - 1) % (n - 1) + 1;
    (0..n).map(|s| (s + n - shift) % n).collect()
}

/// Source helped by `j` under the given super-frame's schedule (the inverse
/// of [`cma_schedule`]).
fn helped_source(n: usize, superframe_index: usize, j: usize) -> usize {
    let shift = (superframe_index - 1) % (n - 1) + 1;
    (j + shift) % n
}

/// Common inter-source receiver noise variance; the symmetric scenario
/// requires every inter-source link to carry the same offset/flag.
fn symmetric_inter_noise_var(n: usize, profile: &LinkSnrProfile) -> Result<f64> {
    let mut var: Option<f64> = None;
    for to in 0..n {
        for from in 0..n {
            if to == from {
                continue;
            }
            let v = profile.noise_var(LinkId::Inter { to, from });
            match var {
                None => var = Some(v),
                Some(prev) if (prev - v).abs() > 1e-15 => {
                    return Err(Error::InvalidConfig(
                        "CMA-NAF assumes symmetric inter-source links; offsets differ".into(),
                    ));
                }
                _ => {}
            }
        }
    }
    Ok(var.unwrap_or(1.0))
}

/// Calibrates `(a, b)` so the steady-state statistical transmit power equals
/// the symbol energy `E`: the own-symbol share is `cma_gain_ratio` and the
/// repetition share covers the rest, with the helper's incoming power taken
/// at its ensemble average under unit-variance channel statistics. The
/// returned gains are verified by running the power recursion
/// `P <- a^2 E + b^2 (P + sigma_w^2)` to its fixed point.
pub fn cma_calibrate_gains(config: &ProtocolConfig, profile: &LinkSnrProfile) -> Result<CmaGains> {
    const MAX_ITERS: usize = 10_000;
    const REL_TOL: f64 = 1e-6;
    config.validate()?;
    let n = config.n_nodes;
    let energy = profile.rho();
    let sigma_w2 = symmetric_inter_noise_var(n, profile)?;
    let kappa = config.cma_gain_ratio;
    let a = kappa.sqrt();
    let b = if kappa >= 1.0 { 0.0 } else { ((1.0 - kappa) * energy / (energy + sigma_w2)).sqrt() };

    let mut power = 0.0;
    let mut converged = false;
    for _ in 0..MAX_ITERS {
        let next = a * a * energy + b * b * (power + sigma_w2);
        if (next - energy).abs() <= REL_TOL * energy {
            power = next;
            converged = true;
            break;
        }
        power = next;
    }
    if !converged {
        return Err(Error::NonConvergence(MAX_ITERS));
    }
    debug_assert!((a * a * energy + b * b * (power + sigma_w2) - energy).abs() <= REL_TOL * energy);
    Ok(CmaGains { a: vec![a; n], b: vec![b; n] })
}

/// Builds the exact linear destination model of one coherence interval:
/// `N-1` super-frames of `L` frames, one observation per symbol-interval.
///
/// Transmission coefficients propagate through the recursive chain
/// `t_{j,k} = a_j x_{j,k} + b_j (h_{j,tau} t_{tau,k'} + w_{j,k})`, where
/// `tau` is the source `j` currently helps and `k'` is `tau`'s most recent
/// transmission frame (the same frame when `tau < j`, the previous one
/// otherwise — including across super-frame boundaries). The very first
/// frame has no prior reception for sources whose helped partner transmits
/// after them. Relayed receiver noise becomes one noise column per
/// reception (dropped when the inter-source link is noiseless).
pub fn cma_build_model(
    realization: &ChannelRealization,
    config: &ProtocolConfig,
    gains: &CmaGains,
    profile: &LinkSnrProfile,
) -> Result<LinearChannelModel> {
    if realization.topology().role() != Role::MultipleAccess {
        return Err(Error::InvalidConfig("CMA-NAF requires a multiple-access topology".into()));
    }
    let n = config.n_nodes;
    if realization.topology().n_nodes() != n || gains.a.len() != n || gains.b.len() != n {
        return Err(Error::DimensionMismatch("realization/gains do not match n_nodes".into()));
    }
    let frames_per_super = config.cma_frames_per_superframe;
    let n_frames = (n - 1) * frames_per_super;
    let n_obs = n * n_frames;
    let n_sym = n * n_frames;
    let sym_index = |source: usize, frame: usize| frame * n + source;

    // Transmission coefficient vectors over [symbols | relayed noises].
    let mut w_links: Vec<(usize, usize)> = Vec::new(); // (to, from) per w column
    let width = n_sym + n_obs;
    let mut t_coeff: Vec<Vec<Vec<Complex64>>> = vec![vec![Vec::new(); n]; n_frames];
    for frame in 0..n_frames {
        let superframe = frame / frames_per_super + 1;
        for j in 0..n {
            let mut coeff = vec![Complex64::ZERO; width];
            coeff[sym_index(j, frame)] = Complex64::new(gains.a[j], 0.0);
            let tau = helped_source(n, superframe, j);
            let prev_frame = if tau < j { Some(frame) } else { frame.checked_sub(1) };
            if let Some(kp) = prev_frame {
                let b = gains.b[j];
                if b != 0.0 {
                    let h = realization.h(j, tau);
                    let prev = &t_coeff[kp][tau];
                    for (dst, src) in coeff.iter_mut().zip(prev.iter()) {
                        *dst += b * h * src;
                    }
                    if !profile.is_noiseless(LinkId::Inter { to: j, from: tau }) {
                        let w_idx = n_sym + w_links.len();
                        coeff[w_idx] += Complex64::new(b, 0.0);
                        w_links.push((j, tau));
                    }
                }
            }
            t_coeff[frame][j] = coeff;
        }
    }

    let mut model = LinearChannelModel::new(n_obs, 1.0);
    for source in 0..n {
        for frame in 0..n_frames {
            let c = sym_index(source, frame);
            let mut col = vec![Complex64::ZERO; n_obs];
            for obs_frame in 0..n_frames {
                for slot in 0..n {
                    col[obs_frame * n + slot] = realization.g(slot) * t_coeff[obs_frame][slot][c];
                }
            }
            model.push_signal_column(source, frame, col);
        }
    }
    for (w, &(to, from)) in w_links.iter().enumerate() {
        let c = n_sym + w;
        let mut col = vec![Complex64::ZERO; n_obs];
        for obs_frame in 0..n_frames {
            for slot in 0..n {
                col[obs_frame * n + slot] = realization.g(slot) * t_coeff[obs_frame][slot][c];
            }
        }
        model.push_noise_column(profile.noise_var(LinkId::Inter { to, from }), col);
    }
    Ok(model)
}

/// Multiple-access outage: the destination fails iff some nonempty subset
/// `I` of sources, with the others' symbols known, cannot support its bit
/// budget `|I| (N-1) L R` over the coherence interval.
pub fn outage_cma(model: &LinearChannelModel, config: &ProtocolConfig, rho: f64) -> Result<bool> {
    let n = config.n_nodes;
    let per_user_bits = (n - 1) as f64 * config.cma_frames_per_superframe as f64 * config.rate_bpcu;
    if per_user_bits <= 0.0 {
        return Ok(false);
    }
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&s| mask & (1 << s) != 0).collect();
        let budget = subset.len() as f64 * per_user_bits;
        if subset_mi(model, &subset, rho)? < budget {
            return Ok(true);
        }
    }
    Ok(false)
}
