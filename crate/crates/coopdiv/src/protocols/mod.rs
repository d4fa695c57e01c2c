//! Per-realization mutual information and outage indicators for every
//! cooperative protocol, at finite SNR.
//!
//! Each evaluator is a pure function of `(realization, config, profile)`:
//! data-parallel trial loops need no shared state. The half-duplex fair power
//! split (`fair_power_split`) drops a transmitter's energy to `E/j` exactly
//! in the symbol-intervals where `j` nodes transmit simultaneously, so the
//! total average energy per symbol-interval stays `E` for every protocol.

mod af;
mod cma;
mod ddf;

pub use af::{af_general_mi, mi_direct, mi_genie_miso, mi_ltw_af_frame, mi_naf_frame, mi_naf_multi, naf_relay_gain, relay_gain};
pub use cma::{cma_build_model, cma_calibrate_gains, cma_schedule, outage_cma, CmaGains};
pub use ddf::{
    ddf_decode_schedule, ddf_listen_fraction, ddf_listen_fraction_finite, outage_cb_ddf, outage_ddf,
    outage_ddf_multi, DecodeSchedule,
};

use std::fmt;
use std::str::FromStr;

use crate::fading::{ChannelRealization, LinkSnrProfile, Role, Topology};
use crate::{Error, Result};

/// Protocol identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Protocol {
    Direct,
    GenieMiso,
    LtwAf,
    LtwDf,
    Naf,
    NafMulti,
    Ddf,
    DdfMulti,
    CbDdf,
    CmaNaf,
}

impl Protocol {
    pub const ALL: [Protocol; 10] = [
        Protocol::Direct,
        Protocol::GenieMiso,
        Protocol::LtwAf,
        Protocol::LtwDf,
        Protocol::Naf,
        Protocol::NafMulti,
        Protocol::Ddf,
        Protocol::DdfMulti,
        Protocol::CbDdf,
        Protocol::CmaNaf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Direct => "direct",
            Protocol::GenieMiso => "genie-miso",
            Protocol::LtwAf => "ltw-af",
            Protocol::LtwDf => "ltw-df",
            Protocol::Naf => "naf",
            Protocol::NafMulti => "naf-multi",
            Protocol::Ddf => "ddf",
            Protocol::DdfMulti => "ddf-multi",
            Protocol::CbDdf => "cb-ddf",
            Protocol::CmaNaf => "cma-naf",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown protocol '{s}'")))
    }
}

/// Relay repetition-gain policy: equality in the average energy constraint,
/// or that value scaled down by a fixed factor in `(0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RelayGainPolicy {
    Eq54Equality,
    FixedScale(f64),
}

/// Protocol identity plus every finite-SNR knob.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub protocol: Protocol,
    /// Number of cooperating partner nodes (relay scenario: source + relays).
    pub n_nodes: usize,
    /// Drop simultaneous transmitters to `E/j` (see module docs).
    pub fair_power_split: bool,
    pub relay_gain_policy: RelayGainPolicy,
    /// Restrict DDF relay-side accumulation to the source link only,
    /// reproducing the waiting-rule bound; the default also counts signals
    /// from already-transmitting relays.
    pub ddf_relay_mi_source_only: bool,
    /// Finite codeword length for the DDF listening rule; `None` uses the
    /// asymptotic continuous fraction.
    pub ddf_codeword_len: Option<u32>,
    /// Frames per super-frame (L) in CMA-NAF.
    pub cma_frames_per_superframe: usize,
    /// Share of the transmit-power budget assigned to the own-symbol
    /// broadcast gain in CMA-NAF calibration.
    pub cma_gain_ratio: f64,
    /// Target rate in bits per channel use.
    pub rate_bpcu: f64,
}

impl ProtocolConfig {
    pub fn new(protocol: Protocol, n_nodes: usize) -> Self {
        Self {
            protocol,
            n_nodes,
            fair_power_split: true,
            relay_gain_policy: RelayGainPolicy::Eq54Equality,
            ddf_relay_mi_source_only: false,
            ddf_codeword_len: None,
            cma_frames_per_superframe: 2,
            cma_gain_ratio: 0.5,
            rate_bpcu: 0.0,
        }
    }

    pub fn with_rate(mut self, rate_bpcu: f64) -> Self {
        self.rate_bpcu = rate_bpcu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::InvalidConfig(msg));
        if !self.rate_bpcu.is_finite() || self.rate_bpcu < 0.0 {
            return err(format!("rate must be finite and nonnegative, got {}", self.rate_bpcu));
        }
        if let RelayGainPolicy::FixedScale(s) = self.relay_gain_policy {
            if !(s > 0.0 && s <= 1.0) {
                return err(format!("fixed relay gain scale must lie in (0, 1], got {s}"));
            }
        }
        let n = self.n_nodes;
        match self.protocol {
            Protocol::Direct => {
                if n != 1 {
                    return err(format!("direct transmission uses a single node, got {n}"));
                }
            }
            Protocol::GenieMiso => {
                if n < 1 {
                    return err("genie MISO bound needs at least one node".into());
                }
            }
            Protocol::LtwAf | Protocol::LtwDf | Protocol::Naf | Protocol::Ddf => {
                if n != 2 {
                    return err(format!("{} is a single-relay protocol (n_nodes = 2), got {n}", self.protocol));
                }
            }
            Protocol::NafMulti | Protocol::DdfMulti => {
                if n < 2 {
                    return err(format!("{} needs at least one relay (n_nodes >= 2), got {n}", self.protocol));
                }
            }
            Protocol::CbDdf => {
                if n < 1 {
                    return err("cooperative broadcast needs at least one destination".into());
                }
            }
            Protocol::CmaNaf => {
                if n < 2 {
                    return err(format!("cma-naf needs at least two sources, got {n}"));
                }
                if self.cma_frames_per_superframe == 0 {
                    return err("cma_frames_per_superframe must be positive".into());
                }
                if !(self.cma_gain_ratio > 0.0 && self.cma_gain_ratio <= 1.0) {
                    return err(format!("cma_gain_ratio must lie in (0, 1], got {}", self.cma_gain_ratio));
                }
            }
        }
        if let Some(l) = self.ddf_codeword_len {
            if l == 0 {
                return err("ddf_codeword_len must be positive".into());
            }
        }
        Ok(())
    }

    /// Fading topology implied by the protocol.
    pub fn topology(&self) -> Result<Topology> {
        let role = match self.protocol {
            Protocol::Direct => Role::PointToPoint,
            Protocol::GenieMiso | Protocol::CmaNaf => Role::MultipleAccess,
            Protocol::LtwAf | Protocol::LtwDf | Protocol::Naf | Protocol::Ddf | Protocol::NafMulti
            | Protocol::DdfMulti => Role::Relay,
            Protocol::CbDdf => Role::Broadcast,
        };
        if role == Role::MultipleAccess && self.n_nodes == 1 {
            // genie bound degenerates to a single transmitter
            return Topology::new(Role::PointToPoint, 1);
        }
        Topology::new(role, self.n_nodes)
    }
}

/// Evaluates the protocol's outage indicator on one realization: `true` when
/// the instantaneous mutual information cannot support `rate_bpcu`.
pub fn outage_indicator(
    realization: &ChannelRealization,
    config: &ProtocolConfig,
    profile: &LinkSnrProfile,
) -> Result<bool> {
    let rho = profile.rho();
    let rate = config.rate_bpcu;
    match config.protocol {
        Protocol::Direct => Ok(mi_direct(realization.g(0), rho) < rate),
        Protocol::GenieMiso => Ok(mi_genie_miso(realization.g_all(), rho) < rate),
        Protocol::LtwAf => Ok(af::mi_ltw_af(realization, config, profile) < rate),
        Protocol::Naf | Protocol::NafMulti => Ok(mi_naf_multi(realization, config, profile) < rate),
        Protocol::Ddf => outage_ddf(realization, config, profile),
        Protocol::DdfMulti => outage_ddf_multi(realization, config, profile),
        Protocol::CbDdf => outage_cb_ddf(realization, config, profile),
        Protocol::CmaNaf => {
            let gains = cma_calibrate_gains(config, profile)?;
            let model = cma_build_model(realization, config, &gains, profile)?;
            outage_cma(&model, config, rho)
        }
        Protocol::LtwDf => Err(Error::UnsupportedProtocol(config.protocol.to_string())),
    }
}
