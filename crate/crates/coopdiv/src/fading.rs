//! Channel and SNR model: topologies, per-link SNR bookkeeping, and sampling
//! of quasi-static Rayleigh realizations from deterministic substreams.
//!
//! Conventions: node indices are zero-based. In the relay scenario node 0 is
//! the source and nodes `1..n` are relays; in broadcast the nodes are the
//! destinations (the cell site transmits); in multiple access the nodes are
//! the sources (the cell site receives). `g[j]` is the gain of the link
//! between node `j` and the cell site, `h(to, from)` the inter-node gain.
//! All gains are unit-variance circularly-symmetric complex Gaussian.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// dB to linear: `10^(db/10)`.
#[inline]
pub fn snr_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear to dB: `10 log10(x)`.
#[inline]
pub fn snr_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Exponential order of `1/x` at SNR `rho`: `-log(x) / log(rho)`.
pub fn exponential_order(x: f64, rho: f64) -> Result<f64> {
    if x <= 0.0 || x.is_nan() {
        return Err(Error::Domain(format!("exponential_order requires x > 0, got {x}")));
    }
    if rho <= 1.0 || rho.is_nan() {
        return Err(Error::Domain(format!("exponential_order requires rho > 1, got {rho}")));
    }
    Ok(-x.ln() / rho.ln())
}

/// Identifies one directed link of a topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkId {
    /// Link between node `node` and the cell site (`g[node]`).
    Cell { node: usize },
    /// Inter-node link from `from` into `to` (`h(to, from)`).
    Inter { to: usize, from: usize },
}

/// Reference SNR plus fixed per-link dB offsets and noiseless-link flags.
///
/// The destination noise variance is normalized to one, so the symbol energy
/// equals `rho()`. A link with offset `o` dB is received over noise of
/// variance `10^(-o/10)`; a noiseless link has zero receiver noise and is
/// treated downstream as infinite-SNR.
#[derive(Clone, Debug)]
pub struct LinkSnrProfile {
    base_snr_db: f64,
    offsets_db: HashMap<LinkId, f64>,
    noiseless_links: HashSet<LinkId>,
}

impl LinkSnrProfile {
    pub fn new(base_snr_db: f64) -> Self {
        Self { base_snr_db, offsets_db: HashMap::new(), noiseless_links: HashSet::new() }
    }

    pub fn base_snr_db(&self) -> f64 {
        self.base_snr_db
    }

    /// Same offsets and flags at a different reference SNR.
    pub fn at_base_snr_db(&self, db: f64) -> Self {
        let mut p = self.clone();
        p.base_snr_db = db;
        p
    }

    /// Reference SNR in linear scale.
    pub fn rho(&self) -> f64 {
        snr_linear(self.base_snr_db)
    }

    pub fn with_offset_db(mut self, link: LinkId, offset_db: f64) -> Result<Self> {
        if !offset_db.is_finite() {
            return Err(Error::InvalidConfig(format!("offset for {link:?} must be finite")));
        }
        if self.noiseless_links.contains(&link) {
            return Err(Error::InvalidConfig(format!(
                "{link:?} is flagged noiseless and cannot also carry an offset"
            )));
        }
        self.offsets_db.insert(link, offset_db);
        Ok(self)
    }

    pub fn with_noiseless(mut self, link: LinkId) -> Result<Self> {
        if self.offsets_db.contains_key(&link) {
            return Err(Error::InvalidConfig(format!(
                "{link:?} carries an offset and cannot also be noiseless"
            )));
        }
        self.noiseless_links.insert(link);
        Ok(self)
    }

    /// Applies `offset_db` to every inter-node link of an `n`-node topology.
    pub fn with_inter_offset_db(mut self, n_nodes: usize, offset_db: f64) -> Result<Self> {
        for to in 0..n_nodes {
            for from in 0..n_nodes {
                if to != from {
                    self = self.with_offset_db(LinkId::Inter { to, from }, offset_db)?;
                }
            }
        }
        Ok(self)
    }

    /// Flags every inter-node link of an `n`-node topology as noiseless.
    pub fn with_noiseless_inter(mut self, n_nodes: usize) -> Result<Self> {
        for to in 0..n_nodes {
            for from in 0..n_nodes {
                if to != from {
                    self = self.with_noiseless(LinkId::Inter { to, from })?;
                }
            }
        }
        Ok(self)
    }

    pub fn is_noiseless(&self, link: LinkId) -> bool {
        self.noiseless_links.contains(&link)
    }

    /// Linear SNR multiplier of a link relative to the reference.
    pub fn offset_mult(&self, link: LinkId) -> f64 {
        self.offsets_db.get(&link).map_or(1.0, |db| snr_linear(*db))
    }

    /// Receiver noise variance on a link (zero when noiseless).
    pub fn noise_var(&self, link: LinkId) -> f64 {
        if self.is_noiseless(link) {
            0.0
        } else {
            1.0 / self.offset_mult(link)
        }
    }

    /// Effective received-SNR coefficient per unit `|gain|^2` on a link:
    /// `rho * offset_mult`, or infinity for a noiseless link.
    pub fn link_snr_coeff(&self, link: LinkId) -> f64 {
        if self.is_noiseless(link) {
            f64::INFINITY
        } else {
            self.rho() * self.offset_mult(link)
        }
    }
}

/// Node role of a topology.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    PointToPoint,
    /// Node 0 is the source, nodes `1..n` are relays, plus one destination.
    Relay,
    /// The nodes are destinations of a common source.
    Broadcast,
    /// The nodes are sources sharing one destination.
    MultipleAccess,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Topology {
    n_nodes: usize,
    role: Role,
}

impl Topology {
    pub fn new(role: Role, n_nodes: usize) -> Result<Self> {
        let min = match role {
            Role::PointToPoint | Role::Broadcast => 1,
            Role::Relay | Role::MultipleAccess => 2,
        };
        if role == Role::PointToPoint && n_nodes != 1 {
            return Err(Error::InvalidConfig(format!(
                "point-to-point topology has exactly one node, got {n_nodes}"
            )));
        }
        if n_nodes < min {
            return Err(Error::InvalidConfig(format!(
                "{role:?} topology requires at least {min} nodes, got {n_nodes}"
            )));
        }
        Ok(Self { n_nodes, role })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn role(&self) -> Role {
        self.role
    }
}

/// One quasi-static draw of every link gain of a topology.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    topology: Topology,
    g: Vec<Complex64>,
    /// Row-major `n x n`, diagonal unused (zero).
    h: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    /// Gain of the link between node `j` and the cell site.
    #[inline]
    pub fn g(&self, node: usize) -> Complex64 {
        self.g[node]
    }

    pub fn g_all(&self) -> &[Complex64] {
        &self.g
    }

    /// Inter-node gain from `from` into `to`.
    #[inline]
    pub fn h(&self, to: usize, from: usize) -> Complex64 {
        debug_assert_ne!(to, from, "diagonal of h is unused");
        self.h[to * self.topology.n_nodes + from]
    }

    /// Construct a realization from explicit gains (tests and relabelings).
    pub fn from_gains(topology: Topology, g: Vec<Complex64>, h: Vec<Complex64>) -> Result<Self> {
        let n = topology.n_nodes;
        if g.len() != n || h.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} cell gains and {} inter-node gains, got {} and {}",
                n * n,
                g.len(),
                h.len()
            )));
        }
        if g.iter().chain(h.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("channel gains must be finite".into()));
        }
        Ok(Self { topology, g, h })
    }
}

/// Deterministic counter-based substream: the master seed keys the cipher and
/// the trial index selects the stream, so trial `t` draws the same values
/// under any parallel schedule.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn complex_gaussian_unit(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2)
}

/// Samples one quasi-static realization: independent unit-variance complex
/// Gaussian gains for every cell link and every ordered inter-node pair.
///
/// The draw order is fixed (all `g` by node index, then `h` row-major), so a
/// given `(topology, substream)` yields bit-identical gains regardless of the
/// protocol evaluated on them. The profile only validates against the
/// topology here; noiseless flags are honored by the MI evaluators.
pub fn sample_realization(
    topology: &Topology,
    profile: &LinkSnrProfile,
    rng: &mut impl Rng,
) -> ChannelRealization {
    debug_assert!(profile_links_in_range(topology, profile));
    let n = topology.n_nodes;
    let mut g = Vec::with_capacity(n);
    for _ in 0..n {
        g.push(complex_gaussian_unit(rng));
    }
    let mut h = vec![Complex64::ZERO; n * n];
    for to in 0..n {
        for from in 0..n {
            if to != from {
                h[to * n + from] = complex_gaussian_unit(rng);
            }
        }
    }
    ChannelRealization { topology: *topology, g, h }
}

fn profile_links_in_range(topology: &Topology, profile: &LinkSnrProfile) -> bool {
    let n = topology.n_nodes;
    let ok = |link: &LinkId| match *link {
        LinkId::Cell { node } => node < n,
        LinkId::Inter { to, from } => to < n && from < n && to != from,
    };
    profile.offsets_db.keys().all(ok) && profile.noiseless_links.iter().all(ok)
}
