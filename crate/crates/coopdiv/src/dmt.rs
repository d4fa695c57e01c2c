//! Closed-form diversity-multiplexing tradeoff curves.
//!
//! A point-to-point MIMO link with `M` transmit and `N` receive antennas
//! achieves the piecewise-linear curve joining `(k, (M-k)(N-k))`; the
//! cooperative protocols below achieve the piecewise forms established for
//! them, all nonincreasing and continuous on `r in [0, 1]`.

use crate::protocols::Protocol;
use crate::{Error, Result};

/// One (multiplexing gain, diversity gain) point of a tradeoff curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffPoint {
    pub r: f64,
    pub d: f64,
}

#[inline]
fn pos(x: f64) -> f64 {
    x.max(0.0)
}

fn check_r(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("multiplexing gain must lie in [0, 1], got {r}")));
    }
    Ok(())
}

/// Diversity gain of the multi-relay DDF curve with `n` cooperating nodes
/// (source plus `n - 1` relays).
fn ddf_multi(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    if r <= 1.0 / nf {
        nf * (1.0 - r)
    } else if r <= 0.5 {
        1.0 + (nf - 1.0) * (1.0 - 2.0 * r) / (1.0 - r)
    } else {
        (1.0 - r) / r
    }
}

/// Closed-form diversity gain `d(r)` of a protocol with `n` partner nodes.
///
/// `LtwAf` has no published closed form and is rejected; its finite-SNR
/// behavior is covered by Monte Carlo comparison only.
pub fn dmt_closed_form(protocol: Protocol, n: usize, r: f64) -> Result<f64> {
    check_r(r)?;
    let nf = n as f64;
    let d = match protocol {
        Protocol::Direct => 1.0 - r,
        Protocol::GenieMiso | Protocol::CmaNaf => {
            if n < 1 {
                return Err(Error::InvalidConfig("MISO bound needs at least one node".into()));
            }
            nf * (1.0 - r)
        }
        Protocol::Naf => {
            require_nodes(protocol, n, 2, Some(2))?;
            (1.0 - r) + pos(1.0 - 2.0 * r)
        }
        Protocol::NafMulti => {
            require_nodes(protocol, n, 2, None)?;
            (1.0 - r) + (nf - 1.0) * pos(1.0 - 2.0 * r)
        }
        Protocol::LtwDf => {
            require_nodes(protocol, n, 2, Some(2))?;
            pos(2.0 * (1.0 - 2.0 * r))
        }
        Protocol::Ddf => {
            require_nodes(protocol, n, 2, Some(2))?;
            ddf_multi(2, r)
        }
        Protocol::DdfMulti => {
            require_nodes(protocol, n, 2, None)?;
            ddf_multi(n, r)
        }
        Protocol::CbDdf => {
            require_nodes(protocol, n, 1, None)?;
            ddf_multi(n, r)
        }
        Protocol::LtwAf => {
            return Err(Error::UnsupportedProtocol(
                "ltw-af has no closed-form tradeoff curve".into(),
            ));
        }
    };
    Ok(d)
}

fn require_nodes(protocol: Protocol, n: usize, min: usize, exact: Option<usize>) -> Result<()> {
    if let Some(e) = exact {
        if n != e {
            return Err(Error::InvalidConfig(format!("{protocol} requires n = {e}, got {n}")));
        }
    } else if n < min {
        return Err(Error::InvalidConfig(format!("{protocol} requires n >= {min}, got {n}")));
    }
    Ok(())
}

/// Maps [`dmt_closed_form`] over a grid of multiplexing gains.
pub fn emit_curve(protocol: Protocol, n: usize, r_grid: &[f64]) -> Result<Vec<TradeoffPoint>> {
    r_grid
        .iter()
        .map(|&r| dmt_closed_form(protocol, n, r).map(|d| TradeoffPoint { r, d }))
        .collect()
}
