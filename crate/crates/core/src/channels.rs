//! Transverse channels of the even-parity bosonic sector.

use alloc::vec::Vec;
use core::fmt;


use crate::error::{Error, Result};

/// Transverse quantum numbers `(n1, n2)`; `n1` belongs to the `omega1 = eta`
/// direction, `n2` to the reference direction `omega2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Channel {
    pub n1: u32,
    pub n2: u32,
}

impl Channel {
    pub const GROUND: Channel = Channel { n1: 0, n2: 0 };

    /// Both quantum numbers must be even: odd states do not couple to the
    /// ground channel.
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        if n1 % 2 != 0 || n2 % 2 != 0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "channel ({n1},{n2}) is not in the even-even sector"
            )));
        }
        Ok(Self { n1, n2 })
    }

    /// Manifold index `n = n1 + n2`.
    pub fn manifold(&self) -> u32 {
        self.n1 + self.n2
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.n1, self.n2)
    }
}

impl core::str::FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(alloc::format!("cannot parse channel `{s}` (expected n1,n2)"));
        let (a, b) = s.trim().split_once(',').ok_or_else(bad)?;
        let n1 = a.trim().parse().map_err(|_| bad())?;
        let n2 = b.trim().parse().map_err(|_| bad())?;
        Channel::new(n1, n2)
    }
}

/// `E_perp = eta (n1 + 1/2) + (n2 + 1/2)` in units of `hbar omega2`.
pub fn threshold_energy(ch: Channel, eta: f64) -> f64 {
    eta * (ch.n1 as f64 + 0.5) + (ch.n2 as f64 + 0.5)
}

/// Longitudinal wave number `k` (open) or decay constant `kappa` (closed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumValue {
    pub magnitude: f64,
    pub is_open: bool,
}

pub fn channel_momentum(energy: f64, ch: Channel, eta: f64) -> Result<MomentumValue> {
    if !energy.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    let delta = energy - threshold_energy(ch, eta);
    if delta == 0.0 {
        return Err(Error::ThresholdDegenerate {
            channel: ch,
            energy,
        });
    }
    Ok(MomentumValue {
        magnitude: (2.0 * delta.abs()).sqrt(),
        is_open: delta > 0.0,
    })
}

/// Channels with `n1 + n2 <= n_cut`, ordered by threshold then by `n1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    channels: Vec<Channel>,
    thresholds: Vec<f64>,
    eta: f64,
    n_cut: u32,
}

pub fn enumerate_channels(n_cut: u32, eta: f64) -> Result<ChannelSet> {
    ChannelSet::new(n_cut, eta)
}

impl ChannelSet {
    pub fn new(n_cut: u32, eta: f64) -> Result<Self> {
        if n_cut % 2 != 0 {
            return Err(Error::InvalidArgument(alloc::format!("n_cut = {n_cut} must be even")));
        }
        if !(eta >= 1.0) || !eta.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!("anisotropy eta = {eta} must be >= 1")));
        }
        let mut channels = Vec::new();
        for n1 in (0..=n_cut).step_by(2) {
            for n2 in (0..=n_cut - n1).step_by(2) {
                channels.push(Channel { n1, n2 });
            }
        }
        channels.sort_by(|a, b| {
            threshold_energy(*a, eta)
                .total_cmp(&threshold_energy(*b, eta))
                .then(a.n1.cmp(&b.n1))
        });
        let thresholds = channels.iter().map(|c| threshold_energy(*c, eta)).collect();
        Ok(Self {
            channels,
            thresholds,
            eta,
            n_cut,
        })
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n_cut(&self) -> u32 {
        self.n_cut
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn index_of(&self, ch: Channel) -> Option<usize> {
        self.channels.iter().position(|c| *c == ch)
    }

    /// Indices of channels open at `energy`.
    pub fn open_indices(&self, energy: f64) -> Vec<usize> {
        (0..self.len()).filter(|&i| energy > self.thresholds[i]).collect()
    }

    pub fn open_count(&self, energy: f64) -> usize {
        self.thresholds.iter().filter(|&&t| energy > t).count()
    }

    /// Channels of manifold `n = n1 + n2`, in set order.
    pub fn manifold(&self, n: u32) -> Vec<Channel> {
        self.channels.iter().copied().filter(|c| c.manifold() == n).collect()
    }
}
