//! Reliability protocols as slot-driven sender state machines.
//!
//! Every protocol delivers a *flow*: an ordered list of equally sized units.
//! Senders see the receiver only through [`FeedbackMsg`]s, which the
//! simulator hands over exactly one RTT after the data slot they report on.
//! All flows share one receiver type, [`RlncDecoder`]; an ARQ packet is the
//! combination with the single coefficient 1.

mod acrlnc;
mod arq;
mod decoder;
pub mod trace;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use acrlnc::RlncSender;
pub use arq::ArqSender;
pub use decoder::RlncDecoder;
pub use trace::{EventKind, Trace, TraceEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Reliability {
    #[serde(rename = "srarq")]
    SrArq,
    #[serde(rename = "sp-acrlnc")]
    SpAcRlnc,
    #[serde(rename = "mp-acrlnc")]
    MpAcRlnc,
}

impl Reliability {
    pub const ALL: [Reliability; 3] = [Reliability::SrArq, Reliability::SpAcRlnc, Reliability::MpAcRlnc];

    pub fn name(&self) -> &'static str {
        match self {
            Reliability::SrArq => "srarq",
            Reliability::SpAcRlnc => "sp-acrlnc",
            Reliability::MpAcRlnc => "mp-acrlnc",
        }
    }

    pub fn is_multipath(&self) -> bool {
        matches!(self, Reliability::MpAcRlnc)
    }
}

impl fmt::Display for Reliability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Reliability {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Reliability::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown reliability scheme `{s}` (expected srarq, sp-acrlnc or mp-acrlnc)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PacketKind {
    SystematicArq,
    RlncNew,
    RlncRepair,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedPacket {
    pub flow: usize,
    pub link: usize,
    pub kind: PacketKind,
    /// First unit of the window; `coefficients[i]` multiplies unit `lo + i`.
    pub lo: usize,
    pub coefficients: Vec<u8>,
    pub payload: Vec<u8>,
    /// First transmission slot of the oldest unit in the window.
    pub birth_slot: u64,
}

impl CodedPacket {
    /// Inclusive window `[w_min, w_max]`.
    pub fn window(&self) -> (usize, usize) {
        (self.lo, self.lo + self.coefficients.len() - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeedbackKind {
    Ack,
    Nack,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeedbackMsg {
    pub link: usize,
    /// Data slot the message reports on.
    pub slot: u64,
    /// Slot the receiver issued it.
    pub issued: u64,
    pub kind: FeedbackKind,
    /// Receiver's in-order decoded count for the flow.
    pub front: usize,
    /// Degrees of freedom held beyond `front`.
    pub dof: usize,
}

/// Erasure-rate estimation per link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// NACK fraction over the last `window` feedback messages; missing
    /// samples are filled with the configured prior.
    Sliding { window: usize },
    Fixed { value: f64 },
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::Sliding { window: 50 }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct LinkEstimate {
    kind: Estimator,
    prior: f64,
    history: VecDeque<bool>,
    nacks: usize,
}

impl LinkEstimate {
    pub(crate) fn new(kind: Estimator, prior: f64) -> Self {
        LinkEstimate {
            kind,
            prior,
            history: VecDeque::new(),
            nacks: 0,
        }
    }

    pub(crate) fn observe(&mut self, nack: bool) {
        if let Estimator::Sliding { window } = self.kind {
            self.history.push_back(nack);
            self.nacks += nack as usize;
            if self.history.len() > window {
                self.nacks -= self.history.pop_front().unwrap() as usize;
            }
        }
    }

    pub(crate) fn value(&self) -> f64 {
        match self.kind {
            Estimator::Fixed { value } => value,
            Estimator::Sliding { window } => {
                let missing = window.saturating_sub(self.history.len()) as f64;
                (self.nacks as f64 + self.prior * missing) / window.max(1) as f64
            }
        }
    }
}

/// AC-RLNC tuning.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcRlncParams {
    /// Repair when the DoF deficit exceeds this.
    pub threshold: f64,
    /// The window may span at most `cap_rtts · RTT` units per link.
    pub cap_rtts: usize,
    pub estimator: Estimator,
}

impl Default for AcRlncParams {
    fn default() -> Self {
        AcRlncParams {
            threshold: 0.0,
            cap_rtts: 2,
            estimator: Estimator::default(),
        }
    }
}

/// A sender for one flow over one or more links.
pub trait Sender {
    fn on_feedback(&mut self, now: u64, fb: &FeedbackMsg, trace: &mut Trace);
    /// At most one packet per link of the session.
    fn transmit(&mut self, slot: u64, units: &[Vec<u8>], trace: &mut Trace) -> Vec<CodedPacket>;
    /// True once feedback confirms the whole flow decoded.
    fn is_done(&self) -> bool;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sliding_estimate_blends_prior() {
        let mut e = LinkEstimate::new(Estimator::Sliding { window: 4 }, 0.5);
        assert_eq!(e.value(), 0.5);
        e.observe(true);
        assert_eq!(e.value(), (1.0 + 1.5) / 4.0);
        for _ in 0..10 {
            e.observe(false);
        }
        assert_eq!(e.value(), 0.0);
        let f = LinkEstimate::new(Estimator::Fixed { value: 0.2 }, 0.9);
        assert_eq!(f.value(), 0.2);
    }

    #[test]
    fn names_roundtrip() {
        for r in Reliability::ALL {
            assert_eq!(r.name().parse::<Reliability>().unwrap(), r);
        }
        assert!("tcp".parse::<Reliability>().is_err());
    }
}
