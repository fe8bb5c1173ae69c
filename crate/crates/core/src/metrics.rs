//! Performance metrics computed from a finished run.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no bits were sent")]
    NothingSent,
    #[error("frame size must be at least 1")]
    EmptyFrame,
    #[error("run record has no packets")]
    Empty,
}

/// Binary-operation counters of the security stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    /// Mixing and unmixing, `m` binary operations per field multiplication.
    pub mix_ops: u64,
    pub enc_ops: u64,
    pub dec_ops: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub info_packets: usize,
    pub packet_bits: usize,
    /// Per information packet: the slot by which every unit it depends on
    /// had been sent at least once, i.e. when the packet is first transmitted.
    pub first_tx: Vec<u64>,
    /// Slot of the first transmission of the session.
    pub start_slot: u64,
    /// Per information packet: slot it was released in order.
    pub release: Vec<u64>,
    pub one_way: u64,
    pub transmissions: u64,
    pub link_transmissions: Vec<u64>,
    pub info_bits_delivered: u64,
    pub bits_sent: u64,
    /// Units produced by the security stage.
    pub secured_units: u64,
    /// Information carried per secured unit when encrypted units keep their
    /// size (1 without security).
    pub payload_rate: f64,
    pub ops: OpCounts,
    pub end_slot: u64,
}

/// Information bits delivered per bit sent.
pub fn throughput(rec: &RunRecord) -> Result<Ratio<u64>, MetricsError> {
    if rec.bits_sent == 0 {
        return Err(MetricsError::NothingSent);
    }
    Ok(Ratio::new(rec.info_bits_delivered, rec.bits_sent))
}

/// Reliability efficiency (secured units per transmission) times the
/// payload rate of the security stage.
pub fn throughput_payload(rec: &RunRecord) -> Result<f64, MetricsError> {
    if rec.transmissions == 0 {
        return Err(MetricsError::NothingSent);
    }
    Ok(rec.secured_units as f64 / rec.transmissions as f64 * rec.payload_rate)
}

/// Per-packet in-order delay `release − first_tx`.
pub fn packet_delay_samples(rec: &RunRecord) -> Vec<u64> {
    rec.release.iter().zip(&rec.first_tx).map(|(r, f)| r - f).collect()
}

/// `(mean, max)` of a delay sample.
fn summarize(d: &[u64]) -> Result<(f64, u64), MetricsError> {
    let max = *d.iter().max().ok_or(MetricsError::Empty)?;
    Ok((d.iter().sum::<u64>() as f64 / d.len() as f64, max))
}

pub fn packet_delays(rec: &RunRecord) -> Result<(f64, u64), MetricsError> {
    summarize(&packet_delay_samples(rec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpec {
    pub k: usize,
}

impl Default for FrameSpec {
    fn default() -> Self {
        FrameSpec { k: 100 }
    }
}

/// Per-frame delay: last release minus first transmission over the frame's
/// `k` packets (the final frame may be shorter).
pub fn frame_delay_samples(rec: &RunRecord, spec: FrameSpec) -> Result<Vec<u64>, MetricsError> {
    if spec.k == 0 {
        return Err(MetricsError::EmptyFrame);
    }
    Ok(rec
        .release
        .chunks(spec.k)
        .zip(rec.first_tx.chunks(spec.k))
        .map(|(r, f)| r.iter().max().unwrap() - f.iter().min().unwrap())
        .collect())
}

pub fn frame_delays(rec: &RunRecord, spec: FrameSpec) -> Result<(f64, u64), MetricsError> {
    summarize(&frame_delay_samples(rec, spec)?)
}

/// Slots from the first transmission of the session through the slot the
/// whole file is released, inclusive.
pub fn file_completion(rec: &RunRecord) -> Result<u64, MetricsError> {
    let last = rec.release.iter().max().ok_or(MetricsError::Empty)?;
    Ok(last - rec.start_slot + 1)
}

pub fn complexity_report(rec: &RunRecord) -> OpCounts {
    rec.ops
}
