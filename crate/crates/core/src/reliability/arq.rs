use std::collections::{BTreeSet, HashMap};

use super::{CodedPacket, EventKind, FeedbackKind, FeedbackMsg, PacketKind, Sender, Trace};

/// Selective-repeat ARQ on one link. A NACK arrives exactly one RTT after
/// the transmission, which is when the retransmission timer expires, so the
/// NACKed units are exactly the units eligible for retransmission.
pub struct ArqSender {
    flow: usize,
    link: usize,
    n_units: usize,
    next_new: usize,
    acked: Vec<bool>,
    acked_count: usize,
    cumulative: usize,
    expired: BTreeSet<usize>,
    sent_at: HashMap<u64, usize>,
    first_tx: Vec<u64>,
}

impl ArqSender {
    pub fn new(flow: usize, link: usize, n_units: usize) -> Self {
        ArqSender {
            flow,
            link,
            n_units,
            next_new: 0,
            acked: vec![false; n_units],
            acked_count: 0,
            cumulative: 0,
            expired: BTreeSet::new(),
            sent_at: HashMap::new(),
            first_tx: Vec::with_capacity(n_units),
        }
    }

    fn ack(&mut self, u: usize) {
        if !self.acked[u] {
            self.acked[u] = true;
            self.acked_count += 1;
            self.expired.remove(&u);
        }
    }
}

impl Sender for ArqSender {
    fn on_feedback(&mut self, now: u64, fb: &FeedbackMsg, trace: &mut Trace) {
        let Some(u) = self.sent_at.remove(&fb.slot) else {
            return;
        };
        while self.cumulative < fb.front.min(self.n_units) {
            self.ack(self.cumulative);
            self.cumulative += 1;
        }
        match fb.kind {
            FeedbackKind::Ack => {
                trace.push(now, Some(self.link), EventKind::Ack, || format!("{u}"));
                self.ack(u);
            }
            FeedbackKind::Nack => {
                trace.push(now, Some(self.link), EventKind::Nack, || format!("{u}"));
                if !self.acked[u] {
                    self.expired.insert(u);
                }
            }
        }
    }

    fn transmit(&mut self, slot: u64, units: &[Vec<u8>], trace: &mut Trace) -> Vec<CodedPacket> {
        let (u, label) = if let Some(u) = self.expired.pop_first() {
            (u, "RETX")
        } else if self.next_new < self.n_units {
            self.next_new += 1;
            self.first_tx.push(slot);
            (self.next_new - 1, "NEW")
        } else {
            return Vec::new();
        };
        self.sent_at.insert(slot, u);
        trace.push(slot, Some(self.link), EventKind::Tx, || format!("{label} {u}"));
        vec![CodedPacket {
            flow: self.flow,
            link: self.link,
            kind: PacketKind::SystematicArq,
            lo: u,
            coefficients: vec![1],
            payload: units[u].clone(),
            birth_slot: self.first_tx[u],
        }]
    }

    fn is_done(&self) -> bool {
        self.acked_count == self.n_units
    }
}
