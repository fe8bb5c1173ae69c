use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    AcRlncParams, CodedPacket, EventKind, FeedbackKind, FeedbackMsg, LinkEstimate, PacketKind, Sender, Trace,
};
use crate::gf::gf256;

/// Adaptive causal RLNC over a sliding window `[w_min, next_new)`, shared
/// by all links of the session (one link: single-path; several: multipath).
///
/// Each slot the DoF deficit is
/// `Δ = span − dof_fb − Σ_links inflight_l · (1 − ε̂_l)`,
/// where `dof_fb` is the receiver's DoF beyond its in-order front in the
/// latest feedback and `inflight_l` counts the link's transmissions whose
/// feedback is still outstanding. Links are served in order of increasing
/// `ε̂` (ties by link id): a link sends a repair when `Δ > th` or the window
/// is at its cap, otherwise a new unit if one is left, otherwise idles.
/// After the last new unit the repair test uses `min(th, 0)`.
/// Every transmission lowers `Δ` by its expected delivery `1 − ε̂`.
pub struct RlncSender {
    flow: usize,
    links: Vec<usize>,
    est: Vec<LinkEstimate>,
    inflight: Vec<VecDeque<u64>>,
    n_units: usize,
    next_new: usize,
    w_min: usize,
    dof_fb: usize,
    cap: usize,
    params: AcRlncParams,
    first_tx: Vec<u64>,
    rng: ChaCha8Rng,
}

impl RlncSender {
    /// `priors[i]` seeds the estimate of `links[i]`.
    pub fn new(
        flow: usize,
        links: Vec<usize>,
        priors: &[f64],
        n_units: usize,
        rtt: u64,
        params: AcRlncParams,
        rng: ChaCha8Rng,
    ) -> Self {
        assert_eq!(links.len(), priors.len(), "one prior per link");
        let cap = (params.cap_rtts as u64 * rtt).max(1) as usize * links.len();
        RlncSender {
            flow,
            est: priors.iter().map(|&p| LinkEstimate::new(params.estimator, p)).collect(),
            inflight: vec![VecDeque::new(); links.len()],
            links,
            n_units,
            next_new: 0,
            w_min: 0,
            dof_fb: 0,
            cap,
            params,
            first_tx: Vec::with_capacity(n_units),
            rng,
        }
    }

    /// Current window `[w_min, next_new)`.
    pub fn window(&self) -> (usize, usize) {
        (self.w_min, self.next_new)
    }

    /// DoF deficit before this slot's transmissions.
    pub fn deficit(&self) -> f64 {
        let expected: f64 = self
            .inflight
            .iter()
            .zip(&self.est)
            .map(|(q, e)| q.len() as f64 * (1.0 - e.value()))
            .sum();
        (self.next_new - self.w_min) as f64 - self.dof_fb as f64 - expected
    }

    pub fn estimate(&self, link: usize) -> Option<f64> {
        self.links.iter().position(|&l| l == link).map(|i| self.est[i].value())
    }
}

impl Sender for RlncSender {
    fn on_feedback(&mut self, now: u64, fb: &FeedbackMsg, trace: &mut Trace) {
        let Some(i) = self.links.iter().position(|&l| l == fb.link) else {
            return;
        };
        let nack = fb.kind == FeedbackKind::Nack;
        self.est[i].observe(nack);
        if let Some(pos) = self.inflight[i].iter().position(|&s| s == fb.slot) {
            self.inflight[i].remove(pos);
        }
        trace.push(now, Some(fb.link), if nack { EventKind::Nack } else { EventKind::Ack }, || {
            format!("slot={} front={} dof={}", fb.slot, fb.front, fb.dof)
        });
        if fb.front >= self.w_min {
            self.w_min = fb.front.min(self.n_units);
            self.dof_fb = fb.dof;
        }
    }

    fn transmit(&mut self, slot: u64, units: &[Vec<u8>], trace: &mut Trace) -> Vec<CodedPacket> {
        if self.is_done() {
            return Vec::new();
        }
        let mut delta = self.deficit();
        let mut order: Vec<usize> = (0..self.links.len()).collect();
        order.sort_by(|&a, &b| {
            self.est[a]
                .value()
                .total_cmp(&self.est[b].value())
                .then(self.links[a].cmp(&self.links[b]))
        });
        let mut out = Vec::new();
        for i in order {
            let span = self.next_new - self.w_min;
            // Once every unit has entered the window a positive deficit always
            // triggers a repair, so a threshold of one or more cannot stall the tail.
            let th = if self.next_new < self.n_units {
                self.params.threshold
            } else {
                self.params.threshold.min(0.0)
            };
            let kind = if span > 0 && (delta > th || span >= self.cap) {
                PacketKind::RlncRepair
            } else if self.next_new < self.n_units {
                self.next_new += 1;
                self.first_tx.push(slot);
                delta += 1.0;
                PacketKind::RlncNew
            } else {
                continue;
            };
            let (lo, hi) = (self.w_min, self.next_new);
            let coefficients: Vec<u8> = (lo..hi).map(|_| self.rng.gen_range(1..=255u8)).collect();
            let len = units.get(lo).map_or(0, Vec::len);
            let mut payload = vec![0u8; len];
            for (c, u) in coefficients.iter().zip(&units[lo..hi]) {
                gf256::axpy(&mut payload, *c, u);
            }
            delta -= 1.0 - self.est[i].value();
            self.inflight[i].push_back(slot);
            let link = self.links[i];
            trace.push(slot, Some(link), EventKind::Tx, || {
                let label = if kind == PacketKind::RlncNew { "NEW" } else { "REPAIR" };
                format!("{label} [{lo},{}]", hi - 1)
            });
            out.push(CodedPacket {
                flow: self.flow,
                link,
                kind,
                lo,
                coefficients,
                payload,
                birth_slot: self.first_tx[lo],
            });
        }
        out
    }

    fn is_done(&self) -> bool {
        self.w_min >= self.n_units
    }
}
