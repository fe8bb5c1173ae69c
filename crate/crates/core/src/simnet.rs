//! Slotted simulation of ℓ parallel erasure links with delayed, noiseless
//! feedback.
//!
//! Slot order: feedback arrivals, sender decisions, one erasure draw per
//! link (consumed whether or not the link transmits), then receiver
//! arrivals. A packet sent in slot `τ` reaches the receiver in slot
//! `τ + RTT/2`; the feedback it triggers reaches the sender in `τ + RTT`.

use std::collections::HashMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::OpCounter;
use crate::huncc::{self, HunccConfig, HunccError, SecuredStream, Security, Unit};
use crate::mceliece::{CipherModel, GoppaParams};
use crate::metrics::{OpCounts, RunRecord};
use crate::reliability::{
    AcRlncParams, ArqSender, CodedPacket, EventKind, FeedbackKind, FeedbackMsg, Reliability, RlncDecoder,
    RlncSender, Sender, Trace,
};

/// Slots without any decode or release before a run is declared stalled.
pub const DEFAULT_STALL_LIMIT: u64 = 10_000;

const STREAM_COEFFS: u64 = 1_000;
const STREAM_DATA: u64 = 2_000;
const STREAM_CIPHER: u64 = 3_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no progress for {limit} slots (stalled at slot {slot})")]
    Stalled { slot: u64, limit: u64 },
    #[error("released stream differs from the input stream")]
    StreamMismatch,
    #[error(transparent)]
    Huncc(#[from] HunccError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub epsilons: Vec<f64>,
    pub rtt: u64,
    pub packet_bits: usize,
    pub seed: u64,
}

impl NetworkConfig {
    /// Link 0 is the satellite link, links 1..ℓ the 5G links.
    pub fn satellite_5g(eps_sat: f64, eps_5g: f64, n_5g: usize, rtt: u64, seed: u64) -> Self {
        let mut epsilons = vec![eps_sat];
        epsilons.extend(std::iter::repeat_n(eps_5g, n_5g));
        NetworkConfig {
            epsilons,
            rtt,
            packet_bits: 1024,
            seed,
        }
    }

    pub fn ell(&self) -> usize {
        self.epsilons.len()
    }

    pub fn one_way(&self) -> u64 {
        self.rtt / 2
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.epsilons.is_empty() {
            return Err(SimError::Config("at least one link is required".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(SimError::Config(format!("erasure probability {e} outside [0, 1]")));
        }
        if self.rtt < 2 || !self.rtt.is_multiple_of(2) {
            return Err(SimError::Config(format!("rtt = {} must be even and at least 2", self.rtt)));
        }
        if self.packet_bits == 0 || !self.packet_bits.is_multiple_of(8) {
            return Err(SimError::Config(format!("packet_bits = {} is not a positive multiple of 8", self.packet_bits)));
        }
        Ok(())
    }
}

/// Placement of HUNCC's transmitted units on single-path links.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assignment {
    /// The transmitted sequence is dealt to the links in turn.
    RoundRobin,
    /// Substream `i` travels on link `i`.
    Pinned,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub security: Security,
    pub reliability: Reliability,
    /// Information packets in the workload.
    pub packets: usize,
    /// Encrypted substreams under HUNCC.
    pub huncc_c: usize,
    pub assignment: Assignment,
    /// When false, encrypted HUNCC units stay on links `0..c`: single-path
    /// runs use pinned placement and multipath runs are rejected.
    pub allow_encrypted_on_untrusted: bool,
    pub cipher: GoppaParams,
    pub acrlnc: AcRlncParams,
    /// Carry and check real payloads; otherwise only coefficients are
    /// simulated and stream equality is not checked.
    pub verify_payloads: bool,
    pub stall_limit: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            security: Security::None,
            reliability: Reliability::SpAcRlnc,
            packets: 1000,
            huncc_c: 1,
            assignment: Assignment::RoundRobin,
            allow_encrypted_on_untrusted: true,
            cipher: GoppaParams::classic(),
            acrlnc: AcRlncParams::default(),
            verify_payloads: true,
            stall_limit: DEFAULT_STALL_LIMIT,
        }
    }
}

/// Erasure source: seeded Bernoulli draws, or a fixed per-link pattern
/// (`pattern[link][slot]`, slots past the end are delivered).
#[derive(Clone, Debug)]
pub enum Erasures {
    Random,
    Pattern(Vec<Vec<bool>>),
}

pub struct Channel {
    epsilons: Vec<f64>,
    rngs: Vec<ChaCha8Rng>,
    pattern: Option<Vec<Vec<bool>>>,
}

impl Channel {
    /// Link `i` draws from its own stream of the master seed, so its
    /// realisation does not depend on the other links.
    pub fn new(epsilons: &[f64], seed: u64, erasures: Erasures) -> Self {
        let rngs = (0..epsilons.len())
            .map(|l| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                r.set_stream(l as u64);
                r
            })
            .collect();
        Channel {
            epsilons: epsilons.to_vec(),
            rngs,
            pattern: match erasures {
                Erasures::Random => None,
                Erasures::Pattern(p) => Some(p),
            },
        }
    }

    /// Whether `link` erases in `slot`; call once per link per slot.
    pub fn step(&mut self, link: usize, slot: u64) -> bool {
        let u: f64 = self.rngs[link].gen();
        match &self.pattern {
            Some(p) => p.get(link).and_then(|v| v.get(slot as usize)).copied().unwrap_or(false),
            None => u < self.epsilons[link],
        }
    }
}

fn substream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

struct FlowPlan {
    links: Vec<usize>,
    units: Vec<Vec<u8>>,
}

enum Reassembly {
    Plain(Vec<(usize, usize)>),
    McEliece {
        groups: Vec<(CipherModel, Vec<usize>)>,
    },
    Huncc {
        cfg: HunccConfig,
        template: Box<SecuredStream>,
        placement: Vec<Vec<(usize, usize)>>,
    },
}

struct Plan {
    flows: Vec<FlowPlan>,
    info_deps: Vec<Vec<(usize, usize)>>,
    chains: Vec<Vec<usize>>,
    reassembly: Reassembly,
    payload_rate: f64,
    ops: OpCounts,
}

fn cipher_seed(seed: u64, group: usize) -> u64 {
    substream_rng(seed, STREAM_CIPHER + group as u64).next_u64()
}

fn build_plan(net: &NetworkConfig, cfg: &RunConfig, data: &[u8]) -> Result<Plan, SimError> {
    let ell = net.ell();
    let n = cfg.packets;
    let pb = net.packet_bits / 8;
    let info = |j: usize| data[j * pb..(j + 1) * pb].to_vec();
    let mp = cfg.reliability.is_multipath();
    let groups: Vec<Vec<usize>> = if mp {
        vec![(0..n).collect()]
    } else {
        (0..ell).map(|l| (l..n).step_by(ell).collect()).collect()
    };
    let group_links = |g: usize| if mp { (0..ell).collect() } else { vec![g] };
    let params = cfg.cipher;
    if cfg.security != Security::None && params.n() != net.packet_bits {
        return Err(SimError::Config(format!(
            "cipher length {} must equal packet_bits {}",
            params.n(),
            net.packet_bits
        )));
    }
    let eta = params.k() as f64 / params.n() as f64;

    match cfg.security {
        Security::None => {
            let mut info_deps = vec![Vec::new(); n];
            let mut map = vec![(0, 0); n];
            let flows = groups
                .iter()
                .enumerate()
                .map(|(g, members)| {
                    for (pos, &j) in members.iter().enumerate() {
                        info_deps[j].push((g, pos));
                        map[j] = (g, pos);
                    }
                    FlowPlan {
                        links: group_links(g),
                        units: members.iter().map(|&j| info(j)).collect(),
                    }
                })
                .collect();
            Ok(Plan {
                flows,
                info_deps,
                chains: groups,
                reassembly: Reassembly::Plain(map),
                payload_rate: 1.0,
                ops: OpCounts::default(),
            })
        }
        Security::McElieceAll => {
            let mut info_deps = vec![Vec::new(); n];
            let mut flows = Vec::new();
            let mut ciphers = Vec::new();
            let mut total_units = 0u64;
            for (g, members) in groups.iter().enumerate() {
                let cipher = CipherModel::modeled(params, cipher_seed(net.seed, g));
                let stream: Vec<u8> = members.iter().flat_map(|&j| info(j)).collect();
                let units = huncc::encrypt_bytes(&cipher, &stream, g, members.len(), net.packet_bits)?;
                for (u, unit) in units.iter().enumerate() {
                    for local in unit.first_block..=unit.last_block {
                        info_deps[members[local]].push((g, u));
                    }
                }
                total_units += units.len() as u64;
                flows.push(FlowPlan {
                    links: group_links(g),
                    units: units.into_iter().map(|u| u.payload.expect("fresh units carry payloads")).collect(),
                });
                ciphers.push((cipher, members.clone()));
            }
            Ok(Plan {
                flows,
                info_deps,
                chains: groups,
                reassembly: Reassembly::McEliece { groups: ciphers },
                payload_rate: eta,
                ops: OpCounts {
                    mix_ops: 0,
                    enc_ops: total_units * params.encryption_ops(),
                    dec_ops: total_units * params.decryption_ops(),
                },
            })
        }
        Security::Huncc => {
            let c = cfg.huncc_c;
            let assignment = if cfg.allow_encrypted_on_untrusted {
                cfg.assignment
            } else if mp && c > 0 {
                return Err(SimError::Config(
                    "multipath HUNCC sends encrypted units on untrusted links, which is disabled".into(),
                ));
            } else {
                Assignment::Pinned
            };
            let hcfg = HunccConfig::new(ell, c, CipherModel::modeled(params, cipher_seed(net.seed, 0)), net.packet_bits)?;
            let stream = huncc::secure_encode(&hcfg, data, &OpCounter::new())?;
            // transmitted order per block: cipher units completed by it, then plain units
            let mut global: Vec<(usize, usize)> = Vec::new();
            let mut next_cipher = vec![0usize; c];
            for b in 0..stream.blocks {
                for (s, next) in next_cipher.iter_mut().enumerate() {
                    while *next < stream.substreams[s].len() && stream.substreams[s][*next].last_block == b {
                        global.push((s, *next));
                        *next += 1;
                    }
                }
                for s in c..ell {
                    global.push((s, b));
                }
            }
            let mut placement: Vec<Vec<(usize, usize)>> =
                stream.substreams.iter().map(|u| vec![(0, 0); u.len()]).collect();
            let n_flows = if mp { 1 } else { ell };
            let mut flows: Vec<FlowPlan> = (0..n_flows)
                .map(|f| FlowPlan {
                    links: group_links(f),
                    units: Vec::new(),
                })
                .collect();
            for (g, &(s, j)) in global.iter().enumerate() {
                let f = match (mp, assignment) {
                    (true, _) => 0,
                    (false, Assignment::RoundRobin) => g % ell,
                    (false, Assignment::Pinned) => s,
                };
                placement[s][j] = (f, flows[f].units.len());
                flows[f]
                    .units
                    .push(stream.substreams[s][j].payload.clone().expect("fresh units carry payloads"));
            }
            let info_deps = (0..n)
                .map(|i| {
                    stream
                        .units_of_block(i / ell)
                        .into_iter()
                        .map(|(s, j)| placement[s][j])
                        .collect()
                })
                .collect();
            let cipher_units: u64 = stream.substreams[..c].iter().map(|u| u.len() as u64).sum();
            let mix_bits = 2 * stream.blocks as u64 * hcfg.mults_per_block() * 8;
            let template = SecuredStream {
                substreams: stream
                    .substreams
                    .iter()
                    .map(|units| {
                        units
                            .iter()
                            .map(|u| Unit {
                                payload: None,
                                ..u.clone()
                            })
                            .collect()
                    })
                    .collect(),
                ..stream
            };
            Ok(Plan {
                flows,
                info_deps,
                chains: vec![(0..n).collect()],
                reassembly: Reassembly::Huncc {
                    cfg: hcfg,
                    template: Box::new(template),
                    placement,
                },
                payload_rate: (c as f64 * eta + (ell - c) as f64) / ell as f64,
                ops: OpCounts {
                    mix_ops: mix_bits,
                    enc_ops: cipher_units * params.encryption_ops(),
                    dec_ops: cipher_units * params.decryption_ops(),
                },
            })
        }
    }
}

fn reassemble(plan: &Plan, decoded: &[Vec<Option<Vec<u8>>>], packet_bits: usize) -> Result<Vec<u8>, SimError> {
    let get = |(f, u): (usize, usize)| decoded[f][u].clone().ok_or(SimError::StreamMismatch);
    match &plan.reassembly {
        Reassembly::Plain(map) => {
            let mut out = Vec::new();
            for &fu in map {
                out.extend(get(fu)?);
            }
            Ok(out)
        }
        Reassembly::McEliece { groups } => {
            let pb = packet_bits / 8;
            let n: usize = groups.iter().map(|g| g.1.len()).sum();
            let mut out = vec![0u8; n * pb];
            for (g, (cipher, members)) in groups.iter().enumerate() {
                let units: Vec<Unit> = decoded[g]
                    .iter()
                    .map(|p| Unit {
                        payload: p.clone(),
                        first_block: 0,
                        last_block: 0,
                    })
                    .collect();
                let bytes = huncc::decrypt_bytes(cipher, &units, g, members.len(), packet_bits)?;
                for (local, &j) in members.iter().enumerate() {
                    out[j * pb..(j + 1) * pb].copy_from_slice(&bytes[local * pb..(local + 1) * pb]);
                }
            }
            Ok(out)
        }
        Reassembly::Huncc {
            cfg,
            template,
            placement,
        } => {
            let mut stream = SecuredStream::clone(template);
            for (s, units) in stream.substreams.iter_mut().enumerate() {
                for (j, u) in units.iter_mut().enumerate() {
                    u.payload = Some(get(placement[s][j])?);
                }
            }
            Ok(huncc::secure_decode(cfg, &stream, &OpCounter::new())?)
        }
    }
}

/// Result of one simulation run.
pub struct RunOutput {
    pub record: RunRecord,
    pub trace: Trace,
}

enum Arrival {
    Delivered(CodedPacket),
    Erased { link: usize, flow: usize },
}

/// Runs the workload to completion with seeded erasures.
pub fn run(net: &NetworkConfig, cfg: &RunConfig) -> Result<RunRecord, SimError> {
    Ok(run_with(net, cfg, Erasures::Random, Trace::disabled())?.record)
}

pub fn run_with(net: &NetworkConfig, cfg: &RunConfig, erasures: Erasures, mut trace: Trace) -> Result<RunOutput, SimError> {
    net.validate()?;
    if cfg.packets == 0 {
        return Err(SimError::Config("workload must contain at least one packet".into()));
    }
    let ell = net.ell();
    let ow = net.one_way();
    let pb = net.packet_bits / 8;
    let mut data = vec![0u8; cfg.packets * pb];
    substream_rng(net.seed, STREAM_DATA).fill_bytes(&mut data);

    let mut plan = build_plan(net, cfg, &data)?;
    if !cfg.verify_payloads {
        for f in &mut plan.flows {
            for u in &mut f.units {
                *u = Vec::new();
            }
        }
    }

    let mut flow_of_link = vec![usize::MAX; ell];
    let mut senders: Vec<Box<dyn Sender>> = Vec::new();
    for (f, flow) in plan.flows.iter().enumerate() {
        for &l in &flow.links {
            flow_of_link[l] = f;
        }
        let n_units = flow.units.len();
        let sender: Box<dyn Sender> = match cfg.reliability {
            Reliability::SrArq => Box::new(ArqSender::new(f, flow.links[0], n_units)),
            Reliability::SpAcRlnc | Reliability::MpAcRlnc => {
                let priors: Vec<f64> = flow.links.iter().map(|&l| net.epsilons[l]).collect();
                Box::new(RlncSender::new(
                    f,
                    flow.links.clone(),
                    &priors,
                    n_units,
                    net.rtt,
                    cfg.acrlnc,
                    substream_rng(net.seed, STREAM_COEFFS + f as u64),
                ))
            }
        };
        senders.push(sender);
    }
    let mut decoders: Vec<RlncDecoder> = plan.flows.iter().map(|f| RlncDecoder::new(f.units.len())).collect();
    let mut decode_slot: Vec<Vec<Option<u64>>> = plan.flows.iter().map(|f| vec![None; f.units.len()]).collect();
    let mut unit_first_tx: Vec<Vec<Option<u64>>> = plan.flows.iter().map(|f| vec![None; f.units.len()]).collect();
    let mut channel = Channel::new(&net.epsilons, net.seed, erasures);

    let n = cfg.packets;
    let mut release = vec![u64::MAX; n];
    let mut chain_pos = vec![0usize; plan.chains.len()];
    let mut released = 0usize;
    let mut link_tx = vec![0u64; ell];
    let mut arrivals: HashMap<u64, Vec<Arrival>> = HashMap::new();
    let mut feedback: HashMap<u64, Vec<FeedbackMsg>> = HashMap::new();
    let mut last_progress = 0u64;
    let mut slot = 0u64;

    loop {
        if let Some(fbs) = feedback.remove(&slot) {
            for fb in fbs {
                senders[flow_of_link[fb.link]].on_feedback(slot, &fb, &mut trace);
            }
        }
        if released == n && senders.iter().all(|s| s.is_done()) {
            break;
        }

        let mut sending: Vec<Option<CodedPacket>> = vec![None; ell];
        for (f, s) in senders.iter_mut().enumerate() {
            for p in s.transmit(slot, &plan.flows[f].units, &mut trace) {
                let newest = p.lo + p.coefficients.len() - 1;
                unit_first_tx[f][newest].get_or_insert(slot);
                let l = p.link;
                sending[l] = Some(p);
            }
        }
        for (l, pkt) in sending.into_iter().enumerate() {
            let erased = channel.step(l, slot);
            let Some(pkt) = pkt else { continue };
            link_tx[l] += 1;
            let arrival = if erased {
                trace.push(slot, Some(l), EventKind::Erase, String::new);
                Arrival::Erased { link: l, flow: pkt.flow }
            } else {
                Arrival::Delivered(pkt)
            };
            arrivals.entry(slot + ow).or_default().push(arrival);
        }

        if let Some(arrs) = arrivals.remove(&slot) {
            let mut reports = Vec::with_capacity(arrs.len());
            for a in arrs {
                match a {
                    Arrival::Delivered(p) => {
                        trace.push(slot, Some(p.link), EventKind::Rx, || {
                            let (lo, hi) = p.window();
                            format!("[{lo},{hi}]")
                        });
                        let ids = decoders[p.flow].receive(p.lo, &p.coefficients, &p.payload);
                        for id in ids {
                            decode_slot[p.flow][id] = Some(slot);
                            last_progress = slot;
                            trace.push(slot, None, EventKind::Decode, || format!("flow={} unit={id}", p.flow));
                        }
                        reports.push((p.link, p.flow, FeedbackKind::Ack));
                    }
                    Arrival::Erased { link, flow } => reports.push((link, flow, FeedbackKind::Nack)),
                }
            }
            for (link, flow, kind) in reports {
                feedback.entry(slot + ow).or_default().push(FeedbackMsg {
                    link,
                    slot: slot - ow,
                    issued: slot,
                    kind,
                    front: decoders[flow].front(),
                    dof: decoders[flow].dof_beyond_front(),
                });
            }
            for (c, chain) in plan.chains.iter().enumerate() {
                while chain_pos[c] < chain.len() {
                    let j = chain[chain_pos[c]];
                    let ready = plan.info_deps[j].iter().all(|&(f, u)| decode_slot[f][u].is_some());
                    if !ready {
                        break;
                    }
                    release[j] = slot;
                    released += 1;
                    chain_pos[c] += 1;
                    last_progress = slot;
                    trace.push(slot, None, EventKind::Release, || format!("{j}"));
                }
            }
        }

        if slot - last_progress > cfg.stall_limit {
            return Err(SimError::Stalled {
                slot,
                limit: cfg.stall_limit,
            });
        }
        slot += 1;
    }

    let first_tx: Vec<u64> = plan
        .info_deps
        .iter()
        .map(|deps| {
            deps.iter()
                .map(|&(f, u)| unit_first_tx[f][u].expect("released units were sent"))
                .max()
                .expect("every packet has a dependency")
        })
        .collect();

    if cfg.verify_payloads {
        let payloads: Vec<Vec<Option<Vec<u8>>>> = decoders.into_iter().map(|d| d.into_payloads()).collect();
        if reassemble(&plan, &payloads, net.packet_bits)? != data {
            return Err(SimError::StreamMismatch);
        }
    }

    let start_slot = unit_first_tx.iter().flatten().flatten().copied().min().unwrap_or(0);
    let transmissions: u64 = link_tx.iter().sum();
    let secured_units: u64 = plan.flows.iter().map(|f| f.units.len() as u64).sum();
    Ok(RunOutput {
        record: RunRecord {
            info_packets: n,
            packet_bits: net.packet_bits,
            first_tx,
            start_slot,
            release,
            one_way: ow,
            transmissions,
            link_transmissions: link_tx,
            info_bits_delivered: (n * net.packet_bits) as u64,
            bits_sent: transmissions * net.packet_bits as u64,
            secured_units,
            payload_rate: plan.payload_rate,
            ops: plan.ops,
            end_slot: slot,
        },
        trace,
    })
}
