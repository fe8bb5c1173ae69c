#![allow(dead_code)]

use llhuncc::gf::{FieldSpec, Matrix};
use llhuncc::huncc::Security;
use llhuncc::iscode::MixingCode;
use llhuncc::metrics::{file_completion, packet_delay_samples, throughput};
use llhuncc::reliability::{Estimator, Reliability, Trace};
use llhuncc::simnet::{run, run_with, Erasures, NetworkConfig, RunConfig};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SCHEMES: [Reliability; 3] = [Reliability::SrArq, Reliability::SpAcRlnc, Reliability::MpAcRlnc];

/// A mixing code whose every square submatrix is invertible. Fields too small
/// for the deterministic construction are searched exhaustively over matrices
/// with nonzero entries, in lexicographic order.
pub fn mds_code(ell: usize, q: u32) -> MixingCode {
    let spec = FieldSpec::prime(q).unwrap();
    if let Ok(code) = MixingCode::build(ell, spec) {
        return code;
    }
    let cells = ell * ell;
    let base = (q - 1) as u64;
    (0..base.pow(cells as u32))
        .find_map(|idx| {
            let rows: Vec<Vec<u64>> = (0..ell)
                .map(|i| (0..ell).map(|j| 1 + idx / base.pow((i * ell + j) as u32) % base).collect())
                .collect();
            let code = MixingCode::from_matrix(Matrix::from_rows(spec, &rows).unwrap()).ok()?;
            code.all_square_submatrices_invertible().then_some(code)
        })
        .expect("an MDS matrix exists for ell <= q - 2")
}

pub fn single_link(eps: f64, rtt: u64, seed: u64) -> NetworkConfig {
    NetworkConfig {
        epsilons: vec![eps],
        rtt,
        packet_bits: 1024,
        seed,
    }
}

pub fn config(security: Security, reliability: Reliability, packets: usize) -> RunConfig {
    RunConfig {
        security,
        reliability,
        packets,
        ..RunConfig::default()
    }
}

/// One link, RTT 4, six packets, only slot 1 erased.
pub fn golden(reliability: Reliability) -> (Vec<String>, Vec<u64>, u64) {
    let net = single_link(0.0, 4, 1);
    let mut cfg = config(Security::None, reliability, 6);
    cfg.acrlnc.estimator = Estimator::Fixed { value: 0.0 };
    let out = run_with(&net, &cfg, Erasures::Pattern(vec![vec![false, true]]), Trace::enabled()).unwrap();
    let done = file_completion(&out.record).unwrap();
    (out.trace.lines(), packet_delay_samples(&out.record), done)
}

pub const GOLDEN_ACRLNC: [&str; 33] = [
    "0 0 TX NEW [0,0]",
    "1 0 TX NEW [0,1]",
    "1 0 ERASE",
    "2 0 TX NEW [0,2]",
    "2 0 RX [0,0]",
    "2 - DECODE flow=0 unit=0",
    "2 - RELEASE 0",
    "3 0 TX NEW [0,3]",
    "4 0 ACK slot=0 front=1 dof=0",
    "4 0 TX NEW [1,4]",
    "4 0 RX [0,2]",
    "5 0 NACK slot=1 front=1 dof=0",
    "5 0 TX REPAIR [1,4]",
    "5 0 RX [0,3]",
    "6 0 ACK slot=2 front=1 dof=1",
    "6 0 TX NEW [1,5]",
    "6 0 RX [1,4]",
    "7 0 ACK slot=3 front=1 dof=2",
    "7 0 RX [1,4]",
    "7 - DECODE flow=0 unit=1",
    "7 - DECODE flow=0 unit=2",
    "7 - DECODE flow=0 unit=3",
    "7 - DECODE flow=0 unit=4",
    "7 - RELEASE 1",
    "7 - RELEASE 2",
    "7 - RELEASE 3",
    "7 - RELEASE 4",
    "8 0 ACK slot=4 front=1 dof=3",
    "8 0 RX [1,5]",
    "8 - DECODE flow=0 unit=5",
    "8 - RELEASE 5",
    "9 0 ACK slot=5 front=5 dof=0",
    "10 0 ACK slot=6 front=6 dof=0",
];

pub const GOLDEN_SRARQ: [&str; 33] = [
    "0 0 TX NEW 0",
    "1 0 TX NEW 1",
    "1 0 ERASE",
    "2 0 TX NEW 2",
    "2 0 RX [0,0]",
    "2 - DECODE flow=0 unit=0",
    "2 - RELEASE 0",
    "3 0 TX NEW 3",
    "4 0 ACK 0",
    "4 0 TX NEW 4",
    "4 0 RX [2,2]",
    "4 - DECODE flow=0 unit=2",
    "5 0 NACK 1",
    "5 0 TX RETX 1",
    "5 0 RX [3,3]",
    "5 - DECODE flow=0 unit=3",
    "6 0 ACK 2",
    "6 0 TX NEW 5",
    "6 0 RX [4,4]",
    "6 - DECODE flow=0 unit=4",
    "7 0 ACK 3",
    "7 0 RX [1,1]",
    "7 - DECODE flow=0 unit=1",
    "7 - RELEASE 1",
    "7 - RELEASE 2",
    "7 - RELEASE 3",
    "7 - RELEASE 4",
    "8 0 ACK 4",
    "8 0 RX [5,5]",
    "8 - DECODE flow=0 unit=5",
    "8 - RELEASE 5",
    "9 0 ACK 1",
    "10 0 ACK 5",
];

pub fn tx_lines_through(lines: &[String], last_slot: u64) -> Vec<String> {
    lines
        .iter()
        .filter(|l| l.contains(" TX "))
        .filter(|l| l.split(' ').next().unwrap().parse::<u64>().unwrap() <= last_slot)
        .cloned()
        .collect()
}

pub fn bernoulli_pattern(links: usize, slots: usize, eps: f64, seed: u64) -> Vec<Vec<bool>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..links).map(|_| (0..slots).map(|_| rng.gen_bool(eps)).collect()).collect()
}

pub fn check_invariants(net: &NetworkConfig, cfg: &RunConfig) {
    // `run` verifies the released stream against the input before returning.
    let rec = run(net, cfg).unwrap_or_else(|e| panic!("{} {}: {e}", cfg.security, cfg.reliability));
    // Single-path runs without mixing carry one independent stream per link:
    // information packet `j` rides link `j mod ℓ` and is ordered within it.
    let chains = if !cfg.reliability.is_multipath() && cfg.security != Security::Huncc {
        net.ell()
    } else {
        1
    };
    for c in 0..chains {
        let chain: Vec<u64> = rec.release.iter().skip(c).step_by(chains).copied().collect();
        assert!(chain.windows(2).all(|w| w[0] <= w[1]), "out-of-order release");
    }
    assert!(packet_delay_samples(&rec).iter().all(|&d| d >= rec.one_way));
    assert!(throughput(&rec).unwrap() <= Ratio::from_integer(1));
}

/// Two runs whose erasures agree up to a cut slot must transmit identically
/// until feedback about the first differing slot could arrive.
pub fn assert_causal(rel: Reliability, seed: u64) {
    let rtt = 20;
    let base = bernoulli_pattern(4, 3000, 0.2, seed);
    let cut = 60 + 13 * seed as usize;
    let mut other = base.clone();
    let mut flip = ChaCha8Rng::seed_from_u64(seed + 100);
    for row in &mut other {
        for e in &mut row[cut + 1..] {
            *e = flip.gen_bool(0.5);
        }
    }
    let net = NetworkConfig::satellite_5g(0.2, 0.2, 3, rtt, seed);
    let cfg = config(Security::Huncc, rel, 300);
    let a = run_with(&net, &cfg, Erasures::Pattern(base), Trace::enabled()).unwrap();
    let b = run_with(&net, &cfg, Erasures::Pattern(other), Trace::enabled()).unwrap();
    let horizon = cut as u64 + rtt;
    let ta = tx_lines_through(&a.trace.lines(), horizon);
    assert_eq!(ta, tx_lines_through(&b.trace.lines(), horizon), "{rel} seed {seed}");
    assert!(!ta.is_empty());
}

/// Runs the same configuration twice with tracing and demands identical output.
pub fn assert_replays(net: &NetworkConfig, cfg: &RunConfig) {
    let a = run_with(net, cfg, Erasures::Random, Trace::enabled()).unwrap();
    let b = run_with(net, cfg, Erasures::Random, Trace::enabled()).unwrap();
    assert_eq!(a.trace.lines(), b.trace.lines());
    assert_eq!(a.record, b.record);
}
