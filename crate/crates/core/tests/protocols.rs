mod common;

use common::*;
use llhuncc::huncc::Security;
use llhuncc::metrics::{file_completion, frame_delays, packet_delay_samples, packet_delays, throughput, FrameSpec};
use llhuncc::reliability::{Reliability, RlncDecoder, Trace};
use llhuncc::simnet::{
    run, run_with, Assignment, Channel, Erasures, NetworkConfig, SimError,
};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn golden_trace_acrlnc() {
    let (lines, delays, done) = golden(Reliability::SpAcRlnc);
    assert_eq!(lines, common::GOLDEN_ACRLNC);
    assert_eq!(lines.iter().filter(|l| l.contains("REPAIR")).count(), 1);
    assert_eq!(delays, [2, 6, 5, 4, 3, 2]);
    assert_eq!(done, 9);
}

#[test]
fn golden_trace_srarq() {
    let (lines, delays, done) = golden(Reliability::SrArq);
    assert_eq!(lines, common::GOLDEN_SRARQ);
    // The erased packet is redelivered RTT + one-way slots after its first attempt.
    assert_eq!(delays[1], 4 + 2);
    assert_eq!(delays, [2, 6, 5, 4, 3, 2]);
    assert_eq!(done, 9);
}

#[test]
fn lossless_single_link_is_pass_through() {
    let n = 1000;
    let net = single_link(0.0, 20, 5);
    let mut releases = Vec::new();
    for rel in [Reliability::SrArq, Reliability::SpAcRlnc] {
        let rec = run(&net, &config(Security::None, rel, n)).unwrap();
        assert!(packet_delay_samples(&rec).iter().all(|&d| d == 10));
        assert_eq!(packet_delays(&rec).unwrap(), (10.0, 10));
        assert_eq!(file_completion(&rec).unwrap(), n as u64 + 10);
        assert_eq!(frame_delays(&rec, FrameSpec::default()).unwrap().1, 100 + 10 - 1);
        assert_eq!(throughput(&rec).unwrap(), Ratio::from_integer(1));
        releases.push(rec.release);
    }
    assert_eq!(releases[0], releases[1]);
}

#[test]
fn lossless_four_links_deliver_one_way() {
    let net = NetworkConfig::satellite_5g(0.0, 0.0, 3, 20, 2);
    for sec in Security::ALL {
        for rel in SCHEMES {
            let rec = run(&net, &config(sec, rel, 400)).unwrap();
            assert!(packet_delay_samples(&rec).iter().all(|&d| d == 10), "{sec} {rel}");
            assert_eq!(rec.transmissions, rec.secured_units);
        }
    }
    let arq = run(&net, &config(Security::None, Reliability::SrArq, 400)).unwrap();
    let sp = run(&net, &config(Security::None, Reliability::SpAcRlnc, 400)).unwrap();
    assert_eq!(arq.release, sp.release);
}

#[test]
fn mceliece_lossless_throughput_is_the_code_rate() {
    let net = single_link(0.0, 20, 3);
    let rec = run(&net, &config(Security::McElieceAll, Reliability::SrArq, 524)).unwrap();
    // 524 packets of 1024 bits fill exactly 1024 chunks of 524 bits.
    assert_eq!(throughput(&rec).unwrap(), Ratio::new(524, 1024));
}

#[test]
fn decisions_are_causal() {
    for rel in SCHEMES {
        for seed in 0..4u64 {
            assert_causal(rel, seed);
        }
    }
}

#[test]
fn replay_is_deterministic() {
    let net = NetworkConfig::satellite_5g(0.15, 0.05, 3, 20, 77);
    for sec in Security::ALL {
        for rel in SCHEMES {
            assert_replays(&net, &config(sec, rel, 300));
        }
    }
}

#[test]
fn every_scheme_releases_the_input_stream_in_order() {
    for (i, (es, e5)) in [(0.1, 0.1), (0.3, 0.01), (0.01, 0.3), (0.25, 0.25)].into_iter().enumerate() {
        let net = NetworkConfig::satellite_5g(es, e5, 3, 20, i as u64);
        for sec in Security::ALL {
            for rel in SCHEMES {
                check_invariants(&net, &config(sec, rel, 500));
            }
        }
    }
}

#[test]
fn pinned_and_restricted_placements_round_trip() {
    let net = NetworkConfig::satellite_5g(0.1, 0.2, 3, 20, 9);
    let mut cfg = config(Security::Huncc, Reliability::SpAcRlnc, 400);
    cfg.assignment = Assignment::Pinned;
    check_invariants(&net, &cfg);
    let mut cfg = config(Security::Huncc, Reliability::SrArq, 400);
    cfg.allow_encrypted_on_untrusted = false;
    check_invariants(&net, &cfg);
    cfg.reliability = Reliability::MpAcRlnc;
    assert!(matches!(run(&net, &cfg), Err(SimError::Config(_))));
    cfg.huncc_c = 0;
    check_invariants(&net, &cfg);
}

#[test]
fn erasing_everything_trips_the_stall_guard() {
    let net = NetworkConfig::satellite_5g(1.0, 1.0, 3, 20, 1);
    for rel in SCHEMES {
        let mut cfg = config(Security::None, rel, 20);
        cfg.stall_limit = 500;
        match run(&net, &cfg) {
            Err(SimError::Stalled { limit, .. }) => assert_eq!(limit, 500),
            other => panic!("{rel}: expected a stall, got {:?}", other.map(|r| r.end_slot)),
        }
    }
}

#[test]
fn arq_loops_on_the_first_packet_when_the_link_is_dead() {
    let net = single_link(1.0, 4, 1);
    let mut cfg = config(Security::None, Reliability::SrArq, 3);
    cfg.stall_limit = 40;
    let out = run_with(&net, &cfg, Erasures::Random, Trace::enabled());
    assert!(matches!(out, Err(SimError::Stalled { .. })));
}

#[test]
fn multipath_with_a_dead_link_delivers_three_per_slot() {
    let n = 60_000;
    let net = NetworkConfig {
        epsilons: vec![1.0, 0.0, 0.0, 0.0],
        rtt: 20,
        packet_bits: 1024,
        seed: 4,
    };
    let mut cfg = config(Security::None, Reliability::MpAcRlnc, n);
    cfg.verify_payloads = false;
    let rec = run(&net, &cfg).unwrap();
    let rate = n as f64 / rec.end_slot as f64;
    assert!((rate - 3.0).abs() < 0.01, "rate {rate}");
}

#[test]
fn random_combinations_are_innovative() {
    let dof = |d: &RlncDecoder| d.front() + d.dof_beyond_front();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let trials = 100_000;
    let mut innovative = 0;
    for _ in 0..trials {
        let span = rng.gen_range(1..=16usize);
        let rank = rng.gen_range(0..span);
        let mut dec = RlncDecoder::new(span);
        while dof(&dec) < rank {
            let c: Vec<u8> = (0..span).map(|_| rng.gen_range(1..=255)).collect();
            dec.receive(0, &c, &[]);
        }
        let before = dof(&dec);
        let c: Vec<u8> = (0..span).map(|_| rng.gen_range(1..=255)).collect();
        dec.receive(0, &c, &[]);
        innovative += (dof(&dec) > before) as usize;
    }
    let p = innovative as f64 / trials as f64;
    assert!(p >= 1.0 - 2f64.powi(-8), "P(innovative) = {p}");
}

#[test]
fn erasure_fraction_matches_the_link_probability() {
    let slots = 100_000;
    let mut ch = Channel::new(&[0.3, 0.05], 42, Erasures::Random);
    let mut erased = [0u64; 2];
    for s in 0..slots {
        for (l, e) in erased.iter_mut().enumerate() {
            *e += ch.step(l, s) as u64;
        }
    }
    let frac = erased[0] as f64 / slots as f64;
    assert!((frac - 0.3).abs() <= 0.005, "fraction {frac}");
}

#[test]
fn single_path_acrlnc_long_run_rate() {
    let slots = 100_000u64;
    let eps = 0.1;
    let net = single_link(eps, 20, 3);
    let mut cfg = config(Security::None, Reliability::SpAcRlnc, slots as usize);
    cfg.verify_payloads = false;
    let rec = run(&net, &cfg).unwrap();
    let delivered = rec.release.iter().filter(|&&r| r < slots).count();
    let rate = delivered as f64 / slots as f64;
    assert!((rate - (1.0 - eps)).abs() <= 0.01, "delivered DoF rate {rate}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_runs_keep_protocol_invariants(
        eps_sat in 0.0f64..0.4,
        eps_5g in 0.0f64..0.4,
        seed in any::<u64>(),
        packets in 1usize..300,
        sec in prop::sample::select(Security::ALL.to_vec()),
        rel in prop::sample::select(SCHEMES.to_vec()),
    ) {
        let net = NetworkConfig::satellite_5g(eps_sat, eps_5g, 3, 8, seed);
        check_invariants(&net, &config(sec, rel, packets));
    }
}
