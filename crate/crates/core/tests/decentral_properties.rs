mod common;

use std::collections::BTreeSet;

use decmon_core::decentral::{run_decentralized, vote, Partition};
use decmon_core::ltl::{Sample, Trace};
use decmon_core::progression::monitor_trace;
use decmon_core::wcet::{comm_wcet, BusModel};
use decmon_core::{Verdict3, WcetConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Split `trace` across components: proposition `props[i]` goes to
/// component `owner[i]`.
fn split(trace: &Trace, props: &[&str], owner: &[usize], n: usize) -> (Partition, Vec<Trace>) {
    let mut alphabets = vec![BTreeSet::new(); n];
    for (p, &o) in props.iter().zip(owner) {
        alphabets[o].insert(p.to_string());
    }
    let locals = (0..n)
        .map(|c| {
            trace
                .iter()
                .map(|s| Sample::new(s.props.iter().filter(|p| alphabets[c].contains(*p)).cloned()))
                .collect()
        })
        .collect();
    (Partition::new(alphabets).unwrap(), locals)
}

#[test]
fn matches_centralized_progression() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let props = common::PROPS;
    for case in 0..300 {
        let f = common::random_formula(&mut rng, 3, &props);
        let fault_t = rng.gen_range(0..=1u8);
        let n = if fault_t == 1 { [3, 5][rng.gen_range(0..2)] } else { rng.gen_range(2..=5) };
        let owner: Vec<usize> = props.iter().map(|_| rng.gen_range(0..n)).collect();
        let len = rng.gen_range(1..=6);
        let global = common::random_trace(&mut rng, len, &props);
        let (p, locals) = split(&global, &props, &owner, n);
        let cfg = WcetConfig { fault_t, n, ..WcetConfig::default() };
        let Ok(reports) = run_decentralized(&f, &p, &locals, &cfg, &[]) else { continue };
        let central = monitor_trace(&f, &global).unwrap();
        for (r, step) in reports.iter().zip(&central.steps) {
            assert_eq!(r.merged, global.0[r.round], "case {case}");
            assert!(r.verdicts.iter().all(|v| *v == step.verdict), "case {case}: {f}");
            assert_eq!(r.decision, step.verdict);
            assert_eq!(r.time, r.round as i64 * cfg.period());
        }
        let (last, earlier) = reports.split_last().unwrap();
        assert!(earlier.iter().all(|r| !r.decision.is_definite()), "case {case}");
        if reports.len() < global.len() {
            assert!(last.decision.is_definite(), "case {case}");
        }
    }
}

proptest! {
    #[test]
    fn vote_is_a_strict_majority(votes in prop::collection::vec(0..3u8, 1..8)) {
        let all = [Verdict3::Top, Verdict3::Bot, Verdict3::Unknown];
        let vs: Vec<Verdict3> = votes.iter().map(|&i| all[i as usize]).collect();
        let v = vote(&vs);
        let count = vs.iter().filter(|x| **x == v).count();
        if 2 * count <= vs.len() {
            prop_assert_eq!(v, Verdict3::Unknown);
            prop_assert!(all.iter().all(|a| 2 * vs.iter().filter(|x| *x == a).count() <= vs.len()));
        }
    }

    #[test]
    fn comm_wcet_linear_in_nodes(token in 1u64..200, result in 1u64..50, nodes in 1u64..20) {
        let b = BusModel { token_msg_bytes: token, result_msg_bytes: result, synch_msg_bytes: 0, nodes, bits_per_byte_on_wire: 10, baud: 4800 };
        let doubled = BusModel { nodes: 2 * nodes, ..b };
        prop_assert_eq!(comm_wcet(&doubled).total_bytes, 2 * comm_wcet(&b).total_bytes);
        prop_assert_eq!(comm_wcet(&doubled).total_bits, 2 * comm_wcet(&b).total_bits);
    }
}
