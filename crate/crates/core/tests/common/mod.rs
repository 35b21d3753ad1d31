#![allow(dead_code)]

use decmon_core::ltl::{Formula, LassoWord, Sample, Trace};
use decmon_core::WcetConfig;
use rand::seq::SliceRandom;
use rand::Rng;

pub const PROPS: [&str; 3] = ["p", "q", "r"];

/// Random formula of depth at most `depth` over `props`, using every
/// operator of the grammar.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize, props: &[&str]) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(*props.choose(rng).unwrap()),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..11) {
        0 => Formula::not(random_formula(rng, d, props)),
        1 => Formula::and(random_formula(rng, d, props), random_formula(rng, d, props)),
        2 => Formula::or(random_formula(rng, d, props), random_formula(rng, d, props)),
        3 => Formula::implies(random_formula(rng, d, props), random_formula(rng, d, props)),
        4 => Formula::iff(random_formula(rng, d, props), random_formula(rng, d, props)),
        5 => Formula::next(random_formula(rng, d, props)),
        6 | 7 => Formula::until(random_formula(rng, d, props), random_formula(rng, d, props)),
        8 => Formula::always(random_formula(rng, d, props)),
        _ => Formula::eventually(random_formula(rng, d, props)),
    }
}

pub fn random_sample<R: Rng>(rng: &mut R, props: &[&str]) -> Sample {
    Sample::new(props.iter().copied().filter(|_| rng.gen_bool(0.5)))
}

pub fn random_trace<R: Rng>(rng: &mut R, len: usize, props: &[&str]) -> Trace {
    (0..len).map(|_| random_sample(rng, props)).collect()
}

pub fn random_lasso<R: Rng>(rng: &mut R, max_stem: usize, max_loop: usize, props: &[&str]) -> LassoWord {
    let stem = (0..rng.gen_range(0..=max_stem)).map(|_| random_sample(rng, props)).collect();
    let cycle = (0..rng.gen_range(1..=max_loop)).map(|_| random_sample(rng, props)).collect();
    LassoWord::new(stem, cycle).unwrap()
}

/// Every trace over `props` of length exactly `len`.
pub fn all_traces(props: &[&str], len: usize) -> Vec<Trace> {
    let k = props.len();
    (0..1usize << (k * len))
        .map(|code| {
            (0..len)
                .map(|i| {
                    let bits = (code >> (i * k)) & ((1 << k) - 1);
                    Sample::new(props.iter().enumerate().filter(|(j, _)| bits >> j & 1 == 1).map(|(_, p)| *p))
                })
                .collect()
        })
        .collect()
}

/// The period sweep: `n` in 2..=10 for `fault_t = 0`, odd `n` for
/// `fault_t = 1`, each with `vectors` random WCET vectors in [1, 50].
pub fn sweep<R: Rng>(rng: &mut R, vectors: usize) -> Vec<WcetConfig> {
    let mut out = Vec::new();
    for fault_t in 0..=1u8 {
        for n in 2..=10usize {
            if fault_t == 1 && n % 2 == 0 {
                continue;
            }
            for _ in 0..vectors {
                let mut w = || rng.gen_range(1..=50);
                out.push(WcetConfig {
                    wcet_l: w(),
                    wcet_e: w(),
                    wcet_m: w(),
                    wcet_r: w(),
                    wcet_v: w(),
                    wcet_t: w(),
                    fault_t,
                    n,
                });
            }
        }
    }
    out
}

pub fn heating() -> Formula {
    decmon_core::ltl::parse_formula_open("G((!b0 | !b1) & (t30 -> fan_on))").unwrap().0
}
