use super::formula::{sample_from_bits, Alphabet, Formula, LassoWord, Sample, Trace};
use super::lasso::eval_lasso;
use crate::error::OracleError;
use crate::verdict::Verdict3;

/// Default cap on the number of lasso continuations the oracle may check.
pub const DEFAULT_ORACLE_BUDGET: u64 = 1 << 22;

/// Bounded semantic three-valued verdict for the finite prefix `u`.
///
/// Enumerates every lasso continuation `w` with stem length `0..=stem_bound`
/// and loop length `1..=loop_bound` over all subsets of the formula's atoms
/// and evaluates `u · w` exactly. TOP if all satisfy, BOT if none does,
/// UNKNOWN otherwise. This is a test oracle; it approximates the quantifier
/// over all infinite continuations.
pub fn semantic_verdict_oracle(
    f: &Formula,
    u: &Trace,
    stem_bound: usize,
    loop_bound: usize,
) -> Result<Verdict3, OracleError> {
    semantic_verdict_oracle_with_budget(f, u, stem_bound, loop_bound, DEFAULT_ORACLE_BUDGET)
}

pub fn semantic_verdict_oracle_with_budget(
    f: &Formula,
    u: &Trace,
    stem_bound: usize,
    loop_bound: usize,
    budget: u64,
) -> Result<Verdict3, OracleError> {
    if loop_bound == 0 {
        return Err(OracleError::EmptyLoopBound);
    }
    let names = Alphabet::new(f.atoms()).names();
    let letters = 1u64 << names.len().min(63);
    let mut total: u64 = 0;
    for s in 0..=stem_bound {
        for l in 1..=loop_bound {
            let words = (s + l) as u32;
            let count = letters
                .checked_pow(words)
                .ok_or(OracleError::BudgetExceeded { needed: u64::MAX, budget })?;
            total = total.saturating_add(count);
        }
    }
    if names.len() >= 32 || total > budget {
        return Err(OracleError::BudgetExceeded { needed: total, budget });
    }

    let alphabet: Vec<Sample> = (0..letters as u32).map(|b| sample_from_bits(&names, b)).collect();
    let mut seen_true = false;
    let mut seen_false = false;
    for s in 0..=stem_bound {
        for l in 1..=loop_bound {
            let mut idx = vec![0usize; s + l];
            loop {
                let mut stem: Vec<Sample> = u.0.clone();
                stem.extend(idx[..s].iter().map(|&i| alphabet[i].clone()));
                let cycle = idx[s..].iter().map(|&i| alphabet[i].clone()).collect();
                let w = LassoWord { stem, cycle };
                if eval_lasso(f, &w) {
                    seen_true = true;
                } else {
                    seen_false = true;
                }
                if seen_true && seen_false {
                    return Ok(Verdict3::Unknown);
                }
                if !advance(&mut idx, alphabet.len()) {
                    break;
                }
            }
        }
    }
    Ok(match (seen_true, seen_false) {
        (true, false) => Verdict3::Top,
        (false, true) => Verdict3::Bot,
        _ => Verdict3::Unknown,
    })
}

/// Odometer increment; false once every digit has wrapped.
fn advance(idx: &mut [usize], radix: usize) -> bool {
    for d in idx.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}
