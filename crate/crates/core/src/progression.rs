//! Formula progression: rewrite the current obligation against one sample.

use serde::Serialize;

use crate::error::MonitorError;
use crate::ltl::{Formula, Sample, Trace};
pub use crate::verdict::Verdict3;

/// Largest simplified formula a monitor may carry.
pub const MAX_FORMULA_SYMBOLS: usize = 64;

/// One application of the rewriting function. The result is not simplified.
pub fn progress(f: &Formula, s: &Sample) -> Formula {
    use Formula::*;
    match f {
        True => True,
        False => False,
        Atom(p) => {
            if s.contains(p) {
                True
            } else {
                False
            }
        }
        Not(c) => Formula::not(progress(c, s)),
        And(l, r) => Formula::and(progress(l, s), progress(r, s)),
        Or(l, r) => Formula::or(progress(l, s), progress(r, s)),
        // a -> b is !a | b
        Implies(l, r) => Formula::or(Formula::not(progress(l, s)), progress(r, s)),
        // a <-> b is (!a | b) & (!b | a)
        Iff(l, r) => {
            let (pl, pr) = (progress(l, s), progress(r, s));
            Formula::and(
                Formula::or(Formula::not(pl.clone()), pr.clone()),
                Formula::or(Formula::not(pr), pl),
            )
        }
        Next(c) => (**c).clone(),
        Until(l, r) => Formula::or(progress(r, s), Formula::and(progress(l, s), f.clone())),
        Always(c) => Formula::and(progress(c, s), f.clone()),
        Eventually(c) => Formula::or(progress(c, s), f.clone()),
    }
}

/// Propositional clean-up that keeps progression bounded.
///
/// Folds the constants, removes double negation, and flattens, deduplicates,
/// and sorts conjunctions and disjunctions. The output is a fixpoint of the
/// rules and is rebuilt as a right-nested chain.
pub fn simplify(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True | False | Atom(_) => f.clone(),
        Not(c) => match simplify(c) {
            True => False,
            False => True,
            Not(inner) => *inner,
            other => Formula::not(other),
        },
        And(..) => junction(f, true),
        Or(..) => junction(f, false),
        Implies(l, r) => Formula::implies(simplify(l), simplify(r)),
        Iff(l, r) => Formula::iff(simplify(l), simplify(r)),
        Next(c) => Formula::next(simplify(c)),
        Until(l, r) => Formula::until(simplify(l), simplify(r)),
        Always(c) => Formula::always(simplify(c)),
        Eventually(c) => Formula::eventually(simplify(c)),
    }
}

fn junction(f: &Formula, conj: bool) -> Formula {
    let (unit, zero) = if conj { (Formula::True, Formula::False) } else { (Formula::False, Formula::True) };
    let mut items = Vec::new();
    collect(f, conj, &mut items);
    let mut parts = Vec::with_capacity(items.len());
    for item in items {
        let s = simplify(item);
        if s == zero {
            return zero;
        }
        if s == unit {
            continue;
        }
        // A simplified child of the same kind is already flat.
        match (&s, conj) {
            (Formula::And(..), true) | (Formula::Or(..), false) => {
                let mut nested = Vec::new();
                collect(&s, conj, &mut nested);
                parts.extend(nested.into_iter().cloned());
            }
            _ => parts.push(s),
        }
    }
    parts.sort();
    parts.dedup();
    let mut iter = parts.into_iter().rev();
    let Some(last) = iter.next() else {
        return unit;
    };
    iter.fold(last, |acc, p| if conj { Formula::and(p, acc) } else { Formula::or(p, acc) })
}

fn collect<'a>(f: &'a Formula, conj: bool, out: &mut Vec<&'a Formula>) {
    match (f, conj) {
        (Formula::And(l, r), true) | (Formula::Or(l, r), false) => {
            collect(l, conj, out);
            collect(r, conj, out);
        }
        _ => out.push(f),
    }
}

/// Syntactic verdict of a (simplified) obligation.
pub fn verdict_of(f: &Formula) -> Verdict3 {
    match f {
        Formula::True => Verdict3::Top,
        Formula::False => Verdict3::Bot,
        _ => Verdict3::Unknown,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonitorStep {
    pub input: Sample,
    pub rewritten: Formula,
    pub verdict: Verdict3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitorRun {
    pub initial: Formula,
    pub steps: Vec<MonitorStep>,
}

impl MonitorRun {
    /// Verdict after the last consumed sample, or of the initial formula
    /// when nothing was consumed.
    pub fn final_verdict(&self) -> Verdict3 {
        match self.steps.last() {
            Some(step) => step.verdict,
            None => verdict_of(&simplify(&self.initial)),
        }
    }
}

/// Stateful progression monitor consuming one sample at a time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgressionMonitor {
    current: Formula,
    limit: usize,
}

impl ProgressionMonitor {
    pub fn new(f: &Formula) -> Result<Self, MonitorError> {
        Self::with_limit(f, MAX_FORMULA_SYMBOLS)
    }

    pub fn with_limit(f: &Formula, limit: usize) -> Result<Self, MonitorError> {
        let current = simplify(f);
        check_size(&current, limit)?;
        Ok(ProgressionMonitor { current, limit })
    }

    pub fn current(&self) -> &Formula {
        &self.current
    }

    pub fn verdict(&self) -> Verdict3 {
        verdict_of(&self.current)
    }

    /// Consume one sample. Definite verdicts are sticky.
    pub fn step(&mut self, s: &Sample) -> Result<Verdict3, MonitorError> {
        if self.verdict().is_definite() {
            return Ok(self.verdict());
        }
        let next = simplify(&progress(&self.current, s));
        check_size(&next, self.limit)?;
        self.current = next;
        Ok(self.verdict())
    }
}

fn check_size(f: &Formula, limit: usize) -> Result<(), MonitorError> {
    let size = f.symbol_count();
    if size > limit {
        Err(MonitorError::FormulaTooLarge { size, limit })
    } else {
        Ok(())
    }
}

/// Run `f` over `t`, recording each rewriting. Stops after the first
/// definite verdict.
pub fn monitor_trace(f: &Formula, t: &Trace) -> Result<MonitorRun, MonitorError> {
    monitor_trace_with_limit(f, t, MAX_FORMULA_SYMBOLS)
}

pub fn monitor_trace_with_limit(f: &Formula, t: &Trace, limit: usize) -> Result<MonitorRun, MonitorError> {
    check_size(&simplify(f), limit)?;
    let mut current = f.clone();
    let mut steps = Vec::new();
    for s in t.iter() {
        let next = simplify(&progress(&current, s));
        check_size(&next, limit)?;
        let verdict = verdict_of(&next);
        steps.push(MonitorStep { input: s.clone(), rewritten: next.clone(), verdict });
        current = next;
        if verdict.is_definite() {
            break;
        }
    }
    Ok(MonitorRun { initial: f.clone(), steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse_formula, Alphabet};

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn heating() -> Formula {
        parse_formula(
            "G((!b0 | !b1) & (t30 -> fan_on))",
            &Alphabet::new(["b0", "b1", "t30", "fan_on"]),
        )
        .unwrap()
    }

    #[test]
    fn rewriting_clauses() {
        assert_eq!(progress(&p(), &Sample::new(["p"])), Formula::True);
        assert_eq!(progress(&p(), &Sample::empty()), Formula::False);
        let phi = Formula::until(p(), Formula::atom("q"));
        assert_eq!(progress(&Formula::next(phi.clone()), &Sample::new(["q"])), phi);
        let g = Formula::always(p());
        assert_eq!(progress(&g, &Sample::new(["p"])), Formula::and(Formula::True, g.clone()));
        let f = Formula::eventually(p());
        assert_eq!(progress(&f, &Sample::empty()), Formula::or(Formula::False, f.clone()));
        assert_eq!(
            progress(&phi, &Sample::new(["p"])),
            Formula::or(Formula::False, Formula::and(Formula::True, phi.clone()))
        );
    }

    #[test]
    fn simplify_rules() {
        let g = Formula::always(p());
        assert_eq!(simplify(&Formula::and(Formula::True, g.clone())), g);
        assert_eq!(simplify(&Formula::and(Formula::False, g.clone())), Formula::False);
        assert_eq!(simplify(&Formula::or(p(), p())), p());
        assert_eq!(simplify(&Formula::or(Formula::True, p())), Formula::True);
        assert_eq!(simplify(&Formula::or(Formula::False, p())), p());
        assert_eq!(simplify(&Formula::not(Formula::not(p()))), p());
        assert_eq!(simplify(&Formula::not(Formula::True)), Formula::False);
        assert_eq!(simplify(&Formula::not(Formula::False)), Formula::True);
    }

    #[test]
    fn simplify_flattens_and_sorts() {
        let (a, b, c) = (Formula::atom("a"), Formula::atom("b"), Formula::atom("c"));
        let messy = Formula::and(Formula::and(c.clone(), a.clone()), Formula::and(b.clone(), a.clone()));
        let expected = Formula::and(a.clone(), Formula::and(b.clone(), c.clone()));
        assert_eq!(simplify(&messy), expected);
        assert_eq!(simplify(&expected), expected);
    }

    #[test]
    fn heating_satisfied_sample_keeps_formula() {
        let f = heating();
        let run = monitor_trace(&f, &Trace::new(vec![Sample::new(["b0"])])).unwrap();
        assert_eq!(run.steps[0].rewritten, f);
        assert_eq!(run.final_verdict(), Verdict3::Unknown);
    }

    #[test]
    fn heating_violation_collapses_to_false() {
        let f = heating();
        let run = monitor_trace(&f, &Trace::new(vec![Sample::new(["b0", "b1"])])).unwrap();
        assert_eq!(run.steps[0].rewritten, Formula::False);
        assert_eq!(run.final_verdict(), Verdict3::Bot);
        let run = monitor_trace(&f, &Trace::new(vec![Sample::new(["t30"])])).unwrap();
        assert_eq!(run.final_verdict(), Verdict3::Bot);
    }

    #[test]
    fn stops_after_definite_verdict() {
        let run = monitor_trace(&p(), &Trace::new(vec![Sample::new(["p"]), Sample::empty()])).unwrap();
        assert_eq!(run.steps.len(), 1);
        assert_eq!(run.final_verdict(), Verdict3::Top);
    }

    #[test]
    fn empty_trace_uses_initial_formula() {
        let run = monitor_trace(&Formula::not(Formula::False), &Trace::default()).unwrap();
        assert_eq!(run.final_verdict(), Verdict3::Top);
    }

    #[test]
    fn size_limit_is_reported() {
        // Nested eventualities grow one disjunct per step.
        let mut f = p();
        for _ in 0..3 {
            f = Formula::eventually(Formula::and(f, Formula::next(Formula::atom("q"))));
        }
        let trace: Trace = (0..10).map(|_| Sample::empty()).collect();
        let err = monitor_trace_with_limit(&f, &trace, 12).unwrap_err();
        assert!(matches!(err, MonitorError::FormulaTooLarge { limit: 12, .. }));
    }

    #[test]
    fn stepwise_monitor_matches_batch_run() {
        let f = heating();
        let trace = Trace::new(vec![Sample::new(["b0"]), Sample::new(["t30", "fan_on"]), Sample::new(["b1", "b0"])]);
        let run = monitor_trace(&f, &trace).unwrap();
        let mut m = ProgressionMonitor::new(&f).unwrap();
        let verdicts: Vec<_> = trace.iter().map(|s| m.step(s).unwrap()).collect();
        assert_eq!(verdicts, vec![Verdict3::Unknown, Verdict3::Unknown, Verdict3::Bot]);
        assert_eq!(run.final_verdict(), Verdict3::Bot);
    }
}
