use super::formula::{Formula, LassoWord};

/// Decide `w, 0 |= f` exactly.
///
/// Each subformula is evaluated to a truth vector over the `stem + loop`
/// positions of the lasso; the successor of the last position wraps to the
/// start of the loop. Until and Eventually are least fixpoints, Always a
/// greatest fixpoint, iterated until stable.
pub fn eval_lasso(f: &Formula, w: &LassoWord) -> bool {
    truth(f, w)[0]
}

fn truth(f: &Formula, w: &LassoWord) -> Vec<bool> {
    let n = w.len();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(p) => (0..n).map(|i| w.at(i).contains(p)).collect(),
        Formula::Not(c) => truth(c, w).into_iter().map(|b| !b).collect(),
        Formula::And(l, r) => zip(truth(l, w), truth(r, w), |a, b| a && b),
        Formula::Or(l, r) => zip(truth(l, w), truth(r, w), |a, b| a || b),
        Formula::Implies(l, r) => zip(truth(l, w), truth(r, w), |a, b| !a || b),
        Formula::Iff(l, r) => zip(truth(l, w), truth(r, w), |a, b| a == b),
        Formula::Next(c) => {
            let t = truth(c, w);
            (0..n).map(|i| t[w.succ(i)]).collect()
        }
        Formula::Until(l, r) => until(&truth(l, w), &truth(r, w), w),
        Formula::Eventually(c) => until(&vec![true; n], &truth(c, w), w),
        Formula::Always(c) => {
            let hold = truth(c, w);
            let mut g = vec![true; n];
            fixpoint(&mut g, w, |i, g| hold[i] && g[w.succ(i)]);
            g
        }
    }
}

fn until(hold: &[bool], goal: &[bool], w: &LassoWord) -> Vec<bool> {
    let mut u = vec![false; w.len()];
    fixpoint(&mut u, w, |i, u| goal[i] || (hold[i] && u[w.succ(i)]));
    u
}

/// Iterate `step` over positions from last to first until nothing changes.
/// Monotone steps starting from all-false (or all-true) converge in at most
/// two sweeps over the loop.
fn fixpoint(v: &mut [bool], w: &LassoWord, step: impl Fn(usize, &[bool]) -> bool) {
    let n = w.len();
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let next = step(i, v);
            if next != v[i] {
                v[i] = next;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::Sample;

    fn s(props: &[&str]) -> Sample {
        Sample::new(props.iter().copied())
    }

    fn lasso(stem: Vec<Sample>, cycle: Vec<Sample>) -> LassoWord {
        LassoWord::new(stem, cycle).unwrap()
    }

    #[test]
    fn always_on_constant_loop() {
        let f = Formula::always(Formula::atom("p"));
        assert!(eval_lasso(&f, &lasso(vec![], vec![s(&["p"])])));
        assert!(!eval_lasso(&f, &lasso(vec![s(&["p"])], vec![s(&["p"]), s(&[])])));
    }

    #[test]
    fn until_reached_in_loop() {
        let f = Formula::until(Formula::atom("p"), Formula::atom("q"));
        assert!(eval_lasso(&f, &lasso(vec![s(&["p"]), s(&["p"])], vec![s(&["q"])])));
        assert!(!eval_lasso(&f, &lasso(vec![s(&["p"]), s(&[])], vec![s(&["q"])])));
        // p forever, q never: strong until fails
        assert!(!eval_lasso(&f, &lasso(vec![], vec![s(&["p"])])));
    }

    #[test]
    fn next_on_empty_word() {
        let f = Formula::next(Formula::atom("p"));
        assert!(!eval_lasso(&f, &lasso(vec![s(&[])], vec![s(&[])])));
        // successor of the last loop position wraps to loop start
        assert!(eval_lasso(&f, &lasso(vec![], vec![s(&["p"])])));
    }

    #[test]
    fn eventually_needs_loop_position() {
        let f = Formula::always(Formula::eventually(Formula::atom("p")));
        assert!(eval_lasso(&f, &lasso(vec![], vec![s(&[]), s(&["p"])])));
        assert!(!eval_lasso(&f, &lasso(vec![s(&["p"])], vec![s(&[])])));
    }

    #[test]
    fn empty_loop_rejected() {
        assert!(LassoWord::new(vec![s(&["p"])], vec![]).is_err());
    }
}
