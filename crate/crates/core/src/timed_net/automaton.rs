use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// `clock ⋈ bound`, or `clock - minus ⋈ bound` when `minus` is set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClockConstraint {
    pub clock: usize,
    pub minus: Option<usize>,
    pub op: CmpOp,
    pub bound: i64,
}

impl ClockConstraint {
    pub fn new(clock: usize, op: CmpOp, bound: i64) -> Self {
        ClockConstraint { clock, minus: None, op, bound }
    }

    pub fn diff(clock: usize, minus: usize, op: CmpOp, bound: i64) -> Self {
        ClockConstraint { clock, minus: Some(minus), op, bound }
    }

    pub fn holds(&self, clocks: &[i64]) -> bool {
        let lhs = clocks[self.clock] - self.minus.map_or(0, |m| clocks[m]);
        self.op.holds(lhs, self.bound)
    }

    /// Inclusive range of integer delays `t >= 0` for which the constraint
    /// holds at `clocks + t`. Difference constraints do not change with time.
    pub(crate) fn delay_window(&self, clocks: &[i64]) -> Option<(i64, Option<i64>)> {
        if self.minus.is_some() {
            return self.holds(clocks).then_some((0, None));
        }
        let x = clocks[self.clock];
        let k = self.bound;
        let (lo, hi) = match self.op {
            CmpOp::Lt => (0, Some(k - 1 - x)),
            CmpOp::Le => (0, Some(k - x)),
            CmpOp::Eq => (k - x, Some(k - x)),
            CmpOp::Ge => (k - x, None),
            CmpOp::Gt => (k + 1 - x, None),
        };
        let lo = lo.max(0);
        match hi {
            Some(h) if h < lo => None,
            _ => Some((lo, hi)),
        }
    }
}

/// Earliest window of delays satisfying every constraint in `cs`.
pub(crate) fn conjunction_window(cs: &[ClockConstraint], clocks: &[i64]) -> Option<(i64, Option<i64>)> {
    let mut lo = 0;
    let mut hi: Option<i64> = None;
    for c in cs {
        let (l, h) = c.delay_window(clocks)?;
        lo = lo.max(l);
        hi = match (hi, h) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
    match hi {
        Some(h) if h < lo => None,
        _ => Some((lo, hi)),
    }
}

/// `var ⋈ bound` over a shared bounded integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarConstraint {
    pub var: usize,
    pub op: CmpOp,
    pub bound: i64,
}

impl VarConstraint {
    pub fn new(var: usize, op: CmpOp, bound: i64) -> Self {
        VarConstraint { var, op, bound }
    }

    pub fn holds(&self, vars: &[i64]) -> bool {
        self.op.holds(vars[self.var], self.bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IntExpr {
    Const(i64),
    Var(usize),
    Add(Box<IntExpr>, Box<IntExpr>),
    Mod(Box<IntExpr>, i64),
}

impl IntExpr {
    pub fn eval(&self, vars: &[i64]) -> i64 {
        match self {
            IntExpr::Const(c) => *c,
            IntExpr::Var(v) => vars[*v],
            IntExpr::Add(a, b) => a.eval(vars) + b.eval(vars),
            IntExpr::Mod(a, m) => a.eval(vars).rem_euclid(*m),
        }
    }

    pub fn incr(var: usize) -> IntExpr {
        IntExpr::Add(Box::new(IntExpr::Var(var)), Box::new(IntExpr::Const(1)))
    }
}

/// `var := expr`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Update {
    pub var: usize,
    pub expr: IntExpr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Internal,
    Send(usize),
    Receive(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub action: Action,
    pub clock_guard: Vec<ClockConstraint>,
    pub var_guard: Vec<VarConstraint>,
    pub resets: Vec<usize>,
    pub updates: Vec<Update>,
}

impl Edge {
    pub fn new(source: usize, target: usize, action: Action) -> Self {
        Edge {
            source,
            target,
            action,
            clock_guard: Vec::new(),
            var_guard: Vec::new(),
            resets: Vec::new(),
            updates: Vec::new(),
        }
    }

    pub fn clock(mut self, c: ClockConstraint) -> Self {
        self.clock_guard.push(c);
        self
    }

    pub fn var(mut self, c: VarConstraint) -> Self {
        self.var_guard.push(c);
        self
    }

    pub fn reset(mut self, clock: usize) -> Self {
        self.resets.push(clock);
        self
    }

    pub fn update(mut self, var: usize, expr: IntExpr) -> Self {
        self.updates.push(Update { var, expr });
        self
    }

    pub fn guard_holds(&self, clocks: &[i64], vars: &[i64]) -> bool {
        self.var_guard.iter().all(|c| c.holds(vars)) && self.clock_guard.iter().all(|c| c.holds(clocks))
    }
}

/// One timed automaton with its own clocks; channels and integer variables
/// are shared through the enclosing network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedAutomaton {
    pub name: String,
    pub locations: Vec<String>,
    pub initial: usize,
    pub clocks: Vec<String>,
    pub invariants: Vec<Vec<ClockConstraint>>,
    pub edges: Vec<Edge>,
    /// Largest constant each clock is compared against. Values above it are
    /// indistinguishable and are stored as `ceiling + 1`. `None` disables
    /// the abstraction for that clock.
    pub clock_ceilings: Vec<Option<i64>>,
}

impl TimedAutomaton {
    pub fn new(name: impl Into<String>, locations: &[&str], clocks: &[&str]) -> Self {
        TimedAutomaton {
            name: name.into(),
            locations: locations.iter().map(|s| s.to_string()).collect(),
            initial: 0,
            clocks: clocks.iter().map(|s| s.to_string()).collect(),
            invariants: vec![Vec::new(); locations.len()],
            edges: Vec::new(),
            clock_ceilings: vec![Some(0); clocks.len()],
        }
    }

    pub fn location(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn clock(&self, name: &str) -> Option<usize> {
        self.clocks.iter().position(|c| c == name)
    }

    /// Recompute ceilings from the constants in guards and invariants.
    /// Clocks used in difference constraints get no ceiling.
    pub fn compute_ceilings(&mut self) {
        let mut ceil: Vec<Option<i64>> = vec![Some(0); self.clocks.len()];
        let all = self.invariants.iter().flatten().chain(self.edges.iter().flat_map(|e| &e.clock_guard));
        let mut diff_clocks = Vec::new();
        for c in all {
            if let Some(m) = c.minus {
                diff_clocks.push(c.clock);
                diff_clocks.push(m);
            } else if let Some(v) = ceil[c.clock].as_mut() {
                *v = (*v).max(c.bound);
            }
        }
        for c in diff_clocks {
            ceil[c] = None;
        }
        self.clock_ceilings = ceil;
    }

    pub fn invariant_holds(&self, loc: usize, clocks: &[i64]) -> bool {
        self.invariants[loc].iter().all(|c| c.holds(clocks))
    }

    pub(crate) fn normalize(&self, clocks: &mut [i64]) {
        for (v, ceil) in clocks.iter_mut().zip(&self.clock_ceilings) {
            if let Some(c) = ceil {
                *v = (*v).min(c + 1);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        let c = ClockConstraint::new(0, CmpOp::Eq, 5);
        assert_eq!(c.delay_window(&[2]), Some((3, Some(3))));
        assert_eq!(c.delay_window(&[6]), None);
        let c = ClockConstraint::new(0, CmpOp::Lt, 5);
        assert_eq!(c.delay_window(&[2]), Some((0, Some(2))));
        let c = ClockConstraint::new(0, CmpOp::Gt, 5);
        assert_eq!(c.delay_window(&[2]), Some((4, None)));
        let both = [ClockConstraint::new(0, CmpOp::Ge, 3), ClockConstraint::new(1, CmpOp::Le, 4)];
        assert_eq!(conjunction_window(&both, &[0, 0]), Some((3, Some(4))));
        assert_eq!(conjunction_window(&both, &[0, 2]), None);
    }

    #[test]
    fn difference_constraints_evaluate() {
        let c = ClockConstraint::diff(0, 1, CmpOp::Ge, 2);
        assert!(c.holds(&[5, 3]));
        assert!(!c.holds(&[4, 3]));
        assert_eq!(c.delay_window(&[5, 3]), Some((0, None)));
    }

    #[test]
    fn ceilings_from_constants() {
        let mut ta = TimedAutomaton::new("a", &["l0", "l1"], &["x", "y", "z"]);
        ta.invariants[0].push(ClockConstraint::new(0, CmpOp::Le, 7));
        ta.edges.push(Edge::new(0, 1, Action::Internal).clock(ClockConstraint::new(0, CmpOp::Eq, 9)));
        ta.edges.push(Edge::new(1, 0, Action::Internal).clock(ClockConstraint::diff(1, 2, CmpOp::Lt, 1)));
        ta.compute_ceilings();
        assert_eq!(ta.clock_ceilings, vec![Some(9), None, None]);
        let mut clocks = [40, 40, 40];
        ta.normalize(&mut clocks);
        assert_eq!(clocks, [10, 40, 40]);
    }

    #[test]
    fn int_expressions() {
        let e = IntExpr::Mod(Box::new(IntExpr::incr(0)), 2);
        assert_eq!(e.eval(&[1]), 0);
        assert_eq!(e.eval(&[0]), 1);
    }
}
