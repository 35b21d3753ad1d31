//! Integer-time semantics for a network of timed automata with broadcast
//! channels and shared bounded integers.

use std::fmt;

use serde::Serialize;

use super::automaton::{conjunction_window, Action, Edge, TimedAutomaton};
use crate::error::NetError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct VarDecl {
    pub name: String,
    pub min: i64,
    pub max: i64,
    pub init: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    pub automata: Vec<TimedAutomaton>,
    pub channels: Vec<String>,
    pub vars: Vec<VarDecl>,
}

/// Location vector, clock valuation, and shared variables. `time` is the
/// absolute elapsed time and is not part of the state identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetworkState {
    pub locs: Vec<usize>,
    pub clocks: Vec<Vec<i64>>,
    pub vars: Vec<i64>,
    pub time: i64,
}

/// Identity of a state for exploration: everything except absolute time.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey {
    pub locs: Vec<usize>,
    pub clocks: Vec<Vec<i64>>,
    pub vars: Vec<i64>,
}

impl NetworkState {
    pub fn key(&self) -> StateKey {
        StateKey { locs: self.locs.clone(), clocks: self.clocks.clone(), vars: self.vars.clone() }
    }
}

/// How a successor was reached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Step {
    Delay(i64),
    Internal { component: usize, edge: usize },
    Broadcast { channel: usize, sender: usize, sender_edge: usize, receivers: Vec<(usize, usize)> },
}

impl Step {
    /// Components whose location was (re-)entered by this step.
    pub fn movers(&self) -> Vec<usize> {
        match self {
            Step::Delay(_) => Vec::new(),
            Step::Internal { component, .. } => vec![*component],
            Step::Broadcast { sender, receivers, .. } => {
                let mut m: Vec<usize> = std::iter::once(*sender).chain(receivers.iter().map(|r| r.0)).collect();
                m.sort_unstable();
                m
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub step: Step,
    pub target: NetworkState,
}

impl Network {
    pub fn initial_state(&self) -> NetworkState {
        NetworkState {
            locs: self.automata.iter().map(|a| a.initial).collect(),
            clocks: self.automata.iter().map(|a| vec![0; a.clocks.len()]).collect(),
            vars: self.vars.iter().map(|v| v.init).collect(),
            time: 0,
        }
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn location_name(&self, component: usize, loc: usize) -> &str {
        &self.automata[component].locations[loc]
    }

    /// Remove edges of `component` leaving `from` for `to`. Returns how many
    /// edges were dropped.
    pub fn remove_edges(&mut self, component: usize, from: &str, to: &str) -> usize {
        let a = &mut self.automata[component];
        let (Some(f), Some(t)) = (a.location(from), a.location(to)) else {
            return 0;
        };
        let before = a.edges.len();
        a.edges.retain(|e| !(e.source == f && e.target == t));
        before - a.edges.len()
    }

    fn enabled<'a>(&'a self, s: &'a NetworkState, i: usize) -> impl Iterator<Item = (usize, &'a Edge)> + 'a {
        let a = &self.automata[i];
        a.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.source == s.locs[i] && e.guard_holds(&s.clocks[i], &s.vars))
    }

    /// Apply a set of simultaneous edges. Guards are evaluated on `s`;
    /// updates run in the given order on a shared copy of the variables.
    fn fire(&self, s: &NetworkState, moves: &[(usize, usize)]) -> Result<Option<NetworkState>, NetError> {
        let mut next = s.clone();
        for &(i, ei) in moves {
            let a = &self.automata[i];
            let e = &a.edges[ei];
            next.locs[i] = e.target;
            for &c in &e.resets {
                next.clocks[i][c] = 0;
            }
            for u in &e.updates {
                let value = u.expr.eval(&next.vars);
                let decl = &self.vars[u.var];
                if value < decl.min || value > decl.max {
                    return Err(NetError::VarOutOfBounds { var: decl.name.clone(), value });
                }
                next.vars[u.var] = value;
            }
        }
        for &(i, _) in moves {
            if !self.automata[i].invariant_holds(next.locs[i], &next.clocks[i]) {
                return Ok(None);
            }
        }
        Ok(Some(next))
    }

    /// All successors of `s`.
    ///
    /// Discrete steps take priority over delays: time only passes when no
    /// action is possible, and then by the largest amount that reaches the
    /// next guard or invariant boundary. Internal edges of different
    /// automata enabled at the same instant are taken in ascending automaton
    /// order (only the lowest-indexed automaton with an enabled internal edge
    /// contributes). A broadcast sender fires with every automaton holding an
    /// enabled matching receive edge, or alone when there is none; updates
    /// apply sender first, then receivers by ascending index. An empty result
    /// is a deadlock.
    pub fn successors(&self, s: &NetworkState) -> Result<Vec<Transition>, NetError> {
        let n = self.automata.len();
        let mut out = Vec::new();

        for i in 0..n {
            let mut found = false;
            for (ei, e) in self.enabled(s, i) {
                if e.action != Action::Internal {
                    continue;
                }
                if let Some(target) = self.fire(s, &[(i, ei)])? {
                    found = true;
                    out.push(Transition { step: Step::Internal { component: i, edge: ei }, target });
                }
            }
            if found {
                break;
            }
        }

        for j in 0..n {
            for (ej, e) in self.enabled(s, j) {
                let Action::Send(ch) = e.action else { continue };
                // Receivers with a choice of enabled edges branch.
                let mut options: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
                for i in (0..n).filter(|&i| i != j) {
                    let recv: Vec<usize> = self
                        .enabled(s, i)
                        .filter(|(_, r)| r.action == Action::Receive(ch))
                        .map(|(ri, _)| ri)
                        .collect();
                    if recv.is_empty() {
                        continue;
                    }
                    options = options
                        .into_iter()
                        .flat_map(|prefix| {
                            recv.iter().map(move |&ri| {
                                let mut p = prefix.clone();
                                p.push((i, ri));
                                p
                            })
                        })
                        .collect();
                }
                for receivers in options {
                    let mut moves = vec![(j, ej)];
                    moves.extend(receivers.iter().copied());
                    if let Some(target) = self.fire(s, &moves)? {
                        out.push(Transition {
                            step: Step::Broadcast { channel: ch, sender: j, sender_edge: ej, receivers },
                            target,
                        });
                    }
                }
            }
        }

        if !out.is_empty() {
            for t in &mut out {
                self.normalize(&mut t.target);
            }
            return Ok(out);
        }

        if let Some(d) = self.next_delay(s) {
            let mut target = s.clone();
            for clocks in &mut target.clocks {
                for v in clocks.iter_mut() {
                    *v += d;
                }
            }
            target.time += d;
            self.normalize(&mut target);
            out.push(Transition { step: Step::Delay(d), target });
        }
        Ok(out)
    }

    pub fn successor_states(&self, s: &NetworkState) -> Result<Vec<NetworkState>, NetError> {
        Ok(self.successors(s)?.into_iter().map(|t| t.target).collect())
    }

    /// Smallest positive delay that enables a locally initiated edge,
    /// clipped to the invariants. `None` when time cannot or need not pass.
    fn next_delay(&self, s: &NetworkState) -> Option<i64> {
        let mut slack: Option<i64> = None;
        let mut wake: Option<i64> = None;
        for (i, a) in self.automata.iter().enumerate() {
            let clocks = &s.clocks[i];
            match conjunction_window(&a.invariants[s.locs[i]], clocks) {
                Some((_, Some(h))) => slack = Some(slack.map_or(h, |x| x.min(h))),
                Some((_, None)) => {}
                None => return None,
            }
            for e in a.edges.iter().filter(|e| e.source == s.locs[i]) {
                if matches!(e.action, Action::Receive(_)) || !e.var_guard.iter().all(|c| c.holds(&s.vars)) {
                    continue;
                }
                if let Some((lo, _)) = conjunction_window(&e.clock_guard, clocks) {
                    if lo > 0 {
                        wake = Some(wake.map_or(lo, |w| w.min(lo)));
                    }
                }
            }
        }
        let d = match (wake, slack) {
            (Some(w), Some(sl)) => w.min(sl),
            (Some(w), None) => w,
            (None, Some(sl)) => sl,
            (None, None) => return None,
        };
        (d > 0).then_some(d)
    }

    fn normalize(&self, s: &mut NetworkState) {
        for (a, clocks) in self.automata.iter().zip(s.clocks.iter_mut()) {
            a.normalize(clocks);
        }
    }

    pub fn describe(&self, s: &NetworkState) -> String {
        StateDisplay { net: self, state: s }.to_string()
    }
}

struct StateDisplay<'a> {
    net: &'a Network,
    state: &'a NetworkState,
}

impl fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={}", self.state.time)?;
        for (i, a) in self.net.automata.iter().enumerate() {
            write!(f, " {}@{}", a.name, a.locations[self.state.locs[i]])?;
            for (c, v) in a.clocks.iter().zip(&self.state.clocks[i]) {
                write!(f, " {c}={v}")?;
            }
        }
        for (d, v) in self.net.vars.iter().zip(&self.state.vars) {
            write!(f, " {}={v}", d.name)?;
        }
        Ok(())
    }
}
