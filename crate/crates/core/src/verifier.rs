//! Explicit-state exploration of the protocol network and the three timing
//! checks: synchronous sampling, cycle liveness, and sampling period.
//!
//! Time is discrete and every wait in the model is exact, so the integer
//! quotient (clocks relative to their last reset, absolute time dropped) is
//! finite and the properties can be decided on the concrete graph.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::NetError;
use crate::timed_net::{
    build_network, events_for, initial_events, Network, NetworkState, StateKey, TimelineEvent, WcetConfig, CLOCK_S,
    SAMPLING, START, VAR_CYCLE,
};

/// Default exploration budget.
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct StateGraph {
    /// First-discovered representative of each state.
    pub nodes: Vec<NetworkState>,
    pub edges: Vec<Vec<usize>>,
    pub initial: usize,
}

impl StateGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Shortest path of node ids from the initial node to `target`.
    fn path_to(&self, target: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.len()];
        parent[self.initial] = self.initial;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(u) = queue.pop_front() {
            if u == target {
                break;
            }
            for &v in &self.edges[u] {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![target];
        let mut cur = target;
        while cur != self.initial {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// Breadth-first closure from the initial state.
pub fn explore(net: &Network, state_budget: usize) -> Result<StateGraph, NetError> {
    explore_with_threads(net, state_budget, 1)
}

/// Level-synchronous BFS; successors of a frontier are computed on
/// `threads` workers and merged in frontier order, so the resulting graph
/// is identical for every thread count.
pub fn explore_with_threads(net: &Network, state_budget: usize, threads: usize) -> Result<StateGraph, NetError> {
    let init = net.initial_state();
    let mut index: HashMap<StateKey, usize> = HashMap::from([(init.key(), 0)]);
    let mut nodes = vec![init];
    let mut edges: Vec<Vec<usize>> = vec![Vec::new()];
    if state_budget < 1 {
        return Err(NetError::BudgetExceeded { budget: state_budget });
    }
    let pool = if threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| NetError::InvalidConfig(e.to_string()))?,
        )
    } else {
        None
    };

    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let expand = |&u: &usize| net.successor_states(&nodes[u]);
        let results: Vec<Result<Vec<NetworkState>, NetError>> = match &pool {
            Some(p) => p.install(|| frontier.par_iter().map(expand).collect()),
            None => frontier.iter().map(expand).collect(),
        };
        let mut next = Vec::new();
        for (&u, succ) in frontier.iter().zip(results) {
            for s in succ? {
                let key = s.key();
                let id = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = nodes.len();
                        if id >= state_budget {
                            return Err(NetError::BudgetExceeded { budget: state_budget });
                        }
                        index.insert(key, id);
                        nodes.push(s);
                        edges.push(Vec::new());
                        next.push(id);
                        id
                    }
                };
                edges[u].push(id);
            }
        }
        frontier = next;
    }
    Ok(StateGraph { nodes, edges, initial: 0 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub holds: bool,
    /// Counterexample from the initial state, present iff `holds` is false.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<NetworkState>>,
}

impl CheckResult {
    fn ok() -> Self {
        CheckResult { holds: true, witness: None }
    }

    fn fail(witness: Vec<NetworkState>) -> Self {
        CheckResult { holds: false, witness: Some(witness) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    pub result: CheckResult,
    pub expected: i64,
    /// Distinct `s_clock` values seen on re-entry to the sampling location,
    /// ascending.
    pub measured: Vec<i64>,
}

/// Re-derive a path of node ids through `Network::successors`, so the
/// returned states carry genuine absolute times.
fn replay(net: &Network, g: &StateGraph, path: &[usize]) -> Vec<NetworkState> {
    let mut state = net.initial_state();
    let mut out = vec![state.clone()];
    for &id in &path[1..] {
        let want = g.nodes[id].key();
        state = net
            .successor_states(&state)
            .expect("graph was built from these successors")
            .into_iter()
            .find(|s| s.key() == want)
            .expect("graph edge is a successor");
        out.push(state.clone());
    }
    out
}

fn sampling_loc(net: &Network, component: usize) -> Option<usize> {
    net.automata[component].location(SAMPLING)
}

/// No reachable state has one component sampling while another is not.
pub fn check_synchronous_sampling_on(net: &Network, g: &StateGraph) -> CheckResult {
    let sampling: Vec<Option<usize>> = (0..net.automata.len()).map(|c| sampling_loc(net, c)).collect();
    let bad = g.nodes.iter().position(|s| {
        let inside: Vec<bool> = s.locs.iter().zip(&sampling).map(|(l, m)| Some(*l) == *m).collect();
        inside.iter().any(|&b| b) && inside.iter().any(|&b| !b)
    });
    match bad {
        None => CheckResult::ok(),
        Some(id) => CheckResult::fail(replay(net, g, &g.path_to(id))),
    }
}

/// `(C_i sampling && cycle == c) ~> (C_i sampling && cycle == 1 - c)` for
/// every component `i` and `c` in {0, 1}.
///
/// A state satisfies `A<> psi` when it satisfies `psi`, or has successors
/// and all of them do. A trigger state outside that set starts a path that
/// either deadlocks or cycles without ever meeting `psi`.
pub fn check_liveness_on(net: &Network, g: &StateGraph) -> CheckResult {
    let Some(cycle_var) = (VAR_CYCLE < net.vars.len()).then_some(VAR_CYCLE) else {
        return CheckResult::ok();
    };
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); g.len()];
    for (u, succ) in g.edges.iter().enumerate() {
        for &v in succ {
            preds[v].push(u);
        }
    }
    for comp in 0..net.automata.len() {
        let Some(sampling) = sampling_loc(net, comp) else { continue };
        for c in 0..=1i64 {
            let at = |s: &NetworkState, cyc: i64| s.locs[comp] == sampling && s.vars[cycle_var] == cyc;
            let psi: Vec<bool> = g.nodes.iter().map(|s| at(s, 1 - c)).collect();

            // Least fixpoint of A<> psi via pending-successor counters.
            let mut good = psi.clone();
            let mut pending: Vec<usize> = g.edges.iter().map(|e| e.len()).collect();
            let mut queue: VecDeque<usize> = (0..g.len()).filter(|&u| good[u]).collect();
            while let Some(v) = queue.pop_front() {
                for &u in &preds[v] {
                    if good[u] {
                        continue;
                    }
                    pending[u] -= 1;
                    if pending[u] == 0 {
                        good[u] = true;
                        queue.push_back(u);
                    }
                }
            }

            if let Some(trigger) = (0..g.len()).find(|&u| at(&g.nodes[u], c) && !good[u]) {
                let mut path = g.path_to(trigger);
                // Walk bad states until a deadlock or a repeat.
                let mut seen: HashSet<usize> = path.iter().copied().collect();
                let mut cur = trigger;
                while let Some(&next) = g.edges[cur].iter().find(|&&v| !good[v]) {
                    path.push(next);
                    if !seen.insert(next) {
                        break;
                    }
                    cur = next;
                }
                return CheckResult::fail(replay(net, g, &path));
            }
        }
    }
    CheckResult::ok()
}

/// Every re-entry into the sampling location happens exactly one period
/// after the previous one.
pub fn check_sampling_period_on(net: &Network, g: &StateGraph, expected: i64) -> PeriodReport {
    let mut measured = std::collections::BTreeSet::new();
    let mut offending = None;
    for (u, succ) in g.edges.iter().enumerate() {
        let src = &g.nodes[u];
        for &v in succ {
            let dst = &g.nodes[v];
            for comp in 0..net.automata.len() {
                let a = &net.automata[comp];
                let (Some(sampling), Some(start)) = (a.location(SAMPLING), a.location(START)) else { continue };
                if dst.locs[comp] == sampling && src.locs[comp] != sampling && src.locs[comp] != start {
                    let value = src.clocks[comp][CLOCK_S];
                    measured.insert(value);
                    if value != expected && offending.is_none() {
                        offending = Some(u);
                    }
                }
            }
        }
    }
    let measured: Vec<i64> = measured.into_iter().collect();
    let result = if let Some(u) = offending {
        CheckResult::fail(replay(net, g, &g.path_to(u)))
    } else if measured.is_empty() {
        // No cycle ever completes; show the run up to where it stops.
        let end = (0..g.len()).find(|&u| g.edges[u].is_empty()).unwrap_or(g.len() - 1);
        CheckResult::fail(replay(net, g, &g.path_to(end)))
    } else {
        CheckResult::ok()
    };
    PeriodReport { result, expected, measured }
}

fn explore_cfg(cfg: &WcetConfig) -> Result<(Network, StateGraph), NetError> {
    let net = build_network(cfg)?;
    let g = explore(&net, DEFAULT_STATE_BUDGET)?;
    Ok((net, g))
}

pub fn check_synchronous_sampling(cfg: &WcetConfig) -> Result<CheckResult, NetError> {
    let (net, g) = explore_cfg(cfg)?;
    Ok(check_synchronous_sampling_on(&net, &g))
}

pub fn check_liveness(cfg: &WcetConfig) -> Result<CheckResult, NetError> {
    let (net, g) = explore_cfg(cfg)?;
    Ok(check_liveness_on(&net, &g))
}

pub fn check_sampling_period(cfg: &WcetConfig) -> Result<PeriodReport, NetError> {
    let (net, g) = explore_cfg(cfg)?;
    Ok(check_sampling_period_on(&net, &g, cfg.period()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub states: usize,
    pub synchronous_sampling: CheckResult,
    pub liveness: CheckResult,
    pub period: PeriodReport,
}

impl VerifyReport {
    pub fn all_hold(&self) -> bool {
        self.synchronous_sampling.holds && self.liveness.holds && self.period.result.holds
    }
}

/// Explore once and run all three checks.
pub fn verify_network(net: &Network, expected_period: i64, budget: usize, threads: usize) -> Result<VerifyReport, NetError> {
    let g = explore_with_threads(net, budget, threads)?;
    Ok(VerifyReport {
        states: g.len(),
        synchronous_sampling: check_synchronous_sampling_on(net, &g),
        liveness: check_liveness_on(net, &g),
        period: check_sampling_period_on(net, &g, expected_period),
    })
}

pub fn verify(cfg: &WcetConfig, budget: usize, threads: usize) -> Result<VerifyReport, NetError> {
    let net = build_network(cfg)?;
    verify_network(&net, cfg.period(), budget, threads)
}

/// Timeline events along a witness path.
pub fn witness_timeline(net: &Network, path: &[NetworkState]) -> Vec<TimelineEvent> {
    let Some(first) = path.first() else { return Vec::new() };
    let mut events = initial_events(net, first);
    for pair in path.windows(2) {
        let want = pair[1].key();
        if let Some(t) = net.successors(&pair[0]).ok().and_then(|ts| ts.into_iter().find(|t| t.target.key() == want)) {
            events.extend(events_for(net, &t));
        }
    }
    events
}
