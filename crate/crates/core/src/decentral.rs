//! Decentralized monitoring over synchronous rounds.
//!
//! Each component samples its own propositions, the changed events are
//! multicast so every component sees the merged global sample, and each
//! component advances an identical progression monitor. With `fault_t = 1`
//! the per-component results are combined by strict-majority vote.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MonitorError, NetError, ParseError, TraceError};
use crate::ltl::{parse_formula, Alphabet, Formula, Sample, Trace};
use crate::progression::ProgressionMonitor;
use crate::timed_net::WcetConfig;
use crate::verdict::Verdict3;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("proposition '{prop}' is observed by both component {first} and component {second}")]
    Overlap { prop: String, first: usize, second: usize },
    #[error("propositions {0:?} are not observed by any component")]
    Uncovered(Vec<String>),
    #[error("partition has {partition} components but {expected} were expected")]
    ComponentCount { partition: usize, expected: usize },
    #[error("local traces differ in length: component {component} has {len}, component 0 has {expected}")]
    LengthMismatch { component: usize, len: usize, expected: usize },
    #[error("component {component}, round {round}: '{prop}' is outside its local alphabet")]
    ForeignProposition { component: usize, round: usize, prop: String },
    #[error("fault targets component {component}, but there are only {n}")]
    FaultOutOfRange { component: usize, n: usize },
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error(transparent)]
    Config(#[from] NetError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Pairwise-disjoint local alphabets, one per component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<BTreeSet<String>>", into = "Vec<BTreeSet<String>>")]
pub struct Partition {
    alphabets: Vec<BTreeSet<String>>,
}

impl Partition {
    /// Build a partition; any proposition listed twice is rejected.
    pub fn new(alphabets: Vec<BTreeSet<String>>) -> Result<Self, SimError> {
        for (i, a) in alphabets.iter().enumerate() {
            for (j, b) in alphabets.iter().enumerate().skip(i + 1) {
                if let Some(p) = a.intersection(b).next() {
                    return Err(SimError::Overlap { prop: p.clone(), first: i, second: j });
                }
            }
        }
        Ok(Partition { alphabets })
    }

    /// Also require the union to cover `ap`.
    pub fn covering(alphabets: Vec<BTreeSet<String>>, ap: &Alphabet) -> Result<Self, SimError> {
        let p = Partition::new(alphabets)?;
        let union = p.union();
        let missing: Vec<String> = ap.as_set().difference(union.as_set()).cloned().collect();
        if !missing.is_empty() {
            return Err(SimError::Uncovered(missing));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.alphabets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabets.is_empty()
    }

    pub fn local(&self, component: usize) -> &BTreeSet<String> {
        &self.alphabets[component]
    }

    pub fn union(&self) -> Alphabet {
        Alphabet::new(self.alphabets.iter().flatten().cloned())
    }
}

impl TryFrom<Vec<BTreeSet<String>>> for Partition {
    type Error = SimError;

    fn try_from(v: Vec<BTreeSet<String>>) -> Result<Self, Self::Error> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<BTreeSet<String>> {
    fn from(p: Partition) -> Self {
        p.alphabets
    }
}

/// Forced per-component result in one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub round: usize,
    pub component: usize,
    pub verdict: Verdict3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: usize,
    /// Model time of the sampling instant.
    pub time: i64,
    pub merged: Sample,
    pub verdicts: Vec<Verdict3>,
    /// Majority vote; present only with NMR enabled.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub voted: Option<Verdict3>,
    /// Voted verdict with NMR, otherwise the unanimous verdict (UNKNOWN
    /// when the components disagree).
    pub decision: Verdict3,
}

/// Strict-majority vote. UNKNOWN when no value has more than half the
/// votes, including for an empty list.
pub fn vote(verdicts: &[Verdict3]) -> Verdict3 {
    [Verdict3::Top, Verdict3::Bot, Verdict3::Unknown]
        .into_iter()
        .find(|v| 2 * verdicts.iter().filter(|x| *x == v).count() > verdicts.len())
        .unwrap_or(Verdict3::Unknown)
}

fn unanimous(verdicts: &[Verdict3]) -> Verdict3 {
    match verdicts.split_first() {
        Some((first, rest)) if rest.iter().all(|v| v == first) => *first,
        _ => Verdict3::Unknown,
    }
}

/// Run the decentralized protocol until the traces end or the decision
/// becomes definite.
pub fn run_decentralized(
    f: &Formula,
    partition: &Partition,
    local_traces: &[Trace],
    cfg: &WcetConfig,
    faults: &[Fault],
) -> Result<Vec<RoundReport>, SimError> {
    cfg.validate()?;
    let n = cfg.n;
    if partition.len() != n {
        return Err(SimError::ComponentCount { partition: partition.len(), expected: n });
    }
    if local_traces.len() != n {
        return Err(SimError::ComponentCount { partition: local_traces.len(), expected: n });
    }
    let missing: Vec<String> = f.atoms().difference(partition.union().as_set()).cloned().collect();
    if !missing.is_empty() {
        return Err(SimError::Uncovered(missing));
    }
    let rounds = local_traces[0].len();
    for (c, t) in local_traces.iter().enumerate() {
        if t.len() != rounds {
            return Err(SimError::LengthMismatch { component: c, len: t.len(), expected: rounds });
        }
        for (r, s) in t.iter().enumerate() {
            if let Some(p) = s.props.iter().find(|p| !partition.local(c).contains(*p)) {
                return Err(SimError::ForeignProposition { component: c, round: r, prop: p.clone() });
            }
        }
    }
    if let Some(bad) = faults.iter().find(|x| x.component >= n) {
        return Err(SimError::FaultOutOfRange { component: bad.component, n });
    }

    let period = cfg.period();
    let mut monitors: Vec<ProgressionMonitor> =
        (0..n).map(|_| ProgressionMonitor::new(f)).collect::<Result<_, _>>()?;
    let mut reports = Vec::with_capacity(rounds);
    for round in 0..rounds {
        let merged = local_traces.iter().fold(Sample::empty(), |acc, t| acc.union(&t.0[round]));
        let mut verdicts: Vec<Verdict3> = monitors
            .par_iter_mut()
            .map(|m| m.step(&merged))
            .collect::<Result<_, MonitorError>>()?;
        for fault in faults.iter().filter(|x| x.round == round) {
            verdicts[fault.component] = fault.verdict;
        }
        let voted = (cfg.fault_t == 1).then(|| vote(&verdicts));
        let decision = voted.unwrap_or_else(|| unanimous(&verdicts));
        reports.push(RoundReport { round, time: round as i64 * period, merged, verdicts, voted, decision });
        if decision.is_definite() {
            break;
        }
    }
    Ok(reports)
}

/// On-disk description of a decentralized run. Trace paths are relative
/// to the scenario file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub formula: String,
    pub partition: Partition,
    pub traces: Vec<String>,
    pub config: WcetConfig,
    #[serde(default)]
    pub faults: Vec<Fault>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, SimError> {
        let io = |e: std::io::Error| SimError::Io { path: path.display().to_string(), message: e.to_string() };
        let text = std::fs::read_to_string(path).map_err(io)?;
        serde_json::from_str(&text).map_err(|e| SimError::Io { path: path.display().to_string(), message: e.to_string() })
    }

    /// Parse the formula and read every local trace.
    pub fn run(&self, base: &Path) -> Result<Vec<RoundReport>, SimError> {
        let ap = self.partition.union();
        let f = parse_formula(&self.formula, &ap)?;
        let traces = self
            .traces
            .iter()
            .map(|rel| {
                let path = base.join(rel);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| SimError::Io { path: path.display().to_string(), message: e.to_string() })?;
                Ok(Trace::from_jsonl(&text, &ap)?)
            })
            .collect::<Result<Vec<_>, SimError>>()?;
        run_decentralized(&f, &self.partition, &traces, &self.config, &self.faults)
    }
}
