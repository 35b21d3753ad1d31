//! Deterministic finite-state monitors built by progression closure.
//!
//! Every simplified obligation reachable from the initial formula becomes a
//! state. States are identified by canonical structural equality, so the
//! machine is not necessarily minimal.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{MonitorError, TraceError};
use crate::ltl::{sample_from_bits, Alphabet, Formula, Sample, Trace};
use crate::progression::{progress, simplify, verdict_of, Verdict3, MAX_FORMULA_SYMBOLS};

/// Largest alphabet stored as a dense table.
pub const DENSE_ALPHABET_LIMIT: usize = 16;
/// Largest alphabet the builder accepts.
pub const MAX_ALPHABET: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Transitions {
    /// `table[state << k | sample_bits]`
    Dense(Vec<u32>),
    Sparse(HashMap<(u32, u32), u32>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitorFsm {
    alphabet: Vec<String>,
    states: Vec<Formula>,
    initial: usize,
    transitions: Transitions,
}

impl MonitorFsm {
    pub fn states(&self) -> &[Formula] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn verdict_of(&self, state: usize) -> Verdict3 {
        verdict_of(&self.states[state])
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.transitions, Transitions::Dense(_))
    }

    pub fn successor(&self, state: usize, sample_bits: u32) -> usize {
        match &self.transitions {
            Transitions::Dense(t) => t[(state << self.alphabet.len()) | sample_bits as usize] as usize,
            Transitions::Sparse(t) => t[&(state as u32, sample_bits)] as usize,
        }
    }

    /// Bitmask of `s` over the sorted alphabet.
    pub fn sample_bits(&self, s: &Sample) -> Result<u32, TraceError> {
        let mut bits = 0u32;
        for p in &s.props {
            match self.alphabet.binary_search(p) {
                Ok(i) => bits |= 1 << i,
                Err(_) => return Err(TraceError::UnknownProposition(p.clone())),
            }
        }
        Ok(bits)
    }

    /// Verdict of the state reached after `t`, stopping early at sinks.
    pub fn run(&self, t: &Trace) -> Result<Verdict3, TraceError> {
        let mut state = self.initial;
        for s in t.iter() {
            if self.verdict_of(state).is_definite() {
                break;
            }
            state = self.successor(state, self.sample_bits(s)?);
        }
        Ok(self.verdict_of(state))
    }

    /// Every `(source, sample, target)` triple, by source then sample bits.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, Sample, usize)> + '_ {
        (0..self.states.len()).flat_map(move |state| {
            (0..(1u32 << self.alphabet.len()))
                .map(move |bits| (state, sample_from_bits(&self.alphabet, bits), self.successor(state, bits)))
        })
    }

    /// One line per transition: `source {props} target`, preceded by a
    /// header listing the states.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "alphabet {}", self.alphabet.join(","));
        let _ = writeln!(out, "initial {}", self.initial);
        for (i, f) in self.states.iter().enumerate() {
            let _ = writeln!(out, "state {i} {} {f}", verdict_of(f));
        }
        for (state, s, target) in self.transitions() {
            let _ = writeln!(out, "{state} {s} {target}");
        }
        out
    }

    /// Graphviz rendering; parallel transitions are merged into one edge
    /// whose label lists the samples.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph monitor {\n  rankdir=LR;\n  __start [shape=point];\n");
        for (i, f) in self.states.iter().enumerate() {
            let shape = match verdict_of(f) {
                Verdict3::Unknown => "circle",
                _ => "doublecircle",
            };
            let label = format!("{}\\n{}", verdict_of(f), f).replace('"', "\\\"");
            let _ = writeln!(out, "  s{i} [shape={shape}, label=\"{label}\"];");
        }
        let _ = writeln!(out, "  __start -> s{};", self.initial);
        for state in 0..self.states.len() {
            let mut by_target: Vec<(usize, Vec<String>)> = Vec::new();
            for bits in 0..(1u32 << self.alphabet.len()) {
                let target = self.successor(state, bits);
                let label = sample_from_bits(&self.alphabet, bits).to_string();
                match by_target.iter_mut().find(|(t, _)| *t == target) {
                    Some((_, labels)) => labels.push(label),
                    None => by_target.push((target, vec![label])),
                }
            }
            for (target, labels) in by_target {
                let _ = writeln!(out, "  s{state} -> s{target} [label=\"{}\"];", labels.join(" "));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Breadth-first closure of `simplify(progress(., sample))` from
/// `simplify(f)` over every sample of `alphabet`.
pub fn build_fsm(f: &Formula, alphabet: &Alphabet, state_cap: usize) -> Result<MonitorFsm, MonitorError> {
    if state_cap < 2 {
        return Err(MonitorError::InvalidStateCap);
    }
    if alphabet.len() > MAX_ALPHABET {
        return Err(MonitorError::AlphabetTooLarge(alphabet.len()));
    }
    if let Some(p) = f.atoms().into_iter().find(|p| !alphabet.contains(p)) {
        return Err(TraceError::UnknownProposition(p).into());
    }
    let names = alphabet.names();
    let k = names.len();
    let samples: Vec<Sample> = (0..(1u32 << k)).map(|b| sample_from_bits(&names, b)).collect();

    let start = simplify(f);
    check_size(&start)?;
    let mut states = vec![start.clone()];
    let mut index: HashMap<Formula, usize> = HashMap::from([(start, 0)]);
    let mut edges: Vec<Vec<u32>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(state) = queue.pop_front() {
        let current = states[state].clone();
        let mut row = Vec::with_capacity(samples.len());
        for s in &samples {
            let next = simplify(&progress(&current, s));
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    check_size(&next)?;
                    let id = states.len();
                    if id >= state_cap {
                        return Err(MonitorError::StateCapExceeded { discovered: id + 1, cap: state_cap });
                    }
                    index.insert(next.clone(), id);
                    states.push(next);
                    queue.push_back(id);
                    id
                }
            };
            row.push(id as u32);
        }
        debug_assert_eq!(edges.len(), state);
        edges.push(row);
    }

    let transitions = if k <= DENSE_ALPHABET_LIMIT {
        Transitions::Dense(edges.into_iter().flatten().collect())
    } else {
        Transitions::Sparse(
            edges
                .into_iter()
                .enumerate()
                .flat_map(|(s, row)| {
                    row.into_iter().enumerate().map(move |(bits, t)| ((s as u32, bits as u32), t))
                })
                .collect(),
        )
    };
    Ok(MonitorFsm { alphabet: names, states, initial: 0, transitions })
}

fn check_size(f: &Formula) -> Result<(), MonitorError> {
    let size = f.symbol_count();
    if size > MAX_FORMULA_SYMBOLS {
        return Err(MonitorError::FormulaTooLarge { size, limit: MAX_FORMULA_SYMBOLS });
    }
    Ok(())
}

/// Final verdict of `m` on `t`.
pub fn run_fsm(m: &MonitorFsm, t: &Trace) -> Result<Verdict3, TraceError> {
    m.run(t)
}
