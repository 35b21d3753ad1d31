use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TraceError;

/// LTL formula over named atomic propositions.
///
/// The derived `Ord` is the structural key used to sort conjuncts and
/// disjuncts during simplification, so variant order matters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Always(Box<Formula>),
    Eventually(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(l: Formula, r: Formula) -> Self {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    /// Total number of nodes in the tree.
    pub fn symbol_count(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Next(f) | Formula::Always(f) | Formula::Eventually(f) => {
                1 + f.symbol_count()
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r)
            | Formula::Until(l, r) => 1 + l.symbol_count() + r.symbol_count(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Not(f) | Formula::Next(f) | Formula::Always(f) | Formula::Eventually(f) => {
                f.collect_atoms(out)
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r)
            | Formula::Until(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Rewrite the shorthand operators into the core set
    /// `{true, false, atom, !, &, X, U}`.
    pub fn expand_derived(&self) -> Formula {
        use Formula::*;
        match self {
            True => True,
            False => False,
            Atom(p) => Atom(p.clone()),
            Not(f) => Formula::not(f.expand_derived()),
            And(l, r) => Formula::and(l.expand_derived(), r.expand_derived()),
            // a | b  <=>  !(!a & !b)
            Or(l, r) => Formula::not(Formula::and(
                Formula::not(l.expand_derived()),
                Formula::not(r.expand_derived()),
            )),
            // a -> b  <=>  !a | b
            Implies(l, r) => {
                Formula::or(Formula::not((**l).clone()), (**r).clone()).expand_derived()
            }
            // a <-> b  <=>  (a -> b) & (b -> a)
            Iff(l, r) => Formula::and(
                Formula::implies((**l).clone(), (**r).clone()),
                Formula::implies((**r).clone(), (**l).clone()),
            )
            .expand_derived(),
            Next(f) => Formula::next(f.expand_derived()),
            Until(l, r) => Formula::until(l.expand_derived(), r.expand_derived()),
            // G a  <=>  !(true U !a); `false U x` is just `x`
            Always(f) => Formula::not(Formula::until(True, Formula::not(f.expand_derived()))),
            // F a  <=>  true U a
            Eventually(f) => Formula::until(True, f.expand_derived()),
        }
    }

    /// True when only core operators appear.
    pub fn is_core(&self) -> bool {
        use Formula::*;
        match self {
            True | False | Atom(_) => true,
            Not(f) | Next(f) => f.is_core(),
            And(l, r) | Until(l, r) => l.is_core() && r.is_core(),
            Or(..) | Implies(..) | Iff(..) | Always(_) | Eventually(_) => false,
        }
    }

    /// Binding strength used by the printer and parser; higher binds tighter.
    pub(crate) fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Until(..) => 5,
            Formula::Not(_) | Formula::Next(_) | Formula::Always(_) | Formula::Eventually(_) => 6,
            Formula::True | Formula::False | Formula::Atom(_) => 7,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Left-associative: & | <->.  Right-associative: -> U.
        fn child(out: &mut fmt::Formatter<'_>, c: &Formula, min: u8) -> fmt::Result {
            if c.precedence() < min {
                write!(out, "({c})")
            } else {
                write!(out, "{c}")
            }
        }
        fn binary(
            out: &mut fmt::Formatter<'_>,
            op: &str,
            prec: u8,
            right_assoc: bool,
            l: &Formula,
            r: &Formula,
        ) -> fmt::Result {
            let (lmin, rmin) = if right_assoc { (prec + 1, prec) } else { (prec, prec + 1) };
            child(out, l, lmin)?;
            write!(out, " {op} ")?;
            child(out, r, rmin)
        }
        fn unary(out: &mut fmt::Formatter<'_>, op: &str, c: &Formula) -> fmt::Result {
            write!(out, "{op}")?;
            child(out, c, 6)
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::Not(c) => unary(f, "!", c),
            Formula::Next(c) => unary(f, "X ", c),
            Formula::Always(c) => unary(f, "G ", c),
            Formula::Eventually(c) => unary(f, "F ", c),
            Formula::And(l, r) => binary(f, "&", 4, false, l, r),
            Formula::Or(l, r) => binary(f, "|", 3, false, l, r),
            Formula::Implies(l, r) => binary(f, "->", 2, true, l, r),
            Formula::Iff(l, r) => binary(f, "<->", 1, false, l, r),
            Formula::Until(l, r) => binary(f, "U", 5, true, l, r),
        }
    }
}

/// Propositions true at one sampling instant.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sample {
    pub props: BTreeSet<String>,
}

impl Sample {
    pub fn new<I, S>(props: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Sample { props: props.into_iter().map(Into::into).collect() }
    }

    pub fn empty() -> Self {
        Sample::default()
    }

    pub fn contains(&self, prop: &str) -> bool {
        self.props.contains(prop)
    }

    pub fn union(&self, other: &Sample) -> Sample {
        Sample { props: self.props.union(&other.props).cloned().collect() }
    }

    pub fn check(&self, alphabet: &Alphabet) -> Result<(), TraceError> {
        match self.props.iter().find(|p| !alphabet.contains(p)) {
            Some(p) => Err(TraceError::UnknownProposition(p.clone())),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.props.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Ordered finite sequence of samples.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Trace(pub Vec<Sample>);

impl Trace {
    pub fn new(samples: Vec<Sample>) -> Self {
        Trace(samples)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sample> {
        self.0.iter()
    }

    pub fn check(&self, alphabet: &Alphabet) -> Result<(), TraceError> {
        self.0.iter().try_for_each(|s| s.check(alphabet))
    }

    /// Parse a JSON-lines trace file: one `{"props": [...]}` object per
    /// non-blank line.
    pub fn from_jsonl(text: &str, alphabet: &Alphabet) -> Result<Self, TraceError> {
        let mut samples = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let sample: Sample = serde_json::from_str(line)
                .map_err(|e| TraceError::Json { line: idx + 1, message: e.to_string() })?;
            sample.check(alphabet)?;
            samples.push(sample);
        }
        Ok(Trace(samples))
    }

    /// Parse without an alphabet check; `alphabet()` then reports what was
    /// observed.
    pub fn from_jsonl_open(text: &str) -> Result<Self, TraceError> {
        text.lines()
            .enumerate()
            .filter(|(_, line)| !line.trim().is_empty())
            .map(|(idx, line)| {
                serde_json::from_str(line).map_err(|e| TraceError::Json { line: idx + 1, message: e.to_string() })
            })
            .collect::<Result<Vec<Sample>, _>>()
            .map(Trace)
    }

    /// Every proposition occurring in some sample.
    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.0.iter().flat_map(|s| s.props.iter().cloned()))
    }

    pub fn to_jsonl(&self) -> String {
        self.0
            .iter()
            .map(|s| serde_json::to_string(s).expect("sample serializes") + "\n")
            .collect()
    }
}

impl FromIterator<Sample> for Trace {
    fn from_iter<T: IntoIterator<Item = Sample>>(iter: T) -> Self {
        Trace(iter.into_iter().collect())
    }
}

/// Declared set of atomic propositions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet(BTreeSet<String>);

impl Alphabet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Alphabet(names.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Names in sorted order; bit `i` of a sample index refers to the
    /// `i`-th name.
    pub fn names(&self) -> Vec<String> {
        self.0.iter().cloned().collect()
    }

    pub fn as_set(&self) -> &BTreeSet<String> {
        &self.0
    }

    /// Every subset of the alphabet, ordered by bitmask.
    pub fn all_samples(&self) -> Vec<Sample> {
        let names = self.names();
        assert!(names.len() < 32, "alphabet too large to enumerate");
        (0u32..(1 << names.len())).map(|bits| sample_from_bits(&names, bits)).collect()
    }
}

pub(crate) fn sample_from_bits(names: &[String], bits: u32) -> Sample {
    Sample {
        props: names
            .iter()
            .enumerate()
            .filter(|(i, _)| bits & (1 << i) != 0)
            .map(|(_, n)| n.clone())
            .collect(),
    }
}

/// Ultimately periodic word `stem · loop^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoWord {
    pub stem: Vec<Sample>,
    pub cycle: Vec<Sample>,
}

impl LassoWord {
    pub fn new(stem: Vec<Sample>, cycle: Vec<Sample>) -> Result<Self, TraceError> {
        if cycle.is_empty() {
            return Err(TraceError::EmptyLoop);
        }
        Ok(LassoWord { stem, cycle })
    }

    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub(crate) fn at(&self, pos: usize) -> &Sample {
        if pos < self.stem.len() {
            &self.stem[pos]
        } else {
            &self.cycle[pos - self.stem.len()]
        }
    }

    pub(crate) fn succ(&self, pos: usize) -> usize {
        if pos + 1 < self.len() {
            pos + 1
        } else {
            self.stem.len()
        }
    }

    /// The word `sample · self`.
    pub fn prepend(&self, sample: Sample) -> LassoWord {
        let mut stem = Vec::with_capacity(self.stem.len() + 1);
        stem.push(sample);
        stem.extend(self.stem.iter().cloned());
        LassoWord { stem, cycle: self.cycle.clone() }
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
