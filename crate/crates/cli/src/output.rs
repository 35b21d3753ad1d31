//! JSON schemas of the `--json` reports.

use decmon_core::decentral::RoundReport;
use decmon_core::fsm::MonitorFsm;
use decmon_core::ltl::{Formula, Sample};
use decmon_core::progression::MonitorRun;
use decmon_core::timed_net::{Network, TimelineEvent};
use decmon_core::verifier::{witness_timeline, CheckResult, VerifyReport};
use decmon_core::wcet::{BusModel, CommWcet};
use decmon_core::{Verdict3, WcetConfig};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorOutput {
    pub formula: String,
    pub alphabet: Vec<String>,
    pub steps: Vec<StepOutput>,
    pub verdict: Verdict3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOutput {
    pub index: usize,
    pub sample: Sample,
    pub formula: String,
    pub verdict: Verdict3,
}

impl MonitorOutput {
    pub fn new(run: &MonitorRun, alphabet: Vec<String>) -> Self {
        MonitorOutput {
            formula: run.initial.to_string(),
            alphabet,
            steps: run
                .steps
                .iter()
                .enumerate()
                .map(|(index, s)| StepOutput {
                    index,
                    sample: s.input.clone(),
                    formula: s.rewritten.to_string(),
                    verdict: s.verdict,
                })
                .collect(),
            verdict: run.final_verdict(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsmOutput {
    pub formula: String,
    pub alphabet: Vec<String>,
    pub initial: usize,
    pub states: Vec<FsmState>,
    pub transitions: Vec<FsmTransition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsmState {
    pub id: usize,
    pub formula: String,
    pub verdict: Verdict3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsmTransition {
    pub from: usize,
    pub sample: Sample,
    pub to: usize,
}

impl FsmOutput {
    pub fn new(f: &Formula, m: &MonitorFsm) -> Self {
        FsmOutput {
            formula: f.to_string(),
            alphabet: m.alphabet().to_vec(),
            initial: m.initial(),
            states: m
                .states()
                .iter()
                .enumerate()
                .map(|(id, s)| FsmState { id, formula: s.to_string(), verdict: m.verdict_of(id) })
                .collect(),
            transitions: m.transitions().map(|(from, sample, to)| FsmTransition { from, sample, to }).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulateOutput {
    pub config: WcetConfig,
    pub period: i64,
    pub rounds: usize,
    pub events: Vec<TimelineEvent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyOutput {
    pub holds: bool,
    /// Counterexample timeline from the initial state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<TimelineEvent>>,
}

impl PropertyOutput {
    fn new(net: &Network, r: &CheckResult) -> Self {
        PropertyOutput { holds: r.holds, witness: r.witness.as_ref().map(|w| witness_timeline(net, w)) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodOutput {
    pub holds: bool,
    pub expected: i64,
    pub measured: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<TimelineEvent>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub config: WcetConfig,
    pub states: usize,
    pub synchronous_sampling: PropertyOutput,
    pub liveness: PropertyOutput,
    pub period: PeriodOutput,
}

impl VerifyOutput {
    pub fn new(cfg: &WcetConfig, net: &Network, r: &VerifyReport) -> Self {
        let p = PropertyOutput::new(net, &r.period.result);
        VerifyOutput {
            config: *cfg,
            states: r.states,
            synchronous_sampling: PropertyOutput::new(net, &r.synchronous_sampling),
            liveness: PropertyOutput::new(net, &r.liveness),
            period: PeriodOutput {
                holds: p.holds,
                expected: r.period.expected,
                measured: r.period.measured.clone(),
                witness: p.witness,
            },
        }
    }

    pub fn all_hold(&self) -> bool {
        self.synchronous_sampling.holds && self.liveness.holds && self.period.holds
    }
}

/// `decmon` reports are JSON lines of this type.
pub type DecmonLine = RoundReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WcetOutput {
    pub bus: BusModel,
    pub comm: CommWcet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingOutput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<CyclesOutput>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingOutput {
    pub config: WcetConfig,
    pub period: i64,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclesOutput {
    pub cycles: u64,
    pub clock_hz: u64,
    pub prescaler: u64,
    pub seconds: f64,
}
