//! Argument model and dispatch for the `decmon` binary.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use decmon_core::decentral::{Scenario, SimError};
use decmon_core::fsm::build_fsm;
use decmon_core::ltl::{parse_formula, Alphabet, Trace};
use decmon_core::progression::monitor_trace;
use decmon_core::timed_net::{build_network, render_sequence, simulate, timeline_csv};
use decmon_core::verifier::{verify_network, DEFAULT_STATE_BUDGET};
use decmon_core::wcet::{comm_report, comm_wcet, cycles_to_seconds, sampling_frequency, BusModel, WcetError};
use decmon_core::{MonitorError, NetError, ParseError, TraceError, Verdict3, WcetConfig};

pub mod output;

use output::{CyclesOutput, FsmOutput, MonitorOutput, SamplingOutput, SimulateOutput, VerifyOutput, WcetOutput};

/// Exit status: success.
pub const EXIT_OK: u8 = 0;
/// Exit status: a property is violated or a verdict is BOT.
pub const EXIT_VIOLATION: u8 = 1;
/// Exit status: usage, input or internal error.
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Wcet(#[from] WcetError),
    #[error("DECMON_STATE_BUDGET: {0}")]
    Budget(String),
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "decmon", version, about = "Sample-based decentralized LTL monitoring toolkit")]
pub struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Exit 0 even when a property fails or a verdict is BOT.
    #[arg(long, global = true)]
    pub no_fail_on_violation: bool,
    /// Worker threads for state-space exploration (1 = sequential).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the progression monitor over a JSON-lines trace.
    Monitor {
        #[arg(short, long)]
        formula: String,
        /// Comma-separated alphabet; defaults to the formula and trace propositions.
        #[arg(long, value_delimiter = ',')]
        ap: Option<Vec<String>>,
        trace: PathBuf,
    },
    /// Build the progression-closure monitor automaton.
    BuildFsm {
        #[arg(short, long)]
        formula: String,
        /// Comma-separated alphabet; defaults to the formula propositions.
        #[arg(long, value_delimiter = ',')]
        ap: Option<Vec<String>>,
        /// Graphviz output instead of the text export.
        #[arg(long)]
        dot: bool,
        #[arg(long, default_value_t = 10_000)]
        state_cap: usize,
    },
    /// Deterministically execute the protocol network.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        #[arg(long, value_enum, default_value_t = TimelineFormat::Csv)]
        format: TimelineFormat,
    },
    /// Model-check synchronous sampling, liveness and the sampling period.
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run a decentralized monitoring scenario.
    Decmon { scenario: PathBuf },
    /// WCET budget report.
    Wcet(WcetArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TimelineFormat {
    Csv,
    Ascii,
}

/// A `key = value` config file, optionally overridden field by field.
#[derive(Debug, Default, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub fault_t: Option<u8>,
    #[arg(long)]
    pub wcet_l: Option<i64>,
    #[arg(long)]
    pub wcet_e: Option<i64>,
    #[arg(long)]
    pub wcet_m: Option<i64>,
    #[arg(long)]
    pub wcet_r: Option<i64>,
    #[arg(long)]
    pub wcet_v: Option<i64>,
    #[arg(long)]
    pub wcet_t: Option<i64>,
}

impl ConfigArgs {
    fn is_given(&self) -> bool {
        self.config.is_some() || self.n.is_some()
    }

    pub fn resolve(&self) -> Result<WcetConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => WcetConfig::from_kv(&read(path)?)?,
            None => match self.n {
                Some(_) => WcetConfig::default(),
                None => return Err(NetError::InvalidConfig("either --config or --n is required".into()).into()),
            },
        };
        let set = |field: &mut i64, v: Option<i64>| {
            if let Some(v) = v {
                *field = v;
            }
        };
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(f) = self.fault_t {
            cfg.fault_t = f;
        }
        set(&mut cfg.wcet_l, self.wcet_l);
        set(&mut cfg.wcet_e, self.wcet_e);
        set(&mut cfg.wcet_m, self.wcet_m);
        set(&mut cfg.wcet_r, self.wcet_r);
        set(&mut cfg.wcet_v, self.wcet_v);
        set(&mut cfg.wcet_t, self.wcet_t);
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct WcetArgs {
    /// Report the reference four-node bus (also the base for the bus flags).
    #[arg(long)]
    pub table1: bool,
    #[arg(long)]
    pub token_bytes: Option<u64>,
    #[arg(long)]
    pub result_bytes: Option<u64>,
    #[arg(long)]
    pub synch_bytes: Option<u64>,
    #[arg(long)]
    pub nodes: Option<u64>,
    #[arg(long)]
    pub bits_per_byte: Option<u64>,
    #[arg(long)]
    pub baud: Option<u64>,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Convert a cycle count of the rewriting step to seconds.
    #[arg(long)]
    pub cycles: Option<u64>,
    #[arg(long, default_value_t = 16_000_000)]
    pub clock_hz: u64,
    #[arg(long, default_value_t = 8)]
    pub prescaler: u64,
}

impl WcetArgs {
    fn bus(&self) -> BusModel {
        let base = BusModel::REFERENCE;
        BusModel {
            token_msg_bytes: self.token_bytes.unwrap_or(base.token_msg_bytes),
            result_msg_bytes: self.result_bytes.unwrap_or(base.result_msg_bytes),
            synch_msg_bytes: self.synch_bytes.unwrap_or(base.synch_msg_bytes),
            nodes: self.nodes.unwrap_or(base.nodes),
            bits_per_byte_on_wire: self.bits_per_byte.unwrap_or(base.bits_per_byte_on_wire),
            baud: self.baud.unwrap_or(base.baud),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn state_budget() -> Result<usize, CliError> {
    match std::env::var("DECMON_STATE_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Budget(format!("not a positive integer: {v:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_STATE_BUDGET),
        Err(e) => Err(CliError::Budget(e.to_string())),
    }
}

fn json_line<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

/// Run one command, writing its report to `out`. Returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let violated = |bad: bool| if bad && !cli.no_fail_on_violation { EXIT_VIOLATION } else { EXIT_OK };
    let mut text = String::new();
    let status = match &cli.command {
        Command::Monitor { formula, ap, trace } => {
            let raw = read(trace)?;
            let (f, alphabet, t) = match ap {
                Some(names) => {
                    let alphabet = Alphabet::new(names.iter().map(|s| s.trim()));
                    let f = parse_formula(formula, &alphabet)?;
                    let t = Trace::from_jsonl(&raw, &alphabet)?;
                    (f, alphabet, t)
                }
                None => {
                    let t = Trace::from_jsonl_open(&raw)?;
                    let (f, atoms) = decmon_core::ltl::parse_formula_open(formula)?;
                    let names: BTreeSet<String> = atoms.names().into_iter().chain(t.alphabet().names()).collect();
                    (f, Alphabet::new(names), t)
                }
            };
            let run = monitor_trace(&f, &t)?;
            let report = MonitorOutput::new(&run, alphabet.names());
            if cli.json {
                text = json_line(&report);
            } else {
                let _ = writeln!(text, "formula: {}", report.formula);
                for s in &report.steps {
                    let _ = writeln!(text, "{}\t{}\t{}\t{}", s.index, s.sample, s.verdict, s.formula);
                }
                let _ = writeln!(text, "verdict: {}", report.verdict);
            }
            violated(report.verdict == Verdict3::Bot)
        }
        Command::BuildFsm { formula, ap, dot, state_cap } => {
            let (f, alphabet) = match ap {
                Some(names) => {
                    let alphabet = Alphabet::new(names.iter().map(|s| s.trim()));
                    (parse_formula(formula, &alphabet)?, alphabet)
                }
                None => decmon_core::ltl::parse_formula_open(formula)?,
            };
            let m = build_fsm(&f, &alphabet, *state_cap)?;
            text = if cli.json {
                json_line(&FsmOutput::new(&f, &m))
            } else if *dot {
                m.to_dot()
            } else {
                m.export_text()
            };
            EXIT_OK
        }
        Command::Simulate { config, rounds, format } => {
            let cfg = config.resolve()?;
            let events = simulate(&cfg, *rounds)?;
            text = if cli.json {
                json_line(&SimulateOutput { config: cfg, period: cfg.period(), rounds: *rounds, events })
            } else {
                match format {
                    TimelineFormat::Csv => timeline_csv(&events),
                    TimelineFormat::Ascii => render_sequence(&events, cfg.n),
                }
            };
            EXIT_OK
        }
        Command::Verify { config } => {
            let cfg = config.resolve()?;
            cfg.validate()?;
            let net = build_network(&cfg)?;
            let report = verify_network(&net, cfg.period(), state_budget()?, cli.threads.max(1))?;
            let report = VerifyOutput::new(&cfg, &net, &report);
            if cli.json {
                text = json_line(&report);
            } else {
                let word = |b: bool| if b { "holds" } else { "fails" };
                let _ = writeln!(text, "states={}", report.states);
                let _ = writeln!(text, "synch-sampling={}", word(report.synchronous_sampling.holds));
                let _ = writeln!(text, "liveness={}", word(report.liveness.holds));
                let measured: Vec<String> = report.period.measured.iter().map(i64::to_string).collect();
                let _ = writeln!(text, "period={} (expected {})", measured.join(","), report.period.expected);
                let witnesses = [
                    ("synch-sampling", &report.synchronous_sampling.witness),
                    ("liveness", &report.liveness.witness),
                    ("period", &report.period.witness),
                ];
                for (name, w) in witnesses {
                    if let Some(events) = w {
                        let _ = writeln!(text, "\n{name} counterexample:");
                        text.push_str(&render_sequence(events, cfg.n));
                    }
                }
            }
            violated(!report.all_hold())
        }
        Command::Decmon { scenario } => {
            let s = Scenario::load(scenario)?;
            let base = scenario.parent().unwrap_or_else(|| Path::new("."));
            let reports = s.run(base)?;
            for r in &reports {
                if cli.json {
                    text.push_str(&serde_json::to_string(r).expect("report serializes"));
                    text.push('\n');
                } else {
                    let verdicts: Vec<String> = r.verdicts.iter().map(Verdict3::to_string).collect();
                    let voted = r.voted.map(|v| format!(" voted={v}")).unwrap_or_default();
                    let _ = writeln!(
                        text,
                        "round={} time={} sample={} verdicts=[{}]{voted} decision={}",
                        r.round,
                        r.time,
                        r.merged,
                        verdicts.join(","),
                        r.decision
                    );
                }
            }
            violated(reports.last().is_some_and(|r| r.decision == Verdict3::Bot))
        }
        Command::Wcet(args) => {
            let bus = args.bus();
            bus.validate()?;
            let comm = comm_wcet(&bus);
            let sampling = if args.config.is_given() {
                let cfg = args.config.resolve()?;
                let sf = sampling_frequency(&cfg)?;
                Some(SamplingOutput { config: cfg, period: sf.period, frequency: sf.frequency })
            } else {
                None
            };
            let cycles = args
                .cycles
                .map(|c| {
                    cycles_to_seconds(c, args.clock_hz, args.prescaler).map(|seconds| CyclesOutput {
                        cycles: c,
                        clock_hz: args.clock_hz,
                        prescaler: args.prescaler,
                        seconds,
                    })
                })
                .transpose()?;
            let report = WcetOutput { bus, comm, sampling, cycles };
            if cli.json {
                text = json_line(&report);
            } else {
                text = comm_report(&bus);
                if let Some(s) = &report.sampling {
                    let _ = writeln!(text, "{:<16} {:<14} time units per cycle", "sampling period", s.period);
                    let _ = writeln!(text, "{:<16} {:<14} cycles per time unit", "sampling freq", s.frequency);
                }
                if let Some(c) = &report.cycles {
                    let _ = writeln!(
                        text,
                        "{:<16} {:<14} {} cycles at {} Hz / {}",
                        "rewriting time",
                        format!("{} sec", c.seconds),
                        c.cycles,
                        c.clock_hz,
                        c.prescaler
                    );
                }
            }
            EXIT_OK
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_file() {
        let dir = std::env::temp_dir().join(format!("decmon-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.cfg");
        std::fs::write(&path, "n = 3\nfault_t = 1\nwcet_m = 9\n").unwrap();
        let args = ConfigArgs { config: Some(path), wcet_m: Some(4), ..ConfigArgs::default() };
        let cfg = args.resolve().unwrap();
        assert_eq!((cfg.n, cfg.fault_t, cfg.wcet_m, cfg.wcet_l), (3, 1, 4, 1));
        std::fs::remove_dir_all(dir).unwrap();
        assert!(ConfigArgs::default().resolve().is_err());
    }

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["decmon", "verify", "--n", "3", "--json", "--threads", "2"]).unwrap();
        assert!(cli.json);
        assert_eq!(cli.threads, 2);
        assert!(Cli::try_parse_from(["decmon"]).is_err());
    }
}
