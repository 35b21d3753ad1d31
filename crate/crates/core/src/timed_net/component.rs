//! The per-component protocol template and its WCET parameters.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::automaton::{Action, ClockConstraint, CmpOp, Edge, IntExpr, TimedAutomaton, VarConstraint};
use super::network::{Network, VarDecl};
use crate::error::NetError;

pub const START: &str = "start";
pub const SAMPLING: &str = "sampling_local_events";
pub const SENDING: &str = "sending_receiving_events";
pub const MONITORING: &str = "local_monitoring";
pub const SEND_RESULT: &str = "send_receive_result";
pub const VOTING: &str = "voting";
pub const EXEC_TASK: &str = "exec_local_task";

pub const CLOCK_X: usize = 0;
pub const CLOCK_S: usize = 1;

pub const CH_SYNCH: usize = 0;
pub const CH_SEND: usize = 1;

pub const VAR_SID: usize = 0;
pub const VAR_CYCLE: usize = 1;

/// WCET budget of each protocol phase, in integer time units (ms).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WcetConfig {
    /// sample the local events
    pub wcet_l: i64,
    /// one multicast of changed events
    pub wcet_e: i64,
    /// run the local monitor
    pub wcet_m: i64,
    /// one multicast of a monitor result
    pub wcet_r: i64,
    /// voting
    pub wcet_v: i64,
    /// local task
    pub wcet_t: i64,
    /// 1 enables NMR result exchange and voting
    pub fault_t: u8,
    /// number of components
    pub n: usize,
}

impl Default for WcetConfig {
    fn default() -> Self {
        WcetConfig { wcet_l: 1, wcet_e: 1, wcet_m: 1, wcet_r: 1, wcet_v: 1, wcet_t: 1, fault_t: 0, n: 2 }
    }
}

impl WcetConfig {
    pub fn validate(&self) -> Result<(), NetError> {
        self.validate_budget()?;
        if self.fault_t == 1 && self.n.is_multiple_of(2) {
            return Err(NetError::InvalidConfig(format!(
                "fault_t=1 needs an odd number of components for a strict majority, got n={}",
                self.n
            )));
        }
        Ok(())
    }

    /// Range checks needed for period arithmetic alone; parity of `n` is
    /// not required here.
    pub fn validate_budget(&self) -> Result<(), NetError> {
        let bad = |msg: String| Err(NetError::InvalidConfig(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.fault_t > 1 {
            return bad(format!("fault_t must be 0 or 1, got {}", self.fault_t));
        }
        for (name, v) in self.wcets() {
            if v < 1 {
                return bad(format!("{name} must be at least 1, got {v}"));
            }
        }
        Ok(())
    }

    fn wcets(&self) -> [(&'static str, i64); 6] {
        [
            ("wcet_l", self.wcet_l),
            ("wcet_e", self.wcet_e),
            ("wcet_m", self.wcet_m),
            ("wcet_r", self.wcet_r),
            ("wcet_v", self.wcet_v),
            ("wcet_t", self.wcet_t),
        ]
    }

    /// Length of one protocol cycle:
    /// `wcet_l + n*wcet_e + wcet_m + fault_t*(n*wcet_r + wcet_v) + wcet_t`.
    pub fn period(&self) -> i64 {
        let n = self.n as i64;
        self.wcet_l + n * self.wcet_e + self.wcet_m + i64::from(self.fault_t) * (n * self.wcet_r + self.wcet_v) + self.wcet_t
    }

    /// Parse flat `key=value` lines. Blank lines and `#` comments are
    /// ignored; omitted WCETs default to 1 and `fault_t` to 0; `n` is
    /// required.
    pub fn from_kv(text: &str) -> Result<Self, NetError> {
        let mut cfg = WcetConfig::default();
        let mut seen_n = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| NetError::ConfigParse { line: idx + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| parse_err(format!("expected key=value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let int: i64 = value.parse().map_err(|_| parse_err(format!("'{value}' is not an integer")))?;
            match key {
                "wcet_l" => cfg.wcet_l = int,
                "wcet_e" => cfg.wcet_e = int,
                "wcet_m" => cfg.wcet_m = int,
                "wcet_r" => cfg.wcet_r = int,
                "wcet_v" => cfg.wcet_v = int,
                "wcet_t" => cfg.wcet_t = int,
                "fault_t" => {
                    cfg.fault_t = u8::try_from(int).map_err(|_| parse_err(format!("fault_t out of range: {int}")))?
                }
                "n" => {
                    cfg.n = usize::try_from(int).map_err(|_| parse_err(format!("n out of range: {int}")))?;
                    seen_n = true;
                }
                other => return Err(parse_err(format!("unknown key '{other}'"))),
            }
        }
        if !seen_n {
            return Err(NetError::ConfigParse { line: 0, message: "missing key 'n'".into() });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut map: BTreeMap<&str, i64> = self.wcets().into_iter().collect();
        map.insert("fault_t", self.fault_t.into());
        map.insert("n", self.n as i64);
        for (k, v) in map {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

/// Timed automaton for component `id` of the sampling protocol.
///
/// Component 0 drives the `synch` broadcasts; event (and, with NMR, result)
/// multicasts go round in id order on the `send` channel, with the shared
/// `s_id` naming the current sender. Every wait is exact: each invariant
/// `x <= k` is paired with a guard `x == k`.
pub fn build_component(id: usize, cfg: &WcetConfig) -> Result<TimedAutomaton, NetError> {
    cfg.validate()?;
    if id >= cfg.n {
        return Err(NetError::ComponentOutOfRange { id, n: cfg.n });
    }
    let n = cfg.n as i64;
    let last = n - 1;
    let me = id as i64;
    let nmr = cfg.fault_t == 1;

    let mut names = vec![START, SAMPLING, SENDING, MONITORING];
    if nmr {
        names.extend([SEND_RESULT, VOTING]);
    }
    names.push(EXEC_TASK);
    let mut a = TimedAutomaton::new(format!("C{id}"), &names, &["x", "s_clock"]);
    let loc = |name: &str| names.iter().position(|l| *l == name).expect("known location");
    let (start, sampling, sending, monitoring, exec) =
        (loc(START), loc(SAMPLING), loc(SENDING), loc(MONITORING), loc(EXEC_TASK));

    let x_le = |k| ClockConstraint::new(CLOCK_X, CmpOp::Le, k);
    let x_eq = |k| ClockConstraint::new(CLOCK_X, CmpOp::Eq, k);
    let sid = |op, k| VarConstraint::new(VAR_SID, op, k);

    a.invariants[sampling].push(x_le(cfg.wcet_l));
    a.invariants[sending].push(x_le(cfg.wcet_e));
    a.invariants[monitoring].push(x_le(cfg.wcet_m + cfg.wcet_e));
    a.invariants[exec].push(x_le(cfg.wcet_t));

    // start -> sampling: synchronised by C0.
    let synch = if id == 0 { Action::Send(CH_SYNCH) } else { Action::Receive(CH_SYNCH) };
    a.edges.push(Edge::new(start, sampling, synch).reset(CLOCK_X).reset(CLOCK_S));

    // sampling -> sending: C0 multicasts its events after wcet_l.
    a.edges.push(if id == 0 {
        Edge::new(sampling, sending, Action::Send(CH_SEND))
            .clock(x_eq(cfg.wcet_l))
            .update(VAR_SID, IntExpr::Const(1))
            .reset(CLOCK_X)
    } else {
        Edge::new(sampling, sending, Action::Receive(CH_SEND)).reset(CLOCK_X)
    });

    // Round-robin multicast inside `from`; the sender with id n-1 closes the
    // round and moves everyone to `to`.
    let round = |a: &mut TimedAutomaton, from: usize, to: usize, wait: i64, first: i64| {
        if (first..last).contains(&me) {
            a.edges.push(
                Edge::new(from, from, Action::Send(CH_SEND))
                    .var(sid(CmpOp::Eq, me))
                    .clock(x_eq(wait))
                    .update(VAR_SID, IntExpr::incr(VAR_SID))
                    .reset(CLOCK_X),
            );
        }
        if me == last {
            a.edges.push(
                Edge::new(from, to, Action::Send(CH_SEND))
                    .var(sid(CmpOp::Eq, last))
                    .clock(x_eq(wait))
                    .update(VAR_SID, IntExpr::Const(0))
                    .reset(CLOCK_X),
            );
        }
        a.edges.push(Edge::new(from, from, Action::Receive(CH_SEND)).var(sid(CmpOp::Lt, last)).reset(CLOCK_X));
        a.edges.push(Edge::new(from, to, Action::Receive(CH_SEND)).var(sid(CmpOp::Eq, last)).reset(CLOCK_X));
    };

    round(&mut a, sending, monitoring, cfg.wcet_e, 1);

    let after_monitoring = if nmr { loc(SEND_RESULT) } else { exec };
    a.edges.push(
        Edge::new(monitoring, after_monitoring, Action::Internal)
            .clock(x_eq(cfg.wcet_m + cfg.wcet_e))
            .reset(CLOCK_X),
    );

    if nmr {
        let (result, voting) = (loc(SEND_RESULT), loc(VOTING));
        a.invariants[result].push(x_le(cfg.wcet_r));
        a.invariants[voting].push(x_le(cfg.wcet_v));
        round(&mut a, result, voting, cfg.wcet_r, 0);
        a.edges.push(Edge::new(voting, exec, Action::Internal).clock(x_eq(cfg.wcet_v)).reset(CLOCK_X));
    }

    // exec -> sampling: C0 closes the cycle and flips `cycle`.
    a.edges.push(if id == 0 {
        Edge::new(exec, sampling, Action::Send(CH_SYNCH))
            .clock(x_eq(cfg.wcet_t))
            .update(VAR_CYCLE, IntExpr::Mod(Box::new(IntExpr::incr(VAR_CYCLE)), 2))
            .reset(CLOCK_X)
            .reset(CLOCK_S)
    } else {
        Edge::new(exec, sampling, Action::Receive(CH_SYNCH)).reset(CLOCK_X).reset(CLOCK_S)
    });

    a.compute_ceilings();
    // s_clock is only observed; it must count up to a full period.
    a.clock_ceilings[CLOCK_S] = Some(cfg.period());
    Ok(a)
}

/// The full network of `cfg.n` components.
pub fn build_network(cfg: &WcetConfig) -> Result<Network, NetError> {
    cfg.validate()?;
    let automata = (0..cfg.n).map(|id| build_component(id, cfg)).collect::<Result<_, _>>()?;
    Ok(Network {
        automata,
        channels: vec!["synch".into(), "send".into()],
        vars: vec![
            VarDecl { name: "s_id".into(), min: 0, max: cfg.n as i64 - 1, init: 0 },
            VarDecl { name: "cycle".into(), min: 0, max: 1, init: 0 },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, fault_t: u8) -> WcetConfig {
        WcetConfig { n, fault_t, ..WcetConfig::default() }
    }

    #[test]
    fn location_counts() {
        assert_eq!(build_component(0, &cfg(2, 0)).unwrap().locations.len(), 5);
        assert_eq!(build_component(1, &cfg(3, 1)).unwrap().locations.len(), 7);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(build_component(2, &cfg(2, 0)), Err(NetError::ComponentOutOfRange { id: 2, n: 2 })));
        assert!(matches!(build_component(0, &cfg(4, 1)), Err(NetError::InvalidConfig(_))));
        assert!(matches!(build_component(0, &cfg(1, 0)), Err(NetError::InvalidConfig(_))));
        let zero = WcetConfig { wcet_e: 0, ..cfg(2, 0) };
        assert!(matches!(zero.validate(), Err(NetError::InvalidConfig(_))));
    }

    #[test]
    fn only_component_zero_initiates_synch() {
        let net = build_network(&cfg(3, 0)).unwrap();
        for (id, a) in net.automata.iter().enumerate() {
            let senders = a.edges.iter().filter(|e| e.action == Action::Send(CH_SYNCH)).count();
            assert_eq!(senders, if id == 0 { 2 } else { 0 });
        }
    }

    #[test]
    fn kv_config_round_trip() {
        let text = "# reference budget\nwcet_l=10\nwcet_e = 5\nwcet_m=32\nwcet_t=10\nn=4\n";
        let c = WcetConfig::from_kv(text).unwrap();
        assert_eq!(c, WcetConfig { wcet_l: 10, wcet_e: 5, wcet_m: 32, wcet_t: 10, n: 4, ..WcetConfig::default() });
        assert_eq!(WcetConfig::from_kv(&c.to_kv()).unwrap(), c);
        assert!(matches!(WcetConfig::from_kv("n=4\nbogus=1"), Err(NetError::ConfigParse { line: 2, .. })));
        assert!(matches!(WcetConfig::from_kv("wcet_l=3"), Err(NetError::ConfigParse { .. })));
        assert!(matches!(WcetConfig::from_kv("n=4\nfault_t=1"), Err(NetError::InvalidConfig(_))));
    }

    #[test]
    fn period_formula() {
        let c = WcetConfig { wcet_l: 10, wcet_e: 5, wcet_m: 32, wcet_t: 10, n: 4, ..WcetConfig::default() };
        assert_eq!(c.period(), 72);
        let c = WcetConfig { wcet_r: 2, wcet_v: 1, fault_t: 1, n: 5, ..c };
        assert_eq!(c.period(), 88);
        assert_eq!(cfg(2, 1).period(), 8);
    }
}
