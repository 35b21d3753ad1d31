use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::component::{build_network, SAMPLING, START};
use super::network::{Network, NetworkState, Step, Transition};
use super::WcetConfig;
use crate::error::NetError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineEvent {
    pub time: i64,
    pub component: usize,
    pub location: String,
    /// Action label that caused the entry (`synch!`, `send?`, `tau`, ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
}

/// Events produced by one transition out of `from`.
pub fn events_for(net: &Network, t: &Transition) -> Vec<TimelineEvent> {
    let label = |c: usize| -> Option<String> {
        match &t.step {
            Step::Delay(_) => None,
            Step::Internal { .. } => Some("tau".into()),
            Step::Broadcast { channel, sender, .. } => {
                let ch = &net.channels[*channel];
                Some(if c == *sender { format!("{ch}!") } else { format!("{ch}?") })
            }
        }
    };
    t.step
        .movers()
        .into_iter()
        .map(|c| TimelineEvent {
            time: t.target.time,
            component: c,
            location: net.location_name(c, t.target.locs[c]).to_string(),
            via: label(c),
        })
        .collect()
}

/// Initial events: every component sits in its initial location at time 0.
pub fn initial_events(net: &Network, s: &NetworkState) -> Vec<TimelineEvent> {
    (0..net.automata.len())
        .map(|c| TimelineEvent {
            time: s.time,
            component: c,
            location: net.location_name(c, s.locs[c]).to_string(),
            via: None,
        })
        .collect()
}

/// Deterministic run of the protocol for `rounds` complete cycles.
pub fn simulate(cfg: &WcetConfig, rounds: usize) -> Result<Vec<TimelineEvent>, NetError> {
    let net = build_network(cfg)?;
    simulate_network(&net, rounds).map(|(events, _)| events)
}

/// Run `net` until component 0 has re-entered the sampling location
/// `rounds` times, failing on any branching or deadlock. Returns the
/// timeline and the visited states.
pub fn simulate_network(net: &Network, rounds: usize) -> Result<(Vec<TimelineEvent>, Vec<NetworkState>), NetError> {
    if rounds == 0 {
        return Err(NetError::InvalidConfig("rounds must be at least 1".into()));
    }
    let mut state = net.initial_state();
    let mut events = initial_events(net, &state);
    let mut states = vec![state.clone()];
    let mut completed = 0;
    while completed < rounds {
        let mut succ = net.successors(&state)?;
        match succ.len() {
            0 => return Err(NetError::Deadlock { time: state.time }),
            1 => {}
            count => return Err(NetError::Nondeterminism { time: state.time, count }),
        }
        let t = succ.remove(0);
        let a0 = &net.automata[0];
        let before = a0.locations[state.locs[0]].as_str();
        let after = a0.locations[t.target.locs[0]].as_str();
        if after == SAMPLING && before != SAMPLING && before != START {
            completed += 1;
        }
        events.extend(events_for(net, &t));
        state = t.target;
        states.push(state.clone());
    }
    Ok((events, states))
}

pub fn timeline_csv(events: &[TimelineEvent]) -> String {
    let mut out = String::from("time,component,location\n");
    for e in events {
        let _ = writeln!(out, "{},{},{}", e.time, e.component, e.location);
    }
    out
}

/// Text sequence diagram: one lifeline column per component, one row per
/// instant at which some component changes location.
pub fn render_sequence(events: &[TimelineEvent], components: usize) -> String {
    const W: usize = 31;
    let mut out = String::new();
    let _ = write!(out, "{:>6} ", "time");
    for c in 0..components {
        let _ = write!(out, "| {:<W$}", format!("C{c}"));
    }
    let trimmed = out.trim_end().len();
    out.truncate(trimmed);
    out.push('\n');
    let _ = writeln!(out, "{}", "-".repeat(7 + components * (W + 2)));

    let mut i = 0;
    while i < events.len() {
        let time = events[i].time;
        let mut row: Vec<Option<&TimelineEvent>> = vec![None; components];
        let mut j = i;
        // One row per batch of simultaneous movers; a repeated component
        // starts a new row.
        while j < events.len() && events[j].time == time && row[events[j].component].is_none() {
            row[events[j].component] = Some(&events[j]);
            j += 1;
        }
        let _ = write!(out, "{time:>6} ");
        for cell in &row {
            let text = match cell {
                Some(e) => match &e.via {
                    Some(v) => format!("{v} {}", e.location),
                    None => e.location.clone(),
                },
                None => "|".to_string(),
            };
            let _ = write!(out, "| {text:<W$}");
        }
        let trimmed = out.trim_end().len();
        out.truncate(trimmed);
        out.push('\n');
        i = j;
    }
    out
}
