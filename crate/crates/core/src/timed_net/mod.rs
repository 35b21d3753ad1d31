//! Networks of timed automata and the sampling-protocol model.

mod automaton;
mod component;
mod network;
mod simulate;

pub use automaton::{Action, ClockConstraint, CmpOp, Edge, IntExpr, TimedAutomaton, Update, VarConstraint};
pub use component::{
    build_component, build_network, WcetConfig, CH_SEND, CH_SYNCH, CLOCK_S, CLOCK_X, EXEC_TASK, MONITORING,
    SAMPLING, SENDING, SEND_RESULT, START, VAR_CYCLE, VAR_SID, VOTING,
};
pub use network::{Network, NetworkState, StateKey, Step, Transition, VarDecl};
pub use simulate::{events_for, initial_events, render_sequence, simulate, simulate_network, timeline_csv, TimelineEvent};
