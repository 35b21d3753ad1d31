//! Sample-based decentralized LTL monitoring.
//!
//! The crate bundles an LTL progression engine with three-valued verdicts,
//! progression-closure monitor automata, an executable timed-automata model
//! of the synchronous sampling protocol, an explicit-state verifier for its
//! timing properties, a decentralized monitoring simulator with NMR voting,
//! and WCET budget arithmetic.

pub mod decentral;
pub mod error;
pub mod fsm;
pub mod ltl;
pub mod progression;
pub mod timed_net;
pub mod verifier;
mod verdict;
pub mod wcet;

pub use error::{MonitorError, NetError, OracleError, ParseError, TraceError};
pub use timed_net::WcetConfig;
pub use verdict::Verdict3;
