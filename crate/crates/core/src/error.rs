use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown atomic proposition '{name}' at offset {position}")]
    UnknownAtom { name: String, position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("proposition '{0}' is not in the declared alphabet")]
    UnknownProposition(String),
    #[error("line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("lasso loop must contain at least one sample")]
    EmptyLoop,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("loop bound must be at least 1")]
    EmptyLoopBound,
    #[error("enumeration needs {needed} lasso words, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error("formula has {size} symbols after simplification, limit is {limit}")]
    FormulaTooLarge { size: usize, limit: usize },
    #[error("monitor state cap exceeded: {discovered} states discovered, cap is {cap}")]
    StateCapExceeded { discovered: usize, cap: usize },
    #[error("alphabet of {0} propositions exceeds the limit of 24")]
    AlphabetTooLarge(usize),
    #[error("state cap must be at least 2")]
    InvalidStateCap,
    #[error(transparent)]
    Trace(#[from] TraceError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },
    #[error("component id {id} out of range for n={n}")]
    ComponentOutOfRange { id: usize, n: usize },
    #[error("variable '{var}' assigned out-of-range value {value}")]
    VarOutOfBounds { var: String, value: i64 },
    #[error("deadlock at time {time}")]
    Deadlock { time: i64 },
    #[error("nondeterminism at time {time}: {count} successors")]
    Nondeterminism { time: i64, count: usize },
    #[error("state budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
}
