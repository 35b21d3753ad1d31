use std::fmt;

use serde::{Deserialize, Serialize};

/// Three-valued monitoring outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict3 {
    Top,
    Bot,
    Unknown,
}

impl Verdict3 {
    pub fn is_definite(self) -> bool {
        self != Verdict3::Unknown
    }
}

impl fmt::Display for Verdict3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict3::Top => "TOP",
            Verdict3::Bot => "BOT",
            Verdict3::Unknown => "UNKNOWN",
        })
    }
}
