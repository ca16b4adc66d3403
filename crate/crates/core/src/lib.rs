//! Collection analysis of Horn clause programs through linear logic.

pub mod approx;
pub mod driver;
pub mod horn;
pub mod kernel;
pub mod mset;
pub mod oracle;
pub mod seq;
pub mod set;

use std::fmt;

use serde::Serialize;

/// Outcome of a bounded proof search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Proved,
    Refuted,
    /// The search bound was reached first.
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Proved => "Proved",
            Verdict::Refuted => "Refuted",
            Verdict::Unknown => "Unknown",
        })
    }
}
