//! The approximating substitution θ and per-clause verification conditions.

mod compare;
mod judgment;
mod theta;
mod vc;

use thiserror::Error;

use crate::horn::Diagnostic;
use crate::kernel::KernelError;

pub use compare::{same_statement, StatementForm};
pub use judgment::{recognize, Judgment};
pub use theta::{build_theta, derive_constructor_map, side_formula, ApproxMap, PredTemplate, ThetaOptions};
pub use vc::{apply_theta, classify_vc, generate_vcs, StatementClass, VerificationCondition};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ApproxError {
    #[error("constructor `{constructor}` of approximated type `{kind}` has no map (add `ctor {constructor}(...) = ...` or pass --derive-ctors)")]
    MissingConstructorMap { constructor: String, kind: String },
    #[error("constructor `{constructor}`: argument {position} has collection type `{ty}`, nested collections are not supported")]
    UnsupportedNesting {
        constructor: String,
        position: usize,
        ty: String,
    },
    #[error("predicate `{0}` has no annotation")]
    MissingAnnotation(String),
    #[error("clause {clause}: {source}")]
    Kernel {
        clause: usize,
        #[source]
        source: KernelError,
    },
    #[error("`{name}`: {source}")]
    Template {
        name: String,
        #[source]
        source: KernelError,
    },
    #[error("clause {clause} is ill-typed: {}", .diagnostics.first().map(|d| d.to_string()).unwrap_or_default())]
    Typing {
        clause: usize,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("clause {clause}: `{formula}` is not a collection judgment")]
    UnrecognizedJudgment { clause: usize, formula: String },
    #[error("clause {clause}: judgments of different modes in one statement")]
    MixedModes { clause: usize },
}
