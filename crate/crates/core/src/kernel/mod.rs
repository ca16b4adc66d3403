//! Terms, linear-logic formulas, templates and collection normal forms.

mod formula;
mod normal;
pub mod syntax;
mod template;
mod term;

pub use formula::{Arg, Formula, Sort};
pub use normal::{normalize_mset, normalize_set, MAtom, MsExpr, SetExpr};
pub use template::{beta_apply, ParamKind, Template};
pub use term::Term;

pub(crate) use formula::fresh_name;

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("template `{template}` expects {expected} argument(s), got {got}")]
    Arity {
        template: String,
        expected: usize,
        got: usize,
    },
    #[error("template `{template}`: parameter `{param}` expects a {expected}, got a {got}")]
    KindMismatch {
        template: String,
        param: String,
        expected: &'static str,
        got: &'static str,
    },
    #[error("not a multiset expression: found `{connective}`")]
    NotAMultisetExpression { connective: &'static str },
    #[error("not a set expression: found `{connective}`")]
    NotASetExpression { connective: &'static str },
    #[error("β-normalization did not finish within {0} reductions")]
    NormalizationLimit(usize),
}

impl KernelError {
    pub(crate) fn in_template(self, name: &str) -> Self {
        match self {
            KernelError::KindMismatch {
                template,
                param,
                expected,
                got,
            } if template.is_empty() => KernelError::KindMismatch {
                template: name.to_string(),
                param,
                expected,
                got,
            },
            other => other,
        }
    }
}
