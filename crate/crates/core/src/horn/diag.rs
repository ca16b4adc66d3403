use std::fmt;

use serde::Serialize;

/// 1-based source location.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DiagCode {
    Syntax,
    UnclosedParen,
    UndeclaredPredicate,
    UndeclaredFunctor,
    ArityMismatch,
    TypeMismatch,
    UnknownType,
    DuplicateDeclaration,
    MissingAnnotation,
    DuplicateAnnotation,
    UnknownPredicate,
    UnknownParameter,
    PositionOutOfRange,
    ElementAsCollection,
    CollectionAsElement,
    ConflictingModes,
    NotApproximated,
    UnsupportedJudgment,
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: DiagCode,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn new(code: DiagCode, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            span,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: error[{}]: {}", self.span, self.code, self.message)
    }
}

/// Render diagnostics one per line, prefixed with a file name.
pub fn render(file: &str, diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("{file}:{d}\n"))
        .collect()
}
