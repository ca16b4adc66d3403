//! Standalone sequent files:
//!
//! ```text
//! mode multiset.
//! hyp: X <= Y.
//! goal: X + item(a) = Y + item(a).
//! ```

use crate::approx::Judgment;
use crate::horn::{DiagCode, Diagnostic, Mode, Relation, Span};
use crate::kernel::syntax::parse_formula;
use crate::kernel::{normalize_mset, normalize_set};

#[derive(Clone, Debug, PartialEq)]
pub struct SequentFile {
    pub mode: Mode,
    pub hypotheses: Vec<Judgment>,
    pub goal: Judgment,
}

pub fn parse_sequent_file(src: &str) -> Result<SequentFile, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut mode = None;
    let mut hyps = Vec::new();
    let mut goal = None;
    let mut raw: Vec<(bool, usize, usize, &str)> = Vec::new();
    for (n, line) in src.lines().enumerate() {
        let line_no = n + 1;
        let text = line.split('%').next().unwrap_or("");
        let trimmed = text.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = text.len() - text.trim_start().len() + 1;
        let err = |c: usize, msg: String| Diagnostic::new(DiagCode::Syntax, Span::new(line_no, c), msg);
        let Some(body) = trimmed.strip_suffix('.') else {
            diags.push(err(col + trimmed.len(), "expected `.` at the end of the line".into()));
            continue;
        };
        if let Some(m) = body.strip_prefix("mode ") {
            match Mode::parse(m.trim()) {
                Some(Mode::Dlist) | None => diags.push(err(col, format!("unknown mode `{}`; expected multiset or set", m.trim()))),
                Some(_) if mode.is_some() => diags.push(err(col, "mode given twice".into())),
                Some(m) => mode = Some(m),
            }
        } else if let Some(rest) = body.strip_prefix("hyp:") {
            raw.push((false, line_no, col + 4, rest));
        } else if let Some(rest) = body.strip_prefix("goal:") {
            raw.push((true, line_no, col + 5, rest));
        } else {
            diags.push(err(col, "expected `mode`, `hyp:` or `goal:`".into()));
        }
    }
    let Some(mode) = mode else {
        diags.push(Diagnostic::new(DiagCode::Syntax, Span::new(1, 1), "missing `mode multiset.` or `mode set.` line"));
        return Err(diags);
    };
    for (is_goal, line, col, text) in raw {
        match judgment(text, mode, line, col) {
            Ok(_) if is_goal && goal.is_some() => {
                diags.push(Diagnostic::new(DiagCode::Syntax, Span::new(line, col), "more than one goal"));
            }
            Ok(j) if is_goal => goal = Some(j),
            Ok(j) => hyps.push(j),
            Err(d) => diags.push(d),
        }
    }
    match goal {
        Some(goal) if diags.is_empty() => Ok(SequentFile {
            mode,
            hypotheses: hyps,
            goal,
        }),
        None => {
            diags.push(Diagnostic::new(DiagCode::Syntax, Span::new(1, 1), "missing `goal:` line"));
            Err(diags)
        }
        Some(_) => Err(diags),
    }
}

/// Byte offset of the relation symbol outside parentheses.
fn relation_at(text: &str) -> Option<(usize, Relation)> {
    let mut depth = 0i32;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '<' if depth == 0 && text[i..].starts_with("<=") => return Some((i, Relation::Incl)),
            '=' if depth == 0 => return Some((i, Relation::Eq)),
            _ => {}
        }
    }
    None
}

fn judgment(text: &str, mode: Mode, line: usize, col: usize) -> Result<Judgment, Diagnostic> {
    let err = |c: usize, msg: String| Diagnostic::new(DiagCode::Syntax, Span::new(line, col + c), msg);
    let (at, rel) = relation_at(text).ok_or_else(|| err(0, "expected `=` or `<=` between two sides".into()))?;
    let width = if rel == Relation::Incl { 2 } else { 1 };
    let lhs = side(&text[..at], mode).map_err(|(o, m)| err(o, m))?;
    let rhs = side(&text[at + width..], mode).map_err(|(o, m)| err(at + width + o, m))?;
    Ok(match (mode, rel) {
        (Mode::Set, Relation::Eq) => Judgment::SetEq(normalize_set(&lhs).expect("set side"), normalize_set(&rhs).expect("set side")),
        (Mode::Set, Relation::Incl) => Judgment::SetIncl(normalize_set(&lhs).expect("set side"), normalize_set(&rhs).expect("set side")),
        (_, Relation::Eq) => Judgment::MsEq(normalize_mset(&lhs).expect("mset side"), normalize_mset(&rhs).expect("mset side")),
        (_, Relation::Incl) => Judgment::MsIncl(normalize_mset(&lhs).expect("mset side"), normalize_mset(&rhs).expect("mset side")),
    })
}

/// One side as a formula, using `#`/`bot` for multisets and `(+)`/`0` for sets.
fn side(text: &str, mode: Mode) -> Result<crate::kernel::Formula, (usize, String)> {
    let (join, unit) = if mode == Mode::Set { ("(+)", "0") } else { ("#", "bot") };
    if text.trim().is_empty() {
        return Err((0, "empty side".into()));
    }
    let mut depth = 0i32;
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' if depth == 0 => {
                parts.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((start, &text[start..]));
    let mut pieces = Vec::new();
    for (offset, p) in parts {
        let t = p.trim();
        let lead = p.len() - p.trim_start().len();
        let keyword = matches!(t, "bot" | "forall" | "exists");
        let ok = t == "{}"
            || (t.starts_with("item(") && t.ends_with(')'))
            || (!t.is_empty() && t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && t.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) && !keyword);
        if !ok {
            return Err((offset + lead, format!("expected `{{}}`, `item(..)` or a variable, found `{t}`")));
        }
        pieces.push(if t == "{}" { unit.to_string() } else { t.to_string() });
    }
    let src = pieces.join(&format!(" {join} "));
    let f = parse_formula(&src).map_err(|e| (0, format!("bad side `{}`: {}", text.trim(), e.message)))?;
    let fits = if mode == Mode::Set { normalize_set(&f).is_ok() } else { normalize_mset(&f).is_ok() };
    if !fits {
        return Err((0, format!("`{}` is not a collection expression", text.trim())));
    }
    Ok(f)
}
