//! Lists and difference lists encoded with `∘–`, kept canonically as item sequences.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::approx::{Judgment, VerificationCondition};
use crate::kernel::{Formula, MsExpr, MAtom, Term};
use crate::Verdict;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("`{0}` is not a list built from nil and cons")]
    NotAList(String),
}

/// `λl. ⟨x₁⟩ ∘– (l ∘– (… ∘– (l ∘– ⊥)))`, stored as `[x₁, …]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ListEncoding {
    pub items: Vec<Term>,
}

/// `λLλl. ⟨x₁⟩ ∘– (l ∘– (… ∘– (l ∘– L l)))`, stored as `[x₁, …]` with the hole implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DListEncoding {
    pub items: Vec<Term>,
}

fn list_items(t: &Term) -> Result<Vec<Term>, SeqError> {
    let mut items = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::App { functor, args } if functor == "nil" && args.is_empty() => return Ok(items),
            Term::App { functor, args } if functor == "cons" && args.len() == 2 => {
                items.push(args[0].clone());
                cur = &args[1];
            }
            _ => return Err(SeqError::NotAList(t.to_string())),
        }
    }
}

pub fn encode_list(t: &Term) -> Result<ListEncoding, SeqError> {
    list_items(t).map(|items| ListEncoding { items })
}

pub fn encode_dlist(t: &Term) -> Result<DListEncoding, SeqError> {
    list_items(t).map(|items| DListEncoding { items })
}

/// `x ∘– (l ∘– rest)`
fn cell(x: &Term, l: &str, rest: Formula) -> Formula {
    Formula::rlimp(Formula::item(x.clone()), Formula::rlimp(Formula::prop(l), rest))
}

/// Match `x ∘– (l ∘– rest)`, returning `x` and `rest`.
fn uncell<'a>(f: &'a Formula, l: &str) -> Option<(&'a Term, &'a Formula)> {
    let Formula::Limp(inner, head) = f else { return None };
    let (Formula::Limp(rest, tail), Formula::Item(x)) = (&**inner, &**head) else {
        return None;
    };
    match &**tail {
        Formula::Prop(p) if p == l => Some((x, rest)),
        _ => None,
    }
}

impl ListEncoding {
    pub fn to_formula(&self) -> Formula {
        let body = self.items.iter().rev().fold(Formula::Bot, |rest, x| cell(x, "l", rest));
        Formula::lam("l", body)
    }

    /// Read a β-normal `λl.` list formula back into its items.
    pub fn from_formula(f: &Formula) -> Option<ListEncoding> {
        let Formula::Lam(l, body) = f else { return None };
        let mut items = Vec::new();
        let mut cur = &**body;
        loop {
            if *cur == Formula::Bot {
                return Some(ListEncoding { items });
            }
            let (x, rest) = uncell(cur, l)?;
            items.push(x.clone());
            cur = rest;
        }
    }
}

impl DListEncoding {
    pub fn empty() -> Self {
        DListEncoding { items: Vec::new() }
    }

    pub fn to_formula(&self) -> Formula {
        let tail = Formula::app(Formula::prop("L"), vec![Formula::prop("l")]);
        let body = self.items.iter().rev().fold(tail, |rest, x| cell(x, "l", rest));
        Formula::lam("L", Formula::lam("l", body))
    }

    /// Read a β-normal `λLλl.` difference-list formula back into its items.
    pub fn from_formula(f: &Formula) -> Option<DListEncoding> {
        let Formula::Lam(big, inner) = f else { return None };
        let Formula::Lam(small, body) = &**inner else { return None };
        let items = read_word(body, big, small)?
            .into_iter()
            .map(|s| match s {
                Segment::Item(t) => Some(t),
                Segment::Var(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(DListEncoding { items })
    }
}

/// Both encodings describe the same list. Compared on the β-normal formulas, so
/// this is the identity of canonical forms.
pub fn lists_equal(a: &ListEncoding, b: &ListEncoding) -> bool {
    a.to_formula().alpha_eq(&b.to_formula())
}

/// Apply the encoding to `⊥`. Each cell becomes `⟨x⟩ ∘– (⊥ ∘– rest)`, which is
/// `⟨x⟩ ⅋ rest`, so the items end up in a multiset.
pub fn degrade_to_multiset(e: &ListEncoding) -> MsExpr {
    let applied = Formula::app(e.to_formula(), vec![Formula::Bot])
        .beta_normal()
        .expect("list encodings are normalizing");
    let mut out = MsExpr::new();
    let mut cur = &applied;
    while *cur != Formula::Bot {
        let (x, rest) = unbot_cell(cur).expect("applied list encodings are chains of cells");
        out.insert(MAtom::item(x.clone()));
        cur = rest;
    }
    out
}

fn unbot_cell(f: &Formula) -> Option<(&Term, &Formula)> {
    let Formula::Limp(inner, head) = f else { return None };
    match (&**inner, &**head) {
        (Formula::Limp(rest, tail), Formula::Item(x)) if **tail == Formula::Bot => Some((x, rest)),
        _ => None,
    }
}

/// Composition `λLλl. D₁ (λl. D₂ L l) l`, read back after β-reduction.
pub fn dlist_compose(a: &DListEncoding, b: &DListEncoding) -> DListEncoding {
    let inner = Formula::lam(
        "l",
        Formula::app(b.to_formula(), vec![Formula::prop("L"), Formula::prop("l")]),
    );
    let composed = Formula::lam(
        "L",
        Formula::lam("l", Formula::app(a.to_formula(), vec![inner, Formula::prop("l")])),
    );
    let normal = composed.beta_normal().expect("difference lists are normalizing");
    DListEncoding::from_formula(&normal).expect("composition of difference lists is a difference list")
}

/// A piece of a difference-list word: one item, or a whole unknown difference list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Segment {
    Item(Term),
    Var(String),
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Item(t) => write!(f, "⟨{t}⟩"),
            Segment::Var(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Segment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn show_word(w: &[Segment]) -> String {
    let parts: Vec<String> = w.iter().map(|s| s.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

const READ_LIMIT: usize = 10_000;

/// Read the body of a difference list, open in its hole `big small`, as a word.
/// A free variable `R` applied as `R K small` contributes `R`, and reading goes
/// on with the continuation `K small`.
pub fn read_word(body: &Formula, big: &str, small: &str) -> Option<Vec<Segment>> {
    let mut out = Vec::new();
    let mut cur = body.clone();
    for _ in 0..READ_LIMIT {
        if let Some((x, rest)) = uncell(&cur, small) {
            out.push(Segment::Item(x.clone()));
            cur = rest.clone();
            continue;
        }
        let Formula::App(head, args) = &cur else { return None };
        let Formula::Prop(h) = &**head else { return None };
        match args.as_slice() {
            [Formula::Prop(y)] if h == big && y == small => return Some(out),
            [k, Formula::Prop(y)] if y == small && h != big && h != small => {
                out.push(Segment::Var(h.clone()));
                cur = Formula::app(k.clone(), vec![Formula::prop(small)]).beta_normal().ok()?;
            }
            _ => return None,
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DlistResult {
    /// `Proved` or `Unknown`; there is no search to exhaust.
    pub status: Verdict,
    pub lhs: Option<Vec<Segment>>,
    pub rhs: Option<Vec<Segment>>,
    pub note: String,
}

fn rewrite(word: &[Segment], from: &[Segment], to: &[Segment]) -> Vec<Segment> {
    if from.is_empty() {
        return word.to_vec();
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < word.len() {
        if word[i..].starts_with(from) {
            out.extend_from_slice(to);
            i += from.len();
        } else {
            out.push(word[i].clone());
            i += 1;
        }
    }
    out
}

fn judgment_words(j: &Judgment) -> Option<(Vec<Segment>, Vec<Segment>)> {
    let Judgment::DlistEq { hole, lhs, rhs } = j else { return None };
    Some((read_word(lhs, &hole.0, &hole.1)?, read_word(rhs, &hole.0, &hole.1)?))
}

/// Read both sides of the goal as words, rewrite them with each hypothesis in
/// turn (left side to right side), and compare.
pub fn discharge_dlist_vc(vc: &VerificationCondition) -> DlistResult {
    let unknown = |note: String, lhs, rhs| DlistResult {
        status: Verdict::Unknown,
        lhs,
        rhs,
        note,
    };
    let Some((mut lhs, mut rhs)) = judgment_words(&vc.goal) else {
        return unknown(format!("goal `{}` does not read back as a word", vc.goal), None, None);
    };
    for (i, h) in vc.hypotheses.iter().enumerate() {
        let Some((from, to)) = judgment_words(h) else {
            return unknown(format!("hypothesis {} does not read back as a word", i + 1), Some(lhs), Some(rhs));
        };
        lhs = rewrite(&lhs, &from, &to);
        rhs = rewrite(&rhs, &from, &to);
    }
    if lhs == rhs {
        DlistResult {
            status: Verdict::Proved,
            note: format!("both sides read {}", show_word(&lhs)),
            lhs: Some(lhs),
            rhs: Some(rhs),
        }
    } else {
        let note = format!("{} and {} differ", show_word(&lhs), show_word(&rhs));
        unknown(note, Some(lhs), Some(rhs))
    }
}
