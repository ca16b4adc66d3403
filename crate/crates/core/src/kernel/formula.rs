use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::term::Term;
use super::KernelError;

/// Sort of a quantified variable: first-order (terms) or propositional (type `o`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    First,
    Prop,
}

/// Linear-logic formula over the `item` predicate.
///
/// `Lam` and `App` only occur in difference-list encodings, where collection
/// variables range over functions of type `(o -> o) -> o -> o`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Item(Term),
    Prop(String),
    Bot,
    Zero,
    One,
    Par(Box<Formula>, Box<Formula>),
    Oplus(Box<Formula>, Box<Formula>),
    With(Box<Formula>, Box<Formula>),
    Quest(Box<Formula>),
    Limp(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Sort, Box<Formula>),
    Exists(String, Sort, Box<Formula>),
    Lam(String, Box<Formula>),
    App(Box<Formula>, Vec<Formula>),
}

/// Value substituted for a template parameter or bound variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Term(Term),
    Formula(Formula),
}

impl Arg {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Arg::Term(_) => "term",
            Arg::Formula(_) => "formula",
        }
    }

    fn free_names(&self) -> BTreeSet<String> {
        match self {
            Arg::Term(t) => t.vars(),
            Arg::Formula(f) => f.free_names(),
        }
    }
}

const BETA_FUEL: usize = 100_000;

impl Formula {
    pub fn item(t: Term) -> Self {
        Formula::Item(t)
    }

    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    pub fn par(a: Formula, b: Formula) -> Self {
        Formula::Par(Box::new(a), Box::new(b))
    }

    pub fn oplus(a: Formula, b: Formula) -> Self {
        Formula::Oplus(Box::new(a), Box::new(b))
    }

    pub fn with(a: Formula, b: Formula) -> Self {
        Formula::With(Box::new(a), Box::new(b))
    }

    pub fn quest(a: Formula) -> Self {
        Formula::Quest(Box::new(a))
    }

    pub fn limp(a: Formula, b: Formula) -> Self {
        Formula::Limp(Box::new(a), Box::new(b))
    }

    /// `a ∘– b`, i.e. `b ⊸ a`.
    pub fn rlimp(a: Formula, b: Formula) -> Self {
        Formula::Limp(Box::new(b), Box::new(a))
    }

    pub fn equiv(a: Formula, b: Formula) -> Self {
        Formula::Equiv(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(x: impl Into<String>, sort: Sort, body: Formula) -> Self {
        Formula::Forall(x.into(), sort, Box::new(body))
    }

    pub fn exists(x: impl Into<String>, sort: Sort, body: Formula) -> Self {
        Formula::Exists(x.into(), sort, Box::new(body))
    }

    pub fn lam(x: impl Into<String>, body: Formula) -> Self {
        Formula::Lam(x.into(), Box::new(body))
    }

    pub fn app(head: Formula, args: Vec<Formula>) -> Self {
        if args.is_empty() {
            return head;
        }
        match head {
            Formula::App(h, mut a) => {
                a.extend(args);
                Formula::App(h, a)
            }
            h => Formula::App(Box::new(h), args),
        }
    }

    /// Right-nested `⅋` of the given formulas, `⊥` when empty.
    pub fn par_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        let v: Vec<_> = items.into_iter().collect();
        v.into_iter()
            .rev()
            .reduce(|acc, f| Formula::par(f, acc))
            .unwrap_or(Formula::Bot)
    }

    pub fn oplus_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        let v: Vec<_> = items.into_iter().collect();
        v.into_iter()
            .rev()
            .reduce(|acc, f| Formula::oplus(f, acc))
            .unwrap_or(Formula::Zero)
    }

    pub fn with_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        let v: Vec<_> = items.into_iter().collect();
        v.into_iter()
            .reduce(Formula::with)
            .unwrap_or(Formula::One)
    }

    pub fn connective_name(&self) -> &'static str {
        match self {
            Formula::Item(_) => "item",
            Formula::Prop(_) => "propositional variable",
            Formula::Bot => "⊥",
            Formula::Zero => "0",
            Formula::One => "1",
            Formula::Par(..) => "⅋",
            Formula::Oplus(..) => "⊕",
            Formula::With(..) => "&",
            Formula::Quest(_) => "?",
            Formula::Limp(..) => "⊸",
            Formula::Equiv(..) => "○–○",
            Formula::Implies(..) => "⇒",
            Formula::Forall(..) => "∀",
            Formula::Exists(..) => "∃",
            Formula::Lam(..) => "λ",
            Formula::App(..) => "application",
        }
    }

    /// Free names of both sorts: term variables inside items and propositional variables.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Item(t) => {
                for v in t.vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::Prop(p) => {
                if !bound.contains(p) {
                    out.insert(p.clone());
                }
            }
            Formula::Bot | Formula::Zero | Formula::One => {}
            Formula::Par(a, b)
            | Formula::Oplus(a, b)
            | Formula::With(a, b)
            | Formula::Limp(a, b)
            | Formula::Equiv(a, b)
            | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quest(a) => a.collect_free(bound, out),
            Formula::Forall(x, _, b) | Formula::Exists(x, _, b) | Formula::Lam(x, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Formula::App(h, args) => {
                h.collect_free(bound, out);
                for a in args {
                    a.collect_free(bound, out);
                }
            }
        }
    }

    /// All names occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Item(t) => t.collect_vars(&mut out),
            Formula::Prop(p) => {
                out.insert(p.clone());
            }
            Formula::Forall(x, ..) | Formula::Exists(x, ..) | Formula::Lam(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Par(a, b)
            | Formula::Oplus(a, b)
            | Formula::With(a, b)
            | Formula::Limp(a, b)
            | Formula::Equiv(a, b)
            | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Quest(a) | Formula::Forall(_, _, a) | Formula::Exists(_, _, a) | Formula::Lam(_, a) => {
                a.visit(f)
            }
            Formula::App(h, args) => {
                h.visit(f);
                for a in args {
                    a.visit(f);
                }
            }
            Formula::Item(_) | Formula::Prop(_) | Formula::Bot | Formula::Zero | Formula::One => {}
        }
    }

    /// Item terms in pre-order.
    pub fn item_terms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Item(t) = f {
                out.push(t.clone());
            }
        });
        out
    }

    /// Capture-avoiding simultaneous substitution. Term arguments replace term
    /// variables inside items; formula arguments replace propositional variables.
    pub fn subst(&self, map: &BTreeMap<String, Arg>) -> Result<Formula, KernelError> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        let mut avoid = BTreeSet::new();
        for v in map.values() {
            avoid.extend(v.free_names());
        }
        self.subst_inner(map, &avoid)
    }

    fn subst_inner(
        &self,
        map: &BTreeMap<String, Arg>,
        avoid: &BTreeSet<String>,
    ) -> Result<Formula, KernelError> {
        Ok(match self {
            Formula::Item(t) => {
                let mut err = None;
                let out = t.subst(&|v| match map.get(v) {
                    Some(Arg::Term(t)) => Some(t.clone()),
                    Some(Arg::Formula(_)) => None,
                    None => None,
                });
                for v in t.vars() {
                    if let Some(Arg::Formula(_)) = map.get(&v) {
                        err = Some(KernelError::KindMismatch {
                            template: String::new(),
                            param: v,
                            expected: "term",
                            got: "formula",
                        });
                    }
                }
                if let Some(e) = err {
                    return Err(e);
                }
                Formula::Item(out)
            }
            Formula::Prop(p) => match map.get(p) {
                Some(Arg::Formula(f)) => f.clone(),
                Some(Arg::Term(_)) => {
                    return Err(KernelError::KindMismatch {
                        template: String::new(),
                        param: p.clone(),
                        expected: "formula",
                        got: "term",
                    })
                }
                None => self.clone(),
            },
            Formula::Bot | Formula::Zero | Formula::One => self.clone(),
            Formula::Par(a, b) => Formula::par(a.subst_inner(map, avoid)?, b.subst_inner(map, avoid)?),
            Formula::Oplus(a, b) => Formula::oplus(a.subst_inner(map, avoid)?, b.subst_inner(map, avoid)?),
            Formula::With(a, b) => Formula::with(a.subst_inner(map, avoid)?, b.subst_inner(map, avoid)?),
            Formula::Limp(a, b) => Formula::limp(a.subst_inner(map, avoid)?, b.subst_inner(map, avoid)?),
            Formula::Equiv(a, b) => Formula::equiv(a.subst_inner(map, avoid)?, b.subst_inner(map, avoid)?),
            Formula::Implies(a, b) => {
                Formula::implies(a.subst_inner(map, avoid)?, b.subst_inner(map, avoid)?)
            }
            Formula::Quest(a) => Formula::quest(a.subst_inner(map, avoid)?),
            Formula::Forall(x, s, body) => {
                let (x, body) = Self::subst_binder(x, body, map, avoid)?;
                Formula::Forall(x, *s, Box::new(body))
            }
            Formula::Exists(x, s, body) => {
                let (x, body) = Self::subst_binder(x, body, map, avoid)?;
                Formula::Exists(x, *s, Box::new(body))
            }
            Formula::Lam(x, body) => {
                let (x, body) = Self::subst_binder(x, body, map, avoid)?;
                Formula::Lam(x, Box::new(body))
            }
            Formula::App(h, args) => Formula::App(
                Box::new(h.subst_inner(map, avoid)?),
                args.iter()
                    .map(|a| a.subst_inner(map, avoid))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }

    fn subst_binder(
        x: &str,
        body: &Formula,
        map: &BTreeMap<String, Arg>,
        avoid: &BTreeSet<String>,
    ) -> Result<(String, Formula), KernelError> {
        let mut inner = map.clone();
        inner.remove(x);
        if inner.is_empty() {
            return Ok((x.to_string(), body.clone()));
        }
        if avoid.contains(x) {
            let mut taken = body.all_names();
            taken.extend(avoid.iter().cloned());
            let fresh = fresh_name(x, &taken);
            let renamed = body.rename_free(x, &fresh);
            return Ok((fresh, renamed.subst_inner(&inner, avoid)?));
        }
        Ok((x.to_string(), body.subst_inner(&inner, avoid)?))
    }

    /// Rename free occurrences of `from` (either sort) to `to`. `to` must be fresh.
    pub fn rename_free(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Item(t) => Formula::Item(t.rename(from, to)),
            Formula::Prop(p) if p == from => Formula::Prop(to.to_string()),
            Formula::Prop(_) | Formula::Bot | Formula::Zero | Formula::One => self.clone(),
            Formula::Par(a, b) => Formula::par(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Oplus(a, b) => Formula::oplus(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::With(a, b) => Formula::with(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Limp(a, b) => Formula::limp(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Equiv(a, b) => Formula::equiv(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Implies(a, b) => Formula::implies(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Quest(a) => Formula::quest(a.rename_free(from, to)),
            Formula::Forall(x, ..) | Formula::Exists(x, ..) | Formula::Lam(x, _) if x == from => self.clone(),
            Formula::Forall(x, s, b) => Formula::Forall(x.clone(), *s, Box::new(b.rename_free(from, to))),
            Formula::Exists(x, s, b) => Formula::Exists(x.clone(), *s, Box::new(b.rename_free(from, to))),
            Formula::Lam(x, b) => Formula::Lam(x.clone(), Box::new(b.rename_free(from, to))),
            Formula::App(h, args) => Formula::App(
                Box::new(h.rename_free(from, to)),
                args.iter().map(|a| a.rename_free(from, to)).collect(),
            ),
        }
    }

    /// Full β-normal form.
    pub fn beta_normal(&self) -> Result<Formula, KernelError> {
        let mut fuel = BETA_FUEL;
        self.beta(&mut fuel)
    }

    fn beta(&self, fuel: &mut usize) -> Result<Formula, KernelError> {
        Ok(match self {
            Formula::App(h, args) => {
                let mut head = h.beta(fuel)?;
                let mut rest: Vec<Formula> =
                    args.iter().map(|a| a.beta(fuel)).collect::<Result<_, _>>()?;
                loop {
                    match head {
                        Formula::Lam(x, body) if !rest.is_empty() => {
                            if *fuel == 0 {
                                return Err(KernelError::NormalizationLimit(BETA_FUEL));
                            }
                            *fuel -= 1;
                            let arg = rest.remove(0);
                            let mut m = BTreeMap::new();
                            m.insert(x, Arg::Formula(arg));
                            head = body.subst(&m)?.beta(fuel)?;
                        }
                        Formula::App(h2, mut a2) => {
                            a2.extend(rest);
                            head = *h2;
                            rest = a2;
                        }
                        other => {
                            return Ok(if rest.is_empty() {
                                other
                            } else {
                                Formula::App(Box::new(other), rest)
                            })
                        }
                    }
                }
            }
            Formula::Item(_) | Formula::Prop(_) | Formula::Bot | Formula::Zero | Formula::One => self.clone(),
            Formula::Par(a, b) => Formula::par(a.beta(fuel)?, b.beta(fuel)?),
            Formula::Oplus(a, b) => Formula::oplus(a.beta(fuel)?, b.beta(fuel)?),
            Formula::With(a, b) => Formula::with(a.beta(fuel)?, b.beta(fuel)?),
            Formula::Limp(a, b) => Formula::limp(a.beta(fuel)?, b.beta(fuel)?),
            Formula::Equiv(a, b) => Formula::equiv(a.beta(fuel)?, b.beta(fuel)?),
            Formula::Implies(a, b) => Formula::implies(a.beta(fuel)?, b.beta(fuel)?),
            Formula::Quest(a) => Formula::quest(a.beta(fuel)?),
            Formula::Forall(x, s, b) => Formula::Forall(x.clone(), *s, Box::new(b.beta(fuel)?)),
            Formula::Exists(x, s, b) => Formula::Exists(x.clone(), *s, Box::new(b.beta(fuel)?)),
            Formula::Lam(x, b) => Formula::Lam(x.clone(), Box::new(b.beta(fuel)?)),
        })
    }

    /// Replace every `A ○–○ B` by `(A ⊸ B) & (B ⊸ A)`.
    pub fn expand_equiv(&self) -> Formula {
        match self {
            Formula::Equiv(a, b) => {
                let (a, b) = (a.expand_equiv(), b.expand_equiv());
                Formula::with(Formula::limp(a.clone(), b.clone()), Formula::limp(b, a))
            }
            Formula::Item(_) | Formula::Prop(_) | Formula::Bot | Formula::Zero | Formula::One => self.clone(),
            Formula::Par(a, b) => Formula::par(a.expand_equiv(), b.expand_equiv()),
            Formula::Oplus(a, b) => Formula::oplus(a.expand_equiv(), b.expand_equiv()),
            Formula::With(a, b) => Formula::with(a.expand_equiv(), b.expand_equiv()),
            Formula::Limp(a, b) => Formula::limp(a.expand_equiv(), b.expand_equiv()),
            Formula::Implies(a, b) => Formula::implies(a.expand_equiv(), b.expand_equiv()),
            Formula::Quest(a) => Formula::quest(a.expand_equiv()),
            Formula::Forall(x, s, b) => Formula::Forall(x.clone(), *s, Box::new(b.expand_equiv())),
            Formula::Exists(x, s, b) => Formula::Exists(x.clone(), *s, Box::new(b.expand_equiv())),
            Formula::Lam(x, b) => Formula::Lam(x.clone(), Box::new(b.expand_equiv())),
            Formula::App(h, args) => Formula::App(
                Box::new(h.expand_equiv()),
                args.iter().map(Formula::expand_equiv).collect(),
            ),
        }
    }

    /// Rename every binder to a canonical sequence `#0`, `#1`, ... in pre-order.
    pub fn canonical(&self) -> Formula {
        let mut counter = 0usize;
        self.canon(&mut counter)
    }

    fn canon(&self, counter: &mut usize) -> Formula {
        match self {
            Formula::Forall(x, s, b) | Formula::Exists(x, s, b) => {
                let fresh = format!("#{counter}");
                *counter += 1;
                let body = b.rename_free(x, &fresh).canon(counter);
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(fresh, *s, Box::new(body))
                } else {
                    Formula::Exists(fresh, *s, Box::new(body))
                }
            }
            Formula::Lam(x, b) => {
                let fresh = format!("#{counter}");
                *counter += 1;
                Formula::Lam(fresh.clone(), Box::new(b.rename_free(x, &fresh).canon(counter)))
            }
            Formula::Item(_) | Formula::Prop(_) | Formula::Bot | Formula::Zero | Formula::One => self.clone(),
            Formula::Par(a, b) => Formula::par(a.canon(counter), b.canon(counter)),
            Formula::Oplus(a, b) => Formula::oplus(a.canon(counter), b.canon(counter)),
            Formula::With(a, b) => Formula::with(a.canon(counter), b.canon(counter)),
            Formula::Limp(a, b) => Formula::limp(a.canon(counter), b.canon(counter)),
            Formula::Equiv(a, b) => Formula::equiv(a.canon(counter), b.canon(counter)),
            Formula::Implies(a, b) => Formula::implies(a.canon(counter), b.canon(counter)),
            Formula::Quest(a) => Formula::quest(a.canon(counter)),
            Formula::App(h, args) => Formula::App(
                Box::new(h.canon(counter)),
                args.iter().map(|a| a.canon(counter)).collect(),
            ),
        }
    }

    /// Syntactic equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    /// Render with ASCII connectives; the output is accepted by [`super::syntax::parse_formula`].
    pub fn ascii(&self) -> String {
        let mut s = String::new();
        write_formula(&mut s, self, 0, Style::Ascii);
        s
    }
}

pub(crate) fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c == '\'' || c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !taken.contains(n))
        .expect("unbounded supply of names")
}

#[derive(Clone, Copy, PartialEq)]
enum Style {
    Ascii,
    Unicode,
}

const P_BINDER: u8 = 0;
const P_EQUIV: u8 = 1;
const P_IMPLIES: u8 = 2;
const P_LIMP: u8 = 3;
const P_WITH: u8 = 4;
const P_OPLUS: u8 = 5;
const P_PAR: u8 = 6;
const P_QUEST: u8 = 7;
const P_APP: u8 = 8;
const P_ATOM: u8 = 9;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Forall(..) | Formula::Exists(..) | Formula::Lam(..) => P_BINDER,
        Formula::Equiv(..) => P_EQUIV,
        Formula::Implies(..) => P_IMPLIES,
        Formula::Limp(..) => P_LIMP,
        Formula::With(..) => P_WITH,
        Formula::Oplus(..) => P_OPLUS,
        Formula::Par(..) => P_PAR,
        Formula::Quest(_) => P_QUEST,
        Formula::App(..) => P_APP,
        _ => P_ATOM,
    }
}

fn write_formula(out: &mut String, f: &Formula, min: u8, style: Style) {
    let p = prec(f);
    let paren = p < min;
    if paren {
        out.push('(');
    }
    let ascii = style == Style::Ascii;
    match f {
        Formula::Item(t) => {
            if ascii {
                out.push_str(&format!("item({t})"));
            } else {
                out.push_str(&format!("⟨{t}⟩"));
            }
        }
        Formula::Prop(p) => out.push_str(p),
        Formula::Bot => out.push_str(if ascii { "bot" } else { "⊥" }),
        Formula::Zero => out.push('0'),
        Formula::One => out.push('1'),
        Formula::Par(..) | Formula::Oplus(..) | Formula::With(..) => {
            // associative: print the flattened chain
            let (op, level) = match f {
                Formula::Par(..) => (if ascii { " # " } else { " ⅋ " }, P_PAR),
                Formula::Oplus(..) => (if ascii { " (+) " } else { " ⊕ " }, P_OPLUS),
                _ => (" & ", P_WITH),
            };
            let mut parts = Vec::new();
            flatten_same(f, &mut parts);
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(op);
                }
                write_formula(out, part, level + 1, style);
            }
        }
        Formula::Quest(a) => {
            out.push('?');
            write_formula(out, a, P_QUEST, style);
        }
        Formula::Limp(a, b) => {
            write_formula(out, a, P_LIMP + 1, style);
            out.push_str(if ascii { " -o " } else { " ⊸ " });
            write_formula(out, b, P_LIMP, style);
        }
        Formula::Implies(a, b) => {
            write_formula(out, a, P_IMPLIES + 1, style);
            out.push_str(if ascii { " => " } else { " ⇒ " });
            write_formula(out, b, P_IMPLIES, style);
        }
        Formula::Equiv(a, b) => {
            write_formula(out, a, P_EQUIV + 1, style);
            out.push_str(if ascii { " o-o " } else { " ○–○ " });
            write_formula(out, b, P_EQUIV + 1, style);
        }
        Formula::Forall(x, _, b) | Formula::Exists(x, _, b) | Formula::Lam(x, b) => {
            let kw = match (f, ascii) {
                (Formula::Forall(..), true) => "forall ",
                (Formula::Forall(..), false) => "∀",
                (Formula::Exists(..), true) => "exists ",
                (Formula::Exists(..), false) => "∃",
                (_, true) => "\\",
                (_, false) => "λ",
            };
            out.push_str(kw);
            out.push_str(x);
            out.push_str(". ");
            write_formula(out, b, P_BINDER, style);
        }
        Formula::App(h, args) => {
            write_formula(out, h, P_APP, style);
            for a in args {
                out.push(' ');
                write_formula(out, a, P_ATOM, style);
            }
        }
    }
    if paren {
        out.push(')');
    }
}

fn flatten_same<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    let same = |g: &Formula| std::mem::discriminant(g) == std::mem::discriminant(f);
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        match g {
            Formula::Par(a, b) | Formula::Oplus(a, b) | Formula::With(a, b) if same(g) => {
                stack.push(b);
                stack.push(a);
            }
            other => out.push(other),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self, 0, Style::Unicode);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(n: i64) -> Formula {
        Formula::item(Term::int(n))
    }

    #[test]
    fn expand_equiv_produces_both_directions() {
        let (a, b) = (Formula::prop("A"), Formula::prop("B"));
        let e = Formula::equiv(a.clone(), b.clone()).expand_equiv();
        assert_eq!(
            e,
            Formula::with(Formula::limp(a.clone(), b.clone()), Formula::limp(b, a))
        );
        assert_eq!(Formula::Bot.expand_equiv(), Formula::Bot);
    }

    #[test]
    fn expand_equiv_under_binder() {
        let x = Formula::prop("x");
        let f = Formula::forall("x", Sort::Prop, Formula::equiv(x.clone(), x.clone()));
        let want = Formula::forall(
            "x",
            Sort::Prop,
            Formula::with(Formula::limp(x.clone(), x.clone()), Formula::limp(x.clone(), x)),
        );
        assert_eq!(f.expand_equiv(), want);
        assert_eq!(f.expand_equiv().expand_equiv(), f.expand_equiv());
    }

    #[test]
    fn substitution_avoids_capture() {
        // (∀y. x ⅋ y)[y/x] must rename the binder
        let f = Formula::forall("y", Sort::Prop, Formula::par(Formula::prop("x"), Formula::prop("y")));
        let mut m = BTreeMap::new();
        m.insert("x".to_string(), Arg::Formula(Formula::prop("y")));
        let g = f.subst(&m).unwrap();
        match &g {
            Formula::Forall(b, _, body) => {
                assert_ne!(b, "y");
                assert_eq!(**body, Formula::par(Formula::prop("y"), Formula::prop(b.clone())));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn beta_reduces_nested_redexes() {
        // (λL. λl. L l) (λk. k ⅋ item 1) bot  →  bot ⅋ item 1
        let nil = Formula::lam("L", Formula::lam("l", Formula::app(Formula::prop("L"), vec![Formula::prop("l")])));
        let k = Formula::lam("k", Formula::par(Formula::prop("k"), item(1)));
        let f = Formula::app(nil, vec![k, Formula::Bot]);
        assert_eq!(f.beta_normal().unwrap(), Formula::par(Formula::Bot, item(1)));
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let f = Formula::forall("K", Sort::Prop, Formula::equiv(Formula::par(Formula::Bot, Formula::prop("K")), Formula::prop("K")));
        let g = Formula::forall("Z", Sort::Prop, Formula::equiv(Formula::par(Formula::Bot, Formula::prop("Z")), Formula::prop("Z")));
        assert!(f.alpha_eq(&g));
        let h = Formula::forall("Z", Sort::Prop, Formula::equiv(Formula::par(Formula::Bot, Formula::prop("K")), Formula::prop("Z")));
        assert!(!f.alpha_eq(&h));
    }

    #[test]
    fn unicode_rendering_flattens_chains() {
        let f = Formula::par(item(1), Formula::par(item(3), Formula::par(item(2), Formula::Bot)));
        assert_eq!(f.to_string(), "⟨1⟩ ⅋ ⟨3⟩ ⅋ ⟨2⟩ ⅋ ⊥");
        assert_eq!(f.ascii(), "item(1) # item(3) # item(2) # bot");
    }
}
