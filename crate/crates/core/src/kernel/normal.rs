//! Flattened normal forms of multiset (`⅋`/`⊥`) and set (`⊕`/`0`) expressions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use super::formula::Formula;
use super::term::Term;
use super::KernelError;

/// Leaf of a collection expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MAtom {
    Item(Term),
    Prop(String),
}

impl MAtom {
    pub fn item(t: Term) -> Self {
        MAtom::Item(t)
    }

    pub fn prop(name: impl Into<String>) -> Self {
        MAtom::Prop(name.into())
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            MAtom::Item(t) => Formula::Item(t.clone()),
            MAtom::Prop(p) => Formula::Prop(p.clone()),
        }
    }

    pub fn subst_terms(&self, f: &dyn Fn(&str) -> Option<Term>) -> MAtom {
        match self {
            MAtom::Item(t) => MAtom::Item(t.subst(f)),
            MAtom::Prop(_) => self.clone(),
        }
    }
}

impl fmt::Display for MAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MAtom::Item(t) => write!(f, "item({t})"),
            MAtom::Prop(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for MAtom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Multiset of atoms; the empty multiset encodes `⊥`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MsExpr {
    counts: BTreeMap<MAtom, usize>,
}

impl MsExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, atom: MAtom) {
        self.insert_n(atom, 1);
    }

    pub fn insert_n(&mut self, atom: MAtom, n: usize) {
        if n > 0 {
            *self.counts.entry(atom).or_insert(0) += n;
        }
    }

    pub fn count(&self, atom: &MAtom) -> usize {
        self.counts.get(atom).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct atoms with their multiplicities, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&MAtom, usize)> {
        self.counts.iter().map(|(a, n)| (a, *n))
    }

    /// Atoms with repetition, in canonical order.
    pub fn atoms(&self) -> impl Iterator<Item = &MAtom> {
        self.counts
            .iter()
            .flat_map(|(a, n)| std::iter::repeat(a).take(*n))
    }

    pub fn support(&self) -> BTreeSet<MAtom> {
        self.counts.keys().cloned().collect()
    }

    pub fn union(&self, other: &MsExpr) -> MsExpr {
        let mut out = self.clone();
        for (a, n) in other.iter() {
            out.insert_n(a.clone(), n);
        }
        out
    }

    pub fn includes(&self, other: &MsExpr) -> bool {
        other.iter().all(|(a, n)| self.count(a) >= n)
    }

    /// `self - other`, or `None` when `other` is not included in `self`.
    pub fn difference(&self, other: &MsExpr) -> Option<MsExpr> {
        if !self.includes(other) {
            return None;
        }
        let mut out = MsExpr::new();
        for (a, n) in self.iter() {
            out.insert_n(a.clone(), n - other.count(a));
        }
        Some(out)
    }

    pub fn map_atoms(&self, f: impl Fn(&MAtom) -> MAtom) -> MsExpr {
        let mut out = MsExpr::new();
        for (a, n) in self.iter() {
            out.insert_n(f(a), n);
        }
        out
    }

    pub fn to_set(&self) -> SetExpr {
        self.counts.keys().cloned().collect()
    }

    /// Right-nested `⅋` rendering in canonical order.
    pub fn to_formula(&self) -> Formula {
        Formula::par_all(self.atoms().map(MAtom::to_formula))
    }
}

impl FromIterator<MAtom> for MsExpr {
    fn from_iter<I: IntoIterator<Item = MAtom>>(iter: I) -> Self {
        let mut m = MsExpr::new();
        for a in iter {
            m.insert(a);
        }
        m
    }
}

impl fmt::Display for MsExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.atoms().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for MsExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Set of atoms; the empty set encodes `0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetExpr {
    atoms: BTreeSet<MAtom>,
}

impl SetExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: MAtom) -> bool {
        self.atoms.insert(a)
    }

    pub fn contains(&self, a: &MAtom) -> bool {
        self.atoms.contains(a)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MAtom> {
        self.atoms.iter()
    }

    pub fn is_subset(&self, other: &SetExpr) -> bool {
        self.atoms.is_subset(&other.atoms)
    }

    pub fn union(&self, other: &SetExpr) -> SetExpr {
        self.atoms.union(&other.atoms).cloned().collect()
    }

    pub fn map_atoms(&self, f: impl Fn(&MAtom) -> MAtom) -> SetExpr {
        self.atoms.iter().map(f).collect()
    }

    pub fn to_formula(&self) -> Formula {
        Formula::oplus_all(self.atoms.iter().map(MAtom::to_formula))
    }
}

impl FromIterator<MAtom> for SetExpr {
    fn from_iter<I: IntoIterator<Item = MAtom>>(iter: I) -> Self {
        SetExpr {
            atoms: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SetExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Flatten a formula built from `item`, propositional variables, `⅋` and `⊥`.
pub fn normalize_mset(f: &Formula) -> Result<MsExpr, KernelError> {
    let mut out = MsExpr::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        match g {
            Formula::Item(t) => out.insert(MAtom::Item(t.clone())),
            Formula::Prop(p) => out.insert(MAtom::Prop(p.clone())),
            Formula::Bot => {}
            Formula::Par(a, b) => {
                stack.push(b);
                stack.push(a);
            }
            other => {
                return Err(KernelError::NotAMultisetExpression {
                    connective: other.connective_name(),
                })
            }
        }
    }
    Ok(out)
}

/// Flatten a formula built from `item`, propositional variables, `⊕` and `0`.
pub fn normalize_set(f: &Formula) -> Result<SetExpr, KernelError> {
    let mut out = SetExpr::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        match g {
            Formula::Item(t) => {
                out.insert(MAtom::Item(t.clone()));
            }
            Formula::Prop(p) => {
                out.insert(MAtom::Prop(p.clone()));
            }
            Formula::Zero => {}
            Formula::Oplus(a, b) => {
                stack.push(b);
                stack.push(a);
            }
            other => {
                return Err(KernelError::NotASetExpression {
                    connective: other.connective_name(),
                })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(t: Term) -> Formula {
        Formula::item(t)
    }

    #[test]
    fn multiset_of_list_encoding() {
        let f = Formula::par(
            item(Term::int(1)),
            Formula::par(item(Term::int(3)), Formula::par(item(Term::int(2)), Formula::Bot)),
        );
        let m = normalize_mset(&f).unwrap();
        let want: MsExpr = [1, 3, 2].iter().map(|n| MAtom::item(Term::int(*n))).collect();
        assert_eq!(m, want);
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn bot_par_bot_is_empty() {
        let m = normalize_mset(&Formula::par(Formula::Bot, Formula::Bot)).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn open_multiset_expression() {
        let fx = Term::app("f", vec![Term::var("X")]);
        let f = Formula::par(Formula::par(item(fx.clone()), Formula::Bot), Formula::prop("Y"));
        let m = normalize_mset(&f).unwrap();
        let want: MsExpr = [MAtom::item(fx), MAtom::prop("Y")].into_iter().collect();
        assert_eq!(m, want);
    }

    #[test]
    fn non_multiset_connective_is_named() {
        let err = normalize_mset(&Formula::oplus(Formula::Bot, Formula::Bot)).unwrap_err();
        assert_eq!(err, KernelError::NotAMultisetExpression { connective: "⊕" });
    }

    #[test]
    fn set_normalization_collapses_duplicates() {
        let f = Formula::oplus_all(vec![
            item(Term::int(1)),
            item(Term::int(2)),
            item(Term::int(2)),
            Formula::Zero,
        ]);
        let s = normalize_set(&f).unwrap();
        let want: SetExpr = [1, 2].iter().map(|n| MAtom::item(Term::int(*n))).collect();
        assert_eq!(s, want);
        assert!(normalize_set(&Formula::Zero).unwrap().is_empty());
    }

    #[test]
    fn open_set_expression() {
        let fx = Term::app("f", vec![Term::var("X")]);
        let f = Formula::oplus(Formula::oplus(item(fx.clone()), Formula::Zero), Formula::prop("Y"));
        let s = normalize_set(&f).unwrap();
        let want: SetExpr = [MAtom::item(fx), MAtom::prop("Y")].into_iter().collect();
        assert_eq!(s, want);
        let err = normalize_set(&Formula::par(Formula::Bot, Formula::Bot)).unwrap_err();
        assert_eq!(err, KernelError::NotASetExpression { connective: "⅋" });
    }

    #[test]
    fn difference_and_inclusion() {
        let a: MsExpr = ["a", "a", "b"].iter().map(|s| MAtom::prop(*s)).collect();
        let b: MsExpr = ["a", "b"].iter().map(|s| MAtom::prop(*s)).collect();
        assert!(a.includes(&b));
        assert!(!b.includes(&a));
        assert_eq!(a.difference(&b).unwrap(), [MAtom::prop("a")].into_iter().collect());
        assert!(b.difference(&a).is_none());
    }
}
