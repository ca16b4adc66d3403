use std::fmt;

use crate::horn::Mode;
use crate::kernel::{normalize_mset, normalize_set, Formula, MsExpr, SetExpr, Sort};

/// A collection judgment between two normalized sides.
#[derive(Clone, Debug, PartialEq)]
pub enum Judgment {
    Trivial,
    MsEq(MsExpr, MsExpr),
    MsIncl(MsExpr, MsExpr),
    SetEq(SetExpr, SetExpr),
    SetIncl(SetExpr, SetExpr),
    /// `∀W∀w. lhs ○–○ rhs` with both sides β-normal and open in `hole`.
    DlistEq {
        hole: (String, String),
        lhs: Formula,
        rhs: Formula,
    },
}

impl Judgment {
    pub fn mode(&self) -> Option<Mode> {
        match self {
            Judgment::Trivial => None,
            Judgment::MsEq(..) | Judgment::MsIncl(..) => Some(Mode::Multiset),
            Judgment::SetEq(..) | Judgment::SetIncl(..) => Some(Mode::Set),
            Judgment::DlistEq { .. } => Some(Mode::Dlist),
        }
    }

    pub fn relation_name(&self) -> &'static str {
        match self {
            Judgment::Trivial => "trivial",
            Judgment::MsEq(..) => "mseq",
            Judgment::MsIncl(..) => "msincl",
            Judgment::SetEq(..) => "seteq",
            Judgment::SetIncl(..) => "setincl",
            Judgment::DlistEq { .. } => "dlisteq",
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Judgment::Trivial)
    }

    /// The linear-logic formula this judgment stands for.
    pub fn to_formula(&self) -> Formula {
        match self {
            Judgment::Trivial => Formula::One,
            Judgment::MsEq(s, t) => Formula::equiv(s.to_formula(), t.to_formula()),
            Judgment::MsIncl(s, t) => {
                let mut taken = s.to_formula().all_names();
                taken.extend(t.to_formula().all_names());
                let q = if taken.contains("q") {
                    crate::kernel::fresh_name("q", &taken)
                } else {
                    "q".to_string()
                };
                Formula::exists(
                    q.clone(),
                    Sort::Prop,
                    Formula::limp(Formula::par(s.to_formula(), Formula::prop(q)), t.to_formula()),
                )
            }
            Judgment::SetEq(s, t) => {
                Formula::equiv(Formula::quest(s.to_formula()), Formula::quest(t.to_formula()))
            }
            Judgment::SetIncl(s, t) => {
                Formula::limp(Formula::quest(s.to_formula()), Formula::quest(t.to_formula()))
            }
            Judgment::DlistEq { hole, lhs, rhs } => Formula::forall(
                hole.0.clone(),
                Sort::Prop,
                Formula::forall(hole.1.clone(), Sort::Prop, Formula::equiv(lhs.clone(), rhs.clone())),
            ),
        }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::Trivial => write!(f, "1"),
            Judgment::MsEq(s, t) => write!(f, "{s} ≐ {t}"),
            Judgment::MsIncl(s, t) => write!(f, "{s} ⊑ {t}"),
            Judgment::SetEq(s, t) => write!(f, "{s} =ₛ {t}"),
            Judgment::SetIncl(s, t) => write!(f, "{s} ⊆ {t}"),
            Judgment::DlistEq { hole, lhs, rhs } => {
                write!(f, "∀{} ∀{}. {lhs} ○–○ {rhs}", hole.0, hole.1)
            }
        }
    }
}

/// Read a judgment back from the shape of a β-normal formula:
/// `1`, `S ○–○ T`, `∃q. S ⅋ q ⊸ T`, `?S ○–○ ?T`, `?S ⊸ ?T`, or `∀W∀w. A ○–○ B`.
pub fn recognize(f: &Formula) -> Option<Judgment> {
    match f {
        Formula::One => Some(Judgment::Trivial),
        Formula::Equiv(a, b) => match (&**a, &**b) {
            (Formula::Quest(s), Formula::Quest(t)) => {
                Some(Judgment::SetEq(normalize_set(s).ok()?, normalize_set(t).ok()?))
            }
            _ => Some(Judgment::MsEq(normalize_mset(a).ok()?, normalize_mset(b).ok()?)),
        },
        Formula::Limp(a, b) => match (&**a, &**b) {
            (Formula::Quest(s), Formula::Quest(t)) => {
                Some(Judgment::SetIncl(normalize_set(s).ok()?, normalize_set(t).ok()?))
            }
            _ => None,
        },
        Formula::Exists(q, Sort::Prop, body) => match &**body {
            Formula::Limp(lhs, t) => match &**lhs {
                Formula::Par(s, slack) if **slack == Formula::prop(q.clone()) => {
                    if s.free_names().contains(q) || t.free_names().contains(q) {
                        return None;
                    }
                    Some(Judgment::MsIncl(normalize_mset(s).ok()?, normalize_mset(t).ok()?))
                }
                _ => None,
            },
            _ => None,
        },
        Formula::Forall(w1, Sort::Prop, inner) => match &**inner {
            Formula::Forall(w2, Sort::Prop, eq) => match &**eq {
                Formula::Equiv(a, b) => Some(Judgment::DlistEq {
                    hole: (w1.clone(), w2.clone()),
                    lhs: (**a).clone(),
                    rhs: (**b).clone(),
                }),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::syntax::parse_formula;

    fn rec(src: &str) -> Judgment {
        recognize(&parse_formula(src).unwrap()).unwrap()
    }

    #[test]
    fn recognizes_each_shape() {
        assert_eq!(rec("1"), Judgment::Trivial);
        assert_eq!(rec("bot # K o-o K").relation_name(), "mseq");
        assert_eq!(rec("exists q. A # q -o B").relation_name(), "msincl");
        assert_eq!(rec("?R -o ?(item(X) (+) S)").relation_name(), "setincl");
        assert_eq!(rec("?R o-o ?S").relation_name(), "seteq");
        assert_eq!(rec("forall W. forall w. W w o-o W w").relation_name(), "dlisteq");
        assert!(recognize(&parse_formula("A -o B").unwrap()).is_none());
        assert!(recognize(&parse_formula("exists q. A # q -o B # q").unwrap()).is_none());
    }

    #[test]
    fn formulas_round_trip_through_recognition() {
        for src in ["item(X) # L o-o M", "exists q. A # q -o B", "?0 -o ?(item(X) (+) 0)", "?A o-o ?B"] {
            let j = rec(src);
            assert_eq!(recognize(&j.to_formula()), Some(j.clone()), "{src}");
        }
    }
}
