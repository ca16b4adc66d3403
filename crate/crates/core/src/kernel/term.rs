use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// First-order term. Constants are applications with no arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    App { functor: String, args: Vec<Term> },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App {
            functor: name.into(),
            args: Vec::new(),
        }
    }

    pub fn app(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App {
            functor: functor.into(),
            args,
        }
    }

    pub fn int(n: i64) -> Self {
        Term::constant(n.to_string())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    /// Integer value when the term is a numeric constant.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::App { functor, args } if args.is_empty() => functor.parse().ok(),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars_in_order(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App { args, .. } => args.iter().for_each(|a| a.vars_in_order(out)),
        }
    }

    pub fn occurs(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::App { args, .. } => args.iter().any(|a| a.occurs(name)),
        }
    }

    pub fn subst(&self, f: &dyn Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::App { functor, args } => Term::App {
                functor: functor.clone(),
                args: args.iter().map(|a| a.subst(f)).collect(),
            },
        }
    }

    pub fn rename(&self, from: &str, to: &str) -> Term {
        self.subst(&|v| (v == from).then(|| Term::var(to)))
    }

    /// Every subterm, including the term itself.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = vec![self];
        if let Term::App { args, .. } = self {
            for a in args {
                out.extend(a.subterms());
            }
        }
        out
    }
}

// Ground terms compare lexicographically on (functor, arity, args); variables sort first.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a.cmp(b),
            (Term::Var(_), Term::App { .. }) => Ordering::Less,
            (Term::App { .. }, Term::Var(_)) => Ordering::Greater,
            (
                Term::App {
                    functor: f1,
                    args: a1,
                },
                Term::App {
                    functor: f2,
                    args: a2,
                },
            ) => f1
                .cmp(f2)
                .then(a1.len().cmp(&a2.len()))
                .then_with(|| a1.cmp(a2)),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App { functor, args } if args.is_empty() => write!(f, "{functor}"),
            Term::App { functor, args } => {
                write!(f, "{functor}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
