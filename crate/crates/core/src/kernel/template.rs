use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::formula::{Arg, Formula};
use super::KernelError;

/// How a template parameter is used in the body.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    /// Occurs inside `item(..)` terms.
    Term,
    /// Occurs as a formula (propositional variable or applied function variable).
    Formula,
    /// Does not occur; accepts either kind.
    Unused,
}

/// A first-order-applied abstraction `λx₁…λxₘ. body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    name: String,
    params: Vec<String>,
    kinds: Vec<ParamKind>,
    body: Formula,
}

impl Template {
    /// Build a template, inferring each parameter's kind from its use sites.
    pub fn new(
        name: impl Into<String>,
        params: Vec<String>,
        body: Formula,
    ) -> Result<Self, KernelError> {
        let name = name.into();
        let mut term_uses = BTreeSet::new();
        let mut formula_uses = BTreeSet::new();
        collect_uses(&body, &mut Vec::new(), &mut term_uses, &mut formula_uses);
        let mut kinds = Vec::with_capacity(params.len());
        for p in &params {
            let kind = match (term_uses.contains(p), formula_uses.contains(p)) {
                (true, true) => {
                    return Err(KernelError::KindMismatch {
                        template: name.clone(),
                        param: p.clone(),
                        expected: "term",
                        got: "formula",
                    })
                }
                (true, false) => ParamKind::Term,
                (false, true) => ParamKind::Formula,
                (false, false) => ParamKind::Unused,
            };
            kinds.push(kind);
        }
        Ok(Template {
            name,
            params,
            kinds,
            body,
        })
    }

    /// A template with no parameters.
    pub fn constant(name: impl Into<String>, body: Formula) -> Self {
        Template {
            name: name.into(),
            params: Vec::new(),
            kinds: Vec::new(),
            body,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn kinds(&self) -> &[ParamKind] {
        &self.kinds
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// Simultaneous capture-avoiding substitution of `args` for the parameters,
    /// followed by β-normalization.
    pub fn apply(&self, args: Vec<Arg>) -> Result<Formula, KernelError> {
        if args.len() != self.params.len() {
            return Err(KernelError::Arity {
                template: self.name.clone(),
                expected: self.params.len(),
                got: args.len(),
            });
        }
        let mut map = BTreeMap::new();
        for ((p, kind), arg) in self.params.iter().zip(&self.kinds).zip(args) {
            let ok = matches!(
                (kind, &arg),
                (ParamKind::Unused, _)
                    | (ParamKind::Term, Arg::Term(_))
                    | (ParamKind::Formula, Arg::Formula(_))
            );
            if !ok {
                return Err(KernelError::KindMismatch {
                    template: self.name.clone(),
                    param: p.clone(),
                    expected: if *kind == ParamKind::Term { "term" } else { "formula" },
                    got: arg.kind_name(),
                });
            }
            map.insert(p.clone(), arg);
        }
        self.body
            .subst(&map)
            .map_err(|e| e.in_template(&self.name))?
            .beta_normal()
    }

    /// The template as a closed λ-abstraction over its parameters.
    pub fn as_lambda(&self) -> Formula {
        self.params
            .iter()
            .rev()
            .fold(self.body.clone(), |acc, p| Formula::lam(p.clone(), acc))
    }
}

/// `beta_apply` under its operation name.
pub fn beta_apply(template: &Template, args: Vec<Arg>) -> Result<Formula, KernelError> {
    template.apply(args)
}

fn collect_uses(
    f: &Formula,
    bound: &mut Vec<String>,
    term_uses: &mut BTreeSet<String>,
    formula_uses: &mut BTreeSet<String>,
) {
    match f {
        Formula::Item(t) => {
            for v in t.vars() {
                if !bound.contains(&v) {
                    term_uses.insert(v);
                }
            }
        }
        Formula::Prop(p) => {
            if !bound.contains(p) {
                formula_uses.insert(p.clone());
            }
        }
        Formula::Forall(x, _, b) | Formula::Exists(x, _, b) | Formula::Lam(x, b) => {
            bound.push(x.clone());
            collect_uses(b, bound, term_uses, formula_uses);
            bound.pop();
        }
        Formula::Par(a, b)
        | Formula::Oplus(a, b)
        | Formula::With(a, b)
        | Formula::Limp(a, b)
        | Formula::Equiv(a, b)
        | Formula::Implies(a, b) => {
            collect_uses(a, bound, term_uses, formula_uses);
            collect_uses(b, bound, term_uses, formula_uses);
        }
        Formula::Quest(a) => collect_uses(a, bound, term_uses, formula_uses),
        Formula::App(h, args) => {
            collect_uses(h, bound, term_uses, formula_uses);
            for a in args {
                collect_uses(a, bound, term_uses, formula_uses);
            }
        }
        Formula::Bot | Formula::Zero | Formula::One => {}
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_lambda())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::normal::normalize_mset;
    use crate::kernel::term::Term;

    fn cons_template() -> Template {
        Template::new(
            "cons",
            vec!["x".into(), "y".into()],
            Formula::par(Formula::item(Term::var("x")), Formula::prop("y")),
        )
        .unwrap()
    }

    #[test]
    fn applies_item_par_template() {
        let f = cons_template()
            .apply(vec![Arg::Term(Term::int(2)), Arg::Formula(Formula::Bot)])
            .unwrap();
        assert_eq!(f, Formula::par(Formula::item(Term::int(2)), Formula::Bot));
    }

    #[test]
    fn identity_template() {
        let id = Template::new("id", vec!["x".into()], Formula::prop("x")).unwrap();
        let a = Formula::item(Term::constant("a"));
        assert_eq!(id.apply(vec![Arg::Formula(a.clone())]).unwrap(), a);
    }

    #[test]
    fn folds_over_a_list() {
        let cons = cons_template();
        let mut acc = Formula::Bot;
        for n in [2, 3, 1] {
            acc = cons.apply(vec![Arg::Term(Term::int(n)), Arg::Formula(acc)]).unwrap();
        }
        let want = Formula::par(
            Formula::item(Term::int(1)),
            Formula::par(
                Formula::item(Term::int(3)),
                Formula::par(Formula::item(Term::int(2)), Formula::Bot),
            ),
        );
        assert_eq!(acc, want);
        assert_eq!(normalize_mset(&acc).unwrap().len(), 3);
    }

    #[test]
    fn arity_mismatch_names_template() {
        let err = cons_template().apply(vec![Arg::Term(Term::int(1))]).unwrap_err();
        assert_eq!(
            err,
            KernelError::Arity {
                template: "cons".into(),
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn kind_mismatch_is_reported() {
        let err = cons_template()
            .apply(vec![Arg::Formula(Formula::Bot), Arg::Formula(Formula::Bot)])
            .unwrap_err();
        assert!(matches!(err, KernelError::KindMismatch { ref param, .. } if param == "x"));
    }

    #[test]
    fn substitution_is_simultaneous() {
        // λx λy. x ⅋ y applied to [y, x] must swap, not chain
        let t = Template::new(
            "swap",
            vec!["x".into(), "y".into()],
            Formula::par(Formula::prop("x"), Formula::prop("y")),
        )
        .unwrap();
        let f = t
            .apply(vec![Arg::Formula(Formula::prop("y")), Arg::Formula(Formula::prop("x"))])
            .unwrap();
        assert_eq!(f, Formula::par(Formula::prop("y"), Formula::prop("x")));
    }
}
