use std::fmt;

use serde::Serialize;

use super::{ApproxError, ApproxMap, Judgment};
use crate::approx::recognize;
use crate::horn::{Atom, ClauseTypes, HornClause, Mode, Program, Signature, Span};
use crate::kernel::{Arg, Formula, Sort, Term};

/// The statement `∀x̄ [H₁ & … & Hₙ ⇒ H₀]` obtained from one clause.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationCondition {
    pub clause_id: usize,
    pub span: Span,
    /// The clause in concrete syntax.
    pub source: String,
    pub mode: Mode,
    /// Element-sort variables, frozen as eigen-constants.
    pub eigen_vars: Vec<String>,
    /// Collection-sort variables, atomic in the provers.
    pub prop_vars: Vec<String>,
    /// Non-trivial hypotheses, in body order.
    pub hypotheses: Vec<Judgment>,
    pub goal: Judgment,
    /// The full instantiated clause, trivial hypotheses included.
    pub formula: Formula,
}

impl fmt::Display for VerificationCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hyps: Vec<String> = self.hypotheses.iter().map(|h| h.to_string()).collect();
        if hyps.is_empty() {
            write!(f, "⊢ {}", self.goal)
        } else {
            write!(f, "{} ⊢ {}", hyps.join(", "), self.goal)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StatementClass {
    MultisetStatement,
    SetStatement,
    DListStatement,
    TrivialStatement,
}

impl StatementClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StatementClass::MultisetStatement => "multiset",
            StatementClass::SetStatement => "set",
            StatementClass::DListStatement => "dlist",
            StatementClass::TrivialStatement => "trivial",
        }
    }
}

/// Substitute θ into one clause and read off its judgments.
pub fn apply_theta(
    sig: &Signature,
    clause: &HornClause,
    clause_id: usize,
    theta: &ApproxMap,
) -> Result<VerificationCondition, ApproxError> {
    let types = ClauseTypes::infer(sig, clause).map_err(|diagnostics| ApproxError::Typing {
        clause: clause_id,
        diagnostics,
    })?;
    let is_coll = |v: &str| {
        types
            .of(v)
            .is_some_and(|t| t.is_collection(&theta.approximated))
    };
    let (prop_vars, eigen_vars): (Vec<String>, Vec<String>) =
        clause.vars.iter().cloned().partition(|v| is_coll(v));

    let cx = Cx {
        sig,
        theta,
        clause_id,
    };
    let goal_f = cx.atom(&clause.head)?;
    let hyp_fs = clause
        .body
        .iter()
        .map(|a| cx.atom(a))
        .collect::<Result<Vec<_>, _>>()?;

    let read = |f: &Formula| {
        recognize(f).ok_or_else(|| ApproxError::UnrecognizedJudgment {
            clause: clause_id,
            formula: f.to_string(),
        })
    };
    let goal = read(&goal_f)?;
    let mut hypotheses = Vec::new();
    for f in &hyp_fs {
        let j = read(f)?;
        if !j.is_trivial() {
            hypotheses.push(j);
        }
    }

    let mut formula = if hyp_fs.is_empty() {
        goal_f
    } else {
        Formula::implies(Formula::with_all(hyp_fs), goal_f)
    };
    for v in clause.vars.iter().rev() {
        let sort = if is_coll(v) { Sort::Prop } else { Sort::First };
        formula = Formula::forall(v.clone(), sort, formula);
    }

    Ok(VerificationCondition {
        clause_id,
        span: clause.span,
        source: clause.to_string(),
        mode: theta.mode,
        eigen_vars,
        prop_vars,
        hypotheses,
        goal,
        formula,
    })
}

/// VCs for every clause of a program, in clause order.
pub fn generate_vcs(p: &Program, theta: &ApproxMap) -> Result<Vec<VerificationCondition>, ApproxError> {
    p.clauses
        .iter()
        .enumerate()
        .map(|(i, c)| apply_theta(&p.signature, c, i, theta))
        .collect()
}

/// Dispatch tag for the provers.
pub fn classify_vc(vc: &VerificationCondition) -> Result<StatementClass, ApproxError> {
    if vc.goal.is_trivial() {
        return Ok(StatementClass::TrivialStatement);
    }
    let mut modes = std::iter::once(&vc.goal)
        .chain(&vc.hypotheses)
        .filter_map(Judgment::mode);
    let first = modes.next().expect("goal is not trivial");
    if modes.any(|m| m != first) {
        return Err(ApproxError::MixedModes { clause: vc.clause_id });
    }
    Ok(match first {
        Mode::Multiset => StatementClass::MultisetStatement,
        Mode::Set => StatementClass::SetStatement,
        Mode::Dlist => StatementClass::DListStatement,
    })
}

struct Cx<'a> {
    sig: &'a Signature,
    theta: &'a ApproxMap,
    clause_id: usize,
}

impl Cx<'_> {
    fn kernel(&self, source: crate::kernel::KernelError) -> ApproxError {
        ApproxError::Kernel {
            clause: self.clause_id,
            source,
        }
    }

    fn atom(&self, a: &Atom) -> Result<Formula, ApproxError> {
        let pt = self
            .theta
            .pred(&a.predicate)
            .ok_or_else(|| ApproxError::MissingAnnotation(a.predicate.clone()))?;
        let decl = self
            .sig
            .predicate(&a.predicate)
            .ok_or_else(|| ApproxError::MissingAnnotation(a.predicate.clone()))?;
        let args = self.args(&a.args, &decl.ty.params)?;
        pt.template.apply(args).map_err(|e| self.kernel(e))
    }

    fn args(&self, args: &[Term], params: &[crate::horn::Type]) -> Result<Vec<Arg>, ApproxError> {
        args.iter()
            .zip(params)
            .map(|(t, ty)| {
                if ty.is_collection(&self.theta.approximated) {
                    self.collection(t).map(Arg::Formula)
                } else {
                    Ok(Arg::Term(t.clone()))
                }
            })
            .collect()
    }

    /// Rewrite a collection-typed term bottom-up through the constructor map.
    fn collection(&self, t: &Term) -> Result<Formula, ApproxError> {
        match t {
            Term::Var(v) => Ok(Formula::prop(v.clone())),
            Term::App { functor, args } => {
                let decl = self.sig.decl(functor);
                let template = self.theta.ctor(functor).ok_or_else(|| ApproxError::MissingConstructorMap {
                    constructor: functor.clone(),
                    kind: decl
                        .and_then(|d| d.ty.result.head().map(str::to_string))
                        .unwrap_or_default(),
                })?;
                let params = decl.map(|d| d.ty.params.clone()).unwrap_or_default();
                let args = self.args(args, &params)?;
                template.apply(args).map_err(|e| self.kernel(e))
            }
        }
    }
}
