//! Set statements: least fixpoint of atom provability under `?S ⊸ ?T` clauses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::approx::{Judgment, VerificationCondition};
use crate::kernel::{MAtom, SetExpr};
use crate::Verdict;

/// `?(lhs) ⊸ ?(rhs)`: any lhs atom may be traded for the whole rhs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetClause {
    pub lhs_atoms: SetExpr,
    pub rhs_atoms: SetExpr,
    pub origin: usize,
}

impl fmt::Display for SetClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{} -o ?{}", self.lhs_atoms, self.rhs_atoms)
    }
}

/// `Γ; start ⊢ target`, read as `start ⊆ target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSequent {
    pub clauses: Vec<SetClause>,
    pub start: SetExpr,
    pub target: SetExpr,
}

impl SetSequent {
    /// Sequents whose joint provability is the VC's goal: one for an inclusion,
    /// one per direction for an equality. `None` if the goal is not a set judgment.
    pub fn from_vc(vc: &VerificationCondition) -> Option<Vec<SetSequent>> {
        SetSequent::from_judgments(&vc.hypotheses, &vc.goal)
    }

    pub fn from_judgments(hypotheses: &[Judgment], goal: &Judgment) -> Option<Vec<SetSequent>> {
        let clauses = compile_set_hypotheses(hypotheses);
        let seq = |start: &SetExpr, target: &SetExpr| SetSequent {
            clauses: clauses.clone(),
            start: start.clone(),
            target: target.clone(),
        };
        match goal {
            Judgment::SetIncl(s, t) => Some(vec![seq(s, t)]),
            Judgment::SetEq(s, t) => Some(vec![seq(s, t), seq(t, s)]),
            _ => None,
        }
    }

    pub fn alphabet(&self) -> BTreeSet<MAtom> {
        let mut out: BTreeSet<MAtom> = self.start.iter().chain(self.target.iter()).cloned().collect();
        for c in &self.clauses {
            out.extend(c.lhs_atoms.iter().cloned());
            out.extend(c.rhs_atoms.iter().cloned());
        }
        out
    }
}

pub fn compile_set_hypotheses(hyps: &[Judgment]) -> Vec<SetClause> {
    let mut out = Vec::new();
    for (origin, h) in hyps.iter().enumerate() {
        let mut push = |l: &SetExpr, r: &SetExpr| {
            out.push(SetClause {
                lhs_atoms: l.clone(),
                rhs_atoms: r.clone(),
                origin,
            })
        };
        match h {
            Judgment::SetIncl(s, t) => push(s, t),
            Judgment::SetEq(s, t) => {
                push(s, t);
                push(t, s);
            }
            _ => {}
        }
    }
    out
}

/// Why an atom is provable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Justification {
    /// The atom occurs in the target (`⊕R`).
    Target,
    /// Backchaining on a clause whose rhs atoms are all provable (`BC`, then `⊕L`).
    Clause(usize),
}

/// Proof DAG: every provable atom with the step that first established it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetDerivation {
    pub steps: BTreeMap<MAtom, Justification>,
}

impl SetDerivation {
    /// The derivation of `Γ; start ⊢ target` as an indented tree, conclusion first.
    pub fn render(&self, seq: &SetSequent) -> String {
        let mut out = Vec::new();
        let target = &seq.target;
        out.push(format!("Γ; {} ⊢ {}   ⊕L", seq.start, target));
        for a in seq.start.iter() {
            self.render_atom(seq, a, 1, &mut out);
        }
        out.join("\n")
    }

    fn render_atom(&self, seq: &SetSequent, a: &MAtom, depth: usize, out: &mut Vec<String>) {
        let pad = "  ".repeat(depth);
        match self.steps.get(a) {
            Some(Justification::Target) => out.push(format!("{pad}Γ; {a} ⊢ {}   ⊕R", seq.target)),
            Some(Justification::Clause(i)) => {
                let c = &seq.clauses[*i];
                out.push(format!("{pad}Γ; {a} ⊢ {}   BC with {c}", seq.target));
                out.push(format!("{pad}  Γ; {} ⊢ {}   ⊕L", c.rhs_atoms, seq.target));
                for b in c.rhs_atoms.iter() {
                    self.render_atom(seq, b, depth + 2, out);
                }
            }
            None => out.push(format!("{pad}Γ; {a} ⊢ {}   (no proof)", seq.target)),
        }
    }
}

/// A start atom with no proof, and the atoms its search depended on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetRefutation {
    pub atom: MAtom,
    pub explored: BTreeSet<MAtom>,
}

impl fmt::Display for SetRefutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let explored: Vec<String> = self.explored.iter().map(|a| a.to_string()).collect();
        write!(f, "{} has no proof (explored {{{}}})", self.atom, explored.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetProofResult {
    /// `Proved` or `Refuted`; the search is exhaustive.
    pub status: Verdict,
    pub derivation: Option<SetDerivation>,
    pub refutation: Option<SetRefutation>,
    /// Atom status changes made by the search.
    pub transitions: usize,
    pub alphabet_size: usize,
}

/// Propagate provability from the target through the clauses: a clause fires once
/// all of its rhs atoms are provable, making each of its lhs atoms provable.
pub fn prove_set(seq: &SetSequent) -> SetProofResult {
    let alphabet: Vec<MAtom> = seq.alphabet().into_iter().collect();
    let index: BTreeMap<&MAtom, usize> = alphabet.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let n = alphabet.len();
    let mut watchers: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pending: Vec<usize> = Vec::with_capacity(seq.clauses.len());
    for (ci, c) in seq.clauses.iter().enumerate() {
        for b in c.rhs_atoms.iter() {
            watchers[index[b]].push(ci);
        }
        pending.push(c.rhs_atoms.len());
    }

    let mut proof: Vec<Option<Justification>> = vec![None; n];
    let mut transitions = 0usize;
    let mut queue: Vec<usize> = Vec::new();
    let mut mark = |i: usize, j: Justification, proof: &mut Vec<Option<Justification>>, queue: &mut Vec<usize>| {
        if proof[i].is_none() {
            proof[i] = Some(j);
            transitions += 1;
            queue.push(i);
        }
    };
    for a in seq.target.iter() {
        mark(index[a], Justification::Target, &mut proof, &mut queue);
    }
    // clauses with an empty rhs fire immediately
    for (ci, c) in seq.clauses.iter().enumerate() {
        if pending[ci] == 0 {
            for a in c.lhs_atoms.iter() {
                mark(index[a], Justification::Clause(ci), &mut proof, &mut queue);
            }
        }
    }
    while let Some(b) = queue.pop() {
        for &ci in &watchers[b] {
            pending[ci] -= 1;
            if pending[ci] == 0 {
                for a in seq.clauses[ci].lhs_atoms.iter() {
                    mark(index[a], Justification::Clause(ci), &mut proof, &mut queue);
                }
            }
        }
    }
    // every atom left undecided is now known unprovable
    transitions += proof.iter().filter(|p| p.is_none()).count();
    assert!(transitions <= 3 * n.max(1), "set search exceeded its transition budget");

    let failed = seq.start.iter().find(|a| proof[index[*a]].is_none());
    let result = |status, derivation, refutation| SetProofResult {
        status,
        derivation,
        refutation,
        transitions,
        alphabet_size: n,
    };
    match failed {
        None => {
            let steps = alphabet
                .iter()
                .zip(proof)
                .filter_map(|(a, p)| p.map(|j| (a.clone(), j)))
                .collect();
            result(Verdict::Proved, Some(SetDerivation { steps }), None)
        }
        Some(atom) => {
            let explored = dependencies(seq, atom);
            result(
                Verdict::Refuted,
                None,
                Some(SetRefutation {
                    atom: atom.clone(),
                    explored,
                }),
            )
        }
    }
}

/// Atoms a search for `atom` would visit: those reachable through clause rhs sides.
fn dependencies(seq: &SetSequent, atom: &MAtom) -> BTreeSet<MAtom> {
    let mut seen = BTreeSet::from([atom.clone()]);
    let mut stack = vec![atom.clone()];
    while let Some(a) = stack.pop() {
        for c in seq.clauses.iter().filter(|c| c.lhs_atoms.contains(&a)) {
            for b in c.rhs_atoms.iter() {
                if seen.insert(b.clone()) {
                    stack.push(b.clone());
                }
            }
        }
    }
    seen
}

/// Naive Kleene iteration of the provability operator from the empty set.
pub fn set_fixpoint_oracle(seq: &SetSequent) -> Verdict {
    let mut provable: BTreeSet<MAtom> = BTreeSet::new();
    loop {
        let mut next: BTreeSet<MAtom> = seq.target.iter().cloned().collect();
        for c in &seq.clauses {
            if c.rhs_atoms.iter().all(|b| provable.contains(b)) {
                next.extend(c.lhs_atoms.iter().cloned());
            }
        }
        if next == provable {
            break;
        }
        provable = next;
    }
    if seq.start.iter().all(|a| provable.contains(a)) {
        Verdict::Proved
    } else {
        Verdict::Refuted
    }
}
