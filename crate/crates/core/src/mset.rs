//! Multiset statements as rewriting: backchaining search over count vectors.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::approx::{Judgment, VerificationCondition};
use crate::horn::Relation;
use crate::kernel::{MAtom, MsExpr};
use crate::Verdict;

pub const DEFAULT_MAX_STATES: usize = 100_000;

/// `lhs ⊸ rhs`, read right to left by backchaining.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MsRewriteRule {
    pub lhs: MsExpr,
    pub rhs: MsExpr,
    /// Compiled from an inclusion hypothesis `∃q. lhs ⅋ q ⊸ rhs`.
    pub slack: bool,
    /// Index of the hypothesis this rule came from.
    pub origin: usize,
}

impl fmt::Display for MsRewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = if self.slack { " + q" } else { "" };
        write!(f, "{}{q} -o {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsSequent {
    pub rules: Vec<MsRewriteRule>,
    pub start: MsExpr,
    pub target: MsExpr,
    pub goal_relation: Relation,
}

impl MsSequent {
    /// The sequent for a multiset VC, or `None` if its goal is not a multiset judgment.
    pub fn from_vc(vc: &VerificationCondition) -> Option<MsSequent> {
        MsSequent::from_judgments(&vc.hypotheses, &vc.goal)
    }

    pub fn from_judgments(hypotheses: &[Judgment], goal: &Judgment) -> Option<MsSequent> {
        let (start, target, goal_relation) = match goal {
            Judgment::MsEq(s, t) => (s.clone(), t.clone(), Relation::Eq),
            Judgment::MsIncl(s, t) => (s.clone(), t.clone(), Relation::Incl),
            _ => return None,
        };
        Some(MsSequent {
            rules: compile_hypotheses(hypotheses),
            start,
            target,
            goal_relation,
        })
    }

    pub fn alphabet(&self) -> Vec<MAtom> {
        let mut atoms: Vec<MAtom> = self
            .rules
            .iter()
            .flat_map(|r| r.lhs.support().into_iter().chain(r.rhs.support()))
            .chain(self.start.support())
            .chain(self.target.support())
            .collect();
        atoms.sort();
        atoms.dedup();
        atoms
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MsLimits {
    pub max_states: usize,
}

impl Default for MsLimits {
    fn default() -> Self {
        MsLimits {
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

/// One backchaining step: `before` contains the rule's rhs, which is replaced by its lhs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MsStep {
    pub rule: usize,
    pub origin: usize,
    pub before: MsExpr,
    pub after: MsExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MsProofResult {
    pub status: Verdict,
    /// Steps from the target to the start, when proved.
    pub trace: Vec<MsStep>,
    pub states_explored: usize,
    pub bound: usize,
}

impl MsProofResult {
    /// The proof as a list of sequents, conclusion last.
    pub fn render_trace(&self, seq: &MsSequent) -> String {
        let mut lines = Vec::new();
        let top = self.trace.last().map_or(&seq.target, |s| &s.after);
        let rel = match seq.goal_relation {
            Relation::Eq => "⅋L",
            Relation::Incl => "⅋L (slack q := rest)",
        };
        lines.push(format!("  Γ; {} ⊢ {}   {rel}", seq.start, top));
        for step in self.trace.iter().rev() {
            lines.push(format!(
                "  Γ; {} ⊢ {}   BC with {}",
                seq.start, step.before, seq.rules[step.rule]
            ));
        }
        lines.join("\n")
    }
}

/// An equality hypothesis gives a rule in each direction; an inclusion gives one slack rule.
pub fn compile_hypotheses(hyps: &[Judgment]) -> Vec<MsRewriteRule> {
    let mut rules = Vec::new();
    for (origin, h) in hyps.iter().enumerate() {
        match h {
            Judgment::MsEq(s, t) => {
                rules.push(MsRewriteRule {
                    lhs: s.clone(),
                    rhs: t.clone(),
                    slack: false,
                    origin,
                });
                rules.push(MsRewriteRule {
                    lhs: t.clone(),
                    rhs: s.clone(),
                    slack: false,
                    origin,
                });
            }
            Judgment::MsIncl(s, t) => rules.push(MsRewriteRule {
                lhs: s.clone(),
                rhs: t.clone(),
                slack: true,
                origin,
            }),
            _ => {}
        }
    }
    rules
}

type State = Box<[u32]>;

struct Compiled {
    /// Rule index into the sequent with lhs and rhs as count vectors.
    rules: Vec<(usize, State, State)>,
    start: State,
    target: State,
    /// Weights that backchaining never increases (`w·lhs ≤ w·rhs`).
    shrinking: Vec<Vec<u32>>,
    /// Weights that backchaining never decreases (`w·lhs ≥ w·rhs`).
    growing: Vec<Vec<u32>>,
}

fn vector(m: &MsExpr, index: &HashMap<&MAtom, usize>, n: usize) -> State {
    let mut v = vec![0u32; n];
    for (a, k) in m.iter() {
        v[index[a]] += k as u32;
    }
    v.into_boxed_slice()
}

fn dot(w: &[u32], v: &[u32]) -> u64 {
    w.iter().zip(v).map(|(a, b)| *a as u64 * *b as u64).sum()
}

impl Compiled {
    fn new(seq: &MsSequent) -> Compiled {
        let alphabet = seq.alphabet();
        let n = alphabet.len();
        let index: HashMap<&MAtom, usize> = alphabet.iter().enumerate().map(|(i, a)| (a, i)).collect();
        // A slack rule leaves a fresh atom behind. Nothing consumes it, so under
        // `=` the rule is a dead end and under `<=` the goal's slack absorbs it.
        let rules: Vec<(usize, State, State)> = seq
            .rules
            .iter()
            .enumerate()
            .filter(|(_, r)| !(r.slack && seq.goal_relation == Relation::Eq))
            .map(|(i, r)| (i, vector(&r.lhs, &index, n), vector(&r.rhs, &index, n)))
            .collect();
        let (shrinking, growing) = weights(n, &rules);
        Compiled {
            rules,
            start: vector(&seq.start, &index, n),
            target: vector(&seq.target, &index, n),
            shrinking,
            growing,
        }
    }

    fn done(&self, s: &[u32], rel: Relation) -> bool {
        match rel {
            Relation::Eq => *s == *self.start,
            Relation::Incl => s.iter().zip(self.start.iter()).all(|(a, b)| a >= b),
        }
    }

    /// States from which the goal is provably out of reach.
    fn dead(&self, s: &[u32], rel: Relation) -> bool {
        let start = &self.start;
        let too_small = self.shrinking.iter().any(|w| dot(w, s) < dot(w, start));
        match rel {
            Relation::Eq => too_small || self.growing.iter().any(|w| dot(w, s) > dot(w, start)),
            Relation::Incl => too_small,
        }
    }
}

/// Small nonnegative weight vectors that are monotone along every rule.
fn weights(n: usize, rules: &[(usize, State, State)]) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let mut candidates: Vec<Vec<u32>> = Vec::new();
    if n <= 6 {
        let total = 3usize.pow(n as u32);
        for code in 1..total {
            let mut w = vec![0u32; n];
            let mut c = code;
            for slot in w.iter_mut() {
                *slot = (c % 3) as u32;
                c /= 3;
            }
            candidates.push(w);
        }
    } else {
        for i in 0..n {
            let mut w = vec![0u32; n];
            w[i] = 1;
            candidates.push(w);
        }
        candidates.push(vec![1; n]);
    }
    let mut shrinking = Vec::new();
    let mut growing = Vec::new();
    for w in candidates {
        if rules.iter().all(|(_, l, r)| dot(&w, l) <= dot(&w, r)) {
            shrinking.push(w.clone());
        }
        if rules.iter().all(|(_, l, r)| dot(&w, l) >= dot(&w, r)) {
            growing.push(w);
        }
    }
    (shrinking, growing)
}

/// Backward breadth-first search from the target, replacing a rule's rhs by its lhs,
/// until the state matches the start (exactly for `=`, as a sub-multiset for `<=`).
pub fn prove_mset(seq: &MsSequent, limits: MsLimits) -> MsProofResult {
    let rel = seq.goal_relation;
    let c = Compiled::new(seq);
    let mut states: Vec<State> = vec![c.target.clone()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut seen: HashMap<State, usize> = HashMap::from([(c.target.clone(), 0)]);
    let mut queue = VecDeque::from([0usize]);
    let result = |status, trace, explored| MsProofResult {
        status,
        trace,
        states_explored: explored,
        bound: limits.max_states,
    };
    if c.dead(&c.target, rel) {
        return result(Verdict::Refuted, Vec::new(), 1);
    }
    while let Some(i) = queue.pop_front() {
        if c.done(&states[i], rel) {
            return result(Verdict::Proved, trace(seq, &states, &parent, i), states.len());
        }
        for (rule, lhs, rhs) in &c.rules {
            let s = &states[i];
            if s.iter().zip(rhs.iter()).any(|(a, b)| a < b) {
                continue;
            }
            let next: State = s.iter().zip(rhs.iter()).zip(lhs.iter()).map(|((a, r), l)| a - r + l).collect();
            if seen.contains_key(&next) || c.dead(&next, rel) {
                continue;
            }
            if states.len() >= limits.max_states {
                return result(Verdict::Unknown, Vec::new(), states.len());
            }
            seen.insert(next.clone(), states.len());
            states.push(next);
            parent.push(Some((i, *rule)));
            queue.push_back(states.len() - 1);
        }
    }
    result(Verdict::Refuted, Vec::new(), states.len())
}

fn trace(seq: &MsSequent, states: &[State], parent: &[Option<(usize, usize)>], mut i: usize) -> Vec<MsStep> {
    let alphabet = seq.alphabet();
    let expr = |s: &State| {
        let mut m = MsExpr::new();
        for (a, k) in alphabet.iter().zip(s.iter()) {
            m.insert_n(a.clone(), *k as usize);
        }
        m
    };
    let mut steps = Vec::new();
    while let Some((p, rule)) = parent[i] {
        steps.push(MsStep {
            rule,
            origin: seq.rules[rule].origin,
            before: expr(&states[p]),
            after: expr(&states[i]),
        });
        i = p;
    }
    steps.reverse();
    steps
}

/// Check a trace step by step against the sequent's rules.
pub fn replay_trace(seq: &MsSequent, trace: &[MsStep]) -> Result<(), String> {
    let mut current = seq.target.clone();
    for (k, step) in trace.iter().enumerate() {
        let rule = seq
            .rules
            .get(step.rule)
            .ok_or_else(|| format!("step {k}: no rule {}", step.rule))?;
        if rule.slack && seq.goal_relation == Relation::Eq {
            return Err(format!("step {k}: inclusion hypothesis used under an equality goal"));
        }
        if step.before != current {
            return Err(format!("step {k}: expected state {current}, trace has {}", step.before));
        }
        let rest = current
            .difference(&rule.rhs)
            .ok_or_else(|| format!("step {k}: {} does not contain {}", current, rule.rhs))?;
        let after = rest.union(&rule.lhs);
        if step.after != after {
            return Err(format!("step {k}: rewriting gives {after}, trace has {}", step.after));
        }
        current = after;
    }
    let closes = match seq.goal_relation {
        Relation::Eq => current == seq.start,
        Relation::Incl => current.includes(&seq.start),
    };
    if closes {
        Ok(())
    } else {
        Err(format!("final state {current} does not close against {}", seq.start))
    }
}

/// Forward closure from `from`, firing rules left to right, until a state matches `to`
/// (exactly for `=`, as a super-multiset for `<=`). A slack rule also leaves an
/// unconsumable residue, so under `=` its successors are discarded.
///
/// With the rules flipped and `from`/`to` set to the target/start, this decides the
/// same question as [`prove_mset`].
pub fn reachability_oracle(
    rules: &[MsRewriteRule],
    from: &MsExpr,
    to: &MsExpr,
    relation: Relation,
    bound: usize,
) -> Verdict {
    let reached = |s: &MsExpr| match relation {
        Relation::Eq => s == to,
        Relation::Incl => s.includes(to),
    };
    let usable: Vec<&MsRewriteRule> = rules.iter().filter(|r| !(r.slack && relation == Relation::Eq)).collect();
    // atoms (and the total size) that no rule can raise or lower bound what is reachable
    let atoms: Vec<MAtom> = usable
        .iter()
        .flat_map(|r| r.lhs.support().into_iter().chain(r.rhs.support()))
        .chain(from.support())
        .chain(to.support())
        .collect();
    let never_up = |a: &MAtom| usable.iter().all(|r| r.rhs.count(a) <= r.lhs.count(a));
    let never_down = |a: &MAtom| usable.iter().all(|r| r.rhs.count(a) >= r.lhs.count(a));
    let capped: Vec<MAtom> = atoms.iter().filter(|a| never_up(a)).cloned().collect();
    let floored: Vec<MAtom> = atoms.iter().filter(|a| never_down(a)).cloned().collect();
    let size_never_up = usable.iter().all(|r| r.rhs.len() <= r.lhs.len());
    let size_never_down = usable.iter().all(|r| r.rhs.len() >= r.lhs.len());
    let hopeless = |s: &MsExpr| {
        let short = capped.iter().any(|a| s.count(a) < to.count(a)) || (size_never_up && s.len() < to.len());
        let long = floored.iter().any(|a| s.count(a) > to.count(a)) || (size_never_down && s.len() > to.len());
        match relation {
            Relation::Eq => short || long,
            Relation::Incl => short,
        }
    };
    if hopeless(from) {
        return Verdict::Refuted;
    }
    let mut seen = std::collections::BTreeSet::from([from.clone()]);
    let mut frontier = vec![from.clone()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in frontier {
            if reached(&s) {
                return Verdict::Proved;
            }
            for r in &usable {
                let Some(rest) = s.difference(&r.lhs) else { continue };
                let t = rest.union(&r.rhs);
                if !hopeless(&t) && seen.insert(t.clone()) {
                    if seen.len() > bound {
                        return Verdict::Unknown;
                    }
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    Verdict::Refuted
}

/// The rules with both sides exchanged.
pub fn flipped(rules: &[MsRewriteRule]) -> Vec<MsRewriteRule> {
    rules
        .iter()
        .map(|r| MsRewriteRule {
            lhs: r.rhs.clone(),
            rhs: r.lhs.clone(),
            slack: r.slack,
            origin: r.origin,
        })
        .collect()
}
