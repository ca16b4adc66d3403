//! Ground SLD resolution, and empirical checks of annotations against the
//! answers it computes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::approx::ApproxMap;
use crate::horn::{AnnBody, Annotation, CollExpr, HornClause, Mode, Program, Relation, Signature, Type};
use crate::kernel::{normalize_mset, normalize_set, Arg, Formula, MAtom, ParamKind, Term};
use crate::seq::DListEncoding;

pub const DEFAULT_STEP_LIMIT: usize = 10_000;

/// Integer comparisons evaluated natively when the program has no clauses for them.
const COMPARISONS: [&str; 4] = ["lt", "leq", "gr", "geq"];

/// Values tried for an unbound argument of a native comparison.
const ENUMERATED: std::ops::RangeInclusive<i64> = 0..=9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub predicate: String,
    pub args: Vec<Term>,
    /// Maximum number of resolution steps.
    pub depth_limit: usize,
}

impl Query {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Query {
            predicate: predicate.into(),
            args,
            depth_limit: DEFAULT_STEP_LIMIT,
        }
    }

    pub fn with_limit(mut self, depth_limit: usize) -> Self {
        self.depth_limit = depth_limit;
        self
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
        write!(f, "{}({})", self.predicate, args.join(", "))
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("search exceeded {0} resolution steps")]
    DepthExceeded(usize),
    #[error("search found more than {0} answers")]
    TooManyAnswers(usize),
    #[error("`{predicate}/{arity}` is not a predicate of the program")]
    UnknownPredicate { predicate: String, arity: usize },
}

/// Bindings of the query's variables, fully dereferenced.
pub type Answer = BTreeMap<String, Term>;

pub const MAX_ANSWERS: usize = 1_000;

fn is_native(p: &Program, pred: &str) -> bool {
    COMPARISONS.contains(&pred) && p.clauses_for(pred).next().is_none()
}

/// All answers to `q`, depth first with leftmost selection, in clause order.
pub fn sld_solve(p: &Program, q: &Query) -> Result<Vec<Answer>, SolveError> {
    let r = sld_search(p, q);
    match r.stopped {
        Some(e) => Err(e),
        None => Ok(r.answers),
    }
}

/// Answers found before the search finished or stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub answers: Vec<Answer>,
    /// Why the search stopped early; the answers are then a prefix of the full list.
    pub stopped: Option<SolveError>,
}

pub fn sld_search(p: &Program, q: &Query) -> SearchResult {
    let mut answers = Vec::new();
    let stopped = search(p, q, &mut answers).err();
    SearchResult { answers, stopped }
}

fn search(p: &Program, q: &Query, answers: &mut Vec<Answer>) -> Result<(), SolveError> {
    let declared = p.signature.predicate(&q.predicate).map(|d| d.arity());
    if declared != Some(q.args.len()) && !(declared.is_none() && is_native(p, &q.predicate)) {
        return Err(SolveError::UnknownPredicate {
            predicate: q.predicate.clone(),
            arity: q.args.len(),
        });
    }
    let mut m = Machine::new(p);
    let mut names = Vec::new();
    for a in &q.args {
        a.vars_in_order(&mut names);
    }
    let cells: Vec<usize> = names.iter().map(|_| m.new_var()).collect();
    let env: HashMap<&str, usize> = names.iter().map(String::as_str).zip(cells.iter().copied()).collect();
    let args = q.args.iter().map(|a| m.load(a, &env)).collect();
    let goals = Some(Rc::new(Goal {
        predicate: m.symbol(&q.predicate),
        args,
        next: None,
    }));

    let mut steps = 0usize;
    let mut frames = vec![m.frame(goals)];
    while let Some(top) = frames.last_mut() {
        let Some(goal) = top.goals.clone() else {
            if answers.len() == MAX_ANSWERS {
                return Err(SolveError::TooManyAnswers(MAX_ANSWERS));
            }
            answers.push(names.iter().cloned().zip(cells.iter().map(|c| m.read(*c))).collect());
            frames.pop();
            continue;
        };
        m.undo(top.trail, top.heap);
        if top.next >= top.alts.count() {
            frames.pop();
            continue;
        }
        let i = top.next;
        top.next += 1;
        steps += 1;
        if steps > q.depth_limit {
            return Err(SolveError::DepthExceeded(q.depth_limit));
        }
        if let Some(rest) = m.try_alt(&goal, &top.alts, i) {
            let frame = m.frame(rest);
            frames.push(frame);
        }
    }
    Ok(())
}

/// A heap cell. Terms live in one growing vector so that backtracking is a
/// truncation plus undoing the trailed bindings.
#[derive(Clone, Debug)]
enum Cell {
    Var(Option<usize>),
    App(usize, Rc<[usize]>),
}

/// A clause term with variables numbered per clause.
enum Pattern {
    Var(usize),
    App(usize, Vec<Pattern>),
}

struct CompiledClause {
    predicate: usize,
    head: Vec<Pattern>,
    body: Vec<(usize, Vec<Pattern>)>,
    vars: usize,
}

struct Goal {
    predicate: usize,
    args: Vec<usize>,
    next: Goals,
}

type Goals = Option<Rc<Goal>>;

enum Alts {
    None,
    Clauses(Vec<usize>),
    /// A native comparison; `unbound` variable cells range over `ENUMERATED`.
    Compare { op: usize, unbound: Vec<usize> },
}

impl Alts {
    fn count(&self) -> usize {
        match self {
            Alts::None => 0,
            Alts::Clauses(cs) => cs.len(),
            Alts::Compare { unbound, .. } => ENUMERATED.count().pow(unbound.len() as u32),
        }
    }
}

struct Frame {
    goals: Goals,
    alts: Alts,
    next: usize,
    trail: usize,
    heap: usize,
}

struct Machine {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    clauses: Rc<Vec<CompiledClause>>,
    /// Symbol of each native comparison.
    native: BTreeMap<usize, &'static str>,
    heap: Vec<Cell>,
    trail: Vec<usize>,
}

impl Machine {
    fn new(p: &Program) -> Self {
        let mut m = Machine {
            symbols: Vec::new(),
            index: HashMap::new(),
            clauses: Rc::new(Vec::new()),
            native: BTreeMap::new(),
            heap: Vec::new(),
            trail: Vec::new(),
        };
        for name in COMPARISONS {
            if is_native(p, name) {
                let s = m.symbol(name);
                m.native.insert(s, name);
            }
        }
        let mut clauses = Vec::new();
        for c in &p.clauses {
            let vars: HashMap<&str, usize> = c.vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
            let head = c.head.args.iter().map(|t| m.pattern(t, &vars)).collect();
            let body = c
                .body
                .iter()
                .map(|a| (m.symbol(&a.predicate), a.args.iter().map(|t| m.pattern(t, &vars)).collect()))
                .collect();
            let predicate = m.symbol(&c.head.predicate);
            clauses.push(CompiledClause {
                predicate,
                head,
                body,
                vars: c.vars.len(),
            });
        }
        m.clauses = Rc::new(clauses);
        m
    }

    fn symbol(&mut self, name: &str) -> usize {
        if let Some(i) = self.index.get(name) {
            return *i;
        }
        self.symbols.push(name.to_string());
        self.index.insert(name.to_string(), self.symbols.len() - 1);
        self.symbols.len() - 1
    }

    fn pattern(&mut self, t: &Term, vars: &HashMap<&str, usize>) -> Pattern {
        match t {
            Term::Var(v) => Pattern::Var(vars[v.as_str()]),
            Term::App { functor, args } => {
                let f = self.symbol(functor);
                Pattern::App(f, args.iter().map(|a| self.pattern(a, vars)).collect())
            }
        }
    }

    fn new_var(&mut self) -> usize {
        self.heap.push(Cell::Var(None));
        self.heap.len() - 1
    }

    fn load(&mut self, t: &Term, env: &HashMap<&str, usize>) -> usize {
        match t {
            Term::Var(v) => env[v.as_str()],
            Term::App { functor, args } => {
                let f = self.symbol(functor);
                let args: Rc<[usize]> = args.iter().map(|a| self.load(a, env)).collect();
                self.heap.push(Cell::App(f, args));
                self.heap.len() - 1
            }
        }
    }

    fn instantiate(&mut self, p: &Pattern, base: usize) -> usize {
        match p {
            Pattern::Var(i) => base + i,
            Pattern::App(f, args) => {
                let args: Rc<[usize]> = args.iter().map(|a| self.instantiate(a, base)).collect();
                self.heap.push(Cell::App(*f, args));
                self.heap.len() - 1
            }
        }
    }

    fn deref(&self, mut c: usize) -> usize {
        while let Cell::Var(Some(next)) = self.heap[c] {
            c = next;
        }
        c
    }

    fn int(&self, c: usize) -> Option<i64> {
        match &self.heap[self.deref(c)] {
            Cell::App(f, args) if args.is_empty() => self.symbols[*f].parse().ok(),
            _ => None,
        }
    }

    fn read(&self, c: usize) -> Term {
        let c = self.deref(c);
        match &self.heap[c] {
            Cell::Var(_) => Term::var(format!("_G{c}")),
            Cell::App(f, args) => Term::app(self.symbols[*f].clone(), args.iter().map(|a| self.read(*a)).collect()),
        }
    }

    fn bind(&mut self, var: usize, to: usize) {
        self.heap[var] = Cell::Var(Some(to));
        self.trail.push(var);
    }

    fn undo(&mut self, trail: usize, heap: usize) {
        for v in self.trail.drain(trail..) {
            self.heap[v] = Cell::Var(None);
        }
        self.heap.truncate(heap);
    }

    fn occurs(&self, var: usize, c: usize) -> bool {
        let c = self.deref(c);
        match &self.heap[c] {
            Cell::Var(_) => c == var,
            Cell::App(_, args) => args.iter().any(|a| self.occurs(var, *a)),
        }
    }

    fn unify(&mut self, a: usize, b: usize) -> bool {
        let mut stack = vec![(a, b)];
        while let Some((a, b)) = stack.pop() {
            let (a, b) = (self.deref(a), self.deref(b));
            if a == b {
                continue;
            }
            match (&self.heap[a], &self.heap[b]) {
                (Cell::Var(_), _) => {
                    if self.occurs(a, b) {
                        return false;
                    }
                    self.bind(a, b);
                }
                (_, Cell::Var(_)) => {
                    if self.occurs(b, a) {
                        return false;
                    }
                    self.bind(b, a);
                }
                (Cell::App(f, xs), Cell::App(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return false;
                    }
                    stack.extend(xs.iter().copied().zip(ys.iter().copied()));
                }
            }
        }
        true
    }

    fn frame(&self, goals: Goals) -> Frame {
        let alts = match &goals {
            None => Alts::None,
            Some(g) if self.native.contains_key(&g.predicate) => {
                let mut unbound = Vec::new();
                for a in &g.args {
                    let c = self.deref(*a);
                    if matches!(self.heap[c], Cell::Var(_)) && !unbound.contains(&c) {
                        unbound.push(c);
                    }
                }
                Alts::Compare {
                    op: g.predicate,
                    unbound,
                }
            }
            Some(g) => Alts::Clauses(
                (0..self.clauses.len())
                    .filter(|i| self.clauses[*i].predicate == g.predicate && self.clauses[*i].head.len() == g.args.len())
                    .collect(),
            ),
        };
        Frame {
            goals,
            alts,
            next: 0,
            trail: self.trail.len(),
            heap: self.heap.len(),
        }
    }

    fn try_alt(&mut self, goal: &Goal, alts: &Alts, i: usize) -> Option<Goals> {
        match alts {
            Alts::None => None,
            Alts::Clauses(cs) => {
                let clauses = Rc::clone(&self.clauses);
                let clause = &clauses[cs[i]];
                let base = self.heap.len();
                for _ in 0..clause.vars {
                    self.new_var();
                }
                for (a, p) in goal.args.iter().zip(&clause.head) {
                    let b = self.instantiate(p, base);
                    if !self.unify(*a, b) {
                        return None;
                    }
                }
                let mut rest = goal.next.clone();
                for (pred, args) in clause.body.iter().rev() {
                    let args = args.iter().map(|p| self.instantiate(p, base)).collect();
                    rest = Some(Rc::new(Goal {
                        predicate: *pred,
                        args,
                        next: rest,
                    }));
                }
                Some(rest)
            }
            Alts::Compare { op, unbound } => {
                let base = ENUMERATED.count();
                let mut k = i;
                for v in unbound {
                    let value = ENUMERATED.start() + (k % base) as i64;
                    k /= base;
                    let f = self.symbol(&value.to_string());
                    self.heap.push(Cell::App(f, Rc::from(Vec::new())));
                    let c = self.heap.len() - 1;
                    self.bind(*v, c);
                }
                let vals: Option<Vec<i64>> = goal.args.iter().map(|a| self.int(*a)).collect();
                let holds = match (self.native[op], vals.as_deref()) {
                    ("lt", Some([a, b])) => a < b,
                    ("leq", Some([a, b])) => a <= b,
                    ("gr", Some([a, b])) => a > b,
                    ("geq", Some([a, b])) => a >= b,
                    _ => false,
                };
                holds.then(|| goal.next.clone())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CollectionKind {
    Multiset,
    Set,
}

/// A finite collection of ground terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundCollection {
    pub kind: CollectionKind,
    pub elements: Vec<Term>,
}

impl GroundCollection {
    pub fn multiset(elements: Vec<Term>) -> Self {
        debug_assert!(elements.iter().all(Term::is_ground));
        GroundCollection {
            kind: CollectionKind::Multiset,
            elements,
        }
    }

    pub fn set(elements: Vec<Term>) -> Self {
        debug_assert!(elements.iter().all(Term::is_ground));
        GroundCollection {
            kind: CollectionKind::Set,
            elements,
        }
    }

    fn counts(&self) -> BTreeMap<&Term, usize> {
        let mut out = BTreeMap::new();
        for e in &self.elements {
            *out.entry(e).or_insert(0) += 1;
        }
        out
    }
}

/// `⊨m lhs ≐ rhs` or `⊨m lhs ⊑ rhs`, with multiplicities.
pub fn models_m(lhs: &GroundCollection, rel: Relation, rhs: &GroundCollection) -> bool {
    debug_assert!(lhs.kind == CollectionKind::Multiset && rhs.kind == CollectionKind::Multiset);
    let (l, r) = (lhs.counts(), rhs.counts());
    match rel {
        Relation::Eq => l == r,
        Relation::Incl => l.iter().all(|(e, n)| r.get(e).copied().unwrap_or(0) >= *n),
    }
}

/// `⊨s lhs = rhs` or `⊨s lhs ⊆ rhs`; duplicates collapse.
pub fn models_s(lhs: &GroundCollection, rel: Relation, rhs: &GroundCollection) -> bool {
    debug_assert!(lhs.kind == CollectionKind::Set && rhs.kind == CollectionKind::Set);
    let (l, r) = (lhs.counts(), rhs.counts());
    let sub = |a: &BTreeMap<&Term, usize>, b: &BTreeMap<&Term, usize>| a.keys().all(|e| b.contains_key(e));
    match rel {
        Relation::Eq => sub(&l, &r) && sub(&r, &l),
        Relation::Incl => sub(&l, &r),
    }
}

/// θ applied to a ground term of an approximated type.
fn image(theta: &ApproxMap, t: &Term) -> Option<Formula> {
    let Term::App { functor, args } = t else { return None };
    let template = theta.ctor(functor)?;
    let args = args
        .iter()
        .zip(template.kinds())
        .map(|(a, kind)| match kind {
            ParamKind::Formula => image(theta, a).map(Arg::Formula),
            _ => Some(Arg::Term(a.clone())),
        })
        .collect::<Option<Vec<_>>>()?;
    template.apply(args).ok()
}

/// The items a ground term denotes under θ; in order for difference lists.
pub fn denotation(theta: &ApproxMap, t: &Term) -> Option<Vec<Term>> {
    let f = image(theta, t)?;
    let items = |atoms: Vec<MAtom>| {
        atoms
            .into_iter()
            .map(|a| match a {
                MAtom::Item(t) => Some(t),
                MAtom::Prop(_) => None,
            })
            .collect::<Option<Vec<_>>>()
    };
    match theta.mode {
        Mode::Multiset => {
            let ms = normalize_mset(&f).ok()?;
            items(ms.iter().flat_map(|(a, n)| std::iter::repeat(a.clone()).take(n)).collect())
        }
        Mode::Set => items(normalize_set(&f).ok()?.iter().cloned().collect()),
        Mode::Dlist => DListEncoding::from_formula(&f).map(|d| d.items),
    }
}

fn side_items(theta: &ApproxMap, side: &CollExpr, args: &[Term]) -> Option<Vec<Term>> {
    match side {
        CollExpr::Empty => Some(Vec::new()),
        CollExpr::Arg(i) => denotation(theta, args.get(i - 1)?),
        CollExpr::Singleton(i) => Some(vec![args.get(i - 1)?.clone()]),
        CollExpr::Union(a, b) => {
            let mut out = side_items(theta, a, args)?;
            out.extend(side_items(theta, b, args)?);
            Some(out)
        }
    }
}

/// Whether a ground atom satisfies its predicate's annotation. `None` when an
/// argument is not ground or has no denotation.
pub fn annotation_holds(theta: &ApproxMap, ann: &Annotation, args: &[Term]) -> Option<bool> {
    let AnnBody::Judgment { relation, lhs, rhs } = &ann.body else {
        return Some(true);
    };
    if !args.iter().all(Term::is_ground) {
        return None;
    }
    let (l, r) = (side_items(theta, lhs, args)?, side_items(theta, rhs, args)?);
    Some(match theta.mode {
        Mode::Multiset => models_m(&GroundCollection::multiset(l), *relation, &GroundCollection::multiset(r)),
        Mode::Set => models_s(&GroundCollection::set(l), *relation, &GroundCollection::set(r)),
        // a difference list only has an equality judgment, between sequences
        Mode::Dlist => l == r,
    })
}

/// Size bounds for random ground inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenBounds {
    pub max_len: usize,
    /// For collection types that are not list shaped, such as trees.
    pub max_nodes: usize,
    pub elements: std::ops::RangeInclusive<i64>,
}

impl Default for GenBounds {
    fn default() -> Self {
        GenBounds {
            max_len: 8,
            max_nodes: 10,
            elements: 0..=9,
        }
    }
}

const MAX_TYPE_NESTING: usize = 8;

/// A random ground term of type `ty`. Type variables stand for `int`.
pub fn gen_term(sig: &Signature, ty: &Type, bounds: &GenBounds, rng: &mut impl Rng) -> Result<Term, String> {
    gen_at(sig, ty, bounds, rng, 0)
}

fn gen_at(sig: &Signature, ty: &Type, bounds: &GenBounds, rng: &mut impl Rng, nesting: usize) -> Result<Term, String> {
    let head = match ty {
        Type::Var(_) => return Ok(Term::int(rng.gen_range(bounds.elements.clone()))),
        Type::Con(h, _) if h == "int" => return Ok(Term::int(rng.gen_range(bounds.elements.clone()))),
        Type::Con(h, _) => h.as_str(),
    };
    if nesting > MAX_TYPE_NESTING {
        return Err(format!("types nest too deeply at `{ty}`"));
    }
    let ctors: Vec<_> = sig.constructors_of(head).collect();
    let recursive_args = |d: &&crate::horn::Decl| d.ty.params.iter().filter(|p| p.head() == Some(head)).count();
    let (leaves, nodes): (Vec<_>, Vec<_>) = ctors.iter().partition(|d| recursive_args(d) == 0);
    if leaves.is_empty() {
        return Err(format!("type `{ty}` has no constructor without a `{head}` argument"));
    }
    let list_shaped = nodes.iter().all(|d| recursive_args(d) == 1);
    let max = if list_shaped { bounds.max_len } else { bounds.max_nodes };
    let size = if nodes.is_empty() { 0 } else { rng.gen_range(0..=max) };
    build(sig, head, size, &leaves, &nodes, bounds, rng, nesting)
}

#[allow(clippy::too_many_arguments)]
fn build(
    sig: &Signature,
    head: &str,
    size: usize,
    leaves: &[&crate::horn::Decl],
    nodes: &[&crate::horn::Decl],
    bounds: &GenBounds,
    rng: &mut impl Rng,
    nesting: usize,
) -> Result<Term, String> {
    let decl = if size == 0 { leaves.choose(rng) } else { nodes.choose(rng) }.expect("nonempty");
    let slots: Vec<usize> = (0..decl.ty.params.len())
        .filter(|i| decl.ty.params[*i].head() == Some(head))
        .collect();
    let mut sizes = vec![0usize; slots.len()];
    for _ in 1..size {
        sizes[rng.gen_range(0..slots.len())] += 1;
    }
    let mut args = Vec::with_capacity(decl.ty.params.len());
    for (i, p) in decl.ty.params.iter().enumerate() {
        let arg = match slots.iter().position(|s| *s == i) {
            Some(k) => build(sig, head, sizes[k], leaves, nodes, bounds, rng, nesting)?,
            None => gen_at(sig, p, bounds, rng, nesting + 1)?,
        };
        args.push(arg);
    }
    Ok(Term::app(decl.name.clone(), args))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub trials: usize,
    pub seed: u64,
    pub bounds: GenBounds,
    pub step_limit: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            trials: 100,
            seed: 42,
            bounds: GenBounds::default(),
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("cannot test `{predicate}`: {reason}")]
    Unsupported { predicate: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub query: String,
    /// The answer atom that violates the annotation.
    pub answer: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmpiricalReport {
    pub predicate: String,
    /// 1-based argument positions that were given generated inputs.
    pub inputs: Vec<usize>,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Queries with no violation among their answers, but which hit a search
    /// limit or produced a non-ground answer.
    pub inconclusive: usize,
    /// The first few failures.
    pub counterexamples: Vec<Counterexample>,
}

const PROBES: u64 = 6;
const PROBE_STEP_LIMIT: usize = 1_000;
const KEPT_COUNTEREXAMPLES: usize = 10;

fn make_query(
    p: &Program,
    pred: &str,
    inputs: &[usize],
    bounds: &GenBounds,
    rng: &mut impl Rng,
    limit: usize,
) -> Result<Query, String> {
    let decl = p.signature.predicate(pred).ok_or_else(|| "not a declared predicate".to_string())?;
    let mut args = Vec::new();
    for (i, ty) in decl.ty.params.iter().enumerate() {
        if inputs.contains(&i) {
            args.push(gen_term(&p.signature, ty, bounds, rng)?);
        } else {
            args.push(Term::var(format!("Out{}", i + 1)));
        }
    }
    Ok(Query::new(pred, args).with_limit(limit))
}

/// Choose which arguments to generate. Each candidate set is probed with a few
/// queries, the first with minimal inputs. A candidate is out if a probe leaves an
/// answer non-ground or no probe answers at all. The rest are ranked by how many
/// probes finish within the limits, then by how many answer, then smaller sets first.
pub fn infer_inputs(p: &Program, pred: &str, opts: &OracleOptions) -> Result<Vec<usize>, String> {
    let arity = p
        .signature
        .predicate(pred)
        .ok_or_else(|| "not a declared predicate".to_string())?
        .arity();
    let mut candidates: Vec<Vec<usize>> = (1..(1u32 << arity))
        .map(|mask| (0..arity).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    candidates.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let minimal = GenBounds {
        max_len: 0,
        max_nodes: 0,
        ..opts.bounds.clone()
    };
    let mut best: Option<((u64, u64), Vec<usize>)> = None;
    let mut last_err = "no argument choice gives queries with ground answers".to_string();
    'candidates: for inputs in candidates {
        let (mut finished, mut answered) = (0, 0);
        for k in 0..PROBES {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(u64::MAX - k);
            let bounds = if k == 0 { &minimal } else { &opts.bounds };
            let limit = opts.step_limit.min(PROBE_STEP_LIMIT);
            let q = match make_query(p, pred, &inputs, bounds, &mut rng, limit) {
                Ok(q) => q,
                Err(e) => {
                    last_err = e;
                    continue 'candidates;
                }
            };
            let r = sld_search(p, &q);
            if !r.answers.iter().all(|a| a.values().all(Term::is_ground)) {
                continue 'candidates;
            }
            finished += u64::from(r.stopped.is_none());
            answered += u64::from(!r.answers.is_empty());
        }
        let score = (finished, answered);
        if answered > 0 && best.as_ref().map_or(true, |(s, _)| score > *s) {
            best = Some((score, inputs));
        }
    }
    best.map(|(_, inputs)| inputs).ok_or(last_err)
}

enum Outcome {
    Passed,
    Failed(Counterexample),
    Inconclusive,
}

/// Run `opts.trials` random queries for `predicate` and check every answer
/// against its annotation. Trials are seeded independently, so the report does
/// not depend on how they are scheduled.
pub fn empirical_check(
    p: &Program,
    theta: &ApproxMap,
    predicate: &str,
    opts: &OracleOptions,
) -> Result<EmpiricalReport, OracleError> {
    let unsupported = |reason: String| OracleError::Unsupported {
        predicate: predicate.to_string(),
        reason,
    };
    let ann = p
        .annotation(predicate)
        .filter(|a| matches!(a.body, AnnBody::Judgment { .. }))
        .ok_or_else(|| unsupported("it has no judgment annotation".into()))?;
    let index = p.annotations.iter().position(|a| a.predicate == predicate).unwrap_or(0) as u64;
    let inputs = infer_inputs(p, predicate, opts).map_err(unsupported)?;

    let outcomes: Vec<Result<Outcome, String>> = (0..opts.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(index));
            rng.set_stream(trial);
            let q = make_query(p, predicate, &inputs, &opts.bounds, &mut rng, opts.step_limit)?;
            // answers found before a limit are still answers
            let r = sld_search(p, &q);
            let mut complete = r.stopped.is_none();
            for answer in r.answers {
                let args: Vec<Term> = q
                    .args
                    .iter()
                    .map(|a| a.subst(&|v| answer.get(v).cloned()))
                    .collect();
                match annotation_holds(theta, ann, &args) {
                    Some(true) => {}
                    Some(false) => {
                        let atom = Query::new(predicate, args);
                        return Ok(Outcome::Failed(Counterexample {
                            query: q.to_string(),
                            answer: atom.to_string(),
                        }));
                    }
                    None => complete = false,
                }
            }
            Ok(if complete { Outcome::Passed } else { Outcome::Inconclusive })
        })
        .collect();

    let mut report = EmpiricalReport {
        predicate: predicate.to_string(),
        inputs: inputs.iter().map(|i| i + 1).collect(),
        trials: opts.trials,
        passed: 0,
        failed: 0,
        inconclusive: 0,
        counterexamples: Vec::new(),
    };
    for o in outcomes {
        match o.map_err(unsupported)? {
            Outcome::Passed => report.passed += 1,
            Outcome::Inconclusive => report.inconclusive += 1,
            Outcome::Failed(c) => {
                report.failed += 1;
                if report.counterexamples.len() < KEPT_COUNTEREXAMPLES {
                    report.counterexamples.push(c);
                }
            }
        }
    }
    Ok(report)
}

/// `empirical_check` for every predicate that has clauses and a judgment annotation.
pub fn check_program(p: &Program, theta: &ApproxMap, opts: &OracleOptions) -> Result<Vec<EmpiricalReport>, OracleError> {
    p.annotations
        .iter()
        .filter(|a| matches!(a.body, AnnBody::Judgment { .. }))
        .filter(|a| p.clauses_for(&a.predicate).next().is_some())
        .map(|a| empirical_check(p, theta, &a.predicate, opts))
        .collect()
}

/// A program with one clause head changed to drop or duplicate a list element.
#[derive(Clone, Debug)]
pub struct Mutant {
    pub description: String,
    pub program: Program,
}

/// Every mutant obtained by editing a `cons(X, T)` argument in the head of a
/// clause for one of `predicates`: `T` drops the element, `cons(X, cons(X, T))`
/// duplicates it.
pub fn mutants(p: &Program, predicates: &[&str]) -> Vec<Mutant> {
    let mut out = Vec::new();
    for (ci, clause) in p.clauses.iter().enumerate() {
        if !predicates.contains(&clause.head.predicate.as_str()) {
            continue;
        }
        for (ai, arg) in clause.head.args.iter().enumerate() {
            let Term::App { functor, args } = arg else { continue };
            if functor != "cons" || args.len() != 2 {
                continue;
            }
            let dropped = args[1].clone();
            let duplicated = Term::app("cons", vec![args[0].clone(), arg.clone()]);
            for (what, replacement) in [("drop", dropped), ("duplicate", duplicated)] {
                let mut head = clause.head.clone();
                head.args[ai] = replacement;
                let mut program = p.clone();
                program.clauses[ci] = HornClause::new(head, clause.body.clone(), clause.span);
                out.push(Mutant {
                    description: format!(
                        "{what} the element in argument {} of clause {} (`{clause}`)",
                        ai + 1,
                        ci + 1
                    ),
                    program,
                });
            }
        }
    }
    out
}
