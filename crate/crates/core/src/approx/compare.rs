use std::collections::{BTreeMap, BTreeSet};

use super::{recognize, Judgment};
use crate::kernel::{Arg, Formula, MAtom, Term};

/// A statement `∀x̄ [H₁ & … & Hₙ ⇒ H₀]` read up to presentation: the
/// quantifier prefix as a set, curried and conjoined hypotheses flattened,
/// `1` hypotheses dropped, and each judgment in normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct StatementForm {
    pub bound: Vec<String>,
    pub hypotheses: Vec<Judgment>,
    pub goal: Judgment,
}

impl StatementForm {
    pub fn of(f: &Formula) -> Option<StatementForm> {
        let mut prefix = Vec::new();
        let mut body = f;
        while let Formula::Forall(x, sort, b) = body {
            prefix.push((x.clone(), *sort, &**b));
            body = b;
        }
        // with no hypotheses a dlist goal's own ∀W∀w merges into the prefix
        if !matches!(body, Formula::Implies(..)) && recognize(body).is_none() && prefix.len() >= 2 {
            let (x, sort, inner) = &prefix[prefix.len() - 2];
            let whole = Formula::Forall(x.clone(), *sort, Box::new((*inner).clone()));
            if let Some(goal @ Judgment::DlistEq { .. }) = recognize(&whole) {
                let mut bound: Vec<String> = Vec::new();
                for (x, _, _) in &prefix[..prefix.len() - 2] {
                    if !bound.contains(x) {
                        bound.push(x.clone());
                    }
                }
                return Some(StatementForm {
                    bound,
                    hypotheses: Vec::new(),
                    goal,
                });
            }
        }
        let mut bound: Vec<String> = Vec::new();
        for (x, _, _) in &prefix {
            if !bound.contains(x) {
                bound.push(x.clone());
            }
        }
        let mut hyps = Vec::new();
        while let Formula::Implies(h, g) = body {
            flatten_with(h, &mut hyps);
            body = g;
        }
        let goal = recognize(body)?;
        let mut hypotheses = Vec::new();
        for h in hyps {
            let j = recognize(h)?;
            if !j.is_trivial() {
                hypotheses.push(j);
            }
        }
        Some(StatementForm {
            bound,
            hypotheses,
            goal,
        })
    }

    fn key(&self, rename: &BTreeMap<String, String>) -> (Vec<String>, String) {
        let mut hyps: Vec<String> = self.hypotheses.iter().map(|h| judgment_key(h, rename)).collect();
        hyps.sort();
        (hyps, judgment_key(&self.goal, rename))
    }
}

fn flatten_with<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::With(a, b) => {
            flatten_with(a, out);
            flatten_with(b, out);
        }
        other => out.push(other),
    }
}

fn rename_atom(a: &MAtom, rename: &BTreeMap<String, String>) -> MAtom {
    match a {
        MAtom::Item(t) => MAtom::Item(t.subst(&|v| rename.get(v).map(|n| Term::var(n.clone())))),
        MAtom::Prop(p) => MAtom::Prop(rename.get(p).cloned().unwrap_or_else(|| p.clone())),
    }
}

fn rename_formula(f: &Formula, rename: &BTreeMap<String, String>) -> Formula {
    let item_names: BTreeSet<String> = f.item_terms().iter().flat_map(Term::vars).collect();
    let map: BTreeMap<String, Arg> = rename
        .iter()
        .map(|(from, to)| {
            let arg = if item_names.contains(from) {
                Arg::Term(Term::var(to.clone()))
            } else {
                Arg::Formula(Formula::prop(to.clone()))
            };
            (from.clone(), arg)
        })
        .collect();
    f.subst(&map).unwrap_or_else(|_| f.clone())
}

fn judgment_key(j: &Judgment, rename: &BTreeMap<String, String>) -> String {
    let r = |a: &MAtom| rename_atom(a, rename);
    let renamed = match j {
        Judgment::Trivial => Judgment::Trivial,
        Judgment::MsEq(s, t) => Judgment::MsEq(s.map_atoms(r), t.map_atoms(r)),
        Judgment::MsIncl(s, t) => Judgment::MsIncl(s.map_atoms(r), t.map_atoms(r)),
        Judgment::SetEq(s, t) => Judgment::SetEq(s.map_atoms(r), t.map_atoms(r)),
        Judgment::SetIncl(s, t) => Judgment::SetIncl(s.map_atoms(r), t.map_atoms(r)),
        Judgment::DlistEq { .. } => {
            let f = rename_formula(&j.to_formula(), rename).canonical();
            return format!("dlist {f}");
        }
    };
    format!("{} {renamed}", renamed.relation_name())
}

/// Whether two statements agree up to presentation and a bijective renaming of
/// their universally bound variables.
pub fn same_statement(a: &Formula, b: &Formula) -> bool {
    let (Some(fa), Some(fb)) = (StatementForm::of(a), StatementForm::of(b)) else {
        return false;
    };
    if fa.bound.len() != fb.bound.len() || fa.hypotheses.len() != fb.hypotheses.len() {
        return false;
    }
    let target = fb.key(&BTreeMap::new());
    let n = fa.bound.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let try_perm = |perm: &[usize]| {
        let rename: BTreeMap<String, String> = fa
            .bound
            .iter()
            .zip(perm)
            .map(|(x, &i)| (x.clone(), fb.bound[i].clone()))
            .collect();
        fa.key(&rename) == target
    };
    // identity first, then the names in common fixed, then everything
    if let Some(p) = matching_names(&fa.bound, &fb.bound) {
        if try_perm(&p) {
            return true;
        }
    }
    if n > 8 {
        return false;
    }
    heap_permutations(&mut perm, n, &mut |p| try_perm(p))
}

fn matching_names(a: &[String], b: &[String]) -> Option<Vec<usize>> {
    let mut used = vec![false; b.len()];
    let mut out = vec![usize::MAX; a.len()];
    for (i, x) in a.iter().enumerate() {
        if let Some(j) = b.iter().position(|y| y == x) {
            out[i] = j;
            used[j] = true;
        }
    }
    let mut free = (0..b.len()).filter(|j| !used[*j]);
    for slot in out.iter_mut().filter(|s| **s == usize::MAX) {
        *slot = free.next()?;
    }
    Some(out)
}

/// Heap's algorithm; stops early when `f` returns true.
fn heap_permutations(perm: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k <= 1 {
        return f(perm);
    }
    for i in 0..k {
        if heap_permutations(perm, k - 1, f) {
            return true;
        }
        let j = if k % 2 == 0 { i } else { 0 };
        if i + 1 < k {
            perm.swap(j, k - 1);
        }
    }
    false
}
