#![allow(dead_code)]

use collana::horn::Relation;
use collana::kernel::{MAtom, MsExpr};
use collana::mset::{MsRewriteRule, MsSequent};
use rand::Rng;

pub fn testdata(name: &str) -> String {
    let path = format!("{}/testdata/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn ms(atoms: &[&str]) -> MsExpr {
    atoms.iter().map(|a| MAtom::prop(*a)).collect()
}

fn random_ms(rng: &mut impl Rng, alphabet: &[MAtom], max: usize) -> MsExpr {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone()).collect()
}

/// Alphabet of at most 5 atoms, at most 6 rules with sides of at most 3 atoms,
/// start and target of at most 6 atoms.
pub fn random_ms_sequent(rng: &mut impl Rng) -> MsSequent {
    let n = rng.gen_range(1..=5);
    let alphabet: Vec<MAtom> = (0..n).map(|i| MAtom::prop(format!("a{i}"))).collect();
    let rules = (0..rng.gen_range(0..=6))
        .map(|origin| MsRewriteRule {
            lhs: random_ms(rng, &alphabet, 3),
            rhs: random_ms(rng, &alphabet, 3),
            slack: rng.gen_bool(0.2),
            origin,
        })
        .collect();
    MsSequent {
        rules,
        start: random_ms(rng, &alphabet, 6),
        target: random_ms(rng, &alphabet, 6),
        goal_relation: if rng.gen_bool(0.5) { Relation::Eq } else { Relation::Incl },
    }
}

pub fn set(atoms: &[&str]) -> collana::kernel::SetExpr {
    atoms.iter().map(|a| MAtom::prop(*a)).collect()
}

fn random_set(rng: &mut impl Rng, alphabet: &[MAtom], max: usize) -> collana::kernel::SetExpr {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone()).collect()
}

/// Alphabet of at most 6 atoms and at most 8 clauses.
pub fn random_set_sequent(rng: &mut impl Rng) -> collana::set::SetSequent {
    let n = rng.gen_range(1..=6);
    let alphabet: Vec<MAtom> = (0..n).map(|i| MAtom::prop(format!("a{i}"))).collect();
    let clauses = (0..rng.gen_range(0..=8))
        .map(|origin| collana::set::SetClause {
            lhs_atoms: random_set(rng, &alphabet, 3),
            rhs_atoms: random_set(rng, &alphabet, 3),
            origin,
        })
        .collect();
    collana::set::SetSequent {
        clauses,
        start: random_set(rng, &alphabet, 4),
        target: random_set(rng, &alphabet, 4),
    }
}
