mod common;

use collana::approx::{build_theta, generate_vcs, recognize, Judgment, ThetaOptions};
use collana::horn::{parse_annotations, parse_program};
use collana::kernel::syntax::parse_formula;
use collana::set::{compile_set_hypotheses, prove_set, set_fixpoint_oracle, SetClause, SetSequent};
use collana::Verdict;
use common::{random_set_sequent, set, testdata};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn clause(lhs: &[&str], rhs: &[&str]) -> SetClause {
    SetClause {
        lhs_atoms: set(lhs),
        rhs_atoms: set(rhs),
        origin: 0,
    }
}

fn judgment(src: &str) -> Judgment {
    recognize(&parse_formula(src).unwrap()).unwrap()
}

#[test]
fn hypotheses_compile_to_clauses() {
    let c = compile_set_hypotheses(&[judgment("?R -o ?(item(X) (+) S (+) B)")]);
    assert_eq!(c.len(), 1);
    assert_eq!(c[0].lhs_atoms, set(&["R"]));
    assert_eq!(c[0].rhs_atoms.len(), 3);
    let eq = compile_set_hypotheses(&[judgment("?A o-o ?B")]);
    assert_eq!(eq, vec![clause(&["A"], &["B"]), clause(&["B"], &["A"])]);
    assert!(compile_set_hypotheses(&[]).is_empty());
}

#[test]
fn oracle_examples() {
    let full = SetSequent {
        clauses: vec![clause(&["a"], &["b", "c"]), clause(&["b"], &[]), clause(&["c"], &[])],
        start: set(&["a"]),
        target: set(&[]),
    };
    assert_eq!(set_fixpoint_oracle(&full), Verdict::Proved);
    let cut = SetSequent {
        clauses: vec![clause(&["a"], &["b", "c"])],
        ..full.clone()
    };
    assert_eq!(set_fixpoint_oracle(&cut), Verdict::Refuted);
    let empty_start = SetSequent {
        start: set(&[]),
        ..cut.clone()
    };
    assert_eq!(set_fixpoint_oracle(&empty_start), Verdict::Proved);

    assert_eq!(prove_set(&full).status, Verdict::Proved);
    assert_eq!(prove_set(&cut).status, Verdict::Refuted);
    assert_eq!(prove_set(&empty_start).status, Verdict::Proved);
}

#[test]
fn target_atom_needs_no_clause() {
    let seq = SetSequent {
        clauses: vec![],
        start: set(&["a"]),
        target: set(&["a"]),
    };
    assert_eq!(prove_set(&seq).status, Verdict::Proved);
}

#[test]
fn cycles_do_not_prove() {
    let seq = SetSequent {
        clauses: vec![clause(&["a"], &["a"])],
        start: set(&["a"]),
        target: set(&["b"]),
    };
    let r = prove_set(&seq);
    assert_eq!(r.status, Verdict::Refuted);
    let why = r.refutation.unwrap();
    assert_eq!(why.explored, std::collections::BTreeSet::from([collana::kernel::MAtom::prop("a")]));
}

#[test]
fn dedup_split_clause_proves() {
    let p = parse_program(&testdata("split_dedup.hc")).unwrap();
    let anns = parse_annotations(&testdata("split_dedup.ca"), &p.signature).unwrap();
    let p = p.with_annotations(anns, None);
    let theta = build_theta(&p, ThetaOptions::default()).unwrap();
    for vc in generate_vcs(&p, &theta).unwrap() {
        for seq in SetSequent::from_vc(&vc).unwrap() {
            let r = prove_set(&seq);
            assert_eq!(r.status, Verdict::Proved, "{vc}");
            let tree = r.derivation.unwrap().render(&seq);
            assert!(tree.starts_with("Γ; "), "{tree}");
        }
    }
}

#[test]
fn derivation_is_well_founded() {
    let seq = SetSequent {
        clauses: vec![clause(&["R"], &["X", "S", "B"])],
        start: set(&["X", "R"]),
        target: set(&["X", "S", "B"]),
    };
    let r = prove_set(&seq);
    let text = r.derivation.unwrap().render(&seq);
    assert!(text.contains("BC with ?{R} -o ?{B, S, X}"), "{text}");
    assert_eq!(text.matches("⊕R").count(), 4, "{text}");
}

#[test]
fn random_sequents_agree_with_kleene_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let seq = random_set_sequent(&mut rng);
        let r = prove_set(&seq);
        assert!(r.transitions <= 3 * r.alphabet_size.max(1));
        assert_eq!(r.status, set_fixpoint_oracle(&seq), "{seq:?}");
    }
}

#[test]
fn adding_a_clause_keeps_proofs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let seq = random_set_sequent(&mut rng);
        let extra = random_set_sequent(&mut rng);
        let before = prove_set(&seq).status;
        let mut more = seq.clone();
        more.clauses.extend(extra.clauses);
        if before == Verdict::Proved {
            assert_eq!(prove_set(&more).status, Verdict::Proved);
        }
    }
}

#[test]
fn equality_goal_is_two_inclusions() {
    let p = parse_program(&testdata("split_dedup.hc")).unwrap();
    let anns = parse_annotations(
        "approx list as set.\npred append(X,Y,Z): X + Y = Z.\npred split(U,X,Y,Z): X = {U} + Y + Z.\n\
         pred sort(X,Y): X = Y.\npred lt(X,Y): true.\npred gr(X,Y): true.",
        &p.signature,
    )
    .unwrap();
    let p = p.with_annotations(anns, None);
    let theta = build_theta(&p, ThetaOptions::default()).unwrap();
    let vcs = generate_vcs(&p, &theta).unwrap();
    for vc in &vcs {
        let seqs = SetSequent::from_vc(vc).unwrap();
        assert_eq!(seqs.len(), 2);
        assert_eq!(seqs[0].start, seqs[1].target);
        for s in &seqs {
            assert_eq!(prove_set(s).status, set_fixpoint_oracle(s));
        }
    }
    // with nothing to split, the pivot is in the union but not in the list
    let base = SetSequent::from_vc(&vcs[0]).unwrap();
    assert_eq!(prove_set(&base[0]).status, Verdict::Proved);
    assert_eq!(prove_set(&base[1]).status, Verdict::Refuted);
}
