mod common;

use collana::approx::{build_theta, ApproxMap, ThetaOptions};
use collana::horn::{parse_annotations, parse_program, Program, Relation};
use collana::kernel::Term;
use collana::oracle::{
    check_program, empirical_check, infer_inputs, models_m, models_s, mutants, sld_search, sld_solve, GroundCollection,
    OracleOptions, Query, SolveError,
};
use common::testdata;
use proptest::prelude::*;

fn load(stem: &str) -> (Program, ApproxMap) {
    let p = parse_program(&testdata(&format!("{stem}.hc"))).unwrap();
    let anns = parse_annotations(&testdata(&format!("{stem}.ca")), &p.signature).unwrap();
    let p = p.with_annotations(anns, None);
    let theta = build_theta(&p, ThetaOptions::default()).unwrap();
    (p, theta)
}

fn list(items: &[&str]) -> Term {
    items
        .iter()
        .rev()
        .fold(Term::constant("nil"), |acc, x| Term::app("cons", vec![Term::constant(*x), acc]))
}

fn ints(xs: &[i64]) -> Vec<Term> {
    xs.iter().map(|x| Term::int(*x)).collect()
}

#[test]
fn sort_two_elements() {
    let (p, _) = load("sort");
    let q = Query::new("sort", vec![list(&["2", "1"]), Term::var("S")]);
    let answers = sld_solve(&p, &q).unwrap();
    assert_eq!(answers.len(), 1);
    assert_eq!(answers[0]["S"], list(&["1", "2"]));
}

#[test]
fn append_two_singletons() {
    let (p, _) = load("sort");
    let q = Query::new("append", vec![list(&["a"]), list(&["b"]), Term::var("X")]);
    let answers = sld_solve(&p, &q).unwrap();
    assert_eq!(answers.len(), 1);
    assert_eq!(answers[0]["X"], list(&["a", "b"]));
}

#[test]
fn open_append_exceeds_a_small_limit() {
    let (p, _) = load("sort");
    let q = Query::new("append", vec![Term::var("X"), Term::var("Y"), Term::var("Z")]).with_limit(1);
    assert_eq!(sld_solve(&p, &q), Err(SolveError::DepthExceeded(1)));
    // unbounded enumeration also stops, keeping what it found
    let q = Query::new("append", vec![Term::var("X"), Term::var("Y"), Term::var("Z")]);
    let r = sld_search(&p, &q);
    assert!(r.stopped.is_some());
    assert_eq!(r.answers[0]["X"], list(&[]));
}

#[test]
fn splitting_enumerates_in_clause_order() {
    let (p, _) = load("sort");
    let q = Query::new("append", vec![Term::var("X"), Term::var("Y"), list(&["a", "b"])]);
    let answers = sld_solve(&p, &q).unwrap();
    let xs: Vec<Term> = answers.iter().map(|a| a["X"].clone()).collect();
    assert_eq!(xs, vec![list(&[]), list(&["a"]), list(&["a", "b"])]);
}

#[test]
fn occurs_check_is_on() {
    let (p, _) = load("sort");
    // append(nil, K, K) cannot bind K to cons(a, K)
    let q = Query::new(
        "append",
        vec![list(&[]), Term::var("K"), Term::app("cons", vec![Term::constant("a"), Term::var("K")])],
    );
    assert_eq!(sld_solve(&p, &q).unwrap(), vec![]);
}

#[test]
fn comparisons_are_native_and_enumerate() {
    let (p, _) = load("sort");
    let q = Query::new("leq", vec![Term::int(3), Term::int(5)]);
    assert_eq!(sld_solve(&p, &q).unwrap().len(), 1);
    let q = Query::new("gr", vec![Term::int(3), Term::int(5)]);
    assert!(sld_solve(&p, &q).unwrap().is_empty());
    let q = Query::new("gr", vec![Term::var("X"), Term::int(6)]);
    let xs: Vec<Term> = sld_solve(&p, &q).unwrap().into_iter().map(|a| a["X"].clone()).collect();
    assert_eq!(xs, ints(&[7, 8, 9]));
}

#[test]
fn unknown_predicate_is_an_error() {
    let (p, _) = load("sort");
    let q = Query::new("sort", vec![Term::var("X")]);
    assert!(matches!(sld_solve(&p, &q), Err(SolveError::UnknownPredicate { .. })));
}

#[test]
fn semantic_relations() {
    let m = |xs: &[i64]| GroundCollection::multiset(ints(xs));
    let s = |xs: &[i64]| GroundCollection::set(ints(xs));
    assert!(models_m(&m(&[1, 2, 2]), Relation::Eq, &m(&[2, 1, 2])));
    assert!(models_m(&m(&[1]), Relation::Incl, &m(&[1, 2])));
    assert!(!models_m(&m(&[1, 1]), Relation::Incl, &m(&[1])));
    assert!(models_s(&s(&[1, 2, 2]), Relation::Eq, &s(&[1, 2])));
    assert!(models_s(&s(&[]), Relation::Incl, &s(&[1])));
    assert!(!models_s(&s(&[1, 3]), Relation::Incl, &s(&[1, 2])));
}

fn count(xs: &[i64], x: i64) -> usize {
    xs.iter().filter(|y| **y == x).count()
}

proptest! {
    #[test]
    fn relations_agree_with_counting(a in prop::collection::vec(0i64..4, 0..6), b in prop::collection::vec(0i64..4, 0..6)) {
        let incl = (0..4).all(|x| count(&a, x) <= count(&b, x));
        let eq = (0..4).all(|x| count(&a, x) == count(&b, x));
        let (ma, mb) = (GroundCollection::multiset(ints(&a)), GroundCollection::multiset(ints(&b)));
        prop_assert_eq!(models_m(&ma, Relation::Incl, &mb), incl);
        prop_assert_eq!(models_m(&ma, Relation::Eq, &mb), eq);
        let sincl = (0..4).all(|x| count(&a, x) == 0 || count(&b, x) > 0);
        let seq = sincl && (0..4).all(|x| count(&b, x) == 0 || count(&a, x) > 0);
        let (sa, sb) = (GroundCollection::set(ints(&a)), GroundCollection::set(ints(&b)));
        prop_assert_eq!(models_s(&sa, Relation::Incl, &sb), sincl);
        prop_assert_eq!(models_s(&sa, Relation::Eq, &sb), seq);
    }
}

#[test]
fn inferred_inputs() {
    let (p, _) = load("sort");
    let opts = OracleOptions::default();
    assert_eq!(infer_inputs(&p, "sort", &opts).unwrap(), vec![0]);
    assert_eq!(infer_inputs(&p, "split", &opts).unwrap(), vec![0, 1]);
    assert_eq!(infer_inputs(&p, "append", &opts).unwrap(), vec![2]);
    let (t, _) = load("traverse");
    assert_eq!(infer_inputs(&t, "traverse", &opts).unwrap(), vec![0]);
}

#[test]
fn sort_permutes_on_random_lists() {
    let (p, theta) = load("sort");
    let r = empirical_check(&p, &theta, "sort", &OracleOptions::default()).unwrap();
    assert_eq!((r.passed, r.failed, r.inconclusive), (100, 0, 0), "{r:?}");
}

#[test]
fn dedup_split_keeps_every_element() {
    let (p, theta) = load("split_dedup");
    let reports = check_program(&p, &theta, &OracleOptions::default()).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].predicate, "split");
    assert_eq!(reports[0].failed, 0);
    assert_eq!(reports[0].passed, 100);
}

#[test]
fn traverse_reads_trees_in_order() {
    let (p, theta) = load("traverse");
    let r = empirical_check(&p, &theta, "traverse", &OracleOptions::default()).unwrap();
    assert_eq!((r.passed, r.failed), (100, 0), "{r:?}");
}

#[test]
fn dropping_an_appended_element_is_caught() {
    let (p, theta) = load("sort");
    let all = mutants(&p, &["append"]);
    assert_eq!(all.len(), 4);
    let m = all.iter().find(|m| m.description.starts_with("drop the element in argument 3")).unwrap();
    let r = empirical_check(&m.program, &theta, "append", &OracleOptions::default()).unwrap();
    assert!(r.failed > 0, "{r:?}");
    assert!(!r.counterexamples.is_empty());
}

#[test]
fn mutation_sites_in_append_and_split() {
    let (p, _) = load("sort");
    assert_eq!(mutants(&p, &["append", "split"]).len(), 12);
}

#[test]
fn reports_are_deterministic() {
    let (p, theta) = load("sort");
    let opts = OracleOptions {
        trials: 30,
        seed: 9,
        ..OracleOptions::default()
    };
    let m = &mutants(&p, &["split"])[0];
    let a = check_program(&m.program, &theta, &opts).unwrap();
    let b = check_program(&m.program, &theta, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn predicates_without_a_judgment_are_unsupported() {
    let (p, theta) = load("sort");
    assert!(empirical_check(&p, &theta, "leq", &OracleOptions::default()).is_err());
}
