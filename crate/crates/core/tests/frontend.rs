use collana::horn::{
    parse_annotations, parse_program, validate, AnnBody, Annotation, CollExpr, DiagCode, Mode,
    Program, Relation, Span,
};

fn testdata(name: &str) -> String {
    let path = format!("{}/testdata/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn load(hc: &str, ca: &str) -> Program {
    let p = parse_program(&testdata(hc)).expect("program parses");
    let anns = parse_annotations(&testdata(ca), &p.signature).expect("annotations parse");
    p.with_annotations(anns, None)
}

#[test]
fn sort_program_validates() {
    let p = load("sort.hc", "sort.ca");
    assert_eq!(p.clauses.len(), 7);
    assert_eq!(p.mode, Mode::Multiset);
    assert_eq!(validate(&p), vec![]);
}

#[test]
fn split_annotation_is_a_union_equation() {
    let p = parse_program(&testdata("sort.hc")).unwrap();
    let f = parse_annotations(
        "approx list as multiset.\npred split(X,L,S,B): S + B = L.",
        &p.signature,
    )
    .unwrap();
    let a = &f.annotations[0];
    assert_eq!(a.predicate, "split");
    assert_eq!(a.arity(), 4);
    assert_eq!(
        a.body,
        AnnBody::Judgment {
            relation: Relation::Eq,
            lhs: CollExpr::union(CollExpr::Arg(3), CollExpr::Arg(4)),
            rhs: CollExpr::Arg(2),
        }
    );
}

#[test]
fn trivial_annotation() {
    let p = parse_program(&testdata("sort.hc")).unwrap();
    let f = parse_annotations("approx list as multiset.\npred leq(_,_): true.", &p.signature).unwrap();
    assert_eq!(f.annotations[0].body, AnnBody::Trivial);
    assert_eq!(f.annotations[0].arity(), 2);
}

#[test]
fn inclusion_with_singleton_associates_right() {
    let p = parse_program(&testdata("sort.hc")).unwrap();
    let f = parse_annotations(
        "approx list as set.\npred split(X,L,S,B): L <= {X} + S + B.",
        &p.signature,
    )
    .unwrap();
    assert_eq!(f.mode, Some(Mode::Set));
    assert_eq!(
        f.annotations[0].body,
        AnnBody::Judgment {
            relation: Relation::Incl,
            lhs: CollExpr::Arg(2),
            rhs: CollExpr::union(
                CollExpr::Singleton(1),
                CollExpr::union(CollExpr::Arg(3), CollExpr::Arg(4))
            ),
        }
    );
}

#[test]
fn annotation_errors_are_named() {
    let p = parse_program(&testdata("sort.hc")).unwrap();
    let code = |src: &str| {
        let full = format!("approx list as multiset.\n{src}");
        parse_annotations(&full, &p.signature).unwrap_err()[0].code
    };
    assert_eq!(code("pred nope(X): X = X."), DiagCode::UnknownPredicate);
    assert_eq!(code("pred sort(X): X = X."), DiagCode::ArityMismatch);
    assert_eq!(code("pred split(X,L,S,B): X = L."), DiagCode::ElementAsCollection);
    assert_eq!(code("pred split(X,L,S,B): {L} = L."), DiagCode::CollectionAsElement);
    assert_eq!(code("pred sort(X,Y): X = Z."), DiagCode::UnknownParameter);
    assert_eq!(code("pred sort(X,Y) X = Y."), DiagCode::Syntax);
    let conflict = parse_annotations("approx list as multiset.\napprox list as set.", &p.signature);
    assert_eq!(conflict.unwrap_err()[0].code, DiagCode::ConflictingModes);
}

#[test]
fn undeclared_predicate_is_the_only_diagnostic() {
    let src = format!("{}\nsort(X, Y) :- foo(X).\n", testdata("sort.hc"));
    let p = parse_program(&src).unwrap();
    let anns = parse_annotations(&testdata("sort.ca"), &p.signature).unwrap();
    let diags = validate(&p.with_annotations(anns, None));
    assert_eq!(diags.len(), 1, "{diags:?}");
    assert_eq!(diags[0].code, DiagCode::UndeclaredPredicate);
    assert!(diags[0].message.contains("foo/1"));
    assert_eq!(diags[0].span, Span::new(19, 15));
}

#[test]
fn duplicate_annotation_is_reported_once() {
    let mut p = load("sort.hc", "sort.ca");
    let extra = Annotation {
        span: Span::new(99, 1),
        ..p.annotation("sort").unwrap().clone()
    };
    p.annotations.push(extra);
    let diags = validate(&p);
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].code, DiagCode::DuplicateAnnotation);
    assert!(diags[0].message.contains("sort/2"));
}

#[test]
fn missing_annotation_is_reported() {
    let p = parse_program(&testdata("sort.hc")).unwrap();
    let anns = parse_annotations(
        "approx list as multiset.\npred sort(X,Y): X = Y.\npred leq(_,_): true.\npred gr(_,_): true.\npred append(X,Y,Z): X + Y = Z.",
        &p.signature,
    )
    .unwrap();
    let diags = validate(&p.with_annotations(anns, None));
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].code, DiagCode::MissingAnnotation);
    assert!(diags[0].message.starts_with("split/4"));
}

#[test]
fn type_errors_in_clauses() {
    let src = format!("{}\nsort(X, 3).\n", testdata("sort.hc"));
    let p = parse_program(&src).unwrap();
    let anns = parse_annotations(&testdata("sort.ca"), &p.signature).unwrap();
    let diags = validate(&p.with_annotations(anns, None));
    assert_eq!(diags.len(), 1);
    assert_eq!(diags[0].code, DiagCode::TypeMismatch);
}

#[test]
fn every_testdata_program_round_trips() {
    for hc in ["sort.hc", "split_dedup.hc", "traverse.hc", "btree.hc"] {
        let p = parse_program(&testdata(hc)).unwrap();
        let q = parse_program(&p.to_string()).unwrap();
        assert_eq!(p.without_spans(), q.without_spans(), "{hc}");
    }
}

#[test]
fn diagnostics_render_with_locations() {
    let diags = parse_program("p(a).\nq(b\n").unwrap_err();
    let text = collana::horn::diag::render("x.hc", &diags);
    assert!(text.starts_with("x.hc:2:2: error[UnclosedParen]"), "{text}");
}
