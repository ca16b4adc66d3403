//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion does.

mod common;

use std::path::PathBuf;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use collana::approx::{build_theta, generate_vcs, same_statement, ThetaOptions};
use collana::driver::{analyze, prove_file, AnalyzeOptions, ClauseStatus};
use collana::horn::{parse_annotations, parse_program, Program, Type};
use collana::kernel::syntax::parse_formula;
use collana::kernel::{MAtom, MsExpr, Term};
use collana::mset::{flipped, prove_mset, reachability_oracle, MsLimits, DEFAULT_MAX_STATES};
use collana::oracle::{check_program, denotation, gen_term, mutants, sld_solve, GenBounds, OracleOptions, Query};
use collana::seq::{degrade_to_multiset, discharge_dlist_vc, encode_list, lists_equal};
use collana::set::{prove_set, set_fixpoint_oracle};
use collana::Verdict;
use common::{random_ms_sequent, random_set_sequent, testdata};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("testdata").join(name)
}

fn load(stem: &str, ann: &str) -> Program {
    let p = parse_program(&testdata(&format!("{stem}.hc"))).expect("program parses");
    let anns = parse_annotations(&testdata(&format!("{ann}.ca")), &p.signature).expect("annotations parse");
    p.with_annotations(anns, None)
}

fn golden_matches(stem: &str, golden: &str) -> Result<usize, String> {
    let p = load(stem, stem);
    let theta = build_theta(&p, ThetaOptions::default()).map_err(|e| e.to_string())?;
    let vcs = generate_vcs(&p, &theta).map_err(|e| e.to_string())?;
    let want: Vec<_> = testdata(golden)
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'))
        .map(|l| parse_formula(l).expect("golden parses"))
        .collect();
    if vcs.len() != want.len() {
        return Err(format!("{} VCs, golden has {}", vcs.len(), want.len()));
    }
    for (vc, g) in vcs.iter().zip(&want) {
        if !same_statement(&vc.formula, g) {
            return Err(format!("clause {} differs from the golden statement", vc.clause_id + 1));
        }
    }
    Ok(vcs.len())
}

fn all_proved(stem: &str, opts: &AnalyzeOptions) -> Result<(usize, usize, Duration), String> {
    let start = Instant::now();
    let r = analyze(&path(&format!("{stem}.hc")), &path(&format!("{stem}.ca")), opts).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let bad: Vec<_> = r
        .clauses
        .iter()
        .filter(|c| !matches!(c.status, ClauseStatus::Proved | ClauseStatus::Trivial))
        .map(|c| format!("clause {} {:?}", c.id, c.status))
        .collect();
    if !bad.is_empty() {
        return Err(bad.join(", "));
    }
    let max_states = r.clauses.iter().map(|c| c.states).max().unwrap_or(0);
    Ok((r.clauses.len(), max_states, elapsed))
}

fn criterion_1() -> Outcome {
    let (n, max_states, elapsed) = all_proved("sort", &AnalyzeOptions::default())?;
    let golden = golden_matches("sort", "sort_vcs.golden")?;
    if n != 7 || golden != 7 {
        return Err(format!("expected 7 VCs, got {n}"));
    }
    if max_states >= 100 {
        return Err(format!("a VC explored {max_states} states"));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("7/7 proved, golden match, max {max_states} states, {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let (n, _, elapsed) = all_proved("split_dedup", &AnalyzeOptions::default())?;
    let golden = golden_matches("split_dedup", "split_dedup_vcs.golden")?;
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("{n}/{n} proved, {golden} golden matches, {elapsed:?}"))
}

fn criterion_3() -> Outcome {
    let r = prove_file(&path("converse.llq"), DEFAULT_MAX_STATES).map_err(|e| e.to_string())?;
    match r.status {
        ClauseStatus::Refuted => Ok(format!("refuted, {} states explored", r.states)),
        other => Err(format!("{other:?}")),
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut agree = 0;
    for _ in 0..200 {
        let seq = random_set_sequent(&mut rng);
        if prove_set(&seq).status == set_fixpoint_oracle(&seq) {
            agree += 1;
        }
    }
    let elapsed = start.elapsed();
    if agree != 200 || elapsed >= Duration::from_secs(5) {
        return Err(format!("{agree}/200 agree in {elapsed:?}"));
    }
    Ok(format!("200/200 agree, {elapsed:?}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut unknown, mut compared, mut disagree) = (0, 0, Vec::new());
    for i in 0..200 {
        let seq = random_ms_sequent(&mut rng);
        let r = prove_mset(&seq, MsLimits::default());
        let o = reachability_oracle(
            &flipped(&seq.rules),
            &seq.target,
            &seq.start,
            seq.goal_relation,
            DEFAULT_MAX_STATES,
        );
        if r.status == Verdict::Unknown {
            unknown += 1;
        }
        if r.status != Verdict::Unknown && o != Verdict::Unknown {
            compared += 1;
            if r.status != o {
                disagree.push(i);
            }
        }
    }
    if !disagree.is_empty() {
        return Err(format!("disagreement on instances {disagree:?}"));
    }
    if unknown * 20 >= 200 {
        return Err(format!("{unknown}/200 unknown"));
    }
    Ok(format!("{compared} compared, no disagreement, {unknown}/200 unknown"))
}

fn criterion_6() -> Outcome {
    let opts = OracleOptions::default();
    for stem in ["sort", "split_dedup"] {
        let p = load(stem, stem);
        let theta = build_theta(&p, ThetaOptions::default()).map_err(|e| e.to_string())?;
        for r in check_program(&p, &theta, &opts).map_err(|e| e.to_string())? {
            if r.failed > 0 {
                return Err(format!("{stem}: {} failed for {}", r.failed, r.predicate));
            }
        }
    }
    let p = load("sort", "sort");
    let theta = build_theta(&p, ThetaOptions::default()).map_err(|e| e.to_string())?;
    let all = mutants(&p, &["append", "split"]);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let chosen: Vec<_> = all.choose_multiple(&mut rng, 10).collect();
    for m in &chosen {
        let vcs = generate_vcs(&m.program, &theta).map_err(|e| e.to_string())?;
        let unproved = vcs.iter().any(|vc| {
            collana::mset::MsSequent::from_vc(vc)
                .is_some_and(|seq| prove_mset(&seq, MsLimits::default()).status != Verdict::Proved)
        });
        let caught = check_program(&m.program, &theta, &opts)
            .map_err(|e| format!("{}: {e}", m.description))?
            .iter()
            .any(|r| r.failed > 0);
        if !unproved || !caught {
            return Err(format!("mutant not caught ({unproved}, {caught}): {}", m.description));
        }
    }
    Ok(format!("oracle clean on both programs; {}/{} sampled mutants caught by both the prover and the oracle", chosen.len(), all.len()))
}

fn list(xs: &[i64]) -> Term {
    xs.iter()
        .rev()
        .fold(Term::constant("nil"), |acc, x| Term::app("cons", vec![Term::int(*x), acc]))
}

fn criterion_7() -> Outcome {
    let theta = build_theta(&load("sort", "sort"), ThetaOptions::default()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let random_list = |rng: &mut ChaCha8Rng| -> Vec<i64> {
        let n = rng.gen_range(0..=8);
        (0..n).map(|_| rng.gen_range(0..=3)).collect()
    };
    for i in 0..500 {
        let (s, t) = (random_list(&mut rng), random_list(&mut rng));
        let (a, b) = (encode_list(&list(&s)).unwrap(), encode_list(&list(&t)).unwrap());
        if lists_equal(&a, &b) != (s == t) {
            return Err(format!("pair {i}: {s:?} vs {t:?}"));
        }
        let direct: MsExpr = denotation(&theta, &list(&s))
            .ok_or("no multiset denotation")?
            .into_iter()
            .map(MAtom::item)
            .collect();
        if degrade_to_multiset(&a) != direct {
            return Err(format!("degrade differs on {s:?}"));
        }
    }
    Ok("500/500 pairs".into())
}

fn inorder(t: &Term, out: &mut Vec<Term>) {
    if let Term::App { functor, args } = t {
        if functor == "bt" {
            inorder(&args[1], out);
            out.push(args[0].clone());
            inorder(&args[2], out);
        }
    }
}

fn criterion_8() -> Outcome {
    let p = load("traverse", "traverse");
    let theta = build_theta(&p, ThetaOptions::default()).map_err(|e| e.to_string())?;
    let vcs = generate_vcs(&p, &theta).map_err(|e| e.to_string())?;
    let statuses: Vec<Verdict> = vcs.iter().map(|vc| discharge_dlist_vc(vc).status).collect();
    if statuses[..2] != [Verdict::Proved, Verdict::Proved] {
        return Err(format!("discharge gave {statuses:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ty = Type::con("btree");
    for trial in 0..100 {
        let tree = gen_term(&p.signature, &ty, &GenBounds::default(), &mut rng)?;
        let answers = sld_solve(&p, &Query::new("traverse", vec![tree.clone(), Term::var("L")]))
            .map_err(|e| format!("trial {trial}: {e}"))?;
        let mut want = Vec::new();
        inorder(&tree, &mut want);
        if answers.is_empty() {
            return Err(format!("trial {trial}: no answer for {tree}"));
        }
        for a in answers {
            let got = encode_list(&a["L"]).map_err(|e| e.to_string())?;
            if got.items != want {
                return Err(format!("trial {trial}: {tree} gave {}", a["L"]));
            }
        }
    }
    let third = match statuses[2] {
        Verdict::Proved => "third proved too",
        _ => "third not proved",
    };
    Ok(format!("first two formulas proved ({third}); 100/100 trees read in order"))
}

const FRAGMENTS: &[&str] = &[
    ":- ", "kind ", "type ", "-> ", "o", "int", "list", "(", ")", ",", ".", " :- ", "X", "Y", "_", "cons", "nil",
    "append", "%", "\n", "pred ", "approx ", " as ", "multiset", "set", "dlist", "{", "}", " + ", " = ", " <= ",
    "ctor ", "true", ": ", "A", "0", "9", "\"", "'", "é", "\t", "((", "))",
];

fn fuzz_inputs(rng: &mut ChaCha8Rng) -> Vec<String> {
    let seed_files = [testdata("sort.hc"), testdata("sort.ca"), testdata("traverse.ca")];
    (0..10_000)
        .map(|i| match i % 3 {
            0 => {
                let n = rng.gen_range(0..200);
                let bytes: Vec<u8> = (0..n).map(|_| rng.gen()).collect();
                String::from_utf8_lossy(&bytes).into_owned()
            }
            1 => (0..rng.gen_range(0..60)).map(|_| *FRAGMENTS.choose(rng).unwrap()).collect(),
            _ => {
                let mut bytes = seed_files.choose(rng).unwrap().clone().into_bytes();
                for _ in 0..rng.gen_range(1..6) {
                    let at = rng.gen_range(0..bytes.len());
                    match rng.gen_range(0..3) {
                        0 => bytes[at] = rng.gen_range(32..127),
                        1 => bytes.truncate(at),
                        _ => {
                            bytes.remove(at);
                        }
                    }
                    if bytes.is_empty() {
                        break;
                    }
                }
                String::from_utf8_lossy(&bytes).into_owned()
            }
        })
        .collect()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let inputs = fuzz_inputs(&mut rng);
    let sig = parse_program(&testdata("sort.hc")).unwrap().signature;
    let total = inputs.len();
    let (tx, rx) = mpsc::channel();
    std::panic::set_hook(Box::new(|_| {}));
    std::thread::spawn(move || {
        for (i, src) in inputs.into_iter().enumerate() {
            let ok = std::panic::catch_unwind(|| {
                let _ = parse_program(&src);
                let _ = parse_annotations(&src, &sig);
            })
            .is_ok();
            if tx.send((i, ok, src)).is_err() {
                return;
            }
        }
    });
    let mut slowest = Duration::ZERO;
    for _ in 0..total {
        let start = Instant::now();
        match rx.recv_timeout(Duration::from_secs(1)) {
            Ok((_, true, _)) => slowest = slowest.max(start.elapsed()),
            Ok((i, false, src)) => {
                let _ = std::panic::take_hook();
                return Err(format!("input {i} panicked: {src:?}"));
            }
            Err(_) => {
                let _ = std::panic::take_hook();
                return Err("an input took more than 1 s".into());
            }
        }
    }
    let _ = std::panic::take_hook();
    Ok(format!("{total} inputs, diagnostics only, slowest {slowest:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("sort permutation VCs", criterion_1),
        ("dedup split VCs", criterion_2),
        ("incompleteness witness", criterion_3),
        ("set prover vs fixpoint oracle", criterion_4),
        ("multiset prover vs reachability oracle", criterion_5),
        ("semantic soundness and mutants", criterion_6),
        ("list equality and degrade", criterion_7),
        ("difference-list traversal", criterion_8),
        ("parser robustness", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
