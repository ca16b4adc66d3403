//! The analysis pipeline: parse, validate, build θ, generate and classify VCs,
//! dispatch them to the provers, and report.

mod llq;

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::approx::{build_theta, classify_vc, generate_vcs, ApproxError, ApproxMap, StatementClass, ThetaOptions, VerificationCondition};
use crate::horn::{
    diag, parse_annotations, parse_program, validate, validate_clauses, DiagCode, Diagnostic, Mode, Program, Span,
};
use crate::mset::{prove_mset, MsLimits, MsSequent, DEFAULT_MAX_STATES};
use crate::oracle::{check_program, EmpiricalReport, OracleError, OracleOptions};
use crate::seq::discharge_dlist_vc;
use crate::set::{prove_set, SetSequent};
use crate::Verdict;

pub use llq::{parse_sequent_file, SequentFile};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{}", render_located(.0))]
    Diagnostics(Vec<(String, Diagnostic)>),
    #[error("{file}:{}: error: {source}", .span.map(|s| s.to_string()).unwrap_or_else(|| "1:1".into()))]
    Approx {
        file: String,
        span: Option<Span>,
        #[source]
        source: ApproxError,
    },
    #[error("{0}")]
    Oracle(#[from] OracleError),
    #[error("cannot start worker threads: {0}")]
    Threads(String),
}

impl DriverError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn render_located(diags: &[(String, Diagnostic)]) -> String {
    diags
        .iter()
        .map(|(file, d)| diag::render(file, std::slice::from_ref(d)))
        .collect::<String>()
        .trim_end()
        .to_string()
}

fn located(file: &str, diags: Vec<Diagnostic>) -> DriverError {
    DriverError::Diagnostics(diags.into_iter().map(|d| (file.to_string(), d)).collect())
}

pub fn read_file(path: &Path) -> Result<String, DriverError> {
    std::fs::read_to_string(path).map_err(|source| DriverError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A program with its annotations attached, checked, and θ built for it.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub program: Program,
    pub theta: ApproxMap,
    pub program_file: String,
}

pub fn load(
    program_src: &str,
    program_file: &str,
    ann_src: &str,
    ann_file: &str,
    mode: Option<Mode>,
    derive_ctors: bool,
) -> Result<Loaded, DriverError> {
    let program = parse_program(program_src).map_err(|d| located(program_file, d))?;
    let anns = parse_annotations(ann_src, &program.signature).map_err(|d| located(ann_file, d))?;
    let program = program.with_annotations(anns, mode);
    let clause_diags = validate_clauses(&program);
    let diags = validate(&program);
    if !diags.is_empty() {
        let tagged = diags
            .into_iter()
            .map(|d| {
                let in_program = d.code == DiagCode::MissingAnnotation || clause_diags.contains(&d);
                (if in_program { program_file } else { ann_file }.to_string(), d)
            })
            .collect();
        return Err(DriverError::Diagnostics(tagged));
    }
    let theta = build_theta(&program, ThetaOptions { derive_ctors }).map_err(|source| DriverError::Approx {
        file: ann_file.to_string(),
        span: None,
        source,
    })?;
    Ok(Loaded {
        program,
        theta,
        program_file: program_file.to_string(),
    })
}

fn clause_of(e: &ApproxError) -> Option<usize> {
    match e {
        ApproxError::Kernel { clause, .. }
        | ApproxError::Typing { clause, .. }
        | ApproxError::UnrecognizedJudgment { clause, .. }
        | ApproxError::MixedModes { clause } => Some(*clause),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    /// Overrides the annotation file's mode header.
    pub mode: Option<Mode>,
    pub max_states: usize,
    pub derive_ctors: bool,
    /// Worker threads for proving; 0 uses one per core.
    pub jobs: usize,
    /// Keep each VC's derivation or search summary in the report.
    pub trace: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            mode: None,
            max_states: DEFAULT_MAX_STATES,
            derive_ctors: false,
            jobs: 0,
            trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClauseStatus {
    Proved,
    Refuted,
    Unknown,
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseEntry {
    /// 1-based clause number.
    pub id: usize,
    pub span: Span,
    pub vc: String,
    pub class: &'static str,
    pub status: ClauseStatus,
    pub states: usize,
    pub micros: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

/// Trivial statements count as proved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub proved: usize,
    pub refuted: usize,
    pub unknown: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub version: String,
    pub mode: Mode,
    pub summary: Summary,
    pub clauses: Vec<ClauseEntry>,
}

impl AnalysisReport {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.summary.refuted + self.summary.unknown > 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("collana {} ({} mode)\n", self.version, self.mode);
        for c in &self.clauses {
            let _ = writeln!(
                out,
                "clause {} at {}: {:?} ({}, {} states, {} µs)\n  {}",
                c.id, c.span, c.status, c.class, c.states, c.micros, c.vc
            );
            if let Some(t) = &c.trace {
                for line in t.lines() {
                    let _ = writeln!(out, "    {line}");
                }
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} clauses: {} proved, {} refuted, {} unknown",
            s.total, s.proved, s.refuted, s.unknown
        );
        out
    }
}

struct Outcome {
    status: ClauseStatus,
    states: usize,
    trace: String,
}

fn verdict_status(v: Verdict) -> ClauseStatus {
    match v {
        Verdict::Proved => ClauseStatus::Proved,
        Verdict::Refuted => ClauseStatus::Refuted,
        Verdict::Unknown => ClauseStatus::Unknown,
    }
}

fn prove_mset_judgments(seq: &MsSequent, max_states: usize) -> Outcome {
    let r = prove_mset(seq, MsLimits { max_states });
    let trace = match r.status {
        Verdict::Proved => r.render_trace(seq),
        Verdict::Refuted => format!("no proof: all {} reachable states explored", r.states_explored),
        Verdict::Unknown => format!("search stopped at the bound of {} states", r.bound),
    };
    Outcome {
        status: verdict_status(r.status),
        states: r.states_explored,
        trace,
    }
}

fn prove_set_judgments(seqs: &[SetSequent]) -> Outcome {
    let mut status = ClauseStatus::Proved;
    let mut states = 0;
    let mut trace = Vec::new();
    for seq in seqs {
        let r = prove_set(seq);
        states += r.transitions;
        match (&r.derivation, &r.refutation) {
            (Some(d), _) => trace.push(d.render(seq)),
            (_, Some(f)) => {
                status = ClauseStatus::Refuted;
                trace.push(f.to_string());
            }
            _ => {}
        }
    }
    Outcome {
        status,
        states,
        trace: trace.join("\n"),
    }
}

fn prove_vc(vc: &VerificationCondition, class: StatementClass, max_states: usize) -> Outcome {
    match class {
        StatementClass::TrivialStatement => Outcome {
            status: ClauseStatus::Trivial,
            states: 0,
            trace: "the head annotation is trivial".into(),
        },
        StatementClass::MultisetStatement => {
            let seq = MsSequent::from_vc(vc).expect("classified as a multiset statement");
            prove_mset_judgments(&seq, max_states)
        }
        StatementClass::SetStatement => {
            let seqs = SetSequent::from_vc(vc).expect("classified as a set statement");
            prove_set_judgments(&seqs)
        }
        StatementClass::DListStatement => {
            let r = discharge_dlist_vc(vc);
            Outcome {
                status: verdict_status(r.status),
                states: 0,
                trace: r.note,
            }
        }
    }
}

/// Generate, classify and prove every VC of a loaded program.
pub fn analyze_loaded(loaded: &Loaded, opts: &AnalyzeOptions) -> Result<AnalysisReport, DriverError> {
    let p = &loaded.program;
    let approx_err = |source: ApproxError| DriverError::Approx {
        file: loaded.program_file.clone(),
        span: clause_of(&source).and_then(|i| p.clauses.get(i)).map(|c| c.span),
        source,
    };
    let vcs = generate_vcs(p, &loaded.theta).map_err(approx_err)?;
    let classes = vcs
        .iter()
        .map(classify_vc)
        .collect::<Result<Vec<_>, _>>()
        .map_err(approx_err)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| DriverError::Threads(e.to_string()))?;
    let clauses: Vec<ClauseEntry> = pool.install(|| {
        vcs.par_iter()
            .zip(&classes)
            .map(|(vc, class)| {
                let start = Instant::now();
                let o = prove_vc(vc, *class, opts.max_states);
                ClauseEntry {
                    id: vc.clause_id + 1,
                    span: vc.span,
                    vc: vc.to_string(),
                    class: class.as_str(),
                    status: o.status,
                    states: o.states,
                    micros: start.elapsed().as_micros() as u64,
                    trace: opts.trace.then_some(o.trace),
                }
            })
            .collect()
    });
    let mut summary = Summary {
        total: clauses.len(),
        ..Summary::default()
    };
    for c in &clauses {
        match c.status {
            ClauseStatus::Proved | ClauseStatus::Trivial => summary.proved += 1,
            ClauseStatus::Refuted => summary.refuted += 1,
            ClauseStatus::Unknown => summary.unknown += 1,
        }
    }
    Ok(AnalysisReport {
        version: VERSION.to_string(),
        mode: p.mode,
        summary,
        clauses,
    })
}

pub fn analyze_sources(
    program_src: &str,
    program_file: &str,
    ann_src: &str,
    ann_file: &str,
    opts: &AnalyzeOptions,
) -> Result<AnalysisReport, DriverError> {
    let loaded = load(program_src, program_file, ann_src, ann_file, opts.mode, opts.derive_ctors)?;
    analyze_loaded(&loaded, opts)
}

pub fn analyze(program: &Path, annotations: &Path, opts: &AnalyzeOptions) -> Result<AnalysisReport, DriverError> {
    analyze_sources(
        &read_file(program)?,
        &program.display().to_string(),
        &read_file(annotations)?,
        &annotations.display().to_string(),
        opts,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequentReport {
    pub version: String,
    pub mode: Mode,
    pub status: ClauseStatus,
    pub states: usize,
    /// The derivation when proved, otherwise a summary of the search.
    pub trace: String,
}

impl SequentReport {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.status != ClauseStatus::Proved)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self, trace: bool) -> String {
        let mut out = format!("{:?} ({} mode, {} states)\n", self.status, self.mode, self.states);
        if trace {
            out.push_str(&self.trace);
            out.push('\n');
        }
        out
    }
}

pub fn prove_sequent(file: &SequentFile, max_states: usize) -> SequentReport {
    let o = match file.mode {
        Mode::Set => {
            let seqs = SetSequent::from_judgments(&file.hypotheses, &file.goal).expect("set goal in a set file");
            prove_set_judgments(&seqs)
        }
        _ => {
            let seq = MsSequent::from_judgments(&file.hypotheses, &file.goal).expect("multiset goal in a multiset file");
            prove_mset_judgments(&seq, max_states)
        }
    };
    SequentReport {
        version: VERSION.to_string(),
        mode: file.mode,
        status: o.status,
        states: o.states,
        trace: o.trace,
    }
}

pub fn prove_file(path: &Path, max_states: usize) -> Result<SequentReport, DriverError> {
    let src = read_file(path)?;
    let file = parse_sequent_file(&src).map_err(|d| located(&path.display().to_string(), d))?;
    Ok(prove_sequent(&file, max_states))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub version: String,
    pub mode: Mode,
    pub trials: usize,
    pub seed: u64,
    pub predicates: Vec<EmpiricalReport>,
}

impl OracleReport {
    pub fn failed(&self) -> usize {
        self.predicates.iter().map(|r| r.failed).sum()
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed() > 0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("collana {} oracle ({} mode, seed {})\n", self.version, self.mode, self.seed);
        for r in &self.predicates {
            let inputs: Vec<String> = r.inputs.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(
                out,
                "{}: {} trials on inputs [{}]: {} passed, {} failed, {} inconclusive",
                r.predicate,
                r.trials,
                inputs.join(", "),
                r.passed,
                r.failed,
                r.inconclusive
            );
            for c in &r.counterexamples {
                let _ = writeln!(out, "  query {} answered {}", c.query, c.answer);
            }
        }
        out
    }
}

pub fn oracle_loaded(loaded: &Loaded, opts: &OracleOptions) -> Result<OracleReport, DriverError> {
    let predicates = check_program(&loaded.program, &loaded.theta, opts)?;
    Ok(OracleReport {
        version: VERSION.to_string(),
        mode: loaded.program.mode,
        trials: opts.trials,
        seed: opts.seed,
        predicates,
    })
}

pub fn oracle(
    program: &Path,
    annotations: &Path,
    mode: Option<Mode>,
    derive_ctors: bool,
    opts: &OracleOptions,
) -> Result<OracleReport, DriverError> {
    let loaded = load(
        &read_file(program)?,
        &program.display().to_string(),
        &read_file(annotations)?,
        &annotations.display().to_string(),
        mode,
        derive_ctors,
    )?;
    oracle_loaded(&loaded, opts)
}
