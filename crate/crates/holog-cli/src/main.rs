//! Command-line front end: parse, evaluate, and verify logical data against
//! finite set-valued or groupoid-valued structures.
//!
//! Output is deterministic for a fixed invocation and seed; the
//! `machine-readable` format prints exactly one JSON line whose layout is
//! versioned (see `docs/report-schema.md`). Exit codes: 0 success, 2 usage,
//! 10 parse error, 11 type error, 12 fiber-size overflow, 13 verification
//! failure.

mod builtin;
mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use holog::formats::{self, FormatError, NamedGroupoidStructure};
use holog::gen::GenBounds;
use holog::groupoid::{GroupoidModel, GroupoidStructure, DEFAULT_MAX_FIBER as GRPD_MAX};
use holog::invariance::{
    check_homotopy_homomorphism, complete_equivalence, invariance_report, HomotopyEquivalence,
};
use holog::model::{enumerate_points, evaluate, interpret_formula, ModelError};
use holog::proof::relations::{basic_relation_instances, RelationFamily};
use holog::proof::{typecheck, ProofError};
use holog::set_model::{SetModel, SetStructure, DEFAULT_MAX_FIBER as SET_MAX};
use holog::syntax::{Signature, SyntaxError};
use holog::term_cat::CtxObject;

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 10;
const EXIT_TYPE: u8 = 11;
const EXIT_OVERFLOW: u8 = 12;
const EXIT_VERIFY: u8 = 13;

/// First-order logic over finite set- and groupoid-valued structures:
/// formula checking, fiberwise evaluation, proof checking, and invariance
/// reports.
#[derive(Parser)]
#[command(name = "holog", version, disable_help_subcommand = true)]
struct Cli {
    /// Semantics backend for structure files and evaluation.
    #[arg(long, global = true, value_enum, default_value_t = Backend::Set, env = "HOLOG_BACKEND")]
    backend: Backend,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0, env = "HOLOG_SEED")]
    seed: u64,
    /// Fiber-size guard: abort instead of building any predicate fiber
    /// larger than this (defaults: 10000 set, 2000 groupoid).
    #[arg(long, global = true, env = "HOLOG_MAX_FIBER")]
    max_fiber: Option<usize>,
    /// Output format; `machine-readable` prints one JSON line.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human, env = "HOLOG_FORMAT")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Backend {
    Set,
    Groupoid,
}

impl Backend {
    fn name(self) -> &'static str {
        match self {
            Backend::Set => "set",
            Backend::Groupoid => "groupoid",
        }
    }
    fn default_max_fiber(self) -> usize {
        match self {
            Backend::Set => SET_MAX,
            Backend::Groupoid => GRPD_MAX,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    MachineReadable,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Formula,
    Term,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expect {
    Inhabited,
    Uninhabited,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, canonicalize, and sort-check a formula or term.
    Check {
        /// Signature file.
        #[arg(long)]
        signature: PathBuf,
        /// Context sorts for free variables `x1, x2, …` (comma-separated).
        #[arg(long, default_value = "")]
        context: String,
        #[arg(long, value_enum, default_value_t = Kind::Formula)]
        kind: Kind,
        /// The formula or term text.
        text: String,
    },
    /// Interpret a formula in a structure and report its fibers.
    Eval {
        #[arg(long)]
        signature: PathBuf,
        /// Structure file (set or groupoid format, per `--backend`).
        #[arg(long)]
        structure: PathBuf,
        #[arg(long, default_value = "")]
        context: String,
        /// Fail (exit 13) unless the verdict matches.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
        text: String,
    },
    /// Type-check a proof-term file; optionally evaluate it in a structure.
    ProveCheck {
        #[arg(long)]
        signature: PathBuf,
        /// When given, also evaluate the proof in this structure.
        #[arg(long)]
        structure: Option<PathBuf>,
        /// Proof-term file.
        proof: PathBuf,
    },
    /// Generate deduction-relation instances and verify that both sides of
    /// every equation evaluate to the same morphism.
    Relations {
        /// Signature file (defaults to a built-in two-sort signature).
        #[arg(long, requires = "structure")]
        signature: Option<PathBuf>,
        /// Structure file (defaults to a built-in structure per backend).
        #[arg(long, requires = "signature")]
        structure: Option<PathBuf>,
        /// Generation rounds (each round instantiates every family).
        #[arg(long, default_value_t = 8)]
        rounds: usize,
    },
    /// Check a comparison map between two groupoid structures and report
    /// whether a formula's fibers are equivalent over matched points.
    Invariance {
        #[arg(long)]
        signature: PathBuf,
        /// Source structure file (groupoid format).
        #[arg(long)]
        source: PathBuf,
        /// Target structure file (groupoid format).
        #[arg(long)]
        target: PathBuf,
        /// Comparison map file.
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value = "")]
        context: String,
        text: String,
    },
    /// Run the built-in gallery: fixed sentences against fixed structures,
    /// each with its required verdict.
    Examples,
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Into<String>) -> Self {
        Failure {
            code,
            msg: msg.into(),
        }
    }
    fn verify(msg: impl Into<String>) -> Self {
        Failure::new(EXIT_VERIFY, msg)
    }
    fn usage(msg: impl Into<String>) -> Self {
        Failure::new(EXIT_USAGE, msg)
    }
}

fn lexical(e: &SyntaxError) -> bool {
    matches!(e, SyntaxError::Lex { .. } | SyntaxError::Parse { .. })
}

fn from_model(e: ModelError) -> Failure {
    let code = match &e {
        ModelError::Overflow { .. } => EXIT_OVERFLOW,
        ModelError::Syntax(s) if lexical(s) => EXIT_PARSE,
        _ => EXIT_TYPE,
    };
    Failure::new(code, e.to_string())
}

fn from_format(e: FormatError) -> Failure {
    if e.is_parse_error() {
        return Failure::new(EXIT_PARSE, e.to_string());
    }
    match e {
        FormatError::Model(m) => from_model(m),
        other => Failure::new(EXIT_TYPE, other.to_string()),
    }
}

fn from_proof(e: ProofError) -> Failure {
    let code = match &e {
        ProofError::Syntax(s) if lexical(s) => EXIT_PARSE,
        _ => EXIT_TYPE,
    };
    Failure::new(code, e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read `{}`: {e}", path.display())))
}

fn load_signature(path: &Path) -> Result<Signature, Failure> {
    formats::parse_signature(&read(path)?).map_err(from_format)
}

fn context_sorts(sig: &Signature, spec: &str) -> Result<Vec<String>, Failure> {
    let sorts: Vec<String> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    for s in &sorts {
        if !sig.has_sort(s) {
            return Err(Failure::new(EXIT_TYPE, format!("unknown sort `{s}` in --context")));
        }
    }
    Ok(sorts)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let max_fiber = cli.max_fiber.unwrap_or(cli.backend.default_max_fiber());
    match &cli.command {
        Command::Check {
            signature,
            context,
            kind,
            text,
        } => cmd_check(&cli, signature, context, *kind, text),
        Command::Eval {
            signature,
            structure,
            context,
            expect,
            text,
        } => cmd_eval(&cli, max_fiber, signature, structure, context, *expect, text),
        Command::ProveCheck {
            signature,
            structure,
            proof,
        } => cmd_prove_check(&cli, max_fiber, signature, structure.as_deref(), proof),
        Command::Relations {
            signature,
            structure,
            rounds,
        } => cmd_relations(&cli, max_fiber, signature.as_deref(), structure.as_deref(), *rounds),
        Command::Invariance {
            signature,
            source,
            target,
            map,
            context,
            text,
        } => cmd_invariance(&cli, max_fiber, signature, source, target, map, context, text),
        Command::Examples => cmd_examples(&cli, max_fiber),
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn cmd_check(
    cli: &Cli,
    signature: &Path,
    context: &str,
    kind: Kind,
    text: &str,
) -> Result<(), Failure> {
    let sig = load_signature(signature)?;
    let sorts = context_sorts(&sig, context)?;
    let (canonical, conn, quant, kind_name) = match kind {
        Kind::Formula => {
            let phi = formats::parse_formula_in(&sig, &sorts, text).map_err(from_format)?;
            (
                phi.to_string(),
                Some(phi.connective_depth()),
                Some(phi.quantifier_depth()),
                "formula",
            )
        }
        Kind::Term => {
            let t = formats::parse_term_in(&sig, &sorts, text).map_err(from_format)?;
            (t.to_string(), None, None, "term")
        }
    };
    match cli.format {
        Format::MachineReadable => report::emit(&report::CheckReport {
            schema: report::SCHEMA,
            command: "check",
            kind: kind_name,
            context: sorts,
            canonical,
            connective_depth: conn,
            quantifier_depth: quant,
        }),
        Format::Human => {
            println!("kind: {kind_name}");
            println!("context: ({})", sorts.join(", "));
            println!("canonical: {canonical}");
            if let (Some(c), Some(q)) = (conn, quant) {
                println!("connective depth: {c}, quantifier depth: {q}");
            }
            println!("check: ok");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

enum AnyModel<'a> {
    Set(SetModel<'a>),
    Grpd(GroupoidModel<'a>),
}

#[allow(clippy::large_enum_variant)]
enum AnyStructure {
    Set(SetStructure),
    Grpd(GroupoidStructure),
}

fn load_structure(cli: &Cli, sig: &Signature, path: &Path) -> Result<AnyStructure, Failure> {
    let text = read(path)?;
    match cli.backend {
        Backend::Set => Ok(AnyStructure::Set(
            formats::parse_set_structure(&text, sig).map_err(from_format)?,
        )),
        Backend::Groupoid => Ok(AnyStructure::Grpd(
            formats::parse_groupoid_structure(&text, sig)
                .map_err(from_format)?
                .structure,
        )),
    }
}

fn cmd_eval(
    cli: &Cli,
    max_fiber: usize,
    signature: &Path,
    structure: &Path,
    context: &str,
    expect: Option<Expect>,
    text: &str,
) -> Result<(), Failure> {
    let sig = load_signature(signature)?;
    let sorts = context_sorts(&sig, context)?;
    let phi = formats::parse_formula_in(&sig, &sorts, text).map_err(from_format)?;
    let ctx = CtxObject::new(sorts.clone());
    let st = load_structure(cli, &sig, structure)?;
    let model = match &st {
        AnyStructure::Set(s) => AnyModel::Set(SetModel::new(&sig, s).with_max_fiber(max_fiber)),
        AnyStructure::Grpd(s) => AnyModel::Grpd(GroupoidModel::new(&sig, s).with_max_fiber(max_fiber)),
    };

    let mut points_out = Vec::new();
    match &model {
        AnyModel::Set(m) => {
            let pred = interpret_formula(m, &sig, &ctx, &phi).map_err(from_model)?;
            for point in enumerate_points(m, &ctx).map_err(from_model)? {
                let n = pred.fibers[&point].len();
                points_out.push(report::EvalPoint {
                    point,
                    inhabited: n > 0,
                    proofs: Some(n),
                    objects: None,
                    morphisms: None,
                });
            }
        }
        AnyModel::Grpd(m) => {
            let pred = interpret_formula(m, &sig, &ctx, &phi).map_err(from_model)?;
            for point in enumerate_points(m, &ctx).map_err(from_model)? {
                let fib = &pred.fibers[&point];
                points_out.push(report::EvalPoint {
                    point,
                    inhabited: !fib.is_empty(),
                    proofs: None,
                    objects: Some(fib.n_objects()),
                    morphisms: Some(fib.n_mors()),
                });
            }
        }
    }
    let all_inhabited = points_out.iter().all(|p| p.inhabited);
    let none_inhabited = points_out.iter().all(|p| !p.inhabited);

    match cli.format {
        Format::MachineReadable => report::emit(&report::EvalReport {
            schema: report::SCHEMA,
            command: "eval",
            backend: cli.backend.name().to_string(),
            max_fiber,
            context: sorts,
            formula: phi.to_string(),
            points: points_out,
            all_inhabited,
        }),
        Format::Human => {
            println!("backend: {}", cli.backend.name());
            println!("context: ({})", sorts.join(", "));
            println!("formula: {phi}");
            for p in &points_out {
                let detail = match (p.proofs, p.objects, p.morphisms) {
                    (Some(n), _, _) => format!("{n} proof(s)"),
                    (_, Some(o), Some(m)) => format!("{o} object(s), {m} morphism(s)"),
                    _ => String::new(),
                };
                let verdict = if p.inhabited { "inhabited" } else { "empty" };
                println!("point {:?}: {verdict} — {detail}", p.point);
            }
            println!("inhabited at every point: {}", if all_inhabited { "yes" } else { "no" });
        }
    }

    match expect {
        Some(Expect::Inhabited) if !all_inhabited => Err(Failure::verify(
            "expected the formula to be inhabited at every point",
        )),
        Some(Expect::Uninhabited) if !none_inhabited => Err(Failure::verify(
            "expected the formula to be uninhabited at every point",
        )),
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// prove-check
// ---------------------------------------------------------------------------

fn cmd_prove_check(
    cli: &Cli,
    max_fiber: usize,
    signature: &Path,
    structure: Option<&Path>,
    proof: &Path,
) -> Result<(), Failure> {
    let sig = load_signature(signature)?;
    let d = formats::parse_deduction(&read(proof)?, &sig).map_err(from_format)?;
    let seq = typecheck(&sig, &d).map_err(from_proof)?;

    let mut backend = None;
    let mut evaluated = false;
    if let Some(st_path) = structure {
        let st = load_structure(cli, &sig, st_path)?;
        match &st {
            AnyStructure::Set(s) => {
                let m = SetModel::new(&sig, s).with_max_fiber(max_fiber);
                evaluate(&m, &sig, &d).map_err(from_model)?;
            }
            AnyStructure::Grpd(s) => {
                let m = GroupoidModel::new(&sig, s).with_max_fiber(max_fiber);
                evaluate(&m, &sig, &d).map_err(from_model)?;
            }
        }
        backend = Some(cli.backend.name().to_string());
        evaluated = true;
    }

    match cli.format {
        Format::MachineReadable => report::emit(&report::ProveCheckReport {
            schema: report::SCHEMA,
            command: "prove-check",
            nodes: d.size(),
            sequent: report::SequentReport {
                context: seq.context.to_string(),
                premise: seq.premise.to_string(),
                conclusion: seq.conclusion.to_string(),
            },
            backend,
            evaluated,
        }),
        Format::Human => {
            println!("nodes: {}", d.size());
            println!("sequent: {seq}");
            if evaluated {
                println!("evaluated in {} backend: ok", cli.backend.name());
            }
            println!("prove-check: ok");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// relations
// ---------------------------------------------------------------------------

fn cmd_relations(
    cli: &Cli,
    max_fiber: usize,
    signature: Option<&Path>,
    structure: Option<&Path>,
    rounds: usize,
) -> Result<(), Failure> {
    let (sig, st) = match (signature, structure) {
        (Some(sp), Some(tp)) => {
            let sig = load_signature(sp)?;
            let st = load_structure(cli, &sig, tp)?;
            (sig, st)
        }
        _ => match cli.backend {
            Backend::Set => {
                let (sig, st) = builtin::default_set();
                (sig, AnyStructure::Set(st))
            }
            Backend::Groupoid => {
                let (sig, st) = builtin::default_groupoid();
                (sig, AnyStructure::Grpd(st))
            }
        },
    };

    let instances = basic_relation_instances(&sig, cli.seed, rounds, &GenBounds::default());
    let mut checked: BTreeMap<RelationFamily, usize> = BTreeMap::new();
    let mut skipped: BTreeMap<RelationFamily, usize> = BTreeMap::new();
    let mut failures = Vec::new();

    for inst in &instances {
        let outcome = match &st {
            AnyStructure::Set(s) => {
                let m = SetModel::new(&sig, s).with_max_fiber(max_fiber);
                match (evaluate(&m, &sig, &inst.lhs), evaluate(&m, &sig, &inst.rhs)) {
                    (Ok(l), Ok(r)) => Some(l == r),
                    (Err(ModelError::Overflow { .. }), _) | (_, Err(ModelError::Overflow { .. })) => {
                        None
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(from_model(e)),
                }
            }
            AnyStructure::Grpd(s) => {
                let m = GroupoidModel::new(&sig, s).with_max_fiber(max_fiber);
                match (evaluate(&m, &sig, &inst.lhs), evaluate(&m, &sig, &inst.rhs)) {
                    (Ok(l), Ok(r)) => Some(l == r),
                    (Err(ModelError::Overflow { .. }), _) | (_, Err(ModelError::Overflow { .. })) => {
                        None
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(from_model(e)),
                }
            }
        };
        match outcome {
            Some(true) => *checked.entry(inst.family).or_default() += 1,
            Some(false) => {
                *checked.entry(inst.family).or_default() += 1;
                failures.push(format!("{}: {}", inst.family, inst.equation));
            }
            None => *skipped.entry(inst.family).or_default() += 1,
        }
    }

    let families: Vec<report::FamilyCount> = RelationFamily::ALL
        .iter()
        .map(|f| report::FamilyCount {
            family: f.to_string(),
            checked: checked.get(f).copied().unwrap_or(0),
            skipped: skipped.get(f).copied().unwrap_or(0),
        })
        .collect();
    let total_checked: usize = families.iter().map(|f| f.checked).sum();
    let total_skipped: usize = families.iter().map(|f| f.skipped).sum();

    match cli.format {
        Format::MachineReadable => report::emit(&report::RelationsReport {
            schema: report::SCHEMA,
            command: "relations",
            backend: cli.backend.name().to_string(),
            seed: cli.seed,
            rounds,
            max_fiber,
            families,
            total_checked,
            total_skipped,
            failures: failures.clone(),
        }),
        Format::Human => {
            println!("backend: {}, seed: {}, rounds: {rounds}", cli.backend.name(), cli.seed);
            for f in &families {
                println!("{:>22}: {} checked, {} skipped", f.family, f.checked, f.skipped);
            }
            println!("total: {total_checked} checked, {total_skipped} skipped (size guard)");
            for f in &failures {
                println!("FAILED {f}");
            }
            if failures.is_empty() {
                println!("relations: ok");
            }
        }
    }

    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::verify(format!(
            "{} relation instance(s) evaluated to different morphisms",
            failures.len()
        )))
    }
}

// ---------------------------------------------------------------------------
// invariance
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn cmd_invariance(
    cli: &Cli,
    max_fiber: usize,
    signature: &Path,
    source: &Path,
    target: &Path,
    map: &Path,
    context: &str,
    text: &str,
) -> Result<(), Failure> {
    if cli.backend == Backend::Set {
        return Err(Failure::usage(
            "invariance compares groupoid structures; pass --backend groupoid",
        ));
    }
    let sig = load_signature(signature)?;
    let m: NamedGroupoidStructure =
        formats::parse_groupoid_structure(&read(source)?, &sig).map_err(from_format)?;
    let n: NamedGroupoidStructure =
        formats::parse_groupoid_structure(&read(target)?, &sig).map_err(from_format)?;
    let parsed = formats::parse_comparison(&read(map)?, &sig, &m, &n).map_err(from_format)?;

    // Naturality failures in the supplied data are verification failures,
    // not typing problems: the file is well-formed, the map just isn't one.
    check_homotopy_homomorphism(&sig, &m.structure, &n.structure, &parsed.map)
        .map_err(|e| Failure::verify(format!("comparison map rejected: {e}")))?;

    let (equivalence, source_tag): (HomotopyEquivalence, &'static str) =
        match parsed.equivalence(&sig) {
            Some(e) => (e, "file"),
            None => {
                let found = complete_equivalence(
                    &sig,
                    &m.structure,
                    &n.structure,
                    &parsed.map,
                    100_000,
                )
                .map_err(from_model)?;
                match found {
                    Some(e) => (e, "search"),
                    None => {
                        return Err(Failure::verify(
                            "the comparison map is not an equivalence: no quasi-inverse exists",
                        ))
                    }
                }
            }
        };

    let sorts = context_sorts(&sig, context)?;
    let phi = formats::parse_formula_in(&sig, &sorts, text).map_err(from_format)?;
    let ctx = CtxObject::new(sorts.clone());
    let rep = invariance_report(
        &sig,
        &m.structure,
        &n.structure,
        &equivalence,
        &ctx,
        &phi,
        max_fiber,
    )
    .map_err(from_model)?;

    let verdicts: Vec<report::VerdictReport> = rep
        .verdicts
        .iter()
        .map(|v| report::VerdictReport {
            point: v.point.clone(),
            image: v.image.clone(),
            equivalent: v.equivalent,
        })
        .collect();
    let all = rep.all_true();

    match cli.format {
        Format::MachineReadable => report::emit(&report::InvarianceReportOut {
            schema: report::SCHEMA,
            command: "invariance",
            max_fiber,
            context: sorts,
            formula: phi.to_string(),
            equivalence_source: source_tag,
            verdicts,
            all_equivalent: all,
        }),
        Format::Human => {
            println!("context: ({})", sorts.join(", "));
            println!("formula: {phi}");
            println!("quasi-inverse: from {source_tag}");
            for v in &verdicts {
                let tag = if v.equivalent { "equivalent" } else { "DIFFER" };
                println!("point {:?} -> image {:?}: fibers {tag}", v.point, v.image);
            }
            println!("invariant: {}", if all { "yes" } else { "no" });
        }
    }

    if all {
        Ok(())
    } else {
        Err(Failure::verify(
            "fibers over some matched points are not equivalent",
        ))
    }
}

// ---------------------------------------------------------------------------
// examples
// ---------------------------------------------------------------------------

fn cmd_examples(cli: &Cli, max_fiber: usize) -> Result<(), Failure> {
    let entries = builtin::run_examples(max_fiber).map_err(from_model)?;
    let all_ok = entries.iter().all(|e| e.inhabited == e.expected);

    match cli.format {
        Format::MachineReadable => report::emit(&report::ExamplesReport {
            schema: report::SCHEMA,
            command: "examples",
            entries,
            all_ok,
        }),
        Format::Human => {
            for e in &entries {
                let verdict = if e.inhabited { "inhabited" } else { "empty" };
                let mark = if e.inhabited == e.expected { "ok" } else { "MISMATCH" };
                println!(
                    "[{mark}] {}/{}: {} — {verdict}",
                    e.backend, e.structure, e.sentence
                );
            }
            println!("examples: {}", if all_ok { "ok" } else { "failed" });
        }
    }

    if all_ok {
        Ok(())
    } else {
        Err(Failure::verify("a gallery entry's verdict changed"))
    }
}
