//! Command-line front end.
//!
//! Four subcommands cover the driver workflows: `models` computes the stable
//! models of a document and prints each one as its difference against the
//! axiomatic closure, `query` answers a formula skeptically or credulously,
//! `check` tests for the existence of a stable model through its exit code,
//! and `ground` dumps the skolemized graph together with the grounded rule
//! instances.
//!
//! The exit codes are a stable contract: 0 for success (including "zero
//! models" from `models`), 1 from `check` when no stable model exists, 2 for
//! any parse or usage error, and 3 when a configured resource limit was
//! exceeded before the result was decided.
//!
//! Output is deterministic: identical invocations on identical input produce
//! byte-identical output.  Timing therefore never appears in a report; run
//! under a shell timer when wall-clock numbers are needed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::interp::{close_in_universe, HerbrandInterpretation, InterpError, Universe};
use crate::model::{ground_program, skolemize, Graph, Ontology, Resource, SignedTriple, Term};
use crate::stable::{
    self, AnswerSet, Binding, CredulousAnswerSet, PersistenceMode, SearchLimits, StableError,
    StableModels,
};
use crate::syntax::{self, Prefixes};
use crate::vocab::{Profile, VocabularyConfig};

const EXIT_OK: i32 = 0;
const EXIT_NO_MODEL: i32 = 1;
const EXIT_PARSE: i32 = 2;
const EXIT_LIMIT: i32 = 3;

/// Ground rule dumps longer than this print only their count.
const GROUND_PRINT_LIMIT: usize = 100;

/// Reasoner for RDF graphs with strong negation and derivation rules.
#[derive(Parser)]
#[command(name = "erdf", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the stable models; print each as a diff against the axioms.
    Models(CommonArgs),
    /// Answer a query formula over the stable models.
    Query {
        #[command(flatten)]
        common: CommonArgs,
        /// Query formula, parsed with the document's prefix declarations.
        #[arg(long)]
        formula: String,
        /// Whether answers must hold in every model or only in some model.
        #[arg(long, value_enum, default_value_t = QueryMode::Skeptical)]
        mode: QueryMode,
    },
    /// Exit 0 when at least one stable model exists, 1 when none does.
    Check(CommonArgs),
    /// Print the skolemized graph, vocabulary sizes, and grounded rules.
    Ground(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Input document.
    file: PathBuf,
    /// Built-in vocabulary profile (default from ERDF_PROFILE, else full).
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
    /// Highest container-membership index kept in the vocabulary.
    #[arg(long, default_value_t = 1)]
    container_bound: usize,
    /// How rule persistence over candidate intervals is decided.
    #[arg(long, value_enum, default_value_t = PersistenceArg::ThreeValued)]
    persistence: PersistenceArg,
    /// Cap on ground rule instances.
    #[arg(long, default_value_t = 500_000)]
    max_ground_rules: usize,
    /// Search time budget in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Emit a machine-readable JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Full,
    Compact,
}

#[derive(Clone, Copy, ValueEnum)]
enum PersistenceArg {
    ThreeValued,
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QueryMode {
    Skeptical,
    Credulous,
}

/// Parses `args` and runs the selected subcommand, returning the process
/// exit code.  All regular output goes to stdout, diagnostics to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors; usage problems share the
            // parse-error exit code.
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Models(c) => cmd_models(c),
        Command::Query {
            common,
            formula,
            mode,
        } => cmd_query(common, formula, *mode),
        Command::Check(c) => cmd_check(c),
        Command::Ground(c) => cmd_ground(c),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("erdf: {}", f.message);
            f.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn parse_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_PARSE,
        message: message.into(),
    }
}

fn of_stable_error(e: StableError) -> Failure {
    let code = match &e {
        StableError::Limit { .. } => EXIT_LIMIT,
        _ => EXIT_PARSE,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Session setup
// ---------------------------------------------------------------------------

struct Session {
    onto: Ontology,
    prefixes: Prefixes,
    cfg: VocabularyConfig,
    limits: SearchLimits,
    json: bool,
}

fn load(c: &CommonArgs) -> Result<Session, Failure> {
    let text = std::fs::read_to_string(&c.file)
        .map_err(|e| parse_failure(format!("cannot read {}: {e}", c.file.display())))?;
    let (onto, prefixes) = syntax::parse_ontology_with_prefixes(&text)
        .map_err(|e| parse_failure(format!("{}: {e}", c.file.display())))?;
    let cfg = VocabularyConfig::new(resolve_profile(c.profile)?, c.container_bound);
    let limits = SearchLimits {
        max_ground_rules: c.max_ground_rules,
        persistence_mode: match c.persistence {
            PersistenceArg::ThreeValued => PersistenceMode::ThreeValued,
            PersistenceArg::Exact => PersistenceMode::Exact,
        },
        timeout: Duration::from_secs(c.timeout),
        ..SearchLimits::default()
    };
    Ok(Session {
        onto,
        prefixes,
        cfg,
        limits,
        json: c.json,
    })
}

fn resolve_profile(flag: Option<ProfileArg>) -> Result<Profile, Failure> {
    if let Some(p) = flag {
        return Ok(match p {
            ProfileArg::Full => Profile::Full,
            ProfileArg::Compact => Profile::Compact,
        });
    }
    match std::env::var("ERDF_PROFILE") {
        Ok(v) => match v.to_ascii_lowercase().as_str() {
            "full" => Ok(Profile::Full),
            "compact" => Ok(Profile::Compact),
            other => Err(parse_failure(format!(
                "ERDF_PROFILE must be \"full\" or \"compact\", got {other:?}"
            ))),
        },
        Err(_) => Ok(Profile::Full),
    }
}

fn universe_of(s: &Session) -> Result<Arc<Universe>, Failure> {
    Universe::of_ontology(&s.onto, &s.cfg).map_err(|e| parse_failure(e.to_string()))
}

// ---------------------------------------------------------------------------
// Name rendering
// ---------------------------------------------------------------------------

/// Renders names with the document's prefixes: a URI under the default
/// prefix prints as a bare local name, one under a named prefix as
/// `prefix:local`, anything else in full `<...>` form.  Only names the
/// parser would read back the same way are shortened.
struct Namer {
    /// (namespace, prefix) pairs, longest namespace first.
    spaces: Vec<(String, String)>,
}

const RESERVED_WORDS: &[&str] = &["graph", "rules", "exists", "forall", "true", "false"];

fn valid_local(s: &str) -> bool {
    s.is_empty()
        || (s.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_')
            && s.chars().all(|c: char| c.is_ascii_alphanumeric() || c == '_'))
}

impl Namer {
    fn new(prefixes: &Prefixes) -> Namer {
        let mut spaces: Vec<(String, String)> = prefixes
            .iter()
            .map(|(p, ns)| (ns.clone(), p.clone()))
            .collect();
        // Longest namespace first so the tightest prefix wins; ties prefer
        // the default prefix, then the alphabetically first name.
        spaces.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
        Namer { spaces }
    }

    fn uri(&self, u: &str) -> String {
        for (ns, prefix) in &self.spaces {
            let Some(local) = u.strip_prefix(ns.as_str()) else {
                continue;
            };
            if !valid_local(local) {
                continue;
            }
            if prefix.is_empty() {
                if local.is_empty() || RESERVED_WORDS.contains(&local) {
                    return format!(":{local}");
                }
                return local.to_string();
            }
            return format!("{prefix}:{local}");
        }
        format!("<{u}>")
    }

    fn term(&self, t: &Term) -> String {
        match t {
            Term::Uri(u) => self.uri(u),
            other => other.to_string(),
        }
    }

    fn resource(&self, r: &Resource) -> String {
        match r {
            Resource::Uri(u) => self.uri(u),
            other => other.to_string(),
        }
    }

    fn triple(&self, t: &(Resource, Resource, Resource)) -> String {
        format!(
            "{}({}, {})",
            self.resource(&t.0),
            self.resource(&t.1),
            self.resource(&t.2)
        )
    }

    fn signed(&self, t: &SignedTriple) -> String {
        format!(
            "{}{}({}, {})",
            if t.positive { "" } else { "-" },
            self.uri(&t.predicate),
            self.term(&t.subject),
            self.term(&t.object)
        )
    }

    fn binding(&self, b: &Binding) -> String {
        b.iter()
            .map(|(v, t)| format!("?{v} = {}", self.term(t)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

// ---------------------------------------------------------------------------
// Shared report assembly
// ---------------------------------------------------------------------------

/// One family's printable content: the non-axiomatic portion of its core
/// plus the membership pairs its members decide freely.
struct FamilyReport {
    pt: Vec<(Resource, Resource, Resource)>,
    pf: Vec<(Resource, Resource, Resource)>,
    undecided: Vec<(Resource, Resource, Resource)>,
    members: Option<u128>,
    open_ended: bool,
}

fn family_reports(sm: &StableModels, axioms: &HerbrandInterpretation) -> Vec<FamilyReport> {
    let apt = axioms.pt_resources();
    let apf = axioms.pf_resources();
    sm.families
        .iter()
        .map(|fam| {
            let pt = fam
                .core()
                .pt_resources()
                .difference(&apt)
                .cloned()
                .collect();
            let pf = fam
                .core()
                .pf_resources()
                .difference(&apf)
                .cloned()
                .collect();
            let mut undecided = fam.undecided_pairs();
            undecided.sort();
            FamilyReport {
                pt,
                pf,
                undecided,
                members: fam.member_count(),
                open_ended: fam.is_open_ended(),
            }
        })
        .collect()
}

/// Why a search produced zero families: the graph closure clashed, or the
/// rules admit no stable model.
enum EmptyReason {
    Incoherent { witness: String },
    NoStableModel,
}

impl EmptyReason {
    fn line(&self) -> String {
        match self {
            EmptyReason::Incoherent { witness } => {
                format!("graph incoherent: witness {witness}")
            }
            EmptyReason::NoStableModel => "no stable model".to_string(),
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            EmptyReason::Incoherent { .. } => "incoherent",
            EmptyReason::NoStableModel => "no-stable-model",
        }
    }
}

fn empty_reason(
    universe: &Arc<Universe>,
    onto: &Ontology,
    namer: &Namer,
) -> Result<EmptyReason, Failure> {
    let skg = skolemize(&onto.graph, None).map_err(|e| parse_failure(e.to_string()))?;
    match close_in_universe(universe.clone(), &skg) {
        Ok(_) => Ok(EmptyReason::NoStableModel),
        Err(InterpError::Incoherent {
            predicate,
            subject,
            object,
        }) => Ok(EmptyReason::Incoherent {
            witness: format!("-{}", namer.triple(&(predicate, subject, object))),
        }),
        Err(e) => Err(parse_failure(e.to_string())),
    }
}

fn json_resource(r: &Resource) -> String {
    match r {
        Resource::Uri(u) => u.clone(),
        other => other.to_string(),
    }
}

fn json_term(t: &Term) -> String {
    match t {
        Term::Uri(u) => u.clone(),
        other => other.to_string(),
    }
}

fn json_triple(t: &(Resource, Resource, Resource)) -> [String; 3] {
    [
        json_resource(&t.0),
        json_resource(&t.1),
        json_resource(&t.2),
    ]
}

fn json_binding(b: &Binding) -> BTreeMap<String, String> {
    b.iter().map(|(v, t)| (v.clone(), json_term(t))).collect()
}

fn json_text<T: Serialize>(value: &T) -> String {
    // Serialization of these reports cannot fail: no maps with non-string
    // keys, no floats.
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Writes a report to stdout in one call.  A closed pipe (the reader stopped
/// consuming) is not an error worth reporting, so write failures are
/// silently ignored.
fn emit(text: &str) {
    use std::io::Write as _;
    let _ = std::io::stdout().write_all(text.as_bytes());
}

// ---------------------------------------------------------------------------
// models
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct JsonModel {
    pt: Vec<[String; 3]>,
    pf: Vec<[String; 3]>,
    undecided: Vec<[String; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    members: Option<u64>,
    open_ended: bool,
}

#[derive(Serialize)]
struct JsonStats {
    vocabulary: usize,
    universe: usize,
    ground_rules: usize,
    branches: usize,
    candidates_checked: usize,
    families: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'static str>,
}

#[derive(Serialize)]
struct JsonModelsReport {
    models: Vec<JsonModel>,
    stats: JsonStats,
    approximate: bool,
}

fn cmd_models(c: &CommonArgs) -> Result<i32, Failure> {
    let s = load(c)?;
    let universe = universe_of(&s)?;
    let namer = Namer::new(&s.prefixes);
    let sm = stable::stable_models(&s.onto, &s.cfg, &s.limits).map_err(of_stable_error)?;
    let axioms = close_in_universe(universe.clone(), &Graph::new())
        .map_err(|e| parse_failure(e.to_string()))?;
    let reports = family_reports(&sm, &axioms);
    let reason = if sm.families.is_empty() {
        Some(empty_reason(&universe, &s.onto, &namer)?)
    } else {
        None
    };

    if s.json {
        let report = JsonModelsReport {
            models: reports
                .iter()
                .map(|r| JsonModel {
                    pt: r.pt.iter().map(json_triple).collect(),
                    pf: r.pf.iter().map(json_triple).collect(),
                    undecided: r.undecided.iter().map(json_triple).collect(),
                    members: r.members.and_then(|n| u64::try_from(n).ok()),
                    open_ended: r.open_ended,
                })
                .collect(),
            stats: JsonStats {
                vocabulary: universe.vocabulary().len(),
                universe: universe.len(),
                ground_rules: sm.stats.ground_rules,
                branches: sm.stats.branches,
                candidates_checked: sm.stats.candidates_checked,
                families: sm.families.len(),
                reason: reason.as_ref().map(EmptyReason::tag),
            },
            approximate: sm.approximate,
        };
        emit(&json_text(&report));
    } else {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "vocabulary: {} terms, universe: {} resources, ground rules: {}",
            universe.vocabulary().len(),
            universe.len(),
            sm.stats.ground_rules
        );
        let _ = writeln!(out, "stable model families: {}", sm.families.len());
        if let Some(r) = &reason {
            let _ = writeln!(out, "{}", r.line());
        }
        for (i, rep) in reports.iter().enumerate() {
            let n = i + 1;
            match (rep.open_ended, rep.members) {
                (true, _) => {
                    let _ = writeln!(out, "model family {n} (open-ended):");
                }
                (false, Some(1)) => {
                    let _ = writeln!(out, "model {n}:");
                }
                (false, Some(m)) => {
                    let _ = writeln!(out, "model family {n} ({m} members):");
                }
                (false, None) => {
                    let _ = writeln!(out, "model family {n}:");
                }
            }
            for t in &rep.pt {
                let _ = writeln!(out, "  PT {}", namer.triple(t));
            }
            for t in &rep.pf {
                let _ = writeln!(out, "  PF {}", namer.triple(t));
            }
            for t in &rep.undecided {
                let _ = writeln!(out, "  undecided {}", namer.triple(t));
            }
        }
        let _ = writeln!(
            out,
            "branches: {}, candidates checked: {}",
            sm.stats.branches, sm.stats.candidates_checked
        );
        let _ = writeln!(out, "approximate: {}", if sm.approximate { "yes" } else { "no" });
        emit(&out);
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct JsonCheckReport {
    stable: bool,
    families: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'static str>,
    approximate: bool,
}

fn cmd_check(c: &CommonArgs) -> Result<i32, Failure> {
    let s = load(c)?;
    let universe = universe_of(&s)?;
    let namer = Namer::new(&s.prefixes);
    let sm = stable::stable_models(&s.onto, &s.cfg, &s.limits).map_err(of_stable_error)?;
    let reason = if sm.families.is_empty() {
        Some(empty_reason(&universe, &s.onto, &namer)?)
    } else {
        None
    };

    if s.json {
        emit(&json_text(&JsonCheckReport {
            stable: reason.is_none(),
            families: sm.families.len(),
            reason: reason.as_ref().map(EmptyReason::tag),
            approximate: sm.approximate,
        }));
    } else {
        let line = match &reason {
            Some(r) => r.line(),
            None => format!("stable model families: {}", sm.families.len()),
        };
        emit(&format!("{line}\n"));
    }
    Ok(if reason.is_none() { EXIT_OK } else { EXIT_NO_MODEL })
}

// ---------------------------------------------------------------------------
// query
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct JsonQueryReport {
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    answer: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bindings: Option<Vec<BTreeMap<String, String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    binding_sets: Option<Vec<Vec<BTreeMap<String, String>>>>,
    approximate: bool,
}

fn cmd_query(c: &CommonArgs, formula: &str, mode: QueryMode) -> Result<i32, Failure> {
    let s = load(c)?;
    let f = syntax::parse_formula_with_prefixes(formula, &s.prefixes)
        .map_err(|e| parse_failure(format!("query: {e}")))?;
    let namer = Namer::new(&s.prefixes);

    match mode {
        QueryMode::Skeptical => {
            let rep =
                stable::stable_answers(&s.onto, &f, &s.cfg, &s.limits).map_err(of_stable_error)?;
            if s.json {
                let mut json = JsonQueryReport {
                    mode: "skeptical",
                    answer: None,
                    bindings: None,
                    binding_sets: None,
                    approximate: rep.approximate,
                };
                match &rep.answer {
                    AnswerSet::Yes => json.answer = Some("yes"),
                    AnswerSet::No => json.answer = Some("no"),
                    AnswerSet::Bindings(bs) => {
                        json.bindings = Some(bs.iter().map(json_binding).collect());
                    }
                }
                emit(&json_text(&json));
            } else {
                let mut out = String::new();
                match &rep.answer {
                    AnswerSet::Yes => out.push_str("yes\n"),
                    AnswerSet::No => out.push_str("no\n"),
                    AnswerSet::Bindings(bs) => {
                        if bs.is_empty() {
                            out.push_str("no bindings\n");
                        }
                        for b in bs {
                            let _ = writeln!(out, "{}", namer.binding(b));
                        }
                    }
                }
                let _ = writeln!(out, "approximate: {}", if rep.approximate { "yes" } else { "no" });
                emit(&out);
            }
        }
        QueryMode::Credulous => {
            let rep = stable::credulous_answers(&s.onto, &f, &s.cfg, &s.limits)
                .map_err(of_stable_error)?;
            if s.json {
                let mut json = JsonQueryReport {
                    mode: "credulous",
                    answer: None,
                    bindings: None,
                    binding_sets: None,
                    approximate: rep.approximate,
                };
                match &rep.answer {
                    CredulousAnswerSet::Yes => json.answer = Some("yes"),
                    CredulousAnswerSet::No => json.answer = Some("no"),
                    CredulousAnswerSet::BindingSets(sets) => {
                        json.binding_sets = Some(
                            sets.iter()
                                .map(|set| set.iter().map(json_binding).collect())
                                .collect(),
                        );
                    }
                }
                emit(&json_text(&json));
            } else {
                let mut out = String::new();
                match &rep.answer {
                    CredulousAnswerSet::Yes => out.push_str("yes\n"),
                    CredulousAnswerSet::No => out.push_str("no\n"),
                    CredulousAnswerSet::BindingSets(sets) => {
                        if sets.is_empty() {
                            out.push_str("no binding sets\n");
                        }
                        for (i, set) in sets.iter().enumerate() {
                            let _ = writeln!(out, "binding set {}:", i + 1);
                            for b in set {
                                let _ = writeln!(out, "  {}", namer.binding(b));
                            }
                        }
                    }
                }
                let _ = writeln!(out, "approximate: {}", if rep.approximate { "yes" } else { "no" });
                emit(&out);
            }
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// ground
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct JsonGroundReport {
    skolemized: Vec<String>,
    vocabulary: usize,
    universe: usize,
    ground_rules: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rules: Option<Vec<String>>,
}

fn cmd_ground(c: &CommonArgs) -> Result<i32, Failure> {
    let s = load(c)?;
    let universe = universe_of(&s)?;
    let namer = Namer::new(&s.prefixes);
    let skg = skolemize(&s.onto.graph, None).map_err(|e| parse_failure(e.to_string()))?;
    let ground = ground_program(&s.onto.program, universe.vocabulary(), s.limits.max_ground_rules)
        .map_err(|e| of_stable_error(e.into()))?;
    let rule_texts: Option<Vec<String>> = if ground.len() <= GROUND_PRINT_LIMIT {
        Some(ground.iter().map(|r| syntax::serialize_rule(&r)).collect())
    } else {
        None
    };

    if s.json {
        emit(&json_text(&JsonGroundReport {
            skolemized: skg.iter().map(|t| namer.signed(t)).collect(),
            vocabulary: universe.vocabulary().len(),
            universe: universe.len(),
            ground_rules: ground.len(),
            rules: rule_texts,
        }));
    } else {
        let mut out = String::new();
        let _ = writeln!(out, "skolemized graph: {} triples", skg.len());
        for t in &skg {
            let _ = writeln!(out, "  {}", namer.signed(t));
        }
        let _ = writeln!(
            out,
            "vocabulary: {} terms, universe: {} resources",
            universe.vocabulary().len(),
            universe.len()
        );
        let _ = writeln!(out, "ground rules: {}", ground.len());
        if let Some(texts) = &rule_texts {
            for text in texts {
                let _ = writeln!(out, "  {text}");
            }
        }
        emit(&out);
    }
    Ok(EXIT_OK)
}
