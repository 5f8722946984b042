//! Stable-model search, verification, and query answering.
//!
//! A stable model is built in layers starting from the closure of the
//! skolemized graph: at each layer, every rule whose condition provably
//! holds across the whole interval between the current layer and the
//! candidate model fires its conclusion, the closure is recomputed, and
//! undecided membership pairs of total classes and properties are copied
//! from the candidate.  A candidate is stable when this process reproduces
//! it exactly.  [`chain_verify`] implements that check directly; the search
//! in [`stable_models`] enumerates candidates and verifies each one.
//!
//! # How the search stays sound and complete
//!
//! Every stable model lies between the closure of the skolemized graph
//! (the *base*) and an upper envelope: the closure of the base together
//! with every ground-rule conclusion plus, for each total class and
//! property, both signs of every membership pair.  Conclusions of rules
//! whose condition is three-valued false on `[base, envelope]` are dropped
//! and the envelope reclosed until it stops shrinking; this is sound
//! because a model inside the interval can only fire rules whose condition
//! is not false on it.  The search then branches — on a rule with an
//! undecided conclusion (include the conclusion, or exclude it from the
//! whole subtree) and on undecided membership pairs of total classes and
//! properties (one branch per sign).  Every decision strictly narrows the
//! interval, so the tree is finite, and every stable model agrees with one
//! full set of decisions, so some leaf pins it down: at a leaf the
//! candidate is exactly the closure of the decisions taken, and the chain
//! check accepts or rejects it without guessing.
//!
//! Leaves do not enumerate sign choices that cannot matter.  An undecided
//! membership pair of a total class or property is left open (*free*) when
//! (a) its predicate plays no schema role in the closure (no
//! `rdfs:subClassOf`/`rdfs:subPropertyOf`/`rdfs:domain`/`rdfs:range` edges,
//! no typing as class, property, datatype, or totality class), (b) every
//! still-undecided rule instance reading the pair settles to the same
//! crisp verdict under either sign, any fired conclusion being already
//! present or the committed sign itself, and (c) replaying the closure
//! consequence schemas for the pair against the leaf's derived edges lands
//! every consequence inside the leaf.  Under those checks a sign choice
//! neither enables nor disables any rule and derives nothing new, so the
//! leaf's candidates differ only in the free pairs themselves.  They are
//! reported as one [`ModelFamily`] — a shared core plus the free pairs —
//! after chain-checking representative completions (every completion when
//! there are at most six free pairs); if representatives ever disagree the
//! search falls back to branching the pairs explicitly.
//!
//! Ontologies with an `rdfs:subClassOf` edge from `rdf:Property` to
//! `erdf:TotalProperty` make every property — including `rdf:type` —
//! total, which collapses stable models into the coherent closed models of
//! the ontology.  Those are answered by a single closure-defined family
//! whose members are enumerated lazily per query instead of searched.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::error::Error;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::interp::{
    check_conditions, BuiltinIds, ClosureEngine, HerbrandInterpretation, IdTriple, InterpError,
    Universe,
};
use crate::model::{
    free_vars, ground_program, normalize_negation, skolemize, Conclusion, Formula, Graph,
    ModelError, Ontology, Program, Rule, SignedTriple, Term,
};
use crate::vocab::VocabularyConfig;

// ---------------------------------------------------------------------------
// Errors, limits, statistics
// ---------------------------------------------------------------------------

/// An error from model search or query answering.
#[derive(Debug)]
pub enum StableError {
    /// A configured resource limit was exceeded before the result was
    /// decided; `resource` names the limit.
    Limit { resource: String, detail: String },
    Interp(InterpError),
    Model(ModelError),
}

impl fmt::Display for StableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StableError::Limit { resource, detail } => {
                write!(f, "limit exceeded ({resource}): {detail}")
            }
            StableError::Interp(e) => write!(f, "{e}"),
            StableError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl Error for StableError {}

impl From<InterpError> for StableError {
    fn from(e: InterpError) -> StableError {
        StableError::Interp(e)
    }
}

impl From<ModelError> for StableError {
    fn from(e: ModelError) -> StableError {
        match e {
            ModelError::GroundingCapExceeded { required, cap } => StableError::Limit {
                resource: "ground rules".into(),
                detail: format!("grounding needs {required} instances, cap is {cap}"),
            },
            other => StableError::Model(other),
        }
    }
}

fn limit(resource: &str, detail: impl Into<String>) -> StableError {
    StableError::Limit {
        resource: resource.into(),
        detail: detail.into(),
    }
}

/// How rule persistence over an interval is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PersistenceMode {
    /// Three-valued evaluation over the interval, escalating to exact
    /// enumeration only when the chain stalls on undecided rules.
    ThreeValued,
    /// Exact enumeration of the interval whenever three-valued evaluation
    /// is undecided.
    Exact,
}

/// Resource limits for search, verification, and queries.
#[derive(Debug, Clone)]
pub struct SearchLimits {
    /// Cap on ground rule instances.
    pub max_ground_rules: usize,
    /// Cap on search tree nodes (also budgets per-family query searches).
    pub max_branches: usize,
    /// Cap on layers per chain check.
    pub max_chain_steps: usize,
    pub persistence_mode: PersistenceMode,
    /// Largest interval width (in undecided atoms) enumerated exactly when
    /// deciding persistence.
    pub exact_interval_cap: usize,
    pub timeout: Duration,
}

impl Default for SearchLimits {
    fn default() -> SearchLimits {
        SearchLimits {
            max_ground_rules: 500_000,
            max_branches: 100_000,
            max_chain_steps: 10_000,
            persistence_mode: PersistenceMode::ThreeValued,
            exact_interval_cap: 16,
            timeout: Duration::from_secs(60),
        }
    }
}

/// Counters describing one search run.
#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    /// Distinct ground rule instances after deduplication.
    pub ground_rules: usize,
    /// Search tree nodes explored.
    pub branches: usize,
    /// Leaf candidates submitted to the chain check.
    pub candidates_checked: usize,
    pub elapsed: Duration,
}

/// The result of [`stable_models`]: model families plus run metadata.
#[derive(Debug)]
pub struct StableModels {
    pub families: Vec<ModelFamily>,
    /// True when a limit-bounded persistence check could not be decided
    /// exactly, so a candidate may have been dropped wrongly.  Reported
    /// families are always verified.
    pub approximate: bool,
    pub stats: SearchStats,
}

/// The result of [`chain_verify`].
#[derive(Debug, Clone)]
pub struct ChainCheck {
    pub stable: bool,
    /// True when rejection rested on an undecided persistence check that
    /// exceeded the exact-enumeration cap.  Acceptance is always exact.
    pub approximate: bool,
    /// Layers computed before the verdict.
    pub steps: usize,
}

/// The result of [`persistent_rules`].
#[derive(Debug, Clone)]
pub struct PersistenceReport {
    /// The input rules whose condition provably holds across the interval.
    pub persistent: Program,
    /// True in three-valued mode when some rule was undecided and counted
    /// as not persistent.
    pub approximate: bool,
}

/// The result of [`entails`] and [`entails_graph`].
#[derive(Debug, Clone, Copy)]
pub struct Entailment {
    pub holds: bool,
    pub approximate: bool,
}

/// One answer binding: query variable name to vocabulary term.
pub type Binding = BTreeMap<String, Term>;

/// Answer to a query that must hold in every stable model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnswerSet {
    /// Closed query entailed.
    Yes,
    /// Closed query not entailed.
    No,
    /// Open query: every binding entailed in all models.
    Bindings(BTreeSet<Binding>),
}

#[derive(Debug, Clone)]
pub struct AnswerReport {
    pub answer: AnswerSet,
    pub approximate: bool,
}

/// Answer to a query that may hold in some stable model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CredulousAnswerSet {
    Yes,
    No,
    /// Open query: one binding set per model that satisfies the query at
    /// all, deduplicated.
    BindingSets(BTreeSet<BTreeSet<Binding>>),
}

#[derive(Debug, Clone)]
pub struct CredulousReport {
    pub answer: CredulousAnswerSet,
    pub approximate: bool,
}

// ---------------------------------------------------------------------------
// Three-valued evaluation over an interval of interpretations
// ---------------------------------------------------------------------------

/// Three-valued truth: ordered `False < Unknown < True` so that `min` is
/// conjunction and `max` is disjunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Tri {
    False,
    Unknown,
    True,
}

impl Tri {
    fn neg(self) -> Tri {
        match self {
            Tri::True => Tri::False,
            Tri::False => Tri::True,
            Tri::Unknown => Tri::Unknown,
        }
    }
}

/// A set of interpretations described by bounds: everything between the
/// lower sets (atoms certainly decided) and the upper sets (atoms possibly
/// decided), the lower sets included in the upper ones.
trait IntervalView {
    fn in_lower(&self, positive: bool, t: IdTriple) -> bool;
    fn in_upper(&self, positive: bool, t: IdTriple) -> bool;
}

/// Interval between explicit lower and upper triple sets, with optional
/// subtree exclusions carved out of the upper bound and an optional
/// hypothetical extra lower atom (used to probe rule behavior under a
/// committed sign).
struct BoundsView<'a> {
    lower_pt: &'a HashSet<IdTriple>,
    lower_pf: &'a HashSet<IdTriple>,
    upper_pt: &'a HashSet<IdTriple>,
    upper_pf: &'a HashSet<IdTriple>,
    excluded_pt: Option<&'a HashSet<IdTriple>>,
    excluded_pf: Option<&'a HashSet<IdTriple>>,
    overlay: Option<(bool, IdTriple)>,
}

impl IntervalView for BoundsView<'_> {
    fn in_lower(&self, positive: bool, t: IdTriple) -> bool {
        let base = if positive { self.lower_pt } else { self.lower_pf };
        if base.contains(&t) {
            return true;
        }
        matches!(self.overlay, Some((p, u)) if p == positive && u == t)
    }

    fn in_upper(&self, positive: bool, t: IdTriple) -> bool {
        if self.in_lower(positive, t) {
            return true;
        }
        let up = if positive { self.upper_pt } else { self.upper_pf };
        if !up.contains(&t) {
            return false;
        }
        let ex = if positive {
            self.excluded_pt
        } else {
            self.excluded_pf
        };
        !ex.is_some_and(|e| e.contains(&t))
    }
}

/// Members of a product family: the core plus one sign per free pair, some
/// already chosen.
struct MemberView<'a> {
    core_pt: &'a HashSet<IdTriple>,
    core_pf: &'a HashSet<IdTriple>,
    free: &'a BTreeSet<IdTriple>,
    chosen_pt: &'a HashSet<IdTriple>,
    chosen_pf: &'a HashSet<IdTriple>,
}

impl IntervalView for MemberView<'_> {
    fn in_lower(&self, positive: bool, t: IdTriple) -> bool {
        if positive {
            self.core_pt.contains(&t) || self.chosen_pt.contains(&t)
        } else {
            self.core_pf.contains(&t) || self.chosen_pf.contains(&t)
        }
    }

    fn in_upper(&self, positive: bool, t: IdTriple) -> bool {
        if self.in_lower(positive, t) {
            return true;
        }
        let opposite = if positive {
            self.chosen_pf
        } else {
            self.chosen_pt
        };
        self.free.contains(&t) && !opposite.contains(&t)
    }
}

/// Evaluates formulas three-valuedly over an interval, mirroring the crisp
/// satisfaction clauses: when the interval is a single interpretation the
/// verdict equals crisp satisfaction.  Records the first undecided atom's
/// triple as a branching hint for interval-narrowing searches.
struct FormulaEval<'a, V: IntervalView> {
    universe: &'a Universe,
    view: &'a V,
    /// Pairs where `F | -F` may be shortcut to true because every member
    /// decides the pair one way or the other.
    total_pairs: Option<&'a BTreeSet<IdTriple>>,
    witness: std::cell::Cell<Option<IdTriple>>,
}

impl<'a, V: IntervalView> FormulaEval<'a, V> {
    fn new(universe: &'a Universe, view: &'a V) -> FormulaEval<'a, V> {
        FormulaEval {
            universe,
            view,
            total_pairs: None,
            witness: std::cell::Cell::new(None),
        }
    }

    fn with_totals(mut self, totals: &'a BTreeSet<IdTriple>) -> FormulaEval<'a, V> {
        self.total_pairs = Some(totals);
        self
    }

    fn note(&self, t: IdTriple) {
        if self.witness.get().is_none() {
            self.witness.set(Some(t));
        }
    }

    fn status(&self, positive: bool, t: IdTriple) -> Tri {
        if self.view.in_lower(positive, t) {
            return Tri::True;
        }
        if self.view.in_lower(!positive, t) || !self.view.in_upper(positive, t) {
            return Tri::False;
        }
        self.note(t);
        Tri::Unknown
    }

    fn term_id(&self, env: &BTreeMap<String, u32>, t: &Term) -> Option<u32> {
        match t {
            Term::Variable(v) => env.get(v).copied(),
            _ => self.universe.denote(t),
        }
    }

    /// The atom clauses of satisfaction, three-valued: vocabulary side
    /// conditions and unresolvable terms are crisply false; the predicate's
    /// property typing and the membership each contribute their status.
    fn atom(&self, env: &BTreeMap<String, u32>, t: &SignedTriple, in_falsities: bool) -> Tri {
        let pred = Term::Uri(t.predicate.clone());
        if !self.universe.contains_term(&pred) {
            return Tri::False;
        }
        for side in [&t.subject, &t.object] {
            if !side.is_variable() && !self.universe.contains_term(side) {
                return Tri::False;
            }
        }
        let Some(p) = self.universe.denote(&pred) else {
            return Tri::False;
        };
        let ids = self.universe.ids;
        let typing = self.status(true, (ids.rdf_type, p, ids.rdf_property));
        if typing == Tri::False {
            return Tri::False;
        }
        let (Some(s), Some(o)) = (self.term_id(env, &t.subject), self.term_id(env, &t.object))
        else {
            return Tri::False;
        };
        typing.min(self.status(!in_falsities, (p, s, o)))
    }

    fn vocab_guard(&self, f: &Formula) -> bool {
        crate::model::formula_terms(f)
            .iter()
            .all(|t| self.universe.contains_term(t))
    }

    /// When `a | b` is an atom and its strong negation over one triple, the
    /// triple it denotes under `env`.
    fn complementary_pair(
        &self,
        env: &BTreeMap<String, u32>,
        a: &Formula,
        b: &Formula,
    ) -> Option<IdTriple> {
        let (plain, negated) = match (a, b) {
            (Formula::Atom(x), Formula::StrongNeg(g)) => match g.as_ref() {
                Formula::Atom(y) => (x, y),
                _ => return None,
            },
            (Formula::StrongNeg(g), Formula::Atom(x)) => match g.as_ref() {
                Formula::Atom(y) => (x, y),
                _ => return None,
            },
            _ => return None,
        };
        if plain.predicate != negated.predicate
            || plain.subject != negated.subject
            || plain.object != negated.object
        {
            return None;
        }
        let p = self.universe.denote(&Term::Uri(plain.predicate.clone()))?;
        let s = self.term_id(env, &plain.subject)?;
        let o = self.term_id(env, &plain.object)?;
        Some((p, s, o))
    }

    fn eval(&self, env: &mut BTreeMap<String, u32>, f: &Formula) -> Tri {
        match f {
            Formula::True => Tri::True,
            Formula::False => Tri::False,
            Formula::Atom(t) => self.atom(env, t, false),
            Formula::StrongNeg(inner) => match inner.as_ref() {
                Formula::Atom(t) => self.atom(env, t, true),
                _ => self.eval(env, &normalize_negation(f)),
            },
            Formula::WeakNeg(g) => {
                if !self.vocab_guard(g) {
                    Tri::False
                } else {
                    self.eval(env, g).neg()
                }
            }
            Formula::And(a, b) => {
                let va = self.eval(env, a);
                if va == Tri::False {
                    return Tri::False;
                }
                va.min(self.eval(env, b))
            }
            Formula::Or(a, b) => {
                if let (Some(totals), Some(t)) =
                    (self.total_pairs, self.complementary_pair(env, a, b))
                {
                    if totals.contains(&t) {
                        return Tri::True;
                    }
                }
                let va = self.eval(env, a);
                if va == Tri::True {
                    return Tri::True;
                }
                va.max(self.eval(env, b))
            }
            Formula::Implies(a, b) => {
                let na = if !self.vocab_guard(a) {
                    Tri::False
                } else {
                    self.eval(env, a).neg()
                };
                if na == Tri::True {
                    return Tri::True;
                }
                na.max(self.eval(env, b))
            }
            Formula::Exists(x, g) => self.quantify(env, x, g, false),
            Formula::Forall(x, g) => self.quantify(env, x, g, true),
        }
    }

    fn quantify(
        &self,
        env: &mut BTreeMap<String, u32>,
        x: &str,
        g: &Formula,
        universal: bool,
    ) -> Tri {
        let mut acc = if universal { Tri::True } else { Tri::False };
        for r in self.universe.all_ids() {
            let old = env.insert(x.to_string(), r);
            let v = self.eval(env, g);
            match old {
                Some(o) => {
                    env.insert(x.to_string(), o);
                }
                None => {
                    env.remove(x);
                }
            }
            if universal {
                acc = acc.min(v);
                if acc == Tri::False {
                    return acc;
                }
            } else {
                acc = acc.max(v);
                if acc == Tri::True {
                    return acc;
                }
            }
        }
        acc
    }

    fn eval_closed(&self, f: &Formula) -> Tri {
        let mut env = BTreeMap::new();
        self.eval(&mut env, f)
    }
}

// ---------------------------------------------------------------------------
// Compiled ground rules
// ---------------------------------------------------------------------------

/// A triple shape read or written by a rule; `None` sides match anything.
#[derive(Debug, Clone, Copy)]
struct AtomPattern {
    pred: u32,
    subj: Option<u32>,
    obj: Option<u32>,
}

impl AtomPattern {
    fn matches(&self, t: IdTriple) -> bool {
        self.pred == t.0
            && self.subj.map_or(true, |s| s == t.1)
            && self.obj.map_or(true, |o| o == t.2)
    }
}

/// One ground rule instance, pre-resolved against the universe.
#[derive(Debug, Clone)]
struct CompiledRule {
    /// Condition with strong negation pushed onto atoms.
    cond: Formula,
    /// `None` both for constraints and for conclusions that cannot hold in
    /// any interpretation (either way the condition must stay false).
    concl: Option<(bool, IdTriple)>,
    /// Every triple shape the instance reads or writes, including the
    /// implicit property typing of each atom predicate.
    patterns: Vec<AtomPattern>,
}

fn collect_atoms<'f>(f: &'f Formula, out: &mut Vec<&'f SignedTriple>) {
    match f {
        Formula::Atom(t) => out.push(t),
        Formula::StrongNeg(g) | Formula::WeakNeg(g) => collect_atoms(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
        Formula::Exists(_, g) | Formula::Forall(_, g) => collect_atoms(g, out),
        Formula::True | Formula::False => {}
    }
}

fn term_pattern(universe: &Universe, t: &Term) -> Option<u32> {
    match t {
        Term::Variable(_) => None,
        _ => universe.denote(t),
    }
}

fn compile_rule(universe: &Universe, rule: Rule) -> CompiledRule {
    let ids = universe.ids;
    let cond = normalize_negation(&rule.condition);
    let concl = match &rule.conclusion {
        Conclusion::False => None,
        Conclusion::Triple(t) => {
            let p = universe.denote(&Term::Uri(t.predicate.clone()));
            let s = universe.denote(&t.subject);
            let o = universe.denote(&t.object);
            match (p, s, o) {
                (Some(p), Some(s), Some(o)) => Some((t.positive, (p, s, o))),
                _ => None,
            }
        }
    };
    let mut atoms = Vec::new();
    collect_atoms(&cond, &mut atoms);
    let concl_triple = match &rule.conclusion {
        Conclusion::Triple(t) => Some(t),
        Conclusion::False => None,
    };
    let mut patterns = Vec::new();
    let mut preds = BTreeSet::new();
    for t in atoms.into_iter().chain(concl_triple) {
        let Some(p) = universe.denote(&Term::Uri(t.predicate.clone())) else {
            continue;
        };
        preds.insert(p);
        patterns.push(AtomPattern {
            pred: p,
            subj: term_pattern(universe, &t.subject),
            obj: term_pattern(universe, &t.object),
        });
    }
    for p in preds {
        patterns.push(AtomPattern {
            pred: ids.rdf_type,
            subj: Some(p),
            obj: Some(ids.rdf_property),
        });
    }
    CompiledRule {
        cond,
        concl,
        patterns,
    }
}

/// Grounds and compiles the program: every instance over the vocabulary,
/// deduplicated, in canonical rule order.
fn compile_program(
    universe: &Universe,
    program: &Program,
    limits: &SearchLimits,
) -> Result<Vec<CompiledRule>, StableError> {
    let ground = ground_program(program, universe.vocabulary(), limits.max_ground_rules)?;
    let mut seen: BTreeSet<Rule> = BTreeSet::new();
    for rule in ground.iter() {
        seen.insert(rule);
    }
    Ok(seen
        .into_iter()
        .map(|r| compile_rule(universe, r))
        .collect())
}

// ---------------------------------------------------------------------------
// Totality bookkeeping
// ---------------------------------------------------------------------------

fn total_classes(truths: &HashSet<IdTriple>, ids: &BuiltinIds) -> BTreeSet<u32> {
    truths
        .iter()
        .filter(|t| t.0 == ids.rdf_type && t.2 == ids.total_class)
        .map(|t| t.1)
        .collect()
}

fn total_properties(truths: &HashSet<IdTriple>, ids: &BuiltinIds) -> BTreeSet<u32> {
    truths
        .iter()
        .filter(|t| t.0 == ids.rdf_type && t.2 == ids.total_property)
        .map(|t| t.1)
        .collect()
}

/// Membership pairs of total classes and properties that the engine leaves
/// undecided, in canonical order.
fn undecided_total_pairs(engine: &ClosureEngine, universe: &Universe) -> BTreeSet<IdTriple> {
    let ids = universe.ids;
    let truths = engine.truths();
    let falsities = engine.falsities();
    let mut out = BTreeSet::new();
    for c in total_classes(truths, &ids) {
        for u in universe.all_ids() {
            let t = (ids.rdf_type, u, c);
            if !truths.contains(&t) && !falsities.contains(&t) {
                out.insert(t);
            }
        }
    }
    for p in total_properties(truths, &ids) {
        for u in universe.all_ids() {
            for v in universe.all_ids() {
                let t = (p, u, v);
                if !truths.contains(&t) && !falsities.contains(&t) {
                    out.insert(t);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Closure replay: checking that a pair's sign derives nothing new
// ---------------------------------------------------------------------------

/// Schema edges of an interpretation, read off its truth set.
struct EdgeIndexes {
    cls_supers: HashMap<u32, Vec<u32>>,
    cls_subs: HashMap<u32, Vec<u32>>,
    prop_supers: HashMap<u32, Vec<u32>>,
    prop_subs: HashMap<u32, Vec<u32>>,
    domains: HashMap<u32, Vec<u32>>,
    ranges: HashMap<u32, Vec<u32>>,
}

fn edge_indexes(truths: &HashSet<IdTriple>, ids: &BuiltinIds) -> EdgeIndexes {
    let mut e = EdgeIndexes {
        cls_supers: HashMap::new(),
        cls_subs: HashMap::new(),
        prop_supers: HashMap::new(),
        prop_subs: HashMap::new(),
        domains: HashMap::new(),
        ranges: HashMap::new(),
    };
    for &(p, s, o) in truths {
        if p == ids.sub_class_of {
            e.cls_supers.entry(s).or_default().push(o);
            e.cls_subs.entry(o).or_default().push(s);
        } else if p == ids.sub_property_of {
            e.prop_supers.entry(s).or_default().push(o);
            e.prop_subs.entry(o).or_default().push(s);
        } else if p == ids.domain {
            e.domains.entry(s).or_default().push(o);
        } else if p == ids.range {
            e.ranges.entry(s).or_default().push(o);
        }
    }
    e
}

/// The immediate closure consequences of asserting `t` with `positive`
/// sign, with co-premises read from `edges` — mirrors the closure engine's
/// consequence schemas for non-schema predicates.
fn replay_consequences(
    t: IdTriple,
    positive: bool,
    edges: &EdgeIndexes,
    ids: &BuiltinIds,
) -> Vec<(bool, IdTriple)> {
    let (p, s, o) = t;
    let mut out = vec![(true, (ids.rdf_type, p, ids.rdf_property))];
    if positive {
        if let Some(sup) = edges.prop_supers.get(&p) {
            for &q in sup {
                out.push((true, (q, s, o)));
            }
        }
        if let Some(ds) = edges.domains.get(&p) {
            for &y in ds {
                out.push((true, (ids.rdf_type, s, y)));
            }
        }
        if let Some(rs) = edges.ranges.get(&p) {
            for &y in rs {
                out.push((true, (ids.rdf_type, o, y)));
            }
        }
        if p == ids.rdf_type {
            if let Some(sup) = edges.cls_supers.get(&o) {
                for &y in sup {
                    out.push((true, (ids.rdf_type, s, y)));
                }
            }
        }
    } else {
        if let Some(subs) = edges.prop_subs.get(&p) {
            for &q in subs {
                out.push((false, (q, s, o)));
            }
        }
        if p == ids.rdf_type {
            if let Some(subs) = edges.cls_subs.get(&o) {
                for &x in subs {
                    out.push((false, (ids.rdf_type, s, x)));
                }
            }
        }
    }
    out
}

/// True when the pair's predicate (or, for typings, its class) plays a
/// schema role in the closure, so that a sign choice could restructure
/// derivations — such pairs are never left free.
fn schema_pair(t: IdTriple, ids: &BuiltinIds) -> bool {
    let (p, _, o) = t;
    if p == ids.sub_class_of || p == ids.sub_property_of || p == ids.domain || p == ids.range {
        return true;
    }
    if p == ids.rdf_type {
        if o == ids.rdfs_class
            || o == ids.rdf_property
            || o == ids.rdfs_datatype
            || o == ids.total_class
            || o == ids.total_property
        {
            return true;
        }
        if ids.cmp == Some(o) {
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Guided closure and the chain check
// ---------------------------------------------------------------------------

enum GuidedOutcome {
    Ok,
    Incoherent,
    NotBelowM,
}

/// Closes the engine while copying the candidate's sign for every
/// undecided membership pair of a total class or property, failing if the
/// result turns incoherent or exceeds the candidate.
fn guided_close(
    engine: &mut ClosureEngine,
    universe: &Universe,
    m: &HerbrandInterpretation,
) -> GuidedOutcome {
    loop {
        engine.run();
        if !engine.is_coherent() {
            return GuidedOutcome::Incoherent;
        }
        if !below(engine, m) {
            return GuidedOutcome::NotBelowM;
        }
        let pairs = undecided_total_pairs(engine, universe);
        if pairs.is_empty() {
            return GuidedOutcome::Ok;
        }
        for t in pairs {
            if m.contains_pt(t) {
                engine.add_pt(t);
            } else if m.contains_pf(t) {
                engine.add_pf(t);
            } else {
                return GuidedOutcome::NotBelowM;
            }
        }
    }
}

fn below(engine: &ClosureEngine, m: &HerbrandInterpretation) -> bool {
    engine.truths().iter().all(|t| m.contains_pt(*t))
        && engine.falsities().iter().all(|t| m.contains_pf(*t))
}

fn reached(engine: &ClosureEngine, m: &HerbrandInterpretation) -> bool {
    engine.truths() == m.truth_ids() && engine.falsities() == m.falsity_ids()
}

/// The undecided atoms of the interval `[engine, m]`, as signed triples in
/// canonical order.
fn interval_gap(engine: &ClosureEngine, m: &HerbrandInterpretation) -> Vec<(bool, IdTriple)> {
    let mut gap: BTreeSet<(bool, IdTriple)> = BTreeSet::new();
    for t in m.truth_ids() {
        if !engine.truths().contains(t) {
            gap.insert((true, *t));
        }
    }
    for t in m.falsity_ids() {
        if !engine.falsities().contains(t) {
            gap.insert((false, *t));
        }
    }
    gap.into_iter().collect()
}

/// Every closed, coherent interpretation in `[engine, m]` that decides the
/// membership pairs of its own total classes and properties, as truth and
/// falsity sets.
fn interval_interpretations(
    engine: &ClosureEngine,
    universe: &Universe,
    m: &HerbrandInterpretation,
    cap: usize,
) -> Result<Vec<(HashSet<IdTriple>, HashSet<IdTriple>)>, StableError> {
    let gap = interval_gap(engine, m);
    if gap.len() > cap {
        return Err(limit(
            "exact persistence",
            format!("interval width {} exceeds cap {}", gap.len(), cap),
        ));
    }
    let mut out: Vec<(HashSet<IdTriple>, HashSet<IdTriple>)> = Vec::new();
    for mask in 0u64..(1u64 << gap.len()) {
        let mut probe = engine.clone();
        for (i, &(positive, t)) in gap.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if positive {
                    probe.add_pt(t);
                } else {
                    probe.add_pf(t);
                }
            }
        }
        probe.run();
        if !probe.is_coherent() || !below(&probe, m) {
            continue;
        }
        if !undecided_total_pairs(&probe, universe).is_empty() {
            continue;
        }
        let sig = (probe.truths().clone(), probe.falsities().clone());
        if !out.contains(&sig) {
            out.push(sig);
        }
    }
    Ok(out)
}

/// Whether the condition holds in every interpretation of the set.
fn holds_in_all(
    universe: &Universe,
    interps: &[(HashSet<IdTriple>, HashSet<IdTriple>)],
    cond: &Formula,
) -> bool {
    interps.iter().all(|(pt, pf)| {
        let view = BoundsView {
            lower_pt: pt,
            lower_pf: pf,
            upper_pt: pt,
            upper_pf: pf,
            excluded_pt: None,
            excluded_pf: None,
            overlay: None,
        };
        FormulaEval::new(universe, &view).eval_closed(cond) == Tri::True
    })
}

#[derive(Clone, Copy, PartialEq)]
enum RuleState {
    Open,
    Fired,
    Refuted,
}

struct ChainOutcome {
    stable: bool,
    approximate: bool,
    steps: usize,
}

/// Runs the layer-by-layer reconstruction of `m` from the skolemized graph
/// and reports whether it reproduces `m` exactly.
fn chain_verify_compiled(
    universe: &Arc<Universe>,
    skg: &Graph,
    rules: &[CompiledRule],
    m: &HerbrandInterpretation,
    limits: &SearchLimits,
    deadline: Instant,
) -> Result<ChainOutcome, StableError> {
    if !check_conditions(m, universe.cfg()).is_empty() {
        return Ok(ChainOutcome {
            stable: false,
            approximate: false,
            steps: 0,
        });
    }
    let mut engine = ClosureEngine::new(universe.clone());
    engine.assert_graph(skg)?;
    let mut state = vec![RuleState::Open; rules.len()];
    let mut approximate = false;
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > limits.max_chain_steps {
            return Err(limit(
                "chain steps",
                format!("no fixpoint after {} layers", limits.max_chain_steps),
            ));
        }
        if Instant::now() > deadline {
            return Err(limit("time", "chain check timed out"));
        }
        match guided_close(&mut engine, universe, m) {
            GuidedOutcome::Ok => {}
            GuidedOutcome::Incoherent | GuidedOutcome::NotBelowM => {
                return Ok(ChainOutcome {
                    stable: false,
                    approximate,
                    steps,
                });
            }
        }
        if reached(&engine, m) {
            // The candidate must also be a model outright: every rule with
            // a true condition has its conclusion, and no constraint
            // condition holds.
            let ok = rules_hold(universe, &engine, rules);
            return Ok(ChainOutcome {
                stable: ok,
                approximate: false,
                steps,
            });
        }
        // Three-valued pass: fire rules whose condition holds across the
        // whole remaining interval, drop rules whose condition fails it.
        let mut fired_any = false;
        let mut undecided: Vec<usize> = Vec::new();
        let actions: Vec<(usize, Tri)> = {
            let view = BoundsView {
                lower_pt: engine.truths(),
                lower_pf: engine.falsities(),
                upper_pt: m.truth_ids(),
                upper_pf: m.falsity_ids(),
                excluded_pt: None,
                excluded_pf: None,
                overlay: None,
            };
            rules
                .iter()
                .enumerate()
                .filter(|(i, _)| state[*i] == RuleState::Open)
                .map(|(i, r)| {
                    let eval = FormulaEval::new(universe, &view);
                    (i, eval.eval_closed(&r.cond))
                })
                .collect()
        };
        for (i, verdict) in actions {
            match verdict {
                Tri::True => {
                    state[i] = RuleState::Fired;
                    match rules[i].concl {
                        None => {
                            return Ok(ChainOutcome {
                                stable: false,
                                approximate: false,
                                steps,
                            });
                        }
                        Some((true, t)) => engine.add_pt(t),
                        Some((false, t)) => engine.add_pf(t),
                    }
                    fired_any = true;
                }
                Tri::False => state[i] = RuleState::Refuted,
                Tri::Unknown => undecided.push(i),
            }
        }
        if fired_any {
            continue;
        }
        if undecided.is_empty() {
            // Nothing can fire any more and the candidate is not reached.
            return Ok(ChainOutcome {
                stable: false,
                approximate: false,
                steps,
            });
        }
        // Stall: decide the undecided rules exactly over the remaining
        // interval, within the enumeration cap.
        match interval_interpretations(&engine, universe, m, limits.exact_interval_cap) {
            Ok(interps) => {
                let mut progressed = false;
                for i in undecided {
                    if holds_in_all(universe, &interps, &rules[i].cond) {
                        state[i] = RuleState::Fired;
                        match rules[i].concl {
                            None => {
                                return Ok(ChainOutcome {
                                    stable: false,
                                    approximate: false,
                                    steps,
                                });
                            }
                            Some((true, t)) => {
                                if !engine.truths().contains(&t) {
                                    progressed = true;
                                }
                                engine.add_pt(t);
                            }
                            Some((false, t)) => {
                                if !engine.falsities().contains(&t) {
                                    progressed = true;
                                }
                                engine.add_pf(t);
                            }
                        }
                    }
                }
                if !progressed {
                    // True fixpoint below the candidate: an exact reject.
                    return Ok(ChainOutcome {
                        stable: false,
                        approximate: false,
                        steps,
                    });
                }
            }
            Err(StableError::Limit { .. }) => {
                // Interval too wide to enumerate: give up on the stalled
                // rules and reject approximately.
                approximate = true;
                return Ok(ChainOutcome {
                    stable: false,
                    approximate,
                    steps,
                });
            }
            Err(e) => return Err(e),
        }
    }
}

fn crisp_condition(universe: &Universe, engine: &ClosureEngine, cond: &Formula) -> Tri {
    let view = BoundsView {
        lower_pt: engine.truths(),
        lower_pf: engine.falsities(),
        upper_pt: engine.truths(),
        upper_pf: engine.falsities(),
        excluded_pt: None,
        excluded_pf: None,
        overlay: None,
    };
    FormulaEval::new(universe, &view).eval_closed(cond)
}

/// Verifies a candidate stable model of the ontology by rebuilding it
/// layer by layer.  The candidate must live in a universe built for the
/// same ontology and configuration.
pub fn chain_verify(
    o: &Ontology,
    m: &HerbrandInterpretation,
    limits: &SearchLimits,
) -> Result<ChainCheck, StableError> {
    let universe = m.universe().clone();
    let skg = skolemize(&o.graph, None)?;
    let rules = compile_program(&universe, &o.program, limits)?;
    let deadline = Instant::now() + limits.timeout;
    let out = chain_verify_compiled(&universe, &skg, &rules, m, limits, deadline)?;
    Ok(ChainCheck {
        stable: out.stable,
        approximate: out.approximate,
        steps: out.steps,
    })
}

/// Decides which ground rules keep their condition true across every
/// closed, coherent interpretation between `i` and `m` (both over the same
/// universe).  In three-valued mode undecided rules count as not
/// persistent and set the `approximate` flag; in exact mode they are
/// enumerated within the interval cap.
pub fn persistent_rules(
    i: &HerbrandInterpretation,
    m: &HerbrandInterpretation,
    rules: &Program,
    limits: &SearchLimits,
) -> Result<PersistenceReport, StableError> {
    let universe = i.universe().clone();
    if !i.leq(m)? {
        return Err(limit("interval", "lower bound is not below upper bound"));
    }
    let mut engine = ClosureEngine::new(universe.clone());
    for t in i.truth_ids() {
        engine.add_pt(*t);
    }
    for t in i.falsity_ids() {
        engine.add_pf(*t);
    }
    engine.run();
    let mut persistent = Program::new();
    let mut approximate = false;
    let mut exact_interps: Option<Vec<(HashSet<IdTriple>, HashSet<IdTriple>)>> = None;
    for rule in rules {
        if !crate::model::rule_free_vars(rule).is_empty() {
            return Err(limit("persistence input", format!("rule not ground: {rule:?}")));
        }
        let compiled = compile_rule(&universe, rule.clone());
        let view = BoundsView {
            lower_pt: i.truth_ids(),
            lower_pf: i.falsity_ids(),
            upper_pt: m.truth_ids(),
            upper_pf: m.falsity_ids(),
            excluded_pt: None,
            excluded_pf: None,
            overlay: None,
        };
        let verdict = FormulaEval::new(&universe, &view).eval_closed(&compiled.cond);
        match verdict {
            Tri::True => {
                persistent.insert(rule.clone());
            }
            Tri::False => {}
            Tri::Unknown => match limits.persistence_mode {
                PersistenceMode::ThreeValued => approximate = true,
                PersistenceMode::Exact => {
                    if exact_interps.is_none() {
                        exact_interps = Some(interval_interpretations(
                            &engine,
                            &universe,
                            m,
                            limits.exact_interval_cap,
                        )?);
                    }
                    let interps = exact_interps.as_ref().unwrap();
                    if holds_in_all(&universe, interps, &compiled.cond) {
                        persistent.insert(rule.clone());
                    }
                }
            },
        }
    }
    Ok(PersistenceReport {
        persistent,
        approximate,
    })
}

// ---------------------------------------------------------------------------
// Model families
// ---------------------------------------------------------------------------

enum FamilyKind {
    /// Members are the core plus an independent sign choice per free pair.
    Product,
    /// Members are the coherent closed extensions of the core that decide
    /// the queried pairs and satisfy every rule; used when every property
    /// is total and pair choices interact through the closure.
    Closure { rules: Vec<CompiledRule> },
}

/// A set of stable models sharing one derived core: each member decides
/// the free pairs its own way.
pub struct ModelFamily {
    universe: Arc<Universe>,
    core_engine: ClosureEngine,
    core: HerbrandInterpretation,
    free: BTreeSet<IdTriple>,
    kind: FamilyKind,
}

impl fmt::Debug for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelFamily")
            .field("pt", &self.core.pt_count())
            .field("pf", &self.core.pf_count())
            .field("free_pairs", &self.free.len())
            .field("open_ended", &self.is_open_ended())
            .finish()
    }
}

impl ModelFamily {
    /// The truths and falsities common to every member.
    pub fn core(&self) -> &HerbrandInterpretation {
        &self.core
    }

    /// The membership pairs each member decides freely, as
    /// (predicate, subject, object) resources.
    pub fn undecided_pairs(&self) -> Vec<(crate::model::Resource, crate::model::Resource, crate::model::Resource)> {
        self.free
            .iter()
            .map(|&(p, s, o)| {
                (
                    self.universe.resource(p).clone(),
                    self.universe.resource(s).clone(),
                    self.universe.resource(o).clone(),
                )
            })
            .collect()
    }

    /// True for the closure-defined family of a fully total ontology,
    /// whose member set is not a simple sign product.
    pub fn is_open_ended(&self) -> bool {
        matches!(self.kind, FamilyKind::Closure { .. })
    }

    pub fn is_singleton(&self) -> bool {
        matches!(self.kind, FamilyKind::Product) && self.free.is_empty()
    }

    /// Number of members, when it is a plain sign product small enough to
    /// count.
    pub fn member_count(&self) -> Option<u128> {
        match self.kind {
            FamilyKind::Product if self.free.len() < 128 => Some(1u128 << self.free.len()),
            _ => None,
        }
    }

    fn member(&self, chosen_pt: &HashSet<IdTriple>, chosen_pf: &HashSet<IdTriple>) -> HerbrandInterpretation {
        let mut pt = self.core.truth_ids().clone();
        let mut pf = self.core.falsity_ids().clone();
        pt.extend(chosen_pt.iter().copied());
        pf.extend(chosen_pf.iter().copied());
        HerbrandInterpretation::from_id_sets(self.universe.clone(), pt, pf)
    }

    /// The member taking every free pair negatively (for closure-defined
    /// families, the first valid completion in enumeration order, with
    /// remaining pairs completed negatively).
    pub fn representative_min(&self, limits: &SearchLimits) -> Result<HerbrandInterpretation, StableError> {
        match &self.kind {
            FamilyKind::Product => {
                let pf: HashSet<IdTriple> = self.free.iter().copied().collect();
                Ok(self.member(&HashSet::new(), &pf))
            }
            FamilyKind::Closure { .. } => self.closure_representative(limits, false),
        }
    }

    /// The member taking every free pair positively (for closure-defined
    /// families, the last valid completion in enumeration order).
    pub fn representative_max(&self, limits: &SearchLimits) -> Result<HerbrandInterpretation, StableError> {
        match &self.kind {
            FamilyKind::Product => {
                let pt: HashSet<IdTriple> = self.free.iter().copied().collect();
                Ok(self.member(&pt, &HashSet::new()))
            }
            FamilyKind::Closure { .. } => self.closure_representative(limits, true),
        }
    }

    /// Up to `limit` members in canonical order (sign vectors over the
    /// free pairs, negative first).  Closure-defined families refuse.
    pub fn completions(&self, limit_n: usize) -> Result<Vec<HerbrandInterpretation>, StableError> {
        match self.kind {
            FamilyKind::Closure { .. } => Err(limit(
                "family completions",
                "closure-defined family members cannot be enumerated by sign vector",
            )),
            FamilyKind::Product => {
                if self.free.len() > 24 {
                    return Err(limit(
                        "family completions",
                        format!("{} free pairs", self.free.len()),
                    ));
                }
                let pairs: Vec<IdTriple> = self.free.iter().copied().collect();
                let total = 1usize << pairs.len();
                let mut out = Vec::new();
                for mask in 0..total.min(limit_n) {
                    let mut pt = HashSet::new();
                    let mut pf = HashSet::new();
                    for (idx, &t) in pairs.iter().enumerate() {
                        if mask & (1 << idx) != 0 {
                            pt.insert(t);
                        } else {
                            pf.insert(t);
                        }
                    }
                    out.push(self.member(&pt, &pf));
                }
                Ok(out)
            }
        }
    }

    /// Builds one member by asking `pick_pt` for each free pair in
    /// canonical order; `None` when the picks do not extend to a valid
    /// member (possible only for closure-defined families).
    pub fn complete_with(
        &self,
        mut pick_pt: impl FnMut(usize, IdSignedPair) -> bool,
        limits: &SearchLimits,
    ) -> Result<Option<HerbrandInterpretation>, StableError> {
        match &self.kind {
            FamilyKind::Product => {
                let mut pt = HashSet::new();
                let mut pf = HashSet::new();
                for (i, &t) in self.free.iter().enumerate() {
                    if pick_pt(i, self.pair_of(t)) {
                        pt.insert(t);
                    } else {
                        pf.insert(t);
                    }
                }
                Ok(Some(self.member(&pt, &pf)))
            }
            FamilyKind::Closure { rules } => {
                let rel = closure_rel_pairs(&self.universe, rules, &[], limits)?;
                let mut probe = self.core_engine.clone();
                for (i, &t) in rel.iter().enumerate() {
                    if pick_pt(i, self.pair_of(t)) {
                        probe.add_pt(t);
                    } else {
                        probe.add_pf(t);
                    }
                }
                probe.run();
                if !probe.is_coherent() || !rules_hold(&self.universe, &probe, rules) {
                    return Ok(None);
                }
                Ok(Some(greedy_negative_completion(probe)))
            }
        }
    }

    fn pair_of(&self, t: IdTriple) -> IdSignedPair {
        (
            self.universe.resource(t.0).clone(),
            self.universe.resource(t.1).clone(),
            self.universe.resource(t.2).clone(),
        )
    }

    fn closure_representative(
        &self,
        limits: &SearchLimits,
        prefer_positive: bool,
    ) -> Result<HerbrandInterpretation, StableError> {
        let FamilyKind::Closure { rules } = &self.kind else {
            unreachable!("product families are handled by the caller");
        };
        let rel = closure_rel_pairs(&self.universe, rules, &[], limits)?;
        let n = rel.len();
        for raw in 0u64..(1u64 << n) {
            let mask = if prefer_positive { (1u64 << n) - 1 - raw } else { raw };
            let mut probe = self.core_engine.clone();
            for (i, &t) in rel.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    probe.add_pt(t);
                } else {
                    probe.add_pf(t);
                }
            }
            probe.run();
            if probe.is_coherent() && rules_hold(&self.universe, &probe, rules) {
                return Ok(greedy_negative_completion(probe));
            }
        }
        Err(limit("family representative", "no valid completion found"))
    }

    /// Whether every member satisfies the closed formula (free variables
    /// read universally).
    pub fn entails(&self, f: &Formula, limits: &SearchLimits) -> Result<bool, StableError> {
        let closed = close_universally(f);
        self.entails_with(&BTreeMap::new(), &closed, limits)
    }

    fn entails_with(
        &self,
        env: &BTreeMap<String, u32>,
        f: &Formula,
        limits: &SearchLimits,
    ) -> Result<bool, StableError> {
        match &self.kind {
            FamilyKind::Product => {
                let found_false = self.product_search(env, f, Tri::False, limits)?;
                Ok(!found_false)
            }
            FamilyKind::Closure { rules } => {
                let verdicts = self.closure_verdicts(env, f, rules, limits)?;
                Ok(verdicts.into_iter().all(|v| v))
            }
        }
    }

    fn some_member_satisfies_with(
        &self,
        env: &BTreeMap<String, u32>,
        f: &Formula,
        limits: &SearchLimits,
    ) -> Result<bool, StableError> {
        match &self.kind {
            FamilyKind::Product => self.product_search(env, f, Tri::True, limits),
            FamilyKind::Closure { rules } => {
                let verdicts = self.closure_verdicts(env, f, rules, limits)?;
                Ok(verdicts.into_iter().any(|v| v))
            }
        }
    }

    /// Branch-and-bound over sign choices for the free pairs the formula
    /// actually reads, hunting for a member where the formula evaluates to
    /// `target`.
    fn product_search(
        &self,
        env: &BTreeMap<String, u32>,
        f: &Formula,
        target: Tri,
        limits: &SearchLimits,
    ) -> Result<bool, StableError> {
        let nf = normalize_negation(f);
        let mut budget = limits.max_branches;
        let mut chosen_pt = HashSet::new();
        let mut chosen_pf = HashSet::new();
        self.product_search_rec(env, &nf, target, &mut chosen_pt, &mut chosen_pf, &mut budget)
    }

    fn product_search_rec(
        &self,
        env: &BTreeMap<String, u32>,
        f: &Formula,
        target: Tri,
        chosen_pt: &mut HashSet<IdTriple>,
        chosen_pf: &mut HashSet<IdTriple>,
        budget: &mut usize,
    ) -> Result<bool, StableError> {
        if *budget == 0 {
            return Err(limit("family query", "sign search budget exhausted"));
        }
        *budget -= 1;
        let (verdict, witness) = {
            let view = MemberView {
                core_pt: self.core.truth_ids(),
                core_pf: self.core.falsity_ids(),
                free: &self.free,
                chosen_pt,
                chosen_pf,
            };
            let eval = FormulaEval::new(&self.universe, &view).with_totals(&self.free);
            let mut e = env.clone();
            let v = eval.eval(&mut e, f);
            (v, eval.witness.get())
        };
        if verdict != Tri::Unknown {
            return Ok(verdict == target);
        }
        let Some(w) = witness else {
            // Undecided with no recorded atom cannot happen; treat
            // conservatively as not found.
            return Ok(false);
        };
        for positive in [false, true] {
            if positive {
                chosen_pt.insert(w);
            } else {
                chosen_pf.insert(w);
            }
            let found = self.product_search_rec(env, f, target, chosen_pt, chosen_pf, budget)?;
            if positive {
                chosen_pt.remove(&w);
            } else {
                chosen_pf.remove(&w);
            }
            if found {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// The formula's crisp verdict in each valid completion of the queried
    /// pairs of a closure-defined family.
    fn closure_verdicts(
        &self,
        env: &BTreeMap<String, u32>,
        f: &Formula,
        rules: &[CompiledRule],
        limits: &SearchLimits,
    ) -> Result<Vec<bool>, StableError> {
        let nf = normalize_negation(f);
        let query_patterns = formula_patterns(&self.universe, &nf);
        let rel = closure_rel_pairs(&self.universe, rules, &query_patterns, limits)?;
        let n = rel.len();
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << n) {
            let mut probe = self.core_engine.clone();
            for (i, &t) in rel.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    probe.add_pt(t);
                } else {
                    probe.add_pf(t);
                }
            }
            probe.run();
            if !probe.is_coherent() || !rules_hold(&self.universe, &probe, rules) {
                continue;
            }
            let view = BoundsView {
                lower_pt: probe.truths(),
                lower_pf: probe.falsities(),
                upper_pt: probe.truths(),
                upper_pf: probe.falsities(),
                excluded_pt: None,
                excluded_pf: None,
                overlay: None,
            };
            let eval = FormulaEval::new(&self.universe, &view);
            let mut e = env.clone();
            out.push(eval.eval(&mut e, &nf) == Tri::True);
        }
        Ok(out)
    }

    /// The member-wise answer sets for an open query: for each way of
    /// deciding the pairs the query reads, the set of bindings the member
    /// satisfies (empty sets dropped by the caller).
    fn binding_sets(
        &self,
        f: &Formula,
        vars: &[String],
        vocabulary: &[Term],
        limits: &SearchLimits,
    ) -> Result<BTreeSet<BTreeSet<Binding>>, StableError> {
        let nf = normalize_negation(f);
        match &self.kind {
            FamilyKind::Product => {
                let patterns = formula_patterns(&self.universe, &nf);
                let rel: Vec<IdTriple> = self
                    .free
                    .iter()
                    .copied()
                    .filter(|t| patterns.iter().any(|p| p.matches(*t)))
                    .collect();
                if rel.len() > 20 {
                    return Err(limit(
                        "credulous query",
                        format!("query reads {} free pairs", rel.len()),
                    ));
                }
                let mut out = BTreeSet::new();
                for mask in 0u64..(1u64 << rel.len()) {
                    let mut chosen_pt = HashSet::new();
                    let mut chosen_pf = HashSet::new();
                    for (i, &t) in rel.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            chosen_pt.insert(t);
                        } else {
                            chosen_pf.insert(t);
                        }
                    }
                    let view = MemberView {
                        core_pt: self.core.truth_ids(),
                        core_pf: self.core.falsity_ids(),
                        free: &self.free,
                        chosen_pt: &chosen_pt,
                        chosen_pf: &chosen_pf,
                    };
                    let bindings =
                        crisp_binding_set(&self.universe, &view, &nf, vars, vocabulary, Some(&self.free))?;
                    out.insert(bindings);
                }
                Ok(out)
            }
            FamilyKind::Closure { rules } => {
                let query_patterns = formula_patterns(&self.universe, &nf);
                let rel = closure_rel_pairs(&self.universe, rules, &query_patterns, limits)?;
                let mut out = BTreeSet::new();
                for mask in 0u64..(1u64 << rel.len()) {
                    let mut probe = self.core_engine.clone();
                    for (i, &t) in rel.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            probe.add_pt(t);
                        } else {
                            probe.add_pf(t);
                        }
                    }
                    probe.run();
                    if !probe.is_coherent() || !rules_hold(&self.universe, &probe, rules) {
                        continue;
                    }
                    let view = BoundsView {
                        lower_pt: probe.truths(),
                        lower_pf: probe.falsities(),
                        upper_pt: probe.truths(),
                        upper_pf: probe.falsities(),
                        excluded_pt: None,
                        excluded_pf: None,
                        overlay: None,
                    };
                    let bindings =
                        crisp_binding_set(&self.universe, &view, &nf, vars, vocabulary, None)?;
                    out.insert(bindings);
                }
                Ok(out)
            }
        }
    }
}

/// A free pair as (predicate, subject, object) resources.
pub type IdSignedPair = (
    crate::model::Resource,
    crate::model::Resource,
    crate::model::Resource,
);

fn close_universally(f: &Formula) -> Formula {
    let mut closed = f.clone();
    let mut vars: Vec<String> = free_vars(f).into_iter().collect();
    vars.sort();
    for v in vars.into_iter().rev() {
        closed = Formula::forall(v, closed);
    }
    closed
}

/// All bindings of `vars` over the vocabulary satisfied by the (crisp or
/// totality-shortcut-decided) view; errors if a verdict stays undecided.
fn crisp_binding_set<V: IntervalView>(
    universe: &Universe,
    view: &V,
    f: &Formula,
    vars: &[String],
    vocabulary: &[Term],
    totals: Option<&BTreeSet<IdTriple>>,
) -> Result<BTreeSet<Binding>, StableError> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(BTreeMap::new(), Vec::new())];
    while let Some((env, terms)) = stack.pop() {
        let depth = terms.len();
        if depth == vars.len() {
            let mut eval = FormulaEval::new(universe, view);
            if let Some(t) = totals {
                eval = eval.with_totals(t);
            }
            let mut e: BTreeMap<String, u32> = env;
            let verdict = eval.eval(&mut e, f);
            if verdict == Tri::Unknown {
                return Err(limit(
                    "credulous query",
                    "a member verdict depends on pairs outside the analyzed set",
                ));
            }
            if verdict == Tri::True {
                let mut b = Binding::new();
                for (v, t) in vars.iter().zip(&terms) {
                    b.insert(v.clone(), (*t as &Term).clone());
                }
                out.insert(b);
            }
            continue;
        }
        for term in vocabulary {
            let Some(id) = universe.denote(term) else {
                continue;
            };
            let mut env2 = env.clone();
            env2.insert(vars[depth].clone(), id);
            let mut terms2: Vec<&Term> = terms.clone();
            terms2.push(term);
            stack.push((env2, terms2));
        }
    }
    Ok(out)
}

/// Triple shapes a formula can read: its atoms (variables as wildcards)
/// plus the property typing of each atom predicate.
fn formula_patterns(universe: &Universe, f: &Formula) -> Vec<AtomPattern> {
    let ids = universe.ids;
    let mut atoms = Vec::new();
    collect_atoms(f, &mut atoms);
    let mut patterns = Vec::new();
    let mut preds = BTreeSet::new();
    for t in atoms {
        let Some(p) = universe.denote(&Term::Uri(t.predicate.clone())) else {
            continue;
        };
        preds.insert(p);
        patterns.push(AtomPattern {
            pred: p,
            subj: term_pattern(universe, &t.subject),
            obj: term_pattern(universe, &t.object),
        });
    }
    for p in preds {
        patterns.push(AtomPattern {
            pred: ids.rdf_type,
            subj: Some(p),
            obj: Some(ids.rdf_property),
        });
    }
    patterns
}

/// The undecided pairs a closure-defined family must decide to answer a
/// query: everything its rules read or write plus everything the query
/// reads, expanded against the universe under a hard cap.
fn closure_rel_pairs(
    universe: &Universe,
    rules: &[CompiledRule],
    query_patterns: &[AtomPattern],
    _limits: &SearchLimits,
) -> Result<Vec<IdTriple>, StableError> {
    const CAP: usize = 20;
    let mut pairs: BTreeSet<IdTriple> = BTreeSet::new();
    let add_pattern = |pat: &AtomPattern, pairs: &mut BTreeSet<IdTriple>| -> bool {
        match (pat.subj, pat.obj) {
            (Some(s), Some(o)) => {
                pairs.insert((pat.pred, s, o));
                pairs.len() <= CAP
            }
            _ => {
                // A wildcard pattern expands to every pair of the
                // predicate — too many to enumerate exactly.
                for s in universe.all_ids() {
                    for o in universe.all_ids() {
                        pairs.insert((pat.pred, s, o));
                        if pairs.len() > CAP {
                            return false;
                        }
                    }
                }
                true
            }
        }
    };
    for r in rules {
        for pat in &r.patterns {
            if !add_pattern(pat, &mut pairs) {
                return Err(limit(
                    "total-ontology query",
                    format!("more than {CAP} pairs to decide"),
                ));
            }
        }
    }
    for pat in query_patterns {
        if !add_pattern(pat, &mut pairs) {
            return Err(limit(
                "total-ontology query",
                format!("more than {CAP} pairs to decide"),
            ));
        }
    }
    // Decided pairs need no branching.
    Ok(pairs.into_iter().collect())
}

fn rules_hold(universe: &Universe, engine: &ClosureEngine, rules: &[CompiledRule]) -> bool {
    rules.iter().all(|r| {
        let verdict = crisp_condition(universe, engine, &r.cond);
        if verdict != Tri::True {
            return true;
        }
        match r.concl {
            None => false,
            Some((true, t)) => engine.truths().contains(&t),
            Some((false, t)) => engine.falsities().contains(&t),
        }
    })
}

/// Completes a coherent closed interpretation of a fully total ontology:
/// undecided typing pairs become falsities, then undecided pairs of every
/// property the result types positively become falsities too.  Properties
/// typed negatively keep their pairs undecided.
fn greedy_negative_completion(mut engine: ClosureEngine) -> HerbrandInterpretation {
    let universe = engine.universe().clone();
    let ids = universe.ids;
    loop {
        let mut added = false;
        let typing_pairs: Vec<IdTriple> = universe
            .all_ids()
            .flat_map(|u| universe.all_ids().map(move |c| (ids.rdf_type, u, c)))
            .collect();
        for t in typing_pairs {
            if !engine.truths().contains(&t) && !engine.falsities().contains(&t) {
                engine.add_pf(t);
                added = true;
            }
        }
        engine.run();
        let props: Vec<u32> = universe
            .all_ids()
            .filter(|&p| engine.truths().contains(&(ids.rdf_type, p, ids.rdf_property)))
            .collect();
        for p in props {
            for u in universe.all_ids() {
                for v in universe.all_ids() {
                    let t = (p, u, v);
                    if !engine.truths().contains(&t) && !engine.falsities().contains(&t) {
                        engine.add_pf(t);
                        added = true;
                    }
                }
            }
        }
        engine.run();
        if !added {
            break;
        }
    }
    engine.interpretation()
}

// ---------------------------------------------------------------------------
// The search
// ---------------------------------------------------------------------------

struct SearchCtx {
    universe: Arc<Universe>,
    skg: Graph,
    rules: Vec<CompiledRule>,
    upper_pt: HashSet<IdTriple>,
    upper_pf: HashSet<IdTriple>,
    limits: SearchLimits,
    deadline: Instant,
}

#[derive(Clone)]
struct Node {
    engine: ClosureEngine,
    excluded_pt: HashSet<IdTriple>,
    excluded_pf: HashSet<IdTriple>,
    state: Vec<RuleState>,
}

enum Propagation {
    Dead,
    Live,
}

/// Expands the envelope with both signs of every membership pair of every
/// total class and property, iterating because expansion can surface new
/// totality declarations.
fn expand_totality_envelope(engine: &mut ClosureEngine, universe: &Universe) {
    let ids = universe.ids;
    loop {
        let mut added = false;
        for c in total_classes(engine.truths(), &ids) {
            for u in universe.all_ids() {
                let t = (ids.rdf_type, u, c);
                if !engine.truths().contains(&t) {
                    engine.add_pt(t);
                    added = true;
                }
                if !engine.falsities().contains(&t) {
                    engine.add_pf(t);
                    added = true;
                }
            }
        }
        for p in total_properties(engine.truths(), &ids) {
            for u in universe.all_ids() {
                for v in universe.all_ids() {
                    let t = (p, u, v);
                    if !engine.truths().contains(&t) {
                        engine.add_pt(t);
                        added = true;
                    }
                    if !engine.falsities().contains(&t) {
                        engine.add_pf(t);
                        added = true;
                    }
                }
            }
        }
        if !added {
            return;
        }
        engine.run();
    }
}

/// Builds the upper envelope: close the base with every live conclusion
/// and both signs of totality pairs, then drop conclusions of rules whose
/// condition is false on the whole interval and rebuild, until stable.
fn build_envelope(
    base: &ClosureEngine,
    universe: &Universe,
    rules: &[CompiledRule],
) -> (HashSet<IdTriple>, HashSet<IdTriple>) {
    let mut live = vec![true; rules.len()];
    loop {
        let mut eng = base.clone();
        for (i, r) in rules.iter().enumerate() {
            if !live[i] {
                continue;
            }
            match r.concl {
                Some((true, t)) => eng.add_pt(t),
                Some((false, t)) => eng.add_pf(t),
                None => {}
            }
        }
        eng.run();
        expand_totality_envelope(&mut eng, universe);
        let mut changed = false;
        {
            let view = BoundsView {
                lower_pt: base.truths(),
                lower_pf: base.falsities(),
                upper_pt: eng.truths(),
                upper_pf: eng.falsities(),
                excluded_pt: None,
                excluded_pf: None,
                overlay: None,
            };
            for (i, r) in rules.iter().enumerate() {
                if !live[i] {
                    continue;
                }
                let eval = FormulaEval::new(universe, &view);
                if eval.eval_closed(&r.cond) == Tri::False {
                    live[i] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return (eng.truths().clone(), eng.falsities().clone());
        }
    }
}

fn propagate(ctx: &SearchCtx, node: &mut Node) -> Result<Propagation, StableError> {
    let ids = ctx.universe.ids;
    loop {
        node.engine.run();
        if !node.engine.is_coherent() {
            return Ok(Propagation::Dead);
        }
        if node.excluded_pt.iter().any(|t| node.engine.truths().contains(t))
            || node.excluded_pf.iter().any(|t| node.engine.falsities().contains(t))
        {
            return Ok(Propagation::Dead);
        }
        let mut progressed = false;
        // Declared total properties are properties in every model below
        // this node: deciding any pair either way derives the typing.
        for p in total_properties(node.engine.truths(), &ids) {
            let t = (ids.rdf_type, p, ids.rdf_property);
            if !node.engine.truths().contains(&t) {
                node.engine.add_pt(t);
                progressed = true;
            }
        }
        // Pairs of total classes and properties with one sign excluded are
        // forced the other way.
        for t in undecided_total_pairs(&node.engine, &ctx.universe) {
            let ex_pt = node.excluded_pt.contains(&t);
            let ex_pf = node.excluded_pf.contains(&t);
            match (ex_pt, ex_pf) {
                (true, true) => return Ok(Propagation::Dead),
                (true, false) => {
                    node.engine.add_pf(t);
                    progressed = true;
                }
                (false, true) => {
                    node.engine.add_pt(t);
                    progressed = true;
                }
                (false, false) => {}
            }
        }
        // Rule pass against the node's interval.
        let verdicts: Vec<(usize, Tri)> = {
            let view = BoundsView {
                lower_pt: node.engine.truths(),
                lower_pf: node.engine.falsities(),
                upper_pt: &ctx.upper_pt,
                upper_pf: &ctx.upper_pf,
                excluded_pt: Some(&node.excluded_pt),
                excluded_pf: Some(&node.excluded_pf),
                overlay: None,
            };
            ctx.rules
                .iter()
                .enumerate()
                .filter(|(i, _)| node.state[*i] == RuleState::Open)
                .map(|(i, r)| {
                    let eval = FormulaEval::new(&ctx.universe, &view);
                    (i, eval.eval_closed(&r.cond))
                })
                .collect()
        };
        for (i, verdict) in verdicts {
            match verdict {
                Tri::True => {
                    node.state[i] = RuleState::Fired;
                    match ctx.rules[i].concl {
                        None => return Ok(Propagation::Dead),
                        Some((true, t)) => {
                            if node.excluded_pt.contains(&t) {
                                return Ok(Propagation::Dead);
                            }
                            if !node.engine.truths().contains(&t) {
                                node.engine.add_pt(t);
                                progressed = true;
                            }
                        }
                        Some((false, t)) => {
                            if node.excluded_pf.contains(&t) {
                                return Ok(Propagation::Dead);
                            }
                            if !node.engine.falsities().contains(&t) {
                                node.engine.add_pf(t);
                                progressed = true;
                            }
                        }
                    }
                }
                Tri::False => node.state[i] = RuleState::Refuted,
                Tri::Unknown => {}
            }
        }
        if !progressed {
            return Ok(Propagation::Live);
        }
    }
}

/// Whether an undecided totality pair can be left free at this node: no
/// schema role, every open rule reading it settles crisply and
/// self-consistently under either sign, and replaying the closure schemas
/// derives nothing outside the node.
fn pair_is_free(ctx: &SearchCtx, node: &Node, edges: &EdgeIndexes, t: IdTriple) -> bool {
    let ids = ctx.universe.ids;
    if schema_pair(t, &ids) {
        return false;
    }
    // Closure replay, both signs.
    for positive in [true, false] {
        for (sign, c) in replay_consequences(t, positive, edges, &ids) {
            if sign == positive && c == t {
                continue;
            }
            let present = if sign {
                node.engine.truths().contains(&c)
            } else {
                node.engine.falsities().contains(&c)
            };
            if !present {
                return false;
            }
        }
    }
    // Rule probes, both signs, for every open rule that reads the pair.
    for (i, r) in ctx.rules.iter().enumerate() {
        if node.state[i] != RuleState::Open {
            continue;
        }
        if !r.patterns.iter().any(|p| p.matches(t)) {
            continue;
        }
        for positive in [true, false] {
            let verdict = {
                let view = BoundsView {
                    lower_pt: node.engine.truths(),
                    lower_pf: node.engine.falsities(),
                    upper_pt: &ctx.upper_pt,
                    upper_pf: &ctx.upper_pf,
                    excluded_pt: Some(&node.excluded_pt),
                    excluded_pf: Some(&node.excluded_pf),
                    overlay: Some((positive, t)),
                };
                FormulaEval::new(&ctx.universe, &view).eval_closed(&r.cond)
            };
            match verdict {
                Tri::Unknown => return false,
                Tri::False => {}
                Tri::True => {
                    let supported = match r.concl {
                        None => false,
                        Some((sign, c)) => {
                            (sign == positive && c == t)
                                || (sign && node.engine.truths().contains(&c))
                                || (!sign && node.engine.falsities().contains(&c))
                        }
                    };
                    if !supported {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Search result assembled by [`stable_models`].
struct SearchResult {
    families: Vec<ModelFamily>,
    approximate: bool,
    branches: usize,
    candidates: usize,
}

fn run_search(ctx: &SearchCtx, root: Node) -> Result<SearchResult, StableError> {
    let mut stack = vec![root];
    let mut families: Vec<ModelFamily> = Vec::new();
    let mut approximate = false;
    let mut branches = 0usize;
    let mut candidates = 0usize;

    while let Some(mut node) = stack.pop() {
        if Instant::now() > ctx.deadline {
            return Err(limit("time", "model search timed out"));
        }
        branches += 1;
        if branches > ctx.limits.max_branches {
            return Err(limit(
                "branches",
                format!("more than {} search nodes", ctx.limits.max_branches),
            ));
        }
        if let Propagation::Dead = propagate(ctx, &mut node)? {
            continue;
        }
        let undecided_totals = undecided_total_pairs(&node.engine, &ctx.universe);
        let edges = edge_indexes(node.engine.truths(), &ctx.universe.ids);
        let mut free_cache: BTreeMap<IdTriple, bool> = BTreeMap::new();
        let is_free = |node: &Node, t: IdTriple, cache: &mut BTreeMap<IdTriple, bool>| -> bool {
            *cache
                .entry(t)
                .or_insert_with(|| pair_is_free(ctx, node, &edges, t))
        };

        // Branch on a rule with an undecided, unexcluded conclusion whose
        // pair is not best left free.
        let mut rule_branch: Option<(usize, bool, IdTriple)> = None;
        for (i, r) in ctx.rules.iter().enumerate() {
            if node.state[i] != RuleState::Open {
                continue;
            }
            let Some((sign, t)) = r.concl else {
                continue;
            };
            let decided =
                node.engine.truths().contains(&t) || node.engine.falsities().contains(&t);
            if decided {
                continue;
            }
            let excluded = if sign {
                node.excluded_pt.contains(&t)
            } else {
                node.excluded_pf.contains(&t)
            };
            if excluded {
                continue;
            }
            if undecided_totals.contains(&t) && is_free(&node, t, &mut free_cache) {
                continue;
            }
            rule_branch = Some((i, sign, t));
            break;
        }
        if let Some((_, sign, t)) = rule_branch {
            // Exclude branch first so the include branch pops first:
            // models with fewer derived atoms then appear after richer
            // ones get checked, keeping output order canonical anyway.
            let mut exclude = node.clone();
            if sign {
                exclude.excluded_pt.insert(t);
            } else {
                exclude.excluded_pf.insert(t);
            }
            stack.push(exclude);
            let mut include = node;
            if sign {
                include.engine.add_pt(t);
            } else {
                include.engine.add_pf(t);
            }
            stack.push(include);
            continue;
        }

        // Branch on a totality pair that cannot be left free.
        let eager = undecided_totals
            .iter()
            .copied()
            .find(|&t| !is_free(&node, t, &mut free_cache));
        if let Some(t) = eager {
            let mut negative = node.clone();
            negative.engine.add_pf(t);
            stack.push(negative);
            let mut positive = node;
            positive.engine.add_pt(t);
            stack.push(positive);
            continue;
        }

        // Leaf: candidate core plus free pairs.
        candidates += 1;
        let free: BTreeSet<IdTriple> = undecided_totals;
        let core = node.engine.interpretation();
        let completions: Vec<(HashSet<IdTriple>, HashSet<IdTriple>)> =
            leaf_completions(&free);
        let mut verdicts = Vec::new();
        let mut any_approx = false;
        for (extra_pt, extra_pf) in &completions {
            let mut pt = core.truth_ids().clone();
            let mut pf = core.falsity_ids().clone();
            pt.extend(extra_pt.iter().copied());
            pf.extend(extra_pf.iter().copied());
            let member = HerbrandInterpretation::from_id_sets(ctx.universe.clone(), pt, pf);
            let out = chain_verify_compiled(
                &ctx.universe,
                &ctx.skg,
                &ctx.rules,
                &member,
                &ctx.limits,
                ctx.deadline,
            )?;
            any_approx |= out.approximate;
            verdicts.push(out.stable);
        }
        if verdicts.iter().all(|&v| v) {
            families.push(ModelFamily {
                universe: ctx.universe.clone(),
                core_engine: node.engine.clone(),
                core,
                free,
                kind: FamilyKind::Product,
            });
        } else if verdicts.iter().any(|&v| v) {
            // Representatives disagree: decide the pairs explicitly.
            let first = *free.iter().next().expect("disagreement needs free pairs");
            let mut negative = node.clone();
            negative.engine.add_pf(first);
            stack.push(negative);
            let mut positive = node;
            positive.engine.add_pt(first);
            stack.push(positive);
        } else if any_approx {
            approximate = true;
        }
    }

    families.sort_by(|a, b| family_key(a).cmp(&family_key(b)));
    families.dedup_by(|a, b| family_key(a) == family_key(b));
    Ok(SearchResult {
        families,
        approximate,
        branches,
        candidates,
    })
}

/// The member sign vectors checked at a leaf: all of them when few pairs,
/// otherwise all-negative, all-positive, and two alternating patterns.
fn leaf_completions(free: &BTreeSet<IdTriple>) -> Vec<(HashSet<IdTriple>, HashSet<IdTriple>)> {
    let pairs: Vec<IdTriple> = free.iter().copied().collect();
    let mut out = Vec::new();
    if pairs.len() <= 6 {
        for mask in 0u64..(1u64 << pairs.len()) {
            let mut pt = HashSet::new();
            let mut pf = HashSet::new();
            for (i, &t) in pairs.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    pt.insert(t);
                } else {
                    pf.insert(t);
                }
            }
            out.push((pt, pf));
        }
    } else {
        for pattern in 0..4u8 {
            let mut pt = HashSet::new();
            let mut pf = HashSet::new();
            for (i, &t) in pairs.iter().enumerate() {
                let positive = match pattern {
                    0 => false,
                    1 => true,
                    2 => i % 2 == 0,
                    _ => i % 2 == 1,
                };
                if positive {
                    pt.insert(t);
                } else {
                    pf.insert(t);
                }
            }
            out.push((pt, pf));
        }
    }
    out
}

fn family_key(f: &ModelFamily) -> (Vec<IdTriple>, Vec<IdTriple>, Vec<IdTriple>) {
    let mut pt: Vec<IdTriple> = f.core.truth_ids().iter().copied().collect();
    let mut pf: Vec<IdTriple> = f.core.falsity_ids().iter().copied().collect();
    pt.sort_unstable();
    pf.sort_unstable();
    (pt, pf, f.free.iter().copied().collect())
}

/// Computes the stable models of the ontology as model families.
///
/// An incoherent base closure yields zero families.  The `approximate`
/// flag reports that some candidate was rejected on an undecidable
/// persistence check, so the families are sound but possibly incomplete;
/// reported families are always chain-verified.
pub fn stable_models(
    o: &Ontology,
    cfg: &VocabularyConfig,
    limits: &SearchLimits,
) -> Result<StableModels, StableError> {
    let start = Instant::now();
    let deadline = start + limits.timeout;
    let universe = Universe::of_ontology(o, cfg)?;
    let skg = skolemize(&o.graph, None)?;
    let mut base = ClosureEngine::new(universe.clone());
    base.assert_graph(&skg)?;
    base.run();
    if !base.is_coherent() {
        return Ok(StableModels {
            families: Vec::new(),
            approximate: false,
            stats: SearchStats {
                ground_rules: 0,
                branches: 0,
                candidates_checked: 0,
                elapsed: start.elapsed(),
            },
        });
    }
    let rules = compile_program(&universe, &o.program, limits)?;
    let ids = universe.ids;

    // Fully total ontologies: every property is total, so stable models
    // coincide with the coherent closed models; answer with one
    // closure-defined family instead of searching.
    if base
        .truths()
        .contains(&(ids.sub_class_of, ids.rdf_property, ids.total_property))
    {
        let core = base.interpretation();
        let family = ModelFamily {
            universe: universe.clone(),
            core_engine: base,
            core,
            free: BTreeSet::new(),
            kind: FamilyKind::Closure { rules: rules.clone() },
        };
        let nonempty = {
            let FamilyKind::Closure { rules } = &family.kind else {
                unreachable!()
            };
            !family
                .closure_verdicts(&BTreeMap::new(), &Formula::True, rules, limits)?
                .is_empty()
        };
        let families = if nonempty { vec![family] } else { Vec::new() };
        return Ok(StableModels {
            families,
            approximate: false,
            stats: SearchStats {
                ground_rules: rules.len(),
                branches: 0,
                candidates_checked: 0,
                elapsed: start.elapsed(),
            },
        });
    }

    let (upper_pt, upper_pf) = build_envelope(&base, &universe, &rules);
    let state = vec![RuleState::Open; rules.len()];
    let ctx = SearchCtx {
        universe,
        skg,
        rules,
        upper_pt,
        upper_pf,
        limits: limits.clone(),
        deadline,
    };
    let root = Node {
        engine: base,
        excluded_pt: HashSet::new(),
        excluded_pf: HashSet::new(),
        state,
    };
    let result = run_search(&ctx, root)?;
    Ok(StableModels {
        families: result.families,
        approximate: result.approximate,
        stats: SearchStats {
            ground_rules: ctx.rules.len(),
            branches: result.branches,
            candidates_checked: result.candidates,
            elapsed: start.elapsed(),
        },
    })
}

/// The minimal coherent closed models of the graph alone (no rules).
pub fn minimal_graph_models(
    o: &Ontology,
    cfg: &VocabularyConfig,
    limits: &SearchLimits,
) -> Result<StableModels, StableError> {
    let graph_only = Ontology {
        graph: o.graph.clone(),
        program: Program::new(),
    };
    stable_models(&graph_only, cfg, limits)
}

// ---------------------------------------------------------------------------
// Whole-ontology queries
// ---------------------------------------------------------------------------

/// Whether every stable model satisfies the formula (free variables read
/// universally).  With no stable models everything is entailed.
pub fn entails(
    o: &Ontology,
    f: &Formula,
    cfg: &VocabularyConfig,
    limits: &SearchLimits,
) -> Result<Entailment, StableError> {
    let sm = stable_models(o, cfg, limits)?;
    let mut holds = true;
    for fam in &sm.families {
        if !fam.entails(f, limits)? {
            holds = false;
            break;
        }
    }
    Ok(Entailment {
        holds,
        approximate: sm.approximate,
    })
}

/// Whether every stable model satisfies the graph (variables read
/// existentially, as one match per model).
pub fn entails_graph(
    o: &Ontology,
    g: &Graph,
    cfg: &VocabularyConfig,
    limits: &SearchLimits,
) -> Result<Entailment, StableError> {
    entails(o, &crate::model::formula_of_graph(g), cfg, limits)
}

/// Bindings (or the closed verdict) that hold in every stable model.  With
/// no stable models a closed query answers yes and an open query answers
/// with every vocabulary tuple.
pub fn stable_answers(
    o: &Ontology,
    f: &Formula,
    cfg: &VocabularyConfig,
    limits: &SearchLimits,
) -> Result<AnswerReport, StableError> {
    let sm = stable_models(o, cfg, limits)?;
    let mut vars: Vec<String> = free_vars(f).into_iter().collect();
    vars.sort();
    if vars.is_empty() {
        let mut holds = true;
        for fam in &sm.families {
            if !fam.entails(f, limits)? {
                holds = false;
                break;
            }
        }
        return Ok(AnswerReport {
            answer: if holds { AnswerSet::Yes } else { AnswerSet::No },
            approximate: sm.approximate,
        });
    }
    let universe = Universe::of_ontology(o, cfg)?;
    let vocabulary: Vec<Term> = universe.vocabulary().iter().cloned().collect();
    let tuple_count = (vocabulary.len() as u128).pow(vars.len() as u32);
    if tuple_count > 1_000_000 {
        return Err(limit(
            "answer tuples",
            format!("{tuple_count} candidate bindings"),
        ));
    }
    let mut answers = BTreeSet::new();
    let mut tuple = vec![0usize; vars.len()];
    'outer: loop {
        let mut env = BTreeMap::new();
        let mut binding = Binding::new();
        for (i, v) in vars.iter().enumerate() {
            let term = &vocabulary[tuple[i]];
            if let Some(id) = universe.denote(term) {
                env.insert(v.clone(), id);
            }
            binding.insert(v.clone(), term.clone());
        }
        let mut all = true;
        for fam in &sm.families {
            if !fam.entails_with(&env, &normalize_negation(f), limits)? {
                all = false;
                break;
            }
        }
        if all {
            answers.insert(binding);
        }
        // Advance the odometer.
        for i in (0..tuple.len()).rev() {
            tuple[i] += 1;
            if tuple[i] < vocabulary.len() {
                continue 'outer;
            }
            tuple[i] = 0;
        }
        break;
    }
    Ok(AnswerReport {
        answer: AnswerSet::Bindings(answers),
        approximate: sm.approximate,
    })
}

/// Per-model answers: yes/no for a closed query, and for an open query the
/// deduplicated nonempty binding sets of the individual models.
pub fn credulous_answers(
    o: &Ontology,
    f: &Formula,
    cfg: &VocabularyConfig,
    limits: &SearchLimits,
) -> Result<CredulousReport, StableError> {
    let sm = stable_models(o, cfg, limits)?;
    let mut vars: Vec<String> = free_vars(f).into_iter().collect();
    vars.sort();
    if vars.is_empty() {
        let mut any = false;
        for fam in &sm.families {
            if fam.some_member_satisfies_with(&BTreeMap::new(), &close_universally(f), limits)? {
                any = true;
                break;
            }
        }
        return Ok(CredulousReport {
            answer: if any {
                CredulousAnswerSet::Yes
            } else {
                CredulousAnswerSet::No
            },
            approximate: sm.approximate,
        });
    }
    let universe = Universe::of_ontology(o, cfg)?;
    let vocabulary: Vec<Term> = universe.vocabulary().iter().cloned().collect();
    let tuple_count = (vocabulary.len() as u128).pow(vars.len() as u32);
    if tuple_count > 1_000_000 {
        return Err(limit(
            "answer tuples",
            format!("{tuple_count} candidate bindings"),
        ));
    }
    let mut sets: BTreeSet<BTreeSet<Binding>> = BTreeSet::new();
    for fam in &sm.families {
        for bindings in fam.binding_sets(f, &vars, &vocabulary, limits)? {
            if !bindings.is_empty() {
                sets.insert(bindings);
            }
        }
    }
    Ok(CredulousReport {
        answer: CredulousAnswerSet::BindingSets(sets),
        approximate: sm.approximate,
    })
}

// ---------------------------------------------------------------------------
// Brute-force reference enumeration
// ---------------------------------------------------------------------------

/// Enumerates the coherent closed models of the ontology within the
/// rule-generated candidate space: the closure of the base under all rule
/// conclusions and totality signs spans the lattice, pairs that pass the
/// free-pair checks stay open at family granularity, and every subset of
/// the remaining signed atoms is closed and filtered by coherence, rule
/// satisfaction, and totality.  Intended as a small-scale oracle: every
/// stable model core appears among the results.
pub fn herbrand_models_bruteforce(
    o: &Ontology,
    cfg: &VocabularyConfig,
    cap: usize,
) -> Result<Vec<HerbrandInterpretation>, StableError> {
    let limits = SearchLimits::default();
    let universe = Universe::of_ontology(o, cfg)?;
    let skg = skolemize(&o.graph, None)?;
    let mut base = ClosureEngine::new(universe.clone());
    base.assert_graph(&skg)?;
    base.run();
    if !base.is_coherent() {
        return Ok(Vec::new());
    }
    let rules = compile_program(&universe, &o.program, &limits)?;
    let (upper_pt, upper_pf) = build_envelope(&base, &universe, &rules);
    let deadline = Instant::now() + limits.timeout;
    let ctx = SearchCtx {
        universe: universe.clone(),
        skg,
        rules,
        upper_pt,
        upper_pf,
        limits,
        deadline,
    };
    // Settle what must hold in every candidate first.
    let mut root = Node {
        engine: base,
        excluded_pt: HashSet::new(),
        excluded_pf: HashSet::new(),
        state: vec![RuleState::Open; ctx.rules.len()],
    };
    if let Propagation::Dead = propagate(&ctx, &mut root)? {
        return Ok(Vec::new());
    }
    let base = root.engine;
    let edges = edge_indexes(base.truths(), &ctx.universe.ids);
    let totals = undecided_total_pairs(&base, &ctx.universe);
    let free: BTreeSet<IdTriple> = totals
        .iter()
        .copied()
        .filter(|&t| {
            // Free only if untouched by any rule at all here: there is no
            // rule state to consult in an enumeration.
            let untouched = ctx
                .rules
                .iter()
                .all(|r| !r.patterns.iter().any(|p| p.matches(t)))
                || pair_is_free(&ctx, &root_like(&base, &ctx), &edges, t);
            untouched && !schema_pair(t, &ctx.universe.ids)
        })
        .collect();
    let mut lattice: BTreeSet<(bool, IdTriple)> = BTreeSet::new();
    for t in &ctx.upper_pt {
        if !base.truths().contains(t) && !free.contains(t) {
            lattice.insert((true, *t));
        }
    }
    for t in &ctx.upper_pf {
        if !base.falsities().contains(t) && !free.contains(t) {
            lattice.insert((false, *t));
        }
    }
    let lattice: Vec<(bool, IdTriple)> = lattice.into_iter().collect();
    if lattice.len() > cap {
        return Err(limit(
            "brute force lattice",
            format!("{} candidate atoms exceed cap {}", lattice.len(), cap),
        ));
    }
    let mut out: Vec<HerbrandInterpretation> = Vec::new();
    let mut seen: BTreeSet<(Vec<IdTriple>, Vec<IdTriple>)> = BTreeSet::new();
    for mask in 0u64..(1u64 << lattice.len()) {
        let mut probe = base.clone();
        for (i, &(positive, t)) in lattice.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if positive {
                    probe.add_pt(t);
                } else {
                    probe.add_pf(t);
                }
            }
        }
        probe.run();
        if !probe.is_coherent() {
            continue;
        }
        if !rules_hold(&universe, &probe, &ctx.rules) {
            continue;
        }
        let undecided = undecided_total_pairs(&probe, &universe);
        if !undecided.iter().all(|t| free.contains(t)) {
            continue;
        }
        let mut pt: Vec<IdTriple> = probe.truths().iter().copied().collect();
        let mut pf: Vec<IdTriple> = probe.falsities().iter().copied().collect();
        pt.sort_unstable();
        pf.sort_unstable();
        if seen.insert((pt, pf)) {
            out.push(probe.interpretation());
        }
    }
    Ok(out)
}

fn root_like(engine: &ClosureEngine, ctx: &SearchCtx) -> Node {
    Node {
        engine: engine.clone(),
        excluded_pt: HashSet::new(),
        excluded_pf: HashSet::new(),
        state: vec![RuleState::Open; ctx.rules.len()],
    }
}
