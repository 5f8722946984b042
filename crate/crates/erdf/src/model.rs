//! Core data model: terms, signed triples, formulas, rules, graphs and programs.
//!
//! An [`Ontology`] pairs a [`Graph`] (a set of signed triples, possibly
//! containing existential variables) with a [`Program`] (a set of derivation
//! rules).  Rule conditions are formulas built from triple patterns with two
//! distinct negations: `~` (weak negation, "not derivable") and `-` (strong
//! negation, "explicitly false").  Graphs assert positive triples and strong
//! negations of triples; weak negation never appears in a graph.
//!
//! This module also hosts the symbolic operations that do not need an
//! interpretation: collecting variables, turning a graph into its existential
//! closure, skolemizing graph variables, collecting the ontology vocabulary,
//! building the resource universe, grounding a program over a vocabulary and
//! rewriting strong negation down to atoms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::vocab::{self, VocabularyConfig, XmlStatus};

/// A term of the language: URI reference, plain literal (with optional
/// language tag), typed literal, or variable.
///
/// Ordering is canonical: URIs sort lexicographically before all literals,
/// plain literals before typed ones, and variables sort last (ground
/// structures never contain them).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Uri(String),
    PlainLiteral {
        value: String,
        lang: Option<String>,
    },
    TypedLiteral {
        value: String,
        datatype: String,
    },
    Variable(String),
}

impl Term {
    pub fn uri(u: impl Into<String>) -> Term {
        Term::Uri(u.into())
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Variable(name.into())
    }

    pub fn plain(value: impl Into<String>) -> Term {
        Term::PlainLiteral {
            value: value.into(),
            lang: None,
        }
    }

    pub fn typed(value: impl Into<String>, datatype: impl Into<String>) -> Term {
        Term::TypedLiteral {
            value: value.into(),
            datatype: datatype.into(),
        }
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::PlainLiteral { .. } | Term::TypedLiteral { .. })
    }
}

fn escape_literal(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            _ => out.push(c),
        }
    }
}

impl fmt::Display for Term {
    /// Canonical full-form rendering: URIs in angle brackets, literals quoted
    /// with their tag or datatype, variables with a leading `?`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Uri(u) => write!(f, "<{u}>"),
            Term::PlainLiteral { value, lang } => {
                let mut s = String::new();
                escape_literal(value, &mut s);
                match lang {
                    Some(l) => write!(f, "\"{s}\"@{l}"),
                    None => write!(f, "\"{s}\""),
                }
            }
            Term::TypedLiteral { value, datatype } => {
                let mut s = String::new();
                escape_literal(value, &mut s);
                write!(f, "\"{s}\"^^<{datatype}>")
            }
            Term::Variable(v) => write!(f, "?{v}"),
        }
    }
}

/// An element of the resource universe an interpretation ranges over.
///
/// Identical to [`Term`] minus variables, plus XML values: a well-formed
/// XML literal denotes its canonicalized XML value rather than itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Resource {
    Uri(String),
    PlainLiteral {
        value: String,
        lang: Option<String>,
    },
    TypedLiteral {
        value: String,
        datatype: String,
    },
    XmlValue(String),
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::Uri(u) => write!(f, "<{u}>"),
            Resource::PlainLiteral { value, lang } => {
                let t = Term::PlainLiteral {
                    value: value.clone(),
                    lang: lang.clone(),
                };
                write!(f, "{t}")
            }
            Resource::TypedLiteral { value, datatype } => {
                let t = Term::TypedLiteral {
                    value: value.clone(),
                    datatype: datatype.clone(),
                };
                write!(f, "{t}")
            }
            Resource::XmlValue(v) => write!(f, "xml({v})"),
        }
    }
}

impl Resource {
    /// The resource a ground term denotes: well-formed XML literals denote
    /// their canonical XML value, every other term denotes itself.
    pub fn denoted_by(term: &Term) -> Resource {
        match term {
            Term::Uri(u) => Resource::Uri(u.clone()),
            Term::PlainLiteral { value, lang } => Resource::PlainLiteral {
                value: value.clone(),
                lang: lang.clone(),
            },
            Term::TypedLiteral { value, datatype } => {
                if datatype == vocab::RDF_XML_LITERAL {
                    if let XmlStatus::WellTyped(canonical) = vocab::classify_xml_literal(value) {
                        return Resource::XmlValue(canonical);
                    }
                }
                Resource::TypedLiteral {
                    value: value.clone(),
                    datatype: datatype.clone(),
                }
            }
            Term::Variable(v) => panic!("variable ?{v} has no denotation"),
        }
    }
}

/// A signed triple `p(s, o)` or `-p(s, o)`.  The predicate is always a URI;
/// subject and object may be any term, including literals and variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedTriple {
    pub predicate: String,
    pub subject: Term,
    pub object: Term,
    pub positive: bool,
}

impl SignedTriple {
    pub fn positive(predicate: impl Into<String>, subject: Term, object: Term) -> SignedTriple {
        SignedTriple {
            predicate: predicate.into(),
            subject,
            object,
            positive: true,
        }
    }

    pub fn negative(predicate: impl Into<String>, subject: Term, object: Term) -> SignedTriple {
        SignedTriple {
            predicate: predicate.into(),
            subject,
            object,
            positive: false,
        }
    }

    pub fn negated(&self) -> SignedTriple {
        SignedTriple {
            positive: !self.positive,
            ..self.clone()
        }
    }

    pub fn is_ground(&self) -> bool {
        !self.subject.is_variable() && !self.object.is_variable()
    }
}

impl fmt::Display for SignedTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.positive { "" } else { "-" };
        write!(f, "{sign}<{}>({}, {})", self.predicate, self.subject, self.object)
    }
}

/// A formula over triple patterns.
///
/// `Atom` always wraps a positive triple; explicit falsity is expressed by
/// `StrongNeg`.  `True` and `False` only occur as a whole rule condition or
/// conclusion, never nested inside a formula.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(SignedTriple),
    StrongNeg(Box<Formula>),
    WeakNeg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    True,
    False,
}

impl Formula {
    pub fn atom(t: SignedTriple) -> Formula {
        debug_assert!(t.positive, "Formula::Atom must wrap a positive triple");
        Formula::Atom(t)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn weak_neg(a: Formula) -> Formula {
        Formula::WeakNeg(Box::new(a))
    }

    pub fn strong_neg(a: Formula) -> Formula {
        Formula::StrongNeg(Box::new(a))
    }

    pub fn exists(v: impl Into<String>, a: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(a))
    }

    pub fn forall(v: impl Into<String>, a: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(a))
    }
}

/// Conclusion of a rule: a signed triple, or `false` for a constraint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conclusion {
    Triple(SignedTriple),
    False,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Conclusion::Triple(t) => write!(f, "{t}"),
            Conclusion::False => write!(f, "false"),
        }
    }
}

/// A derivation rule `conclusion <- condition`.
///
/// A fact has condition [`Formula::True`]; a constraint has conclusion
/// [`Conclusion::False`].  No variable bound in the condition may occur in
/// the conclusion (the parser rejects such rules).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub condition: Formula,
    pub conclusion: Conclusion,
}

/// A set of signed triples, canonically ordered.
pub type Graph = BTreeSet<SignedTriple>;

/// A set of rules, canonically ordered.
pub type Program = BTreeSet<Rule>;

/// A graph plus a program.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    pub graph: Graph,
    pub program: Program,
}

/// Errors from the symbolic operations in this module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// The chosen skolem namespace is already used by a URI in the graph.
    SkolemNamespaceCollision { namespace: String },
    /// Grounding the program requires more instances than the cap allows.
    GroundingCapExceeded { required: u128, cap: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::SkolemNamespaceCollision { namespace } => {
                write!(f, "skolem namespace {namespace} collides with a URI in the graph")
            }
            ModelError::GroundingCapExceeded { required, cap } => {
                write!(f, "grounding requires {required} rule instances, cap is {cap}")
            }
        }
    }
}

impl std::error::Error for ModelError {}

// ---------------------------------------------------------------------------
// Variable collection
// ---------------------------------------------------------------------------

fn triple_vars(t: &SignedTriple, out: &mut BTreeSet<String>) {
    if let Term::Variable(v) = &t.subject {
        out.insert(v.clone());
    }
    if let Term::Variable(v) = &t.object {
        out.insert(v.clone());
    }
}

/// All variables of a formula, free and bound.
pub fn all_vars(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_all_vars(f, &mut out);
    out
}

fn collect_all_vars(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom(t) => triple_vars(t, out),
        Formula::StrongNeg(g) | Formula::WeakNeg(g) => collect_all_vars(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_all_vars(a, out);
            collect_all_vars(b, out);
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            out.insert(v.clone());
            collect_all_vars(g, out);
        }
        Formula::True | Formula::False => {}
    }
}

/// The free variables of a formula, in name order.
pub fn free_vars(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut bound = BTreeSet::new();
    collect_free_vars(f, &mut bound, &mut out);
    out
}

fn collect_free_vars(f: &Formula, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom(t) => {
            let mut vars = BTreeSet::new();
            triple_vars(t, &mut vars);
            for v in vars {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        }
        Formula::StrongNeg(g) | Formula::WeakNeg(g) => collect_free_vars(g, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_free_vars(a, bound, out);
            collect_free_vars(b, bound, out);
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let fresh = bound.insert(v.clone());
            collect_free_vars(g, bound, out);
            if fresh {
                bound.remove(v);
            }
        }
        Formula::True | Formula::False => {}
    }
}

/// The free variables of a rule: free variables of the condition plus all
/// variables of the conclusion.
pub fn rule_free_vars(r: &Rule) -> BTreeSet<String> {
    let mut out = free_vars(&r.condition);
    if let Conclusion::Triple(t) = &r.conclusion {
        triple_vars(t, &mut out);
    }
    out
}

// ---------------------------------------------------------------------------
// Graph formula
// ---------------------------------------------------------------------------

/// The existential closure of a graph: the conjunction of its triples, in
/// canonical order, existentially quantified over its variables in first
/// occurrence order.  The empty graph yields [`Formula::True`].
pub fn formula_of_graph(g: &Graph) -> Formula {
    let mut conjuncts: Vec<Formula> = Vec::new();
    let mut var_order: Vec<String> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for t in g {
        for term in [&t.subject, &t.object] {
            if let Term::Variable(v) = term {
                if seen.insert(v.clone()) {
                    var_order.push(v.clone());
                }
            }
        }
        let atom = Formula::atom(SignedTriple {
            positive: true,
            ..t.clone()
        });
        conjuncts.push(if t.positive {
            atom
        } else {
            Formula::strong_neg(atom)
        });
    }
    let Some(mut body) = conjuncts.pop() else {
        return Formula::True;
    };
    while let Some(c) = conjuncts.pop() {
        body = Formula::and(c, body);
    }
    for v in var_order.into_iter().rev() {
        body = Formula::exists(v, body);
    }
    body
}

// ---------------------------------------------------------------------------
// Skolemization
// ---------------------------------------------------------------------------

const SKOLEM_SCHEME: &str = "urn:skolem:";

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// A deterministic identifier for a graph, derived from its content.
pub fn content_graph_id(g: &Graph) -> String {
    let mut text = String::new();
    for t in g {
        text.push_str(&t.to_string());
        text.push('\n');
    }
    format!("{:016x}", fnv1a64(text.as_bytes()))
}

/// Replaces every variable of the graph with a fresh URI
/// `urn:skolem:<graph_id>:<var>`.  When `graph_id` is `None` a content hash
/// of the graph is used, so identical graphs skolemize identically.
///
/// Fails if the skolem namespace is already in use by some URI of the graph.
/// The mapping is injective (distinct variables get distinct URIs) and the
/// operation is the identity on ground graphs.
pub fn skolemize(g: &Graph, graph_id: Option<&str>) -> Result<Graph, ModelError> {
    let id = match graph_id {
        Some(s) => s.to_string(),
        None => content_graph_id(g),
    };
    let namespace = format!("{SKOLEM_SCHEME}{id}:");
    let clash = g.iter().any(|t| {
        let mut uris = vec![t.predicate.as_str()];
        for term in [&t.subject, &t.object] {
            if let Term::Uri(u) = term {
                uris.push(u);
            }
        }
        uris.into_iter().any(|u| u.starts_with(&namespace))
    });
    if clash {
        return Err(ModelError::SkolemNamespaceCollision { namespace });
    }
    let sk = |term: &Term| -> Term {
        match term {
            Term::Variable(v) => Term::Uri(format!("{namespace}{v}")),
            other => other.clone(),
        }
    };
    Ok(g.iter()
        .map(|t| SignedTriple {
            predicate: t.predicate.clone(),
            subject: sk(&t.subject),
            object: sk(&t.object),
            positive: t.positive,
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Vocabulary and universe
// ---------------------------------------------------------------------------

fn collect_formula_terms(f: &Formula, out: &mut BTreeSet<Term>) {
    match f {
        Formula::Atom(t) => {
            out.insert(Term::Uri(t.predicate.clone()));
            for term in [&t.subject, &t.object] {
                if !term.is_variable() {
                    out.insert(term.clone());
                }
            }
        }
        Formula::StrongNeg(g) | Formula::WeakNeg(g) => collect_formula_terms(g, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_formula_terms(a, out);
            collect_formula_terms(b, out);
        }
        Formula::Exists(_, g) | Formula::Forall(_, g) => collect_formula_terms(g, out),
        Formula::True | Formula::False => {}
    }
}

/// URIs and literals appearing in a graph (variables are not vocabulary).
/// The URIs and literals appearing in a formula (variables excluded).
pub fn formula_terms(f: &Formula) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    collect_formula_terms(f, &mut out);
    out
}

pub fn graph_terms(g: &Graph) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for t in g {
        out.insert(Term::Uri(t.predicate.clone()));
        for term in [&t.subject, &t.object] {
            if !term.is_variable() {
                out.insert(term.clone());
            }
        }
    }
    out
}

/// The ontology vocabulary: URIs and literals of the skolemized graph and of
/// the program, plus the built-in vocabulary for `cfg`.
pub fn vocabulary_of(o: &Ontology, cfg: &VocabularyConfig) -> Result<BTreeSet<Term>, ModelError> {
    let sk = skolemize(&o.graph, None)?;
    let mut out = graph_terms(&sk);
    for r in &o.program {
        collect_formula_terms(&r.condition, &mut out);
        if let Conclusion::Triple(t) = &r.conclusion {
            out.insert(Term::Uri(t.predicate.clone()));
            for term in [&t.subject, &t.object] {
                if !term.is_variable() {
                    out.insert(term.clone());
                }
            }
        }
    }
    for u in vocab::builtin_vocabulary(cfg) {
        out.insert(Term::Uri(u));
    }
    Ok(out)
}

/// The resource universe over a vocabulary: every vocabulary term denotes
/// itself, except well-formed XML literals, which are replaced by their
/// canonical XML values.
pub fn herbrand_universe(vocabulary: &BTreeSet<Term>) -> BTreeSet<Resource> {
    vocabulary.iter().map(Resource::denoted_by).collect()
}

// ---------------------------------------------------------------------------
// Grounding
// ---------------------------------------------------------------------------

/// Replaces free occurrences of the mapped variables; quantifiers shadow.
pub fn substitute(f: &Formula, map: &BTreeMap<String, Term>) -> Formula {
    fn subst_term(t: &Term, map: &BTreeMap<String, Term>) -> Term {
        match t {
            Term::Variable(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            other => other.clone(),
        }
    }
    fn go(f: &Formula, map: &BTreeMap<String, Term>) -> Formula {
        match f {
            Formula::Atom(t) => Formula::Atom(SignedTriple {
                predicate: t.predicate.clone(),
                subject: subst_term(&t.subject, map),
                object: subst_term(&t.object, map),
                positive: t.positive,
            }),
            Formula::StrongNeg(g) => Formula::strong_neg(go(g, map)),
            Formula::WeakNeg(g) => Formula::weak_neg(go(g, map)),
            Formula::And(a, b) => Formula::and(go(a, map), go(b, map)),
            Formula::Or(a, b) => Formula::or(go(a, map), go(b, map)),
            Formula::Implies(a, b) => Formula::implies(go(a, map), go(b, map)),
            Formula::Exists(v, g) => {
                if map.contains_key(v) {
                    let mut inner = map.clone();
                    inner.remove(v);
                    Formula::exists(v.clone(), go(g, &inner))
                } else {
                    Formula::exists(v.clone(), go(g, map))
                }
            }
            Formula::Forall(v, g) => {
                if map.contains_key(v) {
                    let mut inner = map.clone();
                    inner.remove(v);
                    Formula::forall(v.clone(), go(g, &inner))
                } else {
                    Formula::forall(v.clone(), go(g, map))
                }
            }
            Formula::True => Formula::True,
            Formula::False => Formula::False,
        }
    }
    go(f, map)
}

/// Applies a variable binding to a whole rule.
pub fn substitute_rule(r: &Rule, map: &BTreeMap<String, Term>) -> Rule {
    let conclusion = match &r.conclusion {
        Conclusion::False => Conclusion::False,
        Conclusion::Triple(t) => {
            let s = match &t.subject {
                Term::Variable(v) => map.get(v).cloned().unwrap_or_else(|| t.subject.clone()),
                other => other.clone(),
            };
            let o = match &t.object {
                Term::Variable(v) => map.get(v).cloned().unwrap_or_else(|| t.object.clone()),
                other => other.clone(),
            };
            Conclusion::Triple(SignedTriple {
                predicate: t.predicate.clone(),
                subject: s,
                object: o,
                positive: t.positive,
            })
        }
    };
    Rule {
        condition: substitute(&r.condition, map),
        conclusion,
    }
}

/// The number of ground instances `|V|^|free(r)|` summed over all rules,
/// computed without materializing anything.
pub fn grounding_size(p: &Program, vocabulary_len: usize) -> u128 {
    let mut total: u128 = 0;
    for r in p {
        let k = rule_free_vars(r).len() as u32;
        total = total.saturating_add((vocabulary_len as u128).saturating_pow(k));
    }
    total
}

/// One rule of the program together with every instantiation of its free
/// variables over the vocabulary.
#[derive(Debug, Clone)]
pub struct GroundTemplate {
    pub rule: Rule,
    /// Free variables in name order; every binding is parallel to this.
    pub free: Vec<String>,
    /// One entry per ground instance, in lexicographic vocabulary order.
    pub bindings: Vec<Vec<Term>>,
}

impl GroundTemplate {
    pub fn instance(&self, idx: usize) -> Rule {
        let map: BTreeMap<String, Term> = self
            .free
            .iter()
            .cloned()
            .zip(self.bindings[idx].iter().cloned())
            .collect();
        substitute_rule(&self.rule, &map)
    }
}

/// The grounding of a program over a vocabulary: every rule instantiated at
/// every mapping of its free variables to vocabulary terms.  Bindings are
/// materialized eagerly; instance formulas are built on demand.
#[derive(Debug, Clone)]
pub struct GroundProgram {
    pub templates: Vec<GroundTemplate>,
    total: usize,
}

impl GroundProgram {
    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// All ground rules, template by template, bindings in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = Rule> + '_ {
        self.templates
            .iter()
            .flat_map(|t| (0..t.bindings.len()).map(move |i| t.instance(i)))
    }
}

/// Grounds `p` over `vocabulary`, failing (before any materialization) if the
/// instance count would exceed `cap`.
pub fn ground_program(
    p: &Program,
    vocabulary: &BTreeSet<Term>,
    cap: usize,
) -> Result<GroundProgram, ModelError> {
    let required = grounding_size(p, vocabulary.len());
    if required > cap as u128 {
        return Err(ModelError::GroundingCapExceeded { required, cap });
    }
    let terms: Vec<Term> = vocabulary.iter().cloned().collect();
    let mut templates = Vec::new();
    let mut total = 0usize;
    for r in p {
        let free: Vec<String> = rule_free_vars(r).into_iter().collect();
        let k = free.len();
        let mut bindings = Vec::new();
        if k == 0 {
            bindings.push(Vec::new());
        } else {
            // Odometer enumeration: last variable varies fastest, so bindings
            // come out in lexicographic vocabulary order.
            let mut idx = vec![0usize; k];
            loop {
                bindings.push(idx.iter().map(|&i| terms[i].clone()).collect());
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < terms.len() {
                        break;
                    }
                    idx[pos] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        total += bindings.len();
        templates.push(GroundTemplate {
            rule: r.clone(),
            free,
            bindings,
        });
    }
    Ok(GroundProgram { templates, total })
}

// ---------------------------------------------------------------------------
// Negation normalization
// ---------------------------------------------------------------------------

/// Pushes strong negation down to atoms:
///
/// ```text
/// -(F & G)   becomes  -F | -G          -(F | G)  becomes  -F & -G
/// --F        becomes  F                -~F       becomes  F
/// -exists x F becomes forall x -F      -forall x F becomes exists x -F
/// -(F => G)  becomes  F & -G
/// ```
///
/// The result contains `StrongNeg` only directly over atoms and is satisfied
/// by exactly the same interpretations and valuations as the input.
pub fn normalize_negation(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::True | Formula::False => f.clone(),
        Formula::WeakNeg(g) => Formula::weak_neg(normalize_negation(g)),
        Formula::And(a, b) => Formula::and(normalize_negation(a), normalize_negation(b)),
        Formula::Or(a, b) => Formula::or(normalize_negation(a), normalize_negation(b)),
        Formula::Implies(a, b) => Formula::implies(normalize_negation(a), normalize_negation(b)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), normalize_negation(g)),
        Formula::Forall(v, g) => Formula::forall(v.clone(), normalize_negation(g)),
        Formula::StrongNeg(g) => match g.as_ref() {
            Formula::Atom(_) => f.clone(),
            Formula::StrongNeg(h) | Formula::WeakNeg(h) => normalize_negation(h),
            Formula::And(a, b) => Formula::or(
                normalize_negation(&Formula::strong_neg(a.as_ref().clone())),
                normalize_negation(&Formula::strong_neg(b.as_ref().clone())),
            ),
            Formula::Or(a, b) => Formula::and(
                normalize_negation(&Formula::strong_neg(a.as_ref().clone())),
                normalize_negation(&Formula::strong_neg(b.as_ref().clone())),
            ),
            Formula::Implies(a, b) => Formula::and(
                normalize_negation(a),
                normalize_negation(&Formula::strong_neg(b.as_ref().clone())),
            ),
            Formula::Exists(v, h) => Formula::forall(
                v.clone(),
                normalize_negation(&Formula::strong_neg(h.as_ref().clone())),
            ),
            Formula::Forall(v, h) => Formula::exists(
                v.clone(),
                normalize_negation(&Formula::strong_neg(h.as_ref().clone())),
            ),
            Formula::True => Formula::False,
            Formula::False => Formula::True,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::Profile;

    fn u(s: &str) -> Term {
        Term::uri(format!("http://example.org/{s}"))
    }

    fn pos(p: &str, s: Term, o: Term) -> SignedTriple {
        SignedTriple::positive(format!("http://example.org/{p}"), s, o)
    }

    #[test]
    fn term_ordering_is_uris_then_plain_then_typed() {
        let mut set = BTreeSet::new();
        set.insert(Term::typed("27", "http://www.w3.org/2001/XMLSchema#integer"));
        set.insert(Term::plain("abc"));
        set.insert(Term::uri("http://a.example/x"));
        set.insert(Term::uri("http://b.example/y"));
        let v: Vec<Term> = set.into_iter().collect();
        assert!(matches!(v[0], Term::Uri(_)));
        assert!(matches!(v[1], Term::Uri(_)));
        assert!(matches!(v[2], Term::PlainLiteral { .. }));
        assert!(matches!(v[3], Term::TypedLiteral { .. }));
    }

    #[test]
    fn free_vars_sees_through_connectives_and_respects_binders() {
        // exists y p(x, y) & q(y, z) -- the quantifier binds y only in its scope.
        let f = Formula::and(
            Formula::exists("y", Formula::atom(pos("p", Term::var("x"), Term::var("y")))),
            Formula::atom(pos("q", Term::var("y"), Term::var("z"))),
        );
        let fv: Vec<String> = free_vars(&f).into_iter().collect();
        assert_eq!(fv, vec!["x".to_string(), "y".to_string(), "z".to_string()]);
        let av: Vec<String> = all_vars(&f).into_iter().collect();
        assert_eq!(av, vec!["x".to_string(), "y".to_string(), "z".to_string()]);
    }

    #[test]
    fn rule_free_vars_includes_conclusion_variables() {
        let r = Rule {
            condition: Formula::atom(pos("p", Term::var("x"), u("o"))),
            conclusion: Conclusion::Triple(pos("q", Term::var("x"), Term::var("y"))),
        };
        let fv: Vec<String> = rule_free_vars(&r).into_iter().collect();
        assert_eq!(fv, vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn formula_of_graph_existentially_closes_in_first_occurrence_order() {
        let mut g = Graph::new();
        g.insert(pos("a", u("s"), Term::var("x")));
        g.insert(pos("b", Term::var("y"), Term::var("x")));
        let f = formula_of_graph(&g);
        // Canonical triple order puts a(...) before b(...), so x is met first.
        let Formula::Exists(v1, inner) = f else {
            panic!("expected outer exists, got {f:?}");
        };
        assert_eq!(v1, "x");
        let Formula::Exists(v2, body) = *inner else {
            panic!("expected inner exists");
        };
        assert_eq!(v2, "y");
        assert!(matches!(*body, Formula::And(_, _)));
    }

    #[test]
    fn formula_of_empty_graph_is_true() {
        assert_eq!(formula_of_graph(&Graph::new()), Formula::True);
    }

    #[test]
    fn formula_of_graph_wraps_negative_triples_in_strong_negation() {
        let mut g = Graph::new();
        g.insert(SignedTriple::negative(
            "http://example.org/p",
            u("s"),
            u("o"),
        ));
        let f = formula_of_graph(&g);
        let Formula::StrongNeg(inner) = f else {
            panic!("expected strong negation, got {f:?}");
        };
        assert!(matches!(*inner, Formula::Atom(ref t) if t.positive));
    }

    #[test]
    fn skolemize_replaces_each_variable_consistently() {
        let mut g = Graph::new();
        g.insert(pos("p", Term::var("x"), u("o")));
        g.insert(pos("q", Term::var("x"), Term::var("y")));
        let sk = skolemize(&g, Some("g1")).unwrap();
        let terms = graph_terms(&sk);
        assert!(terms.contains(&Term::uri("urn:skolem:g1:x")));
        assert!(terms.contains(&Term::uri("urn:skolem:g1:y")));
        // Both occurrences of x map to the same URI.
        let p_triple = sk
            .iter()
            .find(|t| t.predicate.ends_with("/p"))
            .unwrap()
            .clone();
        let q_triple = sk
            .iter()
            .find(|t| t.predicate.ends_with("/q"))
            .unwrap()
            .clone();
        assert_eq!(p_triple.subject, q_triple.subject);
    }

    #[test]
    fn skolemize_is_identity_on_ground_graphs_and_idempotent() {
        let mut g = Graph::new();
        g.insert(pos("p", u("s"), u("o")));
        let sk = skolemize(&g, None).unwrap();
        assert_eq!(sk, g);

        let mut h = Graph::new();
        h.insert(pos("p", Term::var("x"), u("o")));
        let once = skolemize(&h, None).unwrap();
        let twice = skolemize(&once, None).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn skolemize_rejects_namespace_collision() {
        let mut g = Graph::new();
        g.insert(pos("p", Term::uri("urn:skolem:g1:z"), Term::var("x")));
        let err = skolemize(&g, Some("g1")).unwrap_err();
        assert!(matches!(err, ModelError::SkolemNamespaceCollision { .. }));
        // A different namespace is fine.
        assert!(skolemize(&g, Some("g2")).is_ok());
    }

    #[test]
    fn content_graph_id_is_stable_and_content_sensitive() {
        let mut g = Graph::new();
        g.insert(pos("p", Term::var("x"), u("o")));
        let id1 = content_graph_id(&g);
        let id2 = content_graph_id(&g);
        assert_eq!(id1, id2);
        g.insert(pos("q", u("s"), u("o")));
        assert_ne!(content_graph_id(&g), id1);
    }

    #[test]
    fn vocabulary_includes_user_terms_builtins_and_skolem_uris() {
        let mut g = Graph::new();
        g.insert(pos("likes", u("Gerd"), Term::var("w")));
        let mut program = Program::new();
        program.insert(Rule {
            condition: Formula::atom(pos("likes", Term::var("x"), Term::var("y"))),
            conclusion: Conclusion::Triple(pos("sel", Term::var("y"), u("Wine"))),
        });
        let o = Ontology { graph: g, program };
        let cfg = VocabularyConfig::new(Profile::Full, 1);
        let v = vocabulary_of(&o, &cfg).unwrap();
        assert!(v.contains(&u("likes")));
        assert!(v.contains(&u("sel")));
        assert!(v.contains(&u("Wine")));
        assert!(v.contains(&Term::uri(vocab::RDF_TYPE)));
        assert!(v.contains(&Term::uri(vocab::ERDF_TOTAL_PROPERTY)));
        assert!(v.iter().any(
            |t| matches!(t, Term::Uri(x) if x.starts_with("urn:skolem:") && x.ends_with(":w"))
        ));
        // Variables are not vocabulary.
        assert!(!v.iter().any(|t| t.is_variable()));
    }

    #[test]
    fn herbrand_universe_replaces_well_formed_xml_literals_by_values() {
        let mut vocabulary = BTreeSet::new();
        vocabulary.insert(u("s"));
        vocabulary.insert(Term::typed("<a >x</a >", vocab::RDF_XML_LITERAL));
        vocabulary.insert(Term::typed("<a", vocab::RDF_XML_LITERAL));
        let res = herbrand_universe(&vocabulary);
        assert!(res.contains(&Resource::Uri("http://example.org/s".into())));
        assert!(res.contains(&Resource::XmlValue("<a>x</a>".into())));
        // The ill-formed literal stays a literal resource.
        assert!(res.contains(&Resource::TypedLiteral {
            value: "<a".into(),
            datatype: vocab::RDF_XML_LITERAL.into(),
        }));
        // The well-formed literal itself is gone from the universe.
        assert!(!res.contains(&Resource::TypedLiteral {
            value: "<a >x</a >".into(),
            datatype: vocab::RDF_XML_LITERAL.into(),
        }));
    }

    #[test]
    fn grounding_counts_are_vocabulary_size_to_the_free_vars() {
        let mut program = Program::new();
        // Two free variables.
        program.insert(Rule {
            condition: Formula::weak_neg(Formula::atom(pos("p", Term::var("x"), Term::var("y")))),
            conclusion: Conclusion::Triple(SignedTriple::negative(
                "http://example.org/p",
                Term::var("x"),
                Term::var("y"),
            )),
        });
        // Ground rule: exactly one instance.
        program.insert(Rule {
            condition: Formula::True,
            conclusion: Conclusion::Triple(pos("q", u("s"), u("o"))),
        });
        let mut vocabulary = BTreeSet::new();
        for t in ["a", "b", "c"] {
            vocabulary.insert(u(t));
        }
        vocabulary.insert(Term::plain("lit"));
        let gp = ground_program(&program, &vocabulary, 1000).unwrap();
        assert_eq!(gp.len(), 4 * 4 + 1);
        assert_eq!(gp.iter().count(), gp.len());
        assert_eq!(grounding_size(&program, vocabulary.len()), 17);
        // Literals are legal subjects in ground instances.
        assert!(gp.iter().any(|r| matches!(
            &r.conclusion,
            Conclusion::Triple(t) if t.subject == Term::plain("lit")
        )));
    }

    #[test]
    fn grounding_respects_the_cap_without_materializing() {
        let mut program = Program::new();
        program.insert(Rule {
            condition: Formula::atom(pos("p", Term::var("x"), Term::var("y"))),
            conclusion: Conclusion::Triple(pos("q", Term::var("x"), Term::var("y"))),
        });
        let mut vocabulary = BTreeSet::new();
        for i in 0..100 {
            vocabulary.insert(u(&format!("t{i}")));
        }
        let err = ground_program(&program, &vocabulary, 9_999).unwrap_err();
        assert_eq!(
            err,
            ModelError::GroundingCapExceeded {
                required: 10_000,
                cap: 9_999
            }
        );
    }

    #[test]
    fn grounding_instantiates_free_variables_only() {
        let mut program = Program::new();
        // forall z inside the condition must stay quantified.
        program.insert(Rule {
            condition: Formula::forall(
                "z",
                Formula::implies(
                    Formula::atom(pos("p", Term::var("z"), Term::var("x"))),
                    Formula::atom(pos("q", Term::var("z"), Term::var("x"))),
                ),
            ),
            conclusion: Conclusion::Triple(pos("r", Term::var("x"), Term::var("x"))),
        });
        let mut vocabulary = BTreeSet::new();
        vocabulary.insert(u("a"));
        vocabulary.insert(u("b"));
        let gp = ground_program(&program, &vocabulary, 100).unwrap();
        assert_eq!(gp.len(), 2);
        for r in gp.iter() {
            assert!(free_vars(&r.condition).is_empty());
            let av = all_vars(&r.condition);
            assert!(av.contains("z"), "bound variable must survive grounding");
        }
    }

    #[test]
    fn normalize_negation_rewrites_compound_strong_negation() {
        let p = || Formula::atom(pos("p", u("s"), u("o")));
        let q = || Formula::atom(pos("q", u("s"), u("o")));

        let cases = vec![
            (
                Formula::strong_neg(Formula::and(p(), q())),
                Formula::or(Formula::strong_neg(p()), Formula::strong_neg(q())),
            ),
            (
                Formula::strong_neg(Formula::or(p(), q())),
                Formula::and(Formula::strong_neg(p()), Formula::strong_neg(q())),
            ),
            (Formula::strong_neg(Formula::strong_neg(p())), p()),
            (Formula::strong_neg(Formula::weak_neg(p())), p()),
            (
                Formula::strong_neg(Formula::implies(p(), q())),
                Formula::and(p(), Formula::strong_neg(q())),
            ),
            (
                Formula::strong_neg(Formula::exists("x", p())),
                Formula::forall("x", Formula::strong_neg(p())),
            ),
            (
                Formula::strong_neg(Formula::forall("x", p())),
                Formula::exists("x", Formula::strong_neg(p())),
            ),
        ];
        for (input, expected) in cases {
            assert_eq!(normalize_negation(&input), expected, "input {input:?}");
        }
    }

    #[test]
    fn normalize_negation_reaches_a_fixpoint_with_atoms_only_under_strong_negation() {
        // -(exists x (p & ~(q | -p))) needs several cascaded rewrites.
        let p = Formula::atom(pos("p", Term::var("x"), u("o")));
        let q = Formula::atom(pos("q", Term::var("x"), u("o")));
        let f = Formula::strong_neg(Formula::exists(
            "x",
            Formula::and(
                p.clone(),
                Formula::weak_neg(Formula::or(q, Formula::strong_neg(p))),
            ),
        ));
        let n = normalize_negation(&f);
        fn strong_neg_only_on_atoms(f: &Formula) -> bool {
            match f {
                Formula::StrongNeg(g) => matches!(g.as_ref(), Formula::Atom(_)),
                Formula::Atom(_) | Formula::True | Formula::False => true,
                Formula::WeakNeg(g) => strong_neg_only_on_atoms(g),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    strong_neg_only_on_atoms(a) && strong_neg_only_on_atoms(b)
                }
                Formula::Exists(_, g) | Formula::Forall(_, g) => strong_neg_only_on_atoms(g),
            }
        }
        assert!(strong_neg_only_on_atoms(&n), "got {n:?}");
        assert_eq!(normalize_negation(&n), n, "normalization is idempotent");
    }
}
