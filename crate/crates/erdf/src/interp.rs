//! Herbrand interpretations, formula satisfaction and the semantic closure.
//!
//! An interpretation assigns each property a truth extension (PT) and a
//! falsity extension (PF) over a fixed resource universe.  The universe is
//! derived from an ontology's vocabulary, with well-formed XML literals
//! replaced by their XML values.  Ontological categories — properties,
//! classes, literal values, total classes and total properties — are not
//! stored separately; they are read off the `rdf:type` extension.
//!
//! The module provides:
//!
//! * [`Universe`]: the interned resource universe of an ontology;
//! * [`HerbrandInterpretation`]: PT/PF triple sets over a universe, with
//!   the extension order [`HerbrandInterpretation::leq`] and a canonical
//!   debug dump;
//! * satisfaction of formulas, graphs and rules
//!   ([`HerbrandInterpretation::satisfies`] and friends), implementing the
//!   three-valued reading: `-` consults falsity extensions, `~` is
//!   vocabulary-guarded non-satisfaction, `=>` abbreviates `~F | G`, and
//!   compound strong negation is pushed inward by the DeMorgan rewrites;
//! * [`close`]: the deterministic least closure of a set of signed triples
//!   under the semantic conditions, reporting incoherence (a triple both
//!   true and false) with a canonical witness;
//! * [`check_conditions`]: a validator listing every violated semantic
//!   condition with witnesses.
//!
//! Totalness of classes and properties is *not* enforced by the closure —
//! deciding unknown memberships of total classes is a branching choice that
//! belongs to the stable-model search.  The closure only derives what every
//! extension must contain; [`check_conditions`] reports unresolved
//! totalness as violations of the totalness conditions.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::error::Error;
use std::fmt;
use std::sync::Arc;

use crate::model::{
    formula_terms, free_vars, normalize_negation, rule_free_vars, vocabulary_of, Conclusion,
    Formula, Graph, ModelError, Ontology, Resource, Rule, SignedTriple, Term,
};
use crate::vocab::{self, VocabularyConfig};

/// Errors from interpretation construction and closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InterpError {
    /// The closure derived some triple as both true and false.  The witness
    /// is the least such triple in canonical order.
    Incoherent {
        predicate: Resource,
        subject: Resource,
        object: Resource,
    },
    /// Two interpretations over different universes were compared.
    UniverseMismatch,
    /// A triple with variables was asserted where ground triples are
    /// required.
    UngroundTriple(SignedTriple),
    /// A term does not belong to the universe's vocabulary.
    UnknownTerm(Term),
    Model(ModelError),
}

impl fmt::Display for InterpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InterpError::Incoherent {
                predicate,
                subject,
                object,
            } => write!(
                f,
                "incoherent: {predicate}({subject}, {object}) is both true and false"
            ),
            InterpError::UniverseMismatch => {
                write!(f, "interpretations have different universes")
            }
            InterpError::UngroundTriple(t) => write!(f, "triple is not ground: {t}"),
            InterpError::UnknownTerm(t) => write!(f, "term outside the vocabulary: {t}"),
            InterpError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl Error for InterpError {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            InterpError::Model(e) => Some(e),
            _ => None,
        }
    }
}

impl From<ModelError> for InterpError {
    fn from(e: ModelError) -> InterpError {
        InterpError::Model(e)
    }
}

/// A ground triple as universe indices: (predicate, subject, object).
pub(crate) type IdTriple = (u32, u32, u32);

/// Universe indices of the built-in names used by the semantic conditions.
/// `member` and `cmp` exist only in the full profile.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BuiltinIds {
    pub rdf_type: u32,
    pub rdf_property: u32,
    pub rdfs_class: u32,
    pub rdfs_resource: u32,
    pub rdfs_literal: u32,
    pub rdfs_datatype: u32,
    pub xml_literal: u32,
    pub sub_class_of: u32,
    pub sub_property_of: u32,
    pub domain: u32,
    pub range: u32,
    pub total_class: u32,
    pub total_property: u32,
    pub member: Option<u32>,
    pub cmp: Option<u32>,
}

/// The interned resource universe of an ontology: every vocabulary term's
/// denotation, sorted canonically so that indices are stable and iteration
/// is deterministic.
pub struct Universe {
    resources: Vec<Resource>,
    index: HashMap<Resource, u32>,
    vocabulary: BTreeSet<Term>,
    cfg: VocabularyConfig,
    pub(crate) ids: BuiltinIds,
    plain_literal_ids: Vec<u32>,
    xml_value_ids: Vec<u32>,
    ill_typed_xml_ids: Vec<u32>,
}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Universe({} resources)", self.resources.len())
    }
}

impl Universe {
    /// Builds the universe of an ontology: the denotations of its
    /// vocabulary (skolemized graph terms, program terms, built-ins).
    pub fn of_ontology(o: &Ontology, cfg: &VocabularyConfig) -> Result<Arc<Universe>, ModelError> {
        let vocabulary = vocabulary_of(o, cfg)?;
        let resources: Vec<Resource> = vocabulary.iter().map(Resource::denoted_by).collect::<BTreeSet<_>>().into_iter().collect();
        let index: HashMap<Resource, u32> = resources
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i as u32))
            .collect();
        let must = |uri: &str| index[&Resource::Uri(uri.to_string())];
        let opt = |uri: &str| index.get(&Resource::Uri(uri.to_string())).copied();
        let ids = BuiltinIds {
            rdf_type: must(vocab::RDF_TYPE),
            rdf_property: must(vocab::RDF_PROPERTY),
            rdfs_class: must(vocab::RDFS_CLASS),
            rdfs_resource: must(vocab::RDFS_RESOURCE),
            rdfs_literal: must(vocab::RDFS_LITERAL),
            rdfs_datatype: must(vocab::RDFS_DATATYPE),
            xml_literal: must(vocab::RDF_XML_LITERAL),
            sub_class_of: must(vocab::RDFS_SUB_CLASS_OF),
            sub_property_of: must(vocab::RDFS_SUB_PROPERTY_OF),
            domain: must(vocab::RDFS_DOMAIN),
            range: must(vocab::RDFS_RANGE),
            total_class: must(vocab::ERDF_TOTAL_CLASS),
            total_property: must(vocab::ERDF_TOTAL_PROPERTY),
            member: opt(vocab::RDFS_MEMBER),
            cmp: opt(vocab::RDFS_CMP),
        };
        let mut plain_literal_ids = Vec::new();
        let mut xml_value_ids = Vec::new();
        let mut ill_typed_xml_ids = Vec::new();
        for (i, r) in resources.iter().enumerate() {
            match r {
                Resource::PlainLiteral { .. } => plain_literal_ids.push(i as u32),
                Resource::XmlValue(_) => xml_value_ids.push(i as u32),
                Resource::TypedLiteral { datatype, .. } if datatype == vocab::RDF_XML_LITERAL => {
                    // Well-formed XML literals denote XML values, so a typed
                    // literal carrying this datatype is necessarily ill-typed.
                    ill_typed_xml_ids.push(i as u32)
                }
                _ => {}
            }
        }
        Ok(Arc::new(Universe {
            resources,
            index,
            vocabulary,
            cfg: *cfg,
            ids,
            plain_literal_ids,
            xml_value_ids,
            ill_typed_xml_ids,
        }))
    }

    pub fn len(&self) -> usize {
        self.resources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.resources.is_empty()
    }

    pub fn resource(&self, id: u32) -> &Resource {
        &self.resources[id as usize]
    }

    pub fn id(&self, r: &Resource) -> Option<u32> {
        self.index.get(r).copied()
    }

    /// The denotation of a ground term as a universe index, if it denotes
    /// into this universe.  Variables have no denotation.
    pub fn denote(&self, t: &Term) -> Option<u32> {
        if t.is_variable() {
            return None;
        }
        self.id(&Resource::denoted_by(t))
    }

    pub fn contains_term(&self, t: &Term) -> bool {
        self.vocabulary.contains(t)
    }

    pub fn vocabulary(&self) -> &BTreeSet<Term> {
        &self.vocabulary
    }

    pub fn cfg(&self) -> &VocabularyConfig {
        &self.cfg
    }

    pub(crate) fn all_ids(&self) -> impl Iterator<Item = u32> {
        0..self.resources.len() as u32
    }

    fn same_as(&self, other: &Universe) -> bool {
        std::ptr::eq(self, other) || self.resources == other.resources
    }
}

/// A valuation maps variable names to resources.
pub type Valuation = BTreeMap<String, Resource>;

/// A Herbrand interpretation: truth and falsity triple sets over a shared
/// universe.  Coherence (no triple both true and false) is *not* a
/// structural invariant — validators and the closure report it — so
/// candidate and intermediate interpretations can be represented too.
#[derive(Clone)]
pub struct HerbrandInterpretation {
    universe: Arc<Universe>,
    truths: HashSet<IdTriple>,
    falsities: HashSet<IdTriple>,
}

impl fmt::Debug for HerbrandInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "HerbrandInterpretation(pt: {}, pf: {})\n{}",
            self.truths.len(),
            self.falsities.len(),
            self.dump()
        )
    }
}

impl PartialEq for HerbrandInterpretation {
    fn eq(&self, other: &Self) -> bool {
        self.universe.same_as(&other.universe)
            && self.truths == other.truths
            && self.falsities == other.falsities
    }
}

impl Eq for HerbrandInterpretation {}

impl HerbrandInterpretation {
    pub fn empty(universe: Arc<Universe>) -> HerbrandInterpretation {
        HerbrandInterpretation {
            universe,
            truths: HashSet::new(),
            falsities: HashSet::new(),
        }
    }

    /// An interpretation holding exactly the given ground triples (positive
    /// ones as truths, negative ones as falsities), with no closure applied.
    pub fn from_graph(
        universe: Arc<Universe>,
        g: &Graph,
    ) -> Result<HerbrandInterpretation, InterpError> {
        let mut i = HerbrandInterpretation::empty(universe);
        for t in g {
            let ids = i.denote_triple(t)?;
            if t.positive {
                i.truths.insert(ids);
            } else {
                i.falsities.insert(ids);
            }
        }
        Ok(i)
    }

    fn denote_triple(&self, t: &SignedTriple) -> Result<IdTriple, InterpError> {
        if !t.is_ground() {
            return Err(InterpError::UngroundTriple(t.clone()));
        }
        let pred = Term::Uri(t.predicate.clone());
        let p = self
            .universe
            .denote(&pred)
            .ok_or(InterpError::UnknownTerm(pred))?;
        let s = self
            .universe
            .denote(&t.subject)
            .ok_or_else(|| InterpError::UnknownTerm(t.subject.clone()))?;
        let o = self
            .universe
            .denote(&t.object)
            .ok_or_else(|| InterpError::UnknownTerm(t.object.clone()))?;
        Ok((p, s, o))
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn pt_count(&self) -> usize {
        self.truths.len()
    }

    pub fn pf_count(&self) -> usize {
        self.falsities.len()
    }

    pub(crate) fn truth_ids(&self) -> &HashSet<IdTriple> {
        &self.truths
    }

    pub(crate) fn falsity_ids(&self) -> &HashSet<IdTriple> {
        &self.falsities
    }

    pub(crate) fn contains_pt(&self, t: IdTriple) -> bool {
        self.truths.contains(&t)
    }

    pub(crate) fn contains_pf(&self, t: IdTriple) -> bool {
        self.falsities.contains(&t)
    }

    pub(crate) fn from_id_sets(
        universe: Arc<Universe>,
        truths: HashSet<IdTriple>,
        falsities: HashSet<IdTriple>,
    ) -> HerbrandInterpretation {
        HerbrandInterpretation {
            universe,
            truths,
            falsities,
        }
    }

    /// Raw membership of a ground signed triple: its truth set for positive
    /// triples, its falsity set for negative ones.  Unknown terms hold
    /// nowhere.
    pub fn holds(&self, t: &SignedTriple) -> bool {
        match self.denote_triple(t) {
            Ok(ids) => {
                if t.positive {
                    self.truths.contains(&ids)
                } else {
                    self.falsities.contains(&ids)
                }
            }
            Err(_) => false,
        }
    }

    pub fn is_coherent(&self) -> bool {
        self.truths.is_disjoint(&self.falsities)
    }

    /// The extension order: both extensions grow.  Interpretations over
    /// different universes are incomparable (an error, not `false`).
    pub fn leq(&self, other: &HerbrandInterpretation) -> Result<bool, InterpError> {
        if !self.universe.same_as(&other.universe) {
            return Err(InterpError::UniverseMismatch);
        }
        Ok(self.truths.is_subset(&other.truths) && self.falsities.is_subset(&other.falsities))
    }

    /// The true triples as resource triples, canonically ordered.
    pub fn pt_resources(&self) -> BTreeSet<(Resource, Resource, Resource)> {
        self.resource_triples(&self.truths)
    }

    /// The false triples as resource triples, canonically ordered.
    pub fn pf_resources(&self) -> BTreeSet<(Resource, Resource, Resource)> {
        self.resource_triples(&self.falsities)
    }

    fn resource_triples(
        &self,
        set: &HashSet<IdTriple>,
    ) -> BTreeSet<(Resource, Resource, Resource)> {
        set.iter()
            .map(|&(p, s, o)| {
                (
                    self.universe.resource(p).clone(),
                    self.universe.resource(s).clone(),
                    self.universe.resource(o).clone(),
                )
            })
            .collect()
    }

    /// Canonical text dump: `PT p(s, o)` lines then `PF p(s, o)` lines,
    /// each group sorted.  Identical interpretations dump identically.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut sorted: Vec<IdTriple> = self.truths.iter().copied().collect();
        sorted.sort_unstable();
        for (p, s, o) in sorted {
            out.push_str(&format!(
                "PT {}({}, {})\n",
                self.universe.resource(p),
                self.universe.resource(s),
                self.universe.resource(o)
            ));
        }
        let mut sorted: Vec<IdTriple> = self.falsities.iter().copied().collect();
        sorted.sort_unstable();
        for (p, s, o) in sorted {
            out.push_str(&format!(
                "PF {}({}, {})\n",
                self.universe.resource(p),
                self.universe.resource(s),
                self.universe.resource(o)
            ));
        }
        out
    }

    // -- satisfaction --------------------------------------------------------

    /// Satisfaction of a formula under a valuation.  Implements each clause
    /// of the satisfaction relation: positive atoms require the predicate to
    /// be a vocabulary URI typed as a property and the pair to lie in its
    /// truth extension; strongly negated atoms consult the falsity
    /// extension; `~G` holds iff `G`'s vocabulary is covered and `G` fails;
    /// `F => G` abbreviates `~F | G`; quantifiers range over the whole
    /// universe; compound strong negation is rewritten inward first.
    /// Variables the valuation leaves unbound (or binds outside the
    /// universe) make their atoms unsatisfied.
    pub fn satisfies(&self, v: &Valuation, f: &Formula) -> bool {
        let nf = normalize_negation(f);
        let mut env: BTreeMap<String, u32> = BTreeMap::new();
        for (name, r) in v {
            if let Some(id) = self.universe.id(r) {
                env.insert(name.clone(), id);
            }
        }
        self.eval(&mut env, &nf)
    }

    /// Satisfaction with all variables read universally.
    pub fn satisfies_closed(&self, f: &Formula) -> bool {
        let nf = normalize_negation(f);
        let vars: Vec<String> = free_vars(&nf).into_iter().collect();
        let mut env = BTreeMap::new();
        self.forall_assignments(&mut env, &vars, 0, &nf)
    }

    fn forall_assignments(
        &self,
        env: &mut BTreeMap<String, u32>,
        vars: &[String],
        idx: usize,
        nf: &Formula,
    ) -> bool {
        if idx == vars.len() {
            return self.eval(env, nf);
        }
        for r in self.universe.all_ids() {
            let old = env.insert(vars[idx].clone(), r);
            let ok = self.forall_assignments(env, vars, idx + 1, nf);
            match old {
                Some(o) => {
                    env.insert(vars[idx].clone(), o);
                }
                None => {
                    env.remove(&vars[idx]);
                }
            }
            if !ok {
                return false;
            }
        }
        true
    }

    /// Graph satisfaction: one valuation of the graph's variables making
    /// every triple hold.
    pub fn satisfies_graph(&self, g: &Graph) -> bool {
        let triples: Vec<&SignedTriple> = g.iter().collect();
        let mut vars: Vec<String> = BTreeSet::from_iter(triples.iter().flat_map(|t| {
            [&t.subject, &t.object].into_iter().filter_map(|x| match x {
                Term::Variable(v) => Some(v.clone()),
                _ => None,
            })
        }))
        .into_iter()
        .collect();
        vars.sort();
        // For pruning, check each triple as soon as its variables are bound.
        let depth_of = |t: &SignedTriple| -> usize {
            [&t.subject, &t.object]
                .into_iter()
                .filter_map(|x| match x {
                    Term::Variable(v) => vars.iter().position(|w| w == v).map(|p| p + 1),
                    _ => None,
                })
                .max()
                .unwrap_or(0)
        };
        let mut by_depth: Vec<Vec<&SignedTriple>> = vec![Vec::new(); vars.len() + 1];
        for t in &triples {
            by_depth[depth_of(t)].push(t);
        }
        let mut env = BTreeMap::new();
        self.match_graph(&mut env, &vars, &by_depth, 0)
    }

    fn match_graph(
        &self,
        env: &mut BTreeMap<String, u32>,
        vars: &[String],
        by_depth: &[Vec<&SignedTriple>],
        depth: usize,
    ) -> bool {
        if !by_depth[depth]
            .iter()
            .all(|t| self.atom_holds(env, t, !t.positive))
        {
            return false;
        }
        if depth == vars.len() {
            return true;
        }
        for r in self.universe.all_ids() {
            env.insert(vars[depth].clone(), r);
            if self.match_graph(env, vars, by_depth, depth + 1) {
                env.remove(&vars[depth]);
                return true;
            }
        }
        env.remove(&vars[depth]);
        false
    }

    /// Rule satisfaction: every valuation of the rule's variables that
    /// satisfies the condition also satisfies the conclusion.  A constraint
    /// (conclusion `false`) is satisfied iff no valuation satisfies the
    /// condition.
    pub fn satisfies_rule(&self, r: &Rule) -> bool {
        let cond = normalize_negation(&r.condition);
        let vars: Vec<String> = rule_free_vars(r).into_iter().collect();
        let mut env = BTreeMap::new();
        self.rule_assignments(&mut env, &vars, 0, &cond, &r.conclusion)
    }

    fn rule_assignments(
        &self,
        env: &mut BTreeMap<String, u32>,
        vars: &[String],
        idx: usize,
        cond: &Formula,
        concl: &Conclusion,
    ) -> bool {
        if idx == vars.len() {
            if !self.eval(env, cond) {
                return true;
            }
            return match concl {
                Conclusion::False => false,
                Conclusion::Triple(t) => self.atom_holds(env, t, !t.positive),
            };
        }
        for r in self.universe.all_ids() {
            env.insert(vars[idx].clone(), r);
            let ok = self.rule_assignments(env, vars, idx + 1, cond, concl);
            env.remove(&vars[idx]);
            if !ok {
                return false;
            }
        }
        true
    }

    fn term_id(&self, env: &BTreeMap<String, u32>, t: &Term) -> Option<u32> {
        match t {
            Term::Variable(v) => env.get(v).copied(),
            _ => self.universe.denote(t),
        }
    }

    /// The atom clauses: vocabulary side conditions, the property check,
    /// then membership in the truth (or, for `in_falsities`, the falsity)
    /// extension.
    fn atom_holds(
        &self,
        env: &BTreeMap<String, u32>,
        t: &SignedTriple,
        in_falsities: bool,
    ) -> bool {
        let pred = Term::Uri(t.predicate.clone());
        if !self.universe.contains_term(&pred) {
            return false;
        }
        for side in [&t.subject, &t.object] {
            if !side.is_variable() && !self.universe.contains_term(side) {
                return false;
            }
        }
        let ids = &self.universe.ids;
        let Some(p) = self.universe.denote(&pred) else {
            return false;
        };
        if !self.truths.contains(&(ids.rdf_type, p, ids.rdf_property)) {
            return false;
        }
        let (Some(s), Some(o)) = (self.term_id(env, &t.subject), self.term_id(env, &t.object))
        else {
            return false;
        };
        if in_falsities {
            self.falsities.contains(&(p, s, o))
        } else {
            self.truths.contains(&(p, s, o))
        }
    }

    fn vocab_guard(&self, f: &Formula) -> bool {
        formula_terms(f)
            .iter()
            .all(|t| self.universe.contains_term(t))
    }

    fn eval(&self, env: &mut BTreeMap<String, u32>, f: &Formula) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(t) => self.atom_holds(env, t, false),
            Formula::StrongNeg(inner) => match &**inner {
                Formula::Atom(t) => self.atom_holds(env, t, true),
                _ => {
                    let rewritten = normalize_negation(f);
                    self.eval(env, &rewritten)
                }
            },
            Formula::WeakNeg(g) => self.vocab_guard(g) && !self.eval(env, g),
            Formula::And(a, b) => self.eval(env, a) && self.eval(env, b),
            Formula::Or(a, b) => self.eval(env, a) || self.eval(env, b),
            Formula::Implies(a, b) => {
                (self.vocab_guard(a) && !self.eval(env, a)) || self.eval(env, b)
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
    ) -> bool {
        let old = env.get(x).copied();
        for r in self.universe.all_ids() {
            env.insert(x.to_string(), r);
            let holds = self.eval(env, g);
            if holds != universal {
                restore(env, x, old);
                return holds;
            }
        }
        restore(env, x, old);
        universal
    }
}

fn restore(env: &mut BTreeMap<String, u32>, x: &str, old: Option<u32>) {
    match old {
        Some(o) => {
            env.insert(x.to_string(), o);
        }
        None => {
            env.remove(x);
        }
    }
}

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

/// Worklist engine computing the least extension of a set of signed triples
/// under the semantic conditions (minus totalness).  Clones cheaply, so the
/// stable-model search can branch on a shared prefix.
#[derive(Clone)]
pub(crate) struct ClosureEngine {
    universe: Arc<Universe>,
    truths: HashSet<IdTriple>,
    falsities: HashSet<IdTriple>,
    queue: VecDeque<(bool, IdTriple)>,
    pt_by_pred: HashMap<u32, Vec<(u32, u32)>>,
    pf_by_pred: HashMap<u32, Vec<(u32, u32)>>,
    ct_of: HashMap<u32, Vec<u32>>,
    cf_of: HashMap<u32, Vec<u32>>,
    cls_supers: HashMap<u32, Vec<u32>>,
    cls_subs: HashMap<u32, Vec<u32>>,
    prop_supers: HashMap<u32, Vec<u32>>,
    prop_subs: HashMap<u32, Vec<u32>>,
    domains: HashMap<u32, Vec<u32>>,
    ranges: HashMap<u32, Vec<u32>>,
    clashes: BTreeSet<IdTriple>,
}

impl ClosureEngine {
    /// A fresh engine already closed over the axiomatic triples and the
    /// universe-wide typings (every resource a `rdfs:Resource`, literals in
    /// their literal classes, ill-typed XML literals excluded from
    /// `rdfs:Literal`).
    pub(crate) fn new(universe: Arc<Universe>) -> ClosureEngine {
        let ids = universe.ids;
        let mut e = ClosureEngine {
            universe: universe.clone(),
            truths: HashSet::new(),
            falsities: HashSet::new(),
            queue: VecDeque::new(),
            pt_by_pred: HashMap::new(),
            pf_by_pred: HashMap::new(),
            ct_of: HashMap::new(),
            cf_of: HashMap::new(),
            cls_supers: HashMap::new(),
            cls_subs: HashMap::new(),
            prop_supers: HashMap::new(),
            prop_subs: HashMap::new(),
            domains: HashMap::new(),
            ranges: HashMap::new(),
            clashes: BTreeSet::new(),
        };
        for u in universe.all_ids() {
            e.add_pt((ids.rdf_type, u, ids.rdfs_resource));
        }
        for &l in &universe.plain_literal_ids {
            e.add_pt((ids.rdf_type, l, ids.rdfs_literal));
        }
        for &x in &universe.xml_value_ids {
            e.add_pt((ids.rdf_type, x, ids.xml_literal));
            e.add_pt((ids.rdf_type, x, ids.rdfs_literal));
        }
        for &l in &universe.ill_typed_xml_ids {
            e.add_pf((ids.rdf_type, l, ids.rdfs_literal));
        }
        for t in vocab::axiomatic_graph(&universe.cfg) {
            let p = universe
                .denote(&Term::Uri(t.predicate.clone()))
                .expect("axiom predicate is built-in");
            let s = universe.denote(&t.subject).expect("axiom subject is built-in");
            let o = universe.denote(&t.object).expect("axiom object is built-in");
            e.add_pt((p, s, o));
        }
        e.run();
        e
    }

    /// Asserts the ground triples of a graph (positive as truths, negative
    /// as falsities) without running the closure.
    pub(crate) fn assert_graph(&mut self, g: &Graph) -> Result<(), InterpError> {
        for t in g {
            if !t.is_ground() {
                return Err(InterpError::UngroundTriple(t.clone()));
            }
            let pred = Term::Uri(t.predicate.clone());
            let p = self
                .universe
                .denote(&pred)
                .ok_or(InterpError::UnknownTerm(pred))?;
            let s = self
                .universe
                .denote(&t.subject)
                .ok_or_else(|| InterpError::UnknownTerm(t.subject.clone()))?;
            let o = self
                .universe
                .denote(&t.object)
                .ok_or_else(|| InterpError::UnknownTerm(t.object.clone()))?;
            if t.positive {
                self.add_pt((p, s, o));
            } else {
                self.add_pf((p, s, o));
            }
        }
        Ok(())
    }

    pub(crate) fn add_pt(&mut self, t: IdTriple) {
        if self.truths.insert(t) {
            if self.falsities.contains(&t) {
                self.clashes.insert(t);
            }
            self.queue.push_back((true, t));
        }
    }

    pub(crate) fn add_pf(&mut self, t: IdTriple) {
        if self.falsities.insert(t) {
            if self.truths.contains(&t) {
                self.clashes.insert(t);
            }
            self.queue.push_back((false, t));
        }
    }

    /// Runs the worklist to the fixpoint.  Incoherence does not stop the
    /// run; clashes accumulate and are reported by [`Self::coherent`].
    pub(crate) fn run(&mut self) {
        while let Some((sign, t)) = self.queue.pop_front() {
            if sign {
                self.process_pt(t);
            } else {
                self.process_pf(t);
            }
        }
    }

    fn process_pt(&mut self, (p, s, o): IdTriple) {
        let ids = self.universe.ids;
        // Every asserted property has the property type.
        self.add_pt((ids.rdf_type, p, ids.rdf_property));
        if let Some(sup) = self.prop_supers.get(&p).cloned() {
            for q in sup {
                self.add_pt((q, s, o));
            }
        }
        if let Some(ds) = self.domains.get(&p).cloned() {
            for y in ds {
                self.add_pt((ids.rdf_type, s, y));
            }
        }
        if let Some(rs) = self.ranges.get(&p).cloned() {
            for y in rs {
                self.add_pt((ids.rdf_type, o, y));
            }
        }
        self.pt_by_pred.entry(p).or_default().push((s, o));

        if p == ids.rdf_type {
            self.ct_of.entry(o).or_default().push(s);
            if let Some(sup) = self.cls_supers.get(&o).cloned() {
                for y in sup {
                    self.add_pt((ids.rdf_type, s, y));
                }
            }
            if o == ids.rdfs_class {
                self.add_pt((ids.sub_class_of, s, ids.rdfs_resource));
                self.add_pt((ids.sub_class_of, s, s));
            }
            if o == ids.rdf_property {
                self.add_pt((ids.sub_property_of, s, s));
            }
            if o == ids.rdfs_datatype {
                self.add_pt((ids.sub_class_of, s, ids.rdfs_literal));
            }
            if Some(o) == ids.cmp {
                let member = ids.member.expect("member accompanies the membership class");
                self.add_pt((ids.sub_property_of, s, member));
            }
        }
        if p == ids.sub_class_of {
            self.add_pt((ids.rdf_type, s, ids.rdfs_class));
            self.add_pt((ids.rdf_type, o, ids.rdfs_class));
            self.cls_supers.entry(s).or_default().push(o);
            self.cls_subs.entry(o).or_default().push(s);
            if let Some(zs) = self.cls_supers.get(&o).cloned() {
                for z in zs {
                    self.add_pt((ids.sub_class_of, s, z));
                }
            }
            if let Some(ws) = self.cls_subs.get(&s).cloned() {
                for w in ws {
                    self.add_pt((ids.sub_class_of, w, o));
                }
            }
            if let Some(ms) = self.ct_of.get(&s).cloned() {
                for m in ms {
                    self.add_pt((ids.rdf_type, m, o));
                }
            }
            if let Some(ms) = self.cf_of.get(&o).cloned() {
                for m in ms {
                    self.add_pf((ids.rdf_type, m, s));
                }
            }
        }
        if p == ids.sub_property_of {
            self.add_pt((ids.rdf_type, s, ids.rdf_property));
            self.add_pt((ids.rdf_type, o, ids.rdf_property));
            self.prop_supers.entry(s).or_default().push(o);
            self.prop_subs.entry(o).or_default().push(s);
            if let Some(zs) = self.prop_supers.get(&o).cloned() {
                for z in zs {
                    self.add_pt((ids.sub_property_of, s, z));
                }
            }
            if let Some(ws) = self.prop_subs.get(&s).cloned() {
                for w in ws {
                    self.add_pt((ids.sub_property_of, w, o));
                }
            }
            if let Some(pairs) = self.pt_by_pred.get(&s).cloned() {
                for (a, b) in pairs {
                    self.add_pt((o, a, b));
                }
            }
            if let Some(pairs) = self.pf_by_pred.get(&o).cloned() {
                for (a, b) in pairs {
                    self.add_pf((s, a, b));
                }
            }
        }
        if p == ids.domain {
            self.domains.entry(s).or_default().push(o);
            if let Some(pairs) = self.pt_by_pred.get(&s).cloned() {
                for (z, _) in pairs {
                    self.add_pt((ids.rdf_type, z, o));
                }
            }
        }
        if p == ids.range {
            self.ranges.entry(s).or_default().push(o);
            if let Some(pairs) = self.pt_by_pred.get(&s).cloned() {
                for (_, w) in pairs {
                    self.add_pt((ids.rdf_type, w, o));
                }
            }
        }
    }

    fn process_pf(&mut self, (p, s, o): IdTriple) {
        let ids = self.universe.ids;
        // Falsity extensions are extensions of properties too.
        self.add_pt((ids.rdf_type, p, ids.rdf_property));
        if let Some(subs) = self.prop_subs.get(&p).cloned() {
            for q in subs {
                self.add_pf((q, s, o));
            }
        }
        self.pf_by_pred.entry(p).or_default().push((s, o));
        if p == ids.rdf_type {
            self.cf_of.entry(o).or_default().push(s);
            if let Some(subs) = self.cls_subs.get(&o).cloned() {
                for x in subs {
                    self.add_pf((ids.rdf_type, s, x));
                }
            }
        }
    }

    pub(crate) fn is_coherent(&self) -> bool {
        self.clashes.is_empty()
    }

    pub(crate) fn truths(&self) -> &HashSet<IdTriple> {
        &self.truths
    }

    pub(crate) fn falsities(&self) -> &HashSet<IdTriple> {
        &self.falsities
    }

    pub(crate) fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    /// The current triple sets as an interpretation, coherent or not.
    pub(crate) fn interpretation(&self) -> HerbrandInterpretation {
        HerbrandInterpretation {
            universe: self.universe.clone(),
            truths: self.truths.clone(),
            falsities: self.falsities.clone(),
        }
    }

    /// The interpretation if coherent, else the least clash as a witness.
    pub(crate) fn coherent(&self) -> Result<HerbrandInterpretation, InterpError> {
        match self.clashes.iter().next() {
            None => Ok(self.interpretation()),
            Some(&(p, s, o)) => Err(InterpError::Incoherent {
                predicate: self.universe.resource(p).clone(),
                subject: self.universe.resource(s).clone(),
                object: self.universe.resource(o).clone(),
            }),
        }
    }
}

/// The least interpretation containing the axiomatic triples and `base`,
/// closed under the semantic conditions other than totalness, over the
/// universe of `o`.  `base` may contain negative triples (they seed the
/// falsity extensions).  Fails with the canonically least clash if the
/// closure is incoherent.
pub fn close(
    base: &Graph,
    o: &Ontology,
    cfg: &VocabularyConfig,
) -> Result<HerbrandInterpretation, InterpError> {
    let universe = Universe::of_ontology(o, cfg)?;
    close_in_universe(universe, base)
}

/// [`close`] over an existing universe.
pub fn close_in_universe(
    universe: Arc<Universe>,
    base: &Graph,
) -> Result<HerbrandInterpretation, InterpError> {
    let mut e = ClosureEngine::new(universe);
    e.assert_graph(base)?;
    e.run();
    e.coherent()
}

// ---------------------------------------------------------------------------
// Condition checking
// ---------------------------------------------------------------------------

/// A violated semantic condition with a human-readable witness.
/// `condition` 0 means coherence; 1 through 17 are the numbered conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: u8,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.condition == 0 {
            write!(f, "coherence: {}", self.witness)
        } else {
            write!(f, "condition {}: {}", self.condition, self.witness)
        }
    }
}

/// Checks an interpretation against coherence and the seventeen semantic
/// conditions, reporting every violation with a witness.  An empty report
/// means the interpretation is a coherent interpretation of its vocabulary,
/// with every declared total class and property fully decided.
pub fn check_conditions(i: &HerbrandInterpretation, cfg: &VocabularyConfig) -> Vec<Violation> {
    let u = i.universe();
    let ids = u.ids;
    let mut out: Vec<Violation> = Vec::new();
    let mut report = |condition: u8, witness: String| out.push(Violation { condition, witness });

    let pt: BTreeSet<IdTriple> = i.truths.iter().copied().collect();
    let pf: BTreeSet<IdTriple> = i.falsities.iter().copied().collect();
    let show = |t: &IdTriple| -> String {
        format!(
            "{}({}, {})",
            u.resource(t.0),
            u.resource(t.1),
            u.resource(t.2)
        )
    };
    let pairs_of = |set: &BTreeSet<IdTriple>, p: u32| -> BTreeSet<(u32, u32)> {
        set.iter()
            .filter(|t| t.0 == p)
            .map(|t| (t.1, t.2))
            .collect()
    };
    let ct_of = |set: &BTreeSet<IdTriple>, c: u32| -> BTreeSet<u32> {
        set.iter()
            .filter(|t| t.0 == ids.rdf_type && t.2 == c)
            .map(|t| t.1)
            .collect()
    };

    // Coherence.
    for t in pt.intersection(&pf) {
        report(0, format!("{} is both true and false", show(t)));
    }

    // Condition 2: the ontological categories.  Every resource is typed
    // rdfs:Resource; plain literals are literal values; predicates of
    // asserted triples are properties.
    for r in u.all_ids() {
        if !pt.contains(&(ids.rdf_type, r, ids.rdfs_resource)) {
            report(2, format!("{} is not typed rdfs:Resource", u.resource(r)));
        }
    }
    for &l in &u.plain_literal_ids {
        if !pt.contains(&(ids.rdf_type, l, ids.rdfs_literal)) {
            report(2, format!("plain literal {} is not a literal value", u.resource(l)));
        }
    }
    for t in pt.iter().chain(pf.iter()) {
        if !pt.contains(&(ids.rdf_type, t.0, ids.rdf_property)) {
            report(
                2,
                format!("{} has predicate {} not typed rdf:Property", show(t), u.resource(t.0)),
            );
        }
    }

    // Conditions 3 and 4: domain and range.
    for &(x, y) in &pairs_of(&pt, ids.domain) {
        for &(z, _) in &pairs_of(&pt, x) {
            if !pt.contains(&(ids.rdf_type, z, y)) {
                report(
                    3,
                    format!(
                        "{} has domain {} but subject {} is not an instance",
                        u.resource(x),
                        u.resource(y),
                        u.resource(z)
                    ),
                );
            }
        }
    }
    for &(x, y) in &pairs_of(&pt, ids.range) {
        for &(_, w) in &pairs_of(&pt, x) {
            if !pt.contains(&(ids.rdf_type, w, y)) {
                report(
                    4,
                    format!(
                        "{} has range {} but object {} is not an instance",
                        u.resource(x),
                        u.resource(y),
                        u.resource(w)
                    ),
                );
            }
        }
    }

    let classes = ct_of(&pt, ids.rdfs_class);
    let properties = ct_of(&pt, ids.rdf_property);
    let sub_cls = pairs_of(&pt, ids.sub_class_of);
    let sub_prop = pairs_of(&pt, ids.sub_property_of);

    // Condition 5: every class is a subclass of rdfs:Resource.
    for &x in &classes {
        if !sub_cls.contains(&(x, ids.rdfs_resource)) {
            report(5, format!("class {} is not under rdfs:Resource", u.resource(x)));
        }
    }

    // Condition 6: subclass edges type their ends and propagate extensions.
    for &(x, y) in &sub_cls {
        for (end, name) in [(x, "subject"), (y, "object")] {
            if !classes.contains(&end) {
                report(
                    6,
                    format!("subClassOf {name} {} is not a class", u.resource(end)),
                );
            }
        }
        for m in ct_of(&pt, x).difference(&ct_of(&pt, y)) {
            report(
                6,
                format!(
                    "{} is an instance of {} but not of its superclass {}",
                    u.resource(*m),
                    u.resource(x),
                    u.resource(y)
                ),
            );
        }
        for m in ct_of(&pf, y).difference(&ct_of(&pf, x)) {
            report(
                6,
                format!(
                    "{} is a non-instance of {} but not of its subclass {}",
                    u.resource(*m),
                    u.resource(y),
                    u.resource(x)
                ),
            );
        }
    }

    // Condition 7: subClassOf is reflexive on classes and transitive.
    for &x in &classes {
        if !sub_cls.contains(&(x, x)) {
            report(7, format!("subClassOf is not reflexive at {}", u.resource(x)));
        }
    }
    for &(x, y) in &sub_cls {
        for &(y2, z) in &sub_cls {
            if y == y2 && !sub_cls.contains(&(x, z)) {
                report(
                    7,
                    format!(
                        "subClassOf misses the composition {} -> {} -> {}",
                        u.resource(x),
                        u.resource(y),
                        u.resource(z)
                    ),
                );
            }
        }
    }

    // Condition 8: subproperty edges type their ends and propagate
    // extensions (truths upward, falsities downward).
    for &(x, y) in &sub_prop {
        for (end, name) in [(x, "subject"), (y, "object")] {
            if !properties.contains(&end) {
                report(
                    8,
                    format!("subPropertyOf {name} {} is not a property", u.resource(end)),
                );
            }
        }
        for pr in pairs_of(&pt, x).difference(&pairs_of(&pt, y)) {
            report(
                8,
                format!(
                    "pair ({}, {}) holds for {} but not for its superproperty {}",
                    u.resource(pr.0),
                    u.resource(pr.1),
                    u.resource(x),
                    u.resource(y)
                ),
            );
        }
        for pr in pairs_of(&pf, y).difference(&pairs_of(&pf, x)) {
            report(
                8,
                format!(
                    "pair ({}, {}) fails for {} but not for its subproperty {}",
                    u.resource(pr.0),
                    u.resource(pr.1),
                    u.resource(y),
                    u.resource(x)
                ),
            );
        }
    }

    // Condition 9: subPropertyOf is reflexive on properties and transitive.
    for &x in &properties {
        if !sub_prop.contains(&(x, x)) {
            report(9, format!("subPropertyOf is not reflexive at {}", u.resource(x)));
        }
    }
    for &(x, y) in &sub_prop {
        for &(y2, z) in &sub_prop {
            if y == y2 && !sub_prop.contains(&(x, z)) {
                report(
                    9,
                    format!(
                        "subPropertyOf misses the composition {} -> {} -> {}",
                        u.resource(x),
                        u.resource(y),
                        u.resource(z)
                    ),
                );
            }
        }
    }

    // Condition 10: datatypes are subclasses of rdfs:Literal.
    for &x in &ct_of(&pt, ids.rdfs_datatype) {
        if !sub_cls.contains(&(x, ids.rdfs_literal)) {
            report(10, format!("datatype {} is not under rdfs:Literal", u.resource(x)));
        }
    }

    // Condition 11: container membership properties specialize rdfs:member.
    if let (Some(cmp), Some(member)) = (ids.cmp, ids.member) {
        for &x in &ct_of(&pt, cmp) {
            if !sub_prop.contains(&(x, member)) {
                report(
                    11,
                    format!("membership property {} is not under rdfs:member", u.resource(x)),
                );
            }
        }
    }

    // Conditions 12 and 13: totalness.
    for &p in &ct_of(&pt, ids.total_property) {
        for a in u.all_ids() {
            for b in u.all_ids() {
                if !pt.contains(&(p, a, b)) && !pf.contains(&(p, a, b)) {
                    report(
                        12,
                        format!(
                            "total property {} is undecided at ({}, {})",
                            u.resource(p),
                            u.resource(a),
                            u.resource(b)
                        ),
                    );
                }
            }
        }
    }
    for &c in &ct_of(&pt, ids.total_class) {
        for a in u.all_ids() {
            if !pt.contains(&(ids.rdf_type, a, c)) && !pf.contains(&(ids.rdf_type, a, c)) {
                report(
                    13,
                    format!(
                        "total class {} is undecided at {}",
                        u.resource(c),
                        u.resource(a)
                    ),
                );
            }
        }
    }

    // Conditions 14 and 15: XML literals.
    for &x in &u.xml_value_ids {
        for (cls, what) in [(ids.xml_literal, "rdf:XMLLiteral"), (ids.rdfs_literal, "a literal value")] {
            if !pt.contains(&(ids.rdf_type, x, cls)) {
                report(14, format!("XML value {} is not {what}", u.resource(x)));
            }
        }
    }
    for &l in &u.ill_typed_xml_ids {
        if !pf.contains(&(ids.rdf_type, l, ids.rdfs_literal)) {
            report(
                15,
                format!(
                    "ill-typed XML literal {} is not excluded from rdfs:Literal",
                    u.resource(l)
                ),
            );
        }
    }

    // Conditions 16 and 17: the axiomatic triples.
    for t in vocab::axiomatic_graph(cfg) {
        let denoted = (
            u.denote(&Term::Uri(t.predicate.clone())),
            u.denote(&t.subject),
            u.denote(&t.object),
        );
        let which = if t.subject == Term::uri(vocab::ERDF_TOTAL_CLASS)
            || t.subject == Term::uri(vocab::ERDF_TOTAL_PROPERTY)
        {
            17
        } else {
            16
        };
        match denoted {
            (Some(p), Some(s), Some(o)) if pt.contains(&(p, s, o)) => {}
            _ => report(which, format!("axiom {t} does not hold")),
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{formula_of_graph, skolemize};
    use crate::syntax::parse_ontology;
    use crate::vocab::Profile;
    use proptest::prelude::*;

    fn uri(u: &str) -> Term {
        Term::uri(format!("urn:t:{u}"))
    }

    fn pos(p: &str, s: &str, o: &str) -> SignedTriple {
        SignedTriple::positive(format!("urn:t:{p}"), uri(s), uri(o))
    }

    fn neg(p: &str, s: &str, o: &str) -> SignedTriple {
        SignedTriple::negative(format!("urn:t:{p}"), uri(s), uri(o))
    }

    fn builtin(u: &str) -> Term {
        Term::uri(u)
    }

    /// An ontology whose only role is to pin a vocabulary.
    fn pool_ontology(triples: &[SignedTriple]) -> Ontology {
        Ontology {
            graph: triples.iter().cloned().collect(),
            program: BTreeSet::new(),
        }
    }

    fn compact() -> VocabularyConfig {
        VocabularyConfig::new(Profile::Compact, 0)
    }

    fn full() -> VocabularyConfig {
        VocabularyConfig::new(Profile::Full, 1)
    }

    #[test]
    fn axiomatic_closure_is_coherent_and_condition_complete() {
        let o = Ontology::default();
        for cfg in [full(), compact()] {
            let i = close(&Graph::new(), &o, &cfg).unwrap();
            assert!(i.is_coherent());
            let report = check_conditions(&i, &cfg);
            assert!(report.is_empty(), "violations: {report:?}");
        }
        let i = close(&Graph::new(), &o, &full()).unwrap();
        assert!(i.holds(&SignedTriple::positive(
            vocab::RDF_TYPE,
            builtin(vocab::RDF_NIL),
            builtin(vocab::RDF_LIST),
        )));
        assert!(i.holds(&SignedTriple::positive(
            vocab::RDFS_SUB_CLASS_OF,
            builtin(vocab::ERDF_TOTAL_CLASS),
            builtin(vocab::RDFS_CLASS),
        )));
    }

    #[test]
    fn closure_types_mentioned_resources() {
        let g: Graph = [pos("likes", "Gerd", "Riesling")].into_iter().collect();
        let o = pool_ontology(&[pos("likes", "Gerd", "Riesling")]);
        let i = close(&g, &o, &compact()).unwrap();
        assert!(i.holds(&SignedTriple::positive(
            vocab::RDF_TYPE,
            uri("likes"),
            builtin(vocab::RDF_PROPERTY),
        )));
        assert!(i.holds(&SignedTriple::positive(
            vocab::RDF_TYPE,
            uri("Gerd"),
            builtin(vocab::RDFS_RESOURCE),
        )));
        assert!(check_conditions(&i, &compact()).is_empty());
    }

    #[test]
    fn closure_detects_incoherence_through_subproperty() {
        let g: Graph = [
            SignedTriple::positive(vocab::RDFS_SUB_PROPERTY_OF, uri("p"), uri("q")),
            pos("p", "s", "o"),
            neg("q", "s", "o"),
        ]
        .into_iter()
        .collect();
        let o = pool_ontology(&[pos("p", "s", "o"), pos("q", "s", "o")]);
        let err = close(&g, &o, &compact()).unwrap_err();
        let InterpError::Incoherent {
            predicate,
            subject,
            object,
        } = err
        else {
            panic!("expected incoherence, got {err}");
        };
        // Both p(s, o) and q(s, o) clash; the witness is the least one.
        assert_eq!(predicate, Resource::Uri("urn:t:p".into()));
        assert_eq!(subject, Resource::Uri("urn:t:s".into()));
        assert_eq!(object, Resource::Uri("urn:t:o".into()));
    }

    #[test]
    fn domain_range_and_subclass_rules_fire() {
        let g: Graph = [
            SignedTriple::positive(vocab::RDFS_DOMAIN, uri("p"), uri("C")),
            SignedTriple::positive(vocab::RDFS_RANGE, uri("p"), uri("D")),
            SignedTriple::positive(vocab::RDFS_SUB_CLASS_OF, uri("C"), uri("E")),
            pos("p", "a", "b"),
        ]
        .into_iter()
        .collect();
        let o = pool_ontology(&[pos("p", "a", "b"), pos("mark", "C", "D"), pos("mark", "E", "E")]);
        let i = close(&g, &o, &compact()).unwrap();
        for (x, c) in [("a", "C"), ("b", "D"), ("a", "E")] {
            assert!(
                i.holds(&SignedTriple::positive(vocab::RDF_TYPE, uri(x), uri(c))),
                "{x} should be typed {c}"
            );
        }
        // Reflexivity and transitivity land as well.
        assert!(i.holds(&SignedTriple::positive(
            vocab::RDFS_SUB_CLASS_OF,
            uri("C"),
            uri("C")
        )));
        assert!(check_conditions(&i, &compact()).is_empty());
    }

    #[test]
    fn falsity_flows_down_subclass_and_subproperty_edges() {
        let g: Graph = [
            SignedTriple::positive(vocab::RDFS_SUB_CLASS_OF, uri("C"), uri("D")),
            SignedTriple::negative(vocab::RDF_TYPE, uri("a"), uri("D")),
            SignedTriple::positive(vocab::RDFS_SUB_PROPERTY_OF, uri("p"), uri("q")),
            neg("q", "s", "o"),
        ]
        .into_iter()
        .collect();
        let o = pool_ontology(&[
            pos("p", "s", "o"),
            pos("q", "s", "o"),
            pos("mark", "C", "D"),
            pos("mark", "a", "a"),
        ]);
        let i = close(&g, &o, &compact()).unwrap();
        assert!(i.holds(&SignedTriple::negative(vocab::RDF_TYPE, uri("a"), uri("C"))));
        assert!(i.holds(&neg("p", "s", "o")));
        assert!(check_conditions(&i, &compact()).is_empty());
    }

    #[test]
    fn totals_are_recorded_but_not_enforced_by_closure() {
        let g: Graph = [SignedTriple::positive(
            vocab::RDF_TYPE,
            uri("p"),
            builtin(vocab::ERDF_TOTAL_PROPERTY),
        )]
        .into_iter()
        .collect();
        let o = pool_ontology(&[pos("p", "a", "a")]);
        let i = close(&g, &o, &compact()).unwrap();
        assert!(i.is_coherent());
        let report = check_conditions(&i, &compact());
        assert!(!report.is_empty());
        assert!(report.iter().all(|v| v.condition == 12), "{report:?}");
    }

    fn wine_interpretation() -> HerbrandInterpretation {
        let g: Graph = [
            pos("likes", "Gerd", "Riesling"),
            neg("likes", "Carlos", "Riesling"),
        ]
        .into_iter()
        .collect();
        let o = pool_ontology(&[
            pos("likes", "Gerd", "Riesling"),
            pos("likes", "Carlos", "Carlos"),
        ]);
        close(&g, &o, &compact()).unwrap()
    }

    #[test]
    fn satisfaction_of_atoms_and_strong_negation() {
        let i = wine_interpretation();
        let mut v = Valuation::new();
        v.insert("x".into(), Resource::Uri("urn:t:Carlos".into()));
        v.insert("y".into(), Resource::Uri("urn:t:Riesling".into()));
        let f = Formula::strong_neg(Formula::atom(SignedTriple::positive(
            "urn:t:likes",
            Term::var("x"),
            Term::var("y"),
        )));
        assert!(i.satisfies(&v, &f));
        assert!(!i.satisfies(&v, &Formula::atom(SignedTriple::positive(
            "urn:t:likes",
            Term::var("x"),
            Term::var("y"),
        ))));
        let closed = Formula::exists(
            "x",
            Formula::strong_neg(Formula::atom(SignedTriple::positive(
                "urn:t:likes",
                uri("Carlos"),
                Term::var("x"),
            ))),
        );
        assert!(i.satisfies_closed(&closed));
        assert!(i.satisfies(&v, &Formula::True));
        assert!(!i.satisfies(&v, &Formula::False));
    }

    #[test]
    fn weak_negation_is_vocabulary_guarded() {
        let i = wine_interpretation();
        let known_false = Formula::weak_neg(Formula::atom(pos("likes", "Carlos", "Riesling")));
        assert!(i.satisfies_closed(&known_false));
        // Same shape, but mentioning a URI outside the vocabulary.
        let foreign = Formula::weak_neg(Formula::atom(SignedTriple::positive(
            "urn:t:likes",
            uri("Carlos"),
            Term::uri("urn:elsewhere:Zinfandel"),
        )));
        assert!(!i.satisfies_closed(&foreign));
        // An implication with a foreign antecedent reduces to its consequent.
        let f = Formula::implies(
            Formula::atom(SignedTriple::positive(
                "urn:t:likes",
                uri("Carlos"),
                Term::uri("urn:elsewhere:Zinfandel"),
            )),
            Formula::atom(pos("likes", "Gerd", "Riesling")),
        );
        assert!(i.satisfies_closed(&f));
        let f_false_consequent = Formula::implies(
            Formula::atom(SignedTriple::positive(
                "urn:t:likes",
                uri("Carlos"),
                Term::uri("urn:elsewhere:Zinfandel"),
            )),
            Formula::atom(pos("likes", "Carlos", "Carlos")),
        );
        assert!(!i.satisfies_closed(&f_false_consequent));
    }

    #[test]
    fn compound_strong_negation_uses_the_rewrites() {
        let i = wine_interpretation();
        // -(~likes(Gerd, Riesling)) rewrites to likes(Gerd, Riesling).
        let f = Formula::strong_neg(Formula::weak_neg(Formula::atom(pos(
            "likes", "Gerd", "Riesling",
        ))));
        assert!(i.satisfies_closed(&f));
        // -(likes(Gerd,Riesling) & likes(Carlos,Riesling)) = -a | -b.
        let f = Formula::strong_neg(Formula::and(
            Formula::atom(pos("likes", "Gerd", "Riesling")),
            Formula::atom(pos("likes", "Carlos", "Riesling")),
        ));
        assert!(i.satisfies_closed(&f));
    }

    #[test]
    fn graph_satisfaction_uses_one_shared_valuation() {
        let i = wine_interpretation();
        assert!(i.satisfies_graph(&Graph::new()));
        // Some ?x with likes(Gerd, ?x) and -likes(Carlos, ?x): Riesling.
        let g: Graph = [
            SignedTriple::positive("urn:t:likes", uri("Gerd"), Term::var("x")),
            SignedTriple::negative("urn:t:likes", uri("Carlos"), Term::var("x")),
        ]
        .into_iter()
        .collect();
        assert!(i.satisfies_graph(&g));
        // No diagonal pair exists.
        let g: Graph = [SignedTriple::positive(
            "urn:t:likes",
            Term::var("x"),
            Term::var("x"),
        )]
        .into_iter()
        .collect();
        assert!(!i.satisfies_graph(&g));
    }

    #[test]
    fn rule_satisfaction_quantifies_over_all_valuations() {
        let i = wine_interpretation();
        // Fact: satisfied iff the triple is true.
        let fact = Rule {
            condition: Formula::True,
            conclusion: Conclusion::Triple(pos("likes", "Gerd", "Riesling")),
        };
        assert!(i.satisfies_rule(&fact));
        let fact2 = Rule {
            condition: Formula::True,
            conclusion: Conclusion::Triple(pos("likes", "Carlos", "Riesling")),
        };
        assert!(!i.satisfies_rule(&fact2));
        // Constraint: satisfied iff no valuation satisfies the condition.
        let constraint = Rule {
            condition: Formula::atom(SignedTriple::positive(
                "urn:t:likes",
                Term::var("x"),
                Term::var("y"),
            )),
            conclusion: Conclusion::False,
        };
        assert!(!i.satisfies_rule(&constraint));
        let constraint2 = Rule {
            condition: Formula::atom(SignedTriple::positive(
                "urn:t:likes",
                Term::var("x"),
                Term::var("x"),
            )),
            conclusion: Conclusion::False,
        };
        assert!(i.satisfies_rule(&constraint2));
    }

    #[test]
    fn closed_world_rule_requires_falsity_everywhere_undecided() {
        // p holds only at (s, o); the rule -p(?x,?y) <- ~p(?x,?y) is
        // satisfied only if every other pair over the universe is false.
        let o = pool_ontology(&[pos("p", "s", "o")]);
        let universe = Universe::of_ontology(&o, &compact()).unwrap();
        let rule = Rule {
            condition: Formula::weak_neg(Formula::atom(SignedTriple::positive(
                "urn:t:p",
                Term::var("x"),
                Term::var("y"),
            ))),
            conclusion: Conclusion::Triple(SignedTriple::negative(
                "urn:t:p",
                Term::var("x"),
                Term::var("y"),
            )),
        };
        let base: Graph = [pos("p", "s", "o")].into_iter().collect();
        let partial = close_in_universe(universe.clone(), &base).unwrap();
        assert!(!partial.satisfies_rule(&rule));
        // Completing the falsity extension satisfies it.
        let mut g = base.clone();
        let terms: Vec<Term> = universe
            .vocabulary()
            .iter()
            .filter(|t| !t.is_variable())
            .cloned()
            .collect();
        for a in &terms {
            for b in &terms {
                let t = SignedTriple::positive("urn:t:p", a.clone(), b.clone());
                if !(a == &uri("s") && b == &uri("o")) {
                    g.insert(t.negated());
                }
            }
        }
        let total = close_in_universe(universe, &g).unwrap();
        assert!(total.satisfies_rule(&rule));
    }

    #[test]
    fn leq_is_reflexive_monotone_and_universe_checked() {
        let i = wine_interpretation();
        assert!(i.leq(&i).unwrap());
        let o = pool_ontology(&[
            pos("likes", "Gerd", "Riesling"),
            pos("likes", "Carlos", "Carlos"),
        ]);
        let smaller = close(
            &[pos("likes", "Gerd", "Riesling")].into_iter().collect(),
            &o,
            &compact(),
        )
        .unwrap();
        assert!(smaller.leq(&i).unwrap());
        assert!(!i.leq(&smaller).unwrap());

        let other = pool_ontology(&[pos("entirely", "different", "vocabulary")]);
        let j = close(&Graph::new(), &other, &compact()).unwrap();
        assert!(matches!(i.leq(&j), Err(InterpError::UniverseMismatch)));
    }

    #[test]
    fn opposite_totality_choices_are_incomparable() {
        let o = pool_ontology(&[pos("p", "a", "a")]);
        let pt = close(&[pos("p", "a", "a")].into_iter().collect(), &o, &compact()).unwrap();
        let pf = close(&[neg("p", "a", "a")].into_iter().collect(), &o, &compact()).unwrap();
        assert!(!pt.leq(&pf).unwrap());
        assert!(!pf.leq(&pt).unwrap());
    }

    #[test]
    fn condition_checker_reports_missing_propagation_and_xml_exclusion() {
        let o = pool_ontology(&[pos("mark", "a", "b"), pos("mark", "x", "x")]);
        let universe = Universe::of_ontology(&o, &compact()).unwrap();
        let g: Graph = [
            SignedTriple::positive(vocab::RDFS_SUB_CLASS_OF, uri("a"), uri("b")),
            SignedTriple::positive(vocab::RDF_TYPE, uri("x"), uri("a")),
        ]
        .into_iter()
        .collect();
        let i = HerbrandInterpretation::from_graph(universe, &g).unwrap();
        let report = check_conditions(&i, &compact());
        let cond6: Vec<&Violation> = report.iter().filter(|v| v.condition == 6).collect();
        assert!(
            cond6.iter().any(|v| v.witness.contains("urn:t:x")),
            "expected a condition-6 witness mentioning x, got {report:?}"
        );

        // An ill-typed XML literal not excluded from the literal values.
        let bad_xml = Term::typed("<a", vocab::RDF_XML_LITERAL);
        let o = Ontology {
            graph: [SignedTriple::positive("urn:t:p", bad_xml, uri("y"))]
                .into_iter()
                .collect(),
            program: BTreeSet::new(),
        };
        let universe = Universe::of_ontology(&o, &compact()).unwrap();
        let i = HerbrandInterpretation::empty(universe);
        let report = check_conditions(&i, &compact());
        assert!(report.iter().any(|v| v.condition == 15), "{report:?}");
        // The closure seeds exactly that exclusion.
        let closed = close(&Graph::new(), &o, &compact()).unwrap();
        let report = check_conditions(&closed, &compact());
        assert!(report.iter().all(|v| v.condition != 15), "{report:?}");
    }

    #[test]
    fn decided_total_property_behaves_two_valued() {
        let o = pool_ontology(&[
            pos("p", "a", "b"),
            SignedTriple::positive(vocab::RDF_TYPE, uri("p"), builtin(vocab::ERDF_TOTAL_PROPERTY)),
        ]);
        let universe = Universe::of_ontology(&o, &compact()).unwrap();
        let mut base: Graph = [
            pos("p", "a", "b"),
            SignedTriple::positive(vocab::RDF_TYPE, uri("p"), builtin(vocab::ERDF_TOTAL_PROPERTY)),
        ]
        .into_iter()
        .collect();
        // Decide every other pair negatively.
        let terms: Vec<Term> = universe.vocabulary().iter().cloned().collect();
        for a in &terms {
            for b in &terms {
                if !(a == &uri("a") && b == &uri("b")) {
                    base.insert(SignedTriple::negative("urn:t:p", a.clone(), b.clone()));
                }
            }
        }
        let i = close_in_universe(universe, &base).unwrap();
        assert!(check_conditions(&i, &compact()).is_empty());
        // Weak and strong negation agree on a decided total property.
        let f = Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::or(
                    Formula::atom(SignedTriple::positive(
                        "urn:t:p",
                        Term::var("x"),
                        Term::var("y"),
                    )),
                    Formula::strong_neg(Formula::atom(SignedTriple::positive(
                        "urn:t:p",
                        Term::var("x"),
                        Term::var("y"),
                    ))),
                ),
            ),
        );
        assert!(i.satisfies_closed(&f));
        let weak_strong_agree = Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::implies(
                    Formula::weak_neg(Formula::atom(SignedTriple::positive(
                        "urn:t:p",
                        Term::var("x"),
                        Term::var("y"),
                    ))),
                    Formula::strong_neg(Formula::atom(SignedTriple::positive(
                        "urn:t:p",
                        Term::var("x"),
                        Term::var("y"),
                    ))),
                ),
            ),
        );
        assert!(i.satisfies_closed(&weak_strong_agree));
    }

    #[test]
    fn dumps_are_deterministic_and_ordered() {
        let i1 = wine_interpretation();
        let i2 = wine_interpretation();
        assert_eq!(i1.dump(), i2.dump());
        let dump = i1.dump();
        let pt_part: Vec<&str> = dump
            .lines()
            .take_while(|l| l.starts_with("PT "))
            .collect();
        let pf_part: Vec<&str> = dump
            .lines()
            .skip_while(|l| l.starts_with("PT "))
            .collect();
        assert!(!pt_part.is_empty());
        assert!(pf_part.iter().all(|l| l.starts_with("PF ")));
        let mut sorted = pt_part.clone();
        sorted.sort_unstable();
        assert_eq!(pt_part, sorted);
    }

    #[test]
    fn valuation_entries_for_other_variables_do_not_matter() {
        let i = wine_interpretation();
        let f = Formula::atom(SignedTriple::positive(
            "urn:t:likes",
            uri("Gerd"),
            Term::var("y"),
        ));
        let mut v = Valuation::new();
        v.insert("y".into(), Resource::Uri("urn:t:Riesling".into()));
        assert!(i.satisfies(&v, &f));
        v.insert("unrelated".into(), Resource::Uri("urn:t:Carlos".into()));
        assert!(i.satisfies(&v, &f));
    }

    // -- randomized agreement with a naive rule applier ---------------------

    /// Independent, deliberately naive implementation of the closure: apply
    /// each semantic condition by rescanning the whole triple sets until
    /// nothing changes.
    fn naive_close(
        universe: &Arc<Universe>,
        base: &Graph,
    ) -> (BTreeSet<IdTriple>, BTreeSet<IdTriple>) {
        let ids = universe.ids;
        let mut pt: BTreeSet<IdTriple> = BTreeSet::new();
        let mut pf: BTreeSet<IdTriple> = BTreeSet::new();
        for u in universe.all_ids() {
            pt.insert((ids.rdf_type, u, ids.rdfs_resource));
        }
        for &l in &universe.plain_literal_ids {
            pt.insert((ids.rdf_type, l, ids.rdfs_literal));
        }
        for &x in &universe.xml_value_ids {
            pt.insert((ids.rdf_type, x, ids.xml_literal));
            pt.insert((ids.rdf_type, x, ids.rdfs_literal));
        }
        for &l in &universe.ill_typed_xml_ids {
            pf.insert((ids.rdf_type, l, ids.rdfs_literal));
        }
        for t in vocab::axiomatic_graph(universe.cfg()) {
            pt.insert((
                universe.denote(&Term::Uri(t.predicate.clone())).unwrap(),
                universe.denote(&t.subject).unwrap(),
                universe.denote(&t.object).unwrap(),
            ));
        }
        for t in base {
            let triple = (
                universe.denote(&Term::Uri(t.predicate.clone())).unwrap(),
                universe.denote(&t.subject).unwrap(),
                universe.denote(&t.object).unwrap(),
            );
            if t.positive {
                pt.insert(triple);
            } else {
                pf.insert(triple);
            }
        }
        loop {
            let mut next_pt = pt.clone();
            let mut next_pf = pf.clone();
            for &(p, s, o) in pt.iter().chain(pf.iter()) {
                let _ = (s, o);
                next_pt.insert((ids.rdf_type, p, ids.rdf_property));
            }
            for &(p, s, o) in &pt {
                if p == ids.domain {
                    for &(q, a, _) in &pt {
                        if q == s {
                            next_pt.insert((ids.rdf_type, a, o));
                        }
                    }
                }
                if p == ids.range {
                    for &(q, _, b) in &pt {
                        if q == s {
                            next_pt.insert((ids.rdf_type, b, o));
                        }
                    }
                }
                if p == ids.sub_class_of {
                    next_pt.insert((ids.rdf_type, s, ids.rdfs_class));
                    next_pt.insert((ids.rdf_type, o, ids.rdfs_class));
                    for &(q, a, b) in &pt {
                        if q == ids.rdf_type && b == s {
                            next_pt.insert((ids.rdf_type, a, o));
                        }
                        if q == ids.sub_class_of && a == o {
                            next_pt.insert((ids.sub_class_of, s, b));
                        }
                    }
                    for &(q, a, b) in &pf {
                        if q == ids.rdf_type && b == o {
                            next_pf.insert((ids.rdf_type, a, s));
                        }
                    }
                }
                if p == ids.sub_property_of {
                    next_pt.insert((ids.rdf_type, s, ids.rdf_property));
                    next_pt.insert((ids.rdf_type, o, ids.rdf_property));
                    for &(q, a, b) in &pt {
                        if q == s {
                            next_pt.insert((o, a, b));
                        }
                        if q == ids.sub_property_of && a == o {
                            next_pt.insert((ids.sub_property_of, s, b));
                        }
                    }
                    for &(q, a, b) in &pf {
                        if q == o {
                            next_pf.insert((s, a, b));
                        }
                    }
                }
                if p == ids.rdf_type {
                    if o == ids.rdfs_class {
                        next_pt.insert((ids.sub_class_of, s, ids.rdfs_resource));
                        next_pt.insert((ids.sub_class_of, s, s));
                    }
                    if o == ids.rdf_property {
                        next_pt.insert((ids.sub_property_of, s, s));
                    }
                    if o == ids.rdfs_datatype {
                        next_pt.insert((ids.sub_class_of, s, ids.rdfs_literal));
                    }
                    if Some(o) == ids.cmp {
                        next_pt.insert((ids.sub_property_of, s, ids.member.unwrap()));
                    }
                }
            }
            if next_pt == pt && next_pf == pf {
                return (pt, pf);
            }
            pt = next_pt;
            pf = next_pf;
        }
    }

    fn arb_base() -> impl Strategy<Value = Graph> {
        let term = prop_oneof![
            Just("p"),
            Just("q"),
            Just("a"),
            Just("b"),
            Just("C"),
            Just("D"),
        ];
        let pred = prop_oneof![
            3 => prop_oneof![Just("p"), Just("q")]
                .prop_map(|p| format!("urn:t:{p}")),
            2 => prop_oneof![
                Just(vocab::RDF_TYPE),
                Just(vocab::RDFS_SUB_CLASS_OF),
                Just(vocab::RDFS_SUB_PROPERTY_OF),
                Just(vocab::RDFS_DOMAIN),
                Just(vocab::RDFS_RANGE),
            ]
            .prop_map(String::from),
        ];
        let obj = prop_oneof![
            4 => term.clone().prop_map(|t| Term::uri(format!("urn:t:{t}"))),
            1 => prop_oneof![
                Just(vocab::RDFS_CLASS),
                Just(vocab::RDF_PROPERTY),
                Just(vocab::RDFS_DATATYPE),
            ]
            .prop_map(Term::uri),
        ];
        proptest::collection::btree_set(
            (pred, term.prop_map(|t| Term::uri(format!("urn:t:{t}"))), obj, prop::bool::weighted(0.8))
                .prop_map(|(p, s, o, positive)| SignedTriple {
                    predicate: p,
                    subject: s,
                    object: o,
                    positive,
                }),
            0..14,
        )
    }

    fn shared_pool() -> Ontology {
        pool_ontology(&[pos("pool", "p", "q"), pos("pool", "a", "b"), pos("pool", "C", "D")])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn closure_matches_the_naive_rule_applier(base in arb_base()) {
            let o = shared_pool();
            let universe = Universe::of_ontology(&o, &compact()).unwrap();
            let mut engine = ClosureEngine::new(universe.clone());
            engine.assert_graph(&base).unwrap();
            engine.run();
            let (npt, npf) = naive_close(&universe, &base);
            let ept: BTreeSet<IdTriple> = engine.truths().iter().copied().collect();
            let epf: BTreeSet<IdTriple> = engine.falsities().iter().copied().collect();
            prop_assert_eq!(&ept, &npt);
            prop_assert_eq!(&epf, &npf);
            // Coherence verdicts agree, including the canonical witness.
            let nclash: BTreeSet<IdTriple> = npt.intersection(&npf).copied().collect();
            match engine.coherent() {
                Ok(_) => prop_assert!(nclash.is_empty()),
                Err(InterpError::Incoherent { predicate, subject, object }) => {
                    let &(p, s, o) = nclash.iter().next().expect("engine saw a clash");
                    prop_assert_eq!(predicate, universe.resource(p).clone());
                    prop_assert_eq!(subject, universe.resource(s).clone());
                    prop_assert_eq!(object, universe.resource(o).clone());
                }
                Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
            }
        }

        #[test]
        fn closure_is_idempotent_and_monotone(base in arb_base(), extra in arb_base()) {
            let o = shared_pool();
            let universe = Universe::of_ontology(&o, &compact()).unwrap();
            let closed = match close_in_universe(universe.clone(), &base) {
                Ok(i) => i,
                Err(_) => return Ok(()),
            };
            // Idempotence: re-closing the result changes nothing.
            let as_graph: Graph = closed
                .pt_resources()
                .iter()
                .map(|(p, s, o)| SignedTriple::positive(
                    match p { Resource::Uri(u) => u.clone(), _ => unreachable!() },
                    resource_term(s),
                    resource_term(o),
                ))
                .chain(closed.pf_resources().iter().map(|(p, s, o)| SignedTriple::negative(
                    match p { Resource::Uri(u) => u.clone(), _ => unreachable!() },
                    resource_term(s),
                    resource_term(o),
                )))
                .collect();
            let reclosed = close_in_universe(universe.clone(), &as_graph).unwrap();
            prop_assert_eq!(&closed, &reclosed);
            // Monotonicity.
            let mut bigger = base.clone();
            bigger.extend(extra.iter().cloned());
            if let Ok(closed_bigger) = close_in_universe(universe, &bigger) {
                prop_assert!(closed.leq(&closed_bigger).unwrap());
            }
        }

        #[test]
        fn derived_triples_are_supported_by_the_rest(base in arb_base()) {
            let o = shared_pool();
            let universe = Universe::of_ontology(&o, &compact()).unwrap();
            let Ok(closed) = close_in_universe(universe.clone(), &base) else {
                return Ok(());
            };
            let (npt, _) = naive_close(&universe, &base);
            // Remove one derived truth; re-closing the rest must rediscover
            // it, i.e. everything beyond the inputs is forced.
            let baseline = ClosureEngine::new(universe.clone());
            let inputs: HashSet<IdTriple> = base
                .iter()
                .filter(|t| t.positive)
                .map(|t| {
                    (
                        universe.denote(&Term::Uri(t.predicate.clone())).unwrap(),
                        universe.denote(&t.subject).unwrap(),
                        universe.denote(&t.object).unwrap(),
                    )
                })
                .collect();
            for &t in npt.iter().take(40) {
                if baseline.truths().contains(&t) || inputs.contains(&t) {
                    continue; // axiomatic, universal, or asserted: not derived
                }
                let mut cut: Graph = Graph::new();
                for (p, s, o) in closed.pt_resources() {
                    let triple = (
                        universe.id(&p).unwrap(),
                        universe.id(&s).unwrap(),
                        universe.id(&o).unwrap(),
                    );
                    if triple != t {
                        cut.insert(SignedTriple::positive(
                            match p { Resource::Uri(u) => u, _ => unreachable!() },
                            resource_term(&s),
                            resource_term(&o),
                        ));
                    }
                }
                for (p, s, o) in closed.pf_resources() {
                    cut.insert(SignedTriple::negative(
                        match p { Resource::Uri(u) => u, _ => unreachable!() },
                        resource_term(&s),
                        resource_term(&o),
                    ));
                }
                let reclosed = close_in_universe(universe.clone(), &cut).unwrap();
                prop_assert!(
                    reclosed.contains_pt(t),
                    "removed triple was not rederived"
                );
            }
        }

        #[test]
        fn graph_satisfaction_matches_its_formula(base in arb_base(), probe in arb_base()) {
            let o = shared_pool();
            let universe = Universe::of_ontology(&o, &compact()).unwrap();
            let Ok(i) = close_in_universe(universe, &base) else {
                return Ok(());
            };
            // Turn a few probe triples into a small variable graph.
            let mut g: Graph = Graph::new();
            for (n, t) in probe.iter().take(3).enumerate() {
                let mut t = t.clone();
                if n % 2 == 0 {
                    t.subject = Term::var("x");
                }
                g.insert(t);
            }
            prop_assert_eq!(
                i.satisfies_graph(&g),
                i.satisfies_closed(&formula_of_graph(&g))
            );
        }
    }

    fn resource_term(r: &Resource) -> Term {
        match r {
            Resource::Uri(u) => Term::uri(u.clone()),
            Resource::PlainLiteral { value, lang } => Term::PlainLiteral {
                value: value.clone(),
                lang: lang.clone(),
            },
            Resource::TypedLiteral { value, datatype } => Term::TypedLiteral {
                value: value.clone(),
                datatype: datatype.clone(),
            },
            Resource::XmlValue(_) => panic!("XML values are not terms"),
        }
    }

    #[test]
    fn skolemized_graph_closure_matches_parsed_ontology() {
        let text = "@prefix : <urn:t:> .\n\
                    graph { likes(?someone, Riesling). -likes(Carlos, Riesling). }";
        let o = parse_ontology(text).unwrap();
        let sk = skolemize(&o.graph, None).unwrap();
        let i = close(&sk, &o, &compact()).unwrap();
        // The skolem URI stands in for the blank.
        let skolem = sk
            .iter()
            .find(|t| t.positive)
            .map(|t| t.subject.clone())
            .unwrap();
        assert!(i.holds(&SignedTriple::positive(
            "urn:t:likes",
            skolem,
            Term::uri("urn:t:Riesling")
        )));
        assert!(i.satisfies_graph(&o.graph));
    }
}
