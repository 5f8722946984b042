//! Built-in vocabulary, axiomatic triples and XML literal handling.
//!
//! The reasoner works over a finite built-in vocabulary: the RDF and RDFS
//! names plus the two control classes `erdf:TotalClass` and
//! `erdf:TotalProperty` that switch individual classes and properties from
//! open-world to closed-world behaviour.  Because the container membership
//! properties `rdf:_1, rdf:_2, ...` form an infinite family, a
//! [`VocabularyConfig`] fixes a finite index bound; the `Compact` profile
//! additionally drops the container, statement and list vocabulary, which
//! keeps universes small for exhaustive testing.

use std::collections::BTreeSet;

use crate::model::{Graph, SignedTriple, Term};

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
/// Namespace for the open/closed-world control vocabulary.
pub const ERDF_NS: &str = "urn:erdf:";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_PROPERTY: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";
pub const RDF_XML_LITERAL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#XMLLiteral";
pub const RDF_NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
pub const RDF_LIST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#List";
pub const RDF_STATEMENT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Statement";
pub const RDF_SUBJECT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#subject";
pub const RDF_PREDICATE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#predicate";
pub const RDF_OBJECT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#object";
pub const RDF_FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
pub const RDF_REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
pub const RDF_SEQ: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Seq";
pub const RDF_BAG: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Bag";
pub const RDF_ALT: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Alt";
pub const RDF_VALUE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#value";

pub const RDFS_DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
pub const RDFS_RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";
pub const RDFS_RESOURCE: &str = "http://www.w3.org/2000/01/rdf-schema#Resource";
pub const RDFS_LITERAL: &str = "http://www.w3.org/2000/01/rdf-schema#Literal";
pub const RDFS_DATATYPE: &str = "http://www.w3.org/2000/01/rdf-schema#Datatype";
pub const RDFS_CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
pub const RDFS_SUB_CLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_SUB_PROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
pub const RDFS_MEMBER: &str = "http://www.w3.org/2000/01/rdf-schema#member";
pub const RDFS_CONTAINER: &str = "http://www.w3.org/2000/01/rdf-schema#Container";
pub const RDFS_CMP: &str =
    "http://www.w3.org/2000/01/rdf-schema#ContainerMembershipProperty";
pub const RDFS_COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
pub const RDFS_SEE_ALSO: &str = "http://www.w3.org/2000/01/rdf-schema#seeAlso";
pub const RDFS_IS_DEFINED_BY: &str = "http://www.w3.org/2000/01/rdf-schema#isDefinedBy";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

pub const ERDF_TOTAL_CLASS: &str = "urn:erdf:TotalClass";
pub const ERDF_TOTAL_PROPERTY: &str = "urn:erdf:TotalProperty";

/// The URI of the container membership property `rdf:_<i>`.
pub fn rdf_container_property(i: usize) -> String {
    format!("{RDF_NS}_{i}")
}

/// Which slice of the built-in vocabulary to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// The whole built-in vocabulary, with container membership properties
    /// `rdf:_1 ... rdf:_n` up to the configured bound.
    Full,
    /// Drops the container, statement and list vocabulary (and with it every
    /// `rdf:_i`).  Universes stay small; intended for exhaustive tests.
    Compact,
}

/// Finite truncation of the built-in vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabularyConfig {
    pub profile: Profile,
    /// How many container membership properties `rdf:_i` exist.  Forced to 0
    /// by the compact profile.
    pub container_index_bound: usize,
}

impl VocabularyConfig {
    pub fn new(profile: Profile, container_index_bound: usize) -> VocabularyConfig {
        let container_index_bound = match profile {
            Profile::Full => container_index_bound,
            Profile::Compact => 0,
        };
        VocabularyConfig {
            profile,
            container_index_bound,
        }
    }
}

impl Default for VocabularyConfig {
    fn default() -> Self {
        VocabularyConfig::new(Profile::Full, 1)
    }
}

const RDF_CORE: &[&str] = &[RDF_TYPE, RDF_PROPERTY, RDF_XML_LITERAL];
const RDF_CONTAINER_EXTRAS: &[&str] = &[
    RDF_NIL,
    RDF_LIST,
    RDF_STATEMENT,
    RDF_SUBJECT,
    RDF_PREDICATE,
    RDF_OBJECT,
    RDF_FIRST,
    RDF_REST,
    RDF_SEQ,
    RDF_BAG,
    RDF_ALT,
    RDF_VALUE,
];
const RDFS_CORE: &[&str] = &[
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDFS_RESOURCE,
    RDFS_LITERAL,
    RDFS_DATATYPE,
    RDFS_CLASS,
    RDFS_SUB_CLASS_OF,
    RDFS_SUB_PROPERTY_OF,
];
const RDFS_CONTAINER_EXTRAS: &[&str] = &[
    RDFS_MEMBER,
    RDFS_CONTAINER,
    RDFS_CMP,
    RDFS_COMMENT,
    RDFS_SEE_ALSO,
    RDFS_IS_DEFINED_BY,
    RDFS_LABEL,
];

/// The built-in vocabulary for a configuration, as a set of URIs.
pub fn builtin_vocabulary(cfg: &VocabularyConfig) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = BTreeSet::new();
    for u in RDF_CORE.iter().chain(RDFS_CORE) {
        out.insert((*u).to_string());
    }
    out.insert(ERDF_TOTAL_CLASS.to_string());
    out.insert(ERDF_TOTAL_PROPERTY.to_string());
    if cfg.profile == Profile::Full {
        for u in RDF_CONTAINER_EXTRAS.iter().chain(RDFS_CONTAINER_EXTRAS) {
            out.insert((*u).to_string());
        }
        for i in 1..=cfg.container_index_bound {
            out.insert(rdf_container_property(i));
        }
    }
    out
}

fn triple(p: &str, s: &str, o: &str) -> SignedTriple {
    SignedTriple::positive(p, Term::uri(s), Term::uri(o))
}

/// The axiomatic triples for a configuration: the RDF and RDFS axiomatic
/// triples (truncated to the configured container bound, filtered to the
/// profile's vocabulary) plus the two axioms for the control classes.  All
/// triples are positive and mention only built-in vocabulary.
pub fn axiomatic_graph(cfg: &VocabularyConfig) -> Graph {
    let mut g = Graph::new();

    // RDF axiomatic triples.
    let mut rdf_axioms: Vec<SignedTriple> = vec![triple(RDF_TYPE, RDF_TYPE, RDF_PROPERTY)];
    for p in [
        RDF_SUBJECT,
        RDF_PREDICATE,
        RDF_OBJECT,
        RDF_FIRST,
        RDF_REST,
        RDF_VALUE,
    ] {
        rdf_axioms.push(triple(RDF_TYPE, p, RDF_PROPERTY));
    }
    for i in 1..=cfg.container_index_bound {
        rdf_axioms.push(triple(RDF_TYPE, &rdf_container_property(i), RDF_PROPERTY));
    }
    rdf_axioms.push(triple(RDF_TYPE, RDF_NIL, RDF_LIST));

    // RDFS axiomatic triples.
    let mut rdfs_axioms: Vec<SignedTriple> = Vec::new();
    for (p, c) in [
        (RDF_TYPE, RDFS_RESOURCE),
        (RDFS_DOMAIN, RDF_PROPERTY),
        (RDFS_RANGE, RDF_PROPERTY),
        (RDFS_SUB_PROPERTY_OF, RDF_PROPERTY),
        (RDFS_SUB_CLASS_OF, RDFS_CLASS),
        (RDF_SUBJECT, RDF_STATEMENT),
        (RDF_PREDICATE, RDF_STATEMENT),
        (RDF_OBJECT, RDF_STATEMENT),
        (RDFS_MEMBER, RDFS_RESOURCE),
        (RDF_FIRST, RDF_LIST),
        (RDF_REST, RDF_LIST),
        (RDFS_SEE_ALSO, RDFS_RESOURCE),
        (RDFS_IS_DEFINED_BY, RDFS_RESOURCE),
        (RDFS_COMMENT, RDFS_RESOURCE),
        (RDFS_LABEL, RDFS_RESOURCE),
        (RDF_VALUE, RDFS_RESOURCE),
    ] {
        rdfs_axioms.push(triple(RDFS_DOMAIN, p, c));
    }
    for (p, c) in [
        (RDF_TYPE, RDFS_CLASS),
        (RDFS_DOMAIN, RDFS_CLASS),
        (RDFS_RANGE, RDFS_CLASS),
        (RDFS_SUB_PROPERTY_OF, RDF_PROPERTY),
        (RDFS_SUB_CLASS_OF, RDFS_CLASS),
        (RDF_SUBJECT, RDFS_RESOURCE),
        (RDF_PREDICATE, RDFS_RESOURCE),
        (RDF_OBJECT, RDFS_RESOURCE),
        (RDFS_MEMBER, RDFS_RESOURCE),
        (RDF_FIRST, RDFS_RESOURCE),
        (RDF_REST, RDF_LIST),
        (RDFS_SEE_ALSO, RDFS_RESOURCE),
        (RDFS_IS_DEFINED_BY, RDFS_RESOURCE),
        (RDFS_COMMENT, RDFS_LITERAL),
        (RDFS_LABEL, RDFS_LITERAL),
        (RDF_VALUE, RDFS_RESOURCE),
    ] {
        rdfs_axioms.push(triple(RDFS_RANGE, p, c));
    }
    for (a, b) in [
        (RDF_ALT, RDFS_CONTAINER),
        (RDF_BAG, RDFS_CONTAINER),
        (RDF_SEQ, RDFS_CONTAINER),
        (RDFS_CMP, RDF_PROPERTY),
    ] {
        rdfs_axioms.push(triple(RDFS_SUB_CLASS_OF, a, b));
    }
    rdfs_axioms.push(triple(RDFS_SUB_PROPERTY_OF, RDFS_IS_DEFINED_BY, RDFS_SEE_ALSO));
    rdfs_axioms.push(triple(RDF_TYPE, RDF_XML_LITERAL, RDFS_DATATYPE));
    rdfs_axioms.push(triple(RDFS_SUB_CLASS_OF, RDF_XML_LITERAL, RDFS_LITERAL));
    rdfs_axioms.push(triple(RDFS_SUB_CLASS_OF, RDFS_DATATYPE, RDFS_CLASS));
    for i in 1..=cfg.container_index_bound {
        let ci = rdf_container_property(i);
        rdfs_axioms.push(triple(RDF_TYPE, &ci, RDFS_CMP));
        rdfs_axioms.push(triple(RDFS_DOMAIN, &ci, RDFS_RESOURCE));
        rdfs_axioms.push(triple(RDFS_RANGE, &ci, RDFS_RESOURCE));
    }

    // Keep only triples whose vocabulary survives the profile.
    let allowed = builtin_vocabulary(cfg);
    let keep = |t: &SignedTriple| -> bool {
        let Term::Uri(s) = &t.subject else { return false };
        let Term::Uri(o) = &t.object else { return false };
        allowed.contains(&t.predicate) && allowed.contains(s) && allowed.contains(o)
    };
    for t in rdf_axioms.into_iter().chain(rdfs_axioms) {
        if keep(&t) {
            g.insert(t);
        }
    }

    // Axioms for the control classes.
    g.insert(triple(RDFS_SUB_CLASS_OF, ERDF_TOTAL_CLASS, RDFS_CLASS));
    g.insert(triple(RDFS_SUB_CLASS_OF, ERDF_TOTAL_PROPERTY, RDFS_CLASS));

    g
}

// ---------------------------------------------------------------------------
// XML literals
// ---------------------------------------------------------------------------

/// Classification of the lexical form of a literal typed `rdf:XMLLiteral`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XmlStatus {
    /// The lexical form is well-formed XML content; payload is its canonical
    /// form (whitespace inside tags normalized).  Two lexical forms with the
    /// same canonical form denote the same XML value.
    WellTyped(String),
    /// Not well-formed; the literal denotes itself and is certainly not a
    /// literal value.
    IllTyped,
}

/// Checks whether a string is well-formed XML content — a single element or
/// a plain text run — and canonicalizes it.  The canonicalizer normalizes
/// whitespace inside tags only: `<a  b = "c" >` becomes `<a b="c">`; text is
/// preserved verbatim, attribute order is kept.
pub fn classify_xml_literal(lexical: &str) -> XmlStatus {
    match XmlParser::new(lexical).parse_content_to_end() {
        Some(canonical) => XmlStatus::WellTyped(canonical),
        None => XmlStatus::IllTyped,
    }
}

struct XmlParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    out: String,
}

impl<'a> XmlParser<'a> {
    fn new(s: &'a str) -> XmlParser<'a> {
        XmlParser {
            bytes: s.as_bytes(),
            pos: 0,
            out: String::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn parse_content_to_end(mut self) -> Option<String> {
        // Either a single element (surrounding whitespace allowed) or one
        // text run with no markup at all.
        if self.bytes.iter().all(|&b| b != b'<' && b != b'>') {
            return Some(String::from_utf8(self.bytes.to_vec()).unwrap());
        }
        self.skip_ws();
        let lead = &self.bytes[..self.pos];
        self.out
            .push_str(std::str::from_utf8(lead).expect("whitespace is valid utf-8"));
        self.parse_element()?;
        let tail_start = self.pos;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return None;
        }
        let tail = &self.bytes[tail_start..];
        self.out.push_str(std::str::from_utf8(tail).unwrap());
        Some(self.out)
    }

    fn name_start(b: u8) -> bool {
        b.is_ascii_alphabetic() || b == b'_' || b == b':'
    }

    fn name_char(b: u8) -> bool {
        b.is_ascii_alphanumeric() || matches!(b, b'_' | b':' | b'.' | b'-')
    }

    fn parse_name(&mut self) -> Option<String> {
        let start = self.pos;
        if !Self::name_start(self.peek()?) {
            return None;
        }
        self.pos += 1;
        while let Some(b) = self.peek() {
            if Self::name_char(b) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(String::from_utf8(self.bytes[start..self.pos].to_vec()).ok()?)
    }

    fn expect(&mut self, b: u8) -> Option<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Some(())
        } else {
            None
        }
    }

    /// Parses one element at the cursor, emitting its canonical form.
    fn parse_element(&mut self) -> Option<()> {
        self.expect(b'<')?;
        let name = self.parse_name()?;
        self.out.push('<');
        self.out.push_str(&name);
        loop {
            let before_ws = self.pos;
            self.skip_ws();
            match self.peek()? {
                b'>' => {
                    self.pos += 1;
                    self.out.push('>');
                    break;
                }
                b'/' => {
                    self.pos += 1;
                    self.expect(b'>')?;
                    self.out.push_str("/>");
                    return Some(());
                }
                _ => {
                    if self.pos == before_ws {
                        // Attributes must be whitespace-separated.
                        return None;
                    }
                    let attr = self.parse_name()?;
                    self.skip_ws();
                    self.expect(b'=')?;
                    self.skip_ws();
                    let quote = self.peek()?;
                    if quote != b'"' && quote != b'\'' {
                        return None;
                    }
                    self.pos += 1;
                    let vstart = self.pos;
                    while let Some(b) = self.peek() {
                        if b == quote {
                            break;
                        }
                        if b == b'<' {
                            return None;
                        }
                        self.pos += 1;
                    }
                    let value =
                        String::from_utf8(self.bytes[vstart..self.pos].to_vec()).ok()?;
                    self.expect(quote)?;
                    self.out.push(' ');
                    self.out.push_str(&attr);
                    self.out.push_str("=\"");
                    self.out.push_str(&value.replace('"', "&quot;"));
                    self.out.push('"');
                }
            }
        }
        // Children: text runs and nested elements until the closing tag.
        loop {
            match self.peek() {
                None => return None,
                Some(b'<') => {
                    if self.bytes.get(self.pos + 1) == Some(&b'/') {
                        self.pos += 2;
                        let close = self.parse_name()?;
                        if close != name {
                            return None;
                        }
                        self.skip_ws();
                        self.expect(b'>')?;
                        self.out.push_str("</");
                        self.out.push_str(&name);
                        self.out.push('>');
                        return Some(());
                    }
                    self.parse_element()?;
                }
                Some(b'>') => return None,
                Some(_) => {
                    let start = self.pos;
                    while let Some(b) = self.peek() {
                        if b == b'<' || b == b'>' {
                            break;
                        }
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.bytes[start..self.pos]).ok()?;
                    self.out.push_str(text);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_vocabulary_has_the_expected_size_and_members() {
        let cfg = VocabularyConfig::new(Profile::Full, 1);
        let v = builtin_vocabulary(&cfg);
        // 15 RDF names + rdf:_1 + 15 RDFS names + 2 control names.
        assert_eq!(v.len(), 33);
        assert!(v.contains(RDF_TYPE));
        assert!(v.contains(RDF_SEQ));
        assert!(v.contains(RDFS_MEMBER));
        assert!(v.contains(ERDF_TOTAL_CLASS));
        assert!(v.contains(&rdf_container_property(1)));
        assert!(!v.contains(&rdf_container_property(2)));
    }

    #[test]
    fn container_bound_adds_one_term_and_four_axioms_each() {
        for n in 0..4usize {
            let cfg = VocabularyConfig::new(Profile::Full, n);
            let v = builtin_vocabulary(&cfg);
            assert_eq!(v.len(), 32 + n);
            let g = axiomatic_graph(&cfg);
            assert_eq!(g.len(), 50 + 4 * n, "bound {n}");
            for i in 1..=n {
                let ci = rdf_container_property(i);
                let mentioning = g
                    .iter()
                    .filter(|t| {
                        t.subject == Term::uri(&ci)
                            || t.object == Term::uri(&ci)
                            || t.predicate == ci
                    })
                    .count();
                assert_eq!(mentioning, 4, "rdf:_{i} must appear in exactly 4 axioms");
            }
        }
    }

    #[test]
    fn compact_vocabulary_is_the_thirteen_core_names() {
        // Recount: Table 1 minus the documented compact exclusions leaves
        // rdf:type, rdf:Property, rdf:XMLLiteral on the RDF side and
        // domain, range, Resource, Literal, Datatype, Class, subClassOf,
        // subPropertyOf on the RDFS side, plus the two control names.
        let cfg = VocabularyConfig::new(Profile::Compact, 5);
        let v = builtin_vocabulary(&cfg);
        let expected: BTreeSet<String> = [
            RDF_TYPE,
            RDF_PROPERTY,
            RDF_XML_LITERAL,
            RDFS_DOMAIN,
            RDFS_RANGE,
            RDFS_RESOURCE,
            RDFS_LITERAL,
            RDFS_DATATYPE,
            RDFS_CLASS,
            RDFS_SUB_CLASS_OF,
            RDFS_SUB_PROPERTY_OF,
            ERDF_TOTAL_CLASS,
            ERDF_TOTAL_PROPERTY,
        ]
        .into_iter()
        .map(String::from)
        .collect();
        assert_eq!(v, expected);
        // The compact profile ignores the container bound entirely.
        assert_eq!(cfg.container_index_bound, 0);
        assert!(!v.contains(RDFS_MEMBER));
        assert!(v.contains(RDFS_DOMAIN));
    }

    #[test]
    fn compact_axioms_are_exactly_the_core_sixteen() {
        let cfg = VocabularyConfig::new(Profile::Compact, 0);
        let g = axiomatic_graph(&cfg);
        assert_eq!(g.len(), 16);
        assert!(g.contains(&triple(RDF_TYPE, RDF_TYPE, RDF_PROPERTY)));
        assert!(g.contains(&triple(RDFS_DOMAIN, RDF_TYPE, RDFS_RESOURCE)));
        assert!(g.contains(&triple(RDFS_RANGE, RDF_TYPE, RDFS_CLASS)));
        assert!(g.contains(&triple(RDF_TYPE, RDF_XML_LITERAL, RDFS_DATATYPE)));
        assert!(g.contains(&triple(RDFS_SUB_CLASS_OF, RDF_XML_LITERAL, RDFS_LITERAL)));
        assert!(g.contains(&triple(RDFS_SUB_CLASS_OF, RDFS_DATATYPE, RDFS_CLASS)));
        // Dropped vocabulary leaves no trace.
        assert!(!g.iter().any(|t| t.object == Term::uri(RDF_STATEMENT)));
    }

    #[test]
    fn axiomatic_graph_is_positive_and_stays_inside_the_vocabulary() {
        for cfg in [
            VocabularyConfig::new(Profile::Full, 3),
            VocabularyConfig::new(Profile::Compact, 0),
        ] {
            let v = builtin_vocabulary(&cfg);
            for t in axiomatic_graph(&cfg) {
                assert!(t.positive);
                assert!(v.contains(&t.predicate));
                for term in [&t.subject, &t.object] {
                    let Term::Uri(u) = term else {
                        panic!("axiom with non-URI term: {t}")
                    };
                    assert!(v.contains(u), "{u} outside vocabulary");
                }
            }
        }
    }

    #[test]
    fn full_axioms_contain_the_expected_samples() {
        let cfg = VocabularyConfig::new(Profile::Full, 2);
        let g = axiomatic_graph(&cfg);
        assert!(g.contains(&triple(RDF_TYPE, RDF_NIL, RDF_LIST)));
        assert!(g.contains(&triple(RDFS_DOMAIN, RDF_SUBJECT, RDF_STATEMENT)));
        assert!(g.contains(&triple(RDFS_RANGE, RDFS_COMMENT, RDFS_LITERAL)));
        assert!(g.contains(&triple(RDFS_SUB_CLASS_OF, RDF_ALT, RDFS_CONTAINER)));
        assert!(g.contains(&triple(RDFS_SUB_CLASS_OF, RDFS_CMP, RDF_PROPERTY)));
        assert!(g.contains(&triple(
            RDFS_SUB_PROPERTY_OF,
            RDFS_IS_DEFINED_BY,
            RDFS_SEE_ALSO
        )));
        assert!(g.contains(&triple(RDFS_DOMAIN, &rdf_container_property(2), RDFS_RESOURCE)));
        assert!(g.contains(&triple(
            RDF_TYPE,
            &rdf_container_property(1),
            RDFS_CMP
        )));
        // Axioms for the control classes, exactly as stated.
        assert!(g.contains(&triple(RDFS_SUB_CLASS_OF, ERDF_TOTAL_CLASS, RDFS_CLASS)));
        assert!(g.contains(&triple(RDFS_SUB_CLASS_OF, ERDF_TOTAL_PROPERTY, RDFS_CLASS)));
    }

    #[test]
    fn vocabulary_partitions_do_not_overlap_and_grow_monotonically() {
        let small = builtin_vocabulary(&VocabularyConfig::new(Profile::Full, 1));
        let large = builtin_vocabulary(&VocabularyConfig::new(Profile::Full, 7));
        assert!(small.is_subset(&large));
        let compact = builtin_vocabulary(&VocabularyConfig::new(Profile::Compact, 0));
        assert!(compact.is_subset(&small));

        let rdf: Vec<&String> = large.iter().filter(|u| u.starts_with(RDF_NS)).collect();
        let rdfs: Vec<&String> = large.iter().filter(|u| u.starts_with(RDFS_NS)).collect();
        let ctrl: Vec<&String> = large.iter().filter(|u| u.starts_with(ERDF_NS)).collect();
        assert_eq!(rdf.len() + rdfs.len() + ctrl.len(), large.len());
    }

    #[test]
    fn xml_classification_examples() {
        assert_eq!(
            classify_xml_literal("<a>x</a>"),
            XmlStatus::WellTyped("<a>x</a>".into())
        );
        assert_eq!(classify_xml_literal("<a"), XmlStatus::IllTyped);
        assert_eq!(classify_xml_literal("<a>x</b>"), XmlStatus::IllTyped);
        assert_eq!(classify_xml_literal("<a>x"), XmlStatus::IllTyped);
        // Plain text with no markup is well-formed content.
        assert_eq!(
            classify_xml_literal("just text"),
            XmlStatus::WellTyped("just text".into())
        );
        // Two sibling roots are not a single element.
        assert_eq!(classify_xml_literal("<a/><b/>"), XmlStatus::IllTyped);
    }

    #[test]
    fn canonicalization_normalizes_whitespace_inside_tags() {
        let canon = |s: &str| match classify_xml_literal(s) {
            XmlStatus::WellTyped(c) => c,
            XmlStatus::IllTyped => panic!("{s} should be well-formed"),
        };
        assert_eq!(canon("<a >x</a >"), canon("<a>x</a>"));
        assert_eq!(canon("<a  b = \"c\" >x</a>"), "<a b=\"c\">x</a>");
        assert_eq!(canon("<a b='c'/>"), "<a b=\"c\"/>");
        // Text, including inter-element text, is untouched.
        assert_eq!(canon("<a> x  y </a>"), "<a> x  y </a>");
        assert_eq!(canon("<a><b/> t</a>"), "<a><b/> t</a>");
        // Distinct attribute order stays distinct.
        assert_ne!(canon("<a x=\"1\" y=\"2\"/>"), canon("<a y=\"2\" x=\"1\"/>"));
    }

    #[test]
    fn nested_elements_parse_and_canonicalize() {
        assert_eq!(
            classify_xml_literal("<a ><b c = 'd'>t</b ></a>"),
            XmlStatus::WellTyped("<a><b c=\"d\">t</b></a>".into())
        );
        assert_eq!(classify_xml_literal("<a><b></a></b>"), XmlStatus::IllTyped);
    }
}
