//! Reasoner for RDF graphs extended with strong negation and derivation
//! rules.
//!
//! An ontology pairs a graph of positive and strongly negated triples with a
//! set of derivation rules over first-order conditions.  Its meaning is the
//! set of stable models: partial interpretations built in layers, starting
//! from a minimal model of the skolemized graph and applying rules whose
//! conditions hold persistently.  Classes and properties declared *total*
//! switch from open-world to closed-world behaviour, in which unprovable
//! membership counts as falsity.
//!
//! The crate exposes the data model ([`model`]), the built-in vocabulary and
//! axioms ([`vocab`]), a concrete syntax ([`syntax`]), partial
//! interpretations with the semantic closure engine ([`interp`]), the
//! stable-model search with query answering ([`stable`]), and a command-line
//! front end over all of it ([`cli`]).

pub mod cli;
pub mod interp;
pub mod model;
pub mod stable;
pub mod syntax;
pub mod vocab;
