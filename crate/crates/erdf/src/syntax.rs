//! Concrete text syntax: parsing and serialization.
//!
//! An ontology document is a sequence of `@prefix` declarations followed by
//! `graph { ... }` and `rules { ... }` sections:
//!
//! ```text
//! @prefix : <http://example.org/> .
//! graph {
//!   likes(Gerd, Riesling).
//!   -likes(Carlos, Riesling).
//! }
//! rules {
//!   dislikes(?x, ?y) <- -likes(?x, ?y).
//!   false <- likes(?x, ?x) & ~known(?x, ?x).
//! }
//! ```
//!
//! Formulas use `~` for negation as failure, `-` for strong negation, `&`,
//! `|`, `=>` (right-associative) and the quantifiers `exists ?x F` /
//! `forall ?x F`, whose scope extends to the end of the enclosing
//! parenthesized group.  Precedence, tightest first: `~`/`-`, `&`, `|`,
//! `=>`.  Terms are prefixed names (`ex:Gerd`, `:Gerd`, bare `Gerd` against
//! the default prefix), full URIs in angle brackets, literals
//! (`"s"`, `"s"@en`, `"s"^^xsd:string`) or variables (`?x`).  The prefixes
//! `rdf:`, `rdfs:`, `erdf:` and `xsd:` are predeclared and the first three
//! cannot be redefined.  `#` starts a comment.  The words `graph`, `rules`,
//! `exists`, `forall`, `true` and `false` are reserved and cannot be used as
//! bare names.
//!
//! Beyond the grammar, the parser enforces the rule-formation restrictions:
//! predicates must be URIs, no variable may have two bound occurrences or
//! both free and bound occurrences, and no variable bound in a rule
//! condition may occur in its conclusion.

use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;

use crate::model::{all_vars, free_vars, Conclusion, Formula, Ontology, Rule, SignedTriple, Term};
use crate::vocab;

/// A syntax or well-formedness error, with its position in the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub offending_token: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {} (at {:?})",
            self.line, self.column, self.message, self.offending_token
        )
    }
}

impl Error for ParseError {}

/// Prefix table in force for a document; maps prefix names (possibly the
/// empty default prefix) to namespace URIs.
pub type Prefixes = BTreeMap<String, String>;

/// The predeclared prefix table: `rdf:`, `rdfs:`, `erdf:` and `xsd:`.
pub fn base_prefixes() -> Prefixes {
    let mut p = Prefixes::new();
    p.insert("rdf".into(), vocab::RDF_NS.into());
    p.insert("rdfs".into(), vocab::RDFS_NS.into());
    p.insert("erdf".into(), vocab::ERDF_NS.into());
    p.insert("xsd".into(), vocab::XSD_NS.into());
    p
}

/// Parses an ontology document.
pub fn parse_ontology(text: &str) -> Result<Ontology, ParseError> {
    parse_ontology_with_prefixes(text).map(|(o, _)| o)
}

/// Parses an ontology document, also returning the prefix table it declared
/// (so that query formulas can be parsed against the same prefixes).
pub fn parse_ontology_with_prefixes(text: &str) -> Result<(Ontology, Prefixes), ParseError> {
    let mut p = Parser::new(text)?;
    let onto = p.document()?;
    Ok((onto, p.prefixes))
}

/// Parses a standalone formula, e.g. a query.  The text may start with its
/// own `@prefix` declarations; otherwise only the predeclared prefixes are
/// available.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with_prefixes(text, &Prefixes::new())
}

/// Parses a standalone formula against additional prefix declarations,
/// typically the ones returned by [`parse_ontology_with_prefixes`].
pub fn parse_formula_with_prefixes(
    text: &str,
    extra: &Prefixes,
) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    for (name, uri) in extra {
        p.prefixes.entry(name.clone()).or_insert_with(|| uri.clone());
    }
    p.prefix_declarations()?;
    let f = p.formula()?;
    let t = p.peek().clone();
    if t.kind != TokenKind::Eof {
        return Err(err_at(&t, "expected end of formula"));
    }
    check_bound_occurrences(&f, &t)?;
    Ok(f)
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    /// Bare name, e.g. `Gerd` or a keyword like `graph`.
    Name(String),
    /// Prefixed name `prefix:local`; both parts may be empty (`:x`, `ex:`).
    Qname(String, String),
    /// `<uri>`.
    UriRef(String),
    /// `?name`.
    Var(String),
    /// String literal body, unescaped.
    Str(String),
    /// `@word`: a prefix declaration introducer or a language tag.
    AtName(String),
    /// `^^`.
    CaretCaret,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    LeftArrow,
    FatArrow,
    Amp,
    Pipe,
    Tilde,
    Minus,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    column: usize,
    text: String,
}

fn err_at(t: &Token, message: impl Into<String>) -> ParseError {
    ParseError {
        line: t.line,
        column: t.column,
        message: message.into(),
        offending_token: t.text.clone(),
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Lexer<'a> {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>, tok: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
            offending_token: tok.into(),
        }
    }

    fn name(&mut self, first: char) -> String {
        let mut s = String::from(first);
        while let Some(&c) = self.chars.peek() {
            if is_name_char(c) {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn tokens(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '#' {
                    while let Some(&c) = self.chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let line = self.line;
            let column = self.column;
            let Some(c) = self.bump() else {
                out.push(Token {
                    kind: TokenKind::Eof,
                    line,
                    column,
                    text: "end of input".into(),
                });
                return Ok(out);
            };
            let (kind, text) = match c {
                '{' => (TokenKind::LBrace, "{".into()),
                '}' => (TokenKind::RBrace, "}".into()),
                '(' => (TokenKind::LParen, "(".into()),
                ')' => (TokenKind::RParen, ")".into()),
                ',' => (TokenKind::Comma, ",".into()),
                '.' => (TokenKind::Dot, ".".into()),
                '&' => (TokenKind::Amp, "&".into()),
                '|' => (TokenKind::Pipe, "|".into()),
                '~' => (TokenKind::Tilde, "~".into()),
                '-' => (TokenKind::Minus, "-".into()),
                '=' => {
                    if self.chars.peek() == Some(&'>') {
                        self.bump();
                        (TokenKind::FatArrow, "=>".into())
                    } else {
                        return Err(self.error("expected '>' after '='", "="));
                    }
                }
                '^' => {
                    if self.chars.peek() == Some(&'^') {
                        self.bump();
                        (TokenKind::CaretCaret, "^^".into())
                    } else {
                        return Err(self.error("expected '^^'", "^"));
                    }
                }
                '<' => {
                    if self.chars.peek() == Some(&'-') {
                        self.bump();
                        (TokenKind::LeftArrow, "<-".into())
                    } else {
                        let mut uri = String::new();
                        loop {
                            match self.bump() {
                                Some('>') => break,
                                Some(c) if c == '\n' => {
                                    return Err(self.error("unterminated URI reference", "<"))
                                }
                                Some(c) => uri.push(c),
                                None => {
                                    return Err(self.error("unterminated URI reference", "<"))
                                }
                            }
                        }
                        let text = format!("<{uri}>");
                        (TokenKind::UriRef(uri), text)
                    }
                }
                '?' => {
                    let Some(&c) = self.chars.peek() else {
                        return Err(self.error("expected variable name after '?'", "?"));
                    };
                    if !is_name_start(c) {
                        return Err(self.error("expected variable name after '?'", "?"));
                    }
                    self.bump();
                    let n = self.name(c);
                    let text = format!("?{n}");
                    (TokenKind::Var(n), text)
                }
                '@' => {
                    // A language tag may contain '-'; a declaration keyword
                    // (`@prefix`) never does, so one charset serves both.
                    let mut n = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if is_name_char(c) || c == '-' {
                            n.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if n.is_empty() {
                        return Err(self.error("expected name after '@'", "@"));
                    }
                    let text = format!("@{n}");
                    (TokenKind::AtName(n), text)
                }
                '"' => {
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some('"') => break,
                            Some('\\') => match self.bump() {
                                Some('"') => s.push('"'),
                                Some('\\') => s.push('\\'),
                                Some('n') => s.push('\n'),
                                Some('r') => s.push('\r'),
                                Some('t') => s.push('\t'),
                                Some(c) => {
                                    return Err(self
                                        .error("invalid escape in string literal", format!("\\{c}")))
                                }
                                None => {
                                    return Err(self.error("unterminated string literal", "\""))
                                }
                            },
                            Some(c) => s.push(c),
                            None => return Err(self.error("unterminated string literal", "\"")),
                        }
                    }
                    let text = format!("{s:?}");
                    (TokenKind::Str(s), text)
                }
                c if is_name_start(c) => {
                    let n = self.name(c);
                    if self.chars.peek() == Some(&':') {
                        self.bump();
                        let local = match self.chars.peek() {
                            Some(&c) if is_name_start(c) => {
                                self.bump();
                                self.name(c)
                            }
                            _ => String::new(),
                        };
                        let text = format!("{n}:{local}");
                        (TokenKind::Qname(n, local), text)
                    } else {
                        let text = n.clone();
                        (TokenKind::Name(n), text)
                    }
                }
                ':' => {
                    let local = match self.chars.peek() {
                        Some(&c) if is_name_start(c) => {
                            self.bump();
                            self.name(c)
                        }
                        _ => String::new(),
                    };
                    let text = format!(":{local}");
                    (TokenKind::Qname(String::new(), local), text)
                }
                other => {
                    return Err(self.error("unexpected character", other.to_string()));
                }
            };
            out.push(Token {
                kind,
                line,
                column,
                text,
            });
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

const RESERVED: &[&str] = &["graph", "rules", "exists", "forall", "true", "false"];

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    prefixes: Prefixes,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            tokens: Lexer::new(text).tokens()?,
            pos: 0,
            prefixes: base_prefixes(),
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, ParseError> {
        let t = self.next();
        if t.kind == kind {
            Ok(t)
        } else {
            Err(err_at(&t, format!("expected {what}")))
        }
    }

    fn is_name(&self, s: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Name(n) if n == s)
    }

    fn prefix_declarations(&mut self) -> Result<(), ParseError> {
        while matches!(&self.peek().kind, TokenKind::AtName(n) if n == "prefix") {
            let at = self.next();
            let t = self.next();
            let TokenKind::Qname(prefix, local) = t.kind.clone() else {
                return Err(err_at(&t, "expected prefix name ending in ':'"));
            };
            if !local.is_empty() {
                return Err(err_at(&t, "expected prefix name ending in ':'"));
            }
            let t = self.next();
            let TokenKind::UriRef(uri) = t.kind else {
                return Err(err_at(&t, "expected namespace URI in angle brackets"));
            };
            self.expect(TokenKind::Dot, "'.' after prefix declaration")?;
            let fixed = [
                ("rdf", vocab::RDF_NS),
                ("rdfs", vocab::RDFS_NS),
                ("erdf", vocab::ERDF_NS),
            ];
            if let Some((_, ns)) = fixed.iter().find(|(p, _)| *p == prefix) {
                if uri != *ns {
                    return Err(err_at(
                        &at,
                        format!("prefix '{prefix}:' is reserved and cannot be redefined"),
                    ));
                }
            }
            self.prefixes.insert(prefix, uri);
        }
        Ok(())
    }

    fn document(&mut self) -> Result<Ontology, ParseError> {
        let mut onto = Ontology::default();
        loop {
            self.prefix_declarations()?;
            let t = self.peek().clone();
            match &t.kind {
                TokenKind::Eof => return Ok(onto),
                TokenKind::Name(n) if n == "graph" => {
                    self.next();
                    self.expect(TokenKind::LBrace, "'{' after 'graph'")?;
                    while self.peek().kind != TokenKind::RBrace {
                        let triple = self.signed_triple()?;
                        self.expect(TokenKind::Dot, "'.' after triple")?;
                        onto.graph.insert(triple);
                    }
                    self.next();
                }
                TokenKind::Name(n) if n == "rules" => {
                    self.next();
                    self.expect(TokenKind::LBrace, "'{' after 'rules'")?;
                    while self.peek().kind != TokenKind::RBrace {
                        let rule = self.rule()?;
                        self.expect(TokenKind::Dot, "'.' after rule")?;
                        onto.program.insert(rule);
                    }
                    self.next();
                }
                _ => {
                    return Err(err_at(
                        &t,
                        "expected '@prefix', 'graph' or 'rules' section",
                    ))
                }
            }
        }
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let at = self.peek().clone();
        let conclusion = if self.is_name("false") {
            self.next();
            Conclusion::False
        } else {
            Conclusion::Triple(self.signed_triple()?)
        };
        self.expect(TokenKind::LeftArrow, "'<-' between conclusion and condition")?;
        let condition = self.formula()?;
        check_bound_occurrences(&condition, &at)?;
        let rule = Rule {
            condition,
            conclusion,
        };
        let bound: Vec<String> = {
            let av = all_vars(&rule.condition);
            let fv = free_vars(&rule.condition);
            av.difference(&fv).cloned().collect()
        };
        if let Conclusion::Triple(t) = &rule.conclusion {
            for term in [&t.subject, &t.object] {
                if let Term::Variable(v) = term {
                    if bound.iter().any(|b| b == v) {
                        return Err(err_at(
                            &at,
                            format!("bound/free clash: variable ?{v} is bound in the condition but occurs in the conclusion"),
                        ));
                    }
                }
            }
        }
        Ok(rule)
    }

    /// `p(s, o)` or `-p(s, o)`.
    fn signed_triple(&mut self) -> Result<SignedTriple, ParseError> {
        let positive = if self.peek().kind == TokenKind::Minus {
            self.next();
            false
        } else {
            true
        };
        let t = self.peek().clone();
        let predicate = match &t.kind {
            TokenKind::Var(_) => return Err(err_at(&t, "variable as predicate")),
            TokenKind::Str(_) => return Err(err_at(&t, "literal as predicate")),
            _ => match self.term()? {
                Term::Uri(u) => u,
                Term::Variable(_) => return Err(err_at(&t, "variable as predicate")),
                _ => return Err(err_at(&t, "literal as predicate")),
            },
        };
        self.expect(TokenKind::LParen, "'(' after predicate")?;
        let subject = self.term()?;
        self.expect(TokenKind::Comma, "',' between subject and object")?;
        let object = self.term()?;
        self.expect(TokenKind::RParen, "')' after object")?;
        Ok(SignedTriple {
            predicate,
            subject,
            object,
            positive,
        })
    }

    fn resolve(&self, prefix: &str, local: &str, t: &Token) -> Result<String, ParseError> {
        match self.prefixes.get(prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None if prefix.is_empty() => Err(err_at(
                t,
                "no default prefix declared; add '@prefix : <...> .' or use a full URI",
            )),
            None => Err(err_at(t, format!("undeclared prefix '{prefix}:'"))),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let t = self.next();
        match t.kind.clone() {
            TokenKind::UriRef(u) => Ok(Term::uri(u)),
            TokenKind::Qname(p, l) => Ok(Term::uri(self.resolve(&p, &l, &t)?)),
            TokenKind::Name(n) => {
                if RESERVED.contains(&n.as_str()) {
                    return Err(err_at(
                        &t,
                        format!("'{n}' is a reserved word; prefix it to use it as a name"),
                    ));
                }
                Ok(Term::uri(self.resolve("", &n, &t)?))
            }
            TokenKind::Var(v) => Ok(Term::var(v)),
            TokenKind::Str(s) => match self.peek().kind.clone() {
                TokenKind::AtName(lang) => {
                    self.next();
                    Ok(Term::PlainLiteral {
                        value: s,
                        lang: Some(lang),
                    })
                }
                TokenKind::CaretCaret => {
                    self.next();
                    let dt = self.next();
                    let datatype = match dt.kind.clone() {
                        TokenKind::UriRef(u) => u,
                        TokenKind::Qname(p, l) => self.resolve(&p, &l, &dt)?,
                        _ => return Err(err_at(&dt, "expected datatype URI after '^^'")),
                    };
                    Ok(Term::typed(s, datatype))
                }
                _ => Ok(Term::plain(s)),
            },
            _ => Err(err_at(&t, "expected a term")),
        }
    }

    /// Parses a formula up to the end of the enclosing group; a quantifier
    /// encountered at any operand position scopes to the group end.
    fn formula(&mut self) -> Result<Formula, ParseError> {
        if let Some(f) = self.quantified()? {
            return Ok(f);
        }
        let lhs = self.disjunction()?;
        if self.peek().kind == TokenKind::FatArrow {
            self.next();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn quantified(&mut self) -> Result<Option<Formula>, ParseError> {
        let word = match &self.peek().kind {
            TokenKind::Name(n) if n == "exists" || n == "forall" => n.clone(),
            _ => return Ok(None),
        };
        self.next();
        let t = self.next();
        let TokenKind::Var(v) = t.kind.clone() else {
            return Err(err_at(&t, format!("expected variable after '{word}'")));
        };
        let body = self.formula()?;
        Ok(Some(if word == "exists" {
            Formula::exists(v, body)
        } else {
            Formula::forall(v, body)
        }))
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.peek().kind == TokenKind::Pipe {
            self.next();
            let rhs = match self.quantified()? {
                Some(q) => return Ok(Formula::or(f, q)),
                None => self.conjunction()?,
            };
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.peek().kind == TokenKind::Amp {
            self.next();
            let rhs = match self.quantified()? {
                Some(q) => return Ok(Formula::and(f, q)),
                None => self.unary()?,
            };
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let t = self.peek().clone();
        match &t.kind {
            TokenKind::Tilde => {
                self.next();
                Ok(Formula::weak_neg(self.unary_or_quantified()?))
            }
            TokenKind::Minus => {
                self.next();
                Ok(Formula::strong_neg(self.unary_or_quantified()?))
            }
            TokenKind::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(TokenKind::RParen, "')'")?;
                Ok(f)
            }
            TokenKind::Name(n) if n == "true" => {
                self.next();
                Ok(Formula::True)
            }
            TokenKind::Name(n) if n == "false" => {
                self.next();
                Ok(Formula::False)
            }
            TokenKind::Name(n) if n == "exists" || n == "forall" => Err(err_at(
                &t,
                "quantifier cannot start here; this position was reached mid-formula",
            )),
            _ => {
                let triple = self.signed_triple()?;
                if triple.positive {
                    Ok(Formula::atom(triple))
                } else {
                    Ok(Formula::strong_neg(Formula::atom(triple.negated())))
                }
            }
        }
    }

    /// Negation binds tighter than the binary connectives but still admits a
    /// quantified operand: `~exists ?x p(?x, ?x)` negates the whole
    /// quantified rest of the group.
    fn unary_or_quantified(&mut self) -> Result<Formula, ParseError> {
        match self.quantified()? {
            Some(q) => Ok(q),
            None => self.unary(),
        }
    }
}

/// Rejects formulas in which a variable has two bound occurrences or both
/// free and bound occurrences.
fn check_bound_occurrences(f: &Formula, at: &Token) -> Result<(), ParseError> {
    fn binders(f: &Formula, out: &mut Vec<String>) {
        match f {
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                out.push(v.clone());
                binders(b, out);
            }
            Formula::StrongNeg(a) | Formula::WeakNeg(a) => binders(a, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                binders(a, out);
                binders(b, out);
            }
            Formula::Atom(_) | Formula::True | Formula::False => {}
        }
    }
    let mut bs = Vec::new();
    binders(f, &mut bs);
    for (i, v) in bs.iter().enumerate() {
        if bs[..i].contains(v) {
            return Err(err_at(
                at,
                format!("variable ?{v} is bound more than once; rename one binder"),
            ));
        }
    }
    let free = free_vars(f);
    if let Some(v) = bs.iter().find(|v| free.contains(*v)) {
        return Err(err_at(
            at,
            format!("variable ?{v} occurs both free and bound; rename the binder"),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------------

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn is_valid_local(s: &str) -> bool {
    s.is_empty()
        || (s.starts_with(is_name_start) && s.chars().all(is_name_char))
}

fn write_uri(out: &mut String, uri: &str) {
    for (prefix, ns) in [
        ("rdf", vocab::RDF_NS),
        ("rdfs", vocab::RDFS_NS),
        ("erdf", vocab::ERDF_NS),
        ("xsd", vocab::XSD_NS),
    ] {
        if let Some(local) = uri.strip_prefix(ns) {
            if is_valid_local(local) {
                out.push_str(prefix);
                out.push(':');
                out.push_str(local);
                return;
            }
        }
    }
    out.push('<');
    out.push_str(uri);
    out.push('>');
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Uri(u) => write_uri(out, u),
        Term::Variable(v) => {
            out.push('?');
            out.push_str(v);
        }
        Term::PlainLiteral { value, lang } => {
            out.push('"');
            out.push_str(&escape(value));
            out.push('"');
            if let Some(l) = lang {
                out.push('@');
                out.push_str(l);
            }
        }
        Term::TypedLiteral { value, datatype } => {
            out.push('"');
            out.push_str(&escape(value));
            out.push_str("\"^^");
            write_uri(out, datatype);
        }
    }
}

fn write_triple(out: &mut String, t: &SignedTriple) {
    if !t.positive {
        out.push('-');
    }
    write_uri(out, &t.predicate);
    out.push('(');
    write_term(out, &t.subject);
    out.push_str(", ");
    write_term(out, &t.object);
    out.push(')');
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => 0,
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::StrongNeg(..) | Formula::WeakNeg(..) => 4,
        Formula::Atom(_) | Formula::True | Formula::False => 5,
    }
}

fn write_formula(out: &mut String, f: &Formula, min: u8) {
    if precedence(f) < min {
        out.push('(');
        write_formula(out, f, 0);
        out.push(')');
        return;
    }
    match f {
        Formula::Atom(t) => write_triple(out, t),
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::StrongNeg(a) => {
            out.push('-');
            write_formula(out, a, 4);
        }
        Formula::WeakNeg(a) => {
            out.push('~');
            write_formula(out, a, 4);
        }
        Formula::And(a, b) => {
            write_formula(out, a, 3);
            out.push_str(" & ");
            write_formula(out, b, 4);
        }
        Formula::Or(a, b) => {
            write_formula(out, a, 2);
            out.push_str(" | ");
            write_formula(out, b, 3);
        }
        Formula::Implies(a, b) => {
            write_formula(out, a, 2);
            out.push_str(" => ");
            write_formula(out, b, 1);
        }
        Formula::Exists(v, b) => {
            out.push_str("exists ?");
            out.push_str(v);
            out.push(' ');
            write_formula(out, b, 0);
        }
        Formula::Forall(v, b) => {
            out.push_str("forall ?");
            out.push_str(v);
            out.push(' ');
            write_formula(out, b, 0);
        }
    }
}

/// Serializes a formula; [`parse_formula`] reparses it to an equal value.
pub fn serialize_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, 0);
    out
}

/// Serializes a single rule, trailing period included; [`parse_ontology`]
/// reparses it inside a `rules` block.
pub fn serialize_rule(r: &Rule) -> String {
    let mut out = String::new();
    match &r.conclusion {
        Conclusion::False => out.push_str("false"),
        Conclusion::Triple(t) => write_triple(&mut out, t),
    }
    out.push_str(" <- ");
    match &r.condition {
        Formula::True => out.push_str("true"),
        f => write_formula(&mut out, f, 0),
    }
    out.push('.');
    out
}

/// Serializes an ontology document; [`parse_ontology`] reparses it to an
/// equal value.  Built-in namespaces print as prefixed names, everything
/// else as full URIs, so the output needs no prefix declarations.
pub fn serialize_ontology(o: &Ontology) -> String {
    let mut out = String::new();
    out.push_str("graph {\n");
    for t in &o.graph {
        out.push_str("  ");
        write_triple(&mut out, t);
        out.push_str(".\n");
    }
    out.push_str("}\n\nrules {\n");
    for r in &o.program {
        out.push_str("  ");
        out.push_str(&serialize_rule(r));
        out.push('\n');
    }
    out.push_str("}\n");
    out
}
