//! Concrete syntax.
//!
//! ```text
//! % comment
//! A(X) -> exists W . R(X,W), B(W) .
//! R(X,Y), R(X,Z) -> Y = Z .
//! A(a) .
//! ? exists X, Y . R(X,Y), B(Y) .
//! ```
//!
//! An identifier followed by `(` names a predicate; otherwise identifiers
//! starting with an uppercase letter or `_` are variables and the rest are
//! constants. `eq` is the axiomatised equality predicate.

use std::fmt;

use crate::model::{
    validate_with, Atom, Bcq, Egd, Location, Ontology, Predicate, Rule, RuleSet, Symbol, Term, Tgd,
    ValidationOptions, AXIOM_EQUALITY_NAME,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Lexical,
    Syntax,
    Validation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::Lexical => "lexical error",
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::Validation => "invalid",
        };
        write!(f, "{}: {}: {}", self.pos, kind, self.message)
    }
}

/// Rules, facts and queries of one or more source files.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: RuleSet,
    pub facts: Vec<Atom>,
    pub queries: Vec<Bcq>,
    pub rule_pos: Vec<Pos>,
    pub fact_pos: Vec<Pos>,
    pub query_pos: Vec<Pos>,
}

impl Program {
    pub fn ontology(&self) -> Ontology {
        Ontology::new(self.rules.clone(), self.facts.clone())
    }

    /// Appends `other`; existentials are renamed apart again over the union.
    pub fn merge(mut self, other: Program) -> Program {
        let mut rules = self.rules.rules().to_vec();
        rules.extend(other.rules.rules().iter().cloned());
        self.rules = RuleSet::new(rules);
        self.facts.extend(other.facts);
        self.queries.extend(other.queries);
        self.rule_pos.extend(other.rule_pos);
        self.fact_pos.extend(other.fact_pos);
        self.query_pos.extend(other.query_pos);
        self
    }

    /// Model validation of the rules, facts and queries, with source positions.
    pub fn validate(&self, options: ValidationOptions) -> Vec<Diagnostic> {
        let locate = |l: Location| -> Pos {
            let found = match l {
                Location::RuleSet => None,
                Location::Rule(i) => self.rule_pos.get(i),
                Location::Fact(i) => self.fact_pos.get(i),
                Location::Query(i) => self.query_pos.get(i),
            };
            found.copied().unwrap_or(Pos { line: 1, col: 1 })
        };
        let mut out: Vec<Diagnostic> = validate_with(&self.ontology(), options)
            .into_iter()
            .map(|v| Diagnostic {
                pos: locate(v.location),
                kind: DiagnosticKind::Validation,
                message: v.message,
            })
            .collect();
        for (i, q) in self.queries.iter().enumerate() {
            for v in crate::model::validate_query(q, options) {
                out.push(Diagnostic {
                    pos: locate(Location::Query(i)),
                    kind: DiagnosticKind::Validation,
                    message: v.message,
                });
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    Equals,
    Question,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{}'", s),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Dot => f.write_str("'.'"),
            Tok::Arrow => f.write_str("'->'"),
            Tok::Equals => f.write_str("'='"),
            Tok::Question => f.write_str("'?'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, Diagnostic> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            '(' | ')' | ',' | '.' | '=' | '?' => {
                bump(&mut chars);
                out.push((
                    match c {
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        ',' => Tok::Comma,
                        '.' => Tok::Dot,
                        '=' => Tok::Equals,
                        _ => Tok::Question,
                    },
                    pos,
                ));
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    out.push((Tok::Arrow, pos));
                } else {
                    return Err(Diagnostic {
                        pos,
                        kind: DiagnosticKind::Lexical,
                        message: "expected '->'".into(),
                    });
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), pos));
            }
            other => {
                return Err(Diagnostic {
                    pos,
                    kind: DiagnosticKind::Lexical,
                    message: format!("unexpected character {:?}", other),
                })
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic {
            pos: self.pos(),
            kind: DiagnosticKind::Syntax,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", tok, self.peek()))
        }
    }

    fn is_exists(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == "exists")
            && matches!(self.peek2(), Tok::Ident(_))
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if *self.peek2() == Tok::LParen {
                    return self
                        .error(format!("functional term {}(...) is not allowed here", name));
                }
                self.next();
                let first = name.chars().next().unwrap_or('a');
                Ok(if first.is_ascii_uppercase() || first == '_' {
                    Term::variable(name)
                } else {
                    Term::constant(name)
                })
            }
            other => self.error(format!("expected a term, found {}", other)),
        }
    }

    fn atom(&mut self) -> PResult<Atom> {
        if let (Tok::Ident(name), Tok::LParen) = (self.peek().clone(), self.peek2().clone()) {
            self.next();
            self.next();
            let mut args = vec![self.term()?];
            while *self.peek() == Tok::Comma {
                self.next();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
            let predicate = if name == AXIOM_EQUALITY_NAME && args.len() == 2 {
                Predicate::axiom_equality()
            } else {
                Predicate::new(&name, args.len())
            };
            return Ok(Atom::new(predicate, args));
        }
        let left = self.term()?;
        if *self.peek() != Tok::Equals {
            return self.error(format!("expected an atom, found {}", left));
        }
        self.next();
        let right = self.term()?;
        Ok(Atom::new(Predicate::equality(), vec![left, right]))
    }

    fn conjunction(&mut self) -> PResult<Vec<Atom>> {
        let mut out = vec![self.atom()?];
        while *self.peek() == Tok::Comma {
            self.next();
            out.push(self.atom()?);
        }
        Ok(out)
    }

    fn variables(&mut self) -> PResult<Vec<Symbol>> {
        let mut out = Vec::new();
        loop {
            match self.term()? {
                Term::Variable(v) => out.push(v),
                t => return self.error(format!("{} is not a variable", t)),
            }
            if *self.peek() != Tok::Comma {
                return Ok(out);
            }
            self.next();
        }
    }

    fn statement(&mut self, p: &mut Program, rules: &mut Vec<Rule>) -> PResult<()> {
        let start = self.pos();
        if *self.peek() == Tok::Question {
            self.next();
            let variables = if self.is_exists() {
                self.next();
                let vs = self.variables()?;
                self.expect(Tok::Dot)?;
                vs
            } else {
                Vec::new()
            };
            let body = self.conjunction()?;
            self.expect(Tok::Dot)?;
            p.queries.push(Bcq { variables, body });
            p.query_pos.push(start);
            return Ok(());
        }
        let body = self.conjunction()?;
        match self.peek() {
            Tok::Dot => {
                self.next();
                for a in body {
                    p.facts.push(a);
                    p.fact_pos.push(start);
                }
                Ok(())
            }
            Tok::Arrow => {
                self.next();
                let existentials = if self.is_exists() {
                    self.next();
                    let vs = self.variables()?;
                    self.expect(Tok::Dot)?;
                    vs
                } else {
                    Vec::new()
                };
                let head = self.conjunction()?;
                self.expect(Tok::Dot)?;
                let rule = match head.as_slice() {
                    [h] if existentials.is_empty()
                        && h.predicate.is_equality()
                        && h.args.iter().all(Term::is_variable) =>
                    {
                        let x = h.args[0].as_variable().expect("variable").clone();
                        let y = h.args[1].as_variable().expect("variable").clone();
                        Rule::Egd(Egd::new(body, x, y))
                    }
                    _ => Rule::Tgd(Tgd::new(body, existentials, head)),
                };
                rules.push(rule);
                p.rule_pos.push(start);
                Ok(())
            }
            other => self.error(format!("expected '.' or '->', found {}", other)),
        }
    }
}

/// Parses without model validation. Existentials are renamed apart.
pub fn parse_unchecked(text: &str) -> Result<Program, Vec<Diagnostic>> {
    let toks = lex(text).map_err(|d| vec![d])?;
    let mut parser = Parser { toks, at: 0 };
    let mut program = Program::default();
    let mut rules = Vec::new();
    let mut errors = Vec::new();
    while *parser.peek() != Tok::Eof {
        if let Err(d) = parser.statement(&mut program, &mut rules) {
            errors.push(d);
            // resynchronise after the next '.'
            while !matches!(parser.peek(), Tok::Dot | Tok::Eof) {
                parser.next();
            }
            if *parser.peek() == Tok::Dot {
                parser.next();
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    program.rules = RuleSet::new(rules);
    Ok(program)
}

/// Parses and validates; `eq` is accepted only with `options`.
pub fn parse_with(text: &str, options: ValidationOptions) -> Result<Program, Vec<Diagnostic>> {
    let program = parse_unchecked(text)?;
    let problems = program.validate(options);
    if problems.is_empty() {
        Ok(program)
    } else {
        Err(problems)
    }
}

pub fn parse(text: &str) -> Result<Program, Vec<Diagnostic>> {
    parse_with(text, ValidationOptions::default())
}

/// Text that parses back to `program`: rules, then facts, then queries.
pub fn serialize(program: &Program) -> String {
    let mut out = String::new();
    for r in program.rules.iter() {
        out.push_str(&format!("{} .\n", r));
    }
    for f in &program.facts {
        out.push_str(&format!("{} .\n", f));
    }
    for q in &program.queries {
        out.push_str(&format!("{} .\n", q));
    }
    out
}

/// Serializes a rule set on its own.
pub fn serialize_rules(rules: &RuleSet) -> String {
    rules.iter().map(|r| format!("{} .\n", r)).collect()
}
