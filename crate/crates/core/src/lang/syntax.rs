//! The `.opt` text format: lexer, parser, resolver and printer.
//!
//! ```text
//! system A = [2]
//! otest m : A { 0 = [1,0], 1 = [0,1] }
//! ptest r : A { r = [1/3, 2/3] }
//! circuit obs(m) ; prep(r)
//! ```

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::ast::{typecheck, CircuitNode};
use crate::matrix::Matrix;
use crate::permutation::PermutationSpec;
use crate::rational::{format_q, parse_q, Q};
use crate::system::SystemType;
use crate::theory::{validate, Outcome, Test};

/// A source position (1-based). Spans never take part in equality.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("{span}: syntax error: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: unknown {kind} `{name}`")]
    Unknown { span: Span, kind: &'static str, name: String },
    #[error("{span}: {message}")]
    Declaration { span: Span, message: String },
    #[error("{span}: type error: {message}")]
    Type { span: Span, message: String },
    #[error("no circuit expression in source")]
    NoCircuit,
}

impl LangError {
    pub fn span(&self) -> Option<Span> {
        match self {
            LangError::Syntax { span, .. }
            | LangError::Unknown { span, .. }
            | LangError::Declaration { span, .. }
            | LangError::Type { span, .. } => Some(*span),
            LangError::NoCircuit => None,
        }
    }
}

pub type LangResult<T> = Result<T, LangError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Prep,
    Obs,
    Transform,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDecl {
    pub name: String,
    pub factors: Vec<usize>,
    pub span: Span,
}

/// A declared test. Preparation and observation entries hold a single row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestDecl {
    pub kind: DeclKind,
    pub name: String,
    pub input: String,
    pub output: Option<String>,
    pub events: Vec<(String, Vec<Vec<Q>>)>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Id(String),
    Swap(String, String),
    Perm(String, Vec<Vec<usize>>),
    Prep(String),
    Obs(String),
    Test(String),
    Seq(Box<Expr>, Box<Expr>),
    Par(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CircuitSource {
    pub systems: Vec<SystemDecl>,
    pub tests: Vec<TestDecl>,
    pub circuit: Option<Expr>,
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(text: &str) -> LangResult<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if word.chars().all(|ch| ch.is_ascii_digit()) { Tok::Int(word) } else { Tok::Word(word) };
            out.push(Token { tok, span });
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Sym("->"), span });
            i += 2;
            col += 2;
            continue;
        }
        let sym = match c {
            '[' => "[",
            ']' => "]",
            '{' => "{",
            '}' => "}",
            '(' => "(",
            ')' => ")",
            ',' => ",",
            '=' => "=",
            ':' => ":",
            ';' => ";",
            '|' => "|",
            '/' => "/",
            '-' => "-",
            _ => return Err(LangError::Syntax { span, message: format!("unexpected character `{c}`") }),
        };
        out.push(Token { tok: Tok::Sym(sym), span });
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col } });
    Ok(out)
}

// ---------------------------------------------------------------- parser

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Openers of the groups currently being parsed.
    open: Vec<Span>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> LangResult<T> {
        // Running out of input inside a group is reported at the group's opener.
        let span = match (self.peek(), self.open.last()) {
            (Tok::Eof, Some(&opener)) => opener,
            _ => self.span(),
        };
        Err(LangError::Syntax { span, message: message.into() })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Word(w) | Tok::Int(w) => format!("`{w}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn eat(&mut self, sym: &'static str) -> bool {
        if *self.peek() == Tok::Sym(sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &'static str) -> LangResult<Span> {
        if *self.peek() == Tok::Sym(sym) {
            Ok(self.bump().span)
        } else {
            self.fail(format!("expected `{sym}`, found {}", self.describe()))
        }
    }

    fn open_group(&mut self, sym: &'static str) -> LangResult<()> {
        let span = self.expect(sym)?;
        self.open.push(span);
        Ok(())
    }

    fn close_group(&mut self, sym: &'static str) -> LangResult<()> {
        self.expect(sym)?;
        self.open.pop();
        Ok(())
    }

    fn ident(&mut self) -> LangResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Word(w) => {
                let span = self.bump().span;
                Ok((w, span))
            }
            _ => self.fail(format!("expected a name, found {}", self.describe())),
        }
    }

    fn label(&mut self) -> LangResult<String> {
        match self.peek().clone() {
            Tok::Word(w) | Tok::Int(w) => {
                self.bump();
                Ok(w)
            }
            _ => self.fail(format!("expected an outcome label, found {}", self.describe())),
        }
    }

    fn int(&mut self) -> LangResult<usize> {
        match self.peek().clone() {
            Tok::Int(w) => {
                let span = self.span();
                self.bump();
                w.parse().map_err(|_| LangError::Syntax { span, message: format!("integer `{w}` too large") })
            }
            _ => self.fail(format!("expected an integer, found {}", self.describe())),
        }
    }

    fn rational(&mut self) -> LangResult<Q> {
        let span = self.span();
        let neg = self.eat("-");
        let Tok::Int(n) = self.peek().clone() else {
            return self.fail(format!("expected a number, found {}", self.describe()));
        };
        self.bump();
        let mut text = if neg { format!("-{n}") } else { n };
        if self.eat("/") {
            let Tok::Int(d) = self.peek().clone() else {
                return self.fail(format!("expected a denominator, found {}", self.describe()));
            };
            self.bump();
            text = format!("{text}/{d}");
        }
        parse_q(&text).ok_or(LangError::Syntax { span, message: format!("invalid number `{text}`") })
    }

    fn list<T>(
        &mut self,
        open: &'static str,
        close: &'static str,
        mut item: impl FnMut(&mut Self) -> LangResult<T>,
    ) -> LangResult<Vec<T>> {
        self.open_group(open)?;
        let mut out = Vec::new();
        if self.eat(close) {
            self.open.pop();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(",") {
                if self.eat(close) {
                    break;
                }
                continue;
            }
            self.close_group(close)?;
            return Ok(out);
        }
        self.open.pop();
        Ok(out)
    }

    fn vector(&mut self) -> LangResult<Vec<Q>> {
        self.list("[", "]", Self::rational)
    }

    fn source(&mut self) -> LangResult<CircuitSource> {
        let mut src = CircuitSource::default();
        loop {
            let span = self.span();
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Word(w) if w == "system" => {
                    self.bump();
                    let (name, _) = self.ident()?;
                    self.expect("=")?;
                    let factors = self.list("[", "]", Self::int)?;
                    src.systems.push(SystemDecl { name, factors, span });
                }
                Tok::Word(w) if (w == "ptest" || w == "otest") && self.is_declaration() => {
                    self.bump();
                    let kind = if w == "ptest" { DeclKind::Prep } else { DeclKind::Obs };
                    let (name, _) = self.ident()?;
                    self.expect(":")?;
                    let (input, _) = self.ident()?;
                    let events = self.list("{", "}", |p| {
                        let label = p.label()?;
                        p.expect("=")?;
                        Ok((label, vec![p.vector()?]))
                    })?;
                    src.tests.push(TestDecl { kind, name, input, output: None, events, span });
                }
                Tok::Word(w) if w == "test" && self.is_declaration() => {
                    self.bump();
                    let (name, _) = self.ident()?;
                    self.expect(":")?;
                    let (input, _) = self.ident()?;
                    self.expect("->")?;
                    let (output, _) = self.ident()?;
                    let events = self.list("{", "}", |p| {
                        let label = p.label()?;
                        p.expect("=")?;
                        Ok((label, p.list("[", "]", Self::vector)?))
                    })?;
                    src.tests.push(TestDecl { kind: DeclKind::Transform, name, input, output: Some(output), events, span });
                }
                _ => {
                    if let Tok::Word(w) = self.peek() {
                        if w == "circuit" {
                            self.bump();
                        }
                    }
                    if src.circuit.is_some() {
                        return self.fail("only one circuit expression is allowed");
                    }
                    src.circuit = Some(self.expr()?);
                }
            }
        }
        Ok(src)
    }

    /// `test(` starts an expression leaf; `test NAME` starts a declaration.
    fn is_declaration(&self) -> bool {
        matches!(self.toks.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Word(_)))
    }

    fn expr(&mut self) -> LangResult<Expr> {
        let mut left = self.par()?;
        while *self.peek() == Tok::Sym(";") {
            let span = self.bump().span;
            let right = self.par()?;
            left = Expr { kind: ExprKind::Seq(Box::new(left), Box::new(right)), span };
        }
        Ok(left)
    }

    fn par(&mut self) -> LangResult<Expr> {
        let mut left = self.atom()?;
        while *self.peek() == Tok::Sym("|") {
            let span = self.bump().span;
            let right = self.atom()?;
            left = Expr { kind: ExprKind::Par(Box::new(left), Box::new(right)), span };
        }
        Ok(left)
    }

    fn atom(&mut self) -> LangResult<Expr> {
        let span = self.span();
        if *self.peek() == Tok::Sym("(") {
            self.open_group("(")?;
            let e = self.expr()?;
            self.close_group(")")?;
            return Ok(e);
        }
        let Tok::Word(head) = self.peek().clone() else {
            return self.fail(format!("expected a circuit expression, found {}", self.describe()));
        };
        let unary = |p: &mut Parser, make: fn(String) -> ExprKind| -> LangResult<Expr> {
            p.bump();
            p.open_group("(")?;
            let (name, _) = p.ident()?;
            p.close_group(")")?;
            Ok(Expr { kind: make(name), span })
        };
        match head.as_str() {
            "id" => unary(self, ExprKind::Id),
            "prep" => unary(self, ExprKind::Prep),
            "obs" => unary(self, ExprKind::Obs),
            "test" => unary(self, ExprKind::Test),
            "swap" => {
                self.bump();
                self.open_group("(")?;
                let (a, _) = self.ident()?;
                self.expect(",")?;
                let (b, _) = self.ident()?;
                self.close_group(")")?;
                Ok(Expr { kind: ExprKind::Swap(a, b), span })
            }
            "perm" => {
                self.bump();
                self.open_group("(")?;
                let (a, _) = self.ident()?;
                self.expect(",")?;
                let mut cycles = Vec::new();
                loop {
                    self.open_group("(")?;
                    let mut cycle = Vec::new();
                    while !self.eat(")") {
                        cycle.push(self.int()?);
                        self.eat(",");
                    }
                    self.open.pop();
                    if !cycle.is_empty() {
                        cycles.push(cycle);
                    }
                    if *self.peek() != Tok::Sym("(") {
                        break;
                    }
                }
                self.close_group(")")?;
                Ok(Expr { kind: ExprKind::Perm(a, cycles), span })
            }
            _ => self.fail(format!("unknown circuit element `{head}`")),
        }
    }
}

pub fn parse(text: &str) -> LangResult<CircuitSource> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, open: Vec::new() };
    p.source()
}

// ---------------------------------------------------------------- resolution

impl CircuitSource {
    pub fn system(&self, name: &str) -> Option<SystemType> {
        self.systems.iter().find(|s| s.name == name).and_then(|s| SystemType::try_new(s.factors.clone()))
    }

    fn system_at(&self, name: &str, span: Span) -> LangResult<SystemType> {
        let decl = self
            .systems
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| LangError::Unknown { span, kind: "system", name: name.into() })?;
        SystemType::try_new(decl.factors.clone())
            .ok_or_else(|| LangError::Declaration { span: decl.span, message: format!("system `{name}` has a zero dimension") })
    }

    pub fn test_decl(&self, name: &str) -> Option<&TestDecl> {
        self.tests.iter().find(|t| t.name == name)
    }

    /// Builds and validates the declared test `name`.
    pub fn test(&self, name: &str) -> LangResult<Test> {
        self.test_at(name, Span::default(), None)
    }

    fn test_at(&self, name: &str, span: Span, want: Option<DeclKind>) -> LangResult<Test> {
        let decl = self.test_decl(name).ok_or_else(|| LangError::Unknown { span, kind: "test", name: name.into() })?;
        if let Some(kind) = want {
            if decl.kind != kind {
                let what = match kind {
                    DeclKind::Prep => "a ptest",
                    DeclKind::Obs => "an otest",
                    DeclKind::Transform => "a test",
                };
                return Err(LangError::Declaration { span, message: format!("`{name}` is not {what}") });
            }
        }
        let sys = self.system_at(&decl.input, decl.span)?;
        let bad = |message: String| LangError::Declaration { span: decl.span, message };
        let (input, output, events) = match decl.kind {
            DeclKind::Prep => {
                let events = decl.events.iter().map(|(l, v)| (Outcome::atom(l.clone()), Matrix::column(v[0].clone()))).collect();
                (SystemType::trivial(), sys, events)
            }
            DeclKind::Obs => {
                let events = decl.events.iter().map(|(l, v)| (Outcome::atom(l.clone()), Matrix::row(v[0].clone()))).collect();
                (sys, SystemType::trivial(), events)
            }
            DeclKind::Transform => {
                let out_name = decl.output.as_deref().unwrap_or_default();
                let out = self.system_at(out_name, decl.span)?;
                let mut events = Vec::new();
                for (l, rows) in &decl.events {
                    if rows.iter().any(|r| r.len() != rows[0].len()) {
                        return Err(bad(format!("test `{name}`, outcome {l}: ragged rows")));
                    }
                    events.push((Outcome::atom(l.clone()), Matrix::from_rows(rows.clone())));
                }
                (sys, out, events)
            }
        };
        let t = Test::new(input, output, events).map_err(|e| bad(format!("test `{name}`: {e}")))?;
        let report = validate(&t);
        if !report.is_valid() {
            return Err(bad(format!("test `{name}`: {report}")));
        }
        Ok(t)
    }

    /// All declared tests of the given kind, in declaration order.
    pub fn tests_of(&self, kind: DeclKind) -> LangResult<Vec<(String, Test)>> {
        self.tests
            .iter()
            .filter(|t| t.kind == kind)
            .map(|t| Ok((t.name.clone(), self.test_at(&t.name, t.span, Some(kind))?)))
            .collect()
    }

    /// Resolves names and typechecks the circuit expression.
    pub fn to_circuit(&self) -> LangResult<CircuitNode> {
        let e = self.circuit.as_ref().ok_or(LangError::NoCircuit)?;
        self.resolve(e)
    }

    pub fn resolve(&self, e: &Expr) -> LangResult<CircuitNode> {
        let span = e.span;
        Ok(match &e.kind {
            ExprKind::Id(s) => CircuitNode::Identity(self.system_at(s, span)?),
            ExprKind::Swap(a, b) => {
                let a = self.system_at(a, span)?;
                let b = self.system_at(b, span)?;
                CircuitNode::Permutation(PermutationSpec::block_swap(&a, &b))
            }
            ExprKind::Perm(s, cycles) => {
                let sys = self.system_at(s, span)?;
                let text = format_cycles(cycles);
                let p = PermutationSpec::from_cycles(sys, &text)
                    .map_err(|err| LangError::Declaration { span, message: err.to_string() })?;
                CircuitNode::Permutation(p)
            }
            ExprKind::Prep(n) => CircuitNode::Prep(self.test_at(n, span, Some(DeclKind::Prep))?),
            ExprKind::Obs(n) => CircuitNode::Obs(self.test_at(n, span, Some(DeclKind::Obs))?),
            ExprKind::Test(n) => CircuitNode::Instrument(self.test_at(n, span, None)?),
            ExprKind::Seq(a, b) => {
                let node = CircuitNode::seq(self.resolve(a)?, self.resolve(b)?);
                typecheck(&node).map_err(|err| LangError::Type {
                    span,
                    message: format!("output {} does not match input {}", err.output, err.input),
                })?;
                node
            }
            ExprKind::Par(a, b) => CircuitNode::par(self.resolve(a)?, self.resolve(b)?),
        })
    }
}

fn format_cycles(cycles: &[Vec<usize>]) -> String {
    if cycles.is_empty() {
        return "()".into();
    }
    cycles
        .iter()
        .map(|c| format!("({})", c.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")))
        .collect()
}

// ---------------------------------------------------------------- printing

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Id(s) => write!(f, "id({s})"),
            ExprKind::Swap(a, b) => write!(f, "swap({a}, {b})"),
            ExprKind::Perm(s, c) => write!(f, "perm({s}, {})", format_cycles(c)),
            ExprKind::Prep(n) => write!(f, "prep({n})"),
            ExprKind::Obs(n) => write!(f, "obs({n})"),
            ExprKind::Test(n) => write!(f, "test({n})"),
            ExprKind::Seq(a, b) => {
                write!(f, "{a} ; ")?;
                if matches!(b.kind, ExprKind::Seq(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            ExprKind::Par(a, b) => {
                if matches!(a.kind, ExprKind::Seq(..)) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " | ")?;
                if matches!(b.kind, ExprKind::Seq(..) | ExprKind::Par(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

fn format_vector(v: &[Q]) -> String {
    format!("[{}]", v.iter().map(format_q).collect::<Vec<_>>().join(", "))
}

impl fmt::Display for CircuitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.systems {
            let dims: Vec<String> = s.factors.iter().map(ToString::to_string).collect();
            writeln!(f, "system {} = [{}]", s.name, dims.join(","))?;
        }
        for t in &self.tests {
            match t.kind {
                DeclKind::Prep | DeclKind::Obs => {
                    let kw = if t.kind == DeclKind::Prep { "ptest" } else { "otest" };
                    let body: Vec<String> = t.events.iter().map(|(l, v)| format!("{l} = {}", format_vector(&v[0]))).collect();
                    writeln!(f, "{kw} {} : {} {{ {} }}", t.name, t.input, body.join(", "))?;
                }
                DeclKind::Transform => {
                    let body: Vec<String> = t
                        .events
                        .iter()
                        .map(|(l, rows)| {
                            let rows: Vec<String> = rows.iter().map(|r| format_vector(r)).collect();
                            format!("{l} = [{}]", rows.join(", "))
                        })
                        .collect();
                    let out = t.output.as_deref().unwrap_or_default();
                    writeln!(f, "test {} : {} -> {} {{ {} }}", t.name, t.input, out, body.join(", "))?;
                }
            }
        }
        if let Some(c) = &self.circuit {
            writeln!(f, "circuit {c}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- emission

/// Turns resolved circuits back into source, inventing names as it goes.
#[derive(Default)]
pub struct Emitter {
    src: CircuitSource,
    system_names: HashMap<SystemType, String>,
    counters: [usize; 3],
}

impl Emitter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn system(&mut self, s: &SystemType) -> String {
        if let Some(n) = self.system_names.get(s) {
            return n.clone();
        }
        let named = self.system_names.keys().filter(|k| !k.is_trivial()).count();
        let name = if s.is_trivial() { "I".to_string() } else { format!("S{named}") };
        self.system_names.insert(s.clone(), name.clone());
        self.src.systems.push(SystemDecl { name: name.clone(), factors: s.factors().to_vec(), span: Span::default() });
        name
    }

    /// Declares a test, turning composite outcome labels into single atoms.
    pub fn test(&mut self, kind: DeclKind, t: &Test) -> String {
        let (prefix, k) = match kind {
            DeclKind::Prep => ("p", 0),
            DeclKind::Obs => ("o", 1),
            DeclKind::Transform => ("t", 2),
        };
        let name = format!("{prefix}{}", self.counters[k]);
        self.counters[k] += 1;
        let input = if kind == DeclKind::Prep { self.system(t.output()) } else { self.system(t.input()) };
        let output = (kind == DeclKind::Transform).then(|| self.system(t.output()));
        let mut used = std::collections::HashSet::new();
        let mut events = Vec::new();
        for (i, (o, m)) in t.events().iter().enumerate() {
            let mut label = atomic_label(o);
            if !used.insert(label.clone()) {
                label = format!("{label}_{i}");
                used.insert(label.clone());
            }
            let rows = match kind {
                DeclKind::Prep | DeclKind::Obs => vec![m.data().to_vec()],
                DeclKind::Transform => (0..m.rows()).map(|r| m.row_slice(r).to_vec()).collect(),
            };
            events.push((label, rows));
        }
        self.src.tests.push(TestDecl { kind, name: name.clone(), input, output, events, span: Span::default() });
        name
    }

    pub fn expr(&mut self, node: &CircuitNode) -> Expr {
        let kind = match node {
            CircuitNode::Identity(s) => ExprKind::Id(self.system(s)),
            CircuitNode::Permutation(p) => {
                let s = self.system(p.input());
                ExprKind::Perm(s, p.cycles())
            }
            CircuitNode::Prep(t) => ExprKind::Prep(self.test(DeclKind::Prep, t)),
            CircuitNode::Obs(t) => ExprKind::Obs(self.test(DeclKind::Obs, t)),
            CircuitNode::Instrument(t) => ExprKind::Test(self.test(DeclKind::Transform, t)),
            CircuitNode::Seq(a, b) => ExprKind::Seq(Box::new(self.expr(a)), Box::new(self.expr(b))),
            CircuitNode::Par(a, b) => ExprKind::Par(Box::new(self.expr(a)), Box::new(self.expr(b))),
        };
        Expr { kind, span: Span::default() }
    }

    pub fn finish(mut self, circuit: Option<Expr>) -> CircuitSource {
        self.src.circuit = circuit;
        self.src
    }
}

fn atomic_label(o: &Outcome) -> String {
    if o.arity() == 0 {
        return "e".into();
    }
    o.components()
        .iter()
        .map(|c| c.chars().map(|ch| if ch.is_ascii_alphanumeric() { ch } else { '_' }).collect::<String>())
        .collect::<Vec<_>>()
        .join("_")
}

impl CircuitSource {
    pub fn from_circuit(node: &CircuitNode) -> CircuitSource {
        let mut em = Emitter::new();
        let e = em.expr(node);
        em.finish(Some(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::evaluate;
    use crate::rational::{q, qi};

    const MP: &str = "system A = [2]\n\
        otest m : A { 0 = [1,0], 1 = [0,1] }\n\
        ptest r : A { r = [1/3, 2/3] }   # a comment\n\
        circuit obs(m) ; prep(r)\n";

    #[test]
    fn identity_leaf() {
        let src = parse("system A2 = [2]\nid(A2)").unwrap();
        assert_eq!(src.to_circuit().unwrap(), CircuitNode::Identity(SystemType::single(2)));
    }

    #[test]
    fn measure_and_prepare() {
        let src = parse(MP).unwrap();
        let c = src.to_circuit().unwrap();
        assert!(matches!(&c, CircuitNode::Seq(a, b) if matches!(**a, CircuitNode::Obs(_)) && matches!(**b, CircuitNode::Prep(_))));
        let t = evaluate(&c).unwrap();
        assert_eq!(t.matrix(0).get(1, 0), &q(2, 3));
        assert_eq!(t.matrix(1).get(0, 1), &q(1, 3));
    }

    #[test]
    fn unterminated_call_points_at_paren() {
        let err = parse("prep(").unwrap_err();
        assert_eq!(err.span().map(|s| (s.line, s.col)), Some((1, 5)));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("system A = [2]\nid(B)").unwrap().to_circuit().unwrap_err();
        assert!(matches!(err, LangError::Unknown { span: Span { line: 2, col: 1 }, .. }), "{err}");
        let err = parse("system A = [2]\nsystem B = [3]\nid(A) ; id(B)").unwrap().to_circuit().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[2]") && msg.contains("[3]") && msg.starts_with("3:7"), "{msg}");
        assert!(matches!(parse("system A = [2] ?"), Err(LangError::Syntax { span: Span { line: 1, col: 16 }, .. })));
    }

    #[test]
    fn invalid_tests_are_rejected() {
        let src = parse("system A = [2]\notest m : A { 0 = [1,0] }\nobs(m)").unwrap();
        assert!(matches!(src.to_circuit(), Err(LangError::Declaration { .. })));
    }

    #[test]
    fn precedence() {
        let src = parse("system A = [2]\nid(A) | id(A) ; id(A) | id(A)").unwrap();
        let Some(Expr { kind: ExprKind::Seq(l, r), .. }) = &src.circuit else { panic!() };
        assert!(matches!(l.kind, ExprKind::Par(..)) && matches!(r.kind, ExprKind::Par(..)));
    }

    #[test]
    fn print_parse_round_trip() {
        let text = "system A = [2]\nsystem B = [3,3]\n\
            test t : A -> A { x = [[1/2, 0], [1/2, 1]] }\n\
            circuit (id(A) ; test(t)) | perm(B, (0 1)) ; swap(A, B) ; (id(B) | id(A) ; id(B) | id(A))";
        let src = parse(text).unwrap();
        let printed = src.to_string();
        assert_eq!(parse(&printed).unwrap(), src, "{printed}");
        src.to_circuit().unwrap();
    }

    #[test]
    fn emitted_source_evaluates_identically() {
        let c = parse(MP).unwrap().to_circuit().unwrap();
        let src = CircuitSource::from_circuit(&c);
        let back = parse(&src.to_string()).unwrap().to_circuit().unwrap();
        assert!(evaluate(&back).unwrap().same_events(&evaluate(&c).unwrap()));
        assert_eq!(back, c);
        let _ = qi(0);
    }
}
