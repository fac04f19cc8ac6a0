//! Lexer and recursive-descent parser for `.itt` files.
//!
//! Names are resolved while parsing: a bound identifier becomes a de Bruijn
//! index, anything else a `Global`. Sugar is expanded here and never reaches
//! the kernel.

use std::collections::HashSet;
use std::sync::Arc;

use crate::diag::{Diagnostic, Span};
use crate::syntax::*;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Num(u32),
    Def,
    Axiom,
    Fun,
    Sig,
    EqKw,
    Refl,
    J,
    Fst,
    Snd,
    Univ(Level),
    Pragma(PragmaKind),
    LParen,
    RParen,
    Colon,
    ColonEq,
    Semi,
    Comma,
    Arrow,
    FatArrow,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PragmaKind {
    Check,
    Infer,
    Eval,
    AssertDefeq,
    AssertType,
    AssertIllTyped,
}

impl PragmaKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PragmaKind::Check => "check",
            PragmaKind::Infer => "infer",
            PragmaKind::Eval => "eval",
            PragmaKind::AssertDefeq => "assert_defeq",
            PragmaKind::AssertType => "assert_type",
            PragmaKind::AssertIllTyped => "assert_illtyped",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const KEYWORDS: &[&str] =
    &["def", "axiom", "fun", "Sig", "Eq", "refl", "J", "fst", "snd", "Type", "Type0", "Type1", "Type2"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '*' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = Span { line, col, len: 1 };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let punct2 = match two.as_str() {
            "->" => Some(Tok::Arrow),
            "=>" => Some(Tok::FatArrow),
            ":=" => Some(Tok::ColonEq),
            _ => None,
        };
        if let Some(tok) = punct2 {
            out.push(Token { tok, span: Span { len: 2, ..start } });
            i += 2;
            col += 2;
            continue;
        }
        let punct1 = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = punct1 {
            out.push(Token { tok, span: start });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[s..i].iter().collect();
            let n = text
                .parse::<u32>()
                .map_err(|_| Diagnostic::error(start, format!("number too large: {text}")))?;
            out.push(Token { tok: Tok::Num(n), span: Span { len: i - s, ..start } });
            col += i - s;
            continue;
        }
        if ident_start(c) || c == '#' {
            let s = i;
            i += 1;
            while i < chars.len() && ident_char(chars[i]) {
                i += 1;
            }
            let text: String = chars[s..i].iter().collect();
            let span = Span { len: i - s, ..start };
            col += i - s;
            let tok = match text.as_str() {
                "def" => Tok::Def,
                "axiom" => Tok::Axiom,
                "fun" => Tok::Fun,
                "Sig" => Tok::Sig,
                "Eq" => Tok::EqKw,
                "refl" => Tok::Refl,
                "J" => Tok::J,
                "fst" => Tok::Fst,
                "snd" => Tok::Snd,
                "Type" => Tok::Univ(Level::Impredicative),
                "Type0" => Tok::Univ(Level::Predicative(0)),
                "Type1" => Tok::Univ(Level::Predicative(1)),
                "Type2" => Tok::Univ(Level::Predicative(2)),
                "#check" => Tok::Pragma(PragmaKind::Check),
                "#infer" => Tok::Pragma(PragmaKind::Infer),
                "#eval" => Tok::Pragma(PragmaKind::Eval),
                "#assert_defeq" => Tok::Pragma(PragmaKind::AssertDefeq),
                "#assert_type" => Tok::Pragma(PragmaKind::AssertType),
                "#assert_illtyped" => Tok::Pragma(PragmaKind::AssertIllTyped),
                _ if text.starts_with('#') => {
                    return Err(Diagnostic::error(span, format!("unknown pragma {text}")))
                }
                _ => Tok::Ident(text),
            };
            out.push(Token { tok, span });
            continue;
        }
        let what = if c.is_ascii() { "illegal character" } else { "non-ASCII character" };
        return Err(Diagnostic::error(start, format!("{what} {c:?}")));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub enum Pragma {
    Check(Tm),
    Infer(Tm),
    Eval(Tm),
    AssertDefeq(Tm, Tm),
    AssertType(Tm, Tm),
    AssertIllTyped(Tm),
}

impl Pragma {
    pub fn kind(&self) -> PragmaKind {
        match self {
            Pragma::Check(_) => PragmaKind::Check,
            Pragma::Infer(_) => PragmaKind::Infer,
            Pragma::Eval(_) => PragmaKind::Eval,
            Pragma::AssertDefeq(..) => PragmaKind::AssertDefeq,
            Pragma::AssertType(..) => PragmaKind::AssertType,
            Pragma::AssertIllTyped(_) => PragmaKind::AssertIllTyped,
        }
    }

    pub fn terms(&self) -> Vec<&Tm> {
        match self {
            Pragma::Check(t) | Pragma::Infer(t) | Pragma::Eval(t) | Pragma::AssertIllTyped(t) => vec![t],
            Pragma::AssertDefeq(a, b) | Pragma::AssertType(a, b) => vec![a, b],
        }
    }
}

#[derive(Clone, Debug)]
pub enum DeclKind {
    Def { name: Name, ty: Tm, body: Tm },
    Axiom { name: Name, ty: Tm },
    Pragma(Pragma),
}

#[derive(Clone, Debug)]
pub struct Decl {
    pub kind: DeclKind,
    /// Start of the declaration; `len` covers its first token.
    pub span: Span,
}

impl Decl {
    /// Definitions and axioms by name; pragmas as `#kind@line`.
    pub fn label(&self) -> String {
        match &self.kind {
            DeclKind::Def { name, .. } | DeclKind::Axiom { name, .. } => name.to_string(),
            DeclKind::Pragma(p) => format!("#{}@{}", p.kind().as_str(), self.span.line),
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match &self.kind {
            DeclKind::Def { .. } => "def",
            DeclKind::Axiom { .. } => "axiom",
            DeclKind::Pragma(p) => p.kind().as_str(),
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: Vec<Name>,
    eof: Span,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn new(toks: Vec<Token>, src: &str) -> Self {
        let line = src.lines().count().max(1);
        let col = src.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
        Parser { toks, pos: 0, scope: Vec::new(), eof: Span { line, col, len: 0 } }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map(|t| t.span).unwrap_or(self.eof)
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".to_string(),
            Some(t) => format!("{t:?}"),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> PResult<Span> {
        if self.peek() == Some(&want) {
            let s = self.span();
            self.pos += 1;
            Ok(s)
        } else {
            Err(Diagnostic::error(self.span(), format!("expected {what}, found {}", self.describe())))
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let n: Name = s.as_str().into();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(Diagnostic::error(self.span(), format!("expected identifier, found {}", self.describe()))),
        }
    }

    fn resolve(&self, name: &str) -> Tm {
        if name != "_" {
            if let Some(k) = self.scope.iter().rev().position(|n| &**n == name) {
                return var(k);
            }
        }
        global(name)
    }

    /// `( x y : A )`, pushing each name; returns (name, type) pairs.
    fn binder_group(&mut self) -> PResult<Vec<(Name, Tm)>> {
        self.expect(Tok::LParen, "'('")?;
        let mut names = vec![self.ident()?];
        while let Some(Tok::Ident(_)) = self.peek() {
            names.push(self.ident()?);
        }
        self.expect(Tok::Colon, "':'")?;
        let ty = self.term()?;
        self.expect(Tok::RParen, "')'")?;
        let mut out = Vec::new();
        for (k, n) in names.into_iter().enumerate() {
            // the type is re-scoped under the names bound so far in this group
            out.push((n.clone(), shift(&ty, k as isize, 0)));
            self.scope.push(n);
        }
        Ok(out)
    }

    fn binders(&mut self) -> PResult<Vec<(Name, Tm)>> {
        let mut all = self.binder_group()?;
        while self.peek() == Some(&Tok::LParen) {
            all.extend(self.binder_group()?);
        }
        Ok(all)
    }

    fn pop_scope(&mut self, n: usize) {
        self.scope.truncate(self.scope.len() - n);
    }

    fn term(&mut self) -> PResult<Tm> {
        match self.peek() {
            Some(Tok::Fun) => {
                self.pos += 1;
                let bs = self.binders()?;
                self.expect(Tok::FatArrow, "'=>'")?;
                let body = self.term()?;
                self.pop_scope(bs.len());
                Ok(bs.into_iter().rev().fold(body, |b, (x, a)| Arc::new(Term::Lam(x, a, b))))
            }
            Some(Tok::Sig) => {
                self.pos += 1;
                let bs = self.binder_group()?;
                self.expect(Tok::Comma, "','")?;
                let body = self.term()?;
                self.pop_scope(bs.len());
                Ok(bs.into_iter().rev().fold(body, |b, (x, a)| Arc::new(Term::Sigma(x, a, b))))
            }
            Some(Tok::LParen) => {
                if let Some(t) = self.try_pi()? {
                    return Ok(t);
                }
                self.arrow()
            }
            _ => self.arrow(),
        }
    }

    /// `(x : A) (y : B) -> C`; backtracks when the parenthesis turns out to
    /// be an ascription or an ordinary group.
    fn try_pi(&mut self) -> PResult<Option<Tm>> {
        let save = (self.pos, self.scope.len());
        let looks_like_binder = matches!(self.toks.get(self.pos + 1).map(|t| &t.tok), Some(Tok::Ident(_)));
        if !looks_like_binder {
            return Ok(None);
        }
        let attempt = (|| -> PResult<Option<Vec<(Name, Tm)>>> {
            let bs = self.binders()?;
            if self.peek() == Some(&Tok::Arrow) {
                Ok(Some(bs))
            } else {
                Ok(None)
            }
        })();
        match attempt {
            Ok(Some(bs)) => {
                self.pos += 1;
                let body = self.term()?;
                self.pop_scope(bs.len());
                Ok(Some(bs.into_iter().rev().fold(body, |b, (x, a)| Arc::new(Term::Pi(x, a, b)))))
            }
            _ => {
                self.pos = save.0;
                self.scope.truncate(save.1);
                Ok(None)
            }
        }
    }

    fn arrow(&mut self) -> PResult<Tm> {
        let lhs = self.app()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            self.scope.push("_".into());
            let rhs = self.term();
            self.pop_scope(1);
            return Ok(pi("_", lhs, rhs?));
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_) | Tok::Univ(_) | Tok::Refl | Tok::LParen))
    }

    fn app(&mut self) -> PResult<Tm> {
        let mut head = match self.peek() {
            Some(Tok::Fst) => {
                self.pos += 1;
                fst(self.atom()?)
            }
            Some(Tok::Snd) => {
                self.pos += 1;
                snd(self.atom()?)
            }
            Some(Tok::EqKw) => {
                self.pos += 1;
                let a = self.atom()?;
                let x = self.atom()?;
                let y = self.atom()?;
                eq(a, x, y)
            }
            Some(Tok::J) => {
                self.pos += 1;
                let mut xs = Vec::with_capacity(6);
                for _ in 0..6 {
                    xs.push(self.atom()?);
                }
                j(xs.try_into().unwrap())
            }
            _ => self.atom()?,
        };
        while self.starts_atom() {
            let a = self.atom()?;
            head = app(head, a);
        }
        Ok(head)
    }

    fn atom(&mut self) -> PResult<Tm> {
        let span = self.span();
        let mut t = match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                self.resolve(&s)
            }
            Some(Tok::Univ(l)) => {
                self.pos += 1;
                universe(l)
            }
            Some(Tok::Refl) => {
                self.pos += 1;
                refl()
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let first = self.term()?;
                match self.peek() {
                    Some(Tok::Colon) => {
                        self.pos += 1;
                        let ty = self.term()?;
                        self.expect(Tok::RParen, "')'")?;
                        ann(first, ty)
                    }
                    Some(Tok::Comma) => {
                        let mut items = vec![first];
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            items.push(self.term()?);
                        }
                        self.expect(Tok::RParen, "')'")?;
                        let mut acc = items.pop().unwrap();
                        while let Some(x) = items.pop() {
                            acc = pair(x, acc);
                        }
                        acc
                    }
                    _ => {
                        self.expect(Tok::RParen, "')'")?;
                        first
                    }
                }
            }
            _ => return Err(Diagnostic::error(span, format!("expected a term, found {}", self.describe()))),
        };
        // `p.1` is fst p; `p.n` for n >= 2 is n-1 second projections
        while self.peek() == Some(&Tok::Dot) {
            let dot = self.span();
            self.pos += 1;
            match self.peek() {
                Some(Tok::Num(n)) if *n >= 1 => {
                    let n = *n;
                    self.pos += 1;
                    if n == 1 {
                        t = fst(t);
                    } else {
                        for _ in 1..n {
                            t = snd(t);
                        }
                    }
                }
                _ => return Err(Diagnostic::error(dot, "expected a projection index (1, 2, ...) after '.'")),
            }
        }
        Ok(t)
    }

    fn decl(&mut self) -> PResult<Decl> {
        let span = self.span();
        let kind = match self.peek().cloned() {
            Some(Tok::Def) => {
                self.pos += 1;
                let name = self.ident()?;
                let bs = if self.peek() == Some(&Tok::LParen) { self.binders()? } else { Vec::new() };
                self.expect(Tok::Colon, "':'")?;
                let ty = self.term()?;
                self.expect(Tok::ColonEq, "':='")?;
                let body = self.term()?;
                self.pop_scope(bs.len());
                let ty = bs.iter().rev().fold(ty, |b, (x, a)| Arc::new(Term::Pi(x.clone(), a.clone(), b)));
                let body = bs.into_iter().rev().fold(body, |b, (x, a)| Arc::new(Term::Lam(x, a, b)));
                DeclKind::Def { name, ty, body }
            }
            Some(Tok::Axiom) => {
                self.pos += 1;
                let name = self.ident()?;
                self.expect(Tok::Colon, "':'")?;
                let ty = self.term()?;
                DeclKind::Axiom { name, ty }
            }
            Some(Tok::Pragma(k)) => {
                self.pos += 1;
                let first = self.term()?;
                let p = match k {
                    PragmaKind::Check => Pragma::Check(first),
                    PragmaKind::Infer => Pragma::Infer(first),
                    PragmaKind::Eval => Pragma::Eval(first),
                    PragmaKind::AssertIllTyped => Pragma::AssertIllTyped(first),
                    PragmaKind::AssertDefeq => {
                        self.expect(Tok::Comma, "','")?;
                        Pragma::AssertDefeq(first, self.term()?)
                    }
                    PragmaKind::AssertType => {
                        self.expect(Tok::Colon, "':'")?;
                        Pragma::AssertType(first, self.term()?)
                    }
                };
                DeclKind::Pragma(p)
            }
            _ => {
                return Err(Diagnostic::error(
                    span,
                    format!("expected 'def', 'axiom' or a pragma, found {}", self.describe()),
                ))
            }
        };
        self.expect(Tok::Semi, "';'")?;
        Ok(Decl { kind, span })
    }
}

pub fn parse_file(src: &str) -> Result<Vec<Decl>, Diagnostic> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(toks, src);
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    while p.pos < p.toks.len() {
        let name_span = p.toks.get(p.pos + 1).map(|t| t.span);
        let d = p.decl()?;
        if let DeclKind::Def { name, .. } | DeclKind::Axiom { name, .. } = &d.kind {
            if !seen.insert(name.clone()) {
                return Err(Diagnostic::error(name_span.unwrap_or(d.span), format!("duplicate definition of {name}")));
            }
        }
        out.push(d);
    }
    Ok(out)
}

/// A single term, as used by `eval` on the command line.
pub fn parse_term(src: &str) -> Result<Tm, Diagnostic> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(toks, src);
    let t = p.term()?;
    if p.pos < p.toks.len() {
        return Err(Diagnostic::error(p.span(), format!("unexpected {} after term", p.describe())));
    }
    Ok(t)
}
