//! Checking whole files: declarations in order against one growing global
//! environment, pragma execution, and per-declaration reports.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::check::{Checker, Ctx, TypeError};
use crate::diag::{Diagnostic, Span};
use crate::eval::{EvalError, Globals, DEFAULT_FUEL};
use crate::parser::{parse_file, parse_term, Decl, DeclKind, Pragma};
use crate::pretty::print;
use crate::syntax::{globals, Tm};

#[derive(Clone, Debug)]
pub struct Options {
    pub fuel: u64,
    pub eta: bool,
    /// Label of the one declaration whose conversions get traced.
    pub trace: Option<String>,
}

impl Default for Options {
    fn default() -> Self {
        Options { fuel: DEFAULT_FUEL, eta: true, trace: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// a pragma ran and its assertion was false
    Failed,
    /// parse or type error
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeclReport {
    pub file: String,
    pub name: String,
    pub kind: &'static str,
    pub status: Status,
    pub millis: u64,
    #[serde(skip)]
    pub output: Option<String>,
    #[serde(skip)]
    pub diagnostic: Option<Diagnostic>,
}

#[derive(Clone, Debug)]
pub struct FileReport {
    pub path: String,
    pub decls: Vec<DeclReport>,
    pub parse_error: Option<Diagnostic>,
    pub millis: u64,
}

impl FileReport {
    pub fn declarations(&self) -> usize {
        self.decls.iter().filter(|d| matches!(d.kind, "def" | "axiom")).count()
    }

    fn pragmas(&self, status: Status) -> usize {
        self.decls.iter().filter(|d| !matches!(d.kind, "def" | "axiom") && d.status == status).count()
    }

    pub fn pragmas_passed(&self) -> usize {
        self.pragmas(Status::Ok)
    }

    pub fn pragmas_failed(&self) -> usize {
        self.pragmas(Status::Failed) + self.pragmas(Status::Error)
    }

    pub fn errors(&self) -> usize {
        self.decls.iter().filter(|d| d.status == Status::Error).count() + self.parse_error.is_some() as usize
    }

    pub fn is_clean(&self) -> bool {
        self.parse_error.is_none() && self.decls.iter().all(|d| d.status == Status::Ok)
    }

    /// One line, no timings, so repeated runs print the same thing.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} declarations, {} pragmas passed, {} failed, {} errors",
            self.path,
            self.declarations(),
            self.pragmas_passed(),
            self.pragmas_failed(),
            self.errors()
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub files: Vec<FileReport>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.files.iter().all(FileReport::is_clean) {
            0
        } else {
            1
        }
    }
}

enum Outcome {
    Ok(Option<String>),
    Failed(String),
    Error(String),
}

impl From<TypeError> for Outcome {
    fn from(e: TypeError) -> Self {
        Outcome::Error(e.to_string())
    }
}

pub struct Session {
    pub globals: Globals,
    pub opts: Options,
}

impl Session {
    pub fn new(opts: Options) -> Self {
        Session { globals: Globals::new(), opts }
    }

    pub fn check_file(&mut self, path: &Path) -> io::Result<FileReport> {
        let src = fs::read_to_string(path)?;
        Ok(self.check_source(&path.display().to_string(), &src))
    }

    pub fn check_source(&mut self, file: &str, src: &str) -> FileReport {
        let start = Instant::now();
        let mut report = FileReport { path: file.to_string(), decls: Vec::new(), parse_error: None, millis: 0 };
        match parse_file(src) {
            Ok(decls) => {
                for d in &decls {
                    let r = self.check_decl(file, d);
                    report.decls.push(r);
                }
            }
            Err(e) => report.parse_error = Some(e),
        }
        report.millis = start.elapsed().as_millis() as u64;
        report
    }

    pub fn check_decl(&mut self, file: &str, d: &Decl) -> DeclReport {
        let start = Instant::now();
        let label = d.label();
        let trace = self.opts.trace.as_deref() == Some(label.as_str());
        let outcome = match &d.kind {
            DeclKind::Def { name, ty, body } => self.add_global(name, ty, Some(body), trace),
            DeclKind::Axiom { name, ty } => self.add_global(name, ty, None, trace),
            DeclKind::Pragma(p) => self.run_pragma(p, trace),
        };
        let (status, output, diagnostic) = match outcome {
            Outcome::Ok(out) => (Status::Ok, out, None),
            Outcome::Failed(msg) => (Status::Failed, None, Some(msg)),
            Outcome::Error(msg) => (Status::Error, None, Some(msg)),
        };
        DeclReport {
            file: file.to_string(),
            name: label.clone(),
            kind: d.kind_str(),
            status,
            millis: start.elapsed().as_millis() as u64,
            output,
            diagnostic: diagnostic.map(|m| Diagnostic::error(d.span, format!("{label}: {m}"))),
        }
    }

    fn checker(&self, trace: bool) -> Checker<'_> {
        let mut c = Checker::new(&self.globals, self.opts.fuel, self.opts.eta);
        c.trace = trace;
        c
    }

    fn add_global(&mut self, name: &crate::syntax::Name, ty: &Tm, body: Option<&Tm>, trace: bool) -> Outcome {
        if self.globals.contains(name) {
            return TypeError::Duplicate(name.clone()).into();
        }
        let entry = {
            let c = self.checker(trace);
            let ctx = Ctx::empty();
            let res = (|| -> Result<_, TypeError> {
                c.infer_universe(&ctx, ty)?;
                let vty = c.eval(&ctx, ty)?;
                let body = match body {
                    Some(b) => {
                        c.check(&ctx, b, &vty)?;
                        Some((b.clone(), c.eval(&ctx, b)?))
                    }
                    None => None,
                };
                Ok((vty, body))
            })();
            match res {
                Ok(e) => e,
                Err(e) => return e.into(),
            }
        };
        self.globals.insert(name.clone(), ty.clone(), entry.0, entry.1);
        Outcome::Ok(None)
    }

    fn run_pragma(&self, p: &Pragma, trace: bool) -> Outcome {
        let c = self.checker(trace);
        let ctx = Ctx::empty();
        let res = (|| -> Result<Outcome, TypeError> {
            Ok(match p {
                Pragma::Check(t) => {
                    c.infer(&ctx, t)?;
                    Outcome::Ok(None)
                }
                Pragma::Infer(t) => {
                    let ty = c.infer(&ctx, t)?;
                    Outcome::Ok(Some(format!("{} : {}", print(t), c.show(&ctx, &ty))))
                }
                Pragma::Eval(t) => {
                    let ty = c.infer(&ctx, t)?;
                    let nf = c.m.normalize(0, t)?;
                    let ty_nf = c.m.quote(0, &ty, true)?;
                    Outcome::Ok(Some(format!("{} : {}", print(&nf), print(&ty_nf))))
                }
                Pragma::AssertDefeq(a, b) => {
                    let ta = c.infer(&ctx, a)?;
                    let tb = c.infer(&ctx, b)?;
                    if !(c.m.subtype(0, &ta, &tb)? || c.m.subtype(0, &tb, &ta)?) {
                        return Ok(Outcome::Failed(format!(
                            "sides have different types\n  left:  {}\n  right: {}",
                            c.show(&ctx, &ta),
                            c.show(&ctx, &tb)
                        )));
                    }
                    let va = c.eval(&ctx, a)?;
                    let vb = c.eval(&ctx, b)?;
                    if c.m.conv(0, &va, &vb)? {
                        Outcome::Ok(None)
                    } else {
                        Outcome::Failed(format!(
                            "not definitionally equal\n  left:  {}\n  right: {}",
                            c.show_nf(&ctx, &va),
                            c.show_nf(&ctx, &vb)
                        ))
                    }
                }
                Pragma::AssertType(t, ty) => {
                    c.infer_universe(&ctx, ty)?;
                    let vty = c.eval(&ctx, ty)?;
                    c.check(&ctx, t, &vty)?;
                    Outcome::Ok(None)
                }
                Pragma::AssertIllTyped(t) => match c.infer(&ctx, t) {
                    Ok(ty) => Outcome::Failed(format!("term is well typed, of type {}", c.show(&ctx, &ty))),
                    // running out of fuel says nothing about typability
                    Err(TypeError::Eval(e @ EvalError::OutOfFuel(_))) => Outcome::Error(e.to_string()),
                    Err(_) => Outcome::Ok(None),
                },
            })
        })();
        res.unwrap_or_else(Outcome::from)
    }

    /// Parse `src` in the current environment, infer its type, and return
    /// the normal forms of the term and of the type.
    pub fn eval_expr(&self, src: &str) -> Result<(String, String), String> {
        let t = parse_term(src).map_err(|d| d.to_string())?;
        let c = self.checker(false);
        let ctx = Ctx::empty();
        let ty = c.infer(&ctx, &t).map_err(|e| e.to_string())?;
        let nf = c.m.normalize(0, &t).map_err(|e| e.to_string())?;
        let ty_nf = c.m.quote(0, &ty, true).map_err(|e| e.to_string())?;
        Ok((print(&nf), print(&ty_nf)))
    }
}

/// Axioms referenced directly (no unfolding) by either side of an
/// `#assert_defeq`. Used to keep axiom-dependent equations out of the
/// definitional suite.
pub fn defeq_axiom_refs(decls: &[Decl], env: &Globals) -> Vec<(Span, String)> {
    let mut out = Vec::new();
    for d in decls {
        if let DeclKind::Pragma(Pragma::AssertDefeq(a, b)) = &d.kind {
            for t in [a, b] {
                for g in globals(t) {
                    if env.is_axiom(&g) {
                        out.push((d.span, g.to_string()));
                    }
                }
            }
        }
    }
    out
}

/// Files named on the command line; a `.txt` argument is a manifest
/// listing one path per line relative to itself (`--` comments allowed).
pub fn expand_inputs(paths: &[PathBuf]) -> io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.extension().is_some_and(|e| e == "txt") {
            out.extend(read_manifest(p)?);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

pub fn read_manifest(path: &Path) -> io::Result<Vec<PathBuf>> {
    let text = fs::read_to_string(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(|l| l.split("--").next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| dir.join(l))
        .collect())
}

/// Check `paths` (files or manifests) in order in one session.
pub fn check_paths(paths: &[PathBuf], opts: Options) -> io::Result<(Session, RunReport)> {
    let files = expand_inputs(paths)?;
    for f in &files {
        if !f.is_file() {
            return Err(io::Error::new(io::ErrorKind::NotFound, format!("{}: no such file", f.display())));
        }
    }
    let mut session = Session::new(opts);
    let mut report = RunReport::default();
    for f in &files {
        report.files.push(session.check_file(f)?);
    }
    Ok((session, report))
}
