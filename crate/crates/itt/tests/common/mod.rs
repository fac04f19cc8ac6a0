#![allow(dead_code)]

pub mod judgments;
pub mod oracle;

use itt::check::{Checker, Ctx};
use itt::driver::{check_paths, Options, Session};
use itt::eval::DEFAULT_FUEL;
use itt::parser::parse_term;
use itt::stdlib;
use itt::syntax::Tm;

/// The whole stdlib, checked; panics if anything in it fails.
pub fn stdlib_session() -> Session {
    let (s, report) = check_paths(&[stdlib::manifest()], Options::default()).expect("stdlib readable");
    for f in &report.files {
        assert!(f.is_clean(), "{}", f.summary());
    }
    s
}

/// Session with `src` checked on top of an empty environment.
pub fn session_with(src: &str) -> Session {
    let mut s = Session::new(Options::default());
    let r = s.check_source("<test>", src);
    assert!(r.is_clean(), "test prelude failed: {:?}", r.decls.iter().find_map(|d| d.diagnostic.clone()));
    s
}

pub fn term(src: &str) -> Tm {
    parse_term(src).unwrap_or_else(|d| panic!("parse {src:?}: {d}"))
}

pub fn checker(s: &Session) -> Checker<'_> {
    Checker::new(&s.globals, DEFAULT_FUEL, true)
}

/// Does `src` infer a type in the empty local context?
pub fn infers(s: &Session, src: &str) -> bool {
    checker(s).infer(&Ctx::empty(), &term(src)).is_ok()
}

/// Does `src` check against the type `ty`?
pub fn checks(s: &Session, src: &str, ty: &str) -> bool {
    let c = checker(s);
    let ctx = Ctx::empty();
    let Ok(_) = c.infer_universe(&ctx, &term(ty)) else { return false };
    let vty = c.eval(&ctx, &term(ty)).unwrap();
    c.check(&ctx, &term(src), &vty).is_ok()
}

/// Normal form of a closed well-typed term, printed.
pub fn nf(s: &Session, src: &str) -> Tm {
    let c = checker(s);
    c.infer(&Ctx::empty(), &term(src)).unwrap_or_else(|e| panic!("{src}: {e}"));
    c.m.normalize(0, &term(src)).unwrap()
}

/// Kernel term to oracle term: types become `*`, everything else keeps
/// its shape.
pub fn erase(t: &itt::syntax::Term) -> oracle::U {
    use itt::syntax::Term::*;
    use oracle::U;
    let b = |x: &Tm| Box::new(erase(x));
    match t {
        Var(i) => U::Var(*i),
        Universe(_) | Pi(..) | Sigma(..) | Eq(..) => U::Const("*".into()),
        Lam(_, _, body) => U::Lam(b(body)),
        App(f, a) => U::App(b(f), b(a)),
        Pair(x, y) => U::Pair(b(x), b(y)),
        Fst(x) => U::Fst(b(x)),
        Snd(x) => U::Snd(b(x)),
        Refl => U::Const("refl".into()),
        J(_) => U::Const("J".into()),
        Global(n) => U::Const(n.to_string()),
        Ann(x, _) => erase(x),
    }
}

// Axioms stand in for free variables: they are neutral heads.
pub const TOY: &str = "
axiom A : Type;
axiom B : Type;
axiom a : A;
axiom a2 : A;
axiom f : A -> A;
axiom p : Sig (_ : A), A;
axiom h : (x : A) -> Eq A x x;
def Nat* : Type := (X : Type) -> X -> (X -> X) -> X;
def zero* : Nat* := fun (X : Type) (z : X) (s : X -> X) => z;
def succ* (n : Nat*) : Nat* := fun (X : Type) (z : X) (s : X -> X) => s (n X z s);
def three* : Nat* := succ* (succ* (succ* zero*));
def recNat* (X : Type) (z : X) (s : X -> X) (n : Nat*) : X := n X z s;
def pairA : Sig (_ : A), A := (a, f a);
";
