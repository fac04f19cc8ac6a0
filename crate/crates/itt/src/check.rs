//! Bidirectional type checking.
//!
//! `infer` synthesizes, `check` pushes a type inward for lambdas, pairs and
//! refl, and otherwise falls back to infer plus cumulative subtyping.

use std::sync::Arc;

use thiserror::Error;

use crate::eval::{Closure, Env, EvalError, Globals, Machine, Value};
use crate::pretty::print_in;
use crate::syntax::*;

#[derive(Debug, Clone, Error)]
pub enum TypeError {
    #[error("unbound variable #{0}")]
    Unbound(usize),
    #[error("unknown global {0}")]
    UnknownGlobal(Name),
    #[error("expected a function, found a term of type {0}")]
    NotAFunction(String),
    #[error("expected a pair, found a term of type {0}")]
    NotASigma(String),
    #[error("expected a type, found a term of type {0}")]
    NotAType(String),
    #[error("cannot infer a type for {0}; add an annotation")]
    NeedsAnnotation(&'static str),
    #[error("type mismatch\n  expected: {expected}\n  found:    {found}")]
    Mismatch { expected: String, found: String },
    #[error("refl does not prove this equation: {lhs} and {rhs} are not convertible")]
    ReflMismatch { lhs: String, rhs: String },
    #[error("{what} checked against non-{want} type {ty}")]
    WrongIntro { what: &'static str, want: &'static str, ty: String },
    #[error("lambda annotation {ann} does not match domain {dom}")]
    DomainMismatch { ann: String, dom: String },
    #[error("bad J motive: {0}")]
    BadMotive(String),
    #[error("duplicate definition of {0}")]
    Duplicate(Name),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type TcResult<T> = Result<T, TypeError>;

/// Local context: names for printing, types, and the evaluation environment.
#[derive(Clone)]
pub struct Ctx {
    pub names: Vec<Name>,
    pub types: Vec<Value>,
    pub env: Env,
}

impl Ctx {
    pub fn empty() -> Self {
        Ctx { names: Vec::new(), types: Vec::new(), env: Env::Nil }
    }

    pub fn lvl(&self) -> usize {
        self.names.len()
    }

    pub fn bind(&self, name: &Name, ty: Value) -> Ctx {
        let mut c = self.clone();
        c.env = c.env.push(Value::var(c.lvl()));
        c.names.push(name.clone());
        c.types.push(ty);
        c
    }
}

pub struct Checker<'g> {
    pub m: Machine<'g>,
    pub trace: bool,
}

impl<'g> Checker<'g> {
    pub fn new(globals: &'g Globals, fuel: u64, eta: bool) -> Self {
        Checker { m: Machine::new(globals, fuel, eta), trace: false }
    }

    pub fn show(&self, ctx: &Ctx, v: &Value) -> String {
        match self.m.quote(ctx.lvl(), v, false) {
            Ok(t) => print_in(&t, &ctx.names),
            Err(e) => format!("<{e}>"),
        }
    }

    pub fn eval(&self, ctx: &Ctx, t: &Tm) -> TcResult<Value> {
        Ok(self.m.eval(&ctx.env, t)?)
    }

    fn conv(&self, ctx: &Ctx, a: &Value, b: &Value) -> TcResult<bool> {
        let r = self.m.conv(ctx.lvl(), a, b)?;
        if self.trace {
            eprintln!("[trace] conv {} == {} : {}", self.show(ctx, a), self.show(ctx, b), r);
        }
        Ok(r)
    }

    fn subtype(&self, ctx: &Ctx, a: &Value, b: &Value) -> TcResult<bool> {
        let r = self.m.subtype(ctx.lvl(), a, b)?;
        if self.trace {
            eprintln!("[trace] subtype {} <= {} : {}", self.show(ctx, a), self.show(ctx, b), r);
        }
        Ok(r)
    }

    /// `t` must be a type; returns its universe level.
    pub fn infer_universe(&self, ctx: &Ctx, t: &Tm) -> TcResult<Level> {
        let ty = self.infer(ctx, t)?;
        match self.m.whnf(ty.clone())? {
            Value::Univ(l) => Ok(l),
            _ => Err(TypeError::NotAType(self.show(ctx, &ty))),
        }
    }

    pub fn infer(&self, ctx: &Ctx, t: &Tm) -> TcResult<Value> {
        use Term::*;
        match &**t {
            Var(i) => {
                if *i >= ctx.lvl() {
                    return Err(TypeError::Unbound(*i));
                }
                Ok(ctx.types[ctx.lvl() - 1 - i].clone())
            }
            Universe(l) => Ok(Value::Univ(l.succ())),
            Pi(x, a, b) => {
                let l1 = self.infer_universe(ctx, a)?;
                let va = self.eval(ctx, a)?;
                let l2 = self.infer_universe(&ctx.bind(x, va), b)?;
                // impredicative: a Pi into Type is in Type whatever the domain
                Ok(Value::Univ(if l2 == Level::Impredicative { l2 } else { max_level(l1, l2) }))
            }
            Sigma(x, a, b) => {
                let l1 = self.infer_universe(ctx, a)?;
                let va = self.eval(ctx, a)?;
                let l2 = self.infer_universe(&ctx.bind(x, va), b)?;
                Ok(Value::Univ(max_level(l1, l2)))
            }
            Lam(x, a, b) => {
                self.infer_universe(ctx, a)?;
                let va = self.eval(ctx, a)?;
                let inner = ctx.bind(x, va.clone());
                let bty = self.infer(&inner, b)?;
                let body = self.m.quote(inner.lvl(), &bty, false)?;
                Ok(Value::Pi(x.clone(), Arc::new(va), Closure { env: ctx.env.clone(), body }))
            }
            App(f, a) => {
                let fty = self.infer(ctx, f)?;
                match self.m.whnf(fty.clone())? {
                    Value::Pi(_, dom, cod) => {
                        self.check(ctx, a, &dom)?;
                        let va = self.eval(ctx, a)?;
                        Ok(self.m.inst(&cod, va)?)
                    }
                    _ => Err(TypeError::NotAFunction(self.show(ctx, &fty))),
                }
            }
            Fst(p) | Snd(p) => {
                let pty = self.infer(ctx, p)?;
                match self.m.whnf(pty.clone())? {
                    Value::Sigma(_, a, b) => {
                        if matches!(&**t, Fst(_)) {
                            Ok((*a).clone())
                        } else {
                            let vp = self.eval(ctx, p)?;
                            let v1 = self.m.fst(vp)?;
                            Ok(self.m.inst(&b, v1)?)
                        }
                    }
                    _ => Err(TypeError::NotASigma(self.show(ctx, &pty))),
                }
            }
            Eq(a, x, y) => {
                let l = self.infer_universe(ctx, a)?;
                let va = self.eval(ctx, a)?;
                self.check(ctx, x, &va)?;
                self.check(ctx, y, &va)?;
                Ok(Value::Univ(l))
            }
            J(xs) => self.infer_j(ctx, xs),
            Global(n) => match self.m.globals.get(n) {
                Some(e) => Ok(e.ty.clone()),
                None => Err(TypeError::UnknownGlobal(n.clone())),
            },
            Ann(e, ty) => {
                self.infer_universe(ctx, ty)?;
                let vty = self.eval(ctx, ty)?;
                self.check(ctx, e, &vty)?;
                Ok(vty)
            }
            Pair(..) => Err(TypeError::NeedsAnnotation("a pair")),
            Refl => Err(TypeError::NeedsAnnotation("refl")),
        }
    }

    fn infer_j(&self, ctx: &Ctx, xs: &[Tm; 6]) -> TcResult<Value> {
        let [a, c, base, lhs, rhs, p] = xs;
        self.infer_universe(ctx, a)?;
        let va = self.eval(ctx, a)?;
        // motive : (x y : A) -> Eq A x y -> U for some universe U
        let cty = self.infer(ctx, c)?;
        let lvl = ctx.lvl();
        let bad = |msg: &str| TypeError::BadMotive(format!("{msg}; motive has type {}", self.show(ctx, &cty)));
        let Value::Pi(_, d1, c1) = self.m.whnf(cty.clone())? else { return Err(bad("not a function")) };
        if !self.m.conv(lvl, &d1, &va)? {
            return Err(bad("first argument is not of the J type"));
        }
        let x = Value::var(lvl);
        let Value::Pi(_, d2, c2) = self.m.whnf(self.m.inst(&c1, x.clone())?)? else {
            return Err(bad("expected a second argument"));
        };
        if !self.m.conv(lvl + 1, &d2, &va)? {
            return Err(bad("second argument is not of the J type"));
        }
        let y = Value::var(lvl + 1);
        let Value::Pi(_, d3, c3) = self.m.whnf(self.m.inst(&c2, y.clone())?)? else {
            return Err(bad("expected a third argument"));
        };
        let eq_xy = Value::Eq(Arc::new(va.clone()), Arc::new(x), Arc::new(y));
        if !self.m.conv(lvl + 2, &d3, &eq_xy)? {
            return Err(bad("third argument is not the equation"));
        }
        let Value::Univ(_) = self.m.whnf(self.m.inst(&c3, Value::var(lvl + 2))?)? else {
            return Err(bad("does not return a type"));
        };
        // base : (z : A) -> C z z refl
        let c_up = shift(c, 1, 0);
        let base_ty = pi("z", a.clone(), apps(c_up, [var(0), var(0), refl()]));
        let vbase_ty = self.eval(ctx, &base_ty)?;
        self.check(ctx, base, &vbase_ty)?;
        self.check(ctx, lhs, &va)?;
        self.check(ctx, rhs, &va)?;
        let vl = self.eval(ctx, lhs)?;
        let vr = self.eval(ctx, rhs)?;
        let eq_ty = Value::Eq(Arc::new(va), Arc::new(vl.clone()), Arc::new(vr.clone()));
        self.check(ctx, p, &eq_ty)?;
        let vc = self.eval(ctx, c)?;
        let vp = self.eval(ctx, p)?;
        let r = self.m.apply(vc, vl)?;
        let r = self.m.apply(r, vr)?;
        Ok(self.m.apply(r, vp)?)
    }

    pub fn check(&self, ctx: &Ctx, t: &Tm, expected: &Value) -> TcResult<()> {
        use Term::*;
        match &**t {
            Lam(x, a, b) => {
                let ety = self.m.whnf(expected.clone())?;
                let Value::Pi(_, dom, cod) = &ety else {
                    return Err(TypeError::WrongIntro { what: "lambda", want: "Pi", ty: self.show(ctx, expected) });
                };
                self.infer_universe(ctx, a)?;
                let va = self.eval(ctx, a)?;
                if !self.conv(ctx, &va, dom)? {
                    return Err(TypeError::DomainMismatch { ann: self.show(ctx, &va), dom: self.show(ctx, dom) });
                }
                let inner = ctx.bind(x, (**dom).clone());
                let body_ty = self.m.inst(cod, Value::var(ctx.lvl()))?;
                self.check(&inner, b, &body_ty)
            }
            Pair(a, b) => {
                let ety = self.m.whnf(expected.clone())?;
                let Value::Sigma(_, dom, cod) = &ety else {
                    return Err(TypeError::WrongIntro { what: "pair", want: "Sigma", ty: self.show(ctx, expected) });
                };
                self.check(ctx, a, dom)?;
                let va = self.eval(ctx, a)?;
                let bty = self.m.inst(cod, va)?;
                self.check(ctx, b, &bty)
            }
            Refl => {
                let ety = self.m.whnf(expected.clone())?;
                let Value::Eq(_, x, y) = &ety else {
                    return Err(TypeError::WrongIntro { what: "refl", want: "Eq", ty: self.show(ctx, expected) });
                };
                if self.conv(ctx, x, y)? {
                    Ok(())
                } else {
                    Err(TypeError::ReflMismatch { lhs: self.show_nf(ctx, x), rhs: self.show_nf(ctx, y) })
                }
            }
            _ => {
                let got = self.infer(ctx, t)?;
                if self.subtype(ctx, &got, expected)? {
                    Ok(())
                } else {
                    Err(TypeError::Mismatch { expected: self.show_nf(ctx, expected), found: self.show_nf(ctx, &got) })
                }
            }
        }
    }

    /// Fully unfolded normal form, falling back to the folded form when
    /// the normal form is too large to be readable.
    pub fn show_nf(&self, ctx: &Ctx, v: &Value) -> String {
        match self.m.quote_within(ctx.lvl(), v, 400) {
            Ok(Some(t)) => print_in(&t, &ctx.names),
            _ => self.show(ctx, v),
        }
    }
}
