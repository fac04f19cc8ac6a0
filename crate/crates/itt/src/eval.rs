//! Normalization by evaluation.
//!
//! Terms evaluate to values with closures for binders. Global definitions
//! stay folded (`Glued`) until something needs to look inside them, and the
//! unfolding is memoized per value. Conversion compares folded heads first
//! and unfolds only on mismatch. Eta for Pi and Sigma lives in `conv`.

use std::cell::{Cell, RefCell};
use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::syntax::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("out of fuel after {0} evaluation steps")]
    OutOfFuel(u64),
    #[error("malformed value: {0}")]
    Malformed(&'static str),
    #[error("normal form larger than {0} nodes")]
    TooLarge(usize),
    #[error("evaluation nested deeper than {0} applications")]
    TooDeep(usize),
}

pub type R<T> = Result<T, EvalError>;

#[derive(Clone, Debug)]
pub enum Env {
    Nil,
    Cons(Arc<(Value, Env)>),
}

impl Env {
    pub fn push(&self, v: Value) -> Env {
        Env::Cons(Arc::new((v, self.clone())))
    }

    fn get(&self, mut i: usize) -> Option<&Value> {
        let mut cur = self;
        loop {
            match cur {
                Env::Nil => return None,
                Env::Cons(node) => {
                    if i == 0 {
                        return Some(&node.0);
                    }
                    i -= 1;
                    cur = &node.1;
                }
            }
        }
    }

    /// Environment of `n` fresh variables at levels 0..n.
    pub fn identity(n: usize) -> Env {
        (0..n).fold(Env::Nil, |e, l| e.push(Value::var(l)))
    }
}

#[derive(Clone, Debug)]
pub struct Closure {
    pub env: Env,
    pub body: Tm,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Head {
    /// de Bruijn level
    Var(usize),
    Axiom(Name),
}

#[derive(Clone, Debug)]
pub enum Elim {
    App(Value),
    Fst,
    Snd,
    /// `J A C c a b` waiting on its proof
    J(Arc<[Value; 5]>),
}

pub type Spine = Arc<Vec<Elim>>;

#[derive(Clone, Debug)]
pub enum Value {
    Univ(Level),
    Pi(Name, Arc<Value>, Closure),
    Lam(Name, Arc<Value>, Closure),
    Sigma(Name, Arc<Value>, Closure),
    Pair(Arc<Value>, Arc<Value>),
    Eq(Arc<Value>, Arc<Value>, Arc<Value>),
    Refl,
    Neutral(Head, Spine),
    /// A defined global applied to a spine, not yet unfolded.
    Glued(Name, Spine, Arc<OnceLock<Value>>),
}

impl Value {
    pub fn var(level: usize) -> Value {
        Value::Neutral(Head::Var(level), Arc::new(Vec::new()))
    }
}

fn push(sp: &Spine, e: Elim) -> Spine {
    let mut v = (**sp).clone();
    v.push(e);
    Arc::new(v)
}

pub struct GlobalEntry {
    pub ty_term: Tm,
    pub ty: Value,
    /// `None` for axioms.
    pub body: Option<(Tm, Value)>,
    /// position in the environment; later definitions unfold first
    pub index: usize,
}

#[derive(Default)]
pub struct Globals {
    map: HashMap<Name, GlobalEntry>,
    order: Vec<Name>,
}

impl Globals {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, n: &str) -> Option<&GlobalEntry> {
        self.map.get(n)
    }

    pub fn contains(&self, n: &str) -> bool {
        self.map.contains_key(n)
    }

    pub fn insert(&mut self, name: Name, ty_term: Tm, ty: Value, body: Option<(Tm, Value)>) {
        let index = self.order.len();
        self.order.push(name.clone());
        self.map.insert(name, GlobalEntry { ty_term, ty, body, index });
    }

    pub fn names(&self) -> &[Name] {
        &self.order
    }

    pub fn axioms(&self) -> Vec<Name> {
        self.order.iter().filter(|n| self.map[*n].body.is_none()).cloned().collect()
    }

    pub fn is_axiom(&self, n: &str) -> bool {
        self.map.get(n).is_some_and(|e| e.body.is_none())
    }

    /// Axioms reachable from `n` through types and bodies, in declaration
    /// order.
    pub fn axioms_used(&self, n: &str) -> Vec<Name> {
        let mut seen = HashSet::new();
        let mut stack: Vec<Name> = vec![n.into()];
        while let Some(g) = stack.pop() {
            if !seen.insert(g.clone()) {
                continue;
            }
            if let Some(e) = self.map.get(&g) {
                stack.extend(globals(&e.ty_term));
                if let Some((b, _)) = &e.body {
                    stack.extend(globals(b));
                }
            }
        }
        self.order.iter().filter(|g| seen.contains(*g) && self.is_axiom(g)).cloned().collect()
    }
}

pub const DEFAULT_FUEL: u64 = 10_000_000;

/// Nested beta steps allowed before giving up. The stack grows on the heap
/// as needed, so this bounds memory rather than guarding the native stack.
pub const MAX_DEPTH: usize = 200_000;

// stack kept free before recursing, and the size of each new segment
const RED_ZONE: usize = 128 * 1024;
const SEGMENT: usize = 8 * 1024 * 1024;

fn grow<T>(f: impl FnOnce() -> T) -> T {
    stacker::maybe_grow(RED_ZONE, SEGMENT, f)
}

/// Evaluation state: the global environment, a step budget and flags.
pub struct Machine<'g> {
    pub globals: &'g Globals,
    fuel: Cell<u64>,
    budget: Cell<u64>,
    pub eta: bool,
    /// Results of comparing two glued values, keyed by their memo cells.
    /// The entries hold the cells, so the addresses stay unique.
    seen: RefCell<HashMap<(usize, usize, usize), Seen>>,
    /// Nodes left before an unfolding quote gives up; see `quote_within`.
    room: Cell<Option<usize>>,
    depth: Cell<usize>,
}

type Memo = Arc<OnceLock<Value>>;
type Seen = (Memo, Memo, bool);

impl<'g> Machine<'g> {
    pub fn new(globals: &'g Globals, fuel: u64, eta: bool) -> Self {
        Machine { globals, fuel: Cell::new(fuel), budget: Cell::new(fuel), eta, seen: RefCell::default(), room: Cell::new(None), depth: Cell::new(0) }
    }

    pub fn refuel(&self, fuel: u64) {
        self.fuel.set(fuel);
        self.budget.set(fuel);
        self.seen.borrow_mut().clear();
    }

    pub fn steps_used(&self) -> u64 {
        self.budget.get() - self.fuel.get()
    }

    fn tick(&self) -> R<()> {
        let f = self.fuel.get();
        if f == 0 {
            return Err(EvalError::OutOfFuel(self.budget.get()));
        }
        self.fuel.set(f - 1);
        Ok(())
    }

    pub fn eval(&self, env: &Env, t: &Tm) -> R<Value> {
        use Term::*;
        Ok(match &**t {
            Var(i) => env.get(*i).cloned().ok_or(EvalError::Malformed("unbound index"))?,
            Universe(l) => Value::Univ(*l),
            Pi(x, a, b) => Value::Pi(x.clone(), Arc::new(self.eval(env, a)?), clo(env, b)),
            Lam(x, a, b) => Value::Lam(x.clone(), Arc::new(self.eval(env, a)?), clo(env, b)),
            Sigma(x, a, b) => Value::Sigma(x.clone(), Arc::new(self.eval(env, a)?), clo(env, b)),
            App(f, a) => {
                let f = self.eval(env, f)?;
                let a = self.eval(env, a)?;
                self.apply(f, a)?
            }
            Pair(a, b) => Value::Pair(Arc::new(self.eval(env, a)?), Arc::new(self.eval(env, b)?)),
            Fst(p) => {
                let p = self.eval(env, p)?;
                self.fst(p)?
            }
            Snd(p) => {
                let p = self.eval(env, p)?;
                self.snd(p)?
            }
            Eq(a, x, y) => Value::Eq(
                Arc::new(self.eval(env, a)?),
                Arc::new(self.eval(env, x)?),
                Arc::new(self.eval(env, y)?),
            ),
            Refl => Value::Refl,
            J(xs) => {
                let mut vs = Vec::with_capacity(6);
                for x in xs.iter() {
                    vs.push(self.eval(env, x)?);
                }
                let p = vs.pop().unwrap();
                let args: [Value; 5] = vs.try_into().map_err(|_| EvalError::Malformed("J arity"))?;
                self.j(args, p)?
            }
            Global(n) => self.global(n),
            Ann(t, _) => self.eval(env, t)?,
        })
    }

    pub fn global(&self, n: &Name) -> Value {
        match self.globals.get(n) {
            Some(GlobalEntry { body: Some(_), .. }) => {
                Value::Glued(n.clone(), Arc::new(Vec::new()), Arc::new(OnceLock::new()))
            }
            _ => Value::Neutral(Head::Axiom(n.clone()), Arc::new(Vec::new())),
        }
    }

    pub fn inst(&self, c: &Closure, v: Value) -> R<Value> {
        self.tick()?;
        let d = self.depth.get();
        if d >= MAX_DEPTH {
            return Err(EvalError::TooDeep(MAX_DEPTH));
        }
        self.depth.set(d + 1);
        let r = grow(|| self.eval(&c.env.push(v), &c.body));
        self.depth.set(d);
        r
    }

    pub fn apply(&self, f: Value, a: Value) -> R<Value> {
        match f {
            Value::Lam(_, _, c) => self.inst(&c, a),
            Value::Neutral(h, sp) => Ok(Value::Neutral(h, push(&sp, Elim::App(a)))),
            Value::Glued(n, sp, _) => Ok(Value::Glued(n, push(&sp, Elim::App(a)), Arc::new(OnceLock::new()))),
            _ => Err(EvalError::Malformed("application of a non-function")),
        }
    }

    pub fn fst(&self, p: Value) -> R<Value> {
        match p {
            Value::Pair(a, _) => {
                self.tick()?;
                Ok((*a).clone())
            }
            Value::Neutral(h, sp) => Ok(Value::Neutral(h, push(&sp, Elim::Fst))),
            Value::Glued(n, sp, _) => Ok(Value::Glued(n, push(&sp, Elim::Fst), Arc::new(OnceLock::new()))),
            _ => Err(EvalError::Malformed("first projection of a non-pair")),
        }
    }

    pub fn snd(&self, p: Value) -> R<Value> {
        match p {
            Value::Pair(_, b) => {
                self.tick()?;
                Ok((*b).clone())
            }
            Value::Neutral(h, sp) => Ok(Value::Neutral(h, push(&sp, Elim::Snd))),
            Value::Glued(n, sp, _) => Ok(Value::Glued(n, push(&sp, Elim::Snd), Arc::new(OnceLock::new()))),
            _ => Err(EvalError::Malformed("second projection of a non-pair")),
        }
    }

    /// `J A C c a b p`; reduces to `c a` on refl.
    pub fn j(&self, args: [Value; 5], p: Value) -> R<Value> {
        match p {
            Value::Refl => {
                self.tick()?;
                let [_, _, c, a, _] = args;
                self.apply(c, a)
            }
            Value::Neutral(h, sp) => Ok(Value::Neutral(h, push(&sp, Elim::J(Arc::new(args))))),
            Value::Glued(n, sp, _) => {
                Ok(Value::Glued(n, push(&sp, Elim::J(Arc::new(args))), Arc::new(OnceLock::new())))
            }
            _ => Err(EvalError::Malformed("J on a non-equality proof")),
        }
    }

    fn elim(&self, v: Value, e: &Elim) -> R<Value> {
        match e {
            Elim::App(a) => self.apply(v, a.clone()),
            Elim::Fst => self.fst(v),
            Elim::Snd => self.snd(v),
            Elim::J(args) => self.j((**args).clone(), v),
        }
    }

    /// One delta step: the definition applied to the spine (memoized).
    pub fn unfold(&self, n: &Name, sp: &Spine, cell: &OnceLock<Value>) -> R<Value> {
        if let Some(v) = cell.get() {
            return Ok(v.clone());
        }
        self.tick()?;
        let body = match self.globals.get(n) {
            Some(GlobalEntry { body: Some((_, v)), .. }) => v.clone(),
            _ => return Err(EvalError::Malformed("unfolding an axiom")),
        };
        let mut v = body;
        for e in sp.iter() {
            v = self.elim(v, e)?;
        }
        let _ = cell.set(v.clone());
        Ok(v)
    }

    /// Unfold until the head is not a defined global.
    pub fn whnf(&self, mut v: Value) -> R<Value> {
        while let Value::Glued(n, sp, cell) = &v {
            v = self.unfold(n, sp, cell)?;
        }
        Ok(v)
    }

    fn height(&self, n: &str) -> usize {
        self.globals.get(n).map(|e| e.index).unwrap_or(0)
    }

    /// Definitional equality (beta, delta, and eta when enabled).
    pub fn conv(&self, lvl: usize, a: &Value, b: &Value) -> R<bool> {
        grow(|| self.conv_at(lvl, a, b))
    }

    fn conv_at(&self, lvl: usize, a: &Value, b: &Value) -> R<bool> {
        self.tick()?;
        use Value::*;
        match (a, b) {
            (Glued(_, _, c1), Glued(_, _, c2)) => {
                let key = (Arc::as_ptr(c1) as usize, Arc::as_ptr(c2) as usize, lvl);
                if let Some((_, _, r)) = self.seen.borrow().get(&key) {
                    return Ok(*r);
                }
                let r = self.conv_glued(lvl, a, b)?;
                self.seen.borrow_mut().insert(key, (c1.clone(), c2.clone(), r));
                Ok(r)
            }
            (Glued(n, sp, c), _) => {
                let a2 = self.unfold(n, sp, c)?;
                self.conv(lvl, &a2, b)
            }
            (_, Glued(n, sp, c)) => {
                let b2 = self.unfold(n, sp, c)?;
                self.conv(lvl, a, &b2)
            }
            _ => self.conv_whnf(lvl, a, b),
        }
    }

    fn conv_glued(&self, lvl: usize, a: &Value, b: &Value) -> R<bool> {
        let (Value::Glued(n1, sp1, c1), Value::Glued(n2, sp2, c2)) = (a, b) else {
            return self.conv(lvl, a, b);
        };
        if n1 == n2 && sp1.len() == sp2.len() && self.conv_spines(lvl, sp1, sp2)? {
            return Ok(true);
        }
        let (h1, h2) = (self.height(n1), self.height(n2));
        if h1 > h2 {
            let a2 = self.unfold(n1, sp1, c1)?;
            self.conv(lvl, &a2, b)
        } else if h2 > h1 {
            let b2 = self.unfold(n2, sp2, c2)?;
            self.conv(lvl, a, &b2)
        } else {
            let a2 = self.unfold(n1, sp1, c1)?;
            let b2 = self.unfold(n2, sp2, c2)?;
            self.conv(lvl, &a2, &b2)
        }
    }

    fn conv_whnf(&self, lvl: usize, a: &Value, b: &Value) -> R<bool> {
        use Value::*;
        match (a, b) {
            (Univ(l), Univ(m)) => Ok(l == m),
            (Pi(_, a1, c1), Pi(_, a2, c2)) | (Sigma(_, a1, c1), Sigma(_, a2, c2)) => {
                if !self.conv(lvl, a1, a2)? {
                    return Ok(false);
                }
                let x = Value::var(lvl);
                let b1 = self.inst(c1, x.clone())?;
                let b2 = self.inst(c2, x)?;
                self.conv(lvl + 1, &b1, &b2)
            }
            (Lam(_, _, c1), Lam(_, _, c2)) => {
                let x = Value::var(lvl);
                let b1 = self.inst(c1, x.clone())?;
                let b2 = self.inst(c2, x)?;
                self.conv(lvl + 1, &b1, &b2)
            }
            (Lam(_, _, c), other @ Neutral(..)) | (other @ Neutral(..), Lam(_, _, c)) if self.eta => {
                let x = Value::var(lvl);
                let b1 = self.inst(c, x.clone())?;
                let b2 = self.apply(other.clone(), x)?;
                self.conv(lvl + 1, &b1, &b2)
            }
            (Pair(a1, b1), Pair(a2, b2)) => Ok(self.conv(lvl, a1, a2)? && self.conv(lvl, b1, b2)?),
            (Pair(a1, b1), other @ Neutral(..)) | (other @ Neutral(..), Pair(a1, b1)) if self.eta => {
                let a2 = self.fst(other.clone())?;
                if !self.conv(lvl, a1, &a2)? {
                    return Ok(false);
                }
                let b2 = self.snd(other.clone())?;
                self.conv(lvl, b1, &b2)
            }
            (Eq(a1, x1, y1), Eq(a2, x2, y2)) => {
                Ok(self.conv(lvl, a1, a2)? && self.conv(lvl, x1, x2)? && self.conv(lvl, y1, y2)?)
            }
            (Refl, Refl) => Ok(true),
            (Neutral(h1, sp1), Neutral(h2, sp2)) => {
                Ok(h1 == h2 && sp1.len() == sp2.len() && self.conv_spines(lvl, sp1, sp2)?)
            }
            _ => Ok(false),
        }
    }

    fn conv_spines(&self, lvl: usize, s1: &[Elim], s2: &[Elim]) -> R<bool> {
        for (e1, e2) in s1.iter().zip(s2) {
            let ok = match (e1, e2) {
                (Elim::App(a), Elim::App(b)) => self.conv(lvl, a, b)?,
                (Elim::Fst, Elim::Fst) | (Elim::Snd, Elim::Snd) => true,
                (Elim::J(xs), Elim::J(ys)) => {
                    let mut ok = true;
                    for (x, y) in xs.iter().zip(ys.iter()) {
                        if !self.conv(lvl, x, y)? {
                            ok = false;
                            break;
                        }
                    }
                    ok
                }
                _ => false,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Cumulative subtyping: universes by level, Pi covariant in the
    /// codomain (domain by conversion), Sigma covariant in both parts.
    pub fn subtype(&self, lvl: usize, a: &Value, b: &Value) -> R<bool> {
        if let (Value::Glued(n1, sp1, _), Value::Glued(n2, sp2, _)) = (a, b) {
            if n1 == n2 && sp1.len() == sp2.len() && self.conv_spines(lvl, sp1, sp2)? {
                return Ok(true);
            }
        }
        let a = self.whnf(a.clone())?;
        let b = self.whnf(b.clone())?;
        match (&a, &b) {
            (Value::Univ(l), Value::Univ(m)) => Ok(l <= m),
            (Value::Pi(_, a1, c1), Value::Pi(_, a2, c2)) => {
                if !self.conv(lvl, a1, a2)? {
                    return Ok(false);
                }
                let x = Value::var(lvl);
                let b1 = self.inst(c1, x.clone())?;
                let b2 = self.inst(c2, x)?;
                self.subtype(lvl + 1, &b1, &b2)
            }
            (Value::Sigma(_, a1, c1), Value::Sigma(_, a2, c2)) => {
                if !self.subtype(lvl, a1, a2)? {
                    return Ok(false);
                }
                let x = Value::var(lvl);
                let b1 = self.inst(c1, x.clone())?;
                let b2 = self.inst(c2, x)?;
                self.subtype(lvl + 1, &b1, &b2)
            }
            _ => self.conv(lvl, &a, &b),
        }
    }

    /// Back to a beta-normal term. With `unfold` every defined global is
    /// expanded; without it globals stay folded at their spine.
    pub fn quote(&self, lvl: usize, v: &Value, unfold: bool) -> R<Tm> {
        grow(|| self.quote_at(lvl, v, unfold))
    }

    fn quote_at(&self, lvl: usize, v: &Value, unfold: bool) -> R<Tm> {
        use Value::*;
        if let Some(n) = self.room.get() {
            if n == 0 {
                return Err(EvalError::TooLarge(0));
            }
            self.room.set(Some(n - 1));
        }
        Ok(match v {
            Univ(l) => universe(*l),
            Pi(x, a, c) | Lam(x, a, c) | Sigma(x, a, c) => {
                let a_t = self.quote(lvl, a, unfold)?;
                let body = self.inst(c, Value::var(lvl))?;
                let b_t = self.quote(lvl + 1, &body, unfold)?;
                Arc::new(match v {
                    Pi(..) => Term::Pi(x.clone(), a_t, b_t),
                    Lam(..) => Term::Lam(x.clone(), a_t, b_t),
                    _ => Term::Sigma(x.clone(), a_t, b_t),
                })
            }
            Pair(a, b) => pair(self.quote(lvl, a, unfold)?, self.quote(lvl, b, unfold)?),
            Eq(a, x, y) => eq(self.quote(lvl, a, unfold)?, self.quote(lvl, x, unfold)?, self.quote(lvl, y, unfold)?),
            Refl => refl(),
            Neutral(h, sp) => {
                let head = match h {
                    Head::Var(l) => var(lvl - l - 1),
                    Head::Axiom(n) => Arc::new(Term::Global(n.clone())),
                };
                self.quote_spine(lvl, head, sp, unfold)?
            }
            Glued(n, sp, cell) => {
                if unfold {
                    let u = self.unfold(n, sp, cell)?;
                    self.quote(lvl, &u, unfold)?
                } else {
                    self.quote_spine(lvl, Arc::new(Term::Global(n.clone())), sp, unfold)?
                }
            }
        })
    }

    fn quote_spine(&self, lvl: usize, head: Tm, sp: &[Elim], unfold: bool) -> R<Tm> {
        let mut acc = head;
        for e in sp {
            acc = match e {
                Elim::App(a) => app(acc, self.quote(lvl, a, unfold)?),
                Elim::Fst => fst(acc),
                Elim::Snd => snd(acc),
                Elim::J(xs) => {
                    let mut ts = Vec::with_capacity(6);
                    for x in xs.iter() {
                        ts.push(self.quote(lvl, x, unfold)?);
                    }
                    ts.push(acc);
                    j(ts.try_into().unwrap())
                }
            };
        }
        Ok(acc)
    }

    /// Unfolded normal form, or None once it grows past `limit` nodes.
    pub fn quote_within(&self, lvl: usize, v: &Value, limit: usize) -> R<Option<Tm>> {
        self.room.set(Some(limit));
        let r = self.quote(lvl, v, true);
        self.room.set(None);
        match r {
            Ok(t) => Ok(Some(t)),
            Err(EvalError::TooLarge(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Full normal form of a closed-in-`lvl` term.
    pub fn normalize(&self, lvl: usize, t: &Tm) -> R<Tm> {
        let v = self.eval(&Env::identity(lvl), t)?;
        self.quote(lvl, &v, true)
    }
}

fn clo(env: &Env, body: &Tm) -> Closure {
    Closure { env: env.clone(), body: body.clone() }
}
