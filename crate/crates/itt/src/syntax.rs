//! Core terms. Variables are de Bruijn indices; binder names are kept
//! only for printing and never affect equality.

use std::fmt;
use std::sync::Arc;

pub type Name = Arc<str>;

/// Universe levels, ordered `Impredicative < Predicative(0) < Predicative(1) < ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Impredicative,
    Predicative(u32),
}

impl Level {
    pub fn succ(self) -> Level {
        match self {
            Level::Impredicative => Level::Predicative(0),
            Level::Predicative(i) => Level::Predicative(i + 1),
        }
    }
}

pub fn max_level(a: Level, b: Level) -> Level {
    a.max(b)
}

pub fn leq_level(a: Level, b: Level) -> bool {
    a <= b
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Impredicative => write!(f, "Type"),
            Level::Predicative(i) => write!(f, "Type{i}"),
        }
    }
}

pub type Tm = Arc<Term>;

#[derive(Clone, Debug)]
pub enum Term {
    Var(usize),
    Universe(Level),
    Pi(Name, Tm, Tm),
    Lam(Name, Tm, Tm),
    App(Tm, Tm),
    Sigma(Name, Tm, Tm),
    Pair(Tm, Tm),
    Fst(Tm),
    Snd(Tm),
    Eq(Tm, Tm, Tm),
    Refl,
    /// `J A C c a b p`
    J(Arc<[Tm; 6]>),
    Global(Name),
    Ann(Tm, Tm),
}

// Constructors, to keep call sites readable.
pub fn var(i: usize) -> Tm {
    Arc::new(Term::Var(i))
}
pub fn universe(l: Level) -> Tm {
    Arc::new(Term::Universe(l))
}
pub fn pi(x: &str, a: Tm, b: Tm) -> Tm {
    Arc::new(Term::Pi(x.into(), a, b))
}
pub fn lam(x: &str, a: Tm, b: Tm) -> Tm {
    Arc::new(Term::Lam(x.into(), a, b))
}
pub fn app(f: Tm, a: Tm) -> Tm {
    Arc::new(Term::App(f, a))
}
pub fn apps(f: Tm, args: impl IntoIterator<Item = Tm>) -> Tm {
    args.into_iter().fold(f, app)
}
pub fn sigma(x: &str, a: Tm, b: Tm) -> Tm {
    Arc::new(Term::Sigma(x.into(), a, b))
}
pub fn pair(a: Tm, b: Tm) -> Tm {
    Arc::new(Term::Pair(a, b))
}
pub fn fst(p: Tm) -> Tm {
    Arc::new(Term::Fst(p))
}
pub fn snd(p: Tm) -> Tm {
    Arc::new(Term::Snd(p))
}
pub fn eq(a: Tm, x: Tm, y: Tm) -> Tm {
    Arc::new(Term::Eq(a, x, y))
}
pub fn refl() -> Tm {
    Arc::new(Term::Refl)
}
pub fn j(args: [Tm; 6]) -> Tm {
    Arc::new(Term::J(Arc::new(args)))
}
pub fn global(n: &str) -> Tm {
    Arc::new(Term::Global(n.into()))
}
pub fn ann(t: Tm, ty: Tm) -> Tm {
    Arc::new(Term::Ann(t, ty))
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    use Term::*;
    match (a, b) {
        (Var(i), Var(j)) => i == j,
        (Universe(l), Universe(m)) => l == m,
        (Pi(_, a1, b1), Pi(_, a2, b2))
        | (Lam(_, a1, b1), Lam(_, a2, b2))
        | (Sigma(_, a1, b1), Sigma(_, a2, b2))
        | (App(a1, b1), App(a2, b2))
        | (Pair(a1, b1), Pair(a2, b2))
        | (Ann(a1, b1), Ann(a2, b2)) => alpha_eq(a1, a2) && alpha_eq(b1, b2),
        (Fst(x), Fst(y)) | (Snd(x), Snd(y)) => alpha_eq(x, y),
        (Eq(a1, x1, y1), Eq(a2, x2, y2)) => {
            alpha_eq(a1, a2) && alpha_eq(x1, x2) && alpha_eq(y1, y2)
        }
        (Refl, Refl) => true,
        (J(xs), J(ys)) => xs.iter().zip(ys.iter()).all(|(x, y)| alpha_eq(x, y)),
        (Global(m), Global(n)) => m == n,
        _ => false,
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        alpha_eq(self, other)
    }
}

/// Adds `by` to every free index at or above `cutoff`.
pub fn shift(t: &Tm, by: isize, cutoff: usize) -> Tm {
    map_vars(t, cutoff, &|i, depth| {
        if i >= depth {
            var((i as isize + by) as usize)
        } else {
            var(i)
        }
    })
}

/// `body` binds index 0; replace it by `arg` and lower the rest.
pub fn substitute(body: &Tm, arg: &Tm) -> Tm {
    map_vars(body, 0, &|i, depth| {
        if i == depth {
            shift(arg, depth as isize, 0)
        } else if i > depth {
            var(i - 1)
        } else {
            var(i)
        }
    })
}

fn map_vars(t: &Tm, depth: usize, f: &dyn Fn(usize, usize) -> Tm) -> Tm {
    use Term::*;
    let go = |x: &Tm, d: usize| map_vars(x, d, f);
    match &**t {
        Var(i) => f(*i, depth),
        Universe(_) | Refl | Global(_) => t.clone(),
        Pi(x, a, b) => Arc::new(Pi(x.clone(), go(a, depth), go(b, depth + 1))),
        Lam(x, a, b) => Arc::new(Lam(x.clone(), go(a, depth), go(b, depth + 1))),
        Sigma(x, a, b) => Arc::new(Sigma(x.clone(), go(a, depth), go(b, depth + 1))),
        App(a, b) => app(go(a, depth), go(b, depth)),
        Pair(a, b) => pair(go(a, depth), go(b, depth)),
        Ann(a, b) => ann(go(a, depth), go(b, depth)),
        Fst(a) => fst(go(a, depth)),
        Snd(a) => snd(go(a, depth)),
        Eq(a, x, y) => eq(go(a, depth), go(x, depth), go(y, depth)),
        J(xs) => j(std::array::from_fn(|k| go(&xs[k], depth))),
    }
}

/// Does index `i` (relative to the root) occur free?
pub fn occurs(t: &Term, i: usize) -> bool {
    use Term::*;
    match t {
        Var(k) => *k == i,
        Universe(_) | Refl | Global(_) => false,
        Pi(_, a, b) | Lam(_, a, b) | Sigma(_, a, b) => occurs(a, i) || occurs(b, i + 1),
        App(a, b) | Pair(a, b) | Ann(a, b) => occurs(a, i) || occurs(b, i),
        Fst(a) | Snd(a) => occurs(a, i),
        Eq(a, x, y) => occurs(a, i) || occurs(x, i) || occurs(y, i),
        J(xs) => xs.iter().any(|x| occurs(x, i)),
    }
}

/// Every global name mentioned, in first-occurrence order.
pub fn globals(t: &Term) -> Vec<Name> {
    fn go(t: &Term, out: &mut Vec<Name>) {
        use Term::*;
        match t {
            Global(n) => {
                if !out.contains(n) {
                    out.push(n.clone())
                }
            }
            Var(_) | Universe(_) | Refl => {}
            Pi(_, a, b) | Lam(_, a, b) | Sigma(_, a, b) | App(a, b) | Pair(a, b) | Ann(a, b) => {
                go(a, out);
                go(b, out)
            }
            Fst(a) | Snd(a) => go(a, out),
            Eq(a, x, y) => {
                go(a, out);
                go(x, out);
                go(y, out)
            }
            J(xs) => xs.iter().for_each(|x| go(x, out)),
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}

pub fn size(t: &Term) -> usize {
    use Term::*;
    1 + match t {
        Var(_) | Universe(_) | Refl | Global(_) => 0,
        Pi(_, a, b) | Lam(_, a, b) | Sigma(_, a, b) | App(a, b) | Pair(a, b) | Ann(a, b) => {
            size(a) + size(b)
        }
        Fst(a) | Snd(a) => size(a),
        Eq(a, x, y) => size(a) + size(x) + size(y),
        J(xs) => xs.iter().map(|x| size(x)).sum(),
    }
}
