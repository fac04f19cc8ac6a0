//! Brute-force normal-order reducer for closed untyped terms with pairs.
//!
//! Independent of the kernel: its own syntax, its own substitution, one
//! leftmost-outermost step at a time. Types are erased to the constant `*`.

use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum U {
    Var(usize),
    Lam(Box<U>),
    App(Box<U>, Box<U>),
    Pair(Box<U>, Box<U>),
    Fst(Box<U>),
    Snd(Box<U>),
    Const(String),
}

impl fmt::Display for U {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            U::Var(i) => write!(f, "#{i}"),
            U::Lam(b) => write!(f, "(\\ {b})"),
            U::App(a, b) => write!(f, "({a} {b})"),
            U::Pair(a, b) => write!(f, "<{a}, {b}>"),
            U::Fst(a) => write!(f, "(fst {a})"),
            U::Snd(a) => write!(f, "(snd {a})"),
            U::Const(c) => write!(f, "{c}"),
        }
    }
}

fn shift(t: &U, by: isize, cutoff: usize) -> U {
    match t {
        U::Var(i) if *i >= cutoff => U::Var((*i as isize + by) as usize),
        U::Var(i) => U::Var(*i),
        U::Lam(b) => U::Lam(Box::new(shift(b, by, cutoff + 1))),
        U::App(a, b) => U::App(Box::new(shift(a, by, cutoff)), Box::new(shift(b, by, cutoff))),
        U::Pair(a, b) => U::Pair(Box::new(shift(a, by, cutoff)), Box::new(shift(b, by, cutoff))),
        U::Fst(a) => U::Fst(Box::new(shift(a, by, cutoff))),
        U::Snd(a) => U::Snd(Box::new(shift(a, by, cutoff))),
        U::Const(c) => U::Const(c.clone()),
    }
}

// body[0 := arg], decrementing the other free indices
fn subst(body: &U, depth: usize, arg: &U) -> U {
    match body {
        U::Var(i) if *i == depth => shift(arg, depth as isize, 0),
        U::Var(i) if *i > depth => U::Var(i - 1),
        U::Var(i) => U::Var(*i),
        U::Lam(b) => U::Lam(Box::new(subst(b, depth + 1, arg))),
        U::App(a, b) => U::App(Box::new(subst(a, depth, arg)), Box::new(subst(b, depth, arg))),
        U::Pair(a, b) => U::Pair(Box::new(subst(a, depth, arg)), Box::new(subst(b, depth, arg))),
        U::Fst(a) => U::Fst(Box::new(subst(a, depth, arg))),
        U::Snd(a) => U::Snd(Box::new(subst(a, depth, arg))),
        U::Const(c) => U::Const(c.clone()),
    }
}

/// One leftmost-outermost step, or None when normal.
pub fn step(t: &U) -> Option<U> {
    match t {
        U::App(f, a) => {
            if let U::Lam(b) = &**f {
                return Some(subst(b, 0, a));
            }
            if let Some(f2) = step(f) {
                return Some(U::App(Box::new(f2), a.clone()));
            }
            step(a).map(|a2| U::App(f.clone(), Box::new(a2)))
        }
        U::Fst(p) => {
            if let U::Pair(a, _) = &**p {
                return Some((**a).clone());
            }
            step(p).map(|p2| U::Fst(Box::new(p2)))
        }
        U::Snd(p) => {
            if let U::Pair(_, b) = &**p {
                return Some((**b).clone());
            }
            step(p).map(|p2| U::Snd(Box::new(p2)))
        }
        U::Lam(b) => step(b).map(|b2| U::Lam(Box::new(b2))),
        U::Pair(a, b) => {
            if let Some(a2) = step(a) {
                return Some(U::Pair(Box::new(a2), b.clone()));
            }
            step(b).map(|b2| U::Pair(a.clone(), Box::new(b2)))
        }
        U::Var(_) | U::Const(_) => None,
    }
}

pub fn normalize(t: &U, max_steps: usize) -> U {
    let mut cur = t.clone();
    for _ in 0..max_steps {
        match step(&cur) {
            Some(n) => cur = n,
            None => return cur,
        }
    }
    panic!("oracle: no normal form within {max_steps} steps");
}

/// Reads `\x y. body`, application, `<a, b, c>`, `fst t`, `snd t`, `*`.
/// Unbound identifiers are looked up in `defs`, else become constants.
pub struct Defs {
    map: HashMap<String, U>,
}

impl Defs {
    pub fn new() -> Self {
        Defs { map: HashMap::new() }
    }

    pub fn def(&mut self, name: &str, src: &str) -> &mut Self {
        let t = self.parse(src);
        self.map.insert(name.to_string(), t);
        self
    }

    pub fn get(&self, name: &str) -> U {
        self.map[name].clone()
    }

    pub fn parse(&self, src: &str) -> U {
        let toks = lex(src);
        let mut p = P { toks, pos: 0, defs: self, scope: Vec::new() };
        let t = p.term();
        assert!(p.pos == p.toks.len(), "oracle parse: trailing input in {src:?}");
        t
    }

    pub fn eval(&self, src: &str) -> U {
        normalize(&self.parse(src), 5_000_000)
    }
}

fn lex(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if "\\.()<>,".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else {
            let s = i;
            while i < cs.len() && !cs[i].is_whitespace() && !"\\.()<>,".contains(cs[i]) {
                i += 1;
            }
            out.push(cs[s..i].iter().collect());
        }
    }
    out
}

struct P<'a> {
    toks: Vec<String>,
    pos: usize,
    defs: &'a Defs,
    scope: Vec<String>,
}

impl P<'_> {
    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(|s| s.as_str())
    }
    fn eat(&mut self, s: &str) {
        assert_eq!(self.peek(), Some(s), "oracle parse at token {}", self.pos);
        self.pos += 1;
    }
    fn term(&mut self) -> U {
        if self.peek() == Some("\\") {
            self.pos += 1;
            let mut names = Vec::new();
            while self.peek() != Some(".") {
                names.push(self.toks[self.pos].clone());
                self.pos += 1;
            }
            self.eat(".");
            let n = names.len();
            self.scope.extend(names);
            let mut body = self.term();
            self.scope.truncate(self.scope.len() - n);
            for _ in 0..n {
                body = U::Lam(Box::new(body));
            }
            return body;
        }
        let mut head = self.atom();
        while let Some(t) = self.peek() {
            if t == ")" || t == "," || t == ">" {
                break;
            }
            if t == "\\" {
                let arg = self.term();
                head = U::App(Box::new(head), Box::new(arg));
                break;
            }
            let arg = self.atom();
            head = U::App(Box::new(head), Box::new(arg));
        }
        head
    }
    fn atom(&mut self) -> U {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        match t.as_str() {
            "(" => {
                let x = self.term();
                self.eat(")");
                x
            }
            "<" => {
                let mut items = vec![self.term()];
                while self.peek() == Some(",") {
                    self.pos += 1;
                    items.push(self.term());
                }
                self.eat(">");
                let mut acc = items.pop().unwrap();
                while let Some(x) = items.pop() {
                    acc = U::Pair(Box::new(x), Box::new(acc));
                }
                acc
            }
            "fst" => U::Fst(Box::new(self.atom())),
            "snd" => U::Snd(Box::new(self.atom())),
            name => {
                if let Some(i) = self.scope.iter().rev().position(|s| s == name) {
                    U::Var(i)
                } else if let Some(d) = self.defs.map.get(name) {
                    d.clone()
                } else {
                    U::Const(name.to_string())
                }
            }
        }
    }
}

/// Church numeral `n` as an erased term: \X z s. s (s ... z)
pub fn church(n: usize) -> U {
    let mut body = U::Var(1);
    for _ in 0..n {
        body = U::App(Box::new(U::Var(0)), Box::new(body));
    }
    U::Lam(Box::new(U::Lam(Box::new(U::Lam(Box::new(body))))))
}

/// Erased programs for the worked computations. Types are passed as `*`
/// (or as the bound type variable when it is one).
pub fn programs() -> Defs {
    let mut d = Defs::new();
    d.def("zero", r"\X z s. z")
        .def("succ", r"\n X z s. s (n X z s)")
        .def("recNat", r"\X z s n. n X z s")
        .def("add", r"\m n. recNat * n succ m")
        // lists: the refined list is a pair of the raw list and a proof
        .def("nilr", r"\X x f. x")
        .def("consr", r"\e l X x f. f e (l X x f)")
        .def("nil", r"<nilr, pf>")
        .def("cons", r"\e l. <consr e (fst l), pf>")
        .def("recList", r"\X x g l. fst l X x g")
        .def("sum", r"recList * zero add")
        // existentials: pair of the raw eliminator and its naturality proof
        .def("pack", r"\X p. <\Y k. k X p, pf>")
        .def("recExists", r"\Y k e. fst e Y k")
        .def("corec", r"\X h t x. pack X <x, h, t>")
        .def("hd", r"\s. recExists * (\X p. (fst (snd p)) (fst p)) s")
        .def("tl", r"\s. recExists * (\X p. pack X <(snd (snd p)) (fst p), fst (snd p), snd (snd p)>) s")
        .def("incr", r"corec * (\n. n) succ zero")
        // W-types with a large label sum
        .def("inl", r"\x X f g. f x")
        .def("inr", r"\x X f g. g x")
        .def("tt", r"\X x. x")
        .def("cZ", r"<*, \X x0 f. x0>")
        .def("cS", r"<*, \X x0 f. f tt>")
        .def("supr", r"\a r X g. g a (\b. r b X g)")
        .def("recWr", r"\X g w. w X g")
        .def("labZ", r"inl tt")
        .def("labS", r"inr tt")
        .def("zeroW", r"supr labZ (\b. b *)")
        .def("oneW", r"supr labS (\b. zeroW)")
        .def("twoW", r"supr labS (\b. supr labS (\b. zeroW))")
        .def("gdouble", r"\a t. snd (a * (\u. cZ) (\u. cS)) * zeroW (\k. supr labS (\b. supr labS (\b2. t k)))")
        .def("doubleW", r"recWr * gdouble");
    d
}

/// Structural equality; de Bruijn indices make it α-equivalence.
pub fn alpha(a: &U, b: &U) -> bool {
    a == b
}
