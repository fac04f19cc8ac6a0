//! Printing core terms back to surface syntax. Binder names are freshened
//! so the output re-parses to an alpha-equivalent term.

use crate::parser::{is_keyword, Decl, DeclKind, Pragma};
use crate::syntax::{globals, occurs, Name, Term};

pub fn print(t: &Term) -> String {
    print_in(t, &[])
}

/// `scope[0]` is the outermost free variable.
pub fn print_in(t: &Term, scope: &[Name]) -> String {
    let mut p = Printer { scope: scope.iter().map(|n| n.to_string()).collect(), avoid: Vec::new() };
    p.avoid = globals(t).iter().map(|n| n.to_string()).collect();
    let mut out = String::new();
    p.term(t, 0, &mut out);
    out
}

struct Printer {
    scope: Vec<String>,
    avoid: Vec<String>,
}

impl Printer {
    fn fresh(&self, hint: &str) -> String {
        let base = if hint.is_empty() || hint == "_" { "x" } else { hint };
        let mut name = base.to_string();
        while self.scope.contains(&name) || self.avoid.contains(&name) || is_keyword(&name) {
            name.push('\'');
        }
        name
    }

    fn binder(&mut self, hint: &str, used: bool) -> String {
        let name = if used { self.fresh(hint) } else { "_".to_string() };
        self.scope.push(name.clone());
        name
    }

    fn term(&mut self, t: &Term, prec: u8, out: &mut String) {
        use Term::*;
        match t {
            Var(i) => {
                if *i < self.scope.len() {
                    out.push_str(&self.scope[self.scope.len() - 1 - i]);
                } else {
                    out.push_str(&format!("#{i}"));
                }
            }
            Universe(l) => out.push_str(&l.to_string()),
            Refl => out.push_str("refl"),
            Global(n) => out.push_str(n),
            Pi(x, a, b) => {
                paren(prec > 0, out, |out| {
                    if occurs(b, 0) {
                        out.push('(');
                        let dom = self.render(a, 0);
                        let name = self.binder(x, true);
                        out.push_str(&format!("{name} : {dom}) -> "));
                    } else {
                        self.term(a, 1, out);
                        out.push_str(" -> ");
                        self.binder(x, false);
                    }
                    self.term(b, 0, out);
                    self.scope.pop();
                })
            }
            Lam(..) => paren(prec > 0, out, |out| {
                out.push_str("fun");
                let mut cur = t;
                let mut n = 0;
                while let Lam(x, a, b) = cur {
                    let dom = self.render(a, 0);
                    let name = self.binder(x, occurs(b, 0));
                    out.push_str(&format!(" ({name} : {dom})"));
                    n += 1;
                    cur = b;
                }
                out.push_str(" => ");
                self.term(cur, 0, out);
                self.scope.truncate(self.scope.len() - n);
            }),
            Sigma(x, a, b) => paren(prec > 0, out, |out| {
                let dom = self.render(a, 0);
                let name = self.binder(x, occurs(b, 0));
                out.push_str(&format!("Sig ({name} : {dom}), "));
                self.term(b, 0, out);
                self.scope.pop();
            }),
            App(f, a) => paren(prec > 1, out, |out| {
                self.term(f, 1, out);
                out.push(' ');
                self.term(a, 2, out);
            }),
            Fst(a) | Snd(a) => paren(prec > 1, out, |out| {
                out.push_str(if matches!(t, Fst(_)) { "fst " } else { "snd " });
                self.term(a, 2, out);
            }),
            Eq(a, x, y) => paren(prec > 1, out, |out| {
                out.push_str("Eq");
                for s in [a, x, y] {
                    out.push(' ');
                    self.term(s, 2, out);
                }
            }),
            J(xs) => paren(prec > 1, out, |out| {
                out.push('J');
                for s in xs.iter() {
                    out.push(' ');
                    self.term(s, 2, out);
                }
            }),
            Pair(a, b) => {
                out.push('(');
                self.term(a, 0, out);
                let mut rest = b;
                while let Pair(x, y) = &**rest {
                    out.push_str(", ");
                    self.term(x, 0, out);
                    rest = y;
                }
                out.push_str(", ");
                self.term(rest, 0, out);
                out.push(')');
            }
            // doubled when it could be mistaken for a Pi binder group
            Ann(a, b) => paren(prec == 1, out, |out| {
                out.push('(');
                self.term(a, 0, out);
                out.push_str(" : ");
                self.term(b, 0, out);
                out.push(')');
            }),
        }
    }

    fn render(&mut self, t: &Term, prec: u8) -> String {
        let mut s = String::new();
        self.term(t, prec, &mut s);
        s
    }
}

fn paren(wrap: bool, out: &mut String, body: impl FnOnce(&mut String)) {
    if wrap {
        out.push('(');
    }
    body(out);
    if wrap {
        out.push(')');
    }
}

/// A declaration in surface syntax; definitions come out unsugared.
pub fn print_decl(d: &Decl) -> String {
    match &d.kind {
        DeclKind::Def { name, ty, body } => format!("def {name} : {} := {};", print(ty), print(body)),
        DeclKind::Axiom { name, ty } => format!("axiom {name} : {};", print(ty)),
        DeclKind::Pragma(p) => {
            let kw = p.kind().as_str();
            match p {
                Pragma::AssertDefeq(a, b) => format!("#{kw} {}, {};", print(a), print(b)),
                Pragma::AssertType(a, b) => format!("#{kw} {} : {};", print(a), print(b)),
                _ => format!("#{kw} {};", print(p.terms()[0])),
            }
        }
    }
}
