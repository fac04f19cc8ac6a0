//! One-line typing judgments, each rule of the theory exercised both ways.
//! A judgment is `term : type` (checking) or just `term` (inference).

use super::{checks, infers};
use itt::driver::Session;

pub struct Judgment {
    pub rule: &'static str,
    pub term: &'static str,
    pub ty: Option<&'static str>,
    pub holds: bool,
}

const fn ok(rule: &'static str, term: &'static str, ty: &'static str) -> Judgment {
    Judgment { rule, term, ty: Some(ty), holds: true }
}
const fn no(rule: &'static str, term: &'static str, ty: &'static str) -> Judgment {
    Judgment { rule, term, ty: Some(ty), holds: false }
}
const fn infer_no(rule: &'static str, term: &'static str) -> Judgment {
    Judgment { rule, term, ty: None, holds: false }
}
const fn infer_ok(rule: &'static str, term: &'static str) -> Judgment {
    Judgment { rule, term, ty: None, holds: true }
}

pub const JUDGMENTS: &[Judgment] = &[
    // universes
    ok("univ", "Type", "Type0"),
    ok("univ", "Type0", "Type1"),
    ok("univ", "Type1", "Type2"),
    no("univ", "Type", "Type"),
    no("univ", "Type0", "Type0"),
    infer_ok("univ", "Type2"),
    no("univ", "Type2", "Type2"),
    // Pi formation, impredicative: any domain, codomain in Type
    ok("pi-form-impredicative", "(X : Type) -> X -> (X -> X) -> X", "Type"),
    ok("pi-form-impredicative", "(X : Type1) -> Nat*", "Type"),
    ok("pi-form-impredicative", "(P : Type -> Type) -> (X : Type) -> P X -> P X", "Type"),
    no("pi-form-impredicative", "(X : Type) -> Type", "Type"),
    // Pi formation, predicative
    ok("pi-form-predicative", "(X : Type) -> Type", "Type0"),
    ok("pi-form-predicative", "Type0 -> Type", "Type1"),
    no("pi-form-predicative", "Type0 -> Type", "Type0"),
    no("pi-form", "(x : a) -> A", "Type"),
    // Pi intro and elim
    ok("pi-intro", "fun (x : A) => f x", "A -> A"),
    no("pi-intro", "fun (x : A) => x", "Sig (_ : A), A"),
    no("pi-intro", "fun (x : B) => a", "A -> A"),
    ok("pi-elim", "f (f a)", "A"),
    ok("pi-elim", "recNat* Nat* zero* succ* three*", "Nat*"),
    no("pi-elim", "f B", "A"),
    infer_no("pi-elim", "a a"),
    ok("pi-beta", "(refl : Eq A ((fun (x : A) => f x) a) (f a))", "Eq A (f a) (f a)"),
    ok("pi-eta", "(refl : Eq (A -> A) f (fun (x : A) => f x))", "Eq (A -> A) f f"),
    // Sigma formation: in Type only when both parts are
    ok("sigma-form-impredicative", "Sig (n : Nat*), Eq Nat* n n", "Type"),
    no("sigma-form-impredicative", "Sig (X : Type), X", "Type"),
    ok("sigma-form-predicative", "Sig (X : Type), X", "Type0"),
    ok("sigma-form-predicative", "Sig (X : Type0), X -> Type", "Type1"),
    no("sigma-form-predicative", "Sig (X : Type0), X", "Type0"),
    // Sigma intro and elim
    ok("sigma-intro", "(a, f a)", "Sig (_ : A), A"),
    ok("sigma-intro", "(A, a)", "Sig (X : Type), X"),
    no("sigma-intro", "(A, B)", "Sig (X : Type), X"),
    no("sigma-intro", "(a, a)", "A -> A"),
    infer_no("sigma-intro", "(a, a)"),
    ok("sigma-elim", "fst p", "A"),
    ok("sigma-elim", "snd ((A, a) : Sig (X : Type), X)", "A"),
    infer_no("sigma-elim", "fst a"),
    ok("sigma-beta", "(refl : Eq A (snd ((a, a2) : Sig (_ : A), A)) a2)", "Eq A a2 a2"),
    ok("sigma-eta", "(refl : Eq (Sig (_ : A), A) p (fst p, snd p))", "Eq (Sig (_ : A), A) p p"),
    // identity types
    ok("eq-form", "Eq Nat* zero* three*", "Type"),
    ok("eq-form", "Eq Type0 Nat* A", "Type1"),
    no("eq-form", "Eq Type0 Nat* A", "Type0"),
    no("eq-form", "Eq A a B", "Type"),
    ok("eq-intro", "refl", "Eq Nat* (recNat* Nat* zero* succ* zero*) zero*"),
    no("eq-intro", "refl", "Eq Nat* zero* three*"),
    no("eq-intro", "refl", "A"),
    infer_no("eq-intro", "refl"),
    ok("eq-elim", "J A (fun (x y : A) (_ : Eq A x y) => Eq A y x) (fun (z : A) => refl) a a (h a)", "Eq A a a"),
    ok("eq-elim", "fun (x y : A) (e : Eq A x y) => J A (fun (x y : A) (_ : Eq A x y) => Eq A y x) (fun (z : A) => refl) x y e", "(x y : A) -> Eq A x y -> Eq A y x"),
    no("eq-elim", "J A (fun (x : A) => A) (fun (z : A) => z) a a (h a)", "A"),
    no("eq-elim", "J A (fun (x y : A) (_ : Eq A x y) => A) (fun (z : A) => z) a a2 (h a)", "A"),
    ok("eq-beta", "(refl : Eq A (J A (fun (x y : A) (_ : Eq A x y) => A) (fun (z : A) => f z) a a refl) (f a))", "Eq A (f a) (f a)"),
    // cumulativity through subsumption
    ok("cumulativity", "Nat*", "Type0"),
    ok("cumulativity", "Nat*", "Type2"),
    ok("cumulativity", "fun (X : Type) => X", "Type -> Type1"),
    no("cumulativity", "fun (X : Type0) => X", "Type -> Type1"),
    no("cumulativity", "fun (X : Type) => X", "Type0 -> Type1"),
    // unknown names and annotations
    infer_no("var", "nonexistent"),
    infer_ok("ann", "((fun (x : A) => x) : A -> A)"),
    infer_no("ann", "(a : B)"),
];

/// Each judgment with whether the kernel agreed.
pub fn run(s: &Session) -> Vec<(&'static Judgment, bool)> {
    JUDGMENTS
        .iter()
        .map(|j| {
            let got = match j.ty {
                Some(ty) => checks(s, j.term, ty),
                None => infers(s, j.term),
            };
            (j, got == j.holds)
        })
        .collect()
}
