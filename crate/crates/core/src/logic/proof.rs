//! Hilbert-style proofs over a theory plus extra premises.
//!
//! Rules are modus ponens and generalization. Logical axioms are the
//! universal closures (any prefix of `forall`) of instances of the schemas
//! in [`Schema`]. Lines are compared modulo renaming of bound variables,
//! after unfolding bounded quantifiers.

use std::fmt;

use thiserror::Error;

use super::sexpr::{self, formula_from_sexpr, is_var_name, ParseError, SExpr};
use super::{Formula, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    K,
    S,
    Contra,
    AndIntro,
    AndElimL,
    AndElimR,
    OrIntroL,
    OrIntroR,
    OrElim,
    ForallElim,
    ForallDist,
    Vacuous,
    ExistsIntro,
    ExistsDefL,
    ExistsDefR,
    EqRefl,
    EqEuc,
    EqSucc,
    EqPlusL,
    EqPlusR,
    EqTimesL,
    EqTimesR,
    EqLeL,
    EqLeR,
}

/// Number of formula, term and variable parameters of a schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arity {
    pub formulas: usize,
    pub terms: usize,
    pub vars: usize,
}

impl Schema {
    pub const ALL: [Schema; 24] = [
        Schema::K,
        Schema::S,
        Schema::Contra,
        Schema::AndIntro,
        Schema::AndElimL,
        Schema::AndElimR,
        Schema::OrIntroL,
        Schema::OrIntroR,
        Schema::OrElim,
        Schema::ForallElim,
        Schema::ForallDist,
        Schema::Vacuous,
        Schema::ExistsIntro,
        Schema::ExistsDefL,
        Schema::ExistsDefR,
        Schema::EqRefl,
        Schema::EqEuc,
        Schema::EqSucc,
        Schema::EqPlusL,
        Schema::EqPlusR,
        Schema::EqTimesL,
        Schema::EqTimesR,
        Schema::EqLeL,
        Schema::EqLeR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::K => "k",
            Schema::S => "s",
            Schema::Contra => "contra",
            Schema::AndIntro => "and-intro",
            Schema::AndElimL => "and-elim-l",
            Schema::AndElimR => "and-elim-r",
            Schema::OrIntroL => "or-intro-l",
            Schema::OrIntroR => "or-intro-r",
            Schema::OrElim => "or-elim",
            Schema::ForallElim => "forall-elim",
            Schema::ForallDist => "forall-dist",
            Schema::Vacuous => "vacuous",
            Schema::ExistsIntro => "exists-intro",
            Schema::ExistsDefL => "exists-def-l",
            Schema::ExistsDefR => "exists-def-r",
            Schema::EqRefl => "eq-refl",
            Schema::EqEuc => "eq-euc",
            Schema::EqSucc => "eq-succ",
            Schema::EqPlusL => "eq-plus-l",
            Schema::EqPlusR => "eq-plus-r",
            Schema::EqTimesL => "eq-times-l",
            Schema::EqTimesR => "eq-times-r",
            Schema::EqLeL => "eq-le-l",
            Schema::EqLeR => "eq-le-r",
        }
    }

    pub fn from_name(s: &str) -> Option<Schema> {
        Schema::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn arity(self) -> Arity {
        let a = |formulas, terms, vars| Arity { formulas, terms, vars };
        match self {
            Schema::K | Schema::Contra | Schema::AndIntro | Schema::AndElimL | Schema::AndElimR => a(2, 0, 0),
            Schema::OrIntroL | Schema::OrIntroR => a(2, 0, 0),
            Schema::S | Schema::OrElim => a(3, 0, 0),
            Schema::ForallElim | Schema::ExistsIntro => a(1, 1, 1),
            Schema::ForallDist => a(2, 0, 1),
            Schema::Vacuous | Schema::ExistsDefL | Schema::ExistsDefR => a(1, 0, 1),
            Schema::EqRefl => a(0, 1, 0),
            Schema::EqSucc => a(0, 2, 0),
            Schema::EqEuc | Schema::EqPlusL | Schema::EqPlusR | Schema::EqTimesL | Schema::EqTimesR => a(0, 3, 0),
            Schema::EqLeL | Schema::EqLeR => a(0, 3, 0),
        }
    }

    /// The instance for the given parameters, or `None` when a side
    /// condition fails. Parameter counts must match [`Schema::arity`].
    pub fn instantiate(self, f: &[Formula], t: &[Term], v: &[String]) -> Option<Formula> {
        let ar = self.arity();
        assert!(f.len() == ar.formulas && t.len() == ar.terms && v.len() == ar.vars, "schema arity");
        let imp = Formula::implies;
        let c = |i: usize| f[i].clone();
        let tm = |i: usize| t[i].clone();
        Some(match self {
            Schema::K => imp(c(0), imp(c(1), c(0))),
            Schema::S => imp(imp(c(0), imp(c(1), c(2))), imp(imp(c(0), c(1)), imp(c(0), c(2)))),
            Schema::Contra => imp(imp(Formula::not(c(1)), Formula::not(c(0))), imp(c(0), c(1))),
            Schema::AndIntro => imp(c(0), imp(c(1), Formula::and(c(0), c(1)))),
            Schema::AndElimL => imp(Formula::and(c(0), c(1)), c(0)),
            Schema::AndElimR => imp(Formula::and(c(0), c(1)), c(1)),
            Schema::OrIntroL => imp(c(0), Formula::or(c(0), c(1))),
            Schema::OrIntroR => imp(c(1), Formula::or(c(0), c(1))),
            Schema::OrElim => imp(imp(c(0), c(2)), imp(imp(c(1), c(2)), imp(Formula::or(c(0), c(1)), c(2)))),
            Schema::ForallElim => imp(Formula::forall(&v[0], c(0)), f[0].subst(&v[0], &t[0])),
            Schema::ForallDist => imp(
                Formula::forall(&v[0], imp(c(0), c(1))),
                imp(Formula::forall(&v[0], c(0)), Formula::forall(&v[0], c(1))),
            ),
            Schema::Vacuous => {
                if f[0].has_free(&v[0]) {
                    return None;
                }
                imp(c(0), Formula::forall(&v[0], c(0)))
            }
            Schema::ExistsIntro => imp(f[0].subst(&v[0], &t[0]), Formula::exists(&v[0], c(0))),
            Schema::ExistsDefL => {
                imp(Formula::exists(&v[0], c(0)), Formula::not(Formula::forall(&v[0], Formula::not(c(0)))))
            }
            Schema::ExistsDefR => {
                imp(Formula::not(Formula::forall(&v[0], Formula::not(c(0)))), Formula::exists(&v[0], c(0)))
            }
            Schema::EqRefl => Formula::eq(tm(0), tm(0)),
            Schema::EqEuc => imp(Formula::eq(tm(0), tm(1)), imp(Formula::eq(tm(0), tm(2)), Formula::eq(tm(1), tm(2)))),
            Schema::EqSucc => imp(Formula::eq(tm(0), tm(1)), Formula::eq(Term::succ(tm(0)), Term::succ(tm(1)))),
            Schema::EqPlusL => imp(
                Formula::eq(tm(0), tm(1)),
                Formula::eq(Term::plus(tm(0), tm(2)), Term::plus(tm(1), tm(2))),
            ),
            Schema::EqPlusR => imp(
                Formula::eq(tm(0), tm(1)),
                Formula::eq(Term::plus(tm(2), tm(0)), Term::plus(tm(2), tm(1))),
            ),
            Schema::EqTimesL => imp(
                Formula::eq(tm(0), tm(1)),
                Formula::eq(Term::times(tm(0), tm(2)), Term::times(tm(1), tm(2))),
            ),
            Schema::EqTimesR => imp(
                Formula::eq(tm(0), tm(1)),
                Formula::eq(Term::times(tm(2), tm(0)), Term::times(tm(2), tm(1))),
            ),
            Schema::EqLeL => imp(Formula::eq(tm(0), tm(1)), imp(Formula::le(tm(0), tm(2)), Formula::le(tm(1), tm(2)))),
            Schema::EqLeR => imp(Formula::eq(tm(0), tm(1)), imp(Formula::le(tm(2), tm(0)), Formula::le(tm(2), tm(1)))),
        })
    }

    /// Whether `f` (bounded quantifiers already unfolded, closure prefix
    /// already stripped) is an instance of this schema.
    pub fn recognizes(self, f: &Formula) -> bool {
        recognize(self, f).unwrap_or(false)
    }
}

fn imp(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Implies(a, b) => Some((a, b)),
        _ => None,
    }
}

fn and(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::And(a, b) => Some((a, b)),
        _ => None,
    }
}

fn or(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Or(a, b) => Some((a, b)),
        _ => None,
    }
}

fn not(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Not(a) => Some(a),
        _ => None,
    }
}

fn all(f: &Formula) -> Option<(&str, &Formula)> {
    match f {
        Formula::Forall(v, a) => Some((v, a)),
        _ => None,
    }
}

fn ex(f: &Formula) -> Option<(&str, &Formula)> {
    match f {
        Formula::Exists(v, a) => Some((v, a)),
        _ => None,
    }
}

fn eq(f: &Formula) -> Option<(&Term, &Term)> {
    match f {
        Formula::Eq(a, b) => Some((a, b)),
        _ => None,
    }
}

fn le(f: &Formula) -> Option<(&Term, &Term)> {
    match f {
        Formula::Le(a, b) => Some((a, b)),
        _ => None,
    }
}

fn same(a: &Formula, b: &Formula) -> bool {
    a.alpha_eq(b)
}

/// Finds `t` with `a[x := t]` alpha-equal to `b`.
fn instance_of(a: &Formula, x: &str, b: &Formula) -> bool {
    let (na, nb) = (a.alpha_normal(), b.alpha_normal());
    let mut found: Option<Term> = None;
    if !match_formula(&na, &nb, x, &mut found) {
        return false;
    }
    let t = found.unwrap_or(Term::Zero);
    let mut vs = std::collections::BTreeSet::new();
    t.vars(&mut vs);
    if vs.iter().any(|v| v.starts_with('#')) {
        // The matched subterm mentions a bound variable: substitution would capture.
        return false;
    }
    same(&a.subst(x, &t), b)
}

fn match_term(a: &Term, b: &Term, x: &str, found: &mut Option<Term>) -> bool {
    match (a, b) {
        (Term::Var(v), _) if v == x => match found {
            Some(t) => t == b,
            None => {
                *found = Some(b.clone());
                true
            }
        },
        (Term::Zero, Term::Zero) => true,
        (Term::Var(u), Term::Var(w)) => u == w,
        (Term::Code(u), Term::Code(w)) => u == w,
        (Term::Num(u), Term::Num(w)) => u == w,
        (Term::Succ(p), Term::Succ(q)) => match_term(p, q, x, found),
        (Term::Plus(p1, p2), Term::Plus(q1, q2)) | (Term::Times(p1, p2), Term::Times(q1, q2)) => {
            match_term(p1, q1, x, found) && match_term(p2, q2, x, found)
        }
        _ => false,
    }
}

fn match_formula(a: &Formula, b: &Formula, x: &str, found: &mut Option<Term>) -> bool {
    match (a, b) {
        (Formula::Eq(p1, p2), Formula::Eq(q1, q2)) | (Formula::Le(p1, p2), Formula::Le(q1, q2)) => {
            match_term(p1, q1, x, found) && match_term(p2, q2, x, found)
        }
        (Formula::Pred(p, xs), Formula::Pred(q, ys)) => {
            p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(s, t)| match_term(s, t, x, found))
        }
        (Formula::Not(p), Formula::Not(q)) => match_formula(p, q, x, found),
        (Formula::And(p1, p2), Formula::And(q1, q2))
        | (Formula::Or(p1, p2), Formula::Or(q1, q2))
        | (Formula::Implies(p1, p2), Formula::Implies(q1, q2)) => {
            match_formula(p1, q1, x, found) && match_formula(p2, q2, x, found)
        }
        (Formula::Forall(u, p), Formula::Forall(w, q)) | (Formula::Exists(u, p), Formula::Exists(w, q)) => {
            u == w && match_formula(p, q, x, found)
        }
        (
            Formula::Bounded { kind: k1, var: u, bound: s, body: p },
            Formula::Bounded { kind: k2, var: w, bound: t, body: q },
        ) => k1 == k2 && u == w && match_term(s, t, x, found) && match_formula(p, q, x, found),
        _ => false,
    }
}

fn recognize(schema: Schema, f: &Formula) -> Option<bool> {
    Some(match schema {
        Schema::K => {
            let (a, r) = imp(f)?;
            let (_, a2) = imp(r)?;
            same(a, a2)
        }
        Schema::S => {
            let (l, r) = imp(f)?;
            let (a, bc) = imp(l)?;
            let (b, c) = imp(bc)?;
            let (ab, ac) = imp(r)?;
            let (a2, b2) = imp(ab)?;
            let (a3, c2) = imp(ac)?;
            same(a, a2) && same(a, a3) && same(b, b2) && same(c, c2)
        }
        Schema::Contra => {
            let (l, r) = imp(f)?;
            let (nb, na) = imp(l)?;
            let (a, b) = imp(r)?;
            same(not(na)?, a) && same(not(nb)?, b)
        }
        Schema::AndIntro => {
            let (a, r) = imp(f)?;
            let (b, ab) = imp(r)?;
            let (a2, b2) = and(ab)?;
            same(a, a2) && same(b, b2)
        }
        Schema::AndElimL | Schema::AndElimR => {
            let (l, r) = imp(f)?;
            let (a, b) = and(l)?;
            same(if schema == Schema::AndElimL { a } else { b }, r)
        }
        Schema::OrIntroL | Schema::OrIntroR => {
            let (l, r) = imp(f)?;
            let (a, b) = or(r)?;
            same(if schema == Schema::OrIntroL { a } else { b }, l)
        }
        Schema::OrElim => {
            let (ac, r) = imp(f)?;
            let (bc, r2) = imp(r)?;
            let (ab, c3) = imp(r2)?;
            let (a, c) = imp(ac)?;
            let (b, c2) = imp(bc)?;
            let (a2, b2) = or(ab)?;
            same(a, a2) && same(b, b2) && same(c, c2) && same(c, c3)
        }
        Schema::ForallElim => {
            let (l, r) = imp(f)?;
            let (x, a) = all(l)?;
            instance_of(a, x, r)
        }
        Schema::ForallDist => {
            let (l, r) = imp(f)?;
            let (x, ab) = all(l)?;
            let (a, b) = imp(ab)?;
            let (fa, fb) = imp(r)?;
            all(fa)?;
            all(fb)?;
            same(&Formula::forall(x, a.clone()), fa) && same(&Formula::forall(x, b.clone()), fb)
        }
        Schema::Vacuous => {
            let (a, r) = imp(f)?;
            let (x, a2) = all(r)?;
            !a.has_free(x) && same(a, a2)
        }
        Schema::ExistsIntro => {
            let (l, r) = imp(f)?;
            let (x, a) = ex(r)?;
            instance_of(a, x, l)
        }
        Schema::ExistsDefL | Schema::ExistsDefR => {
            let (l, r) = imp(f)?;
            let (e, n) = if schema == Schema::ExistsDefL { (l, r) } else { (r, l) };
            let (x, a) = ex(e)?;
            let (y, na) = all(not(n)?)?;
            same(&Formula::forall(x, Formula::not(a.clone())), &Formula::forall(y, na.clone()))
        }
        Schema::EqRefl => {
            let (s, t) = eq(f)?;
            s == t
        }
        Schema::EqEuc => {
            let (l, r) = imp(f)?;
            let (s, t) = eq(l)?;
            let (l2, r2) = imp(r)?;
            let (s2, u) = eq(l2)?;
            let (t2, u2) = eq(r2)?;
            s == s2 && t == t2 && u == u2
        }
        Schema::EqSucc => {
            let (l, r) = imp(f)?;
            let (s, t) = eq(l)?;
            match eq(r)? {
                (Term::Succ(s2), Term::Succ(t2)) => **s2 == *s && **t2 == *t,
                _ => false,
            }
        }
        Schema::EqPlusL | Schema::EqPlusR | Schema::EqTimesL | Schema::EqTimesR => {
            let (l, r) = imp(f)?;
            let (s, t) = eq(l)?;
            let (p, q) = eq(r)?;
            let parts = |x: &Term| -> Option<(Term, Term)> {
                match (schema, x) {
                    (Schema::EqPlusL | Schema::EqPlusR, Term::Plus(a, b)) => Some(((**a).clone(), (**b).clone())),
                    (Schema::EqTimesL | Schema::EqTimesR, Term::Times(a, b)) => Some(((**a).clone(), (**b).clone())),
                    _ => None,
                }
            };
            let ((p1, p2), (q1, q2)) = (parts(p)?, parts(q)?);
            if matches!(schema, Schema::EqPlusL | Schema::EqTimesL) {
                p1 == *s && q1 == *t && p2 == q2
            } else {
                p2 == *s && q2 == *t && p1 == q1
            }
        }
        Schema::EqLeL | Schema::EqLeR => {
            let (l, r) = imp(f)?;
            let (s, t) = eq(l)?;
            let (l2, r2) = imp(r)?;
            let (a1, b1) = le(l2)?;
            let (a2, b2) = le(r2)?;
            if schema == Schema::EqLeL {
                a1 == s && a2 == t && b1 == b2
            } else {
                b1 == s && b2 == t && a1 == a2
            }
        }
    })
}

/// Strips a leading block of universal quantifiers.
pub fn strip_closure(f: &Formula) -> &Formula {
    match f {
        Formula::Forall(_, a) => strip_closure(a),
        _ => f,
    }
}

/// `f` is a logical axiom of the named schema: some generalization of an
/// instance. Every prefix of the leading quantifier block is tried.
pub fn is_logical_axiom(schema: Schema, f: &Formula) -> bool {
    let mut cur = f;
    loop {
        if schema.recognizes(cur) {
            return true;
        }
        match cur {
            Formula::Forall(_, a) => cur = a,
            _ => return false,
        }
    }
}

/// Universal closure over the free variables, in sorted order.
pub fn universal_closure(f: &Formula) -> Formula {
    let vars: Vec<String> = f.free_vars().into_iter().collect();
    vars.iter().rev().fold(f.clone(), |acc, v| Formula::forall(v, acc))
}

/// `(A[0/x] and forall x (A -> A[S x / x])) -> forall x A`
pub fn induction_instance(a: &Formula, x: &str) -> Formula {
    let xv = Term::var(x);
    Formula::implies(
        Formula::and(
            a.subst(x, &Term::Zero),
            Formula::forall(x, Formula::implies(a.clone(), a.subst(x, &Term::succ(xv)))),
        ),
        Formula::forall(x, a.clone()),
    )
}

fn is_induction_instance(f: &Formula) -> bool {
    let Some((_, r)) = imp(f) else { return false };
    let Some((x, a)) = all(r) else { return false };
    same(f, &induction_instance(a, x))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub axioms: Vec<Formula>,
    pub induction: bool,
}

fn ax(text: &str) -> Formula {
    sexpr::parse_formula(text).expect("axiom text parses")
}

impl Theory {
    pub fn empty() -> Theory {
        Theory { name: "empty".into(), axioms: Vec::new(), induction: false }
    }

    /// Robinson arithmetic: the seven axioms of Q and a definition of `<=`.
    pub fn ra() -> Theory {
        Theory { name: "RA".into(), axioms: ra_axioms(), induction: false }
    }

    /// RA plus every induction instance.
    pub fn pa() -> Theory {
        Theory { name: "PA".into(), axioms: ra_axioms(), induction: true }
    }
}

pub fn ra_axioms() -> Vec<Formula> {
    [
        "(forall x (not (= (s x) 0)))",
        "(forall x (forall y (-> (= (s x) (s y)) (= x y))))",
        "(forall x (or (= x 0) (exists y (= x (s y)))))",
        "(forall x (= (+ x 0) x))",
        "(forall x (forall y (= (+ x (s y)) (s (+ x y)))))",
        "(forall x (= (* x 0) 0))",
        "(forall x (forall y (= (* x (s y)) (+ (* x y) x))))",
        "(forall x (forall y (and (-> (<= x y) (exists z (= (+ z x) y))) (-> (exists z (= (+ z x) y)) (<= x y)))))",
    ]
    .iter()
    .map(|t| ax(t))
    .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Justification {
    Premise(usize),
    Axiom(usize),
    Logical(Schema),
    Induction,
    Mp(usize, usize),
    Gen(usize, String),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Premise(i) => write!(f, "(premise {i})"),
            Justification::Axiom(i) => write!(f, "(axiom {i})"),
            Justification::Logical(s) => write!(f, "(logical {})", s.name()),
            Justification::Induction => write!(f, "(induction)"),
            Justification::Mp(i, j) => write!(f, "(mp {i} {j})"),
            Justification::Gen(i, v) => write!(f, "(gen {i} {v})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Line {
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Proof {
    pub lines: Vec<Line>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofParseError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("bad proof: {0}")]
    Shape(String),
}

fn index_of(e: &SExpr) -> Result<usize, ProofParseError> {
    e.atom()
        .and_then(|a| if a == "0" || !a.starts_with('0') { a.parse().ok() } else { None })
        .ok_or_else(|| ProofParseError::Shape("expected a line index".into()))
}

fn justification_from(e: &SExpr) -> Result<Justification, ProofParseError> {
    let shape = |m: &str| ProofParseError::Shape(m.to_string());
    let SExpr::List(items) = e else { return Err(shape("justification must be a list")) };
    let head = items.first().and_then(SExpr::atom).ok_or_else(|| shape("empty justification"))?;
    let args = &items[1..];
    let want = |n: usize| if args.len() == n { Ok(()) } else { Err(shape(&format!("`{head}` takes {n} argument(s)"))) };
    Ok(match head {
        "premise" => {
            want(1)?;
            Justification::Premise(index_of(&args[0])?)
        }
        "axiom" => {
            want(1)?;
            Justification::Axiom(index_of(&args[0])?)
        }
        "logical" => {
            want(1)?;
            let name = args[0].atom().ok_or_else(|| shape("schema name"))?;
            Justification::Logical(Schema::from_name(name).ok_or_else(|| shape(&format!("unknown schema `{name}`")))?)
        }
        "induction" => {
            want(0)?;
            Justification::Induction
        }
        "mp" => {
            want(2)?;
            Justification::Mp(index_of(&args[0])?, index_of(&args[1])?)
        }
        "gen" => {
            want(2)?;
            let v = args[1].atom().filter(|a| is_var_name(a)).ok_or_else(|| shape("variable"))?;
            Justification::Gen(index_of(&args[0])?, v.to_string())
        }
        _ => return Err(shape(&format!("unknown rule `{head}`"))),
    })
}

impl Proof {
    pub fn new(lines: Vec<Line>) -> Proof {
        Proof { lines }
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("(proof");
        for l in &self.lines {
            s.push_str("\n  (line ");
            sexpr::write_formula(&l.formula, &mut s);
            s.push(' ');
            s.push_str(&l.just.to_string());
            s.push(')');
        }
        s.push_str(")\n");
        s
    }

    pub fn parse(text: &str) -> Result<Proof, ProofParseError> {
        let shape = |m: &str| ProofParseError::Shape(m.to_string());
        let e = sexpr::parse_one(text)?;
        let SExpr::List(items) = &e else { return Err(shape("expected (proof ...)")) };
        if items.first().and_then(SExpr::atom) != Some("proof") {
            return Err(shape("expected (proof ...)"));
        }
        let mut lines = Vec::new();
        for it in &items[1..] {
            let SExpr::List(parts) = it else { return Err(shape("expected (line ...)")) };
            if parts.len() != 3 || parts[0].atom() != Some("line") {
                return Err(shape("expected (line FORMULA JUSTIFICATION)"));
            }
            lines.push(Line { formula: formula_from_sexpr(&parts[1])?, just: justification_from(&parts[2])? });
        }
        Ok(Proof { lines })
    }

    /// Premise indices cited anywhere in the proof.
    pub fn premises_used(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .lines
            .iter()
            .filter_map(|l| match l.just {
                Justification::Premise(i) => Some(i),
                _ => None,
            })
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofVerdict {
    Valid(Formula),
    Invalid { line: usize, reason: String },
}

impl ProofVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, ProofVerdict::Valid(_))
    }
}

/// Checks every line in order and reports the first unjustified one.
pub fn check_proof(p: &Proof, theory: &Theory, premises: &[Formula]) -> ProofVerdict {
    if p.lines.is_empty() {
        return ProofVerdict::Invalid { line: 0, reason: "empty proof".into() };
    }
    let expanded: Vec<Formula> = p.lines.iter().map(|l| l.formula.expand_bounded()).collect();
    for (n, line) in p.lines.iter().enumerate() {
        if let Err(reason) = check_line(n, &line.just, &expanded, theory, premises) {
            return ProofVerdict::Invalid { line: n, reason };
        }
    }
    ProofVerdict::Valid(p.lines.last().unwrap().formula.clone())
}

fn check_line(n: usize, just: &Justification, lines: &[Formula], theory: &Theory, premises: &[Formula]) -> Result<(), String> {
    let f = &lines[n];
    let earlier = |i: usize| {
        if i < n {
            Ok(&lines[i])
        } else {
            Err(format!("cites line {i}, which is not earlier"))
        }
    };
    match just {
        Justification::Premise(i) => {
            let p = premises.get(*i).ok_or_else(|| format!("no premise {i}"))?;
            if !same(&p.expand_bounded(), f) {
                return Err(format!("line differs from premise {i}"));
            }
        }
        Justification::Axiom(i) => {
            let a = theory.axioms.get(*i).ok_or_else(|| format!("{} has no axiom {i}", theory.name))?;
            if !same(&a.expand_bounded(), f) {
                return Err(format!("line differs from axiom {i}"));
            }
        }
        Justification::Logical(s) => {
            if !is_logical_axiom(*s, f) {
                return Err(format!("not an instance of schema {}", s.name()));
            }
        }
        Justification::Induction => {
            if !theory.induction {
                return Err(format!("{} has no induction schema", theory.name));
            }
            if !is_induction_instance(strip_closure(f)) && !is_induction_instance(f) {
                return Err("not an induction instance".into());
            }
        }
        Justification::Mp(i, j) => {
            let a = earlier(*i)?;
            let ab = earlier(*j)?;
            match ab {
                Formula::Implies(l, r) if same(l, a) && same(r, f) => {}
                _ => return Err(format!("line {j} is not line {i} -> this line")),
            }
        }
        Justification::Gen(i, v) => {
            let a = earlier(*i)?;
            if !same(&Formula::forall(v, a.clone()), f) {
                return Err(format!("not the generalization of line {i} over {v}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::sexpr::parse_formula;

    fn f(t: &str) -> Formula {
        parse_formula(t).unwrap()
    }

    fn line(t: &str, just: Justification) -> Line {
        Line { formula: f(t), just }
    }

    #[test]
    fn modus_ponens_from_premises() {
        let prem = vec![f("(= 0 0)"), f("(-> (= 0 0) (<= 0 0))")];
        let p = Proof::new(vec![
            line("(= 0 0)", Justification::Premise(0)),
            line("(-> (= 0 0) (<= 0 0))", Justification::Premise(1)),
            line("(<= 0 0)", Justification::Mp(0, 1)),
        ]);
        assert_eq!(check_proof(&p, &Theory::empty(), &prem), ProofVerdict::Valid(f("(<= 0 0)")));
    }

    #[test]
    fn forward_citation_is_rejected() {
        let prem = vec![f("(= 0 0)")];
        let p = Proof::new(vec![
            line("(= 0 0)", Justification::Premise(0)),
            line("(= 0 0)", Justification::Mp(0, 2)),
            line("(= 0 0)", Justification::Premise(0)),
        ]);
        assert!(matches!(check_proof(&p, &Theory::empty(), &prem), ProofVerdict::Invalid { line: 1, .. }));
    }

    #[test]
    fn ra_axiom_as_one_line_proof() {
        let p = Proof::new(vec![line("(forall z (not (= (s z) 0)))", Justification::Axiom(0))]);
        assert!(check_proof(&p, &Theory::ra(), &[]).is_valid());
        assert!(!check_proof(&p, &Theory::empty(), &[]).is_valid());
        assert_eq!(ra_axioms().len(), 8);
        assert!(ra_axioms().iter().all(Formula::is_closed));
    }

    #[test]
    fn quantifier_schemas() {
        let fe = f("(-> (forall x (<= x (+ x y))) (<= (s 0) (+ (s 0) y)))");
        assert!(is_logical_axiom(Schema::ForallElim, &fe));
        let bad = f("(-> (forall x (<= x (+ x y))) (<= (s 0) (+ 0 y)))");
        assert!(!is_logical_axiom(Schema::ForallElim, &bad));
        // Substituting y for x under a binder on y would capture.
        let capture = f("(-> (forall x (exists y (= x y))) (exists y (= y y)))");
        assert!(!is_logical_axiom(Schema::ForallElim, &capture));
        let ok = f("(-> (forall x (exists y (= x y))) (exists z (= y z)))");
        assert!(is_logical_axiom(Schema::ForallElim, &ok));
        assert!(is_logical_axiom(Schema::Vacuous, &f("(forall y (-> (= 0 0) (forall x (= 0 0))))")));
        assert!(!is_logical_axiom(Schema::Vacuous, &f("(-> (= x 0) (forall x (= x 0)))")));
    }

    #[test]
    fn generalization_and_bounded_lines() {
        let p = Proof::new(vec![
            line("(= x x)", Justification::Logical(Schema::EqRefl)),
            line("(forall x (= x x))", Justification::Gen(0, "x".into())),
            line("(ble y 0 (= y y))", Justification::Logical(Schema::K)),
        ]);
        // Line 2 unfolds to an implication, but not a K instance.
        assert!(matches!(check_proof(&p, &Theory::empty(), &[]), ProofVerdict::Invalid { line: 2, .. }));
    }

    #[test]
    fn induction_only_in_pa() {
        let inst = induction_instance(&f("(= (+ 0 x) x)"), "x");
        let p = Proof::new(vec![Line { formula: inst, just: Justification::Induction }]);
        assert!(check_proof(&p, &Theory::pa(), &[]).is_valid());
        assert!(!check_proof(&p, &Theory::ra(), &[]).is_valid());
    }

    #[test]
    fn text_round_trip() {
        let p = Proof::new(vec![
            line("(= x x)", Justification::Logical(Schema::EqRefl)),
            line("(forall x (= x x))", Justification::Gen(0, "x".into())),
        ]);
        assert_eq!(Proof::parse(&p.to_text()).unwrap(), p);
        assert!(Proof::parse("(proof (line (= 0 0) (mp 01 2)))").is_err());
    }
}
