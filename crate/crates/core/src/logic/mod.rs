//! First-order arithmetic over `0, S, +, *, =, <=`.

pub mod codec;
pub mod dovetail;
pub mod eval;
pub mod proof;
pub mod sexpr;

use std::collections::BTreeSet;
use std::fmt;

use crate::encoding::Str;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Zero,
    Succ(Box<Term>),
    Plus(Box<Term>, Box<Term>),
    Times(Box<Term>, Box<Term>),
    Var(String),
    /// Abbreviates the numeral of `s.to_number()`. Exported formulas use it
    /// instead of unary numerals; [`Term::expand_codes`] removes it.
    Code(Str),
    /// Abbreviates the numeral of a positive number; printed in decimal.
    Num(num_bigint::BigUint),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn succ(t: Term) -> Term {
        Term::Succ(Box::new(t))
    }

    pub fn plus(a: Term, b: Term) -> Term {
        Term::Plus(Box::new(a), Box::new(b))
    }

    pub fn times(a: Term, b: Term) -> Term {
        Term::Times(Box::new(a), Box::new(b))
    }

    /// Unary numeral.
    pub fn numeral(n: u64) -> Term {
        (0..n).fold(Term::Zero, |t, _| Term::succ(t))
    }

    /// A compact closed term denoting `n`: binary expansion in `0, S, +, *`.
    pub fn compact(n: &num_bigint::BigUint) -> Term {
        use num_traits::Zero;
        if n.is_zero() {
            return Term::Zero;
        }
        let bits = n.bits();
        let two = Term::succ(Term::succ(Term::Zero));
        let mut t: Option<Term> = None;
        for i in (0..bits).rev() {
            let bit = n.bit(i);
            t = Some(match t {
                None => Term::succ(Term::Zero),
                Some(acc) => {
                    let doubled = Term::times(two.clone(), acc);
                    if bit {
                        Term::succ(doubled)
                    } else {
                        doubled
                    }
                }
            });
        }
        t.unwrap()
    }

    pub fn num(n: u64) -> Term {
        Term::compact(&num_bigint::BigUint::from(n))
    }

    /// Decimal literal for `n`; `0` stays [`Term::Zero`].
    pub fn lit(n: &num_bigint::BigUint) -> Term {
        use num_traits::Zero;
        if n.is_zero() {
            Term::Zero
        } else {
            Term::Num(n.clone())
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Zero | Term::Code(_) | Term::Num(_) => {}
            Term::Succ(t) => t.vars(out),
            Term::Plus(a, b) | Term::Times(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Term::Var(v) => {
                out.insert(v.clone());
            }
        }
    }

    pub fn has_var(&self, name: &str) -> bool {
        match self {
            Term::Zero | Term::Code(_) | Term::Num(_) => false,
            Term::Succ(t) => t.has_var(name),
            Term::Plus(a, b) | Term::Times(a, b) => a.has_var(name) || b.has_var(name),
            Term::Var(v) => v == name,
        }
    }

    pub fn subst(&self, name: &str, by: &Term) -> Term {
        match self {
            Term::Zero | Term::Code(_) | Term::Num(_) => self.clone(),
            Term::Succ(t) => Term::succ(t.subst(name, by)),
            Term::Plus(a, b) => Term::plus(a.subst(name, by), b.subst(name, by)),
            Term::Times(a, b) => Term::times(a.subst(name, by), b.subst(name, by)),
            Term::Var(v) if v == name => by.clone(),
            Term::Var(_) => self.clone(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Zero | Term::Var(_) | Term::Code(_) | Term::Num(_) => 1,
            Term::Succ(t) => 1 + t.size(),
            Term::Plus(a, b) | Term::Times(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Replaces every code abbreviation by its compact binary term.
    pub fn expand_codes(&self) -> Term {
        match self {
            Term::Code(s) => Term::compact(&s.to_number()),
            Term::Num(n) => Term::compact(n),
            Term::Zero | Term::Var(_) => self.clone(),
            Term::Succ(t) => Term::succ(t.expand_codes()),
            Term::Plus(a, b) => Term::plus(a.expand_codes(), b.expand_codes()),
            Term::Times(a, b) => Term::times(a.expand_codes(), b.expand_codes()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    /// `forall x <= t`
    AllLe,
    /// `forall x < t`
    AllLt,
    /// `exists x <= t`
    ExLe,
    /// `exists x < t`
    ExLt,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [BoundKind::AllLe, BoundKind::AllLt, BoundKind::ExLe, BoundKind::ExLt];

    pub fn keyword(self) -> &'static str {
        match self {
            BoundKind::AllLe => "ble",
            BoundKind::AllLt => "blt",
            BoundKind::ExLe => "exle",
            BoundKind::ExLt => "exlt",
        }
    }

    pub fn from_keyword(s: &str) -> Option<BoundKind> {
        BoundKind::ALL.into_iter().find(|k| k.keyword() == s)
    }

    pub fn is_exists(self) -> bool {
        matches!(self, BoundKind::ExLe | BoundKind::ExLt)
    }

    pub fn is_strict(self) -> bool {
        matches!(self, BoundKind::AllLt | BoundKind::ExLt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Term, Term),
    Le(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Bounded { kind: BoundKind, var: String, bound: Term, body: Box<Formula> },
    /// A defined predicate, interpreted by the evaluator's registry.
    Pred(String, Vec<Term>),
}

/// A formula with no free variables.
pub type Sentence = Formula;

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Le(a, b)
    }

    /// `a < b`, written `S a <= b`.
    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Le(Term::succ(a), b)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(f))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(f))
    }

    pub fn bounded(kind: BoundKind, v: &str, bound: Term, body: Formula) -> Formula {
        Formula::Bounded { kind, var: v.to_string(), bound, body: Box::new(body) }
    }

    pub fn truth() -> Formula {
        Formula::eq(Term::Zero, Term::Zero)
    }

    pub fn falsity() -> Formula {
        Formula::not(Formula::truth())
    }

    /// Right-nested conjunction; the empty conjunction is `0 = 0`.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else { return Formula::truth() };
        while let Some(f) = items.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Right-nested disjunction; the empty disjunction is `not 0 = 0`.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else { return Formula::falsity() };
        while let Some(f) = items.pop() {
            acc = Formula::or(f, acc);
        }
        acc
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            let mut vs = BTreeSet::new();
            t.vars(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Formula::Eq(a, b) | Formula::Le(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Pred(_, args) => args.iter().for_each(|a| term(a, bound)),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
            Formula::Bounded { var, bound: t, body, .. } => {
                term(t, bound);
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_free(&self, name: &str) -> bool {
        match self {
            Formula::Eq(a, b) | Formula::Le(a, b) => a.has_var(name) || b.has_var(name),
            Formula::Pred(_, args) => args.iter().any(|a| a.has_var(name)),
            Formula::Not(f) => f.has_free(name),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.has_free(name) || b.has_free(name),
            Formula::Forall(v, f) | Formula::Exists(v, f) => v != name && f.has_free(name),
            Formula::Bounded { var, bound, body, .. } => bound.has_var(name) || (var != name && body.has_free(name)),
        }
    }

    /// Capture-avoiding substitution of `by` for the free occurrences of
    /// `name`.
    pub fn subst(&self, name: &str, by: &Term) -> Formula {
        let mut by_vars = BTreeSet::new();
        by.vars(&mut by_vars);
        self.subst_inner(name, by, &by_vars)
    }

    fn subst_inner(&self, name: &str, by: &Term, by_vars: &BTreeSet<String>) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.subst(name, by), b.subst(name, by)),
            Formula::Le(a, b) => Formula::Le(a.subst(name, by), b.subst(name, by)),
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| a.subst(name, by)).collect()),
            Formula::Not(f) => Formula::not(f.subst_inner(name, by, by_vars)),
            Formula::And(a, b) => Formula::and(a.subst_inner(name, by, by_vars), b.subst_inner(name, by, by_vars)),
            Formula::Or(a, b) => Formula::or(a.subst_inner(name, by, by_vars), b.subst_inner(name, by, by_vars)),
            Formula::Implies(a, b) => {
                Formula::implies(a.subst_inner(name, by, by_vars), b.subst_inner(name, by, by_vars))
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                let rebuild = |v: String, f: Formula| match self {
                    Formula::Forall(..) => Formula::Forall(v, Box::new(f)),
                    _ => Formula::Exists(v, Box::new(f)),
                };
                if v == name || !f.has_free(name) {
                    return self.clone();
                }
                if by_vars.contains(v) {
                    let fresh = fresh_var(v, |c| by_vars.contains(c) || f.has_free(c) || c == name);
                    let renamed = f.subst(v, &Term::Var(fresh.clone()));
                    return rebuild(fresh, renamed.subst_inner(name, by, by_vars));
                }
                rebuild(v.clone(), f.subst_inner(name, by, by_vars))
            }
            Formula::Bounded { kind, var, bound, body } => {
                let bound = bound.subst(name, by);
                if var == name || !body.has_free(name) {
                    return Formula::Bounded { kind: *kind, var: var.clone(), bound, body: body.clone() };
                }
                if by_vars.contains(var) {
                    let fresh = fresh_var(var, |c| by_vars.contains(c) || body.has_free(c) || c == name);
                    let renamed = body.subst(var, &Term::Var(fresh.clone()));
                    return Formula::Bounded {
                        kind: *kind,
                        var: fresh,
                        bound,
                        body: Box::new(renamed.subst_inner(name, by, by_vars)),
                    };
                }
                Formula::Bounded {
                    kind: *kind,
                    var: var.clone(),
                    bound,
                    body: Box::new(body.subst_inner(name, by, by_vars)),
                }
            }
        }
    }

    /// Unfolds bounded quantifiers into their definitions:
    /// `forall x <= t. p` is `forall x (x <= t -> p)`, the strict forms use
    /// `S x <= t`, and the existential forms use a conjunction.
    /// The bound must not mention the bound variable.
    pub fn expand_bounded(&self) -> Formula {
        match self {
            Formula::Eq(..) | Formula::Le(..) | Formula::Pred(..) => self.clone(),
            Formula::Not(f) => Formula::not(f.expand_bounded()),
            Formula::And(a, b) => Formula::and(a.expand_bounded(), b.expand_bounded()),
            Formula::Or(a, b) => Formula::or(a.expand_bounded(), b.expand_bounded()),
            Formula::Implies(a, b) => Formula::implies(a.expand_bounded(), b.expand_bounded()),
            Formula::Forall(v, f) => Formula::forall(v, f.expand_bounded()),
            Formula::Exists(v, f) => Formula::exists(v, f.expand_bounded()),
            Formula::Bounded { kind, var, bound, body } => {
                let x = Term::Var(var.clone());
                let guard = if kind.is_strict() { Formula::lt(x, bound.clone()) } else { Formula::le(x, bound.clone()) };
                let body = body.expand_bounded();
                if kind.is_exists() {
                    Formula::exists(var, Formula::and(guard, body))
                } else {
                    Formula::forall(var, Formula::implies(guard, body))
                }
            }
        }
    }

    /// Rename bound variables canonically so that alpha-equivalent formulas
    /// become structurally equal.
    pub fn alpha_normal(&self) -> Formula {
        self.normalize(&mut Vec::new())
    }

    fn normalize(&self, scope: &mut Vec<(String, String)>) -> Formula {
        let term = |t: &Term, scope: &Vec<(String, String)>| rename_term(t, scope);
        match self {
            Formula::Eq(a, b) => Formula::Eq(term(a, scope), term(b, scope)),
            Formula::Le(a, b) => Formula::Le(term(a, scope), term(b, scope)),
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| term(a, scope)).collect()),
            Formula::Not(f) => Formula::not(f.normalize(scope)),
            Formula::And(a, b) => Formula::and(a.normalize(scope), b.normalize(scope)),
            Formula::Or(a, b) => Formula::or(a.normalize(scope), b.normalize(scope)),
            Formula::Implies(a, b) => Formula::implies(a.normalize(scope), b.normalize(scope)),
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                let canon = format!("#{}", scope.len());
                scope.push((v.clone(), canon.clone()));
                let body = f.normalize(scope);
                scope.pop();
                match self {
                    Formula::Forall(..) => Formula::Forall(canon, Box::new(body)),
                    _ => Formula::Exists(canon, Box::new(body)),
                }
            }
            Formula::Bounded { kind, var, bound, body } => {
                let bound = term(bound, scope);
                let canon = format!("#{}", scope.len());
                scope.push((var.clone(), canon.clone()));
                let body = body.normalize(scope);
                scope.pop();
                Formula::Bounded { kind: *kind, var: canon, bound, body: Box::new(body) }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.alpha_normal() == other.alpha_normal()
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(a, b) | Formula::Le(a, b) => 1 + a.size() + b.size(),
            Formula::Pred(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::Bounded { bound, body, .. } => 1 + bound.size() + body.size(),
        }
    }

    /// Only bounded quantifiers, no defined predicates.
    pub fn is_delta0(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Le(..) => true,
            Formula::Pred(..) | Formula::Forall(..) | Formula::Exists(..) => false,
            Formula::Not(f) => f.is_delta0(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.is_delta0() && b.is_delta0(),
            Formula::Bounded { body, .. } => body.is_delta0(),
        }
    }

    pub fn expand_codes(&self) -> Formula {
        self.map_terms(&|t| t.expand_codes())
    }

    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::Eq(f(a), f(b)),
            Formula::Le(a, b) => Formula::Le(f(a), f(b)),
            Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(f).collect()),
            Formula::Not(x) => Formula::not(x.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::Forall(v, x) => Formula::forall(v, x.map_terms(f)),
            Formula::Exists(v, x) => Formula::exists(v, x.map_terms(f)),
            Formula::Bounded { kind, var, bound, body } => {
                Formula::Bounded { kind: *kind, var: var.clone(), bound: f(bound), body: Box::new(body.map_terms(f)) }
            }
        }
    }
}

fn rename_term(t: &Term, scope: &[(String, String)]) -> Term {
    match t {
        Term::Zero | Term::Code(_) | Term::Num(_) => t.clone(),
        Term::Succ(a) => Term::succ(rename_term(a, scope)),
        Term::Plus(a, b) => Term::plus(rename_term(a, scope), rename_term(b, scope)),
        Term::Times(a, b) => Term::times(rename_term(a, scope), rename_term(b, scope)),
        Term::Var(v) => match scope.iter().rev().find(|(orig, _)| orig == v) {
            Some((_, canon)) => Term::Var(canon.clone()),
            None => t.clone(),
        },
    }
}

/// `base` with primes appended until `taken` rejects it no longer.
pub fn fresh_var(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut v = format!("{base}'");
    while taken(&v) {
        v.push('\'');
    }
    v
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&sexpr::term_to_string(self))
    }
}

/// Closed formulas trace as sentences, others as formulas.
impl crate::stabilization::Traceable for Formula {
    fn trace_code(&self) -> Str {
        use crate::encoding::{encode, Value};
        let v = if self.is_closed() { Value::Sentence(self.clone()) } else { Value::Formula(self.clone()) };
        encode(&v).payload
    }
    fn human(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&sexpr::formula_to_string(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstituteError {
    #[error("expected exactly one free variable, found {0}")]
    ArityMismatch(usize),
}

/// Replaces the single free variable of `phi` by the numeral for `m`.
pub fn substitute(phi: &Formula, m: u64) -> Result<Sentence, SubstituteError> {
    let free = phi.free_vars();
    if free.len() != 1 {
        return Err(SubstituteError::ArityMismatch(free.len()));
    }
    let v = free.into_iter().next().unwrap();
    Ok(phi.subst(&v, &Term::numeral(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn substitution_avoids_capture() {
        // forall y (x = y)  with x := y  must not capture.
        let f = Formula::forall("y", Formula::eq(x(), Term::var("y")));
        let g = f.subst("x", &Term::var("y"));
        assert_eq!(g.free_vars(), BTreeSet::from(["y".to_string()]));
        assert!(g.alpha_eq(&Formula::forall("z", Formula::eq(Term::var("y"), Term::var("z")))));
    }

    #[test]
    fn bound_occurrences_are_not_replaced() {
        let f = Formula::exists("x", Formula::eq(x(), Term::Zero));
        assert_eq!(f.subst("x", &Term::Zero), f);
    }

    #[test]
    fn alpha_equivalence() {
        let a = Formula::forall("x", Formula::le(Term::Zero, x()));
        let b = Formula::forall("z", Formula::le(Term::Zero, Term::var("z")));
        assert!(a.alpha_eq(&b));
        let c = Formula::forall("z", Formula::le(Term::var("z"), Term::Zero));
        assert!(!a.alpha_eq(&c));
    }

    #[test]
    fn compact_numerals() {
        use num_bigint::BigUint;
        for n in 0..40u64 {
            let t = Term::num(n);
            assert_eq!(eval::eval_term(&t, &eval::Env::new()).unwrap(), BigUint::from(n));
        }
        assert_eq!(Term::numeral(3), Term::succ(Term::succ(Term::succ(Term::Zero))));
    }

    #[test]
    fn bounded_expansion() {
        let f = Formula::bounded(BoundKind::ExLt, "y", x(), Formula::eq(Term::var("y"), Term::Zero));
        let e = f.expand_bounded();
        let want = Formula::exists(
            "y",
            Formula::and(Formula::lt(Term::var("y"), x()), Formula::eq(Term::var("y"), Term::Zero)),
        );
        assert_eq!(e, want);
        assert_eq!(f.free_vars(), e.free_vars());
        assert!(f.is_delta0());
        assert!(!e.is_delta0());
    }
}
