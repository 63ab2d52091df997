//! Truth in the standard model for formulas whose quantifiers are all
//! bounded. Unbounded quantifiers are searched upwards from 0 until a
//! witness or counterexample turns up, or the fuel runs out.
//!
//! Existentials whose body starts with an equation that is linear
//! in the quantified variable are solved instead of searched. The same
//! applies to two nested existentials whose first equation fixes both
//! variables as a quotient and remainder. Everything else is evaluated by
//! exhaustive search, paid for out of an explicit fuel budget.

use std::cell::Cell;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("out of fuel")]
    OutOfFuel,
    #[error("free variable `{0}`")]
    FreeVariable(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{name}` failed: {msg}")]
    Predicate { name: String, msg: String },
}

/// Interpretation of defined predicates.
pub trait Predicates {
    /// `None` when the predicate is unknown.
    fn eval(&self, name: &str, args: &[BigUint]) -> Option<Result<bool, String>>;
}

pub struct NoPredicates;

impl Predicates for NoPredicates {
    fn eval(&self, _name: &str, _args: &[BigUint]) -> Option<Result<bool, String>> {
        None
    }
}

/// Variable assignment; later bindings shadow earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Env(Vec<(String, BigUint)>);

impl Env {
    pub fn new() -> Env {
        Env(Vec::new())
    }

    pub fn with(mut self, name: &str, v: impl Into<BigUint>) -> Env {
        self.0.push((name.to_string(), v.into()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&BigUint> {
        self.0.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    fn push(&mut self, name: &str, v: BigUint) {
        self.0.push((name.to_string(), v));
    }

    fn pop(&mut self) {
        self.0.pop();
    }
}

pub fn eval_term(t: &Term, env: &Env) -> Result<BigUint, EvalError> {
    Ok(match t {
        Term::Zero => BigUint::zero(),
        Term::Succ(a) => eval_term(a, env)? + 1u32,
        Term::Plus(a, b) => eval_term(a, env)? + eval_term(b, env)?,
        Term::Times(a, b) => {
            let x = eval_term(a, env)?;
            if x.is_zero() {
                return Ok(x);
            }
            x * eval_term(b, env)?
        }
        Term::Var(v) => env.get(v).cloned().ok_or_else(|| EvalError::FreeVariable(v.clone()))?,
        Term::Code(s) => s.to_number(),
        Term::Num(n) => n.clone(),
    })
}

/// `a1 * v1 + a2 * v2 + b`, all other variables already substituted.
#[derive(Debug, Clone)]
struct Lin {
    a1: BigInt,
    a2: BigInt,
    b: BigInt,
}

impl Lin {
    fn constant(b: BigInt) -> Lin {
        Lin { a1: BigInt::zero(), a2: BigInt::zero(), b }
    }

    fn is_constant(&self) -> bool {
        self.a1.is_zero() && self.a2.is_zero()
    }

    fn add(self, o: Lin) -> Lin {
        Lin { a1: self.a1 + o.a1, a2: self.a2 + o.a2, b: self.b + o.b }
    }

    fn sub(self, o: Lin) -> Lin {
        Lin { a1: self.a1 - o.a1, a2: self.a2 - o.a2, b: self.b - o.b }
    }

    fn scale(self, k: &BigInt) -> Lin {
        Lin { a1: self.a1 * k, a2: self.a2 * k, b: self.b * k }
    }
}

fn linear(t: &Term, env: &Env, v1: &str, v2: Option<&str>) -> Option<Lin> {
    Some(match t {
        Term::Zero => Lin::constant(BigInt::zero()),
        Term::Succ(a) => linear(a, env, v1, v2)?.add(Lin::constant(BigInt::one())),
        Term::Plus(a, b) => linear(a, env, v1, v2)?.add(linear(b, env, v1, v2)?),
        Term::Times(a, b) => {
            let x = linear(a, env, v1, v2)?;
            let y = linear(b, env, v1, v2)?;
            if x.is_constant() {
                y.scale(&x.b)
            } else if y.is_constant() {
                x.scale(&y.b)
            } else {
                return None;
            }
        }
        Term::Var(v) if v == v1 => Lin { a1: BigInt::one(), a2: BigInt::zero(), b: BigInt::zero() },
        Term::Var(v) if Some(v.as_str()) == v2 => Lin { a1: BigInt::zero(), a2: BigInt::one(), b: BigInt::zero() },
        Term::Var(v) => Lin::constant(BigInt::from(env.get(v)?.clone())),
        Term::Code(s) => Lin::constant(BigInt::from(s.to_number())),
        Term::Num(n) => Lin::constant(BigInt::from(n.clone())),
    })
}

fn first_conjunct(f: &Formula) -> &Formula {
    match f {
        Formula::And(a, _) => first_conjunct(a),
        _ => f,
    }
}

fn to_nat(x: BigInt) -> Option<BigUint> {
    if x.is_negative() {
        None
    } else {
        x.to_biguint()
    }
}

pub struct Evaluator<'a> {
    preds: &'a dyn Predicates,
    fuel: Cell<u64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(preds: &'a dyn Predicates, fuel: u64) -> Self {
        Evaluator { preds, fuel: Cell::new(fuel) }
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel.get()
    }

    fn burn(&self) -> Result<(), EvalError> {
        let f = self.fuel.get();
        if f == 0 {
            return Err(EvalError::OutOfFuel);
        }
        self.fuel.set(f - 1);
        Ok(())
    }

    pub fn eval(&self, f: &Formula, env: &mut Env) -> Result<bool, EvalError> {
        self.burn()?;
        match f {
            Formula::Eq(a, b) => Ok(eval_term(a, env)? == eval_term(b, env)?),
            Formula::Le(a, b) => Ok(eval_term(a, env)? <= eval_term(b, env)?),
            Formula::Not(a) => Ok(!self.eval(a, env)?),
            Formula::And(a, b) => Ok(self.eval(a, env)? && self.eval(b, env)?),
            Formula::Or(a, b) => Ok(self.eval(a, env)? || self.eval(b, env)?),
            Formula::Implies(a, b) => Ok(!self.eval(a, env)? || self.eval(b, env)?),
            Formula::Forall(v, body) => self.search(v, body, env, false),
            Formula::Exists(v, body) => {
                if let Some(candidate) = self.solve_single(v, body, env) {
                    return match candidate {
                        Some(x) => self.with_binding(v, x, body, env),
                        None => Ok(false),
                    };
                }
                self.search(v, body, env, true)
            }
            Formula::Pred(name, args) => {
                let vals = args.iter().map(|a| eval_term(a, env)).collect::<Result<Vec<_>, _>>()?;
                match self.preds.eval(name, &vals) {
                    None => Err(EvalError::UnknownPredicate(name.clone())),
                    Some(Ok(b)) => Ok(b),
                    Some(Err(msg)) => Err(EvalError::Predicate { name: name.clone(), msg }),
                }
            }
            Formula::Bounded { kind, var, bound, body } => {
                let mut limit = eval_term(bound, env)?;
                if !kind.is_strict() {
                    limit += 1u32;
                }
                if kind.is_exists() {
                    self.exists_below(var, &limit, body, env)
                } else {
                    self.forall_below(var, &limit, body, env)
                }
            }
        }
    }

    fn with_binding(&self, var: &str, v: BigUint, body: &Formula, env: &mut Env) -> Result<bool, EvalError> {
        env.push(var, v);
        let r = self.eval(body, env);
        env.pop();
        r
    }

    /// Unbounded search for a value where the body equals `target`. Ends
    /// only by finding one or running out of fuel.
    fn search(&self, var: &str, body: &Formula, env: &mut Env, target: bool) -> Result<bool, EvalError> {
        let mut i = BigUint::zero();
        loop {
            if self.with_binding(var, i.clone(), body, env)? == target {
                return Ok(target);
            }
            i += 1u32;
        }
    }

    fn forall_below(&self, var: &str, limit: &BigUint, body: &Formula, env: &mut Env) -> Result<bool, EvalError> {
        let mut i = BigUint::zero();
        while &i < limit {
            if !self.with_binding(var, i.clone(), body, env)? {
                return Ok(false);
            }
            i += 1u32;
        }
        Ok(true)
    }

    fn exists_below(&self, var: &str, limit: &BigUint, body: &Formula, env: &mut Env) -> Result<bool, EvalError> {
        if let Some(candidate) = self.solve_single(var, body, env) {
            return match candidate {
                Some(v) if &v < limit => self.with_binding(var, v, body, env),
                _ => Ok(false),
            };
        }
        if let Some(candidate) = self.solve_division(var, body, env)? {
            return match candidate {
                Some(v) if &v < limit => self.with_binding(var, v, body, env),
                _ => Ok(false),
            };
        }
        let mut i = BigUint::zero();
        while &i < limit {
            if self.with_binding(var, i.clone(), body, env)? {
                return Ok(true);
            }
            i += 1u32;
        }
        Ok(false)
    }

    /// `Some(None)`: the first equation has no solution, so the body is false
    /// for every value. `Some(Some(v))`: `v` is the only candidate. `None`:
    /// the shortcut does not apply.
    fn solve_single(&self, var: &str, body: &Formula, env: &Env) -> Option<Option<BigUint>> {
        let Formula::Eq(l, r) = first_conjunct(body) else { return None };
        let lin = linear(l, env, var, None)?.sub(linear(r, env, var, None)?);
        if lin.a1.is_zero() {
            return None;
        }
        let (q, rem) = (-lin.b).div_rem(&lin.a1);
        Some(if rem.is_zero() { to_nat(q) } else { None })
    }

    /// Outer variable of `exists v1 . exists v2 < K . (t = c * v1 + v2 + ...)`
    /// when `|c| >= K`, so that at most one value of `v1` can work.
    fn solve_division(&self, v1: &str, body: &Formula, env: &Env) -> Result<Option<Option<BigUint>>, EvalError> {
        let Formula::Bounded { kind, var: v2, bound, body: inner } = body else { return Ok(None) };
        if !kind.is_exists() || v2 == v1 || bound.has_var(v1) {
            return Ok(None);
        }
        let Ok(mut k) = eval_term(bound, env) else { return Ok(None) };
        if !kind.is_strict() {
            k += 1u32;
        }
        let Formula::Eq(l, r) = first_conjunct(inner) else { return Ok(None) };
        let (Some(a), Some(b)) = (linear(l, env, v1, Some(v2)), linear(r, env, v1, Some(v2))) else {
            return Ok(None);
        };
        let lin = a.sub(b);
        if lin.a2.is_zero() || lin.a1.is_zero() {
            return Ok(None);
        }
        // Normalize to c * v1 + v2 = t.
        let (c, rc) = lin.a1.div_rem(&lin.a2);
        let (t, rt) = (-lin.b.clone()).div_rem(&lin.a2);
        if !rc.is_zero() || !rt.is_zero() {
            return Ok(None);
        }
        let k = BigInt::from(k);
        if c.abs() < k || k.is_zero() {
            return Ok(None);
        }
        // v2 = t - c * v1 must lie in [0, k); with |c| >= k at most one v1 does.
        let v1_val = if c.sign() == BigSign::Plus { t.div_floor(&c) } else { (-t.clone()).div_ceil(&(-c.clone())) };
        let v2_val = &t - &c * &v1_val;
        if v2_val.is_negative() || v2_val >= k {
            return Ok(Some(None));
        }
        Ok(Some(to_nat(v1_val)))
    }
}

/// Evaluates a sentence built from bounded quantifiers and the standard
/// defined predicates.
pub fn eval_closed(sentence: &Formula, fuel: u64) -> Result<bool, EvalError> {
    let preds = crate::arithmetizer::StandardPredicates::default();
    eval_with(sentence, &Env::new(), &preds, fuel)
}

pub fn eval_with(f: &Formula, env: &Env, preds: &dyn Predicates, fuel: u64) -> Result<bool, EvalError> {
    let ev = Evaluator::new(preds, fuel);
    ev.eval(f, &mut env.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::sexpr::parse_formula;
    use crate::logic::Formula;

    fn ev(text: &str) -> Result<bool, EvalError> {
        eval_with(&parse_formula(text).unwrap(), &Env::new(), &NoPredicates, 1_000_000)
    }

    #[test]
    fn arithmetic_facts() {
        assert!(ev("(= (+ 2 3) 5)").unwrap());
        assert!(!ev("(= (* 2 3) 5)").unwrap());
        assert!(ev("(<= 3 3)").unwrap());
        assert!(ev("(< 2 3)").unwrap());
    }

    #[test]
    fn bounded_quantifiers() {
        assert!(ev("(ble x 10 (exle y x (or (= (* 2 y) x) (= (s (* 2 y)) x))))").unwrap());
        assert!(!ev("(exlt x 5 (= (* x x) 7))").unwrap());
        assert!(ev("(blt x 0 (= 0 1))").unwrap());
    }

    #[test]
    fn linear_solver_handles_huge_bounds() {
        // A search would need about 10^30 steps.
        let f = "(exle q 1000000000000000000000000000000 (= (* q 7) 7000000000000000000000000000000))";
        assert!(ev(f).unwrap());
        let g = "(exle q 1000000000000000000000000000000 (= (* q 7) 7000000000000000000000000000001))";
        assert!(!ev(g).unwrap());
    }

    #[test]
    fn division_solver() {
        let f = "(exle q 1000000000000000000000 (exlt r 1000 (and (= 123456789012345678 (+ (* q 1000) r)) (= r 678))))";
        assert!(ev(f).unwrap());
        let g = "(exle q 1000000000000000000000 (exlt r 1000 (and (= 123456789012345678 (+ (* q 1000) r)) (= r 677))))";
        assert!(!ev(g).unwrap());
    }

    #[test]
    fn unbounded_and_fuel() {
        assert_eq!(ev("(forall x (= x x))"), Err(EvalError::OutOfFuel));
        assert_eq!(ev("(forall x (<= x 5))"), Ok(false));
        assert_eq!(ev("(exists x (= (* x x) 49))"), Ok(true));
        assert_eq!(ev("(exists x (= (+ x 3) 2))"), Ok(false));
        let f = parse_formula("(ble x 1000000 (= x x))").unwrap();
        assert_eq!(eval_with(&f, &Env::new(), &NoPredicates, 100), Err(EvalError::OutOfFuel));
    }

    #[test]
    fn free_variables_need_bindings() {
        let f = parse_formula("(= x 3)").unwrap();
        assert!(matches!(eval_with(&f, &Env::new(), &NoPredicates, 10), Err(EvalError::FreeVariable(_))));
        assert!(eval_with(&f, &Env::new().with("x", 3u32), &NoPredicates, 10).unwrap());
        assert!(Formula::truth().is_closed());
    }
}
