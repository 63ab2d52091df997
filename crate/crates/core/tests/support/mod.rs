//! Independent oracles for the integration tests. None of these reuse the
//! library's evaluator, solvers or code decoders.
#![allow(dead_code)]

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use stablecomp::encoding::{Str, Sym};
use stablecomp::logic::{BoundKind, Formula, Term};
use stablecomp::stabilization::{Assertion, Sign};
use stablecomp::turing::{step, Machine, Tape, TotalState, OUTPUT};

/// The (M, n)-stability definition read literally: some `m <= n` asserts
/// `b` with `+` and no index in `m..=n` asserts `b` with `-`.
pub fn brute_n_stable<B: PartialEq>(s: &[Assertion<B>], b: &B, n: usize) -> bool {
    (0..=n).any(|m| s[m].item == *b && s[m].sign == Sign::Plus && (m..=n).all(|k| !(s[k].item == *b && s[k].sign == Sign::Minus)))
}

fn term(t: &Term, env: &[(String, BigUint)]) -> BigUint {
    match t {
        Term::Zero => BigUint::zero(),
        Term::Succ(a) => term(a, env) + 1u32,
        Term::Plus(a, b) => term(a, env) + term(b, env),
        Term::Times(a, b) => term(a, env) * term(b, env),
        Term::Var(v) => env.iter().rev().find(|(n, _)| n == v).map(|(_, x)| x.clone()).expect("bound variable"),
        Term::Code(s) => s.to_number(),
        Term::Num(n) => n.clone(),
    }
}

/// Truth of a bounded formula by exhaustive search over every bound.
/// `None` once more than `budget` atomic comparisons have been made.
pub fn naive_eval(f: &Formula, env: &mut Vec<(String, BigUint)>, budget: &mut u64) -> Option<bool> {
    Some(match f {
        Formula::Eq(a, b) | Formula::Le(a, b) => {
            *budget = budget.checked_sub(1)?;
            let (x, y) = (term(a, env), term(b, env));
            if matches!(f, Formula::Eq(..)) {
                x == y
            } else {
                x <= y
            }
        }
        Formula::Not(a) => !naive_eval(a, env, budget)?,
        Formula::And(a, b) => naive_eval(a, env, budget)? && naive_eval(b, env, budget)?,
        Formula::Or(a, b) => naive_eval(a, env, budget)? || naive_eval(b, env, budget)?,
        Formula::Implies(a, b) => !naive_eval(a, env, budget)? || naive_eval(b, env, budget)?,
        Formula::Bounded { kind, var, bound, body } => {
            let top = term(bound, env).to_u64()?;
            let exists = matches!(kind, BoundKind::ExLe | BoundKind::ExLt);
            let end = match kind {
                BoundKind::AllLe | BoundKind::ExLe => top.checked_add(1)?,
                BoundKind::AllLt | BoundKind::ExLt => top,
            };
            for v in 0..end {
                env.push((var.clone(), BigUint::from(v)));
                let r = naive_eval(body, env, budget);
                env.pop();
                if r? == exists {
                    return Some(exists);
                }
            }
            !exists
        }
        other => panic!("naive evaluator handles bounded formulas only: {other}"),
    })
}

/// `phi(x)` for the one free variable `var`; `None` past the budget.
pub fn naive_holds_at(phi: &Formula, var: &str, x: u64, budget: u64) -> Option<bool> {
    let mut budget = budget;
    naive_eval(phi, &mut vec![(var.to_string(), BigUint::from(x))], &mut budget)
}

/// Integer-root scan: every root of `a_0 + ... + a_d x^d` with `a_d != 0`
/// lies in `|x| <= 1 + max |a_i / a_d|`.
pub fn has_integer_root(coeffs: &[i64]) -> bool {
    let d = coeffs.iter().rposition(|c| *c != 0).expect("nonzero polynomial");
    let lead = coeffs[d].unsigned_abs() as i128;
    let bound = 1 + coeffs[..d].iter().map(|c| (c.unsigned_abs() as i128 + lead - 1) / lead).max().unwrap_or(0);
    (-bound..=bound).any(|x| coeffs.iter().rev().fold(0i128, |acc, c| acc * x + *c as i128) == 0)
}

// Configuration layout, restated from the documented table: state digit
// radix 16, then three head digits and three tape digits of radix 3^15.
// Heads are stored as 3^(h+7) - 1, cells low position first with
// 0 -> 0, 1 -> 1, b -> 2.
const HALF: i64 = 7;
const CELLS: u32 = 15;

fn radix() -> BigUint {
    BigUint::from(3u32).pow(CELLS)
}

pub fn config_bound() -> BigUint {
    BigUint::from(16u32) * radix().pow(6)
}

pub fn decode_config(m: &Machine, code: &BigUint) -> Option<TotalState> {
    if *code >= config_bound() {
        return None;
    }
    let (mut rest, q) = code.div_rem(&BigUint::from(16u32));
    let state = q.to_usize()?;
    if state >= m.states.len() {
        return None;
    }
    let mut digits = Vec::new();
    for _ in 0..6 {
        let (hi, d) = rest.div_rem(&radix());
        digits.push(d);
        rest = hi;
    }
    let mut heads = [0i64; 3];
    for t in 0..3 {
        let mut p = &digits[t] + 1u32;
        let mut e = 0i64;
        while (&p % 3u32).is_zero() {
            p /= 3u32;
            e += 1;
        }
        if p != BigUint::from(1u32) || e >= CELLS as i64 {
            return None;
        }
        heads[t] = e - HALF;
    }
    let mut tapes: [Tape; 3] = Default::default();
    for t in 0..3 {
        let mut v = digits[3 + t].clone();
        for pos in -HALF..=HALF {
            let (hi, c) = v.div_rem(&BigUint::from(3u32));
            match c.to_u32().unwrap() {
                0 => {
                    tapes[t].insert(pos, Sym::Zero);
                }
                1 => {
                    tapes[t].insert(pos, Sym::One);
                }
                _ => {}
            }
            v = hi;
        }
    }
    Some(TotalState { tapes, heads, state })
}

pub fn decode_computation(m: &Machine, code: &BigUint) -> Option<Vec<TotalState>> {
    let (mut rest, k) = code.div_rem(&BigUint::from(16u32));
    let k = k.to_usize()?;
    if !(1..=8).contains(&k) {
        return None;
    }
    let mut out = Vec::new();
    for i in 0..k {
        let (hi, d) = if i + 1 == k { (BigUint::zero(), rest.clone()) } else { rest.div_rem(&config_bound()) };
        out.push(decode_config(m, &d)?);
        rest = hi;
    }
    Some(out)
}

/// Simulator truth of `Step_m(x, y)`.
pub fn step_truth(m: &Machine, x: &BigUint, y: &BigUint) -> bool {
    match (decode_config(m, x), decode_config(m, y)) {
        (Some(a), Some(b)) => step(m, &a) == b,
        _ => false,
    }
}

/// Simulator truth of `Comp_m(c, x, y)`.
pub fn comp_truth(m: &Machine, c: &BigUint, x: &BigUint, y: &BigUint) -> bool {
    let (Some(seq), Some(input)) = (decode_computation(m, c), Str::from_number(x)) else { return false };
    if seq[0] != TotalState::initial(m, &input) {
        return false;
    }
    for w in seq.windows(2) {
        if m.is_final(w[0].state) || step(m, &w[0]) != w[1] {
            return false;
        }
    }
    let last = seq.last().unwrap();
    m.is_final(last.state) && last.state != m.reject && last.tape_contents(OUTPUT).to_number() == *y
}
