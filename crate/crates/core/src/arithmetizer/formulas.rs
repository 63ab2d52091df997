//! Bounded formulas `Step_m(x, y)` and `Comp_m(c, x, y)` over
//! configuration codes (see [`super::config`]).
//!
//! Digits are unpacked with `exists hi <= n. exists d < R. n = hi * R + d`,
//! which the evaluator solves by division instead of search.

use num_bigint::BigUint;
use thiserror::Error;

use super::config::{config_bound, pow3, window_radix, CELLS, KMAX, K_RADIX, STATE_RADIX, W};
use crate::encoding::Sym;
use crate::logic::{BoundKind, Formula, Term};
use crate::machines::SYMS;
use crate::turing::{Action, Machine, Move};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("machine has {0} states; configuration codes allow at most 16")]
    TooManyStates(usize),
    #[error("state `{0}` uses a native step, which has no arithmetic translation")]
    NativeStep(String),
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn n(k: u64) -> Term {
    Term::lit(&BigUint::from(k))
}

fn big(k: &BigUint) -> Term {
    Term::lit(k)
}

fn exle(var: &str, bound: Term, body: Formula) -> Formula {
    Formula::bounded(BoundKind::ExLe, var, bound, body)
}

fn exlt(var: &str, bound: Term, body: Formula) -> Formula {
    Formula::bounded(BoundKind::ExLt, var, bound, body)
}

/// `exists hi <= num. exists d < radix. (num = hi * radix + d and body)`
fn split(num: Term, hi: &str, d: &str, radix: Term, body: Formula) -> Formula {
    exle(
        hi,
        num.clone(),
        exlt(d, radix.clone(), Formula::and(Formula::eq(num, Term::plus(Term::times(v(hi), radix), v(d))), body)),
    )
}

/// Names of the digits of an unpacked configuration.
#[derive(Debug, Clone)]
pub struct Digits {
    pub state: String,
    pub heads: [String; 3],
    pub tapes: [String; 3],
}

impl Digits {
    pub fn new(prefix: &str) -> Digits {
        Digits {
            state: format!("{prefix}q"),
            heads: [format!("{prefix}hi"), format!("{prefix}hc"), format!("{prefix}ho")],
            tapes: [format!("{prefix}ti"), format!("{prefix}tc"), format!("{prefix}to")],
        }
    }
}

/// Binds the digits of configuration code `code` and asserts `body`. The
/// top digit is range-checked, so the code is below the configuration
/// bound.
pub fn unpack(code: Term, prefix: &str, d: &Digits, body: Formula) -> Formula {
    let r = big(&window_radix());
    let rest = |i: usize| format!("{prefix}r{i}");
    let order: Vec<&String> = d.heads.iter().chain(d.tapes.iter()).collect();
    // Innermost: the last split leaves the top tape digit as `hi`.
    let top = order[5];
    let mut f = Formula::and(Formula::lt(v(top), r.clone()), body);
    f = split(v(&rest(5)), top, order[4], r.clone(), f);
    for i in (0..4).rev() {
        f = split(v(&rest(i + 1)), &rest(i + 2), order[i], r.clone(), f);
    }
    split(code, &rest(1), &d.state, n(STATE_RADIX), f)
}

/// Every head digit has the form `3^p - 1` and the state exists.
fn valid(m: &Machine, d: &Digits) -> Formula {
    let heads = d.heads.iter().map(|h| Formula::or_all((0..CELLS).map(|e| Formula::eq(v(h), big(&(pow3(e) - 1u32))))));
    Formula::and_all(std::iter::once(Formula::lt(v(&d.state), n(m.states.len() as u64))).chain(heads))
}

/// Binds `r` to the cell of tape `tape` under head `head` (both digit
/// variables).
fn read(tape: &str, head: &str, r: &str, tmp: &str, body: Formula) -> Formula {
    let p = Term::succ(v(head));
    let hi = format!("{tmp}h");
    let rest = format!("{tmp}r");
    let lo = format!("{tmp}l");
    let inner = exlt(
        r,
        n(3),
        exlt(&lo, p.clone(), Formula::and(Formula::eq(v(&rest), Term::plus(Term::times(v(r), p.clone()), v(&lo))), body)),
    );
    exle(
        &hi,
        v(tape),
        exlt(
            &rest,
            Term::times(n(3), p.clone()),
            Formula::and(Formula::eq(v(tape), Term::plus(Term::times(v(&hi), Term::times(n(3), p)), v(&rest))), inner),
        ),
    )
}

/// Horner form of a configuration code from digit terms.
pub fn config_term(state: Term, heads: [Term; 3], tapes: [Term; 3]) -> Term {
    let r = big(&window_radix());
    let mut acc = tapes[2].clone();
    for t in [tapes[1].clone(), tapes[0].clone(), heads[2].clone(), heads[1].clone(), heads[0].clone()] {
        acc = Term::plus(t, Term::times(r.clone(), acc));
    }
    Term::plus(state, Term::times(n(STATE_RADIX), acc))
}

fn digit(s: Sym) -> u64 {
    super::config::cell_digit(s) as u64
}

/// `y` codes the successor of the unpacked configuration `x` under
/// `action`, with reads `reads`.
fn effect(x: &Digits, reads: [Sym; 3], action: Option<&Action>, reject: usize, y: &str) -> Formula {
    let Some(Action::Table { write_c, write_o, moves, next }) = action else {
        // No instruction: move to the reject state, nothing else changes.
        let heads = x.heads.clone().map(|h| v(&h));
        let tapes = x.tapes.clone().map(|t| v(&t));
        return Formula::eq(v(y), config_term(n(reject as u64), heads, tapes));
    };
    let limit = big(&(pow3(CELLS - 1) - 1u32));
    let mut conds = Vec::new();
    let mut binders: Vec<(String, Formula)> = Vec::new();
    let mut heads = Vec::new();
    for t in 0..3 {
        let a = v(&x.heads[t]);
        match moves[t] {
            Move::Stay => heads.push(a),
            Move::Right => {
                let moved = Term::plus(Term::times(n(3), a), n(2));
                conds.push(Formula::le(moved.clone(), limit.clone()));
                heads.push(moved);
            }
            Move::Left => {
                let name = format!("{y}n{t}");
                binders.push((name.clone(), Formula::eq(Term::times(n(3), Term::succ(v(&name))), Term::succ(a))));
                heads.push(v(&name));
            }
        }
    }
    let mut tapes = vec![v(&x.tapes[0])];
    for (t, w) in [(1usize, *write_c), (2, *write_o)] {
        if w == reads[t] {
            tapes.push(v(&x.tapes[t]));
        } else {
            let name = format!("{y}w{t}");
            let p = Term::succ(v(&x.heads[t]));
            let lhs = Term::plus(v(&name), Term::times(n(digit(reads[t])), p.clone()));
            let rhs = Term::plus(v(&x.tapes[t]), Term::times(n(digit(w)), p));
            binders.push((name.clone(), Formula::eq(lhs, rhs)));
            tapes.push(v(&name));
        }
    }
    let heads: [Term; 3] = heads.try_into().unwrap();
    let tapes: [Term; 3] = tapes.try_into().unwrap();
    conds.push(Formula::eq(v(y), config_term(n(*next as u64), heads, tapes)));
    let mut f = Formula::and_all(conds);
    let r = big(&window_radix());
    for (name, eq) in binders.into_iter().rev() {
        f = exlt(&name, r.clone(), Formula::and(eq, f));
    }
    f
}

fn check(m: &Machine) -> Result<(), ArithError> {
    if m.states.len() > STATE_RADIX as usize {
        return Err(ArithError::TooManyStates(m.states.len()));
    }
    for ((q, _), a) in &m.instructions {
        if matches!(a, Action::Native { .. }) {
            return Err(ArithError::NativeStep(m.states[*q].clone()));
        }
    }
    Ok(())
}

/// `Step_m(x, y)`: `x` and `y` are configuration codes and `y` codes the
/// successor of `x`. Final configurations are their own successors.
pub fn step_formula(m: &Machine) -> Result<Formula, ArithError> {
    step_formula_in(m, "x", "y")
}

fn step_formula_in(m: &Machine, x: &str, y: &str) -> Result<Formula, ArithError> {
    check(m)?;
    let xd = Digits::new(&format!("{x}_"));
    let finals = Formula::or_all(m.finals.iter().map(|f| Formula::eq(v(&xd.state), n(*f as u64))));
    let frozen = Formula::and(finals, Formula::eq(v(y), v(x)));
    let reads = [format!("{x}_ri"), format!("{x}_rc"), format!("{x}_ro")];
    let mut cases = Vec::new();
    for q in 0..m.states.len() {
        if m.is_final(q) {
            continue;
        }
        let mut by_in = Vec::new();
        for a in SYMS {
            let mut by_comp = Vec::new();
            for b in SYMS {
                let mut by_out = Vec::new();
                for c in SYMS {
                    let e = effect(&xd, [a, b, c], m.instructions.get(&(q, [a, b, c])), m.reject, y);
                    by_out.push(Formula::and(Formula::eq(v(&reads[2]), n(digit(c))), e));
                }
                by_comp.push(Formula::and(Formula::eq(v(&reads[1]), n(digit(b))), Formula::or_all(by_out)));
            }
            by_in.push(Formula::and(Formula::eq(v(&reads[0]), n(digit(a))), Formula::or_all(by_comp)));
        }
        cases.push(Formula::and(Formula::eq(v(&xd.state), n(q as u64)), Formula::or_all(by_in)));
    }
    let mut moving = Formula::or_all(cases);
    for t in (0..3).rev() {
        moving = read(&xd.tapes[t], &xd.heads[t], &reads[t], &format!("{x}_k{t}"), moving);
    }
    let body = Formula::and(valid(m, &xd), Formula::or(frozen, moving));
    Ok(unpack(v(x), &format!("{x}_"), &xd, body))
}

/// `x` is the number of the trimmed input string placed at cells
/// `0, 1, ...` of the input tape digit `ti`; `x` and `ti` are variables.
fn input_tape(x: &str, ti: Term, prefix: &str) -> Formula {
    let blank = digit(Sym::Blank);
    let mut cases = vec![Formula::and(Formula::eq(v(x), Term::Zero), Formula::eq(ti.clone(), big(&(pow3(CELLS) - 1u32))))];
    for len in 1..=(W as u32 + 1) {
        // Digits come out last symbol first.
        let e = |j: u32| format!("{prefix}e{len}_{j}");
        let rest = |j: u32| format!("{prefix}x{len}_{j}");
        let mut sum = big(&(pow3(CELLS) - 1u32));
        let mut minus = BigUint::from(0u32);
        for j in 0..len {
            let pos = W as u32 + (len - 1 - j);
            sum = Term::plus(sum, Term::times(v(&e(j)), big(&pow3(pos))));
            minus += pow3(pos) * blank;
        }
        let mut body = Formula::and_all([
            Formula::eq(v(&rest(len)), Term::Zero),
            Formula::not(Formula::eq(v(&e(0)), n(blank))),
            Formula::not(Formula::eq(v(&e(len - 1)), n(blank))),
            Formula::eq(Term::plus(ti.clone(), big(&minus)), sum),
        ]);
        for j in (0..len).rev() {
            let src = if j == 0 { v(x) } else { v(&rest(j)) };
            // src = 3 * rest + e + 1
            body = exle(
                &rest(j + 1),
                src.clone(),
                exlt(
                    &e(j),
                    n(3),
                    Formula::and(Formula::eq(src, Term::succ(Term::plus(Term::times(v(&rest(j + 1)), n(3)), v(&e(j))))), body),
                ),
            );
        }
        cases.push(body);
    }
    Formula::or_all(cases)
}

/// `y` is the number of the trimmed contents of output tape digit `to`.
fn output_value(to: &str, y: &str, prefix: &str) -> Formula {
    let blank = digit(Sym::Blank);
    let e = |p: u32| format!("{prefix}o{p}");
    let rest = |p: u32| format!("{prefix}s{p}");
    let mut cases = vec![Formula::and(
        Formula::and_all((0..CELLS).map(|p| Formula::eq(v(&e(p)), n(blank)))),
        Formula::eq(v(y), Term::Zero),
    )];
    for first in 0..CELLS {
        for last in first..CELLS {
            let mut conj = vec![
                Formula::not(Formula::eq(v(&e(first)), n(blank))),
                Formula::not(Formula::eq(v(&e(last)), n(blank))),
            ];
            conj.extend((0..first).chain(last + 1..CELLS).map(|p| Formula::eq(v(&e(p)), n(blank))));
            let mut value = Term::Zero;
            for p in first..=last {
                value = Term::plus(value, Term::times(Term::succ(v(&e(p))), big(&pow3(last - p))));
            }
            conj.push(Formula::eq(v(y), value));
            cases.push(Formula::and_all(conj));
        }
    }
    let mut f = Formula::or_all(cases);
    // Cells low first: to = 3 * s1 + o0, s1 = 3 * s2 + o1, ...; the top
    // cell is what remains.
    f = Formula::and(Formula::lt(v(&e(CELLS - 1)), n(3)), f);
    for p in (0..CELLS - 1).rev() {
        let src = if p == 0 { v(to) } else { v(&rest(p)) };
        let hi = if p == CELLS - 2 { e(CELLS - 1) } else { rest(p + 1) };
        f = split(src, &hi, &e(p), n(3), f);
    }
    f
}

/// `Comp_m(c, x, y)`: `c` codes the halting computation of `m` on the
/// input numbered `x`, ending in a non-reject final state with output
/// numbered `y`. Runs of more than `KMAX` configurations are not coded.
pub fn comp_formula(m: &Machine) -> Result<Formula, ArithError> {
    check(m)?;
    let bound = big(&config_bound());
    let g = |i: usize| format!("g{i}");
    let mut by_len = Vec::new();
    for k in 1..=KMAX {
        let mut conj = Vec::new();
        // Initial configuration.
        let d0 = Digits::new("i_");
        let start = n(m.start as u64);
        let pos0 = big(&(pow3(W as u32) - 1u32));
        let blank_tape = big(&(pow3(CELLS) - 1u32));
        let init = unpack(
            v(&g(0)),
            "i_",
            &d0,
            Formula::and_all([
                Formula::eq(v(&d0.state), start),
                Formula::eq(v(&d0.heads[0]), pos0.clone()),
                Formula::eq(v(&d0.heads[1]), pos0.clone()),
                Formula::eq(v(&d0.heads[2]), pos0),
                Formula::eq(v(&d0.tapes[1]), blank_tape.clone()),
                Formula::eq(v(&d0.tapes[2]), blank_tape),
                input_tape("x", v(&d0.tapes[0]), "i_"),
            ]),
        );
        conj.push(init);
        for i in 0..k - 1 {
            let nonfinal = {
                let d = Digits::new(&format!("f{i}_"));
                let body = Formula::and_all(m.finals.iter().map(|f| Formula::not(Formula::eq(v(&d.state), n(*f as u64)))));
                unpack(v(&g(i)), &format!("f{i}_"), &d, body)
            };
            conj.push(nonfinal);
            conj.push(step_formula_in(m, &g(i), &g(i + 1))?);
        }
        let dl = Digits::new("l_");
        let accepting = m.finals.iter().filter(|f| **f != m.reject).map(|f| Formula::eq(v(&dl.state), n(*f as u64)));
        conj.push(unpack(
            v(&g(k - 1)),
            "l_",
            &dl,
            Formula::and(Formula::or_all(accepting), output_value(&dl.tapes[2], "y", "l_")),
        ));
        // Unpack c1 into g0 .. g(k-1).
        let mut f = Formula::and(Formula::lt(v(&g(k - 1)), bound.clone()), Formula::and_all(conj));
        for i in (0..k - 1).rev() {
            let src = if i == 0 { v("c1") } else { v(&format!("c{}", i + 1)) };
            let hi = if i == k - 2 { g(k - 1) } else { format!("c{}", i + 2) };
            f = split(src, &hi, &g(i), bound.clone(), f);
        }
        if k == 1 {
            f = exle(&g(0), v("c1"), Formula::and(Formula::eq(v(&g(0)), v("c1")), f));
        }
        by_len.push(Formula::and(Formula::eq(v("k"), n(k as u64)), f));
    }
    Ok(split(v("c"), "c1", "k", n(K_RADIX), Formula::or_all(by_len)))
}
