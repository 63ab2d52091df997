use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigUint;

use stablecomp::arithmetizer::decision::{decision_input, gamma, host_decide, machine_code};
use stablecomp::arithmetizer::{build_z, dt_check, goedel_sentence, s_of, StandardPredicates};
use stablecomp::encoding::{Str, Sym};
use stablecomp::logic::eval::{eval_with, Env, Predicates};
use stablecomp::logic::{Formula, Term};
use stablecomp::machines::{constant_decider, copier, emitter, ra_emitter};
use stablecomp::stabilization::Sign;
use stablecomp::turing::{run, RunOutcome};

const FUEL: u64 = 10_000_000;

fn garbage() -> Str {
    Str::parse("1011").unwrap()
}

fn gamma_at(t: &Str, m: u64, n: u64) -> bool {
    let env = Env::new().with("m", m).with("n", n);
    eval_with(&gamma(t), &env, &StandardPredicates, FUEL).unwrap()
}

/// StandardPredicates with every answer remembered.
#[derive(Default)]
struct Memo(RefCell<HashMap<(String, Vec<BigUint>), Option<Result<bool, String>>>>);

impl Predicates for Memo {
    fn eval(&self, name: &str, args: &[BigUint]) -> Option<Result<bool, String>> {
        let key = (name.to_string(), args.to_vec());
        if let Some(r) = self.0.borrow().get(&key) {
            return r.clone();
        }
        let r = StandardPredicates.eval(name, args);
        self.0.borrow_mut().insert(key, r.clone());
        r
    }
}

fn conjunct(s: &Formula) -> &Formula {
    match s {
        Formula::And(a, _) => a,
        other => panic!("not a conjunction: {other}"),
    }
}

fn dt_holds(t: &Str) -> bool {
    eval_with(conjunct(&s_of(t)), &Env::new(), &StandardPredicates, FUEL).unwrap()
}

fn simulate_z(z: &stablecomp::turing::Machine, t: &Str, n: u64) -> Sign {
    match run(z, &decision_input(t, n), z.states.len() as u64) {
        RunOutcome::Halted { output, .. } if output == Str::new(vec![Sym::One]) => Sign::Plus,
        RunOutcome::Halted { output, .. } if output == Str::new(vec![Sym::Zero]) => Sign::Minus,
        other => panic!("Z did not halt with a sign: {other:?}"),
    }
}

#[test]
fn dt_structural_check() {
    let z = build_z(&ra_emitter());
    assert!(dt_check(&machine_code(&z)));
    assert!(dt_check(&machine_code(&constant_decider(true))));
    assert!(dt_check(&machine_code(&constant_decider(false))));
    assert!(!dt_check(&machine_code(&copier())));
    assert!(!dt_check(&garbage()));
    assert!(!dt_check(&Str::default()));
}

#[test]
fn constant_minus_is_never_decided() {
    let t = machine_code(&constant_decider(false));
    assert!(dt_holds(&t));
    // eta fails on the window: every m has some later n where gamma is false.
    for m in 0..=10 {
        assert!((m..=30).any(|n| !gamma_at(&t, m, n)));
    }
}

#[test]
fn constant_plus_is_decided_from_zero() {
    let t = machine_code(&constant_decider(true));
    assert!(dt_holds(&t));
    for n in 0..=30 {
        assert!(gamma_at(&t, 0, n));
    }
}

#[test]
fn garbage_sentence_is_false() {
    let s = s_of(&garbage());
    assert!(!dt_holds(&garbage()));
    assert_eq!(eval_with(&s, &Env::new(), &StandardPredicates, FUEL), Ok(false));
}

#[test]
fn z_rejects_garbage_for_fifty_rounds() {
    let z = build_z(&ra_emitter());
    for n in 0..50 {
        assert_eq!(simulate_z(&z, &garbage(), n), Sign::Minus, "n = {n}");
    }
}

#[test]
fn gamma_agrees_with_pipeline_for_z() {
    let g = ra_emitter();
    let gs = goedel_sentence(&g);
    // The code literal is replaced by its number once instead of per
    // evaluation; the value is the same.
    let gamma = gs.gamma.map_terms(&|t| match t {
        Term::Code(s) => Term::lit(&s.to_number()),
        other => other.clone(),
    });
    let memo = Memo::default();
    for n in 0..=30u64 {
        let expected = host_decide(&g, &gs.z_code, n).is_plus();
        for m in 0..=n + 1 {
            let env = Env::new().with("m", m).with("n", n);
            let holds = eval_with(&gamma, &env, &memo, FUEL).unwrap();
            assert_eq!(holds, m > n || expected, "m = {m}, n = {n}");
        }
    }
}

#[test]
fn emitted_target_becomes_plus() {
    // g asserts s(T-) forever, so the closure eventually keeps it and Z
    // switches to +.
    let t = machine_code(&constant_decider(false));
    let g = emitter(&[(s_of(&t), Sign::Plus)]);
    let z = build_z(&g);
    let signs: Vec<Sign> = (0..=12).map(|n| simulate_z(&z, &t, n)).collect();
    for (n, s) in signs.iter().enumerate() {
        assert_eq!(*s, host_decide(&g, &t, n as u64), "n = {n}");
    }
    assert_eq!(signs[12], Sign::Plus);
    let first = signs.iter().position(|s| s.is_plus()).unwrap();
    assert!(signs[first..].iter().all(|s| s.is_plus()));
    // Other targets stay -.
    let other = machine_code(&constant_decider(true));
    assert_eq!(simulate_z(&z, &other, 12), Sign::Minus);
}

#[test]
fn goedel_sentence_shape() {
    let gs = goedel_sentence(&ra_emitter());
    let expected = Formula::and(
        Formula::Pred("dt".into(), vec![Term::Code(gs.z_code.clone())]),
        Formula::not(Formula::exists("m", Formula::forall("n", gs.gamma.clone()))),
    );
    assert_eq!(gs.sentence, expected);
    assert_eq!(gs.z_code, machine_code(&gs.z));
    assert!(dt_holds(&gs.z_code));
    assert_eq!(goedel_sentence(&ra_emitter()), gs);
}
