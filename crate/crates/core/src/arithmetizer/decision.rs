//! Decision machines, the sentence `s(T)`, the machine `Z` and the Gödel
//! sentence `s(Z)`.
//!
//! A decision machine is in normal form when
//!
//! - its spec parses, its alphabet is `{0, 1, b}` and it has a non-reject
//!   final state;
//! - every non-final state has an instruction for every read triple;
//! - the graph of non-final states is acyclic;
//! - no instruction enters the reject state and every native step is
//!   registered and leads to a non-final state;
//! - no instruction moves the output head;
//! - every table instruction entering a final state writes `0` or `1` to
//!   the output.
//!
//! Such a machine halts within `|Q|` steps on every input with output `0`
//! or `1`, so "T outputs `1` on `(T, n)`" is decidable and `dt` is a
//! structural check.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use sha2::{Digest, Sha256};

use crate::closure::cm_stream;
use crate::encoding::{decode_str, encode, Str, Sym, Value};
use crate::logic::{Formula, Sentence, Term};
use crate::machines::{Builder, SYMS};
use crate::native;
use crate::speculative::m_spec;
use crate::stabilization::{is_n_stable, Assertion, AssertionStream, Sign};
use crate::turing::{run, Action, Machine, Move, RunOutcome, OUTPUT};

/// Step budget for one output of the sentence-emitting machine `g`.
pub const G_FUEL: u64 = 1_000_000;

pub fn machine_code(m: &Machine) -> Str {
    encode(&Value::Machine(m.clone())).payload
}

pub fn machine_of_code(code: &Str) -> Option<Machine> {
    match decode_str(code) {
        Ok(Value::Machine(m)) => Some(m),
        _ => None,
    }
}

/// Why `m` is not a decision machine in normal form.
pub fn dt_report(m: &Machine) -> Result<(), String> {
    if m.alphabet != SYMS.into_iter().collect::<BTreeSet<_>>() {
        return Err("alphabet is not {0, 1, b}".into());
    }
    if !m.finals.iter().any(|q| *q != m.reject) {
        return Err("no accepting final state".into());
    }
    let nonfinal: Vec<usize> = (0..m.states.len()).filter(|q| !m.is_final(*q)).collect();
    let mut succ: HashMap<usize, Vec<usize>> = HashMap::new();
    for &q in &nonfinal {
        for a in SYMS {
            for c in SYMS {
                for o in SYMS {
                    let action = m
                        .instructions
                        .get(&(q, [a, c, o]))
                        .ok_or_else(|| format!("state {} has no instruction for {}{}{}", m.states[q], a.to_char(), c.to_char(), o.to_char()))?;
                    let next = action.next();
                    if next == m.reject {
                        return Err(format!("state {} enters reject", m.states[q]));
                    }
                    match action {
                        Action::Native { name, .. } => {
                            if !native::is_registered(name) {
                                return Err(format!("unregistered native `{name}`"));
                            }
                            if m.is_final(next) {
                                return Err(format!("native `{name}` enters a final state"));
                            }
                        }
                        Action::Table { write_o, moves, .. } => {
                            if moves[OUTPUT] != Move::Stay {
                                return Err(format!("state {} moves the output head", m.states[q]));
                            }
                            if m.is_final(next) && *write_o == Sym::Blank {
                                return Err(format!("state {} halts without a sign", m.states[q]));
                            }
                        }
                    }
                    if !m.is_final(next) {
                        succ.entry(q).or_default().push(next);
                    }
                }
            }
        }
    }
    // Kahn's algorithm over non-final states.
    let mut indeg: HashMap<usize, usize> = nonfinal.iter().map(|q| (*q, 0)).collect();
    for ns in succ.values() {
        for n in ns {
            *indeg.get_mut(n).unwrap() += 1;
        }
    }
    let mut ready: Vec<usize> = indeg.iter().filter(|(_, d)| **d == 0).map(|(q, _)| *q).collect();
    let mut seen = 0;
    while let Some(q) = ready.pop() {
        seen += 1;
        for n in succ.get(&q).into_iter().flatten() {
            let d = indeg.get_mut(n).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(*n);
            }
        }
    }
    if seen != nonfinal.len() {
        return Err("non-final states form a cycle".into());
    }
    Ok(())
}

pub fn dt_check(code: &Str) -> bool {
    machine_of_code(code).is_some_and(|m| dt_report(&m).is_ok())
}

/// `(pred dt (code t))`.
pub fn dt_sentence(code: &Str) -> Sentence {
    Formula::Pred("dt".into(), vec![Term::Code(code.clone())])
}

/// Input of a decision machine: the code of the pair `(t, n)`.
pub fn decision_input(t: &Str, n: u64) -> Str {
    encode(&Value::pair(Value::Str(t.clone()), Value::Nat(n))).payload
}

/// Whether `t` codes a normal-form decision machine that outputs `1` on
/// `(t, n)`.
pub fn decides_plus(t: &Str, n: u64) -> bool {
    let Some(m) = machine_of_code(t) else { return false };
    if dt_report(&m).is_err() {
        return false;
    }
    matches!(run(&m, &decision_input(t, n), m.states.len() as u64), RunOutcome::Halted { output, .. } if output == Str::new(vec![Sym::One]))
}

/// `gamma(m, n)`: if `m <= n` then T decides `+` at `n`.
pub fn gamma(t: &Str) -> Formula {
    Formula::or(
        Formula::not(Formula::le(Term::var("m"), Term::var("n"))),
        Formula::Pred("decides-plus".into(), vec![Term::Code(t.clone()), Term::var("n")]),
    )
}

/// `(T in D^t) and not (exists m. forall n >= m. T decides + at n)`.
pub fn s_of(t: &Str) -> Sentence {
    let eta = Formula::exists("m", Formula::forall("n", gamma(t)));
    Formula::and(dt_sentence(t), Formula::not(eta))
}

/// The sentence stream computed by `g`: output `k` is the pair
/// `(sentence, sign)` that `g` writes on input `k`. Outputs that fail to
/// decode become `(not (= 0 0), -)`.
pub struct GStream {
    g: Machine,
    cache: Mutex<HashMap<u64, Assertion<Sentence>>>,
}

pub fn g_stream(g: Machine) -> GStream {
    GStream { g, cache: Mutex::new(HashMap::new()) }
}

fn g_output(g: &Machine, k: u64) -> Assertion<Sentence> {
    let input = encode(&Value::Nat(k)).payload;
    if let RunOutcome::Halted { output, .. } = run(g, &input, G_FUEL) {
        if let Ok(Value::Pair(a, b)) = decode_str(&output) {
            if let (Value::Sentence(f), Value::Sign(s)) = (*a, *b) {
                return Assertion { item: f, sign: s };
            }
        }
    }
    Assertion::minus(Formula::not(Formula::eq(Term::Zero, Term::Zero)))
}

impl AssertionStream for GStream {
    type Item = Sentence;

    fn at(&self, n: u64) -> Assertion<Sentence> {
        if let Some(a) = self.cache.lock().unwrap().get(&n) {
            return a.clone();
        }
        let a = g_output(&self.g, n);
        self.cache.lock().unwrap().insert(n, a.clone());
        a
    }
}

/// The host pipeline `D_CN(s(t), n)` with `CN = cm_stream(m_spec(g))`.
pub fn host_decide(g: &Machine, t: &Str, n: u64) -> Sign {
    let cn = cm_stream(m_spec(g_stream(g.clone())));
    Sign::from_bool(is_n_stable(&cn, &s_of(t), n))
}

/// Native step of `Z`: `data` is the hex of `g`'s spec, `input` the code
/// of `(t, n)`. Returns `1` or `0`; malformed input gives `0`.
pub fn z_decide(data: &str, input: &Str) -> Str {
    let g = hex::decode(data).ok().and_then(|b| String::from_utf8(b).ok()).and_then(|s| Machine::parse(&s).ok());
    let parsed = match decode_str(input) {
        Ok(Value::Pair(a, b)) => match (*a, *b) {
            (Value::Str(t), Value::Nat(n)) => Some((t, n)),
            _ => None,
        },
        _ => None,
    };
    let plus = match (g, parsed) {
        (Some(g), Some((t, n))) => host_decide(&g, &t, n).is_plus(),
        _ => false,
    };
    Str::new(vec![if plus { Sym::One } else { Sym::Zero }])
}

/// `Z`: calls `z-decide` on the input, then copies the resulting sign to
/// the output and halts.
pub fn build_z(g: &Machine) -> Machine {
    let mut b = Builder::new("start");
    b.data(hex::encode(g.to_spec()));
    let decide = b.state("decide");
    for a in SYMS {
        for c in SYMS {
            for o in SYMS {
                b.on("start", [a, c, o], Action::Native { name: "z-decide".into(), next: decide });
            }
        }
    }
    b.every("decide", |r| {
        let sign = if r[1] == Sym::One { Sym::One } else { Sym::Zero };
        (r[1], sign, [Move::Stay; 3], "halt".into())
    });
    b.build()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoedelSentence {
    pub sentence: Sentence,
    /// `gamma(m, n)` for `Z`.
    pub gamma: Formula,
    pub z: Machine,
    pub z_code: Str,
    /// SHA-256 of `Z`'s spec.
    pub provenance: String,
}

pub fn goedel_sentence(g: &Machine) -> GoedelSentence {
    let z = build_z(g);
    let z_code = machine_code(&z);
    let provenance = hex::encode(Sha256::digest(z.to_spec().as_bytes()));
    GoedelSentence { sentence: s_of(&z_code), gamma: gamma(&z_code), z, z_code, provenance }
}
