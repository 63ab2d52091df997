//! A small library of hand-built machines used by the corpus, the CLI data
//! files and the tests.

use std::collections::{BTreeMap, BTreeSet};

use crate::encoding::{encode, Sym, Value};
use crate::enumerators::MachineInputPair;
use crate::logic::proof::ra_axioms;
use crate::logic::Formula;
use crate::stabilization::Sign;
use crate::turing::{Action, Machine, Move};

pub const SYMS: [Sym; 3] = [Sym::Zero, Sym::One, Sym::Blank];

/// Incrementally assembles a machine over `{0, 1, b}`.
pub struct Builder {
    states: Vec<String>,
    finals: BTreeSet<usize>,
    instructions: BTreeMap<(usize, [Sym; 3]), Action>,
    data: Option<String>,
}

impl Builder {
    /// Starts a machine whose first state is the start state. The states
    /// `halt` and `reject` always exist and are final.
    pub fn new(start: &str) -> Builder {
        let mut b = Builder {
            states: Vec::new(),
            finals: BTreeSet::new(),
            instructions: BTreeMap::new(),
            data: None,
        };
        b.state(start);
        let h = b.state("halt");
        let r = b.state("reject");
        b.finals.insert(h);
        b.finals.insert(r);
        b
    }

    pub fn state(&mut self, name: &str) -> usize {
        match self.states.iter().position(|s| s == name) {
            Some(i) => i,
            None => {
                self.states.push(name.to_string());
                self.states.len() - 1
            }
        }
    }

    pub fn data(&mut self, hex: String) -> &mut Self {
        self.data = Some(hex);
        self
    }

    pub fn on(&mut self, q: &str, reads: [Sym; 3], action: Action) -> &mut Self {
        let q = self.state(q);
        self.instructions.insert((q, reads), action);
        self
    }

    /// Table instruction for one read triple.
    #[allow(clippy::too_many_arguments)]
    pub fn rule(&mut self, q: &str, reads: [Sym; 3], write_c: Sym, write_o: Sym, moves: [Move; 3], next: &str) -> &mut Self {
        let next = self.state(next);
        self.on(q, reads, Action::Table { write_c, write_o, moves, next })
    }

    /// Instructions for every read triple, computed by `f`.
    pub fn every(&mut self, q: &str, mut f: impl FnMut([Sym; 3]) -> (Sym, Sym, [Move; 3], String)) -> &mut Self {
        for a in SYMS {
            for c in SYMS {
                for o in SYMS {
                    let (wc, wo, mv, next) = f([a, c, o]);
                    self.rule(q, [a, c, o], wc, wo, mv, &next);
                }
            }
        }
        self
    }

    pub fn build(&self) -> Machine {
        Machine {
            alphabet: SYMS.into_iter().collect(),
            states: self.states.clone(),
            start: 0,
            finals: self.finals.clone(),
            reject: 2,
            data: self.data.clone(),
            instructions: self.instructions.clone(),
        }
    }
}

const STAY: [Move; 3] = [Move::Stay, Move::Stay, Move::Stay];

/// Goes to `halt` on the first step, leaving the tapes as they are.
pub fn immediate_halt() -> Machine {
    let mut b = Builder::new("q0");
    b.every("q0", |r| (r[1], r[2], STAY, "halt".into()));
    b.build()
}

/// Moves the input head right forever.
pub fn move_right_forever() -> Machine {
    let mut b = Builder::new("q0");
    b.every("q0", |r| (r[1], r[2], [Move::Right, Move::Stay, Move::Stay], "q0".into()));
    b.build()
}

/// Alternates the input head between two cells forever.
pub fn ping_pong() -> Machine {
    let mut b = Builder::new("q0");
    b.every("q0", |r| (r[1], r[2], [Move::Right, Move::Stay, Move::Stay], "q1".into()));
    b.every("q1", |r| (r[1], r[2], [Move::Left, Move::Stay, Move::Stay], "q0".into()));
    b.build()
}

/// Writes `1` on ever more output cells, forever.
pub fn endless_writer() -> Machine {
    let mut b = Builder::new("q0");
    b.every("q0", |r| (r[1], Sym::One, [Move::Stay, Move::Stay, Move::Right], "q0".into()));
    b.build()
}

/// Copies the input to the output and halts on the first blank.
pub fn copier() -> Machine {
    let mut b = Builder::new("q0");
    b.every("q0", |r| match r[0] {
        Sym::Blank => (r[1], r[2], STAY, "halt".into()),
        d => (r[1], d, [Move::Right, Move::Stay, Move::Right], "q0".into()),
    });
    b.build()
}

/// Scans right over the input and halts on the first blank.
pub fn scanner() -> Machine {
    let mut b = Builder::new("q0");
    b.every("q0", |r| match r[0] {
        Sym::Blank => (r[1], r[2], STAY, "halt".into()),
        _ => (r[1], r[2], [Move::Right, Move::Stay, Move::Stay], "q0".into()),
    });
    b.build()
}

/// Halts after exactly `k >= 1` steps on every input.
pub fn chain(k: usize) -> Machine {
    assert!(k >= 1, "chain length must be positive");
    let mut b = Builder::new("c0");
    for i in 0..k {
        let next = if i + 1 == k { "halt".to_string() } else { format!("c{}", i + 1) };
        b.every(&format!("c{i}"), |r| (r[1], r[2], STAY, next.clone()));
    }
    b.build()
}

/// Halts after `k` steps but rejects instead of accepting.
pub fn chain_reject(k: usize) -> Machine {
    let mut b = Builder::new("c0");
    for i in 0..k {
        let next = if i + 1 == k { "reject".to_string() } else { format!("c{}", i + 1) };
        b.every(&format!("c{i}"), |r| (r[1], r[2], STAY, next.clone()));
    }
    b.build()
}

/// A decision machine in normal form that outputs `sign` (as `1` for plus,
/// `0` for minus) after one step, whatever the input.
pub fn constant_decider(plus: bool) -> Machine {
    let mut b = Builder::new("start");
    let s = if plus { Sym::One } else { Sym::Zero };
    b.every("start", |r| (r[1], s, STAY, "halt".into()));
    b.build()
}

/// Loops on the computation tape: writes `1`, moves right, and halts only
/// when it reads a `1` there, which never happens.
pub fn comp_tape_runner() -> Machine {
    let mut b = Builder::new("q0");
    b.every("q0", |r| match r[1] {
        Sym::One => (r[1], r[2], STAY, "halt".into()),
        _ => (Sym::One, r[2], [Move::Stay, Move::Right, Move::Stay], "q0".into()),
    });
    b.build()
}

/// On input the code of `k`, outputs the code of the pair
/// `items[(k mod 8) mod items.len()]`: skips the four header cells, folds
/// the body bits into `k mod 8`, then writes the chosen code one cell per
/// state.
pub fn emitter(items: &[(Formula, Sign)]) -> Machine {
    assert!((1..=8).contains(&items.len()), "between 1 and 8 items");
    let right = [Move::Right, Move::Stay, Move::Stay];
    let mut b = Builder::new("h0");
    for i in 0..4 {
        let next = if i == 3 { "r0".to_string() } else { format!("h{}", i + 1) };
        for s in [Sym::Zero, Sym::One] {
            b.rule(&format!("h{i}"), [s, Sym::Blank, Sym::Blank], Sym::Blank, Sym::Blank, right, &next);
        }
    }
    for r in 0..8 {
        for (bit, s) in [(0, Sym::Zero), (1, Sym::One)] {
            let next = format!("r{}", (2 * r + bit) % 8);
            b.rule(&format!("r{r}"), [s, Sym::Blank, Sym::Blank], Sym::Blank, Sym::Blank, right, &next);
        }
        b.rule(&format!("r{r}"), [Sym::Blank; 3], Sym::Blank, Sym::Blank, STAY, &format!("w{}_0", r % items.len()));
    }
    for (r, (f, sign)) in items.iter().enumerate() {
        let code = encode(&Value::pair(Value::Sentence(f.clone()), Value::Sign(*sign))).payload;
        let syms = code.symbols();
        for (i, s) in syms.iter().enumerate() {
            let next = if i + 1 == syms.len() { "halt".to_string() } else { format!("w{r}_{}", i + 1) };
            b.rule(&format!("w{r}_{i}"), [Sym::Blank; 3], Sym::Blank, *s, [Move::Stay, Move::Stay, Move::Right], &next);
        }
    }
    b.build()
}

/// Emits `(RA_{k mod 8}, +)` on input `k`.
pub fn ra_emitter() -> Machine {
    let items: Vec<_> = ra_axioms().into_iter().map(|a| (a, Sign::Plus)).collect();
    emitter(&items)
}

/// Thirty machine/argument pairs with known halting behaviour: the step
/// count of the halting run, or `None` for machines that never halt.
pub fn labeled_corpus() -> Vec<(MachineInputPair, Option<u64>)> {
    let mut out = Vec::new();
    for k in [1u64, 2, 3, 5, 8, 13, 21, 34, 55, 89, 100] {
        out.push((MachineInputPair::new(&format!("chain{k}"), chain(k as usize), 0), Some(k)));
    }
    for k in [1u64, 4, 9, 16, 25, 50, 99] {
        out.push((MachineInputPair::new(&format!("chain-reject{k}"), chain_reject(k as usize), 1), Some(k)));
    }
    out.push((MachineInputPair::new("immediate-halt", immediate_halt(), 0), Some(1)));
    for arg in [0u64, 2, 6] {
        // Copies the code, then one more step on the first blank.
        let len = MachineInputPair::new("", copier(), arg).input().len() as u64;
        out.push((MachineInputPair::new("copier", copier(), arg), Some(len + 1)));
    }
    let len = MachineInputPair::new("", scanner(), 5).input().len() as u64;
    out.push((MachineInputPair::new("scanner", scanner(), 5), Some(len + 1)));
    for arg in [0u64, 1] {
        out.push((MachineInputPair::new("move-right", move_right_forever(), arg), None));
        out.push((MachineInputPair::new("ping-pong", ping_pong(), arg), None));
        out.push((MachineInputPair::new("endless-writer", endless_writer(), arg), None));
    }
    out.push((MachineInputPair::new("comp-tape-runner", comp_tape_runner(), 0), None));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::Str;
    use crate::turing::{run, RunOutcome};

    #[test]
    fn chain_halts_at_exact_step() {
        for k in [1, 5, 37] {
            assert_eq!(run(&chain(k), &Str::empty(), 1000), RunOutcome::Halted { output: Str::empty(), steps: k as u64 });
        }
    }

    #[test]
    fn corpus_labels_match_simulation() {
        let corpus = labeled_corpus();
        assert_eq!(corpus.len(), 30);
        for (p, steps) in corpus {
            assert_eq!(run(&p.machine, &p.input(), 150).halted_within(), steps, "{}", p.label);
        }
    }

    #[test]
    fn specs_round_trip() {
        for m in [immediate_halt(), ping_pong(), copier(), chain(3), constant_decider(true)] {
            assert_eq!(Machine::parse(&m.to_spec()).unwrap(), m);
        }
    }
}
