//! Deterministic three-tape machines: input (read-only), computation and
//! output tapes, a distinguished reject state, and frozen final states.
//!
//! Spec text format (one item per line, `#` starts a comment):
//!
//! ```text
//! alphabet: 0 1 b
//! states: q0 q1 done rej
//! start: q0
//! finals: done rej
//! reject: rej
//! data: 0a1b            # optional opaque hex payload for native steps
//! q0 0 b b -> b 0 R S R q0
//! q0 b b b -> call name q1
//! ```
//!
//! A table instruction reads `state read_i read_c read_o` and gives
//! `write_c write_o move_i move_c move_o next`. Moves are `L`, `R`, `S`.
//! A `call` instruction runs a registered native step (see [`crate::native`]):
//! it replaces the computation tape with the native's result and resets the
//! computation head to cell 0.
//!
//! Combinations with no instruction move to the reject state and change
//! nothing else.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::encoding::{Str, Sym};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing header `{0}`")]
    MissingHeader(&'static str),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Left,
    Right,
    Stay,
}

impl Move {
    fn parse(s: &str) -> Option<Move> {
        match s {
            "L" => Some(Move::Left),
            "R" => Some(Move::Right),
            "S" => Some(Move::Stay),
            _ => None,
        }
    }

    pub fn delta(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
            Move::Stay => 0,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::Left => "L",
            Move::Right => "R",
            Move::Stay => "S",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Table {
        write_c: Sym,
        write_o: Sym,
        moves: [Move; 3],
        next: usize,
    },
    Native {
        name: String,
        next: usize,
    },
}

impl Action {
    pub fn next(&self) -> usize {
        match self {
            Action::Table { next, .. } | Action::Native { next, .. } => *next,
        }
    }
}

/// Tape indices.
pub const INPUT: usize = 0;
pub const COMP: usize = 1;
pub const OUTPUT: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Machine {
    pub alphabet: BTreeSet<Sym>,
    pub states: Vec<String>,
    pub start: usize,
    pub finals: BTreeSet<usize>,
    pub reject: usize,
    pub data: Option<String>,
    pub instructions: BTreeMap<(usize, [Sym; 3]), Action>,
}

impl Machine {
    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(&q)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn parse(text: &str) -> Result<Machine, MachineParseError> {
        let mut alphabet = None;
        let mut states: Option<Vec<String>> = None;
        let mut start = None;
        let mut finals = None;
        let mut reject = None;
        let mut data = None;
        let mut raw_instr = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: &str| MachineParseError::Syntax { line: line_no, msg: msg.to_string() };
            if let Some((key, rest)) = line.split_once(':') {
                let words: Vec<&str> = rest.split_whitespace().collect();
                match key.trim() {
                    "alphabet" => {
                        let syms = words
                            .iter()
                            .map(|w| {
                                let mut cs = w.chars();
                                match (cs.next().and_then(Sym::from_char), cs.next()) {
                                    (Some(s), None) => Ok(s),
                                    _ => Err(syntax("alphabet symbols are 0, 1, b")),
                                }
                            })
                            .collect::<Result<BTreeSet<_>, _>>()?;
                        alphabet = Some(syms);
                    }
                    "states" => states = Some(words.iter().map(|w| w.to_string()).collect()),
                    "start" => start = Some(words.join(" ")),
                    "finals" => finals = Some(words.iter().map(|w| w.to_string()).collect::<Vec<_>>()),
                    "reject" => reject = Some(words.join(" ")),
                    "data" => data = Some(words.join("")),
                    other => return Err(syntax(&format!("unknown header `{other}`"))),
                }
            } else {
                raw_instr.push((line_no, line.to_string()));
            }
        }

        let alphabet = alphabet.ok_or(MachineParseError::MissingHeader("alphabet"))?;
        if !alphabet.contains(&Sym::Blank) {
            return Err(MachineParseError::Invalid("alphabet must contain the blank b".into()));
        }
        let states = states.ok_or(MachineParseError::MissingHeader("states"))?;
        let index = |name: &str| states.iter().position(|s| s == name);
        let uniq: BTreeSet<&String> = states.iter().collect();
        if uniq.len() != states.len() || states.is_empty() {
            return Err(MachineParseError::Invalid("state names must be distinct and nonempty".into()));
        }
        let unknown = |n: &str| MachineParseError::Invalid(format!("unknown state `{n}`"));
        let start_name = start.ok_or(MachineParseError::MissingHeader("start"))?;
        let start = index(&start_name).ok_or_else(|| unknown(&start_name))?;
        let reject_name = reject.ok_or(MachineParseError::MissingHeader("reject"))?;
        let reject = index(&reject_name).ok_or_else(|| unknown(&reject_name))?;
        let finals = finals
            .ok_or(MachineParseError::MissingHeader("finals"))?
            .iter()
            .map(|n| index(n).ok_or_else(|| unknown(n)))
            .collect::<Result<BTreeSet<_>, _>>()?;
        if !finals.contains(&reject) {
            return Err(MachineParseError::Invalid("reject state must be final".into()));
        }
        if let Some(d) = &data {
            if hex::decode(d).is_err() {
                return Err(MachineParseError::Invalid("data must be hex".into()));
            }
        }

        let mut instructions = BTreeMap::new();
        for (line_no, line) in raw_instr {
            let syntax = |msg: &str| MachineParseError::Syntax { line: line_no, msg: msg.to_string() };
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| syntax("expected `->`"))?;
            let lhs: Vec<&str> = lhs.split_whitespace().collect();
            let rhs: Vec<&str> = rhs.split_whitespace().collect();
            if lhs.len() != 4 {
                return Err(syntax("expected `state read_i read_c read_o`"));
            }
            let q = index(lhs[0]).ok_or_else(|| unknown(lhs[0]))?;
            if finals.contains(&q) {
                return Err(syntax("final states are frozen and take no instructions"));
            }
            let sym = |w: &str| {
                let mut cs = w.chars();
                match (cs.next().and_then(Sym::from_char), cs.next()) {
                    (Some(s), None) if alphabet.contains(&s) => Ok(s),
                    _ => Err(syntax(&format!("`{w}` is not in the alphabet"))),
                }
            };
            let reads = [sym(lhs[1])?, sym(lhs[2])?, sym(lhs[3])?];
            let action = if rhs.first() == Some(&"call") {
                if rhs.len() != 3 {
                    return Err(syntax("expected `call name next`"));
                }
                Action::Native {
                    name: rhs[1].to_string(),
                    next: index(rhs[2]).ok_or_else(|| unknown(rhs[2]))?,
                }
            } else {
                if rhs.len() != 6 {
                    return Err(syntax("expected `write_c write_o move_i move_c move_o next`"));
                }
                let mv = |w: &str| Move::parse(w).ok_or_else(|| syntax(&format!("bad move `{w}`")));
                Action::Table {
                    write_c: sym(rhs[0])?,
                    write_o: sym(rhs[1])?,
                    moves: [mv(rhs[2])?, mv(rhs[3])?, mv(rhs[4])?],
                    next: index(rhs[5]).ok_or_else(|| unknown(rhs[5]))?,
                }
            };
            if instructions.insert((q, reads), action).is_some() {
                return Err(syntax("duplicate instruction"));
            }
        }

        Ok(Machine { alphabet, states, start, finals, reject, data, instructions })
    }

    /// Canonical spec text; `parse(to_spec())` is the identity.
    pub fn to_spec(&self) -> String {
        let mut out = String::new();
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
        out.push_str(&format!(
            "alphabet: {}\n",
            join(&mut self.alphabet.iter().map(|s| s.to_char().to_string()))
        ));
        out.push_str(&format!("states: {}\n", self.states.join(" ")));
        out.push_str(&format!("start: {}\n", self.states[self.start]));
        out.push_str(&format!(
            "finals: {}\n",
            join(&mut self.finals.iter().map(|q| self.states[*q].clone()))
        ));
        out.push_str(&format!("reject: {}\n", self.states[self.reject]));
        if let Some(d) = &self.data {
            out.push_str(&format!("data: {d}\n"));
        }
        for ((q, r), action) in &self.instructions {
            let lhs = format!("{} {} {} {}", self.states[*q], r[0].to_char(), r[1].to_char(), r[2].to_char());
            let rhs = match action {
                Action::Table { write_c, write_o, moves, next } => format!(
                    "{} {} {} {} {} {}",
                    write_c.to_char(),
                    write_o.to_char(),
                    moves[0],
                    moves[1],
                    moves[2],
                    self.states[*next]
                ),
                Action::Native { name, next } => format!("call {} {}", name, self.states[*next]),
            };
            out.push_str(&format!("{lhs} -> {rhs}\n"));
        }
        out
    }

    pub fn has_native_steps(&self) -> bool {
        self.instructions.values().any(|a| matches!(a, Action::Native { .. }))
    }
}

/// A sparse tape: only non-blank cells are stored.
pub type Tape = BTreeMap<i64, Sym>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TotalState {
    pub tapes: [Tape; 3],
    pub heads: [i64; 3],
    pub state: usize,
}

impl TotalState {
    pub fn initial(m: &Machine, input: &Str) -> TotalState {
        let mut input_tape = Tape::new();
        for (i, s) in input.symbols().iter().enumerate() {
            if *s != Sym::Blank {
                input_tape.insert(i as i64, *s);
            }
        }
        TotalState { tapes: [input_tape, Tape::new(), Tape::new()], heads: [0; 3], state: m.start }
    }

    pub fn read(&self, tape: usize) -> Sym {
        self.tapes[tape].get(&self.heads[tape]).copied().unwrap_or(Sym::Blank)
    }

    pub fn write(&mut self, tape: usize, s: Sym) {
        let h = self.heads[tape];
        if s == Sym::Blank {
            self.tapes[tape].remove(&h);
        } else {
            self.tapes[tape].insert(h, s);
        }
    }

    /// Contents of a tape between its outermost non-blank cells.
    pub fn tape_contents(&self, tape: usize) -> Str {
        tape_str(&self.tapes[tape])
    }
}

pub fn tape_str(t: &Tape) -> Str {
    match (t.keys().next(), t.keys().next_back()) {
        (Some(lo), Some(hi)) => {
            Str::new((*lo..=*hi).map(|i| t.get(&i).copied().unwrap_or(Sym::Blank)).collect())
        }
        _ => Str::empty(),
    }
}

/// One step of `m` from `s`.
pub fn step(m: &Machine, s: &TotalState) -> TotalState {
    let mut next = s.clone();
    step_in_place(m, &mut next);
    next
}

/// [`step`] without copying the configuration.
pub fn step_in_place(m: &Machine, s: &mut TotalState) {
    if m.is_final(s.state) {
        return;
    }
    let reads = [s.read(INPUT), s.read(COMP), s.read(OUTPUT)];
    match m.instructions.get(&(s.state, reads)) {
        None => s.state = m.reject,
        Some(Action::Table { write_c, write_o, moves, next: q }) => {
            s.write(COMP, *write_c);
            s.write(OUTPUT, *write_o);
            for (t, mv) in moves.iter().enumerate() {
                s.heads[t] += mv.delta();
            }
            s.state = *q;
        }
        Some(Action::Native { name, next: q }) => {
            match crate::native::run_native(name, m.data.as_deref(), &s.tape_contents(INPUT), &s.tape_contents(COMP)) {
                Some(result) => {
                    let mut tape = Tape::new();
                    for (i, sym) in result.symbols().iter().enumerate() {
                        if *sym != Sym::Blank {
                            tape.insert(i as i64, *sym);
                        }
                    }
                    s.tapes[COMP] = tape;
                    s.heads[COMP] = 0;
                    s.state = *q;
                }
                None => s.state = m.reject,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Halted { output: Str, steps: u64 },
    Rejected { steps: u64 },
    OutOfBudget(TotalState),
}

impl RunOutcome {
    pub fn halted_within(&self) -> Option<u64> {
        match self {
            RunOutcome::Halted { steps, .. } | RunOutcome::Rejected { steps } => Some(*steps),
            RunOutcome::OutOfBudget(_) => None,
        }
    }
}

fn outcome_if_final(m: &Machine, s: &TotalState, steps: u64) -> Option<RunOutcome> {
    if !m.is_final(s.state) {
        None
    } else if s.state == m.reject {
        Some(RunOutcome::Rejected { steps })
    } else {
        Some(RunOutcome::Halted { output: s.tape_contents(OUTPUT), steps })
    }
}

/// Runs `m` on `input` for at most `budget` steps.
pub fn run(m: &Machine, input: &Str, budget: u64) -> RunOutcome {
    let mut s = TotalState::initial(m, input);
    if let Some(out) = outcome_if_final(m, &s, 0) {
        return out;
    }
    for k in 1..=budget {
        step_in_place(m, &mut s);
        if let Some(out) = outcome_if_final(m, &s, k) {
            return out;
        }
    }
    RunOutcome::OutOfBudget(s)
}

/// The configurations `s_0, ..., s_k` of the computation on `input`.
pub fn computation_prefix(m: &Machine, input: &Str, k: usize) -> Vec<TotalState> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(TotalState::initial(m, input));
    for i in 0..k {
        let next = step(m, &out[i]);
        out.push(next);
    }
    out
}
