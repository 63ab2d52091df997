//! Dovetailing enumeration of the deductive closure of a premise stream.
//!
//! Stage `j` admits premise `j` and the `j`-th logical axiom instance,
//! then closes the derived facts under modus ponens. Every stage emits at
//! least premise `j`, so an output at index `n` rests only on premises with
//! index at most `n`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use super::proof::{universal_closure, Justification, Line, Proof, Schema};
use super::{Formula, Term};

/// Inverse of the Cantor pairing function.
pub fn unpair(z: u64) -> (u64, u64) {
    let mut w = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}

/// Splits `z` into `k` components.
pub fn unpair_n(mut z: u64, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        if i + 1 == k {
            out.push(z);
        } else {
            let (a, b) = unpair(z);
            out.push(a);
            z = b;
        }
    }
    out
}

pub fn var_of(i: u64) -> String {
    format!("v{i}")
}

/// Onto enumeration of terms over the variables `v0, v1, ...`.
pub fn term_of(n: u64) -> Term {
    let rest = n / 5;
    match n % 5 {
        0 => {
            if rest == 0 {
                Term::Zero
            } else {
                Term::Var(var_of(rest - 1))
            }
        }
        1 => Term::succ(term_of(rest)),
        2 | 3 => {
            let (a, b) = unpair(rest);
            let (a, b) = (term_of(a), term_of(b));
            if n % 5 == 2 {
                Term::plus(a, b)
            } else {
                Term::times(a, b)
            }
        }
        _ => Term::Var(var_of(rest)),
    }
}

/// Onto enumeration of unbounded formulas over `v0, v1, ...`.
pub fn formula_of(n: u64) -> Formula {
    let rest = n / 7;
    match n % 7 {
        0 | 1 => {
            let (a, b) = unpair(rest);
            if n % 7 == 0 {
                Formula::eq(term_of(a), term_of(b))
            } else {
                Formula::le(term_of(a), term_of(b))
            }
        }
        2 => Formula::not(formula_of(rest)),
        3 | 4 | 5 => {
            let (a, b) = unpair(rest);
            let (a, b) = (formula_of(a), formula_of(b));
            match n % 7 {
                3 => Formula::and(a, b),
                4 => Formula::or(a, b),
                _ => Formula::implies(a, b),
            }
        }
        _ => {
            let (v, body) = unpair(rest);
            let (q, body) = unpair(body);
            if q % 2 == 0 {
                Formula::forall(&var_of(v), formula_of(body))
            } else {
                Formula::exists(&var_of(v), formula_of(body))
            }
        }
    }
}

/// The `k`-th logical axiom of stage `k`: schema `k mod 24` with parameters
/// decoded from `k / 24`, universally closed. `None` when a side condition
/// fails.
pub fn logical_instance(k: u64) -> Option<(Schema, Formula)> {
    let schema = Schema::ALL[(k % 24) as usize];
    let ar = schema.arity();
    let parts = unpair_n(k / 24, ar.formulas + ar.terms + ar.vars);
    let fs: Vec<Formula> = parts[..ar.formulas].iter().map(|i| formula_of(*i)).collect();
    let ts: Vec<Term> = parts[ar.formulas..ar.formulas + ar.terms].iter().map(|i| term_of(*i)).collect();
    let vs: Vec<String> = parts[ar.formulas + ar.terms..].iter().map(|i| var_of(*i)).collect();
    let inst = schema.instantiate(&fs, &ts, &vs)?;
    Some((schema, universal_closure(&inst)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Derivation {
    Premise(u64),
    Logical(Schema),
    Mp { antecedent: usize, implication: usize },
}

#[derive(Debug, Clone)]
struct Fact {
    sentence: Formula,
    premises: BTreeSet<u64>,
    how: Derivation,
}

/// One output of the enumerator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureEntry {
    pub sentence: Formula,
    /// Premise indices the proof rests on, ascending.
    pub premises: Vec<u64>,
    /// Stage that produced the entry.
    pub stage: u64,
}

#[derive(Default)]
struct State {
    facts: Vec<Fact>,
    by_key: HashMap<Formula, Vec<usize>>,
    /// Implication facts indexed by the key of their antecedent.
    by_antecedent: HashMap<Formula, Vec<usize>>,
    first_premise: HashMap<Formula, usize>,
    outputs: Vec<(usize, u64)>,
    stages: u64,
}

fn key(f: &Formula) -> Formula {
    f.expand_bounded().alpha_normal()
}

impl State {
    /// Adds a fact unless one with the same sentence rests on a subset of
    /// its premises. Returns the new fact id.
    fn add(&mut self, fact: Fact, force: bool) -> Option<usize> {
        let k = key(&fact.sentence);
        if !force {
            if let Some(ids) = self.by_key.get(&k) {
                if ids.iter().any(|i| self.facts[*i].premises.is_subset(&fact.premises)) {
                    return None;
                }
            }
        }
        let id = self.facts.len();
        if let Formula::Implies(a, _) = &fact.sentence {
            self.by_antecedent.entry(key(a)).or_default().push(id);
        }
        self.by_key.entry(k).or_default().push(id);
        self.facts.push(fact);
        Some(id)
    }

    fn mp(&self, antecedent: usize, implication: usize) -> Fact {
        let Formula::Implies(_, b) = &self.facts[implication].sentence else { unreachable!() };
        let premises = self.facts[antecedent].premises.union(&self.facts[implication].premises).copied().collect();
        Fact { sentence: (**b).clone(), premises, how: Derivation::Mp { antecedent, implication } }
    }

    /// Closes under modus ponens starting from `fresh`, returning every new
    /// fact in derivation order.
    fn saturate(&mut self, fresh: Vec<usize>) -> Vec<usize> {
        let mut queue: std::collections::VecDeque<usize> = fresh.into();
        let mut out = Vec::new();
        while let Some(id) = queue.pop_front() {
            let mut derived = Vec::new();
            let f = &self.facts[id].sentence;
            if let Formula::Implies(a, _) = f {
                for other in self.by_key.get(&key(a)).into_iter().flatten() {
                    derived.push(self.mp(*other, id));
                }
            }
            for imp in self.by_antecedent.get(&key(f)).into_iter().flatten() {
                derived.push(self.mp(id, *imp));
            }
            for d in derived {
                if let Some(n) = self.add(d, false) {
                    out.push(n);
                    queue.push_back(n);
                }
            }
        }
        out
    }
}

/// The closure enumerator over a premise stream. Outputs are computed on
/// demand and memoized.
pub struct ClosureEnumerator<F> {
    premises: F,
    state: Mutex<State>,
}

impl<F: Fn(u64) -> Formula> ClosureEnumerator<F> {
    pub fn new(premises: F) -> Self {
        ClosureEnumerator { premises, state: Mutex::new(State::default()) }
    }

    fn run_stage(&self, st: &mut State) {
        let j = st.stages;
        st.stages += 1;
        let sentence = (self.premises)(j);
        let k = key(&sentence);
        let mut fresh = Vec::new();
        // A premise repeated from an earlier index is cited at its first
        // index.
        match st.first_premise.get(&k) {
            Some(pid) => st.outputs.push((*pid, j)),
            None => {
                let p = Fact { sentence, premises: BTreeSet::from([j]), how: Derivation::Premise(j) };
                let pid = st.add(p, true).unwrap();
                st.first_premise.insert(k, pid);
                st.outputs.push((pid, j));
                fresh.push(pid);
            }
        }
        if let Some((schema, inst)) = logical_instance(j) {
            let f = Fact { sentence: inst, premises: BTreeSet::new(), how: Derivation::Logical(schema) };
            if let Some(id) = st.add(f, false) {
                st.outputs.push((id, j));
                fresh.push(id);
            }
        }
        for id in st.saturate(fresh) {
            st.outputs.push((id, j));
        }
    }

    fn with_output<R>(&self, n: u64, f: impl FnOnce(&State, usize, u64) -> R) -> R {
        let mut st = self.state.lock().unwrap();
        while st.outputs.len() as u64 <= n {
            self.run_stage(&mut st);
        }
        let (id, stage) = st.outputs[n as usize];
        f(&st, id, stage)
    }

    pub fn entry(&self, n: u64) -> ClosureEntry {
        self.with_output(n, |st, id, stage| {
            let fact = &st.facts[id];
            ClosureEntry { sentence: fact.sentence.clone(), premises: fact.premises.iter().copied().collect(), stage }
        })
    }

    /// The `n`-th output with its proof. Premise lines cite stream indices.
    pub fn at(&self, n: u64) -> (Formula, Proof) {
        self.with_output(n, |st, id, _| {
            let mut lines = Vec::new();
            let mut placed = HashMap::new();
            materialize(st, id, &mut lines, &mut placed);
            (st.facts[id].sentence.clone(), Proof::new(lines))
        })
    }

    /// Number of stages run so far.
    pub fn stages_run(&self) -> u64 {
        self.state.lock().unwrap().stages
    }
}

fn materialize(st: &State, id: usize, lines: &mut Vec<Line>, placed: &mut HashMap<usize, usize>) -> usize {
    if let Some(i) = placed.get(&id) {
        return *i;
    }
    let fact = &st.facts[id];
    let just = match &fact.how {
        Derivation::Premise(j) => Justification::Premise(*j as usize),
        Derivation::Logical(s) => Justification::Logical(*s),
        Derivation::Mp { antecedent, implication } => {
            let a = materialize(st, *antecedent, lines, placed);
            let b = materialize(st, *implication, lines, placed);
            Justification::Mp(a, b)
        }
    };
    lines.push(Line { formula: fact.sentence.clone(), just });
    placed.insert(id, lines.len() - 1);
    lines.len() - 1
}

pub fn closure_enumerator<F: Fn(u64) -> Formula>(premises: F) -> ClosureEnumerator<F> {
    ClosureEnumerator::new(premises)
}
