//! A stream whose stable sentences are the deductive closure of another
//! stream's stable sentences.
//!
//! Round `n` first retracts every sentence previously asserted with `+`
//! that is no longer n-stable, then asserts the `n`-th output of the
//! closure enumerator if that output is n-stable. A sentence is n-stable
//! when one of the first `n + 1` enumerator outputs proves it from premises
//! that are each (m, n)-stable.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use crate::logic::dovetail::{closure_enumerator, ClosureEnumerator};
use crate::logic::proof::Proof;
use crate::logic::Formula;
use crate::stabilization::{Assertion, AssertionStream, Sign};

pub type PremiseFn = Box<dyn Fn(u64) -> Formula + Send + Sync>;

/// A premise of an n-stability witness: the stream index it is cited at
/// and the index of its last `+`, after which it is never retracted up to
/// the round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PremiseWindow {
    pub index: u64,
    pub sentence: Formula,
    pub asserted_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NStabilityRecord {
    pub sentence: Formula,
    pub round: u64,
    pub proof_index: u64,
    pub proof: Proof,
    pub premises: Vec<PremiseWindow>,
}

impl NStabilityRecord {
    /// Plain-text audit form.
    pub fn to_text(&self) -> String {
        let mut s = format!("sentence\t{}\nround\t{}\nproof_index\t{}\n", self.sentence, self.round, self.proof_index);
        for p in &self.premises {
            s.push_str(&format!("premise\t{}\t{}\t{}\n", p.index, p.asserted_at, p.sentence));
        }
        s.push_str(&self.proof.to_text());
        s
    }
}

fn key(f: &Formula) -> Formula {
    f.expand_bounded().alpha_normal()
}

/// Checks n-stability of `alpha` from scratch, scanning enumerator outputs
/// `0..=n`.
pub fn sentence_n_stable<S>(m: &S, alpha: &Formula, n: u64) -> Option<NStabilityRecord>
where
    S: AssertionStream<Item = Formula> + ?Sized,
{
    let pm = closure_enumerator(|j| m.at(j).item);
    let k = key(alpha);
    (0..=n).find_map(|e| {
        let entry = pm.entry(e);
        if key(&entry.sentence) != k {
            return None;
        }
        let mut windows = Vec::new();
        for j in &entry.premises {
            let sentence = m.at(*j).item;
            match m.last_occurrence(&sentence, n) {
                Some((d, Sign::Plus)) => windows.push(PremiseWindow { index: *j, sentence, asserted_at: d }),
                _ => return None,
            }
        }
        Some(NStabilityRecord { sentence: alpha.clone(), round: n, proof_index: e, proof: pm.at(e).1, premises: windows })
    })
}

struct CmState {
    rounds: u64,
    out: Vec<Assertion<Formula>>,
    /// Round in which each output entry was emitted.
    out_round: Vec<u64>,
    /// Sentences emitted with `+` so far, in order of first `+`.
    plus_order: Vec<Formula>,
    plus_seen: HashSet<Formula>,
    /// Last occurrence of each premise-stream item up to the current round.
    last: HashMap<Formula, (u64, Sign)>,
    /// Enumerator output indices by sentence key.
    by_key: HashMap<Formula, Vec<u64>>,
}

pub struct CmStream<S> {
    m: Arc<S>,
    pm: ClosureEnumerator<PremiseFn>,
    state: Mutex<CmState>,
}

pub fn cm_stream<S>(m: S) -> CmStream<S>
where
    S: AssertionStream<Item = Formula> + Send + Sync + 'static,
{
    let m = Arc::new(m);
    let mm = Arc::clone(&m);
    let premises: PremiseFn = Box::new(move |j| mm.at(j).item);
    CmStream {
        m,
        pm: closure_enumerator(premises),
        state: Mutex::new(CmState {
            rounds: 0,
            out: Vec::new(),
            out_round: Vec::new(),
            plus_order: Vec::new(),
            plus_seen: HashSet::new(),
            last: HashMap::new(),
            by_key: HashMap::new(),
        }),
    }
}

impl<S: AssertionStream<Item = Formula>> CmStream<S> {
    pub fn premise_stream(&self) -> &S {
        &self.m
    }

    pub fn enumerator(&self) -> &ClosureEnumerator<PremiseFn> {
        &self.pm
    }

    fn witness(&self, st: &CmState, alpha: &Formula, n: u64) -> Option<NStabilityRecord> {
        let ids = st.by_key.get(&key(alpha))?;
        ids.iter().filter(|e| **e <= n).find_map(|e| {
            let entry = self.pm.entry(*e);
            let mut windows = Vec::new();
            for j in &entry.premises {
                let sentence = self.m.at(*j).item;
                match st.last.get(&sentence) {
                    Some((d, Sign::Plus)) => windows.push(PremiseWindow { index: *j, sentence, asserted_at: *d }),
                    _ => return None,
                }
            }
            Some(NStabilityRecord { sentence: alpha.clone(), round: n, proof_index: *e, proof: self.pm.at(*e).1, premises: windows })
        })
    }

    fn run_round(&self, st: &mut CmState) {
        let n = st.rounds;
        st.rounds += 1;
        let a = self.m.at(n);
        st.last.insert(a.item, (n, a.sign));
        let entry = self.pm.entry(n);
        st.by_key.entry(key(&entry.sentence)).or_default().push(n);

        let retract: Vec<Formula> =
            st.plus_order.iter().filter(|x| self.witness(st, x, n).is_none()).cloned().collect();
        for x in retract {
            st.out.push(Assertion::minus(x));
            st.out_round.push(n);
        }
        if self.witness(st, &entry.sentence, n).is_some() {
            if st.plus_seen.insert(entry.sentence.clone()) {
                st.plus_order.push(entry.sentence.clone());
            }
            st.out.push(Assertion::plus(entry.sentence));
            st.out_round.push(n);
        }
    }

    /// Runs rounds until at least `len` entries exist.
    fn fill(&self, st: &mut CmState, len: u64) {
        while (st.out.len() as u64) < len {
            self.run_round(st);
        }
    }

    /// Runs rounds `0..=n`.
    fn fill_rounds(&self, st: &mut CmState, n: u64) {
        while st.rounds <= n {
            self.run_round(st);
        }
    }

    /// The entries emitted in round `n`.
    pub fn round_entries(&self, n: u64) -> Vec<Assertion<Formula>> {
        let mut st = self.state.lock().unwrap();
        self.fill_rounds(&mut st, n);
        st.out.iter().zip(&st.out_round).filter(|(_, r)| **r == n).map(|(a, _)| a.clone()).collect()
    }

    /// Round that emitted stream index `i`.
    pub fn round_of_index(&self, i: u64) -> u64 {
        let mut st = self.state.lock().unwrap();
        self.fill(&mut st, i + 1);
        st.out_round[i as usize]
    }

    /// n-stability witness, using the incremental indices.
    pub fn n_stability(&self, alpha: &Formula, n: u64) -> Option<NStabilityRecord> {
        let mut st = self.state.lock().unwrap();
        self.fill_rounds(&mut st, n);
        if st.rounds == n + 1 {
            return self.witness(&st, alpha, n);
        }
        drop(st);
        sentence_n_stable(self.m.as_ref(), alpha, n)
    }
}

impl<S: AssertionStream<Item = Formula>> AssertionStream for CmStream<S> {
    type Item = Formula;

    fn at(&self, n: u64) -> Assertion<Formula> {
        let mut st = self.state.lock().unwrap();
        self.fill(&mut st, n + 1);
        st.out[n as usize].clone()
    }

    fn last_occurrence(&self, b: &Formula, n: u64) -> Option<(u64, Sign)> {
        let mut st = self.state.lock().unwrap();
        self.fill(&mut st, n + 1);
        st.out[..=n as usize].iter().enumerate().rev().find(|(_, a)| a.item == *b).map(|(i, a)| (i as u64, a.sign))
    }
}
