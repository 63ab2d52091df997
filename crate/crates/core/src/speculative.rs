//! Speculative hypotheses: every `forall x phi(x)` with `phi` bounded is
//! asserted while no counterexample has been seen and retracted once one
//! is found, interleaved with a given sentence stream.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::enumerators::{round_of, round_start};
use crate::logic::eval::eval_closed;
use crate::logic::{substitute, BoundKind, Formula, Sentence, Term};
use crate::stabilization::{Assertion, AssertionStream, Sign};

/// The free variable of every enumerated hypothesis.
pub const HYP_VAR: &str = "x";

/// Evaluation fuel per instance.
pub const INSTANCE_FUEL: u64 = 50_000_000;

fn bound_var(depth: usize) -> String {
    format!("y{depth}")
}

#[derive(Default)]
struct Gen {
    terms: HashMap<(usize, usize), Arc<Vec<Term>>>,
    formulas: HashMap<(usize, usize), Arc<Vec<Formula>>>,
}

impl Gen {
    fn terms(&mut self, size: usize, depth: usize) -> Arc<Vec<Term>> {
        if let Some(t) = self.terms.get(&(size, depth)) {
            return Arc::clone(t);
        }
        let mut out = Vec::new();
        if size == 1 {
            out.push(Term::Zero);
            out.push(Term::var(HYP_VAR));
            out.extend((0..depth).map(|d| Term::Var(bound_var(d))));
        } else if size >= 2 {
            for t in self.terms(size - 1, depth).iter() {
                out.push(Term::succ(t.clone()));
            }
            for a in 1..size - 1 {
                let (l, r) = (self.terms(a, depth), self.terms(size - 1 - a, depth));
                for x in l.iter() {
                    for y in r.iter() {
                        out.push(Term::plus(x.clone(), y.clone()));
                        out.push(Term::times(x.clone(), y.clone()));
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.terms.insert((size, depth), Arc::clone(&out));
        out
    }

    fn formulas(&mut self, size: usize, depth: usize) -> Arc<Vec<Formula>> {
        if let Some(f) = self.formulas.get(&(size, depth)) {
            return Arc::clone(f);
        }
        let mut out = Vec::new();
        if size >= 3 {
            for a in 1..size - 1 {
                let (l, r) = (self.terms(a, depth), self.terms(size - 1 - a, depth));
                for x in l.iter() {
                    for y in r.iter() {
                        out.push(Formula::eq(x.clone(), y.clone()));
                        out.push(Formula::le(x.clone(), y.clone()));
                    }
                }
            }
            for f in self.formulas(size - 1, depth).iter() {
                out.push(Formula::not(f.clone()));
            }
            for a in 3..size - 1 {
                let (l, r) = (self.formulas(a, depth), self.formulas(size - 1 - a, depth));
                for x in l.iter() {
                    for y in r.iter() {
                        out.push(Formula::and(x.clone(), y.clone()));
                        out.push(Formula::or(x.clone(), y.clone()));
                        out.push(Formula::implies(x.clone(), y.clone()));
                    }
                }
            }
            let v = bound_var(depth);
            for tb in 1..size.saturating_sub(3) {
                let bounds = self.terms(tb, depth);
                let bodies = self.formulas(size - 1 - tb, depth + 1);
                for kind in BoundKind::ALL {
                    for t in bounds.iter() {
                        for body in bodies.iter() {
                            out.push(Formula::bounded(kind, &v, t.clone(), body.clone()));
                        }
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.formulas.insert((size, depth), Arc::clone(&out));
        out
    }
}

struct FormulaTable {
    gen: Gen,
    classes: Vec<Vec<Formula>>,
    offsets: Vec<u64>,
    positions: HashMap<Formula, u64>,
}

impl FormulaTable {
    fn total(&self) -> u64 {
        self.offsets.last().copied().unwrap_or(0) + self.classes.last().map_or(0, |c| c.len() as u64)
    }

    /// Adds the class of the next size.
    fn grow(&mut self) {
        let size = self.classes.len();
        let start = self.total();
        let mut class: Vec<(String, Formula)> = self
            .gen
            .formulas(size, 0)
            .iter()
            .filter(|f| f.free_vars().len() == 1 && f.has_free(HYP_VAR))
            .map(|f| (f.to_string(), f.clone()))
            .collect();
        class.sort();
        class.dedup();
        for (i, (_, f)) in class.iter().enumerate() {
            self.positions.insert(f.clone(), start + i as u64);
        }
        self.offsets.push(start);
        self.classes.push(class.into_iter().map(|(_, f)| f).collect());
    }
}

fn table() -> &'static Mutex<FormulaTable> {
    static T: OnceLock<Mutex<FormulaTable>> = OnceLock::new();
    T.get_or_init(|| {
        Mutex::new(FormulaTable { gen: Gen::default(), classes: Vec::new(), offsets: Vec::new(), positions: HashMap::new() })
    })
}

/// The `n`-th bounded formula whose only free variable is `x`, ordered by
/// size and then by printed form. Bound variables are named `y0, y1, ...`
/// by nesting depth.
pub fn formula_enum(n: u64) -> Formula {
    let mut t = table().lock().unwrap();
    while t.total() <= n {
        t.grow();
    }
    let c = t.offsets.partition_point(|o| *o <= n) - 1;
    t.classes[c][(n - t.offsets[c]) as usize].clone()
}

/// Inverse of [`formula_enum`]; `None` for formulas outside the
/// enumeration (other variable names, unbounded quantifiers, ...).
pub fn formula_index(phi: &Formula) -> Option<u64> {
    if !phi.is_delta0() {
        return None;
    }
    let size = phi.size();
    let mut t = table().lock().unwrap();
    while t.classes.len() <= size {
        t.grow();
    }
    t.positions.get(phi).copied()
}

/// Number of enumerated formulas of size at most `size`.
pub fn formula_count_upto(size: usize) -> u64 {
    let mut t = table().lock().unwrap();
    while t.classes.len() <= size {
        t.grow();
    }
    t.offsets[size] + t.classes[size].len() as u64
}

/// `forall x phi`.
pub fn alpha_of(phi: &Formula) -> Sentence {
    Formula::forall(HYP_VAR, phi.clone())
}

/// Evaluates `phi(m)`; running out of fuel counts as false.
pub fn instance_holds(phi: &Formula, m: u64) -> bool {
    match substitute(phi, m) {
        Ok(s) => eval_closed(&s, INSTANCE_FUEL).unwrap_or(false),
        Err(_) => false,
    }
}

/// Round `n` asserts `(phi, +)` for each of `formula_enum(0..=n)` whose
/// instances at `0..=n` all hold, and `(phi, -)` for the others.
#[derive(Default)]
pub struct FStream {
    /// Per formula: instances checked so far and the first counterexample.
    progress: Mutex<HashMap<u64, (u64, Option<u64>)>>,
}

pub fn f_stream() -> FStream {
    FStream::default()
}

impl FStream {
    /// Least counterexample of formula `i` that is at most `upto`.
    pub fn counterexample(&self, i: u64, upto: u64) -> Option<u64> {
        let (checked, found) = self.progress.lock().unwrap().get(&i).copied().unwrap_or((0, None));
        if let Some(c) = found {
            return (c <= upto).then_some(c);
        }
        if upto < checked {
            return None;
        }
        let phi = formula_enum(i);
        let found = (checked..=upto).find(|m| !instance_holds(&phi, *m));
        self.progress.lock().unwrap().insert(i, (upto + 1, found));
        found
    }

    fn sign(&self, i: u64, round: u64) -> Sign {
        Sign::from_bool(self.counterexample(i, round).is_none())
    }
}

impl AssertionStream for FStream {
    type Item = Formula;

    fn at(&self, n: u64) -> Assertion<Formula> {
        let (r, pos) = round_of(n);
        Assertion { item: formula_enum(pos), sign: self.sign(pos, r) }
    }

    fn last_occurrence(&self, b: &Formula, n: u64) -> Option<(u64, Sign)> {
        let pos = formula_index(b)?;
        let (r, p) = round_of(n);
        let (idx, round) = if pos <= p {
            (round_start(r) + pos, r)
        } else if r >= 1 && pos < r {
            (round_start(r - 1) + pos, r - 1)
        } else {
            return None;
        };
        Some((idx, self.sign(pos, round)))
    }
}

/// Odd indices replay `m`; index `2k` carries `f_stream` entry `k` with
/// the formula replaced by its universal closure.
pub struct MSpec<S> {
    m: S,
    f: FStream,
}

pub fn m_spec<S: AssertionStream<Item = Sentence>>(m: S) -> MSpec<S> {
    MSpec { m, f: f_stream() }
}

impl<S: AssertionStream<Item = Sentence>> MSpec<S> {
    pub fn inner(&self) -> &S {
        &self.m
    }

    pub fn hypotheses(&self) -> &FStream {
        &self.f
    }
}

impl<S: AssertionStream<Item = Sentence>> AssertionStream for MSpec<S> {
    type Item = Sentence;

    fn at(&self, n: u64) -> Assertion<Sentence> {
        if n % 2 == 1 {
            self.m.at(n / 2)
        } else {
            let a = self.f.at(n / 2);
            Assertion { item: alpha_of(&a.item), sign: a.sign }
        }
    }

    fn last_occurrence(&self, b: &Sentence, n: u64) -> Option<(u64, Sign)> {
        let odd = if n >= 1 { self.m.last_occurrence(b, (n - 1) / 2).map(|(k, s)| (2 * k + 1, s)) } else { None };
        let even = match b {
            Formula::Forall(v, phi) if v == HYP_VAR => self.f.last_occurrence(phi, n / 2).map(|(k, s)| (2 * k, s)),
            _ => None,
        };
        match (odd, even) {
            (Some(a), Some(b)) => Some(if a.0 > b.0 { a } else { b }),
            (a, b) => a.or(b),
        }
    }
}
